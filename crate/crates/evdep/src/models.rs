//! Parametric bivariate extreme-value copulas.
//!
//! Each family is specified by its Pickands dependence function `A`:
//!
//! - Gumbel: `A(t) = {t^θ + (1−t)^θ}^{1/θ}`, θ ≥ 1;
//! - Hüsler–Reiss: `A(t) = (1−t)·Φ(θ + log((1−t)/t)/(2θ)) + t·Φ(θ + log(t/(1−t))/(2θ))`, θ > 0;
//! - Tawn: `A(t) = 1 − θt + θt²`, θ ∈ [0, 1].
//!
//! The copula itself is `C(u,v) = exp{log(uv)·A(log v / log uv)}`, with the
//! boundary values supplied by continuity. Sampling uses conditional
//! inversion on `∂C/∂u`, so one code path serves every family exactly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{std_normal_cdf, RngStream};
use rand::Rng;

/// Extreme-value copula family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Gumbel,
    HuslerReiss,
    Tawn,
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Family::Gumbel => "gumbel",
            Family::HuslerReiss => "husler_reiss",
            Family::Tawn => "tawn",
        };
        f.write_str(name)
    }
}

/// A parametric extreme-value copula with dependence function `A`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PickandsModel {
    family: Family,
    theta: f64,
}

/// Pairs drawn from a copula, plus the number of numerically degenerate
/// draws that had to be redrawn during conditional inversion.
#[derive(Debug, Clone)]
pub struct CopulaSample {
    pub pairs: Vec<(f64, f64)>,
    pub resamples: u64,
}

const INVERSION_TOL: f64 = 1e-10;

impl PickandsModel {
    /// Validate the parameter range and build the model.
    pub fn new(family: Family, theta: f64) -> Result<Self> {
        let ok = theta.is_finite()
            && match family {
                Family::Gumbel => theta >= 1.0,
                Family::HuslerReiss => theta > 0.0,
                Family::Tawn => (0.0..=1.0).contains(&theta),
            };
        if !ok {
            return Err(Error::InvalidParameter(format!(
                "theta = {theta} is outside the admissible range for the {family} family"
            )));
        }
        Ok(Self { family, theta })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// The dependence function `A(t)` on `[0, 1]`; the endpoints are exactly 1.
    pub fn pickands(&self, t: f64) -> f64 {
        assert!((0.0..=1.0).contains(&t), "t must lie in [0,1], got {t}");
        if t == 0.0 || t == 1.0 {
            return 1.0;
        }
        let th = self.theta;
        match self.family {
            Family::Gumbel => (t.powf(th) + (1.0 - t).powf(th)).powf(1.0 / th),
            Family::HuslerReiss => {
                let s = ((1.0 - t) / t).ln() / (2.0 * th);
                (1.0 - t) * std_normal_cdf(th + s) + t * std_normal_cdf(th - s)
            }
            Family::Tawn => 1.0 - th * t + th * t * t,
        }
    }

    /// Derivative `A′(t)` for `t` strictly inside (0, 1).
    pub fn pickands_prime(&self, t: f64) -> Result<f64> {
        if !(t > 0.0 && t < 1.0) {
            return Err(Error::NumericDomain(format!(
                "A' is only evaluated on the open interval (0,1), got t = {t}"
            )));
        }
        let th = self.theta;
        Ok(match self.family {
            Family::Gumbel => {
                (t.powf(th - 1.0) - (1.0 - t).powf(th - 1.0))
                    * (t.powf(th) + (1.0 - t).powf(th)).powf(1.0 / th - 1.0)
            }
            Family::HuslerReiss => {
                // Chain rule gives Φ(b) − Φ(a) plus density terms that cancel
                // exactly, because (1−t)·φ(a) = t·φ(b) for this family.
                let s = ((1.0 - t) / t).ln() / (2.0 * th);
                std_normal_cdf(th - s) - std_normal_cdf(th + s)
            }
            Family::Tawn => -th + 2.0 * th * t,
        })
    }

    /// The copula `C(u, v)`, with boundary values by continuity.
    pub fn cdf(&self, u: f64, v: f64) -> f64 {
        debug_assert!((0.0..=1.0).contains(&u) && (0.0..=1.0).contains(&v));
        if u == 0.0 || v == 0.0 {
            return 0.0;
        }
        if u == 1.0 {
            return v;
        }
        if v == 1.0 {
            return u;
        }
        let log_u = u.ln();
        let log_v = v.ln();
        let s = log_u + log_v;
        (s * self.pickands(log_v / s)).exp()
    }

    /// `∂C/∂u` for `(u, v)` strictly inside the unit square.
    pub fn partial_u(&self, u: f64, v: f64) -> Result<f64> {
        let (c, w) = self.interior_cdf(u, v)?;
        let a = self.pickands(w);
        let ap = self.pickands_prime(w)?;
        Ok((c / u * (a - w * ap)).clamp(0.0, 1.0))
    }

    /// `∂C/∂v` for `(u, v)` strictly inside the unit square.
    pub fn partial_v(&self, u: f64, v: f64) -> Result<f64> {
        let (c, w) = self.interior_cdf(u, v)?;
        let a = self.pickands(w);
        let ap = self.pickands_prime(w)?;
        Ok((c / v * (a + (1.0 - w) * ap)).clamp(0.0, 1.0))
    }

    fn interior_cdf(&self, u: f64, v: f64) -> Result<(f64, f64)> {
        if !(u > 0.0 && u < 1.0 && v > 0.0 && v < 1.0) {
            return Err(Error::NumericDomain(format!(
                "partial derivatives need (u,v) in the open unit square, got ({u}, {v})"
            )));
        }
        let log_u = u.ln();
        let log_v = v.ln();
        let s = log_u + log_v;
        let w = log_v / s;
        Ok(((s * self.pickands(w)).exp(), w))
    }

    /// Draw `n` i.i.d. pairs with copula `C` by conditional inversion:
    /// sample `U` uniform, then solve `∂C/∂u(U, v) = p` for `v`.
    ///
    /// Draws for which the inversion bracket degenerates numerically are
    /// redrawn and counted in [`CopulaSample::resamples`].
    pub fn sample(&self, n: usize, stream: RngStream) -> CopulaSample {
        assert!(n >= 1, "sample size must be at least 1");
        let mut rng = stream.rng();
        let mut pairs = Vec::with_capacity(n);
        let mut resamples = 0u64;
        while pairs.len() < n {
            let u: f64 = rng.random();
            let p: f64 = rng.random();
            if u <= 0.0 || p <= 0.0 {
                resamples += 1;
                continue;
            }
            match self.invert_conditional(u, p) {
                Some(v) => pairs.push((u, v)),
                None => resamples += 1,
            }
        }
        CopulaSample { pairs, resamples }
    }

    /// Solve `∂C/∂u(u, v) = p` for `v` by bisection. `None` marks a
    /// numerically degenerate draw (u so close to 0 or 1 that the bracket
    /// or an evaluation collapses); the caller redraws.
    fn invert_conditional(&self, u: f64, p: f64) -> Option<f64> {
        let mut lo = 1e-16;
        let mut hi = 1.0 - 1e-16;
        let f = |v: f64| self.partial_u(u, v).ok().map(|c| c - p);
        if !(f(lo)? < 0.0 && f(hi)? > 0.0) {
            return None;
        }
        while hi - lo > INVERSION_TOL {
            let mid = 0.5 * (lo + hi);
            if f(mid)? < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(0.5 * (lo + hi))
    }
}
