//! Point estimators of the Pickands dependence function `A(t)`.
//!
//! Two regimes:
//!
//! - **Known margins** ([`known_margin_estimate`]): the classical Pickands,
//!   Deheuvels, Hall–Tajvidi and Capéraà–Fougères–Genest estimators built
//!   from `Y_ij = −log F_j(X_ij)`.
//! - **Rank-based** (everything else): margins replaced by the empirical
//!   distributions, working from `Z_ij = −log F̂_nj(X_ij)`.
//!
//! The rank-based estimators are tied together by one weighted estimating
//! equation: `∫₀¹ {Ĉ_n(u^{1−t}, u^t) − u^α} λ(u,t) du = 0`. With the weight
//! `λ(u,t) = u⁻¹(−log u)^{−q}` this has a closed-form solution
//! ([`weighted_closed_form`]) that reduces to the rank-Pickands estimator at
//! `q = 0` and to the rank-CFG estimator in the limit `q → 1`. The adaptive
//! choice `q(t) = min{Â_CFG(t), 1}` gives [`adaptive_weighted`]. The general
//! equation is solved directly by [`weighted_root_solve`], which integrates
//! the empirical-copula term exactly over its jump points.
//!
//! None of the estimates are clamped to the Pickands envelope
//! `max(t, 1−t) ≤ A ≤ 1`; small samples can and do leave it.

use std::sync::Arc;

use crate::empirical::{diag_jump_points, PseudoSample};
use crate::error::{Error, Result};
use crate::numerics::{euler_gamma, find_root, log_gamma, GaussLegendre};

/// Observations with known margins: `Y_ij = −log F_j(X_ij) > 0`, plus the
/// angular ratios `z_i = Y_i1/(Y_i1 + Y_i2)` used by the CFG estimator.
#[derive(Debug, Clone)]
pub struct KnownMarginSample {
    y: Vec<(f64, f64)>,
    sorted_ratios: Vec<f64>,
}

impl KnownMarginSample {
    pub fn new(y: Vec<(f64, f64)>) -> Result<Self> {
        if y.is_empty() {
            return Err(Error::InvalidArgument("empty sample".into()));
        }
        if y.iter()
            .any(|&(a, b)| !(a > 0.0) || !(b > 0.0) || !a.is_finite() || !b.is_finite())
        {
            return Err(Error::InvalidArgument(
                "known-margin transforms Y must be positive and finite".into(),
            ));
        }
        let mut sorted_ratios: Vec<f64> = y.iter().map(|&(a, b)| a / (a + b)).collect();
        // Ratios of positive Y live in (0,1) on paper; astronomically skewed
        // pairs can still round onto the endpoints, where the step integral
        // degenerates.
        if sorted_ratios.iter().any(|&z| !(z > 0.0 && z < 1.0)) {
            return Err(Error::InvalidArgument(
                "angular ratios collapsed onto {0,1}; coordinates too disparate".into(),
            ));
        }
        sorted_ratios.sort_by(f64::total_cmp);
        Ok(Self { y, sorted_ratios })
    }

    /// Build from uniform margins: `Y_ij = −log U_ij`.
    pub fn from_uniform_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        Self::new(pairs.iter().map(|&(u, v)| (-u.ln(), -v.ln())).collect())
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }
}

/// Which known-margin estimator to evaluate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KnownMarginVariant {
    /// `A_P(t) = n / Σ min{Y_i1/t, Y_i2/(1−t)}`.
    Pickands,
    /// Pickands with the Deheuvels endpoint correction in the denominator.
    Deheuvels,
    /// Hall–Tajvidi: coordinates studentized by their sample means.
    HallTajvidi,
    /// Capéraà–Fougères–Genest with mixing weight `λ(t) ∈ [0, 1]`.
    CapFougeresGenest { lambda: f64 },
}

/// Exact integral of `(H_n(z) − z)/(z(1−z))` over `[a, b] ⊆ [0, 1]`, where
/// `H_n` is the empirical distribution of the sorted ratios. On a segment
/// where `H_n ≡ c` the antiderivative is `c·log z − (c−1)·log(1−z)`.
fn cfg_step_integral(sorted_ratios: &[f64], a: f64, b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let n = sorted_ratios.len() as f64;
    let segment = |c: f64, lo: f64, hi: f64| -> f64 {
        let eval = |z: f64| -> f64 {
            // The limits at the endpoints are finite exactly when the
            // segment level matches (c = 0 at z = 0, c = 1 at z = 1).
            let t1 = if c == 0.0 { 0.0 } else { c * z.ln() };
            let t2 = if c == 1.0 {
                0.0
            } else {
                (c - 1.0) * (1.0 - z).ln()
            };
            t1 - t2
        };
        eval(hi) - eval(lo)
    };
    let mut acc = 0.0;
    let mut left = a;
    let mut count = sorted_ratios.partition_point(|&z| z <= a);
    for &zi in sorted_ratios.iter().skip(count) {
        if zi >= b {
            break;
        }
        if zi > left {
            acc += segment(count as f64 / n, left, zi);
            left = zi;
        }
        count += 1;
    }
    acc + segment(count as f64 / n, left, b)
}

/// Evaluate one of the known-margin estimators at `t ∈ [0, 1]`.
///
/// The Pickands-type variants take their documented algebraic limits at the
/// endpoints. Note the convention of this regime: the first coordinate is
/// divided by `t` (the rank-based [`pickands_rank`] divides by `1−t`).
pub fn known_margin_estimate(
    sample: &KnownMarginSample,
    t: f64,
    variant: KnownMarginVariant,
) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidArgument(format!(
            "t must lie in [0,1], got {t}"
        )));
    }
    let n = sample.len() as f64;
    let min_sum = |t: f64| -> f64 {
        sample
            .y
            .iter()
            .map(|&(y1, y2)| (y1 / t).min(y2 / (1.0 - t)))
            .sum()
    };
    Ok(match variant {
        KnownMarginVariant::Pickands => {
            if t == 0.0 {
                n / sample.y.iter().map(|p| p.1).sum::<f64>()
            } else if t == 1.0 {
                n / sample.y.iter().map(|p| p.0).sum::<f64>()
            } else {
                n / min_sum(t)
            }
        }
        KnownMarginVariant::Deheuvels => {
            if t == 0.0 || t == 1.0 {
                1.0
            } else {
                let sum1: f64 = sample.y.iter().map(|p| p.0).sum();
                let sum2: f64 = sample.y.iter().map(|p| p.1).sum();
                n / (min_sum(t) - t * sum1 - (1.0 - t) * sum2 + n)
            }
        }
        KnownMarginVariant::HallTajvidi => {
            if t == 0.0 || t == 1.0 {
                1.0
            } else {
                let sum1: f64 = sample.y.iter().map(|p| p.0).sum();
                let sum2: f64 = sample.y.iter().map(|p| p.1).sum();
                let denom: f64 = sample
                    .y
                    .iter()
                    .map(|&(y1, y2)| (n * y1 / (t * sum1)).min(n * y2 / ((1.0 - t) * sum2)))
                    .sum();
                n / denom
            }
        }
        KnownMarginVariant::CapFougeresGenest { lambda } => {
            if !(0.0..=1.0).contains(&lambda) {
                return Err(Error::InvalidArgument(format!(
                    "CFG mixing weight must lie in [0,1], got {lambda}"
                )));
            }
            let lower = cfg_step_integral(&sample.sorted_ratios, 0.0, t);
            let upper = cfg_step_integral(&sample.sorted_ratios, t, 1.0);
            (lambda * lower - (1.0 - lambda) * upper).exp()
        }
    })
}

/// Rank-based Pickands estimator `Â_P(t) = n / Σ M_i(t)` with
/// `M_i(t) = min(Z_i1/(1−t), Z_i2/t)`. At the endpoints the surviving
/// coordinate's display limit `n/ΣZ_i·` is returned.
pub fn pickands_rank(ps: &PseudoSample, t: f64) -> f64 {
    let total: f64 = ps.diag_minima(t).iter().sum();
    ps.len() as f64 / total
}

/// Rank-based CFG estimator `Â_CFG(t) = exp{−γ − mean log M_i(t)}`, i.e.
/// the exponential of `−γ + ∫₀¹ {Ĉ_n(u^{1−t},u^t) − I(u > e⁻¹)}/(u log u) du`
/// evaluated exactly over the step function. Returns the true boundary
/// value 1 at `t ∈ {0, 1}`.
pub fn cfg_rank(ps: &PseudoSample, t: f64) -> f64 {
    assert!((0.0..=1.0).contains(&t), "t must lie in [0,1], got {t}");
    if t == 0.0 || t == 1.0 {
        return 1.0;
    }
    let mean_log: f64 = ps.diag_minima(t).iter().map(|m| m.ln()).sum::<f64>() / ps.len() as f64;
    (-euler_gamma() - mean_log).exp()
}

const Q_ONE_EPS: f64 = 1e-12;

/// Closed form of the weighted estimator family for the weight
/// `λ(u,t) = u⁻¹(−log u)^{−q}`:
///
/// `Â_w(t) = exp{−(log mean(M_i^{1−q}) − log Γ(2−q)) / (1−q)}`, `q ∈ [0, 1]`,
///
/// which is the rank-Pickands estimator at `q = 0` and is defined at `q = 1`
/// as the limit, the rank-CFG estimator.
pub fn weighted_closed_form(ps: &PseudoSample, t: f64, q: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::InvalidArgument(format!(
            "power-log exponent q must lie in [0,1], got {q}"
        )));
    }
    assert!((0.0..=1.0).contains(&t), "t must lie in [0,1], got {t}");
    if t == 0.0 || t == 1.0 {
        return Ok(1.0);
    }
    if 1.0 - q < Q_ONE_EPS {
        return Ok(cfg_rank(ps, t));
    }
    let one_minus_q = 1.0 - q;
    let mean: f64 = ps
        .diag_minima(t)
        .iter()
        .map(|&m| m.powf(one_minus_q))
        .sum::<f64>()
        / ps.len() as f64;
    let lg = log_gamma(2.0 - q)?;
    Ok((-(mean.ln() - lg) / one_minus_q).exp())
}

/// The adaptive member of the weighted family: `q(t) = min{Â_CFG(t), 1}`,
/// additionally floored at 0 so the weight stays defined when the small-
/// sample CFG estimate dips below zero.
pub fn adaptive_weighted(ps: &PseudoSample, t: f64) -> f64 {
    assert!((0.0..=1.0).contains(&t), "t must lie in [0,1], got {t}");
    if t == 0.0 || t == 1.0 {
        return 1.0;
    }
    let q = cfg_rank(ps, t).clamp(0.0, 1.0);
    weighted_closed_form(ps, t, q).expect("q clamped into [0,1]")
}

/// Pinned adaptive exponent, exposed for procedures that must freeze the
/// weight once per sample.
pub fn adaptive_q(ps: &PseudoSample, t: f64) -> f64 {
    cfg_rank(ps, t).clamp(0.0, 1.0)
}

/// How the power-log exponent `q(t)` is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QSource {
    Fixed(f64),
    /// `q(t) = min{Â_CFG(t), 1}` (floored at 0), frozen per sample.
    AdaptiveCfg,
}

/// `λ(u, t)`.
pub type WeightFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
/// `(a, b, t) ↦ ∫_a^b λ(u, t) du`.
pub type CumulativeWeightFn = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;

/// A custom estimating-equation weight `λ(u, t) ≥ 0`, with an optional exact
/// cumulative `∫_a^b λ(u, t) du`; quadrature fills in when absent.
#[derive(Clone)]
pub struct CustomWeight {
    pub lambda: WeightFn,
    pub cumulative: Option<CumulativeWeightFn>,
}

impl std::fmt::Debug for CustomWeight {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CustomWeight")
            .field("cumulative", &self.cumulative.is_some())
            .finish()
    }
}

/// Weight function for the estimating equation.
#[derive(Debug, Clone)]
pub enum WeightSpec {
    /// `λ(u,t) = u⁻¹(−log u)^{−q(t)}` with `q ∈ [0, 1]`.
    PowerLog(QSource),
    Custom(CustomWeight),
}

impl WeightSpec {
    /// The default power-log weight with the data-driven exponent.
    pub fn adaptive() -> Self {
        WeightSpec::PowerLog(QSource::AdaptiveCfg)
    }

    pub fn power_log(q: f64) -> Self {
        WeightSpec::PowerLog(QSource::Fixed(q))
    }

    /// Resolve any data-driven choice in the weight for one `(sample, t)`.
    pub fn resolve(&self, ps: &PseudoSample, t: f64) -> Result<ResolvedWeight> {
        Ok(match self {
            WeightSpec::PowerLog(source) => {
                let q = match source {
                    QSource::Fixed(q) => *q,
                    QSource::AdaptiveCfg => adaptive_q(ps, t),
                };
                if !(0.0..=1.0).contains(&q) {
                    return Err(Error::InvalidArgument(format!(
                        "power-log exponent q must lie in [0,1], got {q}"
                    )));
                }
                ResolvedWeight::PowerLog { q }
            }
            WeightSpec::Custom(w) => ResolvedWeight::Custom(w.clone()),
        })
    }
}

/// A weight with all data-driven parameters pinned.
#[derive(Debug, Clone)]
pub enum ResolvedWeight {
    PowerLog { q: f64 },
    Custom(CustomWeight),
}

impl ResolvedWeight {
    /// Evaluate `λ(u, t)`.
    pub fn lambda(&self, u: f64, t: f64) -> f64 {
        match self {
            ResolvedWeight::PowerLog { q } => (-u.ln()).powf(-q) / u,
            ResolvedWeight::Custom(w) => (w.lambda)(u, t),
        }
    }

    /// `∫_m^1 λ(u, t) du`, exact for the power-log family.
    fn cumulative_to_one(&self, m: f64, t: f64, quad: &GaussLegendre) -> Result<f64> {
        match self {
            ResolvedWeight::PowerLog { q } => {
                if 1.0 - *q < Q_ONE_EPS {
                    return Err(Error::NumericDomain(
                        "the q = 1 weight is not integrable up to u = 1; \
                         use the closed-form limit instead"
                            .into(),
                    ));
                }
                Ok((-m.ln()).powf(1.0 - q) / (1.0 - q))
            }
            ResolvedWeight::Custom(w) => match &w.cumulative {
                Some(cumulative) => Ok(cumulative(m, 1.0, t)),
                None => quad.integrate(m, 1.0, |u| (w.lambda)(u, t)),
            },
        }
    }

    /// `∫_0^1 u^α λ(u, t) du`, exact for the power-log family
    /// (`Γ(1−q)·α^{q−1}`), by quadrature otherwise.
    fn power_moment(&self, alpha: f64, t: f64, quad: &GaussLegendre) -> Result<f64> {
        match self {
            ResolvedWeight::PowerLog { q } => Ok(log_gamma(1.0 - q)?.exp() * alpha.powf(q - 1.0)),
            ResolvedWeight::Custom(w) => {
                quad.integrate(0.0, 1.0, |u| u.powf(alpha) * (w.lambda)(u, t))
            }
        }
    }
}

/// Default and expanded search brackets for the estimating-equation root.
const DEFAULT_BRACKET: (f64, f64) = (1e-6, 8.0);
const EXPANDED_BRACKET: (f64, f64) = (1e-8, 64.0);
const ROOT_TOL: f64 = 1e-12;

/// Solve the weighted estimating equation on a precomputed set of diagonal
/// jump points. `g(α) = (1/n)Σ Λ(m_i, 1) − ∫₀¹ u^α λ(u,t) du` is strictly
/// increasing in `α`, so the bracketed root is unique.
pub fn root_solve_from_jumps(
    jumps: &[f64],
    t: f64,
    weight: &ResolvedWeight,
    bracket: Option<(f64, f64)>,
) -> Result<f64> {
    if jumps.is_empty() {
        return Err(Error::InvalidArgument("no jump points supplied".into()));
    }
    let quad = GaussLegendre::new(200);
    let n = jumps.len() as f64;
    let mut step_term = 0.0;
    for &m in jumps {
        step_term += weight.cumulative_to_one(m, t, &quad)?;
    }
    step_term /= n;

    let g = |alpha: f64| -> Result<f64> { Ok(step_term - weight.power_moment(alpha, t, &quad)?) };

    let (lo0, hi0) = bracket.unwrap_or(DEFAULT_BRACKET);
    let mut lo = lo0;
    let mut hi = hi0;
    let mut g_lo = g(lo)?;
    let mut g_hi = g(hi)?;
    if g_lo.signum() == g_hi.signum() {
        lo = EXPANDED_BRACKET.0.min(lo);
        hi = EXPANDED_BRACKET.1.max(hi);
        g_lo = g(lo)?;
        g_hi = g(hi)?;
        if g_lo.signum() == g_hi.signum() {
            return Err(Error::NoRoot { lo, hi });
        }
    }
    let mut failure: Option<Error> = None;
    let root = find_root(
        |alpha| match g(alpha) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        },
        lo,
        hi,
        ROOT_TOL,
    )?;
    match failure {
        Some(e) => Err(e),
        None => Ok(root),
    }
}

/// Estimate `A(t)` by solving the weighted estimating equation
/// `∫₀¹ {Ĉ_n(u^{1−t}, u^t) − u^α} λ(u,t) du = 0` for `α`.
///
/// The empirical-copula term is integrated exactly as a step function over
/// its jump points; no quadrature error enters for the power-log family.
pub fn weighted_root_solve(
    ps: &PseudoSample,
    t: f64,
    weight: &WeightSpec,
    bracket: Option<(f64, f64)>,
) -> Result<f64> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "the estimating equation is solved for t in (0,1), got {t}"
        )));
    }
    let resolved = weight.resolve(ps, t)?;
    let jumps = diag_jump_points(ps, t);
    root_solve_from_jumps(&jumps, t, &resolved, bracket)
}

/// Optional post-processing, OFF by default everywhere: clamp a curve of
/// estimates into the Pickands envelope `[max(t,1−t), 1]` and replace it by
/// its greatest convex minorant, with `A(0) = A(1) = 1` pinned.
///
/// Raw estimates deliberately ignore the envelope; apply this only when a
/// valid dependence function is required downstream.
pub fn project_to_pickands_envelope(points: &[(f64, f64)]) -> Result<Vec<(f64, f64)>> {
    if points.windows(2).any(|w| w[0].0 >= w[1].0) {
        return Err(Error::InvalidArgument(
            "projection needs strictly increasing t values".into(),
        ));
    }
    if points.iter().any(|&(t, _)| !(0.0..=1.0).contains(&t)) {
        return Err(Error::InvalidArgument("t values must lie in [0,1]".into()));
    }
    // Clamp into the envelope, then pin the exact boundary values.
    let mut clamped: Vec<(f64, f64)> = Vec::with_capacity(points.len() + 2);
    if points.first().map(|p| p.0) != Some(0.0) {
        clamped.push((0.0, 1.0));
    }
    for &(t, v) in points {
        if t == 0.0 || t == 1.0 {
            clamped.push((t, 1.0));
        } else {
            clamped.push((t, v.clamp(t.max(1.0 - t), 1.0)));
        }
    }
    if points.last().map(|p| p.0) != Some(1.0) {
        clamped.push((1.0, 1.0));
    }
    // Lower convex hull by monotone chain. Points sit above the convex
    // envelope, so the hull does too.
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(clamped.len());
    for &p in &clamped {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
            if cross <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    // Evaluate the hull back at the requested t values.
    let mut out = Vec::with_capacity(points.len());
    let mut seg = 0;
    for &(t, _) in points {
        while seg + 1 < hull.len() && hull[seg + 1].0 < t {
            seg += 1;
        }
        let (t0, v0) = hull[seg];
        let (t1, v1) = hull[(seg + 1).min(hull.len() - 1)];
        let value = if t1 == t0 {
            v0
        } else {
            v0 + (v1 - v0) * (t - t0) / (t1 - t0)
        };
        out.push((t, value));
    }
    Ok(out)
}
