//! Rank transforms and the empirical copula along the diagonal curve.
//!
//! All estimators in this crate act on pseudo-observations
//! `(rank/(n+1), rank/(n+1))` rather than raw data, so they are invariant
//! under strictly increasing marginal transforms. The empirical copula is
//! only ever needed on the one-parameter curve `(u^{1−t}, u^t)`, where it is
//! a step function of `u` with jump points
//! `m_i(t) = max(p_{i1}^{1/(1−t)}, p_{i2}^{1/t})` — equivalently
//! `−log m_i(t) = min(Z_{i1}/(1−t), Z_{i2}/t)`.

use crate::error::{Error, Result};

/// A symmetric smoothing kernel with support `[-1, 1]`.
pub trait SmoothKernel: Send + Sync {
    /// Density `k(x)`; zero outside `[-1, 1]`.
    fn density(&self, x: f64) -> f64;
    /// Cumulative `K(x) = ∫_{-1}^x k`; saturates at 0 and 1.
    fn cumulative(&self, x: f64) -> f64;
}

/// `k(x) = (15/16)(1 − x²)²`, with closed-form cumulative
/// `K(x) = 1/2 + (15/16)(x − 2x³/3 + x⁵/5)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct QuarticSquared;

impl SmoothKernel for QuarticSquared {
    fn density(&self, x: f64) -> f64 {
        if x.abs() >= 1.0 {
            0.0
        } else {
            let s = 1.0 - x * x;
            15.0 / 16.0 * s * s
        }
    }

    fn cumulative(&self, x: f64) -> f64 {
        if x <= -1.0 {
            0.0
        } else if x >= 1.0 {
            1.0
        } else {
            0.5 + 15.0 / 16.0 * (x - 2.0 * x.powi(3) / 3.0 + x.powi(5) / 5.0)
        }
    }
}

/// Rank-transformed data: pseudo-observations `F̂_nj(X_ij) = rank/(n+1)`
/// and their negative logs `Z_ij`.
#[derive(Debug, Clone)]
pub struct PseudoSample {
    pseudo: Vec<(f64, f64)>,
    z: Vec<(f64, f64)>,
    ranks: Vec<(u32, u32)>,
}

/// 1-based ranks of one column; fails on ties.
fn column_ranks(values: &[f64], column: usize) -> Result<Vec<u32>> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    for w in order.windows(2) {
        if values[w[0]] == values[w[1]] {
            return Err(Error::TiedData { column });
        }
    }
    let mut ranks = vec![0u32; n];
    for (pos, &idx) in order.iter().enumerate() {
        ranks[idx] = pos as u32 + 1;
    }
    Ok(ranks)
}

impl PseudoSample {
    /// Rank both columns of `data` and form pseudo-observations with the
    /// `n+1` scaling. Requires `n ≥ 2` and no ties within a column.
    pub fn from_data(data: &[(f64, f64)]) -> Result<Self> {
        let n = data.len();
        if n < 2 {
            return Err(Error::InvalidArgument(format!(
                "need at least 2 observations, got {n}"
            )));
        }
        if data.iter().any(|&(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(Error::MalformedData("non-finite observation".into()));
        }
        let col1: Vec<f64> = data.iter().map(|p| p.0).collect();
        let col2: Vec<f64> = data.iter().map(|p| p.1).collect();
        let r1 = column_ranks(&col1, 1)?;
        let r2 = column_ranks(&col2, 2)?;
        let scale = 1.0 / (n as f64 + 1.0);
        let pseudo: Vec<(f64, f64)> = r1
            .iter()
            .zip(&r2)
            .map(|(&a, &b)| (a as f64 * scale, b as f64 * scale))
            .collect();
        let z = pseudo.iter().map(|&(u, v)| (-u.ln(), -v.ln())).collect();
        let ranks = r1.into_iter().zip(r2).collect();
        Ok(Self { pseudo, z, ranks })
    }

    pub fn len(&self) -> usize {
        self.pseudo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pseudo.is_empty()
    }

    /// Pseudo-observations `(F̂_n1(X_i1), F̂_n2(X_i2))`.
    pub fn pseudo(&self) -> &[(f64, f64)] {
        &self.pseudo
    }

    /// `Z_ij = −log F̂_nj(X_ij)`.
    pub fn z(&self) -> &[(f64, f64)] {
        &self.z
    }

    /// 1-based ranks per column.
    pub fn ranks(&self) -> &[(u32, u32)] {
        &self.ranks
    }

    /// `M_i(t) = min(Z_i1/(1−t), Z_i2/t)`, the minima driving every
    /// rank-based estimator. At `t ∈ {0, 1}` the degenerate coordinate is
    /// dropped.
    pub fn diag_minima(&self, t: f64) -> Vec<f64> {
        assert!((0.0..=1.0).contains(&t), "t must lie in [0,1], got {t}");
        self.z
            .iter()
            .map(|&(z1, z2)| {
                if t == 0.0 {
                    z1
                } else if t == 1.0 {
                    z2
                } else {
                    (z1 / (1.0 - t)).min(z2 / t)
                }
            })
            .collect()
    }
}

/// Threshold `m_i(t)` of observation `i`: the smallest `u` at which the
/// diagonal indicator `I(p_{i1} ≤ u^{1−t}, p_{i2} ≤ u^t)` fires.
fn diag_threshold(pseudo: (f64, f64), t: f64) -> f64 {
    if t == 0.0 {
        pseudo.0
    } else if t == 1.0 {
        pseudo.1
    } else {
        pseudo.0.powf(1.0 / (1.0 - t)).max(pseudo.1.powf(1.0 / t))
    }
}

/// Empirical copula evaluated on the diagonal curve:
/// `Ĉ_n(u^{1−t}, u^t) = (1/n) Σ I(u ≥ m_i(t))`.
pub fn empirical_copula_diag(ps: &PseudoSample, t: f64, u: f64) -> f64 {
    assert!((0.0..=1.0).contains(&t), "t must lie in [0,1], got {t}");
    let count = ps
        .pseudo
        .iter()
        .filter(|&&p| diag_threshold(p, t) <= u)
        .count();
    count as f64 / ps.len() as f64
}

/// The sorted jump points `m_i(t)` of the diagonal step function.
pub fn diag_jump_points(ps: &PseudoSample, t: f64) -> Vec<f64> {
    assert!((0.0..=1.0).contains(&t), "t must lie in [0,1], got {t}");
    let mut m: Vec<f64> = ps.pseudo.iter().map(|&p| diag_threshold(p, t)).collect();
    m.sort_by(f64::total_cmp);
    m
}

/// Kernel-smoothed empirical copula on the diagonal curve:
/// `Ĉ_n^s(u^{1−t}, u^t) = (1/n) Σ K((u − p_{i1}^{1/(1−t)})/h)·K((u − p_{i2}^{1/t})/h)`.
pub fn smoothed_copula_diag(
    ps: &PseudoSample,
    t: f64,
    u: f64,
    h: f64,
    kernel: &dyn SmoothKernel,
) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "bandwidth must be positive, got {h}"
        )));
    }
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "smoothing on the diagonal needs t in (0,1), got {t}"
        )));
    }
    let e1 = 1.0 / (1.0 - t);
    let e2 = 1.0 / t;
    let sum: f64 = ps
        .pseudo
        .iter()
        .map(|&(p1, p2)| {
            kernel.cumulative((u - p1.powf(e1)) / h) * kernel.cumulative((u - p2.powf(e2)) / h)
        })
        .sum();
    Ok(sum / ps.len() as f64)
}

/// Leave-one-out smoothed diagonal copula. The marginals drop observation
/// `exclude_i` but keep divisor `n`:
/// `F̂_{nj,−i}(X_lj) = F̂_nj(X_lj)·(n+1)/n − I(X_ij ≤ X_lj)/n`,
/// and the outer average runs over the `n−1` remaining observations.
pub fn smoothed_copula_diag_loo(
    ps: &PseudoSample,
    exclude_i: usize,
    t: f64,
    u: f64,
    h: f64,
    kernel: &dyn SmoothKernel,
) -> Result<f64> {
    let n = ps.len();
    if n < 3 {
        return Err(Error::InvalidArgument(format!(
            "leave-one-out smoothing needs n ≥ 3, got {n}"
        )));
    }
    if !(h > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "bandwidth must be positive, got {h}"
        )));
    }
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "smoothing on the diagonal needs t in (0,1), got {t}"
        )));
    }
    assert!(exclude_i < n, "exclude_i out of range");
    let e1 = 1.0 / (1.0 - t);
    let e2 = 1.0 / t;
    let nf = n as f64;
    let (ri1, ri2) = ps.ranks[exclude_i];
    let mut sum = 0.0;
    for (j, &(rj1, rj2)) in ps.ranks.iter().enumerate() {
        if j == exclude_i {
            continue;
        }
        // Ranks are distinct, so I(X_i ≤ X_j) = I(r_i < r_j) for j ≠ i.
        let f1 = (rj1 - u32::from(ri1 < rj1)) as f64 / nf;
        let f2 = (rj2 - u32::from(ri2 < rj2)) as f64 / nf;
        sum += kernel.cumulative((u - f1.powf(e1)) / h) * kernel.cumulative((u - f2.powf(e2)) / h);
    }
    Ok(sum / (nf - 1.0))
}
