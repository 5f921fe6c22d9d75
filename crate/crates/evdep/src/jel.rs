//! Jackknife empirical likelihood (JEL) confidence intervals for `A(t)`.
//!
//! The construction, for a fixed `t ∈ (0,1)`:
//!
//! 1. smooth the empirical copula along the diagonal curve with a kernel of
//!    bandwidth `h`;
//! 2. form jackknife pseudo-values
//!    `V̂_i(u) = n·Ĉ_n^s(u^{1−t},u^t) − (n−1)·Ĉ_{n,−i}^s(u^{1−t},u^t)`;
//! 3. integrate them against the weight over the trimmed interval,
//!    `Q_i(θ) = ∫_{a_n}^{1−b_n} {V̂_i(u) − u^θ} λ(u,t) du`;
//! 4. profile the empirical likelihood of the estimating equation
//!    `Σ p_i Q_i(θ) = 0`, giving `l(θ) = 2Σ log{1 + βQ_i(θ)}` with `β`
//!    solving the Lagrange condition;
//! 5. calibrate with the χ²(1) limit: the level-γ interval is
//!    `{θ : l(θ) ≤ χ²_γ}`.
//!
//! Self-studentization means no asymptotic variance ever has to be
//! estimated. Leave-one-out marginals keep divisor `n` (not `n−1`) and are
//! computed through an exact rank identity; a from-scratch re-ranking
//! oracle in the tests pins the algebra down.

use std::sync::Arc;

use crate::empirical::{PseudoSample, QuarticSquared, SmoothKernel};
use crate::error::{Error, Result};
use crate::estimators::{ResolvedWeight, WeightSpec};
use crate::numerics::{chi2_quantile_1df, find_root, GaussLegendre};

/// Bandwidth choice for the smoothed empirical copula.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BandwidthRule {
    /// `h = scale · n^{−1/3}`; the cube-root rate is optimal for smoothed
    /// distribution estimation.
    ScaledCubeRoot {
        scale: f64,
    },
    Fixed(f64),
}

/// Trimming bounds `(a_n, b_n)` for the estimating integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TrimmingRule {
    Constant {
        a: f64,
        b: f64,
    },
    /// `a_n = d1·n^{−a}`, `b_n = d2·n^{−b}` rate schedules.
    RateSchedule {
        d1: f64,
        a_exp: f64,
        d2: f64,
        b_exp: f64,
    },
}

/// Tuning parameters of the JEL procedure.
#[derive(Clone)]
pub struct JelConfig {
    pub bandwidth: BandwidthRule,
    pub trimming: TrimmingRule,
    pub kernel: Arc<dyn SmoothKernel>,
    pub weight: WeightSpec,
    pub quad_order: usize,
    pub beta_tol: f64,
    /// Hard bounds for the θ search; the initial bracket
    /// `[0.5·max(t,1−t), 1.5]` expands on demand up to these.
    pub theta_min: f64,
    pub theta_max: f64,
}

impl Default for JelConfig {
    fn default() -> Self {
        Self {
            bandwidth: BandwidthRule::ScaledCubeRoot { scale: 0.5 },
            trimming: TrimmingRule::Constant { a: 0.1, b: 0.1 },
            kernel: Arc::new(QuarticSquared),
            weight: WeightSpec::adaptive(),
            quad_order: 200,
            beta_tol: 1e-11,
            theta_min: 1e-8,
            theta_max: 64.0,
        }
    }
}

impl std::fmt::Debug for JelConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("JelConfig")
            .field("bandwidth", &self.bandwidth)
            .field("trimming", &self.trimming)
            .field("weight", &self.weight)
            .field("quad_order", &self.quad_order)
            .field("beta_tol", &self.beta_tol)
            .finish()
    }
}

impl JelConfig {
    pub fn bandwidth_for(&self, n: usize) -> f64 {
        match self.bandwidth {
            BandwidthRule::ScaledCubeRoot { scale } => scale * (n as f64).powf(-1.0 / 3.0),
            BandwidthRule::Fixed(h) => h,
        }
    }

    pub fn trimming_for(&self, n: usize) -> (f64, f64) {
        match self.trimming {
            TrimmingRule::Constant { a, b } => (a, b),
            TrimmingRule::RateSchedule {
                d1,
                a_exp,
                d2,
                b_exp,
            } => {
                let nf = n as f64;
                (d1 * nf.powf(-a_exp), d2 * nf.powf(-b_exp))
            }
        }
    }

    /// Check the tuning constraints for sample size `n`; returns advisory
    /// warnings (e.g. bandwidth too large relative to the trimming).
    pub fn validate_for(&self, n: usize) -> Result<Vec<String>> {
        let h = self.bandwidth_for(n);
        let (a, b) = self.trimming_for(n);
        if !(h > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "bandwidth must be positive, got {h}"
            )));
        }
        if !(a > 0.0 && b > 0.0 && a < 1.0 - b) {
            return Err(Error::InvalidConfig(format!(
                "trimming must satisfy 0 < a_n < 1 - b_n < 1, got a_n={a}, b_n={b}"
            )));
        }
        if self.quad_order == 0 {
            return Err(Error::InvalidConfig(
                "quadrature order must be positive".into(),
            ));
        }
        if !(self.beta_tol > 0.0) {
            return Err(Error::InvalidConfig("beta_tol must be positive".into()));
        }
        let mut warnings = Vec::new();
        if h / a > 0.5 {
            warnings.push(format!(
                "h/a_n = {:.3} exceeds 0.5; bias may be large",
                h / a
            ));
        }
        if h / b > 0.5 {
            warnings.push(format!(
                "h/b_n = {:.3} exceeds 0.5; bias may be large",
                h / b
            ));
        }
        Ok(warnings)
    }
}

/// Jackknife pseudo-value combination `n·full − (n−1)·leave-one-out`.
#[inline]
pub fn jackknife_combine(n: usize, full: f64, leave_one_out: f64) -> f64 {
    n as f64 * full - (n as f64 - 1.0) * leave_one_out
}

/// Fenwick tree over rank positions carrying four running sums, used to
/// accumulate the quadrant decomposition of the leave-one-out sums.
struct Fenwick4 {
    tree: Vec<[f64; 4]>,
}

impl Fenwick4 {
    fn new(n: usize) -> Self {
        Self {
            tree: vec![[0.0; 4]; n + 1],
        }
    }

    fn add(&mut self, mut pos: usize, vals: [f64; 4]) {
        while pos < self.tree.len() {
            for (slot, v) in self.tree[pos].iter_mut().zip(vals) {
                *slot += v;
            }
            pos += pos & pos.wrapping_neg();
        }
    }

    /// Sum over positions `1..=pos`.
    fn prefix(&self, mut pos: usize) -> [f64; 4] {
        let mut acc = [0.0; 4];
        while pos > 0 {
            for (a, v) in acc.iter_mut().zip(self.tree[pos]) {
                *a += v;
            }
            pos -= pos & pos.wrapping_neg();
        }
        acc
    }
}

/// Compute the pseudo-value matrix `V[i][k]` at the given `u` nodes.
///
/// The leave-one-out marginals satisfy
/// `F̂_{nj,−i}(X_lj) = (rank_lj − I(rank_ij < rank_lj))/n`, so for each node
/// only `n+1` distinct kernel factors per coordinate can occur. Summing
/// them over rank quadrants with a Fenwick tree brings the whole matrix to
/// `O(K · n log n)` instead of `O(K · n²)`.
fn pseudovalue_matrix(
    ps: &PseudoSample,
    t: f64,
    u_nodes: &[f64],
    h: f64,
    kernel: &dyn SmoothKernel,
) -> Vec<Vec<f64>> {
    let n = ps.len();
    let nf = n as f64;
    let e1 = 1.0 / (1.0 - t);
    let e2 = 1.0 / t;
    let ranks = ps.ranks();

    // Thresholds indexed by rank value: loo tables over r = 0..=n and the
    // full-sample tables over r = 1..=n.
    let loo1: Vec<f64> = (0..=n).map(|r| (r as f64 / nf).powf(e1)).collect();
    let loo2: Vec<f64> = (0..=n).map(|r| (r as f64 / nf).powf(e2)).collect();
    let full1: Vec<f64> = (0..=n).map(|r| (r as f64 / (nf + 1.0)).powf(e1)).collect();
    let full2: Vec<f64> = (0..=n).map(|r| (r as f64 / (nf + 1.0)).powf(e2)).collect();

    // Observation index by first-coordinate rank.
    let mut by_r1 = vec![0usize; n + 1];
    for (i, &(r1, _)) in ranks.iter().enumerate() {
        by_r1[r1 as usize] = i;
    }

    let mut v = vec![vec![0.0; u_nodes.len()]; n];
    let mut ka = vec![0.0; n + 1];
    let mut kb = vec![0.0; n + 1];
    let mut col10 = vec![0.0; n + 2];
    let mut col11 = vec![0.0; n + 2];

    for (k, &u) in u_nodes.iter().enumerate() {
        // n·Ĉ_n^s(u) over the full-sample marginals.
        let mut n_c_full = 0.0;
        for &(r1, r2) in ranks {
            n_c_full += kernel.cumulative((u - full1[r1 as usize]) / h)
                * kernel.cumulative((u - full2[r2 as usize]) / h);
        }

        for r in 0..=n {
            ka[r] = kernel.cumulative((u - loo1[r]) / h);
            kb[r] = kernel.cumulative((u - loo2[r]) / h);
        }

        // Column prefix sums over the second-coordinate rank.
        col10.iter_mut().for_each(|x| *x = 0.0);
        col11.iter_mut().for_each(|x| *x = 0.0);
        let mut tot11 = 0.0;
        for &(r1, r2) in ranks {
            let (r1, r2) = (r1 as usize, r2 as usize);
            let p10 = ka[r1 - 1] * kb[r2];
            let p11 = ka[r1 - 1] * kb[r2 - 1];
            col10[r2 + 1] += p10;
            col11[r2 + 1] += p11;
            tot11 += p11;
        }
        for s in 1..=(n + 1) {
            col10[s] += col10[s - 1];
            col11[s] += col11[s - 1];
        }

        // Sweep observations in increasing first-coordinate rank. When the
        // sweep reaches rank r1, the tree holds exactly the points with
        // smaller r1, so prefix queries give the dominated-quadrant sums.
        let mut fen = Fenwick4::new(n);
        let mut rowsum01 = 0.0;
        let mut rowsum11 = 0.0;
        for r1 in 1..=n {
            let i = by_r1[r1];
            let r2 = ranks[i].1 as usize;
            let p00 = ka[r1] * kb[r2];
            let p10 = ka[r1 - 1] * kb[r2];
            let p01 = ka[r1] * kb[r2 - 1];
            let p11 = ka[r1 - 1] * kb[r2 - 1];

            let [d00, d10, d01, d11] = fen.prefix(r2 - 1);
            // Σ_{j≠i} of the kernel product with the shift pattern that the
            // pair (i, j) induces, assembled from the four rank quadrants.
            let loo_sum = d00
                + (col10[r2] - d10)
                + (rowsum01 - d01)
                + (tot11 - rowsum11 - col11[r2] + d11 - p11);
            v[i][k] = n_c_full - loo_sum;

            fen.add(r2, [p00, p10, p01, p11]);
            rowsum01 += p01;
            rowsum11 += p11;
        }
    }
    v
}

/// Jackknife pseudo-values `V̂_i(u, t)` evaluated at `u_nodes`.
///
/// Returns an `n × len(u_nodes)` matrix, computed once per `(sample, t)`.
pub fn jackknife_pseudovalues(
    ps: &PseudoSample,
    t: f64,
    u_nodes: &[f64],
    cfg: &JelConfig,
) -> Result<Vec<Vec<f64>>> {
    if ps.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "jackknife pseudo-values need n ≥ 3, got {}",
            ps.len()
        )));
    }
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "t must lie in (0,1), got {t}"
        )));
    }
    cfg.validate_for(ps.len())?;
    let h = cfg.bandwidth_for(ps.len());
    Ok(pseudovalue_matrix(ps, t, u_nodes, h, cfg.kernel.as_ref()))
}

/// `Q_i(θ) = ∫ {V̂_i(u) − u^θ} λ(u,t) du` over the supplied `(u, weight)`
/// quadrature nodes; the `u^θ` term shares the same nodes.
pub fn q_values(
    v: &[Vec<f64>],
    nodes: &[(f64, f64)],
    t: f64,
    theta: f64,
    weight: &ResolvedWeight,
) -> Result<Vec<f64>> {
    if !(theta > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "theta must be positive, got {theta}"
        )));
    }
    let mut lambda = Vec::with_capacity(nodes.len());
    for &(u, _) in nodes {
        let l = weight.lambda(u, t);
        if !l.is_finite() {
            return Err(Error::NumericDomain(format!(
                "weight not finite at u = {u}"
            )));
        }
        lambda.push(l);
    }
    Ok(v.iter()
        .map(|row| {
            row.iter()
                .zip(nodes)
                .zip(&lambda)
                .map(|((&vik, &(u, w)), &l)| w * l * (vik - u.powf(theta)))
                .sum()
        })
        .collect())
}

/// Solve the Lagrange condition `(1/n) Σ Q_i/(1 + βQ_i) = 0` for `β`.
///
/// Requires `min Q < 0 < max Q`; the solution is then unique in the open
/// interval `(−1/max Q, −1/min Q)`, on which `1 + βQ_i > 0` for every `i`.
pub fn solve_lagrange(q: &[f64], tol: f64) -> Result<f64> {
    let max_q = q.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min_q = q.iter().copied().fold(f64::INFINITY, f64::min);
    if !(min_q < 0.0 && 0.0 < max_q) {
        return Err(Error::HullViolation { min_q, max_q });
    }
    let n = q.len() as f64;
    let scale = 1.0 + q.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
    // Guard band keeps every 1 + βQ_i above ~1e-10.
    let lo_end = -(1.0 - 1e-10) / max_q;
    let hi_end = -(1.0 - 1e-10) / min_q;

    let eval = |beta: f64| -> (f64, f64) {
        let mut f = 0.0;
        let mut fp = 0.0;
        for &qi in q {
            let denom = 1.0 + beta * qi;
            f += qi / denom;
            fp -= (qi / denom) * (qi / denom);
        }
        (f / n, fp / n)
    };

    // Safeguarded Newton from β = 0; f is strictly decreasing.
    let (mut lo, mut hi) = (lo_end, hi_end);
    let mut beta = 0.0;
    for _ in 0..200 {
        let (f, fp) = eval(beta);
        if f > 0.0 {
            lo = beta;
        } else {
            hi = beta;
        }
        if f.abs() <= tol * scale {
            return Ok(beta);
        }
        let mut next = beta - f / fp;
        if !next.is_finite() || next <= lo || next >= hi {
            next = 0.5 * (lo + hi);
        }
        if (next - beta).abs() <= f64::EPSILON * beta.abs() {
            return Ok(beta);
        }
        beta = next;
    }
    Ok(beta)
}

/// One evaluated point of the profile.
#[derive(Debug, Clone, Copy)]
pub struct ProfilePoint {
    pub theta: f64,
    pub log_ratio: f64,
    /// Lagrange multiplier, absent when θ is infeasible.
    pub beta: Option<f64>,
}

/// A χ²-calibrated confidence interval for `A(t)`.
#[derive(Debug, Clone, Copy)]
pub struct ConfidenceInterval {
    pub level: f64,
    pub lo: f64,
    pub hi: f64,
    /// The profile minimizer (where the log ratio vanishes).
    pub point: f64,
    /// Set when the search exhausted the θ bounds before crossing the
    /// threshold; the corresponding endpoint is then a truncation, not a
    /// likelihood crossing.
    pub lo_open: bool,
    pub hi_open: bool,
}

/// Search diagnostics accumulated while profiling.
#[derive(Debug, Clone, Default)]
pub struct JelDiagnostics {
    pub infeasible_evaluations: u32,
    pub half_open_endpoints: u32,
    /// Range of `Q_i` at the point estimate.
    pub q_range: (f64, f64),
    pub warnings: Vec<String>,
}

/// The profiled log JEL ratio for one `(sample, t)`.
#[derive(Debug, Clone)]
pub struct JelProfile {
    pub point_estimate: f64,
    pub evaluations: Vec<ProfilePoint>,
    pub intervals: Vec<ConfidenceInterval>,
    pub diagnostics: JelDiagnostics,
}

/// Precomputed state for evaluating `l(θ)` at many θ on one sample.
///
/// The pseudo-value matrix and its weighted integrals `P_i = ∫ V̂_i λ` are
/// fixed at construction; each `l(θ)` evaluation reduces to the scalar
/// integral `S(θ) = ∫ u^θ λ` on the shared nodes, `Q_i(θ) = P_i − S(θ)`,
/// and the Lagrange solve.
pub struct JelContext {
    t: f64,
    n: usize,
    nodes: Vec<(f64, f64)>,
    lambda: Vec<f64>,
    v: Vec<Vec<f64>>,
    p: Vec<f64>,
    weight: ResolvedWeight,
    beta_tol: f64,
    theta_min: f64,
    theta_max: f64,
    warnings: Vec<String>,
}

impl JelContext {
    pub fn new(ps: &PseudoSample, t: f64, cfg: &JelConfig) -> Result<Self> {
        let n = ps.len();
        if n < 3 {
            return Err(Error::InvalidArgument(format!("JEL needs n ≥ 3, got {n}")));
        }
        if !(t > 0.0 && t < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "t must lie in (0,1), got {t}"
            )));
        }
        let warnings = cfg.validate_for(n)?;
        let h = cfg.bandwidth_for(n);
        let (a_n, b_n) = cfg.trimming_for(n);
        let rule = GaussLegendre::new(cfg.quad_order);
        let nodes = rule.mapped(a_n, 1.0 - b_n);

        // The data-driven weight is frozen once per sample, before any θ
        // search.
        let weight = cfg.weight.resolve(ps, t)?;
        let mut lambda = Vec::with_capacity(nodes.len());
        for &(u, _) in &nodes {
            let l = weight.lambda(u, t);
            if !l.is_finite() {
                return Err(Error::NumericDomain(format!(
                    "weight not finite at u = {u}"
                )));
            }
            lambda.push(l);
        }

        let u_nodes: Vec<f64> = nodes.iter().map(|&(u, _)| u).collect();
        let v = pseudovalue_matrix(ps, t, &u_nodes, h, cfg.kernel.as_ref());
        let p: Vec<f64> = v
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&nodes)
                    .zip(&lambda)
                    .map(|((&vik, &(_, w)), &l)| w * l * vik)
                    .sum()
            })
            .collect();

        Ok(Self {
            t,
            n,
            nodes,
            lambda,
            v,
            p,
            weight,
            beta_tol: cfg.beta_tol,
            theta_min: cfg.theta_min,
            theta_max: cfg.theta_max,
            warnings,
        })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// The pseudo-value matrix `V[i][k]` shared by every `l(θ)` evaluation.
    pub fn pseudovalues(&self) -> &[Vec<f64>] {
        &self.v
    }

    /// Quadrature nodes `(u, weight)` on the trimmed interval.
    pub fn nodes(&self) -> &[(f64, f64)] {
        &self.nodes
    }

    /// The resolved estimating-equation weight (adaptive q pinned).
    pub fn weight(&self) -> &ResolvedWeight {
        &self.weight
    }

    /// `S(θ) = ∫ u^θ λ(u,t) du` on the trimmed interval.
    fn power_integral(&self, theta: f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.lambda)
            .map(|(&(u, w), &l)| w * l * u.powf(theta))
            .sum()
    }

    /// `Q_i(θ) = P_i − S(θ)`.
    pub fn q_at(&self, theta: f64) -> Vec<f64> {
        let s = self.power_integral(theta);
        self.p.iter().map(|&pi| pi - s).collect()
    }

    /// Log JEL ratio `l(θ) = 2 Σ log{1 + βQ_i(θ)}`, with `+∞` signalling an
    /// infeasible θ (hull condition violated).
    pub fn log_ratio(&self, theta: f64) -> f64 {
        self.log_ratio_with_beta(theta).0
    }

    /// As [`Self::log_ratio`], also exposing the Lagrange multiplier.
    pub fn log_ratio_with_beta(&self, theta: f64) -> (f64, Option<f64>) {
        let q = self.q_at(theta);
        let scale = q.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
        if scale == 0.0 {
            // V ≡ u^θ in the weighted mean: a perfect fit.
            return (0.0, Some(0.0));
        }
        match solve_lagrange(&q, self.beta_tol) {
            Ok(beta) => {
                let l = 2.0 * q.iter().map(|&qi| (beta * qi).ln_1p()).sum::<f64>();
                (l.max(0.0), Some(beta))
            }
            Err(_) => (f64::INFINITY, None),
        }
    }

    /// The θ solving `Σ Q_i(θ) = 0`: the profile minimizer, where `β = 0`
    /// and `l(θ) = 0`.
    pub fn point_estimate(&self) -> Result<f64> {
        let mean_p: f64 = self.p.iter().sum::<f64>() / self.n as f64;
        // g(θ) = mean P − S(θ) is strictly increasing in θ.
        let g = |theta: f64| mean_p - self.power_integral(theta);
        let mut lo = (0.5 * self.t.max(1.0 - self.t)).max(self.theta_min);
        let mut hi: f64 = 1.5;
        let mut g_lo = g(lo);
        let mut g_hi = g(hi);
        let mut guard = 0;
        while g_lo.signum() == g_hi.signum() && guard < 64 {
            if g_lo > 0.0 {
                // Root lies below; probe the floor before giving up.
                if lo <= self.theta_min {
                    return Err(Error::NoRoot {
                        lo: self.theta_min,
                        hi,
                    });
                }
                lo = (lo * 0.5).max(self.theta_min);
                g_lo = g(lo);
            } else {
                if hi >= self.theta_max {
                    return Err(Error::NoRoot {
                        lo,
                        hi: self.theta_max,
                    });
                }
                hi = (hi * 2.0).min(self.theta_max);
                g_hi = g(hi);
            }
            guard += 1;
        }
        find_root(g, lo, hi, 1e-12)
    }

    /// Locate the threshold crossing of `l` on one side of the minimizer.
    /// Returns `(endpoint, open)`, where `open` records that the θ bounds
    /// were exhausted with `l` still under the threshold.
    fn crossing(
        &self,
        from: f64,
        threshold: f64,
        upward: bool,
        infeasible: &mut u32,
    ) -> (f64, bool) {
        let mut track = |l: f64| {
            if l.is_infinite() {
                *infeasible += 1;
            }
            l
        };
        let mut inside = from;
        let mut step = 0.05 * from.max(0.1);
        let outside = loop {
            let candidate = if upward {
                (inside + step).min(self.theta_max)
            } else {
                (inside - step).max(self.theta_min)
            };
            if track(self.log_ratio(candidate)) > threshold {
                break candidate;
            }
            if candidate == self.theta_max || candidate == self.theta_min {
                return (candidate, true);
            }
            inside = candidate;
            step *= 2.0;
        };
        // Bisect l(θ) = threshold between the last point inside the region
        // and the first point beyond it.
        let (mut a, mut b) = (inside, outside);
        while (b - a).abs() > 1e-6 {
            let mid = 0.5 * (a + b);
            if track(self.log_ratio(mid)) <= threshold {
                a = mid;
            } else {
                b = mid;
            }
        }
        (0.5 * (a + b), false)
    }

    /// The connected level-`level` interval around the profile minimizer.
    pub fn confidence_interval(&self, level: f64) -> Result<ConfidenceInterval> {
        self.confidence_interval_tracked(level, &mut 0)
    }

    fn confidence_interval_tracked(
        &self,
        level: f64,
        infeasible: &mut u32,
    ) -> Result<ConfidenceInterval> {
        if !(level > 0.0 && level < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "confidence level must lie in (0,1), got {level}"
            )));
        }
        let threshold = chi2_quantile_1df(level)?;
        let point = self.point_estimate()?;
        if self.log_ratio(point) > threshold {
            return Err(Error::EmptyInterval { level });
        }
        let (hi, hi_open) = self.crossing(point, threshold, true, infeasible);
        let (lo, lo_open) = self.crossing(point, threshold, false, infeasible);
        Ok(ConfidenceInterval {
            level,
            lo,
            hi,
            point,
            lo_open,
            hi_open,
        })
    }

    /// Profile `l(θ)`: point estimate, intervals at each requested level,
    /// and a grid of evaluations spanning the widest interval.
    pub fn profile(&self, levels: &[f64]) -> Result<JelProfile> {
        let mut infeasible = 0u32;
        let point = self.point_estimate()?;
        let mut intervals = Vec::with_capacity(levels.len());
        for &level in levels {
            intervals.push(self.confidence_interval_tracked(level, &mut infeasible)?);
        }
        let half_open = intervals
            .iter()
            .map(|ci| u32::from(ci.lo_open) + u32::from(ci.hi_open))
            .sum();

        let (grid_lo, grid_hi) = intervals.iter().fold((point, point), |(lo, hi), ci| {
            (lo.min(ci.lo), hi.max(ci.hi))
        });
        let pad = 0.1 * (grid_hi - grid_lo).max(0.05);
        let lo = (grid_lo - pad).max(self.theta_min);
        let hi = (grid_hi + pad).min(self.theta_max);
        let evaluations: Vec<ProfilePoint> = (0..=40)
            .map(|k| {
                let theta = lo + (hi - lo) * k as f64 / 40.0;
                let (l, beta) = self.log_ratio_with_beta(theta);
                if l.is_infinite() {
                    infeasible += 1;
                }
                ProfilePoint {
                    theta,
                    log_ratio: l,
                    beta,
                }
            })
            .collect();

        let q_point = self.q_at(point);
        let q_range = (
            q_point.iter().copied().fold(f64::INFINITY, f64::min),
            q_point.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        );
        Ok(JelProfile {
            point_estimate: point,
            evaluations,
            intervals,
            diagnostics: JelDiagnostics {
                infeasible_evaluations: infeasible,
                half_open_endpoints: half_open,
                q_range,
                warnings: self.warnings.clone(),
            },
        })
    }
}

/// Log JEL ratio `l(θ)` at a single θ (builds the pseudo-value state; use
/// [`JelContext`] to evaluate many θ on one sample).
pub fn jel_ratio(ps: &PseudoSample, t: f64, theta: f64, cfg: &JelConfig) -> Result<f64> {
    if !(theta > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "theta must be positive, got {theta}"
        )));
    }
    Ok(JelContext::new(ps, t, cfg)?.log_ratio(theta))
}

/// JEL confidence interval for `A(t)` at the given level.
pub fn jel_confidence_interval(
    ps: &PseudoSample,
    t: f64,
    level: f64,
    cfg: &JelConfig,
) -> Result<ConfidenceInterval> {
    JelContext::new(ps, t, cfg)?.confidence_interval(level)
}
