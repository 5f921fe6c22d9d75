//! Gauss–Legendre quadrature.
//!
//! Nodes and weights are obtained by Newton iteration on the Legendre
//! polynomial recurrence, so a rule of any order is available without
//! tabulated constants. An order-`n` rule integrates polynomials up to
//! degree `2n - 1` exactly.

use crate::error::{Error, Result};

/// A Gauss–Legendre rule on the reference interval (-1, 1).
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

/// Legendre polynomial P_n and its derivative at `x`, by the three-term
/// recurrence (k+1)·P_{k+1} = (2k+1)·x·P_k − k·P_{k−1}.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = x;
    for k in 1..n {
        let kf = k as f64;
        let p_next = ((2.0 * kf + 1.0) * x * p - kf * p_prev) / (kf + 1.0);
        p_prev = p;
        p = p_next;
    }
    let deriv = (n as f64) * (x * p - p_prev) / (x * x - 1.0);
    (p, deriv)
}

impl GaussLegendre {
    /// Build a rule with `order` nodes. Panics if `order == 0`.
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "quadrature order must be at least 1");
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi-style initial guess for the i-th largest root.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..64 {
                let (p, d) = legendre_with_derivative(n, x);
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-15 * x.abs().max(1.0) {
                    break;
                }
            }
            // Polish once more so the weight uses a converged derivative.
            let (p, d) = legendre_with_derivative(n, x);
            x -= p / d;
            let deriv = legendre_with_derivative(n, x).1;

            let w = 2.0 / ((1.0 - x * x) * deriv * deriv);
            nodes[n - 1 - i] = x;
            weights[n - 1 - i] = w;
            nodes[i] = -x;
            weights[i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Nodes on (-1, 1), strictly increasing.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Positive weights; they sum to 2.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Nodes and weights mapped affinely onto `[lo, hi]`.
    pub fn mapped(&self, lo: f64, hi: f64) -> Vec<(f64, f64)> {
        let center = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| (center + half * x, half * w))
            .collect()
    }

    /// Approximate `∫_lo^hi f`. Fails if `lo >= hi` or `f` evaluates to a
    /// non-finite value at a node.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, lo: f64, hi: f64, mut f: F) -> Result<f64> {
        if !(lo < hi) {
            return Err(Error::InvalidArgument(format!(
                "integration bounds must satisfy lo < hi, got [{lo}, {hi}]"
            )));
        }
        let center = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        let mut acc = 0.0;
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            let u = center + half * x;
            let v = f(u);
            if !v.is_finite() {
                return Err(Error::NumericDomain(format!(
                    "integrand is not finite at node u = {u}"
                )));
            }
            acc += w * v;
        }
        Ok(half * acc)
    }
}
