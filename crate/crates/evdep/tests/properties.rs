//! Randomized invariant checks.

use evdep::empirical::PseudoSample;
use evdep::estimators::{adaptive_weighted, cfg_rank, pickands_rank};
use evdep::models::{Family, PickandsModel};
use evdep::numerics::{find_root, std_normal_cdf, GaussLegendre};
use proptest::prelude::*;

fn poly(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// ∫ of the polynomial over [lo, hi], and a magnitude scale for the terms
/// involved (the integral itself may cancel to near zero).
fn poly_integral(coeffs: &[f64], lo: f64, hi: f64) -> (f64, f64) {
    let mut value = 0.0;
    let mut scale = 1.0f64;
    for (k, &c) in coeffs.iter().enumerate() {
        let p = (k + 1) as f64;
        let term = c * (hi.powi(k as i32 + 1) - lo.powi(k as i32 + 1)) / p;
        value += term;
        scale = scale.max((c * hi.powi(k as i32 + 1) / p).abs());
        scale = scale.max((c * lo.powi(k as i32 + 1) / p).abs());
    }
    (value, scale)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quadrature_exact_for_low_degree_polynomials(
        coeffs in prop::collection::vec(-3.0..3.0f64, 1..12),
        lo in -2.0..1.0f64,
        width in 0.1..2.5f64,
    ) {
        // An order-8 rule is exact through degree 15; these never exceed 11.
        let hi = lo + width;
        let rule = GaussLegendre::new(8);
        let numeric = rule.integrate(lo, hi, |x| poly(&coeffs, x)).unwrap();
        let (exact, scale) = poly_integral(&coeffs, lo, hi);
        prop_assert!(
            (numeric - exact).abs() <= 1e-12 * scale.max(1.0),
            "numeric {numeric}, exact {exact}"
        );
    }

    #[test]
    fn root_finder_respects_bracket_and_residual(
        a in 0.1..3.0f64,
        b in -10.0..10.0f64,
    ) {
        // Strictly increasing cubic: x³ + a·x + b has one real root.
        let f = |x: f64| x * x * x + a * x + b;
        let tol = 1e-10;
        let root = find_root(f, -5.0, 5.0, tol).unwrap();
        prop_assert!((-5.0..=5.0).contains(&root));
        let bound = tol * 1.0f64.max(f(-5.0).abs()).max(f(5.0).abs());
        prop_assert!(f(root).abs() <= bound, "residual {}", f(root).abs());
    }

    #[test]
    fn normal_cdf_symmetry(x in -8.0..8.0f64) {
        prop_assert!((std_normal_cdf(x) + std_normal_cdf(-x) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn neg_log_jump_points_are_the_diagonal_minima(
        raw in prop::collection::vec((-50.0..50.0f64, -50.0..50.0f64), 5..40),
        t in 0.05..0.95f64,
    ) {
        let ps = match PseudoSample::from_data(&raw) {
            Ok(ps) => ps,
            Err(_) => return Ok(()), // tie in the random draw
        };
        let minima = ps.diag_minima(t);
        let jumps = evdep::empirical::diag_jump_points(&ps, t);
        let mut neg_logs: Vec<f64> = jumps.iter().map(|m| -m.ln()).collect();
        neg_logs.sort_by(f64::total_cmp);
        let mut sorted = minima.clone();
        sorted.sort_by(f64::total_cmp);
        for (a, b) in neg_logs.iter().zip(&sorted) {
            prop_assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn estimators_invariant_under_strictly_increasing_transforms(
        raw in prop::collection::vec((-5.0..5.0f64, -5.0..5.0f64), 6..30),
        t in 0.1..0.9f64,
    ) {
        let transformed: Vec<(f64, f64)> = raw
            .iter()
            .map(|&(x, y)| (x.exp(), y * y * y + 2.0 * y))
            .collect();
        let a = match PseudoSample::from_data(&raw) {
            Ok(ps) => ps,
            Err(_) => return Ok(()),
        };
        let b = PseudoSample::from_data(&transformed).unwrap();
        prop_assert_eq!(pickands_rank(&a, t), pickands_rank(&b, t));
        prop_assert_eq!(cfg_rank(&a, t), cfg_rank(&b, t));
        prop_assert_eq!(adaptive_weighted(&a, t), adaptive_weighted(&b, t));
    }

    #[test]
    fn copula_mass_is_nonnegative_and_max_stable(
        theta_pick in 0usize..3,
        raw_theta in 0.05..0.95f64,
        u1 in 0.01..0.99f64,
        u2 in 0.01..0.99f64,
        v1 in 0.01..0.99f64,
        v2 in 0.01..0.99f64,
        s in 1.5..12.0f64,
    ) {
        let model = match theta_pick {
            0 => PickandsModel::new(Family::Gumbel, 1.0 + 3.0 * raw_theta),
            1 => PickandsModel::new(Family::HuslerReiss, 2.0 * raw_theta),
            _ => PickandsModel::new(Family::Tawn, raw_theta),
        }
        .unwrap();
        let (ulo, uhi) = (u1.min(u2), u1.max(u2));
        let (vlo, vhi) = (v1.min(v2), v1.max(v2));
        let mass = model.cdf(uhi, vhi) - model.cdf(ulo, vhi) - model.cdf(uhi, vlo)
            + model.cdf(ulo, vlo);
        prop_assert!(mass >= -1e-12, "negative rectangle mass {mass}");
        let lhs = model.cdf(u1.powf(1.0 / s), v1.powf(1.0 / s)).powf(s);
        prop_assert!((lhs - model.cdf(u1, v1)).abs() < 1e-10);
    }
}
