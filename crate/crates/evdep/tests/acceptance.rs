//! Acceptance suite: one test per release criterion, each printing a
//! PASS/FAIL line with the measured numbers.
//!
//! Run with `cargo test -p evdep --test acceptance -- --nocapture` to see
//! the per-criterion summaries. Everything is seeded; reruns reproduce the
//! same numbers exactly.

use evdep::empirical::PseudoSample;
use evdep::estimators::{
    cfg_rank, known_margin_estimate, pickands_rank, weighted_closed_form, weighted_root_solve,
    KnownMarginSample, KnownMarginVariant, WeightSpec,
};
use evdep::jel::{solve_lagrange, JelConfig, JelContext};
use evdep::models::{Family, PickandsModel};
use evdep::numerics::RngStream;
use evdep::sim::{
    run_coverage_experiment, run_mse_experiment, ExperimentConfig, ExperimentMode, FamilySpec,
    JelSettings,
};

const SEED: u64 = 42;

fn coverage_row(family: Family, theta: f64, n: usize, t: f64) -> (f64, f64) {
    let cfg = ExperimentConfig {
        mode: ExperimentMode::Coverage,
        families: vec![FamilySpec { family, theta }],
        sizes: vec![n],
        t_grid: vec![t],
        replicates: 1000,
        levels: vec![0.90, 0.95],
        seed: SEED,
        jel: JelSettings::default(),
    };
    let report = run_coverage_experiment(&cfg).unwrap();
    let row = &report.rows[0];
    assert_eq!(row.failures, 0, "unexpected replicate failures");
    (row.coverage[0].coverage, row.coverage[1].coverage)
}

#[test]
fn criterion_1_table1_coverage() {
    // (family, theta, n, t, published coverage at 0.90 and 0.95); the
    // tolerance is ±0.04 (binomial error ≈ 0.01 at 1000 replicates plus
    // quadrature and tuning slack).
    let rows = [
        (Family::Gumbel, 2.0, 100, 0.5, 0.871, 0.941),
        (Family::HuslerReiss, 0.5, 100, 0.5, 0.888, 0.941),
        (Family::Tawn, 0.25, 100, 0.8, 0.884, 0.938),
        (Family::Tawn, 0.25, 1000, 0.1, 0.900, 0.957),
    ];
    let mut summary = Vec::new();
    let mut ok = true;
    for (family, theta, n, t, want90, want95) in rows {
        let (c90, c95) = coverage_row(family, theta, n, t);
        let pass = (c90 - want90).abs() <= 0.04 && (c95 - want95).abs() <= 0.04;
        ok &= pass;
        summary.push(format!(
            "({n},{t},{family},{theta}): {c90:.3}@0.90 (ref {want90}), {c95:.3}@0.95 (ref {want95}){}",
            if pass { "" } else { " <-- OUT OF BAND" }
        ));
    }
    println!(
        "criterion 1 (coverage-table reproduction): {} [{}]",
        if ok { "PASS" } else { "FAIL" },
        summary.join("; ")
    );
    assert!(ok, "{}", summary.join("; "));
}

#[test]
fn criterion_2_boundary_failure_reproduction() {
    // The documented small-n breakdown at t = 0.1: published coverage 0.604
    // at the 0.90 level; anything near nominal would signal a deviation
    // from the procedure.
    let (c90, _) = coverage_row(Family::Gumbel, 2.0, 100, 0.1);
    let ok = c90 <= 0.75;
    println!(
        "criterion 2 (boundary failure reproduction): {} [(100,0.1,gumbel,2): {c90:.3}@0.90, required <= 0.75, ref 0.604]",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "boundary coverage {c90} exceeds 0.75");
}

#[test]
fn criterion_3_mse_ratio_claim() {
    let cfg = ExperimentConfig {
        mode: ExperimentMode::MseRatio,
        families: vec![
            FamilySpec {
                family: Family::Gumbel,
                theta: 2.0,
            },
            FamilySpec {
                family: Family::HuslerReiss,
                theta: 0.5,
            },
            FamilySpec {
                family: Family::Tawn,
                theta: 0.25,
            },
        ],
        sizes: vec![1000],
        t_grid: (1..=9).map(|i| i as f64 / 10.0).collect(),
        replicates: 1000,
        levels: vec![0.9, 0.95],
        seed: SEED,
        jel: JelSettings::default(),
    };
    let report = run_mse_experiment(&cfg).unwrap();
    assert_eq!(report.rows.len(), 27);
    let ratios: Vec<f64> = report.rows.iter().map(|r| r.ratio.unwrap()).collect();
    let max_ratio = ratios.iter().copied().fold(0.0f64, f64::max);
    let at_most_one = ratios.iter().filter(|&&r| r <= 1.0).count();
    let ok = max_ratio <= 1.05 && at_most_one >= 24;
    println!(
        "criterion 3 (MSE ratio adaptive vs CFG, n=1000): {} [max ratio {max_ratio:.4} (<= 1.05), {at_most_one}/27 cells <= 1.00 (need >= 24)]",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "max ratio {max_ratio}, cells <= 1: {at_most_one}");
}

#[test]
fn criterion_4_wilks_calibration() {
    let model = PickandsModel::new(Family::Gumbel, 2.0).unwrap();
    let truth = model.pickands(0.5);
    let reps = 1000u64;
    let cfg = JelConfig::default();
    let mut ls: Vec<f64> = (0..reps)
        .map(|r| {
            let draw = model.sample(1000, RngStream::new(SEED, r));
            let ps = PseudoSample::from_data(&draw.pairs).unwrap();
            JelContext::new(&ps, 0.5, &cfg).unwrap().log_ratio(truth)
        })
        .collect();
    ls.sort_by(f64::total_cmp);
    let rejection = ls.iter().filter(|&&l| l > 3.8414588).count() as f64 / reps as f64;
    let idx = ((0.9 * reps as f64).ceil() as usize - 1).min(reps as usize - 1);
    let p90 = ls[idx];
    let ok = (0.03..=0.09).contains(&rejection) && (2.2..=3.3).contains(&p90);
    println!(
        "criterion 4 (Wilks chi-square calibration): {} [rejection at chi2(0.95) = {rejection:.3} (in [0.03,0.09]), 90th pct of l = {p90:.3} (in [2.2,3.3])]",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "rejection {rejection}, 90th percentile {p90}");
}

#[test]
fn criterion_5_exact_identities() {
    let mut checks: Vec<(String, bool)> = Vec::new();

    // Closed form at q = 0 and the root solver both reproduce the
    // rank-Pickands estimator to 1e-10.
    let model = PickandsModel::new(Family::Gumbel, 2.0).unwrap();
    let mut max_closed: f64 = 0.0;
    let mut max_root: f64 = 0.0;
    for rep in 0..10 {
        let draw = model.sample(40, RngStream::new(SEED, 100 + rep));
        let ps = PseudoSample::from_data(&draw.pairs).unwrap();
        for t in [0.2, 0.5, 0.8] {
            let direct = pickands_rank(&ps, t);
            let closed = weighted_closed_form(&ps, t, 0.0).unwrap();
            let root = weighted_root_solve(&ps, t, &WeightSpec::power_log(0.0), None).unwrap();
            max_closed = max_closed.max((closed - direct).abs());
            max_root = max_root.max((root - direct).abs());
        }
    }
    checks.push((
        format!("q=0 closed form ≡ rank-Pickands (max dev {max_closed:.2e})"),
        max_closed <= 1e-10,
    ));
    checks.push((
        format!("q=0 root solve ≡ rank-Pickands (max dev {max_root:.2e})"),
        max_root <= 1e-10,
    ));

    // q = 0.999 approximates the CFG limit to 1e-3.
    let draw = model.sample(60, RngStream::new(SEED, 200));
    let ps = PseudoSample::from_data(&draw.pairs).unwrap();
    let gap = (weighted_closed_form(&ps, 0.5, 0.999).unwrap() - cfg_rank(&ps, 0.5)).abs();
    checks.push((format!("q=0.999 vs CFG limit (dev {gap:.2e})"), gap <= 1e-3));

    // Hand-computed known-margin values: Y = ((0.5,0.5),(1,2)), t = 1/2.
    let y = KnownMarginSample::new(vec![(0.5, 0.5), (1.0, 2.0)]).unwrap();
    let p = known_margin_estimate(&y, 0.5, KnownMarginVariant::Pickands).unwrap();
    let d = known_margin_estimate(&y, 0.5, KnownMarginVariant::Deheuvels).unwrap();
    let ht = known_margin_estimate(&y, 0.5, KnownMarginVariant::HallTajvidi).unwrap();
    checks.push((
        "hand values for the three known-margin displays".into(),
        (p - 2.0 / 3.0).abs() <= 1e-6
            && (d - 2.0 / 3.0).abs() <= 1e-6
            && (ht - 0.5769231).abs() <= 1e-6,
    ));

    // Lagrange hand cases to 1e-10.
    let b0 = solve_lagrange(&[-1.0, 1.0], 1e-12).unwrap();
    let b1 = solve_lagrange(&[-1.0, 2.0], 1e-12).unwrap();
    checks.push((
        "Lagrange hand cases".into(),
        b0.abs() <= 1e-10 && (b1 - 0.25).abs() <= 1e-10,
    ));

    // Five-point brute-force pipeline oracle (the full re-ranked reference
    // lives in the jel_bruteforce test target; here the production paths
    // are cross-checked against each other at 1e-10).
    let data = [(0.3, 1.2), (-1.0, 0.4), (2.2, -3.0), (0.9, 0.0), (1.4, 2.0)];
    let ps5 = PseudoSample::from_data(&data).unwrap();
    let ctx = JelContext::new(&ps5, 0.4, &JelConfig::default()).unwrap();
    let h = JelConfig::default().bandwidth_for(5);
    let mut max_v_dev: f64 = 0.0;
    for (i, row) in ctx.pseudovalues().iter().enumerate() {
        for (&(u, _), &v) in ctx.nodes().iter().zip(row) {
            let full = evdep::empirical::smoothed_copula_diag(
                &ps5,
                0.4,
                u,
                h,
                &evdep::empirical::QuarticSquared,
            )
            .unwrap();
            let loo = evdep::empirical::smoothed_copula_diag_loo(
                &ps5,
                i,
                0.4,
                u,
                h,
                &evdep::empirical::QuarticSquared,
            )
            .unwrap();
            max_v_dev = max_v_dev.max((v - (5.0 * full - 4.0 * loo)).abs());
        }
    }
    checks.push((
        format!("n=5 pipeline pseudo-values (max dev {max_v_dev:.2e})"),
        max_v_dev <= 1e-10,
    ));

    let ok = checks.iter().all(|(_, pass)| *pass);
    let detail: Vec<String> = checks
        .iter()
        .map(|(name, pass)| format!("{name}: {}", if *pass { "ok" } else { "FAIL" }))
        .collect();
    println!(
        "criterion 5 (exact identity suite): {} [{}]",
        if ok { "PASS" } else { "FAIL" },
        detail.join("; ")
    );
    assert!(ok, "{}", detail.join("; "));
}

#[test]
fn criterion_6_model_layer() {
    let mut models = Vec::new();
    for th in [1.0, 1.5, 2.0, 4.0] {
        models.push(PickandsModel::new(Family::Gumbel, th).unwrap());
    }
    for th in [0.25, 0.5, 1.0, 2.0] {
        models.push(PickandsModel::new(Family::HuslerReiss, th).unwrap());
    }
    for th in [0.0, 0.25, 0.5, 1.0] {
        models.push(PickandsModel::new(Family::Tawn, th).unwrap());
    }

    let mut envelope_ok = true;
    let mut convex_ok = true;
    let mut fd_ok = true;
    let mut two_incr_ok = true;
    let mut stability_ok = true;
    for m in &models {
        let a: Vec<f64> = (0..=1000).map(|i| m.pickands(i as f64 / 1000.0)).collect();
        for (i, &ai) in a.iter().enumerate() {
            let t = i as f64 / 1000.0;
            envelope_ok &= ai <= 1.0 + 1e-12 && ai >= t.max(1.0 - t) - 1e-12;
        }
        for i in 1..1000 {
            convex_ok &= a[i - 1] - 2.0 * a[i] + a[i + 1] >= -1e-8;
        }
        for i in 1..99 {
            let t = i as f64 / 100.0;
            let fd = (m.pickands(t + 1e-6) - m.pickands(t - 1e-6)) / 2e-6;
            fd_ok &= (fd - m.pickands_prime(t).unwrap()).abs() < 1e-5;
        }
        let mut rng = RngStream::new(SEED, 300).rng();
        for _ in 0..200 {
            use rand::Rng;
            let mut u = [rng.random::<f64>(), rng.random::<f64>()];
            let mut v = [rng.random::<f64>(), rng.random::<f64>()];
            u.sort_by(f64::total_cmp);
            v.sort_by(f64::total_cmp);
            let mass =
                m.cdf(u[1], v[1]) - m.cdf(u[0], v[1]) - m.cdf(u[1], v[0]) + m.cdf(u[0], v[0]);
            two_incr_ok &= mass >= -1e-12;
        }
        for s in [2.0, 3.0, 10.0] {
            for i in 1..10 {
                for j in 1..10 {
                    let (u, v) = (i as f64 / 10.0, j as f64 / 10.0);
                    let lhs = m.cdf(u.powf(1.0 / s), v.powf(1.0 / s)).powf(s);
                    stability_ok &= (lhs - m.cdf(u, v)).abs() < 1e-10;
                }
            }
        }
    }

    // Sampler accuracy: sup over a 20x20 grid of |empirical - C| at
    // n = 10000 for each simulated family.
    let mut sampler_ok = true;
    let mut worst_sup: f64 = 0.0;
    for (idx, m) in [
        PickandsModel::new(Family::Gumbel, 2.0).unwrap(),
        PickandsModel::new(Family::HuslerReiss, 0.5).unwrap(),
        PickandsModel::new(Family::Tawn, 0.25).unwrap(),
    ]
    .iter()
    .enumerate()
    {
        let n = 10_000;
        let draw = m.sample(n, RngStream::new(SEED, 400 + idx as u64));
        let mut sup: f64 = 0.0;
        for i in 1..=20 {
            for j in 1..=20 {
                let (gu, gv) = (i as f64 / 20.0, j as f64 / 20.0);
                let emp = draw
                    .pairs
                    .iter()
                    .filter(|&&(u, v)| u <= gu && v <= gv)
                    .count() as f64
                    / n as f64;
                sup = sup.max((emp - m.cdf(gu, gv)).abs());
            }
        }
        worst_sup = worst_sup.max(sup);
        sampler_ok &= sup <= 0.02;
    }

    let ok = envelope_ok && convex_ok && fd_ok && two_incr_ok && stability_ok && sampler_ok;
    println!(
        "criterion 6 (model layer): {} [envelope {}, convexity {}, A' vs FD {}, 2-increasing {}, max-stability {}, sampler sup-distance {:.4} (<= 0.02)]",
        if ok { "PASS" } else { "FAIL" },
        envelope_ok,
        convex_ok,
        fd_ok,
        two_incr_ok,
        stability_ok,
        worst_sup
    );
    assert!(ok);
}
