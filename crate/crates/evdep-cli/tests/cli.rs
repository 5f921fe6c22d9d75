//! End-to-end tests of the `evdep` binary: exit-code contract, table
//! formats, and deterministic simulation output.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn evdep() -> Command {
    Command::new(env!("CARGO_BIN_EXE_evdep"))
}

fn write_file(name: &str, contents: &str) -> PathBuf {
    let path = std::env::temp_dir().join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn sample_csv() -> PathBuf {
    let rows = "x,y\n0.31,0.27\n1.41,2.12\n-0.77,0.10\n2.20,1.93\n0.05,-0.41\n\
                1.10,0.63\n-1.52,-2.10\n0.88,1.35\n0.47,0.21\n-0.33,0.05\n\
                1.77,2.41\n-0.95,-0.62\n0.12,0.88\n2.05,1.44\n-1.10,-1.37\n\
                0.66,0.09\n1.23,1.71\n-0.21,0.33\n0.94,0.52\n-1.88,-0.95\n";
    write_file("evdep_cli_sample.csv", rows)
}

fn stdout_lines(out: &Output) -> Vec<String> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(str::to_string)
        .collect()
}

#[test]
fn estimate_single_point() {
    let data = sample_csv();
    let out = evdep()
        .args(["estimate", "--data"])
        .arg(&data)
        .args(["--t", "0.5", "--estimator", "adaptive"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let lines = stdout_lines(&out);
    assert_eq!(lines[0], "t,estimate");
    assert_eq!(lines.len(), 2);
    assert!(lines[1].starts_with("0.500000,"));
    let est: f64 = lines[1].split(',').nth(1).unwrap().parse().unwrap();
    assert!(est > 0.0 && est.is_finite());
}

#[test]
fn estimate_weighted_routes_to_closed_form() {
    let data = sample_csv();
    let rows = evdep::io::read_two_column_csv(&data, evdep::io::HeaderMode::Auto).unwrap();
    let ps = evdep::empirical::PseudoSample::from_data(&rows).unwrap();
    let want = evdep::estimators::weighted_closed_form(&ps, 0.5, 0.5).unwrap();

    let out = evdep()
        .args(["estimate", "--data"])
        .arg(&data)
        .args(["--t", "0.5", "--estimator", "weighted:0.5"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let got: f64 = stdout_lines(&out)[1]
        .split(',')
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();
    assert!((got - want).abs() < 1e-6, "{got} vs {want}");
}

#[test]
fn estimate_grid_emits_nine_rows() {
    let data = sample_csv();
    let out = evdep()
        .args(["estimate", "--data"])
        .arg(&data)
        .args(["--t-grid", "0.1:0.9:0.1", "--estimator", "p"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let lines = stdout_lines(&out);
    assert_eq!(lines.len(), 10, "header plus nine grid rows");
    assert!(lines[1].starts_with("0.100000,"));
    assert!(lines[9].starts_with("0.900000,"));
}

#[test]
fn every_estimator_selector_works() {
    let data = sample_csv();
    for est in ["adaptive", "p", "d", "ht", "cfg", "weighted:0.25"] {
        let out = evdep()
            .args(["estimate", "--data"])
            .arg(&data)
            .args(["--t", "0.4", "--estimator", est])
            .output()
            .unwrap();
        assert!(out.status.success(), "estimator {est} failed");
        let lines = stdout_lines(&out);
        let value: f64 = lines[1].split(',').nth(1).unwrap().parse().unwrap();
        assert!(value.is_finite() && value > 0.0, "estimator {est}: {value}");
    }
}

#[test]
fn estimate_project_flag_enforces_the_envelope() {
    let data = sample_csv();
    let run = |extra: &[&str]| -> Vec<(f64, f64)> {
        let out = evdep()
            .args(["estimate", "--data"])
            .arg(&data)
            .args(["--t-grid", "0.05:0.95:0.05", "--estimator", "cfg"])
            .args(extra)
            .output()
            .unwrap();
        assert!(out.status.success());
        stdout_lines(&out)[1..]
            .iter()
            .map(|l| {
                let mut it = l.split(',');
                (
                    it.next().unwrap().parse().unwrap(),
                    it.next().unwrap().parse().unwrap(),
                )
            })
            .collect()
    };
    let raw = run(&[]);
    let projected = run(&["--project"]);
    assert_eq!(raw.len(), projected.len());
    for &(t, v) in &projected {
        assert!(v <= 1.0 + 1e-9 && v >= t.max(1.0 - t) - 1e-9, "({t},{v})");
    }
    // The default output is the raw estimator value, not its projection.
    let rows = evdep::io::read_two_column_csv(&data, evdep::io::HeaderMode::Auto).unwrap();
    let ps = evdep::empirical::PseudoSample::from_data(&rows).unwrap();
    let want = evdep::estimators::cfg_rank(&ps, 0.5);
    let got = raw.iter().find(|&&(t, _)| t == 0.5).unwrap().1;
    assert!((got - want).abs() < 1e-6);
}

#[test]
fn ci_rows_bracket_the_point_estimate() {
    let data = sample_csv();
    let out = evdep()
        .args(["ci", "--data"])
        .arg(&data)
        .args(["--t", "0.5", "--level", "0.9", "--level", "0.95"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let lines = stdout_lines(&out);
    assert_eq!(lines[0], "t,level,lo,hi,point");
    assert_eq!(lines.len(), 3, "two levels, one t");
    for row in &lines[1..] {
        let fields: Vec<f64> = row.split(',').map(|f| f.parse().unwrap()).collect();
        let (lo, hi, point) = (fields[2], fields[3], fields[4]);
        assert!(lo <= point && point <= hi, "row {row}");
    }
    // The config echo appears on stderr with the default settings.
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("a_n=0.1"), "stderr: {err}");
    assert!(err.contains("weight=adaptive"), "stderr: {err}");
}

#[test]
fn exit_code_contract() {
    let data = sample_csv();
    // 0: success.
    assert_eq!(
        evdep()
            .args(["estimate", "--data"])
            .arg(&data)
            .args(["--t", "0.5"])
            .output()
            .unwrap()
            .status
            .code(),
        Some(0)
    );
    // 2: tied data.
    let tied = write_file("evdep_cli_tied.csv", "1,2\n1,3\n2,4\n");
    assert_eq!(
        evdep()
            .args(["estimate", "--data"])
            .arg(&tied)
            .args(["--t", "0.5"])
            .output()
            .unwrap()
            .status
            .code(),
        Some(2)
    );
    // 2: unreadable data file.
    assert_eq!(
        evdep()
            .args(["estimate", "--data", "/nonexistent/evdep.csv", "--t", "0.5"])
            .output()
            .unwrap()
            .status
            .code(),
        Some(2)
    );
    // 3: inference infeasibility (degenerate three-point sample).
    let tiny = write_file("evdep_cli_tiny.csv", "1,3\n2,2\n3,1\n");
    assert_eq!(
        evdep()
            .args(["ci", "--data"])
            .arg(&tiny)
            .args(["--t", "0.5"])
            .output()
            .unwrap()
            .status
            .code(),
        Some(3)
    );
    // 64: usage errors (bad selector, bad t, missing subcommand args).
    for bad in [
        vec![
            "estimate",
            "--data",
            "x.csv",
            "--t",
            "0.5",
            "--estimator",
            "bogus",
        ],
        vec!["estimate", "--data", "x.csv", "--t", "1.5"],
        vec!["estimate"],
        vec!["simulate", "--config", "x.json"],
    ] {
        let code = evdep().args(&bad).output().unwrap().status.code();
        assert_eq!(code, Some(64), "args {bad:?} gave {code:?}");
    }
    // Bad t is validated before touching the data file.
    assert_eq!(
        evdep()
            .args(["estimate", "--data"])
            .arg(&data)
            .args(["--t", "-0.1"])
            .output()
            .unwrap()
            .status
            .code(),
        Some(64)
    );
    // 0: help.
    assert_eq!(
        evdep().arg("--help").output().unwrap().status.code(),
        Some(0)
    );
}

fn tiny_sim_config() -> String {
    r#"{
        "mode": "mse_ratio",
        "families": [{ "family": "gumbel", "theta": 2.0 }],
        "sizes": [30],
        "t_grid": [0.5],
        "replicates": 5,
        "seed": 7
    }"#
    .to_string()
}

#[test]
fn simulate_is_deterministic_and_writes_reports() {
    let config = write_file("evdep_cli_sim.json", &tiny_sim_config());
    let out1 = std::env::temp_dir().join("evdep_cli_sim1.csv");
    let out2 = std::env::temp_dir().join("evdep_cli_sim2.csv");
    for out in [&out1, &out2] {
        let run = evdep()
            .args(["simulate", "--config"])
            .arg(&config)
            .args(["--seed", "42", "--out"])
            .arg(out)
            .args(["--threads", "2"])
            .output()
            .unwrap();
        assert!(
            run.status.success(),
            "{}",
            String::from_utf8_lossy(&run.stderr)
        );
        let table = String::from_utf8_lossy(&run.stdout);
        assert!(table.starts_with("family,theta,n,t,mse_adaptive,mse_cfg,ratio,failures"));
    }
    assert_eq!(
        std::fs::read_to_string(&out1).unwrap(),
        std::fs::read_to_string(&out2).unwrap()
    );

    // EVDEP_THREADS is the fallback for --threads and cannot change values.
    let out3 = std::env::temp_dir().join("evdep_cli_sim3.csv");
    let run = evdep()
        .args(["simulate", "--config"])
        .arg(&config)
        .args(["--seed", "42", "--out"])
        .arg(&out3)
        .env("EVDEP_THREADS", "3")
        .output()
        .unwrap();
    assert!(run.status.success());
    assert_eq!(
        std::fs::read_to_string(&out1).unwrap(),
        std::fs::read_to_string(&out3).unwrap()
    );

    // JSON report parses back into a report structure.
    let json_out = std::env::temp_dir().join("evdep_cli_sim.json.out");
    let run = evdep()
        .args(["simulate", "--config"])
        .arg(&config)
        .args(["--out"])
        .arg(&json_out)
        .args(["--format", "json"])
        .output()
        .unwrap();
    assert!(run.status.success());
    let report: evdep::sim::ExperimentReport =
        serde_json::from_str(&std::fs::read_to_string(&json_out).unwrap()).unwrap();
    assert_eq!(report.rows.len(), 1);
}

#[test]
fn simulate_rejects_schema_violations() {
    let bad = write_file(
        "evdep_cli_bad.json",
        r#"{"mode":"coverage","families":[{"family":"gumbel","theta":2.0}],
            "sizes":[30],"t_grid":[0.5],"seed":1,"unknown_field":3}"#,
    );
    let out = evdep()
        .args(["simulate", "--config"])
        .arg(&bad)
        .args(["--out", "/tmp/evdep_cli_unused.csv"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(64));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("unknown_field"), "stderr: {err}");
}

#[test]
fn bundled_configs_parse_and_validate() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../..");
    for name in ["table1.json", "figure1.json", "figure1_n5000.json"] {
        let path = root.join("configs").join(name);
        let cfg = evdep::sim::ExperimentConfig::from_json_file(&path)
            .unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(cfg.replicates, 1000);
        assert_eq!(cfg.seed, 42);
        assert_eq!(cfg.levels, vec![0.9, 0.95]);
        match name {
            "table1.json" => {
                assert_eq!(cfg.mode, evdep::sim::ExperimentMode::Coverage);
                assert_eq!(cfg.t_grid, vec![0.1, 0.5, 0.8]);
                assert_eq!(cfg.sizes, vec![100, 1000]);
            }
            _ => {
                assert_eq!(cfg.mode, evdep::sim::ExperimentMode::MseRatio);
                assert_eq!(cfg.t_grid.len(), 9);
            }
        }
        assert_eq!(cfg.families.len(), 3);
    }
}

#[test]
fn estimate_writes_out_file() {
    let data = sample_csv();
    let out_path = std::env::temp_dir().join("evdep_cli_estimates.csv");
    let out = evdep()
        .args(["estimate", "--data"])
        .arg(&data)
        .args(["--t", "0.3", "--out"])
        .arg(&out_path)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let written = std::fs::read_to_string(&out_path).unwrap();
    assert!(written.starts_with("t,estimate\n0.300000,"));
}
