//! Monte Carlo experiment harness.
//!
//! Two study designs over the three copula families:
//!
//! - [`run_mse_experiment`]: mean-squared-error ratios of the adaptive
//!   weighted estimator against the rank-CFG estimator on a `t` grid;
//! - [`run_coverage_experiment`]: empirical coverage and mean width of the
//!   JEL confidence intervals at each requested level.
//!
//! Replicate `r` of a cell draws from the stream `(seed, cell·R + r)`, so
//! results are bit-identical no matter how replicates are scheduled across
//! threads: replicates run in a parallel map, are collected in replicate
//! order, and are reduced sequentially. Failed replicates are excluded and
//! counted, never imputed.

use std::io::Write;
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::empirical::{PseudoSample, QuarticSquared};
use crate::error::{Error, Result};
use crate::estimators::{adaptive_weighted, cfg_rank, WeightSpec};
use crate::jel::{BandwidthRule, JelConfig, JelContext, TrimmingRule};
use crate::models::{Family, PickandsModel};
use crate::numerics::RngStream;

/// Which study to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentMode {
    MseRatio,
    Coverage,
}

/// One copula family with its parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    pub family: Family,
    pub theta: f64,
}

/// Estimating-equation weight, as it appears in config files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightSetting {
    /// Power-log weight with the data-driven exponent `min{Â_CFG(t), 1}`.
    Adaptive,
    /// Power-log weight with a fixed exponent in `[0, 1]`.
    FixedQ(f64),
}

/// Smoothing kernel, as it appears in config files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelSetting {
    QuarticSquared,
}

/// JEL tuning as read from experiment configs. `bandwidth_fixed`, when set,
/// overrides the `bandwidth_scale · n^{−1/3}` rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct JelSettings {
    pub bandwidth_scale: f64,
    pub bandwidth_fixed: Option<f64>,
    pub a_n: f64,
    pub b_n: f64,
    pub kernel: KernelSetting,
    pub weight: WeightSetting,
    pub quad_order: usize,
}

impl Default for JelSettings {
    fn default() -> Self {
        Self {
            bandwidth_scale: 0.5,
            bandwidth_fixed: None,
            a_n: 0.1,
            b_n: 0.1,
            kernel: KernelSetting::QuarticSquared,
            weight: WeightSetting::Adaptive,
            quad_order: 200,
        }
    }
}

impl JelSettings {
    pub fn to_config(self) -> JelConfig {
        JelConfig {
            bandwidth: match self.bandwidth_fixed {
                Some(h) => BandwidthRule::Fixed(h),
                None => BandwidthRule::ScaledCubeRoot {
                    scale: self.bandwidth_scale,
                },
            },
            trimming: TrimmingRule::Constant {
                a: self.a_n,
                b: self.b_n,
            },
            kernel: match self.kernel {
                KernelSetting::QuarticSquared => Arc::new(QuarticSquared),
            },
            weight: match self.weight {
                WeightSetting::Adaptive => WeightSpec::adaptive(),
                WeightSetting::FixedQ(q) => WeightSpec::power_log(q),
            },
            quad_order: self.quad_order,
            ..JelConfig::default()
        }
    }
}

fn default_replicates() -> usize {
    1000
}

fn default_levels() -> Vec<f64> {
    vec![0.90, 0.95]
}

/// Full experiment description; serializable as JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub mode: ExperimentMode,
    pub families: Vec<FamilySpec>,
    pub sizes: Vec<usize>,
    pub t_grid: Vec<f64>,
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    #[serde(default = "default_levels")]
    pub levels: Vec<f64>,
    pub seed: u64,
    #[serde(default)]
    pub jel: JelSettings,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::InvalidConfig(
                "replicates: must be at least 1".into(),
            ));
        }
        if self.families.is_empty() {
            return Err(Error::InvalidConfig("families: must be non-empty".into()));
        }
        if self.sizes.is_empty() || self.sizes.iter().any(|&n| n < 3) {
            return Err(Error::InvalidConfig(
                "sizes: every n must be at least 3".into(),
            ));
        }
        if self.t_grid.is_empty() {
            return Err(Error::InvalidConfig("t_grid: must be non-empty".into()));
        }
        let open_interval_needed = self.mode == ExperimentMode::Coverage;
        for &t in &self.t_grid {
            let ok = if open_interval_needed {
                t > 0.0 && t < 1.0
            } else {
                (0.0..=1.0).contains(&t)
            };
            if !ok {
                return Err(Error::InvalidConfig(format!(
                    "t_grid: t = {t} outside the admissible range"
                )));
            }
        }
        for &level in &self.levels {
            if !(level > 0.0 && level < 1.0) {
                return Err(Error::InvalidConfig(format!(
                    "levels: {level} outside (0,1)"
                )));
            }
        }
        for spec in &self.families {
            PickandsModel::new(spec.family, spec.theta)
                .map_err(|e| Error::InvalidConfig(format!("families: {e}")))?;
        }
        let jel = self.jel.to_config();
        for &n in &self.sizes {
            jel.validate_for(n)
                .map_err(|e| Error::InvalidConfig(format!("jel: {e}")))?;
        }
        Ok(())
    }

    /// Parse and validate a JSON config file.
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let cfg: ExperimentConfig =
            serde_json::from_str(&text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// SHA-256 of the canonical JSON encoding.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        hex_digest(json.as_bytes())
    }
}

fn hex_digest(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Per-level coverage summary of one experiment cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelStat {
    pub level: f64,
    pub coverage: f64,
    pub mean_width: f64,
    pub half_open: u64,
}

/// One `(family, θ, n, t)` cell of a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub family: Family,
    pub theta: f64,
    pub n: usize,
    pub t: f64,
    pub true_value: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub mse_adaptive: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub mse_cfg: Option<f64>,
    /// `mse_adaptive / mse_cfg`; absent (NaN-flagged) when undefined.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub ratio: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub coverage: Vec<LevelStat>,
    pub failures: u64,
}

/// Structured output of an experiment run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub mode: ExperimentMode,
    pub seed: u64,
    pub config_hash: String,
    pub replicates: usize,
    pub rows: Vec<ReportRow>,
    pub wall_time_secs: f64,
}

impl ExperimentReport {
    /// Hash of everything a rerun must reproduce (wall time excluded).
    pub fn values_hash(&self) -> String {
        let body = serde_json::to_string(&(&self.config_hash, self.seed, &self.rows))
            .expect("report serializes");
        hex_digest(body.as_bytes())
    }
}

/// `mse_adaptive / mse_cfg`, undefined when the denominator vanishes.
fn mse_ratio(mse_adaptive: f64, mse_cfg: f64) -> Option<f64> {
    (mse_cfg != 0.0).then(|| mse_adaptive / mse_cfg)
}

/// Stream id layout: replicates of cell `c` occupy `[c·R, (c+1)·R)`.
fn cell_stream(cell: usize, replicates: usize, r: usize) -> u64 {
    (cell * replicates + r) as u64
}

/// Run the mean-squared-error study: per `(family, n, t)`, the MSE of the
/// adaptive weighted estimator, of the rank-CFG estimator, and their ratio.
pub fn run_mse_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    if cfg.mode != ExperimentMode::MseRatio {
        return Err(Error::InvalidConfig("mode must be mse_ratio".into()));
    }
    cfg.validate()?;
    let start = Instant::now();
    let mut rows = Vec::new();
    let mut cell = 0usize;
    for spec in &cfg.families {
        let model = PickandsModel::new(spec.family, spec.theta)?;
        for &n in &cfg.sizes {
            // One replicate outcome: per-t squared errors for both
            // estimators, or None if the replicate failed outright.
            let outcomes: Vec<Option<Vec<(f64, f64)>>> = (0..cfg.replicates)
                .into_par_iter()
                .map(|r| {
                    let stream = RngStream::new(cfg.seed, cell_stream(cell, cfg.replicates, r));
                    let draw = model.sample(n, stream);
                    let ps = PseudoSample::from_data(&draw.pairs).ok()?;
                    Some(
                        cfg.t_grid
                            .iter()
                            .map(|&t| {
                                let truth = model.pickands(t);
                                let e_adaptive = adaptive_weighted(&ps, t) - truth;
                                let e_cfg = cfg_rank(&ps, t) - truth;
                                (e_adaptive * e_adaptive, e_cfg * e_cfg)
                            })
                            .collect(),
                    )
                })
                .collect();
            cell += 1;

            let failures = outcomes.iter().filter(|o| o.is_none()).count() as u64;
            let successes = (cfg.replicates as u64 - failures) as f64;
            for (ti, &t) in cfg.t_grid.iter().enumerate() {
                let (mut sum_a, mut sum_c) = (0.0, 0.0);
                for outcome in outcomes.iter().flatten() {
                    sum_a += outcome[ti].0;
                    sum_c += outcome[ti].1;
                }
                let (mse_a, mse_c) = if successes > 0.0 {
                    (sum_a / successes, sum_c / successes)
                } else {
                    (f64::NAN, f64::NAN)
                };
                rows.push(ReportRow {
                    family: spec.family,
                    theta: spec.theta,
                    n,
                    t,
                    true_value: model.pickands(t),
                    mse_adaptive: (successes > 0.0).then_some(mse_a),
                    mse_cfg: (successes > 0.0).then_some(mse_c),
                    ratio: if successes > 0.0 {
                        mse_ratio(mse_a, mse_c)
                    } else {
                        None
                    },
                    coverage: Vec::new(),
                    failures,
                });
            }
        }
    }
    Ok(ExperimentReport {
        mode: ExperimentMode::MseRatio,
        seed: cfg.seed,
        config_hash: cfg.hash(),
        replicates: cfg.replicates,
        rows,
        wall_time_secs: start.elapsed().as_secs_f64(),
    })
}

struct CoverageOutcome {
    /// Per level: contained the truth, interval width, half-open flag.
    per_level: Vec<(bool, f64, bool)>,
}

/// Run the coverage study: per `(family, n, t, level)`, the fraction of
/// replicates whose JEL interval contains the true `A(t)`.
pub fn run_coverage_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    if cfg.mode != ExperimentMode::Coverage {
        return Err(Error::InvalidConfig("mode must be coverage".into()));
    }
    cfg.validate()?;
    let start = Instant::now();
    let jel_config = cfg.jel.to_config();
    let mut rows = Vec::new();
    let mut cell = 0usize;
    for spec in &cfg.families {
        let model = PickandsModel::new(spec.family, spec.theta)?;
        for &n in &cfg.sizes {
            // Outcome per replicate and t: None marks a failed replicate.
            let outcomes: Vec<Vec<Option<CoverageOutcome>>> = (0..cfg.replicates)
                .into_par_iter()
                .map(|r| {
                    let stream = RngStream::new(cfg.seed, cell_stream(cell, cfg.replicates, r));
                    let draw = model.sample(n, stream);
                    let ps = match PseudoSample::from_data(&draw.pairs) {
                        Ok(ps) => ps,
                        Err(_) => return cfg.t_grid.iter().map(|_| None).collect(),
                    };
                    cfg.t_grid
                        .iter()
                        .map(|&t| {
                            let truth = model.pickands(t);
                            let ctx = JelContext::new(&ps, t, &jel_config).ok()?;
                            let per_level = cfg
                                .levels
                                .iter()
                                .map(|&level| {
                                    let ci = ctx.confidence_interval(level).ok()?;
                                    Some((
                                        ci.lo <= truth && truth <= ci.hi,
                                        ci.hi - ci.lo,
                                        ci.lo_open || ci.hi_open,
                                    ))
                                })
                                .collect::<Option<Vec<_>>>()?;
                            Some(CoverageOutcome { per_level })
                        })
                        .collect()
                })
                .collect();
            cell += 1;

            for (ti, &t) in cfg.t_grid.iter().enumerate() {
                let successes: Vec<&CoverageOutcome> = outcomes
                    .iter()
                    .filter_map(|per_t| per_t[ti].as_ref())
                    .collect();
                let failures = (cfg.replicates - successes.len()) as u64;
                let denom = successes.len().max(1) as f64;
                let coverage = cfg
                    .levels
                    .iter()
                    .enumerate()
                    .map(|(li, &level)| {
                        let covered = successes.iter().filter(|o| o.per_level[li].0).count() as f64;
                        let width_sum: f64 = successes.iter().map(|o| o.per_level[li].1).sum();
                        let half_open =
                            successes.iter().filter(|o| o.per_level[li].2).count() as u64;
                        LevelStat {
                            level,
                            coverage: covered / denom,
                            mean_width: width_sum / denom,
                            half_open,
                        }
                    })
                    .collect();
                rows.push(ReportRow {
                    family: spec.family,
                    theta: spec.theta,
                    n,
                    t,
                    true_value: model.pickands(t),
                    mse_adaptive: None,
                    mse_cfg: None,
                    ratio: None,
                    coverage,
                    failures,
                });
            }
        }
    }
    Ok(ExperimentReport {
        mode: ExperimentMode::Coverage,
        seed: cfg.seed,
        config_hash: cfg.hash(),
        replicates: cfg.replicates,
        rows,
        wall_time_secs: start.elapsed().as_secs_f64(),
    })
}

/// Output encoding for [`emit_report`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

fn fmt6(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else {
        format!("{x:.6}")
    }
}

/// Render the rows as CSV with a stable column order and six-decimal floats.
pub fn report_to_csv(report: &ExperimentReport) -> String {
    let mut out = String::new();
    match report.mode {
        ExperimentMode::Coverage => {
            out.push_str("family,theta,n,t,level,coverage,mean_width,failures\n");
            for row in &report.rows {
                for stat in &row.coverage {
                    out.push_str(&format!(
                        "{},{},{},{},{},{},{},{}\n",
                        row.family,
                        fmt6(row.theta),
                        row.n,
                        fmt6(row.t),
                        fmt6(stat.level),
                        fmt6(stat.coverage),
                        fmt6(stat.mean_width),
                        row.failures
                    ));
                }
            }
        }
        ExperimentMode::MseRatio => {
            out.push_str("family,theta,n,t,mse_adaptive,mse_cfg,ratio,failures\n");
            for row in &report.rows {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{}\n",
                    row.family,
                    fmt6(row.theta),
                    row.n,
                    fmt6(row.t),
                    fmt6(row.mse_adaptive.unwrap_or(f64::NAN)),
                    fmt6(row.mse_cfg.unwrap_or(f64::NAN)),
                    fmt6(row.ratio.unwrap_or(f64::NAN)),
                    row.failures
                ));
            }
        }
    }
    out
}

/// Write a report to `path` in the chosen format.
pub fn emit_report(report: &ExperimentReport, format: ReportFormat, path: &Path) -> Result<()> {
    let mut file = std::fs::File::create(path)?;
    match format {
        ReportFormat::Csv => file.write_all(report_to_csv(report).as_bytes())?,
        ReportFormat::Json => {
            let json = serde_json::to_string_pretty(report)
                .map_err(|e| Error::InvalidConfig(e.to_string()))?;
            file.write_all(json.as_bytes())?;
            file.write_all(b"\n")?;
        }
    }
    Ok(())
}
