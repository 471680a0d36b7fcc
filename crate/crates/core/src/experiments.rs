//! Named, seeded experiments with CSV/JSONL output and summary statistics.
//!
//! Every `(d, trial)` job draws from its own stream: the seed is derived from
//! `(config seed, experiment, d)` and the stream id is the trial index.
//! Output order is `(d, trial)` regardless of scheduling.

use std::collections::BTreeMap;
use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::SolverConfig;
use crate::constructions::{
    data_hiding_pair, flagged_to_state_pair, lo_vs_locc_delta, net_povm_family, random_rank1_povm,
    uniform_pair, werner_pair,
};
use crate::error::{Error, Result};
use crate::geometry::{
    alpha, majorization_factor_check, mean_width_mc, schatten_width_reference,
    width_projection_traceless, SchattenBall, SupportOracle,
};
use crate::hermitian::HermitianOperator;
use crate::norms::{
    all_norm, lo_norm_block_upper, locc_one_way_exact_flagged, locc_one_way_lower,
    locc_one_way_value, povm_norm, ppt_norm, uniform_norm_estimate, Povm, SolverStatus,
};
use crate::random::{traceless_sphere_direction, uniform_state, RngStream};
use crate::stats::{log_log_fit, mean, median, std_dev, SlopeFit};

type Hermitian = HermitianOperator<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentName {
    TypicalStates,
    Werner,
    DataHiding,
    LoVsLocc,
    MeanWidthSuite,
    NetApprox,
    Concentration,
    Spectra,
    Majorization,
}

impl ExperimentName {
    pub const ALL: [ExperimentName; 9] = [
        ExperimentName::TypicalStates,
        ExperimentName::Werner,
        ExperimentName::DataHiding,
        ExperimentName::LoVsLocc,
        ExperimentName::MeanWidthSuite,
        ExperimentName::NetApprox,
        ExperimentName::Concentration,
        ExperimentName::Spectra,
        ExperimentName::Majorization,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentName::TypicalStates => "typical-states",
            ExperimentName::Werner => "werner",
            ExperimentName::DataHiding => "data-hiding",
            ExperimentName::LoVsLocc => "lo-vs-locc",
            ExperimentName::MeanWidthSuite => "mean-width-suite",
            ExperimentName::NetApprox => "net-approx",
            ExperimentName::Concentration => "concentration",
            ExperimentName::Spectra => "spectra",
            ExperimentName::Majorization => "majorization",
        }
    }

    pub fn description(&self) -> &'static str {
        match self {
            ExperimentName::TypicalStates => "ALL, PPT and one-way LOCC norms of random state pairs",
            ExperimentName::Werner => "PPT norm of the symmetric/antisymmetric Werner pair",
            ExperimentName::DataHiding => "global, PPT and one-way LOCC norms of random data-hiding pairs",
            ExperimentName::LoVsLocc => "LO estimate against the exact one-way LOCC value of flagged operators",
            ExperimentName::MeanWidthSuite => "mean widths of rank-1 POVM bodies and Schatten balls",
            ExperimentName::NetApprox => "two-outcome net families against the trace norm",
            ExperimentName::Concentration => "spread of ALL and PPT norms across dimensions",
            ExperimentName::Spectra => "Schatten norms of random state differences and traceless directions",
            ExperimentName::Majorization => "top-k norm comparison on random traceless vectors",
        }
    }

    fn index(&self) -> u64 {
        ExperimentName::ALL.iter().position(|n| n == self).expect("listed") as u64
    }

    /// Allowed dimensions and minimum trial count.
    fn caps(&self) -> (std::ops::RangeInclusive<usize>, bool, usize) {
        match self {
            ExperimentName::TypicalStates | ExperimentName::Werner => (2..=6, false, 1),
            ExperimentName::DataHiding => (2..=6, true, 1),
            ExperimentName::LoVsLocc => (2..=16, true, 1),
            ExperimentName::MeanWidthSuite | ExperimentName::Spectra => (2..=16, false, 1),
            ExperimentName::NetApprox => (1..=3, false, 1),
            ExperimentName::Concentration => (2..=6, false, 100),
            ExperimentName::Majorization => (2..=64, false, 1),
        }
    }
}

impl fmt::Display for ExperimentName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExperimentName::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| Error::validation(format!("unknown experiment {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Jsonl,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "jsonl" => Ok(OutputFormat::Jsonl),
            _ => Err(Error::validation(format!("unknown output format {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: ExperimentName,
    pub d_values: Vec<usize>,
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    /// `SolverConfig` overrides by field name.
    #[serde(default)]
    pub solver: BTreeMap<String, String>,
    /// Monte-Carlo sample count where the experiment uses one.
    #[serde(default)]
    pub samples: Option<usize>,
    /// Net resolution for `net-approx`.
    #[serde(default)]
    pub epsilon: Option<f64>,
    #[serde(default)]
    pub output_path: Option<PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
}

impl ExperimentConfig {
    /// The default suite entry for an experiment.
    pub fn default_for(name: ExperimentName) -> Self {
        let (d_values, trials) = match name {
            ExperimentName::TypicalStates => (vec![2, 3, 4, 5, 6], 20),
            ExperimentName::Werner => (vec![2, 3, 4, 5], 1),
            ExperimentName::DataHiding => (vec![2, 4, 6], 20),
            ExperimentName::LoVsLocc => (vec![4, 8, 16], 20),
            ExperimentName::MeanWidthSuite => (vec![3, 10], 1),
            ExperimentName::NetApprox => (vec![2], 200),
            ExperimentName::Concentration => (vec![3, 4, 5, 6], 100),
            ExperimentName::Spectra => (vec![4, 8, 16], 50),
            ExperimentName::Majorization => (vec![12], 10_000),
        };
        ExperimentConfig {
            name,
            d_values,
            trials,
            seed: 0,
            solver: BTreeMap::new(),
            samples: None,
            epsilon: None,
            output_path: None,
            format: OutputFormat::Csv,
        }
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_reader(std::io::BufReader::new(File::open(path)?))
            .map_err(|e| Error::Parse {
                line: e.line(),
                message: e.to_string(),
            })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn solver_config(&self) -> Result<SolverConfig> {
        let mut s = SolverConfig::default();
        for (k, v) in &self.solver {
            s.set(k, v)?;
        }
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let (range, even, min_trials) = self.name.caps();
        if self.trials < min_trials.max(1) {
            return Err(Error::validation(format!(
                "{} needs at least {} trials",
                self.name,
                min_trials.max(1)
            )));
        }
        if self.d_values.is_empty() {
            return Err(Error::validation("d_values must be non-empty"));
        }
        for &d in &self.d_values {
            if !range.contains(&d) || (even && d % 2 != 0) {
                let parity = if even { "even " } else { "" };
                return Err(Error::validation(format!(
                    "{}: d = {d} outside the supported {parity}range {}..={}",
                    self.name,
                    range.start(),
                    range.end()
                )));
            }
        }
        if self.samples.is_some_and(|s| s < 100) {
            return Err(Error::validation("samples must be at least 100"));
        }
        if let Some(e) = self.epsilon {
            if !(e > 0.0 && e < 1.0) {
                return Err(Error::validation("epsilon must lie in (0, 1)"));
            }
        }
        self.solver_config()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub experiment: ExperimentName,
    pub d: usize,
    pub trial: usize,
    pub stream_id: u64,
    pub metric: String,
    pub value: f64,
    pub standard_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryEntry {
    pub metric: String,
    pub d: Option<usize>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedFit {
    pub metric: String,
    pub fit: SlopeFit,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Summary {
    pub entries: Vec<SummaryEntry>,
    pub fits: Vec<NamedFit>,
}

impl Summary {
    pub fn get(&self, metric: &str, d: Option<usize>) -> Option<f64> {
        self.entries
            .iter()
            .find(|e| e.metric == metric && e.d == d)
            .map(|e| e.value)
    }

    pub fn fit(&self, metric: &str) -> Option<SlopeFit> {
        self.fits.iter().find(|f| f.metric == metric).map(|f| f.fit)
    }

    fn push(&mut self, metric: impl Into<String>, d: Option<usize>, value: f64) {
        self.entries.push(SummaryEntry {
            metric: metric.into(),
            d,
            value,
        });
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentOutput {
    pub config: ExperimentConfig,
    pub records: Vec<ExperimentRecord>,
    pub summary: Summary,
}

impl ExperimentOutput {
    /// Values of one metric at one `d`, in trial order.
    pub fn values(&self, metric: &str, d: usize) -> Vec<f64> {
        values_of(&self.records, metric, d)
    }
}

fn values_of(records: &[ExperimentRecord], metric: &str, d: usize) -> Vec<f64> {
    records
        .iter()
        .filter(|r| r.metric == metric && r.d == d)
        .map(|r| r.value)
        .collect()
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for every trial of `(experiment, d)`; trials differ by stream id.
pub fn derive_seed(seed: u64, name: ExperimentName, d: usize) -> u64 {
    splitmix64(splitmix64(splitmix64(seed) ^ name.index()) ^ d as u64)
}

/// Seed for objects shared by all trials at one `d` (such as a net family).
fn shared_seed(seed: u64, name: ExperimentName, d: usize) -> u64 {
    splitmix64(derive_seed(seed, name, d) ^ 0x5eed_5eed_5eed_5eed)
}

/// Per-trial output before the `(d, trial)` bookkeeping is attached.
type Metrics = Vec<(&'static str, f64, Option<f64>)>;

/// Runs `job` for every `(d, trial)` in parallel and flattens in order.
fn run_trials<F>(cfg: &ExperimentConfig, job: F) -> Result<Vec<ExperimentRecord>>
where
    F: Fn(usize, usize, &mut ChaCha8Rng) -> Result<Metrics> + Sync,
{
    let jobs: Vec<(usize, usize)> = cfg
        .d_values
        .iter()
        .flat_map(|&d| (0..cfg.trials).map(move |t| (d, t)))
        .collect();
    let results: Vec<Result<Vec<ExperimentRecord>>> = jobs
        .par_iter()
        .map(|&(d, trial)| {
            let stream = RngStream::new(derive_seed(cfg.seed, cfg.name, d), trial as u64);
            let mut rng = stream.generator();
            let metrics = job(d, trial, &mut rng)?;
            Ok(metrics
                .into_iter()
                .map(|(metric, value, standard_error)| ExperimentRecord {
                    experiment: cfg.name,
                    d,
                    trial,
                    stream_id: trial as u64,
                    metric: metric.to_string(),
                    value,
                    standard_error,
                })
                .collect())
        })
        .collect();
    let mut out = Vec::new();
    for r in results {
        out.extend(r?);
    }
    Ok(out)
}

fn distinct_ds(cfg: &ExperimentConfig) -> Vec<usize> {
    let mut ds = cfg.d_values.clone();
    ds.sort_unstable();
    ds.dedup();
    ds
}

/// Median per `d`, plus a log-log fit of the medians when there are two or
/// more distinct positive points.
fn medians_and_fit(summary: &mut Summary, records: &[ExperimentRecord], cfg: &ExperimentConfig, metric: &str) {
    let ds = distinct_ds(cfg);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &d in &ds {
        let v = values_of(records, metric, d);
        if v.is_empty() {
            continue;
        }
        let m = median(&v);
        summary.push(format!("{metric}_median"), Some(d), m);
        xs.push(d as f64);
        ys.push(m);
    }
    if let Ok(fit) = log_log_fit(&xs, &ys) {
        summary.fits.push(NamedFit {
            metric: metric.to_string(),
            fit,
        });
    }
}

fn status_flag(s: SolverStatus) -> f64 {
    if s == SolverStatus::Converged {
        1.0
    } else {
        0.0
    }
}

/// `locc_lower ≤ ppt_upper + 1e-6 ≤ all + 2e-6`.
fn hierarchy_ok(locc: f64, ppt_upper: f64, all: f64) -> f64 {
    if locc <= ppt_upper + 1e-6 && ppt_upper <= all + 1e-6 {
        1.0
    } else {
        0.0
    }
}

pub fn run_typical_states(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    check_name(cfg, ExperimentName::TypicalStates)?;
    let solver = cfg.solver_config()?;
    let records = run_trials(cfg, |d, _, rng| {
        let delta = uniform_pair::<f64, _>(d, rng)?.difference();
        let all = all_norm(&delta);
        let ppt = ppt_norm(&delta, &solver)?.report;
        let locc = locc_one_way_lower(&delta, &solver, rng)?.value;
        Ok(vec![
            ("all_norm", all, None),
            ("ppt_lower", ppt.lower, None),
            ("ppt_upper", ppt.upper, None),
            ("ppt_converged", status_flag(ppt.status), None),
            ("ppt_ratio", ppt.lower / all, None),
            ("locc_lower", locc, None),
            ("hierarchy_ok", hierarchy_ok(locc, ppt.upper, all), None),
        ])
    })?;
    let mut summary = Summary::default();
    for m in ["all_norm", "ppt_lower", "ppt_ratio", "locc_lower"] {
        medians_and_fit(&mut summary, &records, cfg, m);
    }
    push_min(&mut summary, &records, "ppt_ratio");
    push_min(&mut summary, &records, "hierarchy_ok");
    Ok(output(cfg, records, summary))
}

pub fn run_werner(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    check_name(cfg, ExperimentName::Werner)?;
    let solver = cfg.solver_config()?;
    let records = run_trials(cfg, |d, _, _| {
        let delta = werner_pair::<f64>(d)?.difference();
        let target = 4.0 / (d as f64 + 1.0);
        let r = ppt_norm(&delta, &solver)?.report;
        Ok(vec![
            ("all_norm", all_norm(&delta), None),
            ("ppt_lower", r.lower, None),
            ("ppt_upper", r.upper, None),
            ("ppt_target", target, None),
            ("ppt_relative_error", (r.lower - target).abs() / target, None),
            ("ppt_gap", r.gap(), None),
            ("ppt_converged", status_flag(r.status), None),
        ])
    })?;
    let mut summary = Summary::default();
    push_max(&mut summary, &records, "ppt_relative_error");
    push_max(&mut summary, &records, "ppt_gap");
    Ok(output(cfg, records, summary))
}

pub fn run_data_hiding(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    check_name(cfg, ExperimentName::DataHiding)?;
    let solver = cfg.solver_config()?;
    let records = run_trials(cfg, |d, _, rng| {
        let delta = data_hiding_pair::<f64, _>(d, rng)?.difference();
        let all = all_norm(&delta);
        let ppt = ppt_norm(&delta, &solver)?.report;
        let locc = locc_one_way_lower(&delta, &solver, rng)?.value;
        Ok(vec![
            ("all_norm", all, None),
            ("ppt_lower", ppt.lower, None),
            ("ppt_upper", ppt.upper, None),
            ("ppt_converged", status_flag(ppt.status), None),
            ("locc_lower", locc, None),
            ("locc_lower_scaled", locc * (d as f64).sqrt(), None),
            ("hierarchy_ok", hierarchy_ok(locc, ppt.upper, all), None),
        ])
    })?;
    let mut summary = Summary::default();
    for m in ["all_norm", "ppt_lower", "locc_lower", "locc_lower_scaled"] {
        medians_and_fit(&mut summary, &records, cfg, m);
    }
    push_min(&mut summary, &records, "hierarchy_ok");
    Ok(output(cfg, records, summary))
}

pub fn run_lo_vs_locc(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    check_name(cfg, ExperimentName::LoVsLocc)?;
    let solver = cfg.solver_config()?;
    let records = run_trials(cfg, |d, _, rng| {
        let blocks = lo_vs_locc_delta::<f64, _>(d, rng)?;
        let exact = locc_one_way_exact_flagged(&blocks);
        let lo = lo_norm_block_upper(&blocks, &solver, rng)?.value;
        let pair = flagged_to_state_pair(&blocks)?;
        let flag_value = locc_one_way_value(&pair.difference(), &Povm::computational(d))?;
        let df = d as f64;
        Ok(vec![
            ("locc_exact", exact, None),
            ("locc_state_flag", flag_value, None),
            ("lo_estimate", lo, None),
            ("lo_scaled", lo / df.powf(1.5), None),
            ("lo_over_locc", lo / exact, None),
        ])
    })?;
    let mut summary = Summary::default();
    medians_and_fit(&mut summary, &records, cfg, "lo_over_locc");
    push_max(&mut summary, &records, "lo_scaled");
    Ok(output(cfg, records, summary))
}

const DEFAULT_WIDTH_SAMPLES: usize = 20_000;

pub fn run_mean_width_suite(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    check_name(cfg, ExperimentName::MeanWidthSuite)?;
    let n = cfg.samples.unwrap_or(DEFAULT_WIDTH_SAMPLES);
    let records = run_trials(cfg, |d, _, rng| {
        let m = random_rank1_povm::<f64, _>(d, 4, rng)?;
        let km = SupportOracle::povm(m);
        let w = mean_width_mc(&km, n, rng)?;
        let wp = width_projection_traceless(&km, n, rng)?;
        let sinf = mean_width_mc(&SupportOracle::operator_norm_ball(d), n, rng)?;
        let s1 = mean_width_mc(&SupportOracle::trace_norm_ball(d), n, rng)?;
        let r_inf = schatten_width_reference(d, SchattenBall::Sinf)?;
        let r_one = schatten_width_reference(d, SchattenBall::S1)?;
        Ok(vec![
            ("povm_width", w.mean, Some(w.standard_error)),
            ("povm_width_reference", d as f64 * alpha(d * d)?, None),
            ("povm_width_traceless", wp.mean, Some(wp.standard_error)),
            ("sinf_width", sinf.mean, Some(sinf.standard_error)),
            ("sinf_reference", r_inf, None),
            ("sinf_ratio", sinf.mean / r_inf, None),
            ("s1_width", s1.mean, Some(s1.standard_error)),
            ("s1_reference", r_one, None),
            ("s1_ratio", s1.mean / r_one, None),
            ("schatten_width_product", sinf.mean * s1.mean, None),
        ])
    })?;
    let mut summary = Summary::default();
    for m in ["sinf_ratio", "s1_ratio", "schatten_width_product"] {
        medians_and_fit(&mut summary, &records, cfg, m);
    }
    Ok(output(cfg, records, summary))
}

pub fn run_net_approx(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    check_name(cfg, ExperimentName::NetApprox)?;
    let eps = cfg.epsilon.unwrap_or(0.5);
    let mut families = BTreeMap::new();
    for d in distinct_ds(cfg) {
        let mut rng = RngStream::new(shared_seed(cfg.seed, cfg.name, d), 0).generator();
        families.insert(d, net_povm_family::<f64, _>(d, eps, &mut rng)?);
    }
    let records = run_trials(cfg, |d, _, rng| {
        let fam = &families[&d];
        let delta: Hermitian = crate::random::gue_standard(d, rng);
        let best = fam
            .members
            .iter()
            .map(|m| povm_norm(&delta, m))
            .try_fold(0.0f64, |acc, v| v.map(|v| acc.max(v)))?;
        let ratio = best / all_norm(&delta);
        Ok(vec![
            ("family_norm", best, None),
            ("ratio", ratio, None),
            ("violation", if ratio < 1.0 - eps { 1.0 } else { 0.0 }, None),
        ])
    })?;
    let mut summary = Summary::default();
    for (&d, fam) in &families {
        summary.push("family_size", Some(d), fam.len() as f64);
        summary.push("violations", Some(d), values_of(&records, "violation", d).iter().sum());
    }
    push_min(&mut summary, &records, "ratio");
    Ok(output(cfg, records, summary))
}

pub fn run_concentration(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    check_name(cfg, ExperimentName::Concentration)?;
    let solver = cfg.solver_config()?;
    let records = run_trials(cfg, |d, _, rng| {
        let delta = uniform_pair::<f64, _>(d, rng)?.difference();
        let ppt = ppt_norm(&delta, &solver)?.report;
        Ok(vec![
            ("all_norm", all_norm(&delta), None),
            ("ppt_lower", ppt.lower, None),
            ("ppt_converged", status_flag(ppt.status), None),
        ])
    })?;
    let mut summary = Summary::default();
    let ds = distinct_ds(cfg);
    for m in ["all_norm", "ppt_lower"] {
        for &d in &ds {
            let v = values_of(&records, m, d);
            summary.push(format!("{m}_mean"), Some(d), mean(&v));
            summary.push(format!("{m}_std"), Some(d), std_dev(&v));
        }
        if let (Some(&lo), Some(&hi)) = (ds.first(), ds.last()) {
            let s_lo = std_dev(&values_of(&records, m, lo));
            let s_hi = std_dev(&values_of(&records, m, hi));
            summary.push(format!("{m}_std_ratio"), None, s_hi / s_lo);
        }
    }
    Ok(output(cfg, records, summary))
}

const DEFAULT_UNIFORM_SAMPLES: usize = 2_000;

pub fn run_spectra(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    check_name(cfg, ExperimentName::Spectra)?;
    let n = cfg.samples.unwrap_or(DEFAULT_UNIFORM_SAMPLES);
    let records = run_trials(cfg, |d, _, rng| {
        let rho = uniform_state::<f64, _>(d, rng);
        let sigma = uniform_state::<f64, _>(d, rng);
        let diff = rho.op() - sigma.op();
        let delta: Hermitian = traceless_sphere_direction(d, rng);
        let u = uniform_norm_estimate(&delta, n, rng)?;
        let df = d as f64;
        Ok(vec![
            ("delta_trace_norm", delta.trace_norm(), None),
            ("delta_hs_norm", delta.hs_norm(), None),
            ("delta_operator_norm", delta.operator_norm(), None),
            ("states_trace_norm", diff.trace_norm(), None),
            ("states_hs_norm", diff.hs_norm(), None),
            ("states_operator_norm", diff.operator_norm(), None),
            ("uniform_norm", u.mean, Some(u.standard_error)),
            ("uniform_norm_bound", delta.hs_norm() / df, None),
            (
                "uniform_bound_ok",
                if u.mean <= delta.hs_norm() / df + 3.0 * u.standard_error { 1.0 } else { 0.0 },
                None,
            ),
        ])
    })?;
    let mut summary = Summary::default();
    for m in [
        "delta_trace_norm",
        "delta_operator_norm",
        "states_trace_norm",
        "states_hs_norm",
        "states_operator_norm",
        "uniform_norm",
    ] {
        medians_and_fit(&mut summary, &records, cfg, m);
    }
    push_min(&mut summary, &records, "uniform_bound_ok");
    Ok(output(cfg, records, summary))
}

pub fn run_majorization(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    use rand_distr::{Distribution, StandardNormal};
    check_name(cfg, ExperimentName::Majorization)?;
    let records = run_trials(cfg, |n, _, rng| {
        let mut draw = || {
            let mut v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
            let m = v.iter().sum::<f64>() / n as f64;
            v.iter_mut().for_each(|t| *t -= m);
            v
        };
        let x = draw();
        let y = draw();
        let mut violations = 0.0;
        for k in 1..=n {
            if !majorization_factor_check(&x, &y, k)? {
                violations += 1.0;
            }
        }
        Ok(vec![("violations", violations, None)])
    })?;
    let mut summary = Summary::default();
    for d in distinct_ds(cfg) {
        summary.push("violations_total", Some(d), values_of(&records, "violations", d).iter().sum());
    }
    Ok(output(cfg, records, summary))
}

fn check_name(cfg: &ExperimentConfig, expected: ExperimentName) -> Result<()> {
    if cfg.name != expected {
        return Err(Error::validation(format!(
            "config names {} but runner is {expected}",
            cfg.name
        )));
    }
    cfg.validate()
}

fn output(cfg: &ExperimentConfig, records: Vec<ExperimentRecord>, summary: Summary) -> ExperimentOutput {
    ExperimentOutput {
        config: cfg.clone(),
        records,
        summary,
    }
}

fn push_min(summary: &mut Summary, records: &[ExperimentRecord], metric: &str) {
    let v = records
        .iter()
        .filter(|r| r.metric == metric)
        .map(|r| r.value)
        .fold(f64::INFINITY, f64::min);
    summary.push(format!("{metric}_min"), None, v);
}

fn push_max(summary: &mut Summary, records: &[ExperimentRecord], metric: &str) {
    let v = records
        .iter()
        .filter(|r| r.metric == metric)
        .map(|r| r.value)
        .fold(f64::NEG_INFINITY, f64::max);
    summary.push(format!("{metric}_max"), None, v);
}

pub fn run(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    match cfg.name {
        ExperimentName::TypicalStates => run_typical_states(cfg),
        ExperimentName::Werner => run_werner(cfg),
        ExperimentName::DataHiding => run_data_hiding(cfg),
        ExperimentName::LoVsLocc => run_lo_vs_locc(cfg),
        ExperimentName::MeanWidthSuite => run_mean_width_suite(cfg),
        ExperimentName::NetApprox => run_net_approx(cfg),
        ExperimentName::Concentration => run_concentration(cfg),
        ExperimentName::Spectra => run_spectra(cfg),
        ExperimentName::Majorization => run_majorization(cfg),
    }
}

const HEADER: [&str; 7] = [
    "experiment",
    "d",
    "trial",
    "stream_id",
    "metric",
    "value",
    "standard_error",
];

pub fn write_records<W: Write>(records: &[ExperimentRecord], format: OutputFormat, out: W) -> Result<()> {
    match format {
        OutputFormat::Csv => {
            let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
            w.write_record(HEADER)?;
            for r in records {
                w.serialize(r)?;
            }
            w.flush()?;
        }
        OutputFormat::Jsonl => {
            let mut w = BufWriter::new(out);
            for r in records {
                serde_json::to_writer(&mut w, r)?;
                w.write_all(b"\n")?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

pub fn read_records<R: std::io::Read>(format: OutputFormat, input: R) -> Result<Vec<ExperimentRecord>> {
    match format {
        OutputFormat::Csv => {
            let mut r = csv::Reader::from_reader(input);
            r.deserialize().map(|rec| rec.map_err(Error::from)).collect()
        }
        OutputFormat::Jsonl => {
            let mut out = Vec::new();
            for (i, line) in std::io::BufRead::lines(std::io::BufReader::new(input)).enumerate() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                out.push(serde_json::from_str(&line).map_err(|e| Error::Parse {
                    line: i + 1,
                    message: e.to_string(),
                })?);
            }
            Ok(out)
        }
    }
}

/// Writes the records to `path` and the summary to `<path>.summary.json`.
pub fn emit(output: &ExperimentOutput, format: OutputFormat, path: &Path) -> Result<()> {
    write_records(&output.records, format, File::create(path)?)?;
    let mut summary_path = path.as_os_str().to_owned();
    summary_path.push(".summary.json");
    let mut w = BufWriter::new(File::create(PathBuf::from(summary_path))?);
    serde_json::to_writer_pretty(&mut w, &output.summary)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(name: ExperimentName, d_values: Vec<usize>, trials: usize) -> ExperimentConfig {
        ExperimentConfig {
            d_values,
            trials,
            ..ExperimentConfig::default_for(name)
        }
    }

    #[test]
    fn names_roundtrip() {
        for n in ExperimentName::ALL {
            assert_eq!(n.as_str().parse::<ExperimentName>().unwrap(), n);
            let json = serde_json::to_string(&n).unwrap();
            assert_eq!(json, format!("\"{}\"", n.as_str()));
        }
        assert!("nope".parse::<ExperimentName>().is_err());
    }

    #[test]
    fn seeds_are_distinct() {
        let mut seen = std::collections::BTreeSet::new();
        for n in ExperimentName::ALL {
            for d in 1..=16 {
                assert!(seen.insert(derive_seed(0, n, d)));
            }
        }
        assert_ne!(derive_seed(0, ExperimentName::Werner, 2), derive_seed(1, ExperimentName::Werner, 2));
    }

    #[test]
    fn validation_caps() {
        for n in ExperimentName::ALL {
            ExperimentConfig::default_for(n).validate().unwrap();
        }
        assert!(small(ExperimentName::TypicalStates, vec![7], 1).validate().is_err());
        assert!(small(ExperimentName::DataHiding, vec![3], 1).validate().is_err());
        assert!(small(ExperimentName::Concentration, vec![3], 20).validate().is_err());
        assert!(small(ExperimentName::Werner, vec![], 1).validate().is_err());
        assert!(small(ExperimentName::Werner, vec![2], 0).validate().is_err());
        let mut c = small(ExperimentName::Werner, vec![2], 1);
        c.solver.insert("bogus".into(), "1".into());
        assert!(c.validate().is_err());
        assert!(run_werner(&small(ExperimentName::Spectra, vec![2], 1)).is_err());
    }

    #[test]
    fn records_are_ordered_with_stream_ids() {
        let out = run(&small(ExperimentName::Spectra, vec![3, 2], 3)).unwrap();
        let keys: Vec<(usize, usize)> = out.records.iter().map(|r| (r.d, r.trial)).collect();
        let mut expected = Vec::new();
        for d in [3, 2] {
            for t in 0..3 {
                expected.extend(std::iter::repeat_n((d, t), 9));
            }
        }
        assert_eq!(keys, expected);
        assert!(out.records.iter().all(|r| r.stream_id == r.trial as u64));
    }

    #[test]
    fn csv_and_jsonl_roundtrip() {
        let out = run(&small(ExperimentName::Werner, vec![2], 1)).unwrap();
        for format in [OutputFormat::Csv, OutputFormat::Jsonl] {
            let mut buf = Vec::new();
            write_records(&out.records, format, &mut buf).unwrap();
            let back = read_records(format, buf.as_slice()).unwrap();
            assert_eq!(back, out.records);
        }
        let mut empty = Vec::new();
        write_records(&[], OutputFormat::Csv, &mut empty).unwrap();
        assert_eq!(
            String::from_utf8(empty).unwrap(),
            "experiment,d,trial,stream_id,metric,value,standard_error\n"
        );
    }

    #[test]
    fn emit_is_byte_stable() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = small(ExperimentName::LoVsLocc, vec![4], 2);
        let a = dir.path().join("a.csv");
        let b = dir.path().join("b.csv");
        emit(&run(&cfg).unwrap(), OutputFormat::Csv, &a).unwrap();
        emit(&run(&cfg).unwrap(), OutputFormat::Csv, &b).unwrap();
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
        let sa = std::fs::read(dir.path().join("a.csv.summary.json")).unwrap();
        let sb = std::fs::read(dir.path().join("b.csv.summary.json")).unwrap();
        assert_eq!(sa, sb);
    }

    #[test]
    fn werner_records() {
        let out = run(&small(ExperimentName::Werner, vec![3], 1)).unwrap();
        assert!((out.values("ppt_lower", 3)[0] - 1.0).abs() < 1e-2);
        assert!((out.values("all_norm", 3)[0] - 2.0).abs() < 1e-9);
    }

    #[test]
    fn lo_vs_locc_records() {
        let out = run(&small(ExperimentName::LoVsLocc, vec![4], 2)).unwrap();
        for v in out.values("locc_exact", 4) {
            assert!((v - 16.0).abs() < 1e-9 * 16.0);
        }
        for v in out.values("locc_state_flag", 4) {
            assert!((v - 2.0).abs() < 1e-9);
        }
    }

    #[test]
    fn typical_states_hierarchy() {
        let out = run(&small(ExperimentName::TypicalStates, vec![2, 3], 3)).unwrap();
        assert_eq!(out.summary.get("hierarchy_ok_min", None), Some(1.0));
        assert!(out.summary.fit("all_norm").is_some());
    }

    #[test]
    fn net_and_majorization_small() {
        let out = run(&small(ExperimentName::NetApprox, vec![2], 20)).unwrap();
        assert_eq!(out.summary.get("violations", Some(2)), Some(0.0));
        let out = run(&small(ExperimentName::Majorization, vec![6], 50)).unwrap();
        assert_eq!(out.summary.get("violations_total", Some(6)), Some(0.0));
    }

    #[test]
    fn config_json_roundtrip() {
        let mut cfg = ExperimentConfig::default_for(ExperimentName::TypicalStates);
        cfg.solver.insert("tolerance".into(), "1e-6".into());
        cfg.format = OutputFormat::Jsonl;
        let json = serde_json::to_string(&cfg).unwrap();
        let back: ExperimentConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.solver_config().unwrap().tolerance, 1e-6);
        let minimal: ExperimentConfig =
            serde_json::from_str(r#"{"name": "werner", "d_values": [2], "trials": 1}"#).unwrap();
        assert_eq!(minimal.seed, 0);
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"name": "werner", "d_values": [2], "trials": 1, "x": 1}"#).is_err());
    }
}
