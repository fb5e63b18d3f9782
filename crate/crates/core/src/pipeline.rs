//! Score, measure, fit and report a set of suites.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metrics::{compute_metrics, contrast_factor, measurement_values};
use crate::report::{emit_bundle, sha256_hex, Estimate, Manifest, RunInfo, SuiteReport};
use crate::scoring::{score_suite, ScoredSentence, Scorer};
use crate::stats::{build_design, fit_mixed_reml, mean_ci, within_item_ci, Coefficient};
use crate::suite::{serialize_suite, MetricKind, TestSuite, FILLER, GAP, MATCH};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Load,
    Score,
    Metrics,
    Stats,
    Report,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Load => "load",
            Stage::Score => "score",
            Stage::Metrics => "metrics",
            Stage::Stats => "stats",
            Stage::Report => "report",
        })
    }
}

#[derive(Debug, Error)]
#[error("stage '{stage}' failed{}", suite_suffix(.suite))]
pub struct PipelineError {
    pub stage: Stage,
    pub suite: Option<String>,
    #[source]
    pub source: Box<dyn std::error::Error + Send + Sync>,
}

fn suite_suffix(suite: &Option<String>) -> String {
    suite.as_ref().map(|s| format!(" for suite '{s}'")).unwrap_or_default()
}

impl PipelineError {
    pub fn new(
        stage: Stage,
        suite: Option<&str>,
        source: impl Into<Box<dyn std::error::Error + Send + Sync>>,
    ) -> Self {
        Self {
            stage,
            suite: suite.map(str::to_string),
            source: source.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ScorerSpec {
    Builtin { model: PathBuf },
    Command { command: Vec<String> },
}

/// Fixed-effect coding. Only sum coding (+1/-1) is implemented.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Coding {
    #[default]
    Sum,
}

fn default_confidence() -> f64 {
    0.95
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

/// Settings for `gapscope run`, loadable from a JSON file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Suite files or bundled suite names; empty means every bundled suite.
    #[serde(default)]
    pub suites: Vec<String>,
    pub scorer: Option<ScorerSpec>,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    #[serde(default = "default_confidence")]
    pub confidence: f64,
    #[serde(default)]
    pub coding: Coding,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub dry_run: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            suites: Vec::new(),
            scorer: None,
            out: default_out(),
            confidence: default_confidence(),
            coding: Coding::Sum,
            seed: 0,
            dry_run: false,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("no scorer given: use --scorer builtin --model PATH or --scorer cmd -- COMMAND")]
    NoScorer,
    #[error("confidence level must lie in (0, 1), got {0}")]
    Confidence(f64),
    #[error("external scorer command is empty")]
    EmptyCommand,
}

impl RunConfig {
    pub fn check(&self) -> Result<&ScorerSpec, ConfigError> {
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return Err(ConfigError::Confidence(self.confidence));
        }
        match &self.scorer {
            None => Err(ConfigError::NoScorer),
            Some(ScorerSpec::Command { command }) if command.is_empty() => {
                Err(ConfigError::EmptyCommand)
            }
            Some(spec) => Ok(spec),
        }
    }
}

/// Hash of the canonical serialization, stable across file formatting.
pub fn suite_sha256(suite: &TestSuite) -> String {
    sha256_hex(serialize_suite(suite).as_bytes())
}

fn designated(kind: MetricKind) -> &'static [&'static str] {
    match kind {
        MetricKind::LicensingInteraction => &[FILLER, GAP],
        MetricKind::ExpectationEffect => &[MATCH],
        MetricKind::ConditionMeans => &[],
    }
}

fn involves_all(name: &str, factors: &[&str]) -> bool {
    let parts: Vec<&str> = name
        .split(':')
        .map(|p| p.split('[').next().unwrap_or(p))
        .collect();
    !factors.is_empty() && factors.iter().all(|f| parts.contains(f))
}

/// Metrics, model fit and intervals for one scored suite.
pub fn analyze_suite(
    suite: &TestSuite,
    scored: Vec<ScoredSentence>,
    confidence: f64,
) -> Result<SuiteReport, PipelineError> {
    let name = Some(suite.name.as_str());
    let values = measurement_values(suite, &scored)
        .map_err(|e| PipelineError::new(Stage::Metrics, name, e))?;
    let metrics =
        compute_metrics(suite, &values).map_err(|e| PipelineError::new(Stage::Metrics, name, e))?;

    let stats_err = |e: crate::stats::StatsError| PipelineError::new(Stage::Stats, name, e);
    let (design, y) = build_design(suite, &values).map_err(stats_err)?;
    let fit = fit_mixed_reml(&design, &y).map_err(stats_err)?;

    let mut table: BTreeMap<u32, IndexMap<String, f64>> = BTreeMap::new();
    for ((item, cell), v) in &values {
        table
            .entry(*item)
            .or_default()
            .insert(suite.condition_label(cell), *v);
    }
    let condition_ci = within_item_ci(&table, confidence).map_err(stats_err)?;

    let grouping = contrast_factor(suite);
    let group_of = |slice: &IndexMap<String, String>| {
        grouping
            .and_then(|g| {
                let factor = &suite.factors[g];
                slice.get(&factor.name).and_then(|l| factor.level_index(l))
            })
            .unwrap_or(0)
    };
    let estimate = |label: String, per_item: &BTreeMap<u32, f64>, group: usize| {
        let vals: Vec<f64> = per_item.values().copied().collect();
        let (mean, half_width) = match mean_ci(&vals, confidence) {
            Ok((m, h)) => (m, Some(h)),
            Err(_) => (vals.iter().sum::<f64>() / vals.len().max(1) as f64, None),
        };
        Estimate {
            label,
            mean,
            half_width,
            n_items: vals.len(),
            group,
        }
    };
    let slice_estimates = metrics
        .slices
        .iter()
        .filter(|s| s.kind != MetricKind::ConditionMeans)
        .map(|s| estimate(s.slice_label(), &s.per_item, group_of(&s.slice)))
        .collect();
    let contrast_estimates = metrics
        .contrasts
        .iter()
        .map(|c| estimate(format!("{} - {}", c.test, c.reference), &c.per_item, 0))
        .collect();
    let key_tests: Vec<Coefficient> = fit
        .coefficients()
        .into_iter()
        .filter(|c| involves_all(&c.name, designated(suite.metric)))
        .collect();

    Ok(SuiteReport {
        suite: suite.name.clone(),
        suite_sha256: suite_sha256(suite),
        n_items: suite.items.len(),
        confidence,
        grouping: grouping.map(|g| suite.factors[g].name.clone()),
        grouping_levels: grouping
            .map(|g| suite.factors[g].levels.clone())
            .unwrap_or_default(),
        metrics,
        condition_ci: Some(condition_ci),
        slice_estimates,
        contrast_estimates,
        fit,
        key_tests,
        scored,
    })
}

/// Machine-readable run result printed on standard output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub out_dir: String,
    pub manifest: String,
    pub suites: Vec<SuiteSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteSummary {
    pub suite: String,
    pub metric: MetricKind,
    pub n_items: usize,
    pub estimates: Vec<Estimate>,
    pub contrasts: Vec<Estimate>,
    pub key_tests: Vec<Coefficient>,
    pub testable: bool,
}

impl From<&SuiteReport> for SuiteSummary {
    fn from(r: &SuiteReport) -> Self {
        Self {
            suite: r.suite.clone(),
            metric: r.metrics.kind,
            n_items: r.n_items,
            estimates: r.slice_estimates.clone(),
            contrasts: r.contrast_estimates.clone(),
            key_tests: r.key_tests.clone(),
            testable: r.fit.testable,
        }
    }
}

/// Score every suite, analyze it and write the report bundle. Nothing is
/// written unless every suite gets through scoring and analysis.
pub fn run_suites(
    suites: &[TestSuite],
    scorer: &mut dyn Scorer,
    info: &RunInfo,
    out_dir: &Path,
    progress: &mut dyn FnMut(&str),
) -> Result<(Manifest, RunSummary), PipelineError> {
    let mut reports = Vec::with_capacity(suites.len());
    for (i, suite) in suites.iter().enumerate() {
        progress(&format!(
            "[{}/{}] scoring {} ({} items)",
            i + 1,
            suites.len(),
            suite.name,
            suite.items.len()
        ));
        let scored = score_suite(suite, scorer)
            .map_err(|e| PipelineError::new(Stage::Score, Some(&suite.name), e))?;
        progress(&format!("[{}/{}] analyzing {}", i + 1, suites.len(), suite.name));
        reports.push(analyze_suite(suite, scored, info.confidence)?);
    }
    progress(&format!("writing report to {}", out_dir.display()));
    let manifest = emit_bundle(&reports, info, out_dir)
        .map_err(|e| PipelineError::new(Stage::Report, None, e))?;
    let summary = RunSummary {
        out_dir: out_dir.display().to_string(),
        manifest: out_dir.join("manifest.json").display().to_string(),
        suites: reports.iter().map(SuiteSummary::from).collect(),
    };
    Ok((manifest, summary))
}
