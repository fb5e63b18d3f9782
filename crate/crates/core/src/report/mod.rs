//! Report bundles: per-suite charts, tables and JSON summaries plus a run
//! manifest with content hashes.

mod bundle;
pub mod svg;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metrics::SuiteMetrics;
use crate::scoring::ScoredSentence;
use crate::stats::{Coefficient, ContrastCI, MixedModelFit};

pub use bundle::{
    coefficients_csv, emit_bundle, sha256_hex, timestamp, write_atomic, Manifest, ManifestFile,
    ManifestSuite, RunInfo, SUITE_FILES,
};
pub use svg::{render_bar_chart, Bar, BarChart};

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("cannot write {path}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("suite '{0}' appears more than once in the run")]
    DuplicateSuite(String),
}

/// Mean of a per-item quantity with its confidence half-width.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub label: String,
    pub mean: f64,
    pub half_width: Option<f64>,
    pub n_items: usize,
    /// Level of the contrast factor, used to colour charts.
    #[serde(skip)]
    pub group: usize,
}

/// Everything reported for one suite. All numbers in the charts and tables
/// come from this structure, which is also written as `summary.json`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub suite_sha256: String,
    pub n_items: usize,
    pub confidence: f64,
    /// Factor whose levels colour the charts (structure for island suites).
    pub grouping: Option<String>,
    pub grouping_levels: Vec<String>,
    pub metrics: SuiteMetrics,
    pub condition_ci: Option<ContrastCI>,
    /// Mean metric per slice of the non-designated factors.
    pub slice_estimates: Vec<Estimate>,
    /// Mean per-item difference of each contrast (test minus reference).
    pub contrast_estimates: Vec<Estimate>,
    pub fit: MixedModelFit,
    /// Coefficients involving every factor the metric consumes.
    pub key_tests: Vec<Coefficient>,
    #[serde(skip)]
    pub scored: Vec<ScoredSentence>,
}
