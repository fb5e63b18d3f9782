use std::collections::HashSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::svg::{render_bar_chart, Bar, BarChart};
use super::{ReportError, SuiteReport};
use crate::metrics::metrics_csv;
use crate::stats::MixedModelFit;

/// Files written for every suite, in manifest order.
pub const SUITE_FILES: [&str; 6] = [
    "means.svg",
    "interaction.svg",
    "coefficients.csv",
    "metrics.csv",
    "scored.jsonl",
    "summary.json",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunInfo {
    pub scorer: String,
    pub model_sha256: Option<String>,
    pub timestamp: String,
    pub confidence: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestFile {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestSuite {
    pub name: String,
    pub suite_sha256: String,
    pub files: Vec<ManifestFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    #[serde(flatten)]
    pub run: RunInfo,
    pub suites: Vec<ManifestSuite>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// RFC 3339 UTC timestamp, taken from `SOURCE_DATE_EPOCH` when it is set so
/// that runs can be reproduced byte for byte.
pub fn timestamp() -> String {
    let seconds = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.trim().parse::<i64>().ok())
        .unwrap_or_else(|| {
            std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs() as i64)
                .unwrap_or(0)
        });
    time::OffsetDateTime::from_unix_timestamp(seconds)
        .unwrap_or(time::OffsetDateTime::UNIX_EPOCH)
        .format(&time::format_description::well_known::Rfc3339)
        .expect("RFC 3339 formatting")
}

fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> ReportError + '_ {
    move |source| ReportError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Write through a temporary file in the same directory, then rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), ReportError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut file = tempfile::NamedTempFile::new_in(dir).map_err(io_error(path))?;
    file.write_all(contents).map_err(io_error(path))?;
    file.persist(path).map_err(|e| io_error(path)(e.error))?;
    Ok(())
}

fn number(value: f64) -> String {
    if value.is_finite() {
        value.to_string()
    } else {
        String::new()
    }
}

pub fn coefficients_csv(fit: &MixedModelFit) -> String {
    let mut out = String::from("term,estimate,se,z,p\n");
    for c in fit.coefficients() {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            c.name,
            number(c.estimate),
            number(c.se),
            c.z.map(number).unwrap_or_default(),
            c.p.map(number).unwrap_or_default()
        ));
    }
    out
}

fn interaction_chart(report: &SuiteReport) -> String {
    let bars = report
        .slice_estimates
        .iter()
        .map(|e| Bar {
            label: e.label.clone(),
            value: e.mean,
            half_width: e.half_width,
            group: e.group,
        })
        .collect();
    let groups = match &report.grouping {
        Some(g) => report
            .grouping_levels
            .iter()
            .map(|l| format!("{g}={l}"))
            .collect(),
        None => Vec::new(),
    };
    BarChart {
        title: format!("{}: {}", report.suite, report.metrics.kind),
        y_label: format!("{} (bits)", report.metrics.kind),
        groups,
        bars,
    }
    .render()
}

fn suite_files(report: &SuiteReport) -> Vec<(&'static str, Vec<u8>)> {
    let means = render_bar_chart(
        &format!("{}: surprisal at {}", report.suite, report.metrics.measurement_region),
        &report.metrics.condition_means,
        report.condition_ci.as_ref(),
        report.grouping.as_deref(),
    );
    let scored: String = report
        .scored
        .iter()
        .map(|s| s.to_json_line() + "\n")
        .collect();
    let mut summary = serde_json::to_string_pretty(report).expect("report serializes");
    summary.push('\n');
    vec![
        ("means.svg", means.into_bytes()),
        ("interaction.svg", interaction_chart(report).into_bytes()),
        ("coefficients.csv", coefficients_csv(&report.fit).into_bytes()),
        ("metrics.csv", metrics_csv(&report.metrics).into_bytes()),
        ("scored.jsonl", scored.into_bytes()),
        ("summary.json", summary.into_bytes()),
    ]
}

/// Write `out_dir/<suite>/...` for every report and `out_dir/manifest.json`.
///
/// Suites are first assembled in a staging directory inside `out_dir` and
/// moved into place only once everything has been written, so a failure
/// leaves no partial suite directories behind.
pub fn emit_bundle(
    reports: &[SuiteReport],
    info: &RunInfo,
    out_dir: &Path,
) -> Result<Manifest, ReportError> {
    let mut seen = HashSet::new();
    for r in reports {
        if !seen.insert(r.suite.as_str()) {
            return Err(ReportError::DuplicateSuite(r.suite.clone()));
        }
    }
    fs::create_dir_all(out_dir).map_err(io_error(out_dir))?;
    let staging = tempfile::Builder::new()
        .prefix(".gapscope-staging-")
        .tempdir_in(out_dir)
        .map_err(io_error(out_dir))?;

    let mut suites = Vec::with_capacity(reports.len());
    for report in reports {
        let dir = staging.path().join(&report.suite);
        fs::create_dir(&dir).map_err(io_error(&dir))?;
        let mut files = Vec::new();
        for (name, bytes) in suite_files(report) {
            write_atomic(&dir.join(name), &bytes)?;
            files.push(ManifestFile {
                path: format!("{}/{name}", report.suite),
                sha256: sha256_hex(&bytes),
                bytes: bytes.len() as u64,
            });
        }
        suites.push(ManifestSuite {
            name: report.suite.clone(),
            suite_sha256: report.suite_sha256.clone(),
            files,
        });
    }

    for report in reports {
        let target: PathBuf = out_dir.join(&report.suite);
        if target.exists() {
            fs::remove_dir_all(&target).map_err(io_error(&target))?;
        }
        fs::rename(staging.path().join(&report.suite), &target).map_err(io_error(&target))?;
    }
    let manifest = Manifest {
        tool: "gapscope".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        run: info.clone(),
        suites,
    };
    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    text.push('\n');
    write_atomic(&out_dir.join("manifest.json"), text.as_bytes())?;
    Ok(manifest)
}
