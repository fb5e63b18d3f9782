//! Targeted syntactic evaluation: test suites, a Kneser-Ney n-gram
//! baseline, region-level surprisal, licensing metrics, mixed-effects
//! inference and report bundles.

pub mod exec;
pub mod metrics;
pub mod ngram;
pub mod pipeline;
pub mod report;
pub mod scoring;
pub mod stats;
pub mod suite;

pub use exec::Exec;
