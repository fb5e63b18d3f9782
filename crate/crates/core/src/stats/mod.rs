//! Mixed-effects regression with by-item random intercepts, Wald tests and
//! within-item confidence intervals.

mod ci;
mod design;
mod reml;
pub mod simulate;

use statrs::function::erf::erfc;
use thiserror::Error;

pub use ci::{mean_ci, t_critical, within_item_ci, ConditionCI, ContrastCI};
pub use design::{build_design, sum_contrasts, DesignMatrix};
pub use reml::{
    fit_mixed_reml, reml_criterion, Coefficient, Convergence, MixedModelFit, LAMBDA_MAX,
    LAMBDA_MIN, LOG_LAMBDA_TOL,
};

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("item {item_id} has no value for {condition}")]
    IncompleteCells { item_id: u32, condition: String },
    #[error("{rows} observations are too few for {columns} coefficients")]
    TooFewObservations { rows: usize, columns: usize },
    #[error("need at least 2 items, found {0}")]
    TooFewGroups(usize),
    #[error("design has {rows} rows but {responses} responses")]
    Shape { rows: usize, responses: usize },
    #[error("design matrix is rank deficient")]
    RankDeficient,
    #[error("response contains non-finite values")]
    NonFinite,
    #[error("variance-ratio optimizer failed: {0}")]
    Bracket(String),
    #[error("confidence level must lie in (0, 1), got {0}")]
    InvalidLevel(f64),
}

/// Two-sided p-value of `z` against the standard normal.
pub fn two_sided_p(z: f64) -> f64 {
    erfc(z.abs() / std::f64::consts::SQRT_2)
}

/// Wald p-value for one coefficient; `None` when the standard error is zero.
pub fn wald_p(estimate: f64, se: f64) -> Option<f64> {
    (se > 0.0 && se.is_finite()).then(|| two_sided_p(estimate / se))
}

pub fn wald_pvalues(fit: &MixedModelFit) -> Vec<Option<f64>> {
    fit.beta
        .iter()
        .zip(&fit.se)
        .map(|(b, s)| wald_p(*b, *s))
        .collect()
}
