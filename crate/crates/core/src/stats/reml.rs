//! Linear mixed model with one random intercept per item, fitted by
//! restricted maximum likelihood.
//!
//! With `λ = σ²_item / σ²`, the marginal covariance of item `i` is
//! `σ² (I + λ 11ᵀ)`. Everything the criterion needs reduces to per-item
//! sums and within-item scatter, so each evaluation is O(n p + p³).

use std::collections::BTreeMap;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, SymmetricEigen};
use serde::Serialize;

use super::{wald_p, DesignMatrix, StatsError};

pub const LAMBDA_MIN: f64 = 1e-8;
pub const LAMBDA_MAX: f64 = 1e8;
/// Convergence tolerance on log λ.
pub const LOG_LAMBDA_TOL: f64 = 1e-8;
const GRID: usize = 65;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Coefficient {
    pub name: String,
    pub estimate: f64,
    pub se: f64,
    pub z: Option<f64>,
    pub p: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Convergence {
    pub evaluations: usize,
    /// Final bracket on log λ.
    pub log_lambda_bracket: [f64; 2],
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixedModelFit {
    pub column_names: Vec<String>,
    pub beta: Vec<f64>,
    pub se: Vec<f64>,
    pub p_values: Vec<Option<f64>>,
    pub sigma2_item: f64,
    pub sigma2_resid: f64,
    pub lambda: f64,
    /// Restricted log-likelihood at the optimum; absent for degenerate fits.
    pub log_likelihood: Option<f64>,
    /// The item variance sits on its lower boundary of zero.
    pub boundary: bool,
    /// False when the residual variance is zero and no test is possible.
    pub testable: bool,
    pub n_obs: usize,
    pub n_groups: usize,
    pub convergence: Convergence,
}

impl MixedModelFit {
    pub fn coefficients(&self) -> Vec<Coefficient> {
        self.column_names
            .iter()
            .enumerate()
            .map(|(j, name)| Coefficient {
                name: name.clone(),
                estimate: self.beta[j],
                se: self.se[j],
                z: (self.se[j] > 0.0).then(|| self.beta[j] / self.se[j]),
                p: self.p_values[j],
            })
            .collect()
    }

    pub fn coefficient(&self, name: &str) -> Option<Coefficient> {
        self.coefficients().into_iter().find(|c| c.name == name)
    }
}

struct Group {
    n: f64,
    rows: Vec<usize>,
    /// Column sums of X.
    s: DVector<f64>,
    /// Sum of y.
    t: f64,
}

/// Sufficient statistics of the data for the profiled criterion.
pub(crate) struct Problem<'a> {
    x: &'a DMatrix<f64>,
    y: &'a DVector<f64>,
    groups: Vec<Group>,
    within_xx: DMatrix<f64>,
    within_xy: DVector<f64>,
}

pub(crate) struct Evaluation {
    pub beta: DVector<f64>,
    pub rss: f64,
    /// Part of `rss` from deviations around each item's mean residual.
    pub rss_within: f64,
    pub chol: Cholesky<f64, Dyn>,
    pub loglik: f64,
}

impl<'a> Problem<'a> {
    fn new(design: &'a DesignMatrix, y: &'a DVector<f64>) -> Self {
        let x = &design.x;
        let p = x.ncols();
        let mut by_id: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        for (row, id) in design.groups.iter().enumerate() {
            by_id.entry(*id).or_default().push(row);
        }
        let mut within_xx = DMatrix::zeros(p, p);
        let mut within_xy = DVector::zeros(p);
        let groups = by_id
            .into_values()
            .map(|rows| {
                let n = rows.len() as f64;
                let mut s = DVector::zeros(p);
                let mut t = 0.0;
                for &r in &rows {
                    s += x.row(r).transpose();
                    t += y[r];
                }
                let xbar = &s / n;
                let ybar = t / n;
                for &r in &rows {
                    let xc = x.row(r).transpose() - &xbar;
                    let yc = y[r] - ybar;
                    within_xx += &xc * xc.transpose();
                    within_xy += &xc * yc;
                }
                Group { n, rows, s, t }
            })
            .collect();
        Self {
            x,
            y,
            groups,
            within_xx,
            within_xy,
        }
    }

    fn dims(&self) -> (usize, usize) {
        (self.x.nrows(), self.x.ncols())
    }

    /// GLS fit and restricted log-likelihood at variance ratio `lambda`.
    pub(crate) fn evaluate(&self, lambda: f64) -> Result<Evaluation, StatsError> {
        let (n, p) = self.dims();
        let mut a = self.within_xx.clone();
        let mut b = self.within_xy.clone();
        for g in &self.groups {
            // 1/n - λ/(1+nλ), written without cancellation
            let d = 1.0 / (g.n * (1.0 + g.n * lambda));
            a += (&g.s * g.s.transpose()) * d;
            b += &g.s * (g.t * d);
        }
        let chol = Cholesky::new(a).ok_or(StatsError::RankDeficient)?;
        let beta = chol.solve(&b);

        let residual = self.y - self.x * &beta;
        let mut rss = 0.0;
        let mut rss_within = 0.0;
        let mut log_det_h = 0.0;
        for g in &self.groups {
            let sum: f64 = g.rows.iter().map(|&r| residual[r]).sum();
            let mean = sum / g.n;
            let within: f64 = g.rows.iter().map(|&r| (residual[r] - mean).powi(2)).sum();
            rss_within += within;
            rss += within + sum * sum / (g.n * (1.0 + g.n * lambda));
            log_det_h += (g.n * lambda).ln_1p();
        }
        let log_det_a: f64 = 2.0 * chol.l_dirty().diagonal().iter().map(|v| v.ln()).sum::<f64>();
        let dof = (n - p) as f64;
        let sigma2 = rss / dof;
        let loglik = -0.5
            * (dof * ((2.0 * std::f64::consts::PI * sigma2).ln() + 1.0) + log_det_h + log_det_a);
        Ok(Evaluation {
            beta,
            rss,
            rss_within,
            chol,
            loglik,
        })
    }

    pub(crate) fn loglik(&self, log_lambda: f64) -> f64 {
        self.evaluate(log_lambda.exp())
            .map(|e| e.loglik)
            .unwrap_or(f64::NEG_INFINITY)
    }

    fn total_ss(&self) -> f64 {
        let mean = self.y.mean();
        self.y.iter().map(|v| (v - mean).powi(2)).sum::<f64>()
    }
}

/// Restricted log-likelihood as a function of log λ, for diagnostics.
pub fn reml_criterion(
    design: &DesignMatrix,
    y: &DVector<f64>,
    log_lambda: f64,
) -> Result<f64, StatsError> {
    Problem::new(design, y)
        .evaluate(log_lambda.exp())
        .map(|e| e.loglik)
}

fn check_rank(x: &DMatrix<f64>) -> Result<(), StatsError> {
    let xtx = x.transpose() * x;
    let eig = SymmetricEigen::new(xtx).eigenvalues;
    let max = eig.iter().cloned().fold(0.0, f64::max);
    let min = eig.iter().cloned().fold(f64::INFINITY, f64::min);
    if max <= 0.0 || min <= max * 1e-10 {
        return Err(StatsError::RankDeficient);
    }
    Ok(())
}

pub fn fit_mixed_reml(design: &DesignMatrix, y: &DVector<f64>) -> Result<MixedModelFit, StatsError> {
    let (n, p) = (design.nrows(), design.ncols());
    if y.len() != n || design.groups.len() != n {
        return Err(StatsError::Shape {
            rows: n,
            responses: y.len(),
        });
    }
    if n < p + 2 {
        return Err(StatsError::TooFewObservations { rows: n, columns: p });
    }
    check_rank(&design.x)?;
    let problem = Problem::new(design, y);
    if problem.groups.len() < 2 {
        return Err(StatsError::TooFewGroups(problem.groups.len()));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite);
    }

    let lo = LAMBDA_MIN.ln();
    let hi = LAMBDA_MAX.ln();
    let finish = |lambda: f64,
                  boundary: bool,
                  convergence: Convergence|
     -> Result<MixedModelFit, StatsError> {
        let eval = problem.evaluate(lambda)?;
        let sigma2 = eval.rss / (n - p) as f64;
        let inverse = eval.chol.inverse();
        let se: Vec<f64> = (0..p).map(|j| (sigma2 * inverse[(j, j)]).max(0.0).sqrt()).collect();
        let beta: Vec<f64> = eval.beta.iter().copied().collect();
        let p_values = beta.iter().zip(&se).map(|(b, s)| wald_p(*b, *s)).collect();
        Ok(MixedModelFit {
            column_names: design.column_names.clone(),
            beta,
            se,
            p_values,
            sigma2_item: lambda * sigma2,
            sigma2_resid: sigma2,
            lambda,
            log_likelihood: Some(eval.loglik),
            boundary,
            testable: true,
            n_obs: n,
            n_groups: problem.groups.len(),
            convergence,
        })
    };

    // no within-item variation left once item means are free: nothing to
    // estimate, report OLS
    let threshold = 1e-12 * problem.total_ss() + 1e-20 * y.norm_squared();
    if problem.evaluate(LAMBDA_MAX)?.rss_within <= threshold {
        let ols = problem.evaluate(0.0)?;
        return Ok(MixedModelFit {
            column_names: design.column_names.clone(),
            beta: ols.beta.iter().copied().collect(),
            se: vec![0.0; p],
            p_values: vec![None; p],
            sigma2_item: 0.0,
            sigma2_resid: 0.0,
            lambda: 0.0,
            log_likelihood: None,
            boundary: true,
            testable: false,
            n_obs: n,
            n_groups: problem.groups.len(),
            convergence: Convergence {
                evaluations: 2,
                log_lambda_bracket: [lo, hi],
                converged: true,
            },
        });
    }

    let mut evaluations = 0;
    let mut f = |theta: f64| {
        evaluations += 1;
        problem.loglik(theta)
    };
    let step = (hi - lo) / (GRID - 1) as f64;
    let grid: Vec<f64> = (0..GRID).map(|k| f(lo + k as f64 * step)).collect();
    let k_best = grid
        .iter()
        .enumerate()
        .fold(0, |best, (k, v)| if *v > grid[best] { k } else { best });
    if !grid[k_best].is_finite() {
        return Err(StatsError::Bracket(
            "restricted likelihood is not finite anywhere in the bracket".into(),
        ));
    }
    if k_best == GRID - 1 {
        return Err(StatsError::Bracket(format!(
            "restricted likelihood still increasing at the upper bound λ = {LAMBDA_MAX:e}"
        )));
    }

    // golden-section search around the best grid point
    let mut a = lo + k_best.saturating_sub(1) as f64 * step;
    let mut b = lo + (k_best + 1) as f64 * step;
    let mut best = (lo + k_best as f64 * step, grid[k_best]);
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    let mut iterations = 0;
    while b - a > LOG_LAMBDA_TOL && iterations < 200 {
        iterations += 1;
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d);
        }
        for (theta, value) in [(c, fc), (d, fd)] {
            if value > best.1 {
                best = (theta, value);
            }
        }
    }
    let converged = b - a <= LOG_LAMBDA_TOL;
    if !converged {
        return Err(StatsError::Bracket(format!(
            "log λ search did not converge (bracket width {:e})",
            b - a
        )));
    }
    let convergence = Convergence {
        evaluations,
        log_lambda_bracket: [a, b],
        converged,
    };

    if k_best == 0 && problem.evaluate(0.0)?.loglik >= best.1 {
        return finish(0.0, true, convergence);
    }
    finish(best.0.exp(), false, convergence)
}
