//! Closed-form estimators for balanced designs.

use gapscope_core::stats::DesignMatrix;
use nalgebra::DVector;

/// Responses of a balanced design as an items x cells table.
pub fn table(y: &DVector<f64>, cells: usize) -> Vec<Vec<f64>> {
    y.as_slice().chunks(cells).map(<[f64]>::to_vec).collect()
}

/// Closed-form ANOVA estimates for a balanced one-way grouped design with
/// saturated cell means: (residual variance, item variance).
pub fn anova_components(t: &[Vec<f64>]) -> (f64, f64) {
    let i = t.len() as f64;
    let c = t[0].len() as f64;
    let grand = t.iter().flatten().sum::<f64>() / (i * c);
    let item_means: Vec<f64> = t.iter().map(|r| r.iter().sum::<f64>() / c).collect();
    let cell_means: Vec<f64> = (0..t[0].len())
        .map(|j| t.iter().map(|r| r[j]).sum::<f64>() / i)
        .collect();
    let mut sse = 0.0;
    for (r, row) in t.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            sse += (v - item_means[r] - cell_means[j] + grand).powi(2);
        }
    }
    let sigma2 = sse / ((i - 1.0) * (c - 1.0));
    let ms_item = c * item_means.iter().map(|m| (m - grand).powi(2)).sum::<f64>() / (i - 1.0);
    (sigma2, (ms_item - sigma2) / c)
}

pub fn ols(design: &DesignMatrix, y: &DVector<f64>) -> DVector<f64> {
    design.x.clone().svd(true, true).solve(y, 1e-12).unwrap()
}

