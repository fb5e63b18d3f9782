//! Synthetic balanced data and null-hypothesis calibration of the Wald test.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::Serialize;

use super::{fit_mixed_reml, DesignMatrix};
use crate::exec::Exec;

/// Generating parameters for a balanced 2x2 design with item intercepts.
/// `beta` is (intercept, filler, gap, filler:gap) under +1/-1 coding.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SyntheticSpec {
    pub n_items: usize,
    pub beta: [f64; 4],
    pub sigma_item: f64,
    pub sigma_resid: f64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            n_items: 20,
            beta: [10.0, 1.0, -1.0, 0.0],
            sigma_item: 1.0,
            sigma_resid: 0.5,
        }
    }
}

/// Cell codes in canonical order: (yes, yes), (yes, no), (no, yes), (no, no).
pub const CELL_CODES: [(f64, f64); 4] = [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)];

pub fn balanced_2x2_with(spec: &SyntheticSpec, rng: &mut ChaCha8Rng) -> (DesignMatrix, DVector<f64>) {
    let n = spec.n_items * 4;
    let mut x = DMatrix::zeros(n, 4);
    let mut y = DVector::zeros(n);
    let mut groups = Vec::with_capacity(n);
    let item_noise = Normal::new(0.0, spec.sigma_item).expect("valid sigma_item");
    let resid_noise = Normal::new(0.0, spec.sigma_resid).expect("valid sigma_resid");
    for item in 0..spec.n_items {
        let intercept = item_noise.sample(rng);
        for (c, (f, g)) in CELL_CODES.iter().enumerate() {
            let row = item * 4 + c;
            let codes = [1.0, *f, *g, f * g];
            for (j, v) in codes.iter().enumerate() {
                x[(row, j)] = *v;
            }
            let mean: f64 = codes.iter().zip(&spec.beta).map(|(a, b)| a * b).sum();
            y[row] = mean + intercept + resid_noise.sample(rng);
            groups.push(item as u32 + 1);
        }
    }
    let column_names = ["(intercept)", "filler", "gap", "filler:gap"]
        .map(String::from)
        .to_vec();
    (
        DesignMatrix {
            column_names,
            x,
            groups,
        },
        y,
    )
}

pub fn balanced_2x2(spec: &SyntheticSpec, seed: u64) -> (DesignMatrix, DVector<f64>) {
    balanced_2x2_with(spec, &mut ChaCha8Rng::seed_from_u64(seed))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Calibration {
    pub spec: SyntheticSpec,
    pub replicates: usize,
    pub alpha: f64,
    pub rejections: usize,
    /// Replicates whose fit failed; they count as non-rejections.
    pub failures: usize,
    pub rejection_rate: f64,
}

/// Simulate data with a true null interaction and count how often the Wald
/// test on the interaction rejects at `alpha`. Replicate `r` draws from its
/// own ChaCha stream, so results do not depend on the execution mode.
pub fn null_calibration(
    spec: &SyntheticSpec,
    replicates: usize,
    alpha: f64,
    seed: u64,
    exec: Exec,
) -> Calibration {
    let spec = SyntheticSpec {
        beta: [spec.beta[0], spec.beta[1], spec.beta[2], 0.0],
        ..spec.clone()
    };
    let outcomes = exec.map_range(replicates, |r| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(r as u64);
        let (design, y) = balanced_2x2_with(&spec, &mut rng);
        fit_mixed_reml(&design, &y)
            .ok()
            .map(|fit| fit.p_values[3].is_some_and(|p| p < alpha))
    });
    let rejections = outcomes.iter().filter(|o| **o == Some(true)).count();
    let failures = outcomes.iter().filter(|o| o.is_none()).count();
    Calibration {
        spec,
        replicates,
        alpha,
        rejections,
        failures,
        rejection_rate: rejections as f64 / replicates.max(1) as f64,
    }
}
