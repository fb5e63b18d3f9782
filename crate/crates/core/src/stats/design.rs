use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

use super::StatsError;
use crate::suite::{Cell, TestSuite};

/// Fixed-effects design with one row per (item, cell) observation.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    pub column_names: Vec<String>,
    pub x: DMatrix<f64>,
    /// Item id of each row.
    pub groups: Vec<u32>,
}

impl DesignMatrix {
    pub fn nrows(&self) -> usize {
        self.x.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.x.ncols()
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.column_names.iter().position(|c| c == name)
    }
}

/// Sum-coding matrix for `k` levels: `k` rows by `k - 1` columns. Column
/// `j` is +1 at level `j`, -1 at the last level and 0 elsewhere, so a binary
/// factor codes its declared levels as +1 and -1.
pub fn sum_contrasts(k: usize) -> Vec<Vec<f64>> {
    (0..k)
        .map(|level| {
            (0..k.saturating_sub(1))
                .map(|j| {
                    if level == k - 1 {
                        -1.0
                    } else if level == j {
                        1.0
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect()
}

/// Non-empty subsets of `0..n`, by size and then lexicographically.
fn terms(n: usize) -> Vec<Vec<usize>> {
    let mut all: Vec<Vec<usize>> = (1u64..(1 << n))
        .map(|mask| (0..n).filter(|i| mask >> i & 1 == 1).collect())
        .collect();
    all.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    all
}

struct TermColumn {
    name: String,
    /// (factor, contrast column) pairs whose codes are multiplied.
    parts: Vec<(usize, usize)>,
}

fn term_columns(suite: &TestSuite) -> Vec<TermColumn> {
    let mut columns = Vec::new();
    for term in terms(suite.factors.len()) {
        let mut partial: Vec<TermColumn> = vec![TermColumn {
            name: String::new(),
            parts: Vec::new(),
        }];
        for &f in &term {
            let factor = &suite.factors[f];
            let k = factor.levels.len();
            let mut next = Vec::new();
            for prefix in &partial {
                for j in 0..k - 1 {
                    let piece = if k == 2 {
                        factor.name.clone()
                    } else {
                        format!("{}[{}]", factor.name, factor.levels[j])
                    };
                    let name = if prefix.name.is_empty() {
                        piece
                    } else {
                        format!("{}:{piece}", prefix.name)
                    };
                    let mut parts = prefix.parts.clone();
                    parts.push((f, j));
                    next.push(TermColumn { name, parts });
                }
            }
            partial = next;
        }
        columns.extend(partial);
    }
    columns
}

/// Design for the full factorial model: intercept, sum-coded main effects in
/// suite factor order, then interactions by degree. Rows follow suite item
/// order, then canonical cell order.
pub fn build_design(
    suite: &TestSuite,
    values: &BTreeMap<(u32, Cell), f64>,
) -> Result<(DesignMatrix, DVector<f64>), StatsError> {
    let contrasts: Vec<Vec<Vec<f64>>> = suite
        .factors
        .iter()
        .map(|f| sum_contrasts(f.levels.len()))
        .collect();
    let columns = term_columns(suite);
    let cells = suite.cells();
    let n = suite.items.len() * cells.len();
    let p = columns.len() + 1;

    let mut x = DMatrix::zeros(n, p);
    let mut y = DVector::zeros(n);
    let mut groups = Vec::with_capacity(n);
    let mut row = 0;
    for item in &suite.items {
        for cell in &cells {
            let value = values
                .get(&(item.item_id, cell.clone()))
                .ok_or_else(|| StatsError::IncompleteCells {
                    item_id: item.item_id,
                    condition: suite.condition_label(cell),
                })?;
            y[row] = *value;
            x[(row, 0)] = 1.0;
            for (c, column) in columns.iter().enumerate() {
                x[(row, c + 1)] = column
                    .parts
                    .iter()
                    .map(|&(f, j)| contrasts[f][cell.0[f]][j])
                    .product();
            }
            groups.push(item.item_id);
            row += 1;
        }
    }
    let mut column_names = vec!["(intercept)".to_string()];
    column_names.extend(columns.into_iter().map(|c| c.name));
    Ok((
        DesignMatrix {
            column_names,
            x,
            groups,
        },
        y,
    ))
}
