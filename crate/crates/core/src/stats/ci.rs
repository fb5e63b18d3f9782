use std::collections::BTreeMap;

use indexmap::IndexMap;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal, StudentsT};

use super::StatsError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionCI {
    pub condition: String,
    pub mean: f64,
    pub half_width: f64,
}

/// Within-item confidence intervals: between-item variability is removed
/// before the per-condition standard errors are computed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContrastCI {
    pub level: f64,
    pub df: f64,
    pub conditions: Vec<ConditionCI>,
}

impl ContrastCI {
    pub fn get(&self, condition: &str) -> Option<&ConditionCI> {
        self.conditions.iter().find(|c| c.condition == condition)
    }
}

fn check_level(level: f64) -> Result<(), StatsError> {
    if level > 0.0 && level < 1.0 {
        Ok(())
    } else {
        Err(StatsError::InvalidLevel(level))
    }
}

/// Two-sided critical value of Student's t.
pub fn t_critical(level: f64, df: f64) -> f64 {
    let q = 1.0 - (1.0 - level) / 2.0;
    if df > 1e4 {
        // statrs loses accuracy for huge df; the Cornish-Fisher expansion
        // around the normal quantile is exact to O(df^-3) there
        let z = Normal::standard().inverse_cdf(q);
        let (z3, z5) = (z.powi(3), z.powi(5));
        return z + (z3 + z) / (4.0 * df) + (5.0 * z5 + 16.0 * z3 + 3.0 * z) / (96.0 * df * df);
    }
    StudentsT::new(0.0, 1.0, df)
        .expect("positive degrees of freedom")
        .inverse_cdf(q)
}

/// Adjusted value = raw - item mean + grand mean. Standard errors use the
/// n - 1 sample variance of the adjusted values; the t quantile uses
/// `(n_items - 1)(n_conditions - 1)` degrees of freedom, or `n_items - 1`
/// when there is a single condition.
pub fn within_item_ci(
    values: &BTreeMap<u32, IndexMap<String, f64>>,
    level: f64,
) -> Result<ContrastCI, StatsError> {
    check_level(level)?;
    let n = values.len();
    if n < 2 {
        return Err(StatsError::TooFewGroups(n));
    }
    let conditions: Vec<String> = values.values().next().unwrap().keys().cloned().collect();
    let c = conditions.len();
    let mut adjusted: Vec<Vec<f64>> = vec![Vec::with_capacity(n); c];
    let table: Vec<Vec<f64>> = values
        .iter()
        .map(|(id, row)| {
            conditions
                .iter()
                .map(|cond| {
                    row.get(cond).copied().ok_or_else(|| StatsError::IncompleteCells {
                        item_id: *id,
                        condition: cond.clone(),
                    })
                })
                .collect::<Result<Vec<f64>, _>>()
        })
        .collect::<Result<_, _>>()?;
    let grand = table.iter().flatten().sum::<f64>() / (n * c) as f64;
    for row in &table {
        let item_mean = row.iter().sum::<f64>() / c as f64;
        for (j, v) in row.iter().enumerate() {
            adjusted[j].push(v - item_mean + grand);
        }
    }
    let df = if c > 1 { ((n - 1) * (c - 1)) as f64 } else { (n - 1) as f64 };
    let t = t_critical(level, df);
    let conditions = conditions
        .into_iter()
        .zip(adjusted)
        .zip(&table[0])
        .enumerate()
        .map(|(j, ((condition, adj), _))| {
            let raw_mean = table.iter().map(|r| r[j]).sum::<f64>() / n as f64;
            let m = adj.iter().sum::<f64>() / n as f64;
            let var = adj.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1) as f64;
            ConditionCI {
                condition,
                mean: raw_mean,
                half_width: t * (var / n as f64).sqrt(),
            }
        })
        .collect();
    Ok(ContrastCI {
        level,
        df,
        conditions,
    })
}

/// One-sample t interval for a per-item quantity: (mean, half-width).
pub fn mean_ci(values: &[f64], level: f64) -> Result<(f64, f64), StatsError> {
    check_level(level)?;
    let n = values.len();
    if n < 2 {
        return Err(StatsError::TooFewGroups(n));
    }
    let m = values.iter().sum::<f64>() / n as f64;
    let var = values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1) as f64;
    Ok((m, t_critical(level, (n - 1) as f64) * (var / n as f64).sqrt()))
}
