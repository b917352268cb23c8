//! Causal 1-D Kalman filtering of per-device feature sequences.
//!
//! State model is a random walk: `x_t = x_{t-1} + w`, `z_t = x_t + v` with
//! `w ~ N(0, q)` and `v ~ N(0, r)`. The filter starts at `x_1 = z_1`,
//! `P_1 = r`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forest::LabeledFeatureMatrix;

/// Floor for a zero empirical measurement variance.
pub const VARIANCE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeasurementVariance {
    /// `r = Var(z)` of the sequence being filtered.
    Empirical,
    /// `r = fixed_measurement_variance`.
    Fixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KalmanConfig {
    /// `q = scale · Var(z)`.
    pub process_variance_scale: f64,
    pub measurement_variance_mode: MeasurementVariance,
    pub fixed_measurement_variance: Option<f64>,
}

impl Default for KalmanConfig {
    fn default() -> Self {
        Self {
            process_variance_scale: 1e-4,
            measurement_variance_mode: MeasurementVariance::Empirical,
            fixed_measurement_variance: None,
        }
    }
}

impl KalmanConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.process_variance_scale > 0.0) || !self.process_variance_scale.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "process_variance_scale must be > 0, got {}",
                self.process_variance_scale
            )));
        }
        if self.measurement_variance_mode == MeasurementVariance::Fixed {
            match self.fixed_measurement_variance {
                Some(r) if r > 0.0 && r.is_finite() => {}
                other => {
                    return Err(Error::InvalidConfig(format!(
                        "fixed measurement variance must be > 0, got {other:?}"
                    )))
                }
            }
        }
        Ok(())
    }

    /// Resolve `(q, r)` for a sequence.
    fn noise_params(&self, z: &[f64]) -> (f64, f64) {
        let var = population_variance(z).max(VARIANCE_FLOOR);
        let r = match self.measurement_variance_mode {
            MeasurementVariance::Empirical => var,
            MeasurementVariance::Fixed => self.fixed_measurement_variance.unwrap_or(var),
        };
        (self.process_variance_scale * var, r)
    }
}

fn population_variance(z: &[f64]) -> f64 {
    let n = z.len() as f64;
    let mean = z.iter().sum::<f64>() / n;
    z.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n
}

/// Filter `z` and return the state estimates and the gain used at each step
/// (the first gain is reported as 1, the filter adopts `z_1` outright).
pub fn kalman_filter_with_gains(z: &[f64], cfg: &KalmanConfig) -> Result<(Vec<f64>, Vec<f64>)> {
    cfg.validate()?;
    let first = *z.first().ok_or(Error::EmptySequence)?;
    if z.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidConfig("sequence contains non-finite values".into()));
    }
    let (q, r) = cfg.noise_params(z);

    let mut x = first;
    let mut p = r;
    let mut out = Vec::with_capacity(z.len());
    let mut gains = Vec::with_capacity(z.len());
    out.push(x);
    gains.push(1.0);
    for &obs in &z[1..] {
        let p_pred = p + q;
        let k = p_pred / (p_pred + r);
        x += k * (obs - x);
        p = (1.0 - k) * p_pred;
        out.push(x);
        gains.push(k);
    }
    Ok((out, gains))
}

pub fn kalman_smooth(z: &[f64], cfg: &KalmanConfig) -> Result<Vec<f64>> {
    kalman_filter_with_gains(z, cfg).map(|(x, _)| x)
}

/// Smooth every (device, feature) column independently, keeping row order.
///
/// Rows of one device are filtered in the order they appear in the matrix.
pub fn smooth_dataset(data: &LabeledFeatureMatrix, cfg: &KalmanConfig) -> Result<LabeledFeatureMatrix> {
    cfg.validate()?;
    let mut groups: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, label) in data.labels.iter().enumerate() {
        groups.entry(label.as_str()).or_default().push(i);
    }

    let n_features = data.n_features();
    let jobs: Vec<(&str, &Vec<usize>, usize)> = groups
        .iter()
        .flat_map(|(label, rows)| (0..n_features).map(move |f| (*label, rows, f)))
        .collect();

    let results: Vec<Result<(&Vec<usize>, usize, Vec<f64>)>> = jobs
        .par_iter()
        .map(|&(label, rows, f)| {
            let seq: Vec<f64> = rows.iter().map(|&i| data.rows[i][f]).collect();
            kalman_smooth(&seq, cfg)
                .map(|s| (rows, f, s))
                .map_err(|e| Error::Smoothing {
                    label: label.to_string(),
                    feature: data.feature_names[f].clone(),
                    source: Box::new(e),
                })
        })
        .collect();

    let mut out = data.clone();
    for res in results {
        let (rows, f, smoothed) = res?;
        for (&i, v) in rows.iter().zip(smoothed) {
            out.rows[i][f] = v;
        }
    }
    Ok(out)
}
