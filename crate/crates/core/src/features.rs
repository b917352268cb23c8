//! Per-frame RF features computed from the measured LTS.
//!
//! Error vectors are 64 long in centered subcarrier order with the 12 null
//! subcarriers fixed at zero; their statistics use the 52 active bins only.

use rayon::prelude::*;

use crate::equalizer::{measure, MeasuredLts};
use crate::error::{Error, Result, Stage};
use crate::signal::{ideal_lts, ActiveSubcarrierMask, ComplexSample, PreambleRecord, SYMBOL_LEN};
use crate::sync::{principal_angle, synchronize, wrap_angle};

/// Scale parameter of the fractal-dimension estimator.
pub const FRACTAL_SCALE: usize = 3;

pub type ErrorVector = [f64; SYMBOL_LEN];

pub const NUM_SCALAR_FEATURES: usize = 15;

/// Column order of [`ScalarFeatureVector`]. Importance and correlation
/// reports index into this table.
pub const SCALAR_FEATURE_NAMES: [&str; NUM_SCALAR_FEATURES] = [
    "cfo",
    "short_freq",
    "long_freq",
    "phase_error_mean_1",
    "phase_error_mean_2",
    "phase_error_var_1",
    "phase_error_var_2",
    "iqi_1",
    "iqi_2",
    "mag_error_mean_1",
    "mag_error_mean_2",
    "mag_error_var_1",
    "mag_error_var_2",
    "frac_dimension_1",
    "frac_dimension_2",
];

/// The 15 scalar features in [`SCALAR_FEATURE_NAMES`] order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarFeatureVector(pub [f64; NUM_SCALAR_FEATURES]);

impl ScalarFeatureVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// One full feature row.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRecord {
    pub device_label: String,
    /// Raw 288-sample preamble, when retained.
    pub preamble: Option<Vec<ComplexSample>>,
    /// Measured LTS (`l1` then `l2`), when retained.
    pub iq_preamble: Option<MeasuredLts>,
    pub short_freq: f64,
    pub long_freq: f64,
    pub cfo: f64,
    pub phase_error_v1: ErrorVector,
    pub phase_error_v2: ErrorVector,
    pub phase_error_mean_1: f64,
    pub phase_error_mean_2: f64,
    pub phase_error_var_1: f64,
    pub phase_error_var_2: f64,
    pub mag_error_v1: ErrorVector,
    pub mag_error_v2: ErrorVector,
    pub mag_error_mean_1: f64,
    pub mag_error_mean_2: f64,
    pub mag_error_var_1: f64,
    pub mag_error_var_2: f64,
    /// `None` when the quadrature energy is zero.
    pub iqi_1: Option<f64>,
    pub iqi_2: Option<f64>,
    /// `None` when the ideal-subtracted LTS is constant.
    pub frac_dimension_1: Option<f64>,
    pub frac_dimension_2: Option<f64>,
}

impl FeatureRecord {
    /// The classifier input; `None` if any scalar is undefined.
    pub fn scalars(&self) -> Option<ScalarFeatureVector> {
        Some(ScalarFeatureVector([
            self.cfo,
            self.short_freq,
            self.long_freq,
            self.phase_error_mean_1,
            self.phase_error_mean_2,
            self.phase_error_var_1,
            self.phase_error_var_2,
            self.iqi_1?,
            self.iqi_2?,
            self.mag_error_mean_1,
            self.mag_error_mean_2,
            self.mag_error_var_1,
            self.mag_error_var_2,
            self.frac_dimension_1?,
            self.frac_dimension_2?,
        ]))
    }

    /// Whether the stored means/variances agree with the stored vectors.
    pub fn stats_consistent(&self, tol: f64) -> bool {
        let mask = ideal_lts().mask();
        let pairs = [
            (&self.phase_error_v1, self.phase_error_mean_1, self.phase_error_var_1),
            (&self.phase_error_v2, self.phase_error_mean_2, self.phase_error_var_2),
            (&self.mag_error_v1, self.mag_error_mean_1, self.mag_error_var_1),
            (&self.mag_error_v2, self.mag_error_mean_2, self.mag_error_var_2),
        ];
        pairs.iter().all(|(v, mean, var)| {
            let (m, s) = vector_stats(v, &mask);
            (m - mean).abs() <= tol && (s - var).abs() <= tol
        })
    }
}

/// `wrap(angle(l[j]) - angle(ideal[j]))` at active bins, zero elsewhere.
pub fn phase_error(l_k: &[ComplexSample; SYMBOL_LEN], mask: &ActiveSubcarrierMask) -> ErrorVector {
    let ideal = ideal_lts().phasors();
    let mut out = [0.0; SYMBOL_LEN];
    for j in 0..SYMBOL_LEN {
        if mask.is_active(j) {
            out[j] = wrap_angle(principal_angle(l_k[j]) - principal_angle(ideal[j]));
        }
    }
    out
}

/// `|l[j]| - |ideal[j]|` at active bins, zero elsewhere.
pub fn magnitude_error(l_k: &[ComplexSample; SYMBOL_LEN], mask: &ActiveSubcarrierMask) -> ErrorVector {
    let ideal = ideal_lts().values();
    let mut out = [0.0; SYMBOL_LEN];
    for j in 0..SYMBOL_LEN {
        if mask.is_active(j) {
            out[j] = l_k[j].norm() - f64::from(ideal[j].abs());
        }
    }
    out
}

/// Mean and population variance over the active bins.
pub fn vector_stats(v: &[f64; SYMBOL_LEN], mask: &ActiveSubcarrierMask) -> (f64, f64) {
    let active: Vec<f64> = (0..SYMBOL_LEN)
        .filter(|&j| mask.is_active(j))
        .map(|j| v[j])
        .collect();
    if active.is_empty() {
        return (0.0, 0.0);
    }
    let n = active.len() as f64;
    let mean = active.iter().sum::<f64>() / n;
    let var = active.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var)
}

/// `‖Re l‖² / ‖Im l‖²` over all 64 entries.
pub fn iq_gain_imbalance(l_k: &[ComplexSample; SYMBOL_LEN]) -> Result<f64> {
    let re: f64 = l_k.iter().map(|v| v.re * v.re).sum();
    let im: f64 = l_k.iter().map(|v| v.im * v.im).sum();
    if im == 0.0 {
        return Err(Error::UndefinedImbalance);
    }
    let ratio = re / im;
    if !ratio.is_finite() {
        return Err(Error::UndefinedImbalance);
    }
    Ok(ratio)
}

/// Fractal dimension of the ideal-subtracted symbol at scale 3.
pub fn fractal_dimension(l_k: &[ComplexSample; SYMBOL_LEN]) -> Result<f64> {
    let ideal = ideal_lts().phasors();
    let mut residual = [ComplexSample::new(0.0, 0.0); SYMBOL_LEN];
    for n in 0..SYMBOL_LEN {
        residual[n] = l_k[n] - ideal[n];
    }
    fractal_dimension_of(&residual, FRACTAL_SCALE)
}

/// Two-scale curve-length dimension of `x` (0-based indexing):
/// `½(3 - (ln Σd_τ - ln Σd_1)/ln τ)` where `d_τ` are distances between
/// points `τ` apart over `⌊(N-1)/τ⌋` steps and `d_1` between all `N-1`
/// neighbour pairs. For `N = 64, τ = 3` that is 21 and 63 terms.
pub fn fractal_dimension_of(x: &[ComplexSample], tau: usize) -> Result<f64> {
    assert!(tau >= 2, "scale must be at least 2");
    if x.len() <= tau {
        return Err(Error::DegenerateSignal {
            stage: Stage::Features,
        });
    }
    let steps = (x.len() - 1) / tau;
    let coarse: f64 = (1..=steps).map(|n| (x[n * tau] - x[(n - 1) * tau]).norm()).sum();
    let fine: f64 = (1..x.len()).map(|n| (x[n] - x[n - 1]).norm()).sum();
    if coarse == 0.0 || fine == 0.0 {
        return Err(Error::DegenerateSignal {
            stage: Stage::Features,
        });
    }
    Ok(0.5 * (3.0 - (coarse.ln() - fine.ln()) / (tau as f64).ln()))
}

/// The full pipeline for one frame: synchronize, equalize, then compute
/// every feature for both LTS symbols.
pub fn extract_features(rec: &PreambleRecord) -> Result<FeatureRecord> {
    let label = rec.device_label();
    let (cfo, corrected) = synchronize(rec).map_err(|e| {
        let stage = match &e {
            Error::DegenerateSignal { stage } => *stage,
            _ => Stage::CoarseCfo,
        };
        e.at_stage(label, stage)
    })?;
    let (_, measured) = measure(&corrected).map_err(|e| e.at_stage(label, Stage::Equalize))?;

    let mask = ideal_lts().mask();
    let pe1 = phase_error(&measured.l1, &mask);
    let pe2 = phase_error(&measured.l2, &mask);
    let me1 = magnitude_error(&measured.l1, &mask);
    let me2 = magnitude_error(&measured.l2, &mask);
    let (pm1, pv1) = vector_stats(&pe1, &mask);
    let (pm2, pv2) = vector_stats(&pe2, &mask);
    let (mm1, mv1) = vector_stats(&me1, &mask);
    let (mm2, mv2) = vector_stats(&me2, &mask);

    Ok(FeatureRecord {
        device_label: label.to_string(),
        preamble: Some(rec.samples().to_vec()),
        short_freq: cfo.coarse,
        long_freq: cfo.fine,
        cfo: cfo.total,
        phase_error_v1: pe1,
        phase_error_v2: pe2,
        phase_error_mean_1: pm1,
        phase_error_mean_2: pm2,
        phase_error_var_1: pv1,
        phase_error_var_2: pv2,
        mag_error_v1: me1,
        mag_error_v2: me2,
        mag_error_mean_1: mm1,
        mag_error_mean_2: mm2,
        mag_error_var_1: mv1,
        mag_error_var_2: mv2,
        iqi_1: iq_gain_imbalance(&measured.l1).ok(),
        iqi_2: iq_gain_imbalance(&measured.l2).ok(),
        frac_dimension_1: fractal_dimension(&measured.l1).ok(),
        frac_dimension_2: fractal_dimension(&measured.l2).ok(),
        iq_preamble: Some(measured),
    })
}

/// Record-parallel extraction; output order matches input order.
pub fn extract_batch(records: &[PreambleRecord]) -> Vec<Result<FeatureRecord>> {
    records.par_iter().map(extract_features).collect()
}
