#![allow(dead_code)]

use std::f64::consts::PI;

use rffp::signal::{ideal_lts, ComplexSample};
use rffp::synth::{apply_impairments, ideal_preamble, ImpairmentSpec};
use rffp::PreambleRecord;

/// O(N²) DFT with the output in centered order (DC at 0-based index 32).
pub fn direct_dft_centered(x: &[ComplexSample]) -> Vec<ComplexSample> {
    let n = x.len();
    let natural: Vec<ComplexSample> = (0..n)
        .map(|k| {
            x.iter()
                .enumerate()
                .map(|(t, v)| v * ComplexSample::from_polar(1.0, -2.0 * PI * (k * t) as f64 / n as f64))
                .sum()
        })
        .collect();
    (0..n).map(|p| natural[(p + n / 2) % n]).collect()
}

/// O(N²) inverse of [`direct_dft_centered`].
pub fn direct_idft_centered(centered: &[ComplexSample]) -> Vec<ComplexSample> {
    let n = centered.len();
    (0..n)
        .map(|t| {
            (0..n)
                .map(|p| {
                    let k = (p + n / 2) % n;
                    centered[p] * ComplexSample::from_polar(1.0, 2.0 * PI * (k * t) as f64 / n as f64)
                })
                .sum::<ComplexSample>()
                / n as f64
        })
        .collect()
}

/// Higuchi-style dimension at scale `tau`, written out from the definition
/// with explicit index loops.
pub fn fractal_oracle(lhat: &[ComplexSample], tau: usize) -> f64 {
    let mut coarse = 0.0;
    for n in 1..=(lhat.len() / tau) {
        if n * tau < lhat.len() {
            coarse += (lhat[n * tau] - lhat[(n - 1) * tau]).norm();
        }
    }
    let mut fine = 0.0;
    for n in 1..lhat.len() {
        fine += (lhat[n] - lhat[n - 1]).norm();
    }
    0.5 * (3.0 - (coarse.ln() - fine.ln()) / (tau as f64).ln())
}

pub fn ideal_phasors() -> [ComplexSample; 64] {
    ideal_lts().phasors()
}

pub fn frame(spec: &ImpairmentSpec, seed: u64) -> PreambleRecord {
    PreambleRecord::new("02:00:00:00:00:01", apply_impairments(&ideal_preamble(), spec, seed)).unwrap()
}

pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

pub fn std_dev(v: &[f64]) -> f64 {
    let m = mean(v);
    (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / v.len() as f64).sqrt()
}
