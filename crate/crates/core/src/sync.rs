//! Carrier frequency offset estimation and correction.
//!
//! Coarse CFO comes from the lag-16 autocorrelation of the STS, fine CFO from
//! the lag-64 autocorrelation of the coarse-corrected LTS. Both are reported
//! in radians per sample; the total is their sum.

use std::f64::consts::PI;

use crate::error::{Error, Result, Stage};
use crate::signal::{
    ComplexSample, PreambleRecord, LTS_LEN, SAMPLE_RATE_HZ, STS_LEN, STS_PERIOD, SYMBOL_LEN,
};

/// Principal argument in `(-π, π]`.
#[inline]
pub fn principal_angle(z: ComplexSample) -> f64 {
    let a = z.im.atan2(z.re);
    if a <= -PI {
        a + 2.0 * PI
    } else {
        a
    }
}

/// Wrap any angle into `(-π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    let mut w = a.rem_euclid(2.0 * PI);
    if w > PI {
        w -= 2.0 * PI;
    }
    w
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CfoEstimate {
    /// STS estimate, in `(-π/16, π/16]`.
    pub coarse: f64,
    /// LTS residual estimate, in `(-π/64, π/64]`.
    pub fine: f64,
    /// `coarse + fine`.
    pub total: f64,
}

impl CfoEstimate {
    pub fn new(coarse: f64, fine: f64) -> Self {
        Self {
            coarse,
            fine,
            total: coarse + fine,
        }
    }
}

/// Convert radians/sample to Hz at the 20 MS/s capture rate.
pub fn rad_per_sample_to_hz(alpha: f64) -> f64 {
    alpha * SAMPLE_RATE_HZ / (2.0 * PI)
}

/// The frequency-corrected 128-sample LTS.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrectedLts {
    samples: Vec<ComplexSample>,
}

impl CorrectedLts {
    pub fn new(samples: Vec<ComplexSample>) -> Result<Self> {
        check_len(&samples, LTS_LEN)?;
        if let Some(index) = samples
            .iter()
            .position(|s| !s.re.is_finite() || !s.im.is_finite())
        {
            return Err(Error::NonFiniteSample { index });
        }
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[ComplexSample] {
        &self.samples
    }

    pub fn first(&self) -> &[ComplexSample] {
        &self.samples[..SYMBOL_LEN]
    }

    pub fn second(&self) -> &[ComplexSample] {
        &self.samples[SYMBOL_LEN..]
    }
}

fn check_len(x: &[ComplexSample], expected: usize) -> Result<()> {
    if x.len() != expected {
        return Err(Error::MalformedRecord {
            expected,
            found: x.len(),
        });
    }
    Ok(())
}

fn lagged_autocorrelation(x: &[ComplexSample], lag: usize, terms: usize) -> ComplexSample {
    x[..terms]
        .iter()
        .zip(&x[lag..lag + terms])
        .map(|(a, b)| a.conj() * b)
        .sum()
}

/// `(1/16)·angle(Σ_{i=1}^{112} sts[i]* · sts[i+16])`.
pub fn estimate_coarse_cfo(sts: &[ComplexSample]) -> Result<f64> {
    check_len(sts, STS_LEN)?;
    let corr = lagged_autocorrelation(sts, STS_PERIOD, STS_LEN - STS_PERIOD);
    if corr == ComplexSample::new(0.0, 0.0) {
        return Err(Error::DegenerateSignal {
            stage: Stage::CoarseCfo,
        });
    }
    Ok(principal_angle(corr) / STS_PERIOD as f64)
}

/// `(1/64)·angle(Σ_{i=1}^{64} lts[i]* · lts[i+64])`.
pub fn estimate_fine_cfo(lts_hat: &[ComplexSample]) -> Result<f64> {
    check_len(lts_hat, LTS_LEN)?;
    let corr = lagged_autocorrelation(lts_hat, SYMBOL_LEN, SYMBOL_LEN);
    if corr == ComplexSample::new(0.0, 0.0) {
        return Err(Error::DegenerateSignal {
            stage: Stage::FineCfo,
        });
    }
    Ok(principal_angle(corr) / SYMBOL_LEN as f64)
}

/// De-rotate: `out[i] = x[i]·e^{-j(i-1)α}` with the phase index restarting
/// at the first LTS sample.
fn derotate(x: &[ComplexSample], alpha: f64) -> Vec<ComplexSample> {
    x.iter()
        .enumerate()
        .map(|(i, &s)| s * ComplexSample::from_polar(1.0, -(i as f64) * alpha))
        .collect()
}

/// Coarse correction of the raw LTS (samples 161..=288).
pub fn correct_coarse(lts_raw: &[ComplexSample], alpha_s: f64) -> Result<Vec<ComplexSample>> {
    check_len(lts_raw, LTS_LEN)?;
    Ok(derotate(lts_raw, alpha_s))
}

/// Fine correction of the coarse-corrected LTS.
pub fn correct_fine(lts_hat: &[ComplexSample], alpha_l: f64) -> Result<CorrectedLts> {
    check_len(lts_hat, LTS_LEN)?;
    CorrectedLts::new(derotate(lts_hat, alpha_l))
}

/// Coarse estimate, coarse correction, fine estimate, fine correction.
pub fn synchronize(rec: &PreambleRecord) -> Result<(CfoEstimate, CorrectedLts)> {
    let parts = rec.split();
    let coarse = estimate_coarse_cfo(parts.sts)?;
    let lts_hat = correct_coarse(parts.lts, coarse)?;
    let fine = estimate_fine_cfo(&lts_hat)?;
    let corrected = correct_fine(&lts_hat, fine)?;
    Ok((CfoEstimate::new(coarse, fine), corrected))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pattern16() -> Vec<ComplexSample> {
        (0..16)
            .map(|k| ComplexSample::new(1.0 + 0.1 * k as f64, (k as f64 * 0.7).sin()))
            .collect()
    }

    fn periodic(period: &[ComplexSample], len: usize, alpha: f64) -> Vec<ComplexSample> {
        (0..len)
            .map(|i| period[i % period.len()] * ComplexSample::from_polar(1.0, alpha * i as f64))
            .collect()
    }

    #[test]
    fn coarse_zero_rotation() {
        let sts = periodic(&pattern16(), 128, 0.0);
        assert_eq!(estimate_coarse_cfo(&sts).unwrap(), 0.0);
    }

    #[test]
    fn coarse_recovers_small_offset() {
        let sts = periodic(&pattern16(), 128, 0.01);
        assert!((estimate_coarse_cfo(&sts).unwrap() - 0.01).abs() < 1e-12);
    }

    #[test]
    fn coarse_aliases_beyond_range() {
        let sts = periodic(&pattern16(), 128, 0.20);
        let expected = 0.20 - 2.0 * PI / 16.0;
        let got = estimate_coarse_cfo(&sts).unwrap();
        assert!((got - expected).abs() < 1e-12, "{got} vs {expected}");
        assert!((got + 0.19270).abs() < 1e-5);
    }

    #[test]
    fn coarse_rejects_all_zero() {
        let sts = vec![ComplexSample::new(0.0, 0.0); 128];
        assert!(matches!(
            estimate_coarse_cfo(&sts),
            Err(Error::DegenerateSignal {
                stage: Stage::CoarseCfo
            })
        ));
    }

    #[test]
    fn coarse_correction_cases() {
        let x: Vec<_> = (0..128).map(|i| ComplexSample::new(i as f64, 1.0)).collect();
        assert_eq!(correct_coarse(&x, 0.0).unwrap(), x);

        let tone = periodic(&[ComplexSample::new(1.0, 0.0)], 128, 0.01);
        for v in correct_coarse(&tone, 0.01).unwrap() {
            assert!((v - ComplexSample::new(1.0, 0.0)).norm() < 1e-12);
        }

        let out = correct_coarse(&x, 0.37).unwrap();
        for (a, b) in x.iter().zip(&out) {
            assert!((a.norm() - b.norm()).abs() < 1e-9 * a.norm().max(1.0));
        }
        assert!(correct_coarse(&x[..127], 0.1).is_err());
    }

    fn pattern64() -> Vec<ComplexSample> {
        (0..64)
            .map(|k| ComplexSample::new((k as f64 * 0.31).cos() + 0.2, (k as f64 * 1.3).sin()))
            .collect()
    }

    #[test]
    fn fine_cases() {
        let s = pattern64();
        let same = periodic(&s, 128, 0.0);
        assert_eq!(estimate_fine_cfo(&same).unwrap(), 0.0);

        let rotated = periodic(&s, 128, 0.003);
        assert!((estimate_fine_cfo(&rotated).unwrap() - 0.003).abs() < 1e-12);

        let wrapped = periodic(&s, 128, 0.05);
        let expected = 0.05 - 2.0 * PI / 64.0;
        assert!((estimate_fine_cfo(&wrapped).unwrap() - expected).abs() < 1e-12);
        assert!((expected + 0.04818).abs() < 1e-5);

        assert!(matches!(
            estimate_fine_cfo(&vec![ComplexSample::new(0.0, 0.0); 128]),
            Err(Error::DegenerateSignal {
                stage: Stage::FineCfo
            })
        ));
    }

    #[test]
    fn fine_correction_cases() {
        let s = periodic(&pattern64(), 128, 0.0);
        assert_eq!(correct_fine(&s, 0.0).unwrap().samples(), &s[..]);
        let tone = periodic(&[ComplexSample::new(1.0, 0.0)], 128, 0.003);
        let out = correct_fine(&tone, 0.003).unwrap();
        assert!(out
            .samples()
            .iter()
            .all(|v| (v - ComplexSample::new(1.0, 0.0)).norm() < 1e-12));
        let out = correct_fine(&s, -0.02).unwrap();
        for (a, b) in s.iter().zip(out.samples()) {
            assert!((a.norm() - b.norm()).abs() < 1e-12);
        }
    }

    #[test]
    fn angle_conventions() {
        assert_eq!(principal_angle(ComplexSample::new(-1.0, -0.0)), PI);
        assert_eq!(principal_angle(ComplexSample::new(-1.0, 0.0)), PI);
        assert!((wrap_angle(1.2 * PI) + 0.8 * PI).abs() < 1e-12);
        assert_eq!(wrap_angle(-PI), PI);
        assert_eq!(wrap_angle(PI), PI);
    }

    #[test]
    fn hz_conversion() {
        assert!((rad_per_sample_to_hz(2.0 * PI) - 20e6).abs() < 1e-3);
    }
}
