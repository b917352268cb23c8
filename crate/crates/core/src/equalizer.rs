//! LTS channel estimation and per-subcarrier equalization.

use crate::error::{Error, Result};
use crate::fft::dft64;
use crate::signal::{ideal_lts, ComplexSample, SYMBOL_LEN};
use crate::sync::CorrectedLts;

const SINGULAR_THRESHOLD: f64 = 1e-12;
const ZERO: ComplexSample = ComplexSample::new(0.0, 0.0);

/// Per-subcarrier channel gain in centered order; exactly zero at the 12
/// null subcarriers.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelGain {
    pub gains: [ComplexSample; SYMBOL_LEN],
}

/// The two equalized LTS symbols in centered order, zero at null bins.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasuredLts {
    pub l1: [ComplexSample; SYMBOL_LEN],
    pub l2: [ComplexSample; SYMBOL_LEN],
}

impl MeasuredLts {
    pub fn halves(&self) -> [&[ComplexSample; SYMBOL_LEN]; 2] {
        [&self.l1, &self.l2]
    }

    /// `l1` followed by `l2`, 128 values.
    pub fn to_vec(&self) -> Vec<ComplexSample> {
        self.l1.iter().chain(self.l2.iter()).copied().collect()
    }

    /// Inverse of [`MeasuredLts::to_vec`]. Panics unless `v.len() == 128`.
    pub fn from_slice(v: &[ComplexSample]) -> Self {
        assert_eq!(v.len(), 2 * SYMBOL_LEN, "measured LTS needs 128 values");
        let mut l1 = [ZERO; SYMBOL_LEN];
        let mut l2 = [ZERO; SYMBOL_LEN];
        l1.copy_from_slice(&v[..SYMBOL_LEN]);
        l2.copy_from_slice(&v[SYMBOL_LEN..]);
        Self { l1, l2 }
    }
}

fn half_spectra(corrected: &CorrectedLts) -> ([ComplexSample; SYMBOL_LEN], [ComplexSample; SYMBOL_LEN]) {
    (dft64(corrected.first()), dft64(corrected.second()))
}

/// `h[j] = ½(X̌₁[j] + X̌₂[j])·ideal[j]` with both halves taken to the
/// frequency domain first.
pub fn estimate_channel(corrected: &CorrectedLts) -> ChannelGain {
    let (x1, x2) = half_spectra(corrected);
    gain_from_spectra(&x1, &x2)
}

fn gain_from_spectra(x1: &[ComplexSample; SYMBOL_LEN], x2: &[ComplexSample; SYMBOL_LEN]) -> ChannelGain {
    let ideal = ideal_lts().values();
    let mut gains = [ZERO; SYMBOL_LEN];
    for j in 0..SYMBOL_LEN {
        if ideal[j] != 0 {
            gains[j] = (x1[j] + x2[j]) * 0.5 * f64::from(ideal[j]);
        }
    }
    ChannelGain { gains }
}

/// Divide each half's spectrum by the channel gain at active subcarriers;
/// null subcarriers are set to zero.
pub fn equalize(corrected: &CorrectedLts, h: &ChannelGain) -> Result<MeasuredLts> {
    let (x1, x2) = half_spectra(corrected);
    equalize_spectra(&x1, &x2, h)
}

fn equalize_spectra(
    x1: &[ComplexSample; SYMBOL_LEN],
    x2: &[ComplexSample; SYMBOL_LEN],
    h: &ChannelGain,
) -> Result<MeasuredLts> {
    let mask = ideal_lts().mask();
    let mut l1 = [ZERO; SYMBOL_LEN];
    let mut l2 = [ZERO; SYMBOL_LEN];
    // sample i of the 128-long stream uses h[((i-1) mod 64)+1]; per half that is bin j
    for j in 0..SYMBOL_LEN {
        if !mask.is_active(j) {
            continue;
        }
        let g = h.gains[j];
        if !(g.norm() >= SINGULAR_THRESHOLD) {
            return Err(Error::SingularChannel { bin: j + 1 });
        }
        l1[j] = x1[j] / g;
        l2[j] = x2[j] / g;
    }
    Ok(MeasuredLts { l1, l2 })
}

/// Channel estimate and equalization from a single pair of DFTs.
pub fn measure(corrected: &CorrectedLts) -> Result<(ChannelGain, MeasuredLts)> {
    let (x1, x2) = half_spectra(corrected);
    let h = gain_from_spectra(&x1, &x2);
    let l = equalize_spectra(&x1, &x2, &h)?;
    Ok((h, l))
}
