//! Frame layout constants, the ideal long training symbol and the raw
//! preamble record shared by every stage of the pipeline.
//!
//! The retained preamble is 288 samples: eight 16-sample short training
//! periods (STS, positions 1..=128), the 32-sample guard interval GI2
//! (129..=160) and two 64-sample long training symbols (LTS, 161..=288).
//! Positions in doc comments are 1-based; slices are ordinary 0-based Rust.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// One baseband I/Q pair.
pub type ComplexSample = Complex64;

pub const PREAMBLE_LEN: usize = 288;
pub const STS_LEN: usize = 128;
pub const GI2_LEN: usize = 32;
pub const LTS_LEN: usize = 128;
/// Length of one LTS symbol and of the DFT.
pub const SYMBOL_LEN: usize = 64;
pub const STS_PERIOD: usize = 16;
pub const ACTIVE_SUBCARRIERS: usize = 52;
/// 1-based position of the DC bin in centered subcarrier order.
pub const DC_POSITION: usize = 33;
/// Sampling rate of the capture chain, samples per second.
pub const SAMPLE_RATE_HZ: f64 = 20e6;

const LTS_TABLE: [i8; SYMBOL_LEN] = [
    0, 0, 0, 0, 0, 0, 1, 1, -1, -1, 1, 1, -1, 1, -1, 1, 1, //
    1, 1, 1, 1, -1, -1, 1, 1, -1, 1, -1, 1, 1, 1, 1, 0, 1, //
    -1, -1, 1, 1, -1, 1, -1, 1, -1, -1, -1, -1, -1, //
    1, 1, -1, -1, 1, -1, 1, -1, 1, 1, 1, 1, 0, 0, 0, 0, 0,
];

static IDEAL_LTS: IdealLts = IdealLts { values: LTS_TABLE };

/// The ideal LTS in centered subcarrier order: subcarrier -32 first, DC at
/// position 33, subcarrier +31 last.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdealLts {
    values: [i8; SYMBOL_LEN],
}

impl IdealLts {
    pub fn values(&self) -> &[i8; SYMBOL_LEN] {
        &self.values
    }

    /// Value at a 1-based centered position.
    ///
    /// Panics if `position` is outside `1..=64`.
    pub fn at(&self, position: usize) -> i8 {
        assert!(
            (1..=SYMBOL_LEN).contains(&position),
            "LTS position {position} out of range 1..=64"
        );
        self.values[position - 1]
    }

    /// The symbol as complex phasors (0-based slice order).
    pub fn phasors(&self) -> [ComplexSample; SYMBOL_LEN] {
        let mut out = [ComplexSample::new(0.0, 0.0); SYMBOL_LEN];
        for (o, &v) in out.iter_mut().zip(self.values.iter()) {
            *o = ComplexSample::new(f64::from(v), 0.0);
        }
        out
    }

    pub fn mask(&self) -> ActiveSubcarrierMask {
        let mut active = [false; SYMBOL_LEN];
        for (a, &v) in active.iter_mut().zip(self.values.iter()) {
            *a = v != 0;
        }
        ActiveSubcarrierMask { active }
    }
}

/// The constant long training symbol.
pub fn ideal_lts() -> &'static IdealLts {
    &IDEAL_LTS
}

/// Subcarriers that carry energy in the LTS (52 of 64).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ActiveSubcarrierMask {
    active: [bool; SYMBOL_LEN],
}

impl ActiveSubcarrierMask {
    /// 1-based centered positions of the active subcarriers, ascending.
    pub fn indices(&self) -> Vec<usize> {
        self.active
            .iter()
            .enumerate()
            .filter(|(_, &a)| a)
            .map(|(i, _)| i + 1)
            .collect()
    }

    /// Whether the 0-based slot `idx` is active.
    #[inline]
    pub fn is_active(&self, idx: usize) -> bool {
        self.active[idx]
    }

    pub fn count(&self) -> usize {
        self.active.iter().filter(|&&a| a).count()
    }
}

impl Default for ActiveSubcarrierMask {
    fn default() -> Self {
        ideal_lts().mask()
    }
}

/// A device label plus the 288 unprocessed preamble samples of one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct PreambleRecord {
    device_label: String,
    samples: Vec<ComplexSample>,
}

impl PreambleRecord {
    pub fn new(device_label: impl Into<String>, samples: Vec<ComplexSample>) -> Result<Self> {
        let device_label = device_label.into();
        if device_label.is_empty() {
            return Err(Error::EmptyLabel);
        }
        if samples.len() != PREAMBLE_LEN {
            return Err(Error::MalformedRecord {
                expected: PREAMBLE_LEN,
                found: samples.len(),
            });
        }
        if let Some(index) = samples
            .iter()
            .position(|s| !s.re.is_finite() || !s.im.is_finite())
        {
            return Err(Error::NonFiniteSample { index });
        }
        Ok(Self {
            device_label,
            samples,
        })
    }

    pub fn device_label(&self) -> &str {
        &self.device_label
    }

    pub fn samples(&self) -> &[ComplexSample] {
        &self.samples
    }

    pub fn into_parts(self) -> (String, Vec<ComplexSample>) {
        (self.device_label, self.samples)
    }

    pub fn split(&self) -> PreambleParts<'_> {
        split_at_boundaries(&self.samples)
    }
}

/// Borrowed STS / GI2 / LTS views of a preamble.
#[derive(Debug, Clone, Copy)]
pub struct PreambleParts<'a> {
    pub sts: &'a [ComplexSample],
    pub gi2: &'a [ComplexSample],
    pub lts: &'a [ComplexSample],
}

/// Partition 288 raw samples into STS (1..=128), GI2 (129..=160) and
/// LTS (161..=288).
pub fn split_preamble(samples: &[ComplexSample]) -> Result<PreambleParts<'_>> {
    if samples.len() != PREAMBLE_LEN {
        return Err(Error::MalformedRecord {
            expected: PREAMBLE_LEN,
            found: samples.len(),
        });
    }
    Ok(split_at_boundaries(samples))
}

fn split_at_boundaries(samples: &[ComplexSample]) -> PreambleParts<'_> {
    let (sts, rest) = samples.split_at(STS_LEN);
    let (gi2, lts) = rest.split_at(GI2_LEN);
    PreambleParts { sts, gi2, lts }
}
