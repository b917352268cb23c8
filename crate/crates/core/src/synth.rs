//! Synthetic 802.11g preambles with known impairments.
//!
//! The generator is the ground truth for every estimator: a clean preamble
//! passes through, in this order, an FIR channel, transmit I-branch gain, a
//! common phase rotation, a per-sample CFO rotation, amplitude scaling and
//! complex AWGN.

use std::collections::HashSet;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft::idft64;
use crate::signal::{
    ideal_lts, ComplexSample, PreambleRecord, GI2_LEN, PREAMBLE_LEN, STS_LEN, STS_PERIOD, SYMBOL_LEN,
};

/// Short training subcarriers (index, value) before the `√(13/6)` scale.
/// Only every fourth subcarrier is loaded, which makes the time signal
/// periodic in 16 samples.
const STS_SUBCARRIERS: [(i32, f64); 12] = [
    (-24, 1.0),
    (-20, -1.0),
    (-16, 1.0),
    (-12, -1.0),
    (-8, -1.0),
    (-4, 1.0),
    (4, -1.0),
    (8, -1.0),
    (12, 1.0),
    (16, 1.0),
    (20, 1.0),
    (24, 1.0),
];

fn unit_power(x: &mut [ComplexSample]) {
    let p = x.iter().map(|v| v.norm_sqr()).sum::<f64>() / x.len() as f64;
    let s = 1.0 / p.sqrt();
    x.iter_mut().for_each(|v| *v *= s);
}

/// One 16-sample STS period with unit mean power.
pub fn sts_period() -> [ComplexSample; STS_PERIOD] {
    let mut spectrum = [ComplexSample::new(0.0, 0.0); SYMBOL_LEN];
    let scale = (13.0f64 / 6.0).sqrt();
    for (k, v) in STS_SUBCARRIERS {
        // centered position of subcarrier k is k + 32
        spectrum[(k + 32) as usize] = ComplexSample::new(v, v) * scale;
    }
    let time = idft64(&spectrum);
    let mut period = [ComplexSample::new(0.0, 0.0); STS_PERIOD];
    period.copy_from_slice(&time[..STS_PERIOD]);
    unit_power(&mut period);
    period
}

/// One 64-sample LTS symbol (inverse DFT of the ideal LTS) with unit mean power.
pub fn lts_symbol() -> [ComplexSample; SYMBOL_LEN] {
    let mut sym = idft64(&ideal_lts().phasors());
    unit_power(&mut sym);
    sym
}

/// The impairment-free 288-sample preamble: 8 STS periods, GI2 (last 32
/// samples of the LTS symbol), two LTS symbols.
pub fn ideal_preamble() -> Vec<ComplexSample> {
    let sts = sts_period();
    let lts = lts_symbol();
    let mut out = Vec::with_capacity(PREAMBLE_LEN);
    for _ in 0..STS_LEN / STS_PERIOD {
        out.extend_from_slice(&sts);
    }
    out.extend_from_slice(&lts[SYMBOL_LEN - GI2_LEN..]);
    out.extend_from_slice(&lts);
    out.extend_from_slice(&lts);
    out
}

fn default_gain() -> f64 {
    1.0
}

fn default_taps() -> Vec<ComplexSample> {
    vec![ComplexSample::new(1.0, 0.0)]
}

/// Ground-truth impairments applied to one frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImpairmentSpec {
    /// Radians per sample.
    #[serde(default)]
    pub cfo: f64,
    /// I-branch gain, 1.0 = balanced.
    #[serde(default = "default_gain")]
    pub iq_gain: f64,
    /// FIR taps as `[re, im]` pairs; the first must be nonzero.
    #[serde(default = "default_taps")]
    pub channel_taps: Vec<ComplexSample>,
    /// `None` = noiseless.
    #[serde(default)]
    pub snr_db: Option<f64>,
    #[serde(default)]
    pub common_phase: f64,
    #[serde(default = "default_gain")]
    pub amplitude: f64,
}

impl Default for ImpairmentSpec {
    fn default() -> Self {
        Self {
            cfo: 0.0,
            iq_gain: 1.0,
            channel_taps: default_taps(),
            snr_db: None,
            common_phase: 0.0,
            amplitude: 1.0,
        }
    }
}

impl ImpairmentSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if !(self.amplitude > 0.0) {
            return bad(format!("amplitude must be > 0, got {}", self.amplitude));
        }
        if !(self.iq_gain > 0.0) {
            return bad(format!("iq_gain must be > 0, got {}", self.iq_gain));
        }
        match self.channel_taps.first() {
            Some(t) if t.norm() > 0.0 => {}
            _ => return bad("channel_taps must be non-empty with a nonzero first tap".into()),
        }
        let scalars_finite = [self.cfo, self.common_phase, self.snr_db.unwrap_or(0.0)]
            .iter()
            .all(|v| v.is_finite());
        let taps_finite = self.channel_taps.iter().all(|t| t.re.is_finite() && t.im.is_finite());
        if !scalars_finite || !taps_finite {
            return bad("impairment values must be finite".into());
        }
        Ok(())
    }
}

/// Apply `spec` to `clean`. Deterministic in `seed`; the seed only matters
/// when `snr_db` is set.
pub fn apply_impairments(clean: &[ComplexSample], spec: &ImpairmentSpec, seed: u64) -> Vec<ComplexSample> {
    let n = clean.len();
    let identity_channel = spec.channel_taps.len() == 1 && spec.channel_taps[0] == ComplexSample::new(1.0, 0.0);
    let mut y: Vec<ComplexSample> = if identity_channel {
        clean.to_vec()
    } else {
        (0..n)
            .map(|i| {
                spec.channel_taps
                    .iter()
                    .enumerate()
                    .take(i + 1)
                    .map(|(k, &h)| h * clean[i - k])
                    .sum()
            })
            .collect()
    };

    let phase = ComplexSample::from_polar(1.0, spec.common_phase);
    for (i, v) in y.iter_mut().enumerate() {
        v.re *= spec.iq_gain;
        *v *= phase;
        *v *= ComplexSample::from_polar(1.0, spec.cfo * i as f64);
        *v *= spec.amplitude;
    }

    if let Some(snr_db) = spec.snr_db {
        let power = y.iter().map(|v| v.norm_sqr()).sum::<f64>() / n as f64;
        let sigma = (power / 10f64.powf(snr_db / 10.0) / 2.0).sqrt();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for v in y.iter_mut() {
            let nr: f64 = StandardNormal.sample(&mut rng);
            let ni: f64 = StandardNormal.sample(&mut rng);
            *v += ComplexSample::new(sigma * nr, sigma * ni);
        }
    }
    y
}

/// A simulated transmitter: mean impairments plus frame-to-frame jitter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviceProfile {
    pub label: String,
    #[serde(default)]
    pub impairments: ImpairmentSpec,
    /// Per-frame Gaussian std-dev of `cfo`.
    #[serde(default)]
    pub cfo_jitter: f64,
    /// Per-frame Gaussian std-dev of `iq_gain`.
    #[serde(default)]
    pub iq_gain_jitter: f64,
}

impl DeviceProfile {
    pub fn validate(&self) -> Result<()> {
        if self.label.is_empty() {
            return Err(Error::EmptyLabel);
        }
        if !(self.cfo_jitter >= 0.0) || !(self.iq_gain_jitter >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "device {}: jitter std-devs must be >= 0",
                self.label
            )));
        }
        self.impairments.validate()
    }
}

/// Fleet specification file: `{"devices": [DeviceProfile, ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FleetSpec {
    pub devices: Vec<DeviceProfile>,
}

impl FleetSpec {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let spec: FleetSpec = serde_json::from_str(&text).map_err(|source| Error::Json {
            path: path.to_path_buf(),
            source,
        })?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).expect("fleet spec serializes");
        std::fs::write(path, text).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = HashSet::new();
        for d in &self.devices {
            d.validate()?;
            if !seen.insert(d.label.as_str()) {
                return Err(Error::DuplicateLabel(d.label.clone()));
            }
        }
        Ok(())
    }
}

fn frame_rng(seed: u64, device: usize, frame: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((device as u64) << 32) | frame as u64);
    rng
}

/// Frame `frame` of device number `device`; independent of every other frame.
pub fn generate_frame(profile: &DeviceProfile, device: usize, frame: usize, seed: u64) -> PreambleRecord {
    let mut rng = frame_rng(seed, device, frame);
    let mut spec = profile.impairments.clone();
    if profile.cfo_jitter > 0.0 {
        spec.cfo += Normal::new(0.0, profile.cfo_jitter)
            .expect("validated jitter")
            .sample(&mut rng);
    }
    if profile.iq_gain_jitter > 0.0 {
        let g = spec.iq_gain
            + Normal::new(0.0, profile.iq_gain_jitter)
                .expect("validated jitter")
                .sample(&mut rng);
        spec.iq_gain = g.max(1e-6);
    }
    let noise_seed: u64 = rng.random();
    let samples = apply_impairments(&ideal_preamble(), &spec, noise_seed);
    PreambleRecord::new(profile.label.clone(), samples).expect("synthetic frame is well formed")
}

/// All frames of all devices, device-major. Frames are generated in
/// parallel; the result does not depend on the thread count.
pub fn generate_fleet(profiles: &[DeviceProfile], frames_per_device: usize, seed: u64) -> Result<Vec<PreambleRecord>> {
    FleetSpec {
        devices: profiles.to_vec(),
    }
    .validate()?;
    Ok((0..profiles.len() * frames_per_device)
        .into_par_iter()
        .map(|k| {
            let d = k / frames_per_device;
            generate_frame(&profiles[d], d, k % frames_per_device, seed)
        })
        .collect())
}

/// Lazy variant of [`generate_fleet`].
pub fn fleet_iter(
    profiles: &[DeviceProfile],
    frames_per_device: usize,
    seed: u64,
) -> Result<impl Iterator<Item = PreambleRecord> + '_> {
    FleetSpec {
        devices: profiles.to_vec(),
    }
    .validate()?;
    Ok(profiles.iter().enumerate().flat_map(move |(d, p)| {
        (0..frames_per_device).map(move |f| generate_frame(p, d, f, seed))
    }))
}

/// `n` devices whose mean CFOs are `spacing` apart and centered on zero,
/// all with the same jitter and SNR. Labels are MAC-style.
pub fn cfo_ladder_fleet(n: usize, spacing: f64, cfo_jitter: f64, snr_db: Option<f64>) -> Vec<DeviceProfile> {
    let center = (n as f64 - 1.0) / 2.0;
    (0..n)
        .map(|i| DeviceProfile {
            label: mac_label(i),
            impairments: ImpairmentSpec {
                cfo: (i as f64 - center) * spacing,
                snr_db,
                ..Default::default()
            },
            cfo_jitter,
            iq_gain_jitter: 0.0,
        })
        .collect()
}

/// `02:00:00:00:hh:ll` locally-administered address for device `i`.
pub fn mac_label(i: usize) -> String {
    format!("02:00:00:00:{:02x}:{:02x}", (i >> 8) & 0xff, i & 0xff)
}
