//! RF fingerprinting from 802.11g preambles.
//!
//! A 288-sample preamble (8 short training periods, a 32-sample guard and
//! two 64-sample long training symbols) goes through:
//!
//! 1. [`sync`]: coarse CFO from the short training sequence, fine CFO from
//!    the long one, both corrections.
//! 2. [`equalizer`]: 64-point DFT of each LTS half and per-subcarrier
//!    channel equalization against the ideal symbol.
//! 3. [`features`]: phase/magnitude error vectors and their statistics, I/Q
//!    gain imbalance and fractal dimension, giving 15 scalars per frame.
//! 4. [`kalman`]: optional per-device smoothing of each scalar sequence.
//! 5. [`forest`]: a Random Forest with stratified cross-validation, Gini
//!    importances and a Pearson correlation matrix.
//!
//! [`synth`] builds impaired preambles with known ground truth, so every
//! stage can be checked without radio hardware. [`dataset`] reads and
//! writes the CSV layouts, and [`cli`] drives all of it from the command
//! line.
//!
//! ```
//! use rffp::synth::{generate_frame, DeviceProfile, ImpairmentSpec};
//! use rffp::features::extract_features;
//!
//! let dev = DeviceProfile {
//!     label: "02:00:00:00:00:01".into(),
//!     impairments: ImpairmentSpec { cfo: 0.01, ..Default::default() },
//!     cfo_jitter: 0.0,
//!     iq_gain_jitter: 0.0,
//! };
//! let frame = generate_frame(&dev, 0, 0, 42);
//! let feats = extract_features(&frame).unwrap();
//! assert!((feats.cfo - 0.01).abs() < 1e-9);
//! ```

pub mod cli;
pub mod dataset;
pub mod equalizer;
pub mod error;
pub mod features;
pub mod fft;
pub mod forest;
pub mod kalman;
pub mod signal;
pub mod sync;
pub mod synth;

pub use error::{Error, Result};
pub use features::{extract_features, FeatureRecord, SCALAR_FEATURE_NAMES};
pub use forest::LabeledFeatureMatrix;
pub use signal::{ComplexSample, PreambleRecord};
