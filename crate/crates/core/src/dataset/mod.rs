//! CSV schemas for raw preambles and extracted features.
//!
//! Two schemas are understood: `raw_preamble` (a MAC address column and a
//! 288-sample preamble column) and `feature_full` (one row per frame with
//! every feature, named after the published per-device files
//! `<mac>_pre.csv`). Readers stream row by row and report failures with the
//! 1-based data row number; writers always emit the canonical `(re,im)`
//! complex spelling with 17 significant digits.

mod complex;
mod features;
mod preambles;

pub use complex::{
    detect_format, fmt_f64, format_complex_list, format_real_list, parse_complex_list, parse_python_complex,
    parse_real_list, ComplexFormat,
};
pub use features::{
    device_file_name, read_feature_records, read_features, write_features, write_features_per_device, FeatureLoad,
    FeatureReader, FeatureWriter, FEATURE_COLUMNS,
};
pub use preambles::{read_preambles, write_preambles, write_preambles_per_device, PreambleReader, PreambleWriter};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::SCALAR_FEATURE_NAMES;

pub const MAC_COLUMN: &str = "mac_address";
pub const PREAMBLE_COLUMN: &str = "preamble";
pub const IQ_PREAMBLE_COLUMN: &str = "iq_preamble";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemaKind {
    RawPreamble,
    FeatureFull,
}

/// Units of the frequency columns. Values are never converted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UnitHint {
    #[default]
    RadPerSample,
    Hz,
    Unknown,
}

/// Row-error policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ParseMode {
    /// Report bad rows and keep going.
    #[default]
    Lenient,
    /// Stop at the first bad row.
    Strict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvSchemaDescriptor {
    pub kind: SchemaKind,
    /// Columns that must be present (matched case-insensitively).
    pub column_names: Vec<String>,
    /// `None` = detect from the first non-empty cell of the file.
    pub complex_format: Option<ComplexFormat>,
    pub unit_hint: UnitHint,
}

impl CsvSchemaDescriptor {
    pub fn raw_preamble() -> Self {
        Self {
            kind: SchemaKind::RawPreamble,
            column_names: vec![MAC_COLUMN.into(), PREAMBLE_COLUMN.into()],
            complex_format: None,
            unit_hint: UnitHint::default(),
        }
    }

    /// MAC address plus the 15 scalar columns; vector columns are optional
    /// on read.
    pub fn feature_full() -> Self {
        let mut cols = vec![MAC_COLUMN.to_string()];
        cols.extend(SCALAR_FEATURE_NAMES.iter().map(|s| s.to_string()));
        Self {
            kind: SchemaKind::FeatureFull,
            column_names: cols,
            complex_format: None,
            unit_hint: UnitHint::default(),
        }
    }

    pub fn with_complex_format(mut self, f: Option<ComplexFormat>) -> Self {
        self.complex_format = f;
        self
    }

    pub fn with_unit_hint(mut self, u: UnitHint) -> Self {
        self.unit_hint = u;
        self
    }

    /// Map each required column to its header position.
    pub(crate) fn resolve(&self, header: &csv::StringRecord) -> Result<Vec<usize>> {
        self.column_names
            .iter()
            .map(|name| find_column(header, name).ok_or_else(|| Error::MissingColumn(name.clone())))
            .collect()
    }
}

pub(crate) fn find_column(header: &csv::StringRecord, name: &str) -> Option<usize> {
    header
        .iter()
        .position(|h| h.trim().trim_start_matches('\u{feff}').eq_ignore_ascii_case(name))
}

/// Counts kept by a streaming reader.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RowSummary {
    pub rows_ok: u64,
    pub rows_failed: u64,
}
