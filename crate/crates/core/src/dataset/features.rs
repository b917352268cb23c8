use std::collections::BTreeMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use super::complex::{detect_format, fmt_f64, format_complex_list, format_real_list, parse_complex_list, parse_real_list};
use super::{find_column, CsvSchemaDescriptor, ParseMode, RowSummary, IQ_PREAMBLE_COLUMN, MAC_COLUMN, PREAMBLE_COLUMN};
use crate::equalizer::MeasuredLts;
use crate::error::{Error, Result, RowErrorKind};
use crate::features::{ErrorVector, FeatureRecord, NUM_SCALAR_FEATURES, SCALAR_FEATURE_NAMES};
use crate::forest::LabeledFeatureMatrix;
use crate::signal::{ideal_lts, ComplexSample, LTS_LEN, PREAMBLE_LEN, SYMBOL_LEN};

/// Column order written by [`FeatureWriter`].
pub const FEATURE_COLUMNS: [&str; 22] = [
    MAC_COLUMN,
    PREAMBLE_COLUMN,
    IQ_PREAMBLE_COLUMN,
    "short_freq",
    "long_freq",
    "CFO",
    "phase_error_v1",
    "phase_error_v2",
    "phase_error_mean_1",
    "phase_error_mean_2",
    "phase_error_var_1",
    "phase_error_var_2",
    "mag_error_v1",
    "mag_error_v2",
    "mag_error_mean_1",
    "mag_error_mean_2",
    "mag_error_var_1",
    "mag_error_var_2",
    "iqi_1",
    "iqi_2",
    "frac_dimension_1",
    "frac_dimension_2",
];

const VECTOR_COLUMNS: [&str; 4] = ["phase_error_v1", "phase_error_v2", "mag_error_v1", "mag_error_v2"];

/// `<mac>_pre.csv`
pub fn device_file_name(label: &str) -> String {
    format!("{label}_pre.csv")
}

fn opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

pub struct FeatureWriter<W: Write> {
    inner: csv::Writer<W>,
    path: PathBuf,
}

impl FeatureWriter<File> {
    pub fn create(path: &Path) -> Result<Self> {
        let inner = csv::Writer::from_path(path).map_err(|source| Error::Csv {
            path: path.to_path_buf(),
            source,
        })?;
        Self::init(inner, path.to_path_buf())
    }
}

impl<W: Write> FeatureWriter<W> {
    pub fn from_writer(w: W) -> Result<Self> {
        Self::init(csv::Writer::from_writer(w), PathBuf::from("<writer>"))
    }

    fn init(mut inner: csv::Writer<W>, path: PathBuf) -> Result<Self> {
        inner.write_record(FEATURE_COLUMNS).map_err(|source| Error::Csv {
            path: path.clone(),
            source,
        })?;
        Ok(Self { inner, path })
    }

    pub fn write(&mut self, r: &FeatureRecord) -> Result<()> {
        let row: [String; 22] = [
            r.device_label.clone(),
            r.preamble.as_deref().map(format_complex_list).unwrap_or_default(),
            r.iq_preamble
                .as_ref()
                .map(|m| format_complex_list(&m.to_vec()))
                .unwrap_or_default(),
            fmt_f64(r.short_freq),
            fmt_f64(r.long_freq),
            fmt_f64(r.cfo),
            format_real_list(&r.phase_error_v1),
            format_real_list(&r.phase_error_v2),
            fmt_f64(r.phase_error_mean_1),
            fmt_f64(r.phase_error_mean_2),
            fmt_f64(r.phase_error_var_1),
            fmt_f64(r.phase_error_var_2),
            format_real_list(&r.mag_error_v1),
            format_real_list(&r.mag_error_v2),
            fmt_f64(r.mag_error_mean_1),
            fmt_f64(r.mag_error_mean_2),
            fmt_f64(r.mag_error_var_1),
            fmt_f64(r.mag_error_var_2),
            opt(r.iqi_1),
            opt(r.iqi_2),
            opt(r.frac_dimension_1),
            opt(r.frac_dimension_2),
        ];
        self.inner.write_record(&row).map_err(|source| Error::Csv {
            path: self.path.clone(),
            source,
        })
    }

    pub fn finish(mut self) -> Result<()> {
        self.inner.flush().map_err(|source| Error::Io { path: self.path, source })
    }
}

/// All records into one combined file; an empty iterator yields a header-only file.
pub fn write_features<'a>(records: impl IntoIterator<Item = &'a FeatureRecord>, path: &Path) -> Result<()> {
    let mut w = FeatureWriter::create(path)?;
    for r in records {
        w.write(r)?;
    }
    w.finish()
}

/// One `<mac>_pre.csv` per device under `dir`, rows in input order; returns
/// the paths in label order.
pub fn write_features_per_device<'a>(
    records: impl IntoIterator<Item = &'a FeatureRecord>,
    dir: &Path,
) -> Result<Vec<PathBuf>> {
    let mut writers: BTreeMap<String, FeatureWriter<File>> = BTreeMap::new();
    for r in records {
        if !writers.contains_key(&r.device_label) {
            let w = FeatureWriter::create(&dir.join(device_file_name(&r.device_label)))?;
            writers.insert(r.device_label.clone(), w);
        }
        writers.get_mut(&r.device_label).expect("inserted").write(r)?;
    }
    let mut paths = Vec::with_capacity(writers.len());
    for (label, w) in writers {
        w.finish()?;
        paths.push(dir.join(device_file_name(&label)));
    }
    Ok(paths)
}

struct Columns {
    mac: usize,
    scalars: [usize; NUM_SCALAR_FEATURES],
    vectors: Option<[usize; 4]>,
    preamble: Option<usize>,
    iq_preamble: Option<usize>,
}

/// Streaming reader of the feature schema.
///
/// With `retain_vectors` the four error-vector columns are required and the
/// preamble columns are parsed when present; otherwise vectors are left zero
/// and the preamble fields `None`.
pub struct FeatureReader<R: Read> {
    inner: csv::Reader<R>,
    path: PathBuf,
    cols: Columns,
    width: usize,
    mode: ParseMode,
    row: u64,
    record: csv::StringRecord,
    halted: bool,
    summary: RowSummary,
}

impl FeatureReader<File> {
    pub fn from_path(path: &Path, schema: &CsvSchemaDescriptor, retain_vectors: bool, mode: ParseMode) -> Result<Self> {
        let file = File::open(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::with_path(file, path.to_path_buf(), schema, retain_vectors, mode)
    }
}

impl<R: Read> FeatureReader<R> {
    pub fn from_reader(rdr: R, schema: &CsvSchemaDescriptor, retain_vectors: bool, mode: ParseMode) -> Result<Self> {
        Self::with_path(rdr, PathBuf::from("<reader>"), schema, retain_vectors, mode)
    }

    fn with_path(
        rdr: R,
        path: PathBuf,
        schema: &CsvSchemaDescriptor,
        retain_vectors: bool,
        mode: ParseMode,
    ) -> Result<Self> {
        let mut inner = csv::ReaderBuilder::new().flexible(true).from_reader(rdr);
        let header = inner
            .headers()
            .map_err(|source| Error::Csv {
                path: path.clone(),
                source,
            })?
            .clone();
        schema.resolve(&header)?;
        let need = |name: &str| find_column(&header, name).ok_or_else(|| Error::MissingColumn(name.to_string()));
        let mut scalars = [0usize; NUM_SCALAR_FEATURES];
        for (slot, name) in scalars.iter_mut().zip(SCALAR_FEATURE_NAMES) {
            *slot = need(name)?;
        }
        let vectors = if retain_vectors {
            let mut v = [0usize; 4];
            for (slot, name) in v.iter_mut().zip(VECTOR_COLUMNS) {
                *slot = need(name)?;
            }
            Some(v)
        } else {
            None
        };
        let cols = Columns {
            mac: need(MAC_COLUMN)?,
            scalars,
            preamble: vectors.and(find_column(&header, PREAMBLE_COLUMN)),
            iq_preamble: vectors.and(find_column(&header, IQ_PREAMBLE_COLUMN)),
            vectors,
        };
        Ok(Self {
            inner,
            path,
            cols,
            width: header.len(),
            mode,
            row: 0,
            record: csv::StringRecord::new(),
            halted: false,
            summary: RowSummary::default(),
        })
    }

    pub fn summary(&self) -> &RowSummary {
        &self.summary
    }

    fn parse_current(&self) -> std::result::Result<FeatureRecord, RowErrorKind> {
        let rec = &self.record;
        if rec.len() != self.width {
            return Err(RowErrorKind::FieldCount {
                expected: self.width,
                found: rec.len(),
            });
        }
        let label = rec[self.cols.mac].trim();
        if label.is_empty() {
            return Err(RowErrorKind::EmptyLabel);
        }

        let mut s = [None; NUM_SCALAR_FEATURES];
        for (k, (&col, name)) in self.cols.scalars.iter().zip(SCALAR_FEATURE_NAMES).enumerate() {
            let cell = rec[col].trim();
            if cell.is_empty() {
                continue;
            }
            let v: f64 = cell.parse().map_err(|_| RowErrorKind::BadNumber {
                column: name.to_string(),
                literal: cell.to_string(),
            })?;
            s[k] = Some(v);
        }
        let required = |k: usize| {
            s[k].ok_or_else(|| RowErrorKind::MissingValue {
                column: SCALAR_FEATURE_NAMES[k].to_string(),
            })
        };

        let mut vecs = [[0.0; SYMBOL_LEN]; 4];
        let mut preamble = None;
        let mut iq_preamble = None;
        if let Some(vcols) = self.cols.vectors {
            for ((slot, &col), name) in vecs.iter_mut().zip(vcols.iter()).zip(VECTOR_COLUMNS) {
                *slot = parse_error_vector(&rec[col], name)?;
            }
            if let Some(col) = self.cols.preamble {
                preamble = parse_optional_complex(&rec[col], PREAMBLE_COLUMN, &[PREAMBLE_LEN])?;
            }
            if let Some(col) = self.cols.iq_preamble {
                iq_preamble = parse_optional_complex(&rec[col], IQ_PREAMBLE_COLUMN, &[LTS_LEN, 104])?
                    .map(|v| MeasuredLts::from_slice(&expand_measured(v)));
            }
        }

        Ok(FeatureRecord {
            device_label: label.to_string(),
            preamble,
            iq_preamble,
            cfo: required(0)?,
            short_freq: required(1)?,
            long_freq: required(2)?,
            phase_error_mean_1: required(3)?,
            phase_error_mean_2: required(4)?,
            phase_error_var_1: required(5)?,
            phase_error_var_2: required(6)?,
            iqi_1: s[7],
            iqi_2: s[8],
            mag_error_mean_1: required(9)?,
            mag_error_mean_2: required(10)?,
            mag_error_var_1: required(11)?,
            mag_error_var_2: required(12)?,
            frac_dimension_1: s[13],
            frac_dimension_2: s[14],
            phase_error_v1: vecs[0],
            phase_error_v2: vecs[1],
            mag_error_v1: vecs[2],
            mag_error_v2: vecs[3],
        })
    }
}

/// 64 values (NaN allowed at null bins, read as zero) or the 52 active
/// values alone.
fn parse_error_vector(cell: &str, column: &str) -> std::result::Result<ErrorVector, RowErrorKind> {
    let values = parse_real_list(cell).map_err(|literal| RowErrorKind::BadNumber {
        column: column.to_string(),
        literal,
    })?;
    let mask = ideal_lts().mask();
    let mut out = [0.0; SYMBOL_LEN];
    match values.len() {
        SYMBOL_LEN => {
            for (j, v) in values.into_iter().enumerate() {
                out[j] = if v.is_nan() && !mask.is_active(j) { 0.0 } else { v };
            }
        }
        52 => {
            for (j, v) in mask.indices().into_iter().zip(values) {
                out[j - 1] = v;
            }
        }
        found => {
            return Err(RowErrorKind::WrongSampleCount {
                column: column.to_string(),
                expected: SYMBOL_LEN,
                found,
            })
        }
    }
    Ok(out)
}

fn parse_optional_complex(
    cell: &str,
    column: &str,
    lengths: &[usize],
) -> std::result::Result<Option<Vec<ComplexSample>>, RowErrorKind> {
    let Some(format) = detect_format(cell) else {
        return Ok(None);
    };
    let v = parse_complex_list(cell, format).map_err(|literal| RowErrorKind::BadComplexLiteral {
        column: column.to_string(),
        literal,
    })?;
    if !lengths.contains(&v.len()) {
        return Err(RowErrorKind::WrongSampleCount {
            column: column.to_string(),
            expected: lengths[0],
            found: v.len(),
        });
    }
    Ok(Some(v))
}

/// Normalize a stored measured LTS to 128 values with exact zeros at the
/// null bins, whether nulls were stored as 0, NaN or omitted.
fn expand_measured(v: Vec<ComplexSample>) -> Vec<ComplexSample> {
    let mask = ideal_lts().mask();
    let zero = ComplexSample::new(0.0, 0.0);
    if v.len() == LTS_LEN {
        return v
            .into_iter()
            .enumerate()
            .map(|(i, z)| if mask.is_active(i % SYMBOL_LEN) { z } else { zero })
            .collect();
    }
    let mut out = vec![zero; LTS_LEN];
    let active = mask.indices();
    for (k, z) in v.into_iter().enumerate() {
        let half = k / active.len();
        out[half * SYMBOL_LEN + active[k % active.len()] - 1] = z;
    }
    out
}

impl<R: Read> Iterator for FeatureReader<R> {
    type Item = Result<FeatureRecord>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.halted {
            return None;
        }
        self.row += 1;
        let kind = match self.inner.read_record(&mut self.record) {
            Ok(false) => return None,
            Ok(true) => match self.parse_current() {
                Ok(rec) => {
                    self.summary.rows_ok += 1;
                    return Some(Ok(rec));
                }
                Err(kind) => kind,
            },
            Err(e) if e.is_io_error() => {
                self.halted = true;
                return Some(Err(Error::Csv {
                    path: self.path.clone(),
                    source: e,
                }));
            }
            Err(e) => RowErrorKind::Csv(e.to_string()),
        };
        self.summary.rows_failed += 1;
        if self.mode == ParseMode::Strict {
            self.halted = true;
        }
        Some(Err(Error::Row { row: self.row, kind }))
    }
}

/// Every record of one feature file.
pub fn read_feature_records(path: &Path, retain_vectors: bool, mode: ParseMode) -> Result<Vec<FeatureRecord>> {
    FeatureReader::from_path(path, &CsvSchemaDescriptor::feature_full(), retain_vectors, mode)?.collect()
}

/// Result of loading feature files into a classifier matrix.
#[derive(Debug)]
pub struct FeatureLoad {
    pub matrix: LabeledFeatureMatrix,
    /// Rows that failed to parse or had an undefined scalar.
    pub row_errors: Vec<(PathBuf, Error)>,
    /// Rows whose stored mean/variance disagree with their stored vectors
    /// (only checked when vectors are retained).
    pub inconsistent_rows: u64,
}

/// Load the 15 scalars of every row of `paths` (in the given order).
pub fn read_features(
    paths: &[PathBuf],
    schema: &CsvSchemaDescriptor,
    retain_vectors: bool,
    mode: ParseMode,
) -> Result<FeatureLoad> {
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    let mut row_errors = Vec::new();
    let mut inconsistent_rows = 0;
    for path in paths {
        let reader = FeatureReader::from_path(path, schema, retain_vectors, mode)?;
        for (i, item) in reader.enumerate() {
            let rec = match item {
                Ok(rec) => rec,
                Err(e) if mode == ParseMode::Strict => return Err(e),
                Err(e) => {
                    row_errors.push((path.clone(), e));
                    continue;
                }
            };
            if retain_vectors && !rec.stats_consistent(1e-12) {
                inconsistent_rows += 1;
            }
            match rec.scalars() {
                Some(s) if s.0.iter().all(|v| v.is_finite()) => {
                    rows.push(s.0.to_vec());
                    labels.push(rec.device_label);
                }
                _ => {
                    let column = [(rec.iqi_1, 7), (rec.iqi_2, 8), (rec.frac_dimension_1, 13), (rec.frac_dimension_2, 14)]
                        .iter()
                        .find(|(v, _)| v.is_none())
                        .map(|(_, k)| SCALAR_FEATURE_NAMES[*k])
                        .unwrap_or("non-finite scalar");
                    let err = Error::Row {
                        row: i as u64 + 1,
                        kind: RowErrorKind::MissingValue {
                            column: column.to_string(),
                        },
                    };
                    if mode == ParseMode::Strict {
                        return Err(err);
                    }
                    row_errors.push((path.clone(), err));
                }
            }
        }
    }
    let names = SCALAR_FEATURE_NAMES.iter().map(|s| s.to_string()).collect();
    Ok(FeatureLoad {
        matrix: LabeledFeatureMatrix::new(rows, labels, names)?,
        row_errors,
        inconsistent_rows,
    })
}
