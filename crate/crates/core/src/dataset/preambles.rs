use std::collections::BTreeMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use super::complex::{detect_format, format_complex_list, parse_complex_list, ComplexFormat};
use super::features::device_file_name;
use super::{CsvSchemaDescriptor, ParseMode, RowSummary, MAC_COLUMN, PREAMBLE_COLUMN};
use crate::error::{Error, Result, RowErrorKind};
use crate::signal::{PreambleRecord, PREAMBLE_LEN};

/// Streaming reader of the raw-preamble schema. Yields one item per data
/// row; bad rows come out as [`Error::Row`]. In strict mode the stream ends
/// after the first bad row.
pub struct PreambleReader<R: Read> {
    inner: csv::Reader<R>,
    path: PathBuf,
    mac_col: usize,
    preamble_col: usize,
    width: usize,
    format: Option<ComplexFormat>,
    mode: ParseMode,
    row: u64,
    record: csv::StringRecord,
    halted: bool,
    summary: RowSummary,
}

impl PreambleReader<File> {
    pub fn from_path(path: &Path, schema: &CsvSchemaDescriptor, mode: ParseMode) -> Result<Self> {
        let file = File::open(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::with_path(file, path.to_path_buf(), schema, mode)
    }
}

impl<R: Read> PreambleReader<R> {
    pub fn from_reader(rdr: R, schema: &CsvSchemaDescriptor, mode: ParseMode) -> Result<Self> {
        Self::with_path(rdr, PathBuf::from("<reader>"), schema, mode)
    }

    fn with_path(rdr: R, path: PathBuf, schema: &CsvSchemaDescriptor, mode: ParseMode) -> Result<Self> {
        let mut inner = csv::ReaderBuilder::new().flexible(true).from_reader(rdr);
        let header = inner
            .headers()
            .map_err(|source| Error::Csv {
                path: path.clone(),
                source,
            })?
            .clone();
        let cols = schema.resolve(&header)?;
        let find = |name: &str| {
            schema
                .column_names
                .iter()
                .position(|c| c.eq_ignore_ascii_case(name))
                .map(|i| cols[i])
                .ok_or_else(|| Error::MissingColumn(name.to_string()))
        };
        Ok(Self {
            mac_col: find(MAC_COLUMN)?,
            preamble_col: find(PREAMBLE_COLUMN)?,
            width: header.len(),
            inner,
            path,
            format: schema.complex_format,
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

    /// The complex spelling in use (detected after the first parsed row).
    pub fn complex_format(&self) -> Option<ComplexFormat> {
        self.format
    }

    fn parse_current(&mut self) -> std::result::Result<PreambleRecord, RowErrorKind> {
        if self.record.len() != self.width {
            return Err(RowErrorKind::FieldCount {
                expected: self.width,
                found: self.record.len(),
            });
        }
        let mac = self.record[self.mac_col].trim();
        if mac.is_empty() {
            return Err(RowErrorKind::EmptyLabel);
        }
        let cell = &self.record[self.preamble_col];
        let bad = |literal: String| RowErrorKind::BadComplexLiteral {
            column: PREAMBLE_COLUMN.into(),
            literal,
        };
        let format = match self.format {
            Some(f) => f,
            None => detect_format(cell).ok_or_else(|| RowErrorKind::MissingValue {
                column: PREAMBLE_COLUMN.into(),
            })?,
        };
        let samples = parse_complex_list(cell, format).map_err(bad)?;
        if samples.len() != PREAMBLE_LEN {
            return Err(RowErrorKind::WrongSampleCount {
                column: PREAMBLE_COLUMN.into(),
                expected: PREAMBLE_LEN,
                found: samples.len(),
            });
        }
        if let Some(s) = samples.iter().find(|s| !s.re.is_finite() || !s.im.is_finite()) {
            return Err(bad(format!("({},{})", s.re, s.im)));
        }
        self.format = Some(format);
        PreambleRecord::new(mac, samples).map_err(|e| RowErrorKind::Csv(e.to_string()))
    }
}

impl<R: Read> Iterator for PreambleReader<R> {
    type Item = Result<PreambleRecord>;

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

/// Open `path` as a raw-preamble stream.
pub fn read_preambles(path: &Path, schema: &CsvSchemaDescriptor, mode: ParseMode) -> Result<PreambleReader<File>> {
    PreambleReader::from_path(path, schema, mode)
}

/// Writes `mac_address,preamble` rows.
pub struct PreambleWriter<W: Write> {
    inner: csv::Writer<W>,
    path: PathBuf,
}

impl PreambleWriter<File> {
    pub fn create(path: &Path) -> Result<Self> {
        let inner = csv::Writer::from_path(path).map_err(|source| Error::Csv {
            path: path.to_path_buf(),
            source,
        })?;
        Self::init(inner, path.to_path_buf())
    }
}

impl<W: Write> PreambleWriter<W> {
    pub fn from_writer(w: W) -> Result<Self> {
        Self::init(csv::Writer::from_writer(w), PathBuf::from("<writer>"))
    }

    fn init(mut inner: csv::Writer<W>, path: PathBuf) -> Result<Self> {
        inner
            .write_record([MAC_COLUMN, PREAMBLE_COLUMN])
            .map_err(|source| Error::Csv {
                path: path.clone(),
                source,
            })?;
        Ok(Self { inner, path })
    }

    pub fn write(&mut self, rec: &PreambleRecord) -> Result<()> {
        self.inner
            .write_record([rec.device_label(), &format_complex_list(rec.samples())])
            .map_err(|source| Error::Csv {
                path: self.path.clone(),
                source,
            })
    }

    pub fn finish(mut self) -> Result<()> {
        self.inner.flush().map_err(|source| Error::Io { path: self.path, source })
    }
}

pub fn write_preambles<'a>(records: impl IntoIterator<Item = &'a PreambleRecord>, path: &Path) -> Result<()> {
    let mut w = PreambleWriter::create(path)?;
    for r in records {
        w.write(r)?;
    }
    w.finish()
}

/// One `<mac>_pre.csv` per device under `dir`; returns the paths in label order.
pub fn write_preambles_per_device<'a>(
    records: impl IntoIterator<Item = &'a PreambleRecord>,
    dir: &Path,
) -> Result<Vec<PathBuf>> {
    let mut writers: BTreeMap<String, PreambleWriter<File>> = BTreeMap::new();
    for r in records {
        if !writers.contains_key(r.device_label()) {
            let w = PreambleWriter::create(&dir.join(device_file_name(r.device_label())))?;
            writers.insert(r.device_label().to_string(), w);
        }
        writers.get_mut(r.device_label()).expect("inserted").write(r)?;
    }
    let mut paths = Vec::with_capacity(writers.len());
    for (label, w) in writers {
        w.finish()?;
        paths.push(dir.join(device_file_name(&label)));
    }
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::ComplexSample;

    fn cell(n: usize) -> String {
        let lits: Vec<String> = (0..n).map(|i| format!("({}.5,-{})", i, i)).collect();
        format!("\"[{}]\"", lits.join(","))
    }

    #[test]
    fn reads_one_record() {
        let text = format!("mac_address,preamble\naa:bb:cc:dd:ee:ff,{}\n", cell(288));
        let mut r = PreambleReader::from_reader(text.as_bytes(), &CsvSchemaDescriptor::raw_preamble(), ParseMode::Lenient)
            .unwrap();
        let rec = r.next().unwrap().unwrap();
        assert_eq!(rec.device_label(), "aa:bb:cc:dd:ee:ff");
        assert_eq!(rec.samples()[3], ComplexSample::new(3.5, -3.0));
        assert!(r.next().is_none());
        assert_eq!(r.complex_format(), Some(ComplexFormat::ParenPair));
    }

    #[test]
    fn lenient_continues_strict_stops() {
        // columns in a different order and case than the writer uses
        let text = format!("preamble,MAC_ADDRESS\n{},x\n{},bb\n{},y\n", cell(1), cell(288), cell(287));
        let schema = CsvSchemaDescriptor::raw_preamble();
        let items: Vec<_> = PreambleReader::from_reader(text.as_bytes(), &schema, ParseMode::Lenient)
            .unwrap()
            .collect();
        assert_eq!(items.len(), 3);
        assert!(matches!(
            &items[0],
            Err(Error::Row {
                row: 1,
                kind: RowErrorKind::WrongSampleCount { found: 1, .. }
            })
        ));
        assert!(items[1].is_ok());
        assert!(matches!(&items[2], Err(Error::Row { row: 3, .. })));

        let items: Vec<_> = PreambleReader::from_reader(text.as_bytes(), &schema, ParseMode::Strict)
            .unwrap()
            .collect();
        assert_eq!(items.len(), 1);
    }

    #[test]
    fn typed_errors() {
        let schema = CsvSchemaDescriptor::raw_preamble();
        let missing = "mac_address,samples\nx,y\n";
        assert!(matches!(
            PreambleReader::from_reader(missing.as_bytes(), &schema, ParseMode::Lenient),
            Err(Error::MissingColumn(c)) if c == "preamble"
        ));

        let text = "mac_address,preamble\nx,\"(1,zz)\"\n,\"(1,2)\"\nx,\"(1,2)\",extra\n";
        let kinds: Vec<RowErrorKind> = PreambleReader::from_reader(text.as_bytes(), &schema, ParseMode::Lenient)
            .unwrap()
            .map(|r| match r {
                Err(Error::Row { kind, .. }) => kind,
                other => panic!("{other:?}"),
            })
            .collect();
        assert!(matches!(kinds[0], RowErrorKind::BadComplexLiteral { .. }));
        assert_eq!(kinds[1], RowErrorKind::EmptyLabel);
        assert!(matches!(kinds[2], RowErrorKind::FieldCount { expected: 2, found: 3 }));
    }

    #[test]
    fn writer_roundtrip() {
        let samples: Vec<_> = (0..288).map(|i| ComplexSample::new(i as f64 / 7.0, -(i as f64).sqrt())).collect();
        let rec = PreambleRecord::new("aa:bb", samples).unwrap();
        let mut buf = Vec::new();
        {
            let mut w = PreambleWriter::from_writer(&mut buf).unwrap();
            w.write(&rec).unwrap();
            w.finish().unwrap();
        }
        let back: Vec<_> = PreambleReader::from_reader(&buf[..], &CsvSchemaDescriptor::raw_preamble(), ParseMode::Strict)
            .unwrap()
            .collect::<Result<_>>()
            .unwrap();
        assert_eq!(back, vec![rec]);
    }
}
