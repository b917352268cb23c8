mod common;

use std::io::Write;

use proptest::prelude::*;

use rffp::dataset::{
    read_feature_records, read_features, read_preambles, write_features, write_features_per_device, write_preambles,
    CsvSchemaDescriptor, FeatureReader, ParseMode, PreambleReader, FEATURE_COLUMNS,
};
use rffp::error::{Error, RowErrorKind};
use rffp::features::{extract_features, FeatureRecord};
use rffp::synth::{cfo_ladder_fleet, generate_fleet, ImpairmentSpec};

fn noisy_records(devices: usize, frames: usize) -> Vec<FeatureRecord> {
    let fleet = generate_fleet(&cfo_ladder_fleet(devices, 0.002, 1e-4, Some(20.0)), frames, 3).unwrap();
    fleet.iter().map(|r| extract_features(r).unwrap()).collect()
}

fn bits(v: &[f64]) -> Vec<u64> {
    v.iter().map(|x| x.to_bits()).collect()
}

#[test]
fn features_roundtrip_bit_exact() {
    let records = noisy_records(4, 25);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("all.csv");
    write_features(&records, &path).unwrap();
    let back = read_feature_records(&path, true, ParseMode::Strict).unwrap();
    assert_eq!(back.len(), 100);
    for (a, b) in records.iter().zip(&back) {
        assert_eq!(a.device_label, b.device_label);
        assert_eq!(bits(&a.scalars().unwrap().0), bits(&b.scalars().unwrap().0));
        assert_eq!(bits(&a.phase_error_v1), bits(&b.phase_error_v1));
        assert_eq!(bits(&a.mag_error_v2), bits(&b.mag_error_v2));
        assert_eq!(a.preamble, b.preamble);
        assert_eq!(a.iq_preamble, b.iq_preamble);
    }
    assert_eq!(&records, &back);

    let load = read_features(&[path], &CsvSchemaDescriptor::feature_full(), true, ParseMode::Strict).unwrap();
    assert_eq!(load.matrix.n_rows(), 100);
    assert_eq!(load.matrix.n_features(), 15);
    assert_eq!(load.inconsistent_rows, 0);
    assert!(load.row_errors.is_empty());
    assert_eq!(load.matrix.classes().len(), 4);
}

#[test]
fn empty_stream_gives_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.csv");
    write_features(std::iter::empty(), &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.trim_end(), FEATURE_COLUMNS.join(","));
    assert!(read_feature_records(&path, true, ParseMode::Strict).unwrap().is_empty());
}

#[test]
fn per_device_files_follow_mac_naming() {
    let profiles = cfo_ladder_fleet(123, 1e-3, 0.0, Some(25.0));
    let fleet = generate_fleet(&profiles, 2, 1).unwrap();
    let feats: Vec<_> = fleet.iter().map(|r| extract_features(r).unwrap()).collect();
    let dir = tempfile::tempdir().unwrap();
    let paths = write_features_per_device(&feats, dir.path()).unwrap();
    assert_eq!(paths.len(), 123);
    let mut names: Vec<String> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    let mut want: Vec<String> = profiles.iter().map(|p| format!("{}_pre.csv", p.label)).collect();
    want.sort();
    assert_eq!(names, want);
    let one = read_feature_records(&paths[7], false, ParseMode::Strict).unwrap();
    assert_eq!(one.len(), 2);
    assert!(one.iter().all(|r| r.device_label == one[0].device_label));
}

#[test]
fn preambles_roundtrip_and_alternate_spellings() {
    let fleet = generate_fleet(&cfo_ladder_fleet(2, 0.01, 0.0, Some(10.0)), 3, 9).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("raw.csv");
    write_preambles(&fleet, &path).unwrap();
    let back: Vec<_> = read_preambles(&path, &CsvSchemaDescriptor::raw_preamble(), ParseMode::Strict)
        .unwrap()
        .collect::<Result<_, _>>()
        .unwrap();
    assert_eq!(back, fleet);

    // Python-style `a+bj` list and JSON-style pairs read to the same samples.
    let rec = &fleet[0];
    let py: Vec<String> = rec
        .samples()
        .iter()
        .map(|s| format!("({:?}{:+?}j)", s.re, s.im))
        .collect();
    let js: Vec<String> = rec.samples().iter().map(|s| format!("[{:?}, {:?}]", s.re, s.im)).collect();
    let text = format!(
        "MAC_Address,Preamble\n{mac},\"[{}]\"\n{mac},\"[{}]\"\n",
        py.join(", "),
        js.join(", "),
        mac = rec.device_label()
    );
    let py_rows: Vec<_> = PreambleReader::from_reader(text.lines().take(2).collect::<Vec<_>>().join("\n").as_bytes(), &CsvSchemaDescriptor::raw_preamble(), ParseMode::Strict)
        .unwrap()
        .collect::<Result<_, _>>()
        .unwrap();
    assert_eq!(py_rows[0].samples(), rec.samples());
    let js_text = format!("mac_address,preamble\n{}", text.lines().nth(2).unwrap());
    let js_rows: Vec<_> = PreambleReader::from_reader(js_text.as_bytes(), &CsvSchemaDescriptor::raw_preamble(), ParseMode::Strict)
        .unwrap()
        .collect::<Result<_, _>>()
        .unwrap();
    assert_eq!(js_rows[0].samples(), rec.samples());
}

#[test]
fn stats_inconsistency_is_counted() {
    let mut records = noisy_records(1, 5);
    records[2].phase_error_mean_1 += 1e-6;
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.csv");
    write_features(&records, &path).unwrap();
    let load = read_features(&[path.clone()], &CsvSchemaDescriptor::feature_full(), true, ParseMode::Strict).unwrap();
    assert_eq!(load.inconsistent_rows, 1);
    let load = read_features(&[path], &CsvSchemaDescriptor::feature_full(), false, ParseMode::Strict).unwrap();
    assert_eq!(load.inconsistent_rows, 0);
}

#[test]
fn undefined_scalars_are_row_errors_in_the_matrix() {
    let rec = common::frame(&ImpairmentSpec::default(), 0);
    let noiseless = extract_features(&rec).unwrap();
    assert!(noiseless.frac_dimension_1.is_none());
    let mut records = noisy_records(1, 3);
    records.insert(1, FeatureRecord {
        device_label: records[0].device_label.clone(),
        ..noiseless
    });
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.csv");
    write_features(&records, &path).unwrap();
    let back = read_feature_records(&path, true, ParseMode::Strict).unwrap();
    assert_eq!(back[1].frac_dimension_1, None);
    let load = read_features(&[path.clone()], &CsvSchemaDescriptor::feature_full(), false, ParseMode::Lenient).unwrap();
    assert_eq!(load.matrix.n_rows(), 3);
    assert_eq!(load.row_errors.len(), 1);
    assert!(matches!(
        &load.row_errors[0].1,
        Error::Row { row: 2, kind: RowErrorKind::MissingValue { .. } }
    ));
    assert!(read_features(&[path], &CsvSchemaDescriptor::feature_full(), false, ParseMode::Strict).is_err());
}

#[test]
fn scalar_only_feature_files_load() {
    // vector and preamble columns are optional when vectors are not retained
    let records = noisy_records(2, 5);
    let mut text = String::from("mac_address");
    for n in rffp::SCALAR_FEATURE_NAMES {
        text.push(',');
        text.push_str(n);
    }
    text.push('\n');
    for r in &records {
        text.push_str(&r.device_label);
        for v in r.scalars().unwrap().0 {
            text.push_str(&format!(",{v:?}"));
        }
        text.push('\n');
    }
    let rows: Vec<_> = FeatureReader::from_reader(text.as_bytes(), &CsvSchemaDescriptor::feature_full(), false, ParseMode::Strict)
        .unwrap()
        .collect::<Result<_, _>>()
        .unwrap();
    assert_eq!(rows.len(), 10);
    for (a, b) in rows.iter().zip(&records) {
        assert_eq!(a.scalars(), b.scalars());
    }
    assert!(FeatureReader::from_reader(text.as_bytes(), &CsvSchemaDescriptor::feature_full(), true, ParseMode::Strict).is_err());
}

/// Peak resident set size in kB.
fn peak_rss_kb() -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    line.split_whitespace().nth(1)?.parse().ok()
}

#[test]
#[ignore = "writes a ~2 GB file; run with --ignored"]
fn million_row_stream_has_flat_memory() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("big.csv");
    let cell = format!("\"[{}]\"", vec!["(0.5,-0.25)"; 288].join(","));
    {
        let mut f = std::io::BufWriter::new(std::fs::File::create(&path).unwrap());
        writeln!(f, "mac_address,preamble").unwrap();
        for i in 0..1_000_000u32 {
            writeln!(f, "02:00:00:00:{:02x}:{:02x},{cell}", (i >> 8) & 0xff, i & 0xff).unwrap();
        }
    }
    let before = peak_rss_kb();
    let mut n = 0u64;
    for r in read_preambles(&path, &CsvSchemaDescriptor::raw_preamble(), ParseMode::Strict).unwrap() {
        r.unwrap();
        n += 1;
    }
    assert_eq!(n, 1_000_000);
    if let (Some(a), Some(b)) = (before, peak_rss_kb()) {
        assert!(b - a < 64 * 1024, "peak RSS grew by {} kB", b - a);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn reader_never_panics(body in "[a-f0-9:(),\\[\\]+\\-.ej \"\n]{0,400}") {
        let text = format!("mac_address,preamble\n{body}");
        let reader = PreambleReader::from_reader(text.as_bytes(), &CsvSchemaDescriptor::raw_preamble(), ParseMode::Lenient);
        if let Ok(reader) = reader {
            for item in reader {
                if let Err(e) = item {
                    prop_assert!(matches!(e, Error::Row { .. }), "{e:?}");
                }
            }
        }
        let text = format!("{}\n{body}", FEATURE_COLUMNS.join(","));
        let reader = FeatureReader::from_reader(text.as_bytes(), &CsvSchemaDescriptor::feature_full(), true, ParseMode::Lenient).unwrap();
        for item in reader {
            if let Err(e) = item {
                prop_assert!(matches!(e, Error::Row { .. }), "{e:?}");
            }
        }
    }

    #[test]
    fn corrupted_rows_are_exactly_the_reported_rows(bad in prop::collection::btree_set(1usize..60, 0..10)) {
        let good = format!("\"[{}]\"", vec!["(1,-1)"; 288].join(","));
        let mut text = String::from("mac_address,preamble\n");
        for row in 1..60 {
            let cell = match (bad.contains(&row), row % 3) {
                (false, _) => good.clone(),
                (true, 0) => format!("\"[{}]\"", vec!["(1,-1)"; 287].join(",")),
                (true, 1) => good.replacen("(1,-1)", "(1,x)", 1),
                (true, _) => String::new(),
            };
            text.push_str(&format!("aa:{row},{cell}\n"));
        }
        let reported: std::collections::BTreeSet<usize> = PreambleReader::from_reader(text.as_bytes(), &CsvSchemaDescriptor::raw_preamble(), ParseMode::Lenient)
            .unwrap()
            .filter_map(|r| match r {
                Err(Error::Row { row, .. }) => Some(row as usize),
                _ => None,
            })
            .collect();
        prop_assert_eq!(reported, bad);
    }
}
