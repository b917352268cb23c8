//! Write features to CSV, read them back with vectors retained, and load the
//! classifier matrix, reporting any rejected rows.

use rffp::dataset::{read_feature_records, read_features, write_features, CsvSchemaDescriptor, ParseMode};
use rffp::synth::{cfo_ladder_fleet, generate_fleet};
use rffp::extract_features;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let frames = generate_fleet(&cfo_ladder_fleet(2, 0.01, 1e-4, Some(20.0)), 50, 2)?;
    let feats = frames.iter().map(extract_features).collect::<rffp::Result<Vec<_>>>()?;

    let dir = std::env::temp_dir().join("rffp-roundtrip");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("features.csv");
    write_features(&feats, &path)?;

    let back = read_feature_records(&path, true, ParseMode::Strict)?;
    println!("{} records written, {} read, identical: {}", feats.len(), back.len(), back == feats);

    let load = read_features(&[path], &CsvSchemaDescriptor::feature_full(), true, ParseMode::Lenient)?;
    println!(
        "matrix {}x{}, {} row errors, {} rows with inconsistent stats",
        load.matrix.n_rows(),
        load.matrix.n_features(),
        load.row_errors.len(),
        load.inconsistent_rows
    );
    Ok(())
}
