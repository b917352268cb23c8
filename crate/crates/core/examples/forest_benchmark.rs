//! Cross-validated Random Forest on a simulated fleet, with and without
//! Kalman smoothing, plus a trained model saved to disk.

use rffp::forest::{cross_validate, predict, train, CvConfig, ForestModel, TrainConfig};
use rffp::kalman::KalmanConfig;
use rffp::synth::{cfo_ladder_fleet, generate_fleet};
use rffp::{extract_features, LabeledFeatureMatrix};

fn main() -> rffp::Result<()> {
    // tight spacing so the classes overlap and smoothing matters
    let frames = generate_fleet(&cfo_ladder_fleet(8, 2e-4, 1e-4, Some(20.0)), 300, 1)?;
    let feats = frames.iter().map(extract_features).collect::<rffp::Result<Vec<_>>>()?;
    let (data, skipped) = LabeledFeatureMatrix::from_records(&feats)?;
    println!("{} rows, {} skipped", data.n_rows(), skipped);

    let cfg = CvConfig { trees: 64, ..Default::default() };
    let plain = cross_validate(&data, &cfg)?;
    print!("{}", plain.to_table());

    let smoothed = cross_validate(
        &data,
        &CvConfig {
            smoothing: Some(KalmanConfig::default()),
            ..cfg
        },
    )?;
    println!("\nwith smoothing: {:.2}%", 100.0 * smoothed.accuracy);

    let model = train(&data, &TrainConfig { trees: 64, ..Default::default() })?;
    let path = std::env::temp_dir().join("rffp-forest.json");
    model.save(&path)?;
    let model = ForestModel::load(&path)?;
    println!("model at {}; first row -> {}", path.display(), predict(&model, &data.rows[0])?);
    Ok(())
}
