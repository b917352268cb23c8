//! Pearson correlation between the 15 scalar features of a simulated fleet.

use rffp::forest::pearson_correlation_matrix;
use rffp::synth::{cfo_ladder_fleet, generate_fleet};
use rffp::{extract_features, LabeledFeatureMatrix};

fn main() -> rffp::Result<()> {
    let frames = generate_fleet(&cfo_ladder_fleet(6, 0.003, 1e-4, Some(20.0)), 200, 5)?;
    let feats = frames.iter().map(extract_features).collect::<rffp::Result<Vec<_>>>()?;
    let (data, _) = LabeledFeatureMatrix::from_records(&feats)?;
    let corr = pearson_correlation_matrix(&data)?;
    print!("{}", corr.to_table());
    for (a, b) in [("cfo", "short_freq"), ("cfo", "long_freq"), ("frac_dimension_1", "frac_dimension_2")] {
        println!("r({a}, {b}) = {:.3}", corr.get(a, b).unwrap_or(f64::NAN));
    }
    if !corr.undefined().is_empty() {
        println!("constant columns: {:?}", corr.undefined());
    }
    Ok(())
}
