//! Extract the full feature record from raw-preamble CSVs, or from a few
//! simulated frames when no path is given.
//!
//! ```sh
//! cargo run --example extract_features -- fleet/02:00:00:00:00:00_pre.csv
//! ```

use rffp::dataset::{read_preambles, CsvSchemaDescriptor, ParseMode};
use rffp::synth::{cfo_ladder_fleet, generate_fleet};
use rffp::{extract_features, PreambleRecord, SCALAR_FEATURE_NAMES};

fn main() -> rffp::Result<()> {
    let frames: Vec<PreambleRecord> = match std::env::args().nth(1) {
        Some(p) => read_preambles(p.as_ref(), &CsvSchemaDescriptor::raw_preamble(), ParseMode::Lenient)?
            .filter_map(|r| r.map_err(|e| eprintln!("skipping: {e}")).ok())
            .take(5)
            .collect(),
        None => generate_fleet(&cfo_ladder_fleet(3, 0.004, 1e-4, Some(20.0)), 2, 11)?,
    };

    for rec in &frames {
        let f = extract_features(rec)?;
        println!("{}", f.device_label);
        match f.scalars() {
            Some(v) => {
                for (name, x) in SCALAR_FEATURE_NAMES.iter().zip(v.as_slice()) {
                    println!("  {name:<20} {x:+.6e}");
                }
            }
            None => println!("  (iqi or fractal dimension undefined for this frame)"),
        }
    }
    Ok(())
}
