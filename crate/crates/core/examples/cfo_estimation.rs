//! Coarse and fine CFO estimates for a range of injected offsets and SNRs.

use rffp::signal::PreambleRecord;
use rffp::sync::{rad_per_sample_to_hz, synchronize};
use rffp::synth::{apply_impairments, ideal_preamble, ImpairmentSpec};

fn main() -> rffp::Result<()> {
    let clean = ideal_preamble();
    println!("{:>9} {:>6} {:>12} {:>12} {:>12} {:>10}", "cfo", "snr", "coarse", "fine", "total", "Hz");
    for cfo in [-0.1, -0.01, 0.0, 0.004, 0.05, 0.18] {
        for snr in [None, Some(30.0), Some(10.0)] {
            let spec = ImpairmentSpec {
                cfo,
                snr_db: snr,
                ..Default::default()
            };
            let rec = PreambleRecord::new("dev", apply_impairments(&clean, &spec, 1))?;
            let (est, _) = synchronize(&rec)?;
            let snr = snr.map_or("inf".to_string(), |s| format!("{s}"));
            println!(
                "{cfo:>9.4} {snr:>6} {:>12.8} {:>12.8} {:>12.8} {:>10.0}",
                est.coarse,
                est.fine,
                est.total,
                rad_per_sample_to_hz(est.total)
            );
        }
    }

    // Offsets beyond the STS range alias; the sum wraps by multiples of π/8.
    let spec = ImpairmentSpec { cfo: 0.25, ..Default::default() };
    let rec = PreambleRecord::new("dev", apply_impairments(&clean, &spec, 1))?;
    let (est, _) = synchronize(&rec)?;
    println!("\ninjected 0.25, recovered {:.6} (aliased)", est.total);
    Ok(())
}
