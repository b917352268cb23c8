//! Walk one frame through synchronization, DFT and per-subcarrier
//! equalization, then print the channel estimate and measured LTS.

use rffp::equalizer::measure;
use rffp::signal::{ideal_lts, ComplexSample, PreambleRecord};
use rffp::sync::synchronize;
use rffp::synth::{apply_impairments, ideal_preamble, ImpairmentSpec};

fn main() -> rffp::Result<()> {
    let spec = ImpairmentSpec {
        cfo: 0.02,
        channel_taps: vec![ComplexSample::new(0.9, 0.2), ComplexSample::new(0.0, 0.15)],
        snr_db: Some(35.0),
        common_phase: 1.0,
        ..Default::default()
    };
    let rec = PreambleRecord::new("dev", apply_impairments(&ideal_preamble(), &spec, 3))?;
    let (cfo, lts) = synchronize(&rec)?;
    let (h, measured) = measure(&lts)?;
    println!("cfo estimate {:.6} rad/sample", cfo.total);

    let ideal = ideal_lts();
    let mask = ideal.mask();
    println!("{:>4} {:>5} {:>20} {:>20} {:>20}", "bin", "ideal", "channel", "l1", "l2");
    for j in mask.indices() {
        let c = |z: ComplexSample| format!("{:+.3}{:+.3}j", z.re, z.im);
        println!(
            "{:>4} {:>5} {:>20} {:>20} {:>20}",
            j as i64 - 32,
            ideal.at(j),
            c(h.gains[j]),
            c(measured.l1[j]),
            c(measured.l2[j])
        );
    }
    Ok(())
}
