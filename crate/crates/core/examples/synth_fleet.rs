//! Generate a small simulated fleet and write one raw-preamble CSV per device.
//!
//! ```sh
//! cargo run --example synth_fleet -- /tmp/fleet
//! ```

use std::path::PathBuf;

use rffp::dataset::write_preambles_per_device;
use rffp::synth::{cfo_ladder_fleet, generate_fleet, DeviceProfile, FleetSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "fleet".into()));
    std::fs::create_dir_all(&out)?;

    let mut devices = cfo_ladder_fleet(4, 0.002, 1e-4, Some(25.0));
    // one device with a visibly unbalanced I branch and a two-tap channel
    devices.push(DeviceProfile {
        label: "02:00:00:00:00:ff".into(),
        impairments: rffp::synth::ImpairmentSpec {
            cfo: 0.006,
            iq_gain: 1.05,
            channel_taps: vec![rffp::ComplexSample::new(1.0, 0.0), rffp::ComplexSample::new(0.1, -0.05)],
            snr_db: Some(25.0),
            ..Default::default()
        },
        cfo_jitter: 1e-4,
        iq_gain_jitter: 0.005,
    });
    let spec = FleetSpec { devices };
    spec.save(&out.join("fleet.json"))?;

    let frames = generate_fleet(&spec.devices, 200, 7)?;
    let files = write_preambles_per_device(&frames, &out)?;
    for f in &files {
        println!("{}", f.display());
    }
    println!("{} frames from {} devices", frames.len(), files.len());
    Ok(())
}
