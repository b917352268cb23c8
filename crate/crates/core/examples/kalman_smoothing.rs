//! Smooth a noisy per-frame CFO sequence and compare the spread before and after.

use rffp::kalman::{kalman_filter_with_gains, kalman_smooth, KalmanConfig};
use rffp::synth::{cfo_ladder_fleet, generate_fleet};

fn spread(v: &[f64]) -> f64 {
    let m = v.iter().sum::<f64>() / v.len() as f64;
    (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / v.len() as f64).sqrt()
}

fn main() -> rffp::Result<()> {
    let frames = generate_fleet(&cfo_ladder_fleet(1, 0.0, 2e-4, Some(15.0)), 500, 4)?;
    let cfo: Vec<f64> = frames
        .iter()
        .map(|r| rffp::extract_features(r).map(|f| f.cfo))
        .collect::<rffp::Result<_>>()?;

    for scale in [1e-2, 1e-3, 1e-4] {
        let cfg = KalmanConfig {
            process_variance_scale: scale,
            ..Default::default()
        };
        let smooth = kalman_smooth(&cfo, &cfg)?;
        let (_, gains) = kalman_filter_with_gains(&cfo, &cfg)?;
        println!(
            "q = {scale:e}·Var(z): std {:.3e} -> {:.3e}, steady-state gain {:.4}",
            spread(&cfo),
            spread(&smooth[50..]),
            gains.last().unwrap()
        );
    }
    Ok(())
}
