//! Angle estimation with MUSIC over T = 7 RIS slots and Q = 4 blocks.

use risbeam::array::ArrayGeometry;
use risbeam::music::{
    mse_experiment, simulate_snapshots, wide_beam_schedule, MonteCarlo, MusicEstimator, SearchSpec, DEFAULT_BLOCKS,
    DEFAULT_SLOTS,
};
use risbeam::synth::{RegionOfInterest, SynthesisProblem, DEFAULT_LAMBDAS};

fn main() -> risbeam::Result<()> {
    let geom = ArrayGeometry::ula(32, 0.5)?;
    let problem = SynthesisProblem::new(geom, RegionOfInterest::interval(-30.0, 30.0)?)?;
    let schedule = wide_beam_schedule(&problem, &DEFAULT_LAMBDAS, DEFAULT_SLOTS, DEFAULT_BLOCKS)?;

    let mc = MonteCarlo::new(geom, [-30.0, 30.0], vec![-10.0, 0.0, 10.0], 100, 7);
    let channel = mc.channel_at(0.0);
    let snaps = simulate_snapshots(&channel, &schedule, 12.3456, 1)?;
    let estimator = MusicEstimator::new(channel, schedule.clone(), SearchSpec::new(-30.0, 30.0))?;
    println!("one draw at 0 dB: true 12.3456°, estimate {:.4}°", estimator.estimate(&snaps.blocks)?);

    for row in mse_experiment(&mc, &schedule)? {
        println!("SNR {:>5} dB: MSE {:.3e} deg² over {} trials", row.snr_db, row.mse_deg2, row.trials);
    }
    Ok(())
}
