//! GLRT and energy detection with the wide-beam and sweeping schedules.

use risbeam::array::ArrayGeometry;
use risbeam::detect::{fixed_pfa_experiment, sweep_baseline_schedule, Detector, RocSource};
use risbeam::music::{wide_beam_schedule, MonteCarlo, DEFAULT_BLOCKS, DEFAULT_SLOTS};
use risbeam::phase::PhaseAlphabet;
use risbeam::synth::{RegionOfInterest, SynthesisProblem, DEFAULT_LAMBDAS};

fn main() -> risbeam::Result<()> {
    let geom = ArrayGeometry::ula(32, 0.5)?;
    let problem = SynthesisProblem::new(geom, RegionOfInterest::interval(-30.0, 30.0)?)?;
    let mc = MonteCarlo::new(geom, [-30.0, 30.0], vec![-15.0], 300, 3);
    let schedules = vec![
        ("widebeam".to_string(), wide_beam_schedule(&problem, &DEFAULT_LAMBDAS, DEFAULT_SLOTS, DEFAULT_BLOCKS)?),
        (
            "sweep".to_string(),
            sweep_baseline_schedule(&mc.channel_at(0.0), Some(&PhaseAlphabet::new(4)?), [-30.0, 30.0], DEFAULT_SLOTS, DEFAULT_BLOCKS)?,
        ),
    ];
    for row in fixed_pfa_experiment(&mc, &schedules, &Detector::ALL, 0.01)? {
        let tag = match row.source {
            RocSource::MonteCarlo => "simulated",
            RocSource::ClosedForm => "closed form",
        };
        println!("{:<9} {:<12} P_FA {:.4}  P_D {:.3}  ({tag})", row.schedule, row.detector.name(), row.p_fa, row.p_d);
    }
    Ok(())
}
