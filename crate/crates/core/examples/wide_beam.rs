//! Max-min wide-beam synthesis for a 32-element array with a 2-bit phase alphabet.
//!
//! Run with `cargo run --release --example wide_beam`.

use risbeam::synth::{evaluate_flatness, synthesize, RegionOfInterest, SynthesisProblem, DEFAULT_LAMBDAS};
use risbeam::array::ArrayGeometry;

fn main() -> risbeam::Result<()> {
    let geom = ArrayGeometry::ula(32, 0.5)?;
    let problem = SynthesisProblem::new(geom, RegionOfInterest::interval(-30.0, 30.0)?)?;
    let sweep = synthesize(&problem, &DEFAULT_LAMBDAS, 2)?;
    let best = sweep.best();
    let flat = evaluate_flatness(&problem, &best.weights_projected, problem.eval_step)?;

    println!("grid points {}, iterations {}", best.grid_points, best.iterations);
    println!("relaxed min {:.2} dB, quantized min {:.2} dB", best.min_db_relaxed(), best.min_db_projected());
    println!("ripple {:.2} dB over [{:.2}, {:.2}] dB", flat.ripple_db, flat.min_db, flat.max_db);
    println!("phase indices {:?}", best.projected_indices);
    Ok(())
}
