//! How the penalty continuation pushes the relaxed solution onto the alphabet,
//! against quantizing the unconstrained optimum directly.

use risbeam::array::ArrayGeometry;
use risbeam::synth::{direct_quantize_baseline, lambda_sweep, RegionOfInterest, SynthesisProblem, DEFAULT_LAMBDAS};

fn main() -> risbeam::Result<()> {
    let problem = SynthesisProblem::new(ArrayGeometry::ula(64, 0.5)?, RegionOfInterest::interval(-30.0, 30.0)?)?;
    let sweep = lambda_sweep(&problem, &DEFAULT_LAMBDAS)?;
    println!("{:>8} {:>12} {:>12} {:>6}", "lambda", "relaxed dB", "quantized", "iters");
    for s in &sweep.stages {
        println!("{:>8} {:>12.2} {:>12.2} {:>6}", s.penalty, s.min_db_relaxed(), s.min_db_projected(), s.iterations);
    }
    let direct = direct_quantize_baseline(&problem)?;
    println!("direct quantization: {:.2} dB", direct.min_db_projected());
    Ok(())
}
