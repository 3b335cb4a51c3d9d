//! Wide beam from an 8x8 planar array covering an azimuth sector at fixed elevation.

use risbeam::array::{Angle, ArrayGeometry, ChannelGains};
use risbeam::synth::{synthesize, Rect, RegionOfInterest, SynthesisProblem};

fn main() -> risbeam::Result<()> {
    let geom = ArrayGeometry::upa(8, 8, 0.5)?;
    let roi = RegionOfInterest::planar(&[Rect { el: [0.0, 0.0], az: [-30.0, 30.0] }])?;
    let mut problem = SynthesisProblem::new(geom, roi)?.with_grid_step(1.0);
    problem.gains = ChannelGains { bs_angle: Angle::Planar { el: 0.0, az: 10.0 }, ..ChannelGains::unit(&geom) };
    let best = synthesize(&problem, &[0.0, 1.0, 100.0], 1)?.best().clone();
    println!("{} grid points, quantized min {:.2} dB", best.grid_points, best.min_db_projected());
    if let Some(indices) = &best.projected_indices {
        for row in indices.chunks(8) {
            println!("{row:?}");
        }
    }
    Ok(())
}
