//! Main-lobe widths of a uniform linear array for a few sizes and drop levels.

use risbeam::array::{array_factor, beamwidth, to_db};

fn main() -> risbeam::Result<()> {
    println!("{:>5} {:>9} {:>9} {:>9}", "N", "-3 dB", "-1 dB", "-0.5 dB");
    for n in [64, 100, 128, 256] {
        let w: Vec<f64> = [3.0, 1.0, 0.5].iter().map(|&d| beamwidth(n, d)).collect::<Result<_, _>>()?;
        println!("{n:>5} {:>8.3}° {:>8.3}° {:>8.3}°", w[0], w[1], w[2]);
    }

    // The width is measured edge to edge, so the response at half of it is the drop level.
    let half = beamwidth(128, 3.0)? / 2.0;
    let g = array_factor(128, half, 0.0) / array_factor(128, 0.0, 0.0);
    println!("N=128 response at ±{half:.4}°: {:.3} dB", to_db(g));
    Ok(())
}
