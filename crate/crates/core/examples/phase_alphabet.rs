//! Phase alphabets, their convex hulls and the projections used after synthesis.

use num_complex::Complex64;
use risbeam::phase::{project_cmc, project_discrete, FeasibleRegion, ConstraintMode, PhaseAlphabet};

fn main() -> risbeam::Result<()> {
    let alphabet = PhaseAlphabet::new(4)?;
    for (l, v) in alphabet.values().iter().enumerate() {
        println!("level {l}: {:+.4} {:+.4}j  ({:.1}°)", v.re, v.im, alphabet.phase(l).to_degrees());
    }

    let hull = FeasibleRegion::for_mode(ConstraintMode::Hull, &alphabet)?;
    let w = Complex64::new(0.3, 0.5);
    println!("{w} inside hull: {}", hull.contains(w, 1e-12));
    println!("discrete projection {}", project_discrete(w, &alphabet)?);
    println!("unit-modulus projection {}", project_cmc(w)?);
    Ok(())
}
