//! The dense simplex solver on a small LP, and the plain-text dump round trip.

use risbeam::lp::{solve, LinearProgram};

fn main() -> risbeam::Result<()> {
    // max 3x + 2y  s.t.  x + y <= 4, x + 3y <= 6, x <= 3, -x <= 0, -y <= 0
    let mut lp = LinearProgram::new(vec![3.0, 2.0]).with_labels(vec!["x".into(), "y".into()]);
    lp.add_row(&[1.0, 1.0], 4.0);
    lp.add_row(&[1.0, 3.0], 6.0);
    lp.add_row(&[1.0, 0.0], 3.0);
    lp.add_row(&[-1.0, 0.0], 0.0);
    lp.add_row(&[0.0, -1.0], 0.0);

    let sol = solve(&lp, 1e-9)?;
    println!("status {:?} after {} pivots", sol.status, sol.iterations);
    println!("x = {:?}, objective {}", sol.x, sol.objective_value);
    println!("active rows {:?}", sol.active_rows);

    let mut dump = Vec::new();
    lp.write_dump(&mut dump)?;
    print!("{}", String::from_utf8_lossy(&dump));
    let back = LinearProgram::read_dump(dump.as_slice())?;
    assert_eq!(back, lp);
    Ok(())
}
