use num_complex::Complex64;

use super::LinearProgram;
use crate::error::{Error, Result};
use crate::phase::{FeasibleRegion, HalfPlane};

/// Linear minorant `constant + Re(Σ conj(gradient_i) w_i)` of the power at
/// one grid angle.
#[derive(Debug, Clone, PartialEq)]
pub struct SurrogateRow {
    pub constant: f64,
    pub gradient: Vec<Complex64>,
}

impl SurrogateRow {
    pub fn eval(&self, w: &[Complex64]) -> f64 {
        self.constant
            + self
                .gradient
                .iter()
                .zip(w)
                .map(|(g, x)| (g.conj() * x).re)
                .sum::<f64>()
    }
}

/// The epigraph LP `max T` subject to `T <= g_k(w)` for every surrogate row
/// and every `w_i` inside `region`.
///
/// Variables are `[Re w_0, Im w_0, ..., Re w_{n-1}, Im w_{n-1}, T]`.
pub fn build_subproblem(
    rows: &[SurrogateRow],
    region: &FeasibleRegion,
    n_complex: usize,
) -> Result<LinearProgram> {
    if rows.is_empty() {
        return Err(Error::invalid("grid", "no angles in the region of interest"));
    }
    if n_complex == 0 {
        return Err(Error::invalid("weights", "no elements"));
    }
    let n_vars = 2 * n_complex + 1;
    let mut objective = vec![0.0; n_vars];
    objective[n_vars - 1] = 1.0;
    let mut labels: Vec<String> = (0..n_complex)
        .flat_map(|i| [format!("re_w{i}"), format!("im_w{i}")])
        .collect();
    labels.push("t".into());
    let mut lp = LinearProgram::new(objective).with_labels(labels);

    let mut coeffs = vec![0.0; n_vars];
    for row in rows {
        if row.gradient.len() != n_complex {
            return Err(Error::DimensionMismatch {
                expected: n_complex,
                actual: row.gradient.len(),
            });
        }
        for (i, g) in row.gradient.iter().enumerate() {
            coeffs[2 * i] = -g.re;
            coeffs[2 * i + 1] = -g.im;
        }
        coeffs[n_vars - 1] = 1.0;
        lp.add_row(&coeffs, row.constant);
    }

    for i in 0..n_complex {
        for hp in &region.halfplanes {
            coeffs.iter_mut().for_each(|c| *c = 0.0);
            coeffs[2 * i] = hp.normal.re;
            coeffs[2 * i + 1] = hp.normal.im;
            lp.add_row(&coeffs, hp.offset);
        }
    }
    Ok(lp)
}

/// A dual feasible starting basis for the LP built by [`build_subproblem`].
///
/// Picks the surrogate row with the smallest upper bound together with,
/// for every element, the two half-planes meeting at the vertex that
/// maximises that row's gradient term.
pub fn crash_basis(rows: &[SurrogateRow], region: &FeasibleRegion) -> Vec<usize> {
    let planes = &region.halfplanes;
    let upper = |row: &SurrogateRow| {
        row.constant + row.gradient.iter().map(|g| support(planes, *g)).sum::<f64>()
    };
    let pick = (0..rows.len())
        .min_by(|&a, &b| upper(&rows[a]).total_cmp(&upper(&rows[b])))
        .unwrap_or(0);
    let mut basis = vec![pick];
    let base = rows.len();
    for (i, g) in rows[pick].gradient.iter().enumerate() {
        let (a, b) = bracketing_planes(planes, *g);
        basis.push(base + i * planes.len() + a);
        basis.push(base + i * planes.len() + b);
    }
    basis
}

/// `max Re(conj(g) w)` over the region, attained at the vertex where the
/// two half-planes bracketing `g` meet.
fn support(planes: &[HalfPlane], g: Complex64) -> f64 {
    let (a, b) = bracketing_planes(planes, g);
    match vertex(&planes[a], &planes[b]) {
        Some(v) => (g.conj() * v).re,
        None => 0.0,
    }
}

/// Indices of two non-parallel half-planes whose normals span a cone
/// containing `g`, preferring the normals best aligned with it.
fn bracketing_planes(planes: &[HalfPlane], g: Complex64) -> (usize, usize) {
    let dir = if g.norm() > 0.0 { g / g.norm() } else { Complex64::new(1.0, 0.0) };
    let score = |h: &HalfPlane| (h.normal.conj() * dir).re / h.normal.norm();
    let first = (0..planes.len())
        .max_by(|&a, &b| score(&planes[a]).total_cmp(&score(&planes[b])))
        .unwrap_or(0);
    let n1 = planes[first].normal;
    // The second normal must sit on the other side of g.
    let side = (n1.conj() * dir).im;
    let second = (0..planes.len())
        .filter(|&k| {
            let cross = (n1.conj() * planes[k].normal).im;
            cross.abs() > 1e-9 && (side == 0.0 || cross * side > 0.0)
        })
        .max_by(|&a, &b| score(&planes[a]).total_cmp(&score(&planes[b])))
        .or_else(|| (0..planes.len()).find(|&k| (n1.conj() * planes[k].normal).im.abs() > 1e-9))
        .unwrap_or((first + 1) % planes.len());
    (first, second)
}

fn vertex(a: &HalfPlane, b: &HalfPlane) -> Option<Complex64> {
    // Solve [a.re a.im; b.re b.im] [x; y] = [a.off; b.off].
    let det = a.normal.re * b.normal.im - a.normal.im * b.normal.re;
    if det.abs() < 1e-12 {
        return None;
    }
    let x = (a.offset * b.normal.im - a.normal.im * b.offset) / det;
    let y = (a.normal.re * b.offset - a.offset * b.normal.re) / det;
    Some(Complex64::new(x, y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::{solve, LpStatus};
    use crate::phase::{alphabet, hull_halfplanes};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn unpack(x: &[f64]) -> Vec<Complex64> {
        x[..x.len() - 1].chunks(2).map(|c| Complex64::new(c[0], c[1])).collect()
    }

    #[test]
    fn row_counts() {
        let hull4 = hull_halfplanes(&alphabet(4).unwrap()).unwrap();
        let row = |n| SurrogateRow {
            constant: 0.0,
            gradient: vec![Complex64::new(1.0, 0.0); n],
        };
        let lp = build_subproblem(&[row(1)], &hull4, 1).unwrap();
        assert_eq!((lp.n_vars(), lp.n_rows()), (3, 5));
        let rows: Vec<_> = (0..10).map(|_| row(2)).collect();
        let lp = build_subproblem(&rows, &hull4, 2).unwrap();
        assert_eq!((lp.n_vars(), lp.n_rows()), (5, 18));
        assert!(build_subproblem(&[], &hull4, 2).is_err());
        assert!(build_subproblem(&[row(3)], &hull4, 2).is_err());
    }

    #[test]
    fn single_element_reaches_the_alphabet_vertex() {
        // max Re(conj(e^{jπ/4}) w) over the L = 4 hull is 1 at w = e^{jπ/4}.
        let a = alphabet(4).unwrap();
        let region = hull_halfplanes(&a).unwrap();
        let row = SurrogateRow {
            constant: 0.0,
            gradient: vec![Complex64::cis(PI / 4.0)],
        };
        let lp = build_subproblem(&[row], &region, 1).unwrap();
        let s = solve(&lp, 1e-8).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert_abs_diff_eq!(s.objective_value, 1.0, epsilon = 1e-9);
        let w = unpack(&s.x)[0];
        assert!((w - Complex64::cis(PI / 4.0)).norm() < 1e-9);
    }

    #[test]
    fn two_level_segment_picks_plus_j() {
        let a = alphabet(2).unwrap();
        let region = hull_halfplanes(&a).unwrap();
        let row = SurrogateRow {
            constant: 0.0,
            gradient: vec![Complex64::new(0.3, 1.0)],
        };
        let lp = build_subproblem(&[row], &region, 1).unwrap();
        let s = solve(&lp, 1e-8).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        let w = unpack(&s.x)[0];
        assert!((w - Complex64::new(0.0, 1.0)).norm() < 1e-9);
    }

    #[test]
    fn separable_objective_matches_vertex_enumeration() {
        // With one surrogate row the LP separates per element; the optimum
        // is the best alphabet point for each gradient independently.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for trial in 0..200 {
            let levels = 2 + trial % 7;
            let n = 1 + trial % 5;
            let a = alphabet(levels).unwrap();
            let region = hull_halfplanes(&a).unwrap();
            let gradient: Vec<Complex64> = (0..n)
                .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            let row = SurrogateRow { constant: 0.5, gradient: gradient.clone() };
            let want: f64 = 0.5
                + gradient
                    .iter()
                    .map(|g| {
                        a.values()
                            .iter()
                            .map(|v| (g.conj() * v).re)
                            .fold(f64::NEG_INFINITY, f64::max)
                    })
                    .sum::<f64>();
            let lp = build_subproblem(&[row], &region, n).unwrap();
            let s = solve(&lp, 1e-8).unwrap();
            assert_eq!(s.status, LpStatus::Optimal);
            assert_abs_diff_eq!(s.objective_value, want, epsilon = 1e-9);
            assert!(s.residual <= 1e-8);
        }
    }

    #[test]
    fn max_min_over_several_rows_beats_every_vertex_combination() {
        // Brute force over the vertices of the hull product is a lower bound
        // on the LP optimum, and the LP point must be feasible.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..30 {
            let a = alphabet(4).unwrap();
            let region = hull_halfplanes(&a).unwrap();
            let n = 3;
            let rows: Vec<SurrogateRow> = (0..4)
                .map(|_| SurrogateRow {
                    constant: rng.random_range(-0.5..0.5),
                    gradient: (0..n)
                        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                        .collect(),
                })
                .collect();
            let lp = build_subproblem(&rows, &region, n).unwrap();
            let s = solve(&lp, 1e-8).unwrap();
            assert_eq!(s.status, LpStatus::Optimal);
            let w = unpack(&s.x);
            let t_at_w = rows.iter().map(|r| r.eval(&w)).fold(f64::INFINITY, f64::min);
            assert_abs_diff_eq!(t_at_w, s.objective_value, epsilon = 1e-9);
            for code in 0..64usize {
                let v: Vec<Complex64> = (0..n).map(|i| a.value((code >> (2 * i)) & 3)).collect();
                let t = rows.iter().map(|r| r.eval(&v)).fold(f64::INFINITY, f64::min);
                assert!(t <= s.objective_value + 1e-9);
            }
        }
    }
}
