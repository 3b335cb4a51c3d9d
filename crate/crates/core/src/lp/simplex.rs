//! Revised primal simplex applied to the dual of `max cᵀx, A x <= b, x free`.
//!
//! The dual is `min bᵀy  s.t.  Aᵀy = c, y >= 0`. Its basis has one column per
//! primal variable, so the basis inverse stays `n x n` however many
//! constraint rows the primal has. The simplex multipliers of the dual are the
//! primal point itself, and a dual reduced cost is a primal slack: pricing
//! picks the most violated primal constraint.
//!
//! Pricing uses Devex reference weights with a switch to Bland's rule after
//! a run of degenerate pivots; both are deterministic, so identical input gives
//! identical output bits.

use super::{dot, LinearProgram, LpSolution, LpStatus};
use crate::error::Result;

#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    /// Primal feasibility / dual optimality tolerance.
    pub tol: f64,
    /// Refactor the basis inverse after this many pivots (at least the
    /// number of variables).
    pub refactor_every: usize,
    /// Degenerate pivots in a row before falling back to Bland's rule.
    pub degenerate_limit: usize,
    pub max_pivots: Option<usize>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: 1e-8,
            refactor_every: 64,
            degenerate_limit: 30,
            max_pivots: None,
        }
    }
}

pub fn solve(lp: &LinearProgram, tol: f64) -> Result<LpSolution> {
    solve_with(
        lp,
        SolverOptions {
            tol,
            ..Default::default()
        },
    )
}

pub fn solve_with(lp: &LinearProgram, opts: SolverOptions) -> Result<LpSolution> {
    solve_from(lp, None, opts)
}

/// Like [`solve_with`], starting from `basis` (one row index per variable)
/// when those rows form a dual feasible basis. Otherwise the hint is ignored
/// and the solver runs both phases from scratch.
pub fn solve_from(
    lp: &LinearProgram,
    basis: Option<&[usize]>,
    opts: SolverOptions,
) -> Result<LpSolution> {
    lp.validate()?;
    let mut state = DualSimplex::new(lp, opts);
    let status = state.run(basis);
    Ok(state.finish(lp, status))
}

const PIVOT_TOL: f64 = 1e-9;
/// Ratio-test slack used by the Harris two-pass rule.
const HARRIS_DELTA: f64 = 1e-10;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Phase {
    One,
    Two,
}

/// Geometric-mean row and column scaling followed by row equilibration.
/// Returns `(row_scale, col_scale)`.
fn scale_factors(lp: &LinearProgram) -> (Vec<f64>, Vec<f64>) {
    let (m, n) = (lp.n_rows(), lp.n_vars());
    // Entries this far below the largest one in the matrix are roundoff and
    // would otherwise dominate the geometric means.
    let big = lp.matrix.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let floor = big * 1e-12;
    let mut r = vec![1.0; m];
    let mut s = vec![1.0; n];
    let extent = |vals: &mut dyn Iterator<Item = (f64, f64)>| {
        vals.filter(|(raw, _)| raw.abs() > floor)
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), (_, v)| (lo.min(v), hi.max(v)))
    };
    for _ in 0..4 {
        for i in 0..m {
            let row = lp.row(i);
            let (lo, hi) = extent(&mut row.iter().enumerate().map(|(j, a)| (*a, (a * s[j]).abs())));
            if hi > 0.0 {
                r[i] = 1.0 / (lo * hi).sqrt();
            }
        }
        for j in 0..n {
            let (lo, hi) = extent(&mut (0..m).map(|i| {
                let a = lp.row(i)[j];
                (a, (a * r[i]).abs())
            }));
            if hi > 0.0 {
                s[j] = 1.0 / (lo * hi).sqrt();
            }
        }
    }
    for i in 0..m {
        let hi = lp.row(i).iter().enumerate().fold(0.0f64, |a, (j, v)| a.max((v * s[j]).abs()));
        r[i] = if hi > 0.0 { 1.0 / hi } else { 1.0 };
    }
    (r, s)
}

/// Compressed sparse rows. Rows with every entry present are stored in
/// column order, so products with them run over contiguous slices.
struct Rows {
    n: usize,
    start: Vec<usize>,
    index: Vec<usize>,
    value: Vec<f64>,
}

impl Rows {
    fn len(&self, i: usize) -> usize {
        self.start[i + 1] - self.start[i]
    }

    fn is_empty(&self, i: usize) -> bool {
        self.len(i) == 0
    }

    fn entries(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.start[i]..self.start[i + 1];
        self.index[r.clone()].iter().copied().zip(self.value[r].iter().copied())
    }

    fn dot(&self, i: usize, x: &[f64]) -> f64 {
        let r = self.start[i]..self.start[i + 1];
        if r.len() == self.n {
            return dot(&self.value[r], x);
        }
        self.entries(i).map(|(j, v)| v * x[j]).sum()
    }

    /// `(a_i · x, a_i · y)` in one pass.
    fn dot2(&self, i: usize, x: &[f64], y: &[f64]) -> (f64, f64) {
        let r = self.start[i]..self.start[i + 1];
        if r.len() == self.n {
            let vals = &self.value[r];
            let mut sx = 0.0;
            let mut sy = 0.0;
            for ((v, a), b) in vals.iter().zip(x).zip(y) {
                sx += v * a;
                sy += v * b;
            }
            return (sx, sy);
        }
        self.entries(i)
            .fold((0.0, 0.0), |(sx, sy), (j, v)| (sx + v * x[j], sy + v * y[j]))
    }
}

struct DualSimplex {
    n: usize,
    m: usize,
    /// Scaled primal rows.
    rows: Rows,
    bounds: Vec<f64>,
    objective: Vec<f64>,
    col_scale: Vec<f64>,
    /// Sign of artificial column `j` (`±e_j`).
    art_sign: Vec<f64>,
    basis: Vec<usize>,
    in_basis: Vec<bool>,
    binv: Vec<f64>,
    y: Vec<f64>,
    /// Devex pricing weights, one per row.
    weights: Vec<f64>,
    pivots: usize,
    since_refactor: usize,
    degenerate_run: usize,
    opts: SolverOptions,
    max_pivots: usize,
}

impl DualSimplex {
    fn new(lp: &LinearProgram, opts: SolverOptions) -> Self {
        let n = lp.n_vars();
        let m = lp.n_rows();
        let (row_scale, col_scale) = scale_factors(lp);
        let mut rows = Rows {
            n,
            start: vec![0],
            index: Vec::new(),
            value: Vec::new(),
        };
        for i in 0..m {
            for (j, v) in lp.row(i).iter().enumerate() {
                if *v != 0.0 {
                    rows.index.push(j);
                    rows.value.push(v * row_scale[i] * col_scale[j]);
                }
            }
            rows.start.push(rows.index.len());
        }
        let bounds = (0..m).map(|i| lp.bounds[i] * row_scale[i]).collect();
        let objective: Vec<f64> = lp.objective.iter().zip(&col_scale).map(|(c, s)| c * s).collect();
        let max_pivots = opts.max_pivots.unwrap_or(50 * (n + m) + 1000);
        let opts = SolverOptions {
            refactor_every: opts.refactor_every.max(n),
            ..opts
        };
        let mut state = DualSimplex {
            n,
            m,
            rows,
            bounds,
            objective,
            col_scale,
            art_sign: vec![1.0; n],
            basis: Vec::new(),
            in_basis: vec![false; m + n],
            binv: vec![0.0; n * n],
            y: vec![0.0; n],
            weights: vec![1.0; m],
            pivots: 0,
            since_refactor: 0,
            degenerate_run: 0,
            opts,
            max_pivots,
        };
        state.reset_to_artificials();
        state
    }

    fn reset_to_artificials(&mut self) {
        let n = self.n;
        self.art_sign = self
            .objective
            .iter()
            .map(|c| if *c < 0.0 { -1.0 } else { 1.0 })
            .collect();
        self.binv = vec![0.0; n * n];
        for j in 0..n {
            self.binv[j * n + j] = self.art_sign[j];
        }
        self.y = self.objective.iter().map(|c| c.abs()).collect();
        self.in_basis = vec![false; self.m + n];
        for j in 0..n {
            self.in_basis[self.m + j] = true;
        }
        self.basis = (self.m..self.m + n).collect();
        self.since_refactor = 0;
    }

    /// Install a caller-supplied basis; true if it is nonsingular and dual
    /// feasible.
    fn try_basis(&mut self, hint: &[usize]) -> bool {
        if hint.len() != self.n || hint.iter().any(|&r| r >= self.m) {
            return false;
        }
        let mut seen = vec![false; self.m + self.n];
        for &r in hint {
            if seen[r] {
                return false;
            }
            seen[r] = true;
        }
        self.basis = hint.to_vec();
        self.in_basis = seen;
        if !self.refactor() {
            return false;
        }
        let tol = self.opts.tol;
        if self.y.iter().any(|v| *v < -tol) {
            return false;
        }
        self.y.iter_mut().for_each(|v| *v = v.max(0.0));
        true
    }

    fn is_artificial(&self, col: usize) -> bool {
        col >= self.m
    }

    fn cost(&self, col: usize, phase: Phase) -> f64 {
        match (phase, self.is_artificial(col)) {
            (Phase::One, true) => 1.0,
            (Phase::One, false) => 0.0,
            (Phase::Two, true) => 0.0,
            (Phase::Two, false) => self.bounds[col],
        }
    }

    /// Dense copy of dual column `col`.
    fn column(&self, col: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        if self.is_artificial(col) {
            let j = col - self.m;
            out[j] = self.art_sign[j];
        } else {
            for (j, v) in self.rows.entries(col) {
                out[j] = v;
            }
        }
        out
    }

    /// `B⁻¹ a_col`.
    fn ftran(&self, col: usize) -> Vec<f64> {
        let n = self.n;
        if self.is_artificial(col) {
            let j = col - self.m;
            let s = self.art_sign[j];
            return (0..n).map(|i| self.binv[i * n + j] * s).collect();
        }
        if self.rows.len(col) * 4 < n {
            let mut u = vec![0.0; n];
            for (j, v) in self.rows.entries(col) {
                for (i, ui) in u.iter_mut().enumerate() {
                    *ui += self.binv[i * n + j] * v;
                }
            }
            return u;
        }
        let dense = self.column(col);
        self.binv.chunks_exact(n).map(|row| dot(row, &dense)).collect()
    }

    /// Multipliers `π` with `πᵀ = c_Bᵀ B⁻¹`.
    fn multipliers(&self, phase: Phase) -> Vec<f64> {
        let n = self.n;
        let mut pi = vec![0.0; n];
        for i in 0..n {
            let cb = self.cost(self.basis[i], phase);
            if cb != 0.0 {
                let row = &self.binv[i * n..(i + 1) * n];
                for (p, r) in pi.iter_mut().zip(row) {
                    *p += cb * r;
                }
            }
        }
        pi
    }

    fn reduced_cost(&self, col: usize, pi: &[f64], phase: Phase) -> f64 {
        let dot_pi = self.rows.dot(col, pi);
        self.cost(col, phase) - dot_pi
    }

    /// Choose the entering column. `devex` carries the pivot row of `B⁻¹`
    /// and the entering weight of the previous pivot; the reference weights
    /// are refreshed in the same pass over the rows.
    fn price(
        &mut self,
        pi: &[f64],
        phase: Phase,
        bland: bool,
        devex: Option<(&[f64], f64)>,
    ) -> Option<(usize, f64)> {
        let tol = self.opts.tol * 0.01;
        let mut best: Option<(usize, f64, f64)> = None;
        for col in 0..self.m {
            if self.in_basis[col] || self.rows.is_empty(col) {
                continue;
            }
            let d = match devex {
                Some((r, wq)) => {
                    let (dot_pi, alpha) = self.rows.dot2(col, pi, r);
                    let w = alpha * alpha * wq;
                    if w > self.weights[col] {
                        self.weights[col] = w;
                    }
                    self.cost(col, phase) - dot_pi
                }
                None => self.reduced_cost(col, pi, phase),
            };
            if d < -tol {
                if bland {
                    return Some((col, d));
                }
                let score = d * d / self.weights[col];
                if best.is_none_or(|(_, _, bs)| score > bs) {
                    best = Some((col, d, score));
                }
            }
        }
        best.map(|(c, d, _)| (c, d))
    }

    fn ratio_test(&self, u: &[f64], bland: bool) -> Option<usize> {
        let candidates = || u.iter().enumerate().filter(|(_, ui)| **ui > PIVOT_TOL);
        if bland {
            let mut best: Option<(usize, f64)> = None;
            for (i, &ui) in candidates() {
                let ratio = self.y[i].max(0.0) / ui;
                let better = match best {
                    None => true,
                    Some((bi, br)) => {
                        ratio < br - 1e-12 * (1.0 + br)
                            || (ratio <= br + 1e-12 * (1.0 + br) && self.basis[i] < self.basis[bi])
                    }
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            return best.map(|(i, _)| i);
        }
        // Harris: relax the bound slightly, then take the largest pivot
        // among rows whose exact ratio fits under the relaxed one.
        let theta = candidates()
            .map(|(i, &ui)| (self.y[i].max(0.0) + HARRIS_DELTA) / ui)
            .fold(f64::INFINITY, f64::min);
        if !theta.is_finite() {
            return None;
        }
        let mut best: Option<usize> = None;
        for (i, &ui) in candidates() {
            if self.y[i].max(0.0) / ui <= theta && best.is_none_or(|b| ui > u[b]) {
                best = Some(i);
            }
        }
        best
    }

    fn pivot(&mut self, leave: usize, enter: usize, u: &[f64]) {
        let n = self.n;
        let up = u[leave];
        let step = self.y[leave].max(0.0) / up;
        for i in 0..n {
            if i != leave {
                self.y[i] = (self.y[i] - step * u[i]).max(0.0);
            }
        }
        self.y[leave] = step;
        self.replace_column(leave, enter, u);
        self.degenerate_run = if step <= 1e-12 { self.degenerate_run + 1 } else { 0 };
        self.pivots += 1;
        self.since_refactor += 1;
        if self.since_refactor >= self.opts.refactor_every {
            self.refactor();
        }
    }

    /// Eta update of `B⁻¹` for basis position `leave` taking column `enter`.
    fn replace_column(&mut self, leave: usize, enter: usize, u: &[f64]) {
        let n = self.n;
        let up = u[leave];
        let prow: Vec<f64> = self.binv[leave * n..(leave + 1) * n].iter().map(|v| v / up).collect();
        for i in 0..n {
            if i == leave || u[i] == 0.0 {
                continue;
            }
            let f = u[i];
            let row = &mut self.binv[i * n..(i + 1) * n];
            for (r, p) in row.iter_mut().zip(&prow) {
                *r -= f * p;
            }
        }
        self.binv[leave * n..(leave + 1) * n].copy_from_slice(&prow);
        self.in_basis[self.basis[leave]] = false;
        self.in_basis[enter] = true;
        self.basis[leave] = enter;
    }

    /// Recompute `B⁻¹` and the basic solution from scratch.
    fn refactor(&mut self) -> bool {
        let n = self.n;
        let mut b = vec![0.0; n * n];
        for (i, &col) in self.basis.iter().enumerate() {
            for (j, v) in self.column(col).into_iter().enumerate() {
                b[j * n + i] = v;
            }
        }
        let Some(inv) = invert(&b, n) else {
            return false;
        };
        self.binv = inv;
        for i in 0..n {
            let row = &self.binv[i * n..(i + 1) * n];
            let v = dot(row, &self.objective);
            self.y[i] = if v < 0.0 && v > -1e-9 { 0.0 } else { v };
        }
        self.since_refactor = 0;
        true
    }

    fn iterate(&mut self, phase: Phase) -> LpStatus {
        let n = self.n;
        let mut retried = false;
        let mut pi: Option<Vec<f64>> = None;
        let mut devex: Option<(Vec<f64>, f64)> = None;
        loop {
            if self.pivots >= self.max_pivots {
                return LpStatus::NumericalFailure;
            }
            let bland = self.degenerate_run >= self.opts.degenerate_limit;
            let fresh = pi.is_none();
            let current = pi.take().unwrap_or_else(|| self.multipliers(phase));
            let pending = devex.take();
            let choice = self.price(&current, phase, bland, pending.as_ref().map(|(r, w)| (r.as_slice(), *w)));
            let Some((enter, d)) = choice else {
                if fresh {
                    return LpStatus::Optimal;
                }
                // Confirm optimality with multipliers computed from scratch.
                continue;
            };
            let u = self.ftran(enter);
            let Some(leave) = self.ratio_test(&u, bland) else {
                if phase == Phase::One || !retried {
                    // Phase 1 is bounded, so a missing pivot row means B⁻¹
                    // has drifted. Refactor and try once more.
                    if retried || !self.refactor() {
                        return LpStatus::NumericalFailure;
                    }
                    retried = true;
                    continue;
                }
                // The dual is unbounded below, so the primal is infeasible.
                return LpStatus::Infeasible;
            };
            retried = false;
            let left = self.basis[leave];
            let wq = self.weights[enter];
            self.pivot(leave, enter, &u);
            let row = self.binv[leave * n..(leave + 1) * n].to_vec();
            if left < self.m {
                self.weights[left] = (wq / (u[leave] * u[leave])).max(1.0);
            }
            if self.since_refactor != 0 {
                // π moves along the new row of B⁻¹ belonging to the entering column.
                let mut next = current;
                for (pj, r) in next.iter_mut().zip(&row) {
                    *pj += d * r;
                }
                pi = Some(next);
            }
            if !bland {
                devex = Some((row, wq));
            }
        }
    }

    /// Swap artificials still basic (at zero) for real columns.
    fn drive_out_artificials(&mut self) {
        let n = self.n;
        for i in 0..n {
            if !self.is_artificial(self.basis[i]) {
                continue;
            }
            let candidate = (0..self.m).find(|&col| {
                if self.in_basis[col] || self.rows.is_empty(col) {
                    return false;
                }
                let ui = self.rows.dot(col, &self.binv[i * n..(i + 1) * n]);
                ui.abs() > 1e-7
            });
            if let Some(col) = candidate {
                // y_i is zero, so the pivot is degenerate and the sign of
                // u_i does not matter.
                let u = self.ftran(col);
                self.y[i] = 0.0;
                self.replace_column(i, col, &u);
                self.pivots += 1;
            }
        }
    }

    fn run(&mut self, hint: Option<&[usize]>) -> LpStatus {
        if let Some(hint) = hint {
            if self.try_basis(hint) {
                return self.iterate(Phase::Two);
            }
            self.reset_to_artificials();
        }
        match self.iterate(Phase::One) {
            LpStatus::Optimal => {}
            LpStatus::Infeasible => return LpStatus::NumericalFailure,
            other => return other,
        }
        self.refactor();
        let infeasibility: f64 = self
            .basis
            .iter()
            .zip(&self.y)
            .filter(|(c, _)| self.is_artificial(**c))
            .map(|(_, y)| *y)
            .sum();
        let scale = self.objective.iter().fold(1.0f64, |a, c| a.max(c.abs()));
        if infeasibility > 1e-9 * scale {
            // No dual feasible point: the primal objective is unbounded.
            return LpStatus::Unbounded;
        }
        self.drive_out_artificials();
        if !self.refactor() {
            return LpStatus::NumericalFailure;
        }
        self.degenerate_run = 0;
        self.iterate(Phase::Two)
    }

    fn unscale(&self, xs: &[f64]) -> Vec<f64> {
        xs.iter().zip(&self.col_scale).map(|(x, s)| x * s).collect()
    }

    fn finish(&mut self, lp: &LinearProgram, mut status: LpStatus) -> LpSolution {
        let n = self.n;
        let active: Vec<usize> = self
            .basis
            .iter()
            .copied()
            .filter(|&c| !self.is_artificial(c))
            .collect();
        if status == LpStatus::Optimal && self.refactor() {
            // A basis whose recomputed dual values are clearly negative is
            // not a certificate of optimality.
            let top = self.y.iter().fold(1.0f64, |a, v| a.max(v.abs()));
            if self.y.iter().any(|v| *v < -1e-7 * top) {
                status = LpStatus::NumericalFailure;
            }
        }
        let from_multipliers = self.unscale(&self.multipliers(Phase::Two));
        let mut x = if status == LpStatus::Optimal && active.len() == n {
            // Re-solve the active set directly for a clean vertex.
            let mut a = vec![0.0; n * n];
            let mut rhs = vec![0.0; n];
            for (k, &r) in active.iter().enumerate() {
                for (j, v) in self.rows.entries(r) {
                    a[k * n + j] = v;
                }
                rhs[k] = self.bounds[r];
            }
            lu_solve(&a, &rhs, n)
                .map(|xs| self.unscale(&xs))
                .unwrap_or_else(|| from_multipliers.clone())
        } else {
            from_multipliers.clone()
        };
        if x.iter().any(|v| !v.is_finite()) {
            x = vec![0.0; n];
            status = LpStatus::NumericalFailure;
        }
        let mut residual = lp.feasibility_residual(&x);
        if status == LpStatus::Optimal {
            let scale = 1.0 + x.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            if residual > self.opts.tol * scale {
                let alt_res = lp.feasibility_residual(&from_multipliers);
                if alt_res < residual {
                    x = from_multipliers;
                    residual = alt_res;
                }
                if residual > self.opts.tol * scale {
                    status = LpStatus::NumericalFailure;
                }
            }
        }
        LpSolution {
            objective_value: lp.objective_value(&x),
            x,
            status,
            iterations: self.pivots,
            residual,
            active_rows: active,
        }
    }
}

/// Gauss-Jordan inverse with partial pivoting of a row-major `n x n` matrix.
fn invert(a: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut m = a.to_vec();
    let mut inv = vec![0.0; n * n];
    for i in 0..n {
        inv[i * n + i] = 1.0;
    }
    for col in 0..n {
        let p = (col..n).max_by(|&r, &s| m[r * n + col].abs().total_cmp(&m[s * n + col].abs()))?;
        if m[p * n + col].abs() < 1e-14 {
            return None;
        }
        if p != col {
            for k in 0..n {
                m.swap(p * n + k, col * n + k);
                inv.swap(p * n + k, col * n + k);
            }
        }
        let d = m[col * n + col];
        for k in 0..n {
            m[col * n + k] /= d;
            inv[col * n + k] /= d;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = m[r * n + col];
            if f == 0.0 {
                continue;
            }
            for k in 0..n {
                m[r * n + k] -= f * m[col * n + k];
                inv[r * n + k] -= f * inv[col * n + k];
            }
        }
    }
    Some(inv)
}

/// Solve `A x = b` by LU with partial pivoting.
fn lu_solve(a: &[f64], b: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut m = a.to_vec();
    let mut x = b.to_vec();
    for col in 0..n {
        let p = (col..n).max_by(|&r, &s| m[r * n + col].abs().total_cmp(&m[s * n + col].abs()))?;
        if m[p * n + col].abs() < 1e-14 {
            return None;
        }
        if p != col {
            for k in 0..n {
                m.swap(p * n + k, col * n + k);
            }
            x.swap(p, col);
        }
        let d = m[col * n + col];
        for r in col + 1..n {
            let f = m[r * n + col] / d;
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                m[r * n + k] -= f * m[col * n + k];
            }
            x[r] -= f * x[col];
        }
    }
    for col in (0..n).rev() {
        let s: f64 = (col + 1..n).map(|k| m[col * n + k] * x[k]).sum();
        x[col] = (x[col] - s) / m[col * n + col];
    }
    Some(x)
}
