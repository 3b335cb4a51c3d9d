//! Max-min wide-beam synthesis by penalised minorization-maximization.
//!
//! Each iteration replaces `|h̄(θ)ᴴw|² + λ‖w‖²` at every grid angle by its
//! tangent plane at the current iterate and solves the resulting epigraph LP
//! over the per-element feasible polygon. The penalty pushes the relaxed
//! solution towards polygon vertices, which for the discrete modes are the
//! alphabet points themselves.
//!
//! The penalty is given relative to the per-element channel power
//! `κ = |αβ|²/N²`: the objective term is `λ κ ‖w‖²`. That keeps a given `λ`
//! meaning the same thing whatever the link gains, and the stopping threshold
//! is likewise scaled by `|αβ|²`.

use std::io::Write;

use log::{debug, warn};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::array::{beamwidth, inner, to_db, Angle, ArrayGeometry, ArrayKind, Channel, ChannelGains};
use crate::error::{Error, Result};
use crate::lp::{build_subproblem, crash_basis, solve_from, LpStatus, SolverOptions, SurrogateRow};
use crate::phase::{project_cmc, ConstraintMode, FeasibleRegion, PhaseAlphabet};
use crate::seed::derive_seed;

pub const DEFAULT_LAMBDAS: [f64; 5] = [0.0, 0.1, 1.0, 10.0, 100.0];
pub const DEFAULT_EPSILON: f64 = 1e-4;
pub const DEFAULT_MAX_ITERS: usize = 200;
/// Upper bound on the default linear-array grid step, in degrees.
pub const MAX_DEFAULT_STEP: f64 = 0.1;
/// Drop (dB) whose main-lobe width bounds the grid step.
pub const GRID_RULE_DB: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub el: [f64; 2],
    pub az: [f64; 2],
}

/// Angular region over which the minimum beam power is maximised.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum RegionOfInterest {
    Linear { intervals: Vec<[f64; 2]> },
    Planar { rects: Vec<Rect> },
}

fn check_range(lo: f64, hi: f64) -> Result<()> {
    if !lo.is_finite() || !hi.is_finite() {
        return Err(Error::invalid("roi", "bounds must be finite"));
    }
    if lo > hi {
        return Err(Error::invalid("roi", "min exceeds max"));
    }
    if lo < -90.0 || hi > 90.0 {
        return Err(Error::invalid("roi", format!("[{lo}, {hi}] leaves [-90, 90]")));
    }
    Ok(())
}

impl RegionOfInterest {
    /// Union of intervals; overlapping or touching ones are merged.
    pub fn linear(intervals: &[(f64, f64)]) -> Result<Self> {
        if intervals.is_empty() {
            return Err(Error::invalid("roi", "empty region"));
        }
        for &(lo, hi) in intervals {
            check_range(lo, hi)?;
        }
        let mut sorted: Vec<[f64; 2]> = intervals.iter().map(|&(lo, hi)| [lo, hi]).collect();
        sorted.sort_by(|a, b| a[0].total_cmp(&b[0]));
        let mut merged: Vec<[f64; 2]> = Vec::with_capacity(sorted.len());
        for iv in sorted {
            match merged.last_mut() {
                Some(last) if iv[0] <= last[1] => last[1] = last[1].max(iv[1]),
                _ => merged.push(iv),
            }
        }
        Ok(RegionOfInterest::Linear { intervals: merged })
    }

    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        Self::linear(&[(lo, hi)])
    }

    /// Rectangles in (elevation, azimuth); they must not overlap.
    pub fn planar(rects: &[Rect]) -> Result<Self> {
        if rects.is_empty() {
            return Err(Error::invalid("roi", "empty region"));
        }
        for r in rects {
            check_range(r.el[0], r.el[1])?;
            check_range(r.az[0], r.az[1])?;
        }
        for (i, a) in rects.iter().enumerate() {
            for b in &rects[i + 1..] {
                let apart = |x: [f64; 2], y: [f64; 2]| x[1] < y[0] || y[1] < x[0];
                if !apart(a.el, b.el) && !apart(a.az, b.az) {
                    return Err(Error::invalid("roi", "planar rectangles overlap"));
                }
            }
        }
        Ok(RegionOfInterest::Planar { rects: rects.to_vec() })
    }

    /// Parses `lo:hi[,lo:hi...]` in degrees.
    pub fn parse(text: &str) -> Result<Self> {
        let mut intervals = Vec::new();
        for part in text.split(',') {
            let (lo, hi) = part
                .split_once(':')
                .ok_or_else(|| Error::invalid("roi", format!("expected lo:hi, got '{part}'")))?;
            let num = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::invalid("roi", format!("'{s}' is not a number")))
            };
            intervals.push((num(lo)?, num(hi)?));
        }
        Self::linear(&intervals)
    }

    pub fn is_planar(&self) -> bool {
        matches!(self, RegionOfInterest::Planar { .. })
    }

    pub fn contains(&self, angle: Angle) -> bool {
        let inside = |r: &[f64; 2], x: f64| r[0] <= x && x <= r[1];
        match (self, angle) {
            (RegionOfInterest::Linear { intervals }, Angle::Linear(t)) => {
                intervals.iter().any(|iv| inside(iv, t))
            }
            (RegionOfInterest::Planar { rects }, Angle::Planar { el, az }) => {
                rects.iter().any(|r| inside(&r.el, el) && inside(&r.az, az))
            }
            _ => false,
        }
    }

    fn check_geometry(&self, geom: &ArrayGeometry) -> Result<()> {
        if self.is_planar() != geom.is_planar() {
            return Err(Error::invalid(
                "roi",
                "planar arrays need a planar region and linear arrays a linear one",
            ));
        }
        Ok(())
    }
}

/// Uniform points from `lo` to `hi` inclusive, spaced at most `step`.
fn axis_points(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    if hi <= lo {
        return vec![lo];
    }
    let count = ((hi - lo) / step - 1e-9).ceil().max(1.0) as usize;
    (0..=count)
        .map(|i| if i == count { hi } else { lo + (hi - lo) * i as f64 / count as f64 })
        .collect()
}

/// Grid over the region with the same step on every axis.
pub fn make_grid(roi: &RegionOfInterest, step: f64) -> Result<Vec<Angle>> {
    make_grid_steps(roi, step, step)
}

/// Grid with separate elevation and azimuth steps (the elevation step is
/// ignored for linear regions).
pub fn make_grid_steps(roi: &RegionOfInterest, el_step: f64, az_step: f64) -> Result<Vec<Angle>> {
    for s in [el_step, az_step] {
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::invalid("grid_step", format!("must be positive, got {s}")));
        }
    }
    Ok(match roi {
        RegionOfInterest::Linear { intervals } => intervals
            .iter()
            .flat_map(|iv| axis_points(iv[0], iv[1], az_step))
            .map(Angle::Linear)
            .collect(),
        RegionOfInterest::Planar { rects } => rects
            .iter()
            .flat_map(|r| {
                let az = axis_points(r.az[0], r.az[1], az_step);
                axis_points(r.el[0], r.el[1], el_step)
                    .into_iter()
                    .flat_map(move |el| az.clone().into_iter().map(move |az| Angle::Planar { el, az }))
            })
            .collect(),
    })
}

fn axis_beamwidth(count: usize) -> Result<Option<f64>> {
    if count < 2 {
        return Ok(None);
    }
    beamwidth(count, GRID_RULE_DB).map(Some)
}

/// Default `(elevation, azimuth)` grid steps: the −0.5 dB main-lobe width
/// (capped at 0.1° for linear arrays), per axis for planar arrays.
pub fn default_grid_steps(geom: &ArrayGeometry) -> Result<(f64, f64)> {
    Ok(match geom.kind {
        ArrayKind::Ula => {
            let s = axis_beamwidth(geom.n_elements)?
                .map_or(MAX_DEFAULT_STEP, |w| w.min(MAX_DEFAULT_STEP));
            (s, s)
        }
        ArrayKind::Upa { rows, cols } => (
            axis_beamwidth(rows)?.unwrap_or(1.0),
            axis_beamwidth(cols)?.unwrap_or(1.0),
        ),
    })
}

/// How slots combine in the multi-slot objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SlotCombining {
    /// `|f̄ᴴ v|²` with the channel tiled across slots.
    Coherent,
    /// `Σ_t |h̄ᴴ w_t|²`.
    Incoherent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthesisProblem {
    pub geometry: ArrayGeometry,
    pub gains: ChannelGains,
    pub roi: RegionOfInterest,
    /// Grid step in degrees (azimuth step for planar arrays).
    pub grid_step: f64,
    /// Elevation grid step for planar arrays.
    pub grid_step_el: f64,
    /// Step of the fine grid used to report powers.
    pub eval_step: f64,
    pub mode: ConstraintMode,
    pub levels: usize,
    /// Penalty weight in units of `|αβ|²/N²`.
    pub penalty: f64,
    pub slots: usize,
    pub combining: SlotCombining,
    pub epsilon: f64,
    pub max_iters: usize,
    pub seed: u64,
    /// Initial weights; random alphabet points when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<Vec<Complex64>>,
}

impl SynthesisProblem {
    /// Unit gains, discrete L = 4, default grid, single slot, λ = 0.
    pub fn new(geometry: ArrayGeometry, roi: RegionOfInterest) -> Result<Self> {
        geometry.validate()?;
        let (el, az) = default_grid_steps(&geometry)?;
        let problem = SynthesisProblem {
            gains: ChannelGains::unit(&geometry),
            geometry,
            roi,
            grid_step: az,
            grid_step_el: el,
            eval_step: az / 10.0,
            mode: ConstraintMode::Discrete,
            levels: 4,
            penalty: 0.0,
            slots: 1,
            combining: SlotCombining::Coherent,
            epsilon: DEFAULT_EPSILON,
            max_iters: DEFAULT_MAX_ITERS,
            seed: 0,
            start: None,
        };
        problem.validate()?;
        Ok(problem)
    }

    /// Sets the grid step (both axes) and the evaluation step to a tenth of it.
    pub fn with_grid_step(mut self, step: f64) -> Self {
        self.grid_step = step;
        self.grid_step_el = step;
        self.eval_step = step / 10.0;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.geometry.validate()?;
        self.gains.validate()?;
        self.roi.check_geometry(&self.geometry)?;
        for (field, v) in [
            ("grid_step", self.grid_step),
            ("grid_step_el", self.grid_step_el),
            ("eval_step", self.eval_step),
            ("epsilon", self.epsilon),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::invalid(field, format!("must be positive, got {v}")));
            }
        }
        if self.eval_step > self.grid_step {
            return Err(Error::invalid("eval_step", "must not exceed grid_step"));
        }
        if !(self.penalty >= 0.0) || !self.penalty.is_finite() {
            return Err(Error::invalid("lambda", format!("must be non-negative, got {}", self.penalty)));
        }
        if self.slots == 0 {
            return Err(Error::invalid("slots", "need at least one slot"));
        }
        if self.max_iters == 0 {
            return Err(Error::invalid("max_iters", "need at least one iteration"));
        }
        PhaseAlphabet::new(self.levels)?;
        if let Some(start) = &self.start {
            if start.len() != self.n_weights() {
                return Err(Error::DimensionMismatch {
                    expected: self.n_weights(),
                    actual: start.len(),
                });
            }
        }
        Ok(())
    }

    pub fn alphabet(&self) -> Result<PhaseAlphabet> {
        PhaseAlphabet::new(self.levels)
    }

    pub fn region(&self) -> Result<FeasibleRegion> {
        FeasibleRegion::for_mode(self.mode, &self.alphabet()?)
    }

    pub fn channel(&self) -> Channel {
        Channel {
            geometry: self.geometry,
            gains: self.gains,
        }
    }

    /// Length of the optimisation vector (`N` times the slot count).
    pub fn n_weights(&self) -> usize {
        self.geometry.n_elements * self.slots
    }

    /// Absolute penalty weight `λ |αβ|²/N²`.
    pub fn lambda_abs(&self) -> f64 {
        self.penalty * self.channel().element_power()
    }

    pub fn grid(&self) -> Result<Vec<Angle>> {
        make_grid_steps(&self.roi, self.grid_step_el, self.grid_step)
    }

    pub fn eval_grid(&self) -> Result<Vec<Angle>> {
        let ratio = self.eval_step / self.grid_step;
        make_grid_steps(&self.roi, self.grid_step_el * ratio, self.eval_step)
    }

    /// Messages for grid steps coarser than the main-lobe rule.
    pub fn grid_warnings(&self) -> Result<Vec<String>> {
        let mut out = Vec::new();
        let mut check = |axis: &str, count: usize, step: f64| -> Result<()> {
            if let Some(width) = axis_beamwidth(count)? {
                if step > width {
                    out.push(format!(
                        "{axis} grid step {step}° exceeds the {GRID_RULE_DB} dB beamwidth {width:.4}° of {count} elements; the beam may dip between grid points"
                    ));
                }
            }
            Ok(())
        };
        match self.geometry.kind {
            ArrayKind::Ula => check("angle", self.geometry.n_elements, self.grid_step)?,
            ArrayKind::Upa { rows, cols } => {
                check("elevation", rows, self.grid_step_el)?;
                check("azimuth", cols, self.grid_step)?;
            }
        }
        Ok(out)
    }

    /// Per-angle quadratic terms `c_k` with power `Σ_k |c_kᴴ v|²`.
    fn terms(&self, angles: &[Angle]) -> Result<Vec<Vec<Vec<Complex64>>>> {
        let channel = self.channel();
        let n = self.geometry.n_elements;
        angles
            .iter()
            .map(|&a| {
                let h = channel.hbar(a)?;
                Ok(match (self.slots, self.combining) {
                    (1, _) => vec![h],
                    (t, SlotCombining::Coherent) => vec![h.iter().copied().cycle().take(n * t).collect()],
                    (t, SlotCombining::Incoherent) => (0..t)
                        .map(|slot| {
                            let mut c = vec![Complex64::new(0.0, 0.0); n * t];
                            c[slot * n..(slot + 1) * n].copy_from_slice(&h);
                            c
                        })
                        .collect(),
                })
            })
            .collect()
    }
}

fn power_of(terms: &[Vec<Complex64>], w: &[Complex64]) -> f64 {
    terms.iter().map(|c| inner(c, w).norm_sqr()).sum()
}

fn norm_sqr(w: &[Complex64]) -> f64 {
    w.iter().map(|x| x.norm_sqr()).sum()
}

/// `min_θ |h̄(θ)ᴴ w|² + λ ‖w‖²` over the supplied channel vectors.
pub fn penalized_value(w: &[Complex64], hbar_per_angle: &[Vec<Complex64>], lambda: f64) -> Result<f64> {
    if hbar_per_angle.is_empty() {
        return Err(Error::invalid("grid", "no angles"));
    }
    let penalty = lambda * norm_sqr(w);
    hbar_per_angle
        .iter()
        .map(|h| {
            if h.len() != w.len() {
                return Err(Error::DimensionMismatch {
                    expected: w.len(),
                    actual: h.len(),
                });
            }
            Ok(inner(h, w).norm_sqr() + penalty)
        })
        .try_fold(f64::INFINITY, |acc, v| v.map(|v| acc.min(v)))
}

fn penalized_terms(terms: &[Vec<Vec<Complex64>>], w: &[Complex64], lambda: f64) -> f64 {
    let penalty = lambda * norm_sqr(w);
    terms
        .iter()
        .map(|t| power_of(t, w) + penalty)
        .fold(f64::INFINITY, f64::min)
}

/// Tangent-plane minorant of `Σ_k |c_kᴴ w|² + λ‖w‖²` at `w_prev`.
///
/// The gradient is `G = 2 Σ_k (c_kᴴ w_prev) c_k + 2 λ w_prev` and the
/// constant `−Σ_k |c_kᴴ w_prev|² − λ ‖w_prev‖²`, so that the row evaluates to
/// the true value at `w_prev`.
pub fn surrogate(terms: &[Vec<Complex64>], w_prev: &[Complex64], lambda: f64) -> SurrogateRow {
    let mut gradient: Vec<Complex64> = w_prev.iter().map(|w| 2.0 * lambda * w).collect();
    let mut constant = -lambda * norm_sqr(w_prev);
    for c in terms {
        let z = inner(c, w_prev);
        constant -= z.norm_sqr();
        for (g, ci) in gradient.iter_mut().zip(c) {
            *g += 2.0 * z * ci;
        }
    }
    SurrogateRow { constant, gradient }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthesisResult {
    pub mode: ConstraintMode,
    /// Relative penalty weight of the run.
    pub penalty: f64,
    /// Relaxed solution in the MM feasible region.
    pub weights: Vec<Complex64>,
    pub weights_projected: Vec<Complex64>,
    /// Alphabet index of each projected entry (discrete projections only).
    pub projected_indices: Option<Vec<usize>>,
    /// Penalised objective at the start and after each accepted iteration.
    pub t_trace: Vec<f64>,
    /// Minimum power over the evaluation grid, penalty excluded.
    pub min_power_relaxed: f64,
    pub min_power_projected: f64,
    pub iterations: usize,
    pub converged: bool,
    pub lp_pivots: usize,
    pub grid_points: usize,
    pub warnings: Vec<String>,
}

impl SynthesisResult {
    pub fn min_db_relaxed(&self) -> f64 {
        to_db(self.min_power_relaxed)
    }

    pub fn min_db_projected(&self) -> f64 {
        to_db(self.min_power_projected)
    }

    /// CSV with `# weights`, `# t_trace` and (optionally) `# flatness`
    /// sections.
    pub fn write_csv<W: Write>(&self, mut out: W, flatness: Option<&Flatness>) -> Result<()> {
        writeln!(out, "# weights")?;
        writeln!(out, "index,re,im,projected_phase_index")?;
        for (i, w) in self.weights.iter().enumerate() {
            let idx = self
                .projected_indices
                .as_ref()
                .map_or(String::new(), |v| v[i].to_string());
            writeln!(out, "{i},{:?},{:?},{idx}", w.re, w.im)?;
        }
        writeln!(out, "# t_trace")?;
        writeln!(out, "iteration,value")?;
        for (k, t) in self.t_trace.iter().enumerate() {
            writeln!(out, "{k},{t:?}")?;
        }
        if let Some(f) = flatness {
            writeln!(out, "# flatness")?;
            writeln!(out, "min_db,max_db,ripple_db")?;
            writeln!(out, "{:?},{:?},{:?}", f.min_db, f.max_db, f.ripple_db)?;
        }
        Ok(())
    }
}

fn random_start(problem: &SynthesisProblem, alphabet: &PhaseAlphabet, region: &FeasibleRegion) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(problem.seed);
    // Points on the hull edges rather than on the alphabet itself: a start
    // drawn from a finite set can sit exactly on a pattern null, where the
    // minorizer has zero slope and MM cannot leave.
    let levels = alphabet.levels();
    (0..problem.n_weights())
        .map(|_| {
            let l = rng.random_range(0..levels);
            let t: f64 = rng.random();
            let w = alphabet.value(l) * (1.0 - t) + alphabet.value((l + 1) % levels) * t;
            pull_inside(w, region)
        })
        .collect()
}

const PULL_TOL: f64 = 1e-12;

/// Shrinks `w` towards the origin until it satisfies every half-plane.
fn pull_inside(w: Complex64, region: &FeasibleRegion) -> Complex64 {
    let scale = region
        .halfplanes
        .iter()
        .filter_map(|h| {
            let reach = (h.normal.conj() * w).re;
            // Roundoff-sized excess is ignored: against the zero-offset
            // planes of the L = 2 segment it would scale `w` to zero.
            (reach > h.offset + PULL_TOL).then(|| h.offset / reach)
        })
        .fold(1.0f64, f64::min);
    w * scale
}

/// Elementwise projection for the mode's output stage.
fn project(mode: ConstraintMode, w: &[Complex64], alphabet: &PhaseAlphabet) -> (Vec<Complex64>, Option<Vec<usize>>) {
    match mode {
        ConstraintMode::Discrete => {
            let idx = project_indices(w, alphabet);
            (idx.iter().map(|&i| alphabet.value(i)).collect(), Some(idx))
        }
        // A zero entry has no phase; it is sent to phase 0.
        ConstraintMode::Cmc => (
            w.iter().map(|&x| project_cmc(x).unwrap_or(Complex64::new(1.0, 0.0))).collect(),
            None,
        ),
        ConstraintMode::Hull | ConstraintMode::Power => (w.to_vec(), None),
    }
}

/// Nearest alphabet index per entry; zero entries take index 0.
fn project_indices(w: &[Complex64], alphabet: &PhaseAlphabet) -> Vec<usize> {
    w.iter().map(|&x| alphabet.nearest_index(x).unwrap_or(0)).collect()
}

fn unpack(x: &[f64], n: usize) -> Vec<Complex64> {
    (0..n).map(|i| Complex64::new(x[2 * i], x[2 * i + 1])).collect()
}

/// One penalised MM run at a single λ.
pub fn mm_solve(problem: &SynthesisProblem) -> Result<SynthesisResult> {
    problem.validate()?;
    let mut warnings = problem.grid_warnings()?;
    for w in &warnings {
        warn!("{w}");
    }
    let grid = problem.grid()?;
    let terms = problem.terms(&grid)?;
    let alphabet = problem.alphabet()?;
    let region = problem.region()?;
    let lambda = problem.lambda_abs();
    let tol = problem.epsilon * problem.gains.coherent_power();
    let n = problem.n_weights();

    let mut w = match &problem.start {
        Some(s) => s.iter().map(|&x| pull_inside(x, &region)).collect(),
        None => random_start(problem, &alphabet, &region),
    };
    let mut t_prev = penalized_terms(&terms, &w, lambda);
    let mut t_trace = vec![t_prev];
    let mut converged = false;
    let mut iterations = 0;
    let mut lp_pivots = 0;

    for k in 1..=problem.max_iters {
        let rows: Vec<SurrogateRow> = terms.iter().map(|t| surrogate(t, &w, lambda)).collect();
        let lp = build_subproblem(&rows, &region, n)?;
        let hint = crash_basis(&rows, &region);
        let solution = solve_from(&lp, Some(&hint), SolverOptions::default())?;
        lp_pivots += solution.iterations;
        if solution.status != LpStatus::Optimal {
            return Err(Error::Lp {
                iteration: k,
                status: solution.status,
            });
        }
        let next = unpack(&solution.x, n);
        let t_next = penalized_terms(&terms, &next, lambda);
        iterations = k;
        if t_next < t_prev {
            // Only roundoff can make an MM step go backwards; stop at the
            // better point so the trace stays monotone.
            debug!("iteration {k}: step lowered the objective by {:e}, stopping", t_prev - t_next);
            converged = true;
            break;
        }
        let gain = t_next - t_prev;
        w = next;
        t_prev = t_next;
        t_trace.push(t_next);
        if gain < tol {
            converged = true;
            break;
        }
    }
    if !converged {
        let msg = format!("no convergence within {} iterations", problem.max_iters);
        warn!("{msg}");
        warnings.push(msg);
    }

    let (weights_projected, projected_indices) = project(problem.mode, &w, &alphabet);
    let eval_terms = problem.terms(&problem.eval_grid()?)?;
    let min_power = |v: &[Complex64]| penalized_terms(&eval_terms, v, 0.0);
    Ok(SynthesisResult {
        mode: problem.mode,
        penalty: problem.penalty,
        min_power_relaxed: min_power(&w),
        min_power_projected: min_power(&weights_projected),
        weights: w,
        weights_projected,
        projected_indices,
        t_trace,
        iterations,
        converged,
        lp_pivots,
        grid_points: grid.len(),
        warnings,
    })
}

/// Stages of a λ continuation; `best` indexes the stage with the highest
/// projected minimum power.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub stages: Vec<SynthesisResult>,
    pub best: usize,
    pub seed: u64,
}

impl SweepResult {
    pub fn best(&self) -> &SynthesisResult {
        &self.stages[self.best]
    }

    /// The stage run with the largest penalty.
    pub fn last(&self) -> &SynthesisResult {
        self.stages.last().expect("sweep has at least one stage")
    }
}

/// Runs `mm_solve` for each penalty in turn, each stage starting from the
/// previous stage's relaxed solution.
pub fn lambda_sweep(problem: &SynthesisProblem, lambdas: &[f64]) -> Result<SweepResult> {
    if lambdas.is_empty() {
        return Err(Error::invalid("lambda", "empty penalty sweep"));
    }
    let mut stages: Vec<SynthesisResult> = Vec::with_capacity(lambdas.len());
    let mut start = problem.start.clone();
    for &lambda in lambdas {
        let stage = SynthesisProblem {
            penalty: lambda,
            start: start.take(),
            ..problem.clone()
        };
        let result = mm_solve(&stage)?;
        start = Some(result.weights.clone());
        stages.push(result);
    }
    let best = best_index(stages.iter().map(|s| s.min_power_projected));
    Ok(SweepResult {
        stages,
        best,
        seed: problem.seed,
    })
}

fn best_index(values: impl Iterator<Item = f64>) -> usize {
    values
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, v)| if v > bv { (i, v) } else { (bi, bv) })
        .0
}

/// Seed of restart `r` for a problem seeded with `seed`; restart 0 keeps it.
pub fn restart_seed(seed: u64, r: usize) -> u64 {
    if r == 0 {
        seed
    } else {
        derive_seed(seed, 0x7265_7374, r as u64)
    }
}

/// Best of `restarts` independent λ sweeps from different random starts.
pub fn synthesize(problem: &SynthesisProblem, lambdas: &[f64], restarts: usize) -> Result<SweepResult> {
    let restarts = restarts.max(1);
    let sweeps: Vec<SweepResult> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let p = SynthesisProblem {
                seed: restart_seed(problem.seed, r),
                ..problem.clone()
            };
            lambda_sweep(&p, lambdas)
        })
        .collect::<Result<_>>()?;
    let best = best_index(sweeps.iter().map(|s| s.best().min_power_projected));
    Ok(sweeps.into_iter().nth(best).expect("at least one restart"))
}

/// The per-element power solution quantized elementwise to the alphabet.
///
/// Runs `mm_solve` in power mode with no penalty from the problem's seed and
/// then rounds every phase; `weights` holds the unquantized solution.
pub fn direct_quantize_baseline(problem: &SynthesisProblem) -> Result<SynthesisResult> {
    let power = SynthesisProblem {
        mode: ConstraintMode::Power,
        penalty: 0.0,
        start: None,
        ..problem.clone()
    };
    let mut result = mm_solve(&power)?;
    let alphabet = problem.alphabet()?;
    let indices = project_indices(&result.weights, &alphabet);
    result.weights_projected = indices.iter().map(|&i| alphabet.value(i)).collect();
    result.projected_indices = Some(indices);
    let eval_terms = problem.terms(&problem.eval_grid()?)?;
    result.min_power_projected = penalized_terms(&eval_terms, &result.weights_projected, 0.0);
    Ok(result)
}

/// Beam power in linear units at each angle, slots combined as in the problem.
pub fn beam_pattern(problem: &SynthesisProblem, weights: &[Complex64], angles: &[Angle]) -> Result<Vec<f64>> {
    if weights.len() != problem.n_weights() {
        return Err(Error::DimensionMismatch {
            expected: problem.n_weights(),
            actual: weights.len(),
        });
    }
    Ok(problem.terms(angles)?.iter().map(|t| power_of(t, weights)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Flatness {
    pub min_db: f64,
    pub max_db: f64,
    pub ripple_db: f64,
}

/// Extremes of the beam over the region on a grid of step `eval_step`.
pub fn evaluate_flatness(problem: &SynthesisProblem, weights: &[Complex64], eval_step: f64) -> Result<Flatness> {
    if !(eval_step > 0.0) {
        return Err(Error::invalid("eval_step", "must be positive"));
    }
    if eval_step > problem.grid_step {
        return Err(Error::invalid("eval_step", "must not exceed grid_step"));
    }
    let ratio = eval_step / problem.grid_step;
    let angles = make_grid_steps(&problem.roi, problem.grid_step_el * ratio, eval_step)?;
    let powers = beam_pattern(problem, weights, &angles)?;
    let min = powers.iter().copied().fold(f64::INFINITY, f64::min);
    let max = powers.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(Flatness {
        min_db: to_db(min),
        max_db: to_db(max),
        ripple_db: to_db(max) - to_db(min),
    })
}

/// `angle_deg,power_db` (linear) or `theta_el_deg,theta_az_deg,power_db`
/// (planar) rows.
pub fn write_pattern_csv<W: Write>(mut out: W, angles: &[Angle], powers: &[f64]) -> Result<()> {
    let planar = matches!(angles.first(), Some(Angle::Planar { .. }));
    if planar {
        writeln!(out, "theta_el_deg,theta_az_deg,power_db")?;
    } else {
        writeln!(out, "angle_deg,power_db")?;
    }
    for (a, p) in angles.iter().zip(powers) {
        match a {
            Angle::Linear(t) => writeln!(out, "{t:?},{:?}", to_db(*p))?,
            Angle::Planar { el, az } => writeln!(out, "{el:?},{az:?},{:?}", to_db(*p))?,
        }
    }
    Ok(())
}

/// Run manifest written next to a synthesis result.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SynthesisManifest {
    pub version: String,
    pub problem: SynthesisProblem,
    pub lambdas: Vec<f64>,
    pub restarts: usize,
    pub chosen_penalty: f64,
    pub min_db_relaxed: f64,
    pub min_db_projected: f64,
    pub iterations: usize,
    pub converged: bool,
    pub warnings: Vec<String>,
}

impl SynthesisManifest {
    pub fn new(problem: &SynthesisProblem, lambdas: &[f64], restarts: usize, result: &SynthesisResult) -> Self {
        SynthesisManifest {
            version: env!("CARGO_PKG_VERSION").to_string(),
            problem: SynthesisProblem {
                start: None,
                ..problem.clone()
            },
            lambdas: lambdas.to_vec(),
            restarts,
            chosen_penalty: result.penalty,
            min_db_relaxed: result.min_db_relaxed(),
            min_db_projected: result.min_db_projected(),
            iterations: result.iterations,
            converged: result.converged,
            warnings: result.warnings.clone(),
        }
    }
}
