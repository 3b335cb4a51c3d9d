//! Angle estimation by MUSIC over time-varying RIS configurations.
//!
//! With weights `W = [w_1 … w_T]` held for `T` slots, one block of
//! observations is `ȳ = h̄ᴴ W s + n̄`. Its conjugate transpose is
//! `s* b(θ) + n̄ᴴ` with the response `b(θ) = Wᴴ h̄(θ) ∈ C^T`, so the signal
//! subspace of `S = (1/Q) Σ ȳᴴ ȳ` is spanned by `b(θ₀)`.

use std::io::Write;

use log::warn;
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::array::{inner, Angle, ArrayGeometry, Channel, ChannelGains};
use crate::error::{Error, Result};
use crate::seed::{derive_seed, stream_id, RngStream};
use crate::synth::{lambda_sweep, SynthesisProblem};

pub const DEFAULT_SLOTS: usize = 7;
pub const DEFAULT_BLOCKS: usize = 4;
pub const DEFAULT_SEARCH_STEP: f64 = 0.01;
pub const DEFAULT_ACCURACY: f64 = 1e-4;

/// `T` RIS configurations repeated over `blocks` blocks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RisSchedule {
    /// One weight vector per slot.
    pub columns: Vec<Vec<Complex64>>,
    pub blocks: usize,
}

impl RisSchedule {
    pub fn new(columns: Vec<Vec<Complex64>>, blocks: usize) -> Result<Self> {
        if columns.len() < 2 {
            return Err(Error::invalid("slots", "a schedule needs at least two slots"));
        }
        if blocks < 2 {
            return Err(Error::invalid("blocks", "a schedule needs at least two blocks"));
        }
        let n = columns[0].len();
        if n == 0 {
            return Err(Error::invalid("slots", "empty weight vector"));
        }
        if let Some(bad) = columns.iter().find(|c| c.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: bad.len(),
            });
        }
        Ok(RisSchedule { columns, blocks })
    }

    pub fn slots(&self) -> usize {
        self.columns.len()
    }

    pub fn n_elements(&self) -> usize {
        self.columns[0].len()
    }

    /// `b = Wᴴ h̄`.
    pub fn response(&self, hbar: &[Complex64]) -> Vec<Complex64> {
        self.columns.iter().map(|w| inner(w, hbar)).collect()
    }

    /// Noiseless block `h̄ᴴ W s` for a unit pilot.
    pub fn mean_block(&self, hbar: &[Complex64]) -> Vec<Complex64> {
        self.columns.iter().map(|w| inner(hbar, w)).collect()
    }

    fn check(&self, geom: &ArrayGeometry) -> Result<()> {
        if self.n_elements() != geom.n_elements {
            return Err(Error::DimensionMismatch {
                expected: geom.n_elements,
                actual: self.n_elements(),
            });
        }
        Ok(())
    }
}

/// Wide-beam schedule: slot `t` holds the best projected weights of a λ
/// continuation started from its own random seed.
pub fn wide_beam_schedule(
    problem: &SynthesisProblem,
    lambdas: &[f64],
    slots: usize,
    blocks: usize,
) -> Result<RisSchedule> {
    if problem.slots != 1 {
        return Err(Error::invalid("slots", "wide-beam columns are synthesised one slot at a time"));
    }
    let stream = stream_id("widebeam");
    let columns = (0..slots)
        .into_par_iter()
        .map(|t| {
            let p = SynthesisProblem {
                seed: derive_seed(problem.seed, stream, t as u64),
                start: None,
                ..problem.clone()
            };
            Ok(lambda_sweep(&p, lambdas)?.best().weights_projected.clone())
        })
        .collect::<Result<Vec<_>>>()?;
    RisSchedule::new(columns, blocks)
}

/// Circularly symmetric complex Gaussian sample of variance `var`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, var: f64) -> Complex64 {
    let s = (var / 2.0).sqrt();
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(s * re, s * im)
}

/// `blocks` noisy copies of `mean`.
pub fn noisy_blocks<R: Rng + ?Sized>(
    mean: &[Complex64],
    blocks: usize,
    noise_var: f64,
    rng: &mut R,
) -> Vec<Vec<Complex64>> {
    (0..blocks)
        .map(|_| mean.iter().map(|m| m + complex_gaussian(rng, noise_var)).collect())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotSet {
    pub blocks: Vec<Vec<Complex64>>,
    pub pilot: Complex64,
    pub noise_var: f64,
}

/// Observations of a single target at `theta` over all blocks of the schedule.
pub fn simulate_snapshots(channel: &Channel, schedule: &RisSchedule, theta: f64, seed: u64) -> Result<SnapshotSet> {
    schedule.check(&channel.geometry)?;
    channel.gains.validate()?;
    let hbar = channel.hbar(Angle::Linear(theta))?;
    let mean = schedule.mean_block(&hbar);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(SnapshotSet {
        blocks: noisy_blocks(&mean, schedule.blocks, channel.gains.noise_var, &mut rng),
        pilot: Complex64::new(1.0, 0.0),
        noise_var: channel.gains.noise_var,
    })
}

/// `S = (1/Q) Σ_q ȳ_qᴴ ȳ_q`.
pub fn sample_covariance(blocks: &[Vec<Complex64>]) -> Result<DMatrix<Complex64>> {
    let q = blocks.len();
    if q == 0 {
        return Err(Error::invalid("blocks", "no snapshots"));
    }
    let t = blocks[0].len();
    let mut s = DMatrix::<Complex64>::zeros(t, t);
    for y in blocks {
        if y.len() != t {
            return Err(Error::DimensionMismatch {
                expected: t,
                actual: y.len(),
            });
        }
        for i in 0..t {
            for j in 0..t {
                s[(i, j)] += y[i].conj() * y[j];
            }
        }
    }
    Ok(s / Complex64::new(q as f64, 0.0))
}

/// Eigenpairs of a Hermitian matrix sorted by descending eigenvalue.
pub fn hermitian_eigen(s: &DMatrix<Complex64>) -> Result<(Vec<f64>, DMatrix<Complex64>)> {
    if !s.is_square() {
        return Err(Error::Eigen("matrix is not square".into()));
    }
    let eig = SymmetricEigen::try_new(s.clone(), 1e-15, 10_000)
        .ok_or_else(|| Error::Eigen("Hermitian eigensolver did not converge".into()))?;
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(s.nrows(), s.ncols(), |i, j| eig.eigenvectors[(i, order[j])]);
    Ok((values, vectors))
}

/// Peak search range and resolution, in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchSpec {
    pub lo: f64,
    pub hi: f64,
    pub grid_step: f64,
    pub accuracy: f64,
}

impl SearchSpec {
    pub fn new(lo: f64, hi: f64) -> Self {
        SearchSpec {
            lo,
            hi,
            grid_step: DEFAULT_SEARCH_STEP,
            accuracy: DEFAULT_ACCURACY,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lo <= self.hi) || self.lo < -90.0 || self.hi > 90.0 {
            return Err(Error::invalid("roi", format!("bad search range [{}, {}]", self.lo, self.hi)));
        }
        if !(self.grid_step > 0.0) {
            return Err(Error::invalid("grid_step", "must be positive"));
        }
        if !(self.accuracy > 0.0) {
            return Err(Error::invalid("accuracy", "must be positive"));
        }
        Ok(())
    }

    fn grid(&self) -> Vec<f64> {
        let count = ((self.hi - self.lo) / self.grid_step - 1e-9).ceil().max(0.0) as usize;
        (0..=count)
            .map(|i| (self.lo + i as f64 * self.grid_step).min(self.hi))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MusicSpectrum {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub peak: f64,
    /// Eigenvalues of `S` in descending order.
    pub eigenvalues: Vec<f64>,
    /// False when the spectrum is flat, i.e. the schedule cannot tell
    /// angles apart.
    pub reliable: bool,
}

/// Precomputed responses on the search grid for one schedule and channel.
#[derive(Debug, Clone)]
pub struct MusicEstimator {
    channel: Channel,
    schedule: RisSchedule,
    search: SearchSpec,
    grid: Vec<f64>,
    responses: Vec<Vec<Complex64>>,
}

fn quotient(b: &[Complex64], noise: &DMatrix<Complex64>) -> f64 {
    let num: f64 = b.iter().map(|x| x.norm_sqr()).sum();
    let den: f64 = noise
        .column_iter()
        .map(|u| u.iter().zip(b).map(|(ui, bi)| ui.conj() * bi).sum::<Complex64>().norm_sqr())
        .sum();
    if num == 0.0 {
        0.0
    } else {
        num / den.max(num * 1e-300)
    }
}

impl MusicEstimator {
    pub fn new(channel: Channel, schedule: RisSchedule, search: SearchSpec) -> Result<Self> {
        if channel.geometry.is_planar() {
            return Err(Error::invalid("geometry", "the angle search supports linear arrays only"));
        }
        schedule.check(&channel.geometry)?;
        search.validate()?;
        let grid = search.grid();
        let responses = grid
            .iter()
            .map(|&t| Ok(schedule.response(&channel.hbar(Angle::Linear(t))?)))
            .collect::<Result<_>>()?;
        Ok(MusicEstimator {
            channel,
            schedule,
            search,
            grid,
            responses,
        })
    }

    pub fn schedule(&self) -> &RisSchedule {
        &self.schedule
    }

    fn value_at(&self, theta: f64, noise: &DMatrix<Complex64>) -> Result<f64> {
        let b = self.schedule.response(&self.channel.hbar(Angle::Linear(theta))?);
        Ok(quotient(&b, noise))
    }

    pub fn spectrum(&self, s: &DMatrix<Complex64>) -> Result<MusicSpectrum> {
        let t = self.schedule.slots();
        if s.nrows() != t || s.ncols() != t {
            return Err(Error::DimensionMismatch {
                expected: t,
                actual: s.nrows(),
            });
        }
        let (eigenvalues, vectors) = hermitian_eigen(s)?;
        let noise = vectors.columns(1, t - 1).into_owned();
        let values: Vec<f64> = self.responses.iter().map(|b| quotient(b, &noise)).collect();
        let (k, top) = values
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |(bk, bv), (k, &v)| if v > bv { (k, v) } else { (bk, bv) });
        let bottom = values.iter().copied().fold(f64::INFINITY, f64::min);
        let reliable = top > bottom * (1.0 + 1e-6);
        if !reliable {
            warn!("flat MUSIC spectrum: the schedule does not separate angles");
        }
        let lo = if k == 0 { self.grid[0] } else { self.grid[k - 1] };
        let hi = self.grid[(k + 1).min(self.grid.len() - 1)];
        let peak = golden_max(|x| self.value_at(x, &noise), lo, hi, self.search.accuracy, self.grid[k], top)?;
        Ok(MusicSpectrum {
            grid: self.grid.clone(),
            values,
            peak,
            eigenvalues,
            reliable,
        })
    }

    pub fn estimate(&self, blocks: &[Vec<Complex64>]) -> Result<f64> {
        Ok(self.spectrum(&sample_covariance(blocks)?)?.peak)
    }
}

/// Golden-section maximisation on `[lo, hi]`; never returns a point worse
/// than the grid point `(x0, f0)`.
fn golden_max<F: Fn(f64) -> Result<f64>>(f: F, mut lo: f64, mut hi: f64, tol: f64, x0: f64, f0: f64) -> Result<f64> {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - r * (hi - lo);
    let mut b = lo + r * (hi - lo);
    let mut fa = f(a)?;
    let mut fb = f(b)?;
    while hi - lo > tol {
        if fa >= fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - r * (hi - lo);
            fa = f(a)?;
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + r * (hi - lo);
            fb = f(b)?;
        }
    }
    let mid = 0.5 * (lo + hi);
    Ok(if f(mid)? >= f0 { mid } else { x0 })
}

/// MUSIC spectrum of `s` for one schedule (see [`MusicEstimator`] to reuse
/// the grid across many estimates).
pub fn music_spectrum(
    s: &DMatrix<Complex64>,
    schedule: &RisSchedule,
    channel: &Channel,
    search: SearchSpec,
) -> Result<MusicSpectrum> {
    MusicEstimator::new(*channel, schedule.clone(), search)?.spectrum(s)
}

/// Monte Carlo setup shared by the estimation and detection experiments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarlo {
    pub geometry: ArrayGeometry,
    pub gains: ChannelGains,
    /// Targets are drawn uniformly from `[roi[0], roi[1]]`.
    pub roi: [f64; 2],
    pub snrs_db: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub search: SearchSpec,
}

impl MonteCarlo {
    pub fn new(geometry: ArrayGeometry, roi: [f64; 2], snrs_db: Vec<f64>, trials: usize, seed: u64) -> Self {
        MonteCarlo {
            gains: ChannelGains::unit(&geometry),
            geometry,
            roi,
            snrs_db,
            trials,
            seed,
            search: SearchSpec::new(roi[0], roi[1]),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.geometry.validate()?;
        self.gains.validate()?;
        self.search.validate()?;
        if !(self.roi[0] <= self.roi[1]) {
            return Err(Error::invalid("roi", "min exceeds max"));
        }
        if self.trials == 0 {
            return Err(Error::invalid("trials", "need at least one trial"));
        }
        if self.snrs_db.is_empty() {
            return Err(Error::invalid("snr", "empty SNR list"));
        }
        Ok(())
    }

    pub fn channel_at(&self, snr_db: f64) -> Channel {
        Channel {
            geometry: self.geometry,
            gains: self.gains.with_snr(self.geometry.n_elements, snr_db),
        }
    }

    pub(crate) fn draw_angle<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if self.roi[1] > self.roi[0] {
            rng.random_range(self.roi[0]..=self.roi[1])
        } else {
            self.roi[0]
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MseRow {
    pub snr_db: f64,
    pub mse_deg2: f64,
    pub trials: usize,
}

/// Mean squared angle error (degrees²) per SNR.
pub fn mse_experiment(config: &MonteCarlo, schedule: &RisSchedule) -> Result<Vec<MseRow>> {
    config.validate()?;
    let estimator = MusicEstimator::new(config.channel_at(0.0), schedule.clone(), config.search)?;
    let stream = RngStream::new(config.seed, "music_mse");
    config
        .snrs_db
        .iter()
        .enumerate()
        .map(|(k, &snr)| {
            let channel = config.channel_at(snr);
            let sub = stream.child(k as u64);
            let errors = (0..config.trials)
                .into_par_iter()
                .map(|trial| {
                    let mut rng = sub.rng(trial as u64);
                    let theta = config.draw_angle(&mut rng);
                    let hbar = channel.hbar(Angle::Linear(theta))?;
                    let blocks = noisy_blocks(&schedule.mean_block(&hbar), schedule.blocks, channel.gains.noise_var, &mut rng);
                    let est = estimator.estimate(&blocks)?;
                    Ok((est - theta).powi(2))
                })
                .collect::<Result<Vec<f64>>>()?;
            Ok(MseRow {
                snr_db: snr,
                mse_deg2: errors.iter().sum::<f64>() / errors.len() as f64,
                trials: config.trials,
            })
        })
        .collect()
}

pub fn write_mse_csv<W: Write>(mut out: W, rows: &[MseRow]) -> Result<()> {
    writeln!(out, "snr_db,mse_deg2,trials")?;
    for r in rows {
        writeln!(out, "{:?},{:?},{}", r.snr_db, r.mse_deg2, r.trials)?;
    }
    Ok(())
}

/// `angle_deg,spectrum` rows of one spectrum.
pub fn write_spectrum_csv<W: Write>(mut out: W, spectrum: &MusicSpectrum) -> Result<()> {
    writeln!(out, "angle_deg,spectrum")?;
    for (t, v) in spectrum.grid.iter().zip(&spectrum.values) {
        writeln!(out, "{t:?},{v:?}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase::alphabet;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Random alphabet columns: enough response diversity for MUSIC.
    fn random_schedule(n: usize, t: usize, seed: u64) -> RisSchedule {
        let a = alphabet(4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cols = (0..t)
            .map(|_| (0..n).map(|_| a.value(rng.random_range(0..4))).collect())
            .collect();
        RisSchedule::new(cols, 4).unwrap()
    }

    #[test]
    fn covariance_of_one_block_is_the_outer_product() {
        let s = sample_covariance(&[vec![c(1.0, 0.0), c(0.0, 0.0)]]).unwrap();
        assert_eq!(s, DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]));
        assert!(sample_covariance(&[]).is_err());
    }

    #[test]
    fn covariance_is_hermitian_and_eigen_is_consistent() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let blocks = noisy_blocks(&[c(1.0, 2.0), c(0.0, -1.0), c(0.5, 0.5)], 5, 1.0, &mut rng);
        let s = sample_covariance(&blocks).unwrap();
        assert!((&s - s.adjoint()).norm() < 1e-12);
        let (vals, vecs) = hermitian_eigen(&s).unwrap();
        assert!(vals.windows(2).all(|v| v[0] >= v[1]));
        assert!(vals.iter().all(|&v| v >= -1e-10));
        let trace: f64 = (0..3).map(|i| s[(i, i)].re).sum();
        assert_abs_diff_eq!(vals.iter().sum::<f64>(), trace, epsilon = 1e-10 * trace);
        let lambda = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(3, vals.iter().map(|&v| c(v, 0.0))));
        assert!((&vecs * lambda * vecs.adjoint() - &s).norm() < 1e-10);
    }

    #[test]
    fn pure_noise_covariance_tends_to_scaled_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let blocks = noisy_blocks(&[c(0.0, 0.0); 3], 10_000, 2.0, &mut rng);
        let s = sample_covariance(&blocks).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 2.0 } else { 0.0 };
                assert!((s[(i, j)] - c(want, 0.0)).norm() < 0.05 * 2.0, "{i} {j} {}", s[(i, j)]);
            }
        }
    }

    #[test]
    fn noiseless_blocks_are_identical_and_rank_one() {
        let geom = ArrayGeometry::ula(8, 0.5).unwrap();
        let mut gains = ChannelGains::unit(&geom);
        gains.noise_var = 1e-300;
        let ch = Channel::new(geom, gains).unwrap();
        let sched = random_schedule(8, 7, 1);
        let snaps = simulate_snapshots(&ch, &sched, 10.0, 4).unwrap();
        let mean = sched.mean_block(&ch.hbar(Angle::Linear(10.0)).unwrap());
        for b in &snaps.blocks {
            for (x, y) in b.iter().zip(&mean) {
                assert!((x - y).norm() < 1e-140);
            }
        }
        let (vals, _) = hermitian_eigen(&sample_covariance(&snaps.blocks).unwrap()).unwrap();
        assert!(vals[1].abs() < 1e-12 * vals[0]);
    }

    #[test]
    fn empirical_snr_matches_nominal() {
        // Fresh random-phase schedule and angle per trial; the empirical
        // per-sample SNR is (E|y|² − σ²)/σ².
        let geom = ArrayGeometry::ula(8, 0.5).unwrap();
        let ch = Channel::new(geom, ChannelGains::unit(&geom).with_snr(8, 20.0)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let trials = 10_000;
        let mut power = 0.0;
        for trial in 0..trials {
            let sched = random_schedule(8, 7, trial);
            let theta = rng.random_range(-30.0..30.0);
            let s = simulate_snapshots(&ch, &sched, theta, trial).unwrap();
            power += s.blocks.iter().flatten().map(|y| y.norm_sqr()).sum::<f64>() / 28.0;
        }
        let sigma_sq = ch.gains.noise_var;
        let snr = (power / trials as f64 - sigma_sq) / sigma_sq;
        assert!((10.0 * snr.log10() - 20.0).abs() < 1.0, "{}", 10.0 * snr.log10());
    }

    #[test]
    fn noiseless_peak_is_exact() {
        let geom = ArrayGeometry::ula(16, 0.5).unwrap();
        let ch = Channel::unit(geom);
        let sched = random_schedule(16, 7, 9);
        let est = MusicEstimator::new(ch, sched.clone(), SearchSpec::new(-30.0, 30.0)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let theta: f64 = rng.random_range(-30.0..30.0);
            let b = sched.mean_block(&ch.hbar(Angle::Linear(theta)).unwrap());
            let spec = est.spectrum(&sample_covariance(&[b]).unwrap()).unwrap();
            assert!(spec.reliable);
            assert!((spec.peak - theta).abs() < 1e-3, "{} vs {theta}", spec.peak);
        }
    }

    #[test]
    fn spectrum_ignores_a_global_phase() {
        let geom = ArrayGeometry::ula(8, 0.5).unwrap();
        let ch = Channel::new(geom, ChannelGains::unit(&geom).with_snr(8, 10.0)).unwrap();
        let sched = random_schedule(8, 7, 2);
        let snaps = simulate_snapshots(&ch, &sched, 12.0, 1).unwrap();
        let rot = Complex64::cis(1.1);
        let turned: Vec<Vec<Complex64>> = snaps.blocks.iter().map(|b| b.iter().map(|y| y * rot).collect()).collect();
        let search = SearchSpec::new(-30.0, 30.0);
        let a = music_spectrum(&sample_covariance(&snaps.blocks).unwrap(), &sched, &ch, search).unwrap();
        let b = music_spectrum(&sample_covariance(&turned).unwrap(), &sched, &ch, search).unwrap();
        assert!((a.peak - b.peak).abs() < 1e-9);
    }

    #[test]
    fn identical_columns_are_flagged() {
        let geom = ArrayGeometry::ula(8, 0.5).unwrap();
        let ch = Channel::new(geom, ChannelGains::unit(&geom).with_snr(8, 10.0)).unwrap();
        let col = random_schedule(8, 2, 3).columns[0].clone();
        let sched = RisSchedule::new(vec![col; 7], 4).unwrap();
        let snaps = simulate_snapshots(&ch, &sched, 0.0, 1).unwrap();
        let spec = music_spectrum(&sample_covariance(&snaps.blocks).unwrap(), &sched, &ch, SearchSpec::new(-30.0, 30.0)).unwrap();
        assert!(!spec.reliable);
    }

    #[test]
    fn mse_falls_with_snr() {
        let geom = ArrayGeometry::ula(8, 0.5).unwrap();
        let sched = random_schedule(8, 7, 11);
        let mut mc = MonteCarlo::new(geom, [-30.0, 30.0], vec![0.0, 10.0], 200, 1);
        mc.roi = [10.0, 10.0];
        let rows = mse_experiment(&mc, &sched).unwrap();
        assert!(rows[1].mse_deg2 < rows[0].mse_deg2, "{rows:?}");
        assert_eq!(rows, mse_experiment(&mc, &sched).unwrap());
    }

    #[test]
    fn schedule_validation() {
        assert!(RisSchedule::new(vec![vec![c(1.0, 0.0)]], 4).is_err());
        assert!(RisSchedule::new(vec![vec![c(1.0, 0.0)]; 2], 1).is_err());
        assert!(RisSchedule::new(vec![vec![c(1.0, 0.0)], vec![c(1.0, 0.0); 2]], 4).is_err());
    }
}
