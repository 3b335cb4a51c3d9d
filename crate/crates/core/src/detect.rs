//! Target detection from RIS-scheduled observations: a GLRT that plugs in
//! the MUSIC angle estimate, and an energy detector.
//!
//! Every block of the schedule is used. With `Q` blocks the GLRT statistic
//! is `z = Σ_q Re(ȳ_qᴴ μ̂) / sqrt(Q σ² ‖μ̂‖² / 2)`, standard normal under H0
//! for a fixed `μ̂`, and the energy statistic sums `|y|²` over all `QT`
//! samples, so `(2/σ²) V ~ χ²(2QT)` under H0.

use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::array::{inner, Angle, Channel};
use crate::error::{Error, Result};
use crate::music::{noisy_blocks, MonteCarlo, MusicEstimator, RisSchedule};
use crate::phase::PhaseAlphabet;
use crate::seed::RngStream;
use crate::special::{chi2_isf, chi2_sf, noncentral_chi2_sf, q_function, q_inverse};

/// `Re(yᴴ μ̂)`.
pub fn glrt_statistic(y: &[Complex64], mu_hat: &[Complex64]) -> Result<f64> {
    if y.len() != mu_hat.len() {
        return Err(Error::DimensionMismatch {
            expected: mu_hat.len(),
            actual: y.len(),
        });
    }
    Ok(inner(y, mu_hat).re)
}

/// `Σ |y_t|²`.
pub fn energy_statistic(y: &[Complex64]) -> f64 {
    y.iter().map(|v| v.norm_sqr()).sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionStatistics {
    pub glrt_value: f64,
    pub energy_value: f64,
    pub mu_hat: Vec<Complex64>,
    pub mu_norm_sq: f64,
}

impl DetectionStatistics {
    pub fn new(y: &[Complex64], mu_hat: Vec<Complex64>) -> Result<Self> {
        Ok(DetectionStatistics {
            glrt_value: glrt_statistic(y, &mu_hat)?,
            energy_value: energy_statistic(y),
            mu_norm_sq: energy_statistic(&mu_hat),
            mu_hat,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GlrtClosedForm {
    pub threshold: f64,
    pub p_d: f64,
}

/// Threshold on `Re(yᴴ μ̂)` for a target false-alarm rate and the matching
/// detection probability, for unit noise variance.
///
/// Under H0 the statistic is `N(0, ‖μ̂‖²/2)` and under H1
/// `N(‖μ̂‖², ‖μ̂‖²/2)`, which gives `P_D = Q(Q⁻¹(P_FA) − √2 ‖μ̂‖)`.
pub fn glrt_closed_form(mu_norm_sq: f64, p_fa: f64) -> Result<GlrtClosedForm> {
    let q_inv = q_inverse(p_fa)?;
    if !(mu_norm_sq >= 0.0) {
        return Err(Error::invalid("mu_norm_sq", "must be non-negative"));
    }
    if mu_norm_sq == 0.0 {
        return Ok(GlrtClosedForm { threshold: 0.0, p_d: p_fa });
    }
    let spread = (mu_norm_sq / 2.0).sqrt();
    let threshold = spread * q_inv;
    Ok(GlrtClosedForm {
        threshold,
        p_d: q_function((threshold - mu_norm_sq) / spread),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyClosedForm {
    pub p_fa: f64,
    pub p_d: f64,
}

/// False-alarm and detection probabilities of `V = Σ|y_t|² > γ` over `t`
/// samples with noise variance `sigma_sq` and signal mean `mu`.
pub fn energy_closed_form(t: usize, sigma_sq: f64, mu: &[Complex64], gamma: f64) -> Result<EnergyClosedForm> {
    if t == 0 {
        return Err(Error::invalid("slots", "need at least one sample"));
    }
    if !(sigma_sq > 0.0) {
        return Err(Error::invalid("noise_var", "must be positive"));
    }
    if !(gamma >= 0.0) {
        return Err(Error::invalid("threshold", "must be non-negative"));
    }
    if mu.len() != t {
        return Err(Error::DimensionMismatch {
            expected: t,
            actual: mu.len(),
        });
    }
    let dof = 2.0 * t as f64;
    let x = 2.0 * gamma / sigma_sq;
    let p_s = 2.0 * energy_statistic(mu) / sigma_sq;
    Ok(EnergyClosedForm {
        p_fa: chi2_sf(dof, x),
        p_d: noncentral_chi2_sf(dof, p_s, x)?,
    })
}

/// Sweep baseline: slot `t` is the quantized matched beam
/// `exp(j arg h̄_i(θ_t))` towards the `t`-th of `slots` equally spaced
/// directions spanning `roi` (edges included). `alphabet = None` keeps the unquantized constant-modulus beam.
pub fn sweep_baseline_schedule(
    channel: &Channel,
    alphabet: Option<&PhaseAlphabet>,
    roi: [f64; 2],
    slots: usize,
    blocks: usize,
) -> Result<RisSchedule> {
    if !(roi[0] <= roi[1]) {
        return Err(Error::invalid("roi", "min exceeds max"));
    }
    if slots < 2 {
        return Err(Error::invalid("slots", "a sweep needs at least two beams"));
    }
    let columns = sweep_centers(roi, slots)
        .into_iter()
        .map(|c| {
            let hbar = channel.hbar(Angle::Linear(c))?;
            // A common phase rotation leaves the beam unchanged; aligning the
            // first element with an alphabet point keeps phases that sit on
            // a multiple of the quantizer step away from rounding ties.
            let offset = alphabet.map_or(0.0, |a| a.phase(0)) - hbar[0].arg();
            hbar.iter()
                .map(|h| {
                    let phase = Complex64::cis(h.arg() + offset);
                    match alphabet {
                        Some(a) => Ok(a.value(a.nearest_index(phase)?)),
                        None => Ok(phase),
                    }
                })
                .collect()
        })
        .collect::<Result<Vec<_>>>()?;
    RisSchedule::new(columns, blocks)
}

/// Beam directions of the sweep baseline.
pub fn sweep_centers(roi: [f64; 2], slots: usize) -> Vec<f64> {
    let step = (roi[1] - roi[0]) / (slots - 1) as f64;
    (0..slots).map(|t| roi[0] + step * t as f64).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Detector {
    /// GLRT with `μ̂` built from the MUSIC angle estimate.
    Glrt,
    /// GLRT with the true mean, an upper reference.
    GlrtOracle,
    Energy,
}

impl Detector {
    pub const ALL: [Detector; 3] = [Detector::Glrt, Detector::GlrtOracle, Detector::Energy];

    pub fn name(&self) -> &'static str {
        match self {
            Detector::Glrt => "glrt",
            Detector::GlrtOracle => "glrt_oracle",
            Detector::Energy => "energy",
        }
    }
}

impl std::str::FromStr for Detector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Detector::ALL
            .into_iter()
            .find(|d| d.name() == s)
            .ok_or_else(|| Error::invalid("detector", format!("unknown detector '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RocSource {
    MonteCarlo,
    ClosedForm,
}

impl RocSource {
    pub fn name(&self) -> &'static str {
        match self {
            RocSource::MonteCarlo => "monte_carlo",
            RocSource::ClosedForm => "closed_form",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub p_fa: f64,
    pub p_d: f64,
    pub threshold: f64,
    pub source: RocSource,
}

/// Statistic values of one detector under both hypotheses, one per trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionSamples {
    pub detector: Detector,
    pub h0: Vec<f64>,
    pub h1: Vec<f64>,
}

impl DetectionSamples {
    /// Empirical operating point whose threshold lets `floor(p_fa · n)` of
    /// the H0 values through.
    pub fn point(&self, p_fa: f64) -> RocPoint {
        let mut h0 = self.h0.clone();
        h0.sort_by(|a, b| b.total_cmp(a));
        let n = h0.len();
        let k = ((p_fa * n as f64).floor() as usize).min(n);
        let threshold = if k < n { h0[k] } else { f64::NEG_INFINITY };
        let rate = |v: &[f64]| v.iter().filter(|&&x| x > threshold).count() as f64 / v.len() as f64;
        RocPoint {
            p_fa: rate(&self.h0),
            p_d: rate(&self.h1),
            threshold,
            source: RocSource::MonteCarlo,
        }
    }

    pub fn roc(&self, p_fa_grid: &[f64]) -> Vec<RocPoint> {
        p_fa_grid.iter().map(|&p| self.point(p)).collect()
    }
}

/// All detector statistics at one SNR.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnrDetection {
    pub snr_db: f64,
    pub samples: Vec<DetectionSamples>,
    /// `Q ‖μ‖² / σ²` of each trial's true mean.
    pub signal_energy: Vec<f64>,
    /// Total number of samples `QT` per trial.
    pub samples_per_trial: usize,
}

impl SnrDetection {
    pub fn samples(&self, detector: Detector) -> &DetectionSamples {
        self.samples
            .iter()
            .find(|s| s.detector == detector)
            .expect("every detector is simulated")
    }

    /// Closed-form detection probability at `p_fa` averaged over the trial
    /// targets. Only the oracle GLRT and the energy detector have one.
    pub fn closed_form(&self, detector: Detector, p_fa: f64) -> Result<Option<RocPoint>> {
        let n = self.signal_energy.len() as f64;
        let point = |threshold: f64, p_d: f64| RocPoint {
            p_fa,
            p_d,
            threshold,
            source: RocSource::ClosedForm,
        };
        Ok(match detector {
            Detector::Glrt => None,
            Detector::GlrtOracle => {
                let q_inv = q_inverse(p_fa)?;
                let p_d = self
                    .signal_energy
                    .iter()
                    .map(|e| q_function(q_inv - (2.0 * e).sqrt()))
                    .sum::<f64>()
                    / n;
                Some(point(q_inv, p_d))
            }
            Detector::Energy => {
                let dof = 2.0 * self.samples_per_trial as f64;
                // Thresholds here are on (2/σ²) V.
                let x = chi2_isf(dof, p_fa)?;
                let p_d = self
                    .signal_energy
                    .iter()
                    .map(|e| noncentral_chi2_sf(dof, 2.0 * e, x))
                    .sum::<Result<f64>>()?
                    / n;
                Some(point(x, p_d))
            }
        })
    }
}

/// Per-trial statistics of all detectors for one schedule.
///
/// Trial `i` at SNR index `k` draws its target angle and noise from the same
/// seed whatever the schedule, so schedules are compared on common random
/// numbers.
pub fn simulate_detection(config: &MonteCarlo, schedule: &RisSchedule) -> Result<Vec<SnrDetection>> {
    config.validate()?;
    let estimator = MusicEstimator::new(config.channel_at(0.0), schedule.clone(), config.search)?;
    let stream = RngStream::new(config.seed, "detect");
    let sigma_sq = config.gains.noise_var;
    let q = schedule.blocks;
    config
        .snrs_db
        .iter()
        .enumerate()
        .map(|(k, &snr)| {
            let channel = config.channel_at(snr);
            let sub = stream.child(k as u64);
            let mean_at = |theta: f64| -> Result<Vec<Complex64>> {
                Ok(schedule.mean_block(&channel.hbar(Angle::Linear(theta))?))
            };
            let glrt = |blocks: &[Vec<Complex64>], mu: &[Complex64]| -> Result<f64> {
                let norm = energy_statistic(mu);
                if norm == 0.0 {
                    return Ok(0.0);
                }
                let sum = blocks.iter().map(|y| glrt_statistic(y, mu)).sum::<Result<f64>>()?;
                Ok(sum / (q as f64 * sigma_sq * norm / 2.0).sqrt())
            };
            let trials = (0..config.trials)
                .into_par_iter()
                .map(|trial| {
                    let mut rng = sub.rng(trial as u64);
                    let theta = config.draw_angle(&mut rng);
                    let mu = mean_at(theta)?;
                    let zero = vec![Complex64::new(0.0, 0.0); mu.len()];
                    let mut stats = [[0.0; 2]; 3];
                    for (h, mean) in [&zero, &mu].into_iter().enumerate() {
                        let blocks = noisy_blocks(mean, q, sigma_sq, &mut rng);
                        let mu_hat = mean_at(estimator.estimate(&blocks)?)?;
                        stats[0][h] = glrt(&blocks, &mu_hat)?;
                        stats[1][h] = glrt(&blocks, &mu)?;
                        stats[2][h] = blocks.iter().map(|y| energy_statistic(y)).sum();
                    }
                    Ok((stats, q as f64 * energy_statistic(&mu) / sigma_sq))
                })
                .collect::<Result<Vec<_>>>()?;
            let samples = Detector::ALL
                .iter()
                .enumerate()
                .map(|(d, &detector)| DetectionSamples {
                    detector,
                    h0: trials.iter().map(|t| t.0[d][0]).collect(),
                    h1: trials.iter().map(|t| t.0[d][1]).collect(),
                })
                .collect();
            Ok(SnrDetection {
                snr_db: snr,
                samples,
                signal_energy: trials.iter().map(|t| t.1).collect(),
                samples_per_trial: q * schedule.slots(),
            })
        })
        .collect()
}

/// One CSV row of a detection experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionRow {
    pub detector: Detector,
    pub schedule: String,
    pub snr_db: f64,
    pub p_fa: f64,
    pub p_d: f64,
    pub trials: usize,
    pub source: RocSource,
}

fn rows_for(
    name: &str,
    runs: &[SnrDetection],
    trials: usize,
    p_fa_grid: &[f64],
    detectors: &[Detector],
) -> Result<Vec<DetectionRow>> {
    let mut rows = Vec::new();
    for run in runs {
        for &detector in detectors {
            let row = |p: RocPoint| DetectionRow {
                detector,
                schedule: name.to_string(),
                snr_db: run.snr_db,
                p_fa: p.p_fa,
                p_d: p.p_d,
                trials,
                source: p.source,
            };
            for &p_fa in p_fa_grid {
                rows.push(row(run.samples(detector).point(p_fa)));
            }
            for &p_fa in p_fa_grid {
                if let Some(p) = run.closed_form(detector, p_fa)? {
                    rows.push(row(p));
                }
            }
        }
    }
    Ok(rows)
}

/// ROC curves (empirical, plus closed form where one exists) for every
/// named schedule, detector and SNR.
pub fn roc_experiment(
    config: &MonteCarlo,
    schedules: &[(String, RisSchedule)],
    detectors: &[Detector],
    p_fa_grid: &[f64],
) -> Result<Vec<DetectionRow>> {
    if let Some(&bad) = p_fa_grid.iter().find(|&&p| !(p > 0.0 && p < 1.0)) {
        return Err(Error::invalid("p_fa", format!("must lie in (0, 1), got {bad}")));
    }
    let mut rows = Vec::new();
    for (name, schedule) in schedules {
        let runs = simulate_detection(config, schedule)?;
        rows.extend(rows_for(name, &runs, config.trials, p_fa_grid, detectors)?);
    }
    Ok(rows)
}

/// Detection probability against SNR at a single false-alarm rate.
pub fn fixed_pfa_experiment(
    config: &MonteCarlo,
    schedules: &[(String, RisSchedule)],
    detectors: &[Detector],
    p_fa: f64,
) -> Result<Vec<DetectionRow>> {
    roc_experiment(config, schedules, detectors, &[p_fa])
}

/// Default false-alarm grid for ROC output, log-spaced from 1e-3 to 0.9.
pub fn default_pfa_grid() -> Vec<f64> {
    let mut grid: Vec<f64> = (0..=20).map(|k| 10f64.powf(-3.0 + 3.0 * k as f64 / 20.0)).collect();
    grid.retain(|&p| p < 1.0);
    grid.push(0.9);
    grid
}

pub fn write_detection_csv<W: Write>(mut out: W, rows: &[DetectionRow]) -> Result<()> {
    writeln!(out, "detector,schedule,snr_db,p_fa,p_d,trials,source")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{:?},{:?},{:?},{},{}",
            r.detector.name(),
            r.schedule,
            r.snr_db,
            r.p_fa,
            r.p_d,
            r.trials,
            r.source.name()
        )?;
    }
    Ok(())
}
