//! Experiment runner: a JSON config in, CSV files plus a JSON manifest out.
//!
//! # Config
//!
//! ```json
//! {
//!   "experiment": "music_mse",
//!   "n": 64,
//!   "levels": 4,
//!   "roi": [[-30, 30]],
//!   "snr_db": [-10, 0, 10],
//!   "trials": 200,
//!   "master_seed": 1,
//!   "output": "out/mse"
//! }
//! ```
//!
//! `experiment` is one of `pattern`, `lambda_sweep`, `n_sweep`, `l_sweep`,
//! `music_mse`, `roc` and `fixed_pfa`. Every other field is optional; see
//! [`ExperimentConfig`] for defaults. Unknown fields are rejected.
//!
//! Files are written to a staging directory next to `output` and moved into
//! place only when the whole run succeeds.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use log::info;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use crate::seed::RngStream;

use crate::array::{to_db, Angle, ArrayGeometry, ChannelGains};
use crate::detect::{default_pfa_grid, roc_experiment, sweep_baseline_schedule, write_detection_csv, Detector};
use crate::error::{Error, Result};
use crate::music::{mse_experiment, wide_beam_schedule, write_mse_csv, MonteCarlo, RisSchedule};
use crate::phase::ConstraintMode;
use crate::synth::{
    beam_pattern, default_grid_steps, direct_quantize_baseline, evaluate_flatness, make_grid, make_grid_steps,
    synthesize, write_pattern_csv, Rect, RegionOfInterest, SweepResult, SynthesisManifest, SynthesisProblem,
    DEFAULT_LAMBDAS,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Pattern,
    LambdaSweep,
    NSweep,
    LSweep,
    MusicMse,
    Roc,
    FixedPfa,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScheduleKind {
    Widebeam,
    Sweep,
}

impl ScheduleKind {
    pub fn name(&self) -> &'static str {
        match self {
            ScheduleKind::Widebeam => "widebeam",
            ScheduleKind::Sweep => "sweep",
        }
    }
}

fn default_n() -> usize {
    64
}
fn default_spacing() -> f64 {
    0.5
}
fn default_levels() -> usize {
    4
}
fn default_mode() -> ConstraintMode {
    ConstraintMode::Discrete
}
fn default_roi() -> Vec<[f64; 2]> {
    vec![[-30.0, 30.0]]
}
fn default_lambdas() -> Vec<f64> {
    DEFAULT_LAMBDAS.to_vec()
}
fn default_one() -> usize {
    1
}
fn default_n_values() -> Vec<usize> {
    vec![32, 64, 128]
}
fn default_l_values() -> Vec<usize> {
    vec![2, 4, 8, 16, 64]
}
fn default_schedules() -> Vec<ScheduleKind> {
    vec![ScheduleKind::Widebeam, ScheduleKind::Sweep]
}
fn default_detectors() -> Vec<Detector> {
    Detector::ALL.to_vec()
}
fn default_slots() -> usize {
    7
}
fn default_blocks() -> usize {
    4
}
fn default_snr() -> Vec<f64> {
    vec![-15.0]
}
fn default_trials() -> usize {
    200
}
fn default_noise_var() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    /// Element count of a linear array (ignored when `planar` is set).
    #[serde(default = "default_n")]
    pub n: usize,
    /// `[rows, cols]` of a planar array.
    #[serde(default)]
    pub planar: Option<[usize; 2]>,
    #[serde(default = "default_spacing")]
    pub spacing: f64,
    #[serde(default = "default_levels")]
    pub levels: usize,
    #[serde(default = "default_mode")]
    pub mode: ConstraintMode,
    /// Linear intervals in degrees. For planar arrays each entry is the
    /// azimuth range and `roi_el` gives the elevation range.
    #[serde(default = "default_roi")]
    pub roi: Vec<[f64; 2]>,
    #[serde(default)]
    pub roi_el: Option<[f64; 2]>,
    #[serde(default = "default_lambdas")]
    pub lambdas: Vec<f64>,
    #[serde(default = "default_one")]
    pub restarts: usize,
    /// Synthesis grid step; the main-lobe rule when absent.
    #[serde(default)]
    pub grid_step: Option<f64>,
    #[serde(default = "default_n_values")]
    pub n_values: Vec<usize>,
    #[serde(default = "default_l_values")]
    pub l_values: Vec<usize>,
    #[serde(default = "default_schedules")]
    pub schedules: Vec<ScheduleKind>,
    #[serde(default = "default_detectors")]
    pub detectors: Vec<Detector>,
    #[serde(default = "default_slots")]
    pub slots: usize,
    #[serde(default = "default_blocks")]
    pub blocks: usize,
    #[serde(default = "default_snr")]
    pub snr_db: Vec<f64>,
    /// False-alarm grid (roc) or single rate (fixed_pfa); defaults to a
    /// log grid and 0.01.
    #[serde(default)]
    pub p_fa: Vec<f64>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "default_noise_var")]
    pub noise_var: f64,
    /// BS direction in degrees.
    #[serde(default)]
    pub bs_angle: f64,
    pub output: PathBuf,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: ExperimentConfig = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let geom = self.geometry()?;
        self.region()?;
        if self.trials == 0 {
            return Err(Error::invalid("trials", "need at least one trial"));
        }
        let needs_snr = matches!(
            self.experiment,
            ExperimentKind::MusicMse | ExperimentKind::Roc | ExperimentKind::FixedPfa
        );
        if needs_snr {
            if self.snr_db.is_empty() {
                return Err(Error::invalid("snr_db", "empty SNR list"));
            }
            if geom.is_planar() {
                return Err(Error::invalid("planar", "estimation and detection use linear arrays"));
            }
            if self.roi.len() != 1 {
                return Err(Error::invalid("roi", "estimation and detection need a single interval"));
            }
            if self.schedules.is_empty() {
                return Err(Error::invalid("schedules", "no schedules"));
            }
            if self.slots < 2 {
                return Err(Error::invalid("slots", "a schedule needs at least two slots"));
            }
            if self.blocks < 2 {
                return Err(Error::invalid("blocks", "a schedule needs at least two blocks"));
            }
        }
        if self.lambdas.is_empty() {
            return Err(Error::invalid("lambdas", "empty penalty sweep"));
        }
        if self.experiment == ExperimentKind::NSweep && self.n_values.is_empty() {
            return Err(Error::invalid("n_values", "empty list"));
        }
        if self.experiment == ExperimentKind::LSweep && self.l_values.is_empty() {
            return Err(Error::invalid("l_values", "empty list"));
        }
        if self.experiment == ExperimentKind::FixedPfa && self.p_fa.len() > 1 {
            return Err(Error::invalid("p_fa", "fixed_pfa takes one false-alarm rate"));
        }
        if let Some(&p) = self.p_fa.iter().find(|&&p| !(p > 0.0 && p < 1.0)) {
            return Err(Error::invalid("p_fa", format!("must lie in (0, 1), got {p}")));
        }
        if self.output.as_os_str().is_empty() {
            return Err(Error::invalid("output", "empty path"));
        }
        self.problem_for(geom, self.levels)?;
        Ok(())
    }

    pub fn geometry(&self) -> Result<ArrayGeometry> {
        self.geometry_with(self.n)
    }

    fn geometry_with(&self, n: usize) -> Result<ArrayGeometry> {
        match self.planar {
            Some([rows, cols]) => ArrayGeometry::upa(rows, cols, self.spacing),
            None => ArrayGeometry::ula(n, self.spacing),
        }
    }

    pub fn region(&self) -> Result<RegionOfInterest> {
        match (self.planar, self.roi_el) {
            (Some(_), el) => {
                let el = el.unwrap_or([0.0, 0.0]);
                let rects: Vec<Rect> = self.roi.iter().map(|&az| Rect { el, az }).collect();
                RegionOfInterest::planar(&rects)
            }
            (None, Some(_)) => Err(Error::invalid("roi_el", "only planar arrays take an elevation range")),
            (None, None) => RegionOfInterest::linear(&self.roi.iter().map(|r| (r[0], r[1])).collect::<Vec<_>>()),
        }
    }

    fn gains(&self, geom: &ArrayGeometry) -> ChannelGains {
        let bs_angle = match geom.broadside() {
            Angle::Linear(_) => Angle::Linear(self.bs_angle),
            Angle::Planar { .. } => Angle::Planar { el: 0.0, az: self.bs_angle },
        };
        ChannelGains {
            bs_angle,
            noise_var: self.noise_var,
            ..Default::default()
        }
    }

    fn problem_for(&self, geom: ArrayGeometry, levels: usize) -> Result<SynthesisProblem> {
        let mut p = SynthesisProblem::new(geom, self.region()?)?;
        if let Some(step) = self.grid_step {
            p = p.with_grid_step(step);
        }
        p.gains = self.gains(&geom);
        p.levels = levels;
        p.mode = self.mode;
        p.seed = RngStream::new(self.master_seed, "synth").seed(0);
        p.validate()?;
        Ok(p)
    }

    pub fn monte_carlo(&self) -> Result<MonteCarlo> {
        let geom = self.geometry()?;
        let roi = self.roi[0];
        let mut mc = MonteCarlo::new(geom, roi, self.snr_db.clone(), self.trials, self.master_seed);
        mc.gains = self.gains(&geom);
        Ok(mc)
    }
}

/// Files written by a run, relative to the output directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub output: PathBuf,
    pub files: Vec<String>,
    pub wall_clock_s: f64,
}

#[derive(Serialize)]
struct RunManifest<'a> {
    version: String,
    config: &'a ExperimentConfig,
    files: &'a [String],
    wall_clock_s: f64,
    notes: Vec<String>,
}

/// Collects output files in a staging directory.
struct Staging {
    dir: PathBuf,
    files: Vec<String>,
    notes: Vec<String>,
}

impl Staging {
    fn new(output: &Path) -> Result<Self> {
        let mut name = output
            .file_name()
            .ok_or_else(|| Error::invalid("output", "path has no final component"))?
            .to_os_string();
        name.push(".partial");
        let dir = output.with_file_name(name);
        if dir.exists() {
            fs::remove_dir_all(&dir)?;
        }
        fs::create_dir_all(&dir)?;
        Ok(Staging {
            dir,
            files: Vec::new(),
            notes: Vec::new(),
        })
    }

    fn write<F: FnOnce(&mut BufWriter<File>) -> Result<()>>(&mut self, name: &str, body: F) -> Result<()> {
        let mut out = BufWriter::new(File::create(self.dir.join(name))?);
        body(&mut out)?;
        out.flush()?;
        self.files.push(name.to_string());
        Ok(())
    }

    fn commit(self, output: &Path) -> Result<()> {
        fs::create_dir_all(output)?;
        for name in &self.files {
            fs::rename(self.dir.join(name), output.join(name))?;
        }
        fs::remove_dir_all(&self.dir)?;
        Ok(())
    }
}

/// Runs the experiment and writes its files under `config.output`.
pub fn run(config: &ExperimentConfig) -> Result<RunSummary> {
    config.validate()?;
    let start = Instant::now();
    let mut staging = Staging::new(&config.output)?;
    let dir = staging.dir.clone();
    let outcome = run_into(config, &mut staging).and_then(|()| {
        let wall_clock_s = start.elapsed().as_secs_f64();
        let mut files = staging.files.clone();
        files.push("manifest.json".into());
        let manifest = RunManifest {
            version: env!("CARGO_PKG_VERSION").to_string(),
            config,
            files: &files,
            wall_clock_s,
            notes: staging.notes.clone(),
        };
        staging.write("manifest.json", |out| {
            serde_json::to_writer_pretty(&mut *out, &manifest)?;
            writeln!(out)?;
            Ok(())
        })?;
        staging.commit(&config.output)?;
        Ok(RunSummary {
            output: config.output.clone(),
            files,
            wall_clock_s,
        })
    });
    if outcome.is_err() && dir.exists() {
        let _ = fs::remove_dir_all(&dir);
    }
    if let Ok(summary) = &outcome {
        info!("{:?} finished in {:.1} s", config.experiment, summary.wall_clock_s);
    }
    outcome
}

fn run_into(config: &ExperimentConfig, staging: &mut Staging) -> Result<()> {
    match config.experiment {
        ExperimentKind::Pattern => pattern(config, staging),
        ExperimentKind::LambdaSweep => lambda_sweep_rows(config, staging),
        ExperimentKind::NSweep => n_sweep(config, staging),
        ExperimentKind::LSweep => l_sweep(config, staging),
        ExperimentKind::MusicMse => music_mse(config, staging),
        ExperimentKind::Roc | ExperimentKind::FixedPfa => detection(config, staging),
    }
}

/// Angles over the whole visible range for pattern plots.
pub fn pattern_angles(geom: &ArrayGeometry) -> Result<Vec<Angle>> {
    if geom.is_planar() {
        let full = Rect {
            el: [-90.0, 90.0],
            az: [-90.0, 90.0],
        };
        make_grid_steps(&RegionOfInterest::planar(&[full])?, 1.0, 1.0)
    } else {
        make_grid(&RegionOfInterest::interval(-90.0, 90.0)?, 0.05)
    }
}

fn pattern(config: &ExperimentConfig, staging: &mut Staging) -> Result<()> {
    let problem = config.problem_for(config.geometry()?, config.levels)?;
    let sweep = synthesize(&problem, &config.lambdas, config.restarts)?;
    let best = sweep.best();
    let flatness = evaluate_flatness(&problem, &best.weights_projected, problem.eval_step)?;
    staging.write("result.csv", |out| best.write_csv(out, Some(&flatness)))?;
    let angles = pattern_angles(&problem.geometry)?;
    let powers = beam_pattern(&problem, &best.weights_projected, &angles)?;
    staging.write("pattern.csv", |out| write_pattern_csv(out, &angles, &powers))?;
    let manifest = SynthesisManifest::new(&problem, &config.lambdas, config.restarts, best);
    staging.write("synthesis.json", |out| Ok(serde_json::to_writer_pretty(out, &manifest)?))?;
    Ok(())
}

fn lambda_sweep_rows(config: &ExperimentConfig, staging: &mut Staging) -> Result<()> {
    let problem = config.problem_for(config.geometry()?, config.levels)?;
    let sweep = synthesize(&problem, &config.lambdas, config.restarts)?;
    let direct = direct_quantize_baseline(&problem)?;
    staging.write("lambda_sweep.csv", |out| {
        writeln!(out, "method,lambda,min_db_relaxed,min_db_projected,iterations,converged")?;
        for s in &sweep.stages {
            writeln!(
                out,
                "proposed,{:?},{:?},{:?},{},{}",
                s.penalty,
                s.min_db_relaxed(),
                s.min_db_projected(),
                s.iterations,
                s.converged
            )?;
        }
        writeln!(
            out,
            "direct_quantize,0.0,{:?},{:?},{},{}",
            direct.min_db_relaxed(),
            direct.min_db_projected(),
            direct.iterations,
            direct.converged
        )?;
        Ok(())
    })
}

/// Complement of a linear region within [-90, 90], with each region edge
/// pushed outward by `guard` degrees.
pub fn side_region(roi: &RegionOfInterest, guard: f64) -> Result<Vec<[f64; 2]>> {
    let RegionOfInterest::Linear { intervals } = roi else {
        return Err(Error::invalid("roi", "side regions are defined for linear regions"));
    };
    let mut out = Vec::new();
    let mut lo = -90.0;
    for iv in intervals {
        let hi = iv[0] - guard;
        if hi > lo {
            out.push([lo, hi]);
        }
        lo = iv[1] + guard;
    }
    if lo < 90.0 {
        out.push([lo, 90.0]);
    }
    Ok(out)
}

fn mean_db(powers: &[f64]) -> f64 {
    to_db(powers.iter().sum::<f64>() / powers.len() as f64)
}

fn region_stats(problem: &SynthesisProblem, sweep: &SweepResult) -> Result<(f64, f64, f64)> {
    let w = &sweep.best().weights_projected;
    let target = beam_pattern(problem, w, &problem.eval_grid()?)?;
    let (_, guard) = default_grid_steps(&problem.geometry)?;
    let side_angles: Vec<Angle> = side_region(&problem.roi, guard)?
        .iter()
        .map(|iv| make_grid(&RegionOfInterest::interval(iv[0], iv[1])?, problem.eval_step))
        .collect::<Result<Vec<_>>>()?
        .concat();
    let side = if side_angles.is_empty() {
        f64::NAN
    } else {
        mean_db(&beam_pattern(problem, w, &side_angles)?)
    };
    Ok((mean_db(&target), side, sweep.best().min_db_projected()))
}

fn n_sweep(config: &ExperimentConfig, staging: &mut Staging) -> Result<()> {
    if config.planar.is_some() {
        return Err(Error::invalid("planar", "n_sweep varies the length of a linear array"));
    }
    let mut rows = Vec::new();
    for &n in &config.n_values {
        let mut problem = config.problem_for(config.geometry_with(n)?, config.levels)?;
        problem.gains.alpha = Complex64::new(n as f64, 0.0);
        let sweep = synthesize(&problem, &config.lambdas, config.restarts)?;
        rows.push((n, region_stats(&problem, &sweep)?));
    }
    staging.notes.push("n_sweep: alpha = N so every element contributes unit power; dB values are relative to one element".into());
    staging.notes.push(
        "side region: the complement of the ROI in [-90, 90] deg, shrunk by one default grid step at each ROI edge"
            .into(),
    );
    staging.write("n_sweep.csv", |out| {
        writeln!(out, "n,target_avg_db,side_avg_db,target_min_db")?;
        for (n, (target, side, min)) in &rows {
            writeln!(out, "{n},{target:?},{side:?},{min:?}")?;
        }
        Ok(())
    })
}

fn l_sweep(config: &ExperimentConfig, staging: &mut Staging) -> Result<()> {
    let geom = config.geometry()?;
    let mut rows = Vec::new();
    for &levels in &config.l_values {
        let problem = config.problem_for(geom, levels)?;
        let sweep = synthesize(&problem, &config.lambdas, config.restarts)?;
        rows.push((levels.to_string(), "discrete", sweep.best().min_db_projected()));
    }
    let mut cmc = config.problem_for(geom, config.levels)?;
    cmc.mode = ConstraintMode::Cmc;
    let sweep = synthesize(&cmc, &config.lambdas, config.restarts)?;
    rows.push(("inf".into(), "cmc", sweep.best().min_db_projected()));
    staging.write("l_sweep.csv", |out| {
        writeln!(out, "levels,mode,min_db")?;
        for (l, mode, min) in &rows {
            writeln!(out, "{l},{mode},{min:?}")?;
        }
        Ok(())
    })
}

/// Builds the requested schedules for an estimation or detection run.
pub fn build_schedules(config: &ExperimentConfig) -> Result<Vec<(String, RisSchedule)>> {
    let geom = config.geometry()?;
    config
        .schedules
        .iter()
        .map(|&kind| {
            let schedule = match kind {
                ScheduleKind::Widebeam => {
                    let problem = config.problem_for(geom, config.levels)?;
                    wide_beam_schedule(&problem, &config.lambdas, config.slots, config.blocks)?
                }
                ScheduleKind::Sweep => {
                    let problem = config.problem_for(geom, config.levels)?;
                    let alphabet = match config.mode {
                        ConstraintMode::Discrete | ConstraintMode::Hull => Some(problem.alphabet()?),
                        ConstraintMode::Cmc | ConstraintMode::Power => None,
                    };
                    sweep_baseline_schedule(&problem.channel(), alphabet.as_ref(), config.roi[0], config.slots, config.blocks)?
                }
            };
            Ok((kind.name().to_string(), schedule))
        })
        .collect()
}

fn music_mse(config: &ExperimentConfig, staging: &mut Staging) -> Result<()> {
    let mc = config.monte_carlo()?;
    for (name, schedule) in build_schedules(config)? {
        let rows = mse_experiment(&mc, &schedule)?;
        staging.write(&format!("mse_{name}.csv"), |out| write_mse_csv(out, &rows))?;
    }
    Ok(())
}

fn detection(config: &ExperimentConfig, staging: &mut Staging) -> Result<()> {
    let mc = config.monte_carlo()?;
    let p_fa = match (config.experiment, config.p_fa.is_empty()) {
        (ExperimentKind::FixedPfa, true) => vec![0.01],
        (_, true) => default_pfa_grid(),
        (_, false) => config.p_fa.clone(),
    };
    let schedules = build_schedules(config)?;
    let rows = roc_experiment(&mc, &schedules, &config.detectors, &p_fa)?;
    staging.write("detection.csv", |out| write_detection_csv(out, &rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(json: &str) -> Result<ExperimentConfig> {
        ExperimentConfig::from_json(json)
    }

    #[test]
    fn loader_applies_defaults_and_rejects_bad_fields() {
        let c = config(r#"{"experiment": "roc", "output": "x"}"#).unwrap();
        assert_eq!(c.n, 64);
        assert_eq!((c.slots, c.blocks), (7, 4));
        assert_eq!(c.lambdas, DEFAULT_LAMBDAS.to_vec());
        assert!(config(r#"{"experiment": "roc", "output": "x", "bogus": 1}"#).is_err());
        assert!(config(r#"{"experiment": "roc", "output": "x", "trials": 0}"#).is_err());
        assert!(config(r#"{"experiment": "roc", "output": "x", "snr_db": []}"#).is_err());
        let err = config(r#"{"experiment": "pattern", "output": "x", "roi": [[30, -30]]}"#).unwrap_err();
        assert_eq!(err.to_string(), "roi: min exceeds max");
        assert!(config(r#"{"experiment": "pattern", "output": "x", "planar": [4, 4], "roi_el": [-10, 10]}"#).is_ok());
    }

    #[test]
    fn side_region_excludes_guarded_roi() {
        let roi = RegionOfInterest::parse("-30:30").unwrap();
        assert_eq!(side_region(&roi, 1.0).unwrap(), vec![[-90.0, -31.0], [31.0, 90.0]]);
        let roi = RegionOfInterest::parse("-90:0").unwrap();
        assert_eq!(side_region(&roi, 0.5).unwrap(), vec![[0.5, 90.0]]);
    }

    #[test]
    fn pattern_run_is_deterministic_and_atomic() {
        let dir = tempfile::tempdir().unwrap();
        let json = |out: &Path| {
            format!(
                r#"{{"experiment": "pattern", "n": 8, "roi": [[-20, 20]], "grid_step": 1.0, "output": {:?}}}"#,
                out
            )
        };
        let a = dir.path().join("a");
        let b = dir.path().join("b");
        let sa = run(&config(&json(&a)).unwrap()).unwrap();
        run(&config(&json(&b)).unwrap()).unwrap();
        assert!(sa.files.contains(&"pattern.csv".to_string()));
        for f in ["result.csv", "pattern.csv"] {
            assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap());
        }
        assert!(!dir.path().join("a.partial").exists());
        let manifest: serde_json::Value = serde_json::from_slice(&fs::read(a.join("manifest.json")).unwrap()).unwrap();
        assert_eq!(manifest["config"]["n"], 8);
    }

    #[test]
    fn failed_run_leaves_nothing_behind() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("bad");
        // The zero-element array is only reached after the first size is done.
        let c = config(&format!(
            r#"{{"experiment": "n_sweep", "n_values": [4, 0], "grid_step": 5.0, "output": {:?}}}"#,
            out
        ))
        .unwrap();
        assert!(run(&c).is_err());
        assert!(!out.exists());
        assert!(!dir.path().join("bad.partial").exists());
        assert!(config(r#"{"experiment": "roc", "output": "x", "slots": 1}"#).is_err());
    }
}
