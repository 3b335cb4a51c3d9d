//! The `risbeam` command line.
//!
//! Exit codes: 0 on success, 1 for bad flags or input (the message names
//! the flag), 2 when a numerical routine fails (the message names the
//! module and, for synthesis, the MM iteration).

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::warn;

use crate::array::{beamwidth, Angle, ArrayGeometry, Channel, ChannelGains};
use crate::detect::{default_pfa_grid, roc_experiment, sweep_baseline_schedule, sweep_centers, write_detection_csv, Detector};
use crate::error::{Error, Result};
use crate::harness::{self, build_schedules, pattern_angles, ExperimentConfig, ExperimentKind, ScheduleKind};
use crate::music::{mse_experiment, write_mse_csv, DEFAULT_BLOCKS, DEFAULT_SLOTS};
use crate::phase::ConstraintMode;
use crate::synth::{
    beam_pattern, evaluate_flatness, synthesize, write_pattern_csv, Rect, RegionOfInterest, SlotCombining,
    SynthesisManifest, SynthesisProblem, DEFAULT_EPSILON, DEFAULT_MAX_ITERS,
};

/// Environment variable that sets the worker thread count.
pub const THREADS_ENV: &str = "RISBEAM_THREADS";

#[derive(Debug, Parser)]
#[command(name = "risbeam", version, about = "Wide-beam RIS phase synthesis, angle estimation and detection")]
pub struct Cli {
    /// Worker threads for Monte Carlo and restarts.
    #[arg(long, global = true, env = THREADS_ENV)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Max-min beam synthesis; writes result.csv and manifest.json.
    Synthesize(SynthArgs),
    /// Synthesis plus the beam pattern over the visible range.
    Pattern(SynthArgs),
    /// Main-lobe widths of a uniform array at several drop levels.
    BeamwidthTable(BeamwidthArgs),
    /// MUSIC angle-estimation MSE against SNR.
    Music(MonteCarloArgs),
    /// GLRT and energy detector ROC points.
    Detect(DetectArgs),
    /// The beam-sweeping schedule and its per-slot patterns.
    SweepBaseline(SweepArgs),
    /// Run an experiment described by a JSON config.
    RunConfig(RunConfigArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Discrete,
    Cmc,
    Power,
    Hull,
}

impl From<ModeArg> for ConstraintMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Discrete => ConstraintMode::Discrete,
            ModeArg::Cmc => ConstraintMode::Cmc,
            ModeArg::Power => ConstraintMode::Power,
            ModeArg::Hull => ConstraintMode::Hull,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CombiningArg {
    Coherent,
    Incoherent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScheduleArg {
    Widebeam,
    Sweep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DetectorArg {
    Glrt,
    GlrtOracle,
    Energy,
}

#[derive(Debug, Clone, Args)]
pub struct ArrayArgs {
    /// Elements of a linear array.
    #[arg(long, default_value_t = 128)]
    pub n: usize,
    /// Planar array as ROWSxCOLS (overrides --n).
    #[arg(long, value_parser = parse_planar)]
    pub planar: Option<(usize, usize)>,
    /// Element spacing in wavelengths.
    #[arg(long, default_value_t = 0.5)]
    pub spacing: f64,
    /// BS direction in degrees (azimuth for planar arrays).
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub bs_angle: f64,
    /// Quantization levels L of the phase alphabet.
    #[arg(long, default_value_t = 4)]
    pub levels: usize,
    /// Region of interest as lo:hi[,lo:hi...] in degrees (azimuth for planar arrays).
    #[arg(long, default_value = "-30:30", allow_hyphen_values = true)]
    pub roi: String,
    /// Elevation range lo:hi of a planar region.
    #[arg(long, allow_hyphen_values = true)]
    pub roi_el: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    #[command(flatten)]
    pub array: ArrayArgs,
    #[arg(long, value_enum, default_value = "discrete")]
    pub mode: ModeArg,
    /// Penalty weights, run in order with warm starts (relative to |αβ|²/N²).
    #[arg(long, value_delimiter = ',', default_values_t = crate::synth::DEFAULT_LAMBDAS)]
    pub lambda: Vec<f64>,
    /// Independent random restarts; the best is kept.
    #[arg(long, default_value_t = 1)]
    pub restarts: usize,
    /// Time slots optimised jointly.
    #[arg(long, default_value_t = 1)]
    pub slots: usize,
    #[arg(long, value_enum, default_value = "coherent")]
    pub combining: CombiningArg,
    /// Grid step in degrees; the −0.5 dB main-lobe width (at most 0.1°) when absent.
    #[arg(long)]
    pub grid_step: Option<f64>,
    /// Stopping threshold on the objective gain, relative to |αβ|².
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    pub epsilon: f64,
    #[arg(long, default_value_t = DEFAULT_MAX_ITERS)]
    pub max_iters: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct BeamwidthArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [64usize, 100, 128, 256])]
    pub n: Vec<usize>,
    /// Power drops in dB below the peak.
    #[arg(long, value_delimiter = ',', default_values_t = [3.0, 1.0, 0.5])]
    pub drop_db: Vec<f64>,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct MonteCarloArgs {
    #[command(flatten)]
    pub array: ArrayArgs,
    /// SNR |αβ|²/(Nσ²) in dB: the mean per-sample SNR of a random-phase configuration.
    #[arg(long, value_delimiter = ',', default_values_t = [-10.0, 0.0, 10.0], allow_hyphen_values = true)]
    pub snr: Vec<f64>,
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    /// Slots T per block.
    #[arg(long, default_value_t = DEFAULT_SLOTS)]
    pub slots: usize,
    /// Blocks Q.
    #[arg(long, default_value_t = DEFAULT_BLOCKS)]
    pub blocks: usize,
    #[arg(long, value_enum, value_delimiter = ',', default_values = ["widebeam", "sweep"])]
    pub schedule: Vec<ScheduleArg>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct DetectArgs {
    #[command(flatten)]
    pub mc: MonteCarloArgs,
    #[arg(long, value_enum, value_delimiter = ',', default_values = ["glrt", "glrt-oracle", "energy"])]
    pub detector: Vec<DetectorArg>,
    /// False-alarm rates; a log grid from 1e-3 to 0.9 when absent.
    #[arg(long, value_delimiter = ',')]
    pub p_fa: Vec<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub array: ArrayArgs,
    #[arg(long, default_value_t = DEFAULT_SLOTS)]
    pub slots: usize,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct RunConfigArgs {
    /// JSON experiment config.
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides the config's output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_planar(s: &str) -> std::result::Result<(usize, usize), String> {
    let (r, c) = s.split_once('x').ok_or("expected ROWSxCOLS")?;
    let r = r.parse().map_err(|_| format!("bad row count '{r}'"))?;
    let c = c.parse().map_err(|_| format!("bad column count '{c}'"))?;
    Ok((r, c))
}

fn parse_range(field: &'static str, s: &str) -> Result<[f64; 2]> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| Error::invalid(field, format!("expected lo:hi, got '{s}'")))?;
    let num = |v: &str| v.trim().parse::<f64>().map_err(|_| Error::invalid(field, format!("'{v}' is not a number")));
    Ok([num(lo)?, num(hi)?])
}

impl ArrayArgs {
    fn geometry(&self) -> Result<ArrayGeometry> {
        match self.planar {
            Some((r, c)) => ArrayGeometry::upa(r, c, self.spacing),
            None => ArrayGeometry::ula(self.n, self.spacing),
        }
    }

    fn gains(&self, geom: &ArrayGeometry) -> ChannelGains {
        let bs_angle = if geom.is_planar() {
            Angle::Planar { el: 0.0, az: self.bs_angle }
        } else {
            Angle::Linear(self.bs_angle)
        };
        ChannelGains {
            bs_angle,
            ..Default::default()
        }
    }

    fn region(&self) -> Result<RegionOfInterest> {
        let linear = RegionOfInterest::parse(&self.roi)?;
        match (self.planar, &self.roi_el) {
            (None, None) => Ok(linear),
            (None, Some(_)) => Err(Error::invalid("roi-el", "only planar arrays take an elevation range")),
            (Some(_), el) => {
                let el = el.as_deref().map(|s| parse_range("roi-el", s)).transpose()?.unwrap_or([0.0, 0.0]);
                let RegionOfInterest::Linear { intervals } = linear else { unreachable!() };
                RegionOfInterest::planar(&intervals.into_iter().map(|az| Rect { el, az }).collect::<Vec<_>>())
            }
        }
    }

    fn single_interval(&self) -> Result<[f64; 2]> {
        match self.region()? {
            RegionOfInterest::Linear { intervals } if intervals.len() == 1 && self.planar.is_none() => Ok(intervals[0]),
            _ => Err(Error::invalid("roi", "this command needs one interval on a linear array")),
        }
    }
}

impl SynthArgs {
    fn problem(&self) -> Result<SynthesisProblem> {
        let geom = self.array.geometry()?;
        let mut p = SynthesisProblem::new(geom, self.array.region()?)?;
        if let Some(step) = self.grid_step {
            p = p.with_grid_step(step);
        }
        p.gains = self.array.gains(&geom);
        p.levels = self.array.levels;
        p.mode = self.mode.into();
        p.slots = self.slots;
        p.combining = match self.combining {
            CombiningArg::Coherent => SlotCombining::Coherent,
            CombiningArg::Incoherent => SlotCombining::Incoherent,
        };
        p.epsilon = self.epsilon;
        p.max_iters = self.max_iters;
        p.seed = self.seed;
        p.validate()?;
        if self.restarts == 0 {
            return Err(Error::invalid("restarts", "need at least one restart"));
        }
        if self.lambda.is_empty() {
            return Err(Error::invalid("lambda", "empty penalty list"));
        }
        Ok(p)
    }
}

impl MonteCarloArgs {
    fn config(&self, experiment: ExperimentKind) -> Result<ExperimentConfig> {
        let roi = self.array.single_interval()?;
        let config = ExperimentConfig {
            experiment,
            n: self.array.n,
            planar: None,
            spacing: self.array.spacing,
            levels: self.array.levels,
            mode: ConstraintMode::Discrete,
            roi: vec![roi],
            roi_el: None,
            lambdas: crate::synth::DEFAULT_LAMBDAS.to_vec(),
            restarts: 1,
            grid_step: None,
            n_values: vec![self.array.n],
            l_values: vec![self.array.levels],
            schedules: self
                .schedule
                .iter()
                .map(|s| match s {
                    ScheduleArg::Widebeam => ScheduleKind::Widebeam,
                    ScheduleArg::Sweep => ScheduleKind::Sweep,
                })
                .collect(),
            detectors: Detector::ALL.to_vec(),
            slots: self.slots,
            blocks: self.blocks,
            snr_db: self.snr.clone(),
            p_fa: Vec::new(),
            trials: self.trials,
            master_seed: self.seed,
            noise_var: 1.0,
            bs_angle: self.array.bs_angle,
            output: self.out.clone(),
        };
        config.validate()?;
        Ok(config)
    }
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    fs::create_dir_all(dir)?;
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn synthesize_cmd(args: &SynthArgs, with_pattern: bool) -> Result<()> {
    let problem = args.problem()?;
    let sweep = synthesize(&problem, &args.lambda, args.restarts)?;
    let best = sweep.best();
    let flatness = evaluate_flatness(&problem, &best.weights_projected, problem.eval_step)?;
    let mut out = create(&args.out, "result.csv")?;
    best.write_csv(&mut out, Some(&flatness))?;
    out.flush()?;
    let manifest = SynthesisManifest::new(&problem, &args.lambda, args.restarts, best);
    let mut out = create(&args.out, "manifest.json")?;
    serde_json::to_writer_pretty(&mut out, &manifest)?;
    writeln!(out)?;
    out.flush()?;
    if with_pattern {
        let angles = pattern_angles(&problem.geometry)?;
        let powers = beam_pattern(&problem, &best.weights_projected, &angles)?;
        let mut out = create(&args.out, "pattern.csv")?;
        write_pattern_csv(&mut out, &angles, &powers)?;
        out.flush()?;
    }
    println!(
        "lambda {} min power {:.2} dB (relaxed {:.2} dB), ripple {:.2} dB, {} iterations",
        best.penalty,
        best.min_db_projected(),
        best.min_db_relaxed(),
        flatness.ripple_db,
        best.iterations
    );
    Ok(())
}

fn beamwidth_cmd(args: &BeamwidthArgs) -> Result<()> {
    let mut text = String::from("n,drop_db,width_deg\n");
    for &n in &args.n {
        for &drop in &args.drop_db {
            text.push_str(&format!("{n},{drop},{:.4}\n", beamwidth(n, drop)?));
        }
    }
    match &args.out {
        Some(path) => fs::write(path, text)?,
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn music_cmd(args: &MonteCarloArgs) -> Result<()> {
    let config = args.config(ExperimentKind::MusicMse)?;
    let mc = config.monte_carlo()?;
    for (name, schedule) in build_schedules(&config)? {
        let rows = mse_experiment(&mc, &schedule)?;
        let mut out = create(&args.out, &format!("mse_{name}.csv"))?;
        write_mse_csv(&mut out, &rows)?;
        out.flush()?;
        for r in rows {
            println!("{name} snr {} dB: mse {:.3e} deg²", r.snr_db, r.mse_deg2);
        }
    }
    Ok(())
}

fn detect_cmd(args: &DetectArgs) -> Result<()> {
    let mut config = args.mc.config(ExperimentKind::Roc)?;
    config.detectors = args
        .detector
        .iter()
        .map(|d| match d {
            DetectorArg::Glrt => Detector::Glrt,
            DetectorArg::GlrtOracle => Detector::GlrtOracle,
            DetectorArg::Energy => Detector::Energy,
        })
        .collect();
    config.p_fa = args.p_fa.clone();
    config.validate()?;
    let p_fa = if config.p_fa.is_empty() { default_pfa_grid() } else { config.p_fa.clone() };
    let mc = config.monte_carlo()?;
    let rows = roc_experiment(&mc, &build_schedules(&config)?, &config.detectors, &p_fa)?;
    let mut out = create(&args.mc.out, "detection.csv")?;
    write_detection_csv(&mut out, &rows)?;
    out.flush()?;
    println!("{} rows written to {}", rows.len(), args.mc.out.join("detection.csv").display());
    Ok(())
}

fn sweep_cmd(args: &SweepArgs) -> Result<()> {
    let roi = args.array.single_interval()?;
    let geom = args.array.geometry()?;
    let channel = Channel::new(geom, args.array.gains(&geom))?;
    let alphabet = crate::phase::PhaseAlphabet::new(args.array.levels)?;
    let schedule = sweep_baseline_schedule(&channel, Some(&alphabet), roi, args.slots, DEFAULT_BLOCKS)?;
    let centers = sweep_centers(roi, args.slots);
    let mut out = create(&args.out, "sweep_schedule.csv")?;
    writeln!(out, "slot,center_deg,index,re,im,phase_index")?;
    for (t, (col, c)) in schedule.columns.iter().zip(&centers).enumerate() {
        for (i, w) in col.iter().enumerate() {
            writeln!(out, "{t},{c:?},{i},{:?},{:?},{}", w.re, w.im, alphabet.nearest_index(*w)?)?;
        }
    }
    out.flush()?;
    let angles = pattern_angles(&geom)?;
    let mut out = create(&args.out, "sweep_pattern.csv")?;
    writeln!(out, "slot,angle_deg,power_db")?;
    for (t, col) in schedule.columns.iter().enumerate() {
        let powers = crate::array::beam_power(&channel, col, &angles)?;
        for (a, p) in angles.iter().zip(powers) {
            writeln!(out, "{t},{:?},{:?}", a.theta(), crate::array::to_db(p))?;
        }
    }
    out.flush()?;
    println!("{} beams at {:?}", args.slots, centers);
    Ok(())
}

fn run_config_cmd(args: &RunConfigArgs) -> Result<()> {
    let mut config = ExperimentConfig::load(&args.config)?;
    if let Some(out) = &args.out {
        config.output = out.clone();
    }
    let summary = harness::run(&config)?;
    println!("wrote {} to {}", summary.files.join(", "), summary.output.display());
    Ok(())
}

/// Module a numerical failure came from, for exit-code diagnostics.
fn failing_module(e: &Error) -> &'static str {
    match e {
        Error::Lp { .. } => "synth",
        Error::Eigen(_) => "music",
        Error::NonConvergent(_) => "detect",
        _ => "risbeam",
    }
}

pub fn execute(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Synthesize(a) => synthesize_cmd(a, false),
        Command::Pattern(a) => synthesize_cmd(a, true),
        Command::BeamwidthTable(a) => beamwidth_cmd(a),
        Command::Music(a) => music_cmd(a),
        Command::Detect(a) => detect_cmd(a),
        Command::SweepBaseline(a) => sweep_cmd(a),
        Command::RunConfig(a) => run_config_cmd(a),
    }
}

fn configure_threads(threads: Option<usize>) {
    if let Some(n) = threads.filter(|&n| n > 0) {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            warn!("could not set thread count: {e}");
        }
    }
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    configure_threads(cli.threads);
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) if e.is_numerical() => {
            eprintln!("error: {}: {e}", failing_module(&e));
            2
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
