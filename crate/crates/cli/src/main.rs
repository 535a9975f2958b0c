//! `trackfuse` command line: track PPM sequences, generate synthetic
//! scenes, score tracks against ground truth, and compare fusion modes.
//!
//! Exit codes: 0 on success, 1 for usage errors, 2 for data errors.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use trackfuse::config::{FusionMode, TrackerConfig};
use trackfuse::eval::{aggregate_runs, mean_center_error};
use trackfuse::fusion::BmaTracker;
use trackfuse::ppm::{read_ppm, write_ppm};
use trackfuse::records::{
    parse_track_csv, parse_truth_csv, write_track_csv, write_truth_csv, TrackRecord,
};
use trackfuse::synth::{scenario_preset, Scenario};
use trackfuse::types::{Frame, Region, StateVector};

#[derive(Parser)]
#[command(name = "trackfuse", version, about = "Feature-fusion particle-filter object tracker")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Track an object through a directory of PPM frames.
    Track {
        /// Directory of .ppm frames, ordered by file name.
        #[arg(long)]
        frames: PathBuf,
        /// Initial box as cx,cy,w,h.
        #[arg(long)]
        init: String,
        /// key=value config file; defaults apply when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output track CSV.
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a synthetic scene: frames plus truth.csv.
    Synth {
        /// Preset name: constant, confusing-color, abrupt-color-change,
        /// partial-occlusion, scale-change.
        #[arg(long)]
        scenario: String,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Score a track CSV against a truth CSV.
    Eval {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        truth: PathBuf,
        /// Output CSV of per-frame errors with a trailing mean row.
        #[arg(long)]
        out: PathBuf,
    },
    /// Mean per-frame error of one scenario across modes and seeded runs.
    Bench {
        #[arg(long)]
        scenario: String,
        /// Number of runs per mode; run r uses tracker seed r.
        #[arg(long)]
        runs: u32,
        /// Comma-separated fusion modes.
        #[arg(long, default_value = "bma,fixed-equal,color-only,texture-only")]
        modes: String,
        #[arg(long)]
        out: PathBuf,
        /// Scene noise seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

enum AppError {
    /// Bad invocation: malformed flag values, unknown names.
    Usage(String),
    /// The inputs could not be read or do not line up.
    Data(anyhow::Error),
}

impl From<anyhow::Error> for AppError {
    fn from(e: anyhow::Error) -> Self {
        AppError::Data(e)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(AppError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(AppError::Data(err)) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<(), AppError> {
    match command {
        Command::Track { frames, init, config, out } => cmd_track(&frames, &init, config.as_deref(), &out),
        Command::Synth { scenario, out, seed } => cmd_synth(&scenario, &out, seed),
        Command::Eval { pred, truth, out } => cmd_eval(&pred, &truth, &out),
        Command::Bench { scenario, runs, modes, out, seed } => {
            cmd_bench(&scenario, runs, &modes, &out, seed)
        }
    }
}

fn parse_init(init: &str) -> Result<Region, AppError> {
    let parts: Vec<&str> = init.split(',').collect();
    let bad = || AppError::Usage(format!("--init expects cx,cy,w,h, got `{init}`"));
    if parts.len() != 4 {
        return Err(bad());
    }
    let mut vals = [0.0f64; 4];
    for (v, p) in vals.iter_mut().zip(&parts) {
        *v = p.trim().parse().map_err(|_| bad())?;
    }
    Ok(Region::new(vals[0], vals[1], vals[2], vals[3]))
}

/// Frames are *.ppm files in lexicographic order; each stem must end in a
/// decimal index and the indices must be consecutive.
fn list_frame_files(dir: &Path) -> Result<Vec<PathBuf>, AppError> {
    let entries = fs::read_dir(dir)
        .with_context(|| format!("cannot read frame directory {}", dir.display()))
        .map_err(AppError::Data)?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "ppm"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(AppError::Data(anyhow!("no .ppm frames in {}", dir.display())));
    }
    let mut prev: Option<u64> = None;
    for f in &files {
        let stem = f.file_stem().and_then(|s| s.to_str()).unwrap_or("");
        let digits: String = stem.chars().rev().take_while(char::is_ascii_digit).collect();
        let idx: u64 = digits
            .chars()
            .rev()
            .collect::<String>()
            .parse()
            .map_err(|_| AppError::Data(anyhow!("frame name {stem}.ppm has no trailing index")))?;
        if let Some(p) = prev {
            if idx != p + 1 {
                return Err(AppError::Data(anyhow!(
                    "frame index gap: {p} is followed by {idx} ({})",
                    f.display()
                )));
            }
        }
        prev = Some(idx);
    }
    Ok(files)
}

fn load_frame(path: &Path, index: u32) -> Result<Frame, AppError> {
    let bytes = fs::read(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .map_err(AppError::Data)?;
    let mut frame = read_ppm(&bytes)
        .map_err(|e| AppError::Data(anyhow!("{}: {e}", path.display())))?;
    frame.index = index;
    Ok(frame)
}

fn load_config(path: Option<&Path>) -> Result<TrackerConfig, AppError> {
    match path {
        None => Ok(TrackerConfig::default()),
        Some(p) => {
            let text = fs::read_to_string(p)
                .with_context(|| format!("cannot read config {}", p.display()))
                .map_err(AppError::Data)?;
            TrackerConfig::parse(&text).map_err(|e| AppError::Data(anyhow!("{}: {e}", p.display())))
        }
    }
}

fn cmd_track(dir: &Path, init: &str, config: Option<&Path>, out: &Path) -> Result<(), AppError> {
    let init_region = parse_init(init)?;
    let cfg = load_config(config)?;
    let files = list_frame_files(dir)?;

    let f0 = load_frame(&files[0], 0)?;
    let mut tracker = BmaTracker::init(&f0, &init_region, cfg)
        .map_err(|e| AppError::Data(anyhow!("cannot initialize tracker: {e}")))?;
    let models = tracker.models().to_vec();
    let n = tracker.config().n_particles;

    let init_state = StateVector::new(
        init_region.cx,
        init_region.cy,
        0.0,
        0.0,
        init_region.w,
        init_region.h,
    );
    let mut records = vec![TrackRecord::from_init(0, &init_state, &models, n)];
    for (t, file) in files.iter().enumerate().skip(1) {
        let frame = load_frame(file, t as u32)?;
        let step = tracker
            .step(&frame)
            .map_err(|e| AppError::Data(anyhow!("step failed at frame {t}: {e}")))?;
        records.push(TrackRecord::from_step(t as u32, &step, &models));
    }
    fs::write(out, write_track_csv(&records))
        .with_context(|| format!("cannot write {}", out.display()))
        .map_err(AppError::Data)?;
    Ok(())
}

fn cmd_synth(scenario: &str, out: &Path, seed: u64) -> Result<(), AppError> {
    let mut sc = scenario_preset(scenario).map_err(|e| AppError::Usage(e.to_string()))?;
    sc.seed = seed;
    sc.validate().map_err(|e| AppError::Data(anyhow!(e)))?;
    fs::create_dir_all(out)
        .with_context(|| format!("cannot create {}", out.display()))
        .map_err(AppError::Data)?;
    for t in 0..sc.frame_count {
        let frame = sc.generate_frame(t);
        let path = out.join(format!("frame_{t:04}.ppm"));
        fs::write(&path, write_ppm(&frame))
            .with_context(|| format!("cannot write {}", path.display()))
            .map_err(AppError::Data)?;
    }
    fs::write(out.join("truth.csv"), write_truth_csv(&sc.object_path))
        .context("cannot write truth.csv")
        .map_err(AppError::Data)?;
    println!("wrote {} frames and truth.csv to {}", sc.frame_count, out.display());
    Ok(())
}

fn cmd_eval(pred: &Path, truth: &Path, out: &Path) -> Result<(), AppError> {
    let pred_text = fs::read_to_string(pred)
        .with_context(|| format!("cannot read {}", pred.display()))
        .map_err(AppError::Data)?;
    let truth_text = fs::read_to_string(truth)
        .with_context(|| format!("cannot read {}", truth.display()))
        .map_err(AppError::Data)?;
    let records = parse_track_csv(&pred_text)
        .map_err(|e| AppError::Data(anyhow!("{}: {e}", pred.display())))?;
    let boxes = parse_truth_csv(&truth_text)
        .map_err(|e| AppError::Data(anyhow!("{}: {e}", truth.display())))?;
    let summary = mean_center_error(&records, &boxes).map_err(|e| AppError::Data(anyhow!(e)))?;

    let mut text = String::from("frame,center_error\n");
    for (r, e) in records.iter().zip(&summary.per_frame) {
        let _ = writeln!(text, "{},{:.6}", r.frame, e);
    }
    let _ = writeln!(text, "mean,{:.6}", summary.mean);
    fs::write(out, text)
        .with_context(|| format!("cannot write {}", out.display()))
        .map_err(AppError::Data)?;
    println!("mean_center_error={:.6}", summary.mean);
    Ok(())
}

fn parse_modes(modes: &str) -> Result<Vec<FusionMode>, AppError> {
    let mut parsed = Vec::new();
    for name in modes.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let mode: FusionMode = name
            .parse()
            .map_err(|_| AppError::Usage(format!("unknown fusion mode `{name}`")))?;
        if !parsed.contains(&mode) {
            parsed.push(mode);
        }
    }
    if parsed.is_empty() {
        return Err(AppError::Usage("--modes lists no fusion modes".into()));
    }
    Ok(parsed)
}

fn cmd_bench(scenario: &str, runs: u32, modes: &str, out: &Path, seed: u64) -> Result<(), AppError> {
    if runs == 0 {
        return Err(AppError::Usage("--runs must be at least 1".into()));
    }
    let modes = parse_modes(modes)?;
    let mut sc = scenario_preset(scenario).map_err(|e| AppError::Usage(e.to_string()))?;
    sc.seed = seed;
    let frames = render_scene(&sc).map_err(AppError::Data)?;

    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(modes.len());
    for mode in &modes {
        let mut per_run = Vec::with_capacity(runs as usize);
        for run in 0..runs {
            let cfg = TrackerConfig {
                fusion_mode: *mode,
                rng_seed: u64::from(run),
                ..TrackerConfig::default()
            };
            per_run.push(run_once(&sc, &frames, cfg).map_err(AppError::Data)?);
        }
        let curve = aggregate_runs(&per_run);
        let overall = curve.iter().sum::<f64>() / curve.len() as f64;
        println!("{mode}: mean error {overall:.3} px over {runs} runs");
        columns.push(curve);
    }

    let mut text = String::from("frame");
    for mode in &modes {
        let _ = write!(text, ",{mode}");
    }
    text.push('\n');
    for t in 0..sc.frame_count as usize {
        let _ = write!(text, "{t}");
        for col in &columns {
            let _ = write!(text, ",{:.6}", col[t]);
        }
        text.push('\n');
    }
    fs::write(out, text)
        .with_context(|| format!("cannot write {}", out.display()))
        .map_err(AppError::Data)?;
    Ok(())
}

fn render_scene(sc: &Scenario) -> anyhow::Result<Vec<Frame>> {
    sc.validate()?;
    Ok((0..sc.frame_count).map(|t| sc.generate_frame(t)).collect())
}

/// One seeded tracking run over pre-rendered frames; returns the per-frame
/// center error, starting with the init frame (error 0 by construction).
fn run_once(sc: &Scenario, frames: &[Frame], cfg: TrackerConfig) -> anyhow::Result<Vec<f64>> {
    let mut tracker = BmaTracker::init(&frames[0], &sc.truth(0), cfg)?;
    let mut errors = Vec::with_capacity(frames.len());
    errors.push(0.0);
    for frame in &frames[1..] {
        let step = tracker.step(frame)?;
        let truth = sc.truth(frame.index);
        errors.push(
            ((step.estimate.x - truth.cx).powi(2) + (step.estimate.y - truth.cy).powi(2)).sqrt(),
        );
    }
    Ok(errors)
}
