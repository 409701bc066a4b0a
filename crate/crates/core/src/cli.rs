//! Command-line front end.
//!
//! Every command reads one config file (or the built-in defaults), applies
//! flag overrides and writes its outputs to a directory. Reports are TOML and
//! carry the SHA-256 of the config text so a result can be traced back to the
//! exact inputs that produced it.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::config::{config_hash, PipelineConfig};
use crate::detector::detect;
use crate::error::{Error, Result};
use crate::identifier::{exhaustive_oracle, preprocess, run_identification, GaRun, PipelineSettings};
use crate::io::{load_trajectory, save_table, save_trajectory};
use crate::morphology::MorphologyVector;
use crate::scenarios::{corrupt_record, legs_match, sensor_record, synthesize_record, Scenario};
use crate::signal::{dft_forward, filter_trajectory, power_spectrum, resample_uniform};
use crate::trajectory::{OrientationTrajectory, TimedRecord};

#[derive(Debug, Parser)]
#[command(name = "morphid", version, about = "Damage detection and morphology identification for legged robots")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Experiment config (TOML). Built-in defaults are used when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Overrides the config seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Output directory (created if missing).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Input trajectory CSV; overrides `paths.input`.
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,

    /// Morphology literal such as `[111][100][111][111][111][111]`.
    #[arg(long, global = true)]
    pub morphology: Option<String>,

    /// Named damage scenario for `scenario` and `simulate`.
    #[arg(long, global = true)]
    pub name: Option<String>,

    /// Corrupt the synthetic recording in `scenario`.
    #[arg(long, global = true)]
    pub corrupt: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Write a surrogate trajectory for a morphology.
    Simulate,
    /// Apply noise, drift, delay and rate jitter to a trajectory.
    Corrupt,
    /// Filter a trajectory and write original and filtered power spectra.
    Filter,
    /// Run the sliding-window damage detector.
    Detect,
    /// Identify the morphology behind a recording with the genetic search.
    Identify,
    /// Score every feasible morphology against a recording.
    Oracle,
    /// Synthesize a damage scenario and identify it end to end.
    Scenario,
}

impl Command {
    fn as_str(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Corrupt => "corrupt",
            Command::Filter => "filter",
            Command::Detect => "detect",
            Command::Identify => "identify",
            Command::Oracle => "oracle",
            Command::Scenario => "scenario",
        }
    }
}

/// A resolved invocation: config with overrides applied, plus run metadata.
struct Job {
    cfg: PipelineConfig,
    hash: String,
    out: PathBuf,
    command: Command,
}

#[derive(Serialize)]
struct RunInfo<'a> {
    command: &'a str,
    config_hash: &'a str,
    seed: u64,
}

fn one_based(legs: Vec<usize>) -> Vec<usize> {
    legs.into_iter().map(|l| l + 1).collect()
}

impl Job {
    fn from_cli(cli: &Cli) -> Result<Self> {
        let (mut cfg, text) = match &cli.config {
            Some(path) => PipelineConfig::load(path)?,
            None => {
                let cfg = PipelineConfig::default();
                let text = cfg.to_toml_string();
                (cfg, text)
            }
        };
        if let Some(seed) = cli.seed {
            cfg.seed = seed;
        }
        if let Some(input) = &cli.input {
            cfg.paths.input = Some(input.clone());
        }
        if let Some(m) = &cli.morphology {
            cfg.experiment.morphology = m.clone();
            cfg.experiment.scenario = None;
        }
        if let Some(name) = &cli.name {
            cfg.experiment.scenario = Some(name.clone());
        }
        if cli.corrupt {
            cfg.corruption.enabled = true;
        }
        if let Some(out) = &cli.out {
            cfg.paths.output_dir = Some(out.clone());
        }
        cfg.validate()?;
        // Flags are part of the experiment, so they are folded into the hash.
        let overrides = format!(
            "{text}\n# seed={:?} input={:?} morphology={:?} name={:?} corrupt={}",
            cli.seed, cli.input, cli.morphology, cli.name, cli.corrupt
        );
        let out = cfg.paths.output_dir.clone().unwrap_or_else(|| PathBuf::from("."));
        Ok(Job {
            cfg,
            hash: config_hash(&overrides),
            out,
            command: cli.command,
        })
    }

    fn run_info(&self) -> RunInfo<'_> {
        RunInfo {
            command: self.command.as_str(),
            config_hash: &self.hash,
            seed: self.cfg.seed,
        }
    }

    fn path(&self, file: &str) -> Result<PathBuf> {
        fs::create_dir_all(&self.out).map_err(|e| Error::io(&self.out, e))?;
        Ok(self.out.join(file))
    }

    fn input(&self) -> Result<TimedRecord> {
        let path = self.cfg.paths.input.as_ref().ok_or_else(|| {
            Error::argument(format!("`{}` needs an input trajectory (--input)", self.command.as_str()))
        })?;
        load_trajectory(path)
    }

    fn write_report<T: Serialize>(&self, file: &str, body: &T) -> Result<PathBuf> {
        #[derive(Serialize)]
        struct Report<'a, T> {
            run: RunInfo<'a>,
            #[serde(flatten)]
            body: &'a T,
        }
        let text = toml::to_string(&Report {
            run: self.run_info(),
            body,
        })
        .map_err(|e| Error::Integrity(format!("report is not serializable: {e}")))?;
        let path = self.path(file)?;
        fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        Ok(path)
    }

    fn synthesize(&self, m: &MorphologyVector) -> Result<TimedRecord> {
        let cfg = &self.cfg;
        let settings = cfg.settings()?;
        synthesize_record(&settings.model, &settings.spec, m, &settings.gait, cfg.record_shape()?, cfg.terrain())
    }
}

fn write_generations(path: &Path, run: &GaRun) -> Result<()> {
    let rows: Vec<Vec<String>> = run
        .best_per_generation
        .iter()
        .enumerate()
        .map(|(g, (m, c))| vec![g.to_string(), format!("{c:.12e}"), m.to_literal()])
        .collect();
    save_table(path, &["generation", "best_cost", "best_morphology"], rows)
}

fn write_spectrum(path: &Path, channel: &[f64], sample_rate: f64) -> Result<()> {
    let spectrum = dft_forward(channel, sample_rate)?;
    let ps = power_spectrum(&spectrum);
    let rows: Vec<Vec<String>> = (0..=spectrum.n() / 2)
        .map(|k| vec![format!("{:.12e}", spectrum.frequency(k)), format!("{:.12e}", ps[k])])
        .collect();
    save_table(path, &["freq_hz", "power"], rows)
}

#[derive(Serialize)]
struct IdentifySummary {
    motion_start_s: f64,
    identified: String,
    damaged_legs: Vec<usize>,
    final_cost: f64,
    generations: usize,
    evaluations: usize,
    wall_time_s: f64,
}

impl IdentifySummary {
    fn new(motion_start: f64, run: &GaRun) -> Self {
        let m = &run.final_candidate.morphology;
        IdentifySummary {
            motion_start_s: motion_start,
            identified: m.to_literal(),
            damaged_legs: one_based(m.damaged_legs()),
            final_cost: run.final_cost(),
            generations: run.best_per_generation.len(),
            evaluations: run.evaluations,
            wall_time_s: run.wall_time,
        }
    }
}

fn simulate(job: &Job) -> Result<String> {
    let m = job.cfg.experiment_morphology()?;
    let record = job.synthesize(&m)?;
    let path = job.path("trajectory.csv")?;
    save_trajectory(&record, &path)?;
    Ok(format!("{m}: {} samples -> {}", record.len(), path.display()))
}

fn corrupt(job: &Job) -> Result<String> {
    let record = job.input()?;
    let out = corrupt_record(&uniform(&record)?.to_record(), &job.cfg.corruption_config()?)?;
    let path = job.path("corrupted.csv")?;
    save_trajectory(&out, &path)?;
    Ok(format!("{} samples -> {}", out.len(), path.display()))
}

fn uniform(record: &TimedRecord) -> Result<OrientationTrajectory> {
    crate::identifier::uniform_from_record(record)
}

fn filter(job: &Job) -> Result<String> {
    let record = job.input()?;
    record.validate()?;
    if record.len() < 2 {
        return Err(Error::argument("record has fewer than two samples"));
    }
    let n = job.cfg.samples;
    let start = record.times[0];
    let span = record.times[record.len() - 1] - start;
    let ch = |v: &[f64]| resample_uniform(&record.times, v, start, span, n);
    let original = OrientationTrajectory::new(start, span / n as f64, ch(&record.roll)?, ch(&record.pitch)?, ch(&record.yaw)?)?;
    let filtered = filter_trajectory(&original, &job.cfg.settings()?.filter)?;
    save_trajectory(&filtered.to_record(), &job.path("filtered.csv")?)?;
    let fs = original.sample_rate();
    for (name, a, b) in [
        ("roll", &original.roll, &filtered.roll),
        ("pitch", &original.pitch, &filtered.pitch),
        ("yaw", &original.yaw, &filtered.yaw),
    ] {
        write_spectrum(&job.path(&format!("ps_{name}_original.csv"))?, a, fs)?;
        write_spectrum(&job.path(&format!("ps_{name}_filtered.csv"))?, b, fs)?;
    }
    Ok(format!("{n} samples at {fs:.3} Hz -> {}", job.out.display()))
}

fn detect_cmd(job: &Job) -> Result<String> {
    #[derive(Serialize)]
    struct Body {
        damaged: bool,
        damage_time_s: Option<f64>,
        motion_start_s: Option<f64>,
        max_fluctuation_deg: f64,
    }
    let record = job.input()?;
    let traj = uniform(&record)?;
    let report = detect(&traj, &job.cfg.detector_config())?;
    let rows: Vec<Vec<String>> = report
        .fluctuation_series
        .iter()
        .map(|(t, f)| vec![format!("{t:.6}"), format!("{:.9e}", f.to_degrees())])
        .collect();
    save_table(&job.path("fluctuation.csv")?, &["time_s", "fluctuation_deg"], rows)?;
    let path = job.write_report(
        "detection.toml",
        &Body {
            damaged: report.damaged,
            damage_time_s: report.damage_time,
            motion_start_s: report.motion_start,
            max_fluctuation_deg: report.max_fluctuation.to_degrees(),
        },
    )?;
    Ok(match report.damage_time {
        Some(t) => format!("damage detected at {t:.2} s -> {}", path.display()),
        None => format!("no damage detected -> {}", path.display()),
    })
}

fn identify(job: &Job) -> Result<String> {
    let record = job.input()?;
    let settings = job.cfg.settings()?;
    let id = run_identification(&record, &settings)?;
    write_generations(&job.path("generations.csv")?, &id.run)?;
    let summary = IdentifySummary::new(id.processed.motion_start, &id.run);
    let path = job.write_report("identification.toml", &summary)?;
    Ok(format!(
        "identified {} (damaged legs {:?}, cost {:.6}) -> {}",
        summary.identified,
        summary.damaged_legs,
        summary.final_cost,
        path.display()
    ))
}

fn oracle(job: &Job) -> Result<String> {
    #[derive(Serialize)]
    struct Body {
        source: String,
        motion_start_s: f64,
        best: String,
        best_cost: f64,
        evaluated: usize,
    }
    let settings: PipelineSettings = job.cfg.settings()?;
    let (record, source) = match job.cfg.paths.input {
        Some(ref p) => (job.input()?, p.display().to_string()),
        None => {
            let m = job.cfg.experiment_morphology()?;
            (job.synthesize(&m)?, format!("surrogate {m}"))
        }
    };
    let processed = preprocess(&record, &settings)?;
    let result = exhaustive_oracle(&processed.filtered, &settings)?;
    let rows: Vec<Vec<String>> = result
        .table
        .iter()
        .map(|(m, c)| vec![m.to_literal(), format!("{c:.12e}")])
        .collect();
    save_table(&job.path("oracle_table.csv")?, &["morphology", "cost"], rows)?;
    let path = job.write_report(
        "oracle.toml",
        &Body {
            source,
            motion_start_s: processed.motion_start,
            best: result.best.to_literal(),
            best_cost: result.cost,
            evaluated: result.table.len(),
        },
    )?;
    Ok(format!(
        "{} morphologies scored, best {} (cost {:.6}) -> {}",
        result.table.len(),
        result.best,
        result.cost,
        path.display()
    ))
}

fn scenario(job: &Job) -> Result<String> {
    #[derive(Serialize)]
    struct Body {
        scenario: String,
        truth: String,
        truth_damaged_legs: Vec<usize>,
        corrupted: bool,
        slope_deg: f64,
        legs_match: bool,
        exact_match: bool,
        #[serde(flatten)]
        identification: IdentifySummary,
    }
    let cfg = &job.cfg;
    let title = match &cfg.experiment.scenario {
        Some(name) => Scenario::by_name(name)?.title.to_string(),
        None => cfg.experiment.morphology.clone(),
    };
    let truth = cfg.experiment_morphology()?;
    let record = if cfg.corruption.enabled {
        let s = cfg.settings()?;
        let shape = cfg.record_shape()?;
        sensor_record(&s.model, &s.spec, &truth, &s.gait, shape, cfg.terrain(), &cfg.corruption_config()?)?
    } else {
        job.synthesize(&truth)?
    };
    save_trajectory(&record, &job.path("trajectory.csv")?)?;
    let id = run_identification(&record, &cfg.settings()?)?;
    write_generations(&job.path("generations.csv")?, &id.run)?;
    let found = &id.run.final_candidate.morphology;
    let body = Body {
        scenario: title.clone(),
        truth: truth.to_literal(),
        truth_damaged_legs: one_based(truth.damaged_legs()),
        corrupted: cfg.corruption.enabled,
        slope_deg: cfg.experiment.slope_deg,
        legs_match: legs_match(&truth, found),
        exact_match: truth.leg_counts() == found.leg_counts(),
        identification: IdentifySummary::new(id.processed.motion_start, &id.run),
    };
    let verdict = if body.exact_match {
        "exact"
    } else if body.legs_match {
        "legs correct"
    } else {
        "wrong"
    };
    let path = job.write_report("scenario.toml", &body)?;
    Ok(format!("{title}: truth {truth}, identified {found} ({verdict}) -> {}", path.display()))
}

/// Runs one parsed invocation and returns a one-line summary.
pub fn run(cli: &Cli) -> Result<String> {
    let job = Job::from_cli(cli)?;
    match job.command {
        Command::Simulate => simulate(&job),
        Command::Corrupt => corrupt(&job),
        Command::Filter => filter(&job),
        Command::Detect => detect_cmd(&job),
        Command::Identify => identify(&job),
        Command::Oracle => oracle(&job),
        Command::Scenario => scenario(&job),
    }
}

/// Parses `args`, runs the command and returns the process exit code:
/// 0 on success, 1 on a runtime error, 2 on a usage error.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(summary) => {
            println!("{summary}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn clap_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(main_with(["morphid", "explode"]), 2);
        assert_eq!(main_with(["morphid", "detect", "--bogus"]), 2);
        assert_eq!(main_with(["morphid"]), 2);
    }

    #[test]
    fn missing_input_is_a_runtime_error() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().to_str().unwrap();
        assert_eq!(main_with(["morphid", "detect", "--out", out]), 1);
        assert_eq!(main_with(["morphid", "simulate", "--morphology", "[101]", "--out", out]), 1);
    }
}
