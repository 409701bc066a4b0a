//! End-to-end identification: locate the start of locomotion in a recorded
//! trace, cut and condition the comparison window, then search morphologies
//! whose simulated and identically conditioned orientation matches it best.

use super::cost::evaluate_cost;
use super::ga::{run_ga, GaConfig, GaRun, Objective};
use super::oracle::{exhaustive_search, OracleResult};
use crate::detector::{detect, fit_motion_onset, DetectorConfig};
use crate::error::{Error, Result, STATICALLY_UNSUPPORTABLE};
use crate::morphology::{MorphologyVector, RobotSpec, DEFAULT_ENUMERATION_CAP};
use crate::signal::{filter_trajectory, interpolate_onto, resample_uniform, FilterConfig};
use crate::surrogate::{GaitParams, SurrogateModel};
use crate::trajectory::{OrientationTrajectory, TimedRecord};

/// Everything the pipeline needs besides the recording.
#[derive(Debug, Clone)]
pub struct PipelineSettings {
    pub spec: RobotSpec,
    pub gait: GaitParams,
    pub ga: GaConfig,
    pub filter: FilterConfig,
    pub detector: DetectorConfig,
    pub model: SurrogateModel,
    /// Points on the comparison grid; a power of two.
    pub samples: usize,
    /// Width of the moving average applied before locating motion, seconds.
    /// Zero disables smoothing.
    pub motion_smoothing: f64,
    pub enumeration_cap: u64,
}

impl Default for PipelineSettings {
    fn default() -> Self {
        PipelineSettings {
            spec: RobotSpec::default(),
            gait: GaitParams::default(),
            ga: GaConfig::default(),
            filter: FilterConfig::default(),
            detector: DetectorConfig::default(),
            model: SurrogateModel::default(),
            samples: 1024,
            motion_smoothing: 0.2,
            enumeration_cap: DEFAULT_ENUMERATION_CAP,
        }
    }
}

impl PipelineSettings {
    pub fn validate(&self) -> Result<()> {
        self.spec.validate()?;
        self.gait.validate(&self.spec)?;
        self.ga.validate(&self.spec)?;
        self.filter.validate()?;
        self.detector.validate()?;
        self.model.params.validate()?;
        if self.samples < 16 || !self.samples.is_power_of_two() {
            return Err(Error::Config(format!(
                "comparison grid of {} points is not a power of two >= 16",
                self.samples
            )));
        }
        if !(self.motion_smoothing >= 0.0) {
            return Err(Error::Config("motion smoothing must be non-negative".into()));
        }
        Ok(())
    }
}

/// The recorded comparison window, before and after filtering.
#[derive(Debug, Clone)]
pub struct Preprocessed {
    pub motion_start: f64,
    pub window: OrientationTrajectory,
    pub filtered: OrientationTrajectory,
}

fn median_interval(times: &[f64]) -> f64 {
    let mut d: Vec<f64> = times.windows(2).map(|w| w[1] - w[0]).collect();
    d.sort_by(f64::total_cmp);
    d[d.len() / 2]
}

fn moving_average(x: &[f64], width: usize) -> Vec<f64> {
    if width <= 1 {
        return x.to_vec();
    }
    let half = width / 2;
    let mut prefix = Vec::with_capacity(x.len() + 1);
    prefix.push(0.0);
    for v in x {
        prefix.push(prefix.last().unwrap() + v);
    }
    (0..x.len())
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half + 1).min(x.len());
            (prefix[hi] - prefix[lo]) / (hi - lo) as f64
        })
        .collect()
}

/// Resamples a record onto a uniform grid at its median sample spacing.
pub fn uniform_from_record(record: &TimedRecord) -> Result<OrientationTrajectory> {
    record.validate()?;
    if record.len() < 2 {
        return Err(Error::argument("record has fewer than two samples"));
    }
    let dt = median_interval(&record.times);
    let first = record.times[0];
    let span = record.times[record.len() - 1] - first;
    let n = (span / dt + 1e-9).floor() as usize + 1;
    let grid: Vec<f64> = (0..n).map(|k| first + k as f64 * dt).collect();
    let ch = |v: &[f64]| interpolate_onto(&record.times, v, &grid);
    OrientationTrajectory::new(first, dt, ch(&record.roll)?, ch(&record.pitch)?, ch(&record.yaw)?)
}

/// Estimates when locomotion starts, to the sample.
pub fn locate_motion_start(record: &TimedRecord, settings: &PipelineSettings) -> Result<f64> {
    let uniform = uniform_from_record(record)?;
    let width = (settings.motion_smoothing / uniform.dt).round() as usize;
    let smoothed = OrientationTrajectory {
        roll: moving_average(&uniform.roll, width),
        pitch: moving_average(&uniform.pitch, width),
        yaw: moving_average(&uniform.yaw, width),
        ..uniform.clone()
    };
    let report = detect(&smoothed, &settings.detector)?;
    let coarse = report
        .motion_start
        .ok_or_else(|| Error::Pipeline("no locomotion found in the recording".into()))?;
    // The first moving window holds the onset; centered smoothing can move it
    // by half its width either way.
    let slack = settings.motion_smoothing / 2.0 + uniform.dt;
    let rest_end = coarse - settings.detector.window - slack;
    fit_motion_onset(&uniform, rest_end, coarse + slack, settings.detector.window)
}

/// Cuts `sim_time` seconds from `start`, resamples and filters them.
pub fn condition_window(record: &TimedRecord, start: f64, settings: &PipelineSettings) -> Result<Preprocessed> {
    let duration = settings.ga.sim_time;
    let n = settings.samples;
    let ch = |v: &[f64]| resample_uniform(&record.times, v, start, duration, n);
    let window = OrientationTrajectory::new(
        0.0,
        duration / n as f64,
        ch(&record.roll)?,
        ch(&record.pitch)?,
        ch(&record.yaw)?,
    )?;
    let filtered = filter_trajectory(&window, &settings.filter)?;
    Ok(Preprocessed {
        motion_start: start,
        window,
        filtered,
    })
}

/// Motion detection followed by window conditioning.
pub fn preprocess(record: &TimedRecord, settings: &PipelineSettings) -> Result<Preprocessed> {
    settings.validate()?;
    let start = locate_motion_start(record, settings)?;
    let end = record.times.last().copied().unwrap_or(start);
    if start + settings.ga.sim_time > end + 1e-9 {
        return Err(Error::Pipeline(format!(
            "only {:.3} s of walking recorded after motion start at {start:.3} s; {} s required",
            end - start,
            settings.ga.sim_time
        )));
    }
    condition_window(record, start, settings)
}

/// Simulates a candidate, filters it like the recording and scores the mismatch.
/// Morphologies the simulator cannot stand up score +inf.
pub struct SimulationObjective<'a> {
    pub settings: &'a PipelineSettings,
    pub target: &'a OrientationTrajectory,
}

impl SimulationObjective<'_> {
    pub fn filtered_simulation(&self, m: &MorphologyVector) -> Result<OrientationTrajectory> {
        let s = self.settings;
        let sim = s.model.simulate(&s.spec, m, &s.gait, s.ga.sim_time, s.samples, None)?;
        filter_trajectory(&sim, &s.filter)
    }
}

impl Objective for SimulationObjective<'_> {
    fn cost(&self, m: &MorphologyVector) -> Result<f64> {
        match self.filtered_simulation(m) {
            Ok(sim) => evaluate_cost(&sim, self.target),
            Err(Error::Simulation { tag, .. }) if tag == STATICALLY_UNSUPPORTABLE => Ok(f64::INFINITY),
            Err(e) => Err(e),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Identification {
    pub processed: Preprocessed,
    pub run: GaRun,
}

pub fn run_identification(record: &TimedRecord, settings: &PipelineSettings) -> Result<Identification> {
    let processed = preprocess(record, settings)?;
    let objective = SimulationObjective {
        settings,
        target: &processed.filtered,
    };
    let run = run_ga(&settings.spec, &settings.ga, &objective)?;
    Ok(Identification { processed, run })
}

/// Brute-force minimum over every feasible morphology for an already
/// conditioned recording.
pub fn exhaustive_oracle(exp_processed: &OrientationTrajectory, settings: &PipelineSettings) -> Result<OracleResult> {
    settings.validate()?;
    let objective = SimulationObjective {
        settings,
        target: exp_processed,
    };
    exhaustive_search(&settings.spec, &objective, settings.enumeration_cap)
}
