//! Named damage scenarios and synthetic recordings built from the surrogate.

use crate::error::{Error, Result};
use crate::morphology::{MorphologyVector, RobotSpec};
use crate::signal::{corrupt_trajectory, CorruptionConfig};
use crate::surrogate::{GaitParams, SurrogateModel, TerrainBias};
use crate::trajectory::TimedRecord;

/// A damage case for the default hexapod.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Scenario {
    pub name: &'static str,
    pub title: &'static str,
    pub morphology: &'static str,
    /// Runs this case gets in the 18-run corrupted suite.
    pub suite_runs: usize,
}

pub const SCENARIOS: [Scenario; 8] = [
    Scenario { name: "leg-3-missed", title: "Leg 3 missed", morphology: "[111][111][000][111][111][111]", suite_runs: 2 },
    Scenario { name: "leg-5-missed", title: "Leg 5 missed", morphology: "[111][111][111][111][000][111]", suite_runs: 2 },
    Scenario { name: "legs-1-4-missed", title: "Legs 1 & 4 missed", morphology: "[100][111][111][100][111][111]", suite_runs: 4 },
    Scenario { name: "legs-3-4-missed", title: "Legs 3 & 4 missed", morphology: "[111][111][000][000][111][111]", suite_runs: 2 },
    Scenario {
        name: "legs-3-4-two-last-links-missed",
        title: "Legs 3 & 4 two last links missed",
        morphology: "[111][111][100][100][111][111]",
        suite_runs: 2,
    },
    Scenario {
        name: "legs-3-4-last-link-missed",
        title: "Legs 3 & 4 last link missed",
        morphology: "[111][111][110][110][111][111]",
        suite_runs: 2,
    },
    Scenario { name: "legs-4-5-missed", title: "Legs 4 & 5 missed", morphology: "[111][111][111][000][000][111]", suite_runs: 2 },
    Scenario { name: "legs-2-3-missed", title: "Legs 2 & 3 missed", morphology: "[111][000][000][111][111][111]", suite_runs: 2 },
];

impl Scenario {
    pub fn by_name(name: &str) -> Result<&'static Scenario> {
        SCENARIOS.iter().find(|s| s.name == name).ok_or_else(|| {
            let known: Vec<_> = SCENARIOS.iter().map(|s| s.name).collect();
            Error::argument(format!("unknown scenario {name:?}; known: {}", known.join(", ")))
        })
    }

    pub fn truth(&self, spec: &RobotSpec) -> Result<MorphologyVector> {
        MorphologyVector::parse_for(self.morphology, spec)
    }
}

/// Leg-level agreement: every leg is damaged in `found` exactly when it is
/// damaged in `truth`, and the remaining link counts differ by at most one.
pub fn legs_match(truth: &MorphologyVector, found: &MorphologyVector) -> bool {
    truth.leg_sizes() == found.leg_sizes()
        && truth
            .leg_counts()
            .iter()
            .zip(found.leg_counts())
            .zip(truth.leg_sizes())
            .all(|((&t, f), &n)| (t == n) == (f == n) && t.abs_diff(f) <= 1)
}

/// Shape of a synthetic recording: the robot rests in its initial pose for
/// `lead_in` seconds, then walks for `walk` seconds, sampled every `dt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecordShape {
    pub lead_in: f64,
    pub walk: f64,
    pub dt: f64,
}

impl Default for RecordShape {
    /// Sampled on the comparison grid of a 5 s, 1024-point window.
    fn default() -> Self {
        RecordShape {
            lead_in: 1.0,
            walk: 6.0,
            dt: 5.0 / 1024.0,
        }
    }
}

/// Surrogate walk preceded by a motionless lead-in at the starting pose.
pub fn synthesize_record(
    model: &SurrogateModel,
    spec: &RobotSpec,
    m: &MorphologyVector,
    gait: &GaitParams,
    shape: RecordShape,
    terrain: Option<TerrainBias>,
) -> Result<TimedRecord> {
    if !(shape.dt > 0.0 && shape.lead_in >= 0.0 && shape.walk > 0.0) {
        return Err(Error::argument("record shape needs dt > 0, lead_in >= 0, walk > 0"));
    }
    let walk_n = (shape.walk / shape.dt).round() as usize;
    let lead_n = (shape.lead_in / shape.dt).round() as usize;
    let sim = model.simulate(spec, m, gait, walk_n as f64 * shape.dt, walk_n, terrain)?;
    let total = lead_n + walk_n;
    let mut rec = TimedRecord {
        times: (0..total).map(|i| i as f64 * shape.dt).collect(),
        ..TimedRecord::default()
    };
    for (dst, src) in [
        (&mut rec.roll, &sim.roll),
        (&mut rec.pitch, &sim.pitch),
        (&mut rec.yaw, &sim.yaw),
    ] {
        dst.extend(std::iter::repeat_n(src[0], lead_n));
        dst.extend_from_slice(src);
    }
    Ok(rec)
}

/// Applies the corruption harness to a record on a uniform grid.
pub fn corrupt_record(record: &TimedRecord, cfg: &CorruptionConfig) -> Result<TimedRecord> {
    let dt = record.times.get(1).zip(record.times.first()).map(|(b, a)| b - a).unwrap_or(1.0);
    let traj = crate::trajectory::OrientationTrajectory::new(
        record.times.first().copied().unwrap_or(0.0),
        dt,
        record.roll.clone(),
        record.pitch.clone(),
        record.yaw.clone(),
    )?;
    corrupt_trajectory(&traj, cfg)
}

/// A synthetic recording as a jittery sensor would deliver it: sampled at
/// the sensor's mean rate, then corrupted. Without jitter the shape's own
/// spacing is kept.
pub fn sensor_record(
    model: &SurrogateModel,
    spec: &RobotSpec,
    m: &MorphologyVector,
    gait: &GaitParams,
    shape: RecordShape,
    terrain: Option<TerrainBias>,
    cfg: &CorruptionConfig,
) -> Result<TimedRecord> {
    let shape = match cfg.jitter {
        Some(j) => RecordShape {
            dt: j.mean_interval(),
            ..shape
        },
        None => shape,
    };
    corrupt_record(&synthesize_record(model, spec, m, gait, shape, terrain)?, cfg)
}

/// Noise seed of the bundled detection trace.
pub const DETECTION_FIXTURE_SEED: u64 = 19;

/// A 32 s detection trace: still for 6 s, healthy walking until 19 s, then
/// legs 3 and 4 are lost. Light sensor noise throughout, 100 Hz.
pub fn detection_fixture(model: &SurrogateModel, seed: u64) -> Result<TimedRecord> {
    let spec = RobotSpec::default();
    let gait = GaitParams::default();
    let dt = 0.01;
    let healthy = MorphologyVector::healthy(&spec);
    let damaged = MorphologyVector::parse_for("[111][111][000][000][111][111]", &spec)?;
    let mut rec = synthesize_record(model, &spec, &healthy, &gait, RecordShape { lead_in: 6.0, walk: 13.0, dt }, None)?;
    let mut after = synthesize_record(model, &spec, &damaged, &gait, RecordShape { lead_in: 0.0, walk: 13.0, dt }, None)?;
    let offset = rec.times.len() as f64 * dt;
    let n = after.times.len();
    after.times = (0..n).map(|i| offset + i as f64 * dt).collect();
    rec.append_continuing_yaw(&after);
    rec.times = (0..rec.times.len()).map(|i| i as f64 * dt).collect();
    corrupt_record(
        &rec,
        &CorruptionConfig {
            noise_sigma: 0.05f64.to_radians(),
            rng_seed: seed,
            ..CorruptionConfig::default()
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scenarios_parse_and_suite_has_18_runs() {
        let spec = RobotSpec::default();
        for s in &SCENARIOS {
            let m = s.truth(&spec).unwrap();
            assert!(m.is_feasible());
            assert!(!m.damaged_legs().is_empty());
        }
        assert_eq!(SCENARIOS.iter().map(|s| s.suite_runs).sum::<usize>(), 18);
        assert!(Scenario::by_name("nope").is_err());
    }

    #[test]
    fn leg_level_matching() {
        let spec = RobotSpec::default();
        let p = |s: &str| MorphologyVector::parse_for(s, &spec).unwrap();
        let truth = p("[100][111][111][100][111][111]");
        assert!(legs_match(&truth, &truth));
        assert!(legs_match(&truth, &p("[110][111][111][000][111][111]")));
        assert!(!legs_match(&truth, &p("[111][111][111][100][111][111]")));
        assert!(!legs_match(&truth, &p("[100][111][111][110][110][111]")));
        assert!(!legs_match(&p("[000][111][111][111][111][111]"), &p("[110][111][111][111][111][111]")));
    }

    #[test]
    fn lead_in_holds_initial_pose() {
        let spec = RobotSpec::default();
        let m = MorphologyVector::parse_for(SCENARIOS[0].morphology, &spec).unwrap();
        let rec = synthesize_record(&SurrogateModel::default(), &spec, &m, &GaitParams::default(), RecordShape::default(), None)
            .unwrap();
        let lead = (1.0f64 / (5.0 / 1024.0)).round() as usize;
        assert!(rec.roll[..lead].iter().all(|&r| r == rec.roll[0]));
        assert_ne!(rec.yaw[lead + 1], rec.yaw[lead]);
        rec.validate().unwrap();
    }
}
