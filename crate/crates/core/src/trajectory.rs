//! Orientation time series: uniformly sampled trajectories and raw
//! timestamped records.

use crate::error::{Error, Result};

/// Body roll, pitch and yaw (radians) on a uniform time base.
#[derive(Debug, Clone, PartialEq)]
pub struct OrientationTrajectory {
    pub t0: f64,
    pub dt: f64,
    pub roll: Vec<f64>,
    pub pitch: Vec<f64>,
    pub yaw: Vec<f64>,
}

impl OrientationTrajectory {
    pub fn new(t0: f64, dt: f64, roll: Vec<f64>, pitch: Vec<f64>, yaw: Vec<f64>) -> Result<Self> {
        let traj = OrientationTrajectory { t0, dt, roll, pitch, yaw };
        traj.validate()?;
        Ok(traj)
    }

    pub fn validate(&self) -> Result<()> {
        let q = self.roll.len();
        if self.pitch.len() != q || self.yaw.len() != q {
            return Err(Error::Structural(format!(
                "channel lengths differ: roll {q}, pitch {}, yaw {}",
                self.pitch.len(),
                self.yaw.len()
            )));
        }
        if q < 2 {
            return Err(Error::argument("a trajectory needs at least two samples"));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) || !self.t0.is_finite() {
            return Err(Error::argument("trajectory time base must be finite with dt > 0"));
        }
        Ok(())
    }

    /// Number of samples, Q.
    pub fn len(&self) -> usize {
        self.roll.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roll.is_empty()
    }

    pub fn time(&self, q: usize) -> f64 {
        self.t0 + q as f64 * self.dt
    }

    pub fn duration(&self) -> f64 {
        self.dt * self.len() as f64
    }

    pub fn sample_rate(&self) -> f64 {
        1.0 / self.dt
    }

    pub fn channels(&self) -> [&[f64]; 3] {
        [&self.roll, &self.pitch, &self.yaw]
    }

    /// The same samples as a timestamped record.
    pub fn to_record(&self) -> TimedRecord {
        TimedRecord {
            times: (0..self.len()).map(|q| self.time(q)).collect(),
            roll: self.roll.clone(),
            pitch: self.pitch.clone(),
            yaw: self.yaw.clone(),
        }
    }
}

/// Orientation samples (radians) with explicit, possibly irregular timestamps,
/// as recorded by an IMU.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TimedRecord {
    pub times: Vec<f64>,
    pub roll: Vec<f64>,
    pub pitch: Vec<f64>,
    pub yaw: Vec<f64>,
}

impl TimedRecord {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn channels(&self) -> [&[f64]; 3] {
        [&self.roll, &self.pitch, &self.yaw]
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.times.len();
        if self.roll.len() != n || self.pitch.len() != n || self.yaw.len() != n {
            return Err(Error::Structural("record channels differ in length".into()));
        }
        if let Some(i) = self.times.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::argument(format!(
                "timestamps not strictly increasing at sample {}",
                i + 1
            )));
        }
        Ok(())
    }

    /// Appends another record, offsetting its yaw so the heading is continuous.
    pub fn append_continuing_yaw(&mut self, other: &TimedRecord) {
        let offset = match (self.yaw.last(), other.yaw.first()) {
            (Some(a), Some(b)) => a - b,
            _ => 0.0,
        };
        self.times.extend_from_slice(&other.times);
        self.roll.extend_from_slice(&other.roll);
        self.pitch.extend_from_slice(&other.pitch);
        self.yaw.extend(other.yaw.iter().map(|y| y + offset));
    }
}
