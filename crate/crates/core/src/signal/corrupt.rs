//! Test harness that degrades a clean trajectory the way a low-cost IMU does:
//! white noise, slow drift, a fixed start delay and irregular sample timing.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::trajectory::{OrientationTrajectory, TimedRecord};

/// Per-sample intervals are drawn uniformly from `[1/high_hz, 1/low_hz]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateJitter {
    pub low_hz: f64,
    pub high_hz: f64,
}

impl Default for RateJitter {
    fn default() -> Self {
        RateJitter {
            low_hz: 950.0,
            high_hz: 1000.0,
        }
    }
}

impl RateJitter {
    /// Expected interval between samples.
    pub fn mean_interval(&self) -> f64 {
        0.5 * (1.0 / self.low_hz + 1.0 / self.high_hz)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CorruptionConfig {
    /// Standard deviation of additive noise, radians.
    pub noise_sigma: f64,
    /// Drift added to every channel, radians per second.
    pub drift_rate: f64,
    /// Shift applied to all timestamps, seconds.
    pub delay: f64,
    /// Irregular re-timing; `None` keeps the trajectory's uniform spacing.
    pub jitter: Option<RateJitter>,
    pub rng_seed: u64,
}

impl CorruptionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.noise_sigma.is_finite() && self.noise_sigma >= 0.0) {
            return Err(Error::Config("noise sigma must be non-negative".into()));
        }
        if !self.drift_rate.is_finite() {
            return Err(Error::Config("drift rate must be finite".into()));
        }
        if !(self.delay.is_finite() && self.delay >= 0.0) {
            return Err(Error::Config("delay must be non-negative".into()));
        }
        if let Some(j) = self.jitter {
            if !(j.low_hz > 0.0 && j.low_hz <= j.high_hz && j.high_hz.is_finite()) {
                return Err(Error::Config(format!(
                    "sample-rate range [{}, {}] Hz is invalid",
                    j.low_hz, j.high_hz
                )));
            }
        }
        Ok(())
    }
}

/// Applies noise, drift, delay and timing jitter. Deterministic for a given seed.
pub fn corrupt_trajectory(traj: &OrientationTrajectory, cfg: &CorruptionConfig) -> Result<TimedRecord> {
    cfg.validate()?;
    traj.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let q = traj.len();

    let mut times = Vec::with_capacity(q);
    let mut t = traj.t0 + cfg.delay;
    for i in 0..q {
        match cfg.jitter {
            Some(j) if i > 0 => t += rng.random_range(1.0 / j.high_hz..=1.0 / j.low_hz),
            Some(_) => {}
            None => t = traj.time(i) + cfg.delay,
        }
        times.push(t);
    }

    let noise = Normal::new(0.0, cfg.noise_sigma).map_err(|e| Error::Config(e.to_string()))?;
    let mut channel = |clean: &[f64]| -> Vec<f64> {
        clean
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                let n = if cfg.noise_sigma > 0.0 { noise.sample(&mut rng) } else { 0.0 };
                v + n + cfg.drift_rate * (i as f64 * traj.dt)
            })
            .collect()
    };
    let roll = channel(&traj.roll);
    let pitch = channel(&traj.pitch);
    let yaw = channel(&traj.yaw);
    Ok(TimedRecord { times, roll, pitch, yaw })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn traj(q: usize) -> OrientationTrajectory {
        let f = |k: f64| (0..q).map(|i| (i as f64 * k).sin()).collect::<Vec<_>>();
        OrientationTrajectory::new(1.0, 0.01, f(0.1), f(0.2), f(0.3)).unwrap()
    }

    #[test]
    fn zero_config_is_identity() {
        let t = traj(100);
        let rec = corrupt_trajectory(&t, &CorruptionConfig::default()).unwrap();
        assert_eq!(rec, t.to_record());
    }

    #[test]
    fn delay_shifts_first_timestamp() {
        let t = traj(100);
        let cfg = CorruptionConfig { delay: 0.3, ..Default::default() };
        let rec = corrupt_trajectory(&t, &cfg).unwrap();
        assert!((rec.times[0] - 1.3).abs() < 1e-12);
    }

    #[test]
    fn noise_level_and_determinism() {
        let t = traj(4096);
        let cfg = CorruptionConfig {
            noise_sigma: 0.0175,
            rng_seed: 11,
            jitter: Some(RateJitter::default()),
            ..Default::default()
        };
        let a = corrupt_trajectory(&t, &cfg).unwrap();
        assert_eq!(a, corrupt_trajectory(&t, &cfg).unwrap());
        for (noisy, clean) in a.channels().iter().zip(t.channels()) {
            let d: Vec<f64> = noisy.iter().zip(clean).map(|(x, y)| x - y).collect();
            let m = d.iter().sum::<f64>() / d.len() as f64;
            let sd = (d.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (d.len() - 1) as f64).sqrt();
            assert!((sd - 0.0175).abs() < 0.1 * 0.0175, "sd {sd}");
        }
        for w in a.times.windows(2) {
            let dt = w[1] - w[0];
            assert!((1.0 / 1000.0 - 1e-15..=1.0 / 950.0 + 1e-15).contains(&dt));
        }
    }

    #[test]
    fn drift_is_linear() {
        let t = traj(10);
        let cfg = CorruptionConfig { drift_rate: 0.5, ..Default::default() };
        let rec = corrupt_trajectory(&t, &cfg).unwrap();
        assert!((rec.yaw[9] - t.yaw[9] - 0.5 * 0.09).abs() < 1e-12);
    }

    #[test]
    fn invalid_jitter() {
        let cfg = CorruptionConfig {
            jitter: Some(RateJitter { low_hz: 1000.0, high_hz: 950.0 }),
            ..Default::default()
        };
        assert!(corrupt_trajectory(&traj(10), &cfg).is_err());
    }
}
