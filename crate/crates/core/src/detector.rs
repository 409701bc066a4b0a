//! Sliding-window damage detector.
//!
//! For every window the statistic is the spread (max - min) of a channel.
//! Damage is flagged when the larger of the roll and pitch spreads stays above
//! a threshold for a persistence span; the first window where any channel
//! moves beyond a small noise floor marks the start of locomotion.

use crate::error::{Error, Result};
use crate::trajectory::OrientationTrajectory;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorConfig {
    /// Window length, seconds.
    pub window: f64,
    /// Spacing of window starts, seconds.
    pub step: f64,
    /// Roll/pitch spread above which a window counts as anomalous, radians.
    pub fluct_threshold: f64,
    /// How long the anomaly must last, seconds.
    pub persistence: f64,
    /// Spread that counts as motion rather than sensor noise, radians.
    pub motion_floor: f64,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        DetectorConfig {
            window: 0.5,
            step: 0.1,
            fluct_threshold: 5f64.to_radians(),
            persistence: 2.0,
            motion_floor: 0.5f64.to_radians(),
        }
    }
}

impl DetectorConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.window.is_finite()
            && self.step > 0.0
            && self.step <= self.window
            && self.persistence >= self.window
            && self.fluct_threshold > 0.0
            && self.motion_floor > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::Config(
                "detector needs 0 < step <= window <= persistence and positive thresholds".into(),
            ))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectionReport {
    pub damaged: bool,
    pub damage_time: Option<f64>,
    pub motion_start: Option<f64>,
    /// Largest roll/pitch spread over all windows, radians.
    pub max_fluctuation: f64,
    /// `(window end time, max(roll spread, pitch spread))`.
    pub fluctuation_series: Vec<(f64, f64)>,
}

/// Sample index ranges `[start, end]` of each window, start times at multiples of `step`.
fn windows(len: usize, dt: f64, cfg: &DetectorConfig) -> Result<Vec<(usize, usize)>> {
    cfg.validate()?;
    if !(dt > 0.0) {
        return Err(Error::argument("sample spacing must be positive"));
    }
    let span = (len.saturating_sub(1)) as f64 * dt;
    let eps = 1e-9 * dt;
    if span + eps < cfg.window {
        return Err(Error::argument(format!(
            "trace of {span:.3} s is shorter than the {:.3} s window",
            cfg.window
        )));
    }
    let per_window = (cfg.window / dt + 1e-9).floor() as usize;
    let mut out = Vec::new();
    let mut k = 0usize;
    loop {
        let start = k as f64 * cfg.step;
        if start + cfg.window > span + eps {
            break;
        }
        let s = (start / dt - 1e-9).ceil() as usize;
        let e = (s + per_window).min(len - 1);
        out.push((s, e));
        k += 1;
    }
    Ok(out)
}

fn spread(x: &[f64]) -> f64 {
    let (lo, hi) = x
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    hi - lo
}

/// Spread of `channel` in each window, reported at the window end time
/// (relative to the first sample).
pub fn window_fluctuation(channel: &[f64], dt: f64, cfg: &DetectorConfig) -> Result<Vec<(f64, f64)>> {
    Ok(windows(channel.len(), dt, cfg)?
        .into_iter()
        .enumerate()
        .map(|(k, (s, e))| (k as f64 * cfg.step + cfg.window, spread(&channel[s..=e])))
        .collect())
}

pub fn detect(traj: &OrientationTrajectory, cfg: &DetectorConfig) -> Result<DetectionReport> {
    traj.validate()?;
    let wins = windows(traj.len(), traj.dt, cfg)?;
    let mut series = Vec::with_capacity(wins.len());
    let mut motion_start = None;
    for (k, &(s, e)) in wins.iter().enumerate() {
        let end = traj.t0 + k as f64 * cfg.step + cfg.window;
        let r = spread(&traj.roll[s..=e]);
        let p = spread(&traj.pitch[s..=e]);
        let y = spread(&traj.yaw[s..=e]);
        if motion_start.is_none() && r.max(p).max(y) > cfg.motion_floor {
            motion_start = Some(end);
        }
        series.push((end, r.max(p)));
    }

    // A qualifying run: consecutive anomalous windows whose end times span
    // at least `persistence`.
    let mut damage_time = None;
    let mut run_start: Option<f64> = None;
    for &(t, v) in &series {
        if v > cfg.fluct_threshold {
            let start = *run_start.get_or_insert(t);
            if t - start >= cfg.persistence - 1e-9 {
                damage_time = Some(start);
                break;
            }
        } else {
            run_start = None;
        }
    }
    let max_fluctuation = series.iter().map(|&(_, v)| v).fold(0.0, f64::max);
    Ok(DetectionReport {
        damaged: damage_time.is_some(),
        damage_time,
        motion_start,
        max_fluctuation,
        fluctuation_series: series,
    })
}

/// Per-sample allowance for a rest sample's squared standardized residual.
/// Residuals of pure noise average 1; the onset is where they start to
/// exceed this on balance.
const REST_ALLOWANCE: f64 = 2.0;

/// Noise floor for the rest fit, radians. Keeps noise-free traces well posed.
const REST_NOISE_FLOOR: f64 = 1e-9;

/// Sharpens a window-level motion start to the last resting sample.
///
/// A line (level plus drift) is fitted to each channel over the `rest_span`
/// seconds ending at `rest_end`, which must precede the onset; its residuals
/// give the channel's noise level. Scanning forward up to `search_end`, the
/// resting segment is extended to the point that minimizes
/// `sum(r^2 / sigma^2 - allowance)` over the extrapolated residuals `r`.
/// Returns the time of that point.
pub fn fit_motion_onset(traj: &OrientationTrajectory, rest_end: f64, search_end: f64, rest_span: f64) -> Result<f64> {
    traj.validate()?;
    let q = traj.len();
    if !(rest_span > 0.0 && rest_end <= search_end) {
        return Err(Error::argument("onset search needs a positive rest span ending before the search end"));
    }
    let idx = |t: f64| ((t - traj.t0) / traj.dt).round().clamp(0.0, (q - 1) as f64) as usize;
    let b = idx(rest_end);
    let a = idx(rest_end - rest_span).min(b.saturating_sub(2));
    if b < 2 {
        return Err(Error::argument("no resting samples before the motion start"));
    }
    let end = idx(search_end);

    let n = (b - a + 1) as f64;
    let mean_u = (a + b) as f64 / 2.0;
    let suu: f64 = (a..=b).map(|i| (i as f64 - mean_u).powi(2)).sum();
    let fits: Vec<(f64, f64, f64)> = traj
        .channels()
        .iter()
        .map(|ch| {
            let mean_x = ch[a..=b].iter().sum::<f64>() / n;
            let sux: f64 = (a..=b).map(|i| (i as f64 - mean_u) * (ch[i] - mean_x)).sum();
            let slope = sux / suu;
            let at = |i: usize| mean_x + slope * (i as f64 - mean_u);
            let var = (a..=b).map(|i| (ch[i] - at(i)).powi(2)).sum::<f64>() / (n - 2.0).max(1.0);
            (mean_x, slope, var.sqrt().max(REST_NOISE_FLOOR))
        })
        .collect();

    let mut acc = 0.0;
    let mut best = (0.0, b);
    for i in b + 1..=end {
        for (ch, &(mean_x, slope, sigma)) in traj.channels().iter().zip(&fits) {
            let r = (ch[i] - (mean_x + slope * (i as f64 - mean_u))) / sigma;
            acc += r * r - REST_ALLOWANCE;
        }
        if acc < best.0 {
            best = (acc, i);
        }
    }
    Ok(traj.time(best.1))
}
