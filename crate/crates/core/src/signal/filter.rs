//! Spectral peak filter used to make simulated and recorded orientation
//! signals comparable.
//!
//! The filter zeroes every bin above the cutoff and the DC bin, keeps only
//! bins whose single-sided amplitude exceeds the threshold (for roll and pitch
//! only those that are also spectral peaks), reconstructs the signal, and
//! shifts it so the first sample is zero.

use num_complex::Complex64;

use super::fft::{dft_forward, dft_inverse, power_spectrum};
use crate::error::{Error, Result};
use crate::trajectory::OrientationTrajectory;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterMode {
    /// Oscillatory channels: keep isolated spectral peaks above the threshold.
    RollPitch,
    /// Keep every bin above the threshold, so non-oscillatory drift survives.
    Yaw,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterConfig {
    /// Cutoff frequency in Hz.
    pub f_cutoff: f64,
    /// Amplitude threshold in signal units (radians for orientation data).
    pub p_threshold: f64,
    pub mode: FilterMode,
}

impl Default for FilterConfig {
    fn default() -> Self {
        FilterConfig {
            f_cutoff: 10.0,
            p_threshold: 0.1,
            mode: FilterMode::RollPitch,
        }
    }
}

impl FilterConfig {
    pub fn with_mode(self, mode: FilterMode) -> Self {
        FilterConfig { mode, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.f_cutoff.is_finite() && self.f_cutoff > 0.0) {
            return Err(Error::Config("filter cutoff must be positive".into()));
        }
        if !(self.p_threshold.is_finite() && self.p_threshold >= 0.0) {
            return Err(Error::Config("filter threshold must be non-negative".into()));
        }
        Ok(())
    }
}

/// Indices of strict local maxima of `ps[lo..=hi]`. Band edges compare with
/// their single in-band neighbour; on a plateau the lowest bin is kept.
fn band_peaks(ps: &[f64], lo: usize, hi: usize) -> Vec<usize> {
    let mut peaks = Vec::new();
    let mut k = lo;
    while k <= hi {
        let mut end = k;
        while end < hi && ps[end + 1] == ps[k] {
            end += 1;
        }
        let left_ok = k == lo || ps[k - 1] < ps[k];
        let right_ok = end == hi || ps[end + 1] < ps[k];
        if left_ok && right_ok {
            peaks.push(k);
        }
        k = end + 1;
    }
    peaks
}

/// Filters one real channel. The length must be a power of two.
pub fn fft_filter(channel: &[f64], sample_rate: f64, cfg: &FilterConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    let mut spectrum = dft_forward(channel, sample_rate)?;
    let n = spectrum.n();
    let ps = power_spectrum(&spectrum);
    let half = n / 2;
    // Last bin at or below the cutoff.
    let top = ((cfg.f_cutoff * n as f64 / sample_rate).floor() as usize).min(half);

    let mut keep = vec![false; half + 1];
    if top >= 1 {
        match cfg.mode {
            FilterMode::RollPitch => {
                for k in band_peaks(&ps, 1, top) {
                    keep[k] = ps[k] > cfg.p_threshold;
                }
            }
            FilterMode::Yaw => {
                for k in 1..=top {
                    keep[k] = ps[k] > cfg.p_threshold;
                }
            }
        }
    }
    let zero = Complex64::new(0.0, 0.0);
    for k in 0..=half {
        if !keep[k] {
            spectrum.bins[k] = zero;
            if k != 0 && k != n - k {
                spectrum.bins[n - k] = zero;
            }
        }
    }
    let mut out = dft_inverse(&spectrum)?;
    let first = out[0];
    out.iter_mut().for_each(|v| *v -= first);
    Ok(out)
}

/// Filters roll and pitch as oscillatory channels and yaw in drift-preserving mode.
pub fn filter_trajectory(traj: &OrientationTrajectory, cfg: &FilterConfig) -> Result<OrientationTrajectory> {
    let fs = traj.sample_rate();
    let rp = cfg.with_mode(FilterMode::RollPitch);
    Ok(OrientationTrajectory {
        t0: traj.t0,
        dt: traj.dt,
        roll: fft_filter(&traj.roll, fs, &rp)?,
        pitch: fft_filter(&traj.pitch, fs, &rp)?,
        yaw: fft_filter(&traj.yaw, fs, &cfg.with_mode(FilterMode::Yaw))?,
    })
}
