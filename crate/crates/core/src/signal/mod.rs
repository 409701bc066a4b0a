//! Spectral filtering, resampling and the sensor-corruption harness.

mod corrupt;
mod fft;
mod filter;
mod resample;

pub use corrupt::{corrupt_trajectory, CorruptionConfig, RateJitter};
pub use fft::{dft_forward, dft_inverse, power_spectrum, Spectrum, SYMMETRY_TOLERANCE};
pub use filter::{filter_trajectory, fft_filter, FilterConfig, FilterMode};
pub use resample::{interpolate_onto, resample_uniform};
