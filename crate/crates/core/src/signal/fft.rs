//! Radix-2 discrete Fourier transform and its inverse.
//!
//! Forward: `Y[a] = sum_b x[b] * W^(a*b)` with `W = exp(-2*pi*i/n)`.
//! Inverse: `x[b] = (1/n) * sum_a Y[a] * W^(-a*b)`.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative tolerance for the conjugate-symmetry check on inversion.
pub const SYMMETRY_TOLERANCE: f64 = 1e-9;

/// DFT coefficients of a real signal together with its sample rate.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub bins: Vec<Complex64>,
    pub sample_rate: f64,
}

impl Spectrum {
    pub fn n(&self) -> usize {
        self.bins.len()
    }

    /// Frequency in Hz of the 0-based bin `k`.
    pub fn frequency(&self, k: usize) -> f64 {
        k as f64 * self.sample_rate / self.n() as f64
    }

    /// Largest conjugate-symmetry defect relative to the largest bin magnitude.
    pub fn symmetry_defect(&self) -> f64 {
        let n = self.n();
        let scale = self.bins.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst = self.bins[0].im.abs();
        for k in 1..n {
            let d = (self.bins[k] - self.bins[n - k].conj()).norm();
            worst = worst.max(d);
        }
        if n.is_multiple_of(2) {
            worst = worst.max(self.bins[n / 2].im.abs());
        }
        worst / scale
    }
}

fn check_length(n: usize) -> Result<()> {
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::argument(format!(
            "transform length {n} is not a power of two >= 2; resample the signal onto a 2^k grid first"
        )));
    }
    Ok(())
}

/// In-place iterative radix-2 transform. `inverse` flips the twiddle sign and
/// does not scale.
fn radix2_in_place(data: &mut [Complex64], inverse: bool) {
    let n = data.len();
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            data.swap(i, j);
        }
    }
    let sign = if inverse { 1.0 } else { -1.0 };
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let step = sign * 2.0 * std::f64::consts::PI / len as f64;
        // Twiddles computed directly per index keep the rounding error flat in n.
        let twiddles: Vec<Complex64> = (0..half)
            .map(|k| Complex64::from_polar(1.0, step * k as f64))
            .collect();
        for chunk in data.chunks_exact_mut(len) {
            let (lo, hi) = chunk.split_at_mut(half);
            for ((a, b), w) in lo.iter_mut().zip(hi.iter_mut()).zip(&twiddles) {
                let t = *b * w;
                *b = *a - t;
                *a += t;
            }
        }
        len <<= 1;
    }
}

pub fn dft_forward(x: &[f64], sample_rate: f64) -> Result<Spectrum> {
    check_length(x.len())?;
    if !(sample_rate.is_finite() && sample_rate > 0.0) {
        return Err(Error::argument("sample rate must be positive"));
    }
    let mut bins: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    radix2_in_place(&mut bins, false);
    Ok(Spectrum { bins, sample_rate })
}

/// Real part of the inverse transform. Rejects spectra that are not
/// conjugate-symmetric, since those cannot come from a real signal.
pub fn dft_inverse(s: &Spectrum) -> Result<Vec<f64>> {
    check_length(s.n())?;
    let defect = s.symmetry_defect();
    if defect > SYMMETRY_TOLERANCE {
        return Err(Error::Integrity(format!(
            "spectrum is not conjugate-symmetric (relative defect {defect:.3e})"
        )));
    }
    let n = s.n();
    let mut data = s.bins.clone();
    radix2_in_place(&mut data, true);
    let scale = 1.0 / n as f64;
    let out: Vec<f64> = data.iter().map(|c| c.re * scale).collect();
    let norm = out.iter().map(|v| v * v).sum::<f64>().sqrt();
    let residual = data.iter().map(|c| (c.im * scale).abs()).fold(0.0, f64::max);
    if residual > 1e-9 * norm.max(f64::MIN_POSITIVE) && residual > 1e-12 {
        return Err(Error::Integrity(format!(
            "inverse transform left an imaginary residual of {residual:.3e}"
        )));
    }
    Ok(out)
}

/// Single-sided amplitude spectrum for bins 0..=n/2, in signal units.
/// Interior bins are doubled so a sinusoid of amplitude A reads A at its bin.
pub fn power_spectrum(s: &Spectrum) -> Vec<f64> {
    let n = s.n();
    let half = n / 2;
    (0..=half)
        .map(|k| {
            let factor = if k == 0 || (k == half && n.is_multiple_of(2)) { 1.0 } else { 2.0 };
            factor * s.bins[k].norm() / n as f64
        })
        .collect()
}
