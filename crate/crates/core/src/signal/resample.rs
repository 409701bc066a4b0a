use crate::error::{Error, Result};

fn check_times(times: &[f64], values: &[f64]) -> Result<()> {
    if times.len() != values.len() {
        return Err(Error::argument(format!(
            "{} timestamps for {} values",
            times.len(),
            values.len()
        )));
    }
    if times.len() < 2 {
        return Err(Error::argument("need at least two samples to interpolate"));
    }
    if times.iter().any(|t| !t.is_finite()) {
        return Err(Error::argument("timestamps must be finite"));
    }
    if let Some(i) = times.windows(2).position(|w| !(w[1] > w[0])) {
        return Err(Error::argument(format!(
            "timestamps not strictly increasing at sample {}",
            i + 1
        )));
    }
    Ok(())
}

/// Linear interpolation of `(times, values)` at each point of an ascending
/// `grid`. Grid points must lie inside the recorded span.
pub fn interpolate_onto(times: &[f64], values: &[f64], grid: &[f64]) -> Result<Vec<f64>> {
    check_times(times, values)?;
    let (first, last) = (times[0], times[times.len() - 1]);
    let slack = 1e-9 * (last - first).abs().max(1.0);
    let mut out = Vec::with_capacity(grid.len());
    let mut seg = 0;
    for &t in grid {
        if t < first - slack || t > last + slack {
            return Err(Error::argument(format!(
                "time {t} is outside the recorded range [{first}, {last}]"
            )));
        }
        while seg + 2 < times.len() && times[seg + 1] <= t {
            seg += 1;
        }
        // Grids are ascending; restart the scan if one is not.
        if t < times[seg] && seg > 0 {
            seg = times.partition_point(|&x| x <= t).saturating_sub(1).min(times.len() - 2);
        }
        let (t0, t1) = (times[seg], times[seg + 1]);
        let w = ((t - t0) / (t1 - t0)).clamp(0.0, 1.0);
        out.push(values[seg] + w * (values[seg + 1] - values[seg]));
    }
    Ok(out)
}

/// Linear interpolation onto `t_start + k * duration / samples`, k = 0..samples.
/// The whole window `[t_start, t_start + duration]` must lie inside the record.
pub fn resample_uniform(
    times: &[f64],
    values: &[f64],
    t_start: f64,
    duration: f64,
    samples: usize,
) -> Result<Vec<f64>> {
    check_times(times, values)?;
    if samples < 2 || !samples.is_power_of_two() {
        return Err(Error::argument(format!("sample count {samples} is not a power of two >= 2")));
    }
    if !(duration.is_finite() && duration > 0.0) {
        return Err(Error::argument("resampling duration must be positive"));
    }
    let (first, last) = (times[0], times[times.len() - 1]);
    let slack = 1e-9 * (last - first).abs().max(1.0);
    if t_start < first - slack || t_start + duration > last + slack {
        return Err(Error::argument(format!(
            "window [{t_start}, {}] is outside the recorded range [{first}, {last}]",
            t_start + duration
        )));
    }
    let step = duration / samples as f64;
    let grid: Vec<f64> = (0..samples).map(|k| t_start + k as f64 * step).collect();
    interpolate_onto(times, values, &grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use std::f64::consts::PI;

    #[test]
    fn constant_and_affine_are_exact() {
        let times: Vec<f64> = (0..50).map(|i| i as f64 * 0.1 + (i as f64 * 0.37).sin() * 0.01).collect();
        let c = vec![2.5; 50];
        assert!(resample_uniform(&times, &c, 0.2, 4.0, 64).unwrap().iter().all(|&v| v == 2.5));
        let aff: Vec<f64> = times.iter().map(|t| 3.0 * t - 1.0).collect();
        let out = resample_uniform(&times, &aff, 0.5, 3.0, 128).unwrap();
        for (k, v) in out.iter().enumerate() {
            let t = 0.5 + k as f64 * 3.0 / 128.0;
            assert!((v - (3.0 * t - 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn jittered_sinusoid() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let mut t = 0.0;
        let mut times = Vec::new();
        while t < 6.0 {
            times.push(t);
            t += rng.random_range(1.0 / 1000.0..=1.0 / 950.0);
        }
        let vals: Vec<f64> = times.iter().map(|t| 0.2 * (2.0 * PI * t).sin()).collect();
        let out = resample_uniform(&times, &vals, 0.5, 5.0, 1024).unwrap();
        let err = out
            .iter()
            .enumerate()
            .map(|(k, v)| {
                let t = 0.5 + k as f64 * 5.0 / 1024.0;
                (v - 0.2 * (2.0 * PI * t).sin()).powi(2)
            })
            .sum::<f64>()
            / 1024.0;
        assert!(err.sqrt() < 1e-3);
    }

    #[test]
    fn errors() {
        let times = [0.0, 1.0, 2.0];
        let vals = [0.0, 1.0, 2.0];
        assert!(resample_uniform(&times, &vals, 0.5, 2.0, 4).is_err());
        assert!(resample_uniform(&times, &vals, 0.0, 2.0, 3).is_err());
        assert!(resample_uniform(&[0.0, 1.0, 1.0], &vals, 0.0, 1.0, 4).is_err());
        assert!(interpolate_onto(&times, &vals, &[-1.0]).is_err());
    }
}
