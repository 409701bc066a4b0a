use crate::error::{Error, Result};
use crate::trajectory::OrientationTrajectory;

/// Accumulated absolute roll, pitch and yaw error over all samples.
///
/// Both trajectories must already share length and sample spacing.
pub fn evaluate_cost(sim: &OrientationTrajectory, exp: &OrientationTrajectory) -> Result<f64> {
    if sim.len() != exp.len() {
        return Err(Error::argument(format!(
            "trajectories have {} and {} samples; resample first",
            sim.len(),
            exp.len()
        )));
    }
    if (sim.dt - exp.dt).abs() > 1e-9 * sim.dt.abs().max(exp.dt.abs()) {
        return Err(Error::argument(format!(
            "trajectories are sampled at dt = {} and {}; resample first",
            sim.dt, exp.dt
        )));
    }
    let total = sim
        .channels()
        .iter()
        .zip(exp.channels())
        .map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>())
        .sum();
    Ok(total)
}
