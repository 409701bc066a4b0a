//! Deterministic quasi-static stand-in for a whole-body dynamics engine.
//!
//! At each instant the legs of the active tripod carry the body. A leg whose
//! remaining links cannot reach the ground leaves its corner unsupported and
//! the corner sinks by the (soft-saturated) length deficit. Body roll and
//! pitch come from a weighted least-squares plane through the corner heights;
//! swing legs enter with a small weight so the plane is always determined.
//! As the body advances over its feet during stance, load moves from the rear
//! to the front legs, so a short front leg sinks more towards lift-off and a
//! short rear leg sinks more right after touchdown.
//! Yaw integrates the turning moment of the stance legs' thrust, where a leg's
//! thrust scales with its remaining length and acts on the side it is mounted.
//! A small lateral sway proportional to the step height rides on top, which is
//! what a healthy robot shows.
//!
//! Sign conventions: x forward, y left, z up. Positive roll lifts the left
//! side, positive pitch lowers the nose, positive yaw turns left.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, STATICALLY_UNSUPPORTABLE};
use crate::morphology::{MorphologyVector, RobotSpec};
use crate::trajectory::OrientationTrajectory;

/// Nominal gait. Leg indices are 0-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaitParams {
    /// Gait cycle length, seconds.
    pub period: f64,
    pub step_height: f64,
    /// Forward advance per cycle, meters.
    pub stride: f64,
    /// Fraction of the cycle during which group A is in stance.
    pub duty: f64,
    pub group_a: Vec<usize>,
    pub group_b: Vec<usize>,
}

impl Default for GaitParams {
    fn default() -> Self {
        GaitParams {
            period: 1.0,
            step_height: 0.03,
            stride: 0.06,
            duty: 0.5,
            group_a: vec![0, 3, 4],
            group_b: vec![1, 2, 5],
        }
    }
}

impl GaitParams {
    pub fn validate(&self, spec: &RobotSpec) -> Result<()> {
        if !(self.period.is_finite() && self.period > 0.0) {
            return Err(Error::Config("gait period must be positive".into()));
        }
        if !(self.duty > 0.0 && self.duty < 1.0) {
            return Err(Error::Config("duty must lie strictly between 0 and 1".into()));
        }
        if !(self.step_height.is_finite() && self.stride.is_finite()) {
            return Err(Error::Config("step height and stride must be finite".into()));
        }
        let mut seen = vec![0u8; spec.leg_count];
        for &leg in self.group_a.iter().chain(&self.group_b) {
            match seen.get_mut(leg) {
                Some(c) => *c += 1,
                None => return Err(Error::Config(format!("gait names leg {} which does not exist", leg + 1))),
            }
        }
        if seen.iter().any(|&c| c != 1) {
            return Err(Error::Config(
                "gait groups must be disjoint and together cover every leg".into(),
            ));
        }
        Ok(())
    }

    /// Gait phase in [0, 1).
    pub fn phase(&self, t: f64) -> f64 {
        (t / self.period).rem_euclid(1.0)
    }

    /// Smoothed stance weight of group A in [0, 1]; group B has the complement.
    fn stance_a(&self, t: f64, transition: f64) -> f64 {
        let phi = self.phase(t);
        let d = if phi < self.duty {
            phi.min(self.duty - phi)
        } else {
            -(phi - self.duty).min(1.0 - phi)
        };
        let half = 0.5 * transition;
        if half <= 0.0 {
            return if d >= 0.0 { 1.0 } else { 0.0 };
        }
        if d >= half {
            1.0
        } else if d <= -half {
            0.0
        } else {
            0.5 + 0.5 * (std::f64::consts::FRAC_PI_2 * d / half).sin()
        }
    }

    /// How far a group is through its stance at time t: 0 at touchdown,
    /// 1 at lift-off, returning linearly to 0 during swing.
    fn stance_progress(&self, t: f64, group_a: bool) -> f64 {
        let phi = self.phase(t);
        let (into_a, into_b) = if phi < self.duty {
            let p = phi / self.duty;
            (p, 1.0 - p)
        } else {
            let p = (phi - self.duty) / (1.0 - self.duty);
            (1.0 - p, p)
        };
        if group_a {
            into_a
        } else {
            into_b
        }
    }

    /// The same gait with the groups exchanged.
    pub fn swapped(&self) -> Self {
        GaitParams {
            group_a: self.group_b.clone(),
            group_b: self.group_a.clone(),
            ..self.clone()
        }
    }
}

/// Legs in stance at time `t` (group A during the first `duty` of each cycle).
pub fn tripod_support_set(g: &GaitParams, t: f64) -> Vec<usize> {
    let mut legs = if g.phase(t.max(0.0)) < g.duty {
        g.group_a.clone()
    } else {
        g.group_b.clone()
    };
    legs.sort_unstable();
    legs
}

/// Constant ground inclination: `slope` radians, rising towards `heading`
/// (radians from the forward axis, counter-clockwise).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TerrainBias {
    pub slope: f64,
    pub heading: f64,
}

/// Calibrated gains of the surrogate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SurrogateParams {
    /// Corner sink per meter of reach deficit before saturation.
    pub drop_gain: f64,
    /// Saturation level of the corner sink, meters.
    pub max_drop: f64,
    /// Extra reach a leg can find through joint compliance, meters.
    pub reach_margin: f64,
    /// Plane-fit weight of a leg in swing relative to one in stance.
    pub swing_weight: f64,
    /// Width of the stance hand-over, as a fraction of the gait period.
    pub transition: f64,
    /// Yaw rate per (m/s of stride speed x unit thrust imbalance between sides).
    pub yaw_gain: f64,
    /// Roll sway per meter of step height and unit lateral support offset.
    pub sway_gain: f64,
    /// Hard limit on |roll| and |pitch|, radians.
    pub max_tilt: f64,
    /// Fractional change of a stance leg's sink from touchdown to lift-off
    /// per unit forward component of its mount direction. The body advances
    /// over the feet during stance, so load moves from rear to front legs.
    pub load_shift: f64,
}

impl Default for SurrogateParams {
    fn default() -> Self {
        SurrogateParams {
            drop_gain: 1.0,
            max_drop: 0.3,
            reach_margin: 0.02,
            swing_weight: 0.2,
            transition: 0.1,
            yaw_gain: 3.0,
            sway_gain: 3.0,
            max_tilt: 1.2,
            load_shift: 1.41,
        }
    }
}

impl SurrogateParams {
    pub fn validate(&self) -> Result<()> {
        let ok = self.drop_gain >= 0.0
            && self.max_drop > 0.0
            && self.reach_margin >= 0.0
            && self.swing_weight > 0.0
            && self.swing_weight <= 1.0
            && (0.0..0.5).contains(&self.transition)
            && self.yaw_gain.is_finite()
            && self.sway_gain.is_finite()
            && self.load_shift.is_finite()
            && self.load_shift.abs() <= 2.0
            && self.max_tilt > 0.0
            && self.max_tilt < std::f64::consts::FRAC_PI_2;
        if ok {
            Ok(())
        } else {
            Err(Error::Config("surrogate gains out of range".into()))
        }
    }
}

/// Per-leg quantities that do not change over time.
struct LegState {
    x: f64,
    y: f64,
    lateral: f64,
    forward: f64,
    in_group_a: bool,
    ground: f64,
    sink: f64,
    thrust: f64,
}

#[derive(Debug, Clone, Default)]
pub struct SurrogateModel {
    pub params: SurrogateParams,
}

impl SurrogateModel {
    pub fn new(params: SurrogateParams) -> Result<Self> {
        params.validate()?;
        Ok(SurrogateModel { params })
    }

    fn legs(
        &self,
        spec: &RobotSpec,
        m: &MorphologyVector,
        g: &GaitParams,
        terrain: Option<TerrainBias>,
    ) -> Vec<LegState> {
        let p = &self.params;
        let terrain = terrain.unwrap_or_default();
        let grade = terrain.slope.tan();
        (0..spec.leg_count)
            .map(|i| {
                let (x, y) = spec.mount_point(i);
                let full: f64 = spec.link_lengths[i].iter().sum();
                let eff: f64 = spec.link_lengths[i]
                    .iter()
                    .zip(m.leg(i))
                    .take_while(|(_, &present)| present)
                    .map(|(l, _)| l)
                    .sum();
                let ground = grade * (x * terrain.heading.cos() + y * terrain.heading.sin());
                let deficit = (full - ground - eff - p.reach_margin).max(0.0);
                let sink = p.max_drop * (p.drop_gain * deficit / p.max_drop).tanh();
                LegState {
                    x,
                    y,
                    lateral: if y.abs() < 1e-12 { 0.0 } else { y.signum() },
                    forward: spec.mount_angle[i].cos(),
                    in_group_a: g.group_a.contains(&i),
                    ground,
                    sink,
                    thrust: eff / full,
                }
            })
            .collect()
    }

    /// Stance weights (smoothed indicator, no swing floor) at time t.
    fn stance<'a>(&self, g: &GaitParams, legs: &'a [LegState], t: f64) -> impl Iterator<Item = f64> + 'a {
        let a = g.stance_a(t, self.params.transition);
        legs.iter().map(move |l| if l.in_group_a { a } else { 1.0 - a })
    }

    fn yaw_rate(&self, g: &GaitParams, legs: &[LegState], t: f64) -> f64 {
        let moment: f64 = self
            .stance(g, legs, t)
            .zip(legs)
            .map(|(s, l)| s * l.thrust * l.lateral)
            .sum();
        -self.params.yaw_gain * (g.stride / g.period) * moment
    }

    fn tilt(&self, g: &GaitParams, legs: &[LegState], t: f64, step_height: f64) -> (f64, f64) {
        let p = &self.params;
        // Weighted least squares for z = a + b x + c y via 3x3 normal equations.
        let mut ata = [[0.0f64; 3]; 3];
        let mut atz = [0.0f64; 3];
        let mut support = 0.0;
        let mut lateral = 0.0;
        for (s, l) in self.stance(g, legs, t).zip(legs) {
            let w = p.swing_weight + (1.0 - p.swing_weight) * s;
            let shift = 2.0 * g.stance_progress(t, l.in_group_a) - 1.0;
            let corner = l.ground - l.sink * (1.0 + p.load_shift * s * l.forward * shift).max(0.0);
            let row = [1.0, l.x, l.y];
            for r in 0..3 {
                for c in 0..3 {
                    ata[r][c] += w * row[r] * row[c];
                }
                atz[r] += w * row[r] * corner;
            }
            support += s * l.thrust;
            lateral += s * l.thrust * l.lateral;
        }
        let [_, b, c] = solve3(ata, atz);
        let sway = if support > 0.0 {
            p.sway_gain * step_height * lateral / support
        } else {
            0.0
        };
        let roll = (c.atan() + sway).clamp(-p.max_tilt, p.max_tilt);
        let pitch = (-b.atan()).clamp(-p.max_tilt, p.max_tilt);
        (roll, pitch)
    }

    /// Body orientation over `[0, duration)` sampled at `duration / samples`.
    pub fn simulate(
        &self,
        spec: &RobotSpec,
        m: &MorphologyVector,
        g: &GaitParams,
        duration: f64,
        samples: usize,
        terrain: Option<TerrainBias>,
    ) -> Result<OrientationTrajectory> {
        spec.validate()?;
        g.validate(spec)?;
        if m.leg_sizes() != spec.links_per_leg.as_slice() {
            return Err(Error::Structural("morphology does not match the robot".into()));
        }
        if !m.is_feasible() {
            return Err(Error::argument(format!("morphology {m} is not feasible")));
        }
        if samples < 16 {
            return Err(Error::argument("the surrogate needs at least 16 samples"));
        }
        if !(duration.is_finite() && duration > 0.0) {
            return Err(Error::argument("simulation duration must be positive"));
        }
        let bearing = m.leg_counts().iter().filter(|&&c| c > 0).count();
        if bearing < 3 {
            return Err(Error::Simulation {
                tag: STATICALLY_UNSUPPORTABLE,
                detail: format!("only {bearing} legs of {m} can carry load"),
            });
        }
        if let Some(t) = terrain {
            if !(t.slope.is_finite() && t.heading.is_finite() && t.slope.abs() < std::f64::consts::FRAC_PI_4) {
                return Err(Error::argument("terrain slope must be finite and below 45 degrees"));
            }
        }

        let legs = self.legs(spec, m, g, terrain);
        let dt = duration / samples as f64;
        let mut roll = Vec::with_capacity(samples);
        let mut pitch = Vec::with_capacity(samples);
        let mut yaw = Vec::with_capacity(samples);
        // Yaw is integrated on a fixed internal grid so the result does not
        // depend on the output sampling.
        let h = g.period / 1024.0;
        let mut heading = 0.0;
        let mut t_prev = 0.0;
        for q in 0..samples {
            let t = q as f64 * dt;
            let span = t - t_prev;
            if span > 0.0 {
                let steps = (span / h).ceil().max(1.0) as usize;
                let sub = span / steps as f64;
                for k in 0..steps {
                    let a = t_prev + k as f64 * sub;
                    heading += sub / 6.0
                        * (self.yaw_rate(g, &legs, a)
                            + 4.0 * self.yaw_rate(g, &legs, a + 0.5 * sub)
                            + self.yaw_rate(g, &legs, a + sub));
                }
                t_prev = t;
            }
            let (r, p) = self.tilt(g, &legs, t, g.step_height);
            roll.push(r);
            pitch.push(p);
            yaw.push(heading);
        }
        OrientationTrajectory::new(0.0, dt, roll, pitch, yaw)
    }
}

/// Simulates with the default calibrated gains.
pub fn simulate_orientation(
    spec: &RobotSpec,
    m: &MorphologyVector,
    g: &GaitParams,
    duration: f64,
    samples: usize,
    terrain: Option<TerrainBias>,
) -> Result<OrientationTrajectory> {
    SurrogateModel::default().simulate(spec, m, g, duration, samples, terrain)
}

/// Gaussian elimination with partial pivoting on a 3x3 system.
fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> [f64; 3] {
    for col in 0..3 {
        let pivot = (col..3)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap_or(col);
        a.swap(col, pivot);
        b.swap(col, pivot);
        let d = a[col][col];
        if d.abs() < 1e-300 {
            continue;
        }
        for row in col + 1..3 {
            let f = a[row][col] / d;
            for k in col..3 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let s: f64 = (row + 1..3).map(|k| a[row][k] * x[k]).sum();
        x[row] = if a[row][row].abs() < 1e-300 { 0.0 } else { (b[row] - s) / a[row][row] };
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> RobotSpec {
        RobotSpec::default()
    }

    fn morph(lit: &str) -> MorphologyVector {
        MorphologyVector::parse_for(lit, &spec()).unwrap()
    }

    fn window_max_fluct(x: &[f64], per_window: usize) -> f64 {
        x.windows(per_window)
            .map(|w| {
                let hi = w.iter().cloned().fold(f64::MIN, f64::max);
                let lo = w.iter().cloned().fold(f64::MAX, f64::min);
                hi - lo
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn support_sets() {
        let g = GaitParams::default();
        assert_eq!(tripod_support_set(&g, 0.0), vec![0, 3, 4]);
        assert_eq!(tripod_support_set(&g, 0.5), vec![1, 2, 5]);
        let mut all: Vec<usize> = (0..20)
            .flat_map(|k| tripod_support_set(&g, k as f64 * 0.05))
            .collect();
        all.sort_unstable();
        all.dedup();
        assert_eq!(all, (0..6).collect::<Vec<_>>());
    }

    #[test]
    fn gait_validation() {
        let g = GaitParams { group_b: vec![1, 2], ..GaitParams::default() };
        assert!(g.validate(&spec()).is_err());
        let g = GaitParams { duty: 1.0, ..GaitParams::default() };
        assert!(g.validate(&spec()).is_err());
    }

    #[test]
    fn healthy_stays_level() {
        let t = simulate_orientation(&spec(), &MorphologyVector::healthy(&spec()), &GaitParams::default(), 5.0, 1024, None)
            .unwrap();
        let per = (0.5 / t.dt).round() as usize;
        let lim = 5f64.to_radians();
        assert!(window_max_fluct(&t.roll, per) < lim);
        assert!(window_max_fluct(&t.pitch, per) < lim);
        assert!(t.yaw.iter().all(|y| y.abs() < 0.2));
    }

    #[test]
    fn middle_legs_missing_rolls_without_pitch() {
        let t = simulate_orientation(&spec(), &morph("[111][111][000][000][111][111]"), &GaitParams::default(), 5.0, 1024, None)
            .unwrap();
        let per = (0.5 / t.dt).round() as usize;
        assert!(window_max_fluct(&t.roll, per) > 5f64.to_radians());
        assert!(t.pitch.iter().all(|p| p.abs() < 2f64.to_radians()));
    }

    #[test]
    fn deterministic() {
        let m = morph("[110][111][100][111][000][111]");
        let g = GaitParams::default();
        let a = simulate_orientation(&spec(), &m, &g, 5.0, 512, None).unwrap();
        let b = simulate_orientation(&spec(), &m, &g, 5.0, 512, None).unwrap();
        assert_eq!(a, b);
        assert!(a.roll.iter().chain(&a.pitch).all(|v| v.abs() < std::f64::consts::FRAC_PI_2));
    }

    #[test]
    fn rejects_unsupportable_and_infeasible() {
        let g = GaitParams::default();
        let err = simulate_orientation(&spec(), &morph("[111][100][000][000][000][000]"), &g, 5.0, 64, None).unwrap_err();
        assert!(matches!(err, Error::Simulation { tag, .. } if tag == STATICALLY_UNSUPPORTABLE));
        let bad = MorphologyVector::new([true, false, true].repeat(6), &spec()).unwrap();
        assert!(simulate_orientation(&spec(), &bad, &g, 5.0, 64, None).is_err());
        assert!(simulate_orientation(&spec(), &MorphologyVector::healthy(&spec()), &g, 5.0, 8, None).is_err());
    }

    #[test]
    fn mirror_symmetry() {
        let s = spec();
        let g = GaitParams::default();
        for lit in ["[100][111][111][110][111][111]", "[111][111][000][111][110][111]", "[000][110][111][111][111][100]"] {
            let m = morph(lit);
            let mirrored: Vec<usize> = {
                let counts = m.leg_counts();
                (0..6).map(|i| counts[s.mirror_leg(i).unwrap()]).collect()
            };
            let mm = MorphologyVector::from_leg_counts(&mirrored, &s).unwrap();
            let a = simulate_orientation(&s, &m, &g, 5.0, 256, None).unwrap();
            let b = simulate_orientation(&s, &mm, &g.swapped(), 5.0, 256, None).unwrap();
            for q in 0..256 {
                assert!((a.roll[q] + b.roll[q]).abs() < 1e-9);
                assert!((a.pitch[q] - b.pitch[q]).abs() < 1e-9);
                assert!((a.yaw[q] + b.yaw[q]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn yaw_is_sampling_independent() {
        let s = spec();
        let m = morph("[111][111][111][000][111][111]");
        let g = GaitParams::default();
        let coarse = simulate_orientation(&s, &m, &g, 4.0, 256, None).unwrap();
        let fine = simulate_orientation(&s, &m, &g, 4.0, 4096, None).unwrap();
        for q in 0..256 {
            assert!((coarse.yaw[q] - fine.yaw[q * 16]).abs() < 1e-9);
        }
    }

    #[test]
    fn slope_offsets_healthy_tilt() {
        let s = spec();
        let terrain = TerrainBias { slope: 7f64.to_radians(), heading: 0.0 };
        let t = simulate_orientation(&s, &MorphologyVector::healthy(&s), &GaitParams::default(), 2.0, 256, Some(terrain))
            .unwrap();
        // Ground rising forward lifts the nose: negative pitch of about the slope.
        assert!(t.pitch.iter().all(|p| (p + 7f64.to_radians()).abs() < 1e-6));
    }

    #[test]
    fn solver() {
        let x = solve3([[2.0, 1.0, 0.0], [1.0, 3.0, 1.0], [0.0, 1.0, 4.0]], [3.0, 5.0, 5.0]);
        for (v, w) in x.iter().zip([1.0, 1.0, 1.0]) {
            assert!((v - w).abs() < 1e-12);
        }
    }
}
