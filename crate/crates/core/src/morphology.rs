//! Morphology vectors and the structural description of a multi-legged robot.
//!
//! A morphology vector holds one existence bit per leg link, grouped by leg and
//! ordered from the body outwards. A link cannot exist without its parent, so
//! the feasible vectors are exactly those in which every leg segment is a run
//! of ones followed by a run of zeros.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on the number of raw bit states (2^N_T) exhaustive routines visit.
pub const DEFAULT_ENUMERATION_CAP: u64 = 1 << 20;

/// Structural description of the robot: legs, links, masses and mount geometry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobotSpec {
    pub leg_count: usize,
    pub links_per_leg: Vec<usize>,
    /// Link lengths in meters, `link_lengths[leg][link]`, proximal link first.
    pub link_lengths: Vec<Vec<f64>>,
    /// Link masses in kilograms, same layout as `link_lengths`.
    pub link_masses: Vec<Vec<f64>>,
    pub body_mass: f64,
    /// Azimuth of each leg mount in radians, measured counter-clockwise from
    /// the forward axis (positive = left side).
    pub mount_angle: Vec<f64>,
    pub mount_radius: f64,
}

impl Default for RobotSpec {
    /// Six three-link legs. Leg order is front-left, front-right, middle-left,
    /// middle-right, rear-left, rear-right, so the tripods {1,4,5} and {2,3,6}
    /// each touch both sides of the body.
    fn default() -> Self {
        let deg = std::f64::consts::PI / 180.0;
        RobotSpec {
            leg_count: 6,
            links_per_leg: vec![3; 6],
            link_lengths: vec![vec![0.045, 0.075, 0.12]; 6],
            link_masses: vec![vec![0.03, 0.05, 0.06]; 6],
            body_mass: 1.2,
            mount_angle: [45.0, -45.0, 90.0, -90.0, 135.0, -135.0]
                .iter()
                .map(|a| a * deg)
                .collect(),
            mount_radius: 0.1,
        }
    }
}

impl RobotSpec {
    /// Builds a spec with uniform per-leg links and evenly spread mount angles.
    pub fn uniform(leg_count: usize, links: usize, link_length: f64, link_mass: f64) -> Result<Self> {
        let step = 2.0 * std::f64::consts::PI / leg_count.max(1) as f64;
        let spec = RobotSpec {
            leg_count,
            links_per_leg: vec![links; leg_count],
            link_lengths: vec![vec![link_length; links]; leg_count],
            link_masses: vec![vec![link_mass; links]; leg_count],
            body_mass: 1.0,
            mount_angle: (0..leg_count).map(|i| step * (i as f64 + 0.5)).collect(),
            mount_radius: 0.1,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.leg_count == 0 {
            return Err(Error::Structural("robot needs at least one leg".into()));
        }
        let per_leg = [
            ("links_per_leg", self.links_per_leg.len()),
            ("link_lengths", self.link_lengths.len()),
            ("link_masses", self.link_masses.len()),
            ("mount_angle", self.mount_angle.len()),
        ];
        for (name, len) in per_leg {
            if len != self.leg_count {
                return Err(Error::Structural(format!(
                    "{name} has {len} entries for {} legs",
                    self.leg_count
                )));
            }
        }
        for (leg, &n) in self.links_per_leg.iter().enumerate() {
            if n == 0 {
                return Err(Error::Structural(format!("leg {} has no links", leg + 1)));
            }
            if self.link_lengths[leg].len() != n || self.link_masses[leg].len() != n {
                return Err(Error::Structural(format!(
                    "leg {} declares {n} links but lists {} lengths and {} masses",
                    leg + 1,
                    self.link_lengths[leg].len(),
                    self.link_masses[leg].len()
                )));
            }
            let positive = self.link_lengths[leg]
                .iter()
                .chain(&self.link_masses[leg])
                .all(|v| v.is_finite() && *v > 0.0);
            if !positive {
                return Err(Error::Structural(format!(
                    "leg {} has a non-positive link length or mass",
                    leg + 1
                )));
            }
        }
        if !(self.body_mass.is_finite() && self.body_mass > 0.0) {
            return Err(Error::Structural("body mass must be positive".into()));
        }
        if !(self.mount_radius.is_finite() && self.mount_radius > 0.0) {
            return Err(Error::Structural("mount radius must be positive".into()));
        }
        Ok(())
    }

    /// Total number of leg links, N_T.
    pub fn total_links(&self) -> usize {
        self.links_per_leg.iter().sum()
    }

    /// Size of the feasible set, the product of (n_i + 1).
    pub fn feasible_count(&self) -> u128 {
        self.links_per_leg.iter().map(|&n| n as u128 + 1).product()
    }

    /// Mount point of a leg in the body frame (x forward, y left).
    pub fn mount_point(&self, leg: usize) -> (f64, f64) {
        let a = self.mount_angle[leg];
        (self.mount_radius * a.cos(), self.mount_radius * a.sin())
    }

    /// Index of the leg mounted at the mirror image of `leg` across the
    /// sagittal plane, if the geometry has one.
    pub fn mirror_leg(&self, leg: usize) -> Option<usize> {
        let target = -self.mount_angle[leg];
        self.mount_angle.iter().position(|&a| {
            let d = (a - target).rem_euclid(2.0 * std::f64::consts::PI);
            d < 1e-9 || (2.0 * std::f64::consts::PI - d) < 1e-9
        })
    }
}

/// Binary existence numbers for every leg link, partitioned per leg.
///
/// Ordering is lexicographic over the flattened bits.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MorphologyVector {
    bits: Vec<bool>,
    leg_sizes: Vec<usize>,
}

impl MorphologyVector {
    /// Wraps raw bits for `spec`; the vector need not be feasible.
    pub fn new(bits: Vec<bool>, spec: &RobotSpec) -> Result<Self> {
        if bits.len() != spec.total_links() {
            return Err(Error::Structural(format!(
                "morphology has {} elements but the robot has {} links",
                bits.len(),
                spec.total_links()
            )));
        }
        Ok(MorphologyVector {
            bits,
            leg_sizes: spec.links_per_leg.clone(),
        })
    }

    /// The undamaged morphology.
    pub fn healthy(spec: &RobotSpec) -> Self {
        MorphologyVector {
            bits: vec![true; spec.total_links()],
            leg_sizes: spec.links_per_leg.clone(),
        }
    }

    /// Builds a feasible vector from the number of present links on each leg.
    pub fn from_leg_counts(counts: &[usize], spec: &RobotSpec) -> Result<Self> {
        if counts.len() != spec.leg_count {
            return Err(Error::Structural(format!(
                "{} leg counts given for {} legs",
                counts.len(),
                spec.leg_count
            )));
        }
        let mut bits = Vec::with_capacity(spec.total_links());
        for (leg, (&c, &n)) in counts.iter().zip(&spec.links_per_leg).enumerate() {
            if c > n {
                return Err(Error::Structural(format!(
                    "leg {} has {n} links, cannot keep {c}",
                    leg + 1
                )));
            }
            bits.extend((0..n).map(|j| j < c));
        }
        Ok(MorphologyVector {
            bits,
            leg_sizes: spec.links_per_leg.clone(),
        })
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn leg_sizes(&self) -> &[usize] {
        &self.leg_sizes
    }

    /// Per-leg slices of the existence bits.
    pub fn legs(&self) -> impl Iterator<Item = &[bool]> + '_ {
        let mut rest = self.bits.as_slice();
        self.leg_sizes.iter().map(move |&n| {
            let (head, tail) = rest.split_at(n);
            rest = tail;
            head
        })
    }

    pub fn leg(&self, leg: usize) -> &[bool] {
        let start: usize = self.leg_sizes[..leg].iter().sum();
        &self.bits[start..start + self.leg_sizes[leg]]
    }

    /// Number of leading present links on each leg (the leg-damage class of a
    /// feasible vector).
    pub fn leg_counts(&self) -> Vec<usize> {
        self.legs()
            .map(|leg| leg.iter().take_while(|&&b| b).count())
            .collect()
    }

    /// Legs (0-based) with at least one missing link.
    pub fn damaged_legs(&self) -> Vec<usize> {
        self.legs()
            .enumerate()
            .filter(|(_, leg)| leg.iter().any(|b| !b))
            .map(|(i, _)| i)
            .collect()
    }

    /// True when no present link follows an absent one on any leg.
    pub fn is_feasible(&self) -> bool {
        self.legs()
            .all(|leg| leg.windows(2).all(|w| w[0] || !w[1]))
    }

    pub(crate) fn set_bit(&mut self, index: usize, value: bool) {
        self.bits[index] = value;
    }

    fn check_spec(&self, spec: &RobotSpec) -> Result<()> {
        if self.leg_sizes != spec.links_per_leg {
            return Err(Error::Structural(format!(
                "morphology leg layout {:?} does not match robot {:?}",
                self.leg_sizes, spec.links_per_leg
            )));
        }
        Ok(())
    }

    /// Renders the bracketed per-leg literal, e.g. `[111][110][000]`.
    pub fn to_literal(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for MorphologyVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for leg in self.legs() {
            f.write_str("[")?;
            for &b in leg {
                f.write_str(if b { "1" } else { "0" })?;
            }
            f.write_str("]")?;
        }
        Ok(())
    }
}

/// Parses a bracketed literal. The leg layout is taken from the groups; use
/// [`MorphologyVector::parse_for`] to also check it against a robot.
impl FromStr for MorphologyVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parse_err = |message: String| Error::Parse { line: 1, message };
        let mut bits = Vec::new();
        let mut leg_sizes = Vec::new();
        let mut current: Option<usize> = None;
        for (pos, c) in s.trim().char_indices() {
            match (c, current) {
                ('[', None) => current = Some(0),
                (']', Some(0)) => return Err(parse_err(format!("empty leg group at column {}", pos + 1))),
                (']', Some(n)) => {
                    leg_sizes.push(n);
                    current = None;
                }
                ('0' | '1', Some(n)) => {
                    bits.push(c == '1');
                    current = Some(n + 1);
                }
                (c, _) if c.is_whitespace() && current.is_none() => {}
                (c, _) => {
                    return Err(parse_err(format!(
                        "unexpected {c:?} at column {} in morphology literal",
                        pos + 1
                    )))
                }
            }
        }
        if current.is_some() {
            return Err(parse_err("unterminated leg group".into()));
        }
        if leg_sizes.is_empty() {
            return Err(parse_err("morphology literal has no legs".into()));
        }
        Ok(MorphologyVector { bits, leg_sizes })
    }
}

impl MorphologyVector {
    /// Parses a literal and checks that its leg layout matches `spec`.
    pub fn parse_for(s: &str, spec: &RobotSpec) -> Result<Self> {
        let m: MorphologyVector = s.parse()?;
        m.check_spec(spec)?;
        Ok(m)
    }
}

/// Link logic: on every leg, all links after the first absent one are forced
/// absent. Links before it are left untouched.
pub fn apply_link_logic(m: &MorphologyVector, spec: &RobotSpec) -> Result<MorphologyVector> {
    if m.len() != spec.total_links() {
        return Err(Error::Structural(format!(
            "morphology has {} elements but the robot has {} links",
            m.len(),
            spec.total_links()
        )));
    }
    m.check_spec(spec)?;
    let mut out = m.clone();
    repair_in_place(&mut out.bits, &spec.links_per_leg);
    Ok(out)
}

pub(crate) fn repair_in_place(bits: &mut [bool], leg_sizes: &[usize]) {
    let mut start = 0;
    for &n in leg_sizes {
        let leg = &mut bits[start..start + n];
        if let Some(first_gap) = leg.iter().position(|&b| !b) {
            leg[first_gap..].iter_mut().for_each(|b| *b = false);
        }
        start += n;
    }
}

fn check_cap(spec: &RobotSpec, cap: u64) -> Result<()> {
    let n = spec.total_links();
    let raw = if n >= 64 { u64::MAX } else { 1u64 << n };
    if raw > cap {
        return Err(Error::Resource(format!(
            "2^{n} raw morphology states exceed the enumeration cap of {cap}"
        )));
    }
    Ok(())
}

/// All feasible morphologies in lexicographic order, with the default cap.
pub fn enumerate_feasible(spec: &RobotSpec) -> Result<Vec<MorphologyVector>> {
    enumerate_feasible_capped(spec, DEFAULT_ENUMERATION_CAP)
}

/// All feasible morphologies in lexicographic order. Fails when 2^N_T exceeds `cap`.
pub fn enumerate_feasible_capped(spec: &RobotSpec, cap: u64) -> Result<Vec<MorphologyVector>> {
    spec.validate()?;
    check_cap(spec, cap)?;
    let total = spec.feasible_count() as usize;
    let mut counts = vec![0usize; spec.leg_count];
    let mut out = Vec::with_capacity(total);
    // Odometer over per-leg present-link counts, counting from 0 on each leg.
    loop {
        out.push(MorphologyVector::from_leg_counts(&counts, spec)?);
        let mut leg = spec.leg_count;
        loop {
            if leg == 0 {
                out.sort();
                return Ok(out);
            }
            leg -= 1;
            if counts[leg] < spec.links_per_leg[leg] {
                counts[leg] += 1;
                break;
            }
            counts[leg] = 0;
        }
    }
}

/// Draws `count` pairwise-distinct feasible morphologies, uniformly over the
/// feasible set: each leg's present-link count is drawn uniformly from
/// `0..=n_i`. Collisions are redrawn.
pub fn random_feasible(spec: &RobotSpec, count: usize, rng_seed: u64) -> Result<Vec<MorphologyVector>> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    random_feasible_with(spec, count, &mut rng)
}

pub(crate) fn random_feasible_with<R: Rng>(
    spec: &RobotSpec,
    count: usize,
    rng: &mut R,
) -> Result<Vec<MorphologyVector>> {
    spec.validate()?;
    if count as u128 > spec.feasible_count() {
        return Err(Error::argument(format!(
            "requested {count} distinct morphologies but only {} are feasible",
            spec.feasible_count()
        )));
    }
    let mut seen = HashSet::with_capacity(count);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let counts: Vec<usize> = spec.links_per_leg.iter().map(|&n| rng.random_range(0..=n)).collect();
        let m = MorphologyVector::from_leg_counts(&counts, spec)?;
        if seen.insert(m.clone()) {
            out.push(m);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn one_leg(n: usize) -> RobotSpec {
        RobotSpec::uniform(1, n, 0.1, 0.1).unwrap()
    }

    fn bits(s: &str) -> Vec<bool> {
        s.chars().map(|c| c == '1').collect()
    }

    #[test]
    fn link_logic_examples() {
        let spec = one_leg(3);
        let fix = |s: &str| {
            let m = MorphologyVector::new(bits(s), &spec).unwrap();
            apply_link_logic(&m, &spec).unwrap().to_string()
        };
        assert_eq!(fix("101"), "[100]");
        assert_eq!(fix("111"), "[111]");
        assert_eq!(fix("011"), "[000]");
    }

    #[test]
    fn link_logic_rejects_wrong_length() {
        let spec = RobotSpec::default();
        let other = one_leg(3);
        let m = MorphologyVector::new(bits("111"), &other).unwrap();
        assert!(matches!(apply_link_logic(&m, &spec), Err(Error::Structural(_))));
    }

    #[test]
    fn enumerate_small_legs() {
        let got: Vec<String> = enumerate_feasible(&one_leg(1))
            .unwrap()
            .iter()
            .map(|m| m.to_string())
            .collect();
        assert_eq!(got, ["[0]", "[1]"]);

        // Oracle: all 2^3 raw states filtered by the fixed-point test.
        let spec = one_leg(3);
        let mut brute: Vec<MorphologyVector> = (0..8u32)
            .map(|s| MorphologyVector::new((0..3).map(|j| s >> (2 - j) & 1 == 1).collect(), &spec).unwrap())
            .filter(|m| apply_link_logic(m, &spec).unwrap() == *m)
            .collect();
        brute.sort();
        assert_eq!(enumerate_feasible(&spec).unwrap(), brute);
        assert_eq!(brute.len(), 4);
    }

    #[test]
    fn enumerate_respects_cap() {
        let spec = RobotSpec::uniform(7, 3, 0.1, 0.1).unwrap();
        assert!(matches!(enumerate_feasible(&spec), Err(Error::Resource(_))));
        assert_eq!(enumerate_feasible_capped(&spec, 1 << 21).unwrap().len(), 4usize.pow(7));
    }

    #[test]
    fn random_feasible_is_seeded() {
        let spec = RobotSpec::default();
        let a = random_feasible(&spec, 50, 9).unwrap();
        let b = random_feasible(&spec, 50, 9).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|m| m.is_feasible()));
        let unique: HashSet<_> = a.iter().collect();
        assert_eq!(unique.len(), 50);
        assert!(matches!(
            random_feasible(&one_leg(2), 4, 0),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn literal_round_trip_and_errors() {
        let spec = RobotSpec::default();
        let lit = "[111][110][000][111][111][111]";
        let m = MorphologyVector::parse_for(lit, &spec).unwrap();
        assert_eq!(m.to_literal(), lit);
        assert_eq!(m.leg_counts(), vec![3, 2, 0, 3, 3, 3]);
        assert_eq!(m.damaged_legs(), vec![1, 2]);
        assert!("[11".parse::<MorphologyVector>().is_err());
        assert!("[]".parse::<MorphologyVector>().is_err());
        assert!("[1a1]".parse::<MorphologyVector>().is_err());
        assert!(MorphologyVector::parse_for("[11][11]", &spec).is_err());
    }

    #[test]
    fn default_spec_mirror_pairs() {
        let spec = RobotSpec::default();
        let pairs: Vec<_> = (0..6).map(|l| spec.mirror_leg(l).unwrap()).collect();
        assert_eq!(pairs, vec![1, 0, 3, 2, 5, 4]);
    }

    proptest! {
        #[test]
        fn link_logic_idempotent_and_monotone(raw in proptest::collection::vec(any::<bool>(), 18)) {
            let spec = RobotSpec::default();
            let m = MorphologyVector::new(raw.clone(), &spec).unwrap();
            let once = apply_link_logic(&m, &spec).unwrap();
            let twice = apply_link_logic(&once, &spec).unwrap();
            prop_assert_eq!(&once, &twice);
            prop_assert!(once.is_feasible());
            for (a, b) in raw.iter().zip(once.bits()) {
                prop_assert!(!(*b && !*a));
            }
        }

        #[test]
        fn feasible_count_matches_brute_force(sizes in proptest::collection::vec(1usize..=4, 1..=4)) {
            let n: usize = sizes.iter().sum();
            prop_assume!(n <= 12);
            let mut spec = RobotSpec::uniform(sizes.len(), 1, 0.1, 0.1).unwrap();
            spec.links_per_leg = sizes.clone();
            spec.link_lengths = sizes.iter().map(|&k| vec![0.1; k]).collect();
            spec.link_masses = spec.link_lengths.clone();
            let brute = (0u32..1 << n)
                .filter(|s| {
                    let m = MorphologyVector::new((0..n).map(|j| s >> j & 1 == 1).collect(), &spec).unwrap();
                    apply_link_logic(&m, &spec).unwrap() == m
                })
                .count();
            prop_assert_eq!(enumerate_feasible(&spec).unwrap().len(), brute);
            prop_assert_eq!(brute as u128, spec.feasible_count());
        }
    }
}
