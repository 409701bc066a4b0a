//! Binary genetic search over feasible morphologies.
//!
//! Each generation: evaluate new candidates, rank by ascending cost, keep the
//! better half, rebuild the worse half by gene-wise crossover with random
//! members of the better half, then mutate whole legs of the rebuilt half.
//! Link logic is re-applied after every change so all candidates stay feasible.

use std::collections::HashMap;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::morphology::{random_feasible_with, repair_in_place, MorphologyVector, RobotSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct GaConfig {
    pub pop_size: usize,
    pub generations: usize,
    /// Crossover rate, CR.
    pub cr: f64,
    /// Per-leg mutation rate, MR.
    pub mr: f64,
    /// Probability that a mutated link is present, `p_table[leg][link]`.
    pub p_table: Vec<Vec<f64>>,
    /// Simulated and compared span, seconds.
    pub sim_time: f64,
    pub rng_seed: u64,
    /// Stop after this many generations without improvement; `None` runs all.
    pub convergence_patience: Option<usize>,
    /// Draw a fresh donor for every gene (true) or once per candidate.
    pub donor_per_gene: bool,
}

impl Default for GaConfig {
    fn default() -> Self {
        GaConfig {
            pop_size: 10,
            generations: 20,
            cr: 0.9,
            mr: 0.33,
            p_table: vec![vec![0.9, 0.7, 0.7]; 6],
            sim_time: 5.0,
            rng_seed: 0,
            convergence_patience: None,
            donor_per_gene: true,
        }
    }
}

impl GaConfig {
    pub fn validate(&self, spec: &RobotSpec) -> Result<()> {
        if self.pop_size < 4 || !self.pop_size.is_multiple_of(2) {
            return Err(Error::Config(format!(
                "population size {} must be even and at least 4",
                self.pop_size
            )));
        }
        if self.generations == 0 {
            return Err(Error::Config("at least one generation is required".into()));
        }
        let unit = |p: f64| (0.0..=1.0).contains(&p);
        if !unit(self.cr) || !unit(self.mr) {
            return Err(Error::Config("CR and MR must lie in [0, 1]".into()));
        }
        let shape_ok = self.p_table.len() == spec.leg_count
            && self
                .p_table
                .iter()
                .zip(&spec.links_per_leg)
                .all(|(row, &n)| row.len() == n);
        if !shape_ok {
            return Err(Error::Config(
                "mutation probability table must list one value per link of every leg".into(),
            ));
        }
        if !self.p_table.iter().flatten().all(|&p| unit(p)) {
            return Err(Error::Config("mutation probabilities must lie in [0, 1]".into()));
        }
        if !(self.sim_time.is_finite() && self.sim_time > 0.0) {
            return Err(Error::Config("simulation time must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub morphology: MorphologyVector,
    /// `None` until evaluated.
    pub cost: Option<f64>,
}

impl Candidate {
    pub fn new(morphology: MorphologyVector) -> Self {
        Candidate { morphology, cost: None }
    }

    fn cost_or_inf(&self) -> f64 {
        self.cost.unwrap_or(f64::INFINITY)
    }
}

#[derive(Debug, Clone)]
pub struct GaRun {
    pub best_per_generation: Vec<(MorphologyVector, f64)>,
    pub final_candidate: Candidate,
    /// Distinct objective evaluations performed.
    pub evaluations: usize,
    pub wall_time: f64,
}

impl GaRun {
    pub fn final_cost(&self) -> f64 {
        self.final_candidate.cost_or_inf()
    }
}

/// A cost over morphologies. Must be a pure function of its input so
/// candidates can be scored concurrently.
pub trait Objective: Sync {
    fn cost(&self, m: &MorphologyVector) -> Result<f64>;
}

impl<F> Objective for F
where
    F: Fn(&MorphologyVector) -> Result<f64> + Sync,
{
    fn cost(&self, m: &MorphologyVector) -> Result<f64> {
        self(m)
    }
}

/// Independent random stream for one phase of one generation.
fn phase_rng(seed: u64, generation: usize, phase: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((generation as u64) << 2 | phase);
    rng
}

/// `pop_size` distinct feasible candidates, costs unevaluated.
pub fn init_population(spec: &RobotSpec, cfg: &GaConfig) -> Result<Vec<Candidate>> {
    cfg.validate(spec)?;
    let mut rng = phase_rng(cfg.rng_seed, 0, 0);
    Ok(random_feasible_with(spec, cfg.pop_size, &mut rng)?
        .into_iter()
        .map(Candidate::new)
        .collect())
}

fn check_population(pop: &[Candidate], cfg: &GaConfig) -> Result<()> {
    if !pop.len().is_multiple_of(2) || pop.len() != cfg.pop_size {
        return Err(Error::Config(format!(
            "population of {} does not match the even size {}",
            pop.len(),
            cfg.pop_size
        )));
    }
    Ok(())
}

/// Rebuilds the second half of a ranked population. Each gene is copied, with
/// probability CR, from a randomly chosen member of the first half.
pub fn crossover_step<R: Rng>(pop: &[Candidate], cfg: &GaConfig, rng: &mut R) -> Result<Vec<Candidate>> {
    check_population(pop, cfg)?;
    let half = pop.len() / 2;
    let mut out = pop.to_vec();
    for child in out[half..].iter_mut() {
        let mut donor = rng.random_range(0..half);
        for gene in 0..child.morphology.len() {
            let r: f64 = rng.random();
            if cfg.donor_per_gene {
                donor = rng.random_range(0..half);
            }
            if r <= cfg.cr {
                child.morphology.set_bit(gene, pop[donor].morphology.bits()[gene]);
            }
        }
        let sizes = child.morphology.leg_sizes().to_vec();
        let mut bits = child.morphology.bits().to_vec();
        repair_in_place(&mut bits, &sizes);
        for (i, b) in bits.into_iter().enumerate() {
            child.morphology.set_bit(i, b);
        }
        child.cost = None;
    }
    Ok(out)
}

/// Mutates the second half: each leg, with probability MR, is redrawn link by
/// link (present with probability `p_table[leg][link]`) and then repaired.
pub fn mutation_step<R: Rng>(pop: &[Candidate], cfg: &GaConfig, rng: &mut R) -> Result<Vec<Candidate>> {
    check_population(pop, cfg)?;
    let half = pop.len() / 2;
    let mut out = pop.to_vec();
    for child in out[half..].iter_mut() {
        let sizes = child.morphology.leg_sizes().to_vec();
        let mut start = 0;
        for (leg, &n) in sizes.iter().enumerate() {
            let r: f64 = rng.random();
            if r <= cfg.mr {
                let mut gap = false;
                for j in 0..n {
                    let draw: f64 = rng.random();
                    let present = draw <= cfg.p_table[leg][j] && !gap;
                    gap |= !present;
                    child.morphology.set_bit(start + j, present);
                }
                child.cost = None;
            }
            start += n;
        }
    }
    Ok(out)
}

/// Runs the full search against `objective`.
pub fn run_ga(spec: &RobotSpec, cfg: &GaConfig, objective: &dyn Objective) -> Result<GaRun> {
    let started = Instant::now();
    let mut pop = init_population(spec, cfg)?;
    let mut cache: HashMap<MorphologyVector, f64> = HashMap::new();
    let mut history: Vec<(MorphologyVector, f64)> = Vec::with_capacity(cfg.generations);
    let mut best: Option<Candidate> = None;
    let mut stale = 0usize;

    for generation in 0..cfg.generations {
        let mut pending: Vec<MorphologyVector> = pop
            .iter()
            .filter(|c| c.cost.is_none() && !cache.contains_key(&c.morphology))
            .map(|c| c.morphology.clone())
            .collect();
        pending.sort();
        pending.dedup();
        let scored: Vec<(MorphologyVector, f64)> = pending
            .into_par_iter()
            .map(|m| objective.cost(&m).map(|c| (m, c)))
            .collect::<Result<_>>()?;
        cache.extend(scored);
        for c in pop.iter_mut() {
            if c.cost.is_none() {
                c.cost = cache.get(&c.morphology).copied();
            }
        }
        pop.sort_by(|a, b| a.cost_or_inf().total_cmp(&b.cost_or_inf()));
        debug_assert!(pop.iter().all(|c| c.morphology.is_feasible()));

        let leader = pop[0].clone();
        let improved = best
            .as_ref()
            .is_none_or(|b| leader.cost_or_inf() < b.cost_or_inf());
        if improved {
            best = Some(leader.clone());
            stale = 0;
        } else {
            stale += 1;
        }
        history.push((leader.morphology.clone(), leader.cost_or_inf()));

        if generation + 1 == cfg.generations {
            break;
        }
        if let Some(patience) = cfg.convergence_patience {
            if stale >= patience {
                break;
            }
        }
        pop = crossover_step(&pop, cfg, &mut phase_rng(cfg.rng_seed, generation + 1, 1))?;
        pop = mutation_step(&pop, cfg, &mut phase_rng(cfg.rng_seed, generation + 1, 2))?;
    }

    Ok(GaRun {
        best_per_generation: history,
        final_candidate: best.expect("at least one generation ran"),
        evaluations: cache.len(),
        wall_time: started.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn spec() -> RobotSpec {
        RobotSpec::default()
    }

    fn ranked(cfg: &GaConfig, seed: u64) -> Vec<Candidate> {
        let mut c = cfg.clone();
        c.rng_seed = seed;
        let mut pop = init_population(&spec(), &c).unwrap();
        for (i, cand) in pop.iter_mut().enumerate() {
            cand.cost = Some(i as f64);
        }
        pop
    }

    #[test]
    fn population_is_unique_feasible_and_seeded() {
        let cfg = GaConfig::default();
        let pop = init_population(&spec(), &cfg).unwrap();
        assert_eq!(pop.len(), 10);
        assert!(pop.iter().all(|c| c.morphology.is_feasible() && c.cost.is_none()));
        let set: HashSet<_> = pop.iter().map(|c| &c.morphology).collect();
        assert_eq!(set.len(), 10);
        assert_eq!(pop, init_population(&spec(), &cfg).unwrap());
    }

    #[test]
    fn rejects_odd_or_tiny_populations() {
        for size in [2, 7] {
            let cfg = GaConfig { pop_size: size, ..GaConfig::default() };
            assert!(matches!(init_population(&spec(), &cfg), Err(Error::Config(_))));
        }
        let cfg = GaConfig { p_table: vec![vec![0.5; 2]; 6], ..GaConfig::default() };
        assert!(cfg.validate(&spec()).is_err());
    }

    #[test]
    fn crossover_extremes() {
        let cfg = GaConfig { cr: 0.0, ..GaConfig::default() };
        let pop = ranked(&cfg, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let out = crossover_step(&pop, &cfg, &mut rng).unwrap();
        for (a, b) in pop.iter().zip(&out) {
            assert_eq!(a.morphology, b.morphology);
        }

        let cfg = GaConfig { cr: 1.0, ..GaConfig::default() };
        let mut pop = ranked(&cfg, 2);
        let m = MorphologyVector::parse_for("[110][111][000][100][111][110]", &spec()).unwrap();
        for c in pop[..5].iter_mut() {
            c.morphology = m.clone();
        }
        let out = crossover_step(&pop, &cfg, &mut rng).unwrap();
        assert!(out.iter().all(|c| c.morphology == m));
        assert!(out[..5].iter().all(|c| c.cost.is_some()));
    }

    #[test]
    fn crossover_output_is_feasible() {
        let cfg = GaConfig { cr: 0.5, ..GaConfig::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for seed in 0..50 {
            let out = crossover_step(&ranked(&cfg, seed), &cfg, &mut rng).unwrap();
            assert!(out.iter().all(|c| c.morphology.is_feasible()));
        }
    }

    #[test]
    fn mutation_extremes() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let cfg = GaConfig { mr: 0.0, ..GaConfig::default() };
        let pop = ranked(&cfg, 4);
        assert_eq!(mutation_step(&pop, &cfg, &mut rng).unwrap(), pop);

        let cfg = GaConfig { mr: 1.0, p_table: vec![vec![1.0; 3]; 6], ..GaConfig::default() };
        let out = mutation_step(&pop, &cfg, &mut rng).unwrap();
        assert!(out[5..].iter().all(|c| c.morphology == MorphologyVector::healthy(&spec())));
        assert_eq!(out[..5], pop[..5]);

        let cfg = GaConfig { mr: 1.0, p_table: vec![vec![0.0; 3]; 6], ..GaConfig::default() };
        let out = mutation_step(&pop, &cfg, &mut rng).unwrap();
        assert!(out[5..].iter().all(|c| c.morphology.bits().iter().all(|b| !b)));
    }

    #[test]
    fn search_is_elitist_and_reproducible() {
        let target = MorphologyVector::parse_for("[111][100][111][111][000][111]", &spec()).unwrap();
        let objective = |m: &MorphologyVector| -> Result<f64> {
            Ok(m.leg_counts()
                .iter()
                .zip(target.leg_counts())
                .map(|(a, b)| (*a as f64 - b as f64).abs())
                .sum())
        };
        let cfg = GaConfig { rng_seed: 17, ..GaConfig::default() };
        let a = run_ga(&spec(), &cfg, &objective).unwrap();
        let b = run_ga(&spec(), &cfg, &objective).unwrap();
        assert_eq!(a.best_per_generation, b.best_per_generation);
        assert_eq!(a.best_per_generation.len(), 20);
        assert!(a.best_per_generation.windows(2).all(|w| w[1].1 <= w[0].1));
        assert_eq!(a.final_cost(), a.best_per_generation.last().unwrap().1);
        assert!(a.evaluations <= 10 + 19 * 5);
    }

    #[test]
    fn patience_stops_early() {
        let objective = |_: &MorphologyVector| -> Result<f64> { Ok(1.0) };
        let cfg = GaConfig { convergence_patience: Some(3), ..GaConfig::default() };
        let run = run_ga(&spec(), &cfg, &objective).unwrap();
        assert_eq!(run.best_per_generation.len(), 4);
    }
}
