use std::collections::HashMap;

use morphid::detector::{detect, DetectorConfig};
use morphid::identifier::{evaluate_cost, run_ga, GaConfig, PipelineSettings};
use morphid::morphology::{enumerate_feasible, MorphologyVector, RobotSpec};
use morphid::scenarios::SCENARIOS;
use morphid::signal::filter_trajectory;
use morphid::surrogate::{GaitParams, SurrogateModel, SurrogateParams};
use morphid::{OrientationTrajectory, Result};

fn leg_level(m: &MorphologyVector, t: &MorphologyVector) -> bool {
    m.leg_counts().iter().zip(t.leg_counts()).all(|(&a, b)| (a == 3) == (b == 3) && (a as i64 - b as i64).abs() <= 1)
}

fn main() {
    let spec = RobotSpec::default();
    let gait = GaitParams::default();
    let raw = std::env::var("RAW").is_ok();
    let seeds: u64 = std::env::var("SEEDS").ok().and_then(|s| s.parse().ok()).unwrap_or(30);
    let mut lines: Vec<String> = std::env::var("P").unwrap_or_default().split(';').map(String::from).collect();
    if let Ok(n) = std::env::var("RANDOM") {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(std::env::var("RSEED").ok().and_then(|s| s.parse().ok()).unwrap_or(1));
        lines = (0..n.parse::<usize>().unwrap()).map(|_| {
            format!("drop_gain={:.3},max_drop={:.3},reach_margin={:.3},swing_weight={:.3},transition={:.3},yaw_gain={:.2},sway_gain={:.2},load_shift={:.3}",
                rng.random_range(0.3..2.0), rng.random_range(0.05..0.6), rng.random_range(0.0..0.04), rng.random_range(0.02..0.5),
                rng.random_range(0.02..0.3), rng.random_range(1.0..10.0), rng.random_range(0.0..4.0), rng.random_range(0.8..1.414))
        }).collect();
    }
    for line in lines {
        let params: SurrogateParams = toml::from_str(&line.replace(',', "\n")).unwrap();
        let settings = PipelineSettings { model: SurrogateModel::new(params).unwrap(), ..PipelineSettings::default() };
        let model = &settings.model;
        let healthy = MorphologyVector::healthy(&spec);
        let h = model.simulate(&spec, &healthy, &gait, 5.0, 1024, None).unwrap();
        let rep = detect(&h, &DetectorConfig::default()).unwrap();
        let d = MorphologyVector::parse_for("[111][111][000][000][111][111]", &spec).unwrap();
        let s = model.simulate(&spec, &d, &gait, 5.0, 1024, None).unwrap();
        let rd = detect(&s, &DetectorConfig::default()).unwrap();
        let pmax = s.pitch.iter().fold(0.0f64, |a, p| a.max(p.abs())).to_degrees();
        if rep.max_fluctuation.to_degrees() > 4.5 || rd.max_fluctuation.to_degrees() < 5.0 || pmax > 2.0 { println!("== {line} rejected"); continue; }
        println!("== {line}\n healthy fluct {:.2} | legs34 fluct {:.1} pitch {:.2}", rep.max_fluctuation.to_degrees(), rd.max_fluctuation.to_degrees(), pmax);
        let all = enumerate_feasible(&spec).unwrap();
        let filtered: HashMap<MorphologyVector, Option<OrientationTrajectory>> = all
            .iter()
            .map(|m| (m.clone(), model.simulate(&spec, m, &gait, 5.0, 1024, None).ok().map(|s| if raw { s } else { filter_trajectory(&s, &settings.filter).unwrap() })))
            .collect();
        let (mut total, mut total_leg) = (0, 0);
        let mut out = String::new();
        for sc in &SCENARIOS {
            let truth = sc.truth(&spec).unwrap();
            let target = filtered[&truth].clone().unwrap();
            let table: HashMap<&MorphologyVector, f64> = filtered
                .iter()
                .map(|(m, f)| (m, f.as_ref().map_or(f64::INFINITY, |f| evaluate_cost(f, &target).unwrap())))
                .collect();
            if std::env::var("SHOW").ok().as_deref() == Some(sc.name) {
                let mut v: Vec<_> = table.iter().collect();
                v.sort_by(|a, b| a.1.total_cmp(b.1));
                for (m, c) in v.iter().take(25) { println!("   rank {m} {c:.2} {}", leg_level(m, &truth)); }
            }
            let obj = |m: &MorphologyVector| -> Result<f64> { Ok(table[m]) };
            let (mut ok, mut okl) = (0, 0);
            for seed in 0..seeds {
                let cfg = GaConfig { rng_seed: seed, ..settings.ga.clone() };
                let run = run_ga(&spec, &cfg, &obj).unwrap();
                ok += (run.final_candidate.morphology == truth) as u32;
                okl += leg_level(&run.final_candidate.morphology, &truth) as u32;
                if std::env::var("SHOW").ok().as_deref() == Some(sc.name) && !leg_level(&run.final_candidate.morphology, &truth) {
                    println!("   fail {} {:.2} (truth 0; evals {})", run.final_candidate.morphology, run.final_cost(), run.evaluations);
                }
            }
            total += ok;
            total_leg += okl;
            out += &format!(" {ok}/{okl}");
        }
        println!(" exact {total} leg {total_leg} of {} |{out}", seeds * 8);
    }
}
