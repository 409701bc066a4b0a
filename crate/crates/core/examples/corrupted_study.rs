use morphid::config::PipelineConfig;
use morphid::identifier::{exhaustive_oracle, run_identification};
use morphid::scenarios::{legs_match, sensor_record, SCENARIOS};

fn main() {
    let seeds: u64 = std::env::var("SEEDS").ok().and_then(|s| s.parse().ok()).unwrap_or(10);
    let first: u64 = std::env::var("FIRST").ok().and_then(|s| s.parse().ok()).unwrap_or(100);
    let (mut ga_ok, mut or_ok, mut n) = (0, 0, 0);
    for sc in SCENARIOS.iter() {
        let (mut g, mut o) = (0, 0);
        for seed in first..first + seeds {
            let mut cfg = PipelineConfig { seed, ..PipelineConfig::default() };
            cfg.corruption.enabled = true;
            let s = cfg.settings().unwrap();
            let truth = sc.truth(&s.spec).unwrap();
            let rec = sensor_record(&s.model, &s.spec, &truth, &s.gait, cfg.record_shape().unwrap(), None, &cfg.corruption_config().unwrap()).unwrap();
            let id = run_identification(&rec, &s).unwrap();
            let or = exhaustive_oracle(&id.processed.filtered, &s).unwrap();
            g += legs_match(&truth, &id.run.final_candidate.morphology) as usize;
            o += legs_match(&truth, &or.best) as usize;
            if !legs_match(&truth, &or.best) {
                let ct = or.table.iter().find(|(m, _)| *m == truth).unwrap().1;
                println!("  oracle miss {} seed {seed}: {} cost {:.2} vs truth {:.2}", sc.name, or.best, or.cost, ct);
            }
        }
        println!("{:32} GA {g}/{seeds} oracle {o}/{seeds}", sc.name);
        ga_ok += g;
        or_ok += o;
        n += seeds as usize;
    }
    println!("total GA {ga_ok}/{n} oracle {or_ok}/{n}");
}
