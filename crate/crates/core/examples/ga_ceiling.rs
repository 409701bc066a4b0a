use morphid::identifier::{run_ga, GaConfig};
use morphid::morphology::{MorphologyVector, RobotSpec};
use morphid::scenarios::SCENARIOS;
use morphid::Result;

fn main() {
    let spec = RobotSpec::default();
    let w = [1.0, 1.3, 0.8, 1.1, 0.9, 1.2];
    for kind in 0..4 {
        let mut line = String::new();
        let mut total = 0;
        for sc in &SCENARIOS {
            let truth = sc.truth(&spec).unwrap();
            let tc = truth.leg_counts();
            let mut ok = 0;
            for seed in 0..100 {
                let obj = |m: &MorphologyVector| -> Result<f64> {
                    let c = m.leg_counts();
                    if c.iter().filter(|&&x| x > 0).count() < 3 { return Ok(f64::INFINITY); }
                    Ok(c.iter().zip(&tc).enumerate().map(|(i, (&a, &b))| {
                        let d = (a as f64 - b as f64).abs();
                        match kind { 0 => d.sqrt(), 1 => w[i] * d.sqrt(), 2 => w[i] * d.powf(0.25), _ => w[i] * (d + (a as f64) * 0.1 * (d > 0.0) as u8 as f64) }
                    }).sum())
                };
                let cfg = GaConfig { rng_seed: seed, ..GaConfig::default() };
                let run = run_ga(&spec, &cfg, &obj).unwrap();
                let m = &run.final_candidate.morphology; if m.leg_counts().iter().zip(truth.leg_counts()).all(|(&a, b)| (a == 3) == (b == 3) && (a as i64 - b as i64).abs() <= 1) { ok += 1; }
            }
            total += ok;
            line += &format!(" {ok}");
        }
        println!("kind {kind}: {total}/800 |{line}");
    }
}
