use rayon::prelude::*;

use super::ga::Objective;
use crate::error::Result;
use crate::morphology::{enumerate_feasible_capped, MorphologyVector, RobotSpec};

#[derive(Debug, Clone)]
pub struct OracleResult {
    pub best: MorphologyVector,
    pub cost: f64,
    /// Every feasible morphology with its cost, in lexicographic order.
    pub table: Vec<(MorphologyVector, f64)>,
}

impl OracleResult {
    /// Morphologies whose cost is within `tol` of the minimum.
    pub fn minimizers(&self, tol: f64) -> Vec<&MorphologyVector> {
        self.table
            .iter()
            .filter(|(_, c)| *c <= self.cost + tol)
            .map(|(m, _)| m)
            .collect()
    }
}

/// Scores every feasible morphology and returns the global minimum. Ties go
/// to the lexicographically smallest vector.
pub fn exhaustive_search(spec: &RobotSpec, objective: &dyn Objective, cap: u64) -> Result<OracleResult> {
    let all = enumerate_feasible_capped(spec, cap)?;
    let table: Vec<(MorphologyVector, f64)> = all
        .into_par_iter()
        .map(|m| objective.cost(&m).map(|c| (m, c)))
        .collect::<Result<_>>()?;
    let (best, cost) = table
        .iter()
        .fold(None::<&(MorphologyVector, f64)>, |acc, entry| match acc {
            Some(b) if b.1 <= entry.1 => Some(b),
            _ => Some(entry),
        })
        .cloned()
        .expect("feasible set is never empty");
    Ok(OracleResult { best, cost, table })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::morphology::DEFAULT_ENUMERATION_CAP;

    #[test]
    fn finds_minimum_with_lexicographic_ties() {
        let spec = RobotSpec::default();
        let objective = |m: &MorphologyVector| -> Result<f64> {
            Ok(m.leg_counts().iter().map(|&c| (c as f64 - 2.0).abs()).sum::<f64>().max(1.0))
        };
        let res = exhaustive_search(&spec, &objective, DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(res.table.len(), 4096);
        assert_eq!(res.cost, 1.0);
        assert_eq!(&res.best, res.minimizers(0.0)[0]);
        assert!(res.table.windows(2).all(|w| w[0].0 < w[1].0));
    }

    #[test]
    fn cap_is_enforced() {
        let spec = RobotSpec::default();
        let objective = |_: &MorphologyVector| -> Result<f64> { Ok(0.0) };
        assert!(exhaustive_search(&spec, &objective, 1 << 10).is_err());
    }
}
