//! Morphology identification: cost, genetic search, exhaustive oracle and the
//! record-to-morphology pipeline.

mod cost;
mod ga;
mod oracle;
mod pipeline;

pub use cost::evaluate_cost;
pub use ga::{crossover_step, init_population, mutation_step, run_ga, Candidate, GaConfig, GaRun, Objective};
pub use oracle::{exhaustive_search, OracleResult};
pub use pipeline::{
    condition_window, exhaustive_oracle, locate_motion_start, preprocess, run_identification, uniform_from_record,
    Identification, PipelineSettings, Preprocessed, SimulationObjective,
};
