//! Experiment configs, multi-seed execution, CSV output, grid search,
//! refresh-clock traces, and the verification suite.

pub mod config;
pub mod grid;
pub mod poisson;
pub mod runner;
pub mod verify;

pub use config::{parse_config, ExperimentConfig, InitialPoint, ProblemConfig};
pub use grid::{converged, grid_search_stepsize, largest_accepted, powers_of_two, Candidate, GridChoice};
pub use poisson::{emit_poisson_trace, poisson_jumps, PoissonRow, PoissonTrace, Series};
pub use runner::{
    execute, initial_point, run_experiment, write_aggregate_csv, write_outputs, write_run_csv, AggregateCurve,
    AggregateTrace, ExperimentMetadata, ExperimentResult, InstanceRecord, RunOutput, AGGREGATE_COLUMNS, RUN_COLUMNS,
};
pub use verify::{format_check, run_criterion, run_suite, VerifyOptions, CRITERIA};
