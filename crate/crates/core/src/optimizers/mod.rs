//! Discrete-time optimizers behind one step interface.
//!
//! Every method mutates an [`OptimizerState`] in place; [`run`] drives any of
//! them and records a [`RunTrace`](crate::trace::RunTrace).

pub mod adaptive;
mod algorithm;
mod schedule;
mod state;
mod steps;

pub use adaptive::{ada_agd_step, ada_cagd_step, ada_gd_step, ada_rhgd_step};
pub use algorithm::{
    run, run_observed, Algorithm, AlgorithmName, AlgorithmSpec, RefreshSpec, RunOptions,
    StepsizeSpec, StepsizeUnit,
};
pub use schedule::RefreshSchedule;
pub use state::OptimizerState;
pub use steps::{
    agd_momentum, agd_step, cagd_mixing, cagd_step, cagd_theta, gd_step, rhgd_step, rphd_step,
    MomentumMode,
};
