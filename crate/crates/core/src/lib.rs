//! Solver for the two-model LLM routing game.
//!
//! A provider routes each task to a standard model or a reasoning model and
//! may escalate failed tasks from the first to the second. The user re-prompts
//! after failures or abandons the task. The provider commits first, the user
//! best-responds, and the provider minimizes its expected cost given that
//! response.
//!
//! - [`model`]: parameters and closed-form session outcomes.
//! - [`user`]: the user best response and its thresholds.
//! - [`provider`]: provider-optimal policies and the brute-force check.
//! - [`analysis`]: misalignment gap, throttling and parameter sweeps.
//! - [`oracle`]: Monte-Carlo simulation of the session chain.
//! - [`cli`]: the `routegame` command-line front end.

pub mod analysis;
pub mod cli;
pub mod error;
pub mod model;
pub mod oracle;
pub mod provider;
pub mod quadratic;
pub mod search;
pub mod user;

pub use error::{ConfigError, GameError};
pub use model::{
    expected_outcomes, net_values, GameConfig, ModelParams, NetValues, Outcomes, ProviderPolicy,
    Regime, Route, UserResponse,
};
pub use provider::{brute_force_optimum, solve_equilibrium, Equilibrium, Provenance};
pub use user::{user_best_response, BestResponse, ResponseKind};
