//! Witsenhausen instances over `N_t`, the three strategy classes, exact cost
//! evaluation, and the exhaustive deterministic search.

mod cost;
mod instance;
mod search;
mod strategy;

pub use cost::{
    evaluate_deterministic, evaluate_quantum, evaluate_sr, optimal_c2_for_c1, optimal_strategy, CostReport, SignalTrace,
};
pub use instance::{make_instance, StrategyClass, WitsenhausenInstance};
pub use search::{search_deterministic, SearchOptions, SearchOutcome, SearchResult};
pub use strategy::{DeterministicStrategy, SharedRandomnessStrategy};
