//! Numerical engine for a repeated income-transfer game with income mobility.
//!
//! A group of `n` players repeatedly decides what share of income to transfer
//! to a common pool that is split equally. Incomes are fixed shares of a unit
//! endowment, ranked `w_1 > ... > w_n`, but players switch ranks over time
//! according to a mobility parameter `m`. A contribution norm `theta(w) = w^beta`
//! prescribes each rank's transfer share, and compliance is enforced by
//! reversion to permanent autarky after any observed deviation.
//!
//! The crate computes, in closed form, the expected discounted values of
//! cooperation, deviation, and autarky ([`value`]); the minimum discount
//! factor sustaining the norm ([`threshold`]); the long-run selected norm
//! progressivity ([`select`]); and the welfare-maximizing proportional tax
//! when a planner redistributes before private transfers ([`fiscal`]). Every
//! closed form is cross-validated by an independent Monte Carlo simulation of
//! the underlying Markov chains ([`sim`]).

pub mod econ;
mod error;
pub mod fiscal;
pub mod select;
pub mod sim;
pub mod threshold;
pub mod value;

pub use econ::{
    income_weights, position_transition_matrix, prais_index, state_transition_matrix,
    ContributionNorm, IncomeDistribution, MobilityProcess, Utility,
};
pub use error::{Error, Result};
pub use fiscal::{optimal_tax, post_tax_economy, welfare, FiscalPolicy, Regime, TaxGrid, TaxResult};
pub use select::{beta_star, savitzky_golay, GridSpec, NormSelectionResult, SearchConfig};
pub use sim::{estimate_value, simulate_positions, simulate_states, SimConfig, SimEstimate, Strategy};
pub use threshold::{
    binding_type_check, delta_min, delta_min_all_types, delta_min_bisection, delta_min_two_alpha,
    quadratic_coefficients, sustainability_threshold, two_alpha_sustainability_threshold, DeltaMin,
    QuadraticCoefficients, SolveMethod, ThresholdResult,
};
pub use value::{Economy, EconomyTemplate, IncentiveGap, Scenario, ValueTriple};
