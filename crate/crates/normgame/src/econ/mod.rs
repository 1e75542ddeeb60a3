//! Primitive economic objects: income distribution, mobility process,
//! contribution norm, and utility.

mod income;
mod mobility;
mod norm;
mod utility;

pub use income::{income_weights, IncomeDistribution};
pub(crate) use mobility::rotate_state;
pub use mobility::{
    enumerate_states, position_transition_matrix, prais_index, state_transition_matrix,
    MobilityProcess, MAX_STATE_N,
};
pub use norm::ContributionNorm;
pub use utility::{utility, Utility};
