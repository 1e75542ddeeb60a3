use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter or argument lies outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// The ranking state space grows as n! and is capped to keep exhaustive
    /// verification tractable.
    #[error("capacity error: n = {n} implies n! = {states} ranking states, above the n <= {max_n} limit")]
    Capacity { n: usize, states: u64, max_n: usize },

    /// An operation was invoked outside its intended use.
    #[error("usage error: {0}")]
    Usage(String),

    /// The solved threshold contradicts the expected binding structure: at the
    /// type-1 indifference point some poorer type still strictly prefers to
    /// deviate, so the type-1 root understates the sustainability threshold.
    #[error(
        "internal consistency error: binding type {binding_type} != 1 at the solved threshold \
         {delta} (richest type expected to bind)"
    )]
    BindingType { binding_type: usize, delta: f64 },

    /// The coarse scan bracketing a root found more than one sign change, so
    /// the threshold may not be unique.
    #[error("diagnostic: {count} sign changes on the coarse scan; threshold may not be unique")]
    MultipleSignChanges { count: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
