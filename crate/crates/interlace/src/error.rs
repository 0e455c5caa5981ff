use thiserror::Error;

/// Errors raised by samplers, oracles, and estimators.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter violated a documented precondition.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Paths or curves that must share a time interval do not.
    #[error("mismatched time intervals: {0}")]
    MismatchedIntervals(String),

    /// The requested configuration space has no members.
    #[error("empty-or-infeasible state space: {0}")]
    Infeasible(String),

    /// An exhaustive enumeration would exceed the configured cap.
    #[error("enumeration cap exceeded: more than {cap} states")]
    EnumerationCapExceeded { cap: usize },

    /// Rejection sampling ran out of attempts.
    #[error(
        "acceptance too rare: {accepted} accepted in {attempts} attempts \
         (rate {rate:.3e})"
    )]
    AcceptanceTooRare {
        attempts: u64,
        accepted: u64,
        rate: f64,
    },

    /// An estimator was handed an empty sample set.
    #[error("empty sample set for {0}")]
    EmptySamples(&'static str),

    /// A requested time window is not covered by the sampled horizon.
    #[error("window outside the sampled horizon: {0}")]
    WindowOutsideHorizon(String),

    /// A conditional law was requested for an endpoint pair of zero mass.
    #[error("endpoint pair has zero probability: {0}")]
    ZeroProbabilityEndpoints(String),

    /// Text- or file-format parsing failed.
    #[error("parse error: {0}")]
    Parse(String),
}
