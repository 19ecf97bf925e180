/// Errors raised by constructors and domain-checked operations.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A scalar parameter fell outside its admissible interval.
    #[error("{name} = {value} outside [{min}, {max}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },
    /// Distribution weights do not sum to one within 1e-12.
    #[error("distribution weights sum to {sum}, expected 1 within 1e-12")]
    NotNormalized { sum: f64 },
    /// A parameter combination outside the validity regime of a model.
    #[error("{0}")]
    Regime(String),
    /// A state that violates a physicality constraint (e.g. the uncertainty
    /// principle).
    #[error("{0}")]
    NonPhysical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
