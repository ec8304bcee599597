use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Root isolation or a floating-point kernel failed to certify its result.
    #[error("precision failure for {context}: {detail}")]
    Precision { context: String, detail: String },

    /// A p-adic computation ran out of significant digits.
    #[error("p-adic precision exhausted: {detail} (need at least {required} digits)")]
    PrecisionExhausted { detail: String, required: u32 },

    /// Input outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Malformed or inconsistent input data.
    #[error("validation error: {0}")]
    Validation(String),

    #[error("no root found: {0}")]
    NoRoot(String),

    /// Tied minimal valuations: the ultrametric inequality does not pin the value.
    #[error("ambiguous valuation: {0}")]
    Ambiguous(String),

    /// The doubling orbit of a point reached a 2-torsion point or the origin.
    #[error("doubling orbit of the point is torsion at step {step}; use is_torsion")]
    TorsionOrbit { step: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }
}
