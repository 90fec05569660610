//! Crate-wide error type with stable machine-readable names for the CLI.

#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("arithmetic error: {0}")]
    Arithmetic(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("field mismatch: {0}")]
    FieldMismatch(String),
    #[error("not hyperbolic: {0}")]
    NotHyperbolic(String),
    #[error("not primitive: {0}")]
    NotPrimitive(String),
    #[error("not unimodular: {0}")]
    NotUnimodular(String),
    #[error("factorization not found: {0}")]
    FactorizationNotFound(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("range error: {0}")]
    Range(String),
    #[error("usage error: {0}")]
    Usage(String),
}

impl Error {
    /// The bare payload message, without the category prefix.
    pub fn detail(&self) -> String {
        match self {
            Error::Dimension(m)
            | Error::Arithmetic(m)
            | Error::FieldMismatch(m)
            | Error::NotHyperbolic(m)
            | Error::NotPrimitive(m)
            | Error::NotUnimodular(m)
            | Error::FactorizationNotFound(m)
            | Error::Domain(m)
            | Error::Range(m)
            | Error::Usage(m) => m.clone(),
            Error::DivisionByZero => "division by zero".to_string(),
        }
    }

    /// Stable snake_case name, used by the CLI for scripted consumers.
    pub fn name(&self) -> &'static str {
        match self {
            Error::Dimension(_) => "dimension_error",
            Error::Arithmetic(_) => "arithmetic_error",
            Error::DivisionByZero => "division_by_zero",
            Error::FieldMismatch(_) => "field_mismatch",
            Error::NotHyperbolic(_) => "not_hyperbolic",
            Error::NotPrimitive(_) => "not_primitive",
            Error::NotUnimodular(_) => "not_unimodular",
            Error::FactorizationNotFound(_) => "factorization_not_found",
            Error::Domain(_) => "domain_error",
            Error::Range(_) => "range_error",
            Error::Usage(_) => "usage_error",
        }
    }
}
