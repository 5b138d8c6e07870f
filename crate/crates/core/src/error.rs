//! Error type shared by every module of the crate.

use crate::numerics::BigComplex;

/// Failure modes of the numerical routines.
///
/// Every variant maps to a stable machine-readable code via [`Error::code`],
/// which the command line front end prints alongside the message.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("invalid precision: {0}")]
    InvalidPrecision(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// Evaluation exactly at a pole. `residue` is the coefficient of
    /// `1/(s - location)` when it is known in closed form.
    #[error("pole at {}", fmt_point(location))]
    Pole {
        location: Box<BigComplex>,
        residue: Option<Box<BigComplex>>,
    },

    #[error("{point} is within {distance:.3e} of the pole at {location}; use the regularised evaluation")]
    NearPole {
        point: String,
        location: String,
        distance: f64,
    },

    #[error("accuracy target not reached: {0}")]
    PrecisionNotReached(String),

    #[error("invalid character label `{0}` (expected q.n with gcd(n, q) = 1)")]
    InvalidLabel(String),

    #[error("character {label} is not primitive (conductor {conductor})")]
    NotPrimitive { label: String, conductor: u64 },

    #[error("there is no primitive character modulo {0}")]
    NoPrimitiveCharacter(u64),

    #[error("non-finite intermediate value in {0}")]
    Overflow(String),
}

impl Error {
    /// Stable identifier used in machine-readable output.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidPrecision(_) => "INVALID_PRECISION",
            Error::Domain(_) => "DOMAIN_ERROR",
            Error::Pole { .. } => "POLE",
            Error::NearPole { .. } => "NEAR_POLE",
            Error::PrecisionNotReached(_) => "PRECISION_NOT_REACHED",
            Error::InvalidLabel(_) => "INVALID_LABEL",
            Error::NotPrimitive { .. } => "CHAR_NOT_PRIMITIVE",
            Error::NoPrimitiveCharacter(_) => "NO_PRIMITIVE_CHARACTER",
            Error::Overflow(_) => "OVERFLOW",
        }
    }

    pub(crate) fn pole(location: BigComplex, residue: Option<BigComplex>) -> Self {
        Error::Pole {
            location: Box::new(location),
            residue: residue.map(Box::new),
        }
    }
}

fn fmt_point(z: &BigComplex) -> String {
    let (re, im) = z.to_f64_pair();
    format!("{re}{im:+}i")
}

pub type Result<T> = std::result::Result<T, Error>;
