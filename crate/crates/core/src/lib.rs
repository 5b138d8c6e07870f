//! Entire approximations of Dirichlet L-functions built from truncated
//! Euler products, together with the exact error series, an incomplete
//! gamma error bound and independent reference evaluations.

mod arith;
pub mod approximation;
pub mod characters;
pub mod error_analysis;
pub mod error;
pub mod euler;
pub mod special;
pub mod numerics;
pub mod principal_part;
pub mod reference;

pub use error::{Error, Result};
pub use numerics::{BigComplex, Precision};
pub use characters::DirichletCharacter;
