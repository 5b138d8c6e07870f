//! Gamma, incomplete gamma and Hurwitz zeta functions.

mod bernoulli;
mod gamma;
mod hurwitz;
mod incgamma;

pub use bernoulli::{bernoulli_even, bernoulli_even_exact};
pub use gamma::gamma;
pub use hurwitz::hurwitz_zeta;
pub use incgamma::{inc_gamma, inc_gamma_with, regime, IncGammaMethod, IncGammaRegime};
