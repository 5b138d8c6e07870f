//! Reference values of `L(s, χ)` and `ξ(s, χ)` that do not depend on any
//! truncated product.

use rug::Float;

use crate::characters::DirichletCharacter;
use crate::error::{Error, Result};
use crate::euler::{gamma_factor, TruncationLevel};
use crate::numerics::{real_pow, BigComplex, Precision};
use crate::special::hurwitz_zeta;

/// How a reference value is produced.
#[derive(Clone, Debug, PartialEq)]
pub enum OracleMethod {
    /// `q^{-s} Σ_a χ(a) ζ(s, a/q)`.
    HurwitzDecomposition,
    /// `ξ^≈_u(s) + Σ_{n ∈ A_u} J(n)` at the given level.
    SeriesSelfCheck { u: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleConfig {
    pub method: OracleMethod,
    pub precision: Precision,
}

impl OracleConfig {
    pub fn hurwitz(precision: Precision) -> Self {
        OracleConfig {
            method: OracleMethod::HurwitzDecomposition,
            precision,
        }
    }

    /// `ξ(s, χ)` by the configured method.
    pub fn xi(&self, s: &BigComplex, chi: &DirichletCharacter) -> Result<BigComplex> {
        match self.method {
            OracleMethod::HurwitzDecomposition => xi_reference(s, chi, self.precision),
            OracleMethod::SeriesSelfCheck { u } => {
                let level = TruncationLevel::new(u)?;
                crate::error_analysis::theorem1_selfcheck(s, chi, &level, self.precision)
            }
        }
    }

    /// `L(s, χ)` by the configured method.
    pub fn l(&self, s: &BigComplex, chi: &DirichletCharacter) -> Result<BigComplex> {
        match self.method {
            OracleMethod::HurwitzDecomposition => l_reference(s, chi, self.precision),
            OracleMethod::SeriesSelfCheck { .. } => {
                let g = gamma_factor(s, chi, self.precision).map_err(|_| {
                    Error::Domain("L from the self-check is undefined at gamma-factor poles".into())
                })?;
                Ok(&self.xi(s, chi)? / &g)
            }
        }
    }
}

/// `L(s, χ) = q^{-s} Σ_{a=1}^{q} χ(a) ζ(s, a/q)`.
pub fn l_reference(s: &BigComplex, chi: &DirichletCharacter, prec: Precision) -> Result<BigComplex> {
    let q = chi.modulus();
    let wp = prec.raised(8 + (q as f64).log2().ceil() as u32);
    let w = wp.working();
    let ss = s.with_prec(wp);
    let mut acc = BigComplex::zero(wp);
    for a in 1..q {
        if chi.exponent(a as i64).is_none() {
            continue;
        }
        let frac = Float::with_val(w, a) / q;
        let z = hurwitz_zeta(&ss, &frac, wp)?;
        acc += &(&chi.eval(a as i64, wp) * &z);
    }
    let scale = real_pow(&Float::with_val(w, q), &-&ss)?;
    Ok((&scale * &acc).with_prec(prec))
}

/// `ξ(s, χ) = g(s, χ) L(s, χ)`; entire for primitive `χ`, but `g` has poles
/// where `L` vanishes, so those points are refused.
pub fn xi_reference(s: &BigComplex, chi: &DirichletCharacter, prec: Precision) -> Result<BigComplex> {
    let wp = prec.raised(8);
    let g = gamma_factor(s, chi, wp)?;
    let l = l_reference(s, chi, wp)?;
    Ok((&g * &l).with_prec(prec))
}

/// Partial Dirichlet series `Σ_{n ≤ N} χ(n) n^{-s}` for `Re s > 0`, with the
/// bound `(φ(q)/2)|s| N^{-σ}/σ` on the remaining tail from partial summation.
pub fn dirichlet_series(
    s: &BigComplex,
    chi: &DirichletCharacter,
    terms: u64,
    prec: Precision,
) -> Result<(BigComplex, f64)> {
    let sigma = s.re().to_f64();
    if sigma <= 0.0 {
        return Err(Error::Domain("direct Dirichlet series needs Re s > 0".into()));
    }
    let wp = prec.raised(8);
    let w = wp.working();
    let neg_s = -&s.with_prec(wp);
    let values = chi.values(wp);
    let q = chi.modulus();
    let mut acc = BigComplex::zero(wp);
    for n in 1..=terms {
        let v = &values[(n % q) as usize];
        if v.is_zero() {
            continue;
        }
        acc += &(v * &real_pow(&Float::with_val(w, n), &neg_s)?);
    }
    let bound = chi.phi() as f64 / 2.0 * s.abs_f64() * (terms as f64).powf(-sigma) / sigma;
    Ok((acc.with_prec(prec), bound))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::nearly_equal;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn prec() -> Precision {
        Precision::default()
    }

    fn chi(q: u64, n: i64) -> DirichletCharacter {
        DirichletCharacter::from_conrey_label(q, n).unwrap()
    }

    fn round2(z: &BigComplex) -> (f64, f64) {
        let (re, im) = z.to_f64_pair();
        ((re * 100.0).round() / 100.0, (im * 100.0).round() / 100.0)
    }

    #[test]
    fn printed_two_decimal_values() {
        let p = prec();
        let l = l_reference(&BigComplex::from_f64(0.5, 8.0, p), &chi(5, 4), p).unwrap();
        assert_eq!(round2(&l), (1.59, 0.20));
        let l = l_reference(&BigComplex::from_f64(0.5, 9.0, p), &chi(8, 5), p).unwrap();
        assert_eq!(round2(&l), (2.61, 0.53));
        // Sometimes quoted as 1.70 - 2.72i, with the leading digits swapped.
        let l = l_reference(&BigComplex::from_f64(0.5, 10.0, p), &chi(7, 6), p).unwrap();
        assert_eq!(round2(&l), (1.17, -2.72));
    }

    #[test]
    fn dirichlet_series_at_three() {
        let p = prec();
        let s = BigComplex::from_f64(3.0, 0.0, p);
        let l = l_reference(&s, &chi(5, 4), p).unwrap();
        let (partial, bound) = dirichlet_series(&s, &chi(5, 4), 20000, p).unwrap();
        assert!(l.dist(&partial) <= bound);
        assert!(bound < 1e-11);
        // L(2, χ_{5,4}) = 4π²/(25√5)
        let w = p.working();
        let two = BigComplex::from_f64(2.0, 0.0, p);
        let closed = Float::with_val(w, crate::numerics::pi(p).square()) * 4u32 / (Float::with_val(w, 5).sqrt() * 25u32);
        let l2 = l_reference(&two, &chi(5, 4), p).unwrap();
        assert!(nearly_equal(&l2, &BigComplex::from_real(closed, p), 240));
    }

    #[test]
    fn functional_equation() {
        let p = prec();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (q, n) in [(5u64, 4i64), (7, 6), (8, 5), (5, 2)] {
            let c = chi(q, n);
            let eps = c.epsilon(p);
            for _ in 0..3 {
                let s = BigComplex::from_f64(rng.gen_range(-2.0..3.0), rng.gen_range(-15.0..15.0), p);
                let lhs = xi_reference(&s, &c, p).unwrap();
                let rhs = &eps * &xi_reference(&(-&s).add_f64(1.0, 0.0), &c.conjugate(), p).unwrap();
                assert!(nearly_equal(&lhs, &rhs, p.bits() - p.guard_bits() - 8), "{q}.{n} at {s}");
            }
        }
    }

    #[test]
    fn schwarz_reflection_for_real_characters() {
        let p = prec();
        let s = BigComplex::from_f64(0.3, 7.0, p);
        let c = chi(8, 5);
        let a = xi_reference(&s.conj(), &c, p).unwrap();
        let b = xi_reference(&s, &c, p).unwrap().conj();
        assert!(nearly_equal(&a, &b, 240));
    }
}
