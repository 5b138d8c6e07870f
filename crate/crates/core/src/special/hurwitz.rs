//! Hurwitz zeta function by Euler–Maclaurin summation.

use rug::Float;

use super::bernoulli::bernoulli_even;
use crate::error::{Error, Result};
use crate::numerics::{real_pow, BigComplex, Precision};

/// `ζ(s, a) = Σ_{k≥0} (k + a)^{-s}`, continued to `s ≠ 1`, for `a > 0`.
///
/// The number of directly summed terms grows with `|s|` and the precision;
/// the Euler–Maclaurin correction is summed until the remainder bound falls
/// below the accuracy target.
pub fn hurwitz_zeta(s: &BigComplex, a: &Float, prec: Precision) -> Result<BigComplex> {
    if !a.is_finite() || !a.is_sign_positive() || a.is_zero() {
        return Err(Error::Domain("hurwitz_zeta needs a > 0".into()));
    }
    if s.is_real() && *s.re() == 1 {
        return Err(Error::pole(s.with_prec(prec), Some(BigComplex::one(prec))));
    }
    let sigma = s.re().to_f64();
    let n = (s.abs_f64() + 0.2 * prec.working() as f64).ceil().max(8.0) as u64;
    let growth = if sigma < 0.0 { -sigma * ((n + 2) as f64).log2() } else { 0.0 };
    let wp = prec.raised(16 + growth.ceil() as u32 + (2.0 + s.abs_f64()).log2().ceil() as u32);
    let w = wp.working();
    let ss = s.with_prec(wp);
    let neg_s = -&ss;
    let aa = Float::with_val(w, a);

    let mut acc = BigComplex::zero(wp);
    for k in 0..n {
        acc += &real_pow(&Float::with_val(w, &aa + k), &neg_s)?;
    }
    let na = Float::with_val(w, &aa + n);
    let na_pow = real_pow(&na, &neg_s)?; // (N+a)^{-s}
    // (N+a)^{1-s}/(s-1) + (N+a)^{-s}/2
    acc += &(&na_pow.scale(&na) / &ss.add_f64(-1.0, 0.0));
    acc += &na_pow.scale_f64(0.5);

    let inv_na2 = Float::with_val(w, na.clone().square()).recip();
    let mut power = na_pow.div_real(&na); // (N+a)^{-s-1}
    let mut poch = ss.clone(); // s(s+1)…(s+2j-2)
    let mut fact = Float::with_val(w, 2); // (2j)!
    let max_terms = 4 * w as usize;
    let mut bern = bernoulli_even(64, w);
    let target_log2 = -(w as f64) - 4.0;
    for j in 1..max_terms {
        if j + 1 >= bern.len() {
            bern = bernoulli_even(2 * j + 2, w);
        }
        let coef = Float::with_val(w, &bern[j] / &fact);
        let term = (&poch * &power).scale(&coef);
        acc += &term;
        // Next term magnitude times |s+2j+1|/(σ+2j+1) bounds the remainder.
        let j2 = (2 * j) as f64;
        poch = &poch * &(&ss.add_f64(j2 - 1.0, 0.0) * &ss.add_f64(j2, 0.0));
        power = power.scale(&inv_na2);
        fact *= (2 * j + 1) as u64;
        fact *= (2 * j + 2) as u64;
        if poch.is_zero() {
            // s is a non-positive integer: the correction terminates.
            return Ok(acc.with_prec(prec));
        }
        let next_coef = Float::with_val(w, &bern[j + 1] / &fact);
        let next = (&poch * &power).scale(&next_coef);
        let denom = sigma + j2 + 1.0;
        if denom > 0.0 {
            let factor = ss.add_f64(j2 + 1.0, 0.0).abs_f64() / denom;
            let bound = next.log2_abs() + factor.log2();
            if bound < target_log2 + acc.log2_abs().min(0.0) {
                return Ok(acc.with_prec(prec));
            }
        }
    }
    Err(Error::PrecisionNotReached(
        "Euler-Maclaurin correction for hurwitz_zeta did not converge".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::quad::{exp_sinh, Tolerance};
    use crate::numerics::{nearly_equal, pi};

    fn prec() -> Precision {
        Precision::default()
    }

    /// Hermite's integral
    /// `ζ(s,a) = a^{-s}/2 + a^{1-s}/(s-1) + 2∫_0^∞ sin(s·atan(t/a)) / ((a²+t²)^{s/2}(e^{2πt}-1)) dt`.
    fn hermite(s: &BigComplex, a: &Float, prec: Precision) -> BigComplex {
        let hp = prec.raised(32);
        let w = hp.working();
        let s = s.with_prec(hp);
        let a = Float::with_val(w, a);
        let half_s = s.scale_f64(0.5);
        let two_pi = pi(hp) * 2u32;
        let integral = exp_sinh(
            |t| {
                let angle = Float::with_val(w, t / &a).atan();
                let num = s.scale(&angle).sin();
                let r2 = Float::with_val(w, &a * &a) + Float::with_val(w, t * t);
                let den = real_pow(&r2, &half_s)?;
                let em1 = Float::with_val(w, &two_pi * t).exp_m1();
                Ok((&num / &den).div_real(&em1))
            },
            &Float::new(w),
            hp,
            Tolerance::Absolute(2f64.powi(-(prec.working() as i32))),
        )
        .unwrap()
        .value;
        let a_pow = real_pow(&a, &-&s).unwrap();
        let first = a_pow.scale_f64(0.5);
        let second = &a_pow.scale(&a) / &s.add_f64(-1.0, 0.0);
        &(&first + &second) + &integral.scale_f64(2.0)
    }

    #[test]
    fn classical_values() {
        let p = prec();
        let w = p.working();
        let one = Float::with_val(w, 1);
        let z2 = hurwitz_zeta(&BigComplex::from_f64(2.0, 0.0, p), &one, p).unwrap();
        let pi2_6 = BigComplex::from_real(pi(p).square() / 6u32, p);
        assert!(nearly_equal(&z2, &pi2_6, 250));
        let zm1 = hurwitz_zeta(&BigComplex::from_f64(-1.0, 0.0, p), &one, p).unwrap();
        let expect = BigComplex::from_real(Float::with_val(w, -1) / 12u32, p);
        assert!(nearly_equal(&zm1, &expect, 250));
    }

    #[test]
    fn matches_mpfr_zeta() {
        let p = prec();
        let w = p.working();
        for x in [0.5, 3.0, -2.5, 7.25] {
            let ours = hurwitz_zeta(&BigComplex::from_f64(x, 0.0, p), &Float::with_val(w, 1), p).unwrap();
            let mpfr = BigComplex::from_real(Float::with_val(w, x).zeta(), p);
            assert!(nearly_equal(&ours, &mpfr, 240), "s = {x}");
        }
    }

    #[test]
    fn agrees_with_hermite_integral() {
        let p = prec();
        let w = p.working();
        let a = Float::with_val(w, 2) / 5u32;
        let s = BigComplex::from_f64(0.5, 8.0, p);
        let em = hurwitz_zeta(&s, &a, p).unwrap();
        let hi = hermite(&s, &a, Precision::with_bits(200).unwrap());
        assert!(nearly_equal(&em, &hi, 150));
        let s2 = BigComplex::from_f64(-1.5, 11.0, p);
        let a2 = Float::with_val(w, 6) / 7u32;
        assert!(nearly_equal(
            &hurwitz_zeta(&s2, &a2, p).unwrap(),
            &hermite(&s2, &a2, Precision::with_bits(200).unwrap()),
            150
        ));
    }

    #[test]
    fn shift_identity() {
        // ζ(s, a) = a^{-s} + ζ(s, a + 1)
        let p = prec();
        let w = p.working();
        let s = BigComplex::from_f64(0.5, -12.0, p);
        let a = Float::with_val(w, 3) / 8u32;
        let lhs = hurwitz_zeta(&s, &a, p).unwrap();
        let rhs = &real_pow(&a, &-&s).unwrap() + &hurwitz_zeta(&s, &Float::with_val(w, &a + 1u32), p).unwrap();
        assert!(nearly_equal(&lhs, &rhs, 245));
    }

    #[test]
    fn pole_at_one() {
        let p = prec();
        let one = Float::with_val(64, 1);
        assert!(matches!(
            hurwitz_zeta(&BigComplex::one(p), &one, p),
            Err(Error::Pole { .. })
        ));
    }
}
