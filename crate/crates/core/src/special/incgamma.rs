//! Upper incomplete gamma function `Γ(z, x)` for complex `z` and real `x > 0`.

use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;

use super::gamma::gamma;
use crate::error::{Error, Result};
use crate::numerics::{log2_abs, real_pow, BigComplex, Precision};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IncGammaMethod {
    /// `Γ(z) - Σ (-1)^n x^{z+n} / (n!(z+n))`, or the exponential-integral
    /// series plus downward recurrence when `z` is a non-positive integer.
    LowerSeries,
    /// Legendre continued fraction evaluated by the modified Lentz method.
    ContinuedFraction,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IncGammaRegime {
    pub method: IncGammaMethod,
    pub note: &'static str,
}

/// Method selection: series for `x < |z| + 4`, continued fraction otherwise.
pub fn regime(z: &BigComplex, x: &Float) -> IncGammaRegime {
    if x.to_f64() < z.abs_f64() + 4.0 {
        IncGammaRegime {
            method: IncGammaMethod::LowerSeries,
            note: "x < |z| + 4: alternating series with cancellation-sized guard bits",
        }
    } else {
        IncGammaRegime {
            method: IncGammaMethod::ContinuedFraction,
            note: "x >= |z| + 4: continued fraction",
        }
    }
}

/// `Γ(z, x) = ∫_x^∞ e^{-t} t^{z-1} dt` for `x > 0`, analytically continued
/// in `z` (so `z` may be any complex number).
pub fn inc_gamma(z: &BigComplex, x: &Float, prec: Precision) -> Result<BigComplex> {
    inc_gamma_with(z, x, regime(z, x).method, prec)
}

/// As [`inc_gamma`] with an explicit method.
pub fn inc_gamma_with(
    z: &BigComplex,
    x: &Float,
    method: IncGammaMethod,
    prec: Precision,
) -> Result<BigComplex> {
    if !x.is_finite() || !x.is_sign_positive() || x.is_zero() {
        return Err(Error::Domain("incomplete gamma needs x > 0".into()));
    }
    let out = match method {
        IncGammaMethod::LowerSeries => match z.as_nonpositive_integer() {
            Some(m) => negative_integer(m, x, prec)?,
            None => lower_series(z, x, prec)?,
        },
        IncGammaMethod::ContinuedFraction => continued_fraction(z, x, prec)?,
    };
    out.with_prec(prec).ensure_finite("incomplete gamma")
}

const MAX_RETRIES: usize = 6;

fn lower_series(z: &BigComplex, x: &Float, prec: Precision) -> Result<BigComplex> {
    let xf = x.to_f64();
    let mut extra = (xf * std::f64::consts::LOG2_E).ceil() as u32 + 16;
    for _ in 0..MAX_RETRIES {
        let wp = prec.raised(extra);
        let w = wp.working();
        let zz = z.with_prec(wp);
        let xx = Float::with_val(w, x);
        let g = gamma(&zz, wp)?;
        let xz = real_pow(&xx, &zz)?;

        // Σ_{n≥0} c_n/(z+n) with c_n = (-x)^n/n!.
        let mut c = Float::with_val(w, 1);
        let mut sum = BigComplex::zero(wp);
        let mut max_term = 0f64;
        let limit = (xf * std::f64::consts::E) as usize + w as usize + 64;
        let mut n = 0usize;
        loop {
            let term = &BigComplex::from_real(c.clone(), wp) / &zz.add_real(&Float::with_val(w, n));
            let lt = term.log2_abs();
            max_term = max_term.max(lt);
            sum += &term;
            if n as f64 > xf && lt < max_term - w as f64 - 2.0 {
                break;
            }
            n += 1;
            if n > limit {
                return Err(Error::PrecisionNotReached(format!(
                    "incomplete gamma series did not converge in {limit} terms"
                )));
            }
            c = -Float::with_val(w, &c * &xx) / n as u64;
        }
        let lower = &xz * &sum;
        let result = &g - &lower;
        let scale = g.log2_abs().max(xz.log2_abs() + max_term);
        let loss = scale - result.log2_abs();
        if loss + 8.0 <= extra as f64 {
            return Ok(result);
        }
        extra = (loss + 24.0).ceil() as u32;
    }
    Err(Error::PrecisionNotReached(
        "incomplete gamma series: cancellation kept growing".into(),
    ))
}

/// `Γ(-m, x)`: `E_1` by its power series, then `Γ(a, x) = (Γ(a+1, x) - x^a e^{-x})/a`.
fn negative_integer(m: u64, x: &Float, prec: Precision) -> Result<BigComplex> {
    let xf = x.to_f64();
    let mut extra =
        (xf * std::f64::consts::LOG2_E).ceil() as u32 + 16 + (m as f64 * (xf + 2.0).log2()).ceil() as u32;
    for _ in 0..MAX_RETRIES {
        let wp = prec.raised(extra);
        let w = wp.working();
        let xx = Float::with_val(w, x);
        // E_1(x) = -γ - ln x - Σ_{n≥1} (-x)^n / (n·n!)
        let mut c = Float::with_val(w, 1);
        let mut sum = Float::new(w);
        let mut max_term = f64::NEG_INFINITY;
        let limit = (xf * std::f64::consts::E) as usize + w as usize + 64;
        let mut n = 1usize;
        loop {
            c = -Float::with_val(w, &c * &xx) / n as u64;
            let term = Float::with_val(w, &c / n as u64);
            let lt = log2_abs(&term);
            max_term = max_term.max(lt);
            sum += &term;
            if n as f64 > xf && lt < max_term - w as f64 - 2.0 {
                break;
            }
            n += 1;
            if n > limit {
                return Err(Error::PrecisionNotReached("E1 series did not converge".into()));
            }
        }
        let euler = Float::with_val(w, Constant::Euler);
        let lnx = Float::with_val(w, xx.ln_ref());
        let e1 = Float::with_val(w, -(euler + &lnx) - &sum);
        let loss = max_term.max(log2_abs(&lnx)).max(0.0) - log2_abs(&e1);
        if loss + 8.0 > extra as f64 {
            extra = (loss + 24.0).ceil() as u32 + (m as f64 * (xf + 2.0).log2()).ceil() as u32;
            continue;
        }
        let emx = Float::with_val(w, -&xx).exp();
        let mut val = e1;
        for k in 1..=m {
            // a = -k
            let xa = Float::with_val(w, Float::with_val(w, &xx).pow(-(k as i32))) * &emx;
            val = Float::with_val(w, &val - &xa) / -(k as i64);
        }
        return Ok(BigComplex::from_real(val, wp));
    }
    Err(Error::PrecisionNotReached(
        "E1 series: cancellation kept growing".into(),
    ))
}

fn continued_fraction(z: &BigComplex, x: &Float, prec: Precision) -> Result<BigComplex> {
    // Γ(z,x) = e^{-x} x^z / (x+1-z - 1(1-z)/(x+3-z - 2(2-z)/(x+5-z - …)))
    let wp = prec.raised(16);
    let w = wp.working();
    let zz = z.with_prec(wp);
    let xx = Float::with_val(w, x);
    let tiny_log2 = -2.0 * w as f64;
    let tiny = BigComplex::from_real(Float::with_val(w, Float::i_exp(1, -2 * w as i32)), wp);
    let one = BigComplex::one(wp);
    let two = Float::with_val(w, 2);

    let mut b = (-&zz).add_real(&Float::with_val(w, &xx + 1u32));
    let mut c = tiny.recip()?;
    let mut d = b.recip()?;
    let mut h = d.clone();
    let bits = w as f64 * std::f64::consts::LN_2;
    let limit = 200 + (2.0 * bits * bits / x.to_f64()) as usize;
    let eps_log2 = -(w as f64);
    let mut converged = false;
    for i in 1..=limit {
        let fi = Float::with_val(w, i);
        // a_i = -i(i - z)
        let an = (-&zz).add_real(&fi).scale(&-fi);
        b = b.add_real(&two);
        d = &(&an * &d) + &b;
        if d.log2_abs() < tiny_log2 {
            d = tiny.clone();
        }
        c = &b + &(&an / &c);
        if c.log2_abs() < tiny_log2 {
            c = tiny.clone();
        }
        d = d.recip()?;
        let del = &d * &c;
        h = &h * &del;
        if (&del - &one).log2_abs() < eps_log2 {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::PrecisionNotReached(format!(
            "incomplete gamma continued fraction did not converge in {limit} steps"
        )));
    }
    let emx = Float::with_val(w, -&xx).exp();
    let xz = real_pow(&xx, &zz)?;
    Ok(xz.scale(&emx) * h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::nearly_equal;
    use crate::numerics::quad::{exp_sinh, Tolerance};

    fn prec() -> Precision {
        Precision::default()
    }

    /// `∫_x^∞ e^{-t} t^{z-1} dt` by exp-sinh quadrature at extra precision.
    fn quadrature(z: &BigComplex, x: &Float, prec: Precision) -> BigComplex {
        let hp = prec.raised(96);
        let zm1 = z.with_prec(hp).add_f64(-1.0, 0.0);
        let w = hp.working();
        exp_sinh(
            |t| {
                let e = Float::with_val(w, -t).exp();
                Ok(real_pow(t, &zm1)?.scale(&e))
            },
            &Float::with_val(w, x),
            hp,
            Tolerance::Relative(2f64.powi(-(prec.bits() as i32) - 8)),
        )
        .unwrap()
        .value
    }

    #[test]
    fn order_one_is_exponential() {
        let p = prec();
        for xv in [0.5, 3.0, 40.0] {
            let x = Float::with_val(p.working(), xv);
            let v = inc_gamma(&BigComplex::one(p), &x, p).unwrap();
            let e = BigComplex::from_real(Float::with_val(p.working(), -&x).exp(), p);
            assert!(nearly_equal(&v, &e, 250), "x = {xv}");
        }
    }

    #[test]
    fn exponential_integral_at_five_pi() {
        let p = Precision::with_bits(200).unwrap();
        let w = p.working();
        let x = Float::with_val(w, Constant::Pi) * 5u32;
        let z = BigComplex::zero(p);
        let v = inc_gamma(&z, &x, p).unwrap();
        let oracle = quadrature(&z, &x, p);
        assert!(nearly_equal(&v, &oracle, 190));
        // MPFR's exponential integral: E_1(x) = -Ei(-x)
        let mpfr = BigComplex::from_real(-Float::with_val(w, -&x).eint(), p);
        assert!(nearly_equal(&v, &mpfr, 190));
        let approx = v.re().to_f64();
        assert!((approx - 9.0490e-9).abs() < 1e-12, "{approx}");
    }

    #[test]
    fn dominant_error_term_for_modulus_five() {
        // Γ((0 + 1/2 + 8i)/2, 49π/5)
        let p = prec();
        let w = p.working();
        let z = BigComplex::from_f64(0.25, 4.0, p);
        let x = Float::with_val(w, Constant::Pi) * 49u32 / 5u32;
        assert_eq!(regime(&z, &x).method, IncGammaMethod::ContinuedFraction);
        let v = inc_gamma(&z, &x, p).unwrap();
        assert!(nearly_equal(&v, &quadrature(&z, &x, p), 240));
        let s = inc_gamma_with(&z, &x, IncGammaMethod::LowerSeries, p).unwrap();
        assert!(nearly_equal(&v, &s, 240));
    }

    #[test]
    fn methods_agree_near_the_switch() {
        let p = prec();
        let w = p.working();
        for (re, im) in [(0.25, 4.0), (-0.25, 6.0), (1.0, -2.0), (-0.5, 0.0), (0.0, 0.0), (-3.0, 0.0), (7.5, 3.0)] {
            let z = BigComplex::from_f64(re, im, p);
            for dx in [-0.5, 0.0, 0.5] {
                let x = Float::with_val(w, z.abs_f64() + 4.0 + dx);
                let a = inc_gamma_with(&z, &x, IncGammaMethod::LowerSeries, p).unwrap();
                let b = inc_gamma_with(&z, &x, IncGammaMethod::ContinuedFraction, p).unwrap();
                assert!(nearly_equal(&a, &b, 224), "z = {re}+{im}i, dx = {dx}");
            }
        }
    }

    #[test]
    fn small_x_tends_to_complete_gamma() {
        let p = prec();
        let z = BigComplex::from_f64(2.5, 1.0, p);
        let x = Float::with_val(p.working(), Float::i_exp(1, -40));
        let v = inc_gamma(&z, &x, p).unwrap();
        let g = gamma(&z, p).unwrap();
        // difference is about x^z / z ~ 2^-100
        assert!(nearly_equal(&v, &g, 95));
        assert!(!nearly_equal(&v, &g, 110));
    }

    #[test]
    fn negative_half_order() {
        // Γ(-1/2, x) = 2 e^{-x}/√x - 2√π erfc(√x)
        let p = prec();
        let w = p.working();
        for xv in [0.3, 2.0, 3.9, 12.0] {
            let x = Float::with_val(w, xv);
            let v = inc_gamma(&BigComplex::from_f64(-0.5, 0.0, p), &x, p).unwrap();
            let sx = Float::with_val(w, x.sqrt_ref());
            let expect = Float::with_val(w, -&x).exp() * 2u32 / &sx
                - Float::with_val(w, Constant::Pi).sqrt() * 2u32 * sx.erfc();
            assert!(nearly_equal(&v, &BigComplex::from_real(expect, p), 240), "x = {xv}");
        }
    }

    #[test]
    fn rejects_nonpositive_x() {
        let p = prec();
        let z = BigComplex::one(p);
        assert!(inc_gamma(&z, &Float::with_val(64, 0), p).is_err());
        assert!(inc_gamma(&z, &Float::with_val(64, -1), p).is_err());
    }
}
