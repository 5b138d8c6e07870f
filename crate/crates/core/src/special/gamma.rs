//! Complete gamma function for complex arguments.

use rug::Float;

use super::bernoulli::bernoulli_even;
use crate::error::{Error, Result};
use crate::numerics::{pi, BigComplex, Precision};

/// `Γ(z)`. At `z = -m` (m = 0, 1, …) returns [`Error::Pole`] with residue
/// `(-1)^m / m!`.
pub fn gamma(z: &BigComplex, prec: Precision) -> Result<BigComplex> {
    if let Some(m) = z.as_nonpositive_integer() {
        let w = prec.working();
        let mut res = Float::with_val(w, Float::factorial(m as u32)).recip();
        if m % 2 == 1 {
            res = -res;
        }
        return Err(Error::pole(
            z.with_prec(prec),
            Some(BigComplex::from_real(res, prec)),
        ));
    }
    let mag = z.abs_f64();
    let extra = 16 + (2.0 + mag * (1.0 + (1.0 + mag).ln())).log2().ceil() as u32;
    let wp = prec.raised(extra);
    let zz = z.with_prec(wp);
    let out = if zz.re() < &0.5 {
        reflected(&zz, wp)?
    } else {
        stirling(&zz, wp)?
    };
    out.with_prec(prec).ensure_finite("gamma")
}

/// `ln Γ(z)` branch-free only for `Re z > 0`; used internally.
fn stirling(z: &BigComplex, prec: Precision) -> Result<BigComplex> {
    let w = prec.working();
    let r = 0.2 * w as f64 + 4.0;
    let re = z.re().to_f64();
    let shift = if re < r { (r - re).ceil() as u64 } else { 0 };
    let zs = z.add_real(&Float::with_val(w, shift));

    let ln_z = zs.ln()?;
    let half = Float::with_val(w, 0.5);
    let mut lg = &zs.add_real(&-half) * &ln_z;
    lg -= &zs;
    let ln_2pi = Float::with_val(w, pi(prec) * 2u32).ln() / 2u32;
    lg = lg.add_real(&ln_2pi);

    // Σ B_{2k} / (2k(2k-1) z^{2k-1}); remainder bounded by the next term
    // times sec^{2k+2}(arg z / 2).
    let inv = zs.recip()?;
    let inv2 = &inv * &inv;
    let theta = zs.arg().to_f64();
    let sec2 = 1.0 / (theta / 2.0).cos().powi(2);
    let mut power = inv.clone();
    let tol_log2 = -(w as f64) - 4.0;
    let max_terms = 4 * w as usize;
    let mut bern = bernoulli_even(64, w);
    let mut converged = false;
    for k in 1..max_terms {
        if k >= bern.len() {
            bern = bernoulli_even(2 * k, w);
        }
        let denom = (2 * k * (2 * k - 1)) as u64;
        let coef = Float::with_val(w, &bern[k] / denom);
        let term = power.scale(&coef);
        let bound = term.log2_abs() + (k as f64 + 1.0) * sec2.log2();
        lg += &term;
        if bound < tol_log2 + lg.log2_abs().max(0.0) {
            converged = true;
            break;
        }
        power = &power * &inv2;
    }
    if !converged {
        return Err(Error::PrecisionNotReached("Stirling series for gamma".into()));
    }
    let mut g = lg.exp();
    if shift > 0 {
        let mut prod = z.clone();
        for j in 1..shift {
            prod = &prod * &z.add_real(&Float::with_val(w, j));
        }
        g = &g / &prod;
    }
    Ok(g)
}

fn reflected(z: &BigComplex, prec: Precision) -> Result<BigComplex> {
    // Γ(z) = π / (sin(πz) Γ(1 - z)); sin(πz) loses bits near integers.
    let w = prec.working();
    let nearest = Float::with_val(w, z.re().round_ref());
    let d = z.add_real(&-nearest).abs_f64().max(f64::MIN_POSITIVE);
    let extra = (8.0 + (1.0 / d).log2().max(0.0) + (1.0 + z.abs_f64()).log2()).ceil() as u32;
    let wp = prec.raised(extra);
    let zz = z.with_prec(wp);
    let p = pi(wp);
    let s = zz.scale(&p).sin();
    let one_minus = (-&zz).add_real(&Float::with_val(wp.working(), 1));
    let g = stirling(&one_minus, wp)?;
    let den = &s * &g;
    if den.is_zero() {
        return Err(Error::Overflow("gamma reflection".into()));
    }
    Ok((&BigComplex::from_real(p, wp) / &den).with_prec(prec))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::nearly_equal;

    fn prec() -> Precision {
        Precision::default()
    }

    fn c(re: f64, im: f64) -> BigComplex {
        BigComplex::from_f64(re, im, prec())
    }

    #[test]
    fn classical_values() {
        let p = prec();
        assert!(nearly_equal(&gamma(&c(1.0, 0.0), p).unwrap(), &c(1.0, 0.0), 250));
        assert!(nearly_equal(&gamma(&c(5.0, 0.0), p).unwrap(), &c(24.0, 0.0), 250));
        let sqrt_pi = BigComplex::from_real(pi(p).sqrt(), p);
        assert!(nearly_equal(&gamma(&c(0.5, 0.0), p).unwrap(), &sqrt_pi, 250));
        // Γ(-1/2) = -2√π
        let v = gamma(&c(-0.5, 0.0), p).unwrap();
        assert!(nearly_equal(&v, &sqrt_pi.scale_f64(-2.0), 248));
    }

    #[test]
    fn agrees_with_mpfr_on_reals() {
        let p = prec();
        for x in [0.1, 0.73, 3.25, 17.5, 41.0, -3.3, -0.999] {
            let ours = gamma(&c(x, 0.0), p).unwrap();
            let mpfr = BigComplex::from_real(Float::with_val(p.working(), x).gamma(), p);
            assert!(nearly_equal(&ours, &mpfr, 245), "x = {x}");
        }
    }

    #[test]
    fn recurrence_and_conjugation() {
        let p = prec();
        for (re, im) in [(0.25, 4.0), (-2.7, 9.5), (3.5, -15.0), (0.5, 30.0), (-6.25, 0.5)] {
            let z = c(re, im);
            let g = gamma(&z, p).unwrap();
            let g1 = gamma(&z.add_f64(1.0, 0.0), p).unwrap();
            assert!(nearly_equal(&g1, &(&z * &g), 240), "z = {re}+{im}i");
            let gc = gamma(&z.conj(), p).unwrap();
            assert!(nearly_equal(&gc, &g.conj(), 245));
        }
    }

    #[test]
    fn reflection_identity_on_critical_line() {
        // |Γ(1/2 + it)|² = π / cosh(πt)
        let p = prec();
        let t = 12.0;
        let g = gamma(&c(0.5, t), p).unwrap();
        let w = p.working();
        let expect = pi(p) / Float::with_val(w, pi(p) * t).cosh();
        assert!(nearly_equal(
            &BigComplex::from_real(g.norm(), p),
            &BigComplex::from_real(expect, p),
            240
        ));
    }

    #[test]
    fn poles_carry_residues() {
        let p = prec();
        match gamma(&c(-3.0, 0.0), p) {
            Err(Error::Pole { residue: Some(r), .. }) => {
                assert!(nearly_equal(&r, &BigComplex::from_real(Float::with_val(300, -1) / 6u32, p), 250))
            }
            other => panic!("expected pole, got {other:?}"),
        }
        assert!(matches!(gamma(&c(0.0, 0.0), p), Err(Error::Pole { .. })));
    }
}
