//! Double-exponential quadrature for complex-valued integrands.
//!
//! `tanh_sinh` handles finite intervals and `exp_sinh` half lines. Both
//! halve the step until two consecutive levels agree to the requested
//! tolerance and report [`Error::PrecisionNotReached`] otherwise.

use rug::float::Constant;
use rug::Float;

use super::{BigComplex, Precision};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug)]
pub enum Tolerance {
    Absolute(f64),
    Relative(f64),
}

impl Tolerance {
    fn threshold(self, estimate: &BigComplex) -> f64 {
        match self {
            Tolerance::Absolute(t) => t,
            Tolerance::Relative(t) => t * estimate.abs_f64(),
        }
    }
}

const MAX_LEVEL: u32 = 12;

/// Outcome of a quadrature together with the last level-to-level change.
#[derive(Clone, Debug)]
pub struct Quadrature {
    pub value: BigComplex,
    pub error_estimate: f64,
    pub evaluations: usize,
}

/// Integral of `f` over `[a, b]` by the tanh-sinh rule.
///
/// Abscissae are generated as offsets from the nearer endpoint, so the
/// integrand is never evaluated exactly at `a` or `b`.
pub fn tanh_sinh<F>(mut f: F, a: &Float, b: &Float, prec: Precision, tol: Tolerance) -> Result<Quadrature>
where
    F: FnMut(&Float) -> Result<BigComplex>,
{
    let w = prec.working();
    let half_pi = Float::with_val(w, Constant::Pi) / 2u32;
    let center = Float::with_val(w, a + b) / 2u32;
    let radius = Float::with_val(w, b - a) / 2u32;
    // Weights fall below 2^-(w+20) once sinh(t) exceeds this.
    let t_max = (((w + 20) as f64 * super::ln2_f64()) / std::f64::consts::PI).asinh() + 0.5;

    let mut evaluations = 0usize;
    let mut node_sum = f(&center)?.scale(&half_pi);
    evaluations += 1;
    let mut previous: Option<BigComplex> = None;
    let mut h = 1.0f64;

    for level in 0..=MAX_LEVEL {
        let (start, stride) = if level == 0 { (1u64, 1u64) } else { (1, 2) };
        let mut j = start;
        loop {
            let t = j as f64 * h;
            if t > t_max {
                break;
            }
            let tf = Float::with_val(w, t);
            let (sh, ch) = tf.sinh_cosh(Float::new(w));
            let u = Float::with_val(w, &half_pi * &sh);
            let e2u = Float::with_val(w, u * 2u32).exp();
            let denom = Float::with_val(w, &e2u + 1u32);
            let offset = Float::with_val(w, &radius * 2u32) / &denom;
            // weight = (π/2)·cosh t / cosh²(u) = (π/2)·cosh t · 4e^{2u}/(e^{2u}+1)²
            let weight = Float::with_val(w, &half_pi * &ch) * 4u32 * &e2u / denom.square();
            let left = Float::with_val(w, a + &offset);
            let right = Float::with_val(w, b - &offset);
            let fl = f(&left)?;
            let fr = f(&right)?;
            evaluations += 2;
            node_sum += &(&fl + &fr).scale(&weight);
            j += stride;
        }
        let estimate = node_sum.scale(&Float::with_val(w, h)).scale(&radius);
        if let Some(prev) = &previous {
            let change = estimate.dist(prev);
            if level >= 3 && change <= tol.threshold(&estimate) {
                return Ok(Quadrature {
                    value: estimate,
                    error_estimate: change,
                    evaluations,
                });
            }
        }
        previous = Some(estimate);
        h /= 2.0;
    }
    Err(Error::PrecisionNotReached(format!(
        "tanh-sinh quadrature did not converge after {evaluations} evaluations"
    )))
}

/// Integral of `f` over `[a, ∞)` by the exp-sinh rule `x = a + exp(π/2·sinh t)`.
///
/// The integrand must decay at infinity; the right-hand cut-off is found
/// on the coarsest level by marching until contributions become negligible.
pub fn exp_sinh<F>(mut f: F, a: &Float, prec: Precision, tol: Tolerance) -> Result<Quadrature>
where
    F: FnMut(&Float) -> Result<BigComplex>,
{
    let w = prec.working();
    let half_pi = Float::with_val(w, Constant::Pi) / 2u32;
    let t_min = -((((w + 30) as f64 * super::ln2_f64()) * 2.0 / std::f64::consts::PI).asinh() + 0.5);
    let t_cap = 7.0f64;

    let mut evaluations = 0usize;
    let node = |t: f64, f: &mut F| -> Result<(BigComplex, f64)> {
        let tf = Float::with_val(w, t);
        let (sh, ch) = tf.sinh_cosh(Float::new(w));
        let eu = Float::with_val(w, &half_pi * &sh).exp();
        let x = Float::with_val(w, a + &eu);
        let weight = Float::with_val(w, &half_pi * &ch) * &eu;
        let v = f(&x)?.scale(&weight);
        let mag = v.abs_f64();
        Ok((v, mag))
    };

    // Level 0 with h = 1/2 fixes the right cut-off.
    let mut h = 0.5f64;
    let mut sum = BigComplex::zero(prec);
    let mut j_min: i64 = (t_min / h).floor() as i64;
    let mut j_max: i64;
    for j in j_min..=0 {
        let (v, _) = node(j as f64 * h, &mut f)?;
        evaluations += 1;
        sum += &v;
    }
    let mut small_run = 0;
    let mut j = 1i64;
    loop {
        let t = j as f64 * h;
        if t > t_cap {
            return Err(Error::PrecisionNotReached(
                "exp-sinh quadrature: integrand does not decay".into(),
            ));
        }
        let (v, mag) = node(t, &mut f)?;
        evaluations += 1;
        sum += &v;
        let scale = sum.abs_f64().max(f64::MIN_POSITIVE);
        let negligible = mag <= scale * prec.unit_roundoff() * 1e-3 || v.is_zero();
        small_run = if negligible { small_run + 1 } else { 0 };
        j_max = j;
        if small_run >= 3 {
            break;
        }
        j += 1;
    }
    let t_hi = j_max as f64 * h;
    let t_lo = j_min as f64 * h;
    let mut previous = sum.scale(&Float::with_val(w, h));

    for _level in 1..=MAX_LEVEL {
        h /= 2.0;
        j_min *= 2;
        j_max *= 2;
        let mut j = j_min + 1;
        while j < j_max {
            let t = j as f64 * h;
            if t >= t_lo && t <= t_hi {
                let (v, _) = node(t, &mut f)?;
                evaluations += 1;
                sum += &v;
            }
            j += 2;
        }
        let estimate = sum.scale(&Float::with_val(w, h));
        let change = estimate.dist(&previous);
        if change <= tol.threshold(&estimate) {
            return Ok(Quadrature {
                value: estimate,
                error_estimate: change,
                evaluations,
            });
        }
        previous = estimate;
    }
    Err(Error::PrecisionNotReached(format!(
        "exp-sinh quadrature did not converge after {evaluations} evaluations"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::nearly_equal;

    #[test]
    fn polynomial_on_interval() {
        let prec = Precision::with_bits(128).unwrap();
        let a = Float::with_val(160, 0);
        let b = Float::with_val(160, 2);
        let q = tanh_sinh(
            |x| Ok(BigComplex::from_real(Float::with_val(160, x * x), prec)),
            &a,
            &b,
            prec,
            Tolerance::Absolute(1e-35),
        )
        .unwrap();
        let exact = BigComplex::from_real(Float::with_val(160, 8) / 3u32, prec);
        assert!(nearly_equal(&q.value, &exact, 110));
    }

    #[test]
    fn endpoint_singularity() {
        // ∫_0^1 ln x dx = -1
        let prec = Precision::with_bits(128).unwrap();
        let q = tanh_sinh(
            |x| Ok(BigComplex::from_real(Float::with_val(160, x.ln_ref()), prec)),
            &Float::with_val(160, 0),
            &Float::with_val(160, 1),
            prec,
            Tolerance::Absolute(1e-30),
        )
        .unwrap();
        assert!(nearly_equal(&q.value, &BigComplex::from_f64(-1.0, 0.0, prec), 95));
    }

    #[test]
    fn half_line_exponential() {
        // ∫_1^∞ e^{-x} dx = e^{-1}
        let prec = Precision::with_bits(128).unwrap();
        let q = exp_sinh(
            |x| Ok(BigComplex::from_real(Float::with_val(160, -x).exp(), prec)),
            &Float::with_val(160, 1),
            prec,
            Tolerance::Relative(1e-35),
        )
        .unwrap();
        let exact = BigComplex::from_real(Float::with_val(160, -1).exp(), prec);
        assert!(nearly_equal(&q.value, &exact, 110));
    }
}
