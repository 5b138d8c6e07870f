//! Gamma factor, truncated Euler products and their completed forms.

use std::sync::{OnceLock, RwLock};

use rug::ops::Pow;
use rug::Float;

use crate::characters::DirichletCharacter;
use crate::error::{Error, Result};
use crate::numerics::{pi, real_pow, BigComplex, Precision};
use crate::special::gamma;

static SIEVE: OnceLock<RwLock<(u64, Vec<u64>)>> = OnceLock::new();

/// Primes `p ≤ n` in increasing order (sieve of Eratosthenes, cached).
pub fn primes_up_to(n: u64) -> Vec<u64> {
    let lock = SIEVE.get_or_init(|| RwLock::new((1, Vec::new())));
    {
        let guard = lock.read().expect("sieve cache poisoned");
        if guard.0 >= n {
            let end = guard.1.partition_point(|&p| p <= n);
            return guard.1[..end].to_vec();
        }
    }
    let limit = n.max(1024).next_power_of_two();
    let mut composite = vec![false; limit as usize + 1];
    let mut primes = Vec::new();
    for i in 2..=limit as usize {
        if !composite[i] {
            primes.push(i as u64);
            let mut j = i * i;
            while j <= limit as usize {
                composite[j] = true;
                j += i;
            }
        }
    }
    let end = primes.partition_point(|&p| p <= n);
    let out = primes[..end].to_vec();
    *lock.write().expect("sieve cache poisoned") = (limit, primes);
    out
}

/// Smallest prime `> u`.
pub fn next_prime_after(u: f64) -> u64 {
    let start = if u < 2.0 { 2 } else { u.floor() as u64 + 1 };
    let mut bound = start.max(16) * 2;
    loop {
        if let Some(&p) = primes_up_to(bound).iter().find(|&&p| p >= start) {
            return p;
        }
        bound *= 2;
    }
}

/// The primes entering `L_u`: all primes `≤ u`, optionally minus one.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncationLevel {
    u: f64,
    primes: Vec<u64>,
    removed: Option<u64>,
}

impl TruncationLevel {
    pub fn new(u: f64) -> Result<Self> {
        if !u.is_finite() || u < 0.0 {
            return Err(Error::Domain(format!("truncation level must be finite and >= 0, got {u}")));
        }
        if u > 1e7 {
            return Err(Error::Domain(format!("truncation level {u} is too large")));
        }
        Ok(TruncationLevel {
            u,
            primes: primes_up_to(u.floor() as u64),
            removed: None,
        })
    }

    /// The same level with the factor at `p` left out.
    pub fn without(&self, p: u64) -> Result<Self> {
        if !self.primes.contains(&p) {
            return Err(Error::Domain(format!("{p} is not a prime <= {}", self.u)));
        }
        Ok(TruncationLevel {
            removed: Some(p),
            ..self.clone()
        })
    }

    pub fn u(&self) -> f64 {
        self.u
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn removed(&self) -> Option<u64> {
        self.removed
    }

    /// Retained primes with `χ(p) ≠ 0`, paired with the exponent `n_p`
    /// such that `χ(p) = e(n_p/φ(q))`.
    pub fn active_primes(&self, chi: &DirichletCharacter) -> Vec<(u64, u64)> {
        self.primes
            .iter()
            .filter(|&&p| Some(p) != self.removed)
            .filter_map(|&p| chi.exponent(p as i64).map(|k| (p, k)))
            .collect()
    }
}

/// `g(s, χ) = (q/π)^{(s+κ)/2} Γ((s+κ)/2)`.
///
/// At `s = -κ - 2h` returns [`Error::Pole`] with the residue of `g` there,
/// `2(-1)^h/h! · (q/π)^{-h}`.
pub fn gamma_factor(s: &BigComplex, chi: &DirichletCharacter, prec: Precision) -> Result<BigComplex> {
    let wp = prec.raised(8);
    let w = wp.working();
    let z = s.with_prec(wp).add_f64(chi.kappa() as f64, 0.0).scale_f64(0.5);
    let q_over_pi = Float::with_val(w, chi.modulus()) / pi(wp);
    match gamma(&z, wp) {
        Ok(g) => {
            let v = &real_pow(&q_over_pi, &z)? * &g;
            Ok(v.with_prec(prec))
        }
        Err(Error::Pole { residue, .. }) => {
            let h = z.as_nonpositive_integer().unwrap_or(0);
            // Γ((s+κ)/2) has residue r in z, hence 2r in s.
            let residue = residue.map(|r| {
                let scale = Float::with_val(w, q_over_pi.clone().pow(-(h as i32))) * 2u32;
                r.scale(&scale).with_prec(prec)
            });
            Err(Error::pole(s.with_prec(prec), residue))
        }
        Err(e) => Err(e),
    }
}

/// `L_u(s, χ) = Π_{p ≤ u} (1 - χ(p) p^{-s})^{-1}`, skipping the removed prime.
///
/// Fails with [`Error::NearPole`] when `s` is within `2^{-bits/2}` of a
/// zero of one of the factors.
pub fn l_truncated(
    s: &BigComplex,
    chi: &DirichletCharacter,
    t: &TruncationLevel,
    prec: Precision,
) -> Result<BigComplex> {
    let active = t.active_primes(chi);
    let wp = prec.raised(8);
    let w = wp.working();
    let ss = s.with_prec(wp);
    let neg_s = -&ss;
    let radius_log2 = -(prec.bits() as f64) / 2.0;
    let mut den = BigComplex::one(wp);
    for (p, k) in active {
        let pf = Float::with_val(w, p);
        let chi_p = BigComplex::root_of_unity(k, chi.phi(), wp);
        let factor = BigComplex::one(wp) - &chi_p * &real_pow(&pf, &neg_s)?;
        // 1 - χ(p)p^{-s} ≈ (s - ρ) ln p near a zero ρ
        let lnp = pf.ln();
        if factor.log2_abs() - lnp.to_f64().log2() < radius_log2 {
            return Err(Error::NearPole {
                point: fmt_c(s),
                location: format!("a zero of the Euler factor at p = {p}"),
                distance: factor.abs_f64() / lnp.to_f64(),
            });
        }
        den = &den * &factor;
    }
    Ok(den.recip()?.with_prec(prec))
}

/// `ξ_u(s, χ) = g(s, χ) L_u(s, χ)`.
pub fn xi_truncated(
    s: &BigComplex,
    chi: &DirichletCharacter,
    t: &TruncationLevel,
    prec: Precision,
) -> Result<BigComplex> {
    let wp = prec.raised(8);
    let l = l_truncated(s, chi, t, wp)?;
    let g = gamma_factor(s, chi, wp)?;
    Ok((&g * &l).with_prec(prec))
}

pub(crate) fn fmt_c(z: &BigComplex) -> String {
    let (re, im) = z.to_f64_pair();
    format!("{re}{im:+}i")
}
