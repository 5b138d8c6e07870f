//! Primitive Dirichlet characters in Conrey labelling.
//!
//! A character mod `q` is stored as a table of exponents: `χ(m) = e(k_m/φ(q))`
//! with `e(x) = exp(2πix)`, or `None` when `gcd(m, q) > 1`. Complex values
//! are produced on demand at whatever precision the caller asks for.

use std::fmt;
use std::str::FromStr;

use rug::Float;

use crate::arith::{euler_phi, factorize, gcd, mod_inverse, primitive_root_prime_power};
use crate::error::{Error, Result};
use crate::numerics::{BigComplex, Precision};

/// Largest modulus accepted; the value table is dense.
pub const MAX_MODULUS: u64 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DirichletCharacter {
    modulus: u64,
    index: u64,
    phi: u64,
    exponents: Vec<Option<u64>>,
    kappa: u8,
    conductor: u64,
}

impl DirichletCharacter {
    /// The Conrey character `χ_q(index, ·)`; fails unless it is primitive.
    pub fn from_conrey_label(q: u64, index: i64) -> Result<Self> {
        let label = format!("{q}.{index}");
        if q <= 2 {
            return Err(Error::NoPrimitiveCharacter(q));
        }
        if q > MAX_MODULUS {
            return Err(Error::Domain(format!("modulus {q} exceeds {MAX_MODULUS}")));
        }
        let n = index.rem_euclid(q as i64) as u64;
        if gcd(n, q) != 1 {
            return Err(Error::InvalidLabel(label));
        }
        let chi = Self::conrey_unchecked(q, n);
        if chi.conductor != q {
            return Err(Error::NotPrimitive {
                label,
                conductor: chi.conductor,
            });
        }
        Ok(chi)
    }

    /// Parses `q.n`.
    pub fn parse_label(label: &str) -> Result<Self> {
        let bad = || Error::InvalidLabel(label.to_string());
        let (q, n) = label.trim().split_once('.').ok_or_else(bad)?;
        let q: u64 = q.parse().map_err(|_| bad())?;
        let n: i64 = n.parse().map_err(|_| bad())?;
        if n <= 0 || (q > 2 && n as u64 >= q) {
            return Err(bad());
        }
        Self::from_conrey_label(q, n)
    }

    fn conrey_unchecked(q: u64, n: u64) -> Self {
        let phi = euler_phi(q);
        let qs = q as usize;
        let mut exponents: Vec<Option<u64>> =
            (0..q).map(|m| (gcd(m, q) == 1).then_some(0)).collect();
        for (p, e) in factorize(q) {
            let pe = p.pow(e);
            let phi_pe = pe / p * (p - 1);
            let unit = phi / phi_pe;
            let local = local_exponents(p, e, n % pe);
            for m in 0..qs {
                if let Some(k) = exponents[m].as_mut() {
                    *k = (*k + local[m % pe as usize] * unit) % phi;
                }
            }
        }
        let minus_one = exponents[qs - 1].expect("-1 is a unit");
        let kappa = if minus_one == 0 { 0 } else { 1 };
        let conductor = conductor_of(q, &exponents);
        DirichletCharacter {
            modulus: q,
            index: n,
            phi,
            exponents,
            kappa,
            conductor,
        }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn conrey_index(&self) -> u64 {
        self.index
    }

    pub fn label(&self) -> String {
        format!("{}.{}", self.modulus, self.index)
    }

    /// `κ(χ)`: 0 for even, 1 for odd characters.
    pub fn kappa(&self) -> u8 {
        self.kappa
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    /// `φ(q)`, the denominator of the exponent table.
    pub fn phi(&self) -> u64 {
        self.phi
    }

    /// `k` with `χ(n) = e(k/φ(q))`, or `None` if `gcd(n, q) > 1`.
    pub fn exponent(&self, n: i64) -> Option<u64> {
        self.exponents[n.rem_euclid(self.modulus as i64) as usize]
    }

    /// Multiplicative order of the character.
    pub fn order(&self) -> u64 {
        let g = self
            .exponents
            .iter()
            .flatten()
            .fold(self.phi, |acc, &k| gcd(acc, k));
        self.phi / g
    }

    pub fn is_real(&self) -> bool {
        self.order() <= 2
    }

    pub fn eval(&self, n: i64, prec: Precision) -> BigComplex {
        match self.exponent(n) {
            Some(k) => BigComplex::root_of_unity(k, self.phi, prec),
            None => BigComplex::zero(prec),
        }
    }

    /// `χ(0), …, χ(q-1)` at the given precision.
    pub fn values(&self, prec: Precision) -> Vec<BigComplex> {
        (0..self.modulus as i64).map(|n| self.eval(n, prec)).collect()
    }

    /// `τ(χ) = Σ_{n=1}^{q} χ(n) e(n/q)`.
    pub fn gauss_sum(&self, prec: Precision) -> BigComplex {
        let (q, phi) = (self.modulus, self.phi);
        let modulus = q * phi;
        let mut acc = BigComplex::zero(prec);
        for n in 1..=q {
            if let Some(k) = self.exponents[(n % q) as usize] {
                // e(k/φ)·e(n/q) = e((kq + nφ)/(qφ))
                acc += &BigComplex::root_of_unity((k * q + n * phi) % modulus, modulus, prec);
            }
        }
        acc
    }

    /// Root number `ε(χ) = τ(χ) / (i^κ √q)`.
    pub fn epsilon(&self, prec: Precision) -> BigComplex {
        let tau = self.gauss_sum(prec);
        let sqrt_q = Float::with_val(prec.working(), self.modulus).sqrt();
        let tau = tau.div_real(&sqrt_q);
        if self.kappa == 1 {
            // divide by i
            BigComplex::from_parts(tau.im().clone(), Float::with_val(prec.working(), -tau.re()), prec)
        } else {
            tau
        }
    }

    /// `χ̄`, which is `χ_q(n^{-1}, ·)` in Conrey labelling.
    pub fn conjugate(&self) -> Self {
        let index = mod_inverse(self.index, self.modulus).expect("index is a unit");
        let phi = self.phi;
        DirichletCharacter {
            modulus: self.modulus,
            index,
            phi,
            exponents: self
                .exponents
                .iter()
                .map(|k| k.map(|k| (phi - k) % phi))
                .collect(),
            kappa: self.kappa,
            conductor: self.conductor,
        }
    }
}

impl fmt::Display for DirichletCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

impl FromStr for DirichletCharacter {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse_label(s)
    }
}

/// Exponents of the Conrey character `χ_{p^e}(n, ·)` in units of `1/φ(p^e)`,
/// indexed by residues mod `p^e` (zero at non-units).
fn local_exponents(p: u64, e: u32, n: u64) -> Vec<u64> {
    let pe = p.pow(e);
    let phi_pe = pe / p * (p - 1);
    let mut out = vec![0u64; pe as usize];
    if p == 2 {
        match e {
            1 => {}
            2 => {
                if n % 4 == 3 {
                    out[3] = phi_pe / 2;
                }
            }
            _ => {
                // m = ±5^a mod 2^e
                let half = pe / 4;
                let mut log5 = vec![0u64; pe as usize];
                let mut x = 1u64;
                for a in 0..half {
                    log5[x as usize] = a;
                    x = x * 5 % pe;
                }
                let split = |m: u64| -> (bool, u64) {
                    if m % 4 == 1 {
                        (false, log5[m as usize])
                    } else {
                        (true, log5[(pe - m) as usize])
                    }
                };
                let (neg_n, a_n) = split(n);
                for m in (1..pe).step_by(2) {
                    let (neg_m, a_m) = split(m);
                    let mut k = (a_n * a_m % half) * (phi_pe / half);
                    if neg_n && neg_m {
                        k += phi_pe / 2;
                    }
                    out[m as usize] = k % phi_pe;
                }
            }
        }
        return out;
    }
    let g = primitive_root_prime_power(p);
    let mut log = vec![0u64; pe as usize];
    let mut x = 1u64;
    for k in 0..phi_pe {
        log[x as usize] = k;
        x = x * g % pe;
    }
    let a = log[n as usize];
    for m in 1..pe {
        if m % p != 0 {
            out[m as usize] = a * log[m as usize] % phi_pe;
        }
    }
    out
}

/// Smallest `d | q` such that the character is trivial on units `≡ 1 (mod d)`.
fn conductor_of(q: u64, exponents: &[Option<u64>]) -> u64 {
    let mut divisors: Vec<u64> = (1..=q).filter(|d| q % d == 0).collect();
    divisors.sort_unstable();
    for d in divisors {
        let trivial = (1..q)
            .step_by(d as usize)
            .all(|m| exponents[m as usize].map_or(true, |k| k == 0));
        if trivial {
            return d;
        }
    }
    q
}

/// All primitive characters modulo `q`, in increasing Conrey index.
pub fn primitive_characters(q: u64) -> Vec<DirichletCharacter> {
    if q <= 2 {
        return Vec::new();
    }
    (1..q)
        .filter(|&n| gcd(n, q) == 1)
        .map(|n| DirichletCharacter::conrey_unchecked(q, n))
        .filter(|c| c.conductor == q)
        .collect()
}
