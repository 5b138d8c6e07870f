//! Poles of `ξ_u(s, χ)` and its principal part.
//!
//! `ξ_u = g · L_u` has three kinds of poles:
//!
//! * gamma-factor poles at `s = -κ - 2h`, simple, with residue
//!   `2(-1)^h/h! · (q/π)^{-h} · L_u(-2h-κ)`;
//! * Euler-factor poles at `s_{j,h} = 2πi(n_j/φ(q) + h)/ln p_j` for every
//!   retained prime `p_j ∤ q`, simple, with residue `ξ_u^{∖p_j}(s_{j,h})/ln p_j`;
//! * a pole at the origin whose order counts the primes with `χ(p) = 1`
//!   (plus one when `κ = 0`), handled through its Laurent coefficients.
//!
//! The Euler families are infinite. They are truncated at a height where a
//! decay model `C·(|t|/2)^{(κ-1)/2} e^{-π|t|/4}`, fitted to the computed
//! residues, bounds the omitted terms.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::RwLock;

use rug::ops::Pow;
use rug::Float;

use crate::characters::DirichletCharacter;
use crate::error::{Error, Result};
use crate::euler::{l_truncated, xi_truncated, TruncationLevel};
use crate::numerics::{pi, BigComplex, Precision};

/// Safety factor applied to the fitted residue decay constant.
const DECAY_MARGIN: f64 = 16.0;
/// Default height up to which evaluation needs no cutoff growth.
pub const DEFAULT_EVAL_HEIGHT: f64 = 40.0;
/// Cutoff heights beyond this raise a precision error.
pub const MAX_HEIGHT: f64 = 6000.0;
const MAX_GAMMA_POLES: u64 = 20_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PoleSource {
    GammaFactor { h: u64 },
    EulerFactor { prime: u64, h: i64 },
    Origin,
}

impl PoleSource {
    pub fn describe(&self) -> String {
        match self {
            PoleSource::GammaFactor { h } => format!("gamma(h={h})"),
            PoleSource::EulerFactor { prime, h } => format!("euler(p={prime};h={h})"),
            PoleSource::Origin => "origin".to_string(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Pole {
    pub location: BigComplex,
    pub source: PoleSource,
    pub order: u32,
    /// Residue for simple poles away from the origin.
    pub residue: Option<BigComplex>,
    /// `c_1, …, c_ℓ` (coefficients of `s^{-i}`) for the origin.
    pub laurent: Vec<BigComplex>,
}

#[derive(Clone, Copy, Debug)]
pub struct PoleWindow {
    pub max_imag: f64,
    pub max_real_depth: f64,
}

/// Order of the pole of `ξ_u` at `s = 0`.
pub fn origin_order(chi: &DirichletCharacter, t: &TruncationLevel) -> u32 {
    let trivial = t.active_primes(chi).iter().filter(|(_, k)| *k == 0).count() as u32;
    trivial + u32::from(chi.kappa() == 0)
}

/// Location `2πi(n/φ + h)/ln p` of an Euler-factor pole.
pub fn euler_pole_location(p: u64, n: u64, phi: u64, h: i64, prec: Precision) -> BigComplex {
    let w = prec.working();
    let num = Float::with_val(w, n as i64 + h * phi as i64) * pi(prec) * 2u32;
    let den = Float::with_val(w, p).ln() * phi;
    BigComplex::from_parts(Float::new(w), num / den, prec)
}

fn decay_model(t: f64, kappa: u8) -> f64 {
    let t = t.abs().max(1.0);
    (t / 2.0).powf((kappa as f64 - 1.0) / 2.0) * (-PI * t / 4.0).exp()
}

#[derive(Clone, Debug)]
struct EulerFamily {
    prime: u64,
    n: u64,
    /// `2π/ln p`
    spacing: f64,
    decay_c: f64,
    /// Cutoff height used for `|Im s| ≤ eval_height` at the default target.
    cutoff: f64,
}

impl EulerFamily {
    fn height(&self, phi: u64, h: i64) -> f64 {
        self.spacing * (self.n as f64 / phi as f64 + h as f64)
    }

    fn h_range(&self, phi: u64, height: f64) -> (i64, i64) {
        let off = self.n as f64 / phi as f64;
        let lo = (-height / self.spacing - off).ceil() as i64;
        let hi = (height / self.spacing - off).floor() as i64;
        (lo, hi)
    }

    fn tail(&self, kappa: u8, cutoff: f64, im_abs: f64) -> f64 {
        let dist = cutoff - im_abs;
        if dist <= 0.0 {
            return f64::INFINITY;
        }
        2.0 * DECAY_MARGIN * self.decay_c * decay_model(cutoff, kappa)
            / (dist * (1.0 - (-PI * self.spacing / 4.0).exp()))
    }
}

/// Principal part `ξ^pp_u(s, χ)`: every pole term of `ξ_u`.
#[derive(Debug)]
pub struct PrincipalPart {
    chi: DirichletCharacter,
    level: TruncationLevel,
    prec: Precision,
    eval_height: f64,
    families: Vec<EulerFamily>,
    /// Residues per family, keyed by `h`: (location, residue).
    euler_cache: RwLock<Vec<BTreeMap<i64, (BigComplex, BigComplex)>>>,
    gamma_h0: u64,
    gamma_base: u64,
    gamma_cache: RwLock<Vec<BigComplex>>,
    origin: Vec<BigComplex>,
    origin_radius: f64,
}

/// Value of the principal part with a bound on the omitted terms.
#[derive(Clone, Debug)]
pub struct PpValue {
    pub value: BigComplex,
    pub tail_bound: f64,
    pub terms: usize,
}

impl PrincipalPart {
    pub fn new(chi: &DirichletCharacter, level: &TruncationLevel, prec: Precision) -> Result<Self> {
        Self::with_eval_height(chi, level, prec, DEFAULT_EVAL_HEIGHT)
    }

    pub fn with_eval_height(
        chi: &DirichletCharacter,
        level: &TruncationLevel,
        prec: Precision,
        eval_height: f64,
    ) -> Result<Self> {
        if level.removed().is_some() {
            return Err(Error::Domain("principal part needs the full truncation level".into()));
        }
        let families: Vec<EulerFamily> = level
            .active_primes(chi)
            .into_iter()
            .map(|(p, n)| EulerFamily {
                prime: p,
                n,
                spacing: 2.0 * PI / (p as f64).ln(),
                decay_c: 0.0,
                cutoff: 0.0,
            })
            .collect();
        let nfam = families.len();
        let mut pp = PrincipalPart {
            chi: chi.clone(),
            level: level.clone(),
            prec,
            eval_height,
            euler_cache: RwLock::new(vec![BTreeMap::new(); nfam]),
            families,
            gamma_h0: u64::from(chi.kappa() == 0),
            gamma_base: 0,
            gamma_cache: RwLock::new(Vec::new()),
            origin: Vec::new(),
            origin_radius: 1.0,
        };

        let budget = prec.target() / (4.0 * nfam.max(1) as f64);
        for j in 0..nfam {
            let sample = eval_height + 30.0;
            pp.ensure_euler(j, sample)?;
            let mut c = pp.fit_decay(j);
            loop {
                pp.families[j].decay_c = c;
                let cutoff = pp.find_cutoff(j, eval_height, budget)?;
                pp.families[j].cutoff = cutoff;
                pp.ensure_euler(j, cutoff)?;
                let refit = pp.fit_decay(j);
                if refit <= c {
                    break;
                }
                c = refit;
            }
        }

        // Gamma-factor residues decay factorially; keep going until negligible.
        let tiny = prec.target() * 2f64.powi(-20);
        let mut h = pp.gamma_h0;
        loop {
            let r = pp.gamma_residue(h)?;
            if h >= pp.gamma_h0 + 2 && r.abs_f64() < tiny {
                break;
            }
            h += 1;
            if h > MAX_GAMMA_POLES {
                return Err(Error::PrecisionNotReached("gamma-factor residues do not decay".into()));
            }
        }
        pp.gamma_base = h;

        let order = origin_order(chi, level);
        if order > 0 {
            pp.origin_radius = origin_contour_radius(chi, level);
            pp.origin = laurent_at_origin_with_radius(chi, level, order, pp.origin_radius, prec)?;
        }
        Ok(pp)
    }

    pub fn character(&self) -> &DirichletCharacter {
        &self.chi
    }

    pub fn level(&self) -> &TruncationLevel {
        &self.level
    }

    pub fn prec(&self) -> Precision {
        self.prec
    }

    pub fn origin_laurent(&self) -> &[BigComplex] {
        &self.origin
    }

    pub fn origin_order(&self) -> u32 {
        self.origin.len() as u32
    }

    /// Per prime `(p, cutoff height)` and the number of gamma poles kept.
    pub fn truncation(&self) -> (Vec<(u64, f64)>, u64) {
        (
            self.families.iter().map(|f| (f.prime, f.cutoff)).collect(),
            self.gamma_base - self.gamma_h0,
        )
    }

    fn fit_decay(&self, j: usize) -> f64 {
        let kappa = self.chi.kappa();
        let cache = self.euler_cache.read().expect("pole cache poisoned");
        let mut c = 0f64;
        let mut fallback = 0f64;
        for (loc, res) in cache[j].values() {
            let t = loc.im().to_f64();
            let ratio = res.abs_f64() / decay_model(t, kappa);
            if t.abs() >= 4.0 {
                c = c.max(ratio);
            }
            fallback = fallback.max(ratio);
        }
        if c == 0.0 {
            fallback
        } else {
            c
        }
    }

    fn find_cutoff(&self, j: usize, im_abs: f64, budget: f64) -> Result<f64> {
        let fam = &self.families[j];
        let kappa = self.chi.kappa();
        let mut cutoff = fam.cutoff.max(im_abs + fam.spacing);
        if im_abs > self.eval_height {
            cutoff = cutoff.max(fam.cutoff + (im_abs - self.eval_height));
        }
        while fam.tail(kappa, cutoff, im_abs) > budget {
            cutoff += 1.0;
            if cutoff > MAX_HEIGHT {
                return Err(Error::PrecisionNotReached(format!(
                    "Euler pole cutoff for p = {} exceeds height {MAX_HEIGHT}",
                    fam.prime
                )));
            }
        }
        Ok(cutoff)
    }

    fn ensure_euler(&self, j: usize, height: f64) -> Result<()> {
        let phi = self.chi.phi();
        let fam = &self.families[j];
        let (lo, hi) = fam.h_range(phi, height);
        {
            let cache = self.euler_cache.read().expect("pole cache poisoned");
            if cache[j].contains_key(&lo) && cache[j].contains_key(&hi) {
                return Ok(());
            }
        }
        let without = self.level.without(fam.prime)?;
        let wp = self.prec;
        let lnp = Float::with_val(wp.working(), fam.prime).ln();
        let mut fresh = Vec::new();
        {
            let cache = self.euler_cache.read().expect("pole cache poisoned");
            for h in lo..=hi {
                if fam.n == 0 && h == 0 {
                    continue;
                }
                if cache[j].contains_key(&h) {
                    continue;
                }
                let loc = euler_pole_location(fam.prime, fam.n, phi, h, wp);
                let res = xi_truncated(&loc, &self.chi, &without, wp)?.div_real(&lnp);
                fresh.push((h, loc, res));
            }
        }
        let mut cache = self.euler_cache.write().expect("pole cache poisoned");
        for (h, loc, res) in fresh {
            cache[j].entry(h).or_insert((loc, res));
        }
        Ok(())
    }

    fn gamma_residue(&self, h: u64) -> Result<BigComplex> {
        let idx = (h - self.gamma_h0) as usize;
        {
            let cache = self.gamma_cache.read().expect("pole cache poisoned");
            if let Some(r) = cache.get(idx) {
                return Ok(r.clone());
            }
        }
        let mut cache = self.gamma_cache.write().expect("pole cache poisoned");
        while cache.len() <= idx {
            let hh = self.gamma_h0 + cache.len() as u64;
            let r = gamma_pole_residue(&self.chi, &self.level, hh, self.prec)?;
            cache.push(r);
        }
        Ok(cache[idx].clone())
    }

    /// Poles (other than their residues) within `radius` of `s`, as
    /// `(location, order, magnitude)` where magnitude is |residue| or the
    /// largest Laurent coefficient.
    pub fn poles_near(&self, s: &BigComplex, radius: f64) -> Result<Vec<(BigComplex, u32, f64)>> {
        let (re, im) = s.to_f64_pair();
        let mut out = Vec::new();
        let phi = self.chi.phi();
        if re.abs() <= radius + 1e-9 {
            for (j, fam) in self.families.iter().enumerate() {
                let off = fam.n as f64 / phi as f64;
                let lo = ((im - radius) / fam.spacing - off).floor() as i64;
                let hi = ((im + radius) / fam.spacing - off).ceil() as i64;
                for h in lo..=hi {
                    if fam.n == 0 && h == 0 {
                        continue;
                    }
                    let t = fam.height(phi, h);
                    if (t - im).hypot(re) <= radius {
                        self.ensure_euler(j, t.abs() + 1.0)?;
                        let cache = self.euler_cache.read().expect("pole cache poisoned");
                        let (loc, res) = &cache[j][&h];
                        out.push((loc.clone(), 1, res.abs_f64()));
                    }
                }
            }
        }
        if im.abs() <= radius {
            let kappa = self.chi.kappa() as f64;
            let hmin = (((-re - radius - kappa) / 2.0).ceil()).max(self.gamma_h0 as f64) as u64;
            let hmax = ((-re + radius - kappa) / 2.0).floor();
            if hmax >= hmin as f64 {
                for h in hmin..=hmax as u64 {
                    let x = -kappa - 2.0 * h as f64;
                    if (x - re).hypot(im) <= radius {
                        let r = self.gamma_residue(h)?;
                        out.push((BigComplex::from_f64(x, 0.0, self.prec), 1, r.abs_f64()));
                    }
                }
            }
        }
        if !self.origin.is_empty() && re.hypot(im) <= radius {
            let mag = self.origin.iter().map(|c| c.abs_f64()).fold(0.0, f64::max);
            out.push((BigComplex::zero(self.prec), self.origin.len() as u32, mag));
        }
        Ok(out)
    }

    /// `ξ^pp_u(s)` with every omitted pole term bounded by `target_abs_err`.
    pub fn eval_pp(&self, s: &BigComplex, target_abs_err: f64) -> Result<PpValue> {
        let prec = self.prec;
        let s = s.with_prec(prec);
        let (re, im) = s.to_f64_pair();
        let im_abs = im.abs();
        let nfam = self.families.len().max(1) as f64;
        let mut value = BigComplex::zero(prec);
        let mut tail = 0f64;
        let mut terms = 0usize;
        let phi = self.chi.phi();
        let kappa = self.chi.kappa();

        let default_budget = prec.target() / (4.0 * nfam);
        let budget = (target_abs_err / (4.0 * nfam)).min(default_budget);
        for (j, fam) in self.families.iter().enumerate() {
            let cutoff = if im_abs <= self.eval_height && budget >= default_budget {
                fam.cutoff
            } else {
                self.find_cutoff(j, im_abs, budget)?
            };
            self.ensure_euler(j, cutoff)?;
            let (lo, hi) = fam.h_range(phi, cutoff);
            let cache = self.euler_cache.read().expect("pole cache poisoned");
            for h in lo..=hi {
                if fam.n == 0 && h == 0 {
                    continue;
                }
                let (loc, res) = &cache[j][&h];
                let d = &s - loc;
                if d.is_zero() {
                    return Err(Error::pole(loc.clone(), Some(res.clone())));
                }
                value += &(res / &d);
                terms += 1;
            }
            tail += fam.tail(kappa, cutoff, im_abs);
        }

        // Gamma line: sum until the next residue over its distance is negligible
        // and the remaining poles lie well to the left of s.
        let gamma_budget = target_abs_err / 4.0;
        let kf = kappa as f64;
        let mut h_end = self.gamma_base;
        loop {
            let next = self.gamma_residue(h_end)?;
            let x = -kf - 2.0 * h_end as f64;
            let dist = (re - x).hypot(im).max(1e-300);
            let bound = 2.0 * next.abs_f64() / dist;
            if x < re - 1.0 && bound <= gamma_budget {
                tail += bound;
                break;
            }
            h_end += 1;
            if h_end > MAX_GAMMA_POLES {
                return Err(Error::PrecisionNotReached("gamma-factor pole line does not converge".into()));
            }
        }
        for h in self.gamma_h0..h_end {
            let r = self.gamma_residue(h)?;
            let loc = BigComplex::from_f64(-kf - 2.0 * h as f64, 0.0, prec);
            let d = &s - &loc;
            if d.is_zero() {
                return Err(Error::pole(loc, Some(r)));
            }
            value += &(&r / &d);
            terms += 1;
        }

        if !self.origin.is_empty() {
            if s.is_zero() {
                return Err(Error::pole(BigComplex::zero(prec), None));
            }
            let inv = s.recip()?;
            let mut power = inv.clone();
            for c in &self.origin {
                value += &(c * &power);
                power = &power * &inv;
                terms += 1;
            }
        }
        if tail > target_abs_err {
            return Err(Error::PrecisionNotReached(format!(
                "principal part tail {tail:.3e} exceeds target {target_abs_err:.3e}"
            )));
        }
        Ok(PpValue {
            value,
            tail_bound: tail,
            terms,
        })
    }

    /// Catalogue of poles inside `window`, each with its residue (or the
    /// Laurent block at the origin), sorted by source then position.
    pub fn enumerate_poles(&self, window: PoleWindow) -> Result<Vec<Pole>> {
        enumerate_with(self, window)
    }
}

fn gamma_pole_residue(
    chi: &DirichletCharacter,
    level: &TruncationLevel,
    h: u64,
    prec: Precision,
) -> Result<BigComplex> {
    let w = prec.working();
    let kappa = chi.kappa() as i64;
    let loc = BigComplex::from_i64(-kappa - 2 * h as i64, prec);
    let l = l_truncated(&loc, chi, level, prec)?;
    let q_over_pi = Float::with_val(w, chi.modulus()) / pi(prec);
    let mut coef = Float::with_val(w, q_over_pi.pow(-(h as i32))) * 2u32 / Float::with_val(w, Float::factorial(h as u32));
    if h % 2 == 1 {
        coef = -coef;
    }
    Ok(l.scale(&coef))
}

/// Every pole of `ξ_u` inside the window with its residue.
pub fn enumerate_poles(
    chi: &DirichletCharacter,
    t: &TruncationLevel,
    window: PoleWindow,
    prec: Precision,
) -> Result<Vec<Pole>> {
    if !(window.max_imag > 0.0) || !(window.max_real_depth > 0.0) {
        return Err(Error::Domain("pole window bounds must be positive".into()));
    }
    let pp = PrincipalPart::with_eval_height(chi, t, prec, window.max_imag.max(1.0))?;
    pp.enumerate_poles(window)
}

fn enumerate_with(pp: &PrincipalPart, window: PoleWindow) -> Result<Vec<Pole>> {
    let mut out = Vec::new();
    let prec = pp.prec;
    if !pp.origin.is_empty() {
        out.push(Pole {
            location: BigComplex::zero(prec),
            source: PoleSource::Origin,
            order: pp.origin.len() as u32,
            residue: None,
            laurent: pp.origin.clone(),
        });
    }
    let kappa = pp.chi.kappa() as f64;
    let mut h = pp.gamma_h0;
    while kappa + 2.0 * h as f64 <= window.max_real_depth {
        out.push(Pole {
            location: BigComplex::from_f64(-kappa - 2.0 * h as f64, 0.0, prec),
            source: PoleSource::GammaFactor { h },
            order: 1,
            residue: Some(pp.gamma_residue(h)?),
            laurent: Vec::new(),
        });
        h += 1;
    }
    let phi = pp.chi.phi();
    for (j, fam) in pp.families.iter().enumerate() {
        pp.ensure_euler(j, window.max_imag)?;
        let (lo, hi) = fam.h_range(phi, window.max_imag);
        let cache = pp.euler_cache.read().expect("pole cache poisoned");
        for h in lo..=hi {
            if fam.n == 0 && h == 0 {
                continue;
            }
            let (loc, res) = &cache[j][&h];
            out.push(Pole {
                location: loc.clone(),
                source: PoleSource::EulerFactor { prime: fam.prime, h },
                order: 1,
                residue: Some(res.clone()),
                laurent: Vec::new(),
            });
        }
    }
    Ok(out)
}

/// Laurent coefficients `c_1, …, c_ℓ` of `ξ_u` at the origin
/// (`ξ_u(s) = Σ c_i s^{-i} + regular`), by the trapezoidal rule on a circle.
pub fn laurent_at_origin(
    chi: &DirichletCharacter,
    t: &TruncationLevel,
    order: u32,
    prec: Precision,
) -> Result<Vec<BigComplex>> {
    let expected = origin_order(chi, t);
    if order != expected {
        return Err(Error::Domain(format!(
            "origin pole has order {expected}, not {order}"
        )));
    }
    if order == 0 {
        return Ok(Vec::new());
    }
    laurent_at_origin_with_radius(chi, t, order, origin_contour_radius(chi, t), prec)
}

/// Half the distance from the origin to the nearest other pole, capped at 1.
fn origin_contour_radius(chi: &DirichletCharacter, t: &TruncationLevel) -> f64 {
    let phi = chi.phi() as f64;
    let mut d: f64 = if chi.kappa() == 0 { 2.0 } else { 1.0 };
    for (p, n) in t.active_primes(chi) {
        let spacing = 2.0 * PI / (p as f64).ln();
        let frac = n as f64 / phi;
        let nearest = if n == 0 { 1.0 } else { frac.min(1.0 - frac) };
        d = d.min(spacing * nearest);
    }
    (d / 2.0).min(1.0)
}

fn laurent_at_origin_with_radius(
    chi: &DirichletCharacter,
    t: &TruncationLevel,
    order: u32,
    radius: f64,
    prec: Precision,
) -> Result<Vec<BigComplex>> {
    let wp = prec.raised(16 + 4 * order);
    let w = wp.working();
    let r = Float::with_val(w, radius);
    let two_pi = pi(wp) * 2u32;
    let tol = prec.target() / 4.0;
    let max_nodes = 1usize << 14;

    let mut n = 64usize;
    // sums[i] = Σ_k ξ(s_k) s_k^{i+1}
    let mut sums = vec![BigComplex::zero(wp); order as usize];
    let add_nodes = |n: usize, start: usize, stride: usize, sums: &mut Vec<BigComplex>| -> Result<()> {
        let mut k = start;
        while k < n {
            let theta = Float::with_val(w, &two_pi * k as u64) / n as u64;
            let z = BigComplex::cis(&theta, wp).scale(&r);
            let f = xi_truncated(&z, chi, t, wp)?;
            let mut acc = &f * &z;
            for s in sums.iter_mut() {
                *s += &acc;
                acc = &acc * &z;
            }
            k += stride;
        }
        Ok(())
    };
    add_nodes(n, 0, 1, &mut sums)?;
    let mut prev: Vec<BigComplex> = sums.iter().map(|s| s.div_real(&Float::with_val(w, n))).collect();
    loop {
        let m = 2 * n;
        add_nodes(m, 1, 2, &mut sums)?;
        let cur: Vec<BigComplex> = sums.iter().map(|s| s.div_real(&Float::with_val(w, m))).collect();
        let change = cur
            .iter()
            .zip(&prev)
            .map(|(a, b)| a.dist(b))
            .fold(0.0, f64::max);
        n = m;
        if change <= tol {
            return Ok(cur.into_iter().map(|c| c.with_prec(prec)).collect());
        }
        if n >= max_nodes {
            return Err(Error::PrecisionNotReached(
                "Laurent coefficients at the origin did not converge".into(),
            ));
        }
        prev = cur;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::nearly_equal;

    fn prec() -> Precision {
        Precision::default()
    }

    fn chi(q: u64, n: i64) -> DirichletCharacter {
        DirichletCharacter::from_conrey_label(q, n).unwrap()
    }

    fn level(u: f64) -> TruncationLevel {
        TruncationLevel::new(u).unwrap()
    }

    /// Symmetric difference oracle: ((ρ+δ)-ρ)ξ(ρ+δ) averaged with the
    /// reflected point cancels the O(δ) term.
    fn numeric_residue(c: &DirichletCharacter, t: &TruncationLevel, rho: &BigComplex, p: Precision) -> BigComplex {
        let hp = p.raised(160);
        let delta = BigComplex::from_f64(1e-24, 1e-24, hp);
        let a = xi_truncated(&(&rho.with_prec(hp) + &delta), c, t, hp).unwrap();
        let b = xi_truncated(&(&rho.with_prec(hp) - &delta), c, t, hp).unwrap();
        (&(&a - &b) * &delta).scale_f64(0.5).with_prec(p)
    }

    #[test]
    fn origin_orders() {
        assert_eq!(origin_order(&chi(5, 4), &level(3.0)), 1);
        assert_eq!(origin_order(&chi(5, 4), &level(11.0)), 2);
        // χ_{7,6}(p) = 1 for p = 2, 11, 23, 29; κ = 1.
        assert_eq!(origin_order(&chi(7, 6), &level(1.0)), 0);
        assert_eq!(origin_order(&chi(7, 6), &level(3.0)), 1);
        assert_eq!(origin_order(&chi(7, 6), &level(29.0)), 4);
        // χ_{8,5}(p) = 1 for p ≡ ±1 (mod 8).
        assert_eq!(origin_order(&chi(8, 5), &level(5.0)), 1);
        assert_eq!(origin_order(&chi(8, 5), &level(11.0)), 2);
        assert_eq!(origin_order(&chi(8, 5), &level(17.0)), 3);
    }

    #[test]
    fn catalogue_for_modulus_five() {
        let p = prec();
        let c = chi(5, 4);
        let t = level(3.0);
        let poles = enumerate_poles(&c, &t, PoleWindow { max_imag: 10.0, max_real_depth: 6.0 }, p).unwrap();
        let euler2: Vec<f64> = poles
            .iter()
            .filter(|q| matches!(q.source, PoleSource::EulerFactor { prime: 2, .. }))
            .map(|q| q.location.im().to_f64())
            .collect();
        // (2πi/ln 2)(1/2 + h) = i·π/ln 2·(2h + 1)
        let base = PI / 2f64.ln();
        assert!(euler2.iter().any(|t| (t - base).abs() < 1e-12));
        assert!(euler2.iter().any(|t| (t + base).abs() < 1e-12));
        assert!((base - 4.532).abs() < 1e-3);
        let gammas: Vec<f64> = poles
            .iter()
            .filter(|q| matches!(q.source, PoleSource::GammaFactor { .. }))
            .map(|q| q.location.re().to_f64())
            .collect();
        assert_eq!(gammas, vec![-2.0, -4.0, -6.0]);
        let origin = poles.iter().find(|q| q.source == PoleSource::Origin).unwrap();
        assert_eq!(origin.order, 1);
        // The lone origin pole comes from Γ(s/2): residue 2·L_u(0).
        let l0 = l_truncated(&BigComplex::zero(p), &c, &t, p).unwrap();
        assert!(nearly_equal(&origin.laurent[0], &l0.scale_f64(2.0), 220));
        for q in &poles {
            if let Some(r) = &q.residue {
                let num = numeric_residue(&c, &t, &q.location, p);
                assert!(nearly_equal(r, &num, 140), "{:?}", q.source);
            }
        }
    }

    #[test]
    fn odd_character_gamma_line() {
        let p = prec();
        let poles = enumerate_poles(&chi(7, 6), &level(3.0), PoleWindow { max_imag: 1.0, max_real_depth: 5.5 }, p).unwrap();
        let locs: Vec<f64> = poles
            .iter()
            .filter(|q| matches!(q.source, PoleSource::GammaFactor { .. }))
            .map(|q| q.location.re().to_f64())
            .collect();
        assert_eq!(locs, vec![-1.0, -3.0, -5.0]);
        let origin = poles.iter().find(|q| q.source == PoleSource::Origin).unwrap();
        assert_eq!(origin.order, 1);
        let none = enumerate_poles(&chi(7, 6), &level(1.0), PoleWindow { max_imag: 1.0, max_real_depth: 2.0 }, p).unwrap();
        assert!(none.iter().all(|q| q.source != PoleSource::Origin));
    }

    #[test]
    fn second_order_origin() {
        // χ_{5,4}(11) = 1: the origin is a double pole.
        let p = prec();
        let c = chi(5, 4);
        let t = level(11.0);
        let cs = laurent_at_origin(&c, &t, 2, p).unwrap();
        assert_eq!(cs.len(), 2);
        let hp = p.raised(200);
        let d = BigComplex::from_f64(1e-25, 0.0, hp);
        let a = xi_truncated(&d, &c, &t, hp).unwrap();
        let b = xi_truncated(&-&d, &c, &t, hp).unwrap();
        // c_2 = lim s²ξ(s); the symmetric mean removes the c_1 s term.
        let c2 = (&(&a + &b) * &(&d * &d)).scale_f64(0.5);
        assert!(nearly_equal(&cs[1], &c2.with_prec(p), 150));
        // c_1 = lim (s²ξ(s) - c_2)/s; the symmetric difference keeps O(δ²).
        let c1 = (&(&a - &b) * &d).scale_f64(0.5);
        assert!(nearly_equal(&cs[0], &c1.with_prec(p), 140));
        assert!(laurent_at_origin(&c, &t, 1, p).is_err());
    }

    #[test]
    fn pole_locations_are_distinct() {
        let p = prec();
        let poles = enumerate_poles(&chi(8, 5), &level(11.0), PoleWindow { max_imag: 30.0, max_real_depth: 4.0 }, p).unwrap();
        for (i, a) in poles.iter().enumerate() {
            for b in &poles[i + 1..] {
                assert!(a.location.dist(&b.location) > 0.0);
            }
        }
    }

    #[test]
    fn real_character_poles_pair_up() {
        let p = prec();
        let poles = enumerate_poles(&chi(5, 4), &level(7.0), PoleWindow { max_imag: 20.0, max_real_depth: 1.0 }, p).unwrap();
        for a in poles.iter().filter(|q| q.residue.is_some()) {
            let conj = a.location.conj();
            let b = poles.iter().find(|q| q.location.dist(&conj) < 1e-40).expect("conjugate pole");
            assert!(nearly_equal(&b.residue.clone().unwrap(), &a.residue.clone().unwrap().conj(), 250));
        }
    }

    #[test]
    fn principal_part_decays_on_the_real_axis() {
        let p = prec();
        let pp = PrincipalPart::new(&chi(5, 4), &level(5.0), p).unwrap();
        let near = pp.eval_pp(&BigComplex::from_f64(1e3, 0.5, p), p.target()).unwrap().value.abs_f64();
        let far = pp.eval_pp(&BigComplex::from_f64(1e6, 0.5, p), p.target()).unwrap().value.abs_f64();
        assert!(far * 1e2 * 0.9 <= near, "near {near}, far {far}");
    }

    #[test]
    fn structure_without_euler_poles() {
        // u = 1, κ = 0: only the origin and the gamma line remain.
        let p = prec();
        let c = chi(5, 4);
        let t = level(1.0);
        let pp = PrincipalPart::new(&c, &t, p).unwrap();
        let s = BigComplex::from_f64(10.0, 0.0, p);
        let w = p.working();
        let got = pp.eval_pp(&s, p.target()).unwrap().value;
        // g(s) = (q/π)^{s/2} Γ(s/2) has residues 2(-1)^h/h!(q/π)^{-h} at s = -2h.
        let qpi = Float::with_val(w, 5) / pi(p);
        let mut expect = BigComplex::from_real(Float::with_val(w, 2) / 10u32, p); // 2/s at s = 10
        for h in 1..400u32 {
            let mut r = Float::with_val(w, qpi.clone().pow(-(h as i32))) * 2u32 / Float::with_val(w, Float::factorial(h));
            if h % 2 == 1 {
                r = -r;
            }
            expect = expect.add_real(&(r / (10 + 2 * h)));
        }
        assert!(nearly_equal(&got, &expect, 220), "{got} vs {expect}");
    }

    #[test]
    fn evaluation_is_history_independent() {
        let p = Precision::with_bits(128).unwrap();
        let c = chi(8, 5);
        let t = level(7.0);
        let s = BigComplex::from_f64(0.5, 11.0, p);
        let a = PrincipalPart::new(&c, &t, p).unwrap();
        let first = a.eval_pp(&s, p.target()).unwrap().value;
        let _ = a.eval_pp(&BigComplex::from_f64(0.1, 70.0, p), p.target()).unwrap();
        let again = a.eval_pp(&s, p.target()).unwrap().value;
        assert!(first.bit_eq(&again));
    }
}
