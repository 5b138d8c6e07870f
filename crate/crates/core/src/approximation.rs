//! The regular part `ξ^reg_u = ξ_u − ξ^pp_u`, the symmetrised entire
//! approximation `ξ^≈_u(s, χ) = ξ^reg_u(s, χ) + ε(χ) ξ^reg_u(1 − s, χ̄)` and
//! `L^≈_u = ξ^≈_u / g`.

use std::sync::Arc;

use rug::Float;

use crate::characters::DirichletCharacter;
use crate::error::{Error, Result};
use crate::euler::{gamma_factor, xi_truncated, TruncationLevel};
use crate::numerics::{pi, BigComplex, Precision};
use crate::principal_part::PrincipalPart;

/// Which character a regular part refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Chi,
    Conj,
}

/// A value together with an estimate of its absolute error.
#[derive(Clone, Debug)]
pub struct ApproxResult {
    pub value: BigComplex,
    pub est_err: f64,
}

/// How `ξ^reg_u(s)` was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegPath {
    /// `ξ_u(s) − ξ^pp_u(s)` evaluated directly.
    Direct,
    /// Mean value of `ξ^reg_u` over a circle centred at `s` (used near poles).
    Circle,
}

const CIRCLE_RADII: [f64; 8] = [0.5, 0.375, 0.625, 0.25, 0.75, 0.1875, 0.875, 0.125];
const MAX_CIRCLE_NODES: usize = 4096;

/// Everything needed to evaluate `ξ^≈_u(·, χ)`.
#[derive(Clone, Debug)]
pub struct Approximant {
    chi: DirichletCharacter,
    chi_bar: DirichletCharacter,
    level: TruncationLevel,
    pp: Arc<PrincipalPart>,
    pp_conj: Arc<PrincipalPart>,
    epsilon: BigComplex,
    prec: Precision,
}

impl Approximant {
    pub fn new(chi: &DirichletCharacter, level: &TruncationLevel, prec: Precision) -> Result<Self> {
        let pp = Arc::new(PrincipalPart::new(chi, level, prec)?);
        let chi_bar = chi.conjugate();
        let pp_conj = if chi_bar == *chi {
            Arc::clone(&pp)
        } else {
            Arc::new(PrincipalPart::new(&chi_bar, level, prec)?)
        };
        Ok(Approximant {
            chi: chi.clone(),
            chi_bar,
            level: level.clone(),
            pp,
            pp_conj,
            epsilon: chi.epsilon(prec),
            prec,
        })
    }

    /// The approximant for `χ̄`, sharing the principal parts.
    pub fn conjugate(&self) -> Self {
        Approximant {
            chi: self.chi_bar.clone(),
            chi_bar: self.chi.clone(),
            level: self.level.clone(),
            pp: Arc::clone(&self.pp_conj),
            pp_conj: Arc::clone(&self.pp),
            epsilon: self.chi_bar.epsilon(self.prec),
            prec: self.prec,
        }
    }

    pub fn character(&self) -> &DirichletCharacter {
        &self.chi
    }

    pub fn level(&self) -> &TruncationLevel {
        &self.level
    }

    pub fn epsilon(&self) -> &BigComplex {
        &self.epsilon
    }

    pub fn prec(&self) -> Precision {
        self.prec
    }

    pub fn principal_part(&self, side: Side) -> &PrincipalPart {
        match side {
            Side::Chi => &self.pp,
            Side::Conj => &self.pp_conj,
        }
    }

    fn side_char(&self, side: Side) -> &DirichletCharacter {
        match side {
            Side::Chi => &self.chi,
            Side::Conj => &self.chi_bar,
        }
    }

    /// Rough absolute error of direct subtraction at `s`, from the nearest
    /// pole's order and residue size.
    fn direct_error(&self, s: &BigComplex, side: Side) -> Result<f64> {
        let near = self.principal_part(side).poles_near(s, 1.0)?;
        let u = self.prec.unit_roundoff();
        let mut err = 0f64;
        for (loc, order, mag) in near {
            let d = s.dist(&loc);
            if d == 0.0 {
                return Ok(f64::INFINITY);
            }
            let scale = 1.0 + loc.abs_f64();
            err = err.max(u * mag * scale / d.powi(order as i32 + 1));
        }
        Ok(err)
    }

    /// Which evaluation path `xi_reg` takes at `s`.
    pub fn reg_path(&self, s: &BigComplex, side: Side) -> Result<RegPath> {
        let err = self.direct_error(s, side)?;
        Ok(if err <= self.prec.target() / 16.0 {
            RegPath::Direct
        } else {
            RegPath::Circle
        })
    }

    /// `ξ^reg_u(s)` for `χ` or `χ̄`; finite everywhere.
    pub fn xi_reg(&self, s: &BigComplex, side: Side) -> Result<ApproxResult> {
        match self.reg_path(s, side)? {
            RegPath::Direct => match self.xi_reg_direct(s, side) {
                Err(Error::NearPole { .. }) | Err(Error::Pole { .. }) => self.xi_reg_circle(s, side),
                other => other,
            },
            RegPath::Circle => self.xi_reg_circle(s, side),
        }
    }

    /// `ξ_u(s) − ξ^pp_u(s)` by plain subtraction.
    pub fn xi_reg_direct(&self, s: &BigComplex, side: Side) -> Result<ApproxResult> {
        let prec = self.prec;
        let xi = xi_truncated(s, self.side_char(side), &self.level, prec)?;
        // Relative to |ξ_u(s)|, which decays like the gamma factor with height.
        let target = (prec.target() * xi.abs_f64() / 16.0).max(f64::MIN_POSITIVE);
        let pp = self.principal_part(side).eval_pp(s, target)?;
        let value = &xi - &pp.value;
        let rounding = prec.unit_roundoff() * 64.0 * xi.abs_f64().max(pp.value.abs_f64());
        let est_err = pp.tail_bound + rounding + self.direct_error(s, side)?;
        Ok(ApproxResult { value, est_err })
    }

    /// Mean value of the entire function `ξ^reg_u` on a circle around `s`,
    /// with node doubling until two levels agree.
    pub fn xi_reg_circle(&self, s: &BigComplex, side: Side) -> Result<ApproxResult> {
        let prec = self.prec;
        let w = prec.working();
        let near = self.principal_part(side).poles_near(s, 1.0)?;
        let mut best = (CIRCLE_RADII[0], -1.0f64);
        for r in CIRCLE_RADII {
            let gap = near
                .iter()
                .map(|(loc, _, _)| (s.dist(loc) - r).abs())
                .fold(f64::INFINITY, f64::min);
            if gap > best.1 {
                best = (r, gap);
            }
        }
        let radius = Float::with_val(w, best.0);
        let two_pi = pi(prec) * 2u32;
        let tol = prec.target() / 4.0;

        let mut n = 32usize;
        let mut sum = BigComplex::zero(prec);
        let mut node_err = 0f64;
        let eval_nodes = |n: usize, start: usize, stride: usize, sum: &mut BigComplex| -> Result<f64> {
            let mut worst = 0f64;
            let mut k = start;
            while k < n {
                let theta = Float::with_val(w, &two_pi * k as u64) / n as u64;
                let z = s + &BigComplex::cis(&theta, prec).scale(&radius);
                let v = self.xi_reg_direct(&z, side)?;
                worst = worst.max(v.est_err);
                *sum += &v.value;
                k += stride;
            }
            Ok(worst)
        };
        node_err = node_err.max(eval_nodes(n, 0, 1, &mut sum)?);
        let mut prev = sum.div_real(&Float::with_val(w, n));
        loop {
            let m = 2 * n;
            node_err = node_err.max(eval_nodes(m, 1, 2, &mut sum)?);
            let cur = sum.div_real(&Float::with_val(w, m));
            let change = cur.dist(&prev);
            n = m;
            if change <= tol {
                return Ok(ApproxResult {
                    value: cur,
                    est_err: change + node_err,
                });
            }
            if n >= MAX_CIRCLE_NODES {
                return Err(Error::PrecisionNotReached(
                    "regular part: circle mean did not converge".into(),
                ));
            }
            prev = cur;
        }
    }

    /// `ξ^≈_u(s, χ)`.
    pub fn xi_approx(&self, s: &BigComplex) -> Result<ApproxResult> {
        let s = s.with_prec(self.prec);
        let a = self.xi_reg(&s, Side::Chi)?;
        let one_minus = (-&s).add_f64(1.0, 0.0);
        let b = self.xi_reg(&one_minus, Side::Conj)?;
        let value = &a.value + &(&self.epsilon * &b.value);
        Ok(ApproxResult {
            value,
            est_err: a.est_err + b.est_err * self.epsilon.abs_f64(),
        })
    }

    /// `L^≈_u(s, χ) = ξ^≈_u(s, χ) / g(s, χ)`; undefined at the poles of `g`.
    pub fn l_approx(&self, s: &BigComplex) -> Result<ApproxResult> {
        let g = match gamma_factor(s, &self.chi, self.prec) {
            Ok(g) => g,
            Err(Error::Pole { .. }) => {
                return Err(Error::Domain(format!(
                    "L-approximation is not defined at the gamma-factor pole {}",
                    crate::euler::fmt_c(s)
                )))
            }
            Err(e) => return Err(e),
        };
        let xi = self.xi_approx(s)?;
        let gabs = g.abs_f64();
        Ok(ApproxResult {
            value: &xi.value / &g,
            est_err: xi.est_err / gabs,
        })
    }

    /// `|ξ^≈_u(s, χ) − ε(χ) ξ^≈_u(1 − s, χ̄)|`.
    pub fn fe_residual(&self, s: &BigComplex) -> Result<FeResidual> {
        let lhs = self.xi_approx(s)?;
        let one_minus = (-&s.with_prec(self.prec)).add_f64(1.0, 0.0);
        let rhs = self.conjugate().xi_approx(&one_minus)?;
        let rhs_scaled = &self.epsilon * &rhs.value;
        Ok(FeResidual {
            residual: lhs.value.dist(&rhs_scaled),
            magnitude: lhs.value.abs_f64(),
        })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct FeResidual {
    pub residual: f64,
    pub magnitude: f64,
}
