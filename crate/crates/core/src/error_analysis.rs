//! The exact error `ξ − ξ^≈_u` as a series over rough numbers, its
//! incomplete-gamma bound and a vertical-line integral check.

use rug::Float;

use crate::approximation::Approximant;
use crate::arith::factorize;
use crate::characters::DirichletCharacter;
use crate::error::{Error, Result};
use crate::euler::{gamma_factor, l_truncated, next_prime_after, TruncationLevel};
use crate::numerics::quad::{tanh_sinh, Tolerance};
use crate::numerics::{pi, real_pow, BigComplex, Precision};
use crate::reference::{l_reference, xi_reference};
use crate::special::inc_gamma;

const MAX_SERIES_N: u64 = 1_000_000;

/// The integers `n ≥ 2` with a prime factor outside the product, ascending.
///
/// With no removed prime this is the set of `n` whose largest prime factor
/// exceeds `u`.
#[derive(Clone, Debug)]
pub struct RoughNumberStream {
    u: f64,
    removed: Option<u64>,
    cursor: u64,
}

impl RoughNumberStream {
    pub fn new(level: &TruncationLevel) -> Self {
        RoughNumberStream {
            u: level.u(),
            removed: level.removed(),
            cursor: 1,
        }
    }

    pub fn u(&self) -> f64 {
        self.u
    }

    /// Last value handed out (1 before the first call to `next`).
    pub fn cursor(&self) -> u64 {
        self.cursor
    }

    pub fn contains(&self, n: u64) -> bool {
        factorize(n)
            .iter()
            .any(|&(p, _)| p as f64 > self.u || Some(p) == self.removed)
    }
}

impl Iterator for RoughNumberStream {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        loop {
            self.cursor = self.cursor.checked_add(1)?;
            if self.contains(self.cursor) {
                return Some(self.cursor);
            }
        }
    }
}

/// `J(n) = J₁(n) + J₂(n)` with `x = n²π/q`,
/// `J₁ = χ(n) n^κ x^{-(κ+s₀)/2} Γ((κ+s₀)/2, x)` and
/// `J₂ = ε(χ) χ̄(n) n^κ x^{-(κ+1-s₀)/2} Γ((κ+1-s₀)/2, x)`.
pub fn j_term(n: u64, s0: &BigComplex, chi: &DirichletCharacter, prec: Precision) -> Result<BigComplex> {
    if n == 0 {
        return Err(Error::Domain("J(n) needs n >= 1".into()));
    }
    let wp = prec.raised(8);
    let w = wp.working();
    if chi.exponent(n as i64).is_none() {
        return Ok(BigComplex::zero(prec));
    }
    let q = chi.modulus();
    let kappa = chi.kappa() as f64;
    let s0 = s0.with_prec(wp);
    let x = Float::with_val(w, pi(wp) * (n * n)) / q;
    let nk = Float::with_val(w, if chi.kappa() == 1 { n } else { 1 });

    let z1 = s0.add_f64(kappa, 0.0).scale_f64(0.5);
    let z2 = (-&s0).add_f64(kappa + 1.0, 0.0).scale_f64(0.5);
    let j1 = &real_pow(&x, &-&z1)? * &inc_gamma(&z1, &x, wp)?;
    let j2 = &real_pow(&x, &-&z2)? * &inc_gamma(&z2, &x, wp)?;
    let chi_n = chi.eval(n as i64, wp);
    let total = &(&chi_n * &j1) + &(&(&chi.epsilon(wp) * &chi_n.conj()) * &j2);
    Ok(total.scale(&nk).with_prec(prec))
}

/// Bound on `Σ_{n > N} |J(n)|`.
///
/// Uses `x^{-σ} Γ(σ, x) ≤ c·x^{-1} e^{-x}` (with `c = 1` for `σ ≤ 1` and
/// `c = 1/(1 − (σ−1)/x)` otherwise) and compares the sum with
/// `∫_N^∞ t^{κ−2} e^{−πt²/q} dt = ½(q/π)^{(κ−1)/2} Γ((κ−1)/2, πN²/q)`.
/// Infinite while `x_N` is too small for the first inequality.
pub fn series_tail_bound(n_last: u64, s0: &BigComplex, chi: &DirichletCharacter) -> Result<f64> {
    if n_last == 0 {
        return Ok(f64::INFINITY);
    }
    let q = chi.modulus() as f64;
    let kappa = chi.kappa() as f64;
    let sigma0 = s0.re().to_f64();
    let x = std::f64::consts::PI * (n_last as f64).powi(2) / q;
    let c = |sigma: f64| -> f64 {
        if sigma <= 1.0 {
            1.0
        } else if x > 2.0 * (sigma - 1.0) {
            1.0 / (1.0 - (sigma - 1.0) / x)
        } else {
            f64::INFINITY
        }
    };
    let cs = c((kappa + sigma0) / 2.0) + c((kappa + 1.0 - sigma0) / 2.0);
    if !cs.is_finite() {
        return Ok(f64::INFINITY);
    }
    let lp = Precision::with_bits(64)?;
    let xf = Float::with_val(lp.working(), x);
    let g = inc_gamma(&BigComplex::from_f64((kappa - 1.0) / 2.0, 0.0, lp), &xf, lp)?;
    Ok(cs / 2.0 * (q / std::f64::consts::PI).powf((kappa + 1.0) / 2.0) * g.re().to_f64())
}

/// Partial sum of `Σ_{n ∈ A_u} J(n)`.
#[derive(Clone, Debug)]
pub struct SeriesSum {
    pub sum: BigComplex,
    pub tail_bound: f64,
    pub terms_used: usize,
    /// Largest `n` included.
    pub last_n: u64,
}

/// `Σ_{n ∈ A_u} J(n)` in ascending `n`, stopped once the analytic tail
/// bound is below `target_abs_err`.
pub fn theorem1_series(
    s0: &BigComplex,
    chi: &DirichletCharacter,
    t: &TruncationLevel,
    target_abs_err: f64,
    prec: Precision,
) -> Result<SeriesSum> {
    if !(target_abs_err > 0.0) {
        return Err(Error::Domain("series target must be positive".into()));
    }
    let mut sum = BigComplex::zero(prec);
    let mut terms_used = 0usize;
    let mut last_n = 1u64;
    let mut stream = RoughNumberStream::new(t);
    // Everything below the first rough number is excluded, so the tail
    // after n = first - 1 is the whole series.
    let mut tail = f64::INFINITY;
    while tail > target_abs_err {
        let n = stream
            .next()
            .filter(|&n| n <= MAX_SERIES_N)
            .ok_or_else(|| Error::PrecisionNotReached("J-series needs too many terms".into()))?;
        if chi.exponent(n as i64).is_some() {
            sum += &j_term(n, s0, chi, prec)?;
            terms_used += 1;
        }
        last_n = n;
        tail = series_tail_bound(n, s0, chi)?;
    }
    Ok(SeriesSum {
        sum,
        tail_bound: tail,
        terms_used,
        last_n,
    })
}

/// `ξ(s) ≈ ξ^≈_u(s) + Σ_{n ∈ A_u} J(n)` as an independent reconstruction.
pub fn theorem1_selfcheck(
    s: &BigComplex,
    chi: &DirichletCharacter,
    t: &TruncationLevel,
    prec: Precision,
) -> Result<BigComplex> {
    let approx = Approximant::new(chi, t, prec)?;
    theorem1_selfcheck_with(&approx, s)
}

/// As [`theorem1_selfcheck`] with a prebuilt approximant.
pub fn theorem1_selfcheck_with(approx: &Approximant, s: &BigComplex) -> Result<BigComplex> {
    let prec = approx.prec();
    let base = approx.xi_approx(s)?;
    let target = prec.target() * base.value.abs_f64().max(f64::MIN_POSITIVE) / 4.0;
    let series = theorem1_series(s, approx.character(), approx.level(), target, prec)?;
    Ok(&base.value + &series.sum)
}

/// `(q/π) Γ(0, πu²/q)` for odd characters, `√(q/π) Γ(−1/2, πu²/q)` for even.
pub fn corollary_bound(u: f64, q: u64, kappa: u8) -> Result<f64> {
    if !(u >= 2.0) {
        return Err(Error::Domain(format!("corollary bound needs u >= 2, got {u}")));
    }
    if kappa > 1 {
        return Err(Error::Domain(format!("parity must be 0 or 1, got {kappa}")));
    }
    let lp = Precision::with_bits(64)?;
    let qf = q as f64;
    let x = Float::with_val(lp.working(), std::f64::consts::PI * u * u / qf);
    let (z, scale) = if kappa == 1 {
        (0.0, qf / std::f64::consts::PI)
    } else {
        (-0.5, (qf / std::f64::consts::PI).sqrt())
    };
    let g = inc_gamma(&BigComplex::from_f64(z, 0.0, lp), &x, lp)?;
    Ok(scale * g.re().to_f64())
}

/// Smallest prime above `u` with `χ(p) ≠ 0`: the first prime whose factor is
/// actually missing from `L_u`.
pub fn next_effective_prime(u: f64, q: u64) -> u64 {
    let mut p = next_prime_after(u);
    while q % p == 0 {
        p = next_prime_after(p as f64);
    }
    p
}

/// Least-squares slope of `y` against `x`; `None` for fewer than two
/// distinct abscissae.
pub fn regression_slope(points: &[(f64, f64)]) -> Option<f64> {
    let n = points.len() as f64;
    if points.len() < 2 {
        return None;
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        None
    } else {
        Some(sxy / sxx)
    }
}

/// One cell of an error table.
#[derive(Clone, Debug)]
pub struct ErrorReport {
    pub s0: BigComplex,
    pub label: String,
    pub u: f64,
    /// `L(s₀, χ)` from the Hurwitz decomposition.
    pub l_value: BigComplex,
    /// `L^≈_u(s₀, χ)`.
    pub l_approx: BigComplex,
    /// `ξ(s₀) − ξ^≈_u(s₀)` by direct subtraction.
    pub exact_error: BigComplex,
    /// `Σ_{n ∈ A_u} J(n)`.
    pub series_error: BigComplex,
    pub series_tail_bound: f64,
    pub series_terms: usize,
    pub corollary_bound: f64,
    /// Estimated absolute error of `exact_error` itself.
    pub evaluation_slack: f64,
}

impl ErrorReport {
    /// `|L − L^≈_u|`.
    pub fn l_error(&self) -> f64 {
        self.l_value.dist(&self.l_approx)
    }

    /// `|(ξ − ξ^≈_u) − Σ J(n)|`.
    pub fn identity_residual(&self) -> f64 {
        self.exact_error.dist(&self.series_error)
    }
}

/// Error-table cell for `approx` at `s₀`.
pub fn error_report(approx: &Approximant, s0: &BigComplex) -> Result<ErrorReport> {
    let prec = approx.prec();
    let chi = approx.character();
    let s0 = s0.with_prec(prec);
    let g = gamma_factor(&s0, chi, prec).map_err(|_| {
        Error::Domain("error tables need s0 away from the gamma-factor poles".into())
    })?;
    let l_value = l_reference(&s0, chi, prec)?;
    let xi = &g * &l_value;
    let xa = approx.xi_approx(&s0)?;
    let exact_error = &xi - &xa.value;
    let slack = xa.est_err + prec.unit_roundoff() * 16.0 * xi.abs_f64();
    let target = (prec.target() * xi.abs_f64().max(1e-300)).max(f64::MIN_POSITIVE);
    let series = theorem1_series(&s0, chi, approx.level(), target, prec)?;
    let corollary = if approx.level().u() >= 2.0 {
        corollary_bound(approx.level().u(), chi.modulus(), chi.kappa())?
    } else {
        f64::INFINITY
    };
    Ok(ErrorReport {
        l_approx: &xa.value / &g,
        s0,
        label: chi.label(),
        u: approx.level().u(),
        l_value,
        exact_error,
        series_error: series.sum,
        series_tail_bound: series.tail_bound,
        series_terms: series.terms_used,
        corollary_bound: corollary,
        evaluation_slack: slack,
    })
}

/// Default half-height of the vertical integral: `g` decays like
/// `e^{−π|t|/4}`, and 20 extra bits of margin are added beyond `target`.
pub fn default_t_cut(s0: &BigComplex, target: f64) -> f64 {
    let bits = -target.log2() + 20.0;
    4.0 / std::f64::consts::PI * bits * std::f64::consts::LN_2 + s0.im().to_f64().abs()
}

/// `(1/2πi) ∫_{σ−iT}^{σ+iT} g(s)[(L−L_u)(s,χ)/(s−s₀) + ε(χ)(L−L_u)(s,χ̄)/(s−(1−s₀))] ds`.
///
/// `L − L_u` is taken as the Hurwitz value minus the truncated product. The
/// line is cut into panels of height at most 4.
pub fn theorem2_quadrature(
    s0: &BigComplex,
    chi: &DirichletCharacter,
    t: &TruncationLevel,
    sigma: f64,
    t_cut: f64,
    tol: f64,
    prec: Precision,
) -> Result<crate::numerics::quad::Quadrature> {
    if !(sigma > 1.0) {
        return Err(Error::Domain(format!("the integration line needs sigma > 1, got {sigma}")));
    }
    if !(t_cut > 0.0) {
        return Err(Error::Domain("T_cut must be positive".into()));
    }
    let w = prec.working();
    let s0 = s0.with_prec(prec);
    let s1 = (-&s0).add_f64(1.0, 0.0);
    let chi_bar = chi.conjugate();
    let real = chi_bar == *chi;
    let eps = chi.epsilon(prec);
    let two_pi = pi(prec) * 2u32;
    let diff = |s: &BigComplex, c: &DirichletCharacter| -> Result<BigComplex> {
        Ok(&l_reference(s, c, prec)? - &l_truncated(s, c, t, prec)?)
    };
    let integrand = |tt: &Float| -> Result<BigComplex> {
        let s = BigComplex::from_parts(Float::with_val(w, sigma), tt.clone(), prec);
        let d1 = diff(&s, chi)?;
        let d2 = if real { d1.clone() } else { diff(&s, &chi_bar)? };
        let bracket = &(&d1 / &(&s - &s0)) + &(&(&eps * &d2) / &(&s - &s1));
        Ok((&gamma_factor(&s, chi, prec)? * &bracket).div_real(&two_pi))
    };
    let panels = (2.0 * t_cut / 4.0).ceil().max(1.0) as u64;
    let width = Float::with_val(w, 2.0 * t_cut) / panels;
    let panel_tol = Tolerance::Absolute(tol / panels as f64);
    let mut value = BigComplex::zero(prec);
    let mut error_estimate = 0.0;
    let mut evaluations = 0;
    for k in 0..panels {
        let a = Float::with_val(w, -t_cut) + Float::with_val(w, &width * k);
        let b = Float::with_val(w, &a + &width);
        let part = tanh_sinh(integrand, &a, &b, prec, panel_tol)?;
        value += &part.value;
        error_estimate += part.error_estimate;
        evaluations += part.evaluations;
    }
    Ok(crate::numerics::quad::Quadrature {
        value,
        error_estimate,
        evaluations,
    })
}

/// `ξ(s₀) − ξ^≈_u(s₀)` by direct subtraction; a thin convenience wrapper.
pub fn exact_error(approx: &Approximant, s0: &BigComplex) -> Result<BigComplex> {
    let xi = xi_reference(s0, approx.character(), approx.prec())?;
    Ok(&xi - &approx.xi_approx(s0)?.value)
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

    #[test]
    fn rough_numbers() {
        let t = TruncationLevel::new(5.0).unwrap();
        let got: Vec<u64> = RoughNumberStream::new(&t).take(8).collect();
        assert_eq!(got, vec![7, 11, 13, 14, 17, 19, 21, 22]);
        let all: Vec<u64> = RoughNumberStream::new(&TruncationLevel::new(1.0).unwrap()).take(4).collect();
        assert_eq!(all, vec![2, 3, 4, 5]);
        let t3 = TruncationLevel::new(5.0).unwrap().without(3).unwrap();
        let s = RoughNumberStream::new(&t3);
        assert!(s.contains(3) && s.contains(12) && !s.contains(10));
    }

    #[test]
    fn j_vanishes_off_the_units() {
        let p = prec();
        let s0 = BigComplex::from_f64(0.5, 8.0, p);
        assert!(j_term(10, &s0, &chi(5, 4), p).unwrap().is_zero());
        assert!(!j_term(7, &s0, &chi(5, 4), p).unwrap().is_zero());
    }

    #[test]
    fn series_equals_direct_subtraction() {
        let p = prec();
        for (q, n, u, im) in [(5u64, 4i64, 5.0, 8.0), (8, 5, 7.0, 10.0), (7, 6, 11.0, 12.0), (5, 2, 3.0, 9.0)] {
            let c = chi(q, n);
            let a = Approximant::new(&c, &TruncationLevel::new(u).unwrap(), p).unwrap();
            let r = error_report(&a, &BigComplex::from_f64(0.5, im, p)).unwrap();
            assert!(
                r.identity_residual() <= r.series_tail_bound + r.evaluation_slack + 1e-60,
                "{q}.{n} u={u}: {}",
                r.identity_residual()
            );
            assert!(r.exact_error.abs_f64() <= 10.0 * r.corollary_bound);
        }
    }

    #[test]
    fn first_term_dominates_at_large_u() {
        let p = prec();
        let c = chi(5, 4);
        let s0 = BigComplex::from_f64(0.5, 8.0, p);
        let t = TruncationLevel::new(11.0).unwrap();
        let series = theorem1_series(&s0, &c, &t, 1e-70, p).unwrap();
        let first = j_term(13, &s0, &c, p).unwrap();
        assert!(series.sum.dist(&first) / series.sum.abs_f64() < 1e-3);
    }

    #[test]
    fn level_one_uses_every_n() {
        let p = prec();
        let c = chi(7, 6);
        let t = TruncationLevel::new(1.0).unwrap();
        let a = Approximant::new(&c, &t, p).unwrap();
        let s0 = BigComplex::from_f64(0.5, 3.0, p);
        let series = theorem1_series(&s0, &c, &t, 1e-60, p).unwrap();
        let exact = exact_error(&a, &s0).unwrap();
        assert!(exact.dist(&series.sum) < 1e-55);
    }

    #[test]
    fn selfcheck_agrees_across_levels() {
        let p = prec();
        let c = chi(8, 5);
        let s = BigComplex::from_f64(0.5, 11.0, p);
        let a3 = theorem1_selfcheck(&s, &c, &TruncationLevel::new(3.0).unwrap(), p).unwrap();
        let a7 = theorem1_selfcheck(&s, &c, &TruncationLevel::new(7.0).unwrap(), p).unwrap();
        let h = xi_reference(&s, &c, p).unwrap();
        assert!(nearly_equal(&a3, &a7, 200));
        assert!(nearly_equal(&a3, &h, 200));
    }

    #[test]
    fn corollary_bound_values() {
        // √(5/π) Γ(−1/2, 5π), evaluated independently as
        // 2√(5/π)(e^{−x}/√x − √π erfc(√x)) with x = 5π.
        let x = 5.0 * std::f64::consts::PI;
        let erfc = Float::with_val(128, x.sqrt()).erfc().to_f64();
        let expect = 2.0 * (5.0 / std::f64::consts::PI).sqrt()
            * ((-x).exp() / x.sqrt() - std::f64::consts::PI.sqrt() * erfc);
        let got = corollary_bound(5.0, 5, 0).unwrap();
        assert!((got / expect - 1.0).abs() < 1e-12, "{got} vs {expect}");
        // (7/π) E₁(25π/7)
        let y = 25.0 * std::f64::consts::PI / 7.0;
        let e1 = Float::with_val(128, -y).eint().to_f64().abs();
        let got = corollary_bound(5.0, 7, 1).unwrap();
        assert!((got / (7.0 / std::f64::consts::PI * e1) - 1.0).abs() < 1e-12);
        for (q, k) in [(5, 0), (7, 1), (8, 1)] {
            let b: Vec<f64> = [2.0, 3.0, 5.0, 7.0, 11.0].iter().map(|&u| corollary_bound(u, q, k).unwrap()).collect();
            assert!(b.windows(2).all(|w| w[1] < w[0]));
        }
        assert!(corollary_bound(1.5, 5, 0).is_err());
    }

    #[test]
    fn effective_next_prime_skips_the_modulus() {
        assert_eq!(next_effective_prime(5.0, 7), 11);
        assert_eq!(next_effective_prime(5.0, 5), 7);
        assert_eq!(next_effective_prime(7.0, 8), 11);
    }

    #[test]
    fn vertical_integral_matches_series() {
        let p = Precision::with_bits(96).unwrap();
        let c = chi(5, 4);
        let t = TruncationLevel::new(3.0).unwrap();
        let s0 = BigComplex::from_f64(0.5, 8.0, p);
        let series = theorem1_series(&s0, &c, &t, 1e-20, p).unwrap();
        let t_cut = default_t_cut(&s0, 1e-12);
        let q = theorem2_quadrature(&s0, &c, &t, 2.0, t_cut, 1e-12, p).unwrap();
        assert!(q.value.dist(&series.sum) < 1e-8, "{} vs {}", q.value, series.sum);
    }

    #[test]
    fn slope_of_a_line() {
        let pts = [(0.0, 1.0), (1.0, 3.0), (2.0, 5.0)];
        assert!((regression_slope(&pts).unwrap() - 2.0).abs() < 1e-12);
        assert!(regression_slope(&[(1.0, 1.0), (1.0, 2.0)]).is_none());
    }
}
