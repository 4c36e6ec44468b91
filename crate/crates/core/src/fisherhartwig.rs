//! Hankel (Jacobi weight) and Toeplitz determinants with algebraic
//! singularities in the symbol, their Fisher–Hartwig type asymptotes, and
//! drift tables comparing the two.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::exact::{ln_selberg, selberg_barnes, EnsembleParams};
use crate::heine::heine_average;
use crate::linalg::log_det_complex;
use crate::quadrature::{
    cached_jacobi, gauss_rule, power_to_chebyshev_u, principal_value_airfoil, RuleKind,
};
use crate::specfun::lbarnes;

/// Regular part of the symbol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SmoothPart {
    /// h(x) = Σ_k c_k x^k on [0, 1], constant term first.
    Polynomial(Vec<f64>),
    /// g(θ) = g_0 + 2 Σ_{p≥1} g_p cos pθ, so g_{−p} = g_p; entries are g_0, g_1, ….
    Fourier(Vec<f64>),
}

/// A symbol e^{smooth} ∏_r |singularity_r|^{2·strength_r}. Jump
/// discontinuities are not represented (their strengths are zero).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolSpec {
    pub smooth: SmoothPart,
    /// (y_r, q_r) for Jacobi symbols, (φ_r, a_r) for Toeplitz symbols.
    pub singularities: Vec<(f64, f64)>,
}

impl SymbolSpec {
    pub fn jacobi(h: Vec<f64>, singularities: Vec<(f64, f64)>) -> Result<Self> {
        for &(y, _) in &singularities {
            if !(y > 0.0 && y < 1.0) {
                return Err(domain("SymbolSpec", format!("location {y} outside (0,1)")));
            }
        }
        let s = SymbolSpec {
            smooth: SmoothPart::Polynomial(h),
            singularities,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn toeplitz(g: Vec<f64>, singularities: Vec<(f64, f64)>) -> Result<Self> {
        for &(phi, _) in &singularities {
            if !(phi > -PI && phi <= PI) {
                return Err(domain("SymbolSpec", format!("angle {phi} outside (−π, π]")));
            }
        }
        let s = SymbolSpec {
            smooth: SmoothPart::Fourier(g),
            singularities,
        };
        s.validate()?;
        Ok(s)
    }

    fn validate(&self) -> Result<()> {
        for (i, &(loc, strength)) in self.singularities.iter().enumerate() {
            if !(strength > 0.0) || !strength.is_finite() {
                return Err(domain("SymbolSpec", format!("strength {strength} must be positive")));
            }
            if self.singularities[..i].iter().any(|s| s.0 == loc) {
                return Err(domain("SymbolSpec", format!("duplicate location {loc}")));
            }
        }
        let coeffs = match &self.smooth {
            SmoothPart::Polynomial(c) | SmoothPart::Fourier(c) => c,
        };
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(domain("SymbolSpec", "non-finite smooth coefficient"));
        }
        Ok(())
    }

    fn total_strength(&self) -> f64 {
        self.singularities.iter().map(|s| s.1).sum()
    }

    fn polynomial(&self, op: &'static str) -> Result<&[f64]> {
        match &self.smooth {
            SmoothPart::Polynomial(c) => Ok(c),
            SmoothPart::Fourier(_) => Err(domain(op, "expected a polynomial smooth part")),
        }
    }

    fn fourier(&self, op: &'static str) -> Result<&[f64]> {
        match &self.smooth {
            SmoothPart::Fourier(c) => Ok(c),
            SmoothPart::Polynomial(_) => Err(domain(op, "expected Fourier coefficients")),
        }
    }
}

fn poly_eval(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ck| acc * x + ck)
}

fn poly_derivative(c: &[f64]) -> Vec<f64> {
    c.iter().enumerate().skip(1).map(|(k, &ck)| k as f64 * ck).collect()
}

fn fourier_eval(g: &[f64], theta: f64) -> f64 {
    g.iter()
        .enumerate()
        .map(|(p, &gp)| if p == 0 { gp } else { 2.0 * gp * (p as f64 * theta).cos() })
        .sum()
}

/// ln|D| with sign; `size` is the matrix dimension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeterminantValue {
    pub log_abs: f64,
    pub sign: i8,
    pub size: usize,
}

/// H_n[f] = ∫…∫ ∏ f(x_l) x_l^{λ1}(1−x_l)^{λ2} Δ² for f = e^{h} ∏|y_r − x|^{2q_r}.
///
/// Evaluated as n! ∏h_k · det[∫ p_j p_k f w] in the orthonormal basis of the
/// weight; the singular factors are absorbed by Gauss–Jacobi panels split at
/// each y_r.
pub fn hankel_determinant(params: &EnsembleParams, symbol: &SymbolSpec, n: usize) -> Result<DeterminantValue> {
    params.validate("hankel_determinant")?;
    let h = symbol.polynomial("hankel_determinant")?.to_vec();
    let sing: Vec<(f64, f64)> = symbol.singularities.iter().map(|&(y, q)| (y, 2.0 * q)).collect();
    let avg = heine_average(params.lambda1, params.lambda2, n, &|x| poly_eval(&h, x).exp(), &sing, 2 * h.len(), 1e-12)?;
    if avg.is_zero() {
        return Err(Error::Determinant("determinant underflow".into()));
    }
    Ok(DeterminantValue {
        log_abs: ln_selberg(n, params.lambda1, params.lambda2) + avg.log_abs,
        sign: avg.sign,
        size: n,
    })
}

/// ln H_n[f] / H_n[1].
pub fn jacobi_ratio_literal(params: &EnsembleParams, symbol: &SymbolSpec, n: usize) -> Result<f64> {
    Ok(hankel_determinant(params, symbol, n)?.log_abs - ln_selberg(n, params.lambda1, params.lambda2))
}

/// ln of ∏_r y_r^{λ1 q_r}(1−y_r)^{λ2 q_r} · H_n[f] / H_{n+Q}[1], Q = Σ q_r,
/// with H_{n+Q}[1] continued to real size through the Barnes G form.
pub fn jacobi_ratio_balanced(params: &EnsembleParams, symbol: &SymbolSpec, n: usize) -> Result<f64> {
    let (l1, l2) = (params.lambda1, params.lambda2);
    let pref: f64 = symbol
        .singularities
        .iter()
        .map(|&(y, q)| q * (l1 * y.ln() + l2 * (1.0 - y).ln()))
        .sum();
    let hn = hankel_determinant(params, symbol, n)?.log_abs;
    Ok(pref + hn - selberg_barnes(n as f64 + symbol.total_strength(), l1, l2)?)
}

/// (1/4π²) ∫₀¹ h(x)/√(x(1−x)) PV∫₀¹ h'(y)√(y(1−y))/(x−y) dy dx for polynomial h.
fn smooth_double_integral(h: &[f64]) -> Result<f64> {
    let dh = poly_derivative(h);
    if dh.is_empty() {
        return Ok(0.0);
    }
    let u = power_to_chebyshev_u(&dh);
    // the integrand is polynomial in x against the arcsine weight
    let order = h.len() + u.len() + 2;
    let rule = gauss_rule(RuleKind::Jacobi { alpha: -0.5, beta: -0.5 }, order)?.on_interval(0.0, 1.0);
    let mut acc = 0.0;
    for (x, w) in rule.nodes.iter().zip(&rule.weights) {
        acc += w * poly_eval(h, *x) * principal_value_airfoil(&u, *x)?;
    }
    Ok(acc / (4.0 * PI * PI))
}

/// ln of the conjectured large-n value of H_n[e^h ∏|y_r−x|^{2q_r}] / H_n[1]:
/// exp[(n+Q+(λ1+λ2)/2)/π ∫h/√(x(1−x))] (2n)^{Σ(q_r²−q_r)} K.
pub fn jacobi_fh_asymptote(params: &EnsembleParams, symbol: &SymbolSpec, n: usize) -> Result<f64> {
    params.validate("jacobi_fh_asymptote")?;
    let h = symbol.polynomial("jacobi_fh_asymptote")?;
    let (l1, l2) = (params.lambda1, params.lambda2);
    let q_total = symbol.total_strength();
    let nf = n as f64;
    // (1/π)∫₀¹ x^k /√(x(1−x)) dx = (1/2)_k / k!
    let mut mean_h = 0.0;
    let mut c = 1.0;
    for (k, &hk) in h.iter().enumerate() {
        if k > 0 {
            c *= (k as f64 - 0.5) / k as f64;
        }
        mean_h += hk * c;
    }
    let mut log_k = -(l1 + l2) * (poly_eval(h, 0.0) + poly_eval(h, 1.0)) / 4.0 + smooth_double_integral(h)?;
    let sing = &symbol.singularities;
    for (i, &(y, q)) in sing.iter().enumerate() {
        for &(z, p) in &sing[..i] {
            log_k -= 2.0 * q * p * (y - z).abs().ln();
        }
        log_k += -q * poly_eval(h, y) - 0.5 * q * q * (y * (1.0 - y)).ln();
        log_k += -q * PI.ln() + 2.0 * lbarnes(q + 1.0) - lbarnes(2.0 * q + 1.0);
    }
    let growth: f64 = sing.iter().map(|&(_, q)| q * q - q).sum::<f64>() * (2.0 * nf).ln();
    Ok((nf + q_total + 0.5 * (l1 + l2)) * mean_h + growth + log_k)
}

/// Quadrature nodes and weights on one period carrying
/// ∏_r |e^{iθ} − e^{iφ_r}|^{2a_r}; panels are split at each φ_r.
fn circle_rule(sing: &[(f64, f64)], order: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if sing.is_empty() {
        let r = gauss_rule(RuleKind::PeriodicTrapezoid, order)?;
        return Ok((r.nodes, r.weights));
    }
    let mut s = sing.to_vec();
    s.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    for i in 0..s.len() {
        let (lo, e_lo) = s[i];
        let (hi, e_hi) = if i + 1 < s.len() { s[i + 1] } else { (s[0].0 + 2.0 * PI, s[0].1) };
        let base = cached_jacobi(2.0 * e_hi, 2.0 * e_lo, order).on_interval(lo, hi);
        for (t, w) in base.nodes.iter().zip(&base.weights) {
            // the panel rule carries (hi−θ)^{2a_hi}(θ−lo)^{2a_lo}; swap in the chord lengths
            let mut factor = (hi - t).powf(-2.0 * e_hi) * (t - lo).powf(-2.0 * e_lo);
            for &(phi, a) in &s {
                factor *= (2.0 * (0.5 * (t - phi)).sin()).abs().powf(2.0 * a);
            }
            nodes.push(*t);
            weights.push(w * factor);
        }
    }
    Ok((nodes, weights))
}

/// Fourier coefficients a_p, |p| < size, of e^{g(θ)} ∏|e^{iθ}−e^{iφ_r}|^{2a_r}.
fn toeplitz_coefficients(g: &[f64], sing: &[(f64, f64)], size: usize, order: usize) -> Result<Vec<Complex64>> {
    let (nodes, weights) = circle_rule(sing, order)?;
    let vals: Vec<f64> = nodes
        .iter()
        .zip(&weights)
        .map(|(t, w)| w * fourier_eval(g, *t).exp() / (2.0 * PI))
        .collect();
    let mut out = Vec::with_capacity(2 * size - 1);
    for p in -(size as i64 - 1)..(size as i64) {
        let mut acc = Complex64::new(0.0, 0.0);
        for (t, v) in nodes.iter().zip(&vals) {
            acc += Complex64::from_polar(*v, -(p as f64) * t);
        }
        out.push(acc);
    }
    Ok(out)
}

/// D_N = det[a_{i−j}] for the symbol e^{g(θ)} ∏|e^{iθ}−e^{iφ_r}|^{2a_r}.
pub fn toeplitz_determinant(symbol: &SymbolSpec, size: usize) -> Result<DeterminantValue> {
    let g = symbol.fourier("toeplitz_determinant")?;
    if size == 0 {
        return Ok(DeterminantValue {
            log_abs: 0.0,
            sign: 1,
            size,
        });
    }
    let sing = &symbol.singularities;
    let mut order = 2 * size + 2 * g.len() + 32;
    let mut prev = toeplitz_coefficients(g, sing, size, order)?;
    let coeffs = loop {
        order *= 2;
        let cur = toeplitz_coefficients(g, sing, size, order)?;
        let scale = cur.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let gap = cur.iter().zip(&prev).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        if gap <= 1e-14 * scale {
            break cur;
        }
        if order > 8192 {
            return Err(Error::Quadrature { best: cur[size - 1].re, gap });
        }
        prev = cur;
    };
    let m = DMatrix::from_fn(size, size, |i, j| coeffs[size - 1 + i - j]);
    let (log_abs, phase) = log_det_complex(&m)?;
    // the symbol is real and nonnegative, so D_N is real and positive
    if phase.abs() > 1e-6 {
        return Err(Error::Determinant(format!("determinant phase {phase} for a positive symbol")));
    }
    Ok(DeterminantValue { log_abs, sign: 1, size })
}

/// ln of g_0 N + Σ a_r² ln N + ln E for the zero-only (b_r = 0) symbol.
pub fn toeplitz_fh_asymptote(symbol: &SymbolSpec, size: usize) -> Result<f64> {
    let g = symbol.fourier("toeplitz_fh_asymptote")?;
    let nf = size as f64;
    let g0 = g.first().copied().unwrap_or(0.0);
    let mut log_e: f64 = g.iter().enumerate().skip(1).map(|(k, gk)| k as f64 * gk * gk).sum();
    let sing = &symbol.singularities;
    let mut sq = 0.0;
    for (i, &(phi, a)) in sing.iter().enumerate() {
        sq += a * a;
        log_e -= a * (fourier_eval(g, phi) - g0);
        for &(psi, b) in &sing[..i] {
            log_e -= 2.0 * a * b * (2.0 * (0.5 * (phi - psi)).sin()).abs().ln();
        }
        log_e += 2.0 * lbarnes(1.0 + a) - lbarnes(1.0 + 2.0 * a);
    }
    Ok(g0 * nf + sq * nf.ln() + log_e)
}

/// One size of a drift table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriftRow {
    pub n: usize,
    pub exact_log: f64,
    pub predicted_log: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftReport {
    pub rows: Vec<DriftRow>,
    /// |δ| strictly decreasing over the last three sizes
    pub decreasing_tail: bool,
    /// |δ| strictly decreasing over every size
    pub decreasing_all: bool,
    pub final_abs_delta: f64,
}

/// Tabulate δ_n = ln exact − ln predicted.
pub fn fh_drift_report(exact_series: &[(usize, f64)], predicted: &[f64]) -> Result<DriftReport> {
    if exact_series.len() < 4 {
        return Err(domain("fh_drift_report", format!("{} sizes (need at least 4)", exact_series.len())));
    }
    if exact_series.len() != predicted.len() {
        return Err(domain("fh_drift_report", "exact and predicted series differ in length"));
    }
    let rows: Vec<DriftRow> = exact_series
        .iter()
        .zip(predicted)
        .map(|(&(n, e), &p)| DriftRow {
            n,
            exact_log: e,
            predicted_log: p,
            delta: e - p,
        })
        .collect();
    let abs: Vec<f64> = rows.iter().map(|r| r.delta.abs()).collect();
    let decreasing = |v: &[f64]| v.windows(2).all(|w| w[1] < w[0]);
    Ok(DriftReport {
        decreasing_tail: decreasing(&abs[abs.len() - 3..]),
        decreasing_all: decreasing(&abs),
        final_abs_delta: *abs.last().unwrap(),
        rows,
    })
}

/// Drift of the charge-balanced Jacobi ratio against [`jacobi_fh_asymptote`].
pub fn jacobi_drift(params: &EnsembleParams, symbol: &SymbolSpec, sizes: &[usize]) -> Result<DriftReport> {
    let mut exact = Vec::with_capacity(sizes.len());
    let mut pred = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let p = params.with_n(n);
        exact.push((n, jacobi_ratio_balanced(&p, symbol, n)?));
        pred.push(jacobi_fh_asymptote(&p, symbol, n)?);
    }
    fh_drift_report(&exact, &pred)
}

/// Drift of ln D_N against [`toeplitz_fh_asymptote`].
pub fn toeplitz_drift(symbol: &SymbolSpec, sizes: &[usize]) -> Result<DriftReport> {
    let mut exact = Vec::with_capacity(sizes.len());
    let mut pred = Vec::with_capacity(sizes.len());
    for &n in sizes {
        exact.push((n, toeplitz_determinant(symbol, n)?.log_abs));
        pred.push(toeplitz_fh_asymptote(symbol, n)?);
    }
    fh_drift_report(&exact, &pred)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::averages::average_even_power_heine;
    use crate::exact::{asymptotic_partition_ratio, selberg_closed};
    use approx::assert_relative_eq;

    fn p(n: usize, a: f64, b: f64) -> EnsembleParams {
        EnsembleParams::jue(n, a, b).unwrap()
    }

    #[test]
    fn hankel_without_singularities_is_selberg() {
        let flat = SymbolSpec::jacobi(vec![], vec![]).unwrap();
        for (a, b) in [(0.5, 0.5), (-0.5, 0.5), (1.0, 2.0)] {
            for n in 1..=10 {
                let d = hankel_determinant(&p(n, a, b), &flat, n).unwrap();
                let s = selberg_closed(&p(n, a, b)).unwrap();
                assert_relative_eq!(d.log_abs, s.log_abs, max_relative = 1e-9, epsilon = 1e-9);
            }
        }
        // n = 1 is the single moment ∫ x^{1/2}(1−x)^{1/2} = π/8
        let d = hankel_determinant(&p(1, 0.5, 0.5), &flat, 1).unwrap();
        assert_relative_eq!(d.log_abs.exp(), PI / 8.0, max_relative = 1e-12);
    }

    #[test]
    fn hankel_matches_even_power_route() {
        let sym = SymbolSpec::jacobi(vec![], vec![(0.5, 1.0)]).unwrap();
        for n in [1, 4, 10] {
            let pp = p(n, 0.5, 0.5);
            let h = hankel_determinant(&pp, &sym, n).unwrap().log_abs;
            let e = average_even_power_heine(&pp, 0.5, 2).unwrap().log_abs + ln_selberg(n, 0.5, 0.5);
            assert_relative_eq!(h.exp(), e.exp(), max_relative = 1e-9);
        }
    }

    #[test]
    fn reflection_symmetry() {
        let a = SymbolSpec::jacobi(vec![0.0, 0.3], vec![(0.3, 0.5)]).unwrap();
        // h(x) = 0.3x becomes 0.3(1−x)
        let b = SymbolSpec::jacobi(vec![0.3, -0.3], vec![(0.7, 0.5)]).unwrap();
        let n = 6;
        let da = hankel_determinant(&p(n, 0.5, 1.5), &a, n).unwrap();
        let db = hankel_determinant(&p(n, 1.5, 0.5), &b, n).unwrap();
        assert_relative_eq!(da.log_abs, db.log_abs, max_relative = 1e-10);
    }

    #[test]
    fn asymptote_special_cases() {
        let pp = p(10, 0.5, 0.5);
        let empty = SymbolSpec::jacobi(vec![], vec![]).unwrap();
        assert_eq!(jacobi_fh_asymptote(&pp, &empty, 10).unwrap(), 0.0);

        let half = SymbolSpec::jacobi(vec![], vec![(0.5, 0.5)]).unwrap();
        let k = (2.0 * lbarnes(1.5) - lbarnes(2.0)).exp() / PI.sqrt() * 0.25f64.powf(-0.125);
        let want = k.ln() + (0.25 - 0.5) * 20f64.ln();
        assert_relative_eq!(jacobi_fh_asymptote(&pp, &half, 10).unwrap(), want, max_relative = 1e-13);

        // constant h = c with one charge q at y
        let (c, q, y) = (0.7, 0.5, 0.3);
        let sym = SymbolSpec::jacobi(vec![c], vec![(y, q)]).unwrap();
        let base = SymbolSpec::jacobi(vec![], vec![(y, q)]).unwrap();
        let n = 10.0;
        let diff = jacobi_fh_asymptote(&pp, &sym, 10).unwrap() - jacobi_fh_asymptote(&pp, &base, 10).unwrap();
        assert_relative_eq!(diff, c * (n + q + 0.5) - 0.5 * c - q * c, max_relative = 1e-13);
    }

    #[test]
    fn unit_charge_asymptote_is_partition_asymptote() {
        for (n, t) in [(3, 0.2), (10, 0.5), (17, 0.9), (40, 0.33), (64, 0.61)] {
            let pp = p(n, 0.5, 0.5);
            let sym = SymbolSpec::jacobi(vec![], vec![(t, 1.0)]).unwrap();
            assert_relative_eq!(
                jacobi_fh_asymptote(&pp, &sym, n).unwrap(),
                asymptotic_partition_ratio(n, 1.0, t, &pp).unwrap().ln(),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn smooth_term_against_brute_force() {
        // h(x) = x: the double integral is 1/32
        assert_relative_eq!(smooth_double_integral(&[0.0, 1.0]).unwrap(), 1.0 / 32.0, max_relative = 1e-13);
    }

    #[test]
    fn smooth_symbol_drift() {
        // no singularities: the balanced and literal ratios coincide
        let h = vec![0.1, 0.4, -0.3];
        let sym = SymbolSpec::jacobi(h.clone(), vec![]).unwrap();
        let r = jacobi_drift(&p(8, 0.5, 0.5), &sym, &[8, 16, 24, 32]).unwrap();
        assert!(r.final_abs_delta < 1e-6, "{r:?}");
        // unequal exponents: the endpoint factor misses (λ1−λ2)(h(1)−h(0))/4
        let (l1, l2) = (0.5, 1.0);
        let r = jacobi_drift(&p(8, l1, l2), &sym, &[8, 16, 24, 32]).unwrap();
        let offset = (l1 - l2) * (poly_eval(&h, 1.0) - poly_eval(&h, 0.0)) / 4.0;
        assert!((r.rows[3].delta - offset).abs() < 5e-4, "{r:?}");
    }

    #[test]
    fn jacobi_half_charge_drift() {
        let sym = SymbolSpec::jacobi(vec![], vec![(0.5, 0.5)]).unwrap();
        let r = jacobi_drift(&p(8, 0.5, 0.5), &sym, &[8, 16, 32, 48]).unwrap();
        assert!(r.decreasing_all, "{r:?}");
        // the ratio normalized by H_n[1] alone drifts away linearly
        let lit: Vec<f64> = [8, 16, 32, 48]
            .iter()
            .map(|&n| {
                let pp = p(n, 0.5, 0.5);
                jacobi_ratio_literal(&pp, &sym, n).unwrap() - jacobi_fh_asymptote(&pp, &sym, n).unwrap()
            })
            .collect();
        assert!(lit.windows(2).all(|w| w[1].abs() > w[0].abs()));
    }

    #[test]
    fn toeplitz_trivial_and_szego() {
        let one = SymbolSpec::toeplitz(vec![], vec![]).unwrap();
        assert!(toeplitz_determinant(&one, 12).unwrap().log_abs.abs() < 1e-13);
        let g = SymbolSpec::toeplitz(vec![0.0, 0.5], vec![]).unwrap();
        let d = toeplitz_determinant(&g, 20).unwrap().log_abs;
        assert_relative_eq!(d, 0.25, max_relative = 1e-10);
        assert_relative_eq!(toeplitz_fh_asymptote(&g, 20).unwrap(), 0.25, max_relative = 1e-14);
    }

    #[test]
    fn toeplitz_single_zero() {
        // a = 1: |1 − e^{iθ}|² = 2 − 2cos θ has D_N = N + 1
        let s = SymbolSpec::toeplitz(vec![], vec![(0.0, 1.0)]).unwrap();
        for n in [1, 5, 17] {
            assert_relative_eq!(
                toeplitz_determinant(&s, n).unwrap().log_abs,
                (n as f64 + 1.0).ln(),
                max_relative = 1e-11
            );
        }
        let half = SymbolSpec::toeplitz(vec![], vec![(0.0, 0.5)]).unwrap();
        let r = toeplitz_drift(&half, &[8, 16, 32, 48]).unwrap();
        assert!(r.decreasing_all && r.final_abs_delta <= 0.02, "{r:?}");
    }

    #[test]
    fn toeplitz_rotation_invariance() {
        let a = SymbolSpec::toeplitz(vec![], vec![(0.0, 0.5), (2.0, 0.25)]).unwrap();
        let b = SymbolSpec::toeplitz(vec![], vec![(0.7, 0.5), (2.7, 0.25)]).unwrap();
        let da = toeplitz_determinant(&a, 16).unwrap().log_abs;
        let db = toeplitz_determinant(&b, 16).unwrap().log_abs;
        assert!((da - db).abs() < 1e-10 * da.abs().max(1.0));
    }

    #[test]
    fn drift_report_rules() {
        let exact = [(4, 1.0), (8, 1.0), (16, 1.0), (32, 1.0)];
        let r = fh_drift_report(&exact, &[1.0; 4]).unwrap();
        assert!(r.rows.iter().all(|x| x.delta == 0.0));
        assert!(fh_drift_report(&exact[..3], &[1.0; 3]).is_err());
    }
}
