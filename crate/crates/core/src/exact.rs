//! Closed forms (Selberg, Morris, Mehta), the duality constant, and the
//! large-n asymptotic formulas.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::specfun::{lbarnes, lgamma, log_gamma_signed, LogMagnitude};

const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// A Jacobi-type ensemble x^{λ1}(1−x)^{λ2} ∏|x_k − x_j|^{2/λ} on [0,1]^n.
/// Only λ = 1 is implemented anywhere in this crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleParams {
    pub n: usize,
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda: f64,
}

impl EnsembleParams {
    /// λ = 1 ensemble; validates the exponents.
    pub fn jue(n: usize, lambda1: f64, lambda2: f64) -> Result<Self> {
        let p = EnsembleParams {
            n,
            lambda1,
            lambda2,
            lambda: 1.0,
        };
        p.validate("EnsembleParams")?;
        Ok(p)
    }

    /// Circular-ensemble coupling 2/λ.
    pub fn beta(&self) -> f64 {
        2.0 / self.lambda
    }

    pub fn with_n(self, n: usize) -> Self {
        EnsembleParams { n, ..self }
    }

    pub(crate) fn validate(&self, op: &'static str) -> Result<()> {
        if self.n == 0 {
            return Err(domain(op, "n must be positive"));
        }
        if !(self.lambda1 > -1.0 && self.lambda2 > -1.0) {
            return Err(domain(
                op,
                format!("λ1 = {}, λ2 = {} must exceed −1", self.lambda1, self.lambda2),
            ));
        }
        if self.lambda != 1.0 {
            return Err(domain(op, format!("only λ = 1 is supported (got {})", self.lambda)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MorrisParams {
    pub n: usize,
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Dirichlet,
    Neumann,
}

/// Density-matrix evaluation point for a gas of N+1 particles on [0, L].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityMatrixQuery {
    pub n: usize,
    pub l: f64,
    pub x: f64,
    pub y: f64,
    pub boundary: Boundary,
}

impl DensityMatrixQuery {
    pub fn new(n: usize, x: f64, y: f64, boundary: Boundary) -> Self {
        DensityMatrixQuery {
            n,
            l: 1.0,
            x,
            y,
            boundary,
        }
    }

    /// ρ = N/L.
    pub fn rho(&self) -> f64 {
        self.n as f64 / self.l
    }

    pub(crate) fn validate(&self, op: &'static str) -> Result<()> {
        if self.n == 0 {
            return Err(domain(op, "N must be positive"));
        }
        if !(self.l > 0.0) {
            return Err(domain(op, format!("L = {} must be positive", self.l)));
        }
        for v in [self.x, self.y] {
            if !(v > 0.0 && v < 1.0) {
                return Err(domain(op, format!("coordinate {v} outside (0,1)")));
            }
        }
        Ok(())
    }
}

/// ln S_n(a, b, 1) as a plain float (a, b > −1 assumed).
pub(crate) fn ln_selberg(n: usize, a: f64, b: f64) -> f64 {
    (0..n)
        .map(|j| {
            let j = j as f64;
            lgamma(a + 1.0 + j) + lgamma(b + 1.0 + j) + lgamma(2.0 + j) - lgamma(a + b + 1.0 + n as f64 + j)
        })
        .sum()
}

/// Selberg integral S_n(λ1, λ2, 1).
pub fn selberg_closed(params: &EnsembleParams) -> Result<LogMagnitude> {
    params.validate("selberg_closed")?;
    Ok(LogMagnitude::from_log(ln_selberg(
        params.n,
        params.lambda1,
        params.lambda2,
    )))
}

/// ln S_n(a, b, 1) continued to real n ≥ 0 through Barnes G:
/// G(n+1+a)G(n+1+b)G(n+1+a+b)G(n+2) / (G(1+a)G(1+b)G(2n+1+a+b)).
pub fn selberg_barnes(n: f64, a: f64, b: f64) -> Result<f64> {
    if !(n >= 0.0) || !(a > -1.0 && b > -1.0) {
        return Err(domain("selberg_barnes", format!("n = {n}, a = {a}, b = {b}")));
    }
    if n == 0.0 {
        return Ok(0.0);
    }
    Ok(lbarnes(n + 1.0 + a) - lbarnes(1.0 + a) + lbarnes(n + 1.0 + b) - lbarnes(1.0 + b)
        + lbarnes(n + 1.0 + a + b)
        - lbarnes(2.0 * n + 1.0 + a + b)
        + lbarnes(n + 2.0))
}

/// Morris integral M_n(a, b, 1) = (2π)^{−n} ∫ ∏ z_l^{(a−b)/2}|1+z_l|^{a+b} |Δ(z)|² dθ.
pub fn morris_closed(p: &MorrisParams) -> Result<LogMagnitude> {
    if !(p.a + p.b > -1.0) {
        return Err(domain("morris_closed", format!("a + b = {} must exceed −1", p.a + p.b)));
    }
    let mut acc = LogMagnitude::ONE;
    for j in 0..p.n {
        let j = j as f64;
        let num = LogMagnitude::from_log(lgamma(p.a + p.b + 1.0 + j) + lgamma(2.0 + j));
        let (da, db) = (p.a + 1.0 + j, p.b + 1.0 + j);
        // 1/Γ at a pole is zero
        if (da <= 0.0 && da.fract() == 0.0) || (db <= 0.0 && db.fract() == 0.0) {
            return Ok(LogMagnitude::ZERO);
        }
        acc = acc * num / (log_gamma_signed(da)? * log_gamma_signed(db)?);
    }
    Ok(acc)
}

/// Mehta volume V_{m/2} = (2π)^{m/4} G(m/2 + 2), m = 2·m_half.
pub fn mehta_volume(m_half: usize) -> Result<LogMagnitude> {
    if m_half == 0 {
        return Err(domain("mehta_volume", "m_half must be at least 1"));
    }
    let mh = m_half as f64;
    Ok(LogMagnitude::from_log(0.5 * mh * LN_2PI + lbarnes(mh + 2.0)))
}

/// Exponents of the circular integrand z^{e1} |1+z|^{e2} [t(1+z) − 1]^n
/// dual to the n-point JUE with a power m (λ = 1).
pub fn duality_exponents(params: &EnsembleParams) -> (f64, f64) {
    let n = params.n as f64;
    (
        0.5 * ((params.lambda1 - params.lambda2) - n),
        params.lambda1 + params.lambda2 + n,
    )
}

/// ln A, the constant linking ⟨∏(t − x_l)^m⟩_{JUE_n} to the m-point circular
/// average; fixed by comparing both sides at t = 1.
pub fn duality_constant_a(params: &EnsembleParams, m: usize) -> Result<LogMagnitude> {
    params.validate("duality_constant_A")?;
    if m == 0 || m % 2 != 0 {
        return Err(domain("duality_constant_A", format!("m = {m} must be positive and even")));
    }
    let (l1, l2, n) = (params.lambda1, params.lambda2, params.n);
    let eta1 = l2;
    let eta2 = l1 + n as f64;
    let s_ratio = ln_selberg(n, l1, l2 + m as f64) - ln_selberg(n, l1, l2);
    let m00 = morris_closed(&MorrisParams { n: m, a: 0.0, b: 0.0 })?;
    let meta = morris_closed(&MorrisParams { n: m, a: eta2, b: eta1 })?;
    Ok(LogMagnitude::from_log(s_ratio) * m00 / meta)
}

/// Large-n form of the single-charge partition ratio:
/// π^{−q} G²(q+1)/G(2q+1) (2n)^{q²−q} [t(1−t)]^{−q²/2}.
pub fn asymptotic_partition_ratio(n: usize, q: f64, t: f64, params: &EnsembleParams) -> Result<f64> {
    params.validate("asymptotic_partition_ratio")?;
    if !(t > 0.0 && t < 1.0) {
        return Err(domain("asymptotic_partition_ratio", format!("t = {t} outside (0,1)")));
    }
    if !(q > 0.0) || n == 0 {
        return Err(domain("asymptotic_partition_ratio", "q and n must be positive"));
    }
    Ok(log_single_charge_constant(q)
        .map(|c| (c + (q * q - q) * (2.0 * n as f64).ln() - 0.5 * q * q * (t * (1.0 - t)).ln()).exp())?)
}

/// ln[π^{−q} G²(q+1)/G(2q+1)].
pub(crate) fn log_single_charge_constant(q: f64) -> Result<f64> {
    if !(q >= 0.0) {
        return Err(domain("charge constant", format!("q = {q} must be nonnegative")));
    }
    Ok(-q * PI.ln() + 2.0 * lbarnes(q + 1.0) - lbarnes(2.0 * q + 1.0))
}

/// ρ G⁴(3/2) (2N)^{−1/2} [X(1−X) Y(1−Y)]^{1/8} / |X − Y|^{1/2}; the same for
/// both boundary conditions.
pub fn density_matrix_asymptote(query: &DensityMatrixQuery) -> Result<f64> {
    query.validate("density_matrix_asymptote")?;
    let (x, y) = (query.x, query.y);
    if x == y {
        return Err(domain("density_matrix_asymptote", "X = Y is a singular point"));
    }
    let g4 = (4.0 * lbarnes(1.5)).exp();
    Ok(query.rho() * g4 / (2.0 * query.n as f64).sqrt() * (x * (1.0 - x) * y * (1.0 - y)).powf(0.125)
        / (x - y).abs().sqrt())
}

/// λ̄_j = √(2π) Γ(j+1/2)/j!.
pub fn scaled_occupation(j: usize) -> f64 {
    let jf = j as f64;
    (0.5 * LN_2PI + lgamma(jf + 0.5) - lgamma(jf + 1.0)).exp()
}

/// λ_j = G⁴(3/2) Γ(j+1/2)/(√π j!) √N.
pub fn occupation_number(j: usize, n: usize) -> f64 {
    let jf = j as f64;
    (4.0 * lbarnes(1.5) + lgamma(jf + 0.5) - 0.5 * PI.ln() - lgamma(jf + 1.0)).exp() * (n as f64).sqrt()
}

/// Large-n expansion of ln[G(n+1+a)/G(n+1+b)].
pub fn barnes_ratio_asymptote(n: usize, a: f64, b: f64) -> f64 {
    let nf = n as f64;
    (b - a) * nf + 0.5 * (a - b) * LN_2PI + ((a - b) * nf + 0.5 * (a * a - b * b)) * nf.ln()
}

/// Exact ln[G(n+1+a)/G(n+1+b)].
pub fn log_barnes_ratio(n: usize, a: f64, b: f64) -> Result<f64> {
    let nf = n as f64;
    if !(nf + 1.0 + a > 0.0 && nf + 1.0 + b > 0.0) {
        return Err(domain("log_barnes_ratio", "arguments must be positive"));
    }
    Ok(lbarnes(nf + 1.0 + a) - lbarnes(nf + 1.0 + b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{gauss_rule, periodic_integrate, tensor_integrate, RuleKind};
    use approx::assert_relative_eq;
    use num_complex::Complex64;

    fn selberg_quadrature(n: usize, a: f64, b: f64) -> f64 {
        let r = gauss_rule(RuleKind::Jacobi { alpha: b, beta: a }, 12)
            .unwrap()
            .on_interval(0.0, 1.0);
        match n {
            1 => tensor_integrate(|_| 1.0, &[&r]).unwrap(),
            2 => tensor_integrate(|x| (x[1] - x[0]).powi(2), &[&r, &r]).unwrap(),
            _ => unreachable!(),
        }
    }

    #[test]
    fn selberg_against_quadrature() {
        for (a, b) in [(0.0, 0.0), (0.5, 0.5), (-0.5, -0.5), (1.5, -0.25)] {
            for n in 1..=2 {
                let p = EnsembleParams::jue(n, a, b).unwrap();
                let closed = selberg_closed(&p).unwrap().value();
                assert_relative_eq!(closed, selberg_quadrature(n, a, b), max_relative = 1e-12);
            }
        }
        let p = EnsembleParams::jue(2, 0.0, 0.0).unwrap();
        assert_relative_eq!(selberg_closed(&p).unwrap().log_abs, (1.0f64 / 6.0).ln(), max_relative = 1e-14);
        assert_eq!(selberg_closed(&p.with_n(1)).unwrap().log_abs, 0.0);
    }

    #[test]
    fn selberg_rejects_bad_params() {
        assert!(EnsembleParams::jue(2, -1.0, 0.0).is_err());
        let p = EnsembleParams {
            n: 2,
            lambda1: 0.0,
            lambda2: 0.0,
            lambda: 0.5,
        };
        assert!(selberg_closed(&p).is_err());
    }

    #[test]
    fn selberg_barnes_continuation_agrees() {
        for n in 1..12 {
            for (a, b) in [(0.5, 0.5), (-0.5, 0.3)] {
                assert_relative_eq!(
                    selberg_barnes(n as f64, a, b).unwrap(),
                    ln_selberg(n, a, b),
                    epsilon = 1e-10
                );
            }
        }
    }

    /// Morris integral by Gauss–Jacobi in the half angle u = θ/π, where
    /// |1+z|^{a+b} = (2cos(πu/2))^{a+b} and cos(πu/2)/(1−u²) is smooth.
    fn morris_quadrature(n: usize, a: f64, b: f64) -> f64 {
        let e = a + b;
        let r = gauss_rule(RuleKind::Jacobi { alpha: e, beta: e }, 40).unwrap();
        let f = |u: &[f64]| -> Complex64 {
            let mut v = Complex64::new(1.0, 0.0);
            for &ui in u {
                let phi = 0.5 * PI * ui;
                let smooth = 2.0 * phi.cos() / (1.0 - ui * ui);
                v *= Complex64::from_polar(smooth.powf(e), (a - b) * phi) * PI;
            }
            for i in 0..u.len() {
                for j in 0..i {
                    v *= 4.0 * (0.5 * PI * (u[i] - u[j])).sin().powi(2);
                }
            }
            v
        };
        let rules = vec![&r; n];
        let v = tensor_integrate(f, &rules).unwrap() * (2.0 * PI).powi(-(n as i32));
        assert!(v.im.abs() < 1e-12 * v.re.abs());
        v.re
    }

    fn morris_trapezoid(n: usize, a: f64, b: f64) -> f64 {
        let f = |th: &[f64]| -> f64 {
            let mut v = Complex64::new(1.0, 0.0);
            for &t in th {
                let z = Complex64::from_polar(1.0, t);
                v *= Complex64::from_polar(1.0, 0.5 * (a - b) * t) * (1.0 + z).norm().powf(a + b);
            }
            for i in 0..th.len() {
                for j in 0..i {
                    v *= (Complex64::from_polar(1.0, th[i]) - Complex64::from_polar(1.0, th[j])).norm_sqr();
                }
            }
            v.re
        };
        periodic_integrate(f, n, 64).unwrap() / (2.0 * PI).powi(n as i32)
    }

    #[test]
    fn morris_against_trapezoid() {
        let p = MorrisParams { n: 1, a: 2.0, b: 1.0 };
        assert_relative_eq!(morris_closed(&p).unwrap().value(), 3.0, max_relative = 1e-13);
        // trapezoid is spectral when (a−b)/2 is an integer and a+b is even
        for (n, a, b) in [(1, 1.0, 1.0), (2, 1.0, 1.0), (2, 3.0, 1.0)] {
            let closed = morris_closed(&MorrisParams { n, a, b }).unwrap().value();
            assert_relative_eq!(closed, morris_trapezoid(n, a, b), max_relative = 1e-12);
        }
        for (n, a, b) in [(1, 2.0, 1.0), (2, 1.5, 0.5), (2, 2.5, -0.5), (2, 0.7, 0.1)] {
            let closed = morris_closed(&MorrisParams { n, a, b }).unwrap().value();
            assert_relative_eq!(closed, morris_quadrature(n, a, b), max_relative = 1e-11);
        }
        assert_eq!(morris_closed(&MorrisParams { n: 1, a: 0.0, b: 0.0 }).unwrap().log_abs, 0.0);
        assert!(morris_closed(&MorrisParams { n: 1, a: -1.0, b: -0.5 }).is_err());
    }

    #[test]
    fn mehta_values() {
        assert_relative_eq!(mehta_volume(1).unwrap().log_abs, 0.5 * LN_2PI, max_relative = 1e-13);
        assert_relative_eq!(mehta_volume(2).unwrap().log_abs, (4.0 * PI).ln(), max_relative = 1e-13);
        assert_relative_eq!(
            mehta_volume(3).unwrap().log_abs,
            1.5 * LN_2PI + 12f64.ln(),
            max_relative = 1e-13
        );
    }

    #[test]
    fn partition_ratio_arcsine() {
        let p = EnsembleParams::jue(5, 0.5, 0.5).unwrap();
        for n in [1, 7, 100] {
            assert_relative_eq!(
                asymptotic_partition_ratio(n, 1.0, 0.5, &p).unwrap(),
                2.0 / PI,
                max_relative = 1e-14
            );
        }
        assert_relative_eq!(
            asymptotic_partition_ratio(3, 1.0, 0.25, &p).unwrap(),
            (3.0f64 / 16.0).powf(-0.5) / PI,
            max_relative = 1e-14
        );
        let want = (2.0 * lbarnes(1.5) - lbarnes(2.0)).exp() / PI.sqrt() * 16f64.powf(-0.25) * 0.25f64.powf(-0.125);
        assert_relative_eq!(asymptotic_partition_ratio(8, 0.5, 0.5, &p).unwrap(), want, max_relative = 1e-14);
        assert!(asymptotic_partition_ratio(8, 0.5, 1.0, &p).is_err());
    }

    #[test]
    fn partition_ratio_ignores_lambdas() {
        let v: Vec<f64> = [(0.5, 0.5), (-0.5, 2.0), (3.0, 0.0)]
            .iter()
            .map(|&(a, b)| {
                let p = EnsembleParams::jue(4, a, b).unwrap();
                asymptotic_partition_ratio(30, 0.7, 0.33, &p).unwrap()
            })
            .collect();
        assert!(v.iter().all(|x| x.to_bits() == v[0].to_bits()));
    }

    #[test]
    fn density_asymptote_properties() {
        let q = DensityMatrixQuery::new(14, 0.025, 0.975, Boundary::Dirichlet);
        let v = density_matrix_asymptote(&q).unwrap();
        let g4 = (4.0 * lbarnes(1.5)).exp();
        let want = 14.0 * g4 / 28f64.sqrt() * (0.025f64 * 0.975).powf(0.25) / 0.95f64.sqrt();
        assert_relative_eq!(v, want, max_relative = 1e-14);
        let swapped = DensityMatrixQuery { x: 0.975, y: 0.025, ..q };
        assert_eq!(density_matrix_asymptote(&swapped).unwrap(), v);
        let neu = DensityMatrixQuery { boundary: Boundary::Neumann, ..q };
        assert_eq!(density_matrix_asymptote(&neu).unwrap(), v);
        assert!(density_matrix_asymptote(&DensityMatrixQuery { y: 0.025, ..q }).is_err());
    }

    #[test]
    fn occupations() {
        assert!((occupation_number(0, 1) - 1.3069).abs() < 5e-4);
        assert_relative_eq!(scaled_occupation(0), PI * 2f64.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(scaled_occupation(1), PI / 2f64.sqrt(), max_relative = 1e-14);
        for j in 0..10 {
            let r = occupation_number(j, 37) / 37f64.sqrt();
            assert_relative_eq!(r, occupation_number(j, 1), max_relative = 1e-15);
        }
        let mut partial = 0.0;
        for j in 0..50 {
            let next = partial + scaled_occupation(j) / (2.0 * PI).sqrt();
            assert!(next > partial);
            partial = next;
        }
    }

    #[test]
    fn barnes_ratio_drift() {
        assert_eq!(barnes_ratio_asymptote(17, 0.3, 0.3), 0.0);
        let d200 = log_barnes_ratio(200, 1.0, 0.0).unwrap() - barnes_ratio_asymptote(200, 1.0, 0.0);
        assert!(d200.abs() < 1e-2);
        let d100 = log_barnes_ratio(100, 0.5, 0.0).unwrap() - barnes_ratio_asymptote(100, 0.5, 0.0);
        let d500 = log_barnes_ratio(500, 0.5, 0.0).unwrap() - barnes_ratio_asymptote(500, 0.5, 0.0);
        assert!(d500.abs() < d100.abs());
    }

    #[test]
    fn large_n_selberg_does_not_overflow() {
        let p = EnsembleParams::jue(10_000, 0.5, 0.5).unwrap();
        let s = selberg_closed(&p).unwrap();
        assert!(s.log_abs.is_finite() && s.log_abs < -1e7);
    }
}
