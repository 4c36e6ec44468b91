//! Heine identity in an orthonormal Jacobi basis on [0, 1].
//!
//! For the weight w(x) = x^{λ1}(1−x)^{λ2} and orthonormal polynomials P_k,
//!   ∫…∫ ∏ f(x_l) w(x_l) Δ(x)² dx = n! ∏ h_k · det[∫ P_j P_k f w],
//! with h_k the monic norms. Working in the orthonormal basis keeps the
//! Gram matrix close to the identity instead of a Hankel moment matrix whose
//! condition number grows exponentially.

use nalgebra::DMatrix;

use crate::error::{domain, Error, Result};
use crate::linalg::log_det;
use crate::quadrature::{jacobi_recurrence, MeasureRule};
use crate::specfun::{lgamma, LogMagnitude};

/// Orthonormal polynomials for x^{λ1}(1−x)^{λ2} on [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiBasis {
    pub lambda1: f64,
    pub lambda2: f64,
    /// diagonal recurrence coefficients c_k
    diag: Vec<f64>,
    /// off-diagonal s_k (k ≥ 1); s_0 unused
    off: Vec<f64>,
    /// ln h_k for the monic polynomials in x
    log_norms: Vec<f64>,
}

impl JacobiBasis {
    pub fn new(lambda1: f64, lambda2: f64, n: usize) -> Result<JacobiBasis> {
        if !(lambda1 > -1.0 && lambda2 > -1.0) {
            return Err(domain("JacobiBasis", format!("exponents ({lambda1}, {lambda2}) must exceed −1")));
        }
        // t = 2x − 1 carries (1−t)^{λ2}(1+t)^{λ1}
        let (alpha, beta) = (lambda2, lambda1);
        let mut diag = Vec::with_capacity(n + 1);
        let mut off = Vec::with_capacity(n + 1);
        let mut log_norms = Vec::with_capacity(n + 1);
        let h0 = lgamma(lambda1 + 1.0) + lgamma(lambda2 + 1.0) - lgamma(lambda1 + lambda2 + 2.0);
        for k in 0..=n {
            let (a, b) = jacobi_recurrence(alpha, beta, k);
            diag.push(0.5 * (1.0 + a));
            if k == 0 {
                off.push(0.0);
                log_norms.push(h0);
            } else {
                off.push(0.5 * b.sqrt());
                log_norms.push(log_norms[k - 1] + (0.25 * b).ln());
            }
        }
        Ok(JacobiBasis {
            lambda1,
            lambda2,
            diag,
            off,
            log_norms,
        })
    }

    pub fn len(&self) -> usize {
        self.diag.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Fill `out[k] = P_k(x)` for k < out.len().
    pub fn eval_into(&self, x: f64, out: &mut [f64]) {
        if out.is_empty() {
            return;
        }
        out[0] = (-0.5 * self.log_norms[0]).exp();
        let mut prev = 0.0;
        for k in 0..out.len() - 1 {
            let next = ((x - self.diag[k]) * out[k] - self.off[k] * prev) / self.off[k + 1];
            prev = out[k];
            out[k + 1] = next;
        }
    }

    /// ln(n! ∏_{k<n} h_k): the value of the n-fold integral with f ≡ 1.
    pub fn log_partition(&self, n: usize) -> f64 {
        lgamma(n as f64 + 1.0) + self.log_norms[..n].iter().sum::<f64>()
    }
}

/// Gram matrix G_{jk} = ∫ P_j P_k f w on a given composite rule; `f` is the
/// smooth part of the insertion (the singular part is already in the rule).
pub fn gram_matrix(basis: &JacobiBasis, n: usize, rule: &MeasureRule, f: &dyn Fn(f64) -> f64) -> DMatrix<f64> {
    let mut g = DMatrix::<f64>::zeros(n, n);
    let mut p = vec![0.0; n];
    for (x, w) in rule.nodes.iter().zip(&rule.weights) {
        let fw = w * f(*x);
        if fw == 0.0 {
            continue;
        }
        basis.eval_into(*x, &mut p);
        for j in 0..n {
            let pj = fw * p[j];
            for k in j..n {
                g[(j, k)] += pj * p[k];
            }
        }
    }
    for j in 0..n {
        for k in 0..j {
            g[(j, k)] = g[(k, j)];
        }
    }
    g
}

/// Average ⟨∏_l f(x_l) ∏_r |y_r − x_l|^{e_r}⟩ over the n-point JUE with
/// weight x^{λ1}(1−x)^{λ2}, as a log-magnitude. The quadrature order is
/// doubled until the log-determinant is stable to `tol`.
pub fn heine_average(
    lambda1: f64,
    lambda2: f64,
    n: usize,
    f: &dyn Fn(f64) -> f64,
    singularities: &[(f64, f64)],
    extra_degree: usize,
    tol: f64,
) -> Result<LogMagnitude> {
    if n == 0 {
        return Ok(LogMagnitude::ONE);
    }
    let basis = JacobiBasis::new(lambda1, lambda2, n)?;
    let eval = |order: usize| -> Result<LogMagnitude> {
        let rule = MeasureRule::new((lambda1, lambda2), singularities, order)?;
        log_det(&gram_matrix(&basis, n, &rule, f))
    };
    let mut order = n + extra_degree / 2 + 24;
    let mut prev = eval(order)?;
    loop {
        order *= 2;
        let cur = eval(order)?;
        let gap = (cur.log_abs - prev.log_abs).abs();
        if gap <= tol && cur.sign == prev.sign {
            return Ok(cur);
        }
        if order > 2048 {
            return Err(Error::NonConvergence {
                op: "heine_average",
                detail: format!("log-det gap {gap:e} at quadrature order {order}"),
            });
        }
        prev = cur;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{gauss_rule, tensor_integrate, RuleKind};
    use approx::assert_relative_eq;

    #[test]
    fn basis_is_orthonormal() {
        for (l1, l2) in [(0.5, 0.5), (-0.5, -0.5), (0.0, 1.5), (-0.3, 2.0)] {
            let n = 15;
            let b = JacobiBasis::new(l1, l2, n).unwrap();
            let rule = MeasureRule::new((l1, l2), &[], 40).unwrap();
            let g = gram_matrix(&b, n, &rule, &|_| 1.0);
            let err = (g - DMatrix::<f64>::identity(n, n)).abs().max();
            assert!(err < 1e-12, "({l1},{l2}) err {err}");
        }
    }

    #[test]
    fn partition_matches_tensor_integral() {
        for (l1, l2) in [(0.5, 0.5), (-0.5, 0.25)] {
            let b = JacobiBasis::new(l1, l2, 2).unwrap();
            let r = gauss_rule(RuleKind::Jacobi { alpha: l2, beta: l1 }, 10)
                .unwrap()
                .on_interval(0.0, 1.0);
            let brute = tensor_integrate(|x| (x[1] - x[0]).powi(2), &[&r, &r]).unwrap();
            assert_relative_eq!(b.log_partition(2).exp(), brute, max_relative = 1e-13);
        }
    }

    #[test]
    fn single_particle_average() {
        // n = 1: ⟨(t−x)²⟩ over Beta(3/2,3/2) at t = 0.7 is (0.2)² + 1/16
        let t = 0.7;
        let v = heine_average(0.5, 0.5, 1, &|x| (t - x) * (t - x), &[], 2, 1e-13).unwrap();
        assert_relative_eq!(v.value(), 0.04 + 1.0 / 16.0, max_relative = 1e-13);
    }
}
