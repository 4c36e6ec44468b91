//! Ensemble averages: brute-force and Heine evaluations, both sides of the
//! duality formula, partition ratios, and the Monte Carlo density matrix.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensembles::{sample_jue_halfhalf, sample_jue_metropolis, RngStream, BURN_IN_SWEEPS, THINNING};
use crate::error::{domain, Error, Result};
use crate::exact::{
    duality_constant_a, duality_exponents, ln_selberg, selberg_barnes, Boundary, DensityMatrixQuery,
    EnsembleParams,
};
use crate::heine::heine_average;
use crate::quadrature::{gauss_rule, tensor_integrate, MeasureRule, RuleKind};
use crate::specfun::LogMagnitude;

/// Point charges (position, q) inserted as |y − x|^{2q}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChargeConfig {
    pub charges: Vec<(f64, f64)>,
}

impl ChargeConfig {
    pub fn new(charges: Vec<(f64, f64)>) -> Result<Self> {
        let c = ChargeConfig { charges };
        c.validate()?;
        Ok(c)
    }

    pub fn single(y: f64, q: f64) -> Result<Self> {
        Self::new(vec![(y, q)])
    }

    /// Positions in (0,1), pairwise distinct; q ≥ 0 (a zero charge is inert).
    pub fn validate(&self) -> Result<()> {
        for (i, &(y, q)) in self.charges.iter().enumerate() {
            if !(y > 0.0 && y < 1.0) {
                return Err(domain("ChargeConfig", format!("position {y} outside (0,1)")));
            }
            if !(q >= 0.0) || !q.is_finite() {
                return Err(domain("ChargeConfig", format!("charge {q} must be nonnegative")));
            }
            if self.charges[..i].iter().any(|&(z, _)| z == y) {
                return Err(domain("ChargeConfig", format!("duplicate position {y}")));
            }
        }
        Ok(())
    }

    pub fn total_charge(&self) -> f64 {
        self.charges.iter().map(|c| c.1).sum()
    }

    /// Interior singularities (y_r, 2q_r) of the insertion, zero charges dropped.
    fn singularities(&self) -> Vec<(f64, f64)> {
        self.charges
            .iter()
            .filter(|c| c.1 > 0.0)
            .map(|&(y, q)| (y, 2.0 * q))
            .collect()
    }

    /// ln of ∏_r y_r^{λ1 q_r}(1−y_r)^{λ2 q_r} ∏_{r<s} |y_r − y_s|^{2 q_r q_s}.
    fn log_prefactor(&self, lambda1: f64, lambda2: f64) -> f64 {
        let mut acc = 0.0;
        for (i, &(y, q)) in self.charges.iter().enumerate() {
            acc += q * (lambda1 * y.ln() + lambda2 * (1.0 - y).ln());
            for &(z, p) in &self.charges[..i] {
                acc += 2.0 * q * p * (y - z).abs().ln();
            }
        }
        acc
    }
}

/// Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MCEstimate {
    pub value: f64,
    pub std_error: f64,
    pub m_samples: usize,
    pub master_seed: u64,
}

/// One side of the duality formula.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualityCase {
    pub n: usize,
    pub m: usize,
    pub t: f64,
    pub params: EnsembleParams,
}

impl DualityCase {
    pub fn new(n: usize, m: usize, t: f64, lambda1: f64, lambda2: f64) -> Result<Self> {
        let c = DualityCase {
            n,
            m,
            t,
            params: EnsembleParams::jue(n, lambda1, lambda2)?,
        };
        c.validate()?;
        Ok(c)
    }

    fn validate(&self) -> Result<()> {
        self.params.validate("DualityCase")?;
        if self.params.n != self.n {
            return Err(domain("DualityCase", "n disagrees with params.n"));
        }
        if self.m == 0 || self.m % 2 != 0 {
            return Err(domain("DualityCase", format!("m = {} must be positive and even", self.m)));
        }
        if !self.t.is_finite() {
            return Err(domain("DualityCase", "t must be finite"));
        }
        Ok(())
    }
}

/// How the charges enter the product.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ProductMode {
    /// ∏_r (y_r − x)^m
    SignedPower(u32),
    /// ∏_r |y_r − x|^{2 q_r}
    AbsolutePower,
}

const BRUTE_ORDER: usize = 24;
const BRUTE_TOL: f64 = 1e-11;

/// Tensor-quadrature average over the n ≤ 3 point JUE, normalized by the
/// closed-form Selberg integral. In signed mode the positions may be any
/// real numbers and the charges are ignored. Each axis uses the composite rule of the
/// weight times the singular part of the insertion.
pub fn average_product_bruteforce(params: &EnsembleParams, charges: &ChargeConfig, mode: ProductMode) -> Result<f64> {
    params.validate("average_product_bruteforce")?;
    if mode == ProductMode::AbsolutePower {
        charges.validate()?;
    }
    let n = params.n;
    if n > 3 {
        return Err(Error::UnsupportedDimension(n));
    }
    let (l1, l2) = (params.lambda1, params.lambda2);
    let (sing, poly): (Vec<(f64, f64)>, Vec<f64>) = match mode {
        ProductMode::AbsolutePower => (charges.singularities(), vec![]),
        ProductMode::SignedPower(_) => (vec![], charges.charges.iter().map(|c| c.0).collect()),
    };
    let power = match mode {
        ProductMode::SignedPower(m) => m as i32,
        ProductMode::AbsolutePower => 0,
    };
    let f = |x: &[f64]| -> f64 {
        let mut v = 1.0;
        for i in 0..x.len() {
            for &t in &poly {
                v *= (t - x[i]).powi(power);
            }
            for j in 0..i {
                v *= (x[i] - x[j]) * (x[i] - x[j]);
            }
        }
        v
    };
    let eval = |order: usize| -> Result<f64> {
        let rule = MeasureRule::new((l1, l2), &sing, order)?;
        let rules = vec![&rule; n];
        tensor_integrate(f, &rules)
    };
    let mut order = BRUTE_ORDER;
    let mut prev = eval(order)?;
    loop {
        order *= 2;
        let cur = eval(order)?;
        let gap = (cur - prev).abs();
        if gap <= BRUTE_TOL * cur.abs() {
            return Ok(cur / ln_selberg(n, l1, l2).exp());
        }
        if order >= 384 {
            return Err(Error::Quadrature { best: cur, gap });
        }
        prev = cur;
    }
}

/// ⟨∏_l (t − x_l)^m⟩ over the n-point JUE through the Heine identity.
pub fn average_even_power_heine(params: &EnsembleParams, t: f64, m: usize) -> Result<LogMagnitude> {
    params.validate("average_even_power_heine")?;
    if m % 2 != 0 {
        return Err(domain("average_even_power_heine", format!("m = {m} must be even")));
    }
    let mi = m as i32;
    heine_average(
        params.lambda1,
        params.lambda2,
        params.n,
        &|x| (t - x).powi(mi),
        &[],
        m,
        1e-12,
    )
}

/// ⟨∏_l ∏_r |y_r − x_l|^{2 q_r}⟩ over the n-point JUE through the Heine identity.
pub fn average_charges_heine(params: &EnsembleParams, charges: &ChargeConfig) -> Result<LogMagnitude> {
    params.validate("average_charges_heine")?;
    charges.validate()?;
    heine_average(
        params.lambda1,
        params.lambda2,
        params.n,
        &|_| 1.0,
        &charges.singularities(),
        0,
        1e-12,
    )
}

/// Left side of the duality formula, ⟨∏(t − x_l)^m⟩_{JUE_n}.
pub fn duality_lhs(case: &DualityCase) -> Result<f64> {
    case.validate()?;
    if case.n <= 3 {
        // t need not lie in (0,1) here: the insertion is a polynomial.
        let charges = ChargeConfig {
            charges: vec![(case.t, 0.0)],
        };
        average_product_bruteforce(&case.params, &charges, ProductMode::SignedPower(case.m as u32))
    } else {
        Ok(average_even_power_heine(&case.params, case.t, case.m)?.value())
    }
}

/// Right side of the duality formula as a complex number; the imaginary part
/// is a quadrature residual.
///
/// With θ = πu the factor |1+z|^{e2} = (2cos(πu/2))^{e2} is absorbed by a
/// Gauss–Jacobi(e2, e2) rule in u; cos(πu/2)/(1−u²) is smooth. The branch
/// z^{e1} = e^{i e1 θ} is taken on θ ∈ (−π, π).
pub fn duality_rhs_complex(case: &DualityCase) -> Result<Complex64> {
    case.validate()?;
    let m = case.m;
    if m > 3 {
        return Err(Error::UnsupportedDimension(m));
    }
    let (e1, e2) = duality_exponents(&case.params);
    let (t, n) = (case.t, case.n as i32);
    let la = duality_constant_a(&case.params, m)?;
    let f = |u: &[f64]| -> Complex64 {
        let mut v = Complex64::new(1.0, 0.0);
        for &ui in u {
            let theta = PI * ui;
            let z = Complex64::from_polar(1.0, theta);
            let smooth = 2.0 * (0.5 * theta).cos() / (1.0 - ui * ui);
            v *= Complex64::from_polar(smooth.powf(e2), e1 * theta) * (t * (1.0 + z) - 1.0).powi(n) * PI;
        }
        for i in 0..u.len() {
            for j in 0..i {
                v *= 4.0 * (0.5 * PI * (u[i] - u[j])).sin().powi(2);
            }
        }
        v
    };
    let mfact: f64 = (1..=m).map(|k| k as f64).product();
    let norm = (2.0 * PI).powi(m as i32) * mfact;
    let eval = |order: usize| -> Result<Complex64> {
        let r = gauss_rule(RuleKind::Jacobi { alpha: e2, beta: e2 }, order)?;
        let rules = vec![&r; m];
        Ok(tensor_integrate(f, &rules)? / norm)
    };
    let mut order = 24;
    let mut prev = eval(order)?;
    loop {
        order *= 2;
        let cur = eval(order)?;
        let gap = (cur - prev).norm();
        if gap <= 1e-13 * cur.norm() {
            return Ok(cur * la.value());
        }
        if order >= 384 {
            return Err(Error::Quadrature { best: cur.re, gap });
        }
        prev = cur;
    }
}

/// Right side of the duality formula (real part).
pub fn duality_rhs(case: &DualityCase) -> Result<f64> {
    Ok(duality_rhs_complex(case)?.re)
}

/// Z_n(charges)/Z_{n+Q}(no charges) by tensor quadrature, n ≤ 3, where
/// Z_n carries the prefactor ∏ y^{λ1 q}(1−y)^{λ2 q} ∏|y_r−y_s|^{2 q_r q_s}
/// and Z_{n+Q} is the Selberg integral continued to real size.
pub fn partition_ratio_bruteforce(params: &EnsembleParams, charges: &ChargeConfig) -> Result<f64> {
    let avg = average_product_bruteforce(params, charges, ProductMode::AbsolutePower)?;
    Ok(avg * partition_ratio_factor(params, charges)?.exp())
}

/// The same ratio with the average taken through the Heine identity.
pub fn partition_ratio_heine(params: &EnsembleParams, charges: &ChargeConfig) -> Result<f64> {
    Ok(log_partition_ratio_heine(params, charges)?.exp())
}

pub fn log_partition_ratio_heine(params: &EnsembleParams, charges: &ChargeConfig) -> Result<f64> {
    let avg = average_charges_heine(params, charges)?;
    if avg.sign <= 0 {
        return Err(Error::Determinant("non-positive average of a positive insertion".into()));
    }
    Ok(avg.log_abs + partition_ratio_factor(params, charges)?)
}

/// ln[prefactor · S_n / S_{n+Q}].
fn partition_ratio_factor(params: &EnsembleParams, charges: &ChargeConfig) -> Result<f64> {
    let (n, l1, l2) = (params.n, params.lambda1, params.lambda2);
    let q = charges.total_charge();
    Ok(charges.log_prefactor(l1, l2) + ln_selberg(n, l1, l2) - selberg_barnes(n as f64 + q, l1, l2)?)
}

/// Ensemble exponents and ln of the constant C in ρ = C·⟨∏|X−x_l||Y−x_l|⟩.
fn density_matrix_constant(query: &DensityMatrixQuery) -> (f64, f64) {
    let n = query.n;
    let lam = match query.boundary {
        Boundary::Dirichlet => 0.5,
        Boundary::Neumann => -0.5,
    };
    let mut c = (PI * query.rho()).ln() + ln_selberg(n, lam, lam) - ln_selberg(n + 1, lam, lam);
    if query.boundary == Boundary::Dirichlet {
        let (x, y) = (query.x, query.y);
        c += 0.5 * (x * (1.0 - x) * y * (1.0 - y)).ln();
    }
    (lam, c)
}

/// Finite-N density matrix from the Heine identity (deterministic).
pub fn density_matrix_exact(query: &DensityMatrixQuery) -> Result<f64> {
    query.validate("density_matrix_exact")?;
    if query.x == query.y {
        return Err(domain("density_matrix_exact", "X = Y"));
    }
    let (lam, c) = density_matrix_constant(query);
    let avg = heine_average(lam, lam, query.n, &|_| 1.0, &[(query.x, 1.0), (query.y, 1.0)], 0, 1e-12)?;
    Ok((c + avg.log_abs).exp())
}

/// Fewest samples accepted by the Monte Carlo estimator.
pub const MIN_SAMPLES: usize = 100;

/// Sum in a fixed binary-tree order, so the result does not depend on how
/// the inputs were produced.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 8 {
        return v.iter().fold(0.0, |a, b| a + b);
    }
    let mid = v.len() / 2;
    pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
}

/// Mean and standard error of exp(L_k) computed with a common shift.
fn log_shifted_mean(logs: &[f64]) -> (f64, f64, f64) {
    let shift = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let vals: Vec<f64> = logs.iter().map(|l| (l - shift).exp()).collect();
    let m = vals.len() as f64;
    let mean = pairwise_sum(&vals) / m;
    let dev: Vec<f64> = vals.iter().map(|v| (v - mean) * (v - mean)).collect();
    let sd = (pairwise_sum(&dev) / (m - 1.0)).sqrt();
    (shift, mean, sd / m.sqrt())
}

/// ln ∏_l |4y − 4x_l| |4x − 4x_l| for one configuration.
fn log_product(points: &[f64], x: f64, y: f64) -> f64 {
    points
        .iter()
        .map(|&xl| ((4.0 * y - 4.0 * xl).abs() * (4.0 * x - 4.0 * xl).abs()).ln())
        .sum()
}

fn mc_logs(query: &DensityMatrixQuery, m: usize, master_seed: u64) -> Result<Vec<f64>> {
    let n = query.n;
    let (x, y) = (query.x, query.y);
    match query.boundary {
        Boundary::Dirichlet => (0..m as u64)
            .into_par_iter()
            .map(|k| {
                let mut s = RngStream::new(master_seed, k);
                Ok(log_product(&sample_jue_halfhalf(n, &mut s)?.points, x, y))
            })
            .collect(),
        Boundary::Neumann => {
            let params = EnsembleParams::jue(n, -0.5, -0.5)?;
            (0..m as u64)
                .into_par_iter()
                .map(|k| {
                    let mut s = RngStream::new(master_seed, k);
                    let smp = sample_jue_metropolis(&params, BURN_IN_SWEEPS + THINNING, &mut s)?;
                    Ok(log_product(&smp.points, x, y))
                })
                .collect()
        }
    }
}

/// Monte Carlo density matrix ρ_{N+1}(X, Y). Sample k uses stream k of the
/// master seed, so the estimate does not depend on the worker count.
///
/// Dirichlet: (8ρ/(N+1)) [X(1−X)Y(1−Y)]^{1/2} ⟨∏ |4Y−4x_l||4X−4x_l|⟩ over
/// JUE_N(1/2,1/2) from the exact recurrence. Neumann: πρ S_N/S_{N+1} at
/// (−1/2,−1/2) times ⟨∏|X−x_l||Y−x_l|⟩ from Metropolis samples.
pub fn mc_density_matrix(query: &DensityMatrixQuery, m: usize, master_seed: u64) -> Result<MCEstimate> {
    query.validate("mc_density_matrix")?;
    if m < MIN_SAMPLES {
        return Err(Error::TooFewSamples { min: MIN_SAMPLES, got: m });
    }
    let logs = mc_logs(query, m, master_seed)?;
    let (shift, mean, se) = log_shifted_mean(&logs);
    let n = query.n as f64;
    let log_pref = match query.boundary {
        Boundary::Dirichlet => {
            let (x, y) = (query.x, query.y);
            (8.0 * query.rho() / (n + 1.0) * ((x * (1.0 - x)) * (y * (1.0 - y))).sqrt()).ln()
        }
        Boundary::Neumann => {
            // ⟨∏|X−x||Y−x|⟩ = 16^{−N} ⟨∏|4X−4x||4Y−4x|⟩
            density_matrix_constant(query).1 - n * 16f64.ln()
        }
    };
    let scale = (log_pref + shift).exp();
    Ok(MCEstimate {
        value: scale * mean,
        std_error: scale * se,
        m_samples: m,
        master_seed,
    })
}

/// The antidiagonal estimator ρ(X, 1−X) written exactly as
/// (8ρ/(N+1)) X(1−X) (1/M) Σ_k ∏ |4(1−X)−4X_l||4X−4X_l|.
pub fn mc_density_matrix_antidiagonal(n: usize, x: f64, m: usize, master_seed: u64) -> Result<MCEstimate> {
    let query = DensityMatrixQuery::new(n, x, 1.0 - x, Boundary::Dirichlet);
    query.validate("mc_density_matrix_antidiagonal")?;
    if m < MIN_SAMPLES {
        return Err(Error::TooFewSamples { min: MIN_SAMPLES, got: m });
    }
    let logs = mc_logs(&query, m, master_seed)?;
    let (shift, mean, se) = log_shifted_mean(&logs);
    let pref = 8.0 * query.rho() / (n as f64 + 1.0) * (x * (1.0 - x));
    let scale = pref.ln() + shift;
    let scale = scale.exp();
    Ok(MCEstimate {
        value: scale * mean,
        std_error: scale * se,
        m_samples: m,
        master_seed,
    })
}
