//! Gauss rules, tensor and periodic integration, composite rules for weights
//! with algebraic singularities, and principal-value integrals of airfoil type.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::ops::{Add, Mul};
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::specfun::lgamma;

/// Family of a quadrature rule. Jacobi weights are (1−x)^α (1+x)^β on the
/// reference interval [−1, 1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum RuleKind {
    Legendre,
    Jacobi { alpha: f64, beta: f64 },
    PeriodicTrapezoid,
}

impl RuleKind {
    fn exponents(&self) -> Option<(f64, f64)> {
        match *self {
            RuleKind::Legendre => Some((0.0, 0.0)),
            RuleKind::Jacobi { alpha, beta } => Some((alpha, beta)),
            RuleKind::PeriodicTrapezoid => None,
        }
    }
}

/// Closed interval the rule lives on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub domain: Interval,
    pub kind: RuleKind,
}

impl QuadratureRule {
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Transplant a rule onto [lo, hi]. For a Jacobi rule the weight becomes
    /// (hi−y)^α (y−lo)^β, so the weights pick up ((hi−lo)/2)^{α+β+1}.
    pub fn on_interval(&self, lo: f64, hi: f64) -> QuadratureRule {
        let Interval { lo: a0, hi: b0 } = self.domain;
        let scale = (hi - lo) / (b0 - a0);
        let wscale = match self.kind.exponents() {
            Some((al, be)) => scale.powf(al + be + 1.0),
            None => scale,
        };
        QuadratureRule {
            nodes: self.nodes.iter().map(|x| lo + (x - a0) * scale).collect(),
            weights: self.weights.iter().map(|w| w * wscale).collect(),
            domain: Interval { lo, hi },
            kind: self.kind,
        }
    }

    /// Σ w_i f(x_i).
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(*x))
            .sum()
    }
}

/// Monic three-term recurrence coefficients (a_k, b_k) of the Jacobi family
/// with weight (1−x)^α(1+x)^β: p_{k+1} = (x − a_k) p_k − b_k p_{k−1}.
/// b_0 is the total mass μ0.
pub(crate) fn jacobi_recurrence(alpha: f64, beta: f64, k: usize) -> (f64, f64) {
    let (a, b) = (alpha, beta);
    let s = a + b;
    let kf = k as f64;
    let ak = if k == 0 {
        (b - a) / (s + 2.0)
    } else {
        (b * b - a * a) / ((2.0 * kf + s) * (2.0 * kf + s + 2.0))
    };
    let bk = match k {
        0 => jacobi_mass(alpha, beta),
        1 => 4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + s).powi(2) * (3.0 + s)),
        _ => {
            let t = 2.0 * kf + s;
            4.0 * kf * (kf + a) * (kf + b) * (kf + s) / (t * t * (t + 1.0) * (t - 1.0))
        }
    };
    (ak, bk)
}

/// μ0 = ∫_{−1}^{1} (1−x)^α (1+x)^β dx.
pub(crate) fn jacobi_mass(alpha: f64, beta: f64) -> f64 {
    ((alpha + beta + 1.0) * std::f64::consts::LN_2 + lgamma(alpha + 1.0) + lgamma(beta + 1.0)
        - lgamma(alpha + beta + 2.0))
    .exp()
}

fn gauss_jacobi(alpha: f64, beta: f64, order: usize) -> QuadratureRule {
    let n = order;
    let coeffs: Vec<(f64, f64)> = (0..=n).map(|k| jacobi_recurrence(alpha, beta, k)).collect();
    let mu0 = coeffs[0].1;
    let mut jm = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        jm[(k, k)] = coeffs[k].0;
        if k + 1 < n {
            let off = coeffs[k + 1].1.sqrt();
            jm[(k, k + 1)] = off;
            jm[(k + 1, k)] = off;
        }
    }
    let mut nodes: Vec<f64> = jm.symmetric_eigenvalues().iter().copied().collect();
    nodes.sort_by(|x, y| x.partial_cmp(y).unwrap());

    // Orthonormal recurrence: sqrt(b_{k+1}) p_{k+1} = (x − a_k) p_k − sqrt(b_k) p_{k−1}.
    let eval = |x: f64| -> (f64, f64, f64) {
        let mut p_prev = 0.0;
        let mut p = 1.0 / mu0.sqrt();
        let mut d_prev = 0.0;
        let mut d = 0.0;
        let mut sumsq = p * p;
        for k in 0..n {
            let sb_next = coeffs[k + 1].1.sqrt();
            let sb = if k == 0 { 0.0 } else { coeffs[k].1.sqrt() };
            let p_next = ((x - coeffs[k].0) * p - sb * p_prev) / sb_next;
            let d_next = (p + (x - coeffs[k].0) * d - sb * d_prev) / sb_next;
            p_prev = p;
            p = p_next;
            d_prev = d;
            d = d_next;
            if k + 1 < n {
                sumsq += p * p;
            }
        }
        (p, d, sumsq)
    };

    let mut weights = Vec::with_capacity(n);
    for x in nodes.iter_mut() {
        for _ in 0..3 {
            let (p, d, _) = eval(*x);
            let step = p / d;
            if !step.is_finite() || step.abs() > 1e-6 {
                break;
            }
            *x -= step;
            if step.abs() < 1e-17 {
                break;
            }
        }
        let (_, _, sumsq) = eval(*x);
        weights.push(1.0 / sumsq);
    }
    QuadratureRule {
        nodes,
        weights,
        domain: Interval { lo: -1.0, hi: 1.0 },
        kind: if alpha == 0.0 && beta == 0.0 {
            RuleKind::Legendre
        } else {
            RuleKind::Jacobi { alpha, beta }
        },
    }
}

/// Build an `order`-point rule of the given kind on its reference domain:
/// [−1, 1] for Gauss rules, [−π, π) with midpoint nodes for the trapezoid.
pub fn gauss_rule(kind: RuleKind, order: usize) -> Result<QuadratureRule> {
    if order == 0 {
        return Err(domain("gauss_rule", "order must be at least 1"));
    }
    match kind {
        RuleKind::Legendre => Ok(gauss_jacobi(0.0, 0.0, order)),
        RuleKind::Jacobi { alpha, beta } => {
            if !(alpha > -1.0 && beta > -1.0) || !alpha.is_finite() || !beta.is_finite() {
                return Err(domain(
                    "gauss_rule",
                    format!("Jacobi exponents ({alpha}, {beta}) must exceed −1"),
                ));
            }
            Ok(gauss_jacobi(alpha, beta, order))
        }
        RuleKind::PeriodicTrapezoid => {
            let h = 2.0 * PI / order as f64;
            Ok(QuadratureRule {
                nodes: (0..order).map(|k| -PI + (k as f64 + 0.5) * h).collect(),
                weights: vec![h; order],
                domain: Interval { lo: -PI, hi: PI },
                kind,
            })
        }
    }
}

type RuleKey = (u64, u64, usize);

/// Memoized Gauss–Jacobi rule on [−1, 1].
pub(crate) fn cached_jacobi(alpha: f64, beta: f64, order: usize) -> Arc<QuadratureRule> {
    static CACHE: OnceLock<Mutex<HashMap<RuleKey, Arc<QuadratureRule>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (alpha.to_bits(), beta.to_bits(), order);
    if let Some(r) = cache.lock().unwrap().get(&key) {
        return Arc::clone(r);
    }
    let rule = Arc::new(gauss_jacobi(alpha, beta, order));
    let mut guard = cache.lock().unwrap();
    if guard.len() > 4096 {
        guard.clear();
    }
    guard.insert(key, Arc::clone(&rule));
    rule
}

/// Anything that carries a node/weight list.
pub trait NodesWeights {
    fn nodes(&self) -> &[f64];
    fn weights(&self) -> &[f64];
}

impl NodesWeights for QuadratureRule {
    fn nodes(&self) -> &[f64] {
        &self.nodes
    }
    fn weights(&self) -> &[f64] {
        &self.weights
    }
}

impl NodesWeights for MeasureRule {
    fn nodes(&self) -> &[f64] {
        &self.nodes
    }
    fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Values that can be accumulated by a quadrature sum.
pub trait Accumulate: Copy + Default + Add<Output = Self> + Mul<f64, Output = Self> {}
impl<T: Copy + Default + Add<Output = T> + Mul<f64, Output = T>> Accumulate for T {}

/// Tensor-product quadrature Σ w_{i1}…w_{id} f(x_{i1},…,x_{id}), one rule
/// per axis (d ≤ 3). Any weight function is carried by the rules.
pub fn tensor_integrate<T: Accumulate, R: NodesWeights>(
    f: impl Fn(&[f64]) -> T,
    rules: &[&R],
) -> Result<T> {
    let d = rules.len();
    if d == 0 || d > 3 {
        return Err(Error::UnsupportedDimension(d));
    }
    let mut point = vec![0.0; d];
    let mut total = T::default();
    fn recurse<T: Accumulate, R: NodesWeights>(
        axis: usize,
        w: f64,
        rules: &[&R],
        point: &mut [f64],
        f: &dyn Fn(&[f64]) -> T,
        total: &mut T,
    ) {
        let r = rules[axis];
        for (x, wi) in r.nodes().iter().zip(r.weights()) {
            point[axis] = *x;
            if axis + 1 == rules.len() {
                *total = *total + f(point) * (w * wi);
            } else {
                recurse(axis + 1, w * wi, rules, point, f, total);
            }
        }
    }
    recurse(0, 1.0, rules, &mut point, &f, &mut total);
    Ok(total)
}

/// Equal-weight midpoint sum over (−π, π)^m, m ≤ 3.
pub fn periodic_integrate<T: Accumulate>(
    f: impl Fn(&[f64]) -> T,
    m: usize,
    points_per_axis: usize,
) -> Result<T> {
    if points_per_axis == 0 {
        return Err(domain("periodic_integrate", "points_per_axis must be positive"));
    }
    if m == 0 || m > 3 {
        return Err(Error::UnsupportedDimension(m));
    }
    let rule = gauss_rule(RuleKind::PeriodicTrapezoid, points_per_axis)?;
    let rules = vec![&rule; m];
    tensor_integrate(f, &rules)
}

/// Composite rule for a measure y^{p0}(1−y)^{p1} ∏_r |y − s_r|^{e_r} dy on
/// [0, 1]. The interval is split at every s_r and each panel carries a
/// Gauss–Jacobi rule whose exponents absorb the two power laws at its ends;
/// the remaining factors are smooth on the panel and folded into the weights.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl MeasureRule {
    pub fn new(
        endpoint_exponents: (f64, f64),
        interior: &[(f64, f64)],
        order_per_panel: usize,
    ) -> Result<MeasureRule> {
        const OP: &str = "MeasureRule";
        let (p0, p1) = endpoint_exponents;
        if !(p0 > -1.0 && p1 > -1.0) {
            return Err(domain(OP, format!("endpoint exponents ({p0}, {p1}) must exceed −1")));
        }
        let mut sing: Vec<(f64, f64)> = interior.to_vec();
        for &(s, e) in &sing {
            if !(s > 0.0 && s < 1.0) {
                return Err(domain(OP, format!("interior singularity at {s} outside (0,1)")));
            }
            if !(e > -1.0) {
                return Err(domain(OP, format!("interior exponent {e} must exceed −1")));
            }
        }
        sing.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        if sing.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(domain(OP, "coincident interior singularities"));
        }
        // Break points with the exponent attached to each.
        let mut breaks = Vec::with_capacity(sing.len() + 2);
        breaks.push((0.0, p0));
        breaks.extend(sing.iter().copied());
        breaks.push((1.0, p1));

        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for (pi, pair) in breaks.windows(2).enumerate() {
            let (lo, e_lo) = pair[0];
            let (hi, e_hi) = pair[1];
            let base = cached_jacobi(e_hi, e_lo, order_per_panel);
            let rule = base.on_interval(lo, hi);
            for (y, w) in rule.nodes.iter().zip(&rule.weights) {
                let mut factor = 1.0;
                // factors not absorbed by this panel's Jacobi weight
                for (bi, &(s, e)) in breaks.iter().enumerate() {
                    if bi == pi || bi == pi + 1 || e == 0.0 {
                        continue;
                    }
                    factor *= (y - s).abs().powf(e);
                }
                nodes.push(*y);
                weights.push(w * factor);
            }
        }
        Ok(MeasureRule { nodes, weights })
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(*x))
            .sum()
    }
}

/// Integrand smooth(y) · y^{p0} (1−y)^{p1} · ∏ |y − s_r|^{e_r} on [0, 1].
pub struct SingularIntegrand<'a> {
    pub smooth_factor: &'a dyn Fn(f64) -> f64,
    pub interior_singularities: Vec<(f64, f64)>,
    pub endpoint_exponents: (f64, f64),
}

const START_ORDER: usize = 16;
const MAX_ORDER: usize = 1024;

/// Integrate a [`SingularIntegrand`] to tolerance `tol` (absolute, or
/// relative once the value exceeds 1), certified by order doubling.
pub fn singular_integrate(s: &SingularIntegrand<'_>, tol: f64) -> Result<f64> {
    if !(tol >= 1e-12) {
        return Err(domain("singular_integrate", format!("tolerance {tol} below 1e-12")));
    }
    let f = s.smooth_factor;
    let eval = |order: usize| -> Result<f64> {
        Ok(MeasureRule::new(s.endpoint_exponents, &s.interior_singularities, order)?.integrate(f))
    };
    let mut order = START_ORDER;
    let mut prev = eval(order)?;
    loop {
        order *= 2;
        let cur = eval(order)?;
        let gap = (cur - prev).abs();
        // Tolerance reduced so the certified value is well inside tol.
        if gap <= 0.1 * tol * cur.abs().max(1.0) {
            return Ok(cur);
        }
        if order >= MAX_ORDER {
            return Err(Error::Quadrature { best: cur, gap });
        }
        prev = cur;
    }
}

/// Chebyshev polynomial of the first kind T_k(s).
pub fn chebyshev_t(k: usize, s: f64) -> f64 {
    let (mut a, mut b) = (1.0, s);
    if k == 0 {
        return a;
    }
    for _ in 1..k {
        let c = 2.0 * s * b - a;
        a = b;
        b = c;
    }
    b
}

/// Chebyshev polynomial of the second kind U_k(s).
pub fn chebyshev_u(k: usize, s: f64) -> f64 {
    let (mut a, mut b) = (1.0, 2.0 * s);
    if k == 0 {
        return a;
    }
    for _ in 1..k {
        let c = 2.0 * s * b - a;
        a = b;
        b = c;
    }
    b
}

/// Convert a polynomial in y (power basis, constant first) to coefficients
/// u_i in the basis U_i(2y − 1).
pub fn power_to_chebyshev_u(power: &[f64]) -> Vec<f64> {
    // Horner: g ← c_k + y·g, with y = (1 + t)/2 and t·U_i = (U_{i+1} + U_{i−1})/2.
    let mut g: Vec<f64> = Vec::new();
    for &c in power.iter().rev() {
        let mut next = vec![0.0; g.len() + 1];
        for (i, &gi) in g.iter().enumerate() {
            next[i] += 0.5 * gi;
            next[i + 1] += 0.25 * gi;
            if i >= 1 {
                next[i - 1] += 0.25 * gi;
            }
        }
        if next.is_empty() {
            next.push(0.0);
        }
        next[0] += c;
        g = next;
    }
    g
}

/// PV ∫₀¹ h'(y) √(y(1−y)) / (x − y) dy with h'(y) = Σ u_i U_i(2y−1).
///
/// Each basis element contributes (π/2) u_i T_{i+1}(2x − 1).
pub fn principal_value_airfoil(h_prime_coeffs: &[f64], x: f64) -> Result<f64> {
    if !(x > 0.0 && x < 1.0) {
        return Err(domain("principal_value_airfoil", format!("x = {x} outside (0,1)")));
    }
    let s = 2.0 * x - 1.0;
    Ok(0.5
        * PI
        * h_prime_coeffs
            .iter()
            .enumerate()
            .map(|(i, u)| u * chebyshev_t(i + 1, s))
            .sum::<f64>())
}
