//! Natural orbitals of the large-N density matrix: the weakly singular
//! kernel, its Gegenbauer eigenfunctions, and the hypergeometric identities
//! behind the commutation with the Gegenbauer differential operator.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::quadrature::{singular_integrate, SingularIntegrand};
use crate::specfun::{gegenbauer, lgamma, luke_series, pfq_series, pochhammer};

pub use crate::exact::scaled_occupation;

/// ∫₀¹ f(Y) |X−Y|^{−ν} [Y(1−Y)]^{w} dY.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub nu: f64,
    pub weight_exponent: f64,
}

impl KernelSpec {
    pub fn new(nu: f64, weight_exponent: f64) -> Result<Self> {
        let s = KernelSpec { nu, weight_exponent };
        s.validate()?;
        Ok(s)
    }

    /// The operator of the orbital eigenproblem: ν = 1/2, weight −1/4.
    pub fn orbital() -> Self {
        KernelSpec {
            nu: 0.5,
            weight_exponent: -0.25,
        }
    }

    /// Porter–Stirling: the solution's endpoint power (ν−1)/2 sits in the
    /// weight, leaving the constant cos(πν/2)/π as the smooth part.
    pub fn porter_stirling(nu: f64) -> Result<(Self, f64)> {
        let s = KernelSpec::new(nu, 0.5 * (nu - 1.0))?;
        Ok((s, (0.5 * PI * nu).cos() / PI))
    }

    fn validate(&self) -> Result<()> {
        if !(self.nu > 0.0 && self.nu < 1.0) {
            return Err(domain("KernelSpec", format!("nu = {} outside (0,1)", self.nu)));
        }
        if !(self.weight_exponent > -1.0) {
            return Err(domain(
                "KernelSpec",
                format!("weight exponent {} must exceed −1", self.weight_exponent),
            ));
        }
        Ok(())
    }
}

/// Apply the kernel to the smooth function `f` at X.
pub fn apply_kernel(spec: &KernelSpec, f: &dyn Fn(f64) -> f64, x: f64, tol: f64) -> Result<f64> {
    spec.validate()?;
    if !(x > 0.0 && x < 1.0) {
        return Err(domain("apply_kernel", format!("X = {x} outside (0,1)")));
    }
    let w = spec.weight_exponent;
    singular_integrate(
        &SingularIntegrand {
            smooth_factor: f,
            interior_singularities: vec![(x, -spec.nu)],
            endpoint_exponents: (w, w),
        },
        tol,
    )
}

/// φ_j(X) = normalization · [X(1−X)]^{1/8} C_j^{1/4}(2X−1) on a box of length L.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Orbital {
    pub j: usize,
    pub length: f64,
    pub normalization: f64,
}

impl Orbital {
    pub fn evaluate(&self, x: f64) -> f64 {
        self.normalization * (x * (1.0 - x)).powf(0.125) * gegenbauer(0.25, self.j, 2.0 * x - 1.0)
    }
}

/// Normalized orbital; positive near X = 1.
pub fn orbital(j: usize, length: f64) -> Result<Orbital> {
    if !(length > 0.0) {
        return Err(domain("orbital", format!("box length {length} must be positive")));
    }
    let jf = j as f64;
    let log_sq = lgamma(jf + 1.0) + (jf + 0.25).ln() + 2.0 * lgamma(0.25) - lgamma(jf + 0.5) - length.ln();
    Ok(Orbital {
        j,
        length,
        normalization: (0.5 * log_sq).exp(),
    })
}

/// λ̄_j / λ̄_0 = Γ(j+1/2)/(√π j!).
pub fn occupation_ratio(j: usize) -> f64 {
    if j <= 256 {
        return (0..j).map(|k| (k as f64 + 0.5) / (k as f64 + 1.0)).product();
    }
    (lgamma(j as f64 + 0.5) - lgamma(j as f64 + 1.0)).exp() / PI.sqrt()
}

/// Projected residual of the kernel expansion
///   |X−Y|^{−1/2} = √(2/π) Γ²(1/4) Σ_j (j+1/4) C_j(2X−1) C_j(2Y−1).
///
/// Both sides are integrated against C_k^{1/4} under [·(1−·)]^{−1/4}, once in
/// each variable with the other held at X and at Y. The returned value is the
/// largest |lhs − rhs| / (1 + |rhs|) over k ≤ j_max.
pub fn verify_expansion_identity(j_max: usize, x: f64, y: f64) -> Result<f64> {
    if x == y {
        return Err(domain("verify_expansion_identity", "X = Y"));
    }
    let spec = KernelSpec::orbital();
    let mut worst: f64 = 0.0;
    for k in 0..=j_max {
        for at in [x, y] {
            let lhs = apply_kernel(&spec, &|s| gegenbauer(0.25, k, 2.0 * s - 1.0), at, 1e-11)?;
            // orthogonality leaves the k-th term: (k+1/4) h_k times the prefactor
            let rhs = scaled_occupation(k) * gegenbauer(0.25, k, 2.0 * at - 1.0);
            worst = worst.max((lhs - rhs).abs() / (1.0 + rhs.abs()));
        }
    }
    Ok(worst)
}

/// Ω_j = Γ(3/4)/Γ(5/4) · Γ(j+1/2)/j!.
pub fn omega(j: usize) -> f64 {
    let jf = j as f64;
    (lgamma(0.75) - lgamma(1.25) + lgamma(jf + 0.5) - lgamma(jf + 1.0)).exp()
}

/// One point of the hypergeometric representation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AppendixState {
    pub j: usize,
    pub k: usize,
    pub z: f64,
    pub omega_j: f64,
    pub s_value: f64,
}

impl AppendixState {
    pub fn new(j: usize, k: usize, z: f64) -> Result<Self> {
        if k > j {
            return Err(domain("AppendixState", format!("k = {k} exceeds j = {j}")));
        }
        Ok(AppendixState {
            j,
            k,
            z,
            omega_j: omega(j),
            s_value: appendix_s(j, z)?,
        })
    }
}

fn s_coeff(j: usize, k: usize) -> f64 {
    let jf = j as f64;
    pochhammer(-jf, k) * pochhammer(jf + 0.5, k) / (pochhammer(1.0, k) * pochhammer(0.75, k))
}

/// A computed quantity and the magnitude of the terms summed to get it.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Scaled {
    v: f64,
    s: f64,
}

impl Scaled {
    fn new(v: f64, s: f64) -> Self {
        Scaled { v, s }
    }

    fn times(self, c: f64) -> Self {
        Scaled::new(c * self.v, c.abs() * self.s)
    }

    fn plus(self, o: Scaled) -> Self {
        Scaled::new(self.v + o.v, self.s + o.s)
    }
}

fn f_ab(a: f64, c: f64, z: f64) -> Result<Scaled> {
    let (v, s) = pfq_series(&[a, 0.75], &[c], z)?;
    Ok(Scaled::new(v, s))
}

fn f_k(k: usize, c: f64, z: f64) -> Result<Scaled> {
    f_ab(0.25 - k as f64, c, z)
}

/// Two sides of an identity and the magnitude of the terms behind them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub scale: f64,
}

impl IdentityCheck {
    fn from_sides(l: Scaled, r: Scaled) -> Self {
        IdentityCheck {
            lhs: l.v,
            rhs: r.v,
            scale: l.s.max(r.s),
        }
    }

    /// |lhs − rhs| relative to the summed term magnitude; this is the
    /// ordinary relative error whenever no cancellation occurs.
    pub fn residual(&self) -> f64 {
        (self.lhs - self.rhs).abs() / self.scale.max(f64::MIN_POSITIVE)
    }
}

fn check_z(op: &'static str, z: f64) -> Result<()> {
    if !(z > 0.0 && z < 1.0) {
        return Err(domain(op, format!("z = {z} outside (0,1)")));
    }
    Ok(())
}

/// S_j(z) = Σ_k (−j)_k (j+1/2)_k / (k! (3/4)_k) · z^{1/4} ₂F₁(1/4−k, 3/4; 5/4; z).
pub fn appendix_s(j: usize, z: f64) -> Result<f64> {
    Ok(s_scaled(j, z)?.v)
}

fn s_scaled(j: usize, z: f64) -> Result<Scaled> {
    check_z("appendix_s", z)?;
    let mut acc = Scaled::new(0.0, 0.0);
    for k in 0..=j {
        acc = acc.plus(f_k(k, 1.25, z)?.times(s_coeff(j, k)));
    }
    Ok(acc.times(z.powf(0.25)))
}

/// K[C_j^{1/4}](ξ) = Ω_j [S_j((1+ξ)/2) + (−1)^j S_j((1−ξ)/2)].
pub fn kernel_hypergeometric(j: usize, xi: f64) -> Result<f64> {
    let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
    Ok(omega(j) * (appendix_s(j, 0.5 * (1.0 + xi))? + sign * appendix_s(j, 0.5 * (1.0 - xi))?))
}

/// L g = z(1−z) g'' − (3/4)(2z−1) g' applied to g = z^{1/4} ₂F₁(1/4−k, 3/4; 5/4; z),
/// with both derivatives from the parameter-shift rule.
pub fn l_operator_term(k: usize, z: f64) -> Result<f64> {
    Ok(l_term_scaled(k, z)?.v)
}

fn l_term_scaled(k: usize, z: f64) -> Result<Scaled> {
    check_z("l_operator_term", z)?;
    let num = [0.25 - k as f64, 0.75];
    let (d1, s1) = luke_series(0.25, 1, &num, &[1.25], z)?;
    let (d2, s2) = luke_series(0.25, 2, &num, &[1.25], z)?;
    let d2 = Scaled::new(d2, s2).times(z * (1.0 - z));
    Ok(d2.plus(Scaled::new(d1, s1).times(-0.75 * (2.0 * z - 1.0))))
}

/// L S_j(z), term by term.
pub fn l_operator_s(j: usize, z: f64) -> Result<f64> {
    Ok(l_s_scaled(j, z)?.v)
}

fn l_s_scaled(j: usize, z: f64) -> Result<Scaled> {
    let mut acc = Scaled::new(0.0, 0.0);
    for k in 0..=j {
        acc = acc.plus(l_term_scaled(k, z)?.times(s_coeff(j, k)));
    }
    Ok(acc)
}

/// L S_j(z) against −j(j+1/2) S_j(z).
pub fn l_eigenrelation(j: usize, z: f64) -> Result<IdentityCheck> {
    let jf = j as f64;
    Ok(IdentityCheck::from_sides(
        l_s_scaled(j, z)?,
        s_scaled(j, z)?.times(-jf * (jf + 0.5)),
    ))
}

/// Both sides of the first contiguity relation
///   −(3/16)(1−z) F(c=−3/4) = (1/16)[(6−4k)z − 3] F(c=1/4) − (kz/2) F(c=5/4),
/// with F(c) = ₂F₁(1/4−k, 3/4; c; z).
pub fn contiguity_one(k: usize, z: f64) -> Result<IdentityCheck> {
    check_z("contiguity_one", z)?;
    let kf = k as f64;
    let lhs = f_k(k, -0.75, z)?.times(-0.1875 * (1.0 - z));
    let rhs = f_k(k, 0.25, z)?
        .times(((6.0 - 4.0 * kf) * z - 3.0) / 16.0)
        .plus(f_k(k, 1.25, z)?.times(-0.5 * kf * z));
    Ok(IdentityCheck::from_sides(lhs, rhs))
}

/// Both sides of the second contiguity relation
///   −(1/4) F(1/4−k; 1/4) = −k F(1/4−k; 5/4) − (1/4−k) F(1/4−(k−1); 5/4).
pub fn contiguity_two(k: usize, z: f64) -> Result<IdentityCheck> {
    check_z("contiguity_two", z)?;
    let kf = k as f64;
    let lhs = f_k(k, 0.25, z)?.times(-0.25);
    let rhs = f_k(k, 1.25, z)?
        .times(-kf)
        .plus(f_ab(1.25 - kf, 1.25, z)?.times(-(0.25 - kf)));
    Ok(IdentityCheck::from_sides(lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::MeasureRule;
    use crate::specfun::log_beta;
    use approx::assert_relative_eq;

    #[test]
    fn ground_state_eigenvalue() {
        let v = apply_kernel(&KernelSpec::orbital(), &|_| 1.0, 0.5, 1e-12).unwrap();
        assert_relative_eq!(v, PI * 2f64.sqrt(), max_relative = 1e-11);
        assert_relative_eq!(scaled_occupation(0), PI * 2f64.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(scaled_occupation(1), PI / 2f64.sqrt(), max_relative = 1e-14);
    }

    #[test]
    fn second_eigenfunction() {
        let c2 = |s: f64| gegenbauer(0.25, 2, 2.0 * s - 1.0);
        let v = apply_kernel(&KernelSpec::orbital(), &c2, 0.3, 1e-12).unwrap();
        let lam2 = (2.0 * PI).sqrt() * (lgamma(2.5)).exp() / 2.0;
        assert_relative_eq!(v, lam2 * c2(0.3), max_relative = 1e-10);
    }

    #[test]
    fn porter_stirling_constant() {
        for nu in [0.25, 0.5, 0.75] {
            let (spec, c) = KernelSpec::porter_stirling(nu).unwrap();
            for x in [0.05, 0.6, 0.93] {
                assert_relative_eq!(apply_kernel(&spec, &|_| c, x, 1e-12).unwrap(), 1.0, max_relative = 1e-10);
            }
        }
        assert!(KernelSpec::new(1.0, 0.0).is_err());
    }

    #[test]
    fn orbital_normalization_and_ground_state_constant() {
        let len = 2.5;
        let o = orbital(0, len).unwrap();
        let a = len / PI * log_beta(0.75, 0.75).unwrap().exp();
        assert_relative_eq!(o.normalization, 1.0 / a.sqrt(), max_relative = 1e-13);
        // φ_jφ_k/√(X(1−X)) carries [X(1−X)]^{−1/4} times a polynomial
        let rule = MeasureRule::new((-0.25, -0.25), &[], 40).unwrap();
        for j in 0..6 {
            for k in 0..6 {
                let (pj, pk) = (orbital(j, len).unwrap(), orbital(k, len).unwrap());
                let g = len / PI
                    * rule.integrate(|x| pj.evaluate(x) * pk.evaluate(x) / (x * (1.0 - x)).powf(0.25));
                let want = if j == k { 1.0 } else { 0.0 };
                assert!((g - want).abs() < 1e-12, "({j},{k}) {g}");
            }
            assert!(orbital(j, 1.0).unwrap().evaluate(1.0 - 1e-9) > 0.0);
        }
    }

    #[test]
    fn occupation_ratio_recurrence() {
        for j in 0..30 {
            assert_relative_eq!(
                occupation_ratio(j + 1) / occupation_ratio(j),
                (j as f64 + 0.5) / (j as f64 + 1.0),
                max_relative = 1e-13
            );
            assert_relative_eq!(
                scaled_occupation(j) / scaled_occupation(0),
                occupation_ratio(j),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn expansion_identity_projected() {
        assert!(verify_expansion_identity(0, 0.2, 0.7).unwrap() < 1e-9);
        assert!(verify_expansion_identity(3, 0.25, 0.6).unwrap() < 1e-9);
        assert!(verify_expansion_identity(2, 0.4, 0.4).is_err());
    }

    #[test]
    fn hypergeometric_representation_matches_kernel() {
        // the [−1,1] operator at ξ equals the [0,1] operator at X = (1+ξ)/2
        for j in 0..5 {
            for xi in [-0.6, 0.0, 0.3] {
                let x = 0.5 * (1.0 + xi);
                let direct = apply_kernel(&KernelSpec::orbital(), &|s| gegenbauer(0.25, j, 2.0 * s - 1.0), x, 1e-12)
                    .unwrap();
                assert_relative_eq!(kernel_hypergeometric(j, xi).unwrap(), direct, max_relative = 1e-9, epsilon = 1e-12);
            }
        }
        let st = AppendixState::new(3, 1, 0.4).unwrap();
        assert!(st.omega_j > 0.0 && st.s_value.is_finite());
        assert!(AppendixState::new(1, 2, 0.4).is_err());
    }

    #[test]
    fn single_term_s() {
        let z: f64 = 0.5;
        let want = z.powf(0.25)
            * crate::specfun::gauss_2f1(crate::specfun::HypergeometricArgs::new(0.25, 0.75, 1.25, z)).unwrap();
        assert_eq!(appendix_s(0, z).unwrap(), want);
    }

    #[test]
    fn l_eigenrelation_holds() {
        for j in 0..=5 {
            for z in [0.2, 0.5, 0.8] {
                let c = l_eigenrelation(j, z).unwrap();
                assert!(c.residual() <= 1e-9, "j={j} z={z} {c:?}");
            }
        }
    }

    #[test]
    fn contiguity_relations() {
        for k in 0..=6 {
            for z in [0.1, 0.4, 0.5, 0.9] {
                let c = contiguity_one(k, z).unwrap();
                assert!(c.residual() <= 1e-10, "one k={k} z={z} {c:?}");
                let c = contiguity_two(k, z).unwrap();
                assert!(c.residual() <= 1e-10, "two k={k} z={z} {c:?}");
            }
        }
    }

    #[test]
    fn derivative_rule_vs_finite_difference() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let g = |k: usize, z: f64| z.powf(0.25) * f_k(k, 1.25, z).unwrap().v;
        for _ in 0..20 {
            let z: f64 = rng.random_range(0.05..0.9);
            let k = rng.random_range(0..5usize);
            let h = 1e-5;
            let fd = (g(k, z + h) - g(k, z - h)) / (2.0 * h);
            let d = crate::specfun::luke_derivative(0.25, 1, &[0.25 - k as f64, 0.75], &[1.25], z).unwrap();
            assert_relative_eq!(d, fd, max_relative = 1e-6);
        }
    }
}
