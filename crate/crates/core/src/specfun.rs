//! Scalar special functions: log-gamma, Barnes G, Gauss and generalized
//! hypergeometric series, Gegenbauer polynomials and the beta function.
//!
//! Everything that can overflow is returned in log space. Products of many
//! gamma functions are assembled with [`LogMagnitude`].

use std::f64::consts::PI;
use std::ops::{Div, Mul};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const LN_2PI: f64 = 1.837_877_066_409_345_5;
/// ζ'(−1) = 1/12 − ln A, with A the Glaisher–Kinkelin constant.
const ZETA_PRIME_MINUS_ONE: f64 = -0.165_421_143_700_450_93;

/// A real number stored as `sign · exp(log_abs)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogMagnitude {
    pub log_abs: f64,
    pub sign: i8,
}

impl LogMagnitude {
    pub const ONE: LogMagnitude = LogMagnitude {
        log_abs: 0.0,
        sign: 1,
    };
    pub const ZERO: LogMagnitude = LogMagnitude {
        log_abs: f64::NEG_INFINITY,
        sign: 0,
    };

    pub fn from_log(log_abs: f64) -> Self {
        LogMagnitude { log_abs, sign: 1 }
    }

    pub fn from_value(v: f64) -> Self {
        if v == 0.0 {
            Self::ZERO
        } else {
            LogMagnitude {
                log_abs: v.abs().ln(),
                sign: if v > 0.0 { 1 } else { -1 },
            }
        }
    }

    pub fn value(&self) -> f64 {
        match self.sign {
            0 => 0.0,
            s => f64::from(s) * self.log_abs.exp(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    pub fn recip(self) -> Self {
        assert!(self.sign != 0, "reciprocal of zero");
        LogMagnitude {
            log_abs: -self.log_abs,
            sign: self.sign,
        }
    }

    pub fn powf(self, p: f64) -> Self {
        assert!(self.sign > 0 || p.fract() == 0.0, "non-integer power of a negative value");
        if self.sign == 0 {
            return Self::ZERO;
        }
        let sign = if self.sign < 0 && (p as i64) % 2 != 0 { -1 } else { 1 };
        LogMagnitude {
            log_abs: self.log_abs * p,
            sign,
        }
    }
}

impl Mul for LogMagnitude {
    type Output = LogMagnitude;
    fn mul(self, rhs: Self) -> Self {
        if self.sign == 0 || rhs.sign == 0 {
            return Self::ZERO;
        }
        LogMagnitude {
            log_abs: self.log_abs + rhs.log_abs,
            sign: self.sign * rhs.sign,
        }
    }
}

impl Div for LogMagnitude {
    type Output = LogMagnitude;
    fn div(self, rhs: Self) -> Self {
        self * rhs.recip()
    }
}

impl std::iter::Product for LogMagnitude {
    fn product<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::ONE, |acc, x| acc * x)
    }
}

// ---------------------------------------------------------------------------
// log-gamma
// ---------------------------------------------------------------------------

/// ζ(k) − 1 for k = 0..=MAX_ZETA (entries 0 and 1 unused).
const MAX_ZETA: usize = 40;

fn zeta_minus_one_table() -> &'static [f64; MAX_ZETA + 1] {
    static TABLE: OnceLock<[f64; MAX_ZETA + 1]> = OnceLock::new();
    TABLE.get_or_init(|| {
        // Direct sum over 2..N plus an Euler–Maclaurin tail from N.
        const N: usize = 20;
        // B_{2j} / (2j)!
        const BERN_OVER_FACT: [f64; 6] = [
            1.0 / 12.0,
            -1.0 / 720.0,
            1.0 / 30240.0,
            -1.0 / 1209600.0,
            1.0 / 47900160.0,
            -691.0 / 1307674368000.0,
        ];
        let mut t = [0.0; MAX_ZETA + 1];
        for (k, slot) in t.iter_mut().enumerate().skip(2) {
            let s = k as f64;
            let nf = N as f64;
            let mut tail = nf.powf(1.0 - s) / (s - 1.0) + 0.5 * nf.powf(-s);
            // rising product s (s+1) ... (s+2j-2)
            let mut rising = s;
            for (j, &bf) in BERN_OVER_FACT.iter().enumerate() {
                let j = j + 1;
                tail += bf * rising * nf.powf(-s - 2.0 * j as f64 + 1.0);
                rising *= (s + 2.0 * j as f64 - 1.0) * (s + 2.0 * j as f64);
            }
            let mut sum = tail;
            for n in (2..N).rev() {
                sum += (n as f64).powf(-s);
            }
            *slot = sum;
        }
        t
    })
}

/// ln Γ(2 + ε) for |ε| ≤ 1/2 (free of cancellation near ε = 0).
fn lgamma_two_plus(eps: f64) -> f64 {
    let z = zeta_minus_one_table();
    let mut sum = 0.0;
    let mut pow = eps * eps;
    for (k, zk) in z.iter().enumerate().skip(2) {
        let term = if k % 2 == 0 { 1.0 } else { -1.0 } * zk * pow / k as f64;
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
        pow *= eps;
    }
    eps * (1.0 - EULER_GAMMA) + sum
}

fn stirling_lgamma(x: f64) -> f64 {
    // B_{2k} / (2k (2k-1))
    const C: [f64; 8] = [
        1.0 / 12.0,
        -1.0 / 360.0,
        1.0 / 1260.0,
        -1.0 / 1680.0,
        1.0 / 1188.0,
        -691.0 / 360360.0,
        1.0 / 156.0,
        -3617.0 / 122400.0,
    ];
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut corr = 0.0;
    let mut p = inv;
    for c in C {
        corr += c * p;
        p *= inv2;
    }
    (x - 0.5) * x.ln() - x + 0.5 * LN_2PI + corr
}

/// ln Γ(x) for x > 0 without domain checking.
pub(crate) fn lgamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x < 0.5 {
        lgamma(x + 1.0) - x.ln()
    } else if x < 1.5 {
        // ln Γ(1+ε) = ln Γ(2+ε) − ln(1+ε)
        let eps = x - 1.0;
        lgamma_two_plus(eps) - eps.ln_1p()
    } else if x < 2.5 {
        lgamma_two_plus(x - 2.0)
    } else if x < 15.0 {
        let mut y = x;
        let mut prod = 1.0;
        while y >= 2.5 {
            y -= 1.0;
            prod *= y;
        }
        prod.ln() + lgamma_two_plus(y - 2.0)
    } else {
        stirling_lgamma(x)
    }
}

/// Natural log of Γ(x) for x > 0.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain("log_gamma", format!("x = {x} must be positive and finite")));
    }
    Ok(lgamma(x))
}

/// sin(πx) with exact zeros at the integers.
pub(crate) fn sin_pi(x: f64) -> f64 {
    let r = x - 2.0 * (x / 2.0).floor(); // r in [0, 2)
    if r == 0.0 || r == 1.0 {
        return 0.0;
    }
    if r < 0.5 {
        (PI * r).sin()
    } else if r < 1.5 {
        (PI * (1.0 - r)).sin()
    } else {
        (PI * (r - 2.0)).sin()
    }
}

/// Γ(x) as a signed log magnitude, valid for every real x that is not a
/// non-positive integer (reflection formula below 1/2).
pub fn log_gamma_signed(x: f64) -> Result<LogMagnitude> {
    if !x.is_finite() || (x <= 0.0 && x.fract() == 0.0) {
        return Err(domain("log_gamma_signed", format!("pole or non-finite argument {x}")));
    }
    if x > 0.0 {
        return Ok(LogMagnitude::from_log(lgamma(x)));
    }
    // Γ(x) = π / (sin(πx) Γ(1−x))
    let s = sin_pi(x);
    Ok(LogMagnitude {
        log_abs: PI.ln() - s.abs().ln() - lgamma(1.0 - x),
        sign: if s > 0.0 { 1 } else { -1 },
    })
}

/// ln B(a, b) for a, b > 0.
pub fn log_beta(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) {
        return Err(domain("log_beta", format!("a = {a}, b = {b} must be positive")));
    }
    Ok(lgamma(a) + lgamma(b) - lgamma(a + b))
}

// ---------------------------------------------------------------------------
// Barnes G
// ---------------------------------------------------------------------------

/// Shift target for the asymptotic series of ln G.
const BARNES_SHIFT: f64 = 20.0;

fn barnes_asymptotic(w: f64) -> f64 {
    // ln G(1+u) = u²/2 ln u − 3u²/4 + (u/2) ln 2π − (1/12) ln u + ζ'(−1)
    //             + Σ_{k≥1} B_{2k+2} / (4k(k+1) u^{2k})
    const B: [f64; 7] = [
        -1.0 / 30.0,     // B_4
        1.0 / 42.0,      // B_6
        -1.0 / 30.0,     // B_8
        5.0 / 66.0,      // B_10
        -691.0 / 2730.0, // B_12
        7.0 / 6.0,       // B_14
        -3617.0 / 510.0, // B_16
    ];
    let u = w - 1.0;
    let lu = u.ln();
    let inv2 = 1.0 / (u * u);
    let mut series = 0.0;
    let mut p = inv2;
    for (i, b) in B.iter().enumerate() {
        let k = (i + 1) as f64;
        series += b / (4.0 * k * (k + 1.0)) * p;
        p *= inv2;
    }
    0.5 * u * u * lu - 0.75 * u * u + 0.5 * u * LN_2PI - lu / 12.0 + ZETA_PRIME_MINUS_ONE + series
}

/// Natural log of the Barnes G-function for z > 0.
///
/// Shifts the argument up to at least 20 with ln G(z+1) = ln Γ(z) + ln G(z)
/// and evaluates the large-argument expansion there.
pub fn log_barnes_g(z: f64) -> Result<f64> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(domain("log_barnes_g", format!("z = {z} must be positive and finite")));
    }
    Ok(lbarnes(z))
}

pub(crate) fn lbarnes(z: f64) -> f64 {
    if z >= BARNES_SHIFT {
        return barnes_asymptotic(z);
    }
    let k = (BARNES_SHIFT - z).ceil() as usize;
    let mut shift = 0.0;
    for i in 0..k {
        shift += lgamma(z + i as f64);
    }
    barnes_asymptotic(z + k as f64) - shift
}

// ---------------------------------------------------------------------------
// Hypergeometric series
// ---------------------------------------------------------------------------

/// Parameters of a Gauss hypergeometric function ₂F₁(a, b; c; z).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HypergeometricArgs {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub z: f64,
}

impl HypergeometricArgs {
    pub fn new(a: f64, b: f64, c: f64, z: f64) -> Self {
        HypergeometricArgs { a, b, c, z }
    }
}

/// Largest |z| accepted for a non-terminating series.
pub const SERIES_Z_MAX: f64 = 0.95;

fn nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x.fract() == 0.0
}

/// Rising factorial (a)_k.
pub fn pochhammer(a: f64, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (a + i as f64))
}

/// Generalized hypergeometric series pFq(num; den; z).
///
/// Accepts terminating series for any z, otherwise p ≤ q + 1 with
/// |z| ≤ [`SERIES_Z_MAX`] when p = q + 1.
pub fn hypergeometric_pfq(num: &[f64], den: &[f64], z: f64) -> Result<f64> {
    let (sum, sum_abs) = pfq_series(num, den, z)?;
    if sum_abs * 2.2e-16 > 1e-12 * sum.abs() {
        return Err(Error::NonConvergence {
            op: "hypergeometric_pfq",
            detail: format!("cancellation: Σ|terms| = {sum_abs:e} against result {sum:e}"),
        });
    }
    Ok(sum)
}

/// The series value together with Σ|terms|, without the cancellation guard.
/// Callers comparing identities use the second component as the scale.
pub(crate) fn pfq_series(num: &[f64], den: &[f64], z: f64) -> Result<(f64, f64)> {
    const OP: &str = "hypergeometric_pfq";
    if let Some(c) = den.iter().find(|c| nonpositive_integer(**c)) {
        return Err(domain(OP, format!("denominator parameter {c} is a non-positive integer")));
    }
    let terminating = num.iter().any(|a| nonpositive_integer(*a));
    if !terminating {
        if num.len() > den.len() + 1 {
            return Err(domain(OP, "divergent series (p > q + 1)"));
        }
        if num.len() == den.len() + 1 && z.abs() > SERIES_Z_MAX {
            return Err(domain(
                OP,
                format!("|z| = {} exceeds {SERIES_Z_MAX} for a non-terminating series", z.abs()),
            ));
        }
    }
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut sum_abs = 1.0;
    let mut small_run = 0;
    for k in 0..100_000usize {
        let kf = k as f64;
        let mut ratio = z / (kf + 1.0);
        for a in num {
            ratio *= a + kf;
        }
        for c in den {
            ratio /= c + kf;
        }
        term *= ratio;
        if term == 0.0 {
            return Ok((sum, sum_abs));
        }
        sum += term;
        sum_abs += term.abs();
        if term.abs() <= 1e-17 * sum_abs {
            small_run += 1;
            if small_run >= 3 {
                return Ok((sum, sum_abs));
            }
        } else {
            small_run = 0;
        }
    }
    Err(Error::NonConvergence {
        op: OP,
        detail: format!("series not converged after 100000 terms at z = {z}, partial sum {sum}"),
    })
}

/// Gauss hypergeometric function by direct series.
///
/// Terminating (polynomial) cases are exact up to rounding for any z; other
/// cases require |z| ≤ 0.95. No analytic continuation is attempted.
pub fn gauss_2f1(args: HypergeometricArgs) -> Result<f64> {
    let HypergeometricArgs { a, b, c, z } = args;
    if !(a.is_finite() && b.is_finite() && c.is_finite() && z.is_finite()) {
        return Err(domain("gauss_2f1", "non-finite parameter"));
    }
    hypergeometric_pfq(&[a, b], &[c], z)
}

/// n-th derivative of z^δ · pFq(num; den; z), evaluated as
/// (δ−n+1)_n z^{δ−n} · p+1Fq+1(δ+1, num; δ+1−n, den; z).
pub fn luke_derivative(delta: f64, n: usize, num: &[f64], den: &[f64], z: f64) -> Result<f64> {
    let (v, scale) = luke_series(delta, n, num, den, z)?;
    if scale * 2.2e-16 > 1e-12 * v.abs() {
        return Err(Error::NonConvergence {
            op: "luke_derivative",
            detail: format!("cancellation: scale {scale:e} against result {v:e}"),
        });
    }
    Ok(v)
}

/// [`luke_derivative`] with the magnitude of its summed terms.
pub(crate) fn luke_series(delta: f64, n: usize, num: &[f64], den: &[f64], z: f64) -> Result<(f64, f64)> {
    if !(z > 0.0) {
        return Err(domain("luke_derivative", "z must be positive"));
    }
    let nf = n as f64;
    let mut num2 = Vec::with_capacity(num.len() + 1);
    num2.push(delta + 1.0);
    num2.extend_from_slice(num);
    let mut den2 = Vec::with_capacity(den.len() + 1);
    den2.push(delta + 1.0 - nf);
    den2.extend_from_slice(den);
    let (f, f_abs) = pfq_series(&num2, &den2, z)?;
    let c = pochhammer(delta - nf + 1.0, n) * z.powf(delta - nf);
    Ok((c * f, c.abs() * f_abs))
}

// ---------------------------------------------------------------------------
// Gegenbauer polynomials
// ---------------------------------------------------------------------------

/// Degree and order of a Gegenbauer polynomial; this crate only uses α = 1/4.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GegenbauerIndex {
    pub j: usize,
    pub alpha: f64,
}

impl GegenbauerIndex {
    pub fn quarter(j: usize) -> Self {
        GegenbauerIndex { j, alpha: 0.25 }
    }
}

/// C_j^α(x) by the three-term recurrence.
pub fn gegenbauer(alpha: f64, j: usize, x: f64) -> f64 {
    if j == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = 2.0 * alpha * x;
    for k in 2..=j {
        let kf = k as f64;
        let next = (2.0 * (kf + alpha - 1.0) * x * cur - (kf + 2.0 * alpha - 2.0) * prev) / kf;
        prev = cur;
        cur = next;
    }
    cur
}

/// C_j^{1/4}(x) on [−1, 1].
pub fn gegenbauer_quarter(index: GegenbauerIndex, x: f64) -> Result<f64> {
    if index.alpha != 0.25 {
        return Err(domain("gegenbauer_quarter", format!("alpha = {} (expected 1/4)", index.alpha)));
    }
    if !(x.abs() <= 1.0) {
        return Err(domain("gegenbauer_quarter", format!("|x| = {} > 1", x.abs())));
    }
    Ok(gegenbauer(0.25, index.j, x))
}
