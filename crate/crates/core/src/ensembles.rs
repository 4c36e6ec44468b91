//! Exact and Markov-chain sampling of Jacobi unitary ensemble eigenvalues.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::exact::EnsembleParams;

/// A reproducible random stream: one ChaCha8 generator seeded from the master
/// seed, with `stream_index` selecting an independent keystream.
#[derive(Debug, Clone)]
pub struct RngStream {
    pub master_seed: u64,
    pub stream_index: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
        rng.set_stream(stream_index);
        RngStream {
            master_seed,
            stream_index,
            rng,
        }
    }

    /// Uniform on the open interval (0, 1).
    pub fn uniform(&mut self) -> f64 {
        loop {
            let u: f64 = self.rng.random();
            if u > 0.0 {
                return u;
            }
        }
    }

    pub fn normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }
}

/// Gamma variate with density x^{shape−1} e^{−x/scale} / (Γ(shape) scale^shape).
///
/// Marsaglia–Tsang squeeze for shape ≥ 1; smaller shapes are boosted through
/// shape + 1 and a uniform power.
pub fn draw_gamma(shape: f64, scale: f64, stream: &mut RngStream) -> Result<f64> {
    if !(shape > 0.0 && scale > 0.0) || !shape.is_finite() || !scale.is_finite() {
        return Err(domain("draw_gamma", format!("shape = {shape}, scale = {scale}")));
    }
    Ok(scale * gamma_unit(shape, stream))
}

fn gamma_unit(shape: f64, stream: &mut RngStream) -> f64 {
    if shape < 1.0 {
        let g = gamma_unit(shape + 1.0, stream);
        return g * stream.uniform().powf(1.0 / shape);
    }
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let z = stream.normal();
        let v = 1.0 + c * z;
        if v <= 0.0 {
            continue;
        }
        let v = v * v * v;
        let u = stream.uniform();
        if u < 1.0 - 0.0331 * z.powi(4) || u.ln() < 0.5 * z * z + d * (1.0 - v + v.ln()) {
            return d * v;
        }
    }
}

/// Beta(α, β) variate as a ratio of gamma variates.
pub fn draw_beta(alpha: f64, beta: f64, stream: &mut RngStream) -> Result<f64> {
    if !(alpha > 0.0 && beta > 0.0) {
        return Err(domain("draw_beta", format!("alpha = {alpha}, beta = {beta}")));
    }
    loop {
        let x = gamma_unit(alpha, stream);
        let y = gamma_unit(beta, stream);
        let b = x / (x + y);
        if b > 0.0 && b < 1.0 {
            return Ok(b);
        }
    }
}

/// Random coefficients of the three-term recurrence whose degree-n member
/// has JUE(1/2, 1/2) distributed zeros.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecurrenceDraw {
    pub b1: f64,
    /// (w0, w1, w2) for j = 2..=n
    pub steps: Vec<(f64, f64, f64)>,
}

impl RecurrenceDraw {
    /// a, c ~ Gamma(n+1−j+1/2) and b ~ Gamma(j−1), all with unit scale, so
    /// that (w0, w1, w2) is Dirichlet distributed.
    pub fn draw(n: usize, stream: &mut RngStream) -> Result<RecurrenceDraw> {
        if n == 0 {
            return Err(domain("RecurrenceDraw", "n must be positive"));
        }
        let nf = n as f64;
        let b1 = draw_beta(nf + 0.5, nf + 0.5, stream)?;
        let mut steps = Vec::with_capacity(n.saturating_sub(1));
        for j in 2..=n {
            let jf = j as f64;
            let a = gamma_unit(nf + 1.0 - jf + 0.5, stream);
            let b = gamma_unit(jf - 1.0, stream);
            let c = gamma_unit(nf + 1.0 - jf + 0.5, stream);
            let d = a + b + c;
            let (w0, w1) = (a / d, b / d);
            steps.push((w0, w1, 1.0 - w0 - w1));
        }
        Ok(RecurrenceDraw { b1, steps })
    }

    pub fn degree(&self) -> usize {
        self.steps.len() + 1
    }

    /// A_n(x) as (mantissa, ln scale); the value is mantissa · e^{scale}.
    pub fn evaluate_scaled(&self, x: f64) -> (f64, f64) {
        let mut prev = 1.0;
        let mut cur = x - self.b1;
        let mut log_scale = 0.0;
        for &(w0, w1, w2) in &self.steps {
            let next = (w2 * (x - 1.0) + w0 * x) * cur + w1 * x * (x - 1.0) * prev;
            prev = cur;
            cur = next;
            let m = cur.abs().max(prev.abs());
            if m > 1e100 || (m < 1e-100 && m > 0.0) {
                prev /= m;
                cur /= m;
                log_scale += m.ln();
            }
        }
        (cur, log_scale)
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        let (m, s) = self.evaluate_scaled(x);
        m * s.exp()
    }

    fn sign_at(&self, x: f64) -> f64 {
        self.evaluate_scaled(x).0.signum()
    }

    /// All n zeros in (0, 1), sorted. Sign changes are located on a cosine
    /// grid of 20n points (doubled up to four times) and bisected to 1e−13.
    pub fn roots(&self) -> Result<Vec<f64>> {
        let n = self.degree();
        let mut grid_size = 20 * n;
        for _ in 0..=4 {
            let grid: Vec<f64> = (0..=grid_size)
                .map(|i| 0.5 * (1.0 - (PI * i as f64 / grid_size as f64).cos()))
                .collect();
            let signs: Vec<f64> = grid.iter().map(|&x| self.sign_at(x)).collect();
            let brackets: Vec<(f64, f64)> = (0..grid_size)
                .filter(|&i| signs[i] * signs[i + 1] < 0.0 || signs[i + 1] == 0.0)
                .map(|i| (grid[i], grid[i + 1]))
                .collect();
            if brackets.len() == n {
                return Ok(brackets.into_iter().map(|(a, b)| self.bisect(a, b)).collect());
            }
            grid_size *= 2;
        }
        Err(Error::Sampling(format!(
            "could not isolate {n} sign changes of A_n on a {}-point grid",
            grid_size / 2
        )))
    }

    fn bisect(&self, mut lo: f64, mut hi: f64) -> f64 {
        let s_lo = self.sign_at(lo);
        if self.sign_at(hi) == 0.0 {
            return hi;
        }
        while hi - lo > 1e-13 {
            let mid = 0.5 * (lo + hi);
            let s = self.sign_at(mid);
            if s == 0.0 {
                return mid;
            }
            if s == s_lo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleProvenance {
    Recurrence,
    Metropolis,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenvalueSample {
    pub points: Vec<f64>,
    pub params: EnsembleParams,
    pub provenance: SampleProvenance,
    /// Metropolis acceptance rate after burn-in.
    pub acceptance: Option<f64>,
    pub warning: Option<String>,
}

/// Attempts at drawing a recurrence whose roots can all be isolated.
const MAX_RESAMPLES: usize = 8;

/// Exact JUE(1/2, 1/2) eigenvalues from the random recurrence.
pub fn sample_jue_halfhalf(n: usize, stream: &mut RngStream) -> Result<EigenvalueSample> {
    let params = EnsembleParams::jue(n, 0.5, 0.5)?;
    let mut last = None;
    for _ in 0..MAX_RESAMPLES {
        let draw = RecurrenceDraw::draw(n, stream)?;
        match draw.roots() {
            Ok(points) => {
                return Ok(EigenvalueSample {
                    points,
                    params,
                    provenance: SampleProvenance::Recurrence,
                    acceptance: None,
                    warning: None,
                })
            }
            Err(e) => last = Some(e),
        }
    }
    Err(last.unwrap())
}

pub const BURN_IN_SWEEPS: usize = 500;
pub const THINNING: usize = 10;
const TARGET_ACCEPTANCE: f64 = 0.4;

/// One configuration from x^{λ1}(1−x)^{λ2} Δ(x)² on [0,1]^n by random-walk
/// Metropolis. The first [`BURN_IN_SWEEPS`] sweeps adapt the proposal width
/// toward 40% acceptance; the remaining `sweeps − BURN_IN_SWEEPS` sweeps run
/// with a frozen width and the final state is returned.
pub fn sample_jue_metropolis(
    params: &EnsembleParams,
    sweeps: usize,
    stream: &mut RngStream,
) -> Result<EigenvalueSample> {
    params.validate("sample_jue_metropolis")?;
    if sweeps <= BURN_IN_SWEEPS {
        return Err(domain(
            "sample_jue_metropolis",
            format!("sweeps = {sweeps} must exceed the burn-in of {BURN_IN_SWEEPS}"),
        ));
    }
    let n = params.n;
    let (l1, l2) = (params.lambda1, params.lambda2);
    let mut x: Vec<f64> = (0..n)
        .map(|i| 0.5 * (1.0 - (PI * (i as f64 + 0.5) / n as f64).cos()))
        .collect();
    let mut sigma = 0.5 / n as f64;

    let step = |x: &mut [f64], sigma: f64, stream: &mut RngStream| -> bool {
        let i = (stream.uniform() * n as f64) as usize % n;
        let old = x[i];
        let new = old + sigma * stream.normal();
        if !(new > 0.0 && new < 1.0) {
            return false;
        }
        let mut dlog = l1 * (new / old).ln() + l2 * ((1.0 - new) / (1.0 - old)).ln();
        for (j, &xj) in x.iter().enumerate() {
            if j != i {
                dlog += 2.0 * ((new - xj) / (old - xj)).abs().ln();
            }
        }
        if dlog >= 0.0 || stream.uniform().ln() < dlog {
            x[i] = new;
            true
        } else {
            false
        }
    };

    const BLOCK: usize = 50;
    for block in 0..BURN_IN_SWEEPS / BLOCK {
        let mut acc = 0usize;
        for _ in 0..BLOCK * n {
            acc += step(&mut x, sigma, stream) as usize;
        }
        let rate = acc as f64 / (BLOCK * n) as f64;
        // shrink the adjustment as burn-in proceeds
        let gain = 2.0 / (1.0 + block as f64).sqrt();
        sigma = (sigma * (gain * (rate - TARGET_ACCEPTANCE)).exp()).clamp(1e-6, 1.0);
    }
    let production = sweeps - BURN_IN_SWEEPS;
    let mut acc = 0usize;
    for _ in 0..production * n {
        acc += step(&mut x, sigma, stream) as usize;
    }
    let rate = acc as f64 / (production * n) as f64;
    let warning = if rate <= 0.05 || rate >= 0.95 {
        Some(format!("Metropolis acceptance rate {rate:.3} outside (0.05, 0.95)"))
    } else {
        None
    };
    x.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(EigenvalueSample {
        points: x,
        params: *params,
        provenance: SampleProvenance::Metropolis,
        acceptance: Some(rate),
        warning,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mean_se(v: &[f64]) -> (f64, f64) {
        let n = v.len() as f64;
        let m = v.iter().sum::<f64>() / n;
        let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
        (m, (var / n).sqrt())
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let mut a = RngStream::new(7, 3);
        let mut b = RngStream::new(7, 3);
        let mut c = RngStream::new(7, 4);
        let va: Vec<f64> = (0..5).map(|_| a.uniform()).collect();
        let vb: Vec<f64> = (0..5).map(|_| b.uniform()).collect();
        let vc: Vec<f64> = (0..5).map(|_| c.uniform()).collect();
        assert_eq!(va, vb);
        assert_ne!(va, vc);
    }

    #[test]
    fn gamma_means() {
        for (shape, scale, want) in [(1.0, 1.0, 1.0), (2.5, 1.0, 2.5), (0.5, 0.5, 0.25)] {
            let mut s = RngStream::new(11, 0);
            let v: Vec<f64> = (0..100_000).map(|_| draw_gamma(shape, scale, &mut s).unwrap()).collect();
            let (m, se) = mean_se(&v);
            assert!((m - want).abs() < 3.0 * se, "shape {shape}: {m} ± {se}");
        }
        assert!(draw_gamma(0.0, 1.0, &mut RngStream::new(1, 1)).is_err());
    }

    #[test]
    fn beta_moments() {
        let mut s = RngStream::new(5, 9);
        let v: Vec<f64> = (0..100_000).map(|_| draw_beta(1.0, 1.0, &mut s).unwrap()).collect();
        let (m, _) = mean_se(&v);
        assert!((m - 0.5).abs() < 3.0 / (12.0f64 * 1e5).sqrt());
        let v: Vec<f64> = (0..100_000).map(|_| draw_beta(1.5, 1.5, &mut s).unwrap()).collect();
        let (m, se) = mean_se(&v);
        assert!((m - 0.5).abs() < 3.0 * se);
        let sq: Vec<f64> = v.iter().map(|x| (x - 0.5).powi(2)).collect();
        let (var, se_var) = mean_se(&sq);
        assert!((var - 1.0 / 16.0).abs() < 3.0 * se_var);
        assert!(draw_beta(-1.0, 1.0, &mut s).is_err());
    }

    #[test]
    fn recurrence_weights_and_roots() {
        let mut s = RngStream::new(42, 0);
        for _ in 0..1000 {
            let d = RecurrenceDraw::draw(14, &mut s).unwrap();
            for &(w0, w1, w2) in &d.steps {
                assert!(w0 >= 0.0 && w1 >= 0.0);
                assert_eq!(w2, 1.0 - w0 - w1);
            }
            let r = d.roots().unwrap();
            assert_eq!(r.len(), 14);
            assert!(r.windows(2).all(|w| w[0] < w[1]));
            assert!(r[0] > 0.0 && r[13] < 1.0);
            let probe = (0..=200).map(|i| d.evaluate(i as f64 / 200.0).abs()).fold(0.0, f64::max);
            for x in r {
                assert!(d.evaluate(x).abs() <= 1e-10 * probe);
            }
        }
    }

    #[test]
    fn recurrence_survives_large_n() {
        let mut s = RngStream::new(3, 1);
        let smp = sample_jue_halfhalf(100, &mut s).unwrap();
        assert_eq!(smp.points.len(), 100);
    }

    #[test]
    fn metropolis_uniform_single_particle() {
        let p = EnsembleParams::jue(1, 0.0, 0.0).unwrap();
        let v: Vec<f64> = (0..4000)
            .map(|k| {
                let mut s = RngStream::new(8, k);
                sample_jue_metropolis(&p, BURN_IN_SWEEPS + THINNING, &mut s).unwrap().points[0]
            })
            .collect();
        let (m, se) = mean_se(&v);
        assert!((m - 0.5).abs() < 3.0 * se);
        assert!(sample_jue_metropolis(&p, 10, &mut RngStream::new(1, 1)).is_err());
    }
}
