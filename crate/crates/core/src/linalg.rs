//! Log-determinants with row/column equilibration and partial pivoting.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::specfun::LogMagnitude;

/// Scale every row, then every column, to unit max-norm; returns the summed
/// log of the removed scales.
fn equilibrate<T, F>(m: &mut DMatrix<T>, abs: F) -> Result<f64>
where
    T: nalgebra::Scalar + Copy + std::ops::MulAssign<f64>,
    F: Fn(T) -> f64,
{
    let (r, c) = m.shape();
    let mut log_scale = 0.0;
    for i in 0..r {
        let s = (0..c).map(|j| abs(m[(i, j)])).fold(0.0, f64::max);
        if s == 0.0 || !s.is_finite() {
            return Err(Error::Determinant(format!("row {i} has max-norm {s}")));
        }
        for j in 0..c {
            m[(i, j)] *= 1.0 / s;
        }
        log_scale += s.ln();
    }
    for j in 0..c {
        let s = (0..r).map(|i| abs(m[(i, j)])).fold(0.0, f64::max);
        if s == 0.0 || !s.is_finite() {
            return Err(Error::Determinant(format!("column {j} has max-norm {s}")));
        }
        for i in 0..r {
            m[(i, j)] *= 1.0 / s;
        }
        log_scale += s.ln();
    }
    Ok(log_scale)
}

/// ln|det A| and its sign for a real square matrix.
pub fn log_det(a: &DMatrix<f64>) -> Result<LogMagnitude> {
    if !a.is_square() {
        return Err(Error::Determinant("matrix is not square".into()));
    }
    if a.nrows() == 0 {
        return Ok(LogMagnitude::ONE);
    }
    let mut m = a.clone();
    let log_scale = equilibrate(&mut m, |x: f64| x.abs())?;
    let lu = m.lu();
    let mut sign: i8 = if lu.p().determinant::<f64>() < 0.0 { -1 } else { 1 };
    let u = lu.u();
    let mut log_abs = log_scale;
    for i in 0..u.nrows() {
        let d = u[(i, i)];
        if d == 0.0 || !d.is_finite() {
            return Err(Error::Determinant(format!("zero pivot at step {i}")));
        }
        if d < 0.0 {
            sign = -sign;
        }
        log_abs += d.abs().ln();
    }
    Ok(LogMagnitude { log_abs, sign })
}

/// ln|det A| and arg(det A) for a complex square matrix.
pub fn log_det_complex(a: &DMatrix<Complex64>) -> Result<(f64, f64)> {
    if !a.is_square() {
        return Err(Error::Determinant("matrix is not square".into()));
    }
    if a.nrows() == 0 {
        return Ok((0.0, 0.0));
    }
    let mut m = a.clone();
    let log_scale = equilibrate(&mut m, |z: Complex64| z.norm())?;
    let lu = m.lu();
    let mut phase = if lu.p().determinant::<f64>() < 0.0 {
        std::f64::consts::PI
    } else {
        0.0
    };
    let u = lu.u();
    let mut log_abs = log_scale;
    for i in 0..u.nrows() {
        let d = u[(i, i)];
        let r = d.norm();
        if r == 0.0 || !r.is_finite() {
            return Err(Error::Determinant(format!("zero pivot at step {i}")));
        }
        log_abs += r.ln();
        phase += d.arg();
    }
    let phase = phase.sin().atan2(phase.cos());
    Ok((log_abs, phase))
}
