//! Weighted linear least squares by Householder QR.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Minimises `Σ_i w_i² (y_i - Σ_j X_ij β_j)²` for a row-major design matrix
/// `x` of `rows × cols`. Columns are scaled to unit norm before the QR so that
/// the rank test is meaningful across very different basis magnitudes.
pub(crate) fn weighted_lstsq(x: &[f64], rows: usize, cols: usize, y: &[f64], w: &[f64]) -> Result<Vec<f64>> {
    if rows < cols || x.len() != rows * cols || y.len() != rows || w.len() != rows {
        return Err(Error::IllConditioned("fewer samples than unknowns".into()));
    }
    let mut a: Vec<f64> = (0..rows * cols).map(|idx| x[idx] * w[idx / cols]).collect();
    let mut b: Vec<f64> = y.iter().zip(w).map(|(y, w)| y * w).collect();

    let mut scale = vec![0.0; cols];
    for (j, s) in scale.iter_mut().enumerate() {
        *s = libm::sqrt((0..rows).map(|i| a[i * cols + j] * a[i * cols + j]).sum());
        if *s == 0.0 {
            return Err(Error::IllConditioned(alloc::format!("basis column {j} vanishes")));
        }
        for i in 0..rows {
            a[i * cols + j] /= *s;
        }
    }

    let mut diag = vec![0.0; cols];
    for j in 0..cols {
        let norm = libm::sqrt((j..rows).map(|i| a[i * cols + j] * a[i * cols + j]).sum());
        let alpha = if a[j * cols + j] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (j..rows).map(|i| a[i * cols + j]).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        diag[j] = alpha;
        if vnorm2 == 0.0 {
            continue;
        }
        for c in j..cols {
            let dot: f64 = (j..rows).map(|i| v[i - j] * a[i * cols + c]).sum();
            let f = 2.0 * dot / vnorm2;
            for i in j..rows {
                a[i * cols + c] -= f * v[i - j];
            }
        }
        let dot: f64 = (j..rows).map(|i| v[i - j] * b[i]).sum();
        let f = 2.0 * dot / vnorm2;
        for i in j..rows {
            b[i] -= f * v[i - j];
        }
    }

    let rmax = diag.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    if diag.iter().any(|d| d.abs() <= 1e-13 * rmax) {
        return Err(Error::IllConditioned("design matrix is rank deficient".into()));
    }

    let mut beta = vec![0.0; cols];
    for j in (0..cols).rev() {
        let mut acc = b[j];
        for c in j + 1..cols {
            acc -= a[j * cols + c] * beta[c];
        }
        beta[j] = acc / a[j * cols + j];
    }
    for (b, s) in beta.iter_mut().zip(&scale) {
        *b /= s;
    }
    Ok(beta)
}

/// Ordinary least-squares slope of `y` against `x`.
pub(crate) fn slope(x: &[f64], y: &[f64]) -> Option<f64> {
    let m = x.len();
    if m < 2 {
        return None;
    }
    let mx = x.iter().sum::<f64>() / m as f64;
    let my = y.iter().sum::<f64>() / m as f64;
    let sxx: f64 = x.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).map(|(x, y)| (x - mx) * (y - my)).sum();
    Some(sxy / sxx)
}
