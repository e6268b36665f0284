//! Singular values by one-sided Jacobi, and condition numbers.

use crate::error::Result;
use crate::kernels::qr::householder_r;
use crate::matrix::{dot, Matrix};

const MAX_SWEEPS: usize = 80;

/// Singular values of `A` (any shape) in descending order.
///
/// Tall inputs are first reduced to their `m x m` R factor so the Jacobi
/// sweeps run on a small matrix.
pub fn singular_values(a: &Matrix) -> Result<Vec<f64>> {
    let (n, m) = a.shape();
    if m == 0 || n == 0 {
        return Ok(Vec::new());
    }
    let work = if n > m {
        householder_r(a)?
    } else if n < m {
        a.transpose()
    } else {
        a.clone()
    };
    let work = if work.rows() > work.cols() {
        householder_r(&work)?
    } else {
        work
    };
    Ok(jacobi_values(work))
}

fn jacobi_values(mut a: Matrix) -> Vec<f64> {
    let m = a.cols();
    let rows = a.rows();
    let tol = f64::EPSILON * (rows as f64).sqrt();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..m {
            for j in i + 1..m {
                let alpha = dot(a.col(i), a.col(i));
                let beta = dot(a.col(j), a.col(j));
                let gamma = dot(a.col(i), a.col(j));
                if gamma == 0.0 || gamma.abs() <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (lo, hi) = a.data_mut().split_at_mut(j * rows);
                let ci = &mut lo[i * rows..(i + 1) * rows];
                let cj = &mut hi[..rows];
                for (x, y) in ci.iter_mut().zip(cj.iter_mut()) {
                    let (xi, yj) = (*x, *y);
                    *x = c * xi - s * yj;
                    *y = s * xi + c * yj;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut s: Vec<f64> = (0..m).map(|j| crate::matrix::norm2(a.col(j))).collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// `sigma_max / sigma_min` of a tall matrix; `+inf` when `sigma_min = 0`.
pub fn cond_estimate(a: &Matrix) -> Result<f64> {
    let s = singular_values(a)?;
    Ok(cond_from_values(&s))
}

pub(crate) fn cond_from_values(s: &[f64]) -> f64 {
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        (Some(_), Some(_)) => f64::INFINITY,
        _ => 1.0,
    }
}
