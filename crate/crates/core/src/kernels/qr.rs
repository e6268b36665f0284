//! Householder QR in binary64.
//!
//! The R factor is normalized to a nonnegative diagonal by flipping the sign
//! of the matching row of R and column of Q. A zero column yields a zero
//! diagonal entry and an identity reflector.

use crate::error::{Error, Result};
use crate::matrix::{dot, norm2, Matrix};

/// Compact Householder factorization `A = Q R`.
#[derive(Debug, Clone)]
pub struct HouseholderQr {
    /// Reflector vectors, stored in and below the diagonal (unit leading
    /// entry implied by `tau`); the strict upper part holds R.
    factors: Matrix,
    tau: Vec<f64>,
    /// Raw diagonal of R before the sign normalization.
    diag: Vec<f64>,
}

impl HouseholderQr {
    pub fn new(a: &Matrix) -> Result<Self> {
        let (n, m) = a.shape();
        if n < m {
            return Err(Error::DimensionMismatch {
                op: "householder_qr (needs rows >= cols)",
                left: a.shape(),
                right: (m, m),
            });
        }
        let mut f = a.clone().with_precision(crate::Precision::Fine);
        let mut tau = vec![0.0; m];
        let mut diag = vec![0.0; m];
        for j in 0..m {
            let (alpha, t) = {
                let x = &mut f.col_mut(j)[j..];
                let nrm = norm2(x);
                if nrm == 0.0 {
                    (0.0, 0.0)
                } else {
                    let alpha = if x[0] > 0.0 { -nrm } else { nrm };
                    // v = x - alpha e1, scaled so that v[0] = 1
                    let v0 = x[0] - alpha;
                    for xi in x.iter_mut().skip(1) {
                        *xi /= v0;
                    }
                    x[0] = 1.0;
                    (alpha, -v0 / alpha)
                }
            };
            tau[j] = t;
            diag[j] = alpha;
            if t != 0.0 {
                for c in j + 1..m {
                    let (left, right) = f.data_mut().split_at_mut(c * n);
                    let v = &left[j * n + j..j * n + n];
                    let y = &mut right[j..n];
                    let s = t * dot(v, y);
                    for (yi, vi) in y.iter_mut().zip(v) {
                        *yi -= s * vi;
                    }
                }
            }
        }
        Ok(HouseholderQr {
            factors: f,
            tau,
            diag,
        })
    }

    fn sign(&self, j: usize) -> f64 {
        if self.diag[j] < 0.0 {
            -1.0
        } else {
            1.0
        }
    }

    /// Upper triangular `m x m` factor with nonnegative diagonal.
    pub fn r(&self) -> Matrix {
        let m = self.factors.cols();
        let mut r = Matrix::zeros(m, m);
        for j in 0..m {
            for i in 0..j {
                r[(i, j)] = self.sign(i) * self.factors[(i, j)];
            }
            r[(j, j)] = self.diag[j].abs();
        }
        r
    }

    /// Applies `H_1 ... H_m` reflectors in reverse to the leading columns of
    /// the identity, giving the thin `n x m` orthonormal factor.
    pub fn q_thin(&self) -> Matrix {
        let (n, m) = self.factors.shape();
        let mut q = Matrix::zeros(n, m);
        for j in 0..m {
            q[(j, j)] = 1.0;
        }
        for j in (0..m).rev() {
            let t = self.tau[j];
            if t == 0.0 {
                continue;
            }
            let v = &self.factors.col(j)[j..];
            for c in j..m {
                let y = &mut q.col_mut(c)[j..];
                let s = t * dot(v, y);
                for (yi, vi) in y.iter_mut().zip(v) {
                    *yi -= s * vi;
                }
            }
        }
        for j in 0..m {
            if self.sign(j) < 0.0 {
                q.col_mut(j).iter_mut().for_each(|x| *x = -*x);
            }
        }
        q
    }

    /// Leading `m` rows of `Q^T B`, consistent with the sign-normalized R.
    pub fn apply_qt(&self, b: &Matrix) -> Result<Matrix> {
        let (n, m) = self.factors.shape();
        if b.rows() != n {
            return Err(Error::DimensionMismatch {
                op: "apply_qt",
                left: self.factors.shape(),
                right: b.shape(),
            });
        }
        let mut y = b.clone();
        for c in 0..y.cols() {
            for j in 0..m {
                let t = self.tau[j];
                if t == 0.0 {
                    continue;
                }
                let v = &self.factors.col(j)[j..];
                let yc = &mut y.col_mut(c)[j..];
                let s = t * dot(v, yc);
                for (yi, vi) in yc.iter_mut().zip(v) {
                    *yi -= s * vi;
                }
            }
        }
        let mut out = y.block(0..m, 0..y.cols());
        for j in 0..m {
            if self.sign(j) < 0.0 {
                for c in 0..out.cols() {
                    out[(j, c)] = -out[(j, c)];
                }
            }
        }
        Ok(out)
    }

    /// Least-squares solution of `min ||A X - B||_F`; fails on a zero pivot.
    pub fn solve_least_squares(&self, b: &Matrix) -> Result<Matrix> {
        let qtb = self.apply_qt(b)?;
        crate::kernels::triangular_solve(&self.r(), &qtb, crate::kernels::Side::Left)
    }
}

/// Thin Householder QR: `A = Q R`, `Q` is `n x m` with orthonormal columns,
/// `R` is upper triangular with nonnegative diagonal.
pub fn householder_qr(a: &Matrix) -> Result<(Matrix, Matrix)> {
    let f = HouseholderQr::new(a)?;
    Ok((f.q_thin(), f.r()))
}

/// R factor only.
pub fn householder_r(a: &Matrix) -> Result<Matrix> {
    Ok(HouseholderQr::new(a)?.r())
}
