//! Matrix products under a chosen roundoff.
//!
//! Both routines use a fixed loop nest, so the accumulation order of every
//! output entry is independent of the data and results are bit-reproducible.
//! In coarse precision the operands are converted to binary32 and every
//! multiply and add is a native binary32 operation.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::precision::Precision;

fn check_c(op: &'static str, c: Option<&Matrix>, rows: usize, cols: usize) -> Result<()> {
    if let Some(c) = c {
        if c.shape() != (rows, cols) {
            return Err(Error::DimensionMismatch {
                op,
                left: (rows, cols),
                right: c.shape(),
            });
        }
    }
    Ok(())
}

/// `alpha * A * B + beta * C` (C may be absent, meaning zero).
///
/// Loop nest: for each output column `j`, start from `fl(beta * C[:, j])`,
/// then for `l = 0..K` add `A[:, l] * fl(alpha * B[l, j])`. Every output
/// entry is therefore a left-to-right sum over `l`.
pub fn gemm(
    alpha: f64,
    a: &Matrix,
    b: &Matrix,
    beta: f64,
    c: Option<&Matrix>,
    prec: Precision,
) -> Result<Matrix> {
    if a.cols() != b.rows() {
        return Err(Error::DimensionMismatch {
            op: "gemm",
            left: a.shape(),
            right: b.shape(),
        });
    }
    let (n, m) = (a.rows(), b.cols());
    check_c("gemm", c, n, m)?;
    let out = match prec {
        Precision::Fine => gemm_nn_f64(alpha, a, b, beta, c),
        Precision::Coarse => gemm_nn_f32(alpha as f32, a, b, beta as f32, c),
    };
    Ok(Matrix::from_raw(n, m, out).with_precision(prec))
}

fn gemm_nn_f64(alpha: f64, a: &Matrix, b: &Matrix, beta: f64, c: Option<&Matrix>) -> Vec<f64> {
    let (n, k, m) = (a.rows(), a.cols(), b.cols());
    let mut out = vec![0.0f64; n * m];
    for j in 0..m {
        let oc = &mut out[j * n..(j + 1) * n];
        if let Some(c) = c {
            if beta != 0.0 {
                for (o, &cv) in oc.iter_mut().zip(c.col(j)) {
                    *o = beta * cv;
                }
            }
        }
        for l in 0..k {
            let s = alpha * b[(l, j)];
            if s == 0.0 {
                continue;
            }
            for (o, &av) in oc.iter_mut().zip(a.col(l)) {
                *o += av * s;
            }
        }
    }
    out
}

fn gemm_nn_f32(alpha: f32, a: &Matrix, b: &Matrix, beta: f32, c: Option<&Matrix>) -> Vec<f64> {
    let (n, k, m) = (a.rows(), a.cols(), b.cols());
    let a32: Vec<f32> = a.data().iter().map(|&x| x as f32).collect();
    let mut acc = vec![0.0f32; n];
    let mut out = Vec::with_capacity(n * m);
    for j in 0..m {
        acc.iter_mut().for_each(|x| *x = 0.0);
        if let Some(c) = c {
            if beta != 0.0 {
                for (o, &cv) in acc.iter_mut().zip(c.col(j)) {
                    *o = beta * cv as f32;
                }
            }
        }
        for l in 0..k {
            let s = alpha * b[(l, j)] as f32;
            if s == 0.0 {
                continue;
            }
            let acol = &a32[l * n..(l + 1) * n];
            for (o, &av) in acc.iter_mut().zip(acol) {
                *o += av * s;
            }
        }
        out.extend(acc.iter().map(|&x| x as f64));
    }
    out
}

/// `alpha * A^T * B + beta * C`.
///
/// Each output entry is the left-to-right dot product of a column of `A` with
/// a column of `B`, then `fl(fl(alpha * dot) + fl(beta * C))`.
pub fn gemm_tn(
    alpha: f64,
    a: &Matrix,
    b: &Matrix,
    beta: f64,
    c: Option<&Matrix>,
    prec: Precision,
) -> Result<Matrix> {
    if a.rows() != b.rows() {
        return Err(Error::DimensionMismatch {
            op: "gemm_tn",
            left: a.shape(),
            right: b.shape(),
        });
    }
    let (m1, m2) = (a.cols(), b.cols());
    check_c("gemm_tn", c, m1, m2)?;
    let mut out = Matrix::zeros(m1, m2);
    match prec {
        Precision::Fine => {
            for j in 0..m2 {
                let bc = b.col(j);
                for i in 0..m1 {
                    let mut s = 0.0f64;
                    for (&x, &y) in a.col(i).iter().zip(bc) {
                        s += x * y;
                    }
                    let mut v = alpha * s;
                    if let Some(c) = c {
                        if beta != 0.0 {
                            v += beta * c[(i, j)];
                        }
                    }
                    out[(i, j)] = v;
                }
            }
        }
        Precision::Coarse => {
            let a32: Vec<f32> = a.data().iter().map(|&x| x as f32).collect();
            let b32: Vec<f32> = b.data().iter().map(|&x| x as f32).collect();
            let n = a.rows();
            let (alpha, beta) = (alpha as f32, beta as f32);
            for j in 0..m2 {
                let bc = &b32[j * n..(j + 1) * n];
                for i in 0..m1 {
                    let mut s = 0.0f32;
                    for (&x, &y) in a32[i * n..(i + 1) * n].iter().zip(bc) {
                        s += x * y;
                    }
                    let mut v = alpha * s;
                    if let Some(c) = c {
                        if beta != 0.0 {
                            v += beta * c[(i, j)] as f32;
                        }
                    }
                    out[(i, j)] = v as f64;
                }
            }
        }
    }
    Ok(out.with_precision(prec))
}

/// Fine-precision `A * B`; panics on shape mismatch. Internal convenience
/// for small dense products whose shapes are guaranteed by construction.
pub(crate) fn mul(a: &Matrix, b: &Matrix) -> Matrix {
    gemm(1.0, a, b, 0.0, None, Precision::Fine).expect("conformal product")
}

/// Fine-precision `A^T * B`; panics on shape mismatch.
pub(crate) fn mul_tn(a: &Matrix, b: &Matrix) -> Matrix {
    gemm_tn(1.0, a, b, 0.0, None, Precision::Fine).expect("conformal product")
}
