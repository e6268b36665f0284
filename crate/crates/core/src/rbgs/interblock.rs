//! Inter-block factorizations `Q' = Q R` with `Theta Q` orthonormal.
//!
//! All three routines run in binary64. Diagonal entries of R are sketched
//! norms, so the output is orthonormal for the sketched inner product.

use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::kernels::gemm::mul;
use crate::kernels::{householder_qr, householder_r, triangular_solve, Side};
use crate::matrix::{norm2, Matrix};
use crate::precision::U_FINE;
use crate::sketch::SketchOperator;

use super::lstsq::ls_householder_direct;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Interblock {
    /// Column-by-column randomized Gram-Schmidt.
    RgsSingle,
    /// Sketched Cholesky QR run `l` times.
    SketchedCholqr(usize),
    /// Householder QR followed by one sketched Cholesky QR.
    L2PlusCholqr,
}

impl fmt::Display for Interblock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Interblock::RgsSingle => f.write_str("rgs"),
            Interblock::SketchedCholqr(l) => write!(f, "cholqr:{l}"),
            Interblock::L2PlusCholqr => f.write_str("l2cholqr"),
        }
    }
}

impl FromStr for Interblock {
    type Err = Error;

    /// `rgs`, `cholqr[:l]` or `l2cholqr`.
    fn from_str(s: &str) -> Result<Self> {
        match s.split_once(':') {
            None => match s {
                "rgs" | "rgs_single" => Ok(Interblock::RgsSingle),
                "cholqr" | "sketched_cholqr" => Ok(Interblock::SketchedCholqr(1)),
                "l2cholqr" | "l2_plus_cholqr" => Ok(Interblock::L2PlusCholqr),
                _ => Err(invalid(format!("unknown inter-block method '{s}'"))),
            },
            Some(("cholqr" | "sketched_cholqr", l)) => match l.parse::<usize>() {
                Ok(l) if l >= 1 => Ok(Interblock::SketchedCholqr(l)),
                _ => Err(invalid(format!("bad repetition count '{l}'"))),
            },
            _ => Err(invalid(format!("unknown inter-block method '{s}'"))),
        }
    }
}

/// Result of an inter-block factorization.
#[derive(Debug, Clone, PartialEq)]
pub struct InterblockQr {
    pub q: Matrix,
    pub r: Matrix,
    /// `Theta Q`, as maintained by the routine.
    pub s: Matrix,
}

fn check_diag(r: &Matrix, scale: f64, n: usize, what: &str) -> Result<()> {
    let tol = n as f64 * U_FINE * scale;
    match (0..r.rows()).find(|&i| !(r[(i, i)] > tol)) {
        Some(i) => Err(Error::RankDeficient { context: format!("{what}: column {} has negligible norm", i + 1) }),
        None => Ok(()),
    }
}

pub fn interblock_rgs(qp: &Matrix, theta: &SketchOperator) -> Result<InterblockQr> {
    let (n, w) = qp.shape();
    let scale = qp.frobenius_norm();
    let mut q = Matrix::zeros(n, w);
    let mut s = Matrix::zeros(theta.k(), w);
    let mut r = Matrix::zeros(w, w);
    for t in 0..w {
        let col = qp.columns(t..t + 1);
        let mut v = col.clone();
        if t > 0 {
            let p = theta.apply(&col)?;
            let coef = ls_householder_direct(&s.columns(0..t), &p)?;
            v = col.sub(&mul(&q.columns(0..t), &coef))?;
            for i in 0..t {
                r[(i, t)] = coef[(i, 0)];
            }
        }
        let sv = theta.apply(&v)?;
        let rho = norm2(sv.data());
        if !(rho > n as f64 * U_FINE * scale) {
            return Err(Error::RankDeficient { context: format!("rgs: column {} has negligible sketched norm", t + 1) });
        }
        r[(t, t)] = rho;
        for (dst, src) in q.col_mut(t).iter_mut().zip(v.data()) {
            *dst = src / rho;
        }
        for (dst, src) in s.col_mut(t).iter_mut().zip(sv.data()) {
            *dst = src / rho;
        }
    }
    Ok(InterblockQr { q, r, s })
}

/// Sketched Cholesky QR repeated `l` times. With `sketch_direct` the new
/// sketch is recomputed as `Theta Q` instead of `S' R^{-1}`.
pub fn interblock_sketched_cholqr(
    qp: &Matrix,
    theta: &SketchOperator,
    l: usize,
    sketch_direct: bool,
) -> Result<InterblockQr> {
    if l == 0 {
        return Err(invalid("sketched CholQR needs l >= 1"));
    }
    let w = qp.cols();
    let mut q = qp.clone();
    let mut s = theta.apply(qp)?;
    let mut r_acc = Matrix::identity(w);
    for _ in 0..l {
        let r = householder_r(&s)?;
        check_diag(&r, s.frobenius_norm(), theta.k(), "sketched cholqr")?;
        q = triangular_solve(&r, &q, Side::Right)?;
        s = if sketch_direct { theta.apply(&q)? } else { triangular_solve(&r, &s, Side::Right)? };
        r_acc = mul(&r, &r_acc);
    }
    Ok(InterblockQr { q, r: r_acc, s })
}

pub fn interblock_l2_cholqr(qp: &Matrix, theta: &SketchOperator, sketch_direct: bool) -> Result<InterblockQr> {
    let (qs, r1) = householder_qr(qp)?;
    check_diag(&r1, qp.frobenius_norm(), qp.rows(), "householder step")?;
    let inner = interblock_sketched_cholqr(&qs, theta, 1, sketch_direct)?;
    Ok(InterblockQr { q: inner.q, r: mul(&inner.r, &r1), s: inner.s })
}

pub fn factor(method: Interblock, qp: &Matrix, theta: &SketchOperator, sketch_direct: bool) -> Result<InterblockQr> {
    match method {
        Interblock::RgsSingle => interblock_rgs(qp, theta),
        Interblock::SketchedCholqr(l) => interblock_sketched_cholqr(qp, theta, l, sketch_direct),
        Interblock::L2PlusCholqr => interblock_l2_cholqr(qp, theta, sketch_direct),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::gemm::mul_tn;
    use crate::kernels::singular_values;
    use crate::sketch::SketchKind;

    fn lcg(seed: u64) -> impl FnMut() -> f64 {
        let mut s = seed;
        move || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        }
    }

    /// Block with prescribed singular values decaying to `1/cond`.
    fn graded(n: usize, w: usize, cond: f64, seed: u64) -> Matrix {
        let mut r = lcg(seed);
        let (u, _) = householder_qr(&Matrix::from_fn(n, w, |_, _| r())).unwrap();
        let (v, _) = householder_qr(&Matrix::from_fn(w, w, |_, _| r())).unwrap();
        let sig: Vec<f64> = (0..w).map(|i| cond.powf(-(i as f64) / (w - 1) as f64)).collect();
        mul(&mul(&u, &Matrix::diag(&sig)), &v.transpose())
    }

    fn loss(s: &Matrix) -> f64 {
        Matrix::identity(s.cols()).sub(&mul_tn(s, s)).unwrap().frobenius_norm()
    }

    #[test]
    fn single_column_is_sketched_normalization() {
        let th = SketchOperator::new(SketchKind::Srht, 16, 40, 3).unwrap();
        let v = Matrix::from_fn(40, 1, |i, _| (i as f64).cos());
        let out = interblock_rgs(&v, &th).unwrap();
        let nv = norm2(th.apply(&v).unwrap().data());
        assert!((out.r[(0, 0)] - nv).abs() <= 1e-15 * nv);
        assert!(out.q.sub(&v.scaled(1.0 / nv)).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn identity_sketch_and_orthonormal_block() {
        let th = SketchOperator::identity(30);
        let q0 = graded(30, 5, 1.0, 1);
        for m in [Interblock::RgsSingle, Interblock::SketchedCholqr(1), Interblock::L2PlusCholqr] {
            let out = factor(m, &q0, &th, false).unwrap();
            assert!(out.r.sub(&Matrix::identity(5)).unwrap().max_abs() <= 10.0 * U_FINE * 5.0 * 4.0, "{m}");
            assert!(out.q.sub(&q0).unwrap().max_abs() <= 1e-14, "{m}");
        }
    }

    #[test]
    fn rgs_sketch_is_orthonormal() {
        let th = SketchOperator::new(SketchKind::Rademacher, 100, 500, 9).unwrap();
        let q0 = graded(500, 10, 1e3, 2);
        let out = interblock_rgs(&q0, &th).unwrap();
        let sv = singular_values(&th.apply(&out.q).unwrap()).unwrap();
        assert!(sv.iter().all(|&s| (s - 1.0).abs() <= 1e-3), "{sv:?}");
    }

    #[test]
    fn reorthogonalization_helps() {
        let th = SketchOperator::new(SketchKind::Srht, 200, 1000, 4).unwrap();
        let b4 = graded(1000, 8, 1e4, 5);
        let two = interblock_sketched_cholqr(&b4, &th, 2, false).unwrap();
        assert!(loss(&two.s) <= 100.0 * U_FINE * 8.0, "{}", loss(&two.s));
        let b7 = graded(1000, 8, 1e7, 6);
        let one = interblock_sketched_cholqr(&b7, &th, 1, false).unwrap();
        let two = interblock_sketched_cholqr(&b7, &th, 2, false).unwrap();
        assert!(loss(&one.s) > loss(&two.s));
    }

    #[test]
    fn l2_preprocessing_handles_ill_conditioning() {
        // the R factor comes from a QR of the sketch, so a single pass loses
        // about u * cond; a near-singular block is needed to break it
        let th = SketchOperator::new(SketchKind::Srht, 200, 1000, 4).unwrap();
        let b = graded(1000, 8, 1e13, 7);
        let plain = interblock_sketched_cholqr(&b, &th, 1, true).unwrap();
        let l2 = interblock_l2_cholqr(&b, &th, true).unwrap();
        assert!(loss(&plain.s) > 1e-3, "{}", loss(&plain.s));
        assert!(loss(&l2.s) < 1e-10, "{}", loss(&l2.s));
        assert!(loss(&plain.s) > 1e6 * loss(&l2.s));
    }

    #[test]
    fn zero_block_fails() {
        let th = SketchOperator::identity(6);
        let z = Matrix::zeros(6, 2);
        for m in [Interblock::RgsSingle, Interblock::SketchedCholqr(1), Interblock::L2PlusCholqr] {
            assert!(factor(m, &z, &th, false).is_err());
        }
    }

    #[test]
    fn names_parse() {
        for m in [Interblock::RgsSingle, Interblock::SketchedCholqr(3), Interblock::L2PlusCholqr] {
            assert_eq!(m.to_string().parse::<Interblock>().unwrap(), m);
        }
        assert!("cholqr:0".parse::<Interblock>().is_err());
    }
}
