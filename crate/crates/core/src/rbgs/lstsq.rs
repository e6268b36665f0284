//! Sketched least-squares solvers for the projection coefficients
//! `argmin_X ||S X - P||_F`.

use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::kernels::{gemm, gemm_tn, HouseholderQr};
use crate::matrix::Matrix;
use crate::precision::{Precision, U_FINE};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LsSolver {
    /// `l` steps of `X <- X + S^T (P - S X)` from `X = 0`.
    Richardson(usize),
    /// `l` block modified Gram-Schmidt sweeps.
    BmgsReorth(usize),
    /// Conjugate gradients on the normal equations, fixed iteration count.
    CgNormal(usize),
    HouseholderDirect,
}

impl LsSolver {
    pub fn validate(&self) -> Result<()> {
        match *self {
            LsSolver::Richardson(0) | LsSolver::BmgsReorth(0) | LsSolver::CgNormal(0) => {
                Err(invalid(format!("least-squares solver {self} needs at least one iteration")))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for LsSolver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LsSolver::Richardson(l) => write!(f, "richardson:{l}"),
            LsSolver::BmgsReorth(l) => write!(f, "bmgs:{l}"),
            LsSolver::CgNormal(l) => write!(f, "cg:{l}"),
            LsSolver::HouseholderDirect => f.write_str("direct"),
        }
    }
}

impl FromStr for LsSolver {
    type Err = Error;

    /// `richardson[:l]`, `bmgs[:l]`, `cg[:iters]` or `direct`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = match s.split_once(':') {
            Some((a, b)) => (a, Some(b)),
            None => (s, None),
        };
        let count = |default: usize| -> Result<usize> {
            match arg {
                None => Ok(default),
                Some(t) => t.parse().map_err(|_| invalid(format!("bad iteration count '{t}'"))),
            }
        };
        let solver = match name {
            "richardson" => LsSolver::Richardson(count(5)?),
            "bmgs" | "bmgs_reorth" => LsSolver::BmgsReorth(count(2)?),
            "cg" | "cg_normal" => LsSolver::CgNormal(count(20)?),
            "direct" | "householder" | "householder_direct" if arg.is_none() => LsSolver::HouseholderDirect,
            _ => return Err(invalid(format!("unknown least-squares solver '{s}'"))),
        };
        solver.validate()?;
        Ok(solver)
    }
}

pub fn ls_richardson(s: &Matrix, p: &Matrix, l: usize, prec: Precision) -> Result<Matrix> {
    let mut x = Matrix::zeros(s.cols(), p.cols()).with_precision(prec);
    for _ in 0..l {
        let res = gemm(-1.0, s, &x, 1.0, Some(p), prec)?;
        x = gemm_tn(1.0, s, &res, 1.0, Some(&x), prec)?;
    }
    Ok(x)
}

/// Block MGS with `l` sweeps. Each sweep visits the blocks in order; the
/// coefficient increment of block `j` is taken against the running residual
/// and immediately subtracted from it.
pub fn ls_bmgs_reorth(blocks: &[Matrix], p: &Matrix, l: usize, prec: Precision) -> Result<Matrix> {
    let total: usize = blocks.iter().map(|b| b.cols()).sum();
    let mut x = Matrix::zeros(total, p.cols()).with_precision(prec);
    let mut res = p.clone();
    for _ in 0..l {
        let mut off = 0;
        for sj in blocks {
            let d = gemm_tn(1.0, sj, &res, 0.0, None, prec)?;
            res = gemm(-1.0, sj, &d, 1.0, Some(&res), prec)?;
            for c in 0..x.cols() {
                for t in 0..sj.cols() {
                    x[(off + t, c)] = prec.round(x[(off + t, c)] + d[(t, c)]);
                }
            }
            off += sj.cols();
        }
    }
    Ok(x)
}

/// CG on `S^T S x = S^T p` for each column of `P`, from zero, exactly
/// `iters` iterations (stops early only if the residual is exactly zero).
pub fn ls_cg_normal(s: &Matrix, p: &Matrix, iters: usize, prec: Precision) -> Result<Matrix> {
    let m = s.cols();
    let mut x = Matrix::zeros(m, p.cols()).with_precision(prec);
    let dot = |a: &Matrix, b: &Matrix| -> Result<f64> { Ok(gemm_tn(1.0, a, b, 0.0, None, prec)?[(0, 0)]) };
    for c in 0..p.cols() {
        let pc = p.columns(c..c + 1);
        let mut xc = Matrix::zeros(m, 1);
        let mut r = gemm_tn(1.0, s, &pc, 0.0, None, prec)?;
        let mut d = r.clone();
        let mut rr = dot(&r, &r)?;
        for _ in 0..iters {
            if rr == 0.0 {
                break;
            }
            let sd = gemm(1.0, s, &d, 0.0, None, prec)?;
            let q = gemm_tn(1.0, s, &sd, 0.0, None, prec)?;
            let dq = dot(&d, &q)?;
            if dq == 0.0 {
                break;
            }
            let alpha = prec.round(rr / dq);
            xc = gemm(alpha, &d, &Matrix::identity(1), 1.0, Some(&xc), prec)?;
            r = gemm(-alpha, &q, &Matrix::identity(1), 1.0, Some(&r), prec)?;
            let rr_new = dot(&r, &r)?;
            let beta = prec.round(rr_new / rr);
            d = gemm(beta, &d, &Matrix::identity(1), 1.0, Some(&r), prec)?;
            rr = rr_new;
        }
        for t in 0..m {
            x[(t, c)] = xc[(t, 0)];
        }
    }
    Ok(x)
}

/// Direct solve through Householder QR of `S` in binary64; fails when `S`
/// is numerically rank deficient.
pub fn ls_householder_direct(s: &Matrix, p: &Matrix) -> Result<Matrix> {
    if s.cols() == 0 {
        return Ok(Matrix::zeros(0, p.cols()));
    }
    let f = HouseholderQr::new(s)?;
    let r = f.r();
    let rmax = (0..r.rows()).map(|i| r[(i, i)]).fold(0.0, f64::max);
    let tol = s.rows() as f64 * U_FINE * rmax;
    if let Some(i) = (0..r.rows()).find(|&i| r[(i, i)] <= tol) {
        return Err(Error::RankDeficient { context: format!("sketched basis column {}", i + 1) });
    }
    f.solve_least_squares(p)
}

/// Dispatches to the configured solver. `blocks` are the column blocks of `s`.
pub fn solve(solver: LsSolver, s: &Matrix, blocks: &[Matrix], p: &Matrix, prec: Precision) -> Result<Matrix> {
    match solver {
        LsSolver::Richardson(l) => ls_richardson(s, p, l, prec),
        LsSolver::BmgsReorth(l) => ls_bmgs_reorth(blocks, p, l, prec),
        LsSolver::CgNormal(it) => ls_cg_normal(s, p, it, prec),
        LsSolver::HouseholderDirect => Ok(ls_householder_direct(s, p)?.rounded(prec)),
    }
}
