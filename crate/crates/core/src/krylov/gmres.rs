//! Restarted block GMRES and the randomized FOM solution.

use crate::classic::{ClassicBgs, ClassicBgsConfig};
use crate::error::{invalid, Error, Result};
use crate::kernels::gemm::mul;
use crate::kernels::{cond_estimate, HouseholderQr};
use crate::matrix::{norm2, Matrix};
use crate::precision::{Precision, U_FINE};
use crate::rbgs::{Rbgs, RbgsConfig};
use crate::sketch::SketchOperator;

use super::arnoldi::{ArnoldiDecomposition, ArnoldiProcess, BlockOrth};
use super::operator::LinearOperator;

#[derive(Debug, Clone, PartialEq)]
pub struct KrylovSolveReport {
    pub solution: Matrix,
    /// `(iteration, max_i ||A u_i - b_i|| / ||b_i||)`, one entry per inner
    /// iteration over all cycles.
    pub residual_history: Vec<(usize, f64)>,
    /// `cond(Q)` of the current basis at each iteration.
    pub basis_cond_history: Vec<f64>,
    /// `(delta, delta_tilde)` at each iteration; NaN without sketches.
    pub cert_history: Vec<(f64, f64)>,
    /// Restarts actually performed.
    pub restarts: usize,
    /// Global iteration at which an invariant subspace was reached.
    pub breakdown: Option<usize>,
}

impl KrylovSolveReport {
    pub fn final_residual(&self) -> f64 {
        self.residual_history.last().map_or(f64::NAN, |r| r.1)
    }
}

/// Stopping and restart parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GmresOptions {
    /// Number of blocks per cycle, so `p - 1` iterations per cycle.
    pub p: usize,
    pub restarts: usize,
    /// Stop once the max relative true residual falls to this value.
    pub tol: Option<f64>,
    pub matvec: Precision,
    /// Record `cond(Q)` every iteration (one small SVD each).
    pub track_cond: bool,
}

impl GmresOptions {
    pub fn new(p: usize, restarts: usize) -> Self {
        GmresOptions { p, restarts, tol: None, matvec: Precision::Fine, track_cond: true }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = Some(tol);
        self
    }
}

fn column_max_rel(res: &Matrix, bnorm: &[f64]) -> f64 {
    (0..res.cols()).map(|i| norm2(res.col(i)) / bnorm[i]).fold(0.0, f64::max)
}

fn gmres_impl<O: BlockOrth>(
    a: &dyn LinearOperator,
    b: &Matrix,
    opts: GmresOptions,
    mut make: impl FnMut() -> Result<O>,
) -> Result<KrylovSolveReport> {
    if opts.p < 2 {
        return Err(invalid("GMRES needs p >= 2"));
    }
    if b.rows() != a.dim() || b.cols() == 0 {
        return Err(Error::DimensionMismatch { op: "block_gmres", left: (a.dim(), a.dim()), right: b.shape() });
    }
    let bnorm = b.column_norms();
    if bnorm.iter().any(|&x| x == 0.0) {
        return Err(invalid("right-hand sides must be nonzero"));
    }
    let mut x = Matrix::zeros(b.rows(), b.cols());
    let mut report = KrylovSolveReport {
        solution: Matrix::zeros(0, 0),
        residual_history: Vec::new(),
        basis_cond_history: Vec::new(),
        cert_history: Vec::new(),
        restarts: 0,
        breakdown: None,
    };
    let mut iter = 0;
    let mut rc = b.clone();
    'cycles: for cycle in 0..=opts.restarts {
        report.restarts = cycle;
        let mut proc = match ArnoldiProcess::start(a, make()?, &rc, opts.matvec) {
            Ok(p) => p,
            // the residual vanished exactly
            Err(Error::Breakdown { order: 0, .. }) => break,
            Err(e) => return Err(e),
        };
        let mut total = x.clone();
        let mut last_res = rc.clone();
        while proc.order() < opts.p {
            let extended = proc.extend()?;
            iter += 1;
            let (h, r_first) = proc.hessenberg();
            let k = h.cols();
            let z = HouseholderQr::new(&h)?.solve_least_squares(&r_first)?;
            let q = proc.orth().q();
            total = x.add(&mul(&q.columns(0..k), &z))?;
            // residual of the rounded iterate, not of the correction system
            last_res = b.sub(&a.apply(&total)?)?;
            let rel = column_max_rel(&last_res, &bnorm);
            report.residual_history.push((iter, rel));
            report.basis_cond_history.push(if opts.track_cond { cond_estimate(q)? } else { f64::NAN });
            report.cert_history.push(match proc.orth().certificate()? {
                Some(c) => (c.delta, c.delta_tilde),
                None => (f64::NAN, f64::NAN),
            });
            if !extended {
                report.breakdown = Some(iter);
                x = total;
                break 'cycles;
            }
            if opts.tol.is_some_and(|t| rel <= t) {
                x = total;
                break 'cycles;
            }
        }
        x = total;
        rc = last_res;
    }
    report.solution = x;
    Ok(report)
}

/// Restarted block GMRES on an RBGS Arnoldi basis. Each cycle builds `p`
/// blocks and solves the reduced least-squares problems in binary64.
pub fn block_gmres(
    a: &dyn LinearOperator,
    b: &Matrix,
    theta: &SketchOperator,
    cfg: &RbgsConfig,
    opts: GmresOptions,
) -> Result<KrylovSolveReport> {
    if opts.p * b.cols() > theta.k() {
        return Err(invalid(format!("p * m_p = {} exceeds the sketch dimension {}", opts.p * b.cols(), theta.k())));
    }
    gmres_impl(a, b, opts, || Rbgs::new(theta, *cfg))
}

/// Restarted block GMRES on a classical block Gram-Schmidt basis.
pub fn classic_block_gmres(
    a: &dyn LinearOperator,
    b: &Matrix,
    cfg: ClassicBgsConfig,
    opts: GmresOptions,
) -> Result<KrylovSolveReport> {
    gmres_impl(a, b, opts, || Ok(ClassicBgs::new(cfg, a.dim())))
}

/// FOM solution `U = Q_in H_in^-1 R_(1:p-1,1)`.
pub fn block_fom(d: &ArnoldiDecomposition) -> Result<Matrix> {
    let k = d.inner_dim();
    let hs = d.h_square();
    let qr = HouseholderQr::new(&hs)?;
    let r = qr.r();
    let rmax = (0..k).map(|i| r[(i, i)].abs()).fold(0.0, f64::max);
    if (0..k).any(|i| r[(i, i)].abs() <= k as f64 * U_FINE * rmax) {
        return Err(Error::RankDeficient { context: "reduced FOM matrix is singular".into() });
    }
    let rhs = d.r_first.block(0..k, 0..d.r_first.cols());
    let z = qr.solve_least_squares(&rhs)?;
    Ok(mul(&d.q_inner(), &z))
}
