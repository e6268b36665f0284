//! Block Arnoldi as a block QR factorization of `[B, A Q_1, ..., A Q_(p-1)]`.

use crate::classic::{ClassicBgs, ClassicBgsConfig};
use crate::error::{invalid, Error, Result};
use crate::factor::CertReport;
use crate::kernels::gemm::{mul, mul_tn};
use crate::kernels::{cholesky, triangular_solve, Side};
use crate::matrix::{BlockPartition, Matrix};
use crate::precision::Precision;
use crate::rbgs::{certify, Rbgs, RbgsConfig};
use crate::sketch::SketchOperator;

use super::operator::LinearOperator;

/// Output of a (possibly truncated) block Arnoldi process.
///
/// Without breakdown `h` is `m x (m - m_p)` and `[r_first, h]` is the full
/// triangular factor. After a breakdown at order `j` the basis spans an
/// invariant subspace and `h` is square, `A Q = Q H`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArnoldiDecomposition {
    pub q: Matrix,
    pub h: Matrix,
    /// Coefficients of the starting block, `R_(1:p,1)`.
    pub r_first: Matrix,
    pub s: Option<Matrix>,
    pub p: Option<Matrix>,
    pub cert: Option<CertReport>,
    pub partition: BlockPartition,
    pub breakdown: Option<usize>,
}

impl ArnoldiDecomposition {
    /// Number of blocks in the basis.
    pub fn order(&self) -> usize {
        self.partition.num_blocks()
    }

    /// Columns of the basis that `h` maps from.
    pub fn inner_dim(&self) -> usize {
        self.h.cols()
    }

    /// `Q_(1:p-1)`, or all of `Q` after a breakdown.
    pub fn q_inner(&self) -> Matrix {
        self.q.columns(0..self.inner_dim())
    }

    /// `H_(1:p-1,1:p-1)`.
    pub fn h_square(&self) -> Matrix {
        let k = self.inner_dim();
        self.h.block(0..k, 0..k)
    }

    /// `H_(p,1:p-1)`; empty after a breakdown.
    pub fn h_tail(&self) -> Matrix {
        let k = self.inner_dim();
        self.h.block(k..self.h.rows(), 0..k)
    }

    /// Full triangular factor `[R_(:,1), H]` of an unbroken decomposition.
    pub fn r(&self) -> Result<Matrix> {
        if self.breakdown.is_some() {
            return Err(invalid("no square R factor after a breakdown"));
        }
        self.r_first.hcat(&self.h)
    }

    /// True when every entry below the first block subdiagonal is zero.
    pub fn is_block_hessenberg(&self) -> bool {
        let w1 = self.partition.width(0);
        let ends: Vec<usize> = (0..self.order()).map(|b| self.partition.offset(b) + self.partition.width(b)).collect();
        (0..self.h.cols()).all(|j| {
            let col = j + w1;
            let limit = if col >= self.q.cols() {
                self.q.cols()
            } else {
                ends.iter().copied().find(|&e| e > col).unwrap_or(self.q.cols())
            };
            (limit..self.h.rows()).all(|i| self.h[(i, j)] == 0.0)
        })
    }

    /// `||A Q_in - Q H||_F / ||A Q_in||_F` in binary64.
    pub fn arnoldi_residual(&self, a: &dyn LinearOperator) -> Result<f64> {
        let aq = a.apply(&self.q_inner())?;
        let qh = mul(&self.q.columns(0..self.h.rows()), &self.h);
        Ok(aq.sub(&qh)?.frobenius_norm() / aq.frobenius_norm())
    }

    /// `||Theta (A Q_in - Q H)||_F / ||Theta A Q_in||_F` in binary64.
    pub fn sketched_arnoldi_residual(&self, a: &dyn LinearOperator, theta: &SketchOperator) -> Result<f64> {
        let taq = theta.apply(&a.apply(&self.q_inner())?)?;
        let tq = theta.apply(&self.q.columns(0..self.h.rows()))?;
        Ok(taq.sub(&mul(&tq, &self.h))?.frobenius_norm() / taq.frobenius_norm())
    }

    /// Leading `order` blocks of an unbroken decomposition. Certification is
    /// dropped.
    pub fn leading(&self, order: usize) -> Result<ArnoldiDecomposition> {
        let full = self.breakdown.map_or(self.order(), |o| o.saturating_sub(1));
        if order < 2 || order > full {
            return Err(invalid(format!("leading order {order} outside 2..={full}")));
        }
        let part = self.partition.leading(order);
        let m = part.total_cols();
        let inner = m - part.width(order - 1);
        Ok(ArnoldiDecomposition {
            q: self.q.columns(0..m),
            h: self.h.block(0..m, 0..inner),
            r_first: self.r_first.block(0..m, 0..self.r_first.cols()),
            s: self.s.as_ref().map(|s| s.columns(0..m)),
            p: self.p.as_ref().map(|p| p.columns(0..m)),
            cert: None,
            partition: part,
            breakdown: None,
        })
    }

    /// Cholesky QR correction making `Q` orthonormal in the Euclidean inner
    /// product: `Q <- Q R'^-1`, `H <- R' H R'_in^-1`, `R_first <- R' R_first`.
    pub fn l2_orthonormalized(&self) -> Result<ArnoldiDecomposition> {
        let rows = self.h.rows();
        let q = self.q.columns(0..rows);
        let rp = cholesky(&mul_tn(&q, &q))?;
        let k = self.inner_dim();
        let rp_in = rp.block(0..k, 0..k);
        let h = triangular_solve(&rp_in, &mul(&rp, &self.h), Side::Right)?;
        let r_first = mul(&rp, &self.r_first);
        let s = match &self.s {
            Some(s) => Some(triangular_solve(&rp, s, Side::Right)?),
            None => None,
        };
        let cert = match (&s, &self.p, self.breakdown) {
            (Some(s), Some(p), None) => Some(certify(s, p, &r_first.hcat(&h)?)?),
            _ => None,
        };
        Ok(ArnoldiDecomposition {
            q: triangular_solve(&rp, &q, Side::Right)?,
            h,
            r_first,
            s,
            p: self.p.clone(),
            cert,
            partition: self.partition.clone(),
            breakdown: self.breakdown,
        })
    }
}

/// Incremental block orthogonalization used by the Krylov drivers.
pub(crate) trait BlockOrth {
    fn push_block(&mut self, w: &Matrix) -> Result<()>;
    fn q(&self) -> &Matrix;
    fn r(&self) -> Matrix;
    fn widths(&self) -> &[usize];
    fn last_coeffs(&self) -> Option<&Matrix>;
    fn sketches(&self) -> Option<(&Matrix, &Matrix)>;
    fn certificate(&self) -> Result<Option<CertReport>>;
}

impl BlockOrth for Rbgs<'_> {
    fn push_block(&mut self, w: &Matrix) -> Result<()> {
        Rbgs::push_block(self, w)
    }
    fn q(&self) -> &Matrix {
        Rbgs::q(self)
    }
    fn r(&self) -> Matrix {
        Rbgs::r(self)
    }
    fn widths(&self) -> &[usize] {
        Rbgs::widths(self)
    }
    fn last_coeffs(&self) -> Option<&Matrix> {
        Rbgs::last_coeffs(self)
    }
    fn sketches(&self) -> Option<(&Matrix, &Matrix)> {
        Some((self.s(), self.p()))
    }
    fn certificate(&self) -> Result<Option<CertReport>> {
        Rbgs::certificate(self).map(Some)
    }
}

impl BlockOrth for ClassicBgs {
    fn push_block(&mut self, w: &Matrix) -> Result<()> {
        ClassicBgs::push_block(self, w)
    }
    fn q(&self) -> &Matrix {
        ClassicBgs::q(self)
    }
    fn r(&self) -> Matrix {
        ClassicBgs::r(self)
    }
    fn widths(&self) -> &[usize] {
        ClassicBgs::widths(self)
    }
    fn last_coeffs(&self) -> Option<&Matrix> {
        ClassicBgs::last_coeffs(self)
    }
    fn sketches(&self) -> Option<(&Matrix, &Matrix)> {
        None
    }
    fn certificate(&self) -> Result<Option<CertReport>> {
        Ok(None)
    }
}

/// Options shared by the Arnoldi drivers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArnoldiOptions {
    /// Roundoff of the products `A Q_i`.
    pub matvec: Precision,
    /// Return the truncated decomposition on a dependent block instead of an
    /// error.
    pub allow_breakdown: bool,
}

impl Default for ArnoldiOptions {
    fn default() -> Self {
        ArnoldiOptions { matvec: Precision::Fine, allow_breakdown: false }
    }
}

pub(crate) struct ArnoldiProcess<'a, O> {
    a: &'a dyn LinearOperator,
    orth: O,
    matvec: Precision,
    aq: Matrix,
    broken: bool,
}

impl<'a, O: BlockOrth> ArnoldiProcess<'a, O> {
    /// Pushes the starting block. A dependent start is a breakdown at order 0.
    pub(crate) fn start(a: &'a dyn LinearOperator, mut orth: O, b: &Matrix, matvec: Precision) -> Result<Self> {
        if b.rows() != a.dim() {
            return Err(Error::DimensionMismatch { op: "arnoldi start", left: (a.dim(), a.dim()), right: b.shape() });
        }
        orth.push_block(b).map_err(|e| breakdown(0, e))?;
        Ok(ArnoldiProcess { a, orth, matvec, aq: Matrix::zeros(a.dim(), 0), broken: false })
    }

    pub(crate) fn order(&self) -> usize {
        self.orth.widths().len()
    }

    pub(crate) fn orth(&self) -> &O {
        &self.orth
    }

    /// Adds one block. Returns `false` on a dependent block, after which the
    /// basis spans an invariant subspace.
    pub(crate) fn extend(&mut self) -> Result<bool> {
        if self.broken {
            return Ok(false);
        }
        let q = self.orth.q();
        let w_last = *self.orth.widths().last().expect("started process has a block");
        let last = q.columns(q.cols() - w_last..q.cols());
        let w = self.a.apply_prec(&last, self.matvec)?;
        match self.orth.push_block(&w) {
            Ok(()) => {
                self.aq.append_columns(&w)?;
                Ok(true)
            }
            Err(Error::DependentBlock { .. }) => {
                self.aq.append_columns(&w)?;
                self.broken = true;
                Ok(false)
            }
            Err(e) => Err(e),
        }
    }

    /// Current `H` and `R_first`, square after a breakdown.
    pub(crate) fn hessenberg(&self) -> (Matrix, Matrix) {
        let r = self.orth.r();
        let m = r.rows();
        let w1 = self.orth.widths()[0];
        let r_first = r.columns(0..w1);
        let mut h = r.block(0..m, w1..m);
        if self.broken {
            let x = self.orth.last_coeffs().expect("dependent block leaves coefficients");
            h.append_columns(x).expect("coefficient rows match the basis");
        }
        (h, r_first)
    }

    pub(crate) fn decomposition(&self) -> Result<ArnoldiDecomposition> {
        let (h, r_first) = self.hessenberg();
        let (s, p) = match self.orth.sketches() {
            Some((s, p)) => (Some(s.clone()), Some(p.clone())),
            None => (None, None),
        };
        Ok(ArnoldiDecomposition {
            q: self.orth.q().clone(),
            h,
            r_first,
            s,
            p,
            cert: self.orth.certificate()?,
            partition: BlockPartition::from_widths(self.orth.widths())?,
            breakdown: self.broken.then(|| self.order()),
        })
    }
}

fn breakdown(order: usize, e: Error) -> Error {
    match e {
        Error::DependentBlock { .. } => Error::Breakdown { order, source: Box::new(e) },
        other => other,
    }
}

fn check_args(a: &dyn LinearOperator, b: &Matrix, p: usize) -> Result<()> {
    if p < 2 {
        return Err(invalid("Arnoldi needs p >= 2"));
    }
    if b.rows() != a.dim() || b.cols() == 0 {
        return Err(Error::DimensionMismatch { op: "arnoldi", left: (a.dim(), a.dim()), right: b.shape() });
    }
    Ok(())
}

pub(crate) fn run<O: BlockOrth>(
    a: &dyn LinearOperator,
    b: &Matrix,
    p: usize,
    orth: O,
    opts: ArnoldiOptions,
) -> Result<ArnoldiDecomposition> {
    check_args(a, b, p)?;
    let mut proc = ArnoldiProcess::start(a, orth, b, opts.matvec)?;
    while proc.order() < p {
        if !proc.extend()? {
            let order = proc.order();
            if !opts.allow_breakdown {
                return Err(breakdown(order, Error::DependentBlock { block: order + 1 }));
            }
            break;
        }
    }
    proc.decomposition()
}

/// Randomized block Arnoldi with `p` blocks of width `B.cols()`.
pub fn rbgs_arnoldi(
    a: &dyn LinearOperator,
    b: &Matrix,
    theta: &SketchOperator,
    p: usize,
    cfg: &RbgsConfig,
) -> Result<ArnoldiDecomposition> {
    rbgs_arnoldi_with(a, b, theta, p, cfg, ArnoldiOptions::default())
}

pub fn rbgs_arnoldi_with(
    a: &dyn LinearOperator,
    b: &Matrix,
    theta: &SketchOperator,
    p: usize,
    cfg: &RbgsConfig,
    opts: ArnoldiOptions,
) -> Result<ArnoldiDecomposition> {
    if p * b.cols() > theta.k() {
        return Err(invalid(format!("p * m_p = {} exceeds the sketch dimension {}", p * b.cols(), theta.k())));
    }
    run(a, b, p, Rbgs::new(theta, *cfg)?, opts)
}

/// Block Arnoldi with a classical block Gram-Schmidt inside.
pub fn classic_arnoldi(a: &dyn LinearOperator, b: &Matrix, p: usize, cfg: ClassicBgsConfig) -> Result<ArnoldiDecomposition> {
    classic_arnoldi_with(a, b, p, cfg, ArnoldiOptions::default())
}

pub fn classic_arnoldi_with(
    a: &dyn LinearOperator,
    b: &Matrix,
    p: usize,
    cfg: ClassicBgsConfig,
    opts: ArnoldiOptions,
) -> Result<ArnoldiDecomposition> {
    if p * b.cols() > a.dim() {
        return Err(invalid("p * m_p exceeds the operator dimension"));
    }
    run(a, b, p, ClassicBgs::new(cfg, a.dim()), opts)
}
