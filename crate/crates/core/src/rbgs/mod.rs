//! Randomized block Gram-Schmidt.
//!
//! Each block `W_i` is processed in four stages:
//!
//! 1. sketch `P_i = Theta W_i` (fine),
//! 2. solve `min ||S X - P_i||` for the projection coefficients (fine),
//! 3. form `Q'_i = W_i - Q X` as one multiply-subtract (coarse),
//! 4. factor `Q'_i = Q_i R_ii` with `Theta Q_i` orthonormal (always binary64).
//!
//! The state type [`Rbgs`] exposes the process one block at a time, which is
//! what the Krylov drivers build on.

pub mod certify;
pub mod interblock;
pub mod lstsq;

pub use certify::{certify, certify_embedding, cholesky_qr_postprocess, sketch_orthogonality};
pub use interblock::{interblock_l2_cholqr, interblock_rgs, interblock_sketched_cholqr, Interblock, InterblockQr};
pub use lstsq::{ls_bmgs_reorth, ls_cg_normal, ls_householder_direct, ls_richardson, LsSolver};

use crate::classic::assemble_r;
use crate::error::{invalid, Error, Result};
use crate::factor::{BlockQR, CertReport};
use crate::kernels::gemm;
use crate::matrix::{BlockPartition, Matrix};
use crate::precision::{Precision, PrecisionMode, U_FINE};
use crate::sketch::SketchOperator;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RbgsConfig {
    pub block_width: usize,
    pub ls_solver: LsSolver,
    pub interblock: Interblock,
    /// Precision of the projection `W_i - Q X`.
    pub coarse: Precision,
    /// Precision of the sketches and of the least-squares solve.
    pub fine: Precision,
    /// Per-block certification after every iteration.
    pub certify_blocks: bool,
    /// Recompute `S_i = Theta Q_i` instead of updating the sketch in place.
    pub sketch_direct: bool,
}

impl Default for RbgsConfig {
    fn default() -> Self {
        RbgsConfig {
            block_width: 10,
            ls_solver: LsSolver::Richardson(5),
            interblock: Interblock::L2PlusCholqr,
            coarse: Precision::Coarse,
            fine: Precision::Fine,
            certify_blocks: false,
            sketch_direct: false,
        }
    }
}

impl RbgsConfig {
    pub fn new(block_width: usize, mode: PrecisionMode) -> Self {
        let (coarse, fine) = mode.pair();
        RbgsConfig { block_width, coarse, fine, ..Default::default() }
    }

    pub fn with_solver(mut self, s: LsSolver) -> Self {
        self.ls_solver = s;
        self
    }

    pub fn with_interblock(mut self, i: Interblock) -> Self {
        self.interblock = i;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.block_width == 0 {
            return Err(invalid("block width must be >= 1"));
        }
        self.ls_solver.validate()?;
        if let Interblock::SketchedCholqr(0) = self.interblock {
            return Err(invalid("sketched CholQR needs l >= 1"));
        }
        if self.fine.unit_roundoff() > self.coarse.unit_roundoff() {
            return Err(invalid("fine precision must not be coarser than the coarse precision"));
        }
        Ok(())
    }
}

/// Incremental RBGS state.
#[derive(Debug, Clone)]
pub struct Rbgs<'a> {
    theta: &'a SketchOperator,
    cfg: RbgsConfig,
    q: Matrix,
    s: Matrix,
    p: Matrix,
    s_blocks: Vec<Matrix>,
    r_cols: Vec<Matrix>,
    widths: Vec<usize>,
    per_block_ortho: Vec<f64>,
    per_block_resid: Vec<f64>,
    last_coeffs: Option<Matrix>,
}

impl<'a> Rbgs<'a> {
    pub fn new(theta: &'a SketchOperator, cfg: RbgsConfig) -> Result<Self> {
        cfg.validate()?;
        let (k, n) = (theta.k(), theta.n());
        Ok(Rbgs {
            theta,
            cfg,
            q: Matrix::zeros(n, 0),
            s: Matrix::zeros(k, 0),
            p: Matrix::zeros(k, 0),
            s_blocks: Vec::new(),
            r_cols: Vec::new(),
            widths: Vec::new(),
            per_block_ortho: Vec::new(),
            per_block_resid: Vec::new(),
            last_coeffs: None,
        })
    }

    pub fn cols(&self) -> usize {
        self.q.cols()
    }

    pub fn num_blocks(&self) -> usize {
        self.widths.len()
    }

    pub fn q(&self) -> &Matrix {
        &self.q
    }

    pub fn s(&self) -> &Matrix {
        &self.s
    }

    pub fn p(&self) -> &Matrix {
        &self.p
    }

    pub fn widths(&self) -> &[usize] {
        &self.widths
    }

    pub fn config(&self) -> &RbgsConfig {
        &self.cfg
    }

    /// Projection coefficients `R_(1:i-1,i)` of the last pushed block; kept
    /// when the block is rejected as dependent.
    pub fn last_coeffs(&self) -> Option<&Matrix> {
        self.last_coeffs.as_ref()
    }

    pub fn r(&self) -> Matrix {
        assemble_r(&self.r_cols)
    }

    /// Runs one RBGS iteration on the block `w`. Blocks are numbered from 1
    /// in errors.
    pub fn push_block(&mut self, w: &Matrix) -> Result<()> {
        if w.rows() != self.theta.n() {
            return Err(Error::DimensionMismatch { op: "rbgs block", left: (self.theta.k(), self.theta.n()), right: w.shape() });
        }
        if self.cols() + w.cols() > self.theta.k() {
            return Err(invalid(format!(
                "basis of {} columns exceeds the sketch dimension k={}",
                self.cols() + w.cols(),
                self.theta.k()
            )));
        }
        let block = self.widths.len() + 1;
        let RbgsConfig { coarse, fine, .. } = self.cfg;

        let pi = self.theta.apply_prec(w, fine)?;
        let (x, qp) = if self.cols() == 0 {
            (Matrix::zeros(0, w.cols()), w.clone())
        } else {
            let x = lstsq::solve(self.cfg.ls_solver, &self.s, &self.s_blocks, &pi, fine)?;
            let qp = gemm(-1.0, &self.q, &x, 1.0, Some(w), coarse)?;
            (x, qp)
        };
        self.last_coeffs = Some(x.clone());
        if qp.frobenius_norm() <= w.rows() as f64 * U_FINE * w.frobenius_norm() {
            return Err(Error::DependentBlock { block });
        }
        let ib = interblock::factor(self.cfg.interblock, &qp, self.theta, self.cfg.sketch_direct)
            .map_err(|e| Error::InterblockFailure { block, reason: e.to_string() })?;

        let mut col = Matrix::zeros(x.rows() + ib.r.rows(), w.cols());
        col.set_block(0, 0, &x);
        col.set_block(x.rows(), 0, &ib.r);
        self.q.append_columns(&ib.q)?;
        self.s.append_columns(&ib.s)?;
        self.p.append_columns(&pi)?;
        self.s_blocks.push(ib.s.clone());
        if self.cfg.certify_blocks {
            self.per_block_ortho.push(certify::sketch_orthogonality(&ib.s)?);
            let res = gemm(-1.0, &self.s, &col, 1.0, Some(&pi), Precision::Fine)?;
            let pn = pi.frobenius_norm();
            self.per_block_resid.push(if pn > 0.0 { res.frobenius_norm() / pn } else { 0.0 });
        }
        self.r_cols.push(col);
        self.widths.push(w.cols());
        Ok(())
    }

    /// Certificate of the factorization so far.
    pub fn certificate(&self) -> Result<CertReport> {
        let mut c = certify(&self.s, &self.p, &self.r())?;
        c.per_block_ortho = self.per_block_ortho.clone();
        c.per_block_resid = self.per_block_resid.clone();
        Ok(c)
    }

    pub fn into_block_qr(self) -> Result<BlockQR> {
        let cert = self.certificate()?;
        let r = self.r();
        let partition = BlockPartition::from_widths(&self.widths)?;
        Ok(BlockQR { q: self.q, r, s: Some(self.s), p: Some(self.p), partition, cert: Some(cert) })
    }
}

/// RBGS factorization `W = Q R` with `Theta Q` orthonormal.
pub fn rbgs(w: &Matrix, theta: &SketchOperator, cfg: &RbgsConfig) -> Result<BlockQR> {
    if w.cols() > theta.k() {
        return Err(invalid(format!("rbgs needs m <= k, got m={} k={}", w.cols(), theta.k())));
    }
    let part = BlockPartition::uniform(w.cols(), cfg.block_width)?;
    let mut state = Rbgs::new(theta, *cfg)?;
    for i in 0..part.num_blocks() {
        state.push_block(&w.columns(part.range(i)))?;
    }
    state.into_block_qr()
}
