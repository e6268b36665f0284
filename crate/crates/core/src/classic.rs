//! Classical block Gram-Schmidt: BCGS, BMGS and BCGS2.
//!
//! Projections run in the configured precision. Inter-block factorizations
//! always run in binary64.

use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::factor::BlockQR;
use crate::kernels::gemm::mul;
use crate::kernels::{cholesky, gemm, gemm_tn, householder_qr, triangular_solve, Side};
use crate::matrix::{norm2, BlockPartition, Matrix};
use crate::precision::{Precision, U_FINE};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassicVariant {
    Bcgs,
    Bmgs,
    Bcgs2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassicInterblock {
    Householder,
    Cgs2,
    Cholqr,
}

impl fmt::Display for ClassicVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClassicVariant::Bcgs => "bcgs",
            ClassicVariant::Bmgs => "bmgs",
            ClassicVariant::Bcgs2 => "bcgs2",
        })
    }
}

impl FromStr for ClassicVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bcgs" => Ok(ClassicVariant::Bcgs),
            "bmgs" => Ok(ClassicVariant::Bmgs),
            "bcgs2" => Ok(ClassicVariant::Bcgs2),
            other => Err(invalid(format!("unknown classical variant '{other}'"))),
        }
    }
}

impl fmt::Display for ClassicInterblock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClassicInterblock::Householder => "householder",
            ClassicInterblock::Cgs2 => "cgs2",
            ClassicInterblock::Cholqr => "cholqr",
        })
    }
}

impl FromStr for ClassicInterblock {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "householder" => Ok(ClassicInterblock::Householder),
            "cgs2" => Ok(ClassicInterblock::Cgs2),
            "cholqr" => Ok(ClassicInterblock::Cholqr),
            other => Err(invalid(format!("unknown inter-block method '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicBgsConfig {
    pub variant: ClassicVariant,
    pub block_width: usize,
    pub precision: Precision,
    pub interblock: ClassicInterblock,
}

impl ClassicBgsConfig {
    pub fn new(variant: ClassicVariant, block_width: usize, precision: Precision) -> Self {
        ClassicBgsConfig { variant, block_width, precision, interblock: ClassicInterblock::Householder }
    }
}

/// Orthonormal-column factorization of a single block in binary64.
pub fn interblock_l2(v: &Matrix, method: ClassicInterblock) -> Result<(Matrix, Matrix)> {
    match method {
        ClassicInterblock::Householder => householder_qr(v),
        ClassicInterblock::Cholqr => {
            let g = gemm_tn(1.0, v, v, 0.0, None, Precision::Fine)?;
            let r = cholesky(&g)?;
            Ok((triangular_solve(&r, v, Side::Right)?, r))
        }
        ClassicInterblock::Cgs2 => {
            let (n, w) = v.shape();
            let mut q = Matrix::zeros(n, w);
            let mut r = Matrix::zeros(w, w);
            for t in 0..w {
                let mut x = v.col(t).to_vec();
                for _ in 0..2 {
                    for j in 0..t {
                        let c = crate::matrix::dot(q.col(j), &x);
                        r[(j, t)] += c;
                        for (xi, qi) in x.iter_mut().zip(q.col(j)) {
                            *xi -= c * qi;
                        }
                    }
                }
                let nrm = norm2(&x);
                r[(t, t)] = nrm;
                if nrm > 0.0 {
                    for (qi, xi) in q.col_mut(t).iter_mut().zip(&x) {
                        *qi = xi / nrm;
                    }
                }
            }
            Ok((q, r))
        }
    }
}

/// Incremental classical block Gram-Schmidt.
#[derive(Debug, Clone)]
pub struct ClassicBgs {
    cfg: ClassicBgsConfig,
    q: Matrix,
    r_cols: Vec<Matrix>,
    widths: Vec<usize>,
    last_coeffs: Option<Matrix>,
}

impl ClassicBgs {
    pub fn new(cfg: ClassicBgsConfig, n: usize) -> Self {
        ClassicBgs { cfg, q: Matrix::zeros(n, 0), r_cols: Vec::new(), widths: Vec::new(), last_coeffs: None }
    }

    pub fn cols(&self) -> usize {
        self.q.cols()
    }

    pub fn q(&self) -> &Matrix {
        &self.q
    }

    pub fn widths(&self) -> &[usize] {
        &self.widths
    }

    /// Projection coefficients of the block that was last pushed, kept even
    /// when that block turned out to be dependent.
    pub fn last_coeffs(&self) -> Option<&Matrix> {
        self.last_coeffs.as_ref()
    }

    fn project(&self, w: &Matrix) -> Result<(Matrix, Matrix)> {
        let prec = self.cfg.precision;
        let m = self.q.cols();
        if m == 0 {
            return Ok((Matrix::zeros(0, w.cols()), w.clone()));
        }
        match self.cfg.variant {
            ClassicVariant::Bcgs | ClassicVariant::Bcgs2 => {
                let x = gemm_tn(1.0, &self.q, w, 0.0, None, prec)?;
                let v = gemm(-1.0, &self.q, &x, 1.0, Some(w), prec)?;
                Ok((x, v))
            }
            ClassicVariant::Bmgs => {
                let mut v = w.clone();
                let mut x = Matrix::zeros(m, w.cols());
                let mut off = 0;
                for &wj in &self.widths {
                    let qj = self.q.columns(off..off + wj);
                    let xj = gemm_tn(1.0, &qj, &v, 0.0, None, prec)?;
                    v = gemm(-1.0, &qj, &xj, 1.0, Some(&v), prec)?;
                    x.set_block(off, 0, &xj);
                    off += wj;
                }
                Ok((x, v))
            }
        }
    }

    fn dependent(&self, v: &Matrix, w: &Matrix) -> bool {
        let n = w.rows() as f64;
        v.frobenius_norm() <= n * U_FINE * w.frobenius_norm()
    }

    /// Orthogonalizes the next block against the current basis.
    pub fn push_block(&mut self, w: &Matrix) -> Result<()> {
        if w.rows() != self.q.rows() {
            return Err(Error::DimensionMismatch { op: "classic_bgs block", left: self.q.shape(), right: w.shape() });
        }
        let block = self.widths.len() + 1;
        let (x, v) = self.project(w)?;
        self.last_coeffs = Some(x.clone());
        if self.dependent(&v, w) {
            return Err(Error::DependentBlock { block });
        }
        let fail = |e: Error| Error::InterblockFailure { block, reason: e.to_string() };
        let (qi, rtop, rii) = if self.cfg.variant == ClassicVariant::Bcgs2 && self.q.cols() > 0 {
            let (q1, r1) = interblock_l2(&v, self.cfg.interblock).map_err(fail)?;
            let (x2, v2) = self.project(&q1)?;
            if self.dependent(&v2, &q1) {
                return Err(Error::DependentBlock { block });
            }
            let (q2, r2) = interblock_l2(&v2, self.cfg.interblock).map_err(fail)?;
            let rtop = x.add(&mul(&x2, &r1))?;
            (q2, rtop, mul(&r2, &r1))
        } else {
            let (q1, r1) = interblock_l2(&v, self.cfg.interblock).map_err(fail)?;
            (q1, x, r1)
        };
        self.last_coeffs = Some(rtop.clone());
        let mut col = Matrix::zeros(rtop.rows() + rii.rows(), w.cols());
        col.set_block(0, 0, &rtop);
        col.set_block(rtop.rows(), 0, &rii);
        self.r_cols.push(col);
        self.q.append_columns(&qi.with_precision(self.cfg.precision))?;
        self.widths.push(w.cols());
        Ok(())
    }

    /// Upper triangular factor assembled from the stored block columns.
    pub fn r(&self) -> Matrix {
        assemble_r(&self.r_cols)
    }

    pub fn into_block_qr(self) -> Result<BlockQR> {
        let r = self.r();
        let partition = BlockPartition::from_widths(&self.widths)?;
        Ok(BlockQR { q: self.q, r, s: None, p: None, partition, cert: None })
    }
}

pub(crate) fn assemble_r(cols: &[Matrix]) -> Matrix {
    let m: usize = cols.iter().map(|c| c.cols()).sum();
    let mut r = Matrix::zeros(m, m);
    let mut off = 0;
    for c in cols {
        r.set_block(0, off, c);
        off += c.cols();
    }
    r
}

/// Block Gram-Schmidt factorization `W = Q R` with a classical projector.
pub fn classic_bgs(w: &Matrix, cfg: ClassicBgsConfig) -> Result<BlockQR> {
    if w.cols() > w.rows() {
        return Err(invalid(format!("classic_bgs needs m <= n, got {:?}", w.shape())));
    }
    let part = BlockPartition::uniform(w.cols(), cfg.block_width)?;
    let mut state = ClassicBgs::new(cfg, w.rows());
    for i in 0..part.num_blocks() {
        state.push_block(&w.columns(part.range(i)))?;
    }
    state.into_block_qr()
}
