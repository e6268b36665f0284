//! Certification and post-processing of randomized factorizations.

use crate::error::{invalid, Error, Result};
use crate::factor::{BlockQR, CertReport};
use crate::kernels::gemm::mul;
use crate::kernels::{cholesky, cond_estimate, gemm, gemm_tn, householder_r, singular_values, triangular_solve, Side};
use crate::matrix::Matrix;
use crate::precision::{Precision, U_FINE};
use crate::sketch::{distortion, SketchOperator};

/// `||I - S^T S||_F`.
pub fn sketch_orthogonality(s: &Matrix) -> Result<f64> {
    let g = gemm_tn(-1.0, s, s, 0.0, None, Precision::Fine)?;
    let mut acc = 0.0;
    for j in 0..g.cols() {
        for i in 0..g.rows() {
            let v = if i == j { 1.0 + g[(i, j)] } else { g[(i, j)] };
            acc += v * v;
        }
    }
    Ok(acc.sqrt())
}

/// Global certification quantities from the sketches alone.
pub fn certify(s: &Matrix, p: &Matrix, r: &Matrix) -> Result<CertReport> {
    let pn = p.frobenius_norm();
    if pn == 0.0 {
        return Err(invalid("certify: sketch of W is zero"));
    }
    let res = gemm(-1.0, s, r, 1.0, Some(p), Precision::Fine)?;
    Ok(CertReport {
        delta: sketch_orthogonality(s)?,
        delta_tilde: res.frobenius_norm() / pn,
        per_block_ortho: Vec::new(),
        per_block_resid: Vec::new(),
    })
}

/// Cholesky QR pass making `Q` orthonormal in the Euclidean inner product:
/// `R' = chol(Q^T Q)`, `Q <- Q R'^{-1}`, `R <- R' R`. Sketches are updated
/// to `S R'^{-1}` and the certificate recomputed.
pub fn cholesky_qr_postprocess(f: &BlockQR) -> Result<BlockQR> {
    let cond = cond_estimate(&f.q)?;
    if !(cond <= 100.0) {
        return Err(Error::RankDeficient { context: format!("post-processing needs cond(Q) <= 100, got {cond:e}") });
    }
    let g = gemm_tn(1.0, &f.q, &f.q, 0.0, None, Precision::Fine)?;
    let rp = cholesky(&g)?;
    let q = triangular_solve(&rp, &f.q, Side::Right)?;
    let r = mul(&rp, &f.r);
    let s = match &f.s {
        Some(s) => Some(triangular_solve(&rp, s, Side::Right)?),
        None => None,
    };
    let cert = match (&s, &f.p) {
        (Some(s), Some(p)) => Some(certify(s, p, &r)?),
        _ => None,
    };
    Ok(BlockQR { q, r, s, p: f.p.clone(), partition: f.partition.clone(), cert })
}

/// Distortion of `theta` on `range(M)` measured with an independent sketch
/// `phi`: `max |sigma^2 - 1|` over `(Theta M) R_phi^{-1}`, where `R_phi` is
/// the R factor of `Phi M`.
fn embedding_defect(m: &Matrix, theta: &SketchOperator, phi: &SketchOperator) -> Result<f64> {
    let rphi = householder_r(&phi.apply(m)?)?;
    let rmax = (0..rphi.rows()).map(|i| rphi[(i, i)]).fold(0.0, f64::max);
    let tol = phi.k() as f64 * U_FINE * rmax;
    if (0..rphi.rows()).any(|i| rphi[(i, i)] <= tol) {
        return Err(Error::RankDeficient { context: "second sketch of the basis".into() });
    }
    let x = triangular_solve(&rphi, &theta.apply(m)?, Side::Right)?;
    Ok(distortion(&singular_values(&x)?))
}

/// Returns `(eps_Q, eps_W)`. Never gates anything by itself.
pub fn certify_embedding(q: &Matrix, w: &Matrix, theta: &SketchOperator, phi: &SketchOperator) -> Result<(f64, f64)> {
    Ok((embedding_defect(q, theta, phi)?, embedding_defect(w, theta, phi)?))
}
