//! Sketch-size selection and empirical embedding checks.

use super::operator::{SketchKind, SketchOperator};
use crate::error::{invalid, Error, Result};
use crate::kernels::{householder_qr, singular_values};
use crate::matrix::Matrix;

/// Target distortion `epsilon`, failure probability `delta` and subspace
/// dimension `d` of an oblivious embedding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmbeddingParams {
    pub epsilon: f64,
    pub delta: f64,
    pub d: usize,
}

impl EmbeddingParams {
    pub fn new(epsilon: f64, delta: f64, d: usize) -> Result<Self> {
        let p = EmbeddingParams { epsilon, delta, d };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(invalid(format!("epsilon {} outside (0, 1)", self.epsilon)));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(invalid(format!("delta {} outside (0, 1)", self.delta)));
        }
        if self.d == 0 {
            return Err(invalid("subspace dimension d must be >= 1"));
        }
        Ok(())
    }
}

/// Smallest sketch dimension satisfying the a priori bound for `kind`,
/// capped at `n`. Logarithms are natural. The identity kind returns `n`.
pub fn min_sketch_dim(params: EmbeddingParams, kind: SketchKind, n: usize) -> usize {
    let EmbeddingParams { epsilon: e, delta, d } = params;
    let d = d as f64;
    let bound = match kind {
        SketchKind::Rademacher => 7.87 / (e * e) * (6.9 * d + (1.0 / delta).ln()),
        SketchKind::Srht => {
            let a = d.sqrt() + (8.0 * (6.0 * n as f64 / delta).ln()).sqrt();
            2.0 / (e * e - e * e * e / 3.0) * a * a * (3.0 * d / delta).ln()
        }
        SketchKind::Identity => return n,
    };
    let k = bound.ceil() as usize;
    k.min(n)
}

fn orthonormal_basis(v: &Matrix) -> Result<Matrix> {
    let (q, r) = householder_qr(v)?;
    let m = r.rows();
    let rmax = (0..m).map(|i| r[(i, i)]).fold(0.0, f64::max);
    let tol = v.rows().max(1) as f64 * crate::U_FINE * rmax;
    if (0..m).any(|i| r[(i, i)] <= tol) {
        return Err(Error::RankDeficient {
            context: "embedding check needs a full column rank basis".into(),
        });
    }
    Ok(q)
}

/// Observed distortion of `theta` on `range(V)`.
///
/// Returns `(observed_eps <= epsilon, observed_eps)` where
/// `observed_eps = max(1 - sigma_min^2, sigma_max^2 - 1)` over the singular
/// values of `Theta Q` for an orthonormal basis `Q` of `range(V)`.
pub fn check_embedding(theta: &SketchOperator, v: &Matrix, epsilon: f64) -> Result<(bool, f64)> {
    let q = orthonormal_basis(v)?;
    let s = singular_values(&theta.apply(&q)?)?;
    let eps = distortion(&s);
    Ok((eps <= epsilon, eps))
}

/// `max(1 - sigma_min^2, sigma_max^2 - 1)`, clipped at zero.
pub fn distortion(singular_values: &[f64]) -> f64 {
    let hi = singular_values.first().copied().unwrap_or(1.0);
    let lo = singular_values.last().copied().unwrap_or(1.0);
    (1.0 - lo * lo).max(hi * hi - 1.0).max(0.0)
}

/// `||Theta||_F` by materialization.
pub fn operator_norm_bound_check(theta: &SketchOperator) -> f64 {
    theta.materialize().frobenius_norm()
}
