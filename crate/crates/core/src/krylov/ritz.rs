//! Rayleigh-Ritz with restarting, and a subspace-iteration baseline.
//!
//! Complex Ritz pairs are stored in real form: a value with positive
//! imaginary part at index `j` is followed by its conjugate, and vector
//! columns `j`, `j+1` hold the real and imaginary parts. Normalization is
//! applied to the complex vector as a whole.

use num_complex::Complex64;

use crate::classic::ClassicBgsConfig;
use crate::error::{invalid, Error, Result};
use crate::kernels::gemm::{mul, mul_tn};
use crate::kernels::{cond_estimate, eig, hessenberg_eig, householder_qr};
use crate::matrix::{norm2, Matrix};
use crate::precision::Precision;
use crate::rbgs::RbgsConfig;
use crate::sketch::SketchOperator;

use super::arnoldi::{classic_arnoldi_with, rbgs_arnoldi_with, ArnoldiDecomposition, ArnoldiOptions};
use super::operator::LinearOperator;

const BREAKDOWN_OK: ArnoldiOptions = ArnoldiOptions { matvec: Precision::Fine, allow_breakdown: true };

/// Diagnostics of one outer iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RitzStep {
    /// `max_j ||A u_j - mu_j u_j|| / ||mu_j u_j||` computed directly.
    pub max_rel_residual: f64,
    /// Same, using the estimates `||H_(p,1:p-1) y||`.
    pub max_rel_estimate: f64,
    pub cond_q: f64,
    pub delta: f64,
    pub delta_tilde: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RitzResult {
    pub values: Vec<Complex64>,
    /// Unit-norm Ritz vectors in paired real form.
    pub vectors: Matrix,
    /// `||H_(p,1:p-1) y|| / ||Q_in y||`, the estimate for the unit vectors.
    pub residual_estimates: Vec<f64>,
    /// Coordinates of `vectors` in the final `Q_in`.
    pub coords: Matrix,
    /// Decomposition of the last outer iteration.
    pub decomposition: ArnoldiDecomposition,
    pub history: Vec<RitzStep>,
}

/// Indices `(re, im, sign)` describing the complex vector of value `j`.
fn pair_columns(values: &[Complex64], j: usize) -> Option<(usize, usize, f64)> {
    let v = values[j];
    if v.im == 0.0 {
        None
    } else if v.im > 0.0 {
        Some((j, j + 1, 1.0))
    } else {
        Some((j - 1, j, -1.0))
    }
}

/// Joint norm of the (possibly complex) vector `j` in a paired layout.
fn paired_norm(values: &[Complex64], cols: &Matrix, j: usize) -> f64 {
    match pair_columns(values, j) {
        None => norm2(cols.col(j)),
        Some((re, im, _)) => norm2(cols.col(re)).hypot(norm2(cols.col(im))),
    }
}

/// `||A u_j - mu_j u_j||` for every stored pair.
pub fn ritz_residual_norms(a: &dyn LinearOperator, values: &[Complex64], vectors: &Matrix) -> Result<Vec<f64>> {
    if vectors.cols() != values.len() {
        return Err(invalid("one vector column per Ritz value expected"));
    }
    let av = a.apply(vectors)?;
    let mut out = Vec::with_capacity(values.len());
    for (j, &mu) in values.iter().enumerate() {
        let r = match pair_columns(values, j) {
            None => {
                let res: Vec<f64> = av.col(j).iter().zip(vectors.col(j)).map(|(y, x)| y - mu.re * x).collect();
                norm2(&res)
            }
            Some((cr, ci, sg)) => {
                let (xr, xi) = (vectors.col(cr), vectors.col(ci));
                let (yr, yi) = (av.col(cr), av.col(ci));
                let mut acc = 0.0;
                for t in 0..xr.len() {
                    let (im, aim) = (sg * xi[t], sg * yi[t]);
                    let rr = yr[t] - (mu.re * xr[t] - mu.im * im);
                    let ri = aim - (mu.re * im + mu.im * xr[t]);
                    acc += rr * rr + ri * ri;
                }
                acc.sqrt()
            }
        };
        out.push(r);
    }
    Ok(out)
}

/// Leading eigenpairs of the square part of `d`: `(values, Y)` with at least
/// `count` entries, extended by one when the cut splits a conjugate pair.
fn select_pairs(d: &ArnoldiDecomposition, count: usize) -> Result<(Vec<Complex64>, Matrix)> {
    let hs = d.h_square();
    let hessenberg = (0..hs.cols()).all(|j| (j + 2..hs.rows()).all(|i| hs[(i, j)] == 0.0));
    let (vals, vecs) = if hessenberg { hessenberg_eig(&hs)? } else { eig(&hs)? };
    let mut take = count.min(vals.len());
    if take < vals.len() && take > 0 && vals[take - 1].im > 0.0 {
        take += 1;
    }
    Ok((vals[..take].to_vec(), vecs.columns(0..take)))
}

struct RitzIterate {
    values: Vec<Complex64>,
    vectors: Matrix,
    coords: Matrix,
    estimates: Vec<f64>,
    restart: Matrix,
}

fn ritz_step(d: &ArnoldiDecomposition, count: usize) -> Result<RitzIterate> {
    let (values, y) = select_pairs(d, count)?;
    let qy = mul(&d.q_inner(), &y);
    let tail = d.h_tail();
    let hy = if tail.rows() > 0 { mul(&tail, &y) } else { Matrix::zeros(0, y.cols()) };
    let mut vectors = qy.clone();
    let mut coords = y.clone();
    let mut estimates = Vec::with_capacity(values.len());
    let norms: Vec<f64> = (0..values.len()).map(|j| paired_norm(&values, &qy, j)).collect();
    for j in 0..values.len() {
        let est = if tail.rows() > 0 { paired_norm(&values, &hy, j) } else { 0.0 };
        estimates.push(est / norms[j]);
        for v in vectors.col_mut(j) {
            *v /= norms[j];
        }
        for v in coords.col_mut(j) {
            *v /= norms[j];
        }
    }
    let restart = qy.columns(0..count.min(qy.cols()));
    Ok(RitzIterate { values, vectors, coords, estimates, restart })
}

fn rayleigh_ritz_impl(
    a: &dyn LinearOperator,
    b: &Matrix,
    n_iter: usize,
    l2: bool,
    build: impl Fn(&Matrix) -> Result<ArnoldiDecomposition>,
) -> Result<RitzResult> {
    if n_iter == 0 {
        return Err(invalid("Rayleigh-Ritz needs at least one iteration"));
    }
    let count = b.cols();
    let mut start = b.clone();
    let mut history = Vec::with_capacity(n_iter);
    let mut last = None;
    for _ in 0..n_iter {
        let mut d = build(&start)?;
        if l2 {
            d = d.l2_orthonormalized()?;
        }
        if d.inner_dim() < count {
            return Err(Error::Breakdown { order: d.order(), source: Box::new(invalid("Krylov space smaller than the block size")) });
        }
        let it = ritz_step(&d, count)?;
        let true_res = ritz_residual_norms(a, &it.values, &it.vectors)?;
        let rel = |r: &[f64]| {
            r.iter().zip(&it.values).map(|(r, mu)| if mu.norm() > 0.0 { r / mu.norm() } else { *r }).fold(0.0, f64::max)
        };
        let (delta, delta_tilde) = d.cert.as_ref().map_or((f64::NAN, f64::NAN), |c| (c.delta, c.delta_tilde));
        history.push(RitzStep {
            max_rel_residual: rel(&true_res),
            max_rel_estimate: rel(&it.estimates),
            cond_q: cond_estimate(&d.q)?,
            delta,
            delta_tilde,
        });
        start = it.restart.clone();
        last = Some((it, d));
    }
    let (it, d) = last.expect("at least one iteration");
    Ok(RitzResult {
        values: it.values,
        vectors: it.vectors,
        residual_estimates: it.estimates,
        coords: it.coords,
        decomposition: d,
        history,
    })
}

/// Randomized Rayleigh-Ritz with restarting for the `B.cols()` eigenpairs
/// of largest magnitude.
pub fn rayleigh_ritz(
    a: &dyn LinearOperator,
    b: &Matrix,
    theta: &SketchOperator,
    p: usize,
    n_iter: usize,
    cfg: &RbgsConfig,
) -> Result<RitzResult> {
    rayleigh_ritz_impl(a, b, n_iter, false, |s| rbgs_arnoldi_with(a, s, theta, p, cfg, BREAKDOWN_OK))
}

/// As [`rayleigh_ritz`] with the basis made Euclidean-orthonormal by a
/// Cholesky QR step before the small eigenproblem (classical Galerkin).
pub fn rayleigh_ritz_l2(
    a: &dyn LinearOperator,
    b: &Matrix,
    theta: &SketchOperator,
    p: usize,
    n_iter: usize,
    cfg: &RbgsConfig,
) -> Result<RitzResult> {
    rayleigh_ritz_impl(a, b, n_iter, true, |s| rbgs_arnoldi_with(a, s, theta, p, cfg, BREAKDOWN_OK))
}

/// Rayleigh-Ritz with restarting on a classical block Gram-Schmidt basis.
pub fn classic_rayleigh_ritz(
    a: &dyn LinearOperator,
    b: &Matrix,
    p: usize,
    n_iter: usize,
    cfg: ClassicBgsConfig,
) -> Result<RitzResult> {
    rayleigh_ritz_impl(a, b, n_iter, false, |s| classic_arnoldi_with(a, s, p, cfg, BREAKDOWN_OK))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceResult {
    pub values: Vec<Complex64>,
    pub vectors: Matrix,
    /// Max relative residual after each iteration.
    pub history: Vec<f64>,
}

/// Repeated `B <- orth(A B)` with Rayleigh quotients of the final block.
/// Uses `n_iter + 1` block products.
pub fn subspace_iteration(a: &dyn LinearOperator, b: &Matrix, n_iter: usize) -> Result<SubspaceResult> {
    if b.rows() != a.dim() || b.cols() == 0 || b.cols() > b.rows() {
        return Err(Error::DimensionMismatch { op: "subspace_iteration", left: (a.dim(), a.dim()), right: b.shape() });
    }
    let (mut q, _) = householder_qr(b)?;
    let mut z = a.apply(&q)?;
    let rr = |q: &Matrix, z: &Matrix| -> Result<(Vec<Complex64>, Matrix, f64)> {
        let (vals, y) = eig(&mul_tn(q, z))?;
        let u = mul(q, &y);
        let mut vecs = u.clone();
        for j in 0..vals.len() {
            let nrm = paired_norm(&vals, &u, j);
            for v in vecs.col_mut(j) {
                *v /= nrm;
            }
        }
        // A u = Z y, so the residual needs no extra product
        let mut zy = mul(z, &y);
        for j in 0..vals.len() {
            let nrm = paired_norm(&vals, &u, j);
            for v in zy.col_mut(j) {
                *v /= nrm;
            }
        }
        let worst = residuals_from_images(&vals, &vecs, &zy)
            .iter()
            .zip(&vals)
            .map(|(r, mu)| if mu.norm() > 0.0 { r / mu.norm() } else { *r })
            .fold(0.0, f64::max);
        Ok((vals, vecs, worst))
    };
    let mut history = Vec::with_capacity(n_iter);
    for _ in 0..n_iter {
        q = householder_qr(&z)?.0;
        z = a.apply(&q)?;
        history.push(rr(&q, &z)?.2);
    }
    let (values, vectors, _) = rr(&q, &z)?;
    Ok(SubspaceResult { values, vectors, history })
}

fn residuals_from_images(values: &[Complex64], x: &Matrix, ax: &Matrix) -> Vec<f64> {
    (0..values.len())
        .map(|j| {
            let mu = values[j];
            match pair_columns(values, j) {
                None => {
                    let r: Vec<f64> = ax.col(j).iter().zip(x.col(j)).map(|(y, x)| y - mu.re * x).collect();
                    norm2(&r)
                }
                Some((cr, ci, sg)) => {
                    let mut acc = 0.0;
                    for t in 0..x.rows() {
                        let (im, aim) = (sg * x[(t, ci)], sg * ax[(t, ci)]);
                        let rr = ax[(t, cr)] - (mu.re * x[(t, cr)] - mu.im * im);
                        let ri = aim - (mu.re * im + mu.im * x[(t, cr)]);
                        acc += rr * rr + ri * ri;
                    }
                    acc.sqrt()
                }
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::singular_values;
    use crate::krylov::operator::DenseOperator;
    use crate::precision::{PrecisionMode, U_FINE};
    use crate::sketch::SketchKind;

    fn diag_op(v: &[f64]) -> DenseOperator {
        DenseOperator::new(Matrix::diag(v)).unwrap()
    }

    fn start(n: usize, m: usize) -> Matrix {
        Matrix::from_fn(n, m, |i, j| ((i * 7 + j * 13) % 11) as f64 - 4.5 + 0.1 * j as f64)
    }

    #[test]
    fn dominant_value_of_diag() {
        let mut d = vec![1.0; 50];
        d[0] = 10.0;
        let a = diag_op(&d);
        let th = SketchOperator::identity(50);
        let cfg = RbgsConfig::new(1, PrecisionMode::UniqueFine);
        let res = rayleigh_ritz(&a, &start(50, 1), &th, 3, 3, &cfg).unwrap();
        assert!((res.values[0].re - 10.0).abs() <= 1e-8 * 10.0, "{:?}", res.values);
        assert!(res.residual_estimates[0] <= 1e-8);
        assert!((norm2(res.vectors.col(0)) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn sandwich_bound_holds() {
        let n = 200;
        let d: Vec<f64> = (0..n).map(|i| 1.0 / (1.0 + i as f64)).collect();
        let a = diag_op(&d);
        let th = SketchOperator::new(SketchKind::Srht, 60, n, 5).unwrap();
        let cfg = RbgsConfig::new(2, PrecisionMode::UniqueFine);
        let res = rayleigh_ritz(&a, &start(n, 2), &th, 6, 2, &cfg).unwrap();
        let sv = singular_values(&res.decomposition.q).unwrap();
        let (smax, smin) = (sv[0], *sv.last().unwrap());
        let truth = ritz_residual_norms(&a, &res.values, &res.vectors).unwrap();
        for (t, e) in truth.iter().zip(&res.residual_estimates) {
            assert!(smin * e <= t * (1.0 + 1e-8) && *t <= smax * e * (1.0 + 1e-8), "{smin} {e} {t} {smax}");
        }
    }

    #[test]
    fn l2_variant_with_identity_sketch_agrees() {
        let n = 80;
        let d: Vec<f64> = (0..n).map(|i| 3.0 - 0.02 * i as f64).collect();
        let a = diag_op(&d);
        let th = SketchOperator::identity(n);
        let cfg = RbgsConfig::new(2, PrecisionMode::UniqueFine);
        let r1 = rayleigh_ritz(&a, &start(n, 2), &th, 5, 2, &cfg).unwrap();
        let r2 = rayleigh_ritz_l2(&a, &start(n, 2), &th, 5, 2, &cfg).unwrap();
        for (x, y) in r1.values.iter().zip(&r2.values) {
            assert!((x - y).norm() <= 1e3 * U_FINE * x.norm(), "{x} {y}");
        }
    }

    #[test]
    fn l2_variant_gives_real_values_and_exact_estimates() {
        let n = 300;
        let d: Vec<f64> = (0..n).map(|i| (1.0 + i as f64).sqrt()).collect();
        let a = diag_op(&d);
        let th = SketchOperator::new(SketchKind::Rademacher, 50, n, 2).unwrap();
        let cfg = RbgsConfig::new(3, PrecisionMode::UniqueFine);
        let res = rayleigh_ritz_l2(&a, &start(n, 3), &th, 5, 2, &cfg).unwrap();
        assert!(res.values.iter().all(|v| v.im.abs() <= 1e-10));
        let truth = ritz_residual_norms(&a, &res.values, &res.vectors).unwrap();
        for (t, e) in truth.iter().zip(&res.residual_estimates) {
            assert!((t - e).abs() <= 1e-8 * t, "{t} {e}");
        }
    }

    #[test]
    fn complex_pairs_stay_adjacent() {
        // rotation block with eigenvalues 2 +- i plus a small diagonal
        let n = 30;
        let mut m = Matrix::diag(&(0..n).map(|i| 0.1 * (i % 5) as f64).collect::<Vec<_>>());
        m[(0, 0)] = 2.0;
        m[(1, 1)] = 2.0;
        m[(0, 1)] = 1.0;
        m[(1, 0)] = -1.0;
        let a = DenseOperator::new(m).unwrap();
        let th = SketchOperator::identity(n);
        let cfg = RbgsConfig::new(2, PrecisionMode::UniqueFine);
        let res = rayleigh_ritz(&a, &start(n, 2), &th, 8, 4, &cfg).unwrap();
        assert!(res.values[0].im > 0.0);
        assert_eq!(res.values[1], res.values[0].conj());
        assert!((res.values[0] - Complex64::new(2.0, 1.0)).norm() < 1e-8);
        let truth = ritz_residual_norms(&a, &res.values, &res.vectors).unwrap();
        assert!(truth[0] < 1e-8);
        let nrm = norm2(res.vectors.col(0)).hypot(norm2(res.vectors.col(1)));
        assert!((nrm - 1.0).abs() < 1e-14);
    }

    #[test]
    fn subspace_iteration_rate() {
        let a = diag_op(&[2.0, 1.0]);
        let b = Matrix::column_vector(&[1.0, 1.0]);
        let res = subspace_iteration(&a, &b, 10).unwrap();
        assert!((res.values[0].re - 2.0).abs() < 1e-5);
        let v = res.vectors.col(0);
        // tan of the angle to e1 halves every iteration
        assert!((v[1] / v[0]).abs() <= 0.5f64.powi(10) * 1.0001);
        assert!((v[1] / v[0]).abs() >= 0.5f64.powi(10) * 0.9999);
    }

    #[test]
    fn invariant_start_is_exact() {
        let a = diag_op(&[5.0, 3.0, 1.0, 0.5]);
        let b = Matrix::from_rows(&[&[1.0, 1.0], &[1.0, -1.0], &[0.0, 0.0], &[0.0, 0.0]]);
        let res = subspace_iteration(&a, &b, 1).unwrap();
        assert!((res.values[0].re - 5.0).abs() < 1e-14);
        assert!((res.values[1].re - 3.0).abs() < 1e-14);
        assert!(res.history[0] < 1e-15);
    }
}
