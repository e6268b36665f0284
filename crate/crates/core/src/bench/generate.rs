//! Test matrix generators.

use crate::error::{invalid, Result};
use crate::krylov::CsrMatrix;
use crate::matrix::Matrix;

/// `f_mu(x) = sin(10 (mu + x)) / (cos(100 (mu - x)) + 1.1)`.
pub fn parametric_function(mu: f64, x: f64) -> f64 {
    (10.0 * (mu + x)).sin() / ((100.0 * (mu - x)).cos() + 1.1)
}

/// `n x m` snapshot matrix `W[i][j] = f_(mu_j)(x_i)` with `x_i = (i + 1) / n`
/// and `mu_j = (j + 1) / m`. Neighbouring columns are strongly correlated, so
/// the condition number of the leading columns grows quickly.
pub fn gen_synthetic(n: usize, m: usize) -> Result<Matrix> {
    if n < 2 || m < 2 {
        return Err(invalid(format!("synthetic matrix needs n, m >= 2, got {n}x{m}")));
    }
    Ok(Matrix::from_fn(n, m, |i, j| parametric_function((j + 1) as f64 / m as f64, (i + 1) as f64 / n as f64)))
}

/// Finite-difference Laplacian with Dirichlet boundary on a `grid[0] x
/// grid[1] x ...` lattice plus `shift * I`. One dimension gives
/// `tridiag(-1, 2, -1)`, two give the 5-point stencil. Unknowns are ordered
/// with the first index fastest.
pub fn gen_laplacian(grid: &[usize], shift: f64) -> Result<CsrMatrix> {
    if grid.is_empty() || grid.iter().any(|&g| g < 2) {
        return Err(invalid(format!("grid dimensions must be >= 2, got {grid:?}")));
    }
    if !shift.is_finite() {
        return Err(invalid("shift must be finite"));
    }
    let n: usize = grid.iter().product();
    let mut strides = Vec::with_capacity(grid.len());
    let mut acc = 1;
    for &g in grid {
        strides.push(acc);
        acc *= g;
    }
    let diag = 2.0 * grid.len() as f64 + shift;
    let mut trip = Vec::with_capacity(n * (2 * grid.len() + 1));
    for row in 0..n {
        trip.push((row, row, diag));
        for (&g, &st) in grid.iter().zip(&strides) {
            let coord = (row / st) % g;
            if coord > 0 {
                trip.push((row, row - st, -1.0));
            }
            if coord + 1 < g {
                trip.push((row, row + st, -1.0));
            }
        }
    }
    CsrMatrix::from_triplets(n, n, &trip)
}

/// Eigenvalues of [`gen_laplacian`] in closed form, in descending order.
pub fn laplacian_eigenvalues(grid: &[usize], shift: f64) -> Vec<f64> {
    let axis = |g: usize| -> Vec<f64> {
        (1..=g).map(|j| 4.0 * (j as f64 * std::f64::consts::PI / (2.0 * (g + 1) as f64)).sin().powi(2)).collect()
    };
    let mut vals = vec![shift];
    for &g in grid {
        let lam = axis(g);
        vals = vals.iter().flat_map(|v| lam.iter().map(move |l| v + l)).collect();
    }
    vals.sort_by(|a, b| b.total_cmp(a));
    vals
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{cond_estimate, eig};
    use crate::krylov::LinearOperator;

    #[test]
    fn synthetic_first_entry() {
        let w = gen_synthetic(4, 3).unwrap();
        let expect = (10.0f64 * (1.0 / 3.0 + 0.25)).sin() / ((100.0f64 * (1.0 / 3.0 - 0.25)).cos() + 1.1);
        assert_eq!(w[(0, 0)], expect);
        assert_eq!(w.shape(), (4, 3));
    }

    #[test]
    fn synthetic_on_diagonal() {
        // x = mu when n = m
        let w = gen_synthetic(5, 5).unwrap();
        for i in 0..5 {
            let x = (i + 1) as f64 / 5.0;
            assert!((w[(i, i)] - (20.0 * x).sin() / 2.1).abs() < 1e-15);
        }
    }

    #[test]
    fn synthetic_is_ill_conditioned() {
        let w = gen_synthetic(2048, 80).unwrap();
        assert!(cond_estimate(&w).unwrap() > 1e8);
        assert!(gen_synthetic(1, 4).is_err());
    }

    #[test]
    fn laplacian_1d_spectrum() {
        let a = gen_laplacian(&[3], 0.0).unwrap();
        let d = a.to_dense();
        assert_eq!(d, Matrix::from_rows(&[&[2.0, -1.0, 0.0], &[-1.0, 2.0, -1.0], &[0.0, -1.0, 2.0]]));
        let (vals, _) = eig(&d).unwrap();
        let mut re: Vec<f64> = vals.iter().map(|v| v.re).collect();
        re.sort_by(|a, b| b.total_cmp(a));
        let s2 = 2f64.sqrt();
        for (x, y) in re.iter().zip([2.0 + s2, 2.0, 2.0 - s2]) {
            assert!((x - y).abs() < 1e-12);
        }
        for (x, y) in re.iter().zip(laplacian_eigenvalues(&[3], 0.0)) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn laplacian_2d_constant_vector() {
        let a = gen_laplacian(&[5, 4], 0.0).unwrap();
        assert_eq!(a.nnz(), 20 + 2 * (4 * 4 + 5 * 3));
        let y = a.apply(&Matrix::from_fn(20, 1, |_, _| 1.0)).unwrap();
        for iy in 0..4 {
            for ix in 0..5 {
                let v = y[(ix + 5 * iy, 0)];
                let boundary = ix == 0 || ix == 4 || iy == 0 || iy == 3;
                assert_eq!(v != 0.0, boundary, "({ix}, {iy})");
            }
        }
    }

    #[test]
    fn laplacian_shift_and_symmetry() {
        let a = gen_laplacian(&[4, 3], 1.5).unwrap().to_dense();
        assert_eq!(a, a.transpose());
        assert_eq!(a[(0, 0)], 5.5);
        let (vals, _) = eig(&a).unwrap();
        let mut re: Vec<f64> = vals.iter().map(|v| v.re).collect();
        re.sort_by(|a, b| b.total_cmp(a));
        for (x, y) in re.iter().zip(laplacian_eigenvalues(&[4, 3], 1.5)) {
            assert!((x - y).abs() < 1e-12, "{x} {y}");
        }
    }
}
