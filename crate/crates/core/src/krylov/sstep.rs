//! s-step Arnoldi: matrix-power blocks orthogonalized by RBGS.

use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::kernels::{triangular_solve, HouseholderQr, Side};
use crate::matrix::{BlockPartition, Matrix};
use crate::precision::Precision;
use crate::rbgs::{Rbgs, RbgsConfig};
use crate::sketch::SketchOperator;

use super::arnoldi::ArnoldiDecomposition;
use super::operator::LinearOperator;

/// Polynomial family of the power kernel, `p_0 = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PolyBasis {
    Monomial,
    /// Chebyshev polynomials scaled to the interval `[lo, hi]`.
    Chebyshev { lo: f64, hi: f64 },
}

impl PolyBasis {
    fn validate(&self) -> Result<()> {
        match *self {
            PolyBasis::Chebyshev { lo, hi } if !(lo.is_finite() && hi.is_finite() && hi > lo) => {
                Err(invalid(format!("Chebyshev interval [{lo}, {hi}] is empty")))
            }
            _ => Ok(()),
        }
    }

    /// `(c, d, e)` with `A p_j = c p_(j+1) + d p_j + e p_(j-1)`.
    fn recurrence(&self, j: usize) -> (f64, f64, f64) {
        match *self {
            PolyBasis::Monomial => (1.0, 0.0, 0.0),
            PolyBasis::Chebyshev { lo, hi } => {
                let (half, mid) = ((hi - lo) / 2.0, (hi + lo) / 2.0);
                if j == 0 {
                    (half, mid, 0.0)
                } else {
                    (half / 2.0, mid, half / 2.0)
                }
            }
        }
    }
}

impl fmt::Display for PolyBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolyBasis::Monomial => f.write_str("monomial"),
            PolyBasis::Chebyshev { lo, hi } => write!(f, "chebyshev:{lo}:{hi}"),
        }
    }
}

impl FromStr for PolyBasis {
    type Err = Error;

    /// `monomial` or `chebyshev:lo:hi`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let basis = match parts.as_slice() {
            ["monomial"] => PolyBasis::Monomial,
            ["chebyshev", lo, hi] => {
                let lo = lo.parse().map_err(|_| invalid(format!("bad interval bound '{lo}'")))?;
                let hi = hi.parse().map_err(|_| invalid(format!("bad interval bound '{hi}'")))?;
                PolyBasis::Chebyshev { lo, hi }
            }
            _ => return Err(invalid(format!("unknown polynomial basis '{s}'"))),
        };
        basis.validate()?;
        Ok(basis)
    }
}

/// `[p_0(A) v, ..., p_s(A) v]` in binary64.
pub fn power_basis(a: &dyn LinearOperator, v: &Matrix, s: usize, basis: PolyBasis) -> Result<Matrix> {
    basis.validate()?;
    if v.cols() != 1 || v.rows() != a.dim() {
        return Err(Error::DimensionMismatch { op: "power_basis", left: (a.dim(), 1), right: v.shape() });
    }
    let mut out = v.clone().with_precision(Precision::Fine);
    for j in 0..s {
        let cur = out.columns(j..j + 1);
        let mut next = a.apply(&cur)?;
        let (c, d, e) = basis.recurrence(j);
        let prev = if j > 0 { Some(out.columns(j - 1..j)) } else { None };
        for (t, x) in next.data_mut().iter_mut().enumerate() {
            let mut y = *x - d * cur.data()[t];
            if let Some(p) = &prev {
                y -= e * p.data()[t];
            }
            *x = y / c;
        }
        out.append_columns(&next)?;
    }
    Ok(out)
}

/// s-step RBGS Arnoldi from a single vector `b`: blocks of `s` powers of the
/// last basis vector. `H` is recovered from the sketches by a least-squares
/// solve, and entries below the subdiagonal are set to zero.
pub fn sstep_arnoldi(
    a: &dyn LinearOperator,
    b: &Matrix,
    theta: &SketchOperator,
    p: usize,
    s: usize,
    basis: PolyBasis,
    cfg: &RbgsConfig,
) -> Result<ArnoldiDecomposition> {
    basis.validate()?;
    if p < 2 || s == 0 {
        return Err(invalid("s-step Arnoldi needs p >= 2 and s >= 1"));
    }
    if b.cols() != 1 || b.rows() != a.dim() {
        return Err(Error::DimensionMismatch { op: "sstep_arnoldi", left: (a.dim(), 1), right: b.shape() });
    }
    let m = 1 + (p - 1) * s;
    if m > theta.k() {
        return Err(invalid(format!("basis size {m} exceeds the sketch dimension {}", theta.k())));
    }
    let mut orth = Rbgs::new(theta, *cfg)?;
    orth.push_block(b).map_err(|e| Error::PowerBreakdown { power: 0, source: Box::new(e) })?;
    for i in 2..=p {
        let q = orth.q();
        let v = q.columns(q.cols() - 1..q.cols());
        let f = power_basis(a, &v, s, basis)?;
        orth.push_block(&f.columns(1..s + 1)).map_err(|e| Error::PowerBreakdown { power: 1 + (i - 2) * s, source: Box::new(e) })?;
    }

    let (sk, pk, r) = (orth.s().clone(), orth.p().clone(), orth.r());
    let inner = m - s;
    // generators g_t with A g_t known from the recurrence; g_t = Q C(:, t)
    let mut c = Matrix::zeros(inner, inner);
    let mut e = Matrix::zeros(theta.k(), inner);
    let sketch_of = |col: usize, j: usize| if j == 0 { sk.col(col).to_vec() } else { pk.col(col).to_vec() };
    for i in 2..=p {
        let t0 = (i - 2) * s;
        let last = if i < p { s } else { 1 };
        for j in 0..last {
            let t = t0 + j;
            if j == 0 {
                c[(t, t)] = 1.0;
            } else {
                for row in 0..=t {
                    c[(row, t)] = r[(row, t)];
                }
            }
            let (cc, dd, ee) = basis.recurrence(j);
            let next = pk.col(t + 1);
            let cur = sketch_of(t, j);
            let prev = if j > 0 { Some(sketch_of(t - 1, j - 1)) } else { None };
            for (row, out) in e.col_mut(t).iter_mut().enumerate() {
                let mut v = cc * next[row] + dd * cur[row];
                if let Some(pv) = &prev {
                    v += ee * pv[row];
                }
                *out = v;
            }
        }
    }
    let y = HouseholderQr::new(&sk)?.solve_least_squares(&e)?;
    let mut h = triangular_solve(&c, &y, Side::Right)?;
    for j in 0..inner {
        for i in j + 2..m {
            h[(i, j)] = 0.0;
        }
    }
    let mut widths = vec![1];
    widths.extend(std::iter::repeat(s).take(p - 1));
    Ok(ArnoldiDecomposition {
        q: orth.q().clone(),
        h,
        r_first: r.columns(0..1),
        s: Some(sk),
        p: Some(pk),
        cert: Some(orth.certificate()?),
        partition: BlockPartition::from_widths(&widths)?,
        breakdown: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::cond_estimate;
    use crate::krylov::arnoldi::rbgs_arnoldi;
    use crate::krylov::operator::{CsrMatrix, DenseOperator};
    use crate::precision::PrecisionMode;

    fn diag(n: usize) -> DenseOperator {
        DenseOperator::new(Matrix::diag(&(1..=n).map(|i| i as f64).collect::<Vec<_>>())).unwrap()
    }

    #[test]
    fn single_step_matches_block_arnoldi() {
        let n = 30;
        let a = diag(n);
        let b = Matrix::from_fn(n, 1, |i, _| 1.0 + (i as f64).sin());
        let th = SketchOperator::identity(n);
        let cfg = RbgsConfig::new(1, PrecisionMode::UniqueFine);
        let d1 = sstep_arnoldi(&a, &b, &th, 6, 1, PolyBasis::Monomial, &cfg).unwrap();
        let d2 = rbgs_arnoldi(&a, &b, &th, 6, &cfg).unwrap();
        assert_eq!(d1.h.shape(), d2.h.shape());
        let rel = d1.h.sub(&d2.h).unwrap().max_abs() / d2.h.max_abs();
        assert!(rel <= 1e-6, "{rel}");
    }

    #[test]
    fn three_step_sketched_identity() {
        let n = 20;
        let a = diag(n);
        let b = Matrix::from_fn(n, 1, |_, _| 1.0);
        let th = SketchOperator::identity(n);
        let cfg = RbgsConfig::new(3, PrecisionMode::UniqueFine);
        let d = sstep_arnoldi(&a, &b, &th, 3, 3, PolyBasis::Monomial, &cfg).unwrap();
        assert_eq!(d.h.shape(), (7, 4));
        assert!(d.sketched_arnoldi_residual(&a, &th).unwrap() <= 1e-6);
        assert!(d.is_block_hessenberg());
    }

    #[test]
    fn chebyshev_basis_is_better_conditioned() {
        let n = 200;
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0));
            if i > 0 {
                t.push((i, i - 1, -1.0));
                t.push((i - 1, i, -1.0));
            }
        }
        let a = CsrMatrix::from_triplets(n, n, &t).unwrap();
        let v = Matrix::from_fn(n, 1, |i, _| ((i * 37 % 19) as f64 - 9.0) / 9.0);
        let mono = power_basis(&a, &v, 8, PolyBasis::Monomial).unwrap();
        let cheb = power_basis(&a, &v, 8, PolyBasis::Chebyshev { lo: 0.0, hi: 4.0 }).unwrap();
        assert!(cond_estimate(&cheb).unwrap() < cond_estimate(&mono).unwrap());
    }

    #[test]
    fn chebyshev_recurrence_is_exact_for_scalars() {
        // 1x1 operator [x]: p_j(x) = T_j((2x - (lo + hi)) / (hi - lo))
        let x = 0.3;
        let a = DenseOperator::new(Matrix::from_rows(&[&[x]])).unwrap();
        let f = power_basis(&a, &Matrix::from_rows(&[&[1.0]]), 5, PolyBasis::Chebyshev { lo: -1.0, hi: 1.0 }).unwrap();
        for j in 0..=5 {
            let expect = (j as f64 * x.acos()).cos();
            assert!((f[(0, j)] - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn basis_names_parse() {
        assert_eq!("monomial".parse::<PolyBasis>().unwrap(), PolyBasis::Monomial);
        let c: PolyBasis = "chebyshev:0:4".parse().unwrap();
        assert_eq!(c, PolyBasis::Chebyshev { lo: 0.0, hi: 4.0 });
        assert_eq!(c.to_string().parse::<PolyBasis>().unwrap(), c);
        assert!("chebyshev:4:0".parse::<PolyBasis>().is_err());
    }
}
