//! Small dense nonsymmetric eigensolver.
//!
//! Francis double-shift QR on an upper Hessenberg matrix, followed by
//! back-substitution on the quasi-triangular Schur form to get eigenvectors,
//! which are then mapped back through the accumulated orthogonal transforms.
//! General square matrices are first reduced to Hessenberg form with
//! Householder similarity transforms.
//!
//! Eigenvectors are returned as real columns. A complex conjugate pair
//! `(lambda, conj(lambda))` with `Im(lambda) > 0` occupies two adjacent
//! columns `[re, im]` such that `A (re + i im) = lambda (re + i im)`.

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::matrix::Matrix;

type Rows = Vec<Vec<f64>>;

fn to_rows(a: &Matrix) -> Rows {
    (0..a.rows())
        .map(|i| (0..a.cols()).map(|j| a[(i, j)]).collect())
        .collect()
}

fn from_rows(r: &Rows) -> Matrix {
    let n = r.len();
    Matrix::from_fn(n, n, |i, j| r[i][j])
}

fn identity_rows(n: usize) -> Rows {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect()
}

/// Smith's complex division `(xr + i xi) / (yr + i yi)`.
fn cdiv(xr: f64, xi: f64, yr: f64, yi: f64) -> (f64, f64) {
    if yr.abs() > yi.abs() {
        let r = yi / yr;
        let d = yr + r * yi;
        ((xr + r * xi) / d, (xi - r * xr) / d)
    } else {
        let r = yr / yi;
        let d = yi + r * yr;
        ((r * xr + xi) / d, (r * xi - xr) / d)
    }
}

/// Householder reduction to upper Hessenberg form; returns `(H, V)` with
/// `A = V H V^T`.
fn orthes(mut h: Rows) -> (Rows, Rows) {
    let n = h.len();
    let mut v = identity_rows(n);
    if n < 3 {
        return (h, v);
    }
    let (low, high) = (0, n - 1);
    let mut ort = vec![0.0; n];
    for m in low + 1..high {
        let scale: f64 = (m..=high).map(|i| h[i][m - 1].abs()).sum();
        if scale == 0.0 {
            continue;
        }
        let mut hh = 0.0;
        for i in (m..=high).rev() {
            ort[i] = h[i][m - 1] / scale;
            hh += ort[i] * ort[i];
        }
        let mut g = hh.sqrt();
        if ort[m] > 0.0 {
            g = -g;
        }
        hh -= ort[m] * g;
        ort[m] -= g;
        for j in m..n {
            let mut f = 0.0;
            for i in (m..=high).rev() {
                f += ort[i] * h[i][j];
            }
            f /= hh;
            for i in m..=high {
                h[i][j] -= f * ort[i];
            }
        }
        for row in h.iter_mut().take(high + 1) {
            let mut f = 0.0;
            for j in (m..=high).rev() {
                f += ort[j] * row[j];
            }
            f /= hh;
            for j in m..=high {
                row[j] -= f * ort[j];
            }
        }
        ort[m] *= scale;
        h[m][m - 1] = scale * g;
    }
    for m in (low + 1..high).rev() {
        if h[m][m - 1] == 0.0 {
            continue;
        }
        for i in m + 1..=high {
            ort[i] = h[i][m - 1];
        }
        for j in m..=high {
            let mut g = 0.0;
            for i in m..=high {
                g += ort[i] * v[i][j];
            }
            g = (g / ort[m]) / h[m][m - 1];
            for i in m..=high {
                v[i][j] += g * ort[i];
            }
        }
    }
    // the reflector data below the subdiagonal is no longer needed
    for (i, row) in h.iter_mut().enumerate() {
        for x in row.iter_mut().take(i.saturating_sub(1)) {
            *x = 0.0;
        }
    }
    (h, v)
}

/// Real Schur iteration plus eigenvector back-substitution.
///
/// On input `h` is upper Hessenberg and `v` the accumulated similarity; on
/// return `v` holds the eigenvectors in the paired real format and the
/// eigenvalues are `d + i e`.
#[allow(unused_assignments)]
fn hqr2(h: &mut Rows, v: &mut Rows) -> Result<(Vec<f64>, Vec<f64>)> {
    let nn = h.len();
    let mut d = vec![0.0; nn];
    let mut e = vec![0.0; nn];
    if nn == 0 {
        return Ok((d, e));
    }
    let low = 0usize;
    let high = nn - 1;
    let eps = f64::EPSILON;
    let max_total = 30 * nn.max(1);
    let mut exshift = 0.0;
    let (mut p, mut q, mut r, mut s, mut z) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let (mut w, mut x, mut y): (f64, f64, f64);

    let mut norm = 0.0;
    for i in 0..nn {
        for j in i.saturating_sub(1)..nn {
            norm += h[i][j].abs();
        }
    }

    let mut n = nn as isize - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    while n >= low as isize {
        let nu = n as usize;
        let mut l = nu;
        while l > low {
            s = h[l - 1][l - 1].abs() + h[l][l].abs();
            if s == 0.0 {
                s = norm;
            }
            if h[l][l - 1].abs() < eps * s {
                break;
            }
            l -= 1;
        }

        if l == nu {
            h[nu][nu] += exshift;
            d[nu] = h[nu][nu];
            e[nu] = 0.0;
            n -= 1;
            iter = 0;
        } else if l + 1 == nu {
            w = h[nu][nu - 1] * h[nu - 1][nu];
            p = (h[nu - 1][nu - 1] - h[nu][nu]) / 2.0;
            q = p * p + w;
            z = q.abs().sqrt();
            h[nu][nu] += exshift;
            h[nu - 1][nu - 1] += exshift;
            x = h[nu][nu];
            if q >= 0.0 {
                z = if p >= 0.0 { p + z } else { p - z };
                d[nu - 1] = x + z;
                d[nu] = d[nu - 1];
                if z != 0.0 {
                    d[nu] = x - w / z;
                }
                e[nu - 1] = 0.0;
                e[nu] = 0.0;
                x = h[nu][nu - 1];
                s = x.abs() + z.abs();
                p = x / s;
                q = z / s;
                r = (p * p + q * q).sqrt();
                p /= r;
                q /= r;
                for j in nu - 1..nn {
                    z = h[nu - 1][j];
                    h[nu - 1][j] = q * z + p * h[nu][j];
                    h[nu][j] = q * h[nu][j] - p * z;
                }
                for row in h.iter_mut().take(nu + 1) {
                    z = row[nu - 1];
                    row[nu - 1] = q * z + p * row[nu];
                    row[nu] = q * row[nu] - p * z;
                }
                for row in v.iter_mut().take(high + 1).skip(low) {
                    z = row[nu - 1];
                    row[nu - 1] = q * z + p * row[nu];
                    row[nu] = q * row[nu] - p * z;
                }
            } else {
                d[nu - 1] = x + p;
                d[nu] = x + p;
                e[nu - 1] = z;
                e[nu] = -z;
            }
            n -= 2;
            iter = 0;
        } else {
            total += 1;
            if total > max_total {
                return Err(Error::NoConvergence { index: nu });
            }
            x = h[nu][nu];
            y = 0.0;
            w = 0.0;
            if l < nu {
                y = h[nu - 1][nu - 1];
                w = h[nu][nu - 1] * h[nu - 1][nu];
            }
            if iter == 10 {
                exshift += x;
                for i in low..=nu {
                    h[i][i] -= x;
                }
                s = h[nu][nu - 1].abs() + h[nu - 1][nu - 2].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            if iter == 30 {
                s = (y - x) / 2.0;
                s = s * s + w;
                if s > 0.0 {
                    s = s.sqrt();
                    if y < x {
                        s = -s;
                    }
                    s = x - w / ((y - x) / 2.0 + s);
                    for i in low..=nu {
                        h[i][i] -= s;
                    }
                    exshift += s;
                    x = 0.964;
                    y = x;
                    w = x;
                }
            }
            iter += 1;

            let mut m = nu - 2;
            loop {
                z = h[m][m];
                r = x - z;
                s = y - z;
                p = (r * s - w) / h[m + 1][m] + h[m][m + 1];
                q = h[m + 1][m + 1] - z - r - s;
                r = h[m + 2][m + 1];
                s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                if h[m][m - 1].abs() * (q.abs() + r.abs())
                    < eps * (p.abs() * (h[m - 1][m - 1].abs() + z.abs() + h[m + 1][m + 1].abs()))
                {
                    break;
                }
                m -= 1;
            }
            for i in m + 2..=nu {
                h[i][i - 2] = 0.0;
                if i > m + 2 {
                    h[i][i - 3] = 0.0;
                }
            }

            for k in m..nu {
                let notlast = k != nu - 1;
                if k != m {
                    p = h[k][k - 1];
                    q = h[k + 1][k - 1];
                    r = if notlast { h[k + 2][k - 1] } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x == 0.0 {
                        continue;
                    }
                    p /= x;
                    q /= x;
                    r /= x;
                }
                s = (p * p + q * q + r * r).sqrt();
                if p < 0.0 {
                    s = -s;
                }
                if s == 0.0 {
                    continue;
                }
                if k != m {
                    h[k][k - 1] = -s * x;
                } else if l != m {
                    h[k][k - 1] = -h[k][k - 1];
                }
                p += s;
                x = p / s;
                y = q / s;
                z = r / s;
                q /= p;
                r /= p;
                for j in k..nn {
                    p = h[k][j] + q * h[k + 1][j];
                    if notlast {
                        p += r * h[k + 2][j];
                        h[k + 2][j] -= p * z;
                    }
                    h[k][j] -= p * x;
                    h[k + 1][j] -= p * y;
                }
                for row in h.iter_mut().take(nu.min(k + 3) + 1) {
                    p = x * row[k] + y * row[k + 1];
                    if notlast {
                        p += z * row[k + 2];
                        row[k + 2] -= p * r;
                    }
                    row[k] -= p;
                    row[k + 1] -= p * q;
                }
                for row in v.iter_mut().take(high + 1).skip(low) {
                    p = x * row[k] + y * row[k + 1];
                    if notlast {
                        p += z * row[k + 2];
                        row[k + 2] -= p * r;
                    }
                    row[k] -= p;
                    row[k + 1] -= p * q;
                }
            }
        }
    }

    if norm == 0.0 {
        return Ok((d, e));
    }

    for n in (0..nn).rev() {
        p = d[n];
        q = e[n];
        if q == 0.0 {
            let mut l = n;
            h[n][n] = 1.0;
            for i in (0..n).rev() {
                w = h[i][i] - p;
                r = 0.0;
                for j in l..=n {
                    r += h[i][j] * h[j][n];
                }
                if e[i] < 0.0 {
                    z = w;
                    s = r;
                } else {
                    l = i;
                    if e[i] == 0.0 {
                        h[i][n] = if w != 0.0 { -r / w } else { -r / (eps * norm) };
                    } else {
                        x = h[i][i + 1];
                        y = h[i + 1][i];
                        q = (d[i] - p) * (d[i] - p) + e[i] * e[i];
                        let t = (x * s - z * r) / q;
                        h[i][n] = t;
                        h[i + 1][n] = if x.abs() > z.abs() {
                            (-r - w * t) / x
                        } else {
                            (-s - y * t) / z
                        };
                    }
                    let t = h[i][n].abs();
                    if (eps * t) * t > 1.0 {
                        for row in h.iter_mut().take(n + 1).skip(i) {
                            row[n] /= t;
                        }
                    }
                }
            }
        } else if q < 0.0 {
            let mut l = n - 1;
            if h[n][n - 1].abs() > h[n - 1][n].abs() {
                h[n - 1][n - 1] = q / h[n][n - 1];
                h[n - 1][n] = -(h[n][n] - p) / h[n][n - 1];
            } else {
                let (cr, ci) = cdiv(0.0, -h[n - 1][n], h[n - 1][n - 1] - p, q);
                h[n - 1][n - 1] = cr;
                h[n - 1][n] = ci;
            }
            h[n][n - 1] = 0.0;
            h[n][n] = 1.0;
            for i in (0..n.saturating_sub(1)).rev() {
                let mut ra = 0.0;
                let mut sa = 0.0;
                for j in l..=n {
                    ra += h[i][j] * h[j][n - 1];
                    sa += h[i][j] * h[j][n];
                }
                w = h[i][i] - p;
                if e[i] < 0.0 {
                    z = w;
                    r = ra;
                    s = sa;
                } else {
                    l = i;
                    if e[i] == 0.0 {
                        let (cr, ci) = cdiv(-ra, -sa, w, q);
                        h[i][n - 1] = cr;
                        h[i][n] = ci;
                    } else {
                        x = h[i][i + 1];
                        y = h[i + 1][i];
                        let mut vr = (d[i] - p) * (d[i] - p) + e[i] * e[i] - q * q;
                        let vi = (d[i] - p) * 2.0 * q;
                        if vr == 0.0 && vi == 0.0 {
                            vr = eps * norm * (w.abs() + q.abs() + x.abs() + y.abs() + z.abs());
                        }
                        let (cr, ci) =
                            cdiv(x * r - z * ra + q * sa, x * s - z * sa - q * ra, vr, vi);
                        h[i][n - 1] = cr;
                        h[i][n] = ci;
                        if x.abs() > z.abs() + q.abs() {
                            h[i + 1][n - 1] = (-ra - w * h[i][n - 1] + q * h[i][n]) / x;
                            h[i + 1][n] = (-sa - w * h[i][n] - q * h[i][n - 1]) / x;
                        } else {
                            let (cr, ci) = cdiv(-r - y * h[i][n - 1], -s - y * h[i][n], z, q);
                            h[i + 1][n - 1] = cr;
                            h[i + 1][n] = ci;
                        }
                    }
                    let t = h[i][n - 1].abs().max(h[i][n].abs());
                    if (eps * t) * t > 1.0 {
                        for row in h.iter_mut().take(n + 1).skip(i) {
                            row[n - 1] /= t;
                            row[n] /= t;
                        }
                    }
                }
            }
        }
    }

    for j in (low..nn).rev() {
        for row in v.iter_mut().take(high + 1).skip(low) {
            let mut acc = 0.0;
            for k in low..=j.min(high) {
                acc += row[k] * h[k][j];
            }
            row[j] = acc;
        }
    }
    Ok((d, e))
}

/// Normalizes, fixes the pair sign convention and sorts by descending
/// magnitude, keeping conjugate pairs adjacent with the positive imaginary
/// part first.
fn finish(
    a: &Matrix,
    d: Vec<f64>,
    e: Vec<f64>,
    v: Rows,
) -> (Vec<Complex64>, Matrix) {
    let n = d.len();
    let mut vecs = from_rows(&v);
    // units: (start, width)
    let mut units = Vec::new();
    let mut j = 0;
    while j < n {
        if e[j] != 0.0 && j + 1 < n {
            units.push((j, 2));
            j += 2;
        } else {
            units.push((j, 1));
            j += 1;
        }
    }
    for &(j, w) in &units {
        if w == 1 {
            let nrm = crate::matrix::norm2(vecs.col(j));
            if nrm > 0.0 {
                vecs.col_mut(j).iter_mut().for_each(|x| *x /= nrm);
            }
            continue;
        }
        // For lambda = d + i|e|, choose the sign of the imaginary column so
        // that A (re + i im) = lambda (re + i im).
        let lam = Complex64::new(d[j], e[j].abs());
        let re = vecs.col(j).to_vec();
        let im = vecs.col(j + 1).to_vec();
        let ar = matvec(a, &re);
        let ai = matvec(a, &im);
        let mut plus = 0.0;
        let mut minus = 0.0;
        for t in 0..n {
            // residual real and imaginary parts for both sign choices
            let rr = ar[t] - (lam.re * re[t] - lam.im * im[t]);
            let ri = ai[t] - (lam.re * im[t] + lam.im * re[t]);
            plus += rr * rr + ri * ri;
            let rr = ar[t] - (lam.re * re[t] + lam.im * im[t]);
            let ri = -ai[t] - (-lam.re * im[t] + lam.im * re[t]);
            minus += rr * rr + ri * ri;
        }
        let sign = if minus < plus { -1.0 } else { 1.0 };
        let nrm = (crate::matrix::dot(&re, &re) + crate::matrix::dot(&im, &im)).sqrt();
        let nrm = if nrm > 0.0 { nrm } else { 1.0 };
        for t in 0..n {
            vecs[(t, j)] = re[t] / nrm;
            vecs[(t, j + 1)] = sign * im[t] / nrm;
        }
    }
    let magnitude = |u: &(usize, usize)| Complex64::new(d[u.0], e[u.0]).norm();
    units.sort_by(|a, b| magnitude(b).total_cmp(&magnitude(a)));
    let mut values = Vec::with_capacity(n);
    let mut out = Matrix::zeros(n, n);
    let mut c = 0;
    for &(j, w) in &units {
        if w == 1 {
            values.push(Complex64::new(d[j], 0.0));
        } else {
            let im = e[j].abs();
            values.push(Complex64::new(d[j], im));
            values.push(Complex64::new(d[j + 1], -im));
        }
        for t in 0..w {
            out.col_mut(c + t).copy_from_slice(vecs.col(j + t));
        }
        c += w;
    }
    (values, out)
}

fn matvec(a: &Matrix, x: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; a.rows()];
    for (j, &xj) in x.iter().enumerate() {
        for (yi, &aij) in y.iter_mut().zip(a.col(j)) {
            *yi += aij * xj;
        }
    }
    y
}

/// Eigen-decomposition of an upper Hessenberg matrix.
///
/// Entries below the first subdiagonal must be zero. Values are sorted by
/// descending magnitude.
pub fn hessenberg_eig(h: &Matrix) -> Result<(Vec<Complex64>, Matrix)> {
    if !h.is_square() {
        return Err(invalid(format!("hessenberg_eig needs a square matrix, got {:?}", h.shape())));
    }
    let n = h.rows();
    for j in 0..n {
        for i in j + 2..n {
            if h[(i, j)] != 0.0 {
                return Err(invalid(format!(
                    "hessenberg_eig: entry ({i}, {j}) below the subdiagonal is nonzero"
                )));
            }
        }
    }
    let mut rows = to_rows(h);
    let mut v = identity_rows(n);
    let (d, e) = hqr2(&mut rows, &mut v)?;
    Ok(finish(h, d, e, v))
}

/// Eigen-decomposition of a general square matrix (Hessenberg reduction
/// followed by [`hessenberg_eig`]'s iteration).
pub fn eig(a: &Matrix) -> Result<(Vec<Complex64>, Matrix)> {
    if !a.is_square() {
        return Err(invalid(format!("eig needs a square matrix, got {:?}", a.shape())));
    }
    let (mut h, mut v) = orthes(to_rows(a));
    let (d, e) = hqr2(&mut h, &mut v)?;
    Ok(finish(a, d, e, v))
}

/// Upper Hessenberg form `H` and orthogonal `V` with `A = V H V^T`.
pub fn hessenberg_reduce(a: &Matrix) -> Result<(Matrix, Matrix)> {
    if !a.is_square() {
        return Err(invalid(format!("hessenberg_reduce needs a square matrix, got {:?}", a.shape())));
    }
    let (h, v) = orthes(to_rows(a));
    Ok((from_rows(&h), from_rows(&v)))
}

/// Residual `||A v - lambda v||` of the eigenpair stored at column `j`
/// (complex pairs use both columns).
pub fn eigpair_residual(a: &Matrix, values: &[Complex64], vectors: &Matrix, j: usize) -> f64 {
    let lam = values[j];
    if lam.im == 0.0 {
        let x = vectors.col(j);
        let ax = matvec(a, x);
        let r: Vec<f64> = ax.iter().zip(x).map(|(y, x)| y - lam.re * x).collect();
        return crate::matrix::norm2(&r);
    }
    let (c_re, sgn) = if lam.im > 0.0 { (j, 1.0) } else { (j - 1, -1.0) };
    let re = vectors.col(c_re);
    let im: Vec<f64> = vectors.col(c_re + 1).iter().map(|x| sgn * x).collect();
    let ar = matvec(a, re);
    let ai = matvec(a, &im);
    let mut acc = 0.0;
    for t in 0..re.len() {
        let rr = ar[t] - (lam.re * re[t] - lam.im * im[t]);
        let ri = ai[t] - (lam.re * im[t] + lam.im * re[t]);
        acc += rr * rr + ri * ri;
    }
    acc.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lcg(seed: u64) -> impl FnMut() -> f64 {
        let mut s = seed;
        move || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        }
    }

    fn random_hessenberg(n: usize, seed: u64) -> Matrix {
        let mut r = lcg(seed);
        Matrix::from_fn(n, n, |i, j| if i <= j + 1 { r() } else { 0.0 })
    }

    fn check_pairs(a: &Matrix, vals: &[Complex64], vecs: &Matrix) {
        let n = a.rows();
        let tol = 100.0 * crate::U_FINE * n as f64 * a.frobenius_norm();
        for j in 0..n {
            let res = eigpair_residual(a, vals, vecs, j);
            assert!(res <= tol, "pair {j}: residual {res} > {tol}");
        }
    }

    #[test]
    fn triangular_values() {
        let h = Matrix::from_rows(&[&[2.0, 1.0], &[0.0, 3.0]]);
        let (vals, vecs) = hessenberg_eig(&h).unwrap();
        assert_eq!(vals, vec![Complex64::new(3.0, 0.0), Complex64::new(2.0, 0.0)]);
        check_pairs(&h, &vals, &vecs);
    }

    #[test]
    fn diagonal_values() {
        let h = Matrix::diag(&[1.0, 5.0]);
        let (vals, _) = hessenberg_eig(&h).unwrap();
        assert_eq!(vals[0].re, 5.0);
        assert_eq!(vals[1].re, 1.0);
    }

    #[test]
    fn rotation_gives_conjugate_pair() {
        let h = Matrix::from_rows(&[&[0.0, -1.0], &[1.0, 0.0]]);
        let (vals, vecs) = hessenberg_eig(&h).unwrap();
        assert!((vals[0] - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        assert!((vals[1] - Complex64::new(0.0, -1.0)).norm() < 1e-15);
        check_pairs(&h, &vals, &vecs);
    }

    #[test]
    fn random_hessenberg_residuals_and_trace() {
        for seed in 0..20 {
            let h = random_hessenberg(12, seed);
            let (vals, vecs) = hessenberg_eig(&h).unwrap();
            check_pairs(&h, &vals, &vecs);
            let trace: f64 = (0..12).map(|i| h[(i, i)]).sum();
            let sum: Complex64 = vals.iter().sum();
            let tol = 100.0 * crate::U_FINE * 12.0 * h.frobenius_norm();
            assert!((sum.re - trace).abs() <= tol);
            assert!(sum.im.abs() <= tol);
            for w in vals.windows(2) {
                assert!(w[0].norm() >= w[1].norm() - 1e-12);
            }
        }
    }

    #[test]
    fn general_matrix_via_reduction() {
        let mut r = lcg(99);
        let a = Matrix::from_fn(9, 9, |_, _| r());
        let (h, v) = hessenberg_reduce(&a).unwrap();
        for j in 0..9 {
            for i in j + 2..9 {
                assert_eq!(h[(i, j)], 0.0);
            }
        }
        let back = crate::kernels::gemm::mul(&crate::kernels::gemm::mul(&v, &h), &v.transpose());
        assert!(back.sub(&a).unwrap().max_abs() < 1e-13);
        let (vals, vecs) = eig(&a).unwrap();
        check_pairs(&a, &vals, &vecs);
    }

    #[test]
    fn rejects_non_hessenberg() {
        let a = Matrix::from_rows(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[1.0, 0.0, 1.0]]);
        assert!(hessenberg_eig(&a).is_err());
    }

    #[test]
    fn empty_and_scalar() {
        let (v, _) = hessenberg_eig(&Matrix::zeros(0, 0)).unwrap();
        assert!(v.is_empty());
        let (v, x) = hessenberg_eig(&Matrix::from_rows(&[&[-4.0]])).unwrap();
        assert_eq!(v[0].re, -4.0);
        assert_eq!(x[(0, 0)], 1.0);
    }
}
