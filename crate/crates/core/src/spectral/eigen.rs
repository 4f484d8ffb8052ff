//! Dense eigensolvers.
//!
//! General complex matrices go through a Householder reduction to upper
//! Hessenberg form followed by single-shift complex QR sweeps (Wilkinson
//! shift, exceptional shifts on stagnation). Hermitian matrices are routed to
//! nalgebra's tridiagonal QR solver.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// QR iterations allowed per matrix dimension.
pub const ITERATIONS_PER_DIM: usize = 100;

fn abs1(z: Complex64) -> f64 {
    z.re.abs() + z.im.abs()
}

/// Reduces `a` in place to upper Hessenberg form by unitary similarity.
fn hessenberg(a: &mut DMatrix<Complex64>) {
    let n = a.nrows();
    if n < 3 {
        return;
    }
    let mut v = vec![ZERO; n];
    for k in 0..n - 2 {
        let alpha: f64 = (k + 1..n).map(|i| a[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if alpha == 0.0 {
            continue;
        }
        let x0 = a[(k + 1, k)];
        let phase = if x0.norm() == 0.0 { Complex64::new(1.0, 0.0) } else { x0 / x0.norm() };
        // v = x + phase·‖x‖·e₁ avoids cancellation
        for i in k + 1..n {
            v[i] = a[(i, k)];
        }
        v[k + 1] += phase * alpha;
        let vnorm2: f64 = (k + 1..n).map(|i| v[i].norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        // A ← (I − 2vvᴴ/vᴴv) A
        for j in k..n {
            let s: Complex64 = (k + 1..n).map(|i| v[i].conj() * a[(i, j)]).sum();
            let s = s * (2.0 / vnorm2);
            for i in k + 1..n {
                a[(i, j)] -= v[i] * s;
            }
        }
        // A ← A (I − 2vvᴴ/vᴴv)
        for i in 0..n {
            let s: Complex64 = (k + 1..n).map(|j| a[(i, j)] * v[j]).sum();
            let s = s * (2.0 / vnorm2);
            for j in k + 1..n {
                a[(i, j)] -= s * v[j].conj();
            }
        }
        for i in k + 2..n {
            a[(i, k)] = ZERO;
        }
    }
}

/// Givens rotation `G = [[c, s], [−conj(s), c]]` with `G·[x; y] = [r; 0]`.
fn givens(x: Complex64, y: Complex64) -> (f64, Complex64) {
    let ax = x.norm();
    let ay = y.norm();
    if ay == 0.0 {
        return (1.0, ZERO);
    }
    if ax == 0.0 {
        return (0.0, Complex64::new(1.0, 0.0));
    }
    let r = ax.hypot(ay);
    (ax / r, (x / ax) * y.conj() / r)
}

/// Eigenvalue of `[[a, b], [c, d]]` closest to `d`.
fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let m = (a + d) * 0.5;
    let (l1, l2) = (m + disc, m - disc);
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// All eigenvalues of a general complex matrix, in no particular order.
pub fn general_eigenvalues(a: &DMatrix<Complex64>) -> Result<Vec<Complex64>> {
    let n = a.nrows();
    if n == 0 || a.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, got: a.ncols() });
    }
    if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::InvalidParameter("matrix has non-finite entries".into()));
    }
    let scale = a.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Ok(vec![ZERO; n]);
    }
    let mut h = a.map(|z| z / scale);
    hessenberg(&mut h);

    let cap = ITERATIONS_PER_DIM * n;
    let mut total = 0usize;
    let mut since_deflation = 0usize;
    let mut eig = vec![ZERO; n];
    let mut hi = n - 1;
    let eps = f64::EPSILON;
    let hnorm = h.iter().map(|&z| abs1(z)).fold(0.0, f64::max);

    loop {
        if hi == 0 {
            eig[0] = h[(0, 0)];
            break;
        }
        // locate the active unreduced block [lo, hi]
        let mut lo = hi;
        while lo > 0 {
            let mut s = abs1(h[(lo - 1, lo - 1)]) + abs1(h[(lo, lo)]);
            if s == 0.0 {
                s = hnorm;
            }
            if abs1(h[(lo, lo - 1)]) <= eps * s {
                h[(lo, lo - 1)] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            eig[hi] = h[(hi, hi)];
            hi -= 1;
            since_deflation = 0;
            continue;
        }
        if total >= cap {
            return Err(Error::NoConvergence { iterations: total });
        }
        total += 1;
        since_deflation += 1;

        let shift = if since_deflation % 11 == 10 {
            // exceptional shift breaks cycles such as permutation-like blocks
            let s = h[(hi, hi - 1)].re.abs()
                + if hi >= lo + 2 { h[(hi - 1, hi - 2)].re.abs() } else { 0.0 };
            h[(hi, hi)] + Complex64::new(0.75 * s, 0.4375 * s)
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };

        // implicit single-shift QR sweep on rows/cols lo..=hi
        let mut x = h[(lo, lo)] - shift;
        let mut y = h[(lo + 1, lo)];
        for k in lo..hi {
            let (c, s) = givens(x, y);
            let col_start = if k > lo { k - 1 } else { lo };
            for j in col_start..=hi {
                let p = h[(k, j)];
                let q = h[(k + 1, j)];
                h[(k, j)] = p * c + s * q;
                h[(k + 1, j)] = q * c - s.conj() * p;
            }
            if k > lo {
                h[(k + 1, k - 1)] = ZERO;
            }
            let row_end = (k + 2).min(hi);
            for i in lo..=row_end {
                let p = h[(i, k)];
                let q = h[(i, k + 1)];
                h[(i, k)] = p * c + q * s.conj();
                h[(i, k + 1)] = q * c - p * s;
            }
            if k + 1 < hi {
                x = h[(k + 1, k)];
                y = h[(k + 2, k)];
            }
        }
    }
    Ok(eig.into_iter().map(|z| z * scale).collect())
}

/// Whether `a` equals its conjugate transpose up to `rel_tol · max|a|`.
pub fn is_hermitian(a: &DMatrix<Complex64>, rel_tol: f64) -> bool {
    let n = a.nrows();
    if a.ncols() != n {
        return false;
    }
    let scale = a.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let tol = rel_tol * scale;
    (0..n).all(|i| (i..n).all(|j| (a[(i, j)] - a[(j, i)].conj()).norm() <= tol))
}

/// Eigen-decomposition of a Hermitian matrix: ascending real eigenvalues and
/// unit eigenvectors (columns), each with its first non-negligible entry made
/// real-positive.
pub fn hermitian_eigen(a: &DMatrix<Complex64>) -> Result<(Vec<f64>, DMatrix<Complex64>)> {
    let n = a.nrows();
    if n == 0 || a.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, got: a.ncols() });
    }
    // symmetrize exactly so the solver sees a Hermitian input
    let sym = DMatrix::from_fn(n, n, |i, j| (a[(i, j)] + a[(j, i)].conj()) * 0.5);
    let cap = ITERATIONS_PER_DIM * n;
    let dec = SymmetricEigen::try_new(sym, f64::EPSILON, cap)
        .ok_or(Error::NoConvergence { iterations: cap })?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| dec.eigenvalues[i].total_cmp(&dec.eigenvalues[j]).then(i.cmp(&j)));
    let values = order.iter().map(|&i| dec.eigenvalues[i]).collect();
    let mut vectors = DMatrix::from_element(n, n, ZERO);
    for (col, &i) in order.iter().enumerate() {
        let mut v: DVector<Complex64> = dec.eigenvectors.column(i).into_owned();
        normalize_phase(&mut v);
        vectors.set_column(col, &v);
    }
    Ok((values, vectors))
}

/// Ascending eigenvalues of a real symmetric matrix.
pub fn symmetric_eigenvalues(a: &DMatrix<f64>) -> Result<Vec<f64>> {
    let n = a.nrows();
    if n == 0 || a.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, got: a.ncols() });
    }
    let sym = DMatrix::from_fn(n, n, |i, j| 0.5 * (a[(i, j)] + a[(j, i)]));
    let cap = ITERATIONS_PER_DIM * n;
    let dec = SymmetricEigen::try_new(sym, f64::EPSILON, cap)
        .ok_or(Error::NoConvergence { iterations: cap })?;
    let mut values: Vec<f64> = dec.eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Ascending eigenpairs of a real symmetric matrix; eigenvectors are the
/// columns, with the first non-negligible entry made positive.
pub fn symmetric_eigen(a: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = a.nrows();
    let sym = DMatrix::from_fn(n, n, |i, j| 0.5 * (a[(i, j)] + a[(j, i)]));
    let cap = ITERATIONS_PER_DIM * n.max(1);
    let dec = SymmetricEigen::try_new(sym, f64::EPSILON, cap)
        .ok_or(Error::NoConvergence { iterations: cap })?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| dec.eigenvalues[i].total_cmp(&dec.eigenvalues[j]).then(i.cmp(&j)));
    let values = order.iter().map(|&i| dec.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        let mut v = dec.eigenvectors.column(i).into_owned();
        let tol = 1e-12 * v.amax();
        if let Some(first) = v.iter().find(|x| x.abs() > tol) {
            if *first < 0.0 {
                v.neg_mut();
            }
        }
        vectors.set_column(col, &v);
    }
    Ok((values, vectors))
}

fn normalize_phase(v: &mut DVector<Complex64>) {
    let tol = 1e-12 * v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if let Some(first) = v.iter().find(|z| z.norm() > tol).copied() {
        let phase = first.conj() / first.norm();
        for z in v.iter_mut() {
            *z *= phase;
        }
    }
}
