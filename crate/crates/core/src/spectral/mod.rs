//! Spectra, numerical ranges and the scalar functionals built on them.

pub mod eigen;

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::operators::{to_euclidean, Operator};

pub use eigen::{general_eigenvalues, hermitian_eigen, is_hermitian, symmetric_eigen, symmetric_eigenvalues};

/// Relative asymmetry below which a matrix is treated as Hermitian.
const HERMITIAN_REL_TOL: f64 = 1e-13;

/// Eigenvalues with multiplicity, sorted by real part then imaginary part.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub eigenvalues: Vec<Complex64>,
    /// Unit eigenvectors as columns; only produced by the Hermitian route.
    pub eigenvectors: Option<DMatrix<Complex64>>,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Real parts in the same (ascending) order.
    pub fn real_parts(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|z| z.re).collect()
    }
}

fn sort_key(a: &Complex64, b: &Complex64) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// All eigenvalues of `a`. Hermitian inputs are routed to the Hermitian
/// solver and come back real with eigenvectors.
pub fn eig(a: &DMatrix<Complex64>) -> Result<Spectrum> {
    if a.nrows() == 0 || a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch { expected: a.nrows(), got: a.ncols() });
    }
    if is_hermitian(a, HERMITIAN_REL_TOL) {
        let (values, vectors) = hermitian_eigen(a)?;
        return Ok(Spectrum {
            eigenvalues: values.into_iter().map(|v| Complex64::new(v, 0.0)).collect(),
            eigenvectors: Some(vectors),
        });
    }
    let mut eigenvalues = general_eigenvalues(a)?;
    eigenvalues.sort_by(sort_key);
    Ok(Spectrum { eigenvalues, eigenvectors: None })
}

pub fn eig_real(a: &DMatrix<f64>) -> Result<Spectrum> {
    eig(&a.map(Complex64::from))
}

/// Spectrum of an operator, computed on its metric-conjugated form so that
/// metric-self-adjoint operators use the Hermitian route.
pub fn operator_spectrum(op: &Operator) -> Result<Spectrum> {
    eig_real(&to_euclidean(op))
}

/// Boundary samples of the numerical range `W(T)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericalRangeBoundary {
    pub points: Vec<Complex64>,
    pub angles: Vec<f64>,
    /// Extremal vectors in the operator's coordinates, unit in its metric.
    pub vectors: Vec<DVector<Complex64>>,
    /// Smallest real part over the samples.
    pub nu: f64,
}

/// Rotation sweep: for each `θ = 2πk/n_angles`, a top eigenvector `v` of the
/// Hermitian part of `e^{iθ} Â` touches the supporting line of `W` and gives
/// the boundary point `v* Â v`, where `Â` is the metric-conjugated matrix.
pub fn numerical_range_boundary(op: &Operator, n_angles: usize) -> Result<NumericalRangeBoundary> {
    if n_angles < 4 {
        return Err(Error::InvalidParameter(format!("n_angles must be at least 4, got {n_angles}")));
    }
    let a = to_euclidean(op).map(Complex64::from);
    let at = a.adjoint();
    let n = a.nrows();
    let inv_sqrt_w: Vec<f64> = op.metric().iter().map(|w| 1.0 / w.sqrt()).collect();
    let samples: Vec<Result<(f64, Complex64, DVector<Complex64>)>> = (0..n_angles)
        .into_par_iter()
        .map(|k| {
            let theta = TAU * k as f64 / n_angles as f64;
            let rot = Complex64::from_polar(1.0, theta);
            let herm = (&a * rot + &at * rot.conj()) * Complex64::new(0.5, 0.0);
            let (_, vecs) = hermitian_eigen(&herm)?;
            let v = vecs.column(n - 1).into_owned();
            let point = (v.adjoint() * &a * &v)[(0, 0)];
            let f = DVector::from_iterator(n, v.iter().zip(&inv_sqrt_w).map(|(z, s)| z * *s));
            Ok((theta, point, f))
        })
        .collect();
    let mut points = Vec::with_capacity(n_angles);
    let mut angles = Vec::with_capacity(n_angles);
    let mut vectors = Vec::with_capacity(n_angles);
    for s in samples {
        let (theta, p, v) = s?;
        angles.push(theta);
        points.push(p);
        vectors.push(v);
    }
    let nu = points.iter().map(|p| p.re).fold(f64::INFINITY, f64::min);
    Ok(NumericalRangeBoundary { points, angles, vectors, nu })
}

/// Metric-symmetric part `(Â + Âᵀ)/2` of an operator.
pub fn real_part(op: &Operator) -> DMatrix<f64> {
    let a = to_euclidean(op);
    (&a + a.transpose()) * 0.5
}

/// `inf Re W(op)`: the smallest eigenvalue of the metric-symmetric part.
pub fn nu(op: &Operator) -> Result<f64> {
    Ok(symmetric_eigenvalues(&real_part(op))?[0])
}

/// `[inf Re W(op), sup Re W(op)]`.
pub fn real_extent(op: &Operator) -> Result<(f64, f64)> {
    let vals = symmetric_eigenvalues(&real_part(op))?;
    Ok((vals[0], vals[vals.len() - 1]))
}

/// Operator norm in the metric inner product: the largest singular value of
/// the metric-conjugated matrix.
pub fn operator_norm(op: &Operator) -> Result<f64> {
    let a = to_euclidean(op);
    let gram = a.transpose() * &a;
    let vals = symmetric_eigenvalues(&gram)?;
    Ok(vals[vals.len() - 1].max(0.0).sqrt())
}

/// Number of eigenvalues (with multiplicity) of modulus at most `tol`.
pub fn kernel_dimension(op: &Operator, tol: f64) -> Result<usize> {
    Ok(operator_spectrum(op)?.eigenvalues.iter().filter(|z| z.norm() <= tol).count())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{DirectedGraph, Edge, VertexSubset};
    use crate::operators::{assemble, dirichlet, OperatorKind};
    use approx::assert_abs_diff_eq;

    fn cycle(n: usize) -> DirectedGraph {
        DirectedGraph::new(vec![1.0; n], (0..n).map(|i| Edge::new(i, (i + 1) % n, 1.0)).collect())
            .unwrap()
    }

    #[test]
    fn identity_spectrum() {
        let s = eig_real(&DMatrix::identity(3, 3)).unwrap();
        assert_eq!(s.eigenvalues, vec![Complex64::new(1.0, 0.0); 3]);
        assert!(s.eigenvectors.is_some());
    }

    #[test]
    fn half_h_of_three_cycle() {
        let h = assemble(&cycle(3), OperatorKind::H).unwrap();
        let s = eig_real(&(h.matrix() * 0.5)).unwrap();
        let want = [0.0, 1.5, 1.5];
        for (z, w) in s.eigenvalues.iter().zip(want) {
            assert_abs_diff_eq!(z.re, w, epsilon = 1e-12);
            assert_eq!(z.im, 0.0);
        }
    }

    #[test]
    fn nu_examples() {
        let g = cycle(3);
        let d = assemble(&g, OperatorKind::Delta).unwrap();
        assert_abs_diff_eq!(nu(&d).unwrap(), 0.0, epsilon = 1e-14);
        let nd = assemble(&g, OperatorKind::NormalizedDelta).unwrap();
        let dd = dirichlet(&nd, &VertexSubset::new(3, [0, 1]).unwrap()).unwrap();
        assert_abs_diff_eq!(nu(&dd).unwrap(), 0.5, epsilon = 1e-14);
        let id = Operator::from_matrix(DMatrix::identity(4, 4), OperatorKind::Delta).unwrap();
        assert_abs_diff_eq!(nu(&id).unwrap(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn norm_examples() {
        let nd = assemble(&cycle(3), OperatorKind::NormalizedDelta).unwrap();
        assert_abs_diff_eq!(operator_norm(&nd).unwrap(), 3f64.sqrt(), epsilon = 1e-12);
        let id = Operator::from_matrix(DMatrix::identity(2, 2), OperatorKind::Delta).unwrap();
        assert_abs_diff_eq!(operator_norm(&id).unwrap(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn kernel_examples() {
        let nd = assemble(&cycle(4), OperatorKind::NormalizedDelta).unwrap();
        assert_eq!(kernel_dimension(&nd, 1e-8).unwrap(), 1);
        let two = DirectedGraph::new(
            vec![1.0; 6],
            vec![
                Edge::new(0, 1, 1.0),
                Edge::new(1, 2, 1.0),
                Edge::new(2, 0, 1.0),
                Edge::new(3, 4, 1.0),
                Edge::new(4, 5, 1.0),
                Edge::new(5, 3, 1.0),
            ],
        )
        .unwrap();
        let nd = assemble(&two, OperatorKind::NormalizedDelta).unwrap();
        assert_eq!(kernel_dimension(&nd, 1e-8).unwrap(), 2);
        let id = Operator::from_matrix(DMatrix::identity(3, 3), OperatorKind::Delta).unwrap();
        assert_eq!(kernel_dimension(&id, 1e-8).unwrap(), 0);
    }

    #[test]
    fn scalar_numerical_range() {
        let op = Operator::from_matrix(DMatrix::from_element(1, 1, -2.5), OperatorKind::Delta).unwrap();
        let w = numerical_range_boundary(&op, 8).unwrap();
        assert!(w.points.iter().all(|p| (p - Complex64::new(-2.5, 0.0)).norm() < 1e-15));
        assert_eq!(w.nu, -2.5);
        assert!(numerical_range_boundary(&op, 3).is_err());
    }

    #[test]
    fn sweep_angles_and_vectors() {
        let nd = assemble(&cycle(3), OperatorKind::NormalizedDelta).unwrap();
        let w = numerical_range_boundary(&nd, 8).unwrap();
        assert_eq!(w.angles.len(), 8);
        assert_abs_diff_eq!(w.angles[2], TAU / 4.0, epsilon = 0.0);
        for (p, v) in w.points.iter().zip(&w.vectors) {
            let r = nd.rayleigh(v).unwrap();
            assert_abs_diff_eq!(r.re, p.re, epsilon = 1e-12);
            assert_abs_diff_eq!(r.im, p.im, epsilon = 1e-12);
        }
    }
}
