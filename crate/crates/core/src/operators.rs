//! Dense Laplacian-type operators in their weighted inner products.
//!
//! Every operator carries the metric `w` that defines its inner product
//! `(f, g)_w = Σ_x w(x) f(x) conj(g(x))`: the vertex measure `m` for the
//! combinatorial family and `β⁺` for the normalized one.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, VertexId, VertexSubset};

/// Complex function on the index set of an operator.
pub type FunctionVector = DVector<Complex64>;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum OperatorKind {
    /// `Δf(x) = (1/m(x)) Σ_y b(x,y)(f(x) − f(y))`.
    Delta,
    /// Formal adjoint of `Δ` in `ℓ²(V, m)`.
    DeltaPrime,
    /// `Δ + Δ′`.
    H,
    NormalizedDelta,
    NormalizedDeltaPrime,
    NormalizedH,
    Dirichlet(Box<OperatorKind>),
}

impl OperatorKind {
    /// Kinds that can be assembled directly from a graph.
    pub const ASSEMBLED: [OperatorKind; 6] = [
        OperatorKind::Delta,
        OperatorKind::DeltaPrime,
        OperatorKind::H,
        OperatorKind::NormalizedDelta,
        OperatorKind::NormalizedDeltaPrime,
        OperatorKind::NormalizedH,
    ];

    pub fn is_normalized(&self) -> bool {
        match self {
            OperatorKind::NormalizedDelta
            | OperatorKind::NormalizedDeltaPrime
            | OperatorKind::NormalizedH => true,
            OperatorKind::Dirichlet(inner) => inner.is_normalized(),
            _ => false,
        }
    }

    /// The kind with any Dirichlet wrappers removed.
    pub fn base(&self) -> &OperatorKind {
        match self {
            OperatorKind::Dirichlet(inner) => inner.base(),
            k => k,
        }
    }
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OperatorKind::Delta => f.write_str("Delta"),
            OperatorKind::DeltaPrime => f.write_str("DeltaPrime"),
            OperatorKind::H => f.write_str("H"),
            OperatorKind::NormalizedDelta => f.write_str("NormalizedDelta"),
            OperatorKind::NormalizedDeltaPrime => f.write_str("NormalizedDeltaPrime"),
            OperatorKind::NormalizedH => f.write_str("NormalizedH"),
            OperatorKind::Dirichlet(inner) => write!(f, "Dirichlet({inner})"),
        }
    }
}

impl FromStr for OperatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(inner) = s.strip_prefix("Dirichlet(").and_then(|r| r.strip_suffix(')')) {
            return Ok(OperatorKind::Dirichlet(Box::new(inner.parse()?)));
        }
        Ok(match s {
            "Delta" => OperatorKind::Delta,
            "DeltaPrime" => OperatorKind::DeltaPrime,
            "H" => OperatorKind::H,
            "NormalizedDelta" => OperatorKind::NormalizedDelta,
            "NormalizedDeltaPrime" => OperatorKind::NormalizedDeltaPrime,
            "NormalizedH" => OperatorKind::NormalizedH,
            other => return Err(Error::Parse(format!("unknown operator kind {other:?}"))),
        })
    }
}

/// A dense operator on functions over `vertices`, a subset of a graph with
/// `universe` vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    matrix: DMatrix<f64>,
    metric: Vec<f64>,
    kind: OperatorKind,
    vertices: Vec<VertexId>,
    universe: usize,
}

impl Operator {
    pub fn new(
        matrix: DMatrix<f64>,
        metric: Vec<f64>,
        kind: OperatorKind,
        vertices: Vec<VertexId>,
        universe: usize,
    ) -> Result<Self> {
        let n = metric.len();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, got: matrix.nrows() });
        }
        if vertices.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: vertices.len() });
        }
        if n == 0 {
            return Err(Error::EmptySubset);
        }
        if let Some(&w) = metric.iter().find(|&&w| !(w > 0.0 && w.is_finite())) {
            return Err(Error::InvalidParameter(format!("metric weight {w} is not positive")));
        }
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("matrix has non-finite entries".into()));
        }
        if vertices.windows(2).any(|w| w[0] >= w[1]) || vertices.iter().any(|&v| v >= universe) {
            return Err(Error::InvalidParameter("vertex index set must be increasing and in range".into()));
        }
        Ok(Self { matrix, metric, kind, vertices, universe })
    }

    /// An operator with the Euclidean metric on `0..n`.
    pub fn from_matrix(matrix: DMatrix<f64>, kind: OperatorKind) -> Result<Self> {
        let n = matrix.nrows();
        Self::new(matrix, vec![1.0; n], kind, (0..n).collect(), n)
    }

    pub fn dim(&self) -> usize {
        self.metric.len()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn metric(&self) -> &[f64] {
        &self.metric
    }

    pub fn kind(&self) -> &OperatorKind {
        &self.kind
    }

    /// Graph vertices indexing the rows, in increasing order.
    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn apply(&self, f: &FunctionVector) -> Result<FunctionVector> {
        self.check_len(f)?;
        Ok(self.matrix.map(Complex64::from) * f)
    }

    /// `(f, g)_w`.
    pub fn inner(&self, f: &FunctionVector, g: &FunctionVector) -> Result<Complex64> {
        self.check_len(f)?;
        self.check_len(g)?;
        Ok(weighted_inner(&self.metric, f, g))
    }

    /// `(Af, f)_w / (f, f)_w`.
    pub fn rayleigh(&self, f: &FunctionVector) -> Result<Complex64> {
        let af = self.apply(f)?;
        let norm = weighted_inner(&self.metric, f, f).re;
        if norm <= 0.0 {
            return Err(Error::InvalidParameter("zero vector".into()));
        }
        Ok(weighted_inner(&self.metric, &af, f) / norm)
    }

    fn check_len(&self, f: &FunctionVector) -> Result<()> {
        if f.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: f.len() });
        }
        Ok(())
    }
}

pub(crate) fn weighted_inner(w: &[f64], f: &FunctionVector, g: &FunctionVector) -> Complex64 {
    w.iter().zip(f.iter().zip(g.iter())).map(|(&w, (a, b))| a * b.conj() * w).sum()
}

/// Assembles `kind` on the full vertex set of `g`.
///
/// `DeltaPrime` always uses the general adjoint formula, so without the
/// Kirchhoff condition its row sums equal the Schrödinger potential `q`.
pub fn assemble(g: &DirectedGraph, kind: OperatorKind) -> Result<Operator> {
    let n = g.n();
    let weights = match kind {
        OperatorKind::Delta | OperatorKind::DeltaPrime | OperatorKind::H => g.measure(),
        OperatorKind::NormalizedDelta
        | OperatorKind::NormalizedDeltaPrime
        | OperatorKind::NormalizedH => g.beta_plus(),
        OperatorKind::Dirichlet(_) => {
            return Err(Error::InvalidParameter(
                "Dirichlet operators are built with `dirichlet`".into(),
            ))
        }
    };
    let beta = g.beta_plus();
    let (forward, adjoint) = match kind.base() {
        OperatorKind::Delta | OperatorKind::NormalizedDelta => (true, false),
        OperatorKind::DeltaPrime | OperatorKind::NormalizedDeltaPrime => (false, true),
        _ => (true, true),
    };
    let mut a = DMatrix::<f64>::zeros(n, n);
    for x in 0..n {
        let copies = forward as u8 + adjoint as u8;
        a[(x, x)] = copies as f64 * beta[x] / weights[x];
    }
    for e in g.edges() {
        if forward {
            a[(e.from, e.to)] -= e.weight / weights[e.from];
        }
        if adjoint {
            a[(e.to, e.from)] -= e.weight / weights[e.to];
        }
    }
    Operator::new(a, weights.to_vec(), kind, (0..n).collect(), n)
}

/// Dirichlet restriction: extend by zero outside `omega`, apply, restrict.
/// For a dense operator this is the principal submatrix on `omega`.
pub fn dirichlet(op: &Operator, omega: &VertexSubset) -> Result<Operator> {
    if omega.universe() != op.universe() {
        return Err(Error::DimensionMismatch { expected: op.universe(), got: omega.universe() });
    }
    if omega.is_empty() {
        return Err(Error::EmptySubset);
    }
    let rows: Vec<usize> = op
        .vertices()
        .iter()
        .enumerate()
        .filter(|(_, &v)| omega.contains(v))
        .map(|(i, _)| i)
        .collect();
    if rows.len() != omega.len() {
        return Err(Error::InvalidParameter(
            "subset is not contained in the operator's index set".into(),
        ));
    }
    let k = rows.len();
    let matrix = DMatrix::from_fn(k, k, |i, j| op.matrix()[(rows[i], rows[j])]);
    let metric = rows.iter().map(|&i| op.metric()[i]).collect();
    let vertices = rows.iter().map(|&i| op.vertices()[i]).collect();
    let kind = match op.kind() {
        k @ OperatorKind::Dirichlet(_) => k.clone(),
        k => OperatorKind::Dirichlet(Box::new(k.clone())),
    };
    Operator::new(matrix, metric, kind, vertices, op.universe())
}

/// `W^{1/2} A W^{-1/2}` with `W = diag(metric)`. Similar to `A`, and its
/// Euclidean numerical range equals the weighted numerical range of `A`.
pub fn to_euclidean(op: &Operator) -> DMatrix<f64> {
    let s: Vec<f64> = op.metric().iter().map(|w| w.sqrt()).collect();
    DMatrix::from_fn(op.dim(), op.dim(), |i, j| s[i] * op.matrix()[(i, j)] / s[j])
}

/// `Q(f) = 2 Re (Af, f)_w`.
pub fn quadratic_form(op: &Operator, f: &FunctionVector) -> Result<f64> {
    let af = op.apply(f)?;
    Ok(2.0 * weighted_inner(op.metric(), &af, f).re)
}

/// Directed-edge energy `Σ_{(x,y)} b(x,y)(f(x) − f(y)) conj(h(x) − h(y))`.
pub fn edge_energy(g: &DirectedGraph, f: &FunctionVector, h: &FunctionVector) -> Complex64 {
    g.edges()
        .iter()
        .map(|e| (f[e.from] - f[e.to]) * (h[e.from] - h[e.to]).conj() * e.weight)
        .sum()
}

/// Absolute defect of Green's formula
/// `(Δf, h)_m + conj((Δh, f)_m) = Σ b(x,y)(f(x) − f(y)) conj(h(x) − h(y))`.
pub fn greens_residual(g: &DirectedGraph, f: &FunctionVector, h: &FunctionVector) -> Result<f64> {
    g.require_kirchhoff()?;
    let delta = assemble(g, OperatorKind::Delta)?;
    let lhs = delta.inner(&delta.apply(f)?, h)? + delta.inner(&delta.apply(h)?, f)?.conj();
    Ok((lhs - edge_energy(g, f, h)).norm())
}

/// Magnitude scale for Green's formula: an upper bound on the size of every
/// term on either side.
pub fn greens_scale(g: &DirectedGraph, f: &FunctionVector, h: &FunctionVector) -> f64 {
    let sum: f64 = g
        .edges()
        .iter()
        .map(|e| e.weight * (f[e.from].norm() + f[e.to].norm()) * (h[e.from].norm() + h[e.to].norm()))
        .sum();
    1.0 + 2.0 * sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;
    use approx::assert_abs_diff_eq;

    fn unit(n: usize, edges: &[(usize, usize, f64)]) -> DirectedGraph {
        DirectedGraph::new(
            vec![1.0; n],
            edges.iter().map(|&(f, t, w)| Edge::new(f, t, w)).collect(),
        )
        .unwrap()
    }

    fn cycle3() -> DirectedGraph {
        unit(3, &[(0, 1, 1.0), (1, 2, 1.0), (2, 0, 1.0)])
    }

    fn cyclic_permutation(n: usize) -> DMatrix<f64> {
        DMatrix::from_fn(n, n, |i, j| if j == (i + 1) % n { 1.0 } else { 0.0 })
    }

    fn real(v: &[f64]) -> FunctionVector {
        FunctionVector::from_iterator(v.len(), v.iter().map(|&x| Complex64::new(x, 0.0)))
    }

    #[test]
    fn cycle_delta_is_identity_minus_shift() {
        let g = cycle3();
        let p = cyclic_permutation(3);
        let id = DMatrix::<f64>::identity(3, 3);
        assert_eq!(assemble(&g, OperatorKind::Delta).unwrap().matrix(), &(&id - &p));
        assert_eq!(assemble(&g, OperatorKind::DeltaPrime).unwrap().matrix(), &(&id - p.transpose()));
        assert_eq!(
            assemble(&g, OperatorKind::NormalizedDelta).unwrap().matrix(),
            &(&id - &p)
        );
    }

    #[test]
    fn symmetric_graph_delta_equals_adjoint() {
        let g = unit(3, &[(0, 1, 2.0), (1, 0, 2.0), (1, 2, 0.5), (2, 1, 0.5)]);
        let d = assemble(&g, OperatorKind::Delta).unwrap();
        let dp = assemble(&g, OperatorKind::DeltaPrime).unwrap();
        assert_eq!(d.matrix(), dp.matrix());
    }

    #[test]
    fn adjoint_row_sums_are_potential() {
        let g = DirectedGraph::new(
            vec![1.0, 2.0, 0.5],
            vec![Edge::new(0, 1, 2.0), Edge::new(1, 0, 1.0), Edge::new(1, 2, 1.0), Edge::new(2, 0, 3.0)],
        )
        .unwrap();
        let dp = assemble(&g, OperatorKind::DeltaPrime).unwrap();
        let q = g.schrodinger_potential();
        for x in 0..3 {
            assert_abs_diff_eq!(dp.matrix().row(x).sum(), q[x], epsilon = 1e-14);
        }
        let d = assemble(&g, OperatorKind::Delta).unwrap();
        for x in 0..3 {
            assert_abs_diff_eq!(d.matrix().row(x).sum(), 0.0, epsilon = 1e-14);
        }
        let h = assemble(&g, OperatorKind::H).unwrap();
        assert_eq!(h.matrix(), &(d.matrix() + dp.matrix()));
    }

    #[test]
    fn dirichlet_examples() {
        let g = cycle3();
        let nd = assemble(&g, OperatorKind::NormalizedDelta).unwrap();
        let two = dirichlet(&nd, &VertexSubset::new(3, [0, 1]).unwrap()).unwrap();
        assert_eq!(two.matrix(), &DMatrix::from_row_slice(2, 2, &[1.0, -1.0, 0.0, 1.0]));
        assert_eq!(two.kind(), &OperatorKind::Dirichlet(Box::new(OperatorKind::NormalizedDelta)));
        let one = dirichlet(&nd, &VertexSubset::new(3, [0]).unwrap()).unwrap();
        assert_eq!(one.matrix(), &DMatrix::from_element(1, 1, 1.0));
        let all = dirichlet(&nd, &VertexSubset::full(3)).unwrap();
        assert_eq!(all.matrix(), nd.matrix());
        assert_eq!(dirichlet(&nd, &VertexSubset::empty(3)).unwrap_err(), Error::EmptySubset);

        // nested restriction keeps vertex labels
        let inner = dirichlet(&two, &VertexSubset::new(3, [1]).unwrap()).unwrap();
        assert_eq!(inner.vertices(), &[1]);
        assert!(dirichlet(&two, &VertexSubset::new(3, [2]).unwrap()).is_err());
    }

    #[test]
    fn greens_examples() {
        let g = cycle3();
        let c = real(&[2.0, 2.0, 2.0]);
        assert_eq!(greens_residual(&g, &c, &c).unwrap(), 0.0);
        let f = real(&[1.0, 0.0, 0.0]);
        assert_eq!(edge_energy(&g, &f, &f), Complex64::new(2.0, 0.0));
        assert_eq!(greens_residual(&g, &f, &f).unwrap(), 0.0);

        let bad = unit(2, &[(0, 1, 2.0), (1, 0, 1.0)]);
        let f = real(&[1.0, 0.0]);
        assert!(matches!(greens_residual(&bad, &f, &f), Err(Error::KirchhoffViolated { .. })));
    }

    #[test]
    fn quadratic_form_examples() {
        let g = cycle3();
        let d = assemble(&g, OperatorKind::Delta).unwrap();
        assert_eq!(quadratic_form(&d, &real(&[3.0, 3.0, 3.0])).unwrap(), 0.0);
        assert_eq!(quadratic_form(&d, &real(&[1.0, 0.0, 0.0])).unwrap(), 2.0);
    }

    #[test]
    fn euclidean_conjugation() {
        let g = cycle3();
        let d = assemble(&g, OperatorKind::Delta).unwrap();
        assert_eq!(&to_euclidean(&d), d.matrix());

        let g = DirectedGraph::new(
            vec![1.0, 2.0, 4.0],
            vec![Edge::new(0, 1, 1.0), Edge::new(1, 2, 1.0), Edge::new(2, 0, 1.0), Edge::new(1, 0, 0.5), Edge::new(0, 2, 0.5), Edge::new(2, 1, 0.5)],
        )
        .unwrap();
        let h = assemble(&g, OperatorKind::H).unwrap();
        let e = to_euclidean(&h);
        assert!((&e - e.transpose()).amax() <= 1e-12);
    }

    #[test]
    fn kind_round_trip() {
        for k in OperatorKind::ASSEMBLED {
            let d = OperatorKind::Dirichlet(Box::new(k.clone()));
            assert_eq!(d.to_string().parse::<OperatorKind>().unwrap(), d);
            assert_eq!(k.to_string().parse::<OperatorKind>().unwrap(), k);
        }
        assert!("Bogus".parse::<OperatorKind>().is_err());
    }
}
