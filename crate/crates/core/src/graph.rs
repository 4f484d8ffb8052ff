//! Directed weighted graphs with a vertex measure.
//!
//! A graph is the triple `(V, E, b)` together with a positive measure `m` on
//! the vertices. Vertices are the dense range `0..n`, `b(x, y) > 0` exactly on
//! directed edges, there are no loops, and every vertex has both a positive
//! out-weight `β⁺(x) = Σ_y b(x, y)` and a positive in-weight
//! `β⁻(x) = Σ_y b(y, x)`.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Direction, Error, Result};

/// Dense vertex index in `0..n`.
pub type VertexId = usize;

/// Relative tolerance for the Kirchhoff condition, scaled by `max β⁺`.
pub const KIRCHHOFF_REL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub from: VertexId,
    pub to: VertexId,
    pub weight: f64,
}

impl Edge {
    pub fn new(from: VertexId, to: VertexId, weight: f64) -> Self {
        Self { from, to, weight }
    }
}

/// A validated directed weighted graph. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectedGraph {
    measure: Vec<f64>,
    /// Sorted by `(from, to)`.
    edges: Vec<Edge>,
    out_adj: Vec<Vec<(VertexId, f64)>>,
    in_adj: Vec<Vec<(VertexId, f64)>>,
    /// Undirected skeleton, sorted and deduplicated.
    skeleton: Vec<Vec<VertexId>>,
    beta_plus: Vec<f64>,
    beta_minus: Vec<f64>,
}

impl DirectedGraph {
    /// Validates and builds a graph from a vertex measure and an edge list.
    ///
    /// Parallel edges are rejected rather than merged so that `b` stays a
    /// function on ordered pairs.
    pub fn new(measure: Vec<f64>, mut edges: Vec<Edge>) -> Result<Self> {
        let n = measure.len();
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        for (vertex, &m) in measure.iter().enumerate() {
            if !(m > 0.0 && m.is_finite()) {
                return Err(Error::NonPositiveMeasure { vertex, measure: m });
            }
        }
        for e in &edges {
            for id in [e.from, e.to] {
                if id >= n {
                    return Err(Error::VertexOutOfRange { id, n });
                }
            }
            if e.from == e.to {
                return Err(Error::SelfLoop(e.from));
            }
            if !(e.weight > 0.0 && e.weight.is_finite()) {
                return Err(Error::NonPositiveWeight { from: e.from, to: e.to, weight: e.weight });
            }
        }
        edges.sort_by_key(|e| (e.from, e.to));
        if let Some(w) = edges.windows(2).find(|w| w[0].from == w[1].from && w[0].to == w[1].to) {
            return Err(Error::DuplicateEdge { from: w[0].from, to: w[0].to });
        }

        let mut out_adj = vec![Vec::new(); n];
        let mut in_adj = vec![Vec::new(); n];
        let mut skeleton = vec![Vec::new(); n];
        let mut beta_plus = vec![0.0; n];
        let mut beta_minus = vec![0.0; n];
        for e in &edges {
            out_adj[e.from].push((e.to, e.weight));
            in_adj[e.to].push((e.from, e.weight));
            skeleton[e.from].push(e.to);
            skeleton[e.to].push(e.from);
            beta_plus[e.from] += e.weight;
            beta_minus[e.to] += e.weight;
        }
        for nb in &mut skeleton {
            nb.sort_unstable();
            nb.dedup();
        }
        for vertex in 0..n {
            if beta_plus[vertex] <= 0.0 {
                return Err(Error::IsolatedDirection { vertex, direction: Direction::Out });
            }
            if beta_minus[vertex] <= 0.0 {
                return Err(Error::IsolatedDirection { vertex, direction: Direction::In });
            }
        }
        Ok(Self { measure, edges, out_adj, in_adj, skeleton, beta_plus, beta_minus })
    }

    pub fn n(&self) -> usize {
        self.measure.len()
    }

    pub fn measure(&self) -> &[f64] {
        &self.measure
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn out_neighbors(&self, x: VertexId) -> &[(VertexId, f64)] {
        &self.out_adj[x]
    }

    pub fn in_neighbors(&self, x: VertexId) -> &[(VertexId, f64)] {
        &self.in_adj[x]
    }

    /// Neighbours of `x` in the undirected skeleton `E`.
    pub fn skeleton_neighbors(&self, x: VertexId) -> &[VertexId] {
        &self.skeleton[x]
    }

    /// `b(x, y)`, zero when `(x, y)` is not an edge.
    pub fn weight(&self, x: VertexId, y: VertexId) -> f64 {
        let row = &self.out_adj[x];
        row.binary_search_by_key(&y, |&(t, _)| t).map(|i| row[i].1).unwrap_or(0.0)
    }

    pub fn beta_plus(&self) -> &[f64] {
        &self.beta_plus
    }

    pub fn beta_minus(&self) -> &[f64] {
        &self.beta_minus
    }

    /// Per-vertex `(β⁺, β⁻)`.
    pub fn beta(&self) -> (&[f64], &[f64]) {
        (&self.beta_plus, &self.beta_minus)
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.weight).sum()
    }

    pub fn is_symmetric(&self) -> bool {
        self.edges.iter().all(|e| self.weight(e.to, e.from) == e.weight)
    }

    /// Default Kirchhoff tolerance: `KIRCHHOFF_REL_TOL · max β⁺`.
    pub fn kirchhoff_tolerance(&self) -> f64 {
        KIRCHHOFF_REL_TOL * self.beta_plus.iter().cloned().fold(0.0, f64::max)
    }

    pub fn check_kirchhoff(&self, tol: f64) -> KirchhoffReport {
        let mut max_violation = 0.0f64;
        let mut violating_vertices = Vec::new();
        for x in 0..self.n() {
            let v = (self.beta_plus[x] - self.beta_minus[x]).abs();
            max_violation = max_violation.max(v);
            if v > tol {
                violating_vertices.push(x);
            }
        }
        KirchhoffReport {
            satisfied: max_violation <= tol,
            max_violation,
            violating_vertices,
            tolerance: tol,
        }
    }

    pub fn satisfies_kirchhoff(&self) -> bool {
        self.check_kirchhoff(self.kirchhoff_tolerance()).satisfied
    }

    pub(crate) fn require_kirchhoff(&self) -> Result<()> {
        let report = self.check_kirchhoff(self.kirchhoff_tolerance());
        if report.satisfied {
            Ok(())
        } else {
            Err(Error::KirchhoffViolated { max_violation: report.max_violation })
        }
    }

    /// Vertex boundary (a subset of `omega`) and edge boundary of `omega`.
    pub fn boundaries(&self, omega: &VertexSubset) -> Result<Boundaries> {
        self.check_subset(omega)?;
        if omega.is_empty() {
            return Err(Error::EmptySubset);
        }
        let vertex_boundary = omega
            .iter()
            .filter(|&y| self.skeleton[y].iter().any(|&x| !omega.contains(x)));
        let vertex_boundary = VertexSubset::new(self.n(), vertex_boundary)?;
        let edge_boundary = self
            .edges
            .iter()
            .filter(|e| omega.contains(e.from) != omega.contains(e.to))
            .copied()
            .collect();
        Ok(Boundaries { vertex_boundary, edge_boundary })
    }

    /// `b(∂_E U)`: total weight of directed edges with exactly one endpoint in `u`.
    pub fn edge_boundary_weight(&self, u: &VertexSubset) -> f64 {
        let (out, inc) = self.cut_weights(u);
        out + inc
    }

    /// One-directional cut weights `(Σ_{x∈U, y∉U} b(x,y), Σ_{x∉U, y∈U} b(x,y))`.
    pub fn cut_weights(&self, u: &VertexSubset) -> (f64, f64) {
        let mut out = 0.0;
        let mut inc = 0.0;
        for e in &self.edges {
            match (u.contains(e.from), u.contains(e.to)) {
                (true, false) => out += e.weight,
                (false, true) => inc += e.weight,
                _ => {}
            }
        }
        (out, inc)
    }

    pub fn measure_of(&self, u: &VertexSubset) -> f64 {
        u.iter().map(|x| self.measure[x]).sum()
    }

    pub fn beta_plus_of(&self, u: &VertexSubset) -> f64 {
        u.iter().map(|x| self.beta_plus[x]).sum()
    }

    pub fn connectivity(&self) -> Connectivity {
        let n = self.n();
        let labels = self.component_labels();
        let components = labels.iter().max().map_or(0, |&c| c + 1);
        let forward = reach(n, 0, |x| self.out_adj[x].iter().map(|&(y, _)| y));
        let backward = reach(n, 0, |x| self.in_adj[x].iter().map(|&(y, _)| y));
        Connectivity {
            connected: components == 1,
            strongly_connected: forward.iter().all(|&r| r) && backward.iter().all(|&r| r),
            components,
        }
    }

    /// Component index of each vertex in the undirected skeleton, numbered in
    /// order of the smallest vertex of each component.
    pub fn component_labels(&self) -> Vec<usize> {
        let n = self.n();
        let mut label = vec![usize::MAX; n];
        let mut next = 0;
        for s in 0..n {
            if label[s] != usize::MAX {
                continue;
            }
            let seen = reach(n, s, |x| self.skeleton[x].iter().copied());
            for (x, r) in seen.into_iter().enumerate() {
                if r {
                    label[x] = next;
                }
            }
            next += 1;
        }
        label
    }

    /// Whether `u` induces a connected subgraph of the undirected skeleton.
    pub fn induces_connected(&self, u: &VertexSubset) -> bool {
        let Some(start) = u.iter().next() else {
            return false;
        };
        let seen = reach(self.n(), start, |x| {
            self.skeleton[x].iter().copied().filter(|&y| u.contains(y))
        });
        u.iter().all(|x| seen[x])
    }

    /// `q(x) = (β⁺(x) − β⁻(x)) / m(x)`, the potential that turns the formal
    /// adjoint into a Schrödinger operator.
    pub fn schrodinger_potential(&self) -> Vec<f64> {
        (0..self.n())
            .map(|x| (self.beta_plus[x] - self.beta_minus[x]) / self.measure[x])
            .collect()
    }

    /// Unweighted BFS distances from `root` in the undirected skeleton.
    pub fn skeleton_distances(&self, root: VertexId) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n()];
        let mut queue = VecDeque::new();
        dist[root] = Some(0);
        queue.push_back(root);
        while let Some(x) = queue.pop_front() {
            let d = dist[x].unwrap();
            for &y in &self.skeleton[x] {
                if dist[y].is_none() {
                    dist[y] = Some(d + 1);
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    pub(crate) fn check_subset(&self, s: &VertexSubset) -> Result<()> {
        if s.universe() != self.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), got: s.universe() });
        }
        Ok(())
    }
}

fn reach<I, F>(n: usize, start: VertexId, neighbors: F) -> Vec<bool>
where
    F: Fn(VertexId) -> I,
    I: Iterator<Item = VertexId>,
{
    let mut seen = vec![false; n];
    let mut stack = vec![start];
    seen[start] = true;
    while let Some(x) = stack.pop() {
        for y in neighbors(x) {
            if !seen[y] {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    seen
}

/// A set of vertices of a graph with `universe` vertices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VertexSubset {
    members: Vec<VertexId>,
    mask: Vec<bool>,
}

impl VertexSubset {
    /// Builds a subset; duplicate ids are collapsed.
    pub fn new(universe: usize, ids: impl IntoIterator<Item = VertexId>) -> Result<Self> {
        let mut mask = vec![false; universe];
        for id in ids {
            if id >= universe {
                return Err(Error::VertexOutOfRange { id, n: universe });
            }
            mask[id] = true;
        }
        Ok(Self::from_mask(mask))
    }

    pub fn from_mask(mask: Vec<bool>) -> Self {
        let members = mask.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect();
        Self { members, mask }
    }

    pub fn full(universe: usize) -> Self {
        Self::from_mask(vec![true; universe])
    }

    pub fn empty(universe: usize) -> Self {
        Self::from_mask(vec![false; universe])
    }

    pub fn universe(&self) -> usize {
        self.mask.len()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.members.len() == self.mask.len()
    }

    pub fn contains(&self, x: VertexId) -> bool {
        self.mask.get(x).copied().unwrap_or(false)
    }

    /// Members in increasing order.
    pub fn members(&self) -> &[VertexId] {
        &self.members
    }

    pub fn iter(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.members.iter().copied()
    }

    pub fn complement(&self) -> Self {
        Self::from_mask(self.mask.iter().map(|b| !b).collect())
    }

    pub fn is_subset_of(&self, other: &VertexSubset) -> bool {
        self.members.iter().all(|&x| other.contains(x))
    }
}

impl Serialize for VertexSubset {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.members.serialize(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Boundaries {
    pub vertex_boundary: VertexSubset,
    pub edge_boundary: Vec<Edge>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KirchhoffReport {
    pub satisfied: bool,
    pub max_violation: f64,
    pub violating_vertices: Vec<VertexId>,
    pub tolerance: f64,
}

/// `connected` refers to the undirected skeleton `E`; `strongly_connected` to
/// directed paths in both directions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Connectivity {
    pub connected: bool,
    pub strongly_connected: bool,
    pub components: usize,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(n: usize, edges: &[(usize, usize, f64)]) -> Result<DirectedGraph> {
        DirectedGraph::new(
            vec![1.0; n],
            edges.iter().map(|&(f, t, w)| Edge::new(f, t, w)).collect(),
        )
    }

    fn cycle3() -> DirectedGraph {
        unit(3, &[(0, 1, 1.0), (1, 2, 1.0), (2, 0, 1.0)]).unwrap()
    }

    fn opposing() -> DirectedGraph {
        unit(
            3,
            &[(0, 1, 2.0), (1, 2, 2.0), (2, 0, 2.0), (0, 2, 1.0), (2, 1, 1.0), (1, 0, 1.0)],
        )
        .unwrap()
    }

    fn set(n: usize, ids: &[usize]) -> VertexSubset {
        VertexSubset::new(n, ids.iter().copied()).unwrap()
    }

    #[test]
    fn build_errors() {
        assert_eq!(
            unit(2, &[(0, 1, 1.0)]).unwrap_err(),
            Error::IsolatedDirection { vertex: 0, direction: Direction::In }
        );
        assert_eq!(unit(2, &[(0, 0, 1.0)]).unwrap_err(), Error::SelfLoop(0));
        assert!(matches!(
            unit(2, &[(0, 1, 0.0), (1, 0, 1.0)]).unwrap_err(),
            Error::NonPositiveWeight { .. }
        ));
        assert_eq!(
            unit(2, &[(0, 1, 1.0), (1, 0, 1.0), (0, 1, 2.0)]).unwrap_err(),
            Error::DuplicateEdge { from: 0, to: 1 }
        );
        assert!(matches!(
            DirectedGraph::new(vec![1.0, -1.0], vec![Edge::new(0, 1, 1.0), Edge::new(1, 0, 1.0)]),
            Err(Error::NonPositiveMeasure { vertex: 1, .. })
        ));
        assert!(matches!(unit(2, &[(0, 2, 1.0)]), Err(Error::VertexOutOfRange { id: 2, n: 2 })));
    }

    #[test]
    fn beta_examples() {
        let g = cycle3();
        assert_eq!(g.beta(), (&[1.0, 1.0, 1.0][..], &[1.0, 1.0, 1.0][..]));
        let g = opposing();
        assert_eq!(g.beta_plus(), &[3.0, 3.0, 3.0]);
        assert_eq!(g.beta_minus(), &[3.0, 3.0, 3.0]);

        let k = 4;
        let mut edges = Vec::new();
        for leaf in 1..=k {
            edges.push((0, leaf, 1.0));
            edges.push((leaf, 0, 1.0));
        }
        let star = unit(k + 1, &edges).unwrap();
        assert_eq!(star.beta_plus()[0], k as f64);
        assert_eq!(star.beta_minus()[0], k as f64);
        assert!(star.beta_plus()[1..].iter().all(|&b| b == 1.0));
    }

    #[test]
    fn kirchhoff_examples() {
        let r = opposing().check_kirchhoff(1e-9);
        assert!(r.satisfied);
        assert_eq!(r.max_violation, 0.0);

        let g = unit(2, &[(0, 1, 2.0), (1, 0, 1.0)]).unwrap();
        let r = g.check_kirchhoff(g.kirchhoff_tolerance());
        assert!(!r.satisfied);
        assert_eq!(r.max_violation, 1.0);
        assert_eq!(r.violating_vertices, vec![0, 1]);
        assert!(matches!(g.require_kirchhoff(), Err(Error::KirchhoffViolated { .. })));
    }

    #[test]
    fn boundary_examples() {
        let g = cycle3();
        let b = g.boundaries(&set(3, &[0])).unwrap();
        assert_eq!(b.vertex_boundary.members(), &[0]);
        let pairs: Vec<_> = b.edge_boundary.iter().map(|e| (e.from, e.to)).collect();
        assert_eq!(pairs, vec![(0, 1), (2, 0)]);

        let b = g.boundaries(&VertexSubset::full(3)).unwrap();
        assert!(b.vertex_boundary.is_empty());
        assert!(b.edge_boundary.is_empty());

        let g = opposing();
        let b = g.boundaries(&set(3, &[0])).unwrap();
        assert_eq!(b.edge_boundary.len(), 4);
        assert_eq!(b.edge_boundary.iter().map(|e| e.weight).sum::<f64>(), 6.0);

        assert_eq!(g.boundaries(&VertexSubset::empty(3)).unwrap_err(), Error::EmptySubset);
    }

    #[test]
    fn connectivity_examples() {
        let c = cycle3().connectivity();
        assert!(c.connected && c.strongly_connected);
        let two = unit(
            6,
            &[(0, 1, 1.0), (1, 2, 1.0), (2, 0, 1.0), (3, 4, 1.0), (4, 5, 1.0), (5, 3, 1.0)],
        )
        .unwrap();
        let c = two.connectivity();
        assert!(!c.connected && !c.strongly_connected);
        assert_eq!(c.components, 2);
        assert_eq!(two.component_labels(), vec![0, 0, 0, 1, 1, 1]);
        let c = opposing().connectivity();
        assert!(c.connected && c.strongly_connected);
    }

    #[test]
    fn potential_examples() {
        assert_eq!(opposing().schrodinger_potential(), vec![0.0; 3]);
        let g = unit(2, &[(0, 1, 2.0), (1, 0, 1.0)]).unwrap();
        assert_eq!(g.schrodinger_potential(), vec![1.0, -1.0]);
    }

    #[test]
    fn subset_basics() {
        let s = set(5, &[3, 1, 3]);
        assert_eq!(s.members(), &[1, 3]);
        assert_eq!(s.complement().members(), &[0, 2, 4]);
        assert!(!s.contains(7));
        assert!(VertexSubset::new(2, [2]).is_err());
        assert!(cycle3().induces_connected(&set(3, &[0, 2])));
    }
}
