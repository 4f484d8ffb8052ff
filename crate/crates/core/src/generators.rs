//! Graph families that satisfy the Kirchhoff condition by construction.
//!
//! Every family is a non-negative superposition of directed cycles (2-cycles
//! included), so `β⁺ = β⁻` holds exactly whenever the weights are dyadic.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, Edge, VertexId, VertexSubset};
use crate::isoperimetric::Filtration;
use crate::rng::Rng;

/// Default weight range for random circulations. Draws are multiples of
/// `1/8`, so sums stay exact.
pub const DEFAULT_WEIGHT_RANGE: (f64, f64) = (0.5, 4.0);

const WEIGHT_GRID: f64 = 8.0;
const MAX_ATTEMPTS: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FamilySpec {
    Cycle { n: usize, weight: f64 },
    OpposingCycles,
    RandomCirculation { n: usize, cycles: usize, seed: u64, weight_range: (f64, f64) },
    Layered { layers: usize, width: usize, gamma: f64, radial: f64 },
    SymmetricTree { depth: usize, branching: usize, growth: f64 },
}

impl FamilySpec {
    pub fn generate(&self) -> Result<DirectedGraph> {
        match *self {
            FamilySpec::Cycle { n, weight } => gen_cycle(n, weight),
            FamilySpec::OpposingCycles => Ok(opposing_cycles()),
            FamilySpec::RandomCirculation { n, cycles, seed, weight_range } => {
                gen_random_circulation(n, cycles, seed, weight_range)
            }
            FamilySpec::Layered { layers, width, gamma, radial } => {
                gen_layered_heavy(layers, width, gamma, radial)
            }
            FamilySpec::SymmetricTree { depth, branching, growth } => {
                gen_symmetric_tree(depth, branching, growth)
            }
        }
    }
}

fn positive(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive and finite, got {x}")))
    }
}

/// Sums weighted directed cycles (each a vertex sequence, closed implicitly)
/// into a graph with `m ≡ 1`.
pub fn superpose_cycles(n: usize, cycles: &[(Vec<VertexId>, f64)]) -> Result<DirectedGraph> {
    let mut acc: BTreeMap<(VertexId, VertexId), f64> = BTreeMap::new();
    for (cycle, w) in cycles {
        positive("cycle weight", *w)?;
        if cycle.len() < 2 {
            return Err(Error::InvalidParameter("a cycle needs at least two vertices".into()));
        }
        for (i, &x) in cycle.iter().enumerate() {
            let y = cycle[(i + 1) % cycle.len()];
            *acc.entry((x, y)).or_insert(0.0) += w;
        }
    }
    let edges = acc.into_iter().map(|((x, y), w)| Edge::new(x, y, w)).collect();
    DirectedGraph::new(vec![1.0; n], edges)
}

/// Directed `n`-cycle `0 → 1 → … → n-1 → 0` with `b ≡ w`, `m ≡ 1`.
pub fn gen_cycle(n: usize, w: f64) -> Result<DirectedGraph> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("cycle needs n >= 2, got {n}")));
    }
    superpose_cycles(n, &[((0..n).collect(), w)])
}

/// The cycle `0 → 1 → 2 → 0` with weight 2 plus its reverse with weight 1.
pub fn opposing_cycles() -> DirectedGraph {
    superpose_cycles(3, &[(vec![0, 1, 2], 2.0), (vec![0, 2, 1], 1.0)]).expect("valid construction")
}

fn draw_weight(rng: &mut Rng, (lo, hi): (f64, f64)) -> f64 {
    let steps = ((hi - lo) * WEIGHT_GRID).floor().max(0.0) as u64;
    lo + rng.below(steps + 1) as f64 / WEIGHT_GRID
}

/// Superposition of `k` random simple directed cycles with random weights.
///
/// The first cycle visits every vertex in a random order, so the result is
/// strongly connected. Each further cycle has a uniform length in `3..=n`
/// and uniformly chosen distinct vertices.
pub fn gen_random_circulation(
    n: usize,
    k: usize,
    seed: u64,
    weight_range: (f64, f64),
) -> Result<DirectedGraph> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!("random circulation needs n >= 3, got {n}")));
    }
    if k < 1 {
        return Err(Error::InvalidParameter("at least one cycle is required".into()));
    }
    let (lo, hi) = weight_range;
    positive("lower weight bound", lo)?;
    if !(hi.is_finite() && hi >= lo) {
        return Err(Error::InvalidParameter(format!("invalid weight range [{lo}, {hi}]")));
    }
    let mut rng = Rng::new(seed);
    for _ in 0..MAX_ATTEMPTS {
        let mut cycles = Vec::with_capacity(k);
        for c in 0..k {
            let mut perm: Vec<VertexId> = (0..n).collect();
            rng.shuffle(&mut perm);
            let len = if c == 0 { n } else { rng.range_inclusive(3, n) };
            perm.truncate(len);
            cycles.push((perm, draw_weight(&mut rng, weight_range)));
        }
        match superpose_cycles(n, &cycles) {
            Err(Error::IsolatedDirection { .. }) => continue,
            other => return other,
        }
    }
    Err(Error::DegenerateInstance { attempts: MAX_ATTEMPTS })
}

/// `layers` concentric directed cycles of `width` vertices. Vertex `(ℓ, j)`
/// has id `ℓ·width + j`; layer `ℓ` has cycle weight `γ^ℓ` and is joined to
/// layer `ℓ+1` by symmetric radial edges `(ℓ, j) ↔ (ℓ+1, j)` of weight
/// `radial·γ^ℓ`. `m ≡ 1`.
pub fn gen_layered_heavy(layers: usize, width: usize, gamma: f64, radial: f64) -> Result<DirectedGraph> {
    if layers < 2 || width < 3 {
        return Err(Error::InvalidParameter(format!(
            "layered family needs layers >= 2 and width >= 3, got {layers} and {width}"
        )));
    }
    positive("gamma", gamma)?;
    positive("radial", radial)?;
    let id = |l: usize, j: usize| l * width + j;
    let mut cycles = Vec::new();
    for l in 0..layers {
        let scale = gamma.powi(l as i32);
        cycles.push(((0..width).map(|j| id(l, j)).collect(), scale));
        if l + 1 < layers {
            for j in 0..width {
                cycles.push((vec![id(l, j), id(l + 1, j)], radial * scale));
            }
        }
    }
    superpose_cycles(layers * width, &cycles)
}

/// Filtration whose `n`-th level is layers `0..n` of a layered graph.
pub fn layer_filtration(g: &DirectedGraph, width: usize) -> Result<Filtration> {
    if width == 0 || g.n() % width != 0 {
        return Err(Error::InvalidParameter(format!(
            "width {width} does not divide the vertex count {}",
            g.n()
        )));
    }
    let levels = (1..=g.n() / width)
        .map(|l| VertexSubset::new(g.n(), 0..l * width))
        .collect::<Result<Vec<_>>>()?;
    Filtration::from_levels(g, levels)
}

/// Complete `branching`-ary tree of the given depth with symmetric weights:
/// the edge from a vertex at depth `d` to its child weighs `growth^d`.
/// Vertices are numbered breadth first from the root `0`.
pub fn gen_symmetric_tree(depth: usize, branching: usize, growth: f64) -> Result<DirectedGraph> {
    if depth < 1 || branching < 2 {
        return Err(Error::InvalidParameter(format!(
            "tree needs depth >= 1 and branching >= 2, got {depth} and {branching}"
        )));
    }
    positive("growth", growth)?;
    let mut cycles = Vec::new();
    let mut frontier = vec![0usize];
    let mut next_id = 1;
    for d in 0..depth {
        let w = growth.powi(d as i32);
        let mut next = Vec::with_capacity(frontier.len() * branching);
        for &p in &frontier {
            for _ in 0..branching {
                cycles.push((vec![p, next_id], w));
                next.push(next_id);
                next_id += 1;
            }
        }
        frontier = next;
    }
    superpose_cycles(next_id, &cycles)
}

/// A named member of the test corpus.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusEntry {
    pub name: String,
    pub spec: FamilySpec,
}

/// Fixed corpus: the small hand-checkable graphs and 50 random circulations
/// with `n ∈ 4..=30`.
pub fn corpus() -> Vec<CorpusEntry> {
    let mut out = vec![
        ("cycle3", FamilySpec::Cycle { n: 3, weight: 1.0 }),
        ("cycle2", FamilySpec::Cycle { n: 2, weight: 1.0 }),
        ("cycle5_w2", FamilySpec::Cycle { n: 5, weight: 2.0 }),
        ("opposing_cycles", FamilySpec::OpposingCycles),
        ("star3", FamilySpec::SymmetricTree { depth: 1, branching: 2, growth: 1.0 }),
        ("tree_d2_b2_g4", FamilySpec::SymmetricTree { depth: 2, branching: 2, growth: 4.0 }),
        ("layered_2x3", FamilySpec::Layered { layers: 2, width: 3, gamma: 2.0, radial: 1.0 }),
        ("layered_3x3", FamilySpec::Layered { layers: 3, width: 3, gamma: 2.0, radial: 1.0 }),
    ]
    .into_iter()
    .map(|(name, spec)| CorpusEntry { name: name.to_string(), spec })
    .collect::<Vec<_>>();
    for i in 0..50u64 {
        let n = 4 + (i as usize * 13) % 27;
        let cycles = 2 + i as usize % 4;
        let seed = 0x5eed_0000 + i;
        out.push(CorpusEntry {
            name: format!("circulation_{i:02}_n{n}"),
            spec: FamilySpec::RandomCirculation { n, cycles, seed, weight_range: DEFAULT_WEIGHT_RANGE },
        });
    }
    out
}

/// Only the random circulations of [`corpus`].
pub fn random_corpus() -> Vec<CorpusEntry> {
    corpus()
        .into_iter()
        .filter(|e| matches!(e.spec, FamilySpec::RandomCirculation { .. }))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycles() {
        let g = gen_cycle(3, 1.0).unwrap();
        assert_eq!(g.edges().len(), 3);
        assert_eq!(g.weight(2, 0), 1.0);
        let g2 = gen_cycle(2, 1.0).unwrap();
        assert!(g2.is_symmetric());
        let g4 = gen_cycle(4, 2.0).unwrap();
        assert!(g4.beta_plus().iter().all(|&b| b == 2.0));
        assert!(gen_cycle(1, 1.0).is_err());
        assert!(gen_cycle(3, 0.0).is_err());
    }

    #[test]
    fn opposing_matches_explicit_weights() {
        let g = opposing_cycles();
        for (x, y, w) in [(0, 1, 2.0), (1, 2, 2.0), (2, 0, 2.0), (0, 2, 1.0), (2, 1, 1.0), (1, 0, 1.0)] {
            assert_eq!(g.weight(x, y), w);
        }
        assert_eq!(g.beta_plus(), &[3.0, 3.0, 3.0]);
        assert_eq!(g.beta_minus(), &[3.0, 3.0, 3.0]);
    }

    #[test]
    fn random_circulation_is_exact_and_reproducible() {
        for seed in 0..20 {
            let g = gen_random_circulation(9, 4, seed, DEFAULT_WEIGHT_RANGE).unwrap();
            assert_eq!(g.check_kirchhoff(0.0).max_violation, 0.0);
            assert!(g.connectivity().strongly_connected);
            let again = gen_random_circulation(9, 4, seed, DEFAULT_WEIGHT_RANGE).unwrap();
            assert_eq!(g, again);
            for e in g.edges() {
                assert_eq!((e.weight * 8.0).fract(), 0.0);
            }
        }
        let a = gen_random_circulation(9, 4, 1, DEFAULT_WEIGHT_RANGE).unwrap();
        let b = gen_random_circulation(9, 4, 2, DEFAULT_WEIGHT_RANGE).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn single_random_cycle_is_hamiltonian() {
        let g = gen_random_circulation(6, 1, 3, (1.0, 1.0)).unwrap();
        assert_eq!(g.edges().len(), 6);
        assert!(g.beta_plus().iter().all(|&b| b == 1.0));
    }

    #[test]
    fn layered_weights() {
        let g = gen_layered_heavy(2, 3, 2.0, 1.0).unwrap();
        // layer 0: cycle 1 plus radial 1; layer 1: cycle 2 plus radial 1
        assert_eq!(g.beta_plus(), &[2.0, 2.0, 2.0, 3.0, 3.0, 3.0]);
        assert_eq!(g.check_kirchhoff(0.0).max_violation, 0.0);
        assert_eq!(g.weight(0, 3), 1.0);
        assert_eq!(g.weight(3, 4), 2.0);
    }

    #[test]
    fn layered_profiles() {
        use crate::isoperimetric::infinity_profile;
        let profile = |gamma: f64| {
            let g = gen_layered_heavy(6, 4, gamma, 1.0).unwrap();
            infinity_profile(&g, &layer_filtration(&g, 4).unwrap(), 22).unwrap()
        };
        let steep = profile(3.0);
        assert!(steep.heavy_end);
        // first complement starts at layer 1: 3·(1 + 1) + 1; last is layer 5: 3^5 + 3^4
        assert_eq!(steep.m_inf_trend().first(), Some(&7.0));
        assert_eq!(steep.m_inf_trend().last(), Some(&324.0));
        assert!(steep.m_inf_trend().windows(2).all(|w| w[1] > w[0]));
        // growth 48/5 stays below the factor-10 threshold
        let moderate = profile(2.0);
        assert_eq!(moderate.m_inf_trend().first(), Some(&5.0));
        assert_eq!(moderate.m_inf_trend().last(), Some(&48.0));
        assert!(!moderate.heavy_end);
        assert!(!profile(1.0).heavy_end);
    }

    #[test]
    fn layer_filtration_levels() {
        let g = gen_layered_heavy(3, 4, 2.0, 1.0).unwrap();
        let f = layer_filtration(&g, 4).unwrap();
        assert_eq!(f.len(), 3);
        assert_eq!(f.levels()[0].members(), &[0, 1, 2, 3]);
        assert!(layer_filtration(&g, 5).is_err());
    }

    #[test]
    fn trees() {
        let star = gen_symmetric_tree(1, 2, 1.0).unwrap();
        assert_eq!(star.n(), 3);
        assert!(star.is_symmetric());
        assert_eq!(star.beta_plus(), &[2.0, 1.0, 1.0]);
        let t = gen_symmetric_tree(2, 2, 4.0).unwrap();
        assert_eq!(t.n(), 7);
        assert_eq!(t.weight(1, 3), 4.0);
        assert_eq!(t.weight(0, 1), 1.0);
    }

    #[test]
    fn corpus_is_valid() {
        let c = corpus();
        assert_eq!(random_corpus().len(), 50);
        for e in &c {
            let g = e.spec.generate().unwrap();
            assert_eq!(g.check_kirchhoff(0.0).max_violation, 0.0, "{}", e.name);
        }
        let small = random_corpus()
            .iter()
            .filter(|e| e.spec.generate().unwrap().n() <= 9)
            .count();
        assert!(small >= 8);
    }
}
