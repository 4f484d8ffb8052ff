//! Cheeger constants `h(Ω) = inf_U b(∂_E U)/m(U)` and
//! `h̃(Ω) = inf_U b(∂_E U)/β⁺(U)` over non-empty `U ⊆ Ω`.
//!
//! `b(∂_E U)` counts edges crossing `U` in both directions, measured in the
//! whole graph (edges leaving `Ω` count too).

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, VertexSubset};
use crate::operators::{assemble, dirichlet, OperatorKind};
use crate::spectral::symmetric_eigen;

/// Largest `|Ω|` handled by exhaustive enumeration by default.
pub const EXACT_CAP: usize = 22;

/// Number of high bits used to split the subset space into parallel chunks.
const CHUNK_BITS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Normalization {
    /// Denominator `m(U)`, giving `h`.
    ByMeasure,
    /// Denominator `β⁺(U)`, giving `h̃`.
    ByBetaPlus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CheegerMode {
    Exact,
    UpperBound,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheegerResult {
    pub value: f64,
    pub witness: VertexSubset,
    pub mode: CheegerMode,
    pub normalization: Normalization,
}

/// `b(∂_E U)` divided by the chosen denominator of `U`.
pub fn cheeger_ratio(g: &DirectedGraph, u: &VertexSubset, normalization: Normalization) -> f64 {
    let den = match normalization {
        Normalization::ByMeasure => g.measure_of(u),
        Normalization::ByBetaPlus => g.beta_plus_of(u),
    };
    g.edge_boundary_weight(u) / den
}

/// `(m_Ω, M_Ω)`: extreme values of `β⁺(x)/m(x)` over `Ω`.
pub fn ratio_bounds(g: &DirectedGraph, omega: &VertexSubset) -> Result<(f64, f64)> {
    g.check_subset(omega)?;
    if omega.is_empty() {
        return Err(Error::EmptySubset);
    }
    let ratios = omega.iter().map(|x| g.beta_plus()[x] / g.measure()[x]);
    Ok(ratios.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(r), hi.max(r))))
}

/// Incremental cut bookkeeping over the members of `Ω`, indexed locally.
struct LocalCut {
    /// `β⁺ + β⁻`: cut weight of a singleton.
    degree: Vec<f64>,
    /// Ω-internal neighbours with symmetrized weight `b(x,y) + b(y,x)`.
    neighbors: Vec<Vec<(usize, f64)>>,
    denominator: Vec<f64>,
}

impl LocalCut {
    fn new(g: &DirectedGraph, omega: &VertexSubset, normalization: Normalization) -> Self {
        let local: Vec<Option<usize>> = {
            let mut idx = vec![None; g.n()];
            for (i, x) in omega.iter().enumerate() {
                idx[x] = Some(i);
            }
            idx
        };
        let k = omega.len();
        let mut neighbors = vec![Vec::new(); k];
        for e in g.edges() {
            if let (Some(i), Some(j)) = (local[e.from], local[e.to]) {
                neighbors[i].push((j, e.weight));
                neighbors[j].push((i, e.weight));
            }
        }
        // merge the two directions of a pair into one entry
        for nb in &mut neighbors {
            nb.sort_by_key(|&(j, _)| j);
            nb.dedup_by(|later, earlier| {
                if later.0 == earlier.0 {
                    earlier.1 += later.1;
                    true
                } else {
                    false
                }
            });
        }
        let degree = omega.iter().map(|x| g.beta_plus()[x] + g.beta_minus()[x]).collect();
        let denominator = omega
            .iter()
            .map(|x| match normalization {
                Normalization::ByMeasure => g.measure()[x],
                Normalization::ByBetaPlus => g.beta_plus()[x],
            })
            .collect();
        Self { degree, neighbors, denominator }
    }

    fn len(&self) -> usize {
        self.degree.len()
    }
}

/// Mutable state for one subset `U` during enumeration or local search.
#[derive(Clone)]
struct CutState {
    inside: Vec<bool>,
    /// `Σ_{j∈U} a(i, j)` for every local `i`.
    link: Vec<f64>,
    cut: f64,
    den: f64,
    size: usize,
}

impl CutState {
    fn empty(k: usize) -> Self {
        Self { inside: vec![false; k], link: vec![0.0; k], cut: 0.0, den: 0.0, size: 0 }
    }

    fn toggle(&mut self, lc: &LocalCut, i: usize) {
        let sign = if self.inside[i] { -1.0 } else { 1.0 };
        self.cut += sign * (lc.degree[i] - 2.0 * self.link[i]);
        self.den += sign * lc.denominator[i];
        for &(j, a) in &lc.neighbors[i] {
            self.link[j] += sign * a;
        }
        self.inside[i] = !self.inside[i];
        if sign > 0.0 {
            self.size += 1;
        } else {
            self.size -= 1;
        }
    }

    /// Ratio after toggling `i`, without mutating.
    fn ratio_if_toggled(&self, lc: &LocalCut, i: usize) -> f64 {
        let sign = if self.inside[i] { -1.0 } else { 1.0 };
        (self.cut + sign * (lc.degree[i] - 2.0 * self.link[i])) / (self.den + sign * lc.denominator[i])
    }

    fn ratio(&self) -> f64 {
        self.cut / self.den
    }
}

/// Whether the member list encoded by `a` is lexicographically smaller than
/// the one encoded by `b` (bit `i` ↔ `i`-th smallest member of `Ω`).
fn lex_less(a: u64, b: u64) -> bool {
    if a == b {
        return false;
    }
    let d = (a ^ b).trailing_zeros();
    if a >> d & 1 == 1 {
        // a continues with bit d, b with something larger or nothing
        b >> d != 0
    } else {
        a >> d == 0
    }
}

fn visit_chunk<F: FnMut(u64, &CutState)>(lc: &LocalCut, low_bits: usize, prefix: u64, mut visit: F) {
    let k = lc.len();
    let mut state = CutState::empty(k);
    for i in low_bits..k {
        if prefix >> (i - low_bits) & 1 == 1 {
            state.toggle(lc, i);
        }
    }
    let mut mask = prefix << low_bits;
    if state.size > 0 {
        visit(mask, &state);
    }
    for step in 1u64..(1u64 << low_bits) {
        let bit = step.trailing_zeros() as usize;
        state.toggle(lc, bit);
        mask ^= 1 << bit;
        if state.size > 0 {
            visit(mask, &state);
        }
    }
}

fn mask_to_subset(n: usize, omega: &VertexSubset, mask: u64) -> VertexSubset {
    let ids = omega.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, x)| x);
    VertexSubset::new(n, ids).expect("members of omega are in range")
}

/// Exact Cheeger constant over all non-empty `U ⊆ Ω`, for `|Ω| ≤ EXACT_CAP`.
pub fn cheeger_exact(
    g: &DirectedGraph,
    omega: &VertexSubset,
    normalization: Normalization,
) -> Result<CheegerResult> {
    cheeger_exact_with_cap(g, omega, normalization, EXACT_CAP)
}

/// [`cheeger_exact`] with an explicit enumeration cap (at most 63).
///
/// Ties within `1e-12` relative are broken towards the lexicographically
/// smallest witness, independently of how the enumeration is scheduled.
pub fn cheeger_exact_with_cap(
    g: &DirectedGraph,
    omega: &VertexSubset,
    normalization: Normalization,
    cap: usize,
) -> Result<CheegerResult> {
    g.check_subset(omega)?;
    let k = omega.len();
    if k == 0 {
        return Err(Error::EmptySubset);
    }
    if k > cap.min(63) {
        return Err(Error::SubsetTooLarge { size: k, cap: cap.min(63) });
    }
    let lc = LocalCut::new(g, omega, normalization);
    let high = k.min(CHUNK_BITS);
    let low = k - high;
    let prefixes = 0..(1u64 << high);

    let best = prefixes
        .clone()
        .into_par_iter()
        .map(|p| {
            let mut best = f64::INFINITY;
            visit_chunk(&lc, low, p, |_, s| best = best.min(s.ratio()));
            best
        })
        .reduce(|| f64::INFINITY, f64::min);

    let scale = lc.degree.iter().cloned().fold(0.0, f64::max)
        / lc.denominator.iter().cloned().fold(f64::INFINITY, f64::min);
    let threshold = best + 1e-12 * best.abs() + 1e-14 * scale;
    let witness = prefixes
        .into_par_iter()
        .map(|p| {
            let mut pick: Option<u64> = None;
            visit_chunk(&lc, low, p, |mask, s| {
                if s.ratio() <= threshold && pick.map_or(true, |q| lex_less(mask, q)) {
                    pick = Some(mask);
                }
            });
            pick
        })
        .reduce(
            || None,
            |a, b| match (a, b) {
                (Some(x), Some(y)) => Some(if lex_less(y, x) { y } else { x }),
                (x, None) => x,
                (None, y) => y,
            },
        )
        .expect("at least one non-empty subset");
    let witness = mask_to_subset(g.n(), omega, witness);
    Ok(CheegerResult {
        value: cheeger_ratio(g, &witness, normalization),
        witness,
        mode: CheegerMode::Exact,
        normalization,
    })
}

/// Upper bound on the Cheeger constant for any `|Ω|`.
///
/// Sweep cuts along the lowest two eigenvectors of the Dirichlet symmetrized
/// operator (`H` with metric `m`, or its normalized version with metric `β⁺`),
/// followed by greedy single-vertex moves from the best sweep sets and from
/// `Ω` itself until no move improves the ratio.
pub fn cheeger_heuristic(
    g: &DirectedGraph,
    omega: &VertexSubset,
    normalization: Normalization,
) -> Result<CheegerResult> {
    g.check_subset(omega)?;
    let k = omega.len();
    if k == 0 {
        return Err(Error::EmptySubset);
    }
    let lc = LocalCut::new(g, omega, normalization);
    let kind = match normalization {
        Normalization::ByMeasure => OperatorKind::H,
        Normalization::ByBetaPlus => OperatorKind::NormalizedH,
    };
    let op = dirichlet(&assemble(g, kind)?, omega)?;
    let a = crate::operators::to_euclidean(&op);
    let (_, vecs) = symmetric_eigen(&a)?;

    // (ratio, members) for every sweep prefix
    let mut candidates: Vec<(f64, Vec<bool>)> = Vec::new();
    for col in 0..k.min(2) {
        let f: Vec<f64> = (0..k).map(|i| vecs[(i, col)] / op.metric()[i].sqrt()).collect();
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&i, &j| f[j].total_cmp(&f[i]).then(i.cmp(&j)));
        for dir in [false, true] {
            if dir {
                order.reverse();
            }
            let mut s = CutState::empty(k);
            for &i in &order {
                s.toggle(&lc, i);
                candidates.push((s.ratio(), s.inside.clone()));
            }
        }
    }
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0));
    candidates.dedup_by(|a, b| a.1 == b.1);
    let mut starts: Vec<Vec<bool>> = candidates.iter().take(4).map(|c| c.1.clone()).collect();
    starts.push(vec![true; k]);

    let mut best: Option<(f64, Vec<bool>)> = None;
    for start in starts {
        let mut s = CutState::empty(k);
        for (i, &b) in start.iter().enumerate() {
            if b {
                s.toggle(&lc, i);
            }
        }
        local_search(&lc, &mut s);
        let r = s.ratio();
        if best.as_ref().map_or(true, |(b, _)| r < *b) {
            best = Some((r, s.inside.clone()));
        }
    }
    let (_, inside) = best.expect("at least one start");
    let witness = VertexSubset::new(
        g.n(),
        omega.iter().enumerate().filter(|(i, _)| inside[*i]).map(|(_, x)| x),
    )?;
    Ok(CheegerResult {
        value: cheeger_ratio(g, &witness, normalization),
        witness,
        mode: CheegerMode::UpperBound,
        normalization,
    })
}

fn local_search(lc: &LocalCut, s: &mut CutState) {
    let k = lc.len();
    // each accepted move strictly lowers the ratio; the cap guards against
    // rounding-level oscillation
    for _ in 0..4 * k * k + 16 {
        let current = s.ratio();
        let mut best: Option<(f64, usize)> = None;
        for i in 0..k {
            if s.inside[i] && s.size == 1 {
                continue;
            }
            let r = s.ratio_if_toggled(lc, i);
            if r < current * (1.0 - 1e-12) - 1e-15 && best.map_or(true, |(b, _)| r < b) {
                best = Some((r, i));
            }
        }
        match best {
            Some((_, i)) => s.toggle(lc, i),
            None => break,
        }
    }
}

/// Exact when `|Ω| ≤ cap`, heuristic upper bound otherwise.
pub fn cheeger(
    g: &DirectedGraph,
    omega: &VertexSubset,
    normalization: Normalization,
    cap: usize,
) -> Result<CheegerResult> {
    if omega.len() <= cap.min(63) {
        cheeger_exact_with_cap(g, omega, normalization, cap)
    } else {
        cheeger_heuristic(g, omega, normalization)
    }
}
