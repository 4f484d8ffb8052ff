//! Filtrations by breadth-first balls and the per-level profiles of the
//! complements `V_n^c`.

use rayon::prelude::*;
use serde::Serialize;

use super::cheeger::{cheeger, ratio_bounds, CheegerMode, Normalization};
use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, VertexId, VertexSubset};
use crate::operators::{assemble, dirichlet, OperatorKind};
use crate::spectral::nu;

/// Growth factor of `m_{V_n^c}` from first to last level required for a
/// heavy-end verdict.
pub const HEAVY_END_GROWTH: f64 = 10.0;

/// Relative slack allowed when checking that a sequence is nondecreasing.
const MONOTONE_REL_TOL: f64 = 1e-9;

/// Strictly nested connected vertex sets whose last element is `V`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Filtration {
    levels: Vec<VertexSubset>,
}

impl Filtration {
    /// Validates nesting, connectivity of each level and exhaustion.
    pub fn from_levels(g: &DirectedGraph, levels: Vec<VertexSubset>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::InvalidParameter("filtration needs at least one level".into()));
        }
        for (i, level) in levels.iter().enumerate() {
            g.check_subset(level)?;
            if level.is_empty() {
                return Err(Error::EmptySubset);
            }
            if !g.induces_connected(level) {
                return Err(Error::InvalidParameter(format!("level {} is not connected", i + 1)));
            }
            if i > 0 && !(levels[i - 1].is_subset_of(level) && levels[i - 1].len() < level.len()) {
                return Err(Error::InvalidParameter(format!(
                    "level {} does not strictly contain level {}",
                    i + 1,
                    i
                )));
            }
        }
        if !levels[levels.len() - 1].is_full() {
            return Err(Error::InvalidParameter("last level must be the whole vertex set".into()));
        }
        Ok(Self { levels })
    }

    pub fn levels(&self) -> &[VertexSubset] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// Vertices added by the last level: the outer shell of the truncation.
    pub fn frontier(&self) -> VertexSubset {
        let last = &self.levels[self.levels.len() - 1];
        match self.levels.len() {
            1 => last.clone(),
            k => {
                let prev = &self.levels[k - 2];
                VertexSubset::new(last.universe(), last.iter().filter(|&x| !prev.contains(x)))
                    .expect("subset of a valid level")
            }
        }
    }
}

/// Balls of radius 0, 1, 2, … around `root` in the undirected skeleton.
pub fn build_filtration(g: &DirectedGraph, root: VertexId) -> Result<Filtration> {
    if root >= g.n() {
        return Err(Error::VertexOutOfRange { id: root, n: g.n() });
    }
    let dist = g.skeleton_distances(root);
    if dist.iter().any(Option::is_none) {
        return Err(Error::Disconnected);
    }
    let radius = dist.iter().flatten().copied().max().unwrap_or(0);
    let levels = (0..=radius)
        .map(|r| {
            VertexSubset::new(g.n(), (0..g.n()).filter(|&x| dist[x].is_some_and(|d| d <= r)))
                .expect("ids in range")
        })
        .collect();
    Ok(Filtration { levels })
}

/// Quantities on the complement `C = V \ V_n` of one level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelProfile {
    /// 1-based level index `n`.
    pub level: usize,
    pub complement_size: usize,
    pub m_c: f64,
    #[serde(rename = "M_c")]
    pub big_m_c: f64,
    pub h_c: f64,
    pub h_mode: CheegerMode,
    pub h_tilde_c: f64,
    pub h_tilde_mode: CheegerMode,
    /// `ν(Δ^D_C)` in the measure metric.
    pub nu_dirichlet: f64,
    /// `m_C · h̃(C)² / 8`.
    pub ess_lower_bound: f64,
    /// Whether the `h̃` witness contains a vertex of the filtration frontier.
    pub witness_touches_frontier: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InfinityProfile {
    pub levels: Vec<LevelProfile>,
    pub m_nondecreasing: bool,
    #[serde(rename = "M_nonincreasing")]
    pub big_m_nonincreasing: bool,
    pub h_nondecreasing: bool,
    pub h_tilde_nondecreasing: bool,
    pub nu_nondecreasing: bool,
    /// Every Cheeger value was computed exactly.
    pub all_exact: bool,
    /// A heuristic value broke a monotonicity that exact values must obey.
    pub heuristic_monotonicity_violation: bool,
    pub heavy_end: bool,
}

impl InfinityProfile {
    pub fn m_inf_trend(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.m_c).collect()
    }

    #[allow(non_snake_case)]
    pub fn M_inf_trend(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.big_m_c).collect()
    }

    pub fn h_inf_trend(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.h_c).collect()
    }

    pub fn htilde_inf_trend(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.h_tilde_c).collect()
    }

    pub fn nu_trend(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.nu_dirichlet).collect()
    }
}

fn nondecreasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[1] >= w[0] - MONOTONE_REL_TOL * w[0].abs().max(1.0))
}

fn level_profile(
    g: &DirectedGraph,
    level: usize,
    complement: &VertexSubset,
    frontier: &VertexSubset,
    exact_cap: usize,
) -> Result<LevelProfile> {
    let (m_c, big_m_c) = ratio_bounds(g, complement)?;
    let h = cheeger(g, complement, Normalization::ByMeasure, exact_cap)?;
    let ht = cheeger(g, complement, Normalization::ByBetaPlus, exact_cap)?;
    let nu_dirichlet = nu(&dirichlet(&assemble(g, OperatorKind::Delta)?, complement)?)?;
    let witness_touches_frontier = ht.witness.iter().any(|x| frontier.contains(x));
    Ok(LevelProfile {
        level,
        complement_size: complement.len(),
        m_c,
        big_m_c,
        h_c: h.value,
        h_mode: h.mode,
        h_tilde_c: ht.value,
        h_tilde_mode: ht.mode,
        nu_dirichlet,
        ess_lower_bound: m_c * ht.value * ht.value / 8.0,
        witness_touches_frontier,
    })
}

/// Profiles of every non-empty complement along `filt`. Cheeger constants are
/// exact for complements of at most `exact_cap` vertices and heuristic upper
/// bounds beyond.
pub fn infinity_profile(
    g: &DirectedGraph,
    filt: &Filtration,
    exact_cap: usize,
) -> Result<InfinityProfile> {
    let frontier = filt.frontier();
    let complements: Vec<(usize, VertexSubset)> = filt
        .levels()
        .iter()
        .enumerate()
        .map(|(i, l)| (i + 1, l.complement()))
        .filter(|(_, c)| !c.is_empty())
        .collect();
    if complements.is_empty() {
        return Err(Error::EmptyComplement);
    }
    let levels = complements
        .par_iter()
        .map(|(i, c)| level_profile(g, *i, c, &frontier, exact_cap))
        .collect::<Result<Vec<_>>>()?;

    let m: Vec<f64> = levels.iter().map(|l| l.m_c).collect();
    let big_m: Vec<f64> = levels.iter().map(|l| -l.big_m_c).collect();
    let h: Vec<f64> = levels.iter().map(|l| l.h_c).collect();
    let ht: Vec<f64> = levels.iter().map(|l| l.h_tilde_c).collect();
    let nus: Vec<f64> = levels.iter().map(|l| l.nu_dirichlet).collect();
    let all_exact = levels
        .iter()
        .all(|l| l.h_mode == CheegerMode::Exact && l.h_tilde_mode == CheegerMode::Exact);
    let h_nondecreasing = nondecreasing(&h);
    let h_tilde_nondecreasing = nondecreasing(&ht);
    let m_nondecreasing = nondecreasing(&m);
    let heavy_end =
        m_nondecreasing && m[m.len() - 1] >= HEAVY_END_GROWTH * m[0] && m.len() >= 2;
    Ok(InfinityProfile {
        m_nondecreasing,
        big_m_nonincreasing: nondecreasing(&big_m),
        h_nondecreasing,
        h_tilde_nondecreasing,
        nu_nondecreasing: nondecreasing(&nus),
        all_exact,
        heuristic_monotonicity_violation: !all_exact && !(h_nondecreasing && h_tilde_nondecreasing),
        heavy_end,
        levels,
    })
}
