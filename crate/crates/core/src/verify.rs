//! Checkable forms of the inequalities relating spectra, numerical ranges and
//! Cheeger constants. Every check records both sides, the margin and the
//! tolerance it was judged with.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::generators::corpus;
use crate::graph::{DirectedGraph, VertexId, VertexSubset};
use crate::isoperimetric::{
    build_filtration, cheeger_exact_with_cap, infinity_profile, ratio_bounds, CheegerMode,
    Filtration, Normalization,
};
use crate::operators::{assemble, dirichlet, greens_residual, greens_scale, to_euclidean, OperatorKind};
use crate::rng::Rng;
use crate::spectral::{
    eig, hermitian_eigen, kernel_dimension, numerical_range_boundary, nu,
    operator_norm, operator_spectrum, real_part, symmetric_eigenvalues,
};

/// Required margin for strict inequalities: `a < b` passes iff `b − a ≥ STRICT_MARGIN`.
pub const STRICT_MARGIN: f64 = 1e-12;

/// Green's formula passes when the residual is at most this times its scale.
pub const GREEN_REL_TOL: f64 = 1e-9;

/// Eigenvalues of modulus below this count towards the kernel.
pub const KERNEL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub angles: usize,
    pub random_vectors: usize,
    pub seed: u64,
    pub exact_cap: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-8,
            rel_tol: 1e-8,
            angles: 360,
            random_vectors: 100,
            seed: 0x6a09_e667_f3bc_c908,
            exact_cap: crate::isoperimetric::EXACT_CAP,
        }
    }
}

impl VerifyConfig {
    /// `abs_tol + rel_tol · max |v|` over the quantities in a chain.
    pub fn tolerance(&self, values: &[f64]) -> f64 {
        self.abs_tol + self.rel_tol * values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityCheck {
    pub label: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs − lhs`, or `−|lhs − rhs|` for equalities.
    pub margin: f64,
    /// The check passes iff `margin ≥ −tolerance`. Negative for strict checks.
    pub tolerance: f64,
    pub passed: bool,
}

impl InequalityCheck {
    fn build(label: &str, lhs: f64, rhs: f64, margin: f64, tolerance: f64) -> Self {
        Self { label: label.into(), lhs, rhs, margin, tolerance, passed: margin >= -tolerance }
    }

    /// `lhs ≤ rhs` up to `tolerance`.
    pub fn leq(label: &str, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        Self::build(label, lhs, rhs, rhs - lhs, tolerance)
    }

    /// `lhs < rhs` with at least [`STRICT_MARGIN`] to spare.
    pub fn lt(label: &str, lhs: f64, rhs: f64) -> Self {
        Self::build(label, lhs, rhs, rhs - lhs, -STRICT_MARGIN)
    }

    /// `lhs = rhs` up to `tolerance`.
    pub fn eq(label: &str, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        Self::build(label, lhs, rhs, -(lhs - rhs).abs(), tolerance)
    }

    fn slack(&self) -> f64 {
        self.margin + self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremReport {
    pub theorem_id: String,
    pub instance: String,
    pub omega: Option<Vec<VertexId>>,
    pub checks: Vec<InequalityCheck>,
    /// Margin of the tightest check (smallest `margin + tolerance`).
    pub margin: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub notes: Vec<String>,
}

impl TheoremReport {
    fn new(theorem_id: &str, g: &DirectedGraph, omega: Option<&VertexSubset>) -> Self {
        Self {
            theorem_id: theorem_id.into(),
            instance: format!("n={} edges={}", g.n(), g.edges().len()),
            omega: omega.map(|o| o.members().to_vec()),
            checks: Vec::new(),
            margin: 0.0,
            tolerance: 0.0,
            passed: true,
            notes: Vec::new(),
        }
    }

    fn finish(mut self) -> Self {
        let worst = self
            .checks
            .iter()
            .min_by(|a, b| a.slack().total_cmp(&b.slack()))
            .expect("every report has at least one check");
        self.margin = worst.margin;
        self.tolerance = worst.tolerance;
        self.passed = self.checks.iter().all(|c| c.passed);
        self
    }

    pub fn with_instance(mut self, instance: impl Into<String>) -> Self {
        self.instance = instance.into();
        self
    }
}

fn precondition(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}

/// Green's formula on random complex pairs: the worst ratio residual/scale
/// must not exceed [`GREEN_REL_TOL`].
pub fn verify_green(g: &DirectedGraph, cfg: &VerifyConfig) -> Result<TheoremReport> {
    g.require_kirchhoff()?;
    let mut rng = Rng::new(cfg.seed);
    let mut worst = 0.0f64;
    for _ in 0..cfg.random_vectors.max(1) {
        let f = rng.complex_vector(g.n());
        let h = rng.complex_vector(g.n());
        worst = worst.max(greens_residual(g, &f, &h)? / greens_scale(g, &f, &h));
    }
    let mut r = TheoremReport::new("green", g, None);
    r.checks.push(InequalityCheck::leq("max residual / scale", worst, GREEN_REL_TOL, 0.0));
    Ok(r.finish())
}

/// Normalized Laplacian: norm at most 2, numerical range inside the disc of
/// radius 1 around 1, and a simple zero eigenvalue on connected graphs.
pub fn verify_bounded(g: &DirectedGraph, cfg: &VerifyConfig) -> Result<TheoremReport> {
    g.require_kirchhoff()?;
    let op = assemble(g, OperatorKind::NormalizedDelta)?;
    let mut r = TheoremReport::new("bounded", g, None);
    let norm = operator_norm(&op)?;
    r.checks.push(InequalityCheck::leq("operator norm <= 2", norm, 2.0, cfg.tolerance(&[norm, 2.0])));
    let w = numerical_range_boundary(&op, cfg.angles)?;
    let dist = w.points.iter().map(|p| (p - Complex64::new(1.0, 0.0)).norm()).fold(0.0, f64::max);
    r.checks.push(InequalityCheck::leq(
        "max |w - 1| over numerical range samples <= 1",
        dist,
        1.0,
        cfg.tolerance(&[dist, 1.0]),
    ));
    if g.connectivity().connected {
        let k = kernel_dimension(&op, KERNEL_TOL)? as f64;
        r.checks.push(InequalityCheck::eq("kernel dimension = 1", k, 1.0, 0.0));
    } else {
        r.notes.push("graph is disconnected; kernel dimension check skipped".into());
    }
    Ok(r.finish())
}

/// Partial sums of the largest real parts of eigenvalues are dominated by
/// the partial sums of the largest eigenvalues of the Hermitian part, with
/// equality for the full sum.
pub fn verify_kyfan(a: &DMatrix<Complex64>, cfg: &VerifyConfig) -> Result<TheoremReport> {
    let n = a.nrows();
    if n == 0 || a.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, got: a.ncols() });
    }
    let re_lambda = eig(a)?.real_parts();
    let herm = (a + a.adjoint()) * Complex64::new(0.5, 0.0);
    let (mu, _) = hermitian_eigen(&herm)?;
    let mut r = TheoremReport {
        theorem_id: "kyfan".into(),
        instance: format!("{n}x{n} matrix"),
        omega: None,
        checks: Vec::new(),
        margin: 0.0,
        tolerance: 0.0,
        passed: true,
        notes: Vec::new(),
    };
    let (mut lhs, mut rhs) = (0.0, 0.0);
    for q in 1..=n {
        lhs += re_lambda[n - q];
        rhs += mu[n - q];
        let tol = cfg.tolerance(&[lhs, rhs]);
        r.checks.push(InequalityCheck::leq(&format!("top-{q} partial sum"), lhs, rhs, tol));
    }
    let tol = cfg.tolerance(&[lhs, rhs]);
    r.checks.push(InequalityCheck::eq("full sums agree", lhs, rhs, tol));
    Ok(r.finish())
}

/// Ky Fan check for a real operator matrix.
pub fn verify_kyfan_real(a: &DMatrix<f64>, cfg: &VerifyConfig) -> Result<TheoremReport> {
    verify_kyfan(&a.map(Complex64::from), cfg)
}

fn require_proper_with_boundary(g: &DirectedGraph, omega: &VertexSubset) -> Result<()> {
    g.check_subset(omega)?;
    if omega.is_empty() {
        return Err(Error::EmptySubset);
    }
    if omega.is_full() {
        return Err(precondition("omega must be a proper subset of V"));
    }
    if g.boundaries(omega)?.vertex_boundary.is_empty() {
        return Err(precondition("omega has an empty vertex boundary"));
    }
    Ok(())
}

/// Eigenvalue and real-part bounds for the Dirichlet normalized Laplacian on
/// a proper subset with non-empty vertex boundary.
pub fn verify_dirichlet_bounds(
    g: &DirectedGraph,
    omega: &VertexSubset,
    cfg: &VerifyConfig,
) -> Result<TheoremReport> {
    g.require_kirchhoff()?;
    require_proper_with_boundary(g, omega)?;
    let op = dirichlet(&assemble(g, OperatorKind::NormalizedDelta)?, omega)?;
    let spec = operator_spectrum(&op)?;
    let re1 = spec.eigenvalues[0].re;
    let ren = spec.eigenvalues[spec.len() - 1].re;
    let mu = symmetric_eigenvalues(&real_part(&op))?;
    let (mu1, mun) = (mu[0], mu[mu.len() - 1]);
    let mut r = TheoremReport::new("dirichlet_bounds", g, Some(omega));
    r.checks.push(InequalityCheck::lt("0 < Re l1", 0.0, re1));
    r.checks.push(InequalityCheck::leq("Re l1 <= 1", re1, 1.0, cfg.tolerance(&[re1, 1.0])));
    r.checks.push(InequalityCheck::leq(
        "mu1 + mun <= 2",
        mu1 + mun,
        2.0,
        cfg.tolerance(&[mu1, mun, 2.0]),
    ));
    r.checks.push(InequalityCheck::leq("mu1 <= Re l1", mu1, re1, cfg.tolerance(&[mu1, re1])));
    r.checks.push(InequalityCheck::lt("Re ln < 2", ren, 2.0));
    Ok(r.finish())
}

/// Two-sided Cheeger bounds for `ν` of the Dirichlet Laplacians, with exact
/// Cheeger constants.
pub fn verify_cheeger_sandwich(
    g: &DirectedGraph,
    omega: &VertexSubset,
    cfg: &VerifyConfig,
) -> Result<TheoremReport> {
    g.require_kirchhoff()?;
    let h = cheeger_exact_with_cap(g, omega, Normalization::ByMeasure, cfg.exact_cap)?.value;
    let ht = cheeger_exact_with_cap(g, omega, Normalization::ByBetaPlus, cfg.exact_cap)?.value;
    let (m, big_m) = ratio_bounds(g, omega)?;
    let nu_d = nu(&dirichlet(&assemble(g, OperatorKind::Delta)?, omega)?)?;
    let nu_n = nu(&dirichlet(&assemble(g, OperatorKind::NormalizedDelta)?, omega)?)?;

    let mut r = TheoremReport::new("cheeger_sandwich", g, Some(omega));
    let (a, b, c) = (h * h / 8.0, big_m * nu_d, 0.5 * big_m * h);
    let tol = cfg.tolerance(&[a, b, c]);
    r.checks.push(InequalityCheck::leq("h^2/8 <= M nu(D)", a, b, tol));
    r.checks.push(InequalityCheck::leq("M nu(D) <= M h/2", b, c, tol));
    let (a, b, c) = (ht * ht / 8.0, nu_n, 0.5 * ht);
    let tol = cfg.tolerance(&[a, b, c]);
    r.checks.push(InequalityCheck::leq("ht^2/8 <= nu(ND)", a, b, tol));
    r.checks.push(InequalityCheck::leq("nu(ND) <= ht/2", b, c, tol));
    let (a, b) = (m * ht * ht / 8.0, nu_d);
    r.checks.push(InequalityCheck::leq("m ht^2/8 <= nu(D)", a, b, cfg.tolerance(&[a, b])));
    Ok(r.finish())
}

/// Bounds on the real parts of the numerical range of the Dirichlet Laplacian
/// in terms of `h̃`, `m_Ω`, `M_Ω`; plus the pointwise comparison of the two
/// Rayleigh quotients on random vectors.
pub fn verify_fujiwara(
    g: &DirectedGraph,
    omega: &VertexSubset,
    cfg: &VerifyConfig,
) -> Result<TheoremReport> {
    g.require_kirchhoff()?;
    let ht = cheeger_exact_with_cap(g, omega, Normalization::ByBetaPlus, cfg.exact_cap)?.value;
    let (m, big_m) = ratio_bounds(g, omega)?;
    let delta = dirichlet(&assemble(g, OperatorKind::Delta)?, omega)?;
    let ndelta = dirichlet(&assemble(g, OperatorKind::NormalizedDelta)?, omega)?;
    let w = numerical_range_boundary(&delta, cfg.angles)?;
    let rho = w.points.iter().map(|p| p.re).fold(f64::INFINITY, f64::min);
    let sigma = w.points.iter().map(|p| p.re).fold(f64::NEG_INFINITY, f64::max);
    let root = (4.0 - ht * ht).max(0.0).sqrt();
    let lower = m * (2.0 - root);
    let upper = big_m * (2.0 + root);

    let mut r = TheoremReport::new("fujiwara", g, Some(omega));
    let tol = cfg.tolerance(&[lower, 2.0 * rho, 2.0 * sigma, upper]);
    r.checks.push(InequalityCheck::leq("m(2 - sqrt(4 - ht^2)) <= 2 min Re W", lower, 2.0 * rho, tol));
    r.checks.push(InequalityCheck::leq("2 min Re W <= 2 max Re W", 2.0 * rho, 2.0 * sigma, tol));
    r.checks.push(InequalityCheck::leq("2 max Re W <= M(2 + sqrt(4 - ht^2))", 2.0 * sigma, upper, tol));

    let mut rng = Rng::new(cfg.seed);
    let mut worst_lo: Option<InequalityCheck> = None;
    let mut worst_hi: Option<InequalityCheck> = None;
    for _ in 0..cfg.random_vectors {
        let f = rng.complex_vector(omega.len());
        let two_re = 2.0 * delta.rayleigh(&f)?.re;
        let ratio = 2.0 * ndelta.rayleigh(&f)?.re;
        let tol = cfg.tolerance(&[m * ratio, two_re, big_m * ratio]);
        let lo = InequalityCheck::leq("m r(g) <= 2 Re l(g)", m * ratio, two_re, tol);
        let hi = InequalityCheck::leq("2 Re l(g) <= M r(g)", two_re, big_m * ratio, tol);
        if worst_lo.as_ref().map_or(true, |w| lo.slack() < w.slack()) {
            worst_lo = Some(lo);
        }
        if worst_hi.as_ref().map_or(true, |w| hi.slack() < w.slack()) {
            worst_hi = Some(hi);
        }
    }
    r.checks.extend(worst_lo);
    r.checks.extend(worst_hi);
    Ok(r.finish())
}

/// Along a filtration: `ν(Δ^D)` of the complements is nondecreasing, and each
/// level satisfies `m · h̃² / 8 ≤ ν(Δ^D)` wherever `h̃` is exact.
pub fn verify_ess_bound_consistency(
    g: &DirectedGraph,
    filt: &Filtration,
    cfg: &VerifyConfig,
) -> Result<TheoremReport> {
    g.require_kirchhoff()?;
    let profile = infinity_profile(g, filt, cfg.exact_cap)?;
    let mut r = TheoremReport::new("ess_bound", g, None);
    for pair in profile.levels.windows(2) {
        let (a, b) = (pair[0].nu_dirichlet, pair[1].nu_dirichlet);
        r.checks.push(InequalityCheck::leq(
            &format!("nu level {} <= nu level {}", pair[0].level, pair[1].level),
            a,
            b,
            cfg.tolerance(&[a, b]),
        ));
    }
    for l in &profile.levels {
        if l.h_tilde_mode == CheegerMode::Exact {
            r.checks.push(InequalityCheck::leq(
                &format!("level {}: m ht^2/8 <= nu", l.level),
                l.ess_lower_bound,
                l.nu_dirichlet,
                cfg.tolerance(&[l.ess_lower_bound, l.nu_dirichlet]),
            ));
        } else {
            r.notes.push(format!(
                "level {}: complement of {} vertices exceeds the exact cap; bound not checked",
                l.level, l.complement_size
            ));
        }
    }
    if r.checks.is_empty() {
        return Err(Error::EmptyComplement);
    }
    Ok(r.finish())
}

/// Subsets checked by default on a graph: every singleton and the complement
/// of every breadth-first level from vertex 0, keeping proper subsets with a
/// non-empty vertex boundary and at most `cap` vertices.
pub fn default_omegas(g: &DirectedGraph, cap: usize) -> Vec<VertexSubset> {
    let mut out: Vec<VertexSubset> =
        (0..g.n()).map(|x| VertexSubset::new(g.n(), [x]).expect("in range")).collect();
    if let Ok(f) = build_filtration(g, 0) {
        out.extend(f.levels().iter().map(VertexSubset::complement));
    }
    out.retain(|o| {
        !o.is_empty() && o.len() <= cap && require_proper_with_boundary(g, o).is_ok()
    });
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.members().cmp(b.members())));
    out.dedup();
    out
}

/// Every check on one graph, in a fixed order.
pub fn verify_graph(name: &str, g: &DirectedGraph, cfg: &VerifyConfig) -> Result<Vec<TheoremReport>> {
    let mut reports = vec![verify_green(g, cfg)?, verify_bounded(g, cfg)?];
    let nd = assemble(g, OperatorKind::NormalizedDelta)?;
    reports.push(verify_kyfan_real(&to_euclidean(&nd), cfg)?);
    for omega in default_omegas(g, cfg.exact_cap) {
        reports.push(verify_dirichlet_bounds(g, &omega, cfg)?);
        reports.push(verify_cheeger_sandwich(g, &omega, cfg)?);
        reports.push(verify_fujiwara(g, &omega, cfg)?);
    }
    if let Ok(f) = build_filtration(g, 0) {
        match verify_ess_bound_consistency(g, &f, cfg) {
            Ok(rep) => reports.push(rep),
            Err(Error::EmptyComplement) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(reports.into_iter().map(|r| r.with_instance(name)).collect())
}

/// [`verify_graph`] over the generator corpus. The order of reports is fixed.
pub fn verify_corpus(cfg: &VerifyConfig) -> Result<Vec<TheoremReport>> {
    let per_graph = corpus()
        .par_iter()
        .map(|e| verify_graph(&e.name, &e.spec.generate()?, cfg))
        .collect::<Result<Vec<_>>>()?;
    Ok(per_graph.into_iter().flatten().collect())
}
