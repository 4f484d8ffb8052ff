//! Graph JSON, operator CSV/JSON, and the CSV tables emitted by the CLI.
//!
//! Numbers are written in shortest round-trip form.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, Edge, VertexId, VertexSubset};
use crate::isoperimetric::InfinityProfile;
use crate::operators::{Operator, OperatorKind};
use crate::spectral::{NumericalRangeBoundary, Spectrum};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VertexRecord {
    id: VertexId,
    m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeRecord {
    from: VertexId,
    to: VertexId,
    b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphFile {
    vertices: Vec<VertexRecord>,
    edges: Vec<EdgeRecord>,
}

/// Shortest round-trip decimal, switching to exponent form outside
/// `[1e-5, 1e16)`.
pub fn fmt_f64(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-5..1e16).contains(&a) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn parse_err(e: serde_json::Error) -> Error {
    Error::Parse(e.to_string())
}

/// Parses the canonical graph JSON. Vertex ids must be exactly `0..n`, in
/// any order.
pub fn parse_graph_json(text: &str) -> Result<DirectedGraph> {
    let file: GraphFile = serde_json::from_str(text).map_err(parse_err)?;
    let n = file.vertices.len();
    let mut measure = vec![None; n];
    for v in &file.vertices {
        if v.id >= n {
            return Err(Error::Schema(format!("vertex id {} outside 0..{}", v.id, n)));
        }
        if measure[v.id].replace(v.m).is_some() {
            return Err(Error::Schema(format!("vertex id {} listed twice", v.id)));
        }
    }
    let measure = measure.into_iter().map(|m| m.expect("ids form a permutation")).collect();
    let edges = file.edges.iter().map(|e| Edge::new(e.from, e.to, e.b)).collect();
    DirectedGraph::new(measure, edges)
}

pub fn graph_to_json(g: &DirectedGraph) -> String {
    let file = GraphFile {
        vertices: g.measure().iter().enumerate().map(|(id, &m)| VertexRecord { id, m }).collect(),
        edges: g.edges().iter().map(|e| EdgeRecord { from: e.from, to: e.to, b: e.weight }).collect(),
    };
    let mut s = serde_json::to_string_pretty(&file).expect("graph serializes");
    s.push('\n');
    s
}

/// A JSON array of vertex ids, e.g. `[0, 1]`.
pub fn parse_subset_json(text: &str, universe: usize) -> Result<VertexSubset> {
    let ids: Vec<VertexId> = serde_json::from_str(text).map_err(parse_err)?;
    VertexSubset::new(universe, ids)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OperatorFile {
    kind: String,
    universe: usize,
    vertices: Vec<VertexId>,
    metric: Vec<f64>,
    matrix: Vec<Vec<f64>>,
}

fn build_operator(
    kind: &str,
    universe: usize,
    vertices: Vec<VertexId>,
    metric: Vec<f64>,
    rows: Vec<Vec<f64>>,
) -> Result<Operator> {
    let kind: OperatorKind = kind.parse()?;
    let n = rows.len();
    if let Some(bad) = rows.iter().find(|r| r.len() != n) {
        return Err(Error::DimensionMismatch { expected: n, got: bad.len() });
    }
    let matrix = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    Operator::new(matrix, metric, kind, vertices, universe)
}

pub fn operator_to_json(op: &Operator) -> String {
    let file = OperatorFile {
        kind: op.kind().to_string(),
        universe: op.universe(),
        vertices: op.vertices().to_vec(),
        metric: op.metric().to_vec(),
        matrix: op.matrix().row_iter().map(|r| r.iter().copied().collect()).collect(),
    };
    let mut s = serde_json::to_string_pretty(&file).expect("operator serializes");
    s.push('\n');
    s
}

pub fn parse_operator_json(text: &str) -> Result<Operator> {
    let f: OperatorFile = serde_json::from_str(text).map_err(parse_err)?;
    build_operator(&f.kind, f.universe, f.vertices, f.metric, f.matrix)
}

fn join<T>(xs: impl IntoIterator<Item = T>, f: impl Fn(T) -> String) -> String {
    xs.into_iter().map(f).collect::<Vec<_>>().join(",")
}

/// Dense operator CSV: four header lines (`kind`, `universe`, `vertices`,
/// `metric`) followed by the matrix rows.
pub fn operator_to_csv(op: &Operator) -> String {
    let mut s = String::new();
    writeln!(s, "kind,{}", op.kind()).unwrap();
    writeln!(s, "universe,{}", op.universe()).unwrap();
    writeln!(s, "vertices,{}", join(op.vertices(), |v| v.to_string())).unwrap();
    writeln!(s, "metric,{}", join(op.metric(), |&w| fmt_f64(w))).unwrap();
    for row in op.matrix().row_iter() {
        writeln!(s, "{}", join(row.iter(), |&x| fmt_f64(x))).unwrap();
    }
    s
}

pub fn parse_operator_csv(text: &str) -> Result<Operator> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let mut header = |key: &str| -> Result<Vec<String>> {
        let line = lines.next().ok_or_else(|| Error::Schema(format!("missing `{key}` line")))?;
        let mut fields = line.split(',').map(|f| f.trim().to_string());
        match fields.next() {
            Some(k) if k == key => Ok(fields.collect()),
            _ => Err(Error::Schema(format!("expected `{key}` line, got `{line}`"))),
        }
    };
    let num = |s: &str| -> Result<f64> {
        s.parse().map_err(|_| Error::Parse(format!("not a number: `{s}`")))
    };
    let int = |s: &str| -> Result<usize> {
        s.parse().map_err(|_| Error::Parse(format!("not an index: `{s}`")))
    };
    let kind = header("kind")?;
    if kind.len() != 1 {
        return Err(Error::Schema("`kind` takes exactly one value".into()));
    }
    let universe = header("universe")?;
    if universe.len() != 1 {
        return Err(Error::Schema("`universe` takes exactly one value".into()));
    }
    let universe = int(&universe[0])?;
    let vertices = header("vertices")?.iter().map(|s| int(s)).collect::<Result<Vec<_>>>()?;
    let metric = header("metric")?.iter().map(|s| num(s)).collect::<Result<Vec<_>>>()?;
    let rows = lines
        .map(|l| l.split(',').map(|s| num(s.trim())).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    build_operator(&kind[0], universe, vertices, metric, rows)
}

/// `theta,re,im`, one row per sample.
pub fn numrange_to_csv(w: &NumericalRangeBoundary) -> String {
    let mut s = String::from("theta,re,im\n");
    for (t, p) in w.angles.iter().zip(&w.points) {
        writeln!(s, "{},{},{}", fmt_f64(*t), fmt_f64(p.re), fmt_f64(p.im)).unwrap();
    }
    s
}

/// `re,im`, one row per eigenvalue in the spectrum's order.
pub fn spectrum_to_csv(sp: &Spectrum) -> String {
    let mut s = String::from("re,im\n");
    for z in &sp.eigenvalues {
        writeln!(s, "{},{}", fmt_f64(z.re), fmt_f64(z.im)).unwrap();
    }
    s
}

/// `level,m_c,M_c,h_c,h_tilde_c,nu_dirichlet,ess_lower_bound`.
pub fn infinity_to_csv(p: &InfinityProfile) -> String {
    let mut s = String::from("level,m_c,M_c,h_c,h_tilde_c,nu_dirichlet,ess_lower_bound\n");
    for l in &p.levels {
        writeln!(
            s,
            "{},{},{},{},{},{},{}",
            l.level,
            fmt_f64(l.m_c),
            fmt_f64(l.big_m_c),
            fmt_f64(l.h_c),
            fmt_f64(l.h_tilde_c),
            fmt_f64(l.nu_dirichlet),
            fmt_f64(l.ess_lower_bound)
        )
        .unwrap();
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::opposing_cycles;
    use crate::operators::{assemble, dirichlet};

    #[test]
    fn graph_round_trip() {
        let g = opposing_cycles();
        let text = graph_to_json(&g);
        assert_eq!(parse_graph_json(&text).unwrap(), g);
    }

    #[test]
    fn graph_schema_errors() {
        let dup = r#"{"vertices":[{"id":0,"m":1},{"id":0,"m":1}],"edges":[]}"#;
        assert!(matches!(parse_graph_json(dup), Err(Error::Schema(_))));
        let gap = r#"{"vertices":[{"id":0,"m":1},{"id":2,"m":1}],"edges":[]}"#;
        assert!(matches!(parse_graph_json(gap), Err(Error::Schema(_))));
        let extra = r#"{"vertices":[],"edges":[],"x":1}"#;
        assert!(matches!(parse_graph_json(extra), Err(Error::Parse(_))));
        assert!(matches!(parse_graph_json("{"), Err(Error::Parse(_))));
        let shuffled = r#"{"vertices":[{"id":1,"m":2},{"id":0,"m":1}],
            "edges":[{"from":0,"to":1,"b":1},{"from":1,"to":0,"b":1}]}"#;
        assert_eq!(parse_graph_json(shuffled).unwrap().measure(), &[1.0, 2.0]);
        let self_loop = r#"{"vertices":[{"id":0,"m":1}],"edges":[{"from":0,"to":0,"b":1}]}"#;
        assert_eq!(parse_graph_json(self_loop).unwrap_err(), Error::SelfLoop(0));
    }

    #[test]
    fn operator_round_trips() {
        let g = opposing_cycles();
        let op = dirichlet(
            &assemble(&g, OperatorKind::NormalizedDelta).unwrap(),
            &VertexSubset::new(3, [0, 2]).unwrap(),
        )
        .unwrap();
        assert_eq!(parse_operator_csv(&operator_to_csv(&op)).unwrap(), op);
        assert_eq!(parse_operator_json(&operator_to_json(&op)).unwrap(), op);
        let full = assemble(&g, OperatorKind::H).unwrap();
        assert_eq!(parse_operator_csv(&operator_to_csv(&full)).unwrap(), full);
    }

    #[test]
    fn operator_csv_errors() {
        assert!(matches!(parse_operator_csv(""), Err(Error::Schema(_))));
        let ragged = "kind,Delta\nuniverse,2\nvertices,0,1\nmetric,1,1\n1,2\n3\n";
        assert!(matches!(parse_operator_csv(ragged), Err(Error::DimensionMismatch { .. })));
        let bad = "kind,Delta\nuniverse,1\nvertices,0\nmetric,1\nx\n";
        assert!(matches!(parse_operator_csv(bad), Err(Error::Parse(_))));
    }

    #[test]
    fn number_format() {
        assert_eq!(fmt_f64(1.0), "1");
        assert_eq!(fmt_f64(0.1), "0.1");
        assert_eq!(fmt_f64(-2.5), "-2.5");
        assert_eq!(fmt_f64(1e-20), "1e-20");
        assert_eq!(fmt_f64(0.1 + 0.2).parse::<f64>().unwrap(), 0.1 + 0.2);
    }

    #[test]
    fn subset_parsing() {
        assert_eq!(parse_subset_json("[2, 0]", 3).unwrap().members(), &[0, 2]);
        assert!(parse_subset_json("[3]", 3).is_err());
        assert!(parse_subset_json("0,1", 3).is_err());
    }
}
