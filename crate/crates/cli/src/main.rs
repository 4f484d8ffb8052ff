//! `dirlap` command-line front end.
//!
//! Exit codes: 0 success, 1 a check failed (failed report, or Kirchhoff
//! condition violated for `check`), 2 invalid input or usage.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use dirlap::generators::{
    gen_cycle, gen_layered_heavy, gen_random_circulation, gen_symmetric_tree,
    layer_filtration, opposing_cycles, DEFAULT_WEIGHT_RANGE,
};
use dirlap::io::{
    graph_to_json, infinity_to_csv, numrange_to_csv, operator_to_csv, operator_to_json,
    parse_graph_json, parse_operator_csv, parse_operator_json, parse_subset_json,
    spectrum_to_csv,
};
use dirlap::isoperimetric::{
    build_filtration, cheeger_exact_with_cap, cheeger_heuristic, infinity_profile, Normalization,
    EXACT_CAP,
};
use dirlap::operators::{assemble, dirichlet};
use dirlap::spectral::{numerical_range_boundary, operator_spectrum};
use dirlap::verify::{
    verify_bounded, verify_cheeger_sandwich, verify_corpus, verify_dirichlet_bounds,
    verify_fujiwara, verify_graph, verify_green, verify_kyfan_real, TheoremReport, VerifyConfig,
};
use dirlap::{DirectedGraph, Operator, OperatorKind, VertexSubset};

#[derive(Parser)]
#[command(name = "dirlap", version, about = "Laplacians on directed weighted graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a graph from a family.
    Gen(GenArgs),
    /// Report whether out-weights equal in-weights at every vertex.
    Check(CheckArgs),
    /// Eigenvalues of an operator.
    Spectrum(SpectrumArgs),
    /// Boundary samples of the numerical range of an operator.
    Numrange(NumrangeArgs),
    /// Cheeger constant of a vertex subset.
    Cheeger(CheegerArgs),
    /// Run the inequality checks on a graph or on the built-in corpus.
    Verify(VerifyArgs),
    /// Per-level profile of the complements along a filtration.
    Infinity(InfinityArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Cycle,
    Opposing,
    Random,
    Layered,
    Tree,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    family: Family,
    /// Vertex count (cycle, random).
    #[arg(long, default_value_t = 3)]
    n: usize,
    /// Edge weight (cycle).
    #[arg(long, default_value_t = 1.0)]
    weight: f64,
    /// Number of superposed cycles (random).
    #[arg(long, default_value_t = 2)]
    cycles: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_WEIGHT_RANGE.0)]
    weight_min: f64,
    #[arg(long, default_value_t = DEFAULT_WEIGHT_RANGE.1)]
    weight_max: f64,
    /// Number of layers (layered).
    #[arg(long = "L", default_value_t = 6)]
    layers: usize,
    /// Vertices per layer (layered).
    #[arg(long, default_value_t = 4)]
    width: usize,
    /// Per-layer weight growth (layered).
    #[arg(long, default_value_t = 2.0)]
    gamma: f64,
    /// Radial weight factor (layered).
    #[arg(long, default_value_t = 1.0)]
    radial: f64,
    /// Tree depth (tree).
    #[arg(long, default_value_t = 2)]
    depth: usize,
    /// Children per vertex (tree).
    #[arg(long, default_value_t = 2)]
    branching: usize,
    /// Weight growth per depth (tree).
    #[arg(long, default_value_t = 1.0)]
    growth: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    graph: PathBuf,
    /// Absolute tolerance; defaults to 1e-9 times the largest out-weight.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum OpName {
    Delta,
    DeltaPrime,
    H,
    Normalized,
    NormalizedPrime,
    NormalizedH,
}

impl From<OpName> for OperatorKind {
    fn from(o: OpName) -> Self {
        match o {
            OpName::Delta => OperatorKind::Delta,
            OpName::DeltaPrime => OperatorKind::DeltaPrime,
            OpName::H => OperatorKind::H,
            OpName::Normalized => OperatorKind::NormalizedDelta,
            OpName::NormalizedPrime => OperatorKind::NormalizedDeltaPrime,
            OpName::NormalizedH => OperatorKind::NormalizedH,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct OmegaArgs {
    /// Vertex subset as a JSON array, e.g. '[0,1]'.
    #[arg(long, conflicts_with = "omega_file")]
    omega: Option<String>,
    /// File holding the vertex subset as a JSON array.
    #[arg(long)]
    omega_file: Option<PathBuf>,
}

impl OmegaArgs {
    fn get(&self, n: usize) -> Result<Option<VertexSubset>, CliError> {
        let text = match (&self.omega, &self.omega_file) {
            (Some(s), _) => s.clone(),
            (None, Some(p)) => read(p)?,
            (None, None) => return Ok(None),
        };
        Ok(Some(parse_subset_json(&text, n)?))
    }
}

#[derive(Args)]
struct OperatorSource {
    /// Graph JSON file.
    #[arg(required_unless_present = "operator", conflicts_with = "operator")]
    graph: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "delta")]
    op: OpName,
    #[command(flatten)]
    omega: OmegaArgs,
    /// Read an exported operator (CSV or JSON by extension) instead of a graph.
    #[arg(long)]
    operator: Option<PathBuf>,
    /// Also write the operator to this path (CSV or JSON by extension).
    #[arg(long)]
    export_operator: Option<PathBuf>,
}

impl OperatorSource {
    fn load(&self) -> Result<Operator, CliError> {
        let op = match (&self.operator, &self.graph) {
            (Some(p), _) => {
                let text = read(p)?;
                if is_json(p) {
                    parse_operator_json(&text)?
                } else {
                    parse_operator_csv(&text)?
                }
            }
            (None, Some(p)) => {
                let g = load_graph(p)?;
                let op = assemble(&g, self.op.into())?;
                match self.omega.get(g.n())? {
                    Some(omega) => dirichlet(&op, &omega)?,
                    None => op,
                }
            }
            (None, None) => unreachable!("clap requires a source"),
        };
        if let Some(p) = &self.export_operator {
            let text = if is_json(p) { operator_to_json(&op) } else { operator_to_csv(&op) };
            write_atomic(p, &text)?;
        }
        Ok(op)
    }
}

#[derive(Args)]
struct SpectrumArgs {
    #[command(flatten)]
    source: OperatorSource,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct NumrangeArgs {
    #[command(flatten)]
    source: OperatorSource,
    #[arg(long, default_value_t = 360)]
    angles: usize,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum NormArg {
    Measure,
    BetaPlus,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    /// Exact when the subset is within the cap, heuristic otherwise.
    Auto,
    Exact,
    Heuristic,
}

#[derive(Args)]
struct CheegerArgs {
    graph: PathBuf,
    #[command(flatten)]
    omega: OmegaArgs,
    #[arg(long, value_enum, default_value = "measure")]
    normalization: NormArg,
    #[arg(long, value_enum, default_value = "auto")]
    mode: ModeArg,
    /// Largest subset size enumerated exactly.
    #[arg(long, default_value_t = EXACT_CAP)]
    cap: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Corpus,
}

#[derive(Args)]
struct VerifyArgs {
    /// Graph JSON file.
    #[arg(required_unless_present = "family", conflicts_with = "family")]
    graph: Option<PathBuf>,
    /// Run the built-in generator corpus.
    #[arg(long, value_enum)]
    family: Option<FamilyArg>,
    #[command(flatten)]
    omega: OmegaArgs,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 360)]
    angles: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct InfinityArgs {
    graph: PathBuf,
    /// Root of the breadth-first filtration.
    #[arg(long, default_value_t = 0, conflicts_with = "layer_width")]
    root: usize,
    /// Use the layer filtration of a layered graph with this many vertices per layer.
    #[arg(long)]
    layer_width: Option<usize>,
    /// Largest complement whose Cheeger constants are computed exactly.
    #[arg(long, default_value_t = EXACT_CAP)]
    exact_cap: usize,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum CliError {
    Input(String),
    Io(String),
}

impl From<dirlap::Error> for CliError {
    fn from(e: dirlap::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

fn read(p: &Path) -> Result<String, CliError> {
    fs::read_to_string(p).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))
}

fn is_json(p: &Path) -> bool {
    p.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

fn load_graph(p: &Path) -> Result<DirectedGraph, CliError> {
    parse_graph_json(&read(p)?).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))
}

/// Writes through a temporary file in the target directory, then renames.
fn write_atomic(path: &Path, text: &str) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(text.as_bytes()).map_err(io)?;
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        tmp.as_file().set_permissions(fs::Permissions::from_mode(0o644)).map_err(io)?;
    }
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => write_atomic(p, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(|e| CliError::Io(e.to_string()))
        }
    }
}

fn pretty(v: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn run_gen(a: &GenArgs) -> Result<bool, CliError> {
    let g = match a.family {
        Family::Cycle => gen_cycle(a.n, a.weight)?,
        Family::Opposing => opposing_cycles(),
        Family::Random => gen_random_circulation(a.n, a.cycles, a.seed, (a.weight_min, a.weight_max))?,
        Family::Layered => gen_layered_heavy(a.layers, a.width, a.gamma, a.radial)?,
        Family::Tree => gen_symmetric_tree(a.depth, a.branching, a.growth)?,
    };
    emit(&a.out, &graph_to_json(&g))?;
    Ok(true)
}

fn run_check(a: &CheckArgs) -> Result<bool, CliError> {
    let g = load_graph(&a.graph)?;
    let report = g.check_kirchhoff(a.tol.unwrap_or_else(|| g.kirchhoff_tolerance()));
    emit(&a.out, &pretty(&report))?;
    Ok(report.satisfied)
}

fn run_spectrum(a: &SpectrumArgs) -> Result<bool, CliError> {
    let op = a.source.load()?;
    let sp = operator_spectrum(&op)?;
    let text = match a.format {
        Format::Csv => spectrum_to_csv(&sp),
        Format::Json => pretty(&json!({
            "kind": op.kind().to_string(),
            "vertices": op.vertices(),
            "eigenvalues": sp.eigenvalues.iter().map(|z| json!({"re": z.re, "im": z.im})).collect::<Vec<_>>(),
        })),
    };
    emit(&a.out, &text)?;
    Ok(true)
}

fn run_numrange(a: &NumrangeArgs) -> Result<bool, CliError> {
    let op = a.source.load()?;
    let w = numerical_range_boundary(&op, a.angles)?;
    let text = match a.format {
        Format::Csv => numrange_to_csv(&w),
        Format::Json => pretty(&json!({
            "kind": op.kind().to_string(),
            "nu": w.nu,
            "samples": w.angles.iter().zip(&w.points)
                .map(|(t, p)| json!({"theta": t, "re": p.re, "im": p.im}))
                .collect::<Vec<_>>(),
        })),
    };
    emit(&a.out, &text)?;
    Ok(true)
}

fn run_cheeger(a: &CheegerArgs) -> Result<bool, CliError> {
    let g = load_graph(&a.graph)?;
    let omega = a.omega.get(g.n())?.unwrap_or_else(|| VertexSubset::full(g.n()));
    let norm = match a.normalization {
        NormArg::Measure => Normalization::ByMeasure,
        NormArg::BetaPlus => Normalization::ByBetaPlus,
    };
    let use_exact = match a.mode {
        ModeArg::Exact => true,
        ModeArg::Heuristic => false,
        ModeArg::Auto => omega.len() <= a.cap,
    };
    let r = if use_exact {
        cheeger_exact_with_cap(&g, &omega, norm, a.cap)?
    } else {
        cheeger_heuristic(&g, &omega, norm)?
    };
    emit(&a.out, &pretty(&r))?;
    Ok(true)
}

fn reports_json(reports: &[TheoremReport]) -> String {
    pretty(&reports)
}

fn run_verify(a: &VerifyArgs) -> Result<bool, CliError> {
    let mut cfg = VerifyConfig { angles: a.angles, ..VerifyConfig::default() };
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    let reports = match (&a.family, &a.graph) {
        (Some(FamilyArg::Corpus), _) => {
            if a.omega.omega.is_some() || a.omega.omega_file.is_some() {
                return Err(CliError::Input("--omega cannot be combined with --family".into()));
            }
            verify_corpus(&cfg)?
        }
        (None, Some(p)) => {
            let g = load_graph(p)?;
            let name = p.display().to_string();
            match a.omega.get(g.n())? {
                None => verify_graph(&name, &g, &cfg)?,
                Some(omega) => {
                    let nd = assemble(&g, OperatorKind::NormalizedDelta)?;
                    let nd = dirlap::operators::to_euclidean(&nd);
                    [
                        verify_green(&g, &cfg)?,
                        verify_bounded(&g, &cfg)?,
                        verify_kyfan_real(&nd, &cfg)?,
                        verify_dirichlet_bounds(&g, &omega, &cfg)?,
                        verify_cheeger_sandwich(&g, &omega, &cfg)?,
                        verify_fujiwara(&g, &omega, &cfg)?,
                    ]
                    .into_iter()
                    .map(|r| r.with_instance(name.clone()))
                    .collect()
                }
            }
        }
        (None, None) => unreachable!("clap requires a graph or a family"),
    };
    emit(&a.out, &reports_json(&reports))?;
    Ok(reports.iter().all(|r| r.passed))
}

fn run_infinity(a: &InfinityArgs) -> Result<bool, CliError> {
    let g = load_graph(&a.graph)?;
    let filt = match a.layer_width {
        Some(w) => layer_filtration(&g, w)?,
        None => build_filtration(&g, a.root)?,
    };
    let p = infinity_profile(&g, &filt, a.exact_cap)?;
    let text = match a.format {
        Format::Csv => infinity_to_csv(&p),
        Format::Json => {
            let mut v: Value = serde_json::to_value(&p).expect("serializable");
            v["levels_of_filtration"] = json!(filt.levels());
            pretty(&v)
        }
    };
    emit(&a.out, &text)?;
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Gen(a) => run_gen(a),
        Command::Check(a) => run_check(a),
        Command::Spectrum(a) => run_spectrum(a),
        Command::Numrange(a) => run_numrange(a),
        Command::Cheeger(a) => run_cheeger(a),
        Command::Verify(a) => run_verify(a),
        Command::Infinity(a) => run_infinity(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(CliError::Input(msg)) | Err(CliError::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
