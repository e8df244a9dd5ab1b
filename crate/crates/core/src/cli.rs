//! Command-line harness: graph generation, script replay, brute-force
//! verification and benchmarks.
//!
//! Every random choice (prime, encodings, hitting sets, retries) is drawn
//! from a single ChaCha8 stream seeded by `--seed`, so a run is reproducible
//! from its command line.
//!
//! Script files hold one command per line, with 1-based vertices:
//!
//! ```text
//! # comment
//! E+ u v                      insert edge
//! E- u v                      delete edge
//! F u1 v1 u2 v2 v7            failure batch: edge pairs, `vK` fails vertex K
//! VX v | out: a b | in: c     replace all edges at v
//! Q s t                       query
//! ```
//!
//! Queries print as `Q s t -> d` or `Q s t -> INF`.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Error;
use crate::field::{sample_prime, PrimeField};
use crate::frobenius::{compute_fnf, naive_iterates, PowerOracle};
use crate::graphenc::{Digraph, Distance, EdgeOp};
use crate::matrix::Matrix;
use crate::oracles::{
    bfs_oracle, dijkstra_oracle, DsoFrontEnd, DynamicEdgeOracle, Failure, MultiFailureDso, VertexUpdateOracle,
};
use crate::updates::{perturbed_iterates, PerturbationContext};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Lib(#[from] Error),
    #[error("command {index} (line {line}): {source}")]
    Command { index: usize, line: usize, source: Error },
    #[error("invalid configuration: {0}")]
    Config(String),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn out_err(source: std::io::Error) -> CliError {
    CliError::Io {
        path: "<output>".into(),
        source,
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "fnf-oracles",
    version,
    about = "Algebraic distance oracles over prime fields"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a random digraph as an edge list.
    Gen(GenConfig),
    /// Replay a script through an oracle.
    Run(RunConfig),
    /// Replay a script and compare every answer with BFS/Dijkstra.
    Verify(RunConfig),
    /// Time the fast kernels against naive baselines and write CSV.
    Bench(BenchConfig),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OracleKind {
    Dso,
    DynEdge,
    Vx,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Debug, Args)]
pub struct GenConfig {
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub n: usize,
    /// Probability of each ordered pair being an edge.
    #[arg(long, default_value_t = 0.1)]
    pub density: f64,
    /// Weights are drawn from `1..=W`; `W = 1` writes an unweighted graph.
    #[arg(long = "max-weight", default_value_t = 1)]
    pub max_weight: u32,
    /// Output path (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, Args)]
pub struct RunConfig {
    #[arg(long)]
    pub seed: u64,
    #[arg(long, value_enum)]
    pub oracle: OracleKind,
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub script: PathBuf,
    /// Field size exponent: `p` is drawn from `[L, 2L]`, `L = n^(4+c)`.
    #[arg(long, default_value_t = 1)]
    pub c: u32,
    #[arg(long, default_value_t = crate::oracles::DEFAULT_GAMMA)]
    pub gamma: f64,
    #[arg(long, default_value_t = crate::oracles::DEFAULT_ALPHA)]
    pub alpha: f64,
    /// In `verify`, the report goes to stdout for text and to stderr
    /// otherwise.
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,
    /// Fixed modulus, for provoking failures with a tiny field.
    #[arg(long, hide = true)]
    pub prime: Option<u64>,
}

#[derive(Clone, Debug, Args)]
pub struct BenchConfig {
    #[arg(long)]
    pub seed: u64,
    /// Comma-separated sizes.
    #[arg(long, value_delimiter = ',', default_values_t = [64usize, 128, 256])]
    pub sizes: Vec<usize>,
    #[arg(long, value_delimiter = ',', value_enum, default_values_t = BenchOp::ALL)]
    pub ops: Vec<BenchOp>,
    /// Failures per DSO update.
    #[arg(long, default_value_t = 4)]
    pub f: usize,
    #[arg(long, default_value_t = 1)]
    pub c: u32,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// A timed kernel. Each fast kernel is paired with its baseline; a pair
/// shares one random instance per size.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, ValueEnum)]
pub enum BenchOp {
    Submatrix,
    SubmatrixNaive,
    Perturbed,
    PerturbedNaive,
    DsoUpdate,
    DsoRebuild,
}

impl BenchOp {
    pub const ALL: [BenchOp; 6] = [
        BenchOp::Submatrix,
        BenchOp::SubmatrixNaive,
        BenchOp::Perturbed,
        BenchOp::PerturbedNaive,
        BenchOp::DsoUpdate,
        BenchOp::DsoRebuild,
    ];

    /// Position within the pair measured together.
    fn slot(self) -> usize {
        match self {
            BenchOp::Submatrix | BenchOp::Perturbed | BenchOp::DsoUpdate => 0,
            _ => 1,
        }
    }

    fn family(self) -> BenchOp {
        match self {
            BenchOp::SubmatrixNaive => BenchOp::Submatrix,
            BenchOp::PerturbedNaive => BenchOp::Perturbed,
            BenchOp::DsoRebuild => BenchOp::DsoUpdate,
            op => op,
        }
    }
}

/// A parsed script command, 0-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScriptCommand {
    Insert(usize, usize),
    Delete(usize, usize),
    Fail(Vec<Failure>),
    VertexUpdate { v: usize, out: Vec<usize>, inc: Vec<usize> },
    Query(usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScriptLine {
    pub line: usize,
    pub command: ScriptCommand,
}

fn parse_vertex(line: usize, tok: &str) -> Result<usize, Error> {
    match tok.parse::<usize>() {
        Ok(v) if v >= 1 => Ok(v - 1),
        _ => Err(Error::Parse {
            line,
            message: format!("expected a vertex number >= 1, got `{tok}`"),
        }),
    }
}

fn parse_vertices(line: usize, toks: &[&str]) -> Result<Vec<usize>, Error> {
    toks.iter().map(|t| parse_vertex(line, t)).collect()
}

fn parse_pair(line: usize, toks: &[&str]) -> Result<(usize, usize), Error> {
    match toks {
        [a, b] => Ok((parse_vertex(line, a)?, parse_vertex(line, b)?)),
        _ => Err(Error::Parse {
            line,
            message: "expected two vertices".into(),
        }),
    }
}

fn parse_labelled(line: usize, part: &str, label: &str) -> Result<Vec<usize>, Error> {
    let rest = part.trim().strip_prefix(label).ok_or_else(|| Error::Parse {
        line,
        message: format!("expected `{label}`"),
    })?;
    parse_vertices(line, &rest.split_whitespace().collect::<Vec<_>>())
}

pub fn parse_script(text: &str) -> Result<Vec<ScriptLine>, Error> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = body.split_whitespace().collect();
        let command = match toks[0] {
            "E+" => {
                let (u, v) = parse_pair(line, &toks[1..])?;
                ScriptCommand::Insert(u, v)
            }
            "E-" => {
                let (u, v) = parse_pair(line, &toks[1..])?;
                ScriptCommand::Delete(u, v)
            }
            "Q" => {
                let (s, t) = parse_pair(line, &toks[1..])?;
                ScriptCommand::Query(s, t)
            }
            "F" => {
                let mut failures = Vec::new();
                let mut pending = None;
                for tok in &toks[1..] {
                    if let Some(v) = tok.strip_prefix('v') {
                        if pending.is_some() {
                            return Err(Error::Parse {
                                line,
                                message: "vertex token inside an edge pair".into(),
                            });
                        }
                        failures.push(Failure::Vertex(parse_vertex(line, v)?));
                    } else {
                        let x = parse_vertex(line, tok)?;
                        match pending.take() {
                            Some(u) => failures.push(Failure::Edge(u, x)),
                            None => pending = Some(x),
                        }
                    }
                }
                if pending.is_some() {
                    return Err(Error::Parse {
                        line,
                        message: "odd number of edge endpoints".into(),
                    });
                }
                ScriptCommand::Fail(failures)
            }
            "VX" => {
                let parts: Vec<&str> = body.split('|').collect();
                if parts.len() != 3 {
                    return Err(Error::Parse {
                        line,
                        message: "expected `VX v | out: ... | in: ...`".into(),
                    });
                }
                let head: Vec<&str> = parts[0].split_whitespace().collect();
                let v = match head[..] {
                    [_, v] => parse_vertex(line, v)?,
                    _ => {
                        return Err(Error::Parse {
                            line,
                            message: "expected one vertex after `VX`".into(),
                        })
                    }
                };
                ScriptCommand::VertexUpdate {
                    v,
                    out: parse_labelled(line, parts[1], "out:")?,
                    inc: parse_labelled(line, parts[2], "in:")?,
                }
            }
            other => {
                return Err(Error::Parse {
                    line,
                    message: format!("unknown command `{other}`"),
                })
            }
        };
        out.push(ScriptLine { line, command });
    }
    Ok(out)
}

enum Session {
    Dso(Box<DsoFrontEnd>),
    Dyn(Box<DynamicEdgeOracle>),
    Vx(Box<VertexUpdateOracle>),
}

impl Session {
    fn new(cfg: &RunConfig, graph: &Digraph, script: &[ScriptLine], rng: &mut ChaCha8Rng) -> Result<Self, CliError> {
        let fixed = cfg.prime.map(PrimeField::new).transpose()?;
        let field = |n: usize, rng: &mut ChaCha8Rng| fixed.unwrap_or_else(|| sample_prime(n, cfg.c, rng));
        if cfg.oracle != OracleKind::Dso && graph.is_weighted() {
            return Err(Error::Unsupported("weighted graphs need the dso oracle".into()).into());
        }
        Ok(match cfg.oracle {
            OracleKind::Dso => {
                let vertex_failures = script.iter().any(|l| {
                    matches!(&l.command, ScriptCommand::Fail(fs) if fs.iter().any(|f| matches!(f, Failure::Vertex(_))))
                });
                let n = DsoFrontEnd::reduced_size(graph, vertex_failures);
                let fp = field(n, rng);
                let mut dso = DsoFrontEnd::new_in_field(graph, vertex_failures, &fp, cfg.gamma, rng)?;
                dso.update(&[], rng)?;
                Session::Dso(Box::new(dso))
            }
            OracleKind::DynEdge => {
                let fp = field(graph.n(), rng);
                Session::Dyn(Box::new(DynamicEdgeOracle::new(graph, &fp, cfg.gamma, cfg.alpha, rng)?))
            }
            OracleKind::Vx => {
                let fp = field(graph.n(), rng);
                Session::Vx(Box::new(VertexUpdateOracle::new(graph, &fp, rng)?))
            }
        })
    }

    fn name(&self) -> &'static str {
        match self {
            Session::Dso(_) => "dso",
            Session::Dyn(_) => "dyn-edge",
            Session::Vx(_) => "vx",
        }
    }

    fn apply(&mut self, cmd: &ScriptCommand, rng: &mut ChaCha8Rng) -> Result<(), Error> {
        let unsupported = |name: &str| Err(Error::Unsupported(format!("command not available for oracle {name}")));
        match (self, cmd) {
            (Session::Dso(d), ScriptCommand::Fail(fs)) => d.update(fs, rng),
            (Session::Dyn(d), ScriptCommand::Insert(u, v)) => d.update(*u, *v, EdgeOp::Insert, rng),
            (Session::Dyn(d), ScriptCommand::Delete(u, v)) => d.update(*u, *v, EdgeOp::Delete, rng),
            (Session::Vx(d), ScriptCommand::VertexUpdate { v, out, inc }) => d.update(*v, out, inc, rng),
            (Session::Vx(d), ScriptCommand::Insert(u, v) | ScriptCommand::Delete(u, v)) => {
                let g = d.graph();
                crate::error::check_index(*u, g.n())?;
                crate::error::check_index(*v, g.n())?;
                let insert = matches!(cmd, ScriptCommand::Insert(..));
                match (insert, g.has_edge(*u, *v)) {
                    (true, true) => return Err(Error::EdgeAlreadyPresent(*u, *v)),
                    (false, false) => return Err(Error::EdgeAbsent(*u, *v)),
                    _ => {}
                }
                let mut out: Vec<usize> = g.out_neighbors(*u).map(|(w, _)| w).filter(|w| w != v).collect();
                if insert {
                    out.push(*v);
                }
                let inc: Vec<usize> = g.in_neighbors(*u).map(|(w, _)| w).collect();
                d.update(*u, &out, &inc, rng)
            }
            (s, _) => unsupported(s.name()),
        }
    }

    fn query(&self, s: usize, t: usize) -> Result<Distance, Error> {
        match self {
            Session::Dso(d) => d.query(s, t),
            Session::Dyn(d) => d.query(s, t),
            Session::Vx(d) => d.query(s, t),
        }
    }
}

/// Brute-force mirror of the oracle state.
struct Reference {
    graph: Digraph,
    failures: Vec<Failure>,
}

impl Reference {
    fn apply(&mut self, cmd: &ScriptCommand) -> Result<(), Error> {
        match cmd {
            ScriptCommand::Insert(u, v) => self.graph.add_edge(*u, *v),
            ScriptCommand::Delete(u, v) => self.graph.remove_edge(*u, *v).map(|_| ()),
            ScriptCommand::Fail(fs) => {
                self.failures = fs.clone();
                Ok(())
            }
            ScriptCommand::VertexUpdate { v, out, inc } => {
                let old: Vec<(usize, usize)> = self
                    .graph
                    .out_neighbors(*v)
                    .map(|(w, _)| (*v, w))
                    .chain(self.graph.in_neighbors(*v).map(|(w, _)| (w, *v)))
                    .collect();
                for (a, b) in old {
                    self.graph.remove_edge(a, b)?;
                }
                for &w in out {
                    if !self.graph.has_edge(*v, w) {
                        self.graph.add_edge(*v, w)?;
                    }
                }
                for &w in inc {
                    if !self.graph.has_edge(w, *v) {
                        self.graph.add_edge(w, *v)?;
                    }
                }
                Ok(())
            }
            ScriptCommand::Query(..) => Ok(()),
        }
    }

    fn query(&self, s: usize, t: usize) -> Distance {
        if self.graph.is_weighted() {
            dijkstra_oracle(&self.graph, &self.failures, s, t)
        } else {
            bfs_oracle(&self.graph, &self.failures, s, t)
        }
    }
}

/// One answered query. Vertices are 1-based as in the script.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QueryRecord {
    pub index: usize,
    pub line: usize,
    pub s: usize,
    pub t: usize,
    pub distance: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<Option<usize>>,
}

fn show(d: Option<usize>) -> String {
    d.map_or_else(|| "INF".to_string(), |d| d.to_string())
}

impl QueryRecord {
    fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Text => format!("Q {} {} -> {}", self.s, self.t, show(self.distance)),
            OutputFormat::Csv => format!("{},{},{},{}", self.index, self.s, self.t, show(self.distance)),
            OutputFormat::Json => {
                let plain = QueryRecord {
                    expected: None,
                    ..self.clone()
                };
                serde_json::to_string(&plain).expect("plain record serializes")
            }
        }
    }
}

/// Outcome of a script replay.
#[derive(Clone, Debug, Default)]
pub struct Replay {
    pub seed: u64,
    pub records: Vec<QueryRecord>,
}

impl Replay {
    pub fn mismatches(&self) -> impl Iterator<Item = &QueryRecord> {
        self.records
            .iter()
            .filter(|r| r.expected.is_some_and(|e| e != r.distance))
    }

    pub fn write_results(&self, format: OutputFormat, out: &mut dyn Write) -> std::io::Result<()> {
        if format == OutputFormat::Csv {
            writeln!(out, "index,s,t,distance")?;
        }
        for r in &self.records {
            writeln!(out, "{}", r.render(format))?;
        }
        Ok(())
    }

    pub fn write_report(&self, out: &mut dyn Write) -> std::io::Result<()> {
        let mut count = 0;
        for r in self.mismatches() {
            count += 1;
            writeln!(
                out,
                "mismatch: seed={} command={} line={} Q {} {} -> {} expected {}",
                self.seed,
                r.index,
                r.line,
                r.s,
                r.t,
                show(r.distance),
                show(r.expected.flatten()),
            )?;
        }
        writeln!(out, "{count} mismatches / {} queries", self.records.len())
    }
}

impl fmt::Display for Replay {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut buf = Vec::new();
        self.write_results(OutputFormat::Text, &mut buf)
            .map_err(|_| fmt::Error)?;
        f.write_str(&String::from_utf8_lossy(&buf))
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(io_err(path))
}

/// Replays the script of `cfg`; with `check`, every query is also answered
/// by brute force.
pub fn replay(cfg: &RunConfig, check: bool) -> Result<Replay, CliError> {
    if cfg.gamma.is_nan() || cfg.gamma <= 0.0 || cfg.alpha.is_nan() || cfg.alpha <= 0.0 || cfg.alpha > 1.0 || cfg.c == 0
    {
        return Err(CliError::Config("need gamma > 0, 0 < alpha <= 1 and c >= 1".into()));
    }
    let graph = Digraph::parse_edge_list(&read(&cfg.graph)?)?;
    let script = parse_script(&read(&cfg.script)?)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut session = Session::new(cfg, &graph, &script, &mut rng)?;
    let mut reference = Reference {
        graph: graph.clone(),
        failures: Vec::new(),
    };
    let mut replay = Replay {
        seed: cfg.seed,
        records: Vec::new(),
    };
    for (i, sl) in script.iter().enumerate() {
        let index = i + 1;
        let wrap = |source| CliError::Command {
            index,
            line: sl.line,
            source,
        };
        match sl.command {
            ScriptCommand::Query(s, t) => {
                let d = session.query(s, t).map_err(wrap)?;
                replay.records.push(QueryRecord {
                    index,
                    line: sl.line,
                    s: s + 1,
                    t: t + 1,
                    distance: d.finite(),
                    expected: check.then(|| reference.query(s, t).finite()),
                });
            }
            ref cmd => {
                session.apply(cmd, &mut rng).map_err(wrap)?;
                if check {
                    reference.apply(cmd).map_err(wrap)?;
                }
            }
        }
    }
    Ok(replay)
}

/// Random digraph: each ordered pair `(u, v)`, `u != v`, in lexicographic
/// order becomes an edge with probability `density`.
pub fn generate_graph(cfg: &GenConfig) -> Result<Digraph, CliError> {
    if !(0.0..=1.0).contains(&cfg.density) || cfg.max_weight == 0 {
        return Err(CliError::Config("need 0 <= density <= 1 and max-weight >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let weighted = cfg.max_weight > 1;
    let mut g = if weighted {
        Digraph::new_weighted(cfg.n)
    } else {
        Digraph::new(cfg.n)
    };
    for u in 0..cfg.n {
        for v in 0..cfg.n {
            if u != v && rng.gen_bool(cfg.density) {
                let w = if weighted { rng.gen_range(1..=cfg.max_weight) } else { 1 };
                g.add_weighted_edge(u, v, w)?;
            }
        }
    }
    Ok(g)
}

/// One benchmark measurement.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRow {
    pub operation: &'static str,
    pub n: usize,
    pub h: usize,
    pub f: usize,
    pub seconds: f64,
    pub agreement: bool,
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed().as_secs_f64())
}

fn generic_oracle(fp: &PrimeField, n: usize, rng: &mut ChaCha8Rng) -> Result<(Matrix, PowerOracle), Error> {
    loop {
        let a = Matrix::random(fp, n, n, rng);
        if let Ok(form) = compute_fnf(fp, &a, rng, None) {
            return Ok((a.clone(), PowerOracle::new(fp, form)?));
        }
    }
}

fn bench_submatrix(n: usize, c: u32, rng: &mut ChaCha8Rng) -> Result<Vec<BenchRow>, Error> {
    let fp = sample_prime(n, c, rng);
    let (a, oracle) = generic_oracle(&fp, n, rng)?;
    let h = (n as f64).sqrt().ceil() as usize;
    let all: Vec<usize> = (0..n).collect();
    let (fast, t_fast) = timed(|| oracle.query_submatrix_powers(&all, &all, h));
    let fast = fast?;
    let (naive, t_naive) = timed(|| {
        let mut pows = vec![a.clone()];
        while pows.len() < h {
            let next = pows.last().expect("nonempty").mul(&a, &fp);
            pows.push(next?);
        }
        Ok::<_, Error>(pows)
    });
    let agree = fast == naive?;
    Ok(vec![
        BenchRow {
            operation: "submatrix_powers",
            n,
            h,
            f: 0,
            seconds: t_fast,
            agreement: agree,
        },
        BenchRow {
            operation: "submatrix_powers_naive",
            n,
            h,
            f: 0,
            seconds: t_naive,
            agreement: agree,
        },
    ])
}

fn bench_perturbed(n: usize, c: u32, rng: &mut ChaCha8Rng) -> Result<Vec<BenchRow>, Error> {
    let fp = sample_prime(n, c, rng);
    let a = Matrix::random(&fp, n, n, rng);
    let u = fp.random_vec(rng, n);
    let av = fp.random_vec(rng, n);
    let bv = fp.random_vec(rng, n);
    let ctx = PerturbationContext {
        delta: naive_iterates(&fp, &a, &u, n)?.vecs,
        alpha: naive_iterates(&fp, &a, &av, n)?.vecs,
        b: bv.clone(),
    };
    let (fast, t_fast) = timed(|| perturbed_iterates(&fp, &ctx));
    let fast = fast?;
    let (naive, t_naive) = timed(|| {
        let mut b = a.clone();
        for (i, &ai) in av.iter().enumerate() {
            for (x, &bj) in b.row_mut(i).iter_mut().zip(&bv) {
                *x = fp.add(*x, fp.mul(ai, bj));
            }
        }
        naive_iterates(&fp, &b, &u, n)
    });
    let agree = fast == naive?.vecs;
    Ok(vec![
        BenchRow {
            operation: "perturbed_iterates",
            n,
            h: n,
            f: 0,
            seconds: t_fast,
            agreement: agree,
        },
        BenchRow {
            operation: "perturbed_iterates_naive",
            n,
            h: n,
            f: 0,
            seconds: t_naive,
            agreement: agree,
        },
    ])
}

fn bench_dso(n: usize, f: usize, c: u32, rng: &mut ChaCha8Rng) -> Result<Vec<BenchRow>, Error> {
    let mut g = Digraph::new(n);
    for u in 0..n {
        for v in 0..n {
            if u != v && rng.gen_bool(3.0 / n as f64) {
                g.add_edge(u, v)?;
            }
        }
    }
    let fp = sample_prime(n, c, rng);
    let gamma = crate::oracles::DEFAULT_GAMMA;
    let edges: Vec<(usize, usize)> = g.edges().map(|(u, v, _)| (u, v)).collect();
    let failed: Vec<(usize, usize)> = (0..f.min(edges.len()))
        .map(|_| edges[rng.gen_range(0..edges.len())])
        .collect();
    let mut dso = MultiFailureDso::preprocess(&g, &fp, gamma, rng)?;
    let (res, t_update) = timed(|| dso.update(&failed, rng));
    res?;
    let (rebuilt, t_rebuild) = timed(|| {
        let mut d = MultiFailureDso::preprocess(&g, &fp, gamma, rng)?;
        d.update(&failed, rng)?;
        Ok::<_, Error>(d)
    });
    let rebuilt = rebuilt?;
    let fails: Vec<Failure> = failed.iter().map(|&(u, v)| Failure::Edge(u, v)).collect();
    let mut agree = true;
    for _ in 0..20 {
        let (s, t) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let want = bfs_oracle(&g, &fails, s, t);
        agree &= dso.query(s, t)? == want && rebuilt.query(s, t)? == want;
    }
    let h = dso.hop_bound().unwrap_or(n);
    Ok(vec![
        BenchRow {
            operation: "dso_update",
            n,
            h,
            f,
            seconds: t_update,
            agreement: agree,
        },
        BenchRow {
            operation: "dso_rebuild",
            n,
            h,
            f,
            seconds: t_rebuild,
            agreement: agree,
        },
    ])
}

pub fn bench(cfg: &BenchConfig) -> Result<Vec<BenchRow>, CliError> {
    if cfg.sizes.iter().any(|&n| n < 2) || cfg.c == 0 {
        return Err(CliError::Config("sizes must be >= 2 and c >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut measured: HashMap<(BenchOp, usize), Vec<BenchRow>> = HashMap::new();
    let mut rows = Vec::new();
    for &op in &cfg.ops {
        for &n in &cfg.sizes {
            let family = op.family();
            if let std::collections::hash_map::Entry::Vacant(e) = measured.entry((family, n)) {
                let pair = match family {
                    BenchOp::Submatrix => bench_submatrix(n, cfg.c, &mut rng)?,
                    BenchOp::Perturbed => bench_perturbed(n, cfg.c, &mut rng)?,
                    _ => bench_dso(n, cfg.f, cfg.c, &mut rng)?,
                };
                e.insert(pair);
            }
            rows.push(measured[&(family, n)][op.slot()].clone());
        }
    }
    Ok(rows)
}

pub fn write_bench_csv(rows: &[BenchRow], out: &mut dyn Write) -> std::io::Result<()> {
    writeln!(out, "operation,n,h,f,seconds,agreement")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{:.6},{}",
            r.operation, r.n, r.h, r.f, r.seconds, r.agreement
        )?;
    }
    Ok(())
}

fn write_target(path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, bytes).map_err(io_err(p)),
        None => std::io::stdout().write_all(bytes).map_err(out_err),
    }
}

/// Runs a parsed command line and returns the process exit code.
pub fn execute(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Gen(cfg) => {
            let g = generate_graph(&cfg)?;
            write_target(cfg.out.as_deref(), g.to_edge_list().as_bytes())?;
            Ok(0)
        }
        Command::Run(cfg) => {
            let r = replay(&cfg, false)?;
            let mut stdout = std::io::stdout().lock();
            r.write_results(cfg.format, &mut stdout).map_err(out_err)?;
            Ok(0)
        }
        Command::Verify(cfg) => {
            let r = replay(&cfg, true)?;
            let mut stdout = std::io::stdout().lock();
            r.write_results(cfg.format, &mut stdout).map_err(out_err)?;
            if cfg.format == OutputFormat::Text {
                r.write_report(&mut stdout).map_err(out_err)?;
            } else {
                r.write_report(&mut std::io::stderr().lock()).map_err(out_err)?;
            }
            Ok(if r.mismatches().next().is_some() { 1 } else { 0 })
        }
        Command::Bench(cfg) => {
            let rows = bench(&cfg)?;
            let mut buf = Vec::new();
            write_bench_csv(&rows, &mut buf).map_err(out_err)?;
            write_target(cfg.out.as_deref(), &buf)?;
            Ok(if rows.iter().all(|r| r.agreement) { 0 } else { 1 })
        }
    }
}
