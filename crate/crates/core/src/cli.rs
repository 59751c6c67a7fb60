//! Running operation streams through the engine: plain output, verification
//! against Dijkstra, per-insertion CSV and detector-level conformance checks.

use std::io::{self, Write};
use std::str::FromStr;
use std::time::Instant;

use thiserror::Error;

use crate::degree::required_aux;
use crate::engine::{engine_initialize, EngineConfig, EngineError, SsspEngine};
use crate::graph::DynamicGraph;
use crate::oracle::dijkstra;
use crate::stream::{Op, StreamError};

pub const CSV_HEADER: &str =
    "step,m,ipm_iterations_total,recourse_total,gradient_updates,phases,max_ratio,wall_ms";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Run,
    Verify,
    Bench,
    Conformance,
    Generate,
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "run" => Ok(Mode::Run),
            "verify" => Ok(Mode::Verify),
            "bench" => Ok(Mode::Bench),
            "conformance" => Ok(Mode::Conformance),
            "generate" => Ok(Mode::Generate),
            other => Err(format!("unknown mode `{other}`")),
        }
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Stream(#[from] StreamError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("invariant violated: {0}")]
    Violation(String),
}

impl RunError {
    /// 1 usage, 2 invariant violation, 3 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Stream(_) => 1,
            RunError::Engine(EngineError::Config(_))
            | RunError::Engine(EngineError::Length { .. }) => 1,
            RunError::Engine(_) | RunError::Violation(_) => 2,
            RunError::Io(_) => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mode: Mode,
    pub engine: EngineConfig,
    /// 0 silent, 1 per-phase notes, 2 per-insertion notes on stderr.
    pub log_level: u8,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunSummary {
    pub insertions: usize,
    pub queries: usize,
    pub max_ratio: f64,
    pub phases: usize,
}

/// Engine configuration adjusted to a whole stream: `W`, the final edge count
/// and, with degree reduction, the auxiliary vertex pool.
pub fn configure_for(ops: &[Op], base: &EngineConfig) -> EngineConfig {
    let mut cfg = base.clone();
    let n = ops
        .iter()
        .find_map(|op| match op {
            Op::Header { n } => Some(*n),
            _ => None,
        })
        .unwrap_or(1);
    let arcs: Vec<_> = ops
        .iter()
        .filter_map(|op| match op {
            Op::Insert { u, v, length } => Some((*u, *v, *length)),
            _ => None,
        })
        .collect();
    cfg.max_length = arcs.iter().map(|a| a.2).max().unwrap_or(1);
    cfg.edge_hint = Some(arcs.len().max(cfg.edge_hint.unwrap_or(0)));
    if cfg.degree_reduce && cfg.aux_vertices.is_none() {
        let pairs: Vec<_> = arcs.iter().map(|a| (a.0, a.1)).collect();
        cfg.aux_vertices = Some(required_aux(n, &pairs));
    }
    cfg
}

fn log_level_from_env() -> u8 {
    match std::env::var("IPM_SSSP_LOG").ok().as_deref() {
        Some("2") | Some("debug") | Some("trace") => 2,
        Some("1") | Some("info") => 1,
        _ => 0,
    }
}

impl RunConfig {
    pub fn new(mode: Mode, engine: EngineConfig) -> Self {
        Self {
            mode,
            engine,
            log_level: log_level_from_env(),
        }
    }
}

fn ratio_text(est: Option<u64>, exact: Option<u64>) -> (String, f64, bool) {
    match (est, exact) {
        (Some(e), Some(d)) => {
            let ratio = if d == 0 {
                if e == 0 {
                    1.0
                } else {
                    f64::INFINITY
                }
            } else {
                e as f64 / d as f64
            };
            (format!("{ratio:.6}"), ratio, true)
        }
        (None, None) => ("-".to_string(), 1.0, true),
        _ => ("-".to_string(), f64::INFINITY, false),
    }
}

fn number(x: Option<u64>) -> String {
    x.map_or_else(|| "inf".to_string(), |d| d.to_string())
}

/// Runs `ops` and writes query answers to `out`; in bench mode one CSV row
/// per insertion goes to `csv`.
pub fn run(
    ops: &[Op],
    cfg: &RunConfig,
    out: &mut dyn Write,
    mut csv: Option<&mut dyn Write>,
) -> Result<RunSummary, RunError> {
    let Some(Op::Header { n }) = ops.first().copied() else {
        return Err(StreamError::MissingHeader { line: 1 }.into());
    };
    let engine_cfg = configure_for(ops, &cfg.engine);
    let verify = matches!(cfg.mode, Mode::Verify | Mode::Conformance);
    let bench = cfg.mode == Mode::Bench;
    let empty = DynamicGraph::new(n, 0).map_err(EngineError::from)?;
    let mut engine = engine_initialize(&empty, engine_cfg.clone())?;
    if cfg.log_level >= 1 {
        eprintln!(
            "ipm-sssp: n={n} epsilon_bar={:.3e} alpha={:.3e} levels={}",
            engine.level_epsilon(),
            engine.level_alpha(),
            engine_cfg.levels
        );
    }
    if bench {
        if let Some(w) = csv.as_deref_mut() {
            writeln!(w, "{CSV_HEADER}")?;
        }
    }
    let mut summary = RunSummary {
        max_ratio: 1.0,
        ..RunSummary::default()
    };
    let start = Instant::now();
    let mut step = 0usize;
    for op in &ops[1..] {
        match *op {
            Op::Header { .. } => {
                return Err(StreamError::Malformed {
                    line: 0,
                    message: "duplicate header".into(),
                }
                .into())
            }
            Op::Insert { u, v, length } => {
                let phases_before = engine.metrics().phases;
                engine.insert(u, v, length)?;
                step += 1;
                summary.insertions += 1;
                if verify || bench {
                    let check = engine.check();
                    summary.max_ratio = summary.max_ratio.max(check.max_ratio);
                    if verify && !check.violations.is_empty() {
                        return Err(RunError::Violation(format!(
                            "step {step}: estimates of vertices {:?} leave [d, (1+eps) d]",
                            check.violations.iter().map(|v| v + 1).collect::<Vec<_>>()
                        )));
                    }
                    if bench {
                        if let Some(w) = csv.as_deref_mut() {
                            let m = engine.metrics();
                            writeln!(
                                w,
                                "{step},{},{},{},{},{},{:.6},{}",
                                engine.graph().edge_count(),
                                m.ipm_iterations,
                                m.recourse,
                                m.gradient_updates,
                                m.phases,
                                check.max_ratio,
                                start.elapsed().as_millis()
                            )?;
                        }
                    }
                }
                if cfg.log_level >= 2
                    || (cfg.log_level >= 1 && engine.metrics().phases != phases_before)
                {
                    let m = engine.metrics();
                    eprintln!(
                        "ipm-sssp: step {step} phases={} ipm={} recourse={} members={}",
                        m.phases,
                        m.ipm_iterations,
                        m.recourse,
                        engine.members().len()
                    );
                }
            }
            Op::Query { v } => {
                summary.queries += 1;
                let est = engine.query_distance(v);
                if verify {
                    let exact = dijkstra(engine.graph()).dist[v];
                    let (text, ratio, ok) = ratio_text(est, exact);
                    summary.max_ratio = summary.max_ratio.max(ratio);
                    writeln!(out, "d {} {} {} {text}", v + 1, number(est), number(exact))?;
                    if !ok || ratio > 1.0 + engine_cfg.epsilon || est < exact {
                        return Err(RunError::Violation(format!(
                            "query {}: estimate {} vs exact {}",
                            v + 1,
                            number(est),
                            number(exact)
                        )));
                    }
                } else {
                    writeln!(out, "d {} {}", v + 1, number(est))?;
                }
            }
            Op::Path { v } => {
                summary.queries += 1;
                match engine.query_path(v) {
                    Some(path) => {
                        if verify {
                            check_path(&engine, v, &path)?;
                        }
                        let vertices: Vec<String> =
                            path.vertices.iter().map(|x| (x + 1).to_string()).collect();
                        writeln!(
                            out,
                            "path {} {} {} {}",
                            v + 1,
                            vertices.len(),
                            vertices.join(" "),
                            path.length
                        )?;
                    }
                    None => writeln!(out, "path {} 0 inf", v + 1)?,
                }
            }
        }
    }
    if cfg.mode == Mode::Conformance {
        conformance_report(&engine, out)?;
    }
    summary.phases = engine.metrics().phases;
    Ok(summary)
}

fn check_path(
    engine: &SsspEngine,
    v: usize,
    path: &crate::engine::EnginePath,
) -> Result<(), RunError> {
    let g = engine.graph();
    let mut at = g.source();
    for &e in &path.edges {
        let edge = g
            .try_edge(e)
            .map_err(|_| RunError::Violation(format!("path to {}: unknown edge {e}", v + 1)))?;
        if edge.tail != at {
            return Err(RunError::Violation(format!(
                "path to {}: edges do not chain",
                v + 1
            )));
        }
        at = edge.head;
    }
    if at != v {
        return Err(RunError::Violation(format!(
            "path to {} ends at {}",
            v + 1,
            at + 1
        )));
    }
    let exact = dijkstra(g).dist[v]
        .ok_or_else(|| RunError::Violation(format!("path to unreachable {}", v + 1)))?;
    if path.length as f64 > (1.0 + engine.config().epsilon) * exact as f64 {
        return Err(RunError::Violation(format!(
            "path to {} has length {} > (1+eps) * {exact}",
            v + 1,
            path.length
        )));
    }
    Ok(())
}

/// Detector-level checks appended in conformance mode.
fn conformance_report(engine: &SsspEngine, out: &mut dyn Write) -> Result<(), RunError> {
    let summaries = engine.detector_summaries();
    let mut worst_budget: f64 = 0.0;
    let mut min_decrease = f64::INFINITY;
    for s in &summaries {
        worst_budget = worst_budget.max(s.ipm_iterations as f64 / s.step_bound);
        if let Some(d) = s.min_decrease {
            min_decrease = min_decrease.min(d);
        }
    }
    writeln!(out, "# detectors {}", summaries.len())?;
    writeln!(out, "# max steps / step bound {worst_budget:.3e}")?;
    if min_decrease.is_finite() {
        writeln!(out, "# min potential decrease {min_decrease:.3e}")?;
    }
    if worst_budget > 1.0 {
        return Err(RunError::Violation("iteration budget exceeded".into()));
    }
    Ok(())
}
