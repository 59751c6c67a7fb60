//! Shared harness for the integration tests: an independent Dijkstra, the
//! standard end-to-end stream suite and detector-level adversarial streams.

#![allow(dead_code)]

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::time::{Duration, Instant};

use ipm_sssp::barrier::IpmParams;
use ipm_sssp::cli::configure_for;
use ipm_sssp::detector::{detector_init, DetectorState};
use ipm_sssp::engine::DetectorSummary;
use ipm_sssp::graph::EdgeKind;
use ipm_sssp::stream::{generate_ops, GenSpec, Op, Pattern};
use ipm_sssp::{engine_initialize, DynamicGraph, EngineConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const SUITE_EPSILON: f64 = 0.2;
pub const SUITE_WMAX: u64 = 32;

/// Plain binary-heap Dijkstra over an arc list.
pub fn shortest(n: usize, arcs: &[(usize, usize, u64)], source: usize) -> Vec<Option<u64>> {
    let mut adj = vec![Vec::new(); n];
    for &(u, v, l) in arcs {
        adj[u].push((v, l));
    }
    let mut dist = vec![None; n];
    let mut heap = BinaryHeap::new();
    heap.push(Reverse((0u64, source)));
    while let Some(Reverse((d, u))) = heap.pop() {
        if dist[u].is_some() {
            continue;
        }
        dist[u] = Some(d);
        for &(v, l) in &adj[u] {
            if dist[v].is_none() {
                heap.push(Reverse((d + l, v)));
            }
        }
    }
    dist
}

#[derive(Debug, Clone, Copy)]
pub struct SuiteCase {
    pub n: usize,
    pub levels: usize,
    pub pattern: Pattern,
    pub seed: u64,
    pub insertions: usize,
}

impl SuiteCase {
    pub fn label(&self) -> String {
        format!(
            "n={} B={} {:?} seed={} k={}",
            self.n, self.levels, self.pattern, self.seed, self.insertions
        )
    }
}

/// 54 streams: `n` in {8, 16, 32}, `B` in {1, 2}, three patterns, three seeds.
pub fn standard_suite() -> Vec<SuiteCase> {
    let mut cases = Vec::new();
    for n in [8, 16, 32] {
        for levels in [1, 2] {
            for pattern in [
                Pattern::Uniform,
                Pattern::ShortcutHeavy,
                Pattern::DistanceCollapse,
            ] {
                for seed in 1..=3 {
                    cases.push(SuiteCase {
                        n,
                        levels,
                        pattern,
                        seed,
                        insertions: 6 * n,
                    });
                }
            }
        }
    }
    cases
}

/// Smaller suite for the regular integration tests.
pub fn quick_suite() -> Vec<SuiteCase> {
    let mut cases = Vec::new();
    for (n, levels, pattern) in [
        (8, 1, Pattern::Uniform),
        (8, 2, Pattern::ShortcutHeavy),
        (12, 2, Pattern::DistanceCollapse),
        (16, 2, Pattern::Uniform),
    ] {
        cases.push(SuiteCase {
            n,
            levels,
            pattern,
            seed: 11,
            insertions: 3 * n,
        });
    }
    cases
}

#[derive(Debug, Default)]
pub struct SuiteOutcome {
    pub label: String,
    pub insertions: usize,
    pub checked_estimates: usize,
    pub sandwich_violations: Vec<String>,
    pub max_ratio: f64,
    pub path_queries: usize,
    pub path_failures: Vec<String>,
    pub dual_snapshots: usize,
    pub dual_in_regime: usize,
    pub dual_violations: Vec<String>,
    pub summaries: Vec<DetectorSummary>,
    pub error: Option<String>,
    pub elapsed: Duration,
}

/// Runs one stream through the engine, checking every estimate after every
/// insertion, every reported path at every query and the certified duals of
/// the top-level detectors.
pub fn run_case(case: &SuiteCase) -> SuiteOutcome {
    let mut out = SuiteOutcome {
        label: case.label(),
        max_ratio: 1.0,
        ..SuiteOutcome::default()
    };
    let ops = generate_ops(&GenSpec {
        n: case.n,
        insertions: case.insertions,
        wmax: SUITE_WMAX,
        pattern: case.pattern,
        seed: case.seed,
    })
    .expect("generator");
    let mut base = EngineConfig::new(SUITE_EPSILON);
    base.levels = case.levels;
    base.accelerate = true;
    let cfg = configure_for(&ops, &base);
    let eps = cfg.epsilon;
    let start = Instant::now();
    let empty = DynamicGraph::new(case.n, 0).expect("graph");
    let mut engine = match engine_initialize(&empty, cfg) {
        Ok(e) => e,
        Err(e) => {
            out.error = Some(format!("init: {e}"));
            return out;
        }
    };
    let mut arcs: Vec<(usize, usize, u64)> = Vec::new();
    let mut dist = shortest(case.n, &arcs, 0);
    for op in &ops {
        match *op {
            Op::Header { .. } => {}
            Op::Insert { u, v, length } => {
                if let Err(e) = engine.insert(u, v, length) {
                    out.error = Some(format!(
                        "insert {} ({u}, {v}, {length}): {e}",
                        out.insertions + 1
                    ));
                    break;
                }
                out.insertions += 1;
                arcs.push((u, v, length));
                dist = shortest(case.n, &arcs, 0);
                for (x, d) in dist.iter().enumerate() {
                    let est = engine.query_distance(x);
                    out.checked_estimates += 1;
                    match (*d, est) {
                        (Some(d), Some(e)) => {
                            let ratio = if d == 0 {
                                if e == 0 {
                                    1.0
                                } else {
                                    f64::INFINITY
                                }
                            } else {
                                e as f64 / d as f64
                            };
                            out.max_ratio = out.max_ratio.max(ratio);
                            if e < d || e as f64 > (1.0 + eps) * d as f64 {
                                out.sandwich_violations.push(format!(
                                    "step {} vertex {x}: d={d} est={e}",
                                    out.insertions
                                ));
                            }
                        }
                        (None, None) => {}
                        (d, e) => out.sandwich_violations.push(format!(
                            "step {} vertex {x}: d={d:?} est={e:?}",
                            out.insertions
                        )),
                    }
                }
                for inst in engine.detectors() {
                    if let Ok((_, report)) = inst.detector.dual_snapshot() {
                        out.dual_snapshots += 1;
                        if report.in_regime {
                            out.dual_in_regime += 1;
                            if !report.sandwich_violations.is_empty()
                                || !report.bound_violations.is_empty()
                            {
                                out.dual_violations.push(format!(
                                    "step {} scale {}: {} edgewise, {} bound",
                                    out.insertions,
                                    inst.scale,
                                    report.sandwich_violations.len(),
                                    report.bound_violations.len()
                                ));
                            }
                        }
                    }
                }
            }
            Op::Query { v } | Op::Path { v } => {
                out.path_queries += 1;
                if let Err(msg) = check_path(&engine, &arcs, &dist, v, eps) {
                    out.path_failures
                        .push(format!("step {}: {msg}", out.insertions));
                }
            }
        }
    }
    out.summaries = engine.detector_summaries();
    out.elapsed = start.elapsed();
    out
}

fn check_path(
    engine: &ipm_sssp::SsspEngine,
    arcs: &[(usize, usize, u64)],
    dist: &[Option<u64>],
    v: usize,
    eps: f64,
) -> Result<(), String> {
    let Some(d) = dist[v] else {
        return match engine.query_path(v) {
            None => Ok(()),
            Some(_) => Err(format!("path reported to unreachable {v}")),
        };
    };
    let path = engine
        .query_path(v)
        .ok_or_else(|| format!("no path to reachable {v}"))?;
    let mut at = 0;
    let mut length = 0;
    for &e in &path.edges {
        let &(u, w, l) = arcs
            .get(e)
            .ok_or_else(|| format!("path to {v}: edge {e} does not exist"))?;
        if u != at {
            return Err(format!(
                "path to {v}: edge {e} starts at {u}, expected {at}"
            ));
        }
        at = w;
        length += l;
    }
    if at != v {
        return Err(format!("path to {v} ends at {at}"));
    }
    if length != path.length {
        return Err(format!(
            "path to {v}: reported length {} but edges sum to {length}",
            path.length
        ));
    }
    if length as f64 > (1.0 + eps) * d as f64 {
        return Err(format!("path to {v}: length {length} > (1+eps) * {d}"));
    }
    Ok(())
}

/// One detector-level stream: a base graph with every distance in
/// `[scale, 2 scale]`, then insertions.
#[derive(Debug, Clone)]
pub struct DetectorStream {
    pub label: String,
    pub n: usize,
    pub base: Vec<(usize, usize, u64)>,
    pub scale: u64,
    pub epsilon: f64,
    pub alpha: f64,
    pub insertions: Vec<(usize, usize, u64)>,
}

#[derive(Debug, Default)]
pub struct DetectorOutcome {
    pub label: String,
    pub threshold: f64,
    /// Vertices whose distance fell below `(1 - eps) d0` before termination.
    pub dropped: Vec<usize>,
    /// Dropped vertices reported only after initialization.
    pub caught_later: usize,
    pub missed: Vec<String>,
    /// Insertion (1-based) at which the detector terminated.
    pub terminated_at: Option<usize>,
    /// First insertion at which the oracle total fell below `(1 - alpha/2) F`.
    pub oracle_first: Option<usize>,
    pub dual_in_regime: usize,
    pub dual_violations: Vec<String>,
    pub steps: usize,
    pub step_bound: f64,
    pub median_decrease: Option<f64>,
    pub decrease_floor: f64,
    pub error: Option<String>,
}

fn base_graph(n: usize, arcs: &[(usize, usize, u64)]) -> DynamicGraph {
    let mut g = DynamicGraph::new(n, 0).expect("graph");
    for &(u, v, l) in arcs {
        g.insert_edge(u, v, l, EdgeKind::Original).expect("edge");
    }
    g
}

fn dual_check(d: &DetectorState, step: usize, out: &mut DetectorOutcome) {
    if let Ok((_, report)) = d.dual_snapshot() {
        if report.in_regime {
            out.dual_in_regime += 1;
            if !report.sandwich_violations.is_empty() || !report.bound_violations.is_empty() {
                out.dual_violations.push(format!(
                    "{} step {step}: edges {:?} bound {:?}",
                    out.label, report.sandwich_violations, report.bound_violations
                ));
            }
        }
    }
}

/// Runs a detector stream against the oracle with line-search steps.
pub fn run_detector_stream(s: &DetectorStream) -> DetectorOutcome {
    run_detector_stream_in(s, true)
}

/// Runs a detector stream against the oracle; `accelerate = false` takes
/// exactly the theoretical step every time.
pub fn run_detector_stream_in(s: &DetectorStream, accelerate: bool) -> DetectorOutcome {
    let mut out = DetectorOutcome {
        label: s.label.clone(),
        ..DetectorOutcome::default()
    };
    let g = base_graph(s.n, &s.base);
    let mut arcs = s.base.clone();
    let d0 = shortest(s.n, &arcs, 0);
    let total0: u64 = d0.iter().skip(1).map(|d| d.expect("connected base")).sum();
    let m = s.base.len() + s.n - 1;
    let params = match IpmParams::new(s.alpha, s.epsilon, m) {
        Ok(p) => p.accelerated(accelerate),
        Err(e) => {
            out.error = Some(e.to_string());
            return out;
        }
    };
    out.threshold = params.danger_threshold();
    let mut det = match detector_init(&g, s.scale, params) {
        Ok(d) => d,
        Err(e) => {
            out.error = Some(format!("init: {e}"));
            return out;
        }
    };
    let mut reported = vec![false; s.n];
    for &v in det.initial_set() {
        reported[v] = true;
    }
    let initial = reported.clone();
    dual_check(&det, 0, &mut out);
    for (i, &(u, v, l)) in s.insertions.iter().enumerate() {
        let step = i + 1;
        arcs.push((u, v, l));
        let dist = shortest(s.n, &arcs, 0);
        let total: u64 = dist.iter().skip(1).map(|d| d.expect("connected")).sum();
        if out.oracle_first.is_none() && (total as f64) < (1.0 - s.alpha / 2.0) * total0 as f64 {
            out.oracle_first = Some(step);
        }
        let report = match det.process_insertion(u, v, l) {
            Ok(r) => r,
            Err(e) => {
                out.error = Some(format!("insertion {step}: {e}"));
                break;
            }
        };
        if report.terminated {
            out.terminated_at = Some(step);
            break;
        }
        for &x in &report.set {
            reported[x] = true;
        }
        for x in 1..s.n {
            let (Some(now), Some(before)) = (dist[x], d0[x]) else {
                continue;
            };
            if (now as f64) < (1.0 - s.epsilon) * before as f64 {
                if !out.dropped.contains(&x) {
                    out.dropped.push(x);
                    if reported[x] && !initial[x] {
                        out.caught_later += 1;
                    }
                }
                if !reported[x] {
                    out.missed.push(format!(
                        "{} step {step}: vertex {x} at {now} < (1-eps) {before}",
                        s.label
                    ));
                }
            }
        }
        dual_check(&det, step, &mut out);
    }
    let metrics = det.metrics();
    out.steps = metrics.ipm_iterations;
    out.step_bound = det.params().step_bound(det.graph().edge_count());
    out.median_decrease = metrics.median_decrease();
    let p = det.params();
    out.decrease_floor = p.quality * p.quality / (1e4 * p.power as f64);
    out
}

/// A stream in which specific vertices drop below `(1 - eps) d0` while the
/// total stays above `(1 - alpha/2) F`: decoy insertions that change nothing,
/// then one victim reached directly, gradually, or through a pre-inserted
/// short edge that drags a second vertex down with it.
pub fn adversarial_stream(seed: u64) -> DetectorStream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = 64u64;
    let variant = seed % 3;
    let n = if variant == 2 { 600 } else { 300 } + rng.gen_range(0..50);
    let epsilon = [0.3, 0.5][rng.gen_range(0..2)];
    let mut base = Vec::new();
    for v in 1..n {
        base.push((0, v, rng.gen_range(2 * scale - 6..=2 * scale)));
    }
    for _ in 0..n / 2 {
        let u = rng.gen_range(1..n);
        let v = rng.gen_range(1..n);
        if u != v {
            base.push((u, v, rng.gen_range(scale..=2 * scale)));
        }
    }
    let victim = rng.gen_range(1..n);
    let d0 = shortest(n, &base, 0);
    let dv = d0[victim].expect("connected") as f64;
    let low = ((1.0 - epsilon) * dv).floor() as u64 - rng.gen_range(1..4);
    let mut insertions = Vec::new();
    let decoys = |rng: &mut ChaCha8Rng, k: usize, out: &mut Vec<(usize, usize, u64)>| {
        for _ in 0..k {
            let u = rng.gen_range(1..n);
            let v = rng.gen_range(1..n);
            if u != v {
                out.push((u, v, rng.gen_range(scale..=2 * scale)));
            }
        }
    };
    let k = rng.gen_range(2..12);
    decoys(&mut rng, k, &mut insertions);
    match variant {
        0 => insertions.push((0, victim, low)),
        1 => {
            let mid = ((1.0 - epsilon / 2.0) * dv) as u64;
            insertions.push((0, victim, mid));
            decoys(&mut rng, 3, &mut insertions);
            insertions.push((0, victim, low));
        }
        _ => {
            let mut other = rng.gen_range(1..n);
            if other == victim {
                other = other % (n - 1) + 1;
            }
            insertions.push((victim, other, 1));
            decoys(&mut rng, 3, &mut insertions);
            insertions.push((0, victim, low));
        }
    }
    decoys(&mut rng, 4, &mut insertions);
    let mut all = base.clone();
    all.extend(&insertions);
    let f0: u64 = d0.iter().skip(1).map(|d| d.unwrap()).sum();
    let f1: u64 = shortest(n, &all, 0)
        .iter()
        .skip(1)
        .map(|d| d.unwrap())
        .sum();
    let drop = (f0 - f1) as f64;
    // Termination needs a total drop of (alpha/2) F; leave 20% headroom.
    let alpha = (2.4 * drop / f0 as f64).min(epsilon);
    DetectorStream {
        label: format!("adversarial seed={seed} variant={variant} n={n}"),
        n,
        base,
        scale,
        epsilon,
        alpha,
        insertions,
    }
}

/// Base graph at every distance in `[L, 2L]` (a scaled copy of a chain),
/// followed by shortcuts from the original source that each trim one
/// distance by at most `L / 8`, so the total erodes over many insertions.
pub fn collapse_stream(seed: u64) -> DetectorStream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(8..40);
    let scale = 1u64 << rng.gen_range(4..7);
    // vertex 0 plays s'; vertex 1 is the original source
    let mut base = vec![(0, 1, scale)];
    for v in 2..n {
        base.push((0, v, 2 * scale));
    }
    for v in 2..n {
        base.push((v - 1, v, rng.gen_range(1..=scale / 4)));
    }
    let mut all = base.clone();
    let mut insertions = Vec::new();
    for _ in 0..4 * n {
        let dist = shortest(n, &all, 0);
        let v = rng.gen_range(2..n);
        let slack = dist[v].unwrap() - scale;
        let trim = rng.gen_range(1..=scale / 8);
        if slack <= trim {
            continue;
        }
        let arc = (1, v, slack - trim);
        all.push(arc);
        insertions.push(arc);
    }
    let epsilon = 0.2;
    let alpha = [0.01, 0.02, 0.05, 0.1][rng.gen_range(0..4)];
    DetectorStream {
        label: format!("collapse seed={seed} n={n} L={scale} alpha={alpha}"),
        n,
        base,
        scale,
        epsilon,
        alpha,
        insertions,
    }
}

#[derive(Debug, Default)]
pub struct SolverAgreement {
    pub instances: usize,
    pub applied: usize,
    pub certified: usize,
    pub boundary: usize,
    pub failures: Vec<String>,
}

/// Random micro-instances (at most 6 vertices, 10 edges) checked against the
/// exhaustive min-ratio search.
pub fn solver_agreement(instances: usize, seed: u64) -> SolverAgreement {
    use ipm_sssp::solver::brute::brute_force_min_ratio;
    use ipm_sssp::solver::{SolverConfig, SolverMirror, StepResult};

    let tol = 1e-9;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = SolverAgreement::default();
    for i in 0..instances {
        let n = rng.gen_range(2..=6);
        let k = rng.gen_range(1..=10);
        let edges: Vec<(usize, usize)> = (0..k)
            .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n)))
            .filter(|(u, v)| u != v)
            .collect();
        let g: Vec<f64> = edges.iter().map(|_| rng.gen_range(-3.0..3.0)).collect();
        let w: Vec<f64> = edges.iter().map(|_| rng.gen_range(0.1..5.0)).collect();
        let q = [0.01, 0.05, 0.1, 0.3, 0.5, 0.9][rng.gen_range(0..6)];
        let mut mirror = SolverMirror::new(
            n,
            0,
            SolverConfig {
                quality: q,
                step: 0.05,
                accuracy: 0.01,
            },
        )
        .expect("mirror");
        for (e, &(u, v)) in edges.iter().enumerate() {
            mirror.insert_edge(e, u, v, w[e], g[e], 1.0).expect("edge");
        }
        let (best, _) = brute_force_min_ratio(n, &edges, &g, &w).expect("brute force");
        let result = match mirror.apply_cycle() {
            Ok(r) => r,
            Err(e) => {
                out.failures.push(format!("instance {i}: {e}"));
                continue;
            }
        };
        out.instances += 1;
        let near = best.is_finite() && (best + q).abs() <= tol * q.max(best.abs());
        if near {
            out.boundary += 1;
        }
        match result {
            StepResult::Applied { cycle, .. } => {
                out.applied += 1;
                if best > -q && !near {
                    out.failures.push(format!(
                        "instance {i}: applied but min ratio {best} > -q = {}",
                        -q
                    ));
                }
                let num: f64 = cycle.arcs.iter().map(|a| a.sign * g[a.edge]).sum();
                let den: f64 = cycle.arcs.iter().map(|a| w[a.edge]).sum();
                if num / den > -q * (1.0 - tol) {
                    out.failures.push(format!(
                        "instance {i}: returned cycle ratio {} > -q",
                        num / den
                    ));
                }
            }
            StepResult::Certified { dual, .. } => {
                out.certified += 1;
                if best <= -q && !near {
                    out.failures.push(format!(
                        "instance {i}: certified but min ratio {best} <= -q = {}",
                        -q
                    ));
                }
                let phi = &dual.potentials;
                let residual = edges
                    .iter()
                    .enumerate()
                    .map(|(e, &(u, v))| (g[e] + phi[u] - phi[v]).abs() / w[e])
                    .fold(0.0f64, f64::max);
                if residual > q * (1.0 + tol) {
                    out.failures.push(format!(
                        "instance {i}: certificate residual {residual} > q = {q}"
                    ));
                }
            }
        }
    }
    out
}

#[derive(Debug, Default)]
pub struct BarrierReport {
    pub grid_points: usize,
    pub gradient_states: usize,
    pub worst_gradient_error: f64,
    pub failures: Vec<String>,
}

/// Smooth splice at 1, convexity on a grid and the gradient of the potential
/// against central differences.
pub fn barrier_numerics(seed: u64) -> BarrierReport {
    use ipm_sssp::barrier::{
        barrier_derivative, barrier_second_derivative, barrier_value, edge_weight, gradient,
        potential, FlowView,
    };

    let mut out = BarrierReport::default();
    for p in [2u32, 4, 8, 16, 32] {
        let pf = p as f64;
        // closed forms on either side of the splice
        let left = |x: f64| x.powf(-pf) / pf;
        let right = |x: f64| 1.0 / pf - x.ln();
        let v1 = barrier_value(1.0, p).unwrap();
        if (v1 - left(1.0)).abs() > 1e-12 || (v1 - right(1.0)).abs() > 1e-12 {
            out.failures.push(format!("p={p}: V(1) = {v1}"));
        }
        for h in [1e-4, 1e-6] {
            let dl = barrier_derivative(1.0 - h, p).unwrap();
            let dr = barrier_derivative(1.0 + h, p).unwrap();
            if (dl - dr).abs() > 4.0 * (pf + 1.0) * h {
                out.failures
                    .push(format!("p={p}: V' jumps at 1: {dl} vs {dr} (h={h})"));
            }
            let jump = (barrier_value(1.0 + h, p).unwrap() - barrier_value(1.0 - h, p).unwrap())
                / (2.0 * h);
            if (jump + 1.0).abs() > (pf + 1.0) * h {
                out.failures
                    .push(format!("p={p}: V not C1 at 1, slope {jump}"));
            }
        }
        let points = 1000;
        for i in 0..points {
            let x = 0.05 + 4.95 * i as f64 / (points - 1) as f64;
            out.grid_points += 1;
            let v = barrier_value(x, p).unwrap();
            let expect = if x <= 1.0 { left(x) } else { right(x) };
            if (v - expect).abs() > 1e-12 * expect.abs().max(1.0) {
                out.failures
                    .push(format!("p={p} x={x}: V = {v}, expected {expect}"));
            }
            let d2 = barrier_second_derivative(x, p).unwrap();
            if !(d2 > 0.0) {
                out.failures.push(format!("p={p} x={x}: V'' = {d2}"));
            }
            let h = 1e-3 * x;
            let chord =
                barrier_value(x - h, p).unwrap() + barrier_value(x + h, p).unwrap() - 2.0 * v;
            if chord < -1e-12 * v.abs().max(1.0) {
                out.failures
                    .push(format!("p={p} x={x}: midpoint convexity fails by {chord}"));
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for state in 0..100 {
        let n = rng.gen_range(3..8);
        let k = rng.gen_range(n..3 * n);
        let p = [2u32, 4, 8, 16, 32][rng.gen_range(0..5)];
        let mut kinds = Vec::new();
        let mut lengths = Vec::new();
        let mut flow = Vec::new();
        let mut slack = Vec::new();
        for _ in 1..n {
            kinds.push(EdgeKind::Augmented);
            lengths.push(rng.gen_range(1.0..2.0));
            // away from the splice at 1, where V is only C1
            let f: f64 = rng.gen_range(0.7..2.5);
            flow.push(if (f - 1.0).abs() < 0.05 { f + 0.1 } else { f });
            slack.push(0.0);
        }
        for _ in 0..k {
            kinds.push(EdgeKind::Original);
            lengths.push(rng.gen_range(0.1..2.0));
            flow.push(rng.gen_range(0.0..1.0));
            slack.push(rng.gen_range(0.01..0.1));
        }
        let m = kinds.len();
        let cost: f64 = lengths.iter().zip(&flow).map(|(l, f)| l * f).sum();
        let target = cost - rng.gen_range(0.05..1.0) * cost;
        let eval = |f: &[f64]| {
            potential(
                &FlowView {
                    kinds: &kinds,
                    lengths: &lengths,
                    flow: f,
                    slack: &slack,
                },
                target,
                m,
                p,
            )
            .unwrap()
        };
        let weights: Vec<f64> = (0..m)
            .map(|e| edge_weight(kinds[e], flow[e], slack[e], p).unwrap())
            .collect();
        let grad = gradient(&lengths, &weights, cost - target, m).unwrap();
        out.gradient_states += 1;
        for e in 0..m {
            // fourth-order central difference
            let h =
                1e-3 * ((flow[e] + slack[e]) / (p as f64 + 1.0)).min((cost - target) / lengths[e]);
            let at = |t: f64| {
                let mut f = flow.clone();
                f[e] += t;
                eval(&f)
            };
            let fd = (8.0 * (at(h) - at(-h)) - (at(2.0 * h) - at(-2.0 * h))) / (12.0 * h);
            let err = (fd - grad[e]).abs() / grad[e].abs().max(1.0);
            out.worst_gradient_error = out.worst_gradient_error.max(err);
            if err > 1e-7 {
                out.failures.push(format!(
                    "state {state} edge {e} (p={p}): gradient {} vs difference {fd}",
                    grad[e]
                ));
            }
        }
    }
    out
}
