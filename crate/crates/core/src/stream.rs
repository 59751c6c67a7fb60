//! Text streams of insertions and queries, and a seeded stream generator.
//!
//! ```text
//! # comment
//! h 4          header: 4 vertices, source is vertex 1
//! a 1 2 5      insert arc 1 -> 2 of length 5
//! q 2          distance query
//! p 2          path query
//! ```
//!
//! Vertices are 1-based in text and 0-based in [`Op`].

use std::fmt::Write as _;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{DynamicGraph, EdgeKind, VertexId};
use crate::oracle::dijkstra;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StreamError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: operation before the header")]
    MissingHeader { line: usize },
    #[error("line {line}: vertex {vertex} outside 1..={n}")]
    VertexOutOfRange {
        line: usize,
        vertex: usize,
        n: usize,
    },
    #[error("line {line}: arc length must be at least 1")]
    ZeroLength { line: usize },
    #[error("invalid generator spec: {0}")]
    Spec(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    Header {
        n: usize,
    },
    Insert {
        u: VertexId,
        v: VertexId,
        length: u64,
    },
    Query {
        v: VertexId,
    },
    Path {
        v: VertexId,
    },
}

fn malformed(line: usize, message: impl Into<String>) -> StreamError {
    StreamError::Malformed {
        line,
        message: message.into(),
    }
}

pub fn parse_stream(text: &str) -> Result<Vec<Op>, StreamError> {
    let mut ops = Vec::new();
    let mut n: Option<usize> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        let mut fields = content.split_whitespace();
        let tag = fields.next().unwrap_or_default();
        let nums: Vec<u64> = fields
            .map(|f| {
                f.parse::<u64>()
                    .map_err(|_| malformed(line, format!("bad number `{f}`")))
            })
            .collect::<Result<_, _>>()?;
        let arity = |k: usize| {
            if nums.len() == k {
                Ok(())
            } else {
                Err(malformed(
                    line,
                    format!("`{tag}` takes {k} fields, got {}", nums.len()),
                ))
            }
        };
        if tag == "h" {
            arity(1)?;
            if n.is_some() {
                return Err(malformed(line, "duplicate header"));
            }
            if nums[0] < 1 {
                return Err(malformed(line, "header needs at least one vertex"));
            }
            n = Some(nums[0] as usize);
            ops.push(Op::Header {
                n: nums[0] as usize,
            });
            continue;
        }
        let Some(n) = n else {
            if matches!(tag, "a" | "q" | "p") {
                return Err(StreamError::MissingHeader { line });
            }
            return Err(malformed(line, format!("unknown operation `{tag}`")));
        };
        let vertex = |x: u64| {
            if x >= 1 && x as usize <= n {
                Ok(x as usize - 1)
            } else {
                Err(StreamError::VertexOutOfRange {
                    line,
                    vertex: x as usize,
                    n,
                })
            }
        };
        let op = match tag {
            "a" => {
                arity(3)?;
                if nums[2] == 0 {
                    return Err(StreamError::ZeroLength { line });
                }
                Op::Insert {
                    u: vertex(nums[0])?,
                    v: vertex(nums[1])?,
                    length: nums[2],
                }
            }
            "q" => {
                arity(1)?;
                Op::Query {
                    v: vertex(nums[0])?,
                }
            }
            "p" => {
                arity(1)?;
                Op::Path {
                    v: vertex(nums[0])?,
                }
            }
            other => return Err(malformed(line, format!("unknown operation `{other}`"))),
        };
        ops.push(op);
    }
    Ok(ops)
}

pub fn format_stream(ops: &[Op]) -> String {
    let mut out = String::new();
    for op in ops {
        match *op {
            Op::Header { n } => writeln!(out, "h {n}"),
            Op::Insert { u, v, length } => writeln!(out, "a {} {} {length}", u + 1, v + 1),
            Op::Query { v } => writeln!(out, "q {}", v + 1),
            Op::Path { v } => writeln!(out, "p {}", v + 1),
        }
        .expect("writing to a String");
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pattern {
    Uniform,
    /// Mostly insertions that shorten some current distance.
    ShortcutHeavy,
    /// A long chain from the source, then cheap shortcuts from the source.
    DistanceCollapse,
}

impl FromStr for Pattern {
    type Err = StreamError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "uniform" => Ok(Pattern::Uniform),
            "shortcut-heavy" => Ok(Pattern::ShortcutHeavy),
            "distance-collapse" => Ok(Pattern::DistanceCollapse),
            other => Err(StreamError::Spec(format!("unknown pattern `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenSpec {
    pub n: usize,
    pub insertions: usize,
    pub wmax: u64,
    pub pattern: Pattern,
    pub seed: u64,
}

impl GenSpec {
    /// Parses `gen:n=16,insertions=100,wmax=32,pattern=uniform[,seed=7]`;
    /// `seed` falls back to `default_seed`.
    pub fn parse(spec: &str, default_seed: u64) -> Result<Self, StreamError> {
        let body = spec
            .strip_prefix("gen:")
            .ok_or_else(|| StreamError::Spec("expected `gen:` prefix".into()))?;
        let mut out = GenSpec {
            n: 16,
            insertions: 64,
            wmax: 32,
            pattern: Pattern::Uniform,
            seed: default_seed,
        };
        for pair in body.split(',').filter(|p| !p.is_empty()) {
            let (key, value) = pair
                .split_once('=')
                .ok_or_else(|| StreamError::Spec(format!("expected key=value, got `{pair}`")))?;
            let number = || {
                value
                    .parse::<u64>()
                    .map_err(|_| StreamError::Spec(format!("bad value for {key}")))
            };
            match key {
                "n" => out.n = number()? as usize,
                "insertions" => out.insertions = number()? as usize,
                "wmax" => out.wmax = number()?,
                "seed" => out.seed = number()?,
                "pattern" => out.pattern = value.parse()?,
                other => return Err(StreamError::Spec(format!("unknown key `{other}`"))),
            }
        }
        Ok(out)
    }
}

/// Reproducible stream: a header, `insertions` arcs, a distance query after
/// every arc and a path query after every eighth.
pub fn generate(spec: &GenSpec) -> Result<String, StreamError> {
    Ok(format_stream(&generate_ops(spec)?))
}

pub fn generate_ops(spec: &GenSpec) -> Result<Vec<Op>, StreamError> {
    if spec.n < 2 {
        return Err(StreamError::Spec("need n >= 2".into()));
    }
    if spec.wmax < 1 {
        return Err(StreamError::Spec("need wmax >= 1".into()));
    }
    let n = spec.n;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut g = DynamicGraph::new(n, 0).expect("n >= 2");
    let mut ops = vec![Op::Header { n }];
    let push = |ops: &mut Vec<Op>,
                g: &mut DynamicGraph,
                rng: &mut ChaCha8Rng,
                u: usize,
                v: usize,
                length: u64| {
        g.insert_edge(u, v, length, EdgeKind::Original)
            .expect("vertices in range");
        ops.push(Op::Insert { u, v, length });
        let count = g.edge_count();
        ops.push(Op::Query {
            v: rng.gen_range(0..n),
        });
        if count % 8 == 0 {
            ops.push(Op::Path {
                v: rng.gen_range(0..n),
            });
        }
    };
    let random_arc = |rng: &mut ChaCha8Rng| {
        let u = rng.gen_range(0..n);
        let mut v = rng.gen_range(0..n - 1);
        if v >= u {
            v += 1;
        }
        (u, v, rng.gen_range(1..=spec.wmax))
    };
    match spec.pattern {
        Pattern::Uniform => {
            for _ in 0..spec.insertions {
                let (u, v, l) = random_arc(&mut rng);
                push(&mut ops, &mut g, &mut rng, u, v, l);
            }
        }
        Pattern::ShortcutHeavy => {
            // A heavy random spanning tree first, then mostly improving arcs.
            let mut order: Vec<usize> = (1..n).collect();
            order.shuffle(&mut rng);
            let mut reached = vec![0usize];
            let mut budget = spec.insertions;
            for &v in &order {
                if budget == 0 {
                    break;
                }
                let u = reached[rng.gen_range(0..reached.len())];
                push(&mut ops, &mut g, &mut rng, u, v, spec.wmax);
                reached.push(v);
                budget -= 1;
            }
            while budget > 0 {
                let tree = dijkstra(&g);
                let mut improving = Vec::new();
                for u in 0..n {
                    let Some(du) = tree.dist[u] else { continue };
                    for v in 0..n {
                        if u == v {
                            continue;
                        }
                        if let Some(dv) = tree.dist[v] {
                            if du + 1 < dv {
                                improving.push((u, v, du, dv));
                            }
                        }
                    }
                }
                let (u, v, l) = if !improving.is_empty() && rng.gen_bool(0.75) {
                    let (u, v, du, dv) = improving[rng.gen_range(0..improving.len())];
                    let hi = (dv - du - 1).min(spec.wmax);
                    (u, v, rng.gen_range(1..=hi))
                } else {
                    random_arc(&mut rng)
                };
                push(&mut ops, &mut g, &mut rng, u, v, l);
                budget -= 1;
            }
        }
        Pattern::DistanceCollapse => {
            let mut budget = spec.insertions;
            for v in 1..n {
                if budget == 0 {
                    break;
                }
                push(&mut ops, &mut g, &mut rng, v - 1, v, spec.wmax);
                budget -= 1;
            }
            let mut targets: Vec<usize> = (1..n).collect();
            targets.shuffle(&mut rng);
            let mut next = targets.into_iter().cycle();
            while budget > 0 {
                let v = next.next().expect("n >= 2");
                push(&mut ops, &mut g, &mut rng, 0, v, 1);
                budget -= 1;
            }
        }
    }
    Ok(ops)
}
