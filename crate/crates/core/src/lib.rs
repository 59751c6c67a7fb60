//! Incremental single-source shortest paths with `(1 + epsilon)`-approximate
//! distance estimates, driven by an interior point method whose augmented
//! edges use the high-power barrier `x^(-p) / p`.
//!
//! Start with [`engine::engine_initialize`], feed edges through
//! [`engine::SsspEngine::insert`] and read estimates or paths back. The
//! building blocks (barrier, min-ratio cycle solver, per-scale detector,
//! exact oracle) are public for experimentation.

pub mod barrier;
pub mod cli;
pub mod degree;
pub mod detector;
pub mod engine;
pub mod graph;
pub mod oracle;
pub mod solver;
pub mod stream;

pub use engine::{engine_initialize, EngineConfig, EngineError, SsspEngine};
pub use graph::{DynamicGraph, EdgeId, EdgeKind, VertexId};
