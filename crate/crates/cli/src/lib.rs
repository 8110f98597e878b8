//! Verification harness and artifact emitter for the deformed Fock space
//! engine: spec loading, the structural check battery, bundled example
//! models with golden data, and deterministic JSON reports.

pub mod emit;
pub mod fixtures;
pub mod pool;
pub mod realization;
pub mod relations;
pub mod report;
pub mod rng;
pub mod runner;
pub mod spec_io;
