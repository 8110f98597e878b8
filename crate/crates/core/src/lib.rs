//! Numerical core for T-deformed Fock spaces built from Yang-Baxter
//! contraction operators.
//!
//! The crate is no_std + alloc; all state is immutable after construction and
//! every operation is a pure function.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod braid_rep;
pub mod error;
pub mod fock_space;
pub mod multi_component;
pub mod quant_ops;
pub mod tensor_core;

pub use error::CoreError;
