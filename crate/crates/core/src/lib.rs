//! Reversible-logic synthesis and reverse-engineering toolkit.
//!
//! The crate synthesizes reversible Toffoli cascades from (non-reversible)
//! Boolean functions, quantifies their resistance to reverse engineering via
//! the number-of-embeddings metric, runs a black-box attack and a
//! synthesis-aware template-matching attack, and implements input/output
//! scrambling as a countermeasure.
//!
//! Modules follow the pipeline:
//!
//! - [`function`]: dense multi-output truth tables.
//! - [`bdd`]: reduced ordered BDDs (Shannon decomposition).
//! - [`synth_bdd`]: structural synthesis via a template catalog.
//! - [`embed`] + [`synth_func`]: functional synthesis (embedding into a
//!   permutation, then transformation-based gate extraction).
//! - [`circuit`]: the shared circuit IR, simulation, quantum cost.
//! - [`analyze`]: the security metric and both attacks.

pub use num_bigint;

pub mod analyze;
pub mod bdd;
pub mod bits;
pub mod circuit;
pub mod embed;
pub mod function;
pub mod synth_bdd;
pub mod synth_func;

pub use bits::Bits;
pub use circuit::{Control, LineAnnotation, Polarity, ReversibleCircuit, ToffoliGate};
pub use function::BooleanFunction;
