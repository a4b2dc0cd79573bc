//! File formats and the benchmark harness behind the `revsec` binary.

pub mod bench;
pub mod pla;
pub mod real;
