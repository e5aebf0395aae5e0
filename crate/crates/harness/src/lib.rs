//! Experiment harness: instance generators, exhaustive families, the
//! ratio-report experiment runner, and the acceptance verification gate.

pub mod experiment;
pub mod families;
pub mod gen;
pub mod verification;
