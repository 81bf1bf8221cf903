//! Command-line layer: expression grammar, scenario configs, grid sweeps and
//! the verification suite.

pub mod expr;
pub mod gridrun;
pub mod scenario;
pub mod verify;
