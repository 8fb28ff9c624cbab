//! File formats, instance generation and the subcommands behind the `agler`
//! binary.

pub mod commands;
pub mod format;
pub mod gen;

pub use commands::{cmd_certify, cmd_lab, cmd_verify, Settings};
pub use gen::gen_stable;
