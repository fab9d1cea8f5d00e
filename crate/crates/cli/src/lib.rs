//! Library surface of the `mim` command-line tool: sweep-table builders,
//! CSV/JSON rendering, and the verification suites. The binary in `main.rs`
//! is a thin argument-parsing shell over these.

pub mod commands;
pub mod output;
pub mod verify;
