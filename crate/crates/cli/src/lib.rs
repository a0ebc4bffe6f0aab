//! File formats, report rendering and the verification harness behind the
//! `hadamat` binary.

pub mod harness;
pub mod io;
pub mod render;

pub use harness::{run_suite, HarnessConfig, SuiteReport, Theorem, UnknownTheorem};
pub use io::{fmt_real, parse_matrix, parse_rep, render_matrix, render_rep, Format, ParseError, Rep};
