//! Command-line front end: map expressions, analysis commands and JSON reports.

pub mod app;
pub mod parse;
pub mod report;

pub use app::run;
pub use parse::{parse_binding, parse_expr, parse_map, ParseError, ParseErrorKind};
