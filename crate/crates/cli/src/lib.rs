//! Library side of the `g2gauge` command-line tool: text parsers for forms and
//! determinant expressions, the verification suite and report rendering.

pub mod commands;
pub mod dbio;
pub mod detexpr;
pub mod error;
pub mod formexpr;
pub mod lexer;
pub mod report;
pub mod verify;

pub use error::ParseError;
pub use formexpr::{parse_form, parse_form_ast, parse_poly};
