//! Applications for the mts engine: linear extensions, spanning trees,
//! Galton-Watson trees and a budgeted SAT solver.

pub mod gwtree;
pub mod sat;
pub mod spantree;
pub mod topsorts;

use thiserror::Error;

/// Problem input that could not be turned into an application instance.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InputError {
    #[error("empty input")]
    Empty,
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("{0}")]
    Invalid(String),
}

/// Parses a line holding exactly `K` nonnegative integers.
pub(crate) fn parse_ints<const K: usize>(text: &str, line: usize) -> Result<[usize; K], InputError> {
    let mut out = [0usize; K];
    let mut fields = text.split_whitespace();
    for slot in out.iter_mut() {
        let f = fields.next().ok_or_else(|| InputError::Syntax {
            line,
            msg: format!("expected {K} integers"),
        })?;
        *slot = f.parse().map_err(|_| InputError::Syntax {
            line,
            msg: format!("`{f}` is not a nonnegative integer"),
        })?;
    }
    if fields.next().is_some() {
        return Err(InputError::Syntax {
            line,
            msg: format!("expected {K} integers"),
        });
    }
    Ok(out)
}
