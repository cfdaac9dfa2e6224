use thiserror::Error;

use crate::diagnostics::Diagnostic;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("capacity error: {0}")]
    Capacity(String),
    #[error("binding error: {0}")]
    Binding(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("usage error: {0}")]
    Usage(String),
    #[error("validation error: {0}")]
    Validation(String),
    #[error("convergence error: {0}")]
    Convergence(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
    /// Errors tied to a source location inside a chunk.
    #[error("{}", render_diagnostics(.0))]
    Diagnostics(Vec<Diagnostic>),
}

impl Error {
    pub fn diagnostics(&self) -> &[Diagnostic] {
        match self {
            Error::Diagnostics(d) => d,
            _ => &[],
        }
    }
}

fn render_diagnostics(diags: &[Diagnostic]) -> String {
    diags
        .iter()
        .map(|d| d.to_string())
        .collect::<Vec<_>>()
        .join("\n")
}
