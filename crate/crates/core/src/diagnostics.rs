//! Located messages produced while parsing, validating and binding chunks.
//!
//! Rows and columns are stored 0-based and rendered 1-based in the
//! `file:row:col: severity: message` form.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Severity {
    Warning,
    Error,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Severity::Warning => f.write_str("warning"),
            Severity::Error => f.write_str("error"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DiagnosticKind {
    /// Malformed token or unexpected character.
    Syntax,
    /// Bar gates sharing an identifier that are not vertically aligned.
    Alignment,
    /// A column holding one or more than two swap marks.
    SwapArity,
    /// Swap between lines whose repeat counts differ.
    RepeatMismatch,
    /// `>` somewhere other than the end of a row.
    MeasureMark,
    /// QBEGIN without QEND, nested QBEGIN.
    UnterminatedChunk,
    /// QEND without QBEGIN.
    StrayDelimiter,
    /// Two placements on the same line within one stage.
    Overlap,
    /// Line index beyond the chunk.
    OutOfRange,
    /// Unknown gate identifier or variable.
    Binding,
    /// Gate arity does not match the qubits it is fed.
    Dimension,
    /// Repeat count below one.
    Domain,
    /// Problems in text outside the chunks (program file directives).
    Directive,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    pub severity: Severity,
    pub row: usize,
    pub col: usize,
    pub message: String,
}

impl Diagnostic {
    pub fn error(kind: DiagnosticKind, row: usize, col: usize, message: impl Into<String>) -> Self {
        Diagnostic {
            kind,
            severity: Severity::Error,
            row,
            col,
            message: message.into(),
        }
    }

    pub fn warning(kind: DiagnosticKind, row: usize, col: usize, message: impl Into<String>) -> Self {
        Diagnostic {
            kind,
            severity: Severity::Warning,
            row,
            col,
            message: message.into(),
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }

    /// Renders as `file:row:col: severity: message`.
    pub fn render(&self, file: &str) -> String {
        format!("{}:{}", file, self)
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}: {}: {}",
            self.row + 1,
            self.col + 1,
            self.severity,
            self.message
        )
    }
}
