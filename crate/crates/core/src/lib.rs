//! Quantum circuits drawn as ASCII art, embedded in ordinary programs.
//!
//! A chunk between `QBEGIN` and `QEND` is parsed into stages, bound to
//! concrete gates and repeat counts, and run on a state-vector [`Machine`].

pub mod algorithms;
pub mod binder;
pub mod diagnostics;
pub mod error;
pub mod gates;
pub mod ir;
pub mod linalg;
pub mod machine;
pub mod oracle;
pub mod parser;

pub use binder::{bind, Bindings, BoundProgram, Step};
pub use diagnostics::{Diagnostic, DiagnosticKind, Severity};
pub use error::{Error, Result};
pub use gates::ClassicalFunction;
pub use ir::Chunk;
pub use linalg::{Amplitude, QubitIndexList, StateVector, UnitaryMatrix};
pub use machine::{Machine, MeasurementOutcome};
pub use parser::{parse_chunk, parse_document, render_ascii};
