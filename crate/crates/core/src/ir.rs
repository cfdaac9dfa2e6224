//! Stage-based intermediate representation of one chunk.
//!
//! A chunk is a list of lines (each possibly standing for several qubits),
//! an ordered list of stages holding gate and swap placements over line
//! indices, and the set of lines marked for measurement. Expansion from
//! lines to qubits waits until repeat-count variables are bound.

use std::collections::HashMap;
use std::fmt::{self, Write as _};
use std::ops::Range;

use crate::diagnostics::{Diagnostic, DiagnosticKind};
use crate::error::{Error, Result};

/// Identifiers start with an ASCII letter and continue with letters,
/// digits or underscores.
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Repeat {
    Count(usize),
    Var(String),
}

impl Repeat {
    pub fn resolve(&self, vars: &HashMap<String, i64>) -> Option<i64> {
        match self {
            Repeat::Count(n) => Some(*n as i64),
            Repeat::Var(name) => vars.get(name).copied(),
        }
    }
}

impl fmt::Display for Repeat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Repeat::Count(n) => write!(f, "{n}"),
            Repeat::Var(v) => f.write_str(v),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineSpec {
    pub repeat: Repeat,
    /// Initial value of every qubit on the line; `None` when the row has no
    /// init token.
    pub init: Option<bool>,
    /// 0-based source row the line came from.
    pub row: usize,
}

impl LineSpec {
    pub fn single(row: usize) -> Self {
        LineSpec {
            repeat: Repeat::Count(1),
            init: None,
            row,
        }
    }
}

/// Half-open range of 0-based source columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ColumnSpan {
    pub start: usize,
    pub end: usize,
}

impl ColumnSpan {
    pub fn new(start: usize, end: usize) -> Self {
        ColumnSpan { start, end }
    }

    pub fn overlaps(&self, other: &ColumnSpan) -> bool {
        self.start < other.end && other.start < self.end
    }

    pub fn as_range(&self) -> Range<usize> {
        self.start..self.end
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GatePlacement {
    pub gate_id: String,
    /// Strictly increasing line indices fed to the gate, top line first.
    pub lines: Vec<usize>,
    pub span: ColumnSpan,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SwapPlacement {
    pub line_a: usize,
    pub line_b: usize,
    pub column: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Stage {
    pub gates: Vec<GatePlacement>,
    pub swaps: Vec<SwapPlacement>,
}

impl Stage {
    pub fn is_empty(&self) -> bool {
        self.gates.is_empty() && self.swaps.is_empty()
    }

    fn sort(&mut self) {
        self.gates.sort_by(|a, b| a.lines.cmp(&b.lines).then(a.span.cmp(&b.span)));
        self.swaps.sort_by_key(|s| (s.line_a, s.line_b, s.column));
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Chunk {
    /// Argument of `QBEGIN(...)`, if any.
    pub machine_name: Option<String>,
    pub lines: Vec<LineSpec>,
    pub stages: Vec<Stage>,
    pub measured_lines: Vec<usize>,
}

impl Chunk {
    pub fn num_lines(&self) -> usize {
        self.lines.len()
    }

    pub fn has_init(&self) -> bool {
        self.lines.iter().any(|l| l.init.is_some())
    }

    /// Sorts placements inside every stage by first line.
    pub fn canonicalize(&mut self) {
        for stage in &mut self.stages {
            for swap in &mut stage.swaps {
                if swap.line_a > swap.line_b {
                    std::mem::swap(&mut swap.line_a, &mut swap.line_b);
                }
            }
            stage.sort();
        }
    }

    /// Source row of `line`, or of the nearest existing line.
    fn row_of(&self, line: usize) -> usize {
        self.lines
            .get(line)
            .or_else(|| self.lines.last())
            .map_or(0, |l| l.row)
    }

    pub fn to_canonical_text(&self) -> String {
        let mut out = String::new();
        match &self.machine_name {
            Some(name) => writeln!(out, "chunk {name}").unwrap(),
            None => out.push_str("chunk\n"),
        }
        for (i, line) in self.lines.iter().enumerate() {
            write!(out, "line {i} repeat {}", line.repeat).unwrap();
            if let Some(bit) = line.init {
                write!(out, " init {}", bit as u8).unwrap();
            }
            writeln!(out, " row {}", line.row + 1).unwrap();
        }
        for (s, stage) in self.stages.iter().enumerate() {
            writeln!(out, "stage {s}").unwrap();
            let mut entries: Vec<(usize, String)> = stage
                .gates
                .iter()
                .map(|g| {
                    (
                        g.lines.first().copied().unwrap_or(0),
                        format!(
                            "  gate {} lines {} cols {}-{}",
                            g.gate_id,
                            join(&g.lines),
                            g.span.start + 1,
                            g.span.end
                        ),
                    )
                })
                .chain(stage.swaps.iter().map(|w| {
                    (
                        w.line_a.min(w.line_b),
                        format!("  swap {} {} col {}", w.line_a, w.line_b, w.column + 1),
                    )
                }))
                .collect();
            entries.sort_by_key(|(first, _)| *first);
            for (_, e) in entries {
                writeln!(out, "{e}").unwrap();
            }
        }
        if self.measured_lines.is_empty() {
            out.push_str("measure none\n");
        } else {
            writeln!(out, "measure {}", join(&self.measured_lines)).unwrap();
        }
        out.push_str("end\n");
        out
    }

    /// Parses one or more chunks in canonical text form.
    pub fn parse_canonical_text(text: &str) -> Result<Vec<Chunk>> {
        CanonicalReader::default().read(text)
    }
}

fn join(xs: &[usize]) -> String {
    xs.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

#[derive(Default)]
struct CanonicalReader {
    chunks: Vec<Chunk>,
    current: Option<Chunk>,
}

impl CanonicalReader {
    fn read(mut self, text: &str) -> Result<Vec<Chunk>> {
        for (i, raw) in text.lines().enumerate() {
            let words: Vec<&str> = raw.split_whitespace().collect();
            if words.is_empty() {
                continue;
            }
            self.line(&words)
                .map_err(|msg| Error::Validation(format!("IR line {}: {msg}", i + 1)))?;
        }
        if self.current.is_some() {
            return Err(Error::Validation("IR text ends inside a chunk".into()));
        }
        Ok(self.chunks)
    }

    fn chunk(&mut self) -> std::result::Result<&mut Chunk, String> {
        self.current.as_mut().ok_or_else(|| "outside of a chunk".to_string())
    }

    fn line(&mut self, words: &[&str]) -> std::result::Result<(), String> {
        let num = |s: &str| s.parse::<usize>().map_err(|_| format!("expected a number, got `{s}`"));
        let list = |s: &str| s.split(',').map(num).collect::<std::result::Result<Vec<_>, _>>();
        let one_based = |s: &str| num(s)?.checked_sub(1).ok_or_else(|| "positions are 1-based".to_string());
        match words {
            ["chunk", rest @ ..] => {
                if self.current.is_some() {
                    return Err("nested chunk".into());
                }
                self.current = Some(Chunk {
                    machine_name: rest.first().map(|s| s.to_string()),
                    ..Chunk::default()
                });
            }
            ["line", idx, "repeat", rep, rest @ ..] => {
                let chunk = self.chunk()?;
                if num(idx)? != chunk.lines.len() {
                    return Err(format!("line {idx} out of order"));
                }
                let repeat = match rep.parse::<usize>() {
                    Ok(n) => Repeat::Count(n),
                    Err(_) => Repeat::Var(rep.to_string()),
                };
                let (init, row) = match rest {
                    ["init", bit, "row", row] => (Some(num(bit)? == 1), one_based(row)?),
                    ["row", row] => (None, one_based(row)?),
                    _ => return Err("expected `[init b] row r`".into()),
                };
                chunk.lines.push(LineSpec { repeat, init, row });
            }
            ["stage", idx] => {
                let chunk = self.chunk()?;
                if num(idx)? != chunk.stages.len() {
                    return Err(format!("stage {idx} out of order"));
                }
                chunk.stages.push(Stage::default());
            }
            ["gate", id, "lines", lines, "cols", cols] => {
                let (a, b) = cols.split_once('-').ok_or("expected `cols a-b`")?;
                let placement = GatePlacement {
                    gate_id: id.to_string(),
                    lines: list(lines)?,
                    span: ColumnSpan::new(one_based(a)?, num(b)?),
                };
                self.chunk()?
                    .stages
                    .last_mut()
                    .ok_or("gate before any stage")?
                    .gates
                    .push(placement);
            }
            ["swap", a, b, "col", col] => {
                let swap = SwapPlacement {
                    line_a: num(a)?,
                    line_b: num(b)?,
                    column: one_based(col)?,
                };
                self.chunk()?
                    .stages
                    .last_mut()
                    .ok_or("swap before any stage")?
                    .swaps
                    .push(swap);
            }
            ["measure", "none"] => self.chunk()?.measured_lines.clear(),
            ["measure", lines] => self.chunk()?.measured_lines = list(lines)?,
            ["end"] => {
                let chunk = self.current.take().ok_or("`end` outside of a chunk")?;
                self.chunks.push(chunk);
            }
            _ => return Err(format!("unrecognized `{}`", words.join(" "))),
        }
        Ok(())
    }
}

/// Checks every structural invariant of a chunk. An empty result means the
/// chunk is well formed.
pub fn validate(chunk: &Chunk) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    let n = chunk.num_lines();

    for line in &chunk.lines {
        match &line.repeat {
            Repeat::Count(0) => diags.push(Diagnostic::error(
                DiagnosticKind::Domain,
                line.row,
                0,
                "repeat count must be at least 1",
            )),
            Repeat::Var(v) if !is_identifier(v) => diags.push(Diagnostic::error(
                DiagnosticKind::Syntax,
                line.row,
                0,
                format!("`{v}` is not a valid variable name"),
            )),
            _ => {}
        }
    }

    for stage in &chunk.stages {
        let mut owner: Vec<Option<String>> = vec![None; n];
        let mut claim = |line: usize, what: String, col: usize, diags: &mut Vec<Diagnostic>| {
            if line >= n {
                diags.push(Diagnostic::error(
                    DiagnosticKind::OutOfRange,
                    chunk.row_of(line),
                    col,
                    format!("{what} refers to line {line} but the chunk has {n} line(s)"),
                ));
                return;
            }
            if let Some(prev) = &owner[line] {
                diags.push(Diagnostic::error(
                    DiagnosticKind::Overlap,
                    chunk.lines[line].row,
                    col,
                    format!("{what} overlaps {prev} on line {line} within one stage"),
                ));
            } else {
                owner[line] = Some(what);
            }
        };
        for g in &stage.gates {
            let row = g.lines.first().map_or(0, |&l| chunk.row_of(l));
            if !is_identifier(&g.gate_id) {
                diags.push(Diagnostic::error(
                    DiagnosticKind::Syntax,
                    row,
                    g.span.start,
                    format!("`{}` is not a valid gate identifier", g.gate_id),
                ));
            }
            if g.lines.is_empty() {
                diags.push(Diagnostic::error(
                    DiagnosticKind::Syntax,
                    row,
                    g.span.start,
                    format!("gate {} has no lines", g.gate_id),
                ));
            }
            if g.lines.windows(2).any(|w| w[0] >= w[1]) {
                diags.push(Diagnostic::error(
                    DiagnosticKind::Syntax,
                    row,
                    g.span.start,
                    format!("gate {} lines {:?} are not strictly increasing", g.gate_id, g.lines),
                ));
            }
            for &l in &g.lines {
                claim(l, format!("gate {}", g.gate_id), g.span.start, &mut diags);
            }
        }
        for s in &stage.swaps {
            if s.line_a == s.line_b {
                diags.push(Diagnostic::error(
                    DiagnosticKind::SwapArity,
                    chunk.row_of(s.line_a),
                    s.column,
                    "swap needs two distinct lines",
                ));
                continue;
            }
            for l in [s.line_a, s.line_b] {
                claim(l, "swap".to_string(), s.column, &mut diags);
            }
            if let (Some(a), Some(b)) = (chunk.lines.get(s.line_a), chunk.lines.get(s.line_b)) {
                if a.repeat != b.repeat {
                    diags.push(Diagnostic::error(
                        DiagnosticKind::RepeatMismatch,
                        b.row,
                        s.column,
                        format!(
                            "swap between lines with different repeat counts ({} and {})",
                            a.repeat, b.repeat
                        ),
                    ));
                }
            }
        }
    }

    if chunk.measured_lines.windows(2).any(|w| w[0] >= w[1]) {
        diags.push(Diagnostic::error(
            DiagnosticKind::MeasureMark,
            chunk.row_of(0),
            0,
            "measured lines are not strictly increasing",
        ));
    }
    for &l in &chunk.measured_lines {
        if l >= n {
            diags.push(Diagnostic::error(
                DiagnosticKind::OutOfRange,
                chunk.row_of(l),
                0,
                format!("measurement of line {l} but the chunk has {n} line(s)"),
            ));
        }
    }
    diags
}

/// Where each line's qubits sit in the register.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QubitLayout {
    pub offsets: Vec<usize>,
    pub widths: Vec<usize>,
    pub total: usize,
}

impl QubitLayout {
    pub fn qubits_of(&self, line: usize) -> Range<usize> {
        self.offsets[line]..self.offsets[line] + self.widths[line]
    }

    /// Qubit positions of the given lines, in line order.
    pub fn expand(&self, lines: &[usize]) -> Vec<usize> {
        lines.iter().flat_map(|&l| self.qubits_of(l)).collect()
    }
}

/// Resolves repeat counts and lays lines out top to bottom.
pub fn qubit_layout(chunk: &Chunk, vars: &HashMap<String, i64>) -> Result<QubitLayout> {
    let mut diags = Vec::new();
    let mut widths = Vec::with_capacity(chunk.lines.len());
    for line in &chunk.lines {
        match line.repeat.resolve(vars) {
            None => diags.push(Diagnostic::error(
                DiagnosticKind::Binding,
                line.row,
                0,
                format!("unbound repeat-count variable `{}`", line.repeat),
            )),
            Some(w) if w < 1 => diags.push(Diagnostic::error(
                DiagnosticKind::Domain,
                line.row,
                0,
                format!("repeat count `{}` = {w} must be at least 1", line.repeat),
            )),
            Some(w) => widths.push(w as usize),
        }
    }
    if !diags.is_empty() {
        return Err(Error::Diagnostics(diags));
    }
    let offsets = widths
        .iter()
        .scan(0, |acc, w| {
            let off = *acc;
            *acc += w;
            Some(off)
        })
        .collect();
    Ok(QubitLayout {
        offsets,
        total: widths.iter().sum(),
        widths,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vars(pairs: &[(&str, i64)]) -> HashMap<String, i64> {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    fn three_lines(repeats: [Repeat; 3]) -> Chunk {
        Chunk {
            lines: repeats
                .into_iter()
                .enumerate()
                .map(|(row, repeat)| LineSpec {
                    repeat,
                    init: None,
                    row,
                })
                .collect(),
            ..Chunk::default()
        }
    }

    fn gate(id: &str, lines: &[usize]) -> GatePlacement {
        GatePlacement {
            gate_id: id.into(),
            lines: lines.to_vec(),
            span: ColumnSpan::new(4, 7),
        }
    }

    #[test]
    fn layout_prefix_sums() {
        let c = three_lines([Repeat::Var("n".into()), Repeat::Count(1), Repeat::Count(1)]);
        let layout = qubit_layout(&c, &vars(&[("n", 2)])).unwrap();
        assert_eq!(layout.offsets, vec![0, 2, 3]);
        assert_eq!(layout.total, 4);

        let c = three_lines([Repeat::Count(1), Repeat::Count(1), Repeat::Count(1)]);
        let layout = qubit_layout(&c, &HashMap::new()).unwrap();
        assert_eq!(layout.offsets, vec![0, 1, 2]);
        assert_eq!(layout.total, 3);
    }

    #[test]
    fn layout_errors() {
        let c = three_lines([Repeat::Var("n".into()), Repeat::Count(1), Repeat::Count(1)]);
        let err = qubit_layout(&c, &HashMap::new()).unwrap_err();
        assert_eq!(err.diagnostics()[0].kind, DiagnosticKind::Binding);
        let err = qubit_layout(&c, &vars(&[("n", 0)])).unwrap_err();
        assert_eq!(err.diagnostics()[0].kind, DiagnosticKind::Domain);
    }

    #[test]
    fn overlap_between_gate_and_swap() {
        let mut c = three_lines([Repeat::Count(1), Repeat::Count(1), Repeat::Count(1)]);
        c.stages.push(Stage {
            gates: vec![gate("G", &[0, 1])],
            swaps: vec![SwapPlacement {
                line_a: 1,
                line_b: 2,
                column: 9,
            }],
        });
        let diags = validate(&c);
        assert_eq!(diags.len(), 1, "{diags:?}");
        assert_eq!(diags[0].kind, DiagnosticKind::Overlap);
        assert!(diags[0].message.contains("line 1"));
    }

    #[test]
    fn out_of_range_line() {
        let mut c = three_lines([Repeat::Count(1), Repeat::Count(1), Repeat::Count(1)]);
        c.stages.push(Stage {
            gates: vec![gate("G", &[5])],
            swaps: vec![],
        });
        let diags = validate(&c);
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].kind, DiagnosticKind::OutOfRange);
        // validation is pure
        assert_eq!(validate(&c), diags);
    }

    #[test]
    fn canonical_text_round_trip() {
        let mut c = three_lines([Repeat::Var("n".into()), Repeat::Count(1), Repeat::Count(2)]);
        c.machine_name = Some("qm".into());
        c.lines[2].init = Some(true);
        c.stages.push(Stage {
            gates: vec![gate("A", &[0, 2])],
            swaps: vec![],
        });
        c.stages.push(Stage {
            gates: vec![],
            swaps: vec![SwapPlacement {
                line_a: 0,
                line_b: 1,
                column: 3,
            }],
        });
        c.measured_lines = vec![1];
        let text = c.to_canonical_text();
        assert_eq!(Chunk::parse_canonical_text(&text).unwrap(), vec![c]);
    }

    #[test]
    fn identifiers() {
        assert!(is_identifier("Uf"));
        assert!(is_identifier("A_1"));
        assert!(!is_identifier("1A"));
        assert!(!is_identifier(""));
        assert!(!is_identifier("_x"));
    }
}
