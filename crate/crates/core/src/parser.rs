//! ASCII-art chunk parser.
//!
//! A chunk sits between a `QBEGIN` or `QBEGIN(name)` line and a `QEND`
//! line. Every non-blank row inside it is one circuit line:
//!
//! ```text
//! QBEGIN(qm)
//! |0>-/n/--|A|----|Uf|----
//! |1>--------[B]--|Uf|--->
//! |0>------|A|------------
//! QEND
//! ```
//!
//! * dashes and spaces are filler;
//! * `/n/` or `/3/` gives the line a repeat count (a variable or literal);
//! * `|0>` or `|1>` at the start of a row initializes every qubit on it;
//! * `[G]` is a gate on one line, `|G|` a gate over several lines: bars with
//!   the same identifier at the same columns merge into one placement, rows
//!   between them pass through;
//! * a bare `X` is half of a swap, and each column holds zero or two;
//! * a trailing `>` marks the line for measurement.
//!
//! Placements are grouped into stages as soon as possible: a placement's
//! stage is one past the latest stage already used on any of its lines.

use std::collections::BTreeMap;
use std::ops::Range;

use crate::diagnostics::{Diagnostic, DiagnosticKind};
use crate::error::{Error, Result};
use crate::ir::{
    is_identifier, validate, Chunk, ColumnSpan, GatePlacement, LineSpec, Repeat, Stage, SwapPlacement,
};

/// The rows of one chunk, addressed by (row, column).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceGrid {
    pub machine_name: Option<String>,
    /// 0-based document row of the `QBEGIN` line.
    pub header_row: usize,
    /// Row strings between the delimiters, in order.
    pub rows: Vec<String>,
}

impl SourceGrid {
    /// A grid whose header sits on row 0 and body starts on row 1.
    pub fn from_rows(machine_name: Option<&str>, rows: &[&str]) -> Self {
        SourceGrid {
            machine_name: machine_name.map(str::to_string),
            header_row: 0,
            rows: rows.iter().map(|r| r.to_string()).collect(),
        }
    }

    pub fn first_row(&self) -> usize {
        self.header_row + 1
    }

    /// Character at (row, col), space-padded past the end of short rows.
    pub fn char_at(&self, row: usize, col: usize) -> char {
        self.rows
            .get(row)
            .and_then(|r| r.chars().nth(col))
            .unwrap_or(' ')
    }

    pub fn width(&self) -> usize {
        self.rows.iter().map(|r| r.chars().count()).max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtractedChunk {
    pub grid: SourceGrid,
    /// Bytes of the document from the start of `QBEGIN` to the end of `QEND`.
    pub byte_range: Range<usize>,
}

enum Delimiter {
    Begin(Option<String>),
    End,
}

fn delimiter(line: &str, row: usize) -> std::result::Result<Option<Delimiter>, Diagnostic> {
    let trimmed = line.trim();
    let col = line.len() - line.trim_start().len();
    if trimmed == "QEND" {
        return Ok(Some(Delimiter::End));
    }
    let Some(rest) = trimmed.strip_prefix("QBEGIN") else {
        return Ok(None);
    };
    let rest = rest.trim();
    if rest.is_empty() {
        return Ok(Some(Delimiter::Begin(None)));
    }
    let name = rest
        .strip_prefix('(')
        .and_then(|r| r.strip_suffix(')'))
        .map(str::trim);
    match name {
        Some(name) if is_identifier(name) => Ok(Some(Delimiter::Begin(Some(name.to_string())))),
        Some("") => Ok(Some(Delimiter::Begin(None))),
        _ if rest.starts_with(|c: char| c.is_ascii_alphanumeric() || c == '_') => Ok(None),
        _ => Err(Diagnostic::error(
            DiagnosticKind::Syntax,
            row,
            col,
            format!("malformed chunk header `{trimmed}`; expected QBEGIN or QBEGIN(name)"),
        )),
    }
}

/// Finds every `QBEGIN`/`QEND` region in document order.
pub fn extract_chunks(source: &str) -> Result<Vec<ExtractedChunk>> {
    let mut chunks = Vec::new();
    let mut diags = Vec::new();
    let mut open: Option<(SourceGrid, usize)> = None;
    let mut offset = 0;
    for (row, raw) in source.split_inclusive('\n').enumerate() {
        let line = raw.trim_end_matches(['\n', '\r']);
        let start = offset;
        offset += raw.len();
        match delimiter(line, row) {
            Err(d) => diags.push(d),
            Ok(Some(Delimiter::Begin(name))) => {
                if let Some((grid, _)) = &open {
                    diags.push(Diagnostic::error(
                        DiagnosticKind::UnterminatedChunk,
                        row,
                        0,
                        format!(
                            "QBEGIN inside the chunk opened on row {}; chunks do not nest",
                            grid.header_row + 1
                        ),
                    ));
                }
                open = Some((
                    SourceGrid {
                        machine_name: name,
                        header_row: row,
                        rows: Vec::new(),
                    },
                    start,
                ));
            }
            Ok(Some(Delimiter::End)) => match open.take() {
                Some((grid, begin)) => chunks.push(ExtractedChunk {
                    grid,
                    byte_range: begin..start + line.len(),
                }),
                None => diags.push(Diagnostic::error(
                    DiagnosticKind::StrayDelimiter,
                    row,
                    line.len() - line.trim_start().len(),
                    "QEND without a matching QBEGIN",
                )),
            },
            Ok(None) => {
                if let Some((grid, _)) = &mut open {
                    grid.rows.push(line.to_string());
                }
            }
        }
    }
    if let Some((grid, _)) = open {
        diags.push(Diagnostic::error(
            DiagnosticKind::UnterminatedChunk,
            grid.header_row,
            0,
            "QBEGIN without a matching QEND",
        ));
    }
    if diags.is_empty() {
        Ok(chunks)
    } else {
        Err(Error::Diagnostics(diags))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Repeat(Repeat),
    Init(bool),
    SquareGate(String),
    BarGate(String),
    SwapX,
    MeasureMark,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub row: usize,
    pub span: ColumnSpan,
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Splits one chunk row into tokens. Filler produces no tokens.
pub fn tokenize_line(row: &str, row_index: usize) -> Result<Vec<Token>> {
    let chars: Vec<char> = row.chars().collect();
    let mut tokens = Vec::new();
    let mut diags = Vec::new();
    let mut err = |kind, col, msg: String| diags.push(Diagnostic::error(kind, row_index, col, msg));
    let mut started = false;
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let token = |kind, end| Token {
            kind,
            row: row_index,
            span: ColumnSpan::new(i, end),
        };
        match c {
            ' ' => {
                i += 1;
                continue;
            }
            '-' => i += 1,
            '|' if !started
                && matches!(chars.get(i + 1), Some('0' | '1'))
                && chars.get(i + 2) == Some(&'>') =>
            {
                tokens.push(token(TokenKind::Init(chars[i + 1] == '1'), i + 3));
                i += 3;
            }
            '|' | '[' | '/' => {
                let close = match c {
                    '|' => '|',
                    '[' => ']',
                    _ => '/',
                };
                let mut j = i + 1;
                while j < chars.len() && is_ident_char(chars[j]) {
                    j += 1;
                }
                let text: String = chars[i + 1..j].iter().collect();
                if chars.get(j) != Some(&close) {
                    let what = match c {
                        '|' => "bar gate",
                        '[' => "bracket gate",
                        _ => "repeat count",
                    };
                    match chars.get(j) {
                        None => err(
                            DiagnosticKind::Syntax,
                            i,
                            format!("unterminated {what}; expected `{close}`"),
                        ),
                        Some(&other) => err(
                            DiagnosticKind::Syntax,
                            j,
                            format!("unexpected `{other}` in {what}; expected `{close}`"),
                        ),
                    }
                    i = j.max(i + 1);
                    started = true;
                    continue;
                }
                if text.is_empty() {
                    err(DiagnosticKind::Syntax, i, "empty identifier".into());
                } else if c == '/' {
                    match text.parse::<usize>() {
                        Ok(0) => err(
                            DiagnosticKind::Domain,
                            i,
                            "repeat count must be at least 1".into(),
                        ),
                        Ok(n) => tokens.push(token(TokenKind::Repeat(Repeat::Count(n)), j + 1)),
                        Err(_) if is_identifier(&text) => {
                            tokens.push(token(TokenKind::Repeat(Repeat::Var(text)), j + 1))
                        }
                        Err(_) => err(
                            DiagnosticKind::Syntax,
                            i + 1,
                            format!("`{text}` is neither a count nor a variable name"),
                        ),
                    }
                } else if !is_identifier(&text) {
                    err(
                        DiagnosticKind::Syntax,
                        i + 1,
                        format!("gate identifier `{text}` must start with a letter"),
                    );
                } else if c == '|' {
                    tokens.push(token(TokenKind::BarGate(text), j + 1));
                } else {
                    tokens.push(token(TokenKind::SquareGate(text), j + 1));
                }
                i = j + 1;
            }
            'X' if !chars.get(i + 1).is_some_and(|&n| is_ident_char(n)) => {
                tokens.push(token(TokenKind::SwapX, i + 1));
                i += 1;
            }
            '>' => {
                if let Some(extra) = (i + 1..chars.len()).find(|&j| chars[j] != ' ') {
                    err(
                        DiagnosticKind::MeasureMark,
                        i,
                        format!(
                            "`>` must be the last character of a row (found `{}` after it)",
                            chars[extra]
                        ),
                    );
                    i = chars.len();
                    continue;
                }
                tokens.push(token(TokenKind::MeasureMark, i + 1));
                i += 1;
            }
            '\t' => {
                err(
                    DiagnosticKind::Syntax,
                    i,
                    "tab characters break column alignment; use spaces".into(),
                );
                i += 1;
            }
            c if is_ident_char(c) => {
                let mut j = i;
                while j < chars.len() && is_ident_char(chars[j]) {
                    j += 1;
                }
                let word: String = chars[i..j].iter().collect();
                err(
                    DiagnosticKind::Syntax,
                    i,
                    format!("bare identifier `{word}`; gates go inside [..] or |..|"),
                );
                i = j;
            }
            other => {
                err(DiagnosticKind::Syntax, i, format!("unexpected character `{other}`"));
                i += 1;
            }
        }
        started = true;
    }
    if diags.is_empty() {
        Ok(tokens)
    } else {
        Err(Error::Diagnostics(diags))
    }
}

/// A placement awaiting its stage.
enum Pending {
    Gate(GatePlacement),
    Swap(SwapPlacement),
}

impl Pending {
    fn lines(&self) -> Vec<usize> {
        match self {
            Pending::Gate(g) => g.lines.clone(),
            Pending::Swap(s) => vec![s.line_a, s.line_b],
        }
    }

    fn sort_key(&self) -> (usize, usize) {
        match self {
            Pending::Gate(g) => (g.span.start, g.lines[0]),
            Pending::Swap(s) => (s.column, s.line_a),
        }
    }
}

/// Parses one grid into chunk IR, reporting every problem found.
pub fn parse_chunk(grid: &SourceGrid) -> Result<Chunk> {
    let mut diags = Vec::new();
    let mut lines: Vec<LineSpec> = Vec::new();
    let mut measured = Vec::new();
    let mut square: Vec<(usize, String, ColumnSpan)> = Vec::new();
    let mut bars: BTreeMap<String, Vec<(usize, ColumnSpan)>> = BTreeMap::new();
    let mut swap_columns: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();

    for (offset, text) in grid.rows.iter().enumerate() {
        if text.trim().is_empty() {
            continue;
        }
        let row = grid.first_row() + offset;
        let line = lines.len();
        let tokens = match tokenize_line(text, row) {
            Ok(t) => t,
            Err(e) => {
                diags.extend(e.diagnostics().iter().cloned());
                Vec::new()
            }
        };
        let mut spec = LineSpec::single(row);
        let mut saw_repeat = false;
        for tok in tokens {
            match tok.kind {
                TokenKind::Repeat(r) => {
                    if saw_repeat {
                        diags.push(Diagnostic::error(
                            DiagnosticKind::Syntax,
                            row,
                            tok.span.start,
                            "a line takes at most one repeat count",
                        ));
                    }
                    saw_repeat = true;
                    spec.repeat = r;
                }
                TokenKind::Init(bit) => spec.init = Some(bit),
                TokenKind::SquareGate(id) => square.push((line, id, tok.span)),
                TokenKind::BarGate(id) => bars.entry(id).or_default().push((line, tok.span)),
                TokenKind::SwapX => swap_columns
                    .entry(tok.span.start)
                    .or_default()
                    .push((line, row)),
                TokenKind::MeasureMark => measured.push(line),
            }
        }
        lines.push(spec);
    }

    if lines.is_empty() {
        diags.push(Diagnostic::error(
            DiagnosticKind::Syntax,
            grid.header_row,
            0,
            "chunk has no lines",
        ));
    }

    let mut pending: Vec<Pending> = square
        .into_iter()
        .map(|(line, gate_id, span)| {
            Pending::Gate(GatePlacement {
                gate_id,
                lines: vec![line],
                span,
            })
        })
        .collect();

    for (id, occurrences) in bars {
        // Equal identifier and equal columns merge; overlapping columns
        // that are not equal are misaligned.
        let mut groups: BTreeMap<ColumnSpan, Vec<usize>> = BTreeMap::new();
        for &(line, span) in &occurrences {
            groups.entry(span).or_default().push(line);
        }
        let spans: Vec<ColumnSpan> = groups.keys().copied().collect();
        for (a, sa) in spans.iter().enumerate() {
            for sb in &spans[a + 1..] {
                if sa.overlaps(sb) {
                    let line = groups[sb][0];
                    let anchor = groups[sa][0];
                    diags.push(Diagnostic::error(
                        DiagnosticKind::Alignment,
                        lines[line].row,
                        sb.start,
                        format!(
                            "gate |{id}| spans columns {}-{} here but {}-{} on row {}; \
                             multi-line gates must be vertically aligned",
                            sb.start + 1,
                            sb.end,
                            sa.start + 1,
                            sa.end,
                            lines[anchor].row + 1
                        ),
                    ));
                }
            }
        }
        for (span, mut group) in groups {
            group.sort_unstable();
            pending.push(Pending::Gate(GatePlacement {
                gate_id: id.clone(),
                lines: group,
                span,
            }));
        }
    }

    for (column, marks) in swap_columns {
        if marks.len() != 2 {
            for &(_, row) in &marks {
                diags.push(Diagnostic::error(
                    DiagnosticKind::SwapArity,
                    row,
                    column,
                    format!(
                        "column {} has {} swap mark(s); each column holds zero or exactly two X's",
                        column + 1,
                        marks.len()
                    ),
                ));
            }
            continue;
        }
        pending.push(Pending::Swap(SwapPlacement {
            line_a: marks[0].0,
            line_b: marks[1].0,
            column,
        }));
    }

    // ASAP: left-to-right order on each line is the start-column order.
    pending.sort_by_key(Pending::sort_key);
    let mut next_free = vec![0usize; lines.len()];
    let mut stages: Vec<Stage> = Vec::new();
    for p in pending {
        let on = p.lines();
        let stage = on.iter().map(|&l| next_free[l]).max().unwrap_or(0);
        for &l in &on {
            next_free[l] = stage + 1;
        }
        if stages.len() <= stage {
            stages.resize_with(stage + 1, Stage::default);
        }
        match p {
            Pending::Gate(g) => stages[stage].gates.push(g),
            Pending::Swap(s) => stages[stage].swaps.push(s),
        }
    }

    let mut chunk = Chunk {
        machine_name: grid.machine_name.clone(),
        lines,
        stages,
        measured_lines: measured,
    };
    chunk.canonicalize();
    if diags.is_empty() {
        diags.extend(validate(&chunk).into_iter().filter(|d| d.is_error()));
    }
    if diags.is_empty() {
        Ok(chunk)
    } else {
        diags.sort_by_key(|d| (d.row, d.col));
        diags.dedup();
        Err(Error::Diagnostics(diags))
    }
}

/// Extracts and parses every chunk of a document.
pub fn parse_document(source: &str) -> Result<Vec<Chunk>> {
    let mut chunks = Vec::new();
    let mut diags = Vec::new();
    for extracted in extract_chunks(source)? {
        match parse_chunk(&extracted.grid) {
            Ok(c) => chunks.push(c),
            Err(Error::Diagnostics(d)) => diags.extend(d),
            Err(e) => return Err(e),
        }
    }
    if diags.is_empty() {
        Ok(chunks)
    } else {
        Err(Error::Diagnostics(diags))
    }
}

/// Draws a chunk as ASCII art that parses back to the same structure.
///
/// Each placement gets its own column slot, stages left to right.
pub fn render_ascii(chunk: &Chunk) -> String {
    let n = chunk.num_lines();
    let mut rows: Vec<String> = vec![String::new(); n];
    let pad_all = |rows: &mut Vec<String>, fill: &dyn Fn(usize) -> String| {
        for (i, r) in rows.iter_mut().enumerate() {
            r.push_str(&fill(i));
        }
    };

    if chunk.has_init() {
        pad_all(&mut rows, &|i| match chunk.lines[i].init {
            Some(b) => format!("|{}>", b as u8),
            None => "---".into(),
        });
    }
    pad_all(&mut rows, &|_| "-".into());
    let repeat_text = |i: usize| match &chunk.lines[i].repeat {
        Repeat::Count(1) => String::new(),
        r => format!("/{r}/"),
    };
    let width = (0..n).map(|i| repeat_text(i).len()).max().unwrap_or(0);
    if width > 0 {
        pad_all(&mut rows, &|i| format!("{:-<width$}-", repeat_text(i)));
    }

    for stage in &chunk.stages {
        for g in &stage.gates {
            let single = g.lines.len() == 1;
            let w = g.gate_id.len() + 2;
            pad_all(&mut rows, &|i| {
                if !g.lines.contains(&i) {
                    "-".repeat(w + 1)
                } else if single {
                    format!("[{}]-", g.gate_id)
                } else {
                    format!("|{}|-", g.gate_id)
                }
            });
        }
        for s in &stage.swaps {
            pad_all(&mut rows, &|i| {
                if i == s.line_a || i == s.line_b {
                    "X-".into()
                } else {
                    "--".into()
                }
            });
        }
    }
    pad_all(&mut rows, &|i| {
        if chunk.measured_lines.contains(&i) {
            "->".into()
        } else {
            "--".into()
        }
    });

    let mut out = match &chunk.machine_name {
        Some(name) => format!("QBEGIN({name})\n"),
        None => "QBEGIN\n".to_string(),
    };
    for r in rows {
        out.push_str(&r);
        out.push('\n');
    }
    out.push_str("QEND\n");
    out
}
