//! Program files: a few declaration lines followed by `QBEGIN`/`QEND` chunks.
//!
//! ```text
//! # Deutsch's algorithm
//! machine 2
//! seed 7
//! var n=3
//! gate Hn builtin:H^n
//! gate M matrix:0 1; 1 0
//! fn Uf table:not.tt
//! QBEGIN(qm)
//! |0>--[H]--|Uf|--[H]-->
//! |1>--[H]--|Uf|--------
//! QEND
//! ```

use std::collections::HashMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex64;
use quect::diagnostics::{Diagnostic, DiagnosticKind};
use quect::gates::{
    controlled_phase, inversion_about_mean, qft, r_gate, standard_gate, tensor_power,
};
use quect::ir::is_identifier;
use quect::parser::{extract_chunks, parse_chunk};
use quect::{Bindings, Chunk, ClassicalFunction, Error, Result, UnitaryMatrix};

#[derive(Debug, Clone, PartialEq)]
pub enum GateSpec {
    /// `builtin:NAME`, `builtin:NAME^count`, or `builtin:NAME(arg)`.
    Builtin { name: String, power: Option<String>, arg: Option<String> },
    Matrix(UnitaryMatrix),
}

#[derive(Debug, Clone)]
pub struct GateDecl {
    pub name: String,
    pub spec: GateSpec,
}

#[derive(Debug, Clone)]
pub struct ProgramFile {
    pub machine_size: Option<usize>,
    pub seed: Option<u64>,
    pub vars: Vec<(String, i64)>,
    pub gates: Vec<GateDecl>,
    pub functions: Vec<(String, ClassicalFunction)>,
    pub chunks: Vec<Chunk>,
}

fn directive_error(row: usize, col: usize, msg: impl Into<String>) -> Diagnostic {
    Diagnostic::error(DiagnosticKind::Directive, row, col, msg)
}

/// Parses `re+imi`-style entries; a bare real or imaginary part is fine.
pub fn parse_matrix(text: &str) -> std::result::Result<UnitaryMatrix, String> {
    let rows = text
        .split(';')
        .map(|row| {
            row.split_whitespace()
                .map(|e| Complex64::from_str(e).map_err(|_| format!("bad matrix entry `{e}`")))
                .collect::<std::result::Result<Vec<_>, _>>()
        })
        .collect::<std::result::Result<Vec<_>, _>>()?;
    UnitaryMatrix::from_rows(&rows).map_err(|e| e.to_string())
}

/// An angle: a decimal, or `[c*]pi[/d]` with an optional leading minus.
pub fn parse_angle(text: &str) -> Option<f64> {
    let t = text.trim();
    if let Ok(v) = t.parse::<f64>() {
        return Some(v);
    }
    let (sign, t) = match t.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, t),
    };
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n, d.trim().parse::<f64>().ok()?),
        None => (t, 1.0),
    };
    let coeff = match num.trim().split_once('*') {
        Some((c, p)) if p.trim() == "pi" => c.trim().parse::<f64>().ok()?,
        None if num.trim() == "pi" => 1.0,
        _ => return None,
    };
    Some(sign * coeff * PI / den)
}

fn parse_gate_spec(spec: &str) -> std::result::Result<GateSpec, String> {
    if let Some(m) = spec.strip_prefix("matrix:") {
        return parse_matrix(m).map(GateSpec::Matrix);
    }
    let Some(b) = spec.strip_prefix("builtin:") else {
        return Err(format!("unknown gate source `{spec}`; use builtin: or matrix:"));
    };
    let (head, arg) = match b.split_once('(') {
        Some((h, rest)) => {
            let inner = rest
                .strip_suffix(')')
                .ok_or_else(|| format!("missing `)` in `{b}`"))?;
            (h, Some(inner.trim().to_string()))
        }
        None => (b, None),
    };
    let (name, power) = match head.split_once('^') {
        Some((n, p)) => (n, Some(p.trim().to_string())),
        None => (head, None),
    };
    Ok(GateSpec::Builtin {
        name: name.trim().to_string(),
        power,
        arg,
    })
}

fn resolve_count(text: &str, vars: &HashMap<String, i64>) -> std::result::Result<usize, String> {
    let value = match text.parse::<i64>() {
        Ok(v) => v,
        Err(_) => *vars
            .get(text)
            .ok_or_else(|| format!("unbound variable `{text}`"))?,
    };
    usize::try_from(value).map_err(|_| format!("count `{text}` = {value} is negative"))
}

impl GateSpec {
    pub fn build(&self, vars: &HashMap<String, i64>) -> std::result::Result<UnitaryMatrix, String> {
        let (name, power, arg) = match self {
            GateSpec::Matrix(m) => return Ok(m.clone()),
            GateSpec::Builtin { name, power, arg } => (name.as_str(), power, arg),
        };
        let angle = || {
            let a = arg.as_deref().ok_or_else(|| format!("{name} needs an angle"))?;
            parse_angle(a).ok_or_else(|| format!("bad angle `{a}`"))
        };
        let size = || {
            let a = arg.as_deref().ok_or_else(|| format!("{name} needs a qubit count"))?;
            resolve_count(a, vars)
        };
        let err = |e: Error| e.to_string();
        let base = match name {
            "R" => r_gate(angle()?).map_err(err)?,
            "CPHASE" => controlled_phase(angle()?).map_err(err)?,
            "IM" => inversion_about_mean(size()?).map_err(err)?,
            "QFT" => qft(size()?).map_err(err)?,
            _ if arg.is_some() => return Err(format!("builtin `{name}` takes no argument")),
            _ => standard_gate(name).ok_or_else(|| format!("unknown builtin gate `{name}`"))?,
        };
        match power {
            None => Ok(base),
            Some(p) => tensor_power(&base, resolve_count(p, vars)?).map_err(|e| e.to_string()),
        }
    }
}

impl ProgramFile {
    /// Parses a program file. `base` is the directory truth-table paths are
    /// relative to.
    pub fn parse(source: &str, base: &Path) -> Result<ProgramFile> {
        let extracted = extract_chunks(source)?;
        let mut in_chunk = vec![false; source.lines().count() + 1];
        for e in &extracted {
            let last = e.grid.header_row + e.grid.rows.len() + 1;
            for flag in &mut in_chunk[e.grid.header_row..=last] {
                *flag = true;
            }
        }
        let mut file = ProgramFile {
            machine_size: None,
            seed: None,
            vars: Vec::new(),
            gates: Vec::new(),
            functions: Vec::new(),
            chunks: Vec::new(),
        };
        let mut diags = Vec::new();
        for (row, line) in source.lines().enumerate() {
            if in_chunk[row] {
                continue;
            }
            let col = line.len() - line.trim_start().len();
            let text = line.trim();
            if text.is_empty() || text.starts_with('#') {
                continue;
            }
            if let Err(msg) = file.directive(text, base) {
                diags.push(directive_error(row, col, msg));
            }
        }
        for e in &extracted {
            match parse_chunk(&e.grid) {
                Ok(c) => file.chunks.push(c),
                Err(Error::Diagnostics(d)) => diags.extend(d),
                Err(other) => return Err(other),
            }
        }
        if !diags.is_empty() {
            return Err(Error::Diagnostics(diags));
        }
        Ok(file)
    }

    fn directive(&mut self, text: &str, base: &Path) -> std::result::Result<(), String> {
        let (keyword, rest) = text.split_once(char::is_whitespace).unwrap_or((text, ""));
        let rest = rest.trim();
        match keyword {
            "machine" => {
                let k = rest.parse().map_err(|_| format!("bad machine size `{rest}`"))?;
                self.machine_size = Some(k);
            }
            "seed" => {
                self.seed = Some(rest.parse().map_err(|_| format!("bad seed `{rest}`"))?);
            }
            "var" => {
                let (name, value) = parse_assignment(rest)?;
                self.vars.push((name, value));
            }
            "gate" => {
                let (name, spec) = split_name(rest)?;
                self.gates.push(GateDecl {
                    name,
                    spec: parse_gate_spec(spec)?,
                });
            }
            "fn" => {
                let (name, spec) = split_name(rest)?;
                let path = spec
                    .strip_prefix("table:")
                    .ok_or_else(|| format!("function source `{spec}` must be table:<path>"))?;
                let full: PathBuf = base.join(path);
                let text = std::fs::read_to_string(&full)
                    .map_err(|e| format!("cannot read {}: {e}", full.display()))?;
                let f = ClassicalFunction::parse_truth_table(&text)
                    .map_err(|e| format!("{}: {e}", full.display()))?;
                self.functions.push((name, f));
            }
            other => return Err(format!("unknown directive `{other}`")),
        }
        Ok(())
    }

    /// Declarations plus `overrides`, ready for binding.
    pub fn bindings(&self, overrides: &[(String, i64)]) -> Result<Bindings> {
        let mut b = Bindings::with_standard_gates();
        for (name, value) in self.vars.iter().chain(overrides) {
            b.set_var(name.clone(), *value);
        }
        for (name, f) in &self.functions {
            b.set_function(name.clone(), f.clone());
        }
        let vars = b.vars().clone();
        for g in &self.gates {
            let m = g
                .spec
                .build(&vars)
                .map_err(|msg| Error::Binding(format!("gate `{}`: {msg}", g.name)))?;
            b.set_gate(g.name.clone(), m);
        }
        Ok(b)
    }
}

fn split_name(rest: &str) -> std::result::Result<(String, &str), String> {
    let (name, spec) = rest
        .split_once(char::is_whitespace)
        .ok_or_else(|| format!("expected `NAME SOURCE`, got `{rest}`"))?;
    if !is_identifier(name) {
        return Err(format!("`{name}` is not an identifier"));
    }
    Ok((name.to_string(), spec.trim()))
}

/// `name=int`.
pub fn parse_assignment(text: &str) -> std::result::Result<(String, i64), String> {
    let (name, value) = text
        .split_once('=')
        .ok_or_else(|| format!("expected name=value, got `{text}`"))?;
    let name = name.trim();
    if !is_identifier(name) {
        return Err(format!("`{name}` is not an identifier"));
    }
    let value = value
        .trim()
        .parse()
        .map_err(|_| format!("`{}` is not an integer", value.trim()))?;
    Ok((name.to_string(), value))
}
