//! Reference algorithms written as chunks driven from ordinary Rust.

use std::collections::HashMap;
use std::f64::consts::PI;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::binder::{bind, Bindings, BoundProgram};
use crate::error::{Error, Result};
use crate::gates::{
    controlled_phase, hadamard, inversion_about_mean, ladder_angle, tensor_power, ClassicalFunction,
};
use crate::machine::Machine;
use crate::oracle;
use crate::parser::parse_document;

pub const DEUTSCH_CHUNK: &str = "\
QBEGIN(qm)
|0>--[H]--|Uf|--[H]-->
|1>--[H]--|Uf|--------
QEND
";

pub const DEUTSCH_JOZSA_CHUNK: &str = "\
QBEGIN(qm)
|0>-/n/--[Hn]--|Uf|--[Hn]-->
|1>------[H]---|Uf|---------
QEND
";

pub const SIMON_CHUNK: &str = "\
QBEGIN(qm)
|0>-/n/--[Hn]--|Uf|--[Hn]-->
|0>-/n/--------|Uf|---------
QEND
";

pub const GROVER_PREPARE_CHUNK: &str = "\
QBEGIN(qm)
|0>-/n/--[Hn]--
|1>------[H]---
QEND
";

pub const GROVER_ITERATE_CHUNK: &str = "\
QBEGIN(qm)
--/n/--|Uf|--[IM]--
-------|Uf|--------
QEND
";

pub const GROVER_MEASURE_CHUNK: &str = "\
QBEGIN(qm)
--/n/---->
----------
QEND
";

fn bind_source(source: &str, bindings: &Bindings) -> Result<BoundProgram> {
    let chunks = parse_document(source)?;
    let [chunk] = chunks.as_slice() else {
        return Err(Error::Internal(format!("expected one chunk, found {}", chunks.len())));
    };
    bind(chunk, bindings)
}

fn check_shape(f: &ClassicalFunction, in_bits: Option<usize>, out_bits: usize, what: &str) -> Result<()> {
    if in_bits.is_some_and(|m| m != f.in_bits()) || f.out_bits() != out_bits {
        return Err(Error::Usage(format!(
            "{what} needs a function {{0,1}}^{} -> {{0,1}}^{out_bits}, got {} -> {}",
            in_bits.map_or("m".to_string(), |m| m.to_string()),
            f.in_bits(),
            f.out_bits()
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeutschResult {
    pub one_to_one: bool,
    pub outcome: usize,
    /// Exact distribution of the measured top qubit.
    pub distribution: Vec<f64>,
}

/// Decides whether `f: {0,1} → {0,1}` is one-to-one with a single query.
pub fn deutsch(f: &ClassicalFunction, seed: u64) -> Result<DeutschResult> {
    check_shape(f, Some(1), 1, "deutsch")?;
    let bindings = Bindings::with_standard_gates().function("Uf", f.clone());
    let program = bind_source(DEUTSCH_CHUNK, &bindings)?;
    let mut qm = Machine::new(2, seed)?;
    qm.run_chunk(&program)?;
    let distribution = qm.obs_dist()?;
    let outcome = qm.obs()?.value;
    Ok(DeutschResult {
        one_to_one: outcome == 1,
        outcome,
        distribution,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DjVerdict {
    Constant,
    Balanced,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeutschJozsaResult {
    pub verdict: DjVerdict,
    pub outcome: usize,
    /// Probability that the top register reads all zeros.
    pub p_zero: f64,
}

pub const MAX_DJ_BITS: usize = 8;

/// Tells a constant `f: {0,1}^m → {0,1}` from a balanced one. Functions
/// that are neither get an arbitrary verdict.
pub fn deutsch_jozsa(f: &ClassicalFunction, seed: u64) -> Result<DeutschJozsaResult> {
    check_shape(f, None, 1, "deutsch-jozsa")?;
    let m = f.in_bits();
    if m > MAX_DJ_BITS {
        return Err(Error::Capacity(format!("deutsch-jozsa supports m <= {MAX_DJ_BITS}")));
    }
    let bindings = Bindings::with_standard_gates()
        .var("n", m as i64)
        .gate("Hn", tensor_power(&hadamard(), m)?)
        .function("Uf", f.clone());
    let program = bind_source(DEUTSCH_JOZSA_CHUNK, &bindings)?;
    let mut qm = Machine::new(m + 1, seed)?;
    qm.run_chunk(&program)?;
    let p_zero = qm.obs_dist()?[0];
    let outcome = qm.obs()?.value;
    Ok(DeutschJozsaResult {
        verdict: if outcome == 0 {
            DjVerdict::Constant
        } else {
            DjVerdict::Balanced
        },
        outcome,
        p_zero,
    })
}

/// Rows of bits of a fixed width over GF(2). Component `j` of a row is bit
/// `width - 1 - j`, matching the pattern order of measurements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gf2Matrix {
    width: usize,
    rows: Vec<u64>,
}

impl Gf2Matrix {
    pub fn new(width: usize, rows: Vec<u64>) -> Result<Self> {
        if width == 0 || width > 64 {
            return Err(Error::Validation(format!("GF(2) width {width} outside 1..=64")));
        }
        if width < 64 && rows.iter().any(|r| r >> width != 0) {
            return Err(Error::Validation(format!("a row is wider than {width} bits")));
        }
        Ok(Gf2Matrix { width, rows })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    pub fn push(&mut self, row: u64) {
        self.rows.push(row);
    }

    /// Reduced row echelon form; returns the nonzero rows and pivot bits.
    fn reduce(&self) -> (Vec<u64>, Vec<u32>) {
        let mut rows = self.rows.clone();
        let mut pivots = Vec::new();
        let mut next = 0;
        for bit in (0..self.width as u32).rev() {
            let mask = 1u64 << bit;
            let Some(found) = (next..rows.len()).find(|&r| rows[r] & mask != 0) else {
                continue;
            };
            rows.swap(next, found);
            let pivot_row = rows[next];
            for (r, row) in rows.iter_mut().enumerate() {
                if r != next && *row & mask != 0 {
                    *row ^= pivot_row;
                }
            }
            pivots.push(bit);
            next += 1;
        }
        rows.truncate(next);
        (rows, pivots)
    }

    pub fn rank(&self) -> usize {
        self.reduce().1.len()
    }
}

pub fn gf2_dot(a: u64, b: u64) -> u32 {
    (a & b).count_ones() % 2
}

/// A basis of `{v : M·v = 0}` by Gaussian elimination over GF(2).
pub fn gf2_nullspace(m: &Gf2Matrix) -> Vec<u64> {
    let (rows, pivots) = m.reduce();
    (0..m.width as u32)
        .rev()
        .filter(|b| !pivots.contains(b))
        .map(|free| {
            let mut v = 1u64 << free;
            for (row, &p) in rows.iter().zip(&pivots) {
                if row >> free & 1 == 1 {
                    v |= 1 << p;
                }
            }
            v
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimonResult {
    pub period: usize,
    /// Every `y` read from the top register, in order.
    pub samples: Vec<usize>,
}

pub const MAX_SIMON_BITS: usize = 6;

/// Checks `f(x ⊕ b) = f(x)` for every `x`.
pub fn has_period(f: &ClassicalFunction, b: usize) -> bool {
    (0..1usize << f.in_bits()).all(|x| f.eval(x ^ b) == f.eval(x))
}

/// Recovers the hidden period of a Simon function (`f(x ⊕ b) = f(x)`,
/// `b ≠ 0`, two-to-one). Samples until the collected rows have rank
/// `n − 1`, with at most `50·n` runs.
pub fn simon(f: &ClassicalFunction, seed: u64) -> Result<SimonResult> {
    simon_with_cap(f, seed, 50 * f.in_bits())
}

pub fn simon_with_cap(f: &ClassicalFunction, seed: u64, max_runs: usize) -> Result<SimonResult> {
    let n = f.in_bits();
    check_shape(f, Some(n), n, "simon")?;
    if n > MAX_SIMON_BITS {
        return Err(Error::Capacity(format!("simon supports n <= {MAX_SIMON_BITS}")));
    }
    if n == 1 && !has_period(f, 1) || (n > 1 && (1..1 << n).all(|b| !has_period(f, b))) {
        return Err(Error::Domain("f has no nonzero period".into()));
    }
    let hn = tensor_power(&hadamard(), n)?;
    let bindings = Bindings::new().var("n", n as i64).gate("Hn", hn).function("Uf", f.clone());
    let program = bind_source(SIMON_CHUNK, &bindings)?;
    let mut qm = Machine::new(2 * n, seed)?;
    let mut rows = Gf2Matrix::new(n, Vec::new())?;
    let mut samples = Vec::new();
    for _ in 0..max_runs {
        qm.run_chunk(&program)?;
        let y = qm.obs()?.value;
        samples.push(y);
        rows.push(y as u64);
        if rows.rank() == n - 1 {
            let basis = gf2_nullspace(&rows);
            let [b] = basis.as_slice() else {
                return Err(Error::Internal(format!("null space of dimension {}", basis.len())));
            };
            let period = *b as usize;
            if !has_period(f, period) {
                return Err(Error::Domain(format!(
                    "candidate period {period:0n$b} fails f(x ⊕ b) = f(x); f breaks the promise"
                )));
            }
            return Ok(SimonResult { period, samples });
        }
    }
    Err(Error::Convergence(format!(
        "rank n - 1 = {} not reached after {max_runs} runs",
        n - 1
    )))
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroverResult {
    pub found: usize,
    pub iterations: usize,
    /// Exact pre-measurement distribution over the searched register.
    pub distribution: Vec<f64>,
    /// Pre-measurement probability of the marked item.
    pub success_probability: f64,
}

pub const MAX_GROVER_BITS: usize = 8;

/// `⌊(π/4)·√2^n⌋`.
pub fn grover_iterations(n: usize) -> usize {
    (PI / 4.0 * ((1u64 << n) as f64).sqrt()).floor() as usize
}

/// Searches for the single `x` with `f(x) = 1`.
pub fn grover(f: &ClassicalFunction, seed: u64) -> Result<GroverResult> {
    grover_with_iterations(f, grover_iterations(f.in_bits()), seed)
}

pub fn grover_with_iterations(f: &ClassicalFunction, iterations: usize, seed: u64) -> Result<GroverResult> {
    check_shape(f, None, 1, "grover")?;
    let n = f.in_bits();
    if n > MAX_GROVER_BITS {
        return Err(Error::Capacity(format!("grover supports n <= {MAX_GROVER_BITS}")));
    }
    let bindings = Bindings::with_standard_gates()
        .var("n", n as i64)
        .gate("Hn", tensor_power(&hadamard(), n)?)
        .gate("IM", inversion_about_mean(n)?)
        .function("Uf", f.clone());
    let prepare = bind_source(GROVER_PREPARE_CHUNK, &bindings)?;
    let iterate = bind_source(GROVER_ITERATE_CHUNK, &bindings)?;
    let measure = bind_source(GROVER_MEASURE_CHUNK, &bindings)?;

    let mut qm = Machine::new(n + 1, seed)?;
    qm.run_chunk(&prepare)?;
    for _ in 0..iterations {
        qm.run_chunk(&iterate)?;
    }
    qm.run_chunk(&measure)?;
    let distribution = qm.obs_dist()?;
    let success_probability = (0..1 << n)
        .filter(|&x| f.eval(x) == 1)
        .map(|x| distribution[x])
        .sum();
    let found = qm.obs()?.value;
    Ok(GroverResult {
        found,
        iterations,
        distribution,
        success_probability,
    })
}

pub const MAX_QFT_PROGRAM_QUBITS: usize = 8;

/// Rows for one line of a generated chunk; lines with count 0 are dropped.
fn repeat_row(var: &str, count: usize, rows: &mut Vec<String>) {
    if count > 0 {
        rows.push(format!("--/{var}/---------"));
    }
}

fn chunk_text(rows: &[String]) -> String {
    format!("QBEGIN(qm)\n{}\nQEND\n", rows.join("\n"))
}

/// The QFT as a sequence of chunks generated by classical loops.
///
/// A first chunk reverses the qubit order with swaps. Then step `r` builds
/// `Q_{r+1}` from `Q_r` by working on the line `p = n − (r + 1)`: `r`
/// controlled-phase blocks couple it to the line `k + 1` below with angle
/// `π/(2 << k)`, letting the `k` lines between pass through, and a Hadamard
/// closes the step. Lines whose repeat count would be zero are left out of
/// the generated chunk.
pub fn build_qft_program(n: usize) -> Result<BoundProgram> {
    if n == 0 || n > MAX_QFT_PROGRAM_QUBITS {
        return Err(Error::Capacity(format!(
            "QFT program supports 1 <= n <= {MAX_QFT_PROGRAM_QUBITS}, got {n}"
        )));
    }
    let mut program: Option<BoundProgram> = None;
    let mut append = |text: String, bindings: Bindings| -> Result<()> {
        let next = bind_source(&text, &bindings)?;
        program = Some(match program.take() {
            None => next,
            Some(p) => p.then(next)?,
        });
        Ok(())
    };

    let reversal: Vec<String> = (0..n)
        .map(|line| {
            let mut row = vec!['-'; 2 * n + 3];
            let mirror = n - 1 - line;
            let pair = line.min(mirror);
            if line != mirror {
                row[2 + 2 * pair] = 'X';
            }
            row.into_iter().collect()
        })
        .collect();
    append(chunk_text(&reversal), Bindings::new())?;

    for r in 0..n {
        let p = n - (r + 1);
        for k in 0..r {
            let m = r - (k + 1);
            let mut rows = Vec::new();
            repeat_row("p", p, &mut rows);
            rows.push("------|R|-------".into());
            repeat_row("k", k, &mut rows);
            rows.push("------|R|-------".into());
            repeat_row("m", m, &mut rows);
            let vars = HashMap::from([("p", p), ("k", k), ("m", m)]);
            let mut bindings = Bindings::new().gate("R", controlled_phase(ladder_angle(k + 1))?);
            for (name, value) in vars {
                bindings.set_var(name, value as i64);
            }
            append(chunk_text(&rows), bindings)?;
        }
        let q = r;
        let mut rows = Vec::new();
        repeat_row("p", p, &mut rows);
        rows.push("----[H]-----".into());
        repeat_row("q", q, &mut rows);
        let bindings = Bindings::with_standard_gates()
            .var("p", p as i64)
            .var("q", q as i64);
        append(chunk_text(&rows), bindings)?;
    }
    program.ok_or_else(|| Error::Internal("no chunks generated".into()))
}

/// Largest entrywise deviation of the chunk-built QFT from the DFT matrix.
pub fn qft_check(n: usize) -> Result<f64> {
    let composite = build_qft_program(n)?.composite_unitary()?;
    let dft = oracle::dft_matrix(n);
    let dim = 1usize << n;
    let mut worst: f64 = 0.0;
    for (i, row) in dft.iter().enumerate().take(dim) {
        for (j, z) in row.iter().enumerate() {
            worst = worst.max((composite.entry(i, j) - z).norm());
        }
    }
    Ok(worst)
}

/// `f(x) = 1` exactly at `target`.
pub fn grover_oracle(n: usize, target: usize) -> Result<ClassicalFunction> {
    if target >> n != 0 {
        return Err(Error::Domain(format!("target {target} outside [0, 2^{n})")));
    }
    ClassicalFunction::from_fn(n, 1, |x| (x == target) as usize)
}

pub fn constant_function(m: usize, value: bool) -> Result<ClassicalFunction> {
    ClassicalFunction::from_fn(m, 1, |_| value as usize)
}

/// A uniformly random balanced function `{0,1}^m → {0,1}`.
pub fn random_balanced_function(m: usize, rng: &mut impl Rng) -> Result<ClassicalFunction> {
    let size = 1usize << m;
    let mut table: Vec<usize> = (0..size).map(|x| (x < size / 2) as usize).collect();
    table.shuffle(rng);
    ClassicalFunction::from_table(m, 1, table)
}

/// A random two-to-one function with period `b`: each pair `{x, x ⊕ b}`
/// gets its own output value.
pub fn random_simon_function(n: usize, b: usize, rng: &mut impl Rng) -> Result<ClassicalFunction> {
    if b == 0 || b >> n != 0 {
        return Err(Error::Domain(format!("period {b} must be nonzero and below 2^{n}")));
    }
    let mut values: Vec<usize> = (0..1usize << n).collect();
    values.shuffle(rng);
    let mut table = vec![usize::MAX; 1 << n];
    let mut next = 0;
    for x in 0..1usize << n {
        if table[x] == usize::MAX {
            table[x] = values[next];
            table[x ^ b] = values[next];
            next += 1;
        }
    }
    ClassicalFunction::from_table(n, n, table)
}
