//! Resolves a chunk's identifiers and repeat counts into qubit-level steps.

use std::collections::HashMap;
use std::ops::Range;
use std::sync::{Arc, OnceLock};

use crate::diagnostics::{Diagnostic, DiagnosticKind};
use crate::error::{Error, Result};
use crate::gates::{standard_gate, wrap_classical, ClassicalFunction};
use crate::ir::{qubit_layout, validate, Chunk};
use crate::linalg::{
    apply_on_subset, permute_qubits, Amplitude, QubitIndexList, StateVector, UnitaryMatrix,
};

#[derive(Debug)]
struct FunctionEntry {
    function: ClassicalFunction,
    wrapped: OnceLock<Arc<UnitaryMatrix>>,
}

/// Symbol table for gate identifiers and repeat-count variables.
///
/// Classical functions are wrapped into `U(f)` the first time a chunk uses
/// them and the result is reused afterwards.
#[derive(Debug, Default)]
pub struct Bindings {
    gates: HashMap<String, Arc<UnitaryMatrix>>,
    functions: HashMap<String, FunctionEntry>,
    vars: HashMap<String, i64>,
    standard_gates: bool,
}

impl Bindings {
    pub fn new() -> Self {
        Bindings::default()
    }

    /// Bindings that also resolve undeclared `H`, `X`, `Y`, `Z` and `I` to
    /// the catalog gates.
    pub fn with_standard_gates() -> Self {
        Bindings {
            standard_gates: true,
            ..Bindings::default()
        }
    }

    pub fn gate(mut self, name: impl Into<String>, g: UnitaryMatrix) -> Self {
        self.set_gate(name, g);
        self
    }

    pub fn function(mut self, name: impl Into<String>, f: ClassicalFunction) -> Self {
        self.set_function(name, f);
        self
    }

    pub fn var(mut self, name: impl Into<String>, value: i64) -> Self {
        self.set_var(name, value);
        self
    }

    pub fn set_gate(&mut self, name: impl Into<String>, g: UnitaryMatrix) {
        let name = name.into();
        self.functions.remove(&name);
        self.gates.insert(name, Arc::new(g));
    }

    pub fn set_function(&mut self, name: impl Into<String>, f: ClassicalFunction) {
        let name = name.into();
        self.gates.remove(&name);
        self.functions.insert(
            name,
            FunctionEntry {
                function: f,
                wrapped: OnceLock::new(),
            },
        );
    }

    pub fn set_var(&mut self, name: impl Into<String>, value: i64) {
        self.vars.insert(name.into(), value);
    }

    pub fn vars(&self) -> &HashMap<String, i64> {
        &self.vars
    }

    pub fn resolve_gate(&self, name: &str) -> Option<Arc<UnitaryMatrix>> {
        if let Some(g) = self.gates.get(name) {
            return Some(g.clone());
        }
        if let Some(entry) = self.functions.get(name) {
            return Some(
                entry
                    .wrapped
                    .get_or_init(|| Arc::new(wrap_classical(&entry.function)))
                    .clone(),
            );
        }
        if self.standard_gates {
            return standard_gate(name).map(Arc::new);
        }
        None
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Step {
    Apply {
        gate_id: String,
        gate: Arc<UnitaryMatrix>,
        targets: QubitIndexList,
    },
    /// Exchanges two equal-width blocks of consecutive qubits.
    BlockSwap {
        first: Range<usize>,
        second: Range<usize>,
    },
}

impl Step {
    fn first_qubit(&self) -> usize {
        match self {
            Step::Apply { targets, .. } => targets.as_slice()[0],
            Step::BlockSwap { first, .. } => first.start,
        }
    }

    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        match self {
            Step::Apply { gate, targets, .. } => apply_on_subset(state, gate, targets),
            Step::BlockSwap { first, second } => {
                let mut perm: Vec<usize> = (0..state.num_qubits()).collect();
                for (a, b) in first.clone().zip(second.clone()) {
                    perm[a] = b;
                    perm[b] = a;
                }
                permute_qubits(state, &perm)
            }
        }
    }
}

/// A chunk expanded to qubit positions and ready to run.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundProgram {
    pub total_qubits: usize,
    /// Basis state to reset the register to before the steps run; set when
    /// the chunk carries init tokens.
    pub initial: Option<usize>,
    pub steps: Vec<Step>,
    pub measured: QubitIndexList,
}

impl BoundProgram {
    /// Runs the steps on `state`, ignoring `initial`.
    pub fn evolve(&self, state: &StateVector) -> Result<StateVector> {
        if state.num_qubits() != self.total_qubits {
            return Err(Error::Dimension(format!(
                "program for {} qubits run on a {}-qubit register",
                self.total_qubits,
                state.num_qubits()
            )));
        }
        let mut state = state.clone();
        for step in &self.steps {
            state = step.apply(&state)?;
        }
        Ok(state)
    }

    /// Appends `next`'s steps. `next` must not reset the register and its
    /// measurement marks replace ours.
    pub fn then(mut self, next: BoundProgram) -> Result<BoundProgram> {
        if next.total_qubits != self.total_qubits {
            return Err(Error::Dimension(format!(
                "cannot join programs for {} and {} qubits",
                self.total_qubits, next.total_qubits
            )));
        }
        if next.initial.is_some() {
            return Err(Error::Usage("a program that resets the register cannot be appended".into()));
        }
        self.steps.extend(next.steps);
        self.measured = next.measured;
        Ok(self)
    }

    /// The unitary the steps implement, assembled column by column.
    pub fn composite_unitary(&self) -> Result<UnitaryMatrix> {
        let dim = 1usize << self.total_qubits;
        let mut entries = vec![Amplitude::new(0.0, 0.0); dim * dim];
        for col in 0..dim {
            let out = self.evolve(&StateVector::basis(self.total_qubits, col)?)?;
            for (row, z) in out.amplitudes().iter().enumerate() {
                entries[row * dim + col] = *z;
            }
        }
        UnitaryMatrix::new(self.total_qubits, entries)
    }
}

/// Expands `chunk` against `bindings`.
///
/// A placement over lines `L` is fed the concatenated qubit ranges of those
/// lines, so its gate must have arity equal to their total width. Stages
/// run in order; inside a stage steps are listed by first target qubit.
pub fn bind(chunk: &Chunk, bindings: &Bindings) -> Result<BoundProgram> {
    let structural: Vec<Diagnostic> = validate(chunk).into_iter().filter(|d| d.is_error()).collect();
    if !structural.is_empty() {
        return Err(Error::Diagnostics(structural));
    }
    let layout = qubit_layout(chunk, bindings.vars())?;
    let mut diags = Vec::new();
    let mut steps = Vec::new();
    for stage in &chunk.stages {
        let mut stage_steps = Vec::new();
        for g in &stage.gates {
            let row = chunk.lines[g.lines[0]].row;
            let Some(gate) = bindings.resolve_gate(&g.gate_id) else {
                diags.push(Diagnostic::error(
                    DiagnosticKind::Binding,
                    row,
                    g.span.start,
                    format!("unknown gate identifier `{}`", g.gate_id),
                ));
                continue;
            };
            let targets = layout.expand(&g.lines);
            if gate.arity() != targets.len() {
                diags.push(Diagnostic::error(
                    DiagnosticKind::Dimension,
                    row,
                    g.span.start,
                    format!(
                        "gate `{}` acts on {} qubit(s) but its lines carry {} qubit(s)",
                        g.gate_id,
                        gate.arity(),
                        targets.len()
                    ),
                ));
                continue;
            }
            stage_steps.push(Step::Apply {
                gate_id: g.gate_id.clone(),
                gate,
                targets: QubitIndexList::new(targets)?,
            });
        }
        for s in &stage.swaps {
            let (first, second) = (layout.qubits_of(s.line_a), layout.qubits_of(s.line_b));
            if first.len() != second.len() {
                diags.push(Diagnostic::error(
                    DiagnosticKind::Dimension,
                    chunk.lines[s.line_b].row,
                    s.column,
                    format!(
                        "swap between blocks of {} and {} qubits",
                        first.len(),
                        second.len()
                    ),
                ));
                continue;
            }
            stage_steps.push(Step::BlockSwap { first, second });
        }
        stage_steps.sort_by_key(Step::first_qubit);
        steps.extend(stage_steps);
    }
    if !diags.is_empty() {
        return Err(Error::Diagnostics(diags));
    }

    let k = layout.total;
    let initial = chunk.has_init().then(|| {
        chunk
            .lines
            .iter()
            .enumerate()
            .filter(|(_, l)| l.init == Some(true))
            .flat_map(|(i, _)| layout.qubits_of(i))
            .fold(0usize, |acc, q| acc | 1 << (k - 1 - q))
    });
    Ok(BoundProgram {
        total_qubits: k,
        initial,
        steps,
        measured: QubitIndexList::new(layout.expand(&chunk.measured_lines))?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::{hadamard, pauli_x};
    use crate::parser::{parse_chunk, SourceGrid};

    fn chunk(rows: &[&str]) -> Chunk {
        parse_chunk(&SourceGrid::from_rows(Some("qm"), rows)).unwrap()
    }

    fn targets(step: &Step) -> Vec<usize> {
        match step {
            Step::Apply { targets, .. } => targets.as_slice().to_vec(),
            Step::BlockSwap { first, second } => first.clone().chain(second.clone()).collect(),
        }
    }

    #[test]
    fn expands_the_ir_example() {
        let c = chunk(&["-/n/--|A|----|Uf|---", "--------[B]--|Uf|--->", "------|A|----------"]);
        let b = Bindings::new()
            .var("n", 1)
            .gate("A", UnitaryMatrix::identity(2))
            .gate("B", hadamard())
            .function("Uf", ClassicalFunction::from_fn(1, 1, |x| x).unwrap());
        let p = bind(&c, &b).unwrap();
        assert_eq!(p.total_qubits, 3);
        assert_eq!(p.initial, None);
        let t: Vec<Vec<usize>> = p.steps.iter().map(targets).collect();
        assert_eq!(t, vec![vec![0, 2], vec![1], vec![0, 1]]);
        assert_eq!(p.measured.as_slice(), &[1]);
    }

    #[test]
    fn multi_qubit_lines_expand_to_consecutive_qubits() {
        let c = chunk(&["-/n/--|A|--", "------|A|->"]);
        let b = Bindings::new().var("n", 2).gate("A", UnitaryMatrix::identity(3));
        let p = bind(&c, &b).unwrap();
        assert_eq!(targets(&p.steps[0]), vec![0, 1, 2]);
        assert_eq!(p.measured.as_slice(), &[2]);
    }

    #[test]
    fn arity_mismatch_is_a_dimension_diagnostic() {
        let c = chunk(&["-/2/--[X]--"]);
        let err = bind(&c, &Bindings::new().gate("X", pauli_x())).unwrap_err();
        let d = &err.diagnostics()[0];
        assert_eq!(d.kind, DiagnosticKind::Dimension);
        assert!(d.message.contains("1 qubit(s)") && d.message.contains("carry 2"), "{}", d.message);
        assert_eq!((d.row, d.col), (1, 6));
    }

    #[test]
    fn unknown_identifier_and_variable() {
        let c = chunk(&["--[Q]--"]);
        let err = bind(&c, &Bindings::with_standard_gates()).unwrap_err();
        assert_eq!(err.diagnostics()[0].kind, DiagnosticKind::Binding);
        assert!(err.diagnostics()[0].message.contains("`Q`"));

        let c = chunk(&["-/m/--[H]--"]);
        let err = bind(&c, &Bindings::with_standard_gates()).unwrap_err();
        assert_eq!(err.diagnostics()[0].kind, DiagnosticKind::Binding);
    }

    #[test]
    fn initial_index_from_init_tokens() {
        let c = chunk(&["|0>--", "|1>-/2/--", "-----"]);
        let p = bind(&c, &Bindings::new()).unwrap();
        assert_eq!(p.total_qubits, 4);
        assert_eq!(p.initial, Some(0b0110));
    }

    #[test]
    fn swaps_become_block_swaps() {
        let c = chunk(&["-/n/-X--", "------", "-/n/-X--"]);
        let p = bind(&c, &Bindings::new().var("n", 2)).unwrap();
        assert_eq!(p.steps, vec![Step::BlockSwap { first: 0..2, second: 3..5 }]);
    }

    #[test]
    fn binding_is_repeatable_and_caches_wrappers() {
        let c = chunk(&["--|Uf|--", "--|Uf|--"]);
        let b = Bindings::new().function("Uf", ClassicalFunction::from_fn(1, 1, |x| 1 - x).unwrap());
        let p1 = bind(&c, &b).unwrap();
        let p2 = bind(&c, &b).unwrap();
        assert_eq!(p1, p2);
        match (&p1.steps[0], &p2.steps[0]) {
            (Step::Apply { gate: g1, .. }, Step::Apply { gate: g2, .. }) => assert!(Arc::ptr_eq(g1, g2)),
            _ => unreachable!(),
        }
    }
}
