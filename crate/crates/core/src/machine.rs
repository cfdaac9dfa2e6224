//! The quantum machine: a register, the programs run on it, and
//! measurement.
//!
//! Measured patterns list the measured positions in ascending order with the
//! first position as the most significant bit, so measuring positions
//! `{0, 2}` of `|100⟩` yields pattern `10`, value 2.
//!
//! Sampling draws `u` uniformly from `[0, 1)` with a ChaCha8 stream seeded
//! by `seed_from_u64(seed)` and returns the first pattern whose cumulative
//! probability exceeds `u`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::binder::BoundProgram;
use crate::error::{Error, Result};
use crate::linalg::{QubitIndexList, StateVector};

pub const MAX_MACHINE_QUBITS: usize = 12;

/// Tolerance on the total probability of a distribution.
pub const PROBABILITY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MeasurementOutcome {
    pub value: usize,
    pub positions: QubitIndexList,
}

impl MeasurementOutcome {
    /// The observed bits, first measured position first.
    pub fn pattern(&self) -> String {
        let p = self.positions.len();
        (0..p)
            .map(|j| if (self.value >> (p - 1 - j)) & 1 == 1 { '1' } else { '0' })
            .collect()
    }
}

/// Bits of `index` at `positions`, packed with the first position most
/// significant.
pub fn pattern_of(index: usize, num_qubits: usize, positions: &QubitIndexList) -> usize {
    positions
        .iter()
        .fold(0, |acc, q| (acc << 1) | ((index >> (num_qubits - 1 - q)) & 1))
}

/// Probability of each pattern on `positions`, indexed by pattern value.
pub fn distribution(state: &StateVector, positions: &QubitIndexList) -> Result<Vec<f64>> {
    let k = state.num_qubits();
    positions.check_within(k)?;
    let mut probs = vec![0.0; 1 << positions.len()];
    for (i, z) in state.amplitudes().iter().enumerate() {
        probs[pattern_of(i, k, positions)] += z.norm_sqr();
    }
    let norm_sqr = state.norm().powi(2);
    for p in &mut probs {
        *p /= norm_sqr;
    }
    Ok(probs)
}

/// Zeroes every amplitude whose bits at `positions` differ from `value`,
/// then renormalizes.
pub fn collapse(state: &StateVector, positions: &QubitIndexList, value: usize) -> Result<StateVector> {
    let k = state.num_qubits();
    positions.check_within(k)?;
    let kept = state
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(i, &z)| {
            if pattern_of(i, k, positions) == value {
                z
            } else {
                num_complex::Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    StateVector::new(kept).map_err(|_| {
        Error::Usage(format!("pattern {value} has probability zero and cannot be observed"))
    })
}

fn sample_index(probs: &[f64], u: f64) -> Option<usize> {
    let mut cumulative = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        cumulative += p;
        if u < cumulative {
            return Some(i);
        }
    }
    // u landed in the rounding gap at the top
    probs.iter().rposition(|&p| p > 0.0)
}

/// Sequential versus joint measurement distributions over `A ∪ B`.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceReport {
    /// Measure `A`, collapse, then measure `B`; indexed by the `A ∪ B` pattern.
    pub sequential: Vec<f64>,
    /// Measure `A ∪ B` at once.
    pub joint: Vec<f64>,
    pub max_abs_diff: f64,
}

/// Computes both sides exactly by enumerating every `A` outcome.
pub fn measure_equivalence_check(
    state: &StateVector,
    a: &QubitIndexList,
    b: &QubitIndexList,
) -> Result<EquivalenceReport> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Usage("both position sets must be nonempty".into()));
    }
    if !a.is_disjoint(b) {
        return Err(Error::Usage(format!(
            "positions {:?} and {:?} overlap",
            a.as_slice(),
            b.as_slice()
        )));
    }
    let union = a.union(b);
    let joint = distribution(state, &union)?;
    let mut sequential = vec![0.0; joint.len()];
    let place = |bits: usize, from: &QubitIndexList| -> usize {
        // Move pattern bits of `from` into their slots within `union`.
        let u = union.len();
        from.iter().enumerate().fold(0, |acc, (j, q)| {
            let bit = (bits >> (from.len() - 1 - j)) & 1;
            let slot = union.as_slice().binary_search(&q).expect("subset of union");
            acc | bit << (u - 1 - slot)
        })
    };
    for (va, &pa) in distribution(state, a)?.iter().enumerate() {
        if pa == 0.0 {
            continue;
        }
        let after = collapse(state, a, va)?;
        for (vb, &pb) in distribution(&after, b)?.iter().enumerate() {
            sequential[place(va, a) | place(vb, b)] += pa * pb;
        }
    }
    let max_abs_diff = sequential
        .iter()
        .zip(&joint)
        .map(|(s, j)| (s - j).abs())
        .fold(0.0, f64::max);
    Ok(EquivalenceReport {
        sequential,
        joint,
        max_abs_diff,
    })
}

/// A register of `k` qubits plus the marks left by the last chunk.
#[derive(Debug, Clone)]
pub struct Machine {
    state: StateVector,
    pending: QubitIndexList,
    seed: u64,
    rng: ChaCha8Rng,
}

impl Machine {
    pub fn new(num_qubits: usize, seed: u64) -> Result<Self> {
        if num_qubits == 0 || num_qubits > MAX_MACHINE_QUBITS {
            return Err(Error::Capacity(format!(
                "a machine holds 1 to {MAX_MACHINE_QUBITS} qubits, asked for {num_qubits}"
            )));
        }
        Ok(Machine {
            state: StateVector::basis(num_qubits, 0)?,
            pending: QubitIndexList::default(),
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.state.num_qubits()
    }

    pub fn state(&self) -> &StateVector {
        &self.state
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn pending_measure(&self) -> &QubitIndexList {
        &self.pending
    }

    /// Back to `|0…0⟩` with no marks. The random stream carries on.
    pub fn reset(&mut self) {
        self.state = StateVector::basis(self.num_qubits(), 0).expect("size already validated");
        self.pending = QubitIndexList::default();
    }

    pub fn set_state(&mut self, state: StateVector) -> Result<()> {
        if state.num_qubits() != self.num_qubits() {
            return Err(Error::Dimension(format!(
                "{}-qubit state for a {}-qubit machine",
                state.num_qubits(),
                self.num_qubits()
            )));
        }
        self.state = state;
        Ok(())
    }

    pub fn mark_for_measurement(&mut self, positions: QubitIndexList) -> Result<()> {
        positions.check_within(self.num_qubits())?;
        self.pending = positions;
        Ok(())
    }

    /// Runs one bound chunk. A program with an initial basis index restarts
    /// the register there; otherwise it continues from the current state.
    /// The program's measurement marks replace any earlier ones.
    pub fn run_chunk(&mut self, program: &BoundProgram) -> Result<()> {
        if program.total_qubits != self.num_qubits() {
            return Err(Error::Dimension(format!(
                "chunk spans {} qubit(s) but the machine has {}",
                program.total_qubits,
                self.num_qubits()
            )));
        }
        let start = match program.initial {
            Some(index) => StateVector::basis(self.num_qubits(), index)?,
            None => self.state.clone(),
        };
        self.state = program.evolve(&start)?;
        self.pending = program.measured.clone();
        Ok(())
    }

    /// Exact distribution of the pending measurement. Leaves the state alone.
    pub fn obs_dist(&self) -> Result<Vec<f64>> {
        if self.pending.is_empty() {
            return Err(Error::Usage("no qubits are marked for measurement".into()));
        }
        distribution(&self.state, &self.pending)
    }

    /// Samples the pending measurement, collapses the register onto the
    /// outcome and clears the marks.
    pub fn obs(&mut self) -> Result<MeasurementOutcome> {
        let probs = self.obs_dist()?;
        let u: f64 = self.rng.random();
        let value = sample_index(&probs, u)
            .ok_or_else(|| Error::Internal("measurement distribution is all zero".into()))?;
        self.state = collapse(&self.state, &self.pending, value)?;
        let positions = std::mem::take(&mut self.pending);
        Ok(MeasurementOutcome { value, positions })
    }

    pub fn measure_equivalence_check(
        &self,
        a: &QubitIndexList,
        b: &QubitIndexList,
    ) -> Result<EquivalenceReport> {
        measure_equivalence_check(&self.state, a, b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::binder::{bind, Bindings};
    use crate::parser::{parse_chunk, SourceGrid};
    use num_complex::Complex64;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn list(xs: &[usize]) -> QubitIndexList {
        QubitIndexList::new(xs.to_vec()).unwrap()
    }

    fn uniform(k: usize) -> StateVector {
        StateVector::new(vec![Complex64::new(1.0, 0.0); 1 << k]).unwrap()
    }

    fn program(rows: &[&str]) -> BoundProgram {
        let c = parse_chunk(&SourceGrid::from_rows(Some("qm"), rows)).unwrap();
        bind(&c, &Bindings::with_standard_gates()).unwrap()
    }

    #[test]
    fn new_machine_starts_in_zero() {
        let m = Machine::new(2, 1).unwrap();
        assert_eq!(m.state(), &StateVector::basis(2, 0).unwrap());
        assert!(matches!(Machine::new(13, 1), Err(Error::Capacity(_))));
        assert!(matches!(Machine::new(0, 1), Err(Error::Capacity(_))));
    }

    #[test]
    fn hadamard_on_fresh_machine() {
        let mut m = Machine::new(1, 0).unwrap();
        m.run_chunk(&program(&["--[H]--"])).unwrap();
        for z in m.state().amplitudes() {
            assert!((z.re - FRAC_1_SQRT_2).abs() < 1e-15);
        }
    }

    #[test]
    fn empty_program_leaves_state() {
        let mut m = Machine::new(2, 0).unwrap();
        m.set_state(uniform(2)).unwrap();
        m.run_chunk(&program(&["-----", "-----"])).unwrap();
        assert_eq!(m.state(), &uniform(2));
    }

    #[test]
    fn size_mismatch() {
        let mut m = Machine::new(3, 0).unwrap();
        assert!(matches!(m.run_chunk(&program(&["--"])), Err(Error::Dimension(_))));
    }

    #[test]
    fn distributions() {
        let s = StateVector::basis(2, 1).unwrap();
        assert_eq!(distribution(&s, &list(&[0, 1])).unwrap(), vec![0.0, 1.0, 0.0, 0.0]);
        let d = distribution(&uniform(2), &list(&[1])).unwrap();
        assert!((d[0] - 0.5).abs() < 1e-15 && (d[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn pattern_bits_follow_position_order() {
        // |100>: position 0 set; measuring {0, 2} reads "10" = 2
        assert_eq!(pattern_of(0b100, 3, &list(&[0, 2])), 2);
        assert_eq!(pattern_of(0b001, 3, &list(&[0, 2])), 1);
        let o = MeasurementOutcome {
            value: 2,
            positions: list(&[0, 2]),
        };
        assert_eq!(o.pattern(), "10");
    }

    #[test]
    fn collapse_keeps_matching_amplitudes() {
        let after = collapse(&uniform(2), &list(&[0]), 0).unwrap();
        let h = FRAC_1_SQRT_2;
        let expected = [h, h, 0.0, 0.0];
        for (z, e) in after.amplitudes().iter().zip(expected) {
            assert!((z.re - e).abs() < 1e-15);
        }
    }

    #[test]
    fn obs_on_basis_state_is_certain() {
        let mut m = Machine::new(2, 9).unwrap();
        m.set_state(StateVector::basis(2, 1).unwrap()).unwrap();
        m.mark_for_measurement(list(&[0, 1])).unwrap();
        let o = m.obs().unwrap();
        assert_eq!(o.value, 1);
        assert_eq!(m.state(), &StateVector::basis(2, 1).unwrap());
        assert!(m.pending_measure().is_empty());
        assert!(matches!(m.obs(), Err(Error::Usage(_))));
        assert!(matches!(m.obs_dist(), Err(Error::Usage(_))));
    }

    #[test]
    fn obs_dist_is_pure_and_repeatable() {
        let mut m = Machine::new(2, 3).unwrap();
        m.run_chunk(&program(&["--[H]-->", "--[H]-->"])).unwrap();
        let before = m.state().clone();
        assert_eq!(m.obs_dist().unwrap(), m.obs_dist().unwrap());
        assert_eq!(m.state(), &before);
    }

    #[test]
    fn seeded_sampling_is_reproducible() {
        let run = |seed| {
            let mut m = Machine::new(3, seed).unwrap();
            (0..50)
                .map(|_| {
                    m.reset();
                    m.run_chunk(&program(&["--[H]-->", "--[H]-->", "--[H]-->"])).unwrap();
                    m.obs().unwrap().value
                })
                .collect::<Vec<_>>()
        };
        assert_eq!(run(7), run(7));
        assert_ne!(run(7), run(8));
    }

    #[test]
    fn inverse_cdf_edges() {
        assert_eq!(sample_index(&[0.0, 1.0], 0.0), Some(1));
        assert_eq!(sample_index(&[0.5, 0.5], 0.49), Some(0));
        assert_eq!(sample_index(&[0.5, 0.5 - 1e-17], 0.999_999_999_999_999_9), Some(1));
        assert_eq!(sample_index(&[0.0, 0.0], 0.3), None);
    }

    #[test]
    fn equivalence_on_basis_and_uniform() {
        let s = StateVector::basis(3, 5).unwrap();
        let r = measure_equivalence_check(&s, &list(&[0]), &list(&[2])).unwrap();
        assert_eq!(r.joint, vec![0.0, 0.0, 0.0, 1.0]);
        assert_eq!(r.sequential, r.joint);

        let r = measure_equivalence_check(&uniform(3), &list(&[1]), &list(&[0, 2])).unwrap();
        assert!(r.joint.iter().all(|p| (p - 0.125).abs() < 1e-15));
        assert!(r.max_abs_diff < 1e-15);

        assert!(measure_equivalence_check(&s, &list(&[0]), &list(&[0, 1])).is_err());
        assert!(measure_equivalence_check(&s, &list(&[]), &list(&[1])).is_err());
    }
}
