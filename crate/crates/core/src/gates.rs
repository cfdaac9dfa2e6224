//! Standard gates, the quantum wrapper of a classical function, and the
//! parameterized families used by the reference algorithms.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    apply_on_subset, kron, permute_qubits, Amplitude, QubitIndexList, StateVector, UnitaryMatrix,
};

/// Largest register the gate constructors will build a matrix for.
pub const MAX_GATE_QUBITS: usize = 12;

/// Largest QFT order accepted by [`qft`].
pub const MAX_QFT_QUBITS: usize = 10;

/// A classical function `{0,1}^m → {0,1}^n` held as an explicit truth table.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClassicalFunction {
    in_bits: usize,
    out_bits: usize,
    table: Vec<usize>,
}

impl ClassicalFunction {
    /// `table[x]` is `f(x)`; it must have exactly `2^in_bits` entries, each
    /// below `2^out_bits`.
    pub fn from_table(in_bits: usize, out_bits: usize, table: Vec<usize>) -> Result<Self> {
        if in_bits == 0 || out_bits == 0 {
            return Err(Error::Validation("a classical function needs m >= 1 and n >= 1".into()));
        }
        if in_bits + out_bits > MAX_GATE_QUBITS {
            return Err(Error::Capacity(format!(
                "m + n = {} exceeds the {MAX_GATE_QUBITS}-qubit cap",
                in_bits + out_bits
            )));
        }
        if table.len() != 1 << in_bits {
            return Err(Error::Validation(format!(
                "truth table has {} rows, expected {}",
                table.len(),
                1usize << in_bits
            )));
        }
        if let Some((x, y)) = table.iter().enumerate().find(|(_, &y)| y >> out_bits != 0) {
            return Err(Error::Validation(format!(
                "f({x}) = {y} does not fit in {out_bits} output bit(s)"
            )));
        }
        Ok(ClassicalFunction {
            in_bits,
            out_bits,
            table,
        })
    }

    /// Tabulates `f` by calling it once for every input.
    pub fn from_fn(in_bits: usize, out_bits: usize, f: impl Fn(usize) -> usize) -> Result<Self> {
        if in_bits + out_bits > MAX_GATE_QUBITS {
            return Err(Error::Capacity(format!(
                "m + n = {} exceeds the {MAX_GATE_QUBITS}-qubit cap",
                in_bits + out_bits
            )));
        }
        ClassicalFunction::from_table(in_bits, out_bits, (0..1usize << in_bits).map(f).collect())
    }

    /// Parses the truth-table file format: a header `m n`, then `2^m` lines
    /// `input output` in decimal covering every input exactly once. Blank
    /// lines and `#` comments are ignored.
    pub fn parse_truth_table(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let (hline, header) = lines
            .next()
            .ok_or_else(|| Error::Validation("truth table is empty".into()))?;
        let (m, n) = parse_pair(header)
            .ok_or_else(|| Error::Validation(format!("line {hline}: expected header `m n`")))?;
        if m == 0 || n == 0 || m + n > MAX_GATE_QUBITS {
            return Err(Error::Capacity(format!(
                "line {hline}: m = {m}, n = {n} outside 1 <= m, n and m + n <= {MAX_GATE_QUBITS}"
            )));
        }
        let mut table: Vec<Option<usize>> = vec![None; 1 << m];
        for (lineno, line) in lines {
            let (x, y) = parse_pair(line)
                .ok_or_else(|| Error::Validation(format!("line {lineno}: expected `input output`")))?;
            let slot = table.get_mut(x).ok_or_else(|| {
                Error::Validation(format!("line {lineno}: input {x} outside [0, {})", 1usize << m))
            })?;
            if slot.replace(y).is_some() {
                return Err(Error::Validation(format!("line {lineno}: input {x} listed twice")));
            }
        }
        let table = table
            .into_iter()
            .enumerate()
            .map(|(x, y)| y.ok_or_else(|| Error::Validation(format!("input {x} is missing"))))
            .collect::<Result<Vec<_>>>()?;
        ClassicalFunction::from_table(m, n, table)
    }

    pub fn to_truth_table(&self) -> String {
        let mut out = format!("{} {}\n", self.in_bits, self.out_bits);
        for (x, y) in self.table.iter().enumerate() {
            out.push_str(&format!("{x} {y}\n"));
        }
        out
    }

    pub fn in_bits(&self) -> usize {
        self.in_bits
    }

    pub fn out_bits(&self) -> usize {
        self.out_bits
    }

    pub fn eval(&self, x: usize) -> usize {
        self.table[x]
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }
}

fn parse_pair(line: &str) -> Option<(usize, usize)> {
    let mut it = line.split_whitespace();
    let a = it.next()?.parse().ok()?;
    let b = it.next()?.parse().ok()?;
    it.next().is_none().then_some((a, b))
}

/// The quantum wrapper `U(f)` of order `2^(m+n)`.
///
/// Entry `(i, j)` is 1 exactly when the top `m` bits agree and
/// `f(i_x) = i_y ⊕ j_y`, so column `j` has its single 1 in row
/// `(j_x, j_y ⊕ f(j_x))`.
pub fn wrap_classical(f: &ClassicalFunction) -> UnitaryMatrix {
    let n = f.out_bits;
    let y_mask = (1 << n) - 1;
    let images = (0..1usize << (f.in_bits + n))
        .map(|j| {
            let jx = j >> n;
            (jx << n) | ((j & y_mask) ^ f.table[jx])
        })
        .collect();
    UnitaryMatrix::from_permutation(images).expect("U(f) is a permutation")
}

pub fn hadamard() -> UnitaryMatrix {
    let h = FRAC_1_SQRT_2;
    UnitaryMatrix::from_real_rows(&[&[h, h], &[h, -h]]).expect("H is unitary")
}

pub fn pauli_x() -> UnitaryMatrix {
    UnitaryMatrix::from_permutation(vec![1, 0]).expect("X is a permutation")
}

pub fn pauli_y() -> UnitaryMatrix {
    let i = Complex64::i();
    let z = Complex64::new(0.0, 0.0);
    UnitaryMatrix::from_rows(&[vec![z, -i], vec![i, z]]).expect("Y is unitary")
}

pub fn pauli_z() -> UnitaryMatrix {
    UnitaryMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]]).expect("Z is unitary")
}

pub fn identity() -> UnitaryMatrix {
    UnitaryMatrix::identity(1)
}

/// Names recognized by [`standard_gate`].
pub const STANDARD_GATES: [&str; 5] = ["H", "X", "Y", "Z", "I"];

/// Looks up a catalog gate by its conventional single-letter name.
pub fn standard_gate(name: &str) -> Option<UnitaryMatrix> {
    match name {
        "H" => Some(hadamard()),
        "X" => Some(pauli_x()),
        "Y" => Some(pauli_y()),
        "Z" => Some(pauli_z()),
        "I" => Some(identity()),
        _ => None,
    }
}

/// `g ⊗ g ⊗ … ⊗ g` with `count` factors.
pub fn tensor_power(g: &UnitaryMatrix, count: usize) -> Result<UnitaryMatrix> {
    if count == 0 {
        return Err(Error::Domain("tensor power needs at least one factor".into()));
    }
    if g.arity() * count > MAX_GATE_QUBITS {
        return Err(Error::Capacity(format!(
            "{count} copies of a {}-qubit gate exceed the {MAX_GATE_QUBITS}-qubit cap",
            g.arity()
        )));
    }
    let mut acc = g.clone();
    for _ in 1..count {
        acc = kron(&acc, g);
    }
    Ok(acc)
}

fn check_angle(theta: f64) -> Result<()> {
    if theta.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("angle {theta} is not finite")))
    }
}

/// Single-qubit phase gate `diag(1, e^{iθ})`.
pub fn r_gate(theta: f64) -> Result<UnitaryMatrix> {
    check_angle(theta)?;
    UnitaryMatrix::diagonal(&[Complex64::new(1.0, 0.0), Complex64::from_polar(1.0, theta)])
}

/// Two-qubit controlled phase `diag(1, 1, 1, e^{iθ})`. Symmetric in its
/// two qubits.
pub fn controlled_phase(theta: f64) -> Result<UnitaryMatrix> {
    check_angle(theta)?;
    let one = Complex64::new(1.0, 0.0);
    UnitaryMatrix::diagonal(&[one, one, one, Complex64::from_polar(1.0, theta)])
}

/// Grover's inversion about the mean, `2·J/2^n − I`.
pub fn inversion_about_mean(n: usize) -> Result<UnitaryMatrix> {
    if n == 0 || n > MAX_GATE_QUBITS {
        return Err(Error::Capacity(format!(
            "inversion about mean needs 1 <= n <= {MAX_GATE_QUBITS}, got {n}"
        )));
    }
    let dim = 1usize << n;
    let off = 2.0 / dim as f64;
    let mut entries = vec![Complex64::new(off, 0.0); dim * dim];
    for i in 0..dim {
        entries[i * dim + i] -= 1.0;
    }
    Ok(UnitaryMatrix::from_dense_trusted(n, entries))
}

/// One step of the phase ladder: the angle coupling two qubits `distance`
/// lines apart, `π / 2^distance`.
pub fn ladder_angle(distance: usize) -> f64 {
    PI / (1u64 << distance) as f64
}

/// The `n`-qubit quantum Fourier transform, entries `ω^{jk}/√N`.
///
/// Built from the Hadamard/controlled-phase ladder followed by a reversal
/// of the qubit order.
pub fn qft(n: usize) -> Result<UnitaryMatrix> {
    if n == 0 || n > MAX_QFT_QUBITS {
        return Err(Error::Capacity(format!(
            "qft needs 1 <= n <= {MAX_QFT_QUBITS}, got {n}"
        )));
    }
    let h = hadamard();
    let mut ladder: Vec<(UnitaryMatrix, QubitIndexList)> = Vec::new();
    for t in 0..n {
        ladder.push((h.clone(), QubitIndexList::range(t, t + 1)));
        for c in t + 1..n {
            let cp = controlled_phase(ladder_angle(c - t))?;
            ladder.push((cp, QubitIndexList::new(vec![t, c])?));
        }
    }
    let reversal: Vec<usize> = (0..n).rev().collect();

    let dim = 1usize << n;
    let mut entries = vec![Amplitude::new(0.0, 0.0); dim * dim];
    for col in 0..dim {
        let mut state = StateVector::basis(n, col)?;
        for (gate, targets) in &ladder {
            state = apply_on_subset(&state, gate, targets)?;
        }
        let state = permute_qubits(&state, &reversal)?;
        for (row, z) in state.amplitudes().iter().enumerate() {
            entries[row * dim + col] = *z;
        }
    }
    Ok(UnitaryMatrix::from_dense_trusted(n, entries))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(m: &UnitaryMatrix) -> Vec<Vec<f64>> {
        m.rows()
            .into_iter()
            .map(|r| r.into_iter().map(|z| z.re).collect())
            .collect()
    }

    #[test]
    fn wrapper_of_negation() {
        // All 16 (i, j) pairs of the defining formula, evaluated directly.
        let f = ClassicalFunction::from_fn(1, 1, |x| 1 - x).unwrap();
        let mut expected = vec![vec![0.0; 4]; 4];
        for (i, row) in expected.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                let (ix, iy, jx, jy) = (i >> 1, i & 1, j >> 1, j & 1);
                if ix == jx && f.eval(ix) == iy ^ jy {
                    *e = 1.0;
                }
            }
        }
        assert_eq!(
            expected,
            vec![
                vec![0.0, 1.0, 0.0, 0.0],
                vec![1.0, 0.0, 0.0, 0.0],
                vec![0.0, 0.0, 1.0, 0.0],
                vec![0.0, 0.0, 0.0, 1.0],
            ]
        );
        assert_eq!(real(&wrap_classical(&f)), expected);
    }

    #[test]
    fn wrapper_of_zero_function_is_identity() {
        let f = ClassicalFunction::from_fn(1, 1, |_| 0).unwrap();
        assert!(wrap_classical(&f).approx_eq(&UnitaryMatrix::identity(2), 0.0));
    }

    #[test]
    fn wrapper_is_an_involution() {
        let f = ClassicalFunction::from_table(2, 2, vec![3, 1, 0, 2]).unwrap();
        let u = wrap_classical(&f);
        assert!(u.compose(&u).unwrap().approx_eq(&UnitaryMatrix::identity(4), 0.0));
    }

    #[test]
    fn truth_table_round_trip_and_errors() {
        let f = ClassicalFunction::parse_truth_table("# not\n1 1\n0 1\n1 0\n").unwrap();
        assert_eq!(f.table(), &[1, 0]);
        assert_eq!(ClassicalFunction::parse_truth_table(&f.to_truth_table()).unwrap(), f);

        assert!(ClassicalFunction::parse_truth_table("1 1\n0 1\n").is_err());
        assert!(ClassicalFunction::parse_truth_table("1 1\n0 1\n0 0\n").is_err());
        assert!(ClassicalFunction::parse_truth_table("1 1\n0 2\n1 0\n").is_err());
        assert!(ClassicalFunction::parse_truth_table("1 1\n0 1\n2 0\n").is_err());
        assert!(matches!(
            ClassicalFunction::parse_truth_table("7 6\n"),
            Err(Error::Capacity(_))
        ));
    }

    #[test]
    fn size_cap() {
        assert!(matches!(
            ClassicalFunction::from_fn(7, 6, |_| 0),
            Err(Error::Capacity(_))
        ));
        assert!(matches!(inversion_about_mean(13), Err(Error::Capacity(_))));
        assert!(matches!(qft(11), Err(Error::Capacity(_))));
        assert!(matches!(qft(0), Err(Error::Capacity(_))));
    }

    #[test]
    fn r_gate_values() {
        assert!(r_gate(0.0).unwrap().approx_eq(&identity(), 1e-15));
        assert!(r_gate(PI).unwrap().approx_eq(&pauli_z(), 1e-15));
        let s = r_gate(PI / 2.0).unwrap();
        assert!((s.entry(1, 1) - Complex64::i()).norm() < 1e-15);
        assert_eq!(s.entry(0, 0), Complex64::new(1.0, 0.0));
        assert!(r_gate(f64::NAN).is_err());
    }

    #[test]
    fn controlled_phase_values() {
        assert!(controlled_phase(0.0)
            .unwrap()
            .approx_eq(&UnitaryMatrix::identity(2), 1e-15));
        let cz = UnitaryMatrix::diagonal(&[1.0, 1.0, 1.0, -1.0].map(|x| Complex64::new(x, 0.0))).unwrap();
        assert!(controlled_phase(PI).unwrap().approx_eq(&cz, 1e-15));
    }

    #[test]
    fn inversion_about_mean_on_one_qubit_is_x() {
        assert!(inversion_about_mean(1).unwrap().approx_eq(&pauli_x(), 1e-15));
    }

    #[test]
    fn inversion_about_mean_fixes_uniform_and_is_involution() {
        let im = inversion_about_mean(3).unwrap();
        let uniform = vec![Complex64::new(1.0, 0.0); 8];
        let out = im.apply_to_vec(&uniform).unwrap();
        for z in out {
            assert!((z - 1.0).norm() < 1e-12);
        }
        let sq = im.compose(&im).unwrap();
        assert!(sq.approx_eq(&UnitaryMatrix::identity(3), 1e-12));
    }

    #[test]
    fn catalog_gates_square_to_identity() {
        for name in STANDARD_GATES {
            let g = standard_gate(name).unwrap();
            assert!(g.unitarity_defect() < 1e-10, "{name}");
            assert!(g.compose(&g).unwrap().approx_eq(&identity(), 1e-12), "{name}");
        }
        assert!(standard_gate("Q").is_none());
    }

    #[test]
    fn qft_small_cases() {
        assert!(qft(1).unwrap().approx_eq(&hadamard(), 1e-15));
        let q2 = qft(2).unwrap();
        assert!((q2.entry(1, 1) - Complex64::new(0.0, 0.5)).norm() < 1e-12);
        for n in 1..=6 {
            assert!(qft(n).unwrap().unitarity_defect() < 1e-10, "n = {n}");
        }
    }

    #[test]
    fn tensor_power_of_hadamard() {
        let h3 = tensor_power(&hadamard(), 3).unwrap();
        assert_eq!(h3.arity(), 3);
        let s = 1.0 / 8f64.sqrt();
        assert!((h3.entry(7, 7).re + s).abs() < 1e-12);
        assert!(tensor_power(&hadamard(), 0).is_err());
    }
}
