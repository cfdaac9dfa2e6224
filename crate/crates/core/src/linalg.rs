//! Complex vector and matrix arithmetic for 2^k-dimensional registers.
//!
//! Qubit position 0 is the most significant bit of a basis-state index, so
//! in a `k`-qubit register position `p` lives at bit `k - 1 - p`. This is
//! the same orientation a circuit diagram has: the top line is the leading
//! bit of every bit pattern.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Amplitude = Complex64;

/// Entrywise tolerance for `U·U† = I` and for matrix equality.
pub const UNITARY_TOLERANCE: f64 = 1e-10;

/// Tolerance for norm preservation across a single evolution step.
pub const EVOLUTION_TOLERANCE: f64 = 1e-12;

const ZERO: Amplitude = Complex64::new(0.0, 0.0);
const ONE: Amplitude = Complex64::new(1.0, 0.0);

/// The amplitudes of a `k`-qubit register, kept at unit norm.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Amplitude>,
}

impl StateVector {
    /// Builds a state from raw amplitudes and rescales it to unit norm.
    ///
    /// Registers are only defined up to a nonzero multiple, so the zero
    /// vector and non-finite entries are rejected.
    pub fn new(amps: Vec<Amplitude>) -> Result<Self> {
        let num_qubits = qubits_for_len(amps.len())
            .ok_or_else(|| Error::Validation(format!("state length {} is not 2^k with k >= 1", amps.len())))?;
        if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Validation("state has a non-finite amplitude".into()));
        }
        let norm = norm_of(&amps);
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Validation("state must be a nonzero vector".into()));
        }
        let amps = amps.into_iter().map(|z| z / norm).collect();
        Ok(StateVector { num_qubits, amps })
    }

    /// The computational basis state `|index⟩` of a `num_qubits` register.
    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        if num_qubits == 0 {
            return Err(Error::Validation("a register needs at least one qubit".into()));
        }
        let len = 1usize
            .checked_shl(num_qubits as u32)
            .filter(|_| num_qubits < usize::BITS as usize)
            .ok_or_else(|| Error::Capacity(format!("{num_qubits} qubits")))?;
        if index >= len {
            return Err(Error::Validation(format!(
                "basis index {index} out of range for {num_qubits} qubits"
            )));
        }
        let mut amps = vec![ZERO; len];
        amps[index] = ONE;
        Ok(StateVector { num_qubits, amps })
    }

    /// Single-qubit `|0⟩` or `|1⟩`.
    pub fn ket(bit: bool) -> Self {
        StateVector::basis(1, bit as usize).expect("one qubit is always valid")
    }

    pub(crate) fn from_normalized(num_qubits: usize, amps: Vec<Amplitude>) -> Self {
        debug_assert_eq!(amps.len(), 1 << num_qubits);
        StateVector { num_qubits, amps }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn amplitudes(&self) -> &[Amplitude] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Amplitude> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        norm_of(&self.amps)
    }

    /// Largest entrywise modulus of the difference.
    pub fn max_abs_diff(&self, other: &StateVector) -> f64 {
        if self.amps.len() != other.amps.len() {
            return f64::INFINITY;
        }
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &StateVector, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }
}

fn norm_of(amps: &[Amplitude]) -> f64 {
    amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn qubits_for_len(len: usize) -> Option<usize> {
    (len >= 2 && len.is_power_of_two()).then(|| len.trailing_zeros() as usize)
}

/// A strictly increasing list of qubit positions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct QubitIndexList(Vec<usize>);

impl QubitIndexList {
    pub fn new(positions: Vec<usize>) -> Result<Self> {
        if positions.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Validation(format!(
                "qubit positions {positions:?} are not strictly increasing"
            )));
        }
        Ok(QubitIndexList(positions))
    }

    /// Sorts and deduplicates arbitrary positions.
    pub fn from_unsorted(mut positions: Vec<usize>) -> Self {
        positions.sort_unstable();
        positions.dedup();
        QubitIndexList(positions)
    }

    pub fn range(start: usize, end: usize) -> Self {
        QubitIndexList((start..end).collect())
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, q: usize) -> bool {
        self.0.binary_search(&q).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn is_disjoint(&self, other: &QubitIndexList) -> bool {
        self.iter().all(|q| !other.contains(q))
    }

    pub fn union(&self, other: &QubitIndexList) -> QubitIndexList {
        QubitIndexList::from_unsorted(self.iter().chain(other.iter()).collect())
    }

    /// Errors unless every position is below `num_qubits`.
    pub fn check_within(&self, num_qubits: usize) -> Result<()> {
        match self.0.last() {
            Some(&last) if last >= num_qubits => Err(Error::Dimension(format!(
                "qubit position {last} out of range for a {num_qubits}-qubit register"
            ))),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    /// Row-major `dim × dim` entries.
    Dense(Vec<Amplitude>),
    /// Column `j` maps to row `images[j]`; every nonzero entry is 1.
    Permutation(Vec<usize>),
}

/// A unitary of order `2^arity`, checked at construction.
///
/// Permutation matrices keep a compact form; the quantum wrapper of a
/// classical function is one and reaches order 4096 at desk scale.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix {
    arity: usize,
    repr: Repr,
}

impl UnitaryMatrix {
    /// Row-major entries of a `2^arity` square matrix.
    pub fn new(arity: usize, entries: Vec<Amplitude>) -> Result<Self> {
        if arity == 0 || arity >= usize::BITS as usize / 2 {
            return Err(Error::Validation(format!("gate arity {arity} is not supported")));
        }
        let dim = 1usize << arity;
        if entries.len() != dim * dim {
            return Err(Error::Dimension(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                entries.len()
            )));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Validation("matrix has a non-finite entry".into()));
        }
        let defect = unitarity_defect(dim, &entries);
        if defect > UNITARY_TOLERANCE {
            return Err(Error::Validation(format!(
                "matrix is not unitary: max |U·U† - I| = {defect:.3e}"
            )));
        }
        Ok(UnitaryMatrix {
            arity,
            repr: Repr::Dense(entries),
        })
    }

    pub fn from_rows(rows: &[Vec<Amplitude>]) -> Result<Self> {
        let dim = rows.len();
        let arity = qubits_for_len(dim)
            .ok_or_else(|| Error::Dimension(format!("matrix order {dim} is not 2^a with a >= 1")))?;
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::Dimension(format!(
                "row of length {} in a matrix of order {dim}",
                bad.len()
            )));
        }
        UnitaryMatrix::new(arity, rows.concat())
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<Amplitude>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        UnitaryMatrix::from_rows(&rows)
    }

    /// The permutation matrix sending basis state `j` to `images[j]`.
    pub fn from_permutation(images: Vec<usize>) -> Result<Self> {
        let arity = qubits_for_len(images.len()).ok_or_else(|| {
            Error::Dimension(format!("permutation length {} is not 2^a with a >= 1", images.len()))
        })?;
        let mut seen = vec![false; images.len()];
        for &i in &images {
            if i >= images.len() || std::mem::replace(&mut seen[i], true) {
                return Err(Error::Validation("images do not form a permutation".into()));
            }
        }
        Ok(UnitaryMatrix {
            arity,
            repr: Repr::Permutation(images),
        })
    }

    pub fn identity(arity: usize) -> Self {
        UnitaryMatrix {
            arity,
            repr: Repr::Permutation((0..1 << arity).collect()),
        }
    }

    /// For matrices that are unitary by construction (products, Kronecker
    /// products and closed-form families).
    pub(crate) fn from_dense_trusted(arity: usize, entries: Vec<Amplitude>) -> Self {
        debug_assert_eq!(entries.len(), 1 << (2 * arity));
        UnitaryMatrix {
            arity,
            repr: Repr::Dense(entries),
        }
    }

    pub fn diagonal(phases: &[Amplitude]) -> Result<Self> {
        let dim = phases.len();
        let arity = qubits_for_len(dim)
            .ok_or_else(|| Error::Dimension(format!("diagonal length {dim} is not 2^a with a >= 1")))?;
        let mut entries = vec![ZERO; dim * dim];
        for (i, &z) in phases.iter().enumerate() {
            entries[i * dim + i] = z;
        }
        UnitaryMatrix::new(arity, entries)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Matrix order, `2^arity`.
    pub fn dim(&self) -> usize {
        1 << self.arity
    }

    pub fn entry(&self, row: usize, col: usize) -> Amplitude {
        match &self.repr {
            Repr::Dense(m) => m[row * self.dim() + col],
            Repr::Permutation(p) => {
                if p[col] == row {
                    ONE
                } else {
                    ZERO
                }
            }
        }
    }

    /// Row-major dense copy of the entries.
    pub fn to_dense(&self) -> Vec<Amplitude> {
        match &self.repr {
            Repr::Dense(m) => m.clone(),
            Repr::Permutation(p) => {
                let dim = self.dim();
                let mut m = vec![ZERO; dim * dim];
                for (col, &row) in p.iter().enumerate() {
                    m[row * dim + col] = ONE;
                }
                m
            }
        }
    }

    pub fn rows(&self) -> Vec<Vec<Amplitude>> {
        self.to_dense().chunks(self.dim()).map(<[_]>::to_vec).collect()
    }

    /// `Some(images)` when stored as a permutation.
    pub fn permutation(&self) -> Option<&[usize]> {
        match &self.repr {
            Repr::Permutation(p) => Some(p),
            Repr::Dense(_) => None,
        }
    }

    pub fn adjoint(&self) -> UnitaryMatrix {
        match &self.repr {
            Repr::Permutation(p) => {
                let mut inv = vec![0; p.len()];
                for (j, &i) in p.iter().enumerate() {
                    inv[i] = j;
                }
                UnitaryMatrix {
                    arity: self.arity,
                    repr: Repr::Permutation(inv),
                }
            }
            Repr::Dense(m) => {
                let dim = self.dim();
                let mut out = vec![ZERO; dim * dim];
                for i in 0..dim {
                    for j in 0..dim {
                        out[j * dim + i] = m[i * dim + j].conj();
                    }
                }
                UnitaryMatrix::from_dense_trusted(self.arity, out)
            }
        }
    }

    /// The product `self · rhs`, i.e. `rhs` acts first.
    pub fn compose(&self, rhs: &UnitaryMatrix) -> Result<UnitaryMatrix> {
        if self.arity != rhs.arity {
            return Err(Error::Dimension(format!(
                "cannot multiply matrices of arity {} and {}",
                self.arity, rhs.arity
            )));
        }
        if let (Repr::Permutation(a), Repr::Permutation(b)) = (&self.repr, &rhs.repr) {
            let images = b.iter().map(|&j| a[j]).collect();
            return Ok(UnitaryMatrix {
                arity: self.arity,
                repr: Repr::Permutation(images),
            });
        }
        let dim = self.dim();
        let lhs = self.to_dense();
        let rhs = rhs.to_dense();
        let mut out = vec![ZERO; dim * dim];
        for i in 0..dim {
            for l in 0..dim {
                let a = lhs[i * dim + l];
                if a == ZERO {
                    continue;
                }
                for j in 0..dim {
                    out[i * dim + j] += a * rhs[l * dim + j];
                }
            }
        }
        Ok(UnitaryMatrix::from_dense_trusted(self.arity, out))
    }

    /// Plain matrix-vector product on a vector of length `dim`.
    pub fn apply_to_vec(&self, v: &[Amplitude]) -> Result<Vec<Amplitude>> {
        let dim = self.dim();
        if v.len() != dim {
            return Err(Error::Dimension(format!(
                "vector of length {} against a matrix of order {dim}",
                v.len()
            )));
        }
        Ok(match &self.repr {
            Repr::Permutation(p) => {
                let mut out = vec![ZERO; dim];
                for (j, &i) in p.iter().enumerate() {
                    out[i] = v[j];
                }
                out
            }
            Repr::Dense(m) => m
                .chunks(dim)
                .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
                .collect(),
        })
    }

    pub fn max_abs_diff(&self, other: &UnitaryMatrix) -> f64 {
        if self.arity != other.arity {
            return f64::INFINITY;
        }
        let dim = self.dim();
        (0..dim)
            .flat_map(|i| (0..dim).map(move |j| (i, j)))
            .map(|(i, j)| (self.entry(i, j) - other.entry(i, j)).norm())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &UnitaryMatrix, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }

    /// Max entrywise deviation of `U·U†` from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        match &self.repr {
            Repr::Permutation(_) => 0.0,
            Repr::Dense(m) => unitarity_defect(self.dim(), m),
        }
    }
}

/// Max entrywise `|U·U† - I|` for row-major entries of order `dim`.
pub fn unitarity_defect(dim: usize, entries: &[Amplitude]) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..dim {
        let ri = &entries[i * dim..(i + 1) * dim];
        for j in i..dim {
            let rj = &entries[j * dim..(j + 1) * dim];
            let dot: Amplitude = ri.iter().zip(rj).map(|(a, b)| a * b.conj()).sum();
            let expected = if i == j { ONE } else { ZERO };
            worst = worst.max((dot - expected).norm());
        }
    }
    worst
}

/// Kronecker product `a ⊗ b`; `a` occupies the more significant bits.
pub fn kron(a: &UnitaryMatrix, b: &UnitaryMatrix) -> UnitaryMatrix {
    let arity = a.arity + b.arity;
    if let (Repr::Permutation(pa), Repr::Permutation(pb)) = (&a.repr, &b.repr) {
        let shift = b.arity;
        let mut images = Vec::with_capacity(pa.len() * pb.len());
        for &ia in pa {
            for &ib in pb {
                images.push((ia << shift) | ib);
            }
        }
        return UnitaryMatrix {
            arity,
            repr: Repr::Permutation(images),
        };
    }
    let (da, db) = (a.dim(), b.dim());
    let dim = da * db;
    let mut out = vec![ZERO; dim * dim];
    for i1 in 0..da {
        for j1 in 0..da {
            let x = a.entry(i1, j1);
            if x == ZERO {
                continue;
            }
            for i2 in 0..db {
                for j2 in 0..db {
                    out[(i1 * db + i2) * dim + (j1 * db + j2)] = x * b.entry(i2, j2);
                }
            }
        }
    }
    UnitaryMatrix::from_dense_trusted(arity, out)
}

/// `u ⊗ v`; `u` occupies the more significant bits.
pub fn kron_state(u: &StateVector, v: &StateVector) -> StateVector {
    let amps = u
        .amps
        .iter()
        .flat_map(|a| v.amps.iter().map(move |b| a * b))
        .collect();
    StateVector::from_normalized(u.num_qubits + v.num_qubits, amps)
}

/// Index offsets (within the full register) of each gate basis state.
fn subset_offsets(num_qubits: usize, targets: &[usize]) -> Vec<usize> {
    let a = targets.len();
    (0..1usize << a)
        .map(|g| {
            targets
                .iter()
                .enumerate()
                .filter(|(j, _)| (g >> (a - 1 - j)) & 1 == 1)
                .fold(0, |acc, (_, &t)| acc | 1 << (num_qubits - 1 - t))
        })
        .collect()
}

/// Applies `g` to the qubits in `targets` and the identity elsewhere.
///
/// `targets[0]` feeds the gate's most significant input bit. Positions not
/// listed pass through untouched even when they sit between targets.
pub fn apply_on_subset(
    state: &StateVector,
    g: &UnitaryMatrix,
    targets: &QubitIndexList,
) -> Result<StateVector> {
    if g.arity != targets.len() {
        return Err(Error::Dimension(format!(
            "gate of arity {} applied to {} target qubit(s)",
            g.arity,
            targets.len()
        )));
    }
    let k = state.num_qubits;
    targets.check_within(k)?;
    let offsets = subset_offsets(k, targets.as_slice());
    let target_mask = offsets[offsets.len() - 1];
    let dim = g.dim();
    let amps = &state.amps;
    let mut out = vec![ZERO; amps.len()];
    match &g.repr {
        Repr::Permutation(p) => {
            for base in (0..amps.len()).filter(|b| b & target_mask == 0) {
                for (col, &row) in p.iter().enumerate() {
                    out[base | offsets[row]] = amps[base | offsets[col]];
                }
            }
        }
        Repr::Dense(m) => {
            let mut gathered = vec![ZERO; dim];
            for base in (0..amps.len()).filter(|b| b & target_mask == 0) {
                for (slot, off) in gathered.iter_mut().zip(&offsets) {
                    *slot = amps[base | off];
                }
                for (row, off) in m.chunks(dim).zip(&offsets) {
                    out[base | off] = row.iter().zip(&gathered).map(|(x, y)| x * y).sum();
                }
            }
        }
    }
    Ok(StateVector::from_normalized(k, out))
}

/// Moves the qubit at position `p` to position `perm[p]`.
pub fn permute_qubits(state: &StateVector, perm: &[usize]) -> Result<StateVector> {
    let k = state.num_qubits;
    if perm.len() != k {
        return Err(Error::Validation(format!(
            "permutation of length {} for a {k}-qubit register",
            perm.len()
        )));
    }
    let mut seen = vec![false; k];
    for &p in perm {
        if p >= k || std::mem::replace(&mut seen[p], true) {
            return Err(Error::Validation(format!("{perm:?} is not a permutation of 0..{k}")));
        }
    }
    let mut out = vec![ZERO; state.amps.len()];
    for (idx, &z) in state.amps.iter().enumerate() {
        let mut moved = 0;
        for (p, &target) in perm.iter().enumerate() {
            if (idx >> (k - 1 - p)) & 1 == 1 {
                moved |= 1 << (k - 1 - target);
            }
        }
        out[moved] = z;
    }
    Ok(StateVector::from_normalized(k, out))
}

/// The inverse of a qubit permutation.
pub fn invert_permutation(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (p, &q) in perm.iter().enumerate() {
        inv[q] = p;
    }
    inv
}
