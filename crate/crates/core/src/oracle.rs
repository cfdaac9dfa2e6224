//! Slow, direct reference computations used to cross-check the engine.
//!
//! Everything here works on plain dense `Vec<Vec<Complex64>>` matrices and
//! builds each object straight from its definition.

use num_complex::Complex64;
use std::f64::consts::PI;

pub type Dense = Vec<Vec<Complex64>>;

pub fn identity(dim: usize) -> Dense {
    (0..dim)
        .map(|i| (0..dim).map(|j| Complex64::new((i == j) as u8 as f64, 0.0)).collect())
        .collect()
}

pub fn mul(a: &Dense, b: &Dense) -> Dense {
    let n = a.len();
    let inner = b.len();
    let m = b.first().map_or(0, Vec::len);
    let mut out = vec![vec![Complex64::new(0.0, 0.0); m]; n];
    for i in 0..n {
        for k in 0..inner {
            let aik = a[i][k];
            for j in 0..m {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

pub fn adjoint(a: &Dense) -> Dense {
    let n = a.len();
    let m = a.first().map_or(0, Vec::len);
    (0..m).map(|i| (0..n).map(|j| a[j][i].conj()).collect()).collect()
}

pub fn kron(a: &Dense, b: &Dense) -> Dense {
    let (ra, ca) = (a.len(), a[0].len());
    let (rb, cb) = (b.len(), b[0].len());
    let mut out = vec![vec![Complex64::new(0.0, 0.0); ca * cb]; ra * rb];
    for i in 0..ra * rb {
        for j in 0..ca * cb {
            out[i][j] = a[i / rb][j / cb] * b[i % rb][j % cb];
        }
    }
    out
}

pub fn apply(m: &Dense, v: &[Complex64]) -> Vec<Complex64> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

/// Left-multiplies `initial` by each matrix in turn.
pub fn dense_eval(circuit: &[Dense], initial: &[Complex64]) -> Result<Vec<Complex64>, String> {
    let mut v = initial.to_vec();
    for (i, m) in circuit.iter().enumerate() {
        if m.len() != v.len() || m.iter().any(|row| row.len() != v.len()) {
            return Err(format!("matrix {i} does not match a vector of length {}", v.len()));
        }
        v = apply(m, &v);
    }
    Ok(v)
}

pub fn max_abs_diff(a: &Dense, b: &Dense) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn unitarity_defect(a: &Dense) -> f64 {
    max_abs_diff(&mul(&adjoint(a), a), &identity(a.len()))
}

fn bit(index: usize, position: usize, k: usize) -> usize {
    (index >> (k - 1 - position)) & 1
}

/// The full `2^k` matrix of `g` acting on `targets` (in the given order),
/// entry by entry: zero unless the untouched bits of row and column agree.
pub fn embed(g: &Dense, targets: &[usize], k: usize) -> Dense {
    let dim = 1usize << k;
    let local = |idx: usize| {
        targets
            .iter()
            .fold(0, |acc, &t| (acc << 1) | bit(idx, t, k))
    };
    let others: Vec<usize> = (0..k).filter(|p| !targets.contains(p)).collect();
    let mut out = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
    for (r, row) in out.iter_mut().enumerate() {
        for (c, entry) in row.iter_mut().enumerate() {
            if others.iter().all(|&p| bit(r, p, k) == bit(c, p, k)) {
                *entry = g[local(r)][local(c)];
            }
        }
    }
    out
}

/// `U(f)|x⟩|y⟩ = |x⟩|y ⊕ f(x)⟩`, written out column by column.
pub fn classical_wrapper(in_bits: usize, out_bits: usize, f: impl Fn(usize) -> usize) -> Dense {
    let dim = 1usize << (in_bits + out_bits);
    let mut out = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
    for x in 0..1usize << in_bits {
        for y in 0..1usize << out_bits {
            let col = x * (1 << out_bits) + y;
            let row = x * (1 << out_bits) + (y ^ f(x));
            out[row][col] = Complex64::new(1.0, 0.0);
        }
    }
    out
}

pub fn hadamard() -> Dense {
    let s = 1.0 / 2f64.sqrt();
    vec![
        vec![Complex64::new(s, 0.0), Complex64::new(s, 0.0)],
        vec![Complex64::new(s, 0.0), Complex64::new(-s, 0.0)],
    ]
}

/// `F[j][k] = e^{2πi·jk/N} / √N`.
pub fn dft_matrix(n: usize) -> Dense {
    let dim = 1usize << n;
    let scale = 1.0 / (dim as f64).sqrt();
    (0..dim)
        .map(|j| {
            (0..dim)
                .map(|k| Complex64::from_polar(scale, 2.0 * PI * ((j * k) % dim) as f64 / dim as f64))
                .collect()
        })
        .collect()
}

/// Success probability of `t` Grover iterations with one marked item among
/// `2^n`: `sin²((2t + 1)·θ)` with `sin θ = 2^{-n/2}`.
pub fn grover_closed_form(n: usize, t: usize) -> f64 {
    let theta = (1.0 / ((1u64 << n) as f64).sqrt()).asin();
    ((2 * t + 1) as f64 * theta).sin().powi(2)
}

/// Probability of each pattern on `positions` (first position most
/// significant), by summing `|a_i|²` over every basis index.
pub fn pattern_distribution(amps: &[Complex64], positions: &[usize]) -> Vec<f64> {
    let k = amps.len().trailing_zeros() as usize;
    let mut out = vec![0.0; 1 << positions.len()];
    for (i, a) in amps.iter().enumerate() {
        let v = positions.iter().fold(0, |acc, &p| (acc << 1) | bit(i, p, k));
        out[v] += a.norm_sqr();
    }
    out
}

/// The state after observing `value` on `positions`, renormalized.
pub fn project(amps: &[Complex64], positions: &[usize], value: usize) -> Vec<Complex64> {
    let k = amps.len().trailing_zeros() as usize;
    let kept: Vec<Complex64> = amps
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let v = positions.iter().fold(0, |acc, &p| (acc << 1) | bit(i, p, k));
            if v == value {
                *a
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    let norm = kept.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    kept.into_iter().map(|a| a / norm).collect()
}
