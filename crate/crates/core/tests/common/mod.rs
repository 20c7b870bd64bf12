//! Reference computations written independently of the library internals:
//! explicit index loops and Kronecker products, Gaussian elimination.
#![allow(dead_code)]

use nalgebra::DMatrix;
use rdmpanel::{Ket, C64};

/// `ρ_(j)` by summing `ψ_I ψ̄_K` over pairs that agree on qubit `j`.
pub fn naive_trace_out(psi: &Ket, j: usize) -> DMatrix<C64> {
    let n = psi.n();
    let amps = psi.amplitudes();
    let half = 1usize << (n - 1);
    let mut rho = DMatrix::from_element(half, half, C64::from(0.0));
    for r in 0..half {
        for c in 0..half {
            for b in 0..2 {
                let full_r = insert_bit(n, j, r, b);
                let full_c = insert_bit(n, j, c, b);
                rho[(r, c)] += amps[full_r] * amps[full_c].conj();
            }
        }
    }
    rho
}

/// Builds the full index from the bits of the other qubits (in label order)
/// and the bit `b` of qubit `j`.
pub fn insert_bit(n: usize, j: usize, rest: usize, b: usize) -> usize {
    let mut bits = Vec::with_capacity(n);
    let mut k = 0;
    for label in 1..=n {
        if label == j {
            bits.push(b);
        } else {
            bits.push((rest >> (n - 2 - k)) & 1);
            k += 1;
        }
    }
    bits.iter().fold(0, |acc, &x| (acc << 1) | x)
}

pub fn kron(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    DMatrix::from_fn(ar * br, ac * bc, |r, c| a[(r / br, c / bc)] * b[(r % br, c % bc)])
}

pub fn pauli(k: usize) -> DMatrix<C64> {
    let (z, o, i) = (C64::from(0.0), C64::from(1.0), C64::new(0.0, 1.0));
    match k {
        0 => DMatrix::from_row_slice(2, 2, &[z, o, o, z]),
        1 => DMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        _ => DMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
    }
}

/// `I ⊗ ⋯ ⊗ op ⊗ ⋯ ⊗ I` with `op` at position `j`.
pub fn embed(n: usize, j: usize, op: &DMatrix<C64>) -> DMatrix<C64> {
    let id = DMatrix::<C64>::identity(2, 2);
    (1..=n).fold(DMatrix::<C64>::identity(1, 1), |acc, k| {
        kron(&acc, if k == j { op } else { &id })
    })
}

/// Rank by Gaussian elimination with partial pivoting, relative cut `rel`.
pub fn gauss_rank(m: &DMatrix<f64>, rel: f64) -> usize {
    let mut a = m.clone();
    let (rows, cols) = a.shape();
    let scale = a.iter().fold(0.0f64, |s, x| s.max(x.abs())).max(1e-300);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).max_by(|&x, &y| a[(x, c)].abs().total_cmp(&a[(y, c)].abs())) else {
            break;
        };
        if a[(p, c)].abs() <= rel * scale {
            continue;
        }
        a.swap_rows(rank, p);
        for r in rank + 1..rows {
            let f = a[(r, c)] / a[(rank, c)];
            if f != 0.0 {
                for cc in c..cols {
                    let v = a[(rank, cc)];
                    a[(r, cc)] -= f * v;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Dimension of `{(t, θ) : Σ_j Σ_k t_jk (i σ_k)_j ψ + iθ ψ = 0}` from
/// Kronecker-product operators and elimination.
pub fn stabilizer_nullity(psi: &Ket) -> usize {
    let n = psi.n();
    let d = psi.dim();
    let v = nalgebra::DVector::from_column_slice(psi.amplitudes());
    let i = C64::new(0.0, 1.0);
    let mut cols: Vec<nalgebra::DVector<C64>> = Vec::new();
    for j in 1..=n {
        for k in 0..3 {
            cols.push(embed(n, j, &pauli(k)) * &v * i);
        }
    }
    cols.push(&v * i);
    let real = DMatrix::from_fn(2 * d, cols.len(), |r, c| {
        let z = cols[c][r / 2];
        if r % 2 == 0 {
            z.re
        } else {
            z.im
        }
    });
    cols.len() - gauss_rank(&real, 1e-8)
}

pub fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().fold(0.0f64, |a, z| a.max(z.norm()))
}

/// Linear cluster state on `n` qubits: CZ on neighbours applied to |+⟩^⊗n.
pub fn linear_cluster(n: usize) -> Ket {
    let amps = (0..1usize << n)
        .map(|idx| {
            let bit = |k: usize| (idx >> (n - k)) & 1;
            let parity: usize = (1..n).map(|k| bit(k) & bit(k + 1)).sum();
            C64::from(if parity.is_multiple_of(2) { 1.0 } else { -1.0 })
        })
        .collect();
    Ket::new(n, amps).unwrap()
}

/// `|⟨ψ|φ⟩|²` from raw amplitudes.
pub fn fidelity(a: &Ket, b: &Ket) -> f64 {
    a.amplitudes()
        .iter()
        .zip(b.amplitudes())
        .map(|(x, y)| x.conj() * y)
        .sum::<C64>()
        .norm_sqr()
}
