//! Pure n-qubit states in the computational basis.
//!
//! Linear index of the multi-index `(i_1 … i_n)` is `Σ_j i_j·2^(n−j)`, so
//! qubit 1 is the most significant bit and `|i_1 i_2 ⋯ i_n⟩` reads left to
//! right in dumps.

use std::fmt;

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64 as C64;

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::linalg::{unitary_deviation, ZERO};

pub const NORM_TOL: f64 = 1e-12;
/// Amplitudes below this magnitude are skipped when fixing the global phase.
pub const PHASE_FLOOR: f64 = 1e-9;
pub const MAX_QUBITS: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex {
    bits: Vec<u8>,
}

impl MultiIndex {
    pub fn new(bits: Vec<u8>) -> Self {
        assert!(bits.iter().all(|&b| b <= 1), "multi-index bits must be 0 or 1");
        Self { bits }
    }

    pub fn from_linear(n: usize, index: usize) -> Self {
        let bits = (1..=n).map(|j| ((index >> (n - j)) & 1) as u8).collect();
        Self { bits }
    }

    pub fn to_linear(&self) -> usize {
        self.bits.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize)
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    /// Bit of qubit `j` (1-based).
    pub fn bit(&self, j: usize) -> u8 {
        self.bits[j - 1]
    }

    pub fn complement(&self) -> Self {
        Self {
            bits: self.bits.iter().map(|b| 1 - b).collect(),
        }
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.bits {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

/// Bit mask of qubit `j` (1-based) in an `n`-qubit linear index.
#[inline]
pub fn qubit_mask(n: usize, j: usize) -> usize {
    1 << (n - j)
}

/// Splice bit `b` into an (n−1)-bit index at the position of qubit `j`.
#[inline]
pub(crate) fn splice_bit(n: usize, j: usize, rest: usize, b: usize) -> usize {
    let p = n - j;
    let low = rest & ((1 << p) - 1);
    ((rest >> p) << (p + 1)) | (b << p) | low
}

pub(crate) fn check_label(n: usize, j: usize) -> Result<()> {
    if j == 0 || j > n {
        Err(Error::QubitOutOfRange { label: j, n })
    } else {
        Ok(())
    }
}

/// A normalized (or, from [`tensor_insert`], deliberately unnormalized) ket.
#[derive(Debug, Clone, PartialEq)]
pub struct Ket {
    n: usize,
    amps: Vec<C64>,
}

impl Ket {
    /// Builds a ket and normalizes it.
    pub fn new(n: usize, amps: Vec<C64>) -> Result<Self> {
        let mut ket = Self::unnormalized(n, amps)?;
        let norm = ket.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroNorm);
        }
        ket.amps.iter_mut().for_each(|z| *z /= norm);
        Ok(ket)
    }

    pub fn unnormalized(n: usize, amps: Vec<C64>) -> Result<Self> {
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::TooFewQubits { min: 1, n });
        }
        if amps.len() != 1 << n {
            return Err(Error::DimensionMismatch {
                expected: 1 << n,
                got: amps.len(),
            });
        }
        Ok(Self { n, amps })
    }

    pub fn from_real(n: usize, amps: &[f64]) -> Result<Self> {
        Self::new(n, amps.iter().map(|&x| C64::from(x)).collect())
    }

    pub fn basis(n: usize, index: usize) -> Self {
        let mut amps = vec![ZERO; 1 << n];
        amps[index] = C64::from(1.0);
        Self { n, amps }
    }

    /// `|b_1 b_2 ⋯⟩` from a string such as `"0101"`.
    pub fn from_bitstring(s: &str) -> Result<Self> {
        let bits: Vec<u8> = s
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(Error::InvalidLabels(format!("bad bit {c:?} in {s:?}"))),
            })
            .collect::<Result<_>>()?;
        let idx = MultiIndex::new(bits);
        Ok(Self::basis(idx.len(), idx.to_linear()))
    }

    /// `α|0⋯0⟩ + β|1⋯1⟩`, normalized.
    pub fn generalized_ghz(n: usize, alpha: C64, beta: C64) -> Result<Self> {
        let mut amps = vec![ZERO; 1 << n];
        amps[0] = alpha;
        amps[(1 << n) - 1] = beta;
        Self::new(n, amps)
    }

    pub fn ghz(n: usize) -> Self {
        let s = C64::from(std::f64::consts::FRAC_1_SQRT_2);
        Self::generalized_ghz(n, s, s).expect("valid GHZ")
    }

    /// `(|10⋯0⟩ + |010⋯0⟩ + ⋯ + |0⋯01⟩)/√n`.
    pub fn w_state(n: usize) -> Self {
        let mut amps = vec![ZERO; 1 << n];
        for j in 1..=n {
            amps[qubit_mask(n, j)] = C64::from(1.0);
        }
        Self::new(n, amps).expect("valid W state")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitude(&self, index: &MultiIndex) -> C64 {
        self.amps[index.to_linear()]
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalized(&self) -> Result<Self> {
        Self::new(self.n, self.amps.clone())
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Ket) -> Result<C64> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn scaled(&self, factor: C64) -> Self {
        Self {
            n: self.n,
            amps: self.amps.iter().map(|z| z * factor).collect(),
        }
    }

    /// Global phase rotated so the first amplitude above [`PHASE_FLOOR`] is
    /// real and positive.
    pub fn canonical_phase(&self) -> Self {
        match self.amps.iter().find(|z| z.norm() > PHASE_FLOOR) {
            Some(&lead) => self.scaled(lead.conj() / lead.norm()),
            None => self.clone(),
        }
    }

    /// `self ⊗ other`, with `self` on the leading qubits.
    pub fn tensor(&self, other: &Ket) -> Ket {
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Ket {
            n: self.n + other.n,
            amps,
        }
    }

    /// The `2^(n−1) × 2` matrix `M[rest, i_j] = ψ[I]` that views the state as
    /// a bipartite vector (qubit `j`) ⊗ (all others).
    pub fn flatten(&self, j: usize) -> Result<DMatrix<C64>> {
        check_label(self.n, j)?;
        let half = self.dim() / 2;
        Ok(DMatrix::from_fn(half, 2, |r, b| {
            self.amps[splice_bit(self.n, j, r, b)]
        }))
    }

    /// Applies a 2×2 matrix to qubit `j` without a unitarity check.
    pub fn apply_matrix(&self, j: usize, m: &Matrix2<C64>) -> Result<Ket> {
        check_label(self.n, j)?;
        let mask = qubit_mask(self.n, j);
        let mut out = self.amps.clone();
        for idx in 0..self.dim() {
            if idx & mask != 0 {
                continue;
            }
            let (a0, a1) = (self.amps[idx], self.amps[idx | mask]);
            out[idx] = m[(0, 0)] * a0 + m[(0, 1)] * a1;
            out[idx | mask] = m[(1, 0)] * a0 + m[(1, 1)] * a1;
        }
        Ok(Ket { n: self.n, amps: out })
    }

    /// `|ψ⟩⟨ψ|` on labels `1..=n`.
    pub fn density(&self) -> DensityMatrix {
        let d = self.dim();
        let m = DMatrix::from_fn(d, d, |r, c| self.amps[r] * self.amps[c].conj());
        DensityMatrix::from_parts((1..=self.n).collect(), m)
    }

    /// Reduced density matrix on `kept` (strictly increasing labels).
    pub fn reduced(&self, kept: &[usize]) -> Result<DensityMatrix> {
        let n = self.n;
        if kept.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidLabels(format!("{kept:?} is not strictly increasing")));
        }
        for &j in kept {
            check_label(n, j)?;
        }
        let traced: Vec<usize> = (1..=n).filter(|j| !kept.contains(j)).collect();
        let kept_offsets = subset_offsets(n, kept);
        let traced_offsets = subset_offsets(n, &traced);
        let dk = kept_offsets.len();
        // M[a, t] = ψ[a ⊕ t]; ρ = M M†
        let m = DMatrix::from_fn(dk, traced_offsets.len(), |a, t| {
            self.amps[kept_offsets[a] | traced_offsets[t]]
        });
        let rho = &m * m.adjoint();
        Ok(DensityMatrix::from_parts(kept.to_vec(), rho))
    }

    /// `ρ_(j)`: the (n−1)-qubit marginal with qubit `j` traced out.
    pub fn trace_out(&self, j: usize) -> Result<DensityMatrix> {
        let m = self.flatten(j)?;
        let labels = (1..=self.n).filter(|&k| k != j).collect();
        Ok(DensityMatrix::from_parts(labels, &m * m.adjoint()))
    }

    /// One-qubit marginal `ρ_j`.
    pub fn one_qubit_rdm(&self, j: usize) -> Result<Matrix2<C64>> {
        let m = self.flatten(j)?;
        // ρ_j = Mᵀ M̄
        let g = m.transpose() * m.map(|z| z.conj());
        Ok(Matrix2::from_fn(|r, c| g[(r, c)]))
    }
}

impl fmt::Display for Ket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (idx, z) in self.amps.iter().enumerate() {
            if z.norm() < 1e-12 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({:+.6}{:+.6}i)|{}⟩", z.re, z.im, MultiIndex::from_linear(self.n, idx))?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// For each assignment of the bits of `labels` (in label order, first label
/// most significant), the corresponding contribution to the full linear index.
pub(crate) fn subset_offsets(n: usize, labels: &[usize]) -> Vec<usize> {
    let k = labels.len();
    (0..1usize << k)
        .map(|a| {
            labels.iter().enumerate().fold(0usize, |acc, (pos, &j)| {
                let bit = (a >> (k - 1 - pos)) & 1;
                acc | (bit * qubit_mask(n, j))
            })
        })
        .collect()
}

/// A 2×2 unitary acting on one qubit, promoted to `I ⊗ ⋯ ⊗ U ⊗ ⋯ ⊗ I`.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleQubitUnitary {
    pub target: usize,
    pub matrix: Matrix2<C64>,
}

impl SingleQubitUnitary {
    pub const UNITARY_TOL: f64 = 1e-10;

    pub fn new(target: usize, matrix: Matrix2<C64>) -> Result<Self> {
        let dev = unitary_deviation(&matrix);
        if dev > Self::UNITARY_TOL {
            return Err(Error::NotUnitary(dev));
        }
        if target == 0 {
            return Err(Error::QubitOutOfRange { label: 0, n: 0 });
        }
        Ok(Self { target, matrix })
    }

    pub fn identity(target: usize) -> Self {
        Self {
            target,
            matrix: Matrix2::identity(),
        }
    }

    pub fn adjoint(&self) -> Self {
        Self {
            target: self.target,
            matrix: self.matrix.adjoint(),
        }
    }

    /// True when the matrix is `e^{iγ}·diag(1, e^{iφ})` to within `tol`.
    pub fn is_diagonal(&self, tol: f64) -> bool {
        self.matrix[(0, 1)].norm() < tol && self.matrix[(1, 0)].norm() < tol
    }
}

/// `one_qubit ⊗_j rest`: the n-qubit vector whose amplitude at the index
/// obtained by splicing `i_j` into position `j` is `one_qubit[i_j]·rest[…]`.
pub fn tensor_insert(one_qubit: [C64; 2], rest: &[C64], j: usize) -> Result<Ket> {
    let half = rest.len();
    if half == 0 || !half.is_power_of_two() {
        return Err(Error::DimensionMismatch {
            expected: half.next_power_of_two().max(1),
            got: half,
        });
    }
    let n = half.trailing_zeros() as usize + 1;
    check_label(n, j)?;
    let mut amps = vec![ZERO; 2 * half];
    for (r, &x) in rest.iter().enumerate() {
        for (b, &q) in one_qubit.iter().enumerate() {
            amps[splice_bit(n, j, r, b)] = q * x;
        }
    }
    Ket::unnormalized(n, amps)
}

pub fn apply_local(u: &SingleQubitUnitary, psi: &Ket) -> Result<Ket> {
    psi.apply_matrix(u.target, &u.matrix)
}

/// Applies one unitary per qubit; `locals[k]` acts on its own `target`.
pub fn apply_locals(locals: &[SingleQubitUnitary], psi: &Ket) -> Result<Ket> {
    locals.iter().try_fold(psi.clone(), |acc, u| apply_local(u, &acc))
}

/// `|⟨a|b⟩| ≥ 1 − tol`.
pub fn equal_up_to_phase(a: &Ket, b: &Ket, tol: f64) -> Result<bool> {
    Ok(a.inner(b)?.norm() >= 1.0 - tol)
}
