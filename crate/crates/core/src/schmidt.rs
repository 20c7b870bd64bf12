//! Schmidt decomposition across the cut (qubit j) | (all other qubits).

use nalgebra::{DVector, Vector2};
use num_complex::Complex64 as C64;

use crate::error::Result;
use crate::ket::{tensor_insert, Ket};
use crate::linalg::{spectral_decompose, to_dmatrix, ZERO};

/// Weights closer than this are treated as equal and the basis is not unique.
pub const DEGENERACY_TOL: f64 = 1e-8;
/// Below this weight the second rest vector is completed arbitrarily.
const NULL_WEIGHT: f64 = 1e-24;

/// `ψ = √p⁰ |a₀⟩ ⊗_j |r₀⟩ + √p¹ |a₁⟩ ⊗_j |r₁⟩` with `p⁰ ≥ p¹`.
#[derive(Debug, Clone)]
pub struct SchmidtSplit {
    pub pivot: usize,
    pub weights: [f64; 2],
    pub one_qubit_vectors: [Vector2<C64>; 2],
    pub rest_vectors: [DVector<C64>; 2],
    /// `|p⁰ − p¹| < DEGENERACY_TOL`; the bases are then only fixed up to a
    /// common U(2) rotation.
    pub degenerate: bool,
}

impl SchmidtSplit {
    pub fn n(&self) -> usize {
        self.rest_vectors[0].len().trailing_zeros() as usize + 1
    }

    /// Reassembles the ket from the split.
    pub fn reassemble(&self) -> Ket {
        let mut amps = vec![ZERO; 2 * self.rest_vectors[0].len()];
        for k in 0..2 {
            let s = C64::from(self.weights[k].sqrt());
            let a = self.one_qubit_vectors[k];
            let part = tensor_insert([a[0] * s, a[1] * s], self.rest_vectors[k].as_slice(), self.pivot)
                .expect("split dimensions are consistent");
            for (acc, z) in amps.iter_mut().zip(part.amplitudes()) {
                *acc += z;
            }
        }
        Ket::unnormalized(self.n(), amps).expect("split dimensions are consistent")
    }

    /// Smaller Schmidt weight; zero for a product across this cut.
    pub fn minor_weight(&self) -> f64 {
        self.weights[1]
    }
}

pub fn schmidt_split(psi: &Ket, j: usize) -> Result<SchmidtSplit> {
    let m = psi.flatten(j)?;
    let rho_j = psi.one_qubit_rdm(j)?;
    let spec = spectral_decompose(&to_dmatrix(&rho_j))?;

    let mut weights = [spec.values[0].max(0.0), spec.values[1].max(0.0)];
    let total = weights[0] + weights[1];
    weights[0] /= total;
    weights[1] /= total;

    let a = [0, 1].map(|k| Vector2::new(spec.vectors[(0, k)], spec.vectors[(1, k)]));

    // r_k = M ā_k / √p_k
    let half = m.nrows();
    let mut rest: Vec<DVector<C64>> = Vec::with_capacity(2);
    for k in 0..2 {
        let abar = DVector::from_vec(vec![a[k][0].conj(), a[k][1].conj()]);
        let raw = &m * abar;
        let norm = raw.norm();
        if weights[k] > NULL_WEIGHT && norm > 0.0 {
            rest.push(raw / C64::from(norm));
        } else {
            rest.push(orthogonal_completion(&rest[0], half));
        }
    }
    let rest_vectors = [rest[0].clone(), rest[1].clone()];

    Ok(SchmidtSplit {
        pivot: j,
        weights,
        one_qubit_vectors: a,
        rest_vectors,
        degenerate: (weights[0] - weights[1]).abs() < DEGENERACY_TOL,
    })
}

/// A unit vector orthogonal to `v`, taken from the first basis vector that
/// is far from parallel.
pub(crate) fn orthogonal_completion(v: &DVector<C64>, dim: usize) -> DVector<C64> {
    let mut best: Option<DVector<C64>> = None;
    for e in 0..dim {
        let mut cand = DVector::from_element(dim, ZERO);
        cand[e] = C64::from(1.0);
        let overlap = v.dotc(&cand);
        cand -= v * overlap;
        let norm = cand.norm();
        if norm > 0.5 {
            return cand / C64::from(norm);
        }
        if best.as_ref().is_none_or(|b| b.norm() < norm) {
            best = Some(cand);
        }
    }
    let b = best.expect("dim ≥ 2");
    let norm = b.norm();
    b / C64::from(norm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ket::equal_up_to_phase;

    #[test]
    fn ghz_split_is_degenerate() {
        let s = schmidt_split(&Ket::ghz(3), 1).unwrap();
        assert!((s.weights[0] - 0.5).abs() < 1e-15 && (s.weights[1] - 0.5).abs() < 1e-15);
        assert!(s.degenerate);
        // the rest vectors span {|00⟩, |11⟩}
        for r in &s.rest_vectors {
            let inside = r[0].norm_sqr() + r[3].norm_sqr();
            assert!((inside - 1.0).abs() < 1e-12);
        }
        assert!(equal_up_to_phase(&s.reassemble(), &Ket::ghz(3), 1e-12).unwrap());
    }

    #[test]
    fn product_has_unit_weight() {
        let psi = Ket::from_bitstring("000").unwrap();
        let s = schmidt_split(&psi, 2).unwrap();
        assert!((s.weights[0] - 1.0).abs() < 1e-15);
        assert!(s.weights[1].abs() < 1e-15);
        assert!(s.rest_vectors[0].dotc(&s.rest_vectors[1]).norm() < 1e-12);
        assert!(equal_up_to_phase(&s.reassemble(), &psi, 1e-12).unwrap());
    }

    #[test]
    fn unequal_ghz_weights() {
        // ρ_3 = diag(0.36, 0.64) by direct evaluation of Mᵀ M̄
        let psi = Ket::from_real(3, &[0.6, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.8]).unwrap();
        let s = schmidt_split(&psi, 3).unwrap();
        assert!((s.weights[0] - 0.64).abs() < 1e-14);
        assert!((s.weights[1] - 0.36).abs() < 1e-14);
        assert!(!s.degenerate);
        let back = s.reassemble();
        assert!((back.inner(&psi).unwrap().norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_pivot() {
        assert!(schmidt_split(&Ket::ghz(3), 4).is_err());
    }
}
