//! Brute-force cross-checks: sibling search over one-qubit unitaries,
//! random-state generators, and the χ partial-panel example.

use std::f64::consts::PI;

use nalgebra::Matrix2;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::ghz::extract_local_unitary;
use crate::ket::{apply_local, apply_locals, equal_up_to_phase, Ket, SingleQubitUnitary};
use crate::optim::{grid_start, minimize, random_start, DescentConfig, UnitaryObjective};
use crate::panel::{panel_of_pure, RdmPanel};

pub const DEFAULT_BUDGET: usize = 64;
/// Starts taken from the deterministic grid before switching to seeded
/// random ones.
const GRID_STARTS: usize = 16;
/// Descents stop once `Lψ` is this close to the phase orbit of `ψ`.
const SCALAR_GUARD: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct SearchReport {
    pub found: bool,
    /// `(L₁, L₁ψ)`.
    pub witness: Option<(SingleQubitUnitary, Ket)>,
    /// Smallest panel residual `Σ_{j≥2} ‖Δρ_(j)‖²` over the trials, divided
    /// by `d(L)²`, the squared distance of `Lψ` from the phase orbit of `ψ`.
    /// Near that orbit the raw residual vanishes trivially; the ratio does not.
    pub best_residual: f64,
    pub trials: usize,
}

/// `Σ_{j≥2} ‖ρ_(j)(Lψ) − ρ_(j)(ψ)‖²`; descents are stopped once `Lψ` comes
/// within `d(L) = √(1 − |⟨ψ|Lψ⟩|²) < SCALAR_GUARD` of the phase orbit.
struct SiblingObjective<'a> {
    psi: &'a Ket,
    panel: RdmPanel,
}

impl SiblingObjective<'_> {
    fn moved(&self, u: &Matrix2<C64>) -> Ket {
        self.psi.apply_matrix(1, u).expect("qubit 1 exists")
    }

    fn orbit_distance(&self, moved: &Ket) -> f64 {
        let ov = self.psi.inner(moved).expect("same size").norm();
        (1.0 - ov * ov).max(0.0).sqrt()
    }

    fn raw_residual(&self, moved: &Ket) -> Vec<f64> {
        let mut out = Vec::new();
        for j in 2..=self.psi.n() {
            let rho = moved.trace_out(j).expect("label in range");
            let diff = rho.matrix() - self.panel.entry(j).matrix();
            out.extend(diff.iter().flat_map(|z| [z.re, z.im]));
        }
        out
    }
}

impl UnitaryObjective for SiblingObjective<'_> {
    fn residual(&self, u: &Matrix2<C64>) -> Vec<f64> {
        self.raw_residual(&self.moved(u))
    }

    fn keep_going(&self, u: &Matrix2<C64>) -> bool {
        self.orbit_distance(&self.moved(u)) >= SCALAR_GUARD
    }
}

/// Looks for `ψ' = L₁ψ` sharing every marginal with `ψ`.
///
/// Any pure state with the same panel has this form, and `ρ_(1)` is
/// untouched by `L₁`, so only entries 2..n enter the objective. Starts that
/// end on (or are stopped near) the scalar locus are not witnesses.
pub fn search_sibling(psi: &Ket, tol: f64, budget: usize, seed: u64) -> SearchReport {
    let obj = SiblingObjective {
        psi,
        panel: panel_of_pure(psi),
    };
    let cfg = DescentConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = f64::INFINITY;
    for trial in 0..budget {
        let start = if trial < GRID_STARTS {
            grid_start(trial)
        } else {
            random_start(&mut rng)
        };
        let res = minimize(&obj, start, &cfg);
        let moved = obj.moved(&res.unitary);
        let d = obj.orbit_distance(&moved);
        let raw: f64 = obj.raw_residual(&moved).iter().map(|r| r * r).sum();
        if d > 0.0 {
            best = best.min(raw / (d * d));
        }
        let overlap = psi.inner(&moved).expect("same size").norm();
        if raw < tol * tol && overlap < 1.0 - tol {
            let witness = SingleQubitUnitary {
                target: 1,
                matrix: res.unitary,
            };
            return SearchReport {
                found: true,
                witness: Some((witness, moved)),
                best_residual: best,
                trials: trial + 1,
            };
        }
    }
    SearchReport {
        found: false,
        witness: None,
        best_residual: best,
        trials: budget,
    }
}

/// Independent complex Gaussian amplitudes, normalized.
pub fn haar_random_ket(n: usize, seed: u64) -> Ket {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    haar_ket_from(n, &mut rng)
}

fn haar_ket_from(n: usize, rng: &mut ChaCha8Rng) -> Ket {
    let amps = (0..1usize << n)
        .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    Ket::new(n, amps).expect("Gaussian vector is nonzero")
}

pub fn haar_unitary(target: usize, rng: &mut ChaCha8Rng) -> SingleQubitUnitary {
    SingleQubitUnitary {
        target,
        matrix: random_start(rng),
    }
}

/// One independent Haar unitary per qubit.
pub fn random_locals(n: usize, rng: &mut ChaCha8Rng) -> Vec<SingleQubitUnitary> {
    (1..=n).map(|j| haar_unitary(j, rng)).collect()
}

pub fn random_lu_orbit(psi: &Ket, seed: u64) -> Ket {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let locals = random_locals(psi.n(), &mut rng);
    apply_locals(&locals, psi).expect("targets in range")
}

/// `(|0000⟩ + |0001⟩ + |1111⟩)/√3`.
pub fn chi_state() -> Ket {
    let mut amps = vec![0.0; 16];
    for idx in [0b0000, 0b0001, 0b1111] {
        amps[idx] = 1.0;
    }
    Ket::from_real(4, &amps).expect("nonzero")
}

/// Per-qubit unitaries `L_j` with `L_j a = b` up to phase, one per qubit.
///
/// `None` when some `L_j` cannot be produced or fails the transport check.
pub fn lu_equivalence_check(a: &Ket, b: &Ket, tol: f64) -> Result<Option<Vec<SingleQubitUnitary>>> {
    let diff = panel_of_pure(a).max_abs_diff(&panel_of_pure(b))?;
    if diff > tol {
        return Err(Error::PanelMismatch { diff, tol });
    }
    let mut out = Vec::with_capacity(a.n());
    for j in 1..=a.n() {
        let l = match extract_local_unitary(a, b, j, tol) {
            Ok(l) => l,
            Err(Error::NoLocalUnitary { .. }) => return Ok(None),
            Err(e) => return Err(e),
        };
        if !equal_up_to_phase(&apply_local(&l, a)?, b, tol)? {
            return Ok(None);
        }
        out.push(l);
    }
    Ok(Some(out))
}

/// Families used by the cross-checking suites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// Random local-unitary image of `α|0⋯0⟩ + β|1⋯1⟩`, `0.05 ≤ |α|² ≤ 0.95`.
    GhzOrbit,
    /// Random local image of `(|0⋯0⟩ + |1⋯1⟩)/√2`.
    GhzOrbitBalanced,
    Haar,
    Product,
    /// Random product of a one-qubit state with a GHZ orbit on the rest, or
    /// of two smaller GHZ orbits, with qubits shuffled.
    Hybrid,
    /// A GHZ orbit plus a small Haar perturbation.
    NearGhz,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::GhzOrbit,
        Family::GhzOrbitBalanced,
        Family::Haar,
        Family::Product,
        Family::Hybrid,
        Family::NearGhz,
    ];

    /// Whether members of the family are undetermined among pure states.
    pub fn is_ghz_class(self, n: usize) -> bool {
        match self {
            Family::GhzOrbit | Family::GhzOrbitBalanced => true,
            Family::Product | Family::Hybrid => false,
            // every entangled two-qubit state is a generalized GHZ₂
            Family::Haar | Family::NearGhz => n == 2,
        }
    }
}

/// Random GHZ orbit with `|α|²` drawn uniformly from `[lo, hi]`; returns
/// the state and `(|α|, |β|)`.
pub fn random_ghz_orbit(n: usize, lo: f64, hi: f64, rng: &mut ChaCha8Rng) -> (Ket, f64, f64) {
    let p: f64 = rng.random_range(lo..=hi);
    let (a, b) = (p.sqrt(), (1.0 - p).sqrt());
    let phase: f64 = rng.random_range(0.0..2.0 * PI);
    let base = Ket::generalized_ghz(n, C64::from(a), C64::from_polar(b, phase)).expect("n ≥ 1");
    let locals = random_locals(n, rng);
    (apply_locals(&locals, &base).expect("targets in range"), a, b)
}

fn random_product(n: usize, rng: &mut ChaCha8Rng) -> Ket {
    let first = haar_ket_from(1, rng);
    (1..n).fold(first, |acc, _| acc.tensor(&haar_ket_from(1, rng)))
}

/// Moves qubit positions by a random permutation.
fn shuffle_qubits(psi: &Ket, rng: &mut ChaCha8Rng) -> Ket {
    let n = psi.n();
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let k = rng.random_range(0..=i);
        perm.swap(i, k);
    }
    let mut amps = vec![C64::from(0.0); psi.dim()];
    for (idx, z) in psi.amplitudes().iter().enumerate() {
        let mut target = 0;
        for (from, &to) in perm.iter().enumerate() {
            let bit = (idx >> (n - 1 - from)) & 1;
            target |= bit << (n - 1 - to);
        }
        amps[target] = *z;
    }
    Ket::unnormalized(n, amps).expect("same size")
}

pub fn sample(family: Family, n: usize, seed: u64) -> Ket {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match family {
        Family::GhzOrbit => random_ghz_orbit(n, 0.05, 0.95, &mut rng).0,
        Family::GhzOrbitBalanced => random_ghz_orbit(n, 0.5, 0.5, &mut rng).0,
        Family::Haar => haar_ket_from(n, &mut rng),
        Family::Product => random_product(n, &mut rng),
        Family::Hybrid => {
            let split = if n >= 4 && rng.random_bool(0.5) {
                rng.random_range(2..=n - 2)
            } else {
                1
            };
            let left = if split == 1 {
                haar_ket_from(1, &mut rng)
            } else {
                random_ghz_orbit(split, 0.05, 0.95, &mut rng).0
            };
            let right = random_ghz_orbit(n - split, 0.05, 0.95, &mut rng).0;
            shuffle_qubits(&left.tensor(&right), &mut rng)
        }
        Family::NearGhz => {
            let base = random_ghz_orbit(n, 0.05, 0.95, &mut rng).0;
            let noise = haar_ket_from(n, &mut rng);
            let amps = base
                .amplitudes()
                .iter()
                .zip(noise.amplitudes())
                .map(|(a, b)| a + b * 0.05)
                .collect();
            Ket::new(n, amps).expect("nonzero")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::panel::subset_equal;
    use crate::linalg::pauli_z;

    #[test]
    fn haar_ket_is_deterministic_and_normalized() {
        let a = haar_random_ket(4, 7);
        assert_eq!(a, haar_random_ket(4, 7));
        assert!((a.norm() - 1.0).abs() < 1e-12);
        assert!(a.inner(&haar_random_ket(4, 8)).unwrap().norm() < 0.999);
    }

    #[test]
    fn lu_orbit_preserves_norm() {
        let psi = haar_random_ket(3, 1);
        let moved = random_lu_orbit(&psi, 2);
        assert!((moved.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn chi_facts() {
        let chi = chi_state();
        assert!((chi.amplitudes()[0].re - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        let z1 = chi.apply_matrix(1, &pauli_z()).unwrap();
        assert!(subset_equal(&chi, &z1, &[1, 2, 3], 1e-10).unwrap());
        assert!(!subset_equal(&chi, &z1, &[4], 1e-10).unwrap());
    }

    #[test]
    fn ghz_has_sibling() {
        let rep = search_sibling(&Ket::ghz(3), 1e-9, DEFAULT_BUDGET, 0);
        assert!(rep.found);
        let (l, sib) = rep.witness.unwrap();
        assert!(l.is_diagonal(1e-6), "{:?}", l.matrix);
        assert!(!equal_up_to_phase(&sib, &Ket::ghz(3), 1e-9).unwrap());
    }

    #[test]
    fn w_state_has_no_sibling() {
        let rep = search_sibling(&Ket::w_state(3), 1e-9, DEFAULT_BUDGET, 0);
        assert!(!rep.found);
        assert_eq!(rep.trials, DEFAULT_BUDGET);
    }

    #[test]
    fn zero_budget_runs_nothing() {
        let rep = search_sibling(&Ket::ghz(3), 1e-9, 0, 0);
        assert!(!rep.found);
        assert_eq!(rep.trials, 0);
    }

    #[test]
    fn shuffle_is_a_permutation() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let psi = Ket::basis(3, 0b100);
        let moved = shuffle_qubits(&psi, &mut rng);
        let ones: Vec<usize> = (0..8).filter(|&i| moved.amplitudes()[i].norm() > 0.5).collect();
        assert_eq!(ones.len(), 1);
        assert_eq!(ones[0].count_ones(), 1);
    }

    #[test]
    fn lu_check_on_ghz_sibling() {
        let ghz = Ket::ghz(3);
        let sib = Ket::from_real(3, &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, -1.0]).unwrap();
        let locals = lu_equivalence_check(&ghz, &sib, 1e-9).unwrap().unwrap();
        for l in &locals {
            assert!(l.is_diagonal(1e-9));
            let ratio = l.matrix[(1, 1)] / l.matrix[(0, 0)];
            assert!((ratio + 1.0).norm() < 1e-9);
        }
    }
}
