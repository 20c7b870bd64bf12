//! Inverting the panel map: unique pure state, GHZ family, or incompatible.

use nalgebra::{DMatrix, Matrix2, Vector2};
use num_complex::Complex64 as C64;

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::ghz::{certificate_from_sibling, classify, GhzCertificate};
use crate::ket::{equal_up_to_phase, tensor_insert, Ket};
use crate::linalg::{spectral_decompose, ZERO};
use crate::optim::{grid_start, minimize, DescentConfig, UnitaryObjective};
use crate::panel::{panel_of_pure, RdmPanel};
use crate::schmidt::DEGENERACY_TOL;

/// Cross terms below `FAMILY_FACTOR · tol` count as absent.
const FAMILY_FACTOR: f64 = 10.0;
/// Two minimizers closer than this (in `1 − |⟨a|b⟩|`) are the same state.
const SAME_STATE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Unique(Ket),
    GhzFamily(GhzCertificate),
    Incompatible(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionResult {
    pub outcome: Outcome,
    /// Max entrywise deviation of the reconstructed panel from the input.
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReconstructConfig {
    /// Deterministic starts for the degenerate-pivot descent.
    pub starts: usize,
    pub descent: DescentConfig,
}

impl Default for ReconstructConfig {
    fn default() -> Self {
        Self {
            starts: 16,
            descent: DescentConfig {
                max_iters: 300,
                grad_tol: 1e-12,
                ..DescentConfig::default()
            },
        }
    }
}

/// `Σ_i √pⁱ |i⟩ ⊗_j |v_i⟩` from the top two eigenpairs of `rdm`, plus a
/// flag for `p⁰ ≈ p¹`.
pub fn purify_over_qubit(rdm: &DensityMatrix, j: usize, tol: f64) -> Result<(Ket, bool)> {
    let n = rdm.num_qubits() + 1;
    let expected: Vec<usize> = (1..=n).filter(|&k| k != j).collect();
    if rdm.labels() != expected.as_slice() {
        return Err(Error::InvalidLabels(format!(
            "entry carries {:?}, expected {expected:?}",
            rdm.labels()
        )));
    }
    let spec = spectral_decompose(rdm.matrix())?;
    let rank = spec.values.iter().filter(|&&p| p > tol).count();
    if rank > 2 {
        return Err(Error::RankExceeded {
            entry: j,
            n,
            rank,
            eigenvalue: spec.values[2],
        });
    }
    let p0 = spec.values[0].max(0.0);
    let p1 = spec.values.get(1).copied().unwrap_or(0.0).max(0.0);
    let total = p0 + p1;
    if total <= 0.0 {
        return Err(Error::ZeroNorm);
    }
    let mut amps = vec![ZERO; 2 * rdm.dim()];
    for (k, p) in [p0, p1].into_iter().enumerate().take(spec.len()) {
        let mut basis = [ZERO; 2];
        basis[k] = C64::from((p / total).sqrt());
        let v = spec.vector(k);
        let part = tensor_insert(basis, v.as_slice(), j)?;
        for (acc, z) in amps.iter_mut().zip(part.amplitudes()) {
            *acc += z;
        }
    }
    let degenerate = (p0 - p1).abs() / total < DEGENERACY_TOL;
    Ok((Ket::new(n, amps)?, degenerate))
}

/// Max entrywise deviation between `panel_of_pure(psi)` and `panel`.
pub fn check_panel(psi: &Ket, panel: &RdmPanel) -> Result<f64> {
    if psi.n() != panel.n() {
        return Err(Error::DimensionMismatch {
            expected: panel.n(),
            got: psi.n(),
        });
    }
    panel_of_pure(psi).max_abs_diff(panel)
}

pub fn reconstruct(panel: &RdmPanel, tol: f64) -> Result<ReconstructionResult> {
    reconstruct_with(panel, tol, &ReconstructConfig::default())
}

pub fn reconstruct_with(panel: &RdmPanel, tol: f64, cfg: &ReconstructConfig) -> Result<ReconstructionResult> {
    let n = panel.n();
    let purified: Vec<(Ket, bool)> = (1..=n)
        .map(|j| purify_over_qubit(panel.entry(j), j, tol))
        .collect::<Result<_>>()?;
    let inconsistency = panel.internal_inconsistency();
    if inconsistency > tol {
        return Err(Error::InconsistentPanel(format!(
            "one-qubit marginals disagree by {inconsistency:e}"
        )));
    }
    let pivot = purified.iter().position(|(_, deg)| !deg).map_or(1, |k| k + 1);
    if purified[pivot - 1].1 {
        degenerate_branch(panel, pivot, &purified[pivot - 1].0, tol, cfg)
    } else {
        phase_branch(panel, pivot, tol)
    }
}

fn incompatible(reason: String, residual: f64) -> Result<ReconstructionResult> {
    Ok(ReconstructionResult {
        outcome: Outcome::Incompatible(reason),
        residual,
    })
}

/// `tr_k |y⟩⟨x|` for two (unnormalized) kets.
fn cross_trace(y: &Ket, x: &Ket, k: usize) -> Result<DMatrix<C64>> {
    Ok(y.flatten(k)? * x.flatten(k)?.adjoint())
}

fn real_inner(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum()
}

/// Non-degenerate pivot: `ψ(z) = X + zY` with `|z| = 1`, where the pivot's
/// one-qubit eigenbasis is read from another entry.
fn phase_branch(panel: &RdmPanel, pivot: usize, tol: f64) -> Result<ReconstructionResult> {
    let n = panel.n();
    let entry = panel.entry(pivot);
    let spec = spectral_decompose(entry.matrix())?;
    let other = if pivot == 1 { 2 } else { 1 };
    let marginal = panel.one_qubit_marginal(other, pivot)?;
    let qubit_spec = spectral_decompose(marginal.matrix())?;

    let p0 = spec.values[0].max(0.0);
    let p1 = spec.values.get(1).copied().unwrap_or(0.0).max(0.0);
    let total = p0 + p1;
    let branch = |k: usize, p: f64| -> Result<Ket> {
        let a: Vector2<C64> = Vector2::new(qubit_spec.vectors[(0, k)], qubit_spec.vectors[(1, k)]);
        let s = C64::from((p / total).sqrt());
        tensor_insert([a[0] * s, a[1] * s], spec.vector(k).as_slice(), pivot)
    };
    let x = branch(0, p0)?;

    if p1 / total <= tol {
        let psi = x.normalized()?;
        let residual = check_panel(&psi, panel)?;
        return if residual <= tol {
            Ok(ReconstructionResult {
                outcome: Outcome::Unique(psi),
                residual,
            })
        } else {
            incompatible(format!("product candidate misses the panel by {residual:e}"), residual)
        };
    }
    let y = branch(1, p1)?;

    // ρ_(k)(ψ(z)) − [X-X and Y-Y blocks] = x·P_k + y·Q_k with z = x + iy
    let mut normal = Matrix2::<f64>::zeros();
    let mut rhs = Vector2::<f64>::zeros();
    let mut cross_max = 0.0f64;
    for k in (1..=n).filter(|&k| k != pivot) {
        let c = cross_trace(&y, &x, k)?;
        cross_max = cross_max.max(c.iter().fold(0.0f64, |m, z| m.max(z.norm())));
        let p = &c + c.adjoint();
        let q = (&c - c.adjoint()) * C64::i();
        let target = panel.entry(k).matrix() - cross_trace(&x, &x, k)? - cross_trace(&y, &y, k)?;
        let basis = [&p, &q];
        for r in 0..2 {
            rhs[r] += real_inner(basis[r], &target);
            for s in 0..2 {
                normal[(r, s)] += real_inner(basis[r], basis[s]);
            }
        }
    }

    let build = |z: C64| -> Result<Ket> {
        let amps: Vec<C64> = x.amplitudes().iter().zip(y.amplitudes()).map(|(a, b)| a + z * b).collect();
        Ket::new(n, amps)
    };

    if cross_max < FAMILY_FACTOR * tol {
        let rep = build(C64::from(1.0))?;
        let residual = check_panel(&rep, panel)?;
        if residual > tol {
            return incompatible(format!("family representative misses the panel by {residual:e}"), residual);
        }
        let sib = build(C64::from(-1.0))?;
        return family_outcome(&rep, &sib, residual, tol);
    }

    let Some(sol) = normal.lu().solve(&rhs) else {
        return incompatible("cross-term system is singular".into(), f64::INFINITY);
    };
    let z = C64::new(sol[0], sol[1]);
    if z.norm() == 0.0 {
        return incompatible("relative phase is undetermined".into(), f64::INFINITY);
    }
    let psi = build(z / z.norm())?.canonical_phase();
    let residual = check_panel(&psi, panel)?;
    if residual <= tol {
        Ok(ReconstructionResult {
            outcome: Outcome::Unique(psi),
            residual,
        })
    } else {
        incompatible(format!("best candidate misses the panel by {residual:e}"), residual)
    }
}

fn family_outcome(rep: &Ket, other: &Ket, residual: f64, tol: f64) -> Result<ReconstructionResult> {
    let cert = match classify(rep, tol)?.verdict {
        crate::ghz::Verdict::GhzClass(c) => Some(c),
        crate::ghz::Verdict::Determined => certificate_from_sibling(rep, other, tol).ok(),
    };
    match cert {
        Some(c) => Ok(ReconstructionResult {
            outcome: Outcome::GhzFamily(c),
            residual,
        }),
        None => incompatible(
            "panel admits several pure states but no GHZ certificate verified".into(),
            residual,
        ),
    }
}

/// Residual of `L` on the pivot against all other entries.
struct PanelResidual<'a> {
    base: &'a Ket,
    pivot: usize,
    panel: &'a RdmPanel,
}

impl PanelResidual<'_> {
    fn state(&self, u: &Matrix2<C64>) -> Ket {
        self.base.apply_matrix(self.pivot, u).expect("pivot in range")
    }
}

impl UnitaryObjective for PanelResidual<'_> {
    fn residual(&self, u: &Matrix2<C64>) -> Vec<f64> {
        let psi = self.state(u);
        let mut out = Vec::new();
        for k in (1..=self.panel.n()).filter(|&k| k != self.pivot) {
            let rho = psi.trace_out(k).expect("label in range");
            let diff = rho.matrix() - self.panel.entry(k).matrix();
            // Hermitian: the upper triangle carries everything
            for c in 0..diff.ncols() {
                for r in 0..=c {
                    let z = diff[(r, c)];
                    if r == c {
                        out.push(z.re);
                    } else {
                        out.push(z.re * std::f64::consts::SQRT_2);
                        out.push(z.im * std::f64::consts::SQRT_2);
                    }
                }
            }
        }
        out
    }
}

/// Degenerate pivot: the state is `Lψ₀` for an unknown unitary `L` on the
/// pivot. Multi-start descent over `L`.
fn degenerate_branch(
    panel: &RdmPanel,
    pivot: usize,
    base: &Ket,
    tol: f64,
    cfg: &ReconstructConfig,
) -> Result<ReconstructionResult> {
    let obj = PanelResidual { base, pivot, panel };
    let mut minimizers: Vec<(f64, usize, Ket)> = (0..cfg.starts)
        .map(|k| {
            let res = minimize(&obj, grid_start(k), &cfg.descent);
            let psi = obj.state(&res.unitary).canonical_phase();
            let residual = check_panel(&psi, panel).expect("sizes match");
            (residual, k, psi)
        })
        .collect();
    minimizers.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let best = minimizers.first().map_or(f64::INFINITY, |m| m.0);

    let zeros: Vec<&(f64, usize, Ket)> = minimizers.iter().filter(|m| m.0 <= tol).collect();
    let Some(&(residual, _, ref first)) = zeros.first().copied() else {
        return incompatible(format!("no pure state reproduces the panel (best residual {best:e})"), best);
    };
    let distinct = zeros
        .iter()
        .skip(1)
        .find(|m| !equal_up_to_phase(first, &m.2, SAME_STATE_TOL).unwrap_or(true));
    match distinct {
        Some(other) => family_outcome(first, &other.2, residual, tol),
        None => Ok(ReconstructionResult {
            outcome: Outcome::Unique(first.clone()),
            residual,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::DensityMatrix;

    fn c(x: f64) -> C64 {
        C64::from(x)
    }

    #[test]
    fn purify_ghz_entry_is_degenerate() {
        let ghz = Ket::ghz(3);
        let (cand, deg) = purify_over_qubit(&ghz.trace_out(1).unwrap(), 1, 1e-9).unwrap();
        assert!(deg);
        let diff = cand.trace_out(1).unwrap().max_abs_diff(&ghz.trace_out(1).unwrap()).unwrap();
        assert!(diff < 1e-12);
    }

    #[test]
    fn purify_pure_entry_gives_product() {
        let zero = Ket::basis(3, 0);
        let (cand, deg) = purify_over_qubit(&zero.trace_out(1).unwrap(), 1, 1e-9).unwrap();
        assert!(!deg);
        assert!(equal_up_to_phase(&cand, &zero, 1e-12).unwrap());
    }

    #[test]
    fn purify_rejects_rank_three() {
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(0.5), c(0.3), c(0.2), c(0.0)]));
        let rho = DensityMatrix::new(vec![2, 3], m).unwrap();
        assert!(matches!(
            purify_over_qubit(&rho, 1, 1e-9),
            Err(Error::RankExceeded { rank: 3, .. })
        ));
    }

    #[test]
    fn check_panel_examples() {
        let ghz = Ket::ghz(3);
        let sib = Ket::from_real(3, &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, -1.0]).unwrap();
        assert!(check_panel(&ghz, &panel_of_pure(&ghz)).unwrap() < 1e-12);
        assert!(check_panel(&ghz, &panel_of_pure(&sib)).unwrap() < 1e-12);
        let zero = Ket::basis(3, 0);
        assert!((check_panel(&zero, &panel_of_pure(&ghz)).unwrap() - 0.5).abs() < 1e-12);
        assert!(check_panel(&Ket::ghz(4), &panel_of_pure(&ghz)).is_err());
    }

    #[test]
    fn generalized_ghz_panel_gives_family() {
        let psi = Ket::generalized_ghz(3, c(0.6), c(0.8)).unwrap();
        let res = reconstruct(&panel_of_pure(&psi), 1e-9).unwrap();
        let Outcome::GhzFamily(cert) = res.outcome else {
            panic!("expected family, got {:?}", res.outcome)
        };
        let mags = {
            let mut m = [cert.alpha.norm(), cert.beta.norm()];
            m.sort_by(f64::total_cmp);
            m
        };
        assert!((mags[0] - 0.6).abs() < 1e-9 && (mags[1] - 0.8).abs() < 1e-9);
    }

    #[test]
    fn w_state_is_unique() {
        let w = Ket::w_state(3);
        let res = reconstruct(&panel_of_pure(&w), 1e-9).unwrap();
        let Outcome::Unique(psi) = res.outcome else {
            panic!("expected unique, got {:?}", res.outcome)
        };
        assert!(equal_up_to_phase(&psi, &w, 1e-10).unwrap());
    }

    #[test]
    fn degenerate_pivot_ghz4_gives_family() {
        let res = reconstruct(&panel_of_pure(&Ket::ghz(4)), 1e-9).unwrap();
        assert!(matches!(res.outcome, Outcome::GhzFamily(_)), "{:?}", res.outcome);
    }
}
