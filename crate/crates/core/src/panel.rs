//! Panels of (n−1)-qubit reduced density matrices and their comparison.

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::ket::Ket;

/// Tolerance used wherever a caller does not supply one.
pub const DEFAULT_TOL: f64 = 1e-9;

/// `(ρ_(1), …, ρ_(n))`; entry `j − 1` carries every label except `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct RdmPanel {
    n: usize,
    entries: Vec<DensityMatrix>,
}

impl RdmPanel {
    /// Assembles a panel, checking that entry `j` omits exactly label `j`.
    pub fn new(entries: Vec<DensityMatrix>) -> Result<Self> {
        let n = entries.len();
        if n < 2 {
            return Err(Error::TooFewQubits { min: 2, n });
        }
        for (idx, e) in entries.iter().enumerate() {
            let j = idx + 1;
            let expected: Vec<usize> = (1..=n).filter(|&k| k != j).collect();
            if e.labels() != expected.as_slice() {
                return Err(Error::InvalidLabels(format!(
                    "panel entry {j} carries labels {:?}, expected {expected:?}",
                    e.labels()
                )));
            }
        }
        Ok(Self { n, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[DensityMatrix] {
        &self.entries
    }

    /// `ρ_(j)`, 1-based.
    pub fn entry(&self, j: usize) -> &DensityMatrix {
        &self.entries[j - 1]
    }

    /// The one-qubit marginal of qubit `m` as derived from entry `j ≠ m`.
    pub fn one_qubit_marginal(&self, j: usize, m: usize) -> Result<DensityMatrix> {
        if j == m {
            return Err(Error::LabelNotPresent(m));
        }
        let traced: Vec<usize> = (1..=self.n).filter(|&k| k != j && k != m).collect();
        self.entry(j).partial_trace(&traced)
    }

    /// Worst disagreement between one-qubit marginals derived from different
    /// entries. Zero (to rounding) for panels of a single state.
    pub fn internal_inconsistency(&self) -> f64 {
        let mut worst = 0.0f64;
        for m in 1..=self.n {
            let derived: Vec<DensityMatrix> = (1..=self.n)
                .filter(|&j| j != m)
                .map(|j| self.one_qubit_marginal(j, m).expect("labels are valid"))
                .collect();
            for w in derived.windows(2) {
                worst = worst.max(w[0].max_abs_diff(&w[1]).expect("same label"));
            }
        }
        worst
    }

    /// Largest entrywise deviation over all entries.
    pub fn max_abs_diff(&self, other: &RdmPanel) -> Result<f64> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: other.n,
            });
        }
        self.entries
            .iter()
            .zip(&other.entries)
            .try_fold(0.0f64, |acc, (a, b)| Ok(acc.max(a.max_abs_diff(b)?)))
    }
}

/// A view of a panel with only some entries supplied.
#[derive(Debug, Clone, Copy)]
pub struct PanelSubset<'a> {
    panel: &'a RdmPanel,
    kept: &'a [usize],
}

impl<'a> PanelSubset<'a> {
    pub fn new(panel: &'a RdmPanel, kept: &'a [usize]) -> Result<Self> {
        if kept.is_empty() {
            return Err(Error::InvalidLabels("kept set is empty".into()));
        }
        if let Some(&bad) = kept.iter().find(|&&j| j == 0 || j > panel.n) {
            return Err(Error::QubitOutOfRange { label: bad, n: panel.n });
        }
        Ok(Self { panel, kept })
    }

    pub fn kept(&self) -> &[usize] {
        self.kept
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, &'a DensityMatrix)> + '_ {
        self.kept.iter().map(|&j| (j, self.panel.entry(j)))
    }

    pub fn max_abs_diff(&self, other: &PanelSubset<'_>) -> Result<f64> {
        if self.kept != other.kept || self.panel.n != other.panel.n {
            return Err(Error::DimensionMismatch {
                expected: self.kept.len(),
                got: other.kept.len(),
            });
        }
        self.entries()
            .zip(other.entries())
            .try_fold(0.0f64, |acc, ((_, a), (_, b))| Ok(acc.max(a.max_abs_diff(b)?)))
    }
}

pub fn panel_of_pure(psi: &Ket) -> RdmPanel {
    let n = psi.n();
    let entries = (1..=n)
        .map(|j| psi.trace_out(j).expect("label in range"))
        .collect();
    RdmPanel { n, entries }
}

pub fn panel_of_mixed(rho: &DensityMatrix) -> Result<RdmPanel> {
    let n = rho.num_qubits();
    if rho.labels() != (1..=n).collect::<Vec<_>>().as_slice() {
        return Err(Error::InvalidLabels(format!(
            "expected labels 1..={n}, got {:?}",
            rho.labels()
        )));
    }
    let entries = (1..=n)
        .map(|j| rho.partial_trace(&[j]))
        .collect::<Result<Vec<_>>>()?;
    RdmPanel::new(entries)
}

pub fn panels_equal(a: &RdmPanel, b: &RdmPanel, tol: f64) -> Result<bool> {
    Ok(a.max_abs_diff(b)? <= tol)
}

/// True when `ρ_(j)(a) = ρ_(j)(b)` within `tol` for every `j` in `kept`.
pub fn subset_equal(a: &Ket, b: &Ket, kept: &[usize], tol: f64) -> Result<bool> {
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    let pa = panel_of_pure(a);
    let pb = panel_of_pure(b);
    let sa = PanelSubset::new(&pa, kept)?;
    let sb = PanelSubset::new(&pb, kept)?;
    Ok(sa.max_abs_diff(&sb)? <= tol)
}
