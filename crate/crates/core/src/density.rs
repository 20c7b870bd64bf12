use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::ket::{subset_offsets, Ket};
use crate::linalg::{hermitian_deviation, spectral_decompose, Spectrum, ZERO};

pub const DENSITY_TOL: f64 = 1e-10;

/// A density operator on an ordered set of qubit labels.
///
/// Within the matrix, the first label is the most significant bit, matching
/// the ket convention.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    labels: Vec<usize>,
    matrix: DMatrix<C64>,
}

impl DensityMatrix {
    /// Validated constructor: Hermitian, unit trace and PSD within
    /// [`DENSITY_TOL`].
    pub fn new(labels: Vec<usize>, matrix: DMatrix<C64>) -> Result<Self> {
        let rho = Self::with_hermitian_tol(labels, matrix, DENSITY_TOL)?;
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > DENSITY_TOL || tr.im.abs() > DENSITY_TOL {
            return Err(Error::InvalidDensity(format!("trace {tr} is not 1")));
        }
        let spec = rho.spectrum();
        if let Some(&lowest) = spec.values.last() {
            if lowest < -DENSITY_TOL {
                return Err(Error::InvalidDensity(format!("negative eigenvalue {lowest:e}")));
            }
        }
        Ok(rho)
    }

    /// Checks shape, labels and Hermiticity within `herm_tol`, then
    /// symmetrizes. Trace and positivity are left to the caller; loaded panel
    /// files go through here so that damaged entries reach the reconstructor.
    pub fn with_hermitian_tol(labels: Vec<usize>, matrix: DMatrix<C64>, herm_tol: f64) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::NotSquare(matrix.nrows(), matrix.ncols()));
        }
        if labels.contains(&0) || labels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidLabels(format!("{labels:?}")));
        }
        if matrix.nrows() != 1 << labels.len() {
            return Err(Error::DimensionMismatch {
                expected: 1 << labels.len(),
                got: matrix.nrows(),
            });
        }
        let dev = hermitian_deviation(&matrix);
        if dev > herm_tol {
            return Err(Error::NotHermitian(dev));
        }
        let sym = (&matrix + matrix.adjoint()) * C64::from(0.5);
        Ok(Self::from_parts(labels, sym))
    }

    pub(crate) fn from_parts(labels: Vec<usize>, matrix: DMatrix<C64>) -> Self {
        Self { labels, matrix }
    }

    pub fn maximally_mixed(labels: Vec<usize>) -> Self {
        let d = 1 << labels.len();
        let m = DMatrix::identity(d, d) * C64::from(1.0 / d as f64);
        Self::from_parts(labels, m)
    }

    /// `Σ w_k |ψ_k⟩⟨ψ_k|` over kets of equal size.
    pub fn mixture(terms: &[(f64, Ket)]) -> Result<Self> {
        let first = terms.first().ok_or(Error::ZeroNorm)?;
        let n = first.1.n();
        let d = first.1.dim();
        let mut m = DMatrix::from_element(d, d, ZERO);
        for (w, ket) in terms {
            if ket.n() != n {
                return Err(Error::DimensionMismatch { expected: d, got: ket.dim() });
            }
            m += ket.density().matrix * C64::from(*w);
        }
        Self::new((1..=n).collect(), m)
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn num_qubits(&self) -> usize {
        self.labels.len()
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn spectrum(&self) -> Spectrum {
        spectral_decompose(&self.matrix).expect("density matrices are stored Hermitian")
    }

    /// Trace out `traced` (labels carried by this matrix).
    pub fn partial_trace(&self, traced: &[usize]) -> Result<DensityMatrix> {
        for &j in traced {
            if !self.labels.contains(&j) {
                return Err(Error::LabelNotPresent(j));
            }
        }
        let k = self.labels.len();
        // positions act as pseudo-labels 1..=k inside this matrix
        let kept_pos: Vec<usize> = (1..=k).filter(|&p| !traced.contains(&self.labels[p - 1])).collect();
        let traced_pos: Vec<usize> = (1..=k).filter(|&p| traced.contains(&self.labels[p - 1])).collect();
        let ko = subset_offsets(k, &kept_pos);
        let to = subset_offsets(k, &traced_pos);
        let out = DMatrix::from_fn(ko.len(), ko.len(), |a, b| {
            to.iter()
                .map(|&t| self.matrix[(ko[a] | t, ko[b] | t)])
                .sum::<C64>()
        });
        let labels = kept_pos.iter().map(|&p| self.labels[p - 1]).collect();
        Ok(DensityMatrix::from_parts(labels, out))
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> Result<f64> {
        if self.labels != other.labels {
            return Err(Error::InvalidLabels(format!(
                "label sets differ: {:?} vs {:?}",
                self.labels, other.labels
            )));
        }
        Ok(self
            .matrix
            .iter()
            .zip(other.matrix.iter())
            .fold(0.0f64, |acc, (a, b)| acc.max((a - b).norm())))
    }
}
