//! Local-unitary stabilizer subalgebra of a pure state.
//!
//! An element is `A = Σ_j i(x_j X_j + y_j Y_j + z_j Z_j)` together with a
//! phase `θ` such that `A|ψ⟩ = iθ|ψ⟩`; these are exactly the directions of
//! `su(2)^n` that fix `|ψ⟩⟨ψ|` under conjugation. Elements are found as the
//! real nullspace of the `2·2^n × (3n+1)` matrix whose columns are
//! `(iX_j)ψ, (iY_j)ψ, (iZ_j)ψ` and `iψ`, split into real and imaginary parts.

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::ket::{Ket, SingleQubitUnitary};
use crate::linalg::{paulis, I};
use crate::schmidt::schmidt_split;

pub const ACTION_TOL: f64 = 1e-8;
/// Absolute floor of the nullspace rule.
pub const NULL_FLOOR: f64 = 1e-9;
const PRODUCT_WEIGHT: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement {
    /// `(x_j, y_j, z_j)` for qubit `j = 1..=n`.
    pub coords: Vec<[f64; 3]>,
    /// `θ` in `A|ψ⟩ = iθ|ψ⟩`.
    pub phase: f64,
}

impl AlgebraElement {
    pub fn n(&self) -> usize {
        self.coords.len()
    }

    /// The single-qubit generator `i(xX + yY + zZ)` on qubit `j`.
    pub fn local_generator(&self, j: usize) -> Matrix2<C64> {
        let [x, y, z] = self.coords[j - 1];
        let [px, py, pz] = paulis();
        (px * C64::from(x) + py * C64::from(y) + pz * C64::from(z)) * I
    }

    /// `‖Aψ − iθψ‖`.
    pub fn action_residual(&self, psi: &Ket) -> Result<f64> {
        if psi.n() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                got: psi.n(),
            });
        }
        let mut acc: Vec<C64> = psi.amplitudes().iter().map(|z| -z * I * self.phase).collect();
        for j in 1..=self.n() {
            let g = psi.apply_matrix(j, &self.local_generator(j))?;
            for (a, b) in acc.iter_mut().zip(g.amplitudes()) {
                *a += b;
            }
        }
        Ok(acc.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
    }

    /// Conjugates every qubit's generator by its local unitary: `U_j A_j U_j†`.
    pub fn conjugated(&self, locals: &[SingleQubitUnitary]) -> Self {
        let [px, py, pz] = paulis();
        let coords = (1..=self.n())
            .map(|j| {
                let u = locals
                    .iter()
                    .find(|u| u.target == j)
                    .map(|u| u.matrix)
                    .unwrap_or_else(Matrix2::identity);
                let a = u * self.local_generator(j) * u.adjoint();
                // tr(A σ) = 2i·coefficient
                [px, py, pz].map(|p| (a * p).trace().im / 2.0)
            })
            .collect();
        Self {
            coords,
            phase: self.phase,
        }
    }

    fn as_vector(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.coords.iter().flatten().copied().collect();
        v.push(self.phase);
        v
    }
}

#[derive(Debug, Clone)]
pub struct StabilizerBasis {
    pub elements: Vec<AlgebraElement>,
    pub dimension: usize,
    /// Singular values of the constraint matrix, descending.
    pub singular_values: Vec<f64>,
    pub threshold: f64,
}

/// The real `2·2^n × (3n+1)` constraint matrix; rows alternate real and
/// imaginary parts of each amplitude.
pub fn constraint_matrix(psi: &Ket) -> DMatrix<f64> {
    let n = psi.n();
    let d = psi.dim();
    let mut m = DMatrix::zeros(2 * d, 3 * n + 1);
    let ps = paulis();
    for j in 1..=n {
        for (k, p) in ps.iter().enumerate() {
            let col = psi.apply_matrix(j, &(p * I)).expect("label in range");
            for (r, z) in col.amplitudes().iter().enumerate() {
                m[(2 * r, 3 * (j - 1) + k)] = z.re;
                m[(2 * r + 1, 3 * (j - 1) + k)] = z.im;
            }
        }
    }
    for (r, z) in psi.amplitudes().iter().enumerate() {
        let iz = z * I;
        m[(2 * r, 3 * n)] = iz.re;
        m[(2 * r + 1, 3 * n)] = iz.im;
    }
    m
}

/// Zero-singular-value rule: below `max(1e−9, 1e−12·σ_max·size)`.
pub fn null_threshold(sigma_max: f64, rows: usize, cols: usize) -> f64 {
    NULL_FLOOR.max(1e-12 * sigma_max * rows.max(cols) as f64)
}

pub fn stabilizer_subalgebra(psi: &Ket) -> StabilizerBasis {
    stabilizer_with_threshold(psi, None)
}

/// Same as [`stabilizer_subalgebra`] with an explicit zero threshold.
pub fn stabilizer_with_threshold(psi: &Ket, threshold: Option<f64>) -> StabilizerBasis {
    let n = psi.n();
    let m = constraint_matrix(psi);
    let (rows, cols) = m.shape();
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("v_t requested");

    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let singular_values: Vec<f64> = order.iter().map(|&k| svd.singular_values[k]).collect();
    let threshold = threshold.unwrap_or_else(|| null_threshold(singular_values[0], rows, cols));

    let null_rows: Vec<Vec<f64>> = order
        .iter()
        .filter(|&&k| svd.singular_values[k] < threshold)
        .map(|&k| v_t.row(k).iter().copied().collect())
        .collect();

    let elements: Vec<AlgebraElement> = reduced_echelon(null_rows)
        .into_iter()
        .map(|v| AlgebraElement {
            coords: v[..3 * n].chunks(3).map(|c| [c[0], c[1], c[2]]).collect(),
            phase: -v[3 * n],
        })
        .collect();

    StabilizerBasis {
        dimension: elements.len(),
        elements,
        singular_values,
        threshold,
    }
}

/// Gauss–Jordan elimination with partial pivoting; rows come back ordered by
/// pivot column with unit pivots.
fn reduced_echelon(mut rows: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let k = rows.len();
    if k == 0 {
        return rows;
    }
    let cols = rows[0].len();
    let mut rank = 0;
    for c in 0..cols {
        if rank == k {
            break;
        }
        let (best, mag) = (rank..k)
            .map(|r| (r, rows[r][c].abs()))
            .fold((rank, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if mag < 1e-10 {
            continue;
        }
        rows.swap(rank, best);
        let pivot = rows[rank][c];
        rows[rank].iter_mut().for_each(|x| *x /= pivot);
        let pivot_row = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == rank {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                row.iter_mut().zip(&pivot_row).for_each(|(x, p)| *x -= f * p);
            }
        }
        rank += 1;
    }
    for row in rows.iter_mut() {
        row.iter_mut().for_each(|x| {
            if x.abs() < 1e-13 {
                *x = 0.0
            }
        });
    }
    rows.truncate(rank);
    rows
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DimensionVerdict {
    Undetermined,
    Determined,
    /// The dimension criterion is only asserted for n = 3 and n ≥ 5.
    Inapplicable,
}

/// True when some one-qubit cut has (numerically) a single Schmidt term.
pub fn is_product_somewhere(psi: &Ket) -> bool {
    (1..=psi.n()).any(|j| {
        schmidt_split(psi, j)
            .map(|s| s.minor_weight() < PRODUCT_WEIGHT)
            .unwrap_or(true)
    })
}

pub fn undetermined_by_dimension(psi: &Ket) -> DimensionVerdict {
    let n = psi.n();
    if n < 3 || n == 4 {
        return DimensionVerdict::Inapplicable;
    }
    if is_product_somewhere(psi) {
        return DimensionVerdict::Determined;
    }
    if stabilizer_subalgebra(psi).dimension == n - 1 {
        DimensionVerdict::Undetermined
    } else {
        DimensionVerdict::Determined
    }
}

/// Checks that, after conjugation by `locals`, the basis spans exactly
/// `{Σ_j i t_j Z_j : Σ_j t_j = 0}`.
pub fn verify_ghz_subalgebra(basis: &StabilizerBasis, locals: &[SingleQubitUnitary]) -> Result<bool> {
    let Some(first) = basis.elements.first() else {
        return Ok(false);
    };
    let n = first.n();
    if locals.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: locals.len(),
        });
    }
    if n < 2 || basis.dimension != n - 1 || basis.elements.len() != n - 1 {
        return Ok(false);
    }
    for el in &basis.elements {
        let c = el.conjugated(locals);
        let scale = c.as_vector().iter().fold(0.0f64, |a, x| a.max(x.abs())).max(1.0);
        let tol = ACTION_TOL * scale;
        let off_axis = c.coords.iter().any(|[x, y, _]| x.abs() > tol || y.abs() > tol);
        let z_sum: f64 = c.coords.iter().map(|v| v[2]).sum();
        if off_axis || c.phase.abs() > tol || z_sum.abs() > tol {
            return Ok(false);
        }
    }
    // n − 1 independent vectors inside an (n − 1)-dimensional space
    Ok(true)
}
