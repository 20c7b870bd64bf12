//! Dense complex helpers: Hermitian eigensolver front end, 2×2 unitary
//! utilities and the phase conventions shared by the rest of the crate.

use nalgebra::{DMatrix, DVector, Matrix2, Vector2};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub const HERMITIAN_TOL: f64 = 1e-10;

pub(crate) const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub(crate) const ONE: C64 = C64 { re: 1.0, im: 0.0 };
pub(crate) const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Eigenpairs of a Hermitian matrix, sorted by descending eigenvalue.
///
/// Column `k` of `vectors` is the eigenvector for `values[k]`. Each vector is
/// phase-fixed so that its largest-magnitude component is real and positive.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: DMatrix<C64>,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn vector(&self, k: usize) -> DVector<C64> {
        self.vectors.column(k).into_owned()
    }

    /// `Σ λ_k v_k v_k†`.
    pub fn reassemble(&self) -> DMatrix<C64> {
        let d = self.vectors.nrows();
        let mut out = DMatrix::zeros(d, d);
        for (k, &lambda) in self.values.iter().enumerate() {
            let v = self.vectors.column(k);
            out += (v * v.adjoint()) * C64::from(lambda);
        }
        out
    }
}

/// Largest entrywise deviation from Hermiticity, `max |H_ab − conj(H_ba)|`.
pub fn hermitian_deviation(h: &DMatrix<C64>) -> f64 {
    let d = h.nrows();
    let mut worst = 0.0f64;
    for a in 0..d {
        for b in a..d {
            worst = worst.max((h[(a, b)] - h[(b, a)].conj()).norm());
        }
    }
    worst
}

pub fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

/// Full eigendecomposition of a Hermitian matrix.
pub fn spectral_decompose(h: &DMatrix<C64>) -> Result<Spectrum> {
    if h.nrows() != h.ncols() {
        return Err(Error::NotSquare(h.nrows(), h.ncols()));
    }
    let dev = hermitian_deviation(h);
    if dev > HERMITIAN_TOL * max_abs(h).max(1.0) {
        return Err(Error::NotHermitian(dev));
    }
    let sym = (h + h.adjoint()) * C64::from(0.5);
    let eig = sym.symmetric_eigen();

    let d = h.nrows();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

    let mut vectors = DMatrix::zeros(d, d);
    let mut values = Vec::with_capacity(d);
    for (slot, &k) in order.iter().enumerate() {
        values.push(eig.eigenvalues[k]);
        let mut v: DVector<C64> = eig.eigenvectors.column(k).into_owned();
        let norm = v.norm();
        v /= C64::from(norm);
        fix_phase(v.as_mut_slice());
        vectors.set_column(slot, &v);
    }
    Ok(Spectrum { values, vectors })
}

/// Rotate `v` so that its largest-magnitude component is real and positive.
/// Near-ties resolve to the lowest index.
pub fn fix_phase(v: &mut [C64]) {
    let biggest = v.iter().fold(0.0f64, |acc, z| acc.max(z.norm()));
    if biggest == 0.0 {
        return;
    }
    let pick = v
        .iter()
        .position(|z| z.norm() >= biggest * (1.0 - 1e-12))
        .unwrap_or(0);
    let phase = v[pick].conj() / v[pick].norm();
    for z in v.iter_mut() {
        *z *= phase;
    }
}

pub fn pauli_x() -> Matrix2<C64> {
    Matrix2::new(ZERO, ONE, ONE, ZERO)
}

pub fn pauli_y() -> Matrix2<C64> {
    Matrix2::new(ZERO, -I, I, ZERO)
}

pub fn pauli_z() -> Matrix2<C64> {
    Matrix2::new(ONE, ZERO, ZERO, -ONE)
}

pub fn hadamard() -> Matrix2<C64> {
    let s = C64::from(std::f64::consts::FRAC_1_SQRT_2);
    Matrix2::new(s, s, s, -s)
}

pub fn paulis() -> [Matrix2<C64>; 3] {
    [pauli_x(), pauli_y(), pauli_z()]
}

/// `exp(i r·σ) = cos|r| I + i sin|r| r̂·σ`.
pub fn su2_exp(r: [f64; 3]) -> Matrix2<C64> {
    let theta = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
    let c = C64::from(theta.cos());
    let mut out = Matrix2::identity() * c;
    if theta > 0.0 {
        let s = theta.sin() / theta;
        let gen = pauli_x() * C64::from(r[0]) + pauli_y() * C64::from(r[1]) + pauli_z() * C64::from(r[2]);
        out += gen * (I * s);
    }
    out
}

pub fn unitary_deviation(u: &Matrix2<C64>) -> f64 {
    let p = u * u.adjoint() - Matrix2::identity();
    p.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

/// Nearest unitary in Frobenius norm (polar factor).
pub fn polar_unitary(m: &Matrix2<C64>) -> Matrix2<C64> {
    let svd = m.svd(true, true);
    let u = svd.u.expect("u requested");
    let v_t = svd.v_t.expect("v_t requested");
    u * v_t
}

/// Eigen-decomposition of a normal 2×2 matrix (in practice a unitary).
///
/// Returns eigenvalues and a unitary whose columns are the matching
/// eigenvectors. The commuting Hermitian parts `(L + L†)/2` and
/// `(L − L†)/2i` share the eigenbasis; whichever has the wider gap fixes it.
pub fn normal_eigen_2x2(m: &Matrix2<C64>) -> ([C64; 2], Matrix2<C64>) {
    let re_part = (m + m.adjoint()) * C64::from(0.5);
    let im_part = (m - m.adjoint()) * (-I * 0.5);
    let to_dyn = |a: &Matrix2<C64>| DMatrix::from_fn(2, 2, |r, c| a[(r, c)]);
    let s_re = spectral_decompose(&to_dyn(&re_part)).expect("hermitian by construction");
    let s_im = spectral_decompose(&to_dyn(&im_part)).expect("hermitian by construction");
    let gap_re = s_re.values[0] - s_re.values[1];
    let gap_im = s_im.values[0] - s_im.values[1];
    let basis = if gap_re >= gap_im { s_re } else { s_im };
    let v = Matrix2::from_fn(|r, c| basis.vectors[(r, c)]);
    let lambdas = [0, 1].map(|k| {
        let col: Vector2<C64> = v.column(k).into_owned();
        (col.adjoint() * m * col)[(0, 0)]
    });
    (lambdas, v)
}

pub(crate) fn to_dmatrix(m: &Matrix2<C64>) -> DMatrix<C64> {
    DMatrix::from_fn(2, 2, |r, c| m[(r, c)])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dm(rows: &[[C64; 2]; 2]) -> DMatrix<C64> {
        DMatrix::from_fn(2, 2, |r, c| rows[r][c])
    }

    #[test]
    fn half_identity_has_double_half() {
        let h = DMatrix::<C64>::identity(2, 2) * C64::from(0.5);
        let s = spectral_decompose(&h).unwrap();
        assert!((s.values[0] - 0.5).abs() < 1e-15);
        assert!((s.values[1] - 0.5).abs() < 1e-15);
        let gram = s.vectors.adjoint() * &s.vectors;
        assert!((gram - DMatrix::identity(2, 2)).iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn diagonal_input_keeps_basis() {
        let h = dm(&[[C64::from(0.36), ZERO], [ZERO, C64::from(0.64)]]);
        let s = spectral_decompose(&h).unwrap();
        assert!((s.values[0] - 0.64).abs() < 1e-15);
        assert!((s.values[1] - 0.36).abs() < 1e-15);
        assert!((s.vectors[(1, 0)] - ONE).norm() < 1e-12);
        assert!((s.vectors[(0, 1)] - ONE).norm() < 1e-12);
    }

    #[test]
    fn pauli_x_eigenpairs() {
        let s = spectral_decompose(&to_dmatrix(&pauli_x())).unwrap();
        assert!((s.values[0] - 1.0).abs() < 1e-14);
        assert!((s.values[1] + 1.0).abs() < 1e-14);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s.vectors[(0, 0)] - C64::from(r)).norm() < 1e-12);
        assert!((s.vectors[(1, 0)] - C64::from(r)).norm() < 1e-12);
        // (|0⟩ − |1⟩)/√2 up to the phase convention
        assert!((s.vectors[(0, 1)] + s.vectors[(1, 1)]).norm() < 1e-12);
    }

    #[test]
    fn rejects_non_hermitian() {
        let h = dm(&[[ONE, ONE], [ZERO, ONE]]);
        assert!(matches!(spectral_decompose(&h), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn su2_exp_is_unitary_and_matches_small_angle() {
        let u = su2_exp([0.3, -1.1, 0.7]);
        assert!(unitary_deviation(&u) < 1e-14);
        let z = su2_exp([0.0, 0.0, std::f64::consts::FRAC_PI_2]);
        assert!((z[(0, 0)] - I).norm() < 1e-14);
        assert!((z[(1, 1)] + I).norm() < 1e-14);
    }

    #[test]
    fn normal_eigen_recovers_unitary() {
        let u = su2_exp([0.2, 0.5, -0.4]) * C64::from_polar(1.0, 0.3);
        let (lam, v) = normal_eigen_2x2(&u);
        let d = Matrix2::new(lam[0], ZERO, ZERO, lam[1]);
        let back = v * d * v.adjoint();
        assert!((back - u).iter().all(|z| z.norm() < 1e-12));
        assert!((lam[0].norm() - 1.0).abs() < 1e-12);
    }
}
