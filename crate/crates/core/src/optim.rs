//! Levenberg–Marquardt descent over single-qubit unitaries.
//!
//! Iterates live on U(2). Steps are taken in right-trivialized coordinates,
//! `U ← U·exp(i δ·σ)`, so every iterate is exactly unitary and no chart
//! singularities appear. The Jacobian of the residual vector is formed by
//! central differences in those coordinates.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, Matrix2};
use num_complex::Complex64 as C64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::linalg::su2_exp;

/// Least-squares objective over one 2×2 unitary.
pub trait UnitaryObjective {
    fn residual(&self, u: &Matrix2<C64>) -> Vec<f64>;

    /// Returning false ends the descent at the current iterate.
    fn keep_going(&self, _u: &Matrix2<C64>) -> bool {
        true
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DescentConfig {
    pub max_iters: usize,
    /// Stop once `‖Jᵀr‖` falls below this.
    pub grad_tol: f64,
    /// Stop once the cost `‖r‖²` falls below this.
    pub cost_tol: f64,
    pub step_tol: f64,
    pub fd_step: f64,
    /// Also move the global phase. Leave off for objectives that are
    /// invariant under `U → e^{iγ}U`.
    pub with_phase: bool,
}

impl Default for DescentConfig {
    fn default() -> Self {
        Self {
            max_iters: 200,
            grad_tol: 1e-12,
            cost_tol: 1e-30,
            step_tol: 1e-15,
            fd_step: 1e-6,
            with_phase: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DescentResult {
    pub unitary: Matrix2<C64>,
    /// `‖r‖²` at the final iterate.
    pub cost: f64,
    pub grad_norm: f64,
    pub iterations: usize,
    pub stopped_by_guard: bool,
}

fn sq_norm(r: &[f64]) -> f64 {
    r.iter().map(|x| x * x).sum()
}

/// Moves `u` by `δ` in right-trivialized coordinates; `δ[3]`, when present,
/// is the global phase.
fn retract(u: &Matrix2<C64>, delta: &[f64]) -> Matrix2<C64> {
    let step = u * su2_exp([delta[0], delta[1], delta[2]]);
    match delta.get(3) {
        Some(&gamma) => step * C64::from_polar(1.0, gamma),
        None => step,
    }
}

fn jacobian<O: UnitaryObjective + ?Sized>(obj: &O, u: &Matrix2<C64>, dims: usize, h: f64) -> DMatrix<f64> {
    let mut cols: Vec<DVector<f64>> = Vec::with_capacity(dims);
    for m in 0..dims {
        let mut e = vec![0.0; dims];
        e[m] = h;
        let plus = obj.residual(&retract(u, &e));
        e[m] = -h;
        let minus = obj.residual(&retract(u, &e));
        cols.push(DVector::from_iterator(
            plus.len(),
            plus.iter().zip(&minus).map(|(p, q)| (p - q) / (2.0 * h)),
        ));
    }
    DMatrix::from_columns(&cols)
}

pub fn minimize<O: UnitaryObjective + ?Sized>(obj: &O, start: Matrix2<C64>, cfg: &DescentConfig) -> DescentResult {
    let dims = if cfg.with_phase { 4 } else { 3 };
    let mut u = start;
    let mut r = obj.residual(&u);
    let mut cost = sq_norm(&r);
    let mut lambda = 1e-3;
    let mut grad_norm = f64::INFINITY;
    let mut iterations = 0;
    let mut stopped_by_guard = false;

    while iterations < cfg.max_iters {
        if !obj.keep_going(&u) {
            stopped_by_guard = true;
            break;
        }
        if cost < cfg.cost_tol {
            break;
        }
        iterations += 1;
        let jac = jacobian(obj, &u, dims, cfg.fd_step);
        let rv = DVector::from_column_slice(&r);
        let jtj = jac.transpose() * &jac;
        let g = jac.transpose() * rv;
        grad_norm = g.norm();
        if grad_norm < cfg.grad_tol {
            break;
        }
        let diag_floor = 1e-9 * (0..dims).fold(0.0f64, |m, k| m.max(jtj[(k, k)])).max(1e-30);

        let mut accepted = false;
        let mut tiny_step = false;
        for _ in 0..40 {
            let mut a = jtj.clone();
            for k in 0..dims {
                a[(k, k)] += lambda * jtj[(k, k)].max(diag_floor);
            }
            let Some(delta) = a.lu().solve(&(-&g)) else {
                lambda *= 10.0;
                continue;
            };
            if delta.norm() < cfg.step_tol {
                tiny_step = true;
                break;
            }
            let cand = retract(&u, delta.as_slice());
            let r_new = obj.residual(&cand);
            let c_new = sq_norm(&r_new);
            if c_new < cost {
                u = cand;
                r = r_new;
                cost = c_new;
                lambda = (lambda / 3.0).max(1e-12);
                accepted = true;
                break;
            }
            lambda *= 4.0;
            if lambda > 1e16 {
                break;
            }
        }
        if !accepted || tiny_step {
            break;
        }
    }
    DescentResult {
        unitary: u,
        cost,
        grad_norm,
        iterations,
        stopped_by_guard,
    }
}

/// `e^{iγ}·exp(i r·σ)`.
pub fn unitary_from_params(gamma: f64, r: [f64; 3]) -> Matrix2<C64> {
    su2_exp(r) * C64::from_polar(1.0, gamma)
}

fn halton(mut index: usize, base: usize) -> f64 {
    let mut f = 1.0;
    let mut out = 0.0;
    while index > 0 {
        f /= base as f64;
        out += f * (index % base) as f64;
        index /= base;
    }
    out
}

/// Uniform point of SU(2) from three numbers in [0, 1) (Shoemake's map),
/// times the phase `e^{2πi·w}`.
fn unitary_from_unit_cube(u1: f64, u2: f64, u3: f64, w: f64) -> Matrix2<C64> {
    let (s1, s2) = ((1.0 - u1).sqrt(), u1.sqrt());
    let a = C64::new(s1 * (2.0 * PI * u2).sin(), s1 * (2.0 * PI * u2).cos());
    let b = C64::new(s2 * (2.0 * PI * u3).sin(), s2 * (2.0 * PI * u3).cos());
    Matrix2::new(a, -b.conj(), b, a.conj()) * C64::from_polar(1.0, 2.0 * PI * w)
}

/// The `k`-th point (k ≥ 0) of the deterministic start grid: a 4-dimensional
/// Halton sequence in bases 2, 3, 5, 7 pushed through the uniform chart.
pub fn grid_start(k: usize) -> Matrix2<C64> {
    let i = k + 1;
    unitary_from_unit_cube(halton(i, 2), halton(i, 3), halton(i, 5), halton(i, 7))
}

/// Haar-distributed 2×2 unitary.
pub fn random_start(rng: &mut ChaCha8Rng) -> Matrix2<C64> {
    unitary_from_unit_cube(rng.random(), rng.random(), rng.random(), rng.random())
}
