//! Generalized-GHZ classification, certificates, siblings, and the
//! constructive steps that turn a sibling pair into a certificate.
//!
//! A state is undetermined among pure states by its (n−1)-qubit marginals
//! exactly when some local unitary brings it to `α|J⟩ + β|J̄⟩` with αβ ≠ 0.

use nalgebra::{DVector, Matrix2, Matrix3, Vector2};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::ket::{apply_local, apply_locals, check_label, splice_bit, Ket, MultiIndex, SingleQubitUnitary};
use crate::linalg::{normal_eigen_2x2, polar_unitary, ZERO};
use crate::panel::{panel_of_pure, panels_equal};
use crate::schmidt::{schmidt_split, SchmidtSplit, DEGENERACY_TOL};

/// Off-support amplitudes of a certificate must stay below this.
pub const SUPPORT_TOL: f64 = 1e-8;
/// Factor pairs closer than this to orthogonal count as orthogonal.
const ORTHO_TOL: f64 = 1e-6;
/// Relative singular-value cut for the minor coefficient matrix.
const MINOR_TRUNCATION: f64 = 1e-10;
/// Half-width (in decades) of the band around [`DEGENERACY_TOL`] in which
/// both branches are run.
const BAND_DECADES: f64 = 2.0;

/// Witness of local-unitary equivalence to `α|J⟩ + β|J̄⟩`.
///
/// Applying every entry of `locals` to the source state gives amplitudes
/// that vanish off `{J, J̄}`.
#[derive(Debug, Clone, PartialEq)]
pub struct GhzCertificate {
    pub locals: Vec<SingleQubitUnitary>,
    pub alpha: C64,
    pub beta: C64,
    pub support: (MultiIndex, MultiIndex),
}

impl GhzCertificate {
    pub fn n(&self) -> usize {
        self.locals.len()
    }

    /// `(⊗_j U_j) ψ`.
    pub fn rotate(&self, psi: &Ket) -> Result<Ket> {
        self.check_size(psi)?;
        apply_locals(&self.locals, psi)
    }

    /// Largest amplitude of the rotated state outside `{J, J̄}`.
    pub fn off_support(&self, psi: &Ket) -> Result<f64> {
        let rotated = self.rotate(psi)?;
        let (j, jbar) = (self.support.0.to_linear(), self.support.1.to_linear());
        Ok(rotated
            .amplitudes()
            .iter()
            .enumerate()
            .filter(|(idx, _)| *idx != j && *idx != jbar)
            .fold(0.0f64, |acc, (_, z)| acc.max(z.norm())))
    }

    /// Checks the certificate invariants against `psi`.
    pub fn validate(&self, psi: &Ket, tol: f64) -> Result<()> {
        let off = self.off_support(psi)?;
        if off > tol {
            return Err(Error::InvalidCertificate(format!(
                "off-support amplitude {off:e} exceeds {tol:e}"
            )));
        }
        if self.support.0.complement() != self.support.1 {
            return Err(Error::InvalidCertificate("support is not an antipodal pair".into()));
        }
        if (self.alpha * self.beta).norm() <= tol {
            return Err(Error::InvalidCertificate("alpha·beta vanishes".into()));
        }
        Ok(())
    }

    /// `U†(α|J⟩ + e^{iφ}β|J̄⟩)`.
    pub fn family_member(&self, phi: f64) -> Ket {
        let n = self.n();
        let mut amps = vec![ZERO; 1 << n];
        amps[self.support.0.to_linear()] = self.alpha;
        amps[self.support.1.to_linear()] = self.beta * C64::from_polar(1.0, phi);
        let rotated = Ket::unnormalized(n, amps).expect("certificate size");
        let back: Vec<SingleQubitUnitary> = self.locals.iter().map(|u| u.adjoint()).collect();
        apply_locals(&back, &rotated).expect("certificate targets are valid")
    }

    fn check_size(&self, psi: &Ket) -> Result<()> {
        if psi.n() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                got: psi.n(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    GhzClass(GhzCertificate),
    Determined,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    /// One-qubit marginal spectra `(p⁰, p¹)`, `p⁰ ≥ p¹`, per qubit.
    pub spectra: Vec<[f64; 2]>,
    pub degenerate: Vec<bool>,
    /// Some qubit sits near the degeneracy threshold and the two branches
    /// disagreed.
    pub ill_conditioned: bool,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub verdict: Verdict,
    pub diagnostics: Diagnostics,
}

impl Classification {
    pub fn is_ghz(&self) -> bool {
        matches!(self.verdict, Verdict::GhzClass(_))
    }

    pub fn certificate(&self) -> Option<&GhzCertificate> {
        match &self.verdict {
            Verdict::GhzClass(c) => Some(c),
            Verdict::Determined => None,
        }
    }
}

/// Phase parameters of a diagonalized local: `D = e^{iα} diag(e^{iβ}, e^{−iβ})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelativePhases {
    pub alpha: f64,
    pub beta: f64,
}

fn support_tol(tol: f64) -> f64 {
    tol.max(SUPPORT_TOL)
}

/// Unitary with rows `b₀†, b₁†`, i.e. the change of basis sending `b_k` to `|k⟩`.
fn basis_change(target: usize, b0: &Vector2<C64>, b1: &Vector2<C64>) -> SingleQubitUnitary {
    let m = Matrix2::new(b0[0].conj(), b0[1].conj(), b1[0].conj(), b1[1].conj());
    SingleQubitUnitary {
        target,
        matrix: polar_unitary(&m),
    }
}

/// Rotates `psi` by `locals` and reads off a certificate if the amplitudes
/// live on one antipodal pair.
fn assemble_certificate(psi: &Ket, locals: Vec<SingleQubitUnitary>, tol: f64) -> Option<GhzCertificate> {
    let rotated = apply_locals(&locals, psi).ok()?;
    let n = psi.n();
    let amps = rotated.amplitudes();
    // largest amplitude, lowest index on ties
    let lead = (0..amps.len()).reduce(|best, k| if amps[k].norm() > amps[best].norm() + 1e-12 { k } else { best })?;
    let j = MultiIndex::from_linear(n, lead);
    let jbar = j.complement();
    let (alpha, beta) = (amps[lead], amps[jbar.to_linear()]);
    let norm = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
    let cert = GhzCertificate {
        locals,
        alpha: alpha / norm,
        beta: beta / norm,
        support: (j, jbar),
    };
    cert.validate(psi, support_tol(tol)).ok()?;
    Some(cert)
}

/// Certificate for an entangled two-qubit state straight from its Schmidt
/// form `√p⁰|a₀⟩|r₀⟩ + √p¹|a₁⟩|r₁⟩`.
fn two_qubit_certificate(psi: &Ket, split: &SchmidtSplit, tol: f64) -> Option<GhzCertificate> {
    let a = &split.one_qubit_vectors;
    let r = &split.rest_vectors;
    let r0 = Vector2::new(r[0][0], r[0][1]);
    let r1 = Vector2::new(r[1][0], r[1][1]);
    let locals = vec![basis_change(1, &a[0], &a[1]), basis_change(2, &r0, &r1)];
    assemble_certificate(psi, locals, tol)
}

/// Rotate every qubit to its marginal eigenbasis (descending eigenvalue).
fn eigenbasis_certificate(psi: &Ket, splits: &[SchmidtSplit], tol: f64) -> Option<GhzCertificate> {
    let locals = splits
        .iter()
        .map(|s| basis_change(s.pivot, &s.one_qubit_vectors[0], &s.one_qubit_vectors[1]))
        .collect();
    assemble_certificate(psi, locals, tol)
}

pub fn classify(psi: &Ket, tol: f64) -> Result<Classification> {
    let n = psi.n();
    if n < 2 {
        return Err(Error::TooFewQubits { min: 2, n });
    }
    let splits: Vec<SchmidtSplit> = (1..=n).map(|j| schmidt_split(psi, j)).collect::<Result<_>>()?;
    let spectra: Vec<[f64; 2]> = splits.iter().map(|s| s.weights).collect();
    let degenerate: Vec<bool> = splits.iter().map(|s| s.degenerate).collect();
    let mut diagnostics = Diagnostics {
        spectra,
        degenerate: degenerate.clone(),
        ill_conditioned: false,
        reason: String::new(),
    };
    let determined = |mut d: Diagnostics, reason: String| {
        d.reason = reason;
        Ok(Classification {
            verdict: Verdict::Determined,
            diagnostics: d,
        })
    };

    if let Some(s) = splits.iter().find(|s| s.minor_weight() < tol) {
        return determined(diagnostics, format!("qubit {} has a pure marginal", s.pivot));
    }

    if n == 2 {
        return Ok(match two_qubit_certificate(psi, &splits[0], tol) {
            Some(c) => {
                diagnostics.reason = "entangled two-qubit state (Schmidt form)".into();
                Classification {
                    verdict: Verdict::GhzClass(c),
                    diagnostics,
                }
            }
            None => {
                diagnostics.ill_conditioned = true;
                diagnostics.reason = "two-qubit Schmidt form failed to verify".into();
                Classification {
                    verdict: Verdict::Determined,
                    diagnostics,
                }
            }
        });
    }

    let gaps: Vec<f64> = splits.iter().map(|s| s.weights[0] - s.weights[1]).collect();
    let all_degenerate = degenerate.iter().all(|&d| d);
    let none_degenerate = degenerate.iter().all(|&d| !d);
    let spectra_agree = splits
        .iter()
        .all(|s| (s.weights[0] - splits[0].weights[0]).abs() <= tol.max(1e-12));

    let (primary, reason) = if all_degenerate {
        let cert = degenerate_certificate(psi, &splits[0], tol);
        let reason = if cert.is_some() {
            "all marginals maximally mixed; two orthogonal product vectors found"
        } else {
            "all marginals maximally mixed; no orthogonal product pair in the Schmidt span"
        };
        (cert, reason.to_string())
    } else if none_degenerate && spectra_agree {
        let cert = eigenbasis_certificate(psi, &splits, tol);
        let reason = if cert.is_some() {
            "equal non-degenerate spectra; eigenbasis support is antipodal"
        } else {
            "equal non-degenerate spectra; eigenbasis support is not antipodal"
        };
        (cert, reason.to_string())
    } else {
        (None, "one-qubit spectra differ across qubits".to_string())
    };

    // near the degeneracy threshold, run the other branch as a cross-check
    let lo = DEGENERACY_TOL * 10f64.powf(-BAND_DECADES);
    let hi = DEGENERACY_TOL * 10f64.powf(BAND_DECADES);
    if gaps.iter().any(|&g| g >= lo && g < hi) {
        let alternate = if all_degenerate {
            eigenbasis_certificate(psi, &splits, tol)
        } else if gaps.iter().all(|&g| g < hi) {
            degenerate_certificate(psi, &splits[0], tol)
        } else {
            primary.clone()
        };
        diagnostics.ill_conditioned = alternate.is_some() != primary.is_some();
    }

    diagnostics.reason = reason;
    Ok(Classification {
        verdict: match primary {
            Some(c) => Verdict::GhzClass(c),
            None => Verdict::Determined,
        },
        diagnostics,
    })
}

/// Degenerate branch: every one-qubit marginal is ½·I.
///
/// Splits at qubit 1 to get `span{|A⟩, |B⟩}` on the remaining qubits, finds
/// the product vectors `s|A⟩ + t|B⟩` in that plane as common roots of the
/// 2×2 minors of every single-qubit flattening, and assembles a certificate
/// when exactly two exist with orthogonal factors at every site.
pub fn degenerate_ghz_test(psi: &Ket, tol: f64) -> Result<Option<GhzCertificate>> {
    let n = psi.n();
    if n < 2 {
        return Err(Error::TooFewQubits { min: 2, n });
    }
    for j in 1..=n {
        let rho = psi.one_qubit_rdm(j)?;
        let dev = (rho - Matrix2::identity() * C64::from(0.5))
            .iter()
            .fold(0.0f64, |acc, z| acc.max(z.norm()));
        if dev > tol {
            return Err(Error::NotMaximallyMixed { qubit: j, deviation: dev });
        }
    }
    let split = schmidt_split(psi, 1)?;
    Ok(degenerate_certificate(psi, &split, tol))
}

fn degenerate_certificate(psi: &Ket, split: &SchmidtSplit, tol: f64) -> Option<GhzCertificate> {
    let n = psi.n();
    if n == 2 {
        return two_qubit_certificate(psi, split, tol);
    }
    let m = n - 1;
    let a = &split.rest_vectors[0];
    let b = &split.rest_vectors[1];

    let roots = common_product_roots(a, b, m)?;
    if roots.len() != 2 {
        return None;
    }
    let products: Vec<DVector<C64>> = roots
        .iter()
        .map(|&(s, t)| {
            let v = a * s + b * t;
            let norm = v.norm();
            v / C64::from(norm)
        })
        .collect();

    // per-site factors of each product vector
    let factors: Vec<Vec<Vector2<C64>>> = products
        .iter()
        .map(|p| product_factors(p, m))
        .collect::<Option<_>>()?;
    if factors[0].iter().zip(&factors[1]).any(|(x, y)| x.dotc(y).norm() > ORTHO_TOL) {
        return None;
    }

    // qubit-1 vectors: ψ = |w₁⟩|P₁⟩ + |w₂⟩|P₂⟩
    let w: Vec<Vector2<C64>> = products
        .iter()
        .map(|p| {
            let mut out = Vector2::zeros();
            for k in 0..2 {
                let coeff = p.dotc(&split.rest_vectors[k]) * split.weights[k].sqrt();
                out += split.one_qubit_vectors[k] * coeff;
            }
            out
        })
        .collect();
    let (w0n, w1n) = (w[0].norm(), w[1].norm());
    if w0n < ORTHO_TOL || w1n < ORTHO_TOL || w[0].dotc(&w[1]).norm() > ORTHO_TOL * w0n * w1n {
        return None;
    }

    let mut locals = Vec::with_capacity(n);
    locals.push(orthonormal_change(1, &w[0], &w[1]));
    for (k, (x, y)) in factors[0].iter().zip(&factors[1]).enumerate() {
        locals.push(orthonormal_change(k + 2, x, y));
    }
    assemble_certificate(psi, locals, tol)
}

/// Basis change sending `x → |0⟩` and the part of `y` orthogonal to `x` to `|1⟩`.
fn orthonormal_change(target: usize, x: &Vector2<C64>, y: &Vector2<C64>) -> SingleQubitUnitary {
    let x0 = x / C64::from(x.norm());
    let mut y0 = y - x0 * x0.dotc(y);
    y0 /= C64::from(y0.norm());
    basis_change(target, &x0, &y0)
}

/// Single-qubit factors of an (approximate) product vector on `m` qubits,
/// each the top eigenvector of its one-qubit marginal with the phase of the
/// vector itself carried on the first factor.
fn product_factors(p: &DVector<C64>, m: usize) -> Option<Vec<Vector2<C64>>> {
    let ket = Ket::unnormalized(m, p.as_slice().to_vec()).ok()?;
    let mut out = Vec::with_capacity(m);
    for k in 1..=m {
        let s = schmidt_split(&ket, k).ok()?;
        if s.minor_weight() > ORTHO_TOL {
            return None;
        }
        out.push(s.one_qubit_vectors[0]);
    }
    Some(out)
}

/// Flattening of `v` (on `m` qubits) along qubit `k`: rows indexed by that
/// qubit's bit.
fn flattening(v: &DVector<C64>, m: usize, k: usize) -> [Vec<C64>; 2] {
    let half = v.len() / 2;
    [0, 1].map(|bit| (0..half).map(|c| v[splice_bit(m, k, c, bit)]).collect())
}

/// Projective roots `(s:t)` of all 2×2 minors of every single-qubit
/// flattening of `s|A⟩ + t|B⟩`.
///
/// Each minor is a binary quadratic form `a s² + b st + c t²`. The common
/// roots are read from the nullspace of the stacked coefficient rows, kept
/// as a streaming 3×3 triangular factor so the row count never matters.
fn common_product_roots(a: &DVector<C64>, b: &DVector<C64>, m: usize) -> Option<Vec<(C64, C64)>> {
    let mut r = Matrix3::<C64>::zeros();
    for k in 1..=m {
        let fa = flattening(a, m, k);
        let fb = flattening(b, m, k);
        let cols = fa[0].len();
        for c1 in 0..cols {
            for c2 in c1 + 1..cols {
                let det = |x0: C64, x1: C64, y0: C64, y1: C64| x0 * y1 - x1 * y0;
                let s2 = det(fa[0][c1], fa[0][c2], fa[1][c1], fa[1][c2]);
                let t2 = det(fb[0][c1], fb[0][c2], fb[1][c1], fb[1][c2]);
                let st = fa[0][c1] * fb[1][c2] + fb[0][c1] * fa[1][c2] - fa[0][c2] * fb[1][c1] - fb[0][c2] * fa[1][c1];
                givens_absorb(&mut r, [s2, st, t2]);
            }
        }
    }
    let svd = r.svd(false, true);
    let v_t = svd.v_t?;
    let mut order = [0usize, 1, 2];
    order.sort_by(|&x, &y| svd.singular_values[y].total_cmp(&svd.singular_values[x]));
    let sig: Vec<f64> = order.iter().map(|&k| svd.singular_values[k]).collect();
    if sig[0] == 0.0 {
        return None; // every vector of the plane is a product
    }
    let rank = sig.iter().filter(|&&x| x > MINOR_TRUNCATION * sig[0]).count();
    match rank {
        3 => Some(Vec::new()),
        2 => {
            // single candidate: the null vector must be (s², st, t²)
            let w: Vec<C64> = (0..3).map(|i| v_t[(order[2], i)].conj()).collect();
            let veronese = (w[1] * w[1] - w[0] * w[2]).norm();
            if veronese > 1e-6 * (w[0].norm_sqr() + w[1].norm_sqr() + w[2].norm_sqr()) {
                Some(Vec::new())
            } else if w[0].norm() >= w[2].norm() {
                Some(vec![(w[0], w[1])])
            } else {
                Some(vec![(w[1], w[2])])
            }
        }
        1 => {
            // every minor is proportional to one quadratic form q
            let q: Vec<C64> = (0..3).map(|i| v_t[(order[0], i)]).collect();
            let q = [q[0], q[1], q[2]];
            Some(quadratic_form_roots(q))
        }
        _ => None,
    }
}

/// Absorbs one coefficient row into the upper-triangular factor with
/// complex Givens rotations.
fn givens_absorb(r: &mut Matrix3<C64>, mut x: [C64; 3]) {
    for i in 0..3 {
        let a = r[(i, i)];
        let b = x[i];
        let h = (a.norm_sqr() + b.norm_sqr()).sqrt();
        if h == 0.0 {
            continue;
        }
        let (c, s) = (a / h, b / h);
        for col in i..3 {
            let ri = r[(i, col)];
            let xi = x[col];
            r[(i, col)] = c.conj() * ri + s.conj() * xi;
            x[col] = -s * ri + c * xi;
        }
    }
}

/// Distinct projective roots of `q₀ s² + q₁ st + q₂ t²`, each polished by
/// Newton iteration in its affine chart. A double root counts once.
fn quadratic_form_roots(q: [C64; 3]) -> Vec<(C64, C64)> {
    let scale = q.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    let [a, b, c] = q.map(|z| z / scale);
    let small = 1e-12;
    let mut roots: Vec<(C64, C64)> = Vec::new();
    if c.norm() <= small {
        // t² coefficient vanishes: s = 0 (t = ∞ in the s = 1 chart) is a root
        roots.push((ZERO, C64::from(1.0)));
        if b.norm() > small {
            roots.push((C64::from(1.0), -a / b));
        }
    } else {
        let disc = (b * b - a * c * 4.0).sqrt();
        let sign = if (b.conj() * disc).re >= 0.0 { 1.0 } else { -1.0 };
        let big = -(b + disc * sign) / 2.0;
        let t1 = if big.norm() > 0.0 { a / big } else { ZERO };
        let t2 = big / c;
        for t in [t1, t2] {
            roots.push((C64::from(1.0), newton_polish(a, b, c, t)));
        }
        if (b * b - a * c * 4.0).norm() <= 1e-10 {
            roots.truncate(1);
        }
    }
    roots
}

fn newton_polish(a: C64, b: C64, c: C64, mut t: C64) -> C64 {
    for _ in 0..4 {
        let f = a + b * t + c * t * t;
        let df = b + c * t * 2.0;
        if df.norm() < 1e-14 {
            break;
        }
        t -= f / df;
    }
    t
}

/// `ψ' = U†(α|J⟩ − β|J̄⟩)`, computed from the actual rotated amplitudes.
pub fn sibling(psi: &Ket, cert: &GhzCertificate) -> Result<Ket> {
    cert.validate(psi, support_tol(0.0))?;
    let rotated = cert.rotate(psi)?;
    let mut amps = rotated.into_amplitudes();
    let jbar = cert.support.1.to_linear();
    amps[jbar] = -amps[jbar];
    let flipped = Ket::unnormalized(psi.n(), amps)?;
    let back: Vec<SingleQubitUnitary> = cert.locals.iter().map(|u| u.adjoint()).collect();
    apply_locals(&back, &flipped)
}

/// The member of the one-parameter family with `β → e^{iφ}β`.
pub fn phase_family(cert: &GhzCertificate, phi: f64) -> Result<Ket> {
    if cert.support.0.complement() != cert.support.1 || (cert.alpha * cert.beta).norm() == 0.0 {
        return Err(Error::InvalidCertificate("not a generalized GHZ certificate".into()));
    }
    Ok(cert.family_member(phi))
}

/// A one-qubit unitary `L` on qubit `j` with `L ψ = ψ'` (phase included).
///
/// Both states are Schmidt-split at `j`. With distinct weights the
/// primed vectors agree with the unprimed ones up to phases and `L` is
/// diagonal in the marginal eigenbasis. With equal weights the bases are
/// related by 2×2 unitaries `v` (qubit side) and `u` (rest side) and `L` is
/// `vᵀ u` in that basis.
pub fn extract_local_unitary(psi: &Ket, psi_prime: &Ket, j: usize, tol: f64) -> Result<SingleQubitUnitary> {
    if psi.n() != psi_prime.n() {
        return Err(Error::DimensionMismatch {
            expected: psi.n(),
            got: psi_prime.n(),
        });
    }
    check_label(psi.n(), j)?;
    let pa = panel_of_pure(psi);
    let pb = panel_of_pure(psi_prime);
    let diff = pa.max_abs_diff(&pb)?;
    if diff > tol {
        return Err(Error::PanelMismatch { diff, tol });
    }
    // with n = 2 the panel holds the one-qubit marginals only; the weights
    // must still match for the Schmidt bases to correspond
    let s = schmidt_split(psi, j)?;
    let sp = schmidt_split(psi_prime, j)?;
    let basis = Matrix2::from_columns(&[s.one_qubit_vectors[0], s.one_qubit_vectors[1]]);

    let in_basis = if s.degenerate {
        let v = Matrix2::from_fn(|k, mm| s.one_qubit_vectors[mm].dotc(&sp.one_qubit_vectors[k]));
        let u = Matrix2::from_fn(|k, l| s.rest_vectors[l].dotc(&sp.rest_vectors[k]));
        v.transpose() * u
    } else {
        let mut d = Matrix2::zeros();
        for k in 0..2 {
            let phase = if s.weights[k] > 1e-24 {
                s.rest_vectors[k].dotc(&sp.rest_vectors[k]) * s.one_qubit_vectors[k].dotc(&sp.one_qubit_vectors[k])
            } else {
                C64::from(1.0)
            };
            d[(k, k)] = if phase.norm() > 0.0 { phase / phase.norm() } else { C64::from(1.0) };
        }
        d
    };
    let l = polar_unitary(&(basis * in_basis * basis.adjoint()));
    let mut local = SingleQubitUnitary { target: j, matrix: l };

    let moved = apply_local(&local, psi)?;
    let overlap = moved.inner(psi_prime)?;
    if overlap.norm() < 1.0 - tol {
        return Err(Error::NoLocalUnitary {
            qubit: j,
            residual: 1.0 - overlap.norm(),
        });
    }
    local.matrix *= overlap / overlap.norm();
    Ok(local)
}

/// Diagonalizes a local: returns the frame `U` with `U L U† = D` and the
/// phases of `D = e^{iα} diag(e^{iβ}, e^{−iβ})`.
pub fn relative_phases(local: &SingleQubitUnitary) -> (SingleQubitUnitary, RelativePhases) {
    let (lambda, v) = normal_eigen_2x2(&local.matrix);
    let delta = (lambda[0] / lambda[1]).arg();
    let beta = delta / 2.0;
    let alpha = lambda[1].arg() + beta;
    let frame = SingleQubitUnitary {
        target: local.target,
        matrix: polar_unitary(&v.adjoint()),
    };
    (frame, RelativePhases { alpha, beta })
}

/// Multi-indices `I` for which
/// `exp{i[α_j − α_k + (−1)^{i_j}β_j − (−1)^{i_k}β_k]} = 1` for all `j, k`.
///
/// `coefficients` is the state in the diagonalizing frame; its support must
/// lie inside the permitted set, which in turn must sit inside one antipodal
/// pair.
pub fn antipodal_support_reduction(coefficients: &Ket, phases: &[RelativePhases], tol: f64) -> Result<Vec<MultiIndex>> {
    let n = coefficients.n();
    if phases.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: phases.len(),
        });
    }
    for (idx, p) in phases.iter().enumerate() {
        if p.beta.sin().abs() <= tol {
            return Err(Error::ScalarPhase {
                qubit: idx + 1,
                sin_beta: p.beta.sin().abs(),
            });
        }
    }
    let mut permitted = Vec::new();
    for lin in 0..coefficients.dim() {
        let index = MultiIndex::from_linear(n, lin);
        let phase_of = |j: usize| {
            let p = phases[j - 1];
            let sign = if index.bit(j) == 0 { 1.0 } else { -1.0 };
            C64::from_polar(1.0, p.alpha + sign * p.beta)
        };
        let reference = phase_of(1);
        if (2..=n).all(|j| (phase_of(j) - reference).norm() <= tol.max(1e-12)) {
            permitted.push(index);
        }
    }
    match permitted.as_slice() {
        [] | [_] => {}
        [x, y] if x.complement() == *y => {}
        _ => {
            let listed: Vec<String> = permitted.iter().map(|i| i.to_string()).collect();
            return Err(Error::NonAntipodalSupport(listed.join(", ")));
        }
    }
    let coeff_tol = (100.0 * tol).max(1e-6);
    for (lin, z) in coefficients.amplitudes().iter().enumerate() {
        if z.norm() > coeff_tol && !permitted.iter().any(|p| p.to_linear() == lin) {
            return Err(Error::NonAntipodalSupport(format!(
                "coefficient {} = {z} violates the phase condition",
                MultiIndex::from_linear(n, lin)
            )));
        }
    }
    Ok(permitted)
}

/// Runs the whole constructive argument on a sibling pair: a local `L_j`
/// for each qubit, its diagonalizing frame `U_j`, the antipodal support of
/// `(⊗U_j)ψ`, and finally the certificate in that frame.
pub fn certificate_from_sibling(psi: &Ket, psi_prime: &Ket, tol: f64) -> Result<GhzCertificate> {
    let n = psi.n();
    if psi.inner(psi_prime)?.norm() >= 1.0 - tol {
        return Err(Error::InvalidCertificate("the two states agree up to phase".into()));
    }
    let mut frames = Vec::with_capacity(n);
    let mut phases = Vec::with_capacity(n);
    for j in 1..=n {
        let l = extract_local_unitary(psi, psi_prime, j, tol)?;
        let (frame, ph) = relative_phases(&l);
        frames.push(frame);
        phases.push(ph);
    }
    let coefficients = apply_locals(&frames, psi)?;
    let permitted = antipodal_support_reduction(&coefficients, &phases, tol)?;
    if permitted.len() != 2 {
        return Err(Error::NonAntipodalSupport(format!(
            "{} permitted index(es); need an antipodal pair",
            permitted.len()
        )));
    }
    assemble_certificate(psi, frames, tol)
        .ok_or_else(|| Error::InvalidCertificate("rotated state is not supported on the pair".into()))
}

/// Panel equality of a state with its certificate sibling.
pub fn sibling_shares_panel(psi: &Ket, cert: &GhzCertificate, tol: f64) -> Result<bool> {
    let sib = sibling(psi, cert)?;
    panels_equal(&panel_of_pure(psi), &panel_of_pure(&sib), tol)
}

