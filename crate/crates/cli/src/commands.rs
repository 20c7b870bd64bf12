//! Command bodies. Each returns its captured output and exit code so the
//! binary stays a thin dispatcher.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::Matrix2;
use num_complex::Complex64 as C64;
use rdmpanel::ghz::GhzCertificate;
use rdmpanel::oracle::{chi_state, haar_random_ket, sample, search_sibling, Family};
use rdmpanel::reconstruct::check_panel;
use rdmpanel::{
    classify, panel_of_pure, reconstruct, stabilizer_subalgebra, subset_equal, Error, Ket, Outcome, Verdict,
};

use crate::format::{FormatError, PanelFile, StateFile};

pub mod exit {
    pub const DETERMINED: i32 = 0;
    pub const GHZ_CLASS: i32 = 10;
    pub const INPUT_ERROR: i32 = 2;
    pub const UNIQUE: i32 = 0;
    pub const FAMILY: i32 = 10;
    pub const INCOMPATIBLE: i32 = 20;
    pub const SIBLING_FOUND: i32 = 10;
    pub const NO_SIBLING: i32 = 0;
    pub const DEMO_FAILED: i32 = 1;
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CmdOutput {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl CmdOutput {
    fn input_error(err: impl std::fmt::Display) -> Self {
        Self {
            stdout: String::new(),
            stderr: format!("error: {err}\n"),
            code: exit::INPUT_ERROR,
        }
    }
}

fn c(z: C64) -> String {
    format!("{:+.12e} {:+.12e}i", z.re, z.im)
}

fn matrix(m: &Matrix2<C64>) -> String {
    format!("[[{}, {}], [{}, {}]]", c(m[(0, 0)]), c(m[(0, 1)]), c(m[(1, 0)]), c(m[(1, 1)]))
}

fn load_state(path: &Path, out: &mut CmdOutput) -> Result<(Ket, Option<String>), FormatError> {
    let file = StateFile::load(path)?;
    let (ket, warning) = file.to_ket()?;
    if let Some(w) = warning {
        out.stderr.push_str(&w);
        out.stderr.push('\n');
    }
    Ok((ket, file.label))
}

fn write_certificate(s: &mut String, cert: &GhzCertificate) {
    let _ = writeln!(s, "alpha: {}", c(cert.alpha));
    let _ = writeln!(s, "beta: {}", c(cert.beta));
    let _ = writeln!(s, "support: {} {}", cert.support.0, cert.support.1);
    for u in &cert.locals {
        let _ = writeln!(s, "U_{}: {}", u.target, matrix(&u.matrix));
    }
}

pub fn analyze(path: &Path, tol: f64) -> CmdOutput {
    let mut out = CmdOutput::default();
    let (psi, label) = match load_state(path, &mut out) {
        Ok(v) => v,
        Err(e) => return CmdOutput::input_error(e),
    };
    let cls = match classify(&psi, tol) {
        Ok(c) => c,
        Err(e) => return CmdOutput::input_error(e),
    };
    let basis = stabilizer_subalgebra(&psi);
    let s = &mut out.stdout;
    if let Some(l) = label {
        let _ = writeln!(s, "label: {l}");
    }
    let _ = writeln!(s, "qubits: {}", psi.n());
    let verdict = match cls.verdict {
        Verdict::GhzClass(_) => "GHZ-class (undetermined among pure states)",
        Verdict::Determined => "determined",
    };
    let _ = writeln!(s, "verdict: {verdict}");
    let _ = writeln!(s, "reason: {}", cls.diagnostics.reason);
    if cls.diagnostics.ill_conditioned {
        let _ = writeln!(s, "warning: ill-conditioned (a marginal sits near the degeneracy threshold)");
    }
    for (j, (sp, deg)) in cls.diagnostics.spectra.iter().zip(&cls.diagnostics.degenerate).enumerate() {
        let _ = writeln!(
            s,
            "spectrum qubit {}: {:.12e} {:.12e}{}",
            j + 1,
            sp[0],
            sp[1],
            if *deg { " (degenerate)" } else { "" }
        );
    }
    let _ = writeln!(s, "stabilizer dimension: {}", basis.dimension);
    if let Verdict::GhzClass(cert) = &cls.verdict {
        write_certificate(s, cert);
    }
    out.code = if cls.is_ghz() { exit::GHZ_CLASS } else { exit::DETERMINED };
    out
}

pub fn reconstruct_cmd(path: &Path, tol: f64, out_path: Option<&Path>, reference: Option<&Path>) -> CmdOutput {
    let mut out = CmdOutput::default();
    let panel = match PanelFile::load(path).and_then(|f| f.to_panel()) {
        Ok(p) => p,
        Err(e) => return CmdOutput::input_error(e),
    };
    let reference = match reference.map(|p| load_state(p, &mut out)).transpose() {
        Ok(r) => r.map(|(k, _)| k),
        Err(e) => return CmdOutput::input_error(e),
    };
    let result = match reconstruct(&panel, tol) {
        Ok(r) => r,
        Err(e @ (Error::RankExceeded { .. } | Error::InconsistentPanel(_))) => {
            let _ = writeln!(out.stdout, "outcome: Incompatible");
            let _ = writeln!(out.stdout, "reason: {e}");
            out.code = exit::INCOMPATIBLE;
            return out;
        }
        Err(e) => return CmdOutput::input_error(e),
    };
    let s = &mut out.stdout;
    let (state, label) = match &result.outcome {
        Outcome::Unique(psi) => {
            let _ = writeln!(s, "outcome: Unique");
            (Some(psi.clone()), "reconstructed".to_string())
        }
        Outcome::GhzFamily(cert) => {
            let _ = writeln!(s, "outcome: GhzFamily");
            write_certificate(s, cert);
            let rep = cert.family_member(0.0);
            let label = format!("ghz-family phi=0 alpha={} beta={}", c(cert.alpha), c(cert.beta));
            (Some(rep), label)
        }
        Outcome::Incompatible(why) => {
            let _ = writeln!(s, "outcome: Incompatible");
            let _ = writeln!(s, "reason: {why}");
            (None, String::new())
        }
    };
    let _ = writeln!(s, "residual: {:.6e}", result.residual);
    if let (Some(psi), Some(r)) = (&state, &reference) {
        match psi.inner(r) {
            Ok(z) => {
                let _ = writeln!(s, "fidelity with reference: {:.15}", z.norm_sqr());
            }
            Err(e) => return CmdOutput::input_error(e),
        }
    }
    if let (Some(psi), Some(p)) = (&state, out_path) {
        if let Err(e) = StateFile::from_ket(psi, Some(label)).save(p) {
            return CmdOutput::input_error(e);
        }
        if let Ok(check) = check_panel(psi, &panel) {
            let _ = writeln!(s, "written: {} (panel residual {:.6e})", p.display(), check);
        }
    }
    out.code = match result.outcome {
        Outcome::Unique(_) => exit::UNIQUE,
        Outcome::GhzFamily(_) => exit::FAMILY,
        Outcome::Incompatible(_) => exit::INCOMPATIBLE,
    };
    out
}

pub fn sibling_search(path: &Path, budget: usize, tol: f64, seed: u64) -> CmdOutput {
    let mut out = CmdOutput::default();
    let (psi, _) = match load_state(path, &mut out) {
        Ok(v) => v,
        Err(e) => return CmdOutput::input_error(e),
    };
    let rep = search_sibling(&psi, tol, budget, seed);
    let s = &mut out.stdout;
    let _ = writeln!(s, "found: {}", rep.found);
    let _ = writeln!(s, "trials: {}", rep.trials);
    let _ = writeln!(s, "best residual: {:.6e}", rep.best_residual);
    if let Some((l, sib)) = &rep.witness {
        let _ = writeln!(s, "witness L_1: {}", matrix(&l.matrix));
        if let Ok(z) = psi.inner(sib) {
            let _ = writeln!(s, "sibling overlap: {:.12e}", z.norm());
        }
    }
    out.code = if rep.found { exit::SIBLING_FOUND } else { exit::NO_SIBLING };
    out
}

/// Index of `|0110⟩` in the χ demo, where `--perturb` adds weight.
const PERTURB_INDEX: usize = 0b0110;

pub fn demo_chi(perturb: f64) -> CmdOutput {
    let mut out = CmdOutput::default();
    let tol = 1e-10;
    let chi = if perturb == 0.0 {
        chi_state()
    } else {
        let mut amps = chi_state().into_amplitudes();
        amps[PERTURB_INDEX] += C64::from(perturb);
        match Ket::new(4, amps) {
            Ok(k) => k,
            Err(e) => return CmdOutput::input_error(e),
        }
    };
    let z1 = chi
        .apply_matrix(1, &rdmpanel::linalg::pauli_z())
        .expect("qubit 1 exists");
    let facts = [
        (
            "panels agree after tracing out qubit 1, 2 or 3",
            subset_equal(&chi, &z1, &[1, 2, 3], tol).unwrap_or(false),
        ),
        (
            "panels differ after tracing out qubit 4",
            !subset_equal(&chi, &z1, &[4], tol).unwrap_or(true),
        ),
        (
            "chi is determined by its full panel",
            classify(&chi, tol).map(|cl| !cl.is_ghz()).unwrap_or(false),
        ),
    ];
    let s = &mut out.stdout;
    let _ = writeln!(s, "|chi> = (1/sqrt3)(|0000> + |0001> + |1111>)");
    let _ = writeln!(s, "comparing |chi> with Z_1|chi> at tolerance {tol:e}");
    if perturb != 0.0 {
        let _ = writeln!(s, "perturbation: {perturb:e} added to |0110> before normalizing");
    }
    for (text, ok) in &facts {
        let _ = writeln!(s, "[{}] {text}", if *ok { "PASS" } else { "FAIL" });
    }
    out.code = if facts.iter().all(|f| f.1) { 0 } else { exit::DEMO_FAILED };
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateKind {
    Ghz,
    W,
    Zero,
    Haar,
    Chi,
    GhzOrbit,
}

pub fn gen_state(kind: StateKind, n: usize, seed: u64, out_path: &Path) -> CmdOutput {
    let psi = match kind {
        StateKind::Chi => Ok(chi_state()),
        _ if n == 0 || n > 20 => Err(format!("n={n} out of range 1..=20")),
        StateKind::Ghz => Ok(Ket::ghz(n)),
        StateKind::W => Ok(Ket::w_state(n)),
        StateKind::Zero => Ok(Ket::basis(n, 0)),
        StateKind::Haar => Ok(haar_random_ket(n, seed)),
        StateKind::GhzOrbit => Ok(sample(Family::GhzOrbit, n, seed)),
    };
    let psi = match psi {
        Ok(p) => p,
        Err(e) => return CmdOutput::input_error(e),
    };
    let label = format!("{kind:?} n={} seed={seed}", psi.n()).to_lowercase();
    match StateFile::from_ket(&psi, Some(label)).save(out_path) {
        Ok(()) => CmdOutput {
            stdout: format!("wrote {}\n", out_path.display()),
            ..CmdOutput::default()
        },
        Err(e) => CmdOutput::input_error(e),
    }
}

pub fn panel_cmd(state_path: &Path, out_path: &Path) -> CmdOutput {
    let mut out = CmdOutput::default();
    let (psi, _) = match load_state(state_path, &mut out) {
        Ok(v) => v,
        Err(e) => return CmdOutput::input_error(e),
    };
    if psi.n() < 2 {
        return CmdOutput::input_error("a panel needs at least 2 qubits");
    }
    match PanelFile::from_panel(&panel_of_pure(&psi)).save(out_path) {
        Ok(()) => {
            out.stdout = format!("wrote {}\n", out_path.display());
            out
        }
        Err(e) => CmdOutput::input_error(e),
    }
}
