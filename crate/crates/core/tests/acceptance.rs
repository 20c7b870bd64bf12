//! Acceptance gate: criteria 1–8, one PASS/FAIL line each.
//!
//! Runs as a plain binary (`harness = false`) so the lines always show.

mod common;

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{fidelity, stabilizer_nullity};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rdmpanel::ghz::{phase_family, sibling, GhzCertificate};
use rdmpanel::oracle::{
    chi_state, haar_random_ket, lu_equivalence_check, random_ghz_orbit, sample, search_sibling, Family,
    DEFAULT_BUDGET,
};
use rdmpanel::stabilizer::{stabilizer_with_threshold, undetermined_by_dimension, DimensionVerdict};
use rdmpanel::{
    apply_local, classify, equal_up_to_phase, panel_of_pure, reconstruct, stabilizer_subalgebra, subset_equal, Ket,
    Outcome, C64,
};

const TOL: f64 = 1e-9;

struct Report {
    pass: bool,
    detail: String,
}

fn report(pass: bool, detail: impl Into<String>) -> Report {
    Report {
        pass,
        detail: detail.into(),
    }
}

fn within(elapsed: Duration, limit: Duration) -> bool {
    elapsed < limit
}

fn eta(n: usize, phi: f64) -> Ket {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Ket::generalized_ghz(n, C64::from(s), C64::from_polar(s, phi)).unwrap()
}

fn c1_eta_family() -> Report {
    let start = Instant::now();
    let mut worst_panel = 0.0f64;
    let mut worst_overlap = 0.0f64;
    for n in 2..=8 {
        let kets: Vec<Ket> = (0..8).map(|k| eta(n, 2.0 * PI * k as f64 / 8.0)).collect();
        let panels: Vec<_> = kets.iter().map(panel_of_pure).collect();
        for a in 0..8 {
            for b in a + 1..8 {
                worst_panel = worst_panel.max(panels[a].max_abs_diff(&panels[b]).unwrap());
                worst_overlap = worst_overlap.max(kets[a].inner(&kets[b]).unwrap().norm());
            }
        }
    }
    let elapsed = start.elapsed();
    report(
        worst_panel <= 1e-10 && worst_overlap < 1.0 - 1e-6 && within(elapsed, Duration::from_secs(5)),
        format!("max panel diff {worst_panel:.2e}, max overlap {worst_overlap:.6}, {elapsed:.2?}"),
    )
}

fn c2_forward() -> Report {
    let failures: Vec<String> = (0..50u64)
        .into_par_iter()
        .filter_map(|k| {
            let n = 3 + (k as usize % 5);
            let mut rng = ChaCha8Rng::seed_from_u64(2000 + k);
            let (psi, a, b) = random_ghz_orbit(n, 0.05, 0.95, &mut rng);
            let cls = classify(&psi, TOL).unwrap();
            let Some(cert) = cls.certificate() else {
                return Some(format!("k={k} n={n}: Determined"));
            };
            let mut got = [cert.alpha.norm(), cert.beta.norm()];
            let mut want = [a, b];
            got.sort_by(f64::total_cmp);
            want.sort_by(f64::total_cmp);
            let amp_err = (got[0] - want[0]).abs().max((got[1] - want[1]).abs());
            let sib = sibling(&psi, cert).unwrap();
            let panel_err = panel_of_pure(&psi).max_abs_diff(&panel_of_pure(&sib)).unwrap();
            (amp_err > 1e-7 || panel_err > 1e-8)
                .then(|| format!("k={k} n={n}: amplitude err {amp_err:.1e}, sibling panel err {panel_err:.1e}"))
        })
        .collect();
    report(failures.is_empty(), summarize(50, &failures))
}

fn summarize(total: usize, failures: &[String]) -> String {
    if failures.is_empty() {
        format!("{total}/{total} ok")
    } else {
        format!("{} of {total} failed; first: {}", failures.len(), failures[0])
    }
}

fn c3_converse() -> Report {
    let start = Instant::now();
    let cases: Vec<(usize, u64)> = (3..=5).flat_map(|n| (0..200u64).map(move |s| (n, s))).collect();
    let results: Vec<(Option<String>, f64)> = cases
        .par_iter()
        .map(|&(n, s)| {
            let psi = haar_random_ket(n, 30_000 + 1000 * n as u64 + s);
            let cls = classify(&psi, TOL).unwrap();
            let rep = search_sibling(&psi, TOL, DEFAULT_BUDGET, s);
            let bad = cls.is_ghz() || rep.found || rep.best_residual <= 1e-4;
            let msg = bad.then(|| {
                format!(
                    "n={n} s={s}: ghz={} found={} best={:.2e}",
                    cls.is_ghz(),
                    rep.found,
                    rep.best_residual
                )
            });
            (msg, rep.best_residual)
        })
        .collect();
    let failures: Vec<String> = results.iter().filter_map(|r| r.0.clone()).collect();
    let min_res = results.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    let elapsed = start.elapsed();
    let ok = failures.is_empty() && within(elapsed, Duration::from_secs(600));
    report(
        ok,
        format!("{}; min best_residual {min_res:.2e}; {elapsed:.2?}", summarize(cases.len(), &failures)),
    )
}

fn c4_three_way() -> Report {
    let cases: Vec<(usize, Family, u64)> = [3usize, 5]
        .into_iter()
        .flat_map(|n| Family::ALL.into_iter().flat_map(move |f| (0..40u64).map(move |s| (n, f, s))))
        .collect();
    let failures: Vec<String> = cases
        .par_iter()
        .filter_map(|&(n, fam, s)| {
            let psi = sample(fam, n, 50_000 + 97 * s + n as u64);
            let by_class = classify(&psi, TOL).unwrap().is_ghz();
            let by_search = search_sibling(&psi, TOL, DEFAULT_BUDGET, s).found;
            let by_dim = undetermined_by_dimension(&psi) == DimensionVerdict::Undetermined;
            (by_class != by_search || by_class != by_dim)
                .then(|| format!("n={n} {fam:?} s={s}: classify={by_class} search={by_search} dimension={by_dim}"))
        })
        .collect();
    report(failures.is_empty(), summarize(cases.len(), &failures))
}

fn c5_stabilizer() -> Report {
    let mut notes = Vec::new();
    let mut ok = true;
    for n in 3..=8 {
        let d = stabilizer_subalgebra(&Ket::ghz(n)).dimension;
        if d != n - 1 {
            ok = false;
            notes.push(format!("GHZ_{n} dim {d}"));
        }
        let zero = Ket::basis(n, 0);
        let d0 = stabilizer_subalgebra(&zero).dimension;
        let reference = stabilizer_nullity(&zero);
        if d0 != n || reference != n {
            ok = false;
            notes.push(format!("|0⟩^{n} dim {d0} (reference {reference})"));
        }
    }
    let mut reexamined = 0;
    for n in 3..=5 {
        let dims: Vec<(usize, usize)> = (0..100u64)
            .into_par_iter()
            .map(|s| {
                let psi = haar_random_ket(n, 70_000 + 1000 * n as u64 + s);
                let d = stabilizer_subalgebra(&psi).dimension;
                let tight = if d == 0 {
                    0
                } else {
                    stabilizer_with_threshold(&psi, Some(1e-12)).dimension
                };
                (d, tight)
            })
            .collect();
        let zeros = dims.iter().filter(|d| d.0 == 0).count();
        reexamined += dims.len() - zeros;
        if zeros < 99 || dims.iter().any(|d| d.0 != 0 && d.1 != 0) {
            ok = false;
            notes.push(format!("Haar n={n}: {zeros}/100 zero"));
        }
    }
    let detail = if notes.is_empty() {
        format!("GHZ_n → n−1 and |0⟩^n → n for n=3..8; Haar zero dims, {reexamined} re-examined")
    } else {
        notes.join("; ")
    };
    report(ok, detail)
}

fn c6_chi() -> Report {
    let chi = chi_state();
    let z1 = chi.apply_matrix(1, &rdmpanel::linalg::pauli_z()).unwrap();
    let equal_123 = subset_equal(&chi, &z1, &[1, 2, 3], 1e-10).unwrap();
    let differ_4 = !subset_equal(&chi, &z1, &[4], 1e-10).unwrap();
    let determined = !classify(&chi, 1e-10).unwrap().is_ghz();
    report(
        equal_123 && differ_4 && determined,
        format!("traces 1,2,3 equal={equal_123}; trace 4 differs={differ_4}; determined={determined}"),
    )
}

/// Smallest `1 − F` between `psi` and the family of `cert`, found by
/// reading the relative phase off the rotated source.
fn family_gap(psi: &Ket, cert: &GhzCertificate) -> f64 {
    let rotated = cert.rotate(psi).unwrap();
    let a = rotated.amplitudes()[cert.support.0.to_linear()];
    let b = rotated.amplitudes()[cert.support.1.to_linear()];
    let phi = (b / a).arg() - (cert.beta / cert.alpha).arg();
    let member = phase_family(cert, phi).unwrap();
    1.0 - fidelity(&member, psi)
}

fn c7_round_trip() -> Report {
    let start = Instant::now();
    let mut cases: Vec<(usize, bool, u64)> = Vec::new();
    for n in 3..=6 {
        cases.extend((0..100u64).map(|s| (n, false, s)));
        cases.extend((0..20u64).map(|s| (n, true, s)));
    }
    let failures: Vec<String> = cases
        .par_iter()
        .filter_map(|&(n, ghz, s)| {
            let seed = 90_000 + 1000 * n as u64 + s;
            let psi = if ghz {
                sample(Family::GhzOrbit, n, seed)
            } else {
                haar_random_ket(n, seed)
            };
            let res = match reconstruct(&panel_of_pure(&psi), TOL) {
                Ok(r) => r,
                Err(e) => return Some(format!("n={n} s={s}: {e}")),
            };
            match (&res.outcome, ghz) {
                (Outcome::Unique(out), false) => {
                    let f = fidelity(out, &psi);
                    (f < 1.0 - 1e-8).then(|| format!("n={n} s={s}: fidelity {f}"))
                }
                (Outcome::GhzFamily(cert), true) => {
                    let gap = family_gap(&psi, cert);
                    (gap > 1e-8).then(|| format!("n={n} s={s}: family misses source by {gap:.1e}"))
                }
                (other, _) => Some(format!("n={n} s={s} ghz={ghz}: {other:?}")),
            }
        })
        .collect();
    let elapsed = start.elapsed();
    report(
        failures.is_empty() && within(elapsed, Duration::from_secs(600)),
        format!("{}; {elapsed:.2?}", summarize(cases.len(), &failures)),
    )
}

fn c8_lu_class() -> Report {
    let failures: Vec<String> = (0..50u64)
        .into_par_iter()
        .filter_map(|k| {
            let n = 2 + (k as usize % 6);
            let psi = sample(Family::GhzOrbit, n, 120_000 + k);
            let cert = classify(&psi, TOL).unwrap().certificate().cloned()?;
            // even k: the β → −β sibling; odd k: another family member
            let partner = if k % 2 == 0 {
                sibling(&psi, &cert).unwrap()
            } else {
                phase_family(&cert, 0.37 * k as f64).unwrap()
            };
            let Ok(Some(locals)) = lu_equivalence_check(&psi, &partner, TOL) else {
                return Some(format!("k={k} n={n}: no verified locals"));
            };
            let bad = locals
                .iter()
                .any(|l| !equal_up_to_phase(&apply_local(l, &psi).unwrap(), &partner, 1e-8).unwrap());
            bad.then(|| format!("k={k} n={n}: a local misses by more than 1e-8"))
        })
        .collect();
    report(failures.is_empty(), summarize(50, &failures))
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Report);
    let criteria: [Criterion; 8] = [
        ("1 eta family shares one panel", c1_eta_family),
        ("2 GHZ orbits classified with matching siblings", c2_forward),
        ("3 Haar states determined, no sibling found", c3_converse),
        ("4 classify / search / stabilizer agree", c4_three_way),
        ("5 stabilizer dimensions", c5_stabilizer),
        ("6 chi partial-panel facts", c6_chi),
        ("7 reconstruction round trip", c7_round_trip),
        ("8 LU equivalence of panel-equal pairs", c8_lu_class),
    ];
    let mut all = true;
    for (name, run) in criteria {
        let r = run();
        all &= r.pass;
        println!("[{}] criterion {name}: {}", if r.pass { "PASS" } else { "FAIL" }, r.detail);
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
