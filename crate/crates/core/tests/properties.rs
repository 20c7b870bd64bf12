mod common;

use common::{fidelity, naive_trace_out};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rdmpanel::ghz::{extract_local_unitary, sibling};
use rdmpanel::ket::apply_locals;
use rdmpanel::oracle::{haar_random_ket, random_locals, random_lu_orbit, sample, Family};
use rdmpanel::reconstruct::check_panel;
use rdmpanel::stabilizer::stabilizer_subalgebra;
use rdmpanel::{
    classify, equal_up_to_phase, panel_of_pure, panels_equal, reconstruct, schmidt_split, MultiIndex, Outcome,
};

const TOL: f64 = 1e-9;

fn family() -> impl Strategy<Value = Family> {
    prop::sample::select(Family::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn complement_is_an_involution(n in 1usize..12, raw in any::<usize>()) {
        let i = MultiIndex::from_linear(n, raw % (1 << n));
        prop_assert_eq!(i.complement().complement(), i.clone());
        prop_assert_eq!(i.complement().to_linear() + i.to_linear(), (1 << n) - 1);
    }

    #[test]
    fn panel_entries_are_marginals(n in 2usize..7, seed in any::<u64>()) {
        let psi = haar_random_ket(n, seed);
        let panel = panel_of_pure(&psi);
        for j in 1..=n {
            let diff = panel.entry(j).matrix() - naive_trace_out(&psi, j);
            prop_assert!(diff.iter().all(|z| z.norm() < 1e-13));
            prop_assert!((panel.entry(j).trace().re - 1.0).abs() < 1e-12);
        }
        prop_assert!(panel.internal_inconsistency() < 1e-13);
    }

    #[test]
    fn schmidt_split_reassembles(n in 2usize..7, seed in any::<u64>(), j in 1usize..7) {
        let psi = haar_random_ket(n, seed);
        let j = 1 + (j - 1) % n;
        let s = schmidt_split(&psi, j).unwrap();
        prop_assert!(s.weights[0] >= s.weights[1]);
        prop_assert!(fidelity(&s.reassemble(), &psi) > 1.0 - 1e-12);
    }

    #[test]
    fn verdict_is_lu_invariant(n in 2usize..6, fam in family(), seed in any::<u64>(), rot in any::<u64>()) {
        let psi = sample(fam, n, seed);
        let moved = random_lu_orbit(&psi, rot);
        prop_assert_eq!(classify(&psi, TOL).unwrap().is_ghz(), classify(&moved, TOL).unwrap().is_ghz());
    }

    #[test]
    fn verdict_matches_family(n in 2usize..7, fam in family(), seed in any::<u64>()) {
        let psi = sample(fam, n, seed);
        prop_assert_eq!(classify(&psi, TOL).unwrap().is_ghz(), fam.is_ghz_class(n));
    }

    #[test]
    fn certificates_are_sound(n in 2usize..8, seed in any::<u64>(), balanced in any::<bool>()) {
        let fam = if balanced { Family::GhzOrbitBalanced } else { Family::GhzOrbit };
        let psi = sample(fam, n, seed);
        let cls = classify(&psi, TOL).unwrap();
        let cert = cls.certificate().expect("GHZ orbit");
        prop_assert!(cert.off_support(&psi).unwrap() < 1e-8);
        let sib = sibling(&psi, cert).unwrap();
        prop_assert!(panels_equal(&panel_of_pure(&psi), &panel_of_pure(&sib), 1e-8).unwrap());
        prop_assert!(!equal_up_to_phase(&psi, &sib, 1e-6).unwrap());
        let (a2, b2) = (cert.alpha.norm_sqr(), cert.beta.norm_sqr());
        for s in &cls.diagnostics.spectra {
            let hi = a2.max(b2);
            prop_assert!((s[0] - hi).abs() < 1e-8);
        }
    }

    #[test]
    fn extracted_locals_transport_siblings(n in 2usize..9, seed in any::<u64>()) {
        let psi = sample(Family::GhzOrbit, n, seed);
        let cert = classify(&psi, TOL).unwrap().certificate().cloned().unwrap();
        let sib = sibling(&psi, &cert).unwrap();
        for j in 1..=n {
            let l = extract_local_unitary(&psi, &sib, j, TOL).unwrap();
            let moved = apply_locals(&[l], &psi).unwrap();
            prop_assert!(equal_up_to_phase(&moved, &sib, 1e-8).unwrap());
        }
    }

    #[test]
    fn stabilizer_dimension_is_lu_invariant(n in 2usize..6, fam in family(), seed in any::<u64>(), rot in any::<u64>()) {
        let psi = sample(fam, n, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(rot);
        let moved = apply_locals(&random_locals(n, &mut rng), &psi).unwrap();
        prop_assert_eq!(stabilizer_subalgebra(&psi).dimension, stabilizer_subalgebra(&moved).dimension);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn reconstruction_round_trip(n in 2usize..6, fam in family(), seed in any::<u64>()) {
        let psi = sample(fam, n, seed);
        let panel = panel_of_pure(&psi);
        let res = reconstruct(&panel, TOL).unwrap();
        prop_assert!(res.residual <= TOL);
        match res.outcome {
            Outcome::Unique(out) => {
                prop_assert!(!fam.is_ghz_class(n));
                prop_assert!(fidelity(&out, &psi) >= 1.0 - 1e-8);
                prop_assert!(check_panel(&out, &panel).unwrap() <= TOL);
            }
            Outcome::GhzFamily(cert) => {
                prop_assert!(fam.is_ghz_class(n));
                // two maximally mixed qubits are shared by every maximally
                // entangled pair, a larger set than the phase family
                if !(n == 2 && fam == Family::GhzOrbitBalanced) {
                    prop_assert!(cert.off_support(&psi).unwrap() < 1e-8);
                }
            }
            Outcome::Incompatible(why) => prop_assert!(false, "{}", why),
        }
    }
}
