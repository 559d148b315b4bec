use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use proptest::prelude::*;

use symproj_core::entanglement::{three_tangle, witness_value, WitnessSpec};
use symproj_core::fock::{
    apply_loss, distribute, postselect, symmetric_ports, CoincidencePattern, DetectorModel, FockExpansion, LossModel,
    ModeId, Polarization, Spatial,
};
use symproj_core::symstate::{d, delta4_formula, delta5, LocalOperator, ProjectorSpec, PureState};
use symproj_core::Error;

fn amplitudes(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1 << n)
        .prop_filter("non-zero", |v| v.iter().map(|(a, b)| a * a + b * b).sum::<f64>() > 1e-3)
        .prop_map(|v| v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect())
}

fn state(n: usize) -> impl Strategy<Value = PureState> {
    amplitudes(n).prop_map(move |a| PureState::from_amplitudes(n, a).unwrap())
}

fn projector() -> impl Strategy<Value = ProjectorSpec> {
    (0.0..=1.0f64, -PI..PI).prop_map(|(a, e)| ProjectorSpec::new(a, e).unwrap())
}

fn unitary() -> impl Strategy<Value = LocalOperator> {
    (0.0..PI, 0.0..TAU, 0.0..TAU, 0.0..TAU).prop_map(|(t, a, b, g)| {
        let ph = Complex64::from_polar(1.0, g);
        let m = [
            [ph * Complex64::from_polar(t.cos(), a), ph * Complex64::from_polar(t.sin(), b)],
            [-ph * Complex64::from_polar(t.sin(), -b), ph * Complex64::from_polar(t.cos(), -a)],
        ];
        LocalOperator::unitary(m).unwrap()
    })
}

fn outcome_probability(psi: &PureState, q: usize, p: ProjectorSpec) -> f64 {
    match psi.project_qubit(q, p) {
        Ok((_, prob)) => prob,
        Err(Error::Annihilated { probability }) => probability,
        Err(e) => panic!("{e}"),
    }
}

/// Small random multimode input in mode `s`: up to `max_n` photons of both polarizations.
fn source_expansion(max_n: u8) -> impl Strategy<Value = FockExpansion> {
    prop::collection::vec((0..=max_n, 0..=max_n, -1.0..1.0f64, -1.0..1.0f64), 1..5).prop_filter_map(
        "non-empty",
        move |terms| {
            let modes = vec![ModeId::new(Spatial::S, Polarization::H), ModeId::new(Spatial::S, Polarization::V)];
            let t = terms
                .into_iter()
                .filter(|(h, v, _, _)| h + v <= max_n)
                .map(|(h, v, re, im)| (vec![h, v], Complex64::new(re, im)));
            let e = FockExpansion::from_terms(modes, t, max_n as usize).ok()?;
            let n = e.norm_sqr();
            (n > 1e-3).then(|| e.scaled(Complex64::new(1.0 / n.sqrt(), 0.0)))
        },
    )
}

fn weights(k: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.1..1.0f64, k).prop_map(|w| {
        let n = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        w.into_iter().map(|x| x / n).collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn construction_normalizes(a in amplitudes(3)) {
        let psi = PureState::from_amplitudes(3, a).unwrap();
        prop_assert!((psi.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn projection_probabilities_complete(psi in state(4), q in 1usize..=4, p in projector()) {
        let total = outcome_probability(&psi, q, p) + outcome_probability(&psi, q, p.orthogonal());
        prop_assert!((total - 1.0).abs() < 1e-12);
        if let Ok((out, _)) = psi.project_qubit(q, p) {
            prop_assert_eq!(out.n_qubits(), 3);
            prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn delta5_is_permutation_symmetric(alpha in 0.0..=1.0f64, eps in -PI..PI, perm in Just((0..5).collect::<Vec<usize>>()).prop_shuffle()) {
        let s = delta5(alpha, eps).unwrap();
        prop_assert!(s.permute(&perm).unwrap().max_abs_diff(&s) < 1e-14);
    }

    #[test]
    fn delta4_formula_matches_projection(alpha in 0.0..=1.0f64, eps in -PI..PI, p in projector()) {
        let projected = delta5(alpha, eps).unwrap().project_qubit(5, p);
        let formula = delta4_formula(alpha, eps, p);
        match (projected, formula) {
            (Ok((a, _)), Ok(b)) => prop_assert!(a.approx_eq_up_to_phase(&b, 1e-10)),
            (Err(_), Err(_)) => {}
            (x, y) => prop_assert!(false, "projection {:?} vs formula {:?}", x.is_ok(), y.is_ok()),
        }
    }

    #[test]
    fn tangle_is_local_unitary_invariant(psi in state(3), u1 in unitary(), u2 in unitary(), u3 in unitary()) {
        let t0 = three_tangle(&psi).unwrap().value;
        let (rotated, _) = psi.apply_local(&[u1, u2, u3]).unwrap();
        let t1 = three_tangle(&rotated).unwrap().value;
        prop_assert!((t0 - t1).abs() < 1e-10);
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&t0));
    }

    #[test]
    fn witness_is_offset_minus_fidelity(psi in state(4), offset in 0.01..0.99f64) {
        let w = WitnessSpec::new(d(4, 2), offset).unwrap();
        let f = psi.fidelity(&d(4, 2)).unwrap();
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&f));
        prop_assert!((witness_value(&w, &psi).unwrap() - (offset - f)).abs() < 1e-14);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn distribute_conserves_photons_and_norm(s in source_expansion(3), w in weights(3)) {
        let ports = [Spatial::Out(0), Spatial::Out(1), Spatial::Out(2)];
        let out = distribute(&s, &ports, &w).unwrap();
        prop_assert!((out.norm_sqr() - s.norm_sqr()).abs() < 1e-12);
        let before: std::collections::BTreeSet<usize> = s.photon_numbers().collect();
        for n in out.photon_numbers() {
            prop_assert!(before.contains(&n));
        }
        for n in before {
            prop_assert!((out.sector(n).norm_sqr() - s.sector(n).norm_sqr()).abs() < 1e-12);
        }
    }

    #[test]
    fn loss_conserves_probability(s in source_expansion(4), eta_c in 0.0..=1.0f64, eta_d in 0.0..=1.0f64) {
        let lossy = apply_loss(&s, LossModel::new(eta_c, eta_d).unwrap()).unwrap();
        prop_assert!((lossy.norm_sqr() - s.norm_sqr()).abs() < 1e-12);
        for n in lossy.photon_numbers() {
            prop_assert!(n <= 4);
        }
    }

    #[test]
    fn postselection_gives_valid_density_matrix(
        s in source_expansion(3),
        eta in 0.2..=1.0f64,
        threshold in any::<bool>(),
        herald in projector(),
    ) {
        let lossy = apply_loss(&s, LossModel::new(eta, 1.0).unwrap()).unwrap();
        let (ports, w) = symmetric_ports(3);
        let out = distribute(&lossy, &ports, &w).unwrap();
        let pattern = CoincidencePattern::qubits_then_heralds(&ports[..2], &[(ports[2], herald)]).unwrap();
        let det = if threshold { DetectorModel::Threshold } else { DetectorModel::NumberResolving };
        match postselect(&out, &pattern, det) {
            Ok(ps) => {
                let m = ps.rho.matrix();
                prop_assert!((m - m.adjoint()).iter().all(|x| x.norm() < 1e-12));
                prop_assert!((ps.rho.trace() - 1.0).abs() < 1e-12);
                prop_assert!(ps.rho.eigenvalues()[0] >= -1e-10);
                prop_assert!(ps.probability > 0.0 && ps.probability <= 1.0 + 1e-12);
            }
            Err(Error::EmptyPostselection) => {}
            Err(e) => prop_assert!(false, "{}", e),
        }
    }
}
