use std::f64::consts::{FRAC_PI_2, TAU};

use geonium::gates::{cn_reduced, cn_textbook, extract_gate, gate_fidelity, max_deviation, phase_equivalent, Gate4};
use geonium::hamiltonians::{excitation_number, sideband_minus, sideband_plus, spin_drive, transfer};
use geonium::linalg::{embed, ladder, sigma_x, sigma_z, BasisLabel, HilbertSpec, Mode, Spin, StateVector, C64};
use geonium::measurement::{outcome_distribution, readout_transfer};
use geonium::planner::{initial_state, prepare_state, register_labels, Rates, Template};
use geonium::pulses::{cn_plan, cn_sequence, run, sequence_propagator, Pulse, PulseSequence, RunMode};
use geonium::trap::{derive_couplings, DriveConfig, SpinDriveConfig, TrapConfig};
use proptest::prelude::*;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn unit_amps() -> impl Strategy<Value = [C64; 4]> {
    prop::array::uniform8(-1.0f64..1.0).prop_filter_map("zero vector", |x| {
        let z = [c(x[0], x[1]), c(x[2], x[3]), c(x[4], x[5]), c(x[6], x[7])];
        let n = z.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        (n > 1e-3).then(|| z.map(|a| a / n))
    })
}

fn pulse() -> impl Strategy<Value = Pulse> {
    (0usize..4, 0.05f64..1.0, -TAU..TAU, 0.0f64..5.0).prop_map(|(kind, s, ph, t)| match kind {
        0 => Pulse::spin_drive(s, ph, t),
        1 => Pulse::sideband_minus(s, ph, t),
        2 => Pulse::sideband_plus(s, ph, t),
        _ => Pulse::carrier(s, 0.1, ph, t),
    })
}

fn sequence() -> impl Strategy<Value = PulseSequence> {
    prop::collection::vec(pulse(), 0..5).prop_map(PulseSequence::new)
}

fn random_unitary4(seed: [f64; 16]) -> Gate4 {
    // QR of a complex matrix gives a unitary Q.
    let m = Gate4::from_fn(|i, j| c(seed[(4 * i + j) % 16], seed[(4 * j + i + 5) % 16]));
    m.qr().q()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn carrier_coupling_is_twice_zeta_ld_squared(
        b in 0.5f64..5.0, v0 in 1.0f64..50.0, d in 1e-3f64..1e-2, alpha in 1e-12f64..1e-9, k in 1e4f64..1e6,
    ) {
        let trap = TrapConfig::new(b, v0, d).unwrap();
        let drv = DriveConfig { alpha, k, omega: 1.0, phi: 0.0, varphi: 0.0 };
        let cp = derive_couplings(&trap, &drv, &SpinDriveConfig::default()).unwrap();
        let expected = 2.0 * cp.zeta * cp.lamb_dicke * cp.lamb_dicke;
        prop_assert!((cp.kappa - expected).abs() <= 1e-12 * expected.abs());
        prop_assert!((cp.eta - cp.zeta * cp.lamb_dicke).abs() <= 1e-12 * cp.eta.abs());
    }

    #[test]
    fn operators_on_different_modes_commute(axial in 2usize..6, cyc in 1usize..4) {
        let spec = HilbertSpec::new(axial, cyc, 1).unwrap();
        let (a, ad) = ladder(axial).unwrap();
        let x = embed(&(a + ad), Mode::Axial, spec).unwrap();
        let s = embed(&sigma_x(), Mode::Spin, spec).unwrap();
        prop_assert!(x.commutator(&s).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn pulse_sequence_toml_round_trip(seq in sequence()) {
        let back = PulseSequence::from_toml(&seq.to_toml()).unwrap();
        prop_assert_eq!(back, seq);
    }

    #[test]
    fn sequences_preserve_norm(seq in sequence(), amps in unit_amps()) {
        let spec = HilbertSpec::spin_axial(8).unwrap();
        let comps: Vec<_> = register_labels().into_iter().zip(amps).collect();
        let psi = StateVector::from_components(spec, &comps).unwrap();
        let out = run(&seq, &psi, RunMode::Effective).unwrap().state;
        prop_assert!((out.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn phase_equivalence_is_reflexive_and_symmetric(
        seed in prop::array::uniform16(-1.0f64..1.0),
        ph in prop::array::uniform8(-3.0f64..3.0),
    ) {
        let u = random_unitary4(seed);
        prop_assert!(phase_equivalent(&u, &u).unwrap().is_some());
        let dressed = Gate4::from_fn(|i, j| C64::from_polar(1.0, ph[i]) * u[(i, j)] * C64::from_polar(1.0, ph[4 + j]));
        prop_assert_eq!(
            phase_equivalent(&dressed, &cn_textbook()).unwrap().is_some(),
            phase_equivalent(&cn_textbook(), &dressed).unwrap().is_some()
        );
        let cn = Gate4::from_fn(|i, j| C64::from_polar(1.0, ph[i]) * cn_textbook()[(i, j)] * C64::from_polar(1.0, ph[4 + j]));
        prop_assert!(phase_equivalent(&cn, &cn_textbook()).unwrap().is_some());
        prop_assert!(phase_equivalent(&cn_textbook(), &cn).unwrap().is_some());
    }

    #[test]
    fn measurement_ignores_global_phase(amps in unit_amps(), phase in -3.0f64..3.0) {
        let spec = HilbertSpec::new(3, 3, 1).unwrap();
        let comps: Vec<_> = register_labels().into_iter().zip(amps).collect();
        let psi = StateVector::from_components(spec, &comps).unwrap();
        let rotated = StateVector::from_amplitudes(spec, psi.amplitudes() * C64::from_polar(1.0, phase)).unwrap();
        let a = outcome_distribution(&readout_transfer(&psi, 1.0).unwrap().state).unwrap();
        let b = outcome_distribution(&readout_transfer(&rotated, 1.0).unwrap().state).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x.probability - y.probability).abs() < 1e-12);
        }
    }

    #[test]
    fn cn_squared_flips_sign_of_excited_axial(zeta in 0.01f64..1.0, ld in 0.02f64..0.3, n in 0u64..3) {
        let cp = geonium::trap::Couplings {
            epsilon: 0.0, zeta, eta: zeta * ld, kappa: 2.0 * zeta * ld * ld, lamb_dicke: ld, rabi_s: 0.5,
        };
        let seq = cn_sequence(&cp, n).unwrap();
        let spec = HilbertSpec::spin_axial(4).unwrap();
        let twice = seq.then(&seq);
        let m = extract_gate(&twice, spec, RunMode::Effective, &cn_textbook()).unwrap().truth_table;
        let d = |x: f64| c(x, 0.0);
        let z = d(0.0);
        let expected = Gate4::new(d(1.0), z, z, z, z, d(1.0), z, z, z, z, d(-1.0), z, z, z, z, d(-1.0));
        let sign = m[(0, 0)];
        prop_assert!(max_deviation(&(m / sign), &expected) < 1e-8, "{m}");
    }

    #[test]
    fn cn_truth_table_has_permutation_moduli(zeta in 0.01f64..1.0, ld in 0.02f64..0.3) {
        let cp = geonium::trap::Couplings {
            epsilon: 0.0, zeta, eta: zeta * ld, kappa: 2.0 * zeta * ld * ld, lamb_dicke: ld, rabi_s: 0.5,
        };
        let plan = cn_plan(&cp, 0).unwrap();
        let report = extract_gate(&plan.sequence, HilbertSpec::spin_axial(4).unwrap(), RunMode::Effective, &cn_textbook()).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let want = cn_textbook()[(i, j)].norm();
                prop_assert!((report.truth_table[(i, j)].norm() - want).abs() < 1e-8);
            }
        }
        prop_assert!(report.leakage < 1e-12);
        prop_assert!(gate_fidelity(&report.truth_table, &cn_reduced()) > 1.0 - 1e-12);
    }

    #[test]
    fn propagation_is_linear(seq in sequence(), a in unit_amps(), b in unit_amps(), w in -2.0f64..2.0) {
        let spec = HilbertSpec::spin_axial(6).unwrap();
        let state = |z: [C64; 4]| {
            let comps: Vec<_> = register_labels().into_iter().zip(z).collect();
            StateVector::from_components(spec, &comps).unwrap()
        };
        let u = sequence_propagator(&seq, spec, RunMode::Effective).unwrap();
        let combo = state(a).amplitudes() + state(b).amplitudes() * c(w, 0.0);
        let lhs = u.matrix() * &combo;
        let rhs = u.matrix() * state(a).amplitudes() + u.matrix() * state(b).amplitudes() * c(w, 0.0);
        prop_assert!((lhs - rhs).norm() < 1e-10);
    }

    #[test]
    fn pair_template_leakage_matches_simulation(amps in unit_amps()) {
        let rates = Rates { rabi_s: 0.7, eta: 0.3 };
        let plan = prepare_state(amps, rates, Template::SidebandPair).unwrap();
        let spec = HilbertSpec::spin_axial(6).unwrap();
        let out = run(&plan.sequence, &initial_state(spec), RunMode::Effective).unwrap().state;
        let inside: f64 = register_labels().iter().map(|&l| out.amp(l).norm_sqr()).sum();
        prop_assert!(((1.0 - inside) - plan.leakage).abs() < 1e-9);
        if plan.reachable {
            let target: C64 = register_labels().iter().zip(amps).map(|(&l, z)| z.conj() * out.amp(l)).sum();
            prop_assert!(target.norm_sqr() > 1.0 - 1e-9);
        }
    }

    #[test]
    fn universal_template_reaches_any_register_state(amps in unit_amps()) {
        let rates = Rates { rabi_s: 1.3, eta: 0.2 };
        let plan = prepare_state(amps, rates, Template::Universal).unwrap();
        let spec = HilbertSpec::spin_axial(5).unwrap();
        let out = run(&plan.sequence, &initial_state(spec), RunMode::Effective).unwrap().state;
        let overlap: C64 = register_labels().iter().zip(amps).map(|(&l, z)| z.conj() * out.amp(l)).sum();
        prop_assert!(overlap.norm_sqr() > 1.0 - 1e-9);
    }

    #[test]
    fn sidebands_conserve_their_excitation_numbers(eta in 0.01f64..2.0, vp in -TAU..TAU, dim in 2usize..8) {
        let spec = HilbertSpec::spin_axial(dim).unwrap();
        let red = sideband_minus(spec, eta, vp).unwrap();
        let blue = sideband_plus(spec, eta, vp).unwrap();
        prop_assert!(red.commutator(&excitation_number(spec, 1.0).unwrap()).unwrap().max_abs() < 1e-12);
        prop_assert!(blue.commutator(&excitation_number(spec, -1.0).unwrap()).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn spin_drive_leaves_motion_alone(rabi in 0.01f64..2.0, theta in -TAU..TAU) {
        let spec = HilbertSpec::new(3, 2, 1).unwrap();
        let h = spin_drive(spec, rabi, theta).unwrap();
        let (a, _) = ladder(3).unwrap();
        prop_assert!(h.commutator(&embed(&a, Mode::Axial, spec).unwrap()).unwrap().max_abs() < 1e-14);
        prop_assert!(transfer(spec, rabi).unwrap().commutator(&embed(&sigma_z(), Mode::Spin, spec).unwrap()).unwrap().max_abs() < 1e-14);
    }
}

#[test]
fn full_swap_moves_axial_quantum() {
    let spec = HilbertSpec::new(3, 3, 1).unwrap();
    let psi = StateVector::basis(spec, BasisLabel::new(1, Spin::Up)).unwrap();
    let out =
        run(&PulseSequence::new(vec![Pulse::transfer(2.0, FRAC_PI_2 / 2.0)]), &psi, RunMode::Effective).unwrap().state;
    assert!((out.amp(BasisLabel::new(0, Spin::Up).with_cyclotron(1)).norm() - 1.0).abs() < 1e-12);
}
