use mlr_core::heisenberg::{evolve_logical, LogicalPair};
use mlr_core::protocols::*;
use mlr_core::sim_stabilizer::{is_identity_matrix, is_zero_matrix};
use mlr_core::PauliString;

const BRANCHES: usize = 1 << 16;

#[test]
fn stp_teleports_on_both_backends() {
    let i = build_stp().unwrap();
    let c = check_task(&i, Backend::Both, BRANCHES).unwrap();
    assert!(c.passed, "{c:?}");
    assert_eq!(c.branches, 4);
}

#[test]
fn estp_small_grid_teleports() {
    for m in 0..=2 {
        for t in 3..=5 {
            let i = build_estp(m, t).unwrap();
            let c = check_teleport_stabilizer(&i, BRANCHES).unwrap();
            assert!(c.passed, "M={m} T={t}: {:?}", c.process_matrices);
            assert_eq!(c.branches, 1 << (2 * m));
            assert_eq!(i.metadata.claimed_d, (2 * m + 1) * (t - 1));
            assert!(heisenberg_verdict(&i));
        }
    }
}

#[test]
fn estp_dense_matches_stabilizer() {
    let i = build_estp(1, 4).unwrap();
    assert!(check_task(&i, Backend::Both, BRANCHES).unwrap().passed);
}

#[test]
fn bell_basis_variant_reaches_further() {
    for (m, t) in [(1, 2), (2, 3), (1, 4)] {
        let i = build_estp_with(m, t, EstpOptions { bell_basis: true, extra_spacing: 0 }).unwrap();
        assert_eq!(i.metadata.claimed_d, (2 * m + 1) * t);
        assert_eq!(i.metadata.depth, t);
        assert_eq!(i.metadata.m, m);
        assert!(check_teleport_stabilizer(&i, BRANCHES).unwrap().passed);
    }
}

#[test]
fn estp_final_logicals() {
    let i = build_estp(2, 4).unwrap();
    let pair = LogicalPair::at_site(16, 15).unwrap();
    let back = evolve_logical(&i.circuit, &pair).unwrap();
    let roles = &i.metadata.roles;
    let cs: Vec<String> = roles.iter().map(|r| format!("Z{}", r.c + 1)).collect();
    let ds: Vec<String> = roles.iter().map(|r| format!("Z{}", r.d + 1)).collect();
    let x = PauliString::parse(&format!("X1*{}", cs.join("*")), 16).unwrap();
    let z = PauliString::parse(&format!("Z1*{}", ds.join("*")), 16).unwrap();
    assert_eq!(back.x_logical.unsigned(), x);
    assert_eq!(back.z_logical.unsigned(), z);
}

#[test]
fn sabotage_breaks_teleportation() {
    let i = build_estp(2, 4).unwrap();
    let s = sabotage(&i, Sabotage::StripFeedback).unwrap();
    let c = check_teleport_stabilizer(&s, BRANCHES).unwrap();
    assert!(is_zero_matrix(&c.process_matrices[0], 1e-12));
    assert!(!heisenberg_verdict(&s));

    let s = sabotage(&i, Sabotage::StretchRegions(1)).unwrap();
    let c = check_teleport_stabilizer(&s, BRANCHES).unwrap();
    assert!(!is_identity_matrix(&c.process_matrices[0], 1e-9));
    assert!(!heisenberg_verdict(&s));

    let two = build_multiqubit_estp(2, 2, 4).unwrap();
    assert!(check_teleport_stabilizer(&two, BRANCHES).unwrap().passed);
    let s = sabotage(&two, Sabotage::ShareMeasurement).unwrap();
    let c = check_teleport_stabilizer(&s, BRANCHES).unwrap();
    assert!(!c.passed);
    assert!(is_identity_matrix(&c.process_matrices[0], 1e-12));
}

#[test]
fn bell_distill_pairs() {
    for (m, t) in [(0, 3), (1, 4), (2, 3)] {
        let i = build_bell_distill(m, t, false).unwrap();
        assert_eq!(i.metadata.claimed_d, 2 * (m + 1) * (t - 1) + 1);
        assert!(check_bell_pair(&i, Backend::Stabilizer, BRANCHES).unwrap().passed);
    }
    let flipped = build_bell_distill(1, 4, true).unwrap();
    assert!(check_bell_pair(&flipped, Backend::Stabilizer, BRANCHES).unwrap().passed);
    let mut as_plain = flipped.clone();
    as_plain.metadata.params.insert("flip".into(), 0);
    assert!(!check_bell_pair(&as_plain, Backend::Stabilizer, BRANCHES).unwrap().passed);
}

#[test]
fn ghz_patches_join() {
    for ell in [2, 4, 6] {
        for m in 0..=3 {
            let i = build_ghz_1d(m, ell).unwrap();
            assert_eq!(i.circuit.n_physical, (m + 1) * ell);
            assert_eq!(i.metadata.m, m);
            assert!(check_ghz(&i, Backend::Stabilizer, BRANCHES).unwrap().passed, "m={m} ell={ell}");
        }
    }
    assert!(check_ghz(&build_ghz_1d(1, 2).unwrap(), Backend::Dense, BRANCHES).unwrap().passed);
}

#[test]
fn w_state_fidelity() {
    for n in 2..=4 {
        for mode in [WMode::Unitary, WMode::Estp] {
            let i = build_w_state(n, mode).unwrap();
            let c = check_w_dense(&i, BRANCHES).unwrap();
            assert!(c.passed, "n={n} {mode:?}: {:?}", c.min_fidelity);
        }
    }
}

#[test]
fn corpus_is_self_consistent_and_round_trips() {
    for i in corpus().unwrap() {
        assert!(i.is_self_consistent(), "{}", i.metadata.protocol);
        assert!(i.circuit.n_dilated() <= 12);
        let back = ProtocolInstance::from_json(&i.to_json()).unwrap();
        assert_eq!(back, i);
    }
}
