use mlr_core::dense::DenseOptions;
use mlr_core::protocols::*;

#[test]
fn sampled_branches_of_working_protocols_pass() {
    let insts = [build_stp().unwrap(), build_estp(1, 3).unwrap(), build_ghz_1d(2, 2).unwrap(), build_bell_distill(1, 3, false).unwrap()];
    for inst in &insts {
        for seed in 0..8 {
            let (chk, outcomes) = check_sampled(inst, Backend::Both, seed).unwrap();
            assert!(chk.passed, "{} seed {seed}: {}", inst.metadata.protocol, chk.detail);
            assert_eq!(outcomes.len(), inst.circuit.n_registers());
        }
    }
    let w = build_w_state(4, WMode::Estp).unwrap();
    let (chk, _) = check_sampled(&w, Backend::Stabilizer, 3).unwrap();
    assert!(chk.passed && chk.min_fidelity.unwrap() > 1.0 - 1e-10);
}

#[test]
fn sampled_check_sees_the_missing_correction() {
    let bad = sabotage(&build_estp(1, 3).unwrap(), Sabotage::StripFeedback).unwrap();
    let verdicts: Vec<bool> = (0..16).map(|seed| check_sampled(&bad, Backend::Stabilizer, seed).unwrap().0.passed).collect();
    // only branches whose outcomes need no correction still pass
    assert!(verdicts.iter().any(|&p| !p));
}

#[test]
fn sampled_outcomes_are_reproducible() {
    let inst = build_estp(3, 3).unwrap();
    let a = check_sampled(&inst, Backend::Stabilizer, 42).unwrap();
    let b = check_sampled(&inst, Backend::Stabilizer, 42).unwrap();
    assert_eq!(a, b);
}

#[test]
fn dilated_checks_agree_with_enumeration() {
    let insts = [
        build_stp().unwrap(),
        build_estp(1, 3).unwrap(),
        sabotage(&build_estp(1, 3).unwrap(), Sabotage::StripFeedback).unwrap(),
        build_ghz_1d(1, 2).unwrap(),
        build_w_state(2, WMode::Estp).unwrap(),
    ];
    for inst in &insts {
        let dilated = check_dilated(inst, DenseOptions::default()).unwrap();
        let enumerated = check_task(inst, Backend::Dense, 1 << 12).unwrap();
        assert_eq!(dilated.passed, enumerated.passed, "{}", inst.metadata.protocol);
        for (a, b) in dilated.process_matrices.iter().zip(&enumerated.process_matrices) {
            for (x, y) in a.iter().flatten().zip(b.iter().flatten()) {
                assert!((x - y).abs() < 1e-10);
            }
        }
    }
}
