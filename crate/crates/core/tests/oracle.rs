mod common;

use common::*;
use mlr_core::circuit::{DilatedCircuit, Op};
use mlr_core::protocols::corpus;
use mlr_core::{CliffordGate, CliffordKind};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ONE_QUBIT: [CliffordKind; 7] =
    [CliffordKind::X, CliffordKind::Y, CliffordKind::Z, CliffordKind::H, CliffordKind::S, CliffordKind::Sdg, CliffordKind::I];
const TWO_QUBIT: [CliffordKind; 3] = [CliffordKind::Cnot, CliffordKind::Cz, CliffordKind::Swap];

/// Random layered circuit with measurements and parity feedback.
fn random_circuit(seed: u64, n: usize, layers: usize) -> DilatedCircuit {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = DilatedCircuit::chain(n);
    let mut regs = 0;
    for _ in 0..layers {
        let mut layer = Vec::new();
        match rng.random_range(0..4) {
            0 => {
                let a = rng.random_range(0..n);
                let b = (a + rng.random_range(1..n)) % n;
                layer.push(Op::gate(CliffordGate::two(TWO_QUBIT[rng.random_range(0..3)], a, b)));
            }
            1 => {
                layer.push(Op::measure(random_non_identity(&mut rng, n), regs));
                regs += 1;
            }
            2 if regs > 0 => {
                let mut parity: Vec<usize> = (0..regs).filter(|_| rng.random_bool(0.5)).collect();
                if parity.is_empty() {
                    parity.push(regs - 1);
                }
                let g = CliffordGate::one(ONE_QUBIT[rng.random_range(0..6)], rng.random_range(0..n));
                layer.push(Op::cond(parity, g));
            }
            _ => layer.push(Op::gate(CliffordGate::one(ONE_QUBIT[rng.random_range(0..6)], rng.random_range(0..n)))),
        }
        c.push_layer(layer);
    }
    c
}

#[test]
fn corpus_backends_agree_branch_for_branch() {
    for inst in corpus().unwrap() {
        let cmp = compare_backends(&inst.circuit, 1 << 12);
        assert!(cmp.max_probability_error < 1e-12, "{}: {cmp:?}", inst.metadata.protocol);
        assert!(cmp.max_stabilizer_error < 1e-12, "{}: {cmp:?}", inst.metadata.protocol);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_circuits_agree(seed in any::<u64>(), n in 2..=6usize, layers in 1..30usize) {
        let c = random_circuit(seed, n, layers);
        let cmp = compare_backends(&c, 1 << 12);
        prop_assert!(cmp.branches >= 1);
        prop_assert!(cmp.max_probability_error < 1e-12, "{:?}", cmp);
        prop_assert!(cmp.max_stabilizer_error < 1e-10, "{:?}", cmp);
    }
}
