use mlr_core::dense::{operator_matrix, pauli_matrix, StateVector};
use mlr_core::pauli::conjugate_by_clifford;
use mlr_core::{CliffordGate, CliffordKind, Pauli, PauliString, Tableau};
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

const N: usize = 3;

fn letters(n: usize) -> impl Strategy<Value = PauliString> {
    (prop::collection::vec(0..4usize, n), any::<bool>()).prop_map(move |(ls, neg)| {
        let f: Vec<(usize, Pauli)> = ls.iter().enumerate().map(|(q, &l)| (q, [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][l])).collect();
        let p = PauliString::from_sparse(n, &f).unwrap();
        if neg {
            p.negated()
        } else {
            p
        }
    })
}

const KINDS: [CliffordKind; 10] = [
    CliffordKind::I,
    CliffordKind::X,
    CliffordKind::Y,
    CliffordKind::Z,
    CliffordKind::H,
    CliffordKind::S,
    CliffordKind::Sdg,
    CliffordKind::Cnot,
    CliffordKind::Cz,
    CliffordKind::Swap,
];

fn gate(n: usize) -> impl Strategy<Value = CliffordGate> {
    (0..KINDS.len(), 0..n, 1..n).prop_map(move |(k, a, off)| {
        let kind = KINDS[k];
        if kind.arity() == 1 {
            CliffordGate::one(kind, a)
        } else {
            CliffordGate::two(kind, a, (a + off) % n)
        }
    })
}

fn mat(p: &PauliString) -> DMatrix<Complex64> {
    pauli_matrix::<f64>(p).unwrap()
}

fn gate_matrix(n: usize, g: &CliffordGate) -> DMatrix<Complex64> {
    operator_matrix::<f64>(n, |s: &mut StateVector<f64>| s.apply_clifford(g, 0)).unwrap()
}

fn close(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> bool {
    (a - b).iter().all(|z| z.norm() < 1e-12)
}

proptest! {
    #[test]
    fn product_matches_matrices(p in letters(N), q in letters(N)) {
        let (r, e) = p.product(&q).unwrap();
        let phase = if e == 1 { Complex64::i() } else { Complex64::new(1.0, 0.0) };
        prop_assert!(close(&(mat(&p) * mat(&q)), &(mat(&r) * phase)));
    }

    #[test]
    fn commutation_matches_matrices(p in letters(N), q in letters(N)) {
        let c = p.commutes(&q).unwrap();
        prop_assert_eq!(c, q.commutes(&p).unwrap());
        let (pm, qm) = (mat(&p), mat(&q));
        prop_assert_eq!(c, close(&(&pm * &qm), &(&qm * &pm)));
    }

    #[test]
    fn squares_to_identity(p in letters(N)) {
        prop_assert!(p.multiply(&p).unwrap().is_identity());
        prop_assert!(!p.multiply(&p).unwrap().is_negative());
    }

    #[test]
    fn product_is_associative(p in letters(N), q in letters(N), r in letters(N)) {
        let (pq, e1) = p.product(&q).unwrap();
        let (pq_r, e2) = pq.product(&r).unwrap();
        let (qr, e3) = q.product(&r).unwrap();
        let (p_qr, e4) = p.product(&qr).unwrap();
        let phase = |a: u8, b: u8, s: bool| ((a + b) as i32 + if s { 2 } else { 0 }) % 4;
        prop_assert_eq!(pq_r.unsigned(), p_qr.unsigned());
        prop_assert_eq!(phase(e1, e2, pq_r.is_negative()), phase(e3, e4, p_qr.is_negative()));
    }

    #[test]
    fn conjugation_is_a_homomorphism(p in letters(N), q in letters(N), g in gate(N)) {
        let lhs = conjugate_by_clifford(&p.multiply(&q).unwrap(), &g).unwrap();
        let rhs = conjugate_by_clifford(&p, &g).unwrap().multiply(&conjugate_by_clifford(&q, &g).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn conjugation_matches_matrices(p in letters(N), g in gate(N)) {
        let u = gate_matrix(N, &g);
        let want = u.adjoint() * mat(&p) * &u;
        prop_assert!(close(&mat(&conjugate_by_clifford(&p, &g).unwrap()), &want));
    }

    #[test]
    fn text_round_trip(p in letters(5)) {
        prop_assert_eq!(PauliString::parse(&p.to_string(), 5).unwrap(), p);
    }

    #[test]
    fn tableau_stays_valid(gs in prop::collection::vec(gate(5), 0..40)) {
        let mut t = Tableau::new(5);
        for g in &gs {
            t.apply(g).unwrap();
        }
        prop_assert!(t.check_invariants());
        for s in t.stabilizers() {
            prop_assert!(t.stabilizes(&s).unwrap());
        }
    }
}
