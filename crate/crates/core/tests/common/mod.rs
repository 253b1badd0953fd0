//! Independent oracles shared by the integration and acceptance targets.
#![allow(dead_code)]

use mlr_core::circuit::DilatedCircuit;
use mlr_core::dense::{apply_circuit, pauli_matrix, DenseMode, DenseOptions, StateVector};
use mlr_core::dilation::{
    conjugate_through_measurement, measurement_unitary, DilatedIndexMap, MeasurementOp, PauliSum,
};
use mlr_core::sim_stabilizer;
use mlr_core::{OutcomeSource, Pauli, PauliString, Tableau};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

pub const LETTERS: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

pub fn random_pauli(rng: &mut impl Rng, n: usize) -> PauliString {
    let factors: Vec<(usize, Pauli)> = (0..n).map(|q| (q, LETTERS[rng.random_range(0..4)])).collect();
    let p = PauliString::from_sparse(n, &factors).unwrap();
    if rng.random_bool(0.5) {
        p.negated()
    } else {
        p
    }
}

pub fn random_non_identity(rng: &mut impl Rng, n: usize) -> PauliString {
    loop {
        let p = random_pauli(rng, n);
        if !p.is_identity() {
            return p;
        }
    }
}

pub fn random_state(rng: &mut impl Rng, n: usize) -> StateVector<f64> {
    let amps = (0..1usize << n).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    StateVector::normalized_from(amps).unwrap()
}

pub fn max_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn identity(d: usize) -> DMatrix<Complex64> {
    DMatrix::identity(d, d)
}

/// Projective measurement unitary of `obs` into register 0 of an `n + 1`
/// qubit dilated space, built from the library and as a matrix.
pub fn measurement_matrix(obs: &PauliString) -> DMatrix<Complex64> {
    let map = DilatedIndexMap { n_physical: obs.num_qubits(), register_of_measurement: vec![0] };
    let u = measurement_unitary(&MeasurementOp { observable: obs.clone(), register: 0 }, &map).unwrap();
    u.matrix::<f64>().unwrap()
}

/// `P+ (x) I + P- (x) X` written out from Pauli matrices.
pub fn measurement_matrix_oracle(obs: &PauliString) -> DMatrix<Complex64> {
    let n = obs.num_qubits();
    let id = identity(1 << (n + 1));
    let o = pauli_matrix::<f64>(&obs.extended(n + 1)).unwrap();
    let x = pauli_matrix::<f64>(&PauliString::single(n + 1, n, Pauli::X).unwrap()).unwrap();
    let half = Complex64::new(0.5, 0.0);
    (&id + &o) * half + (&id - &o) * half * x
}

/// Largest deviation between the lookup-table conjugation of `A (x) B` and
/// the dense product `U (A (x) B) U`, over the register operators
/// `I, X, Y, Z, P+, P-`. Together with a commuting and an anticommuting `A`
/// this covers every cell of the table.
pub fn lookup_table_error(obs: &PauliString, a: &PauliString) -> f64 {
    let n = obs.num_qubits();
    let map = DilatedIndexMap { n_physical: n, register_of_measurement: vec![0] };
    let u = measurement_unitary(&MeasurementOp { observable: obs.clone(), register: 0 }, &map).unwrap();
    let um = u.matrix::<f64>().unwrap();
    let base = a.extended(n + 1);
    let mut sums = Vec::new();
    for l in LETTERS {
        let mut p = base.clone();
        p.set(n, l);
        sums.push(PauliSum::from_pauli(&p));
    }
    for sign in [0.5, -0.5] {
        let mut s = PauliSum::zero(n + 1);
        s.add(Complex64::new(0.5, 0.0), &base).unwrap();
        let mut z = base.clone();
        z.set(n, Pauli::Z);
        s.add(Complex64::new(sign, 0.0), &z).unwrap();
        sums.push(s);
    }
    sums.iter()
        .map(|s| {
            let got = conjugate_through_measurement(s, &u).unwrap().to_matrix::<f64>().unwrap();
            let want = &um * s.to_matrix::<f64>().unwrap() * &um;
            max_diff(&got, &want)
        })
        .fold(0.0, f64::max)
}

/// Branch-by-branch comparison of the two backends from `|0...0>`.
#[derive(Debug)]
pub struct OracleComparison {
    pub branches: usize,
    pub max_probability_error: f64,
    /// Largest `1 - <S>` over tableau stabilizers `S`, on the dense state.
    pub max_stabilizer_error: f64,
}

pub fn compare_backends(c: &DilatedCircuit, max_branches: usize) -> OracleComparison {
    let n = c.n_physical;
    let recs = sim_stabilizer::enumerate_trajectories(c, &Tableau::new(n), max_branches).unwrap();
    let mut out = OracleComparison { branches: recs.len(), max_probability_error: 0.0, max_stabilizer_error: 0.0 };
    for r in &recs {
        let mut src = OutcomeSource::forced(r.trajectory.outcomes.clone());
        let run = apply_circuit(c, &StateVector::<f64>::zero(n).unwrap(), DenseMode::Trajectory, &mut src, DenseOptions::default())
            .unwrap();
        assert_eq!(run.trajectory.outcomes, r.trajectory.outcomes);
        out.max_probability_error =
            out.max_probability_error.max((run.trajectory.probability - r.trajectory.probability).abs());
        for s in r.final_tableau.stabilizers() {
            let e = run.state.expectation(&s).unwrap();
            out.max_stabilizer_error = out.max_stabilizer_error.max((1.0 - e).abs());
        }
    }
    out
}
