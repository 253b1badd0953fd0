//! Schrödinger-picture execution of Clifford circuits on the tableau.
//!
//! Registers are classical outcome bits here; for projective Pauli
//! measurements this is equivalent to carrying them as tableau qubits.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::circuit::{DilatedCircuit, Gate, Op};
use crate::dilation::Trajectory;
use crate::error::{Error, Result};
use crate::pauli::{CliffordGate, OutcomeSource, Pauli, PauliString, Tableau};

/// Outcome of one stabilizer run.
#[derive(Clone, Debug)]
pub struct RunRecord {
    pub final_tableau: Tableau,
    pub trajectory: Trajectory,
    pub depth_executed: usize,
}

fn clifford(g: &Gate) -> Result<&CliffordGate> {
    g.as_clifford().ok_or_else(|| Error::NonClifford(g.name().to_string()))
}

/// Runs one trajectory. Conditioned gates fire on odd recorded parity.
pub fn run_trajectory(c: &DilatedCircuit, initial: &Tableau, src: &mut OutcomeSource) -> Result<RunRecord> {
    c.validate()?;
    if initial.num_qubits() != c.n_physical {
        return Err(Error::LengthMismatch { left: c.n_physical, right: initial.num_qubits() });
    }
    let mut t = initial.clone();
    let mut traj = Trajectory::new();
    let mut depth = 0;
    for layer in &c.layers {
        if layer.iter().any(Op::is_two_site_gate) {
            depth += 1;
        }
        let mut pending: Vec<&CliffordGate> = Vec::new();
        for op in layer {
            if let Op::Gate(g) = op {
                pending.push(clifford(g)?);
                continue;
            }
            t.apply_all(&pending)?;
            pending.clear();
            match op {
                Op::Gate(_) => unreachable!(),
                Op::Measure { obs, reg } => {
                    if *reg != traj.outcomes.len() {
                        return Err(Error::InvalidCircuit(format!("register {reg} measured out of order")));
                    }
                    let out = t.measure(obs, src)?;
                    traj.push(out, if out.deterministic { 1.0 } else { 0.5 });
                }
                Op::WeakMeasure { .. } => return Err(Error::NonClifford("weak measurement".into())),
                Op::Cond { parity, gate } => {
                    let g = clifford(gate)?;
                    if traj.parity(parity)? == 1 {
                        t.apply(g)?;
                    }
                }
            }
        }
        t.apply_all(&pending)?;
    }
    Ok(RunRecord { final_tableau: t, trajectory: traj, depth_executed: depth })
}

/// Every trajectory, found depth-first with outcome 0 explored first.
pub fn enumerate_trajectories(c: &DilatedCircuit, initial: &Tableau, max_branches: usize) -> Result<Vec<RunRecord>> {
    if !c.is_clifford() {
        return Err(Error::NonClifford("circuit has non-Clifford operations".into()));
    }
    let mut out = Vec::new();
    let mut prefix = Vec::new();
    loop {
        if out.len() == max_branches {
            return Err(Error::BranchBudget(max_branches));
        }
        let rec = run_trajectory(c, initial, &mut OutcomeSource::forced_random(prefix))?;
        let mut bits = rec.trajectory.random_bits.clone();
        out.push(rec);
        match bits.iter().rposition(|&b| b == 0) {
            Some(k) => {
                bits.truncate(k + 1);
                bits[k] = 1;
                prefix = bits;
            }
            None => return Ok(out),
        }
    }
}

/// Exact check that the dyadic branch probabilities `2^-k` sum to one.
pub fn probabilities_sum_to_one(records: &[RunRecord]) -> bool {
    let Some(kmax) = records.iter().map(|r| r.trajectory.random_draws).max() else {
        return false;
    };
    let total = records
        .iter()
        .fold(BigUint::zero(), |acc, r| acc + (BigUint::one() << (kmax - r.trajectory.random_draws)));
    total == BigUint::one() << kmax
}

/// Probability-weighted `(<X>, <Y>, <Z>)` at `site`.
pub fn averaged_bloch(records: &[RunRecord], site: usize) -> Result<[f64; 3]> {
    if records.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    let n = records[0].final_tableau.num_qubits();
    let mut v = [0.0; 3];
    for r in records {
        for (a, p) in [Pauli::X, Pauli::Y, Pauli::Z].into_iter().enumerate() {
            let e = r.final_tableau.expectation(&PauliString::single(n, site, p)?)?;
            v[a] += r.trajectory.probability * e as f64;
        }
    }
    Ok(v)
}

/// `|0...0>` with qubit `site` rotated into the `sign` eigenstate of `axis`.
pub fn pauli_eigenstate(n: usize, site: usize, axis: Pauli, positive: bool) -> Result<Tableau> {
    let mut t = Tableau::new(n);
    let mut gates = Vec::new();
    if !positive {
        gates.push(CliffordGate::x(site));
    }
    match axis {
        Pauli::Z => {}
        Pauli::X => gates.push(CliffordGate::h(site)),
        Pauli::Y => {
            gates.push(CliffordGate::h(site));
            gates.push(CliffordGate::s(site));
        }
        Pauli::I => return Err(Error::InvalidParams("identity has no eigenstate basis".into())),
    }
    for g in &gates {
        t.apply(g)?;
    }
    Ok(t)
}

/// Pauli transfer matrix from `in_site` to `out_site`: entry `(a, b)` is
/// the outcome-averaged `<P_a>` at the output for the `+1` eigenstate of
/// `P_b` at the input, antisymmetrized over the `-1` eigenstate.
pub fn teleport_process_matrix(
    c: &DilatedCircuit,
    in_site: usize,
    out_site: usize,
    max_branches: usize,
) -> Result<[[f64; 3]; 3]> {
    let n = c.n_physical;
    for s in [in_site, out_site] {
        if s >= n {
            return Err(Error::OutOfRange { index: s, n });
        }
    }
    let mut m = [[0.0; 3]; 3];
    for (b, axis) in [Pauli::X, Pauli::Y, Pauli::Z].into_iter().enumerate() {
        let plus = averaged_bloch(&enumerate_trajectories(c, &pauli_eigenstate(n, in_site, axis, true)?, max_branches)?, out_site)?;
        let minus = averaged_bloch(&enumerate_trajectories(c, &pauli_eigenstate(n, in_site, axis, false)?, max_branches)?, out_site)?;
        for a in 0..3 {
            m[a][b] = 0.5 * (plus[a] - minus[a]);
        }
    }
    Ok(m)
}

pub fn is_identity_matrix(m: &[[f64; 3]; 3], tol: f64) -> bool {
    (0..3).all(|a| (0..3).all(|b| (m[a][b] - if a == b { 1.0 } else { 0.0 }).abs() <= tol))
}

pub fn is_zero_matrix(m: &[[f64; 3]; 3], tol: f64) -> bool {
    m.iter().flatten().all(|v| v.abs() <= tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_circuit_returns_initial_state() {
        let c = DilatedCircuit::chain(3);
        let t0 = Tableau::new(3);
        let r = run_trajectory(&c, &t0, &mut OutcomeSource::seeded(0)).unwrap();
        assert_eq!(r.final_tableau, t0);
        assert!(r.trajectory.outcomes.is_empty());
        assert_eq!(r.depth_executed, 0);
        let recs = enumerate_trajectories(&c, &t0, 4).unwrap();
        assert_eq!(recs.len(), 1);
        assert!(probabilities_sum_to_one(&recs));
        assert_eq!(averaged_bloch(&recs, 2).unwrap(), [0.0, 0.0, 1.0]);
        let m = teleport_process_matrix(&c, 1, 1, 4).unwrap();
        assert!(is_identity_matrix(&m, 0.0));
    }

    #[test]
    fn eigenstate_preparations() {
        for axis in [Pauli::X, Pauli::Y, Pauli::Z] {
            for pos in [true, false] {
                let t = pauli_eigenstate(2, 1, axis, pos).unwrap();
                let e = t.expectation(&PauliString::single(2, 1, axis).unwrap()).unwrap();
                assert_eq!(e, if pos { 1 } else { -1 });
            }
        }
    }

    #[test]
    fn branch_budget() {
        let mut c = DilatedCircuit::chain(3);
        c.push_layer((0..3).map(|q| Op::gate(CliffordGate::h(q))).collect());
        c.push_layer((0..3).map(|q| Op::measure(PauliString::single(3, q, Pauli::Z).unwrap(), q)).collect());
        assert_eq!(enumerate_trajectories(&c, &Tableau::new(3), 8).unwrap().len(), 8);
        assert!(matches!(enumerate_trajectories(&c, &Tableau::new(3), 7), Err(Error::BranchBudget(7))));
    }

    #[test]
    fn non_clifford_rejected() {
        let mut c = DilatedCircuit::chain(2);
        c.push_layer(vec![Op::gate(Gate::ch(0, 1))]);
        assert!(matches!(run_trajectory(&c, &Tableau::new(2), &mut OutcomeSource::seeded(0)), Err(Error::NonClifford(_))));
    }
}
