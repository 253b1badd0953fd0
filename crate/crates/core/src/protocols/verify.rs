//! Task checks: process matrices for teleportation, stabilizer signs for
//! Bell and GHZ preparation, fidelity for the W state.

use num_complex::Complex;
use serde::Serialize;

use super::{w_vector, ProtocolInstance, TaskKind};
use crate::circuit::DilatedCircuit;
use crate::dense::{self, fidelity, DenseMode, DenseOptions, StateVector};
use crate::error::{Error, Result};
use crate::heisenberg::{evolve_logical, verify_logical_action, LogicalPair};
use crate::pauli::{OutcomeSource, Pauli, PauliString, Tableau};
use crate::sim_stabilizer::{self, is_identity_matrix, teleport_process_matrix};

const AXES: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    Stabilizer,
    Dense,
    Both,
}

/// Result of checking a built protocol against its task.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TaskCheck {
    pub passed: bool,
    pub backend: String,
    /// Trajectories enumerated from the all-zero input.
    pub branches: usize,
    /// One Pauli transfer matrix per lane (teleportation only).
    pub process_matrices: Vec<[[f64; 3]; 3]>,
    pub min_fidelity: Option<f64>,
    pub detail: String,
}

impl TaskCheck {
    fn new(backend: &str) -> Self {
        Self {
            passed: true,
            backend: backend.into(),
            branches: 0,
            process_matrices: Vec::new(),
            min_fidelity: None,
            detail: String::new(),
        }
    }
}

fn eigenstate<R: crate::num::Real>(n: usize, site: usize, axis: Pauli, positive: bool) -> Result<StateVector<R>> {
    let z = Complex::new(R::zero(), R::zero());
    let one = Complex::new(R::one(), R::zero());
    let s = if positive { R::one() } else { -R::one() };
    let q = match axis {
        Pauli::X => (one, Complex::new(s, R::zero())),
        Pauli::Y => (one, Complex::new(R::zero(), s)),
        Pauli::Z if positive => (one, z),
        Pauli::Z => (z, one),
        Pauli::I => return Err(Error::InvalidParams("identity has no eigenstate basis".into())),
    };
    let qubits: Vec<_> = (0..n).map(|k| if k == site { q } else { (one, z) }).collect();
    StateVector::product(&qubits)
}

/// Dense counterpart of [`teleport_process_matrix`].
pub fn dense_process_matrix(c: &DilatedCircuit, in_site: usize, out_site: usize, max_branches: usize) -> Result<[[f64; 3]; 3]> {
    let n = c.n_physical;
    let mut m = [[0.0; 3]; 3];
    for (b, axis) in AXES.into_iter().enumerate() {
        for positive in [true, false] {
            let init = eigenstate::<f64>(n, in_site, axis, positive)?;
            let sign = if positive { 0.5 } else { -0.5 };
            for run in dense::enumerate_trajectories(c, &init, max_branches)? {
                for (a, p) in AXES.into_iter().enumerate() {
                    let e = run.state.expectation(&PauliString::single(n, out_site, p)?)?;
                    m[a][b] += sign * run.trajectory.probability * e;
                }
            }
        }
    }
    Ok(m)
}

/// Outcome-averaged transfer matrices on the tableau, one per lane. Each
/// averaged entry is a convex combination of per-branch values in
/// `[-1, 1]`, so an identity average means every branch is the identity.
pub fn check_teleport_stabilizer(inst: &ProtocolInstance, max_branches: usize) -> Result<TaskCheck> {
    let c = &inst.circuit;
    let mut out = TaskCheck::new("stabilizer");
    out.branches = sim_stabilizer::enumerate_trajectories(c, &Tableau::new(c.n_physical), max_branches)?.len();
    for &(i, f) in &inst.metadata.task_sites {
        let m = teleport_process_matrix(c, i, f, max_branches)?;
        out.passed &= is_identity_matrix(&m, 1e-12);
        out.process_matrices.push(m);
    }
    Ok(out)
}

pub fn check_teleport_dense(inst: &ProtocolInstance, max_branches: usize) -> Result<TaskCheck> {
    let c = &inst.circuit;
    let mut out = TaskCheck::new("dense");
    out.branches = dense::enumerate_trajectories(c, &StateVector::<f64>::zero(c.n_physical)?, max_branches)?.len();
    for &(i, f) in &inst.metadata.task_sites {
        let m = dense_process_matrix(c, i, f, max_branches)?;
        out.passed &= is_identity_matrix(&m, 1e-10);
        out.process_matrices.push(m);
    }
    Ok(out)
}

/// Stabilizer signs expected of the prepared state.
fn expected_signs(inst: &ProtocolInstance) -> Result<Vec<(PauliString, f64)>> {
    let n = inst.circuit.n_physical;
    let (i, f) = inst.metadata.task_sites[0];
    match inst.metadata.task {
        TaskKind::BellPair => {
            let xx = if inst.metadata.params.get("flip") == Some(&1) { -1.0 } else { 1.0 };
            Ok(vec![
                (PauliString::from_sparse(n, &[(i, Pauli::X), (f, Pauli::X)])?, xx),
                (PauliString::from_sparse(n, &[(i, Pauli::Z), (f, Pauli::Z)])?, 1.0),
            ])
        }
        TaskKind::Ghz => {
            let all: Vec<usize> = (0..n).collect();
            let mut v = vec![(PauliString::uniform(n, &all, Pauli::X)?, 1.0)];
            for j in 0..n - 1 {
                v.push((PauliString::from_sparse(n, &[(j, Pauli::Z), (j + 1, Pauli::Z)])?, 1.0));
            }
            Ok(v)
        }
        k => Err(Error::InvalidParams(format!("no stabilizer description for task {k:?}"))),
    }
}

fn check_signs(inst: &ProtocolInstance, backend: Backend, max_branches: usize) -> Result<TaskCheck> {
    let c = &inst.circuit;
    let signs = expected_signs(inst)?;
    match backend {
        Backend::Stabilizer => {
            let mut out = TaskCheck::new("stabilizer");
            let recs = sim_stabilizer::enumerate_trajectories(c, &Tableau::new(c.n_physical), max_branches)?;
            out.branches = recs.len();
            for r in &recs {
                for (p, s) in &signs {
                    if r.final_tableau.expectation(p)? as f64 != *s {
                        out.passed = false;
                        out.detail = format!("{p} has sign {} in branch {:?}", r.final_tableau.expectation(p)?, r.trajectory.outcomes);
                    }
                }
            }
            Ok(out)
        }
        Backend::Dense => {
            let mut out = TaskCheck::new("dense");
            let runs = dense::enumerate_trajectories(c, &StateVector::<f64>::zero(c.n_physical)?, max_branches)?;
            out.branches = runs.len();
            for r in &runs {
                for (p, s) in &signs {
                    let e = r.state.expectation(p)?;
                    if (e - s).abs() > 1e-10 {
                        out.passed = false;
                        out.detail = format!("<{p}> = {e} in branch {:?}", r.trajectory.outcomes);
                    }
                }
            }
            Ok(out)
        }
        Backend::Both => both(check_signs(inst, Backend::Stabilizer, max_branches)?, check_signs(inst, Backend::Dense, max_branches)?),
    }
}

pub fn check_bell_pair(inst: &ProtocolInstance, backend: Backend, max_branches: usize) -> Result<TaskCheck> {
    check_signs(inst, backend, max_branches)
}

/// `X^N = +1` and `Z_j Z_{j+1} = +1` in every branch.
pub fn check_ghz(inst: &ProtocolInstance, backend: Backend, max_branches: usize) -> Result<TaskCheck> {
    check_signs(inst, backend, max_branches)
}

/// Fidelity with the W vector in every branch, at least `1 - 1e-10`.
pub fn check_w_dense(inst: &ProtocolInstance, max_branches: usize) -> Result<TaskCheck> {
    let c = &inst.circuit;
    let start = StateVector::<f64>::zero(c.n_physical)?;
    let target = w_vector::<f64>(c.n_physical)?;
    let mut out = TaskCheck::new("dense");
    let runs = dense::enumerate_trajectories(c, &start, max_branches)?;
    out.branches = runs.len();
    let mut worst = 1.0f64;
    for r in &runs {
        worst = worst.min(fidelity(&r.state, &target)?);
    }
    out.min_fidelity = Some(worst);
    out.passed = worst >= 1.0 - 1e-10;
    Ok(out)
}

fn both(s: TaskCheck, d: TaskCheck) -> Result<TaskCheck> {
    let mut out = TaskCheck::new("both");
    let agree = s.branches == d.branches
        && s.process_matrices.len() == d.process_matrices.len()
        && s.process_matrices.iter().zip(&d.process_matrices).all(|(a, b)| {
            a.iter().flatten().zip(b.iter().flatten()).all(|(x, y)| (x - y).abs() <= 1e-10)
        });
    out.passed = s.passed && d.passed && agree;
    out.branches = s.branches;
    out.process_matrices = s.process_matrices;
    out.detail = if agree { d.detail } else { "stabilizer and dense backends disagree".into() };
    Ok(out)
}

/// Runs the task check appropriate to the instance.
pub fn check_task(inst: &ProtocolInstance, backend: Backend, max_branches: usize) -> Result<TaskCheck> {
    match inst.metadata.task {
        TaskKind::Teleport => match backend {
            Backend::Stabilizer => check_teleport_stabilizer(inst, max_branches),
            Backend::Dense => check_teleport_dense(inst, max_branches),
            Backend::Both => both(check_teleport_stabilizer(inst, max_branches)?, check_teleport_dense(inst, max_branches)?),
        },
        TaskKind::BellPair | TaskKind::Ghz => check_signs(inst, backend, max_branches),
        TaskKind::WState => check_w_dense(inst, max_branches),
    }
}

/// Transfer matrix of one branch: `run(axis, positive)` yields `<P_a>` at
/// the output for every `a`.
fn branch_matrix(mut run: impl FnMut(Pauli, bool) -> Result<[f64; 3]>) -> Result<[[f64; 3]; 3]> {
    let mut m = [[0.0; 3]; 3];
    for (b, axis) in AXES.into_iter().enumerate() {
        let (plus, minus) = (run(axis, true)?, run(axis, false)?);
        for a in 0..3 {
            m[a][b] = 0.5 * (plus[a] - minus[a]);
        }
    }
    Ok(m)
}

fn sampled_stabilizer(inst: &ProtocolInstance, seed: u64) -> Result<(TaskCheck, Vec<u8>)> {
    let c = &inst.circuit;
    let n = c.n_physical;
    let rec = sim_stabilizer::run_trajectory(c, &Tableau::new(n), &mut OutcomeSource::seeded(seed))?;
    let mut out = TaskCheck::new("stabilizer");
    out.branches = 1;
    match inst.metadata.task {
        TaskKind::Teleport => {
            let bits = &rec.trajectory.random_bits;
            for &(i, f) in &inst.metadata.task_sites {
                let m = branch_matrix(|axis, positive| {
                    let init = sim_stabilizer::pauli_eigenstate(n, i, axis, positive)?;
                    let r = sim_stabilizer::run_trajectory(c, &init, &mut OutcomeSource::forced_random(bits.clone()))?;
                    let mut e = [0.0; 3];
                    for (a, p) in AXES.into_iter().enumerate() {
                        e[a] = r.final_tableau.expectation(&PauliString::single(n, f, p)?)? as f64;
                    }
                    Ok(e)
                })?;
                out.passed &= is_identity_matrix(&m, 1e-12);
                out.process_matrices.push(m);
            }
        }
        TaskKind::BellPair | TaskKind::Ghz => {
            for (p, sign) in expected_signs(inst)? {
                let e = rec.final_tableau.expectation(&p)?;
                if e as f64 != sign {
                    out.passed = false;
                    out.detail = format!("{p} has sign {e}");
                }
            }
        }
        TaskKind::WState => return Err(Error::NonClifford("W-state preparation".into())),
    }
    Ok((out, rec.trajectory.outcomes))
}

fn sampled_dense(inst: &ProtocolInstance, seed: u64) -> Result<(TaskCheck, Vec<u8>)> {
    let c = &inst.circuit;
    let n = c.n_physical;
    let traj = |init: &StateVector<f64>, src: &mut OutcomeSource| {
        dense::apply_circuit(c, init, DenseMode::Trajectory, src, DenseOptions::default())
    };
    let run = traj(&StateVector::zero(n)?, &mut OutcomeSource::seeded(seed))?;
    let mut out = TaskCheck::new("dense");
    out.branches = 1;
    match inst.metadata.task {
        TaskKind::Teleport => {
            let bits = &run.trajectory.random_bits;
            for &(i, f) in &inst.metadata.task_sites {
                let m = branch_matrix(|axis, positive| {
                    let r = traj(&eigenstate(n, i, axis, positive)?, &mut OutcomeSource::forced_random(bits.clone()))?;
                    let mut e = [0.0; 3];
                    for (a, p) in AXES.into_iter().enumerate() {
                        e[a] = r.state.expectation(&PauliString::single(n, f, p)?)?;
                    }
                    Ok(e)
                })?;
                out.passed &= is_identity_matrix(&m, 1e-10);
                out.process_matrices.push(m);
            }
        }
        TaskKind::BellPair | TaskKind::Ghz => {
            for (p, sign) in expected_signs(inst)? {
                let e = run.state.expectation(&p)?;
                if (e - sign).abs() > 1e-10 {
                    out.passed = false;
                    out.detail = format!("<{p}> = {e}");
                }
            }
        }
        TaskKind::WState => {
            let f = fidelity(&run.state, &w_vector::<f64>(n)?)?;
            out.min_fidelity = Some(f);
            out.passed = f >= 1.0 - 1e-10;
        }
    }
    Ok((out, run.trajectory.outcomes))
}

/// Task check on the single trajectory drawn with `seed`, returned with its
/// outcomes. Teleportation replays the drawn bits from every input
/// eigenstate to get that branch's transfer matrix.
pub fn check_sampled(inst: &ProtocolInstance, backend: Backend, seed: u64) -> Result<(TaskCheck, Vec<u8>)> {
    let backend = if inst.metadata.task == TaskKind::WState { Backend::Dense } else { backend };
    match backend {
        Backend::Stabilizer => sampled_stabilizer(inst, seed),
        Backend::Dense => sampled_dense(inst, seed),
        Backend::Both => {
            let (s, outcomes) = sampled_stabilizer(inst, seed)?;
            let (d, dense_outcomes) = sampled_dense(inst, seed)?;
            let mut out = both(s, d)?;
            if outcomes != dense_outcomes {
                out.passed = false;
                out.detail = "backends drew different outcomes".into();
            }
            Ok((out, outcomes))
        }
    }
}

/// Task check on the explicitly dilated state: registers are kept as
/// qubits, so every quantity is already averaged over outcomes.
pub fn check_dilated(inst: &ProtocolInstance, opts: DenseOptions) -> Result<TaskCheck> {
    let c = &inst.circuit;
    let n = c.n_physical;
    let total = n + c.n_registers();
    let run = |init: &StateVector<f64>| {
        dense::apply_circuit(c, init, DenseMode::ExplicitDilation, &mut OutcomeSource::seeded(0), opts).map(|r| r.state)
    };
    let mut out = TaskCheck::new("dense");
    out.detail = "explicit dilation".into();
    match inst.metadata.task {
        TaskKind::Teleport => {
            for &(i, f) in &inst.metadata.task_sites {
                let m = branch_matrix(|axis, positive| {
                    let s = run(&eigenstate(n, i, axis, positive)?)?;
                    let mut e = [0.0; 3];
                    for (a, p) in AXES.into_iter().enumerate() {
                        e[a] = s.expectation(&PauliString::single(total, f, p)?)?;
                    }
                    Ok(e)
                })?;
                out.passed &= is_identity_matrix(&m, 1e-10);
                out.process_matrices.push(m);
            }
        }
        TaskKind::BellPair | TaskKind::Ghz => {
            let s = run(&StateVector::zero(n)?)?;
            for (p, sign) in expected_signs(inst)? {
                let e = s.expectation(&p.extended(total))?;
                if (e - sign).abs() > 1e-10 {
                    out.passed = false;
                    out.detail = format!("<{p}> = {e}");
                }
            }
        }
        TaskKind::WState => {
            let f = fidelity(&run(&StateVector::zero(n)?)?, &w_vector::<f64>(n)?)?;
            out.min_fidelity = Some(f);
            out.passed = f >= 1.0 - 1e-10;
        }
    }
    Ok(out)
}

/// Heisenberg-picture verdict: every lane's final logical pair pulls back
/// to the initial site dressed only by stabilizers of `|0...0>`.
pub fn heisenberg_verdict(inst: &ProtocolInstance) -> bool {
    let n = inst.circuit.n_physical;
    let init = Tableau::new(n);
    inst.metadata.task_sites.iter().all(|&(i, f)| {
        LogicalPair::at_site(n, f)
            .and_then(|p| evolve_logical(&inst.circuit, &p))
            .is_ok_and(|back| verify_logical_action(&init, &back, i))
    })
}
