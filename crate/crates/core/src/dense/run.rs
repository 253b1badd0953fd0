use num_complex::Complex;

use super::{StateVector, DEFAULT_QUBIT_BUDGET};
use crate::circuit::{DilatedCircuit, Op};
use crate::dilation::Trajectory;
use crate::error::{Error, Result};
use crate::num::Real;
use crate::pauli::OutcomeSource;

/// How measurements are represented.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DenseMode {
    /// Project and renormalize; registers are classical bits.
    Trajectory,
    /// Registers are extra qubits; nothing is ever projected.
    ExplicitDilation,
}

#[derive(Clone, Copy, Debug)]
pub struct DenseOptions {
    pub qubit_budget: usize,
    pub max_branches: usize,
}

impl Default for DenseOptions {
    fn default() -> Self {
        Self { qubit_budget: DEFAULT_QUBIT_BUDGET, max_branches: 1 << 16 }
    }
}

/// Final state of one run with its outcome record.
#[derive(Clone, Debug)]
pub struct DenseRun<R: Real> {
    pub state: StateVector<R>,
    pub trajectory: Trajectory,
}

fn parity(outcomes: &[u8], regs: &[usize]) -> bool {
    regs.iter().fold(0u8, |acc, &r| acc ^ outcomes[r]) & 1 == 1
}

/// Runs `circuit` from `initial` (physical qubits only).
pub fn apply_circuit<R: Real>(
    circuit: &DilatedCircuit,
    initial: &StateVector<R>,
    mode: DenseMode,
    src: &mut OutcomeSource,
    opts: DenseOptions,
) -> Result<DenseRun<R>> {
    circuit.validate()?;
    if initial.num_qubits() != circuit.n_physical {
        return Err(Error::LengthMismatch { left: circuit.n_physical, right: initial.num_qubits() });
    }
    match mode {
        DenseMode::Trajectory => run_trajectory(circuit, initial, src),
        DenseMode::ExplicitDilation => run_dilated(circuit, initial, opts),
    }
}

fn run_trajectory<R: Real>(c: &DilatedCircuit, initial: &StateVector<R>, src: &mut OutcomeSource) -> Result<DenseRun<R>> {
    let mut s = initial.clone();
    let mut t = Trajectory::new();
    for op in c.ops() {
        match op {
            Op::Gate(g) => s.apply_gate(g, 0)?,
            Op::Measure { obs, .. } => {
                let p1 = s.prob_minus(obs)?.as_f64();
                let out = src.draw(p1)?;
                let pr = if out.bit == 1 { p1 } else { 1.0 - p1 };
                if pr <= 0.0 {
                    return Err(Error::NormCollapse);
                }
                s.project_normalized(obs, out.bit)?;
                t.push(out, pr);
            }
            Op::WeakMeasure { obs, angle, .. } => {
                let a = R::of(*angle);
                let p1 = (a.sin() * a.sin() * s.prob_minus(obs)?).as_f64();
                let out = src.draw(p1)?;
                let pr = if out.bit == 1 { p1 } else { 1.0 - p1 };
                if pr <= 0.0 {
                    return Err(Error::NormCollapse);
                }
                let mut minus = s.clone();
                minus.project(obs, 1)?;
                if out.bit == 1 {
                    let f = Complex::new(R::zero(), a.sin());
                    s = StateVector { n: s.n, amps: minus.amps.iter().map(|&m| m * f).collect() };
                } else {
                    let mut plus = s.clone();
                    plus.project(obs, 0)?;
                    let cs = a.cos();
                    for (p, m) in plus.amps.iter_mut().zip(&minus.amps) {
                        *p += *m * cs;
                    }
                    s = plus;
                }
                s.normalize()?;
                t.push(out, pr);
            }
            Op::Cond { parity: regs, gate } => {
                if parity(&t.outcomes, regs) {
                    s.apply_gate(gate, 0)?;
                }
            }
        }
    }
    Ok(DenseRun { state: s, trajectory: t })
}

fn run_dilated<R: Real>(c: &DilatedCircuit, initial: &StateVector<R>, opts: DenseOptions) -> Result<DenseRun<R>> {
    let np = c.n_physical;
    let mut s = initial.with_ancillas(c.n_registers(), opts.qubit_budget)?;
    for op in c.ops() {
        match op {
            Op::Gate(g) => s.apply_gate(g, 0)?,
            Op::Measure { obs, reg } => s.apply_measurement_unitary(obs, np + reg)?,
            Op::WeakMeasure { obs, reg, angle } => s.apply_weak_measurement(obs, np + reg, Some(R::of(*angle)))?,
            Op::Cond { parity: regs, gate } => {
                let mask = regs.iter().fold(0u64, |m, &r| m ^ (1u64 << (np + r)));
                if mask != 0 {
                    s.apply_gate(gate, mask)?;
                }
            }
        }
    }
    let t = Trajectory::new();
    Ok(DenseRun { state: s, trajectory: t })
}

/// All trajectories with nonzero probability, outcome 0 explored first.
pub fn enumerate_trajectories<R: Real>(
    circuit: &DilatedCircuit,
    initial: &StateVector<R>,
    max_branches: usize,
) -> Result<Vec<DenseRun<R>>> {
    let mut out = Vec::new();
    let mut prefix: Vec<u8> = Vec::new();
    loop {
        if out.len() == max_branches {
            return Err(Error::BranchBudget(max_branches));
        }
        let mut src = OutcomeSource::forced_random(prefix.clone());
        let run = apply_circuit(circuit, initial, DenseMode::Trajectory, &mut src, DenseOptions::default())?;
        let mut bits = run.trajectory.random_bits.clone();
        out.push(run);
        match bits.iter().rposition(|&b| b == 0) {
            Some(k) => {
                bits.truncate(k + 1);
                bits[k] = 1;
                prefix = bits;
            }
            None => break,
        }
    }
    Ok(out)
}
