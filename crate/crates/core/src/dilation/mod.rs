//! Stinespring-dilated measurement and feedback channels.
//!
//! A dilated operator lives on `n_physical + n_registers` qubits; register
//! `r` is qubit `n_physical + r`. Measurements become the Hermitian unitary
//! `U = P+ (x) I + P- (x) X` on their register, and parity-conditioned gates
//! become gates controlled on the register parity.

mod conditioned;
mod measure;
mod projector;
mod regions;
mod sum;

pub use conditioned::{conjugate_through_conditioned, ConditionedGate};
pub use measure::{
    conjugate_pauli_through_measurement, conjugate_through_measurement, measurement_unitary,
    weak_measurement_unitary, MeasurementOp, MeasurementUnitary, WeakMeasurementOp,
};
pub use projector::{trajectory_probability, trajectory_projector, TrajectoryProjector};
pub use regions::{count_regions_outcomes, effective_supports, RegionCount};
pub use sum::PauliSum;

use crate::circuit::{DilatedCircuit, Op};
use crate::error::{Error, Result};
use crate::pauli::MeasureOutcome;

/// One assignment of outcomes to registers, in allocation order.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub outcomes: Vec<u8>,
    pub probability: f64,
    /// Number of outcomes that were drawn rather than determined.
    pub random_draws: usize,
    /// The drawn bits, in order.
    pub random_bits: Vec<u8>,
}

impl Default for Trajectory {
    fn default() -> Self {
        Self::new()
    }
}

impl Trajectory {
    pub fn new() -> Self {
        Self { outcomes: Vec::new(), probability: 1.0, random_draws: 0, random_bits: Vec::new() }
    }

    pub(crate) fn push(&mut self, out: MeasureOutcome, prob: f64) {
        self.outcomes.push(out.bit);
        self.probability *= prob;
        if !out.deterministic {
            self.random_draws += 1;
            self.random_bits.push(out.bit);
        }
    }

    /// XOR of the listed registers.
    pub fn parity(&self, regs: &[usize]) -> Result<u8> {
        regs.iter().try_fold(0u8, |acc, &r| {
            self.outcomes
                .get(r)
                .map(|b| acc ^ b)
                .ok_or(Error::UnallocatedRegister { register: r, allocated: self.outcomes.len() })
        })
    }
}

/// Where each measurement's outcome register sits in the dilated space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DilatedIndexMap {
    pub n_physical: usize,
    /// Register of the k-th measurement (in op order).
    pub register_of_measurement: Vec<usize>,
}

impl DilatedIndexMap {
    pub fn from_circuit(c: &DilatedCircuit) -> Self {
        let register_of_measurement = c.ops().filter_map(Op::register).collect();
        Self { n_physical: c.n_physical, register_of_measurement }
    }

    pub fn n_stinespring(&self) -> usize {
        self.register_of_measurement.len()
    }

    pub fn n_dilated(&self) -> usize {
        self.n_physical + self.n_stinespring()
    }

    /// Dilated qubit index of register `r`.
    pub fn qubit_of_register(&self, r: usize) -> Result<usize> {
        if r >= self.n_stinespring() {
            return Err(Error::UnallocatedRegister { register: r, allocated: self.n_stinespring() });
        }
        Ok(self.n_physical + r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{CliffordGate, PauliString};

    #[test]
    fn registers_follow_declaration_order() {
        let mut c = DilatedCircuit::chain(2);
        c.push_layer(vec![Op::gate(CliffordGate::h(0))]);
        c.push_layer(vec![
            Op::measure(PauliString::parse("Z1", 2).unwrap(), 0),
            Op::measure(PauliString::parse("X2", 2).unwrap(), 1),
        ]);
        let m = DilatedIndexMap::from_circuit(&c);
        assert_eq!(m.register_of_measurement, vec![0, 1]);
        assert_eq!(m.n_dilated(), 4);
        assert_eq!(m.qubit_of_register(1).unwrap(), 3);
        assert!(m.qubit_of_register(2).is_err());
    }

    #[test]
    fn parity_of_trajectory() {
        let t = Trajectory { outcomes: vec![1, 0, 1], ..Trajectory::new() };
        assert_eq!(t.parity(&[0, 2]).unwrap(), 0);
        assert_eq!(t.parity(&[0, 1]).unwrap(), 1);
        assert!(t.parity(&[3]).is_err());
    }
}
