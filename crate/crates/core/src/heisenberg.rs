//! Backward (Heisenberg-picture) evolution of logical Pauli operators through
//! dilated Clifford circuits.
//!
//! Operators are carried on the dilated space while walking back through
//! feedback, measurements and gates; the register factors are evaluated in
//! the default state `|0>` only at the very end.

use serde::{Deserialize, Serialize};

use crate::circuit::{DilatedCircuit, Gate, Geometry, Op};
use crate::dilation::{
    conjugate_pauli_through_measurement, conjugate_through_conditioned, measurement_unitary, ConditionedGate,
    DilatedIndexMap, MeasurementOp,
};
use crate::error::{Error, Result};
use crate::pauli::{conjugate_by_clifford, Pauli, PauliString, Tableau};

/// Logical X and Z of one encoded qubit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogicalPair {
    pub x_logical: PauliString,
    pub z_logical: PauliString,
}

impl LogicalPair {
    /// `(X_site, Z_site)` on `n` qubits.
    pub fn at_site(n: usize, site: usize) -> Result<Self> {
        Ok(Self { x_logical: PauliString::single(n, site, Pauli::X)?, z_logical: PauliString::single(n, site, Pauli::Z)? })
    }

    pub fn anticommutes(&self) -> Result<bool> {
        Ok(!self.x_logical.commutes(&self.z_logical)?)
    }
}

/// Support interval (1-based sites) of the evolving logicals after walking
/// back through one layer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerSupport {
    /// Index of the layer just conjugated through (0-based, in time order).
    pub layer: usize,
    pub x_support: Option<(usize, usize)>,
    pub z_support: Option<(usize, usize)>,
    /// Whether the layer contains measurements or conditioned gates.
    pub event: bool,
    pub two_site: bool,
}

/// Per-layer supports, from the final time back to the start.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LightconeReport {
    pub n_physical: usize,
    pub final_x: String,
    pub final_z: String,
    pub layers: Vec<LayerSupport>,
}

fn physical_interval(p: &PauliString, n_physical: usize) -> Option<(usize, usize)> {
    let s: Vec<usize> = p.support().into_iter().filter(|&q| q < n_physical).collect();
    Some((*s.first()? + 1, *s.last()? + 1))
}

fn step(a: &PauliString, op: &Op, map: &DilatedIndexMap) -> Result<PauliString> {
    match op {
        Op::Gate(Gate::Clifford(g)) => conjugate_by_clifford(a, g),
        Op::Gate(g) => Err(Error::NonClifford(g.name().to_string())),
        Op::Measure { obs, reg } => {
            let u = measurement_unitary(&MeasurementOp { observable: obs.clone(), register: *reg }, map)?;
            conjugate_pauli_through_measurement(a, &u)
        }
        Op::WeakMeasure { .. } => Err(Error::NonClifford("weak measurement".into())),
        Op::Cond { parity, gate } => {
            let c = ConditionedGate { parity: parity.clone(), gate: gate.clone() };
            conjugate_through_conditioned(a, &c, map.n_physical)?.as_pauli().ok_or(Error::MixedCommutation)
        }
    }
}

/// Replaces register `Z` factors by their `|0>` value and rejects `X`/`Y`.
fn evaluate_registers(a: &PauliString, n_physical: usize) -> Result<PauliString> {
    for q in a.support() {
        if q < n_physical {
            continue;
        }
        match a.get(q) {
            Pauli::X => return Err(Error::ResidualStinespring('X', q - n_physical)),
            Pauli::Y => return Err(Error::ResidualStinespring('Y', q - n_physical)),
            _ => {}
        }
    }
    Ok(a.truncated_letters(n_physical))
}

/// Pulls a final-time logical pair back to `t = 0`.
pub fn evolve_logical(c: &DilatedCircuit, pair: &LogicalPair) -> Result<LogicalPair> {
    evolve_logical_traced(c, pair).map(|(p, _)| p)
}

/// As [`evolve_logical`], also recording the per-layer support intervals.
pub fn evolve_logical_traced(c: &DilatedCircuit, pair: &LogicalPair) -> Result<(LogicalPair, LightconeReport)> {
    let np = c.n_physical;
    for p in [&pair.x_logical, &pair.z_logical] {
        if p.num_qubits() != np {
            return Err(Error::LengthMismatch { left: np, right: p.num_qubits() });
        }
    }
    let map = DilatedIndexMap::from_circuit(c);
    let nd = map.n_dilated();
    let mut x = pair.x_logical.extended(nd);
    let mut z = pair.z_logical.extended(nd);
    let mut layers = Vec::with_capacity(c.layers.len());
    for (li, layer) in c.layers.iter().enumerate().rev() {
        for op in layer.iter().rev() {
            x = step(&x, op, &map)?;
            z = step(&z, op, &map)?;
        }
        layers.push(LayerSupport {
            layer: li,
            x_support: physical_interval(&x, np),
            z_support: physical_interval(&z, np),
            event: layer.iter().any(|o| !matches!(o, Op::Gate(_))),
            two_site: layer.iter().any(Op::is_two_site_gate),
        });
    }
    let out = LogicalPair { x_logical: evaluate_registers(&x, np)?, z_logical: evaluate_registers(&z, np)? };
    let report = LightconeReport {
        n_physical: np,
        final_x: pair.x_logical.to_string(),
        final_z: pair.z_logical.to_string(),
        layers,
    };
    Ok((out, report))
}

/// Largest-coordinate site (column first, then row) where the single-site
/// factors of the pair anticommute.
pub fn anticommutation_front(pair: &LogicalPair, geometry: &Geometry) -> Result<usize> {
    let (x, z) = (&pair.x_logical, &pair.z_logical);
    if x.num_qubits() != z.num_qubits() {
        return Err(Error::LengthMismatch { left: x.num_qubits(), right: z.num_qubits() });
    }
    let mut best: Option<((usize, usize), usize)> = None;
    for q in x.support() {
        let (a, b) = (x.get(q), z.get(q));
        if b == Pauli::I || a == b {
            continue;
        }
        let (r, col) = geometry.coord(q)?;
        if best.is_none_or(|(k, _)| (col, r) > k) {
            best = Some(((col, r), q));
        }
    }
    best.map(|(_, q)| q).ok_or(Error::CommutingPair)
}

/// True iff `X_L(T) = X_site s1` and `Z_L(T) = Z_site s2` with `s1`, `s2`
/// in the stabilizer group of `initial` (sign `+1`) and trivial at `site`.
pub fn verify_logical_action(initial: &Tableau, pair: &LogicalPair, site: usize) -> bool {
    let n = initial.num_qubits();
    let check = |lg: &PauliString, p: Pauli| -> Result<bool> {
        let local = PauliString::single(n, site, p)?;
        let (s, imag) = local.product(lg)?;
        Ok(imag == 0 && s.get(site) == Pauli::I && initial.stabilizes(&s)?)
    };
    matches!(check(&pair.x_logical, Pauli::X), Ok(true)) && matches!(check(&pair.z_logical, Pauli::Z), Ok(true))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::CliffordGate;

    fn p(s: &str, n: usize) -> PauliString {
        PauliString::parse(s, n).unwrap()
    }

    #[test]
    fn empty_circuit_keeps_pair() {
        let c = DilatedCircuit::chain(3);
        let pair = LogicalPair::at_site(3, 2).unwrap();
        assert_eq!(evolve_logical(&c, &pair).unwrap(), pair);
        assert!(verify_logical_action(&Tableau::new(3), &pair, 2));
        assert_eq!(anticommutation_front(&pair, &c.geometry).unwrap(), 2);
    }

    #[test]
    fn fronts() {
        let g = Geometry::Chain { n: 3 };
        let pair = LogicalPair { x_logical: p("X1*X2", 3), z_logical: p("Z2", 3) };
        assert_eq!(anticommutation_front(&pair, &g).unwrap(), 1);
        let commuting = LogicalPair { x_logical: p("X1", 3), z_logical: p("X2", 3) };
        assert_eq!(anticommutation_front(&commuting, &g), Err(Error::CommutingPair));
    }

    #[test]
    fn swap_moves_logical() {
        let mut c = DilatedCircuit::chain(2);
        c.push_layer(vec![Op::gate(CliffordGate::swap(0, 1))]);
        let out = evolve_logical(&c, &LogicalPair::at_site(2, 1).unwrap()).unwrap();
        assert_eq!(out, LogicalPair::at_site(2, 0).unwrap());
        assert!(verify_logical_action(&Tableau::new(2), &out, 0));
        assert!(!verify_logical_action(&Tableau::new(2), &out, 1));
    }

    #[test]
    fn unconditioned_measurement_leaves_residual_register() {
        // measuring Z then asking for X: the register picks up an X factor
        let mut c = DilatedCircuit::chain(1);
        c.push_layer(vec![Op::measure(p("Z1", 1), 0)]);
        let r = evolve_logical(&c, &LogicalPair::at_site(1, 0).unwrap());
        assert_eq!(r, Err(Error::ResidualStinespring('X', 0)));
    }
}
