//! Layered circuits over physical qubits plus Stinespring outcome registers,
//! and their JSON form.
//!
//! Ops run in list order; layers only group ops for depth counting. Physical
//! qubits are 0-based in memory and 1-based in JSON, registers are 0-based
//! in both.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{CliffordGate, CliffordKind, PauliRecord, PauliString};

/// Site layout used for distances and region spacing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Geometry {
    Chain { n: usize },
    /// Row-major: site `r * cols + c`.
    Grid { rows: usize, cols: usize },
}

impl Geometry {
    pub fn n_sites(&self) -> usize {
        match *self {
            Geometry::Chain { n } => n,
            Geometry::Grid { rows, cols } => rows * cols,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Geometry::Chain { .. } => 1,
            Geometry::Grid { .. } => 2,
        }
    }

    /// `(row, column)`; chains have a single row.
    pub fn coord(&self, site: usize) -> Result<(usize, usize)> {
        if site >= self.n_sites() {
            return Err(Error::SiteOutsideGeometry { site, n: self.n_sites() });
        }
        Ok(match *self {
            Geometry::Chain { .. } => (0, site),
            Geometry::Grid { cols, .. } => (site / cols, site % cols),
        })
    }

    /// Manhattan distance.
    pub fn distance(&self, a: usize, b: usize) -> Result<usize> {
        let (ra, ca) = self.coord(a)?;
        let (rb, cb) = self.coord(b)?;
        Ok(ra.abs_diff(rb) + ca.abs_diff(cb))
    }

    fn to_record(self) -> GeometryRecord {
        match self {
            Geometry::Chain { n } => GeometryRecord { kind: "chain".into(), dims: vec![n] },
            Geometry::Grid { rows, cols } => GeometryRecord { kind: "grid".into(), dims: vec![rows, cols] },
        }
    }

    fn from_record(r: &GeometryRecord) -> Result<Self> {
        match (r.kind.as_str(), r.dims.as_slice()) {
            ("chain", [n]) => Ok(Geometry::Chain { n: *n }),
            ("grid", [rows, cols]) => Ok(Geometry::Grid { rows: *rows, cols: *cols }),
            _ => Err(Error::Serde(format!("bad geometry {} {:?}", r.kind, r.dims))),
        }
    }
}

/// Non-Clifford unitaries available to the dense backend.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NamedKind {
    /// Controlled Hadamard; first target is the control.
    Ch,
}

impl NamedKind {
    pub fn name(self) -> &'static str {
        match self {
            NamedKind::Ch => "CH",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            NamedKind::Ch => 2,
        }
    }
}

/// A unitary gate on physical qubits.
#[derive(Clone, Debug, PartialEq)]
pub enum Gate {
    Clifford(CliffordGate),
    Named { kind: NamedKind, targets: Vec<usize> },
}

impl Gate {
    pub fn ch(control: usize, target: usize) -> Self {
        Gate::Named { kind: NamedKind::Ch, targets: vec![control, target] }
    }

    pub fn targets(&self) -> &[usize] {
        match self {
            Gate::Clifford(g) => &g.targets,
            Gate::Named { targets, .. } => targets,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Gate::Clifford(g) => g.kind.name(),
            Gate::Named { kind, .. } => kind.name(),
        }
    }

    pub fn is_two_site(&self) -> bool {
        self.targets().len() == 2
    }

    pub fn as_clifford(&self) -> Option<&CliffordGate> {
        match self {
            Gate::Clifford(g) => Some(g),
            Gate::Named { .. } => None,
        }
    }

    /// Same gate with every target `q` moved to `f(q)`.
    pub fn relabeled(&self, f: impl Fn(usize) -> usize) -> Self {
        match self {
            Gate::Clifford(g) => {
                Gate::Clifford(CliffordGate { kind: g.kind, targets: g.targets.iter().map(|&q| f(q)).collect() })
            }
            Gate::Named { kind, targets } => Gate::Named { kind: *kind, targets: targets.iter().map(|&q| f(q)).collect() },
        }
    }

    fn parse(name: &str, targets: Vec<usize>) -> Result<Self> {
        if name.eq_ignore_ascii_case("CH") {
            if targets.len() != 2 || targets[0] == targets[1] {
                return Err(Error::InvalidGate(format!("CH needs two distinct targets, got {targets:?}")));
            }
            return Ok(Gate::Named { kind: NamedKind::Ch, targets });
        }
        let kind = CliffordKind::from_str(name)?;
        Ok(Gate::Clifford(CliffordGate::new(kind, &targets)?))
    }
}

impl From<CliffordGate> for Gate {
    fn from(g: CliffordGate) -> Self {
        Gate::Clifford(g)
    }
}

/// One circuit operation.
#[derive(Clone, Debug, PartialEq)]
pub enum Op {
    Gate(Gate),
    /// Projective measurement of a physical Pauli into register `reg`.
    Measure { obs: PauliString, reg: usize },
    /// Weak measurement with coupling angle in `[0, pi/2]` (dense only).
    WeakMeasure { obs: PauliString, reg: usize, angle: f64 },
    /// `gate` applied iff the XOR of the listed registers is 1.
    Cond { parity: Vec<usize>, gate: Gate },
}

impl Op {
    pub fn gate(g: impl Into<Gate>) -> Self {
        Op::Gate(g.into())
    }

    pub fn measure(obs: PauliString, reg: usize) -> Self {
        Op::Measure { obs, reg }
    }

    pub fn cond(parity: Vec<usize>, g: impl Into<Gate>) -> Self {
        Op::Cond { parity, gate: g.into() }
    }

    /// Physical qubits touched.
    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Op::Gate(g) | Op::Cond { gate: g, .. } => g.targets().to_vec(),
            Op::Measure { obs, .. } | Op::WeakMeasure { obs, .. } => obs.support(),
        }
    }

    pub fn is_two_site_gate(&self) -> bool {
        match self {
            Op::Gate(g) | Op::Cond { gate: g, .. } => g.is_two_site(),
            _ => false,
        }
    }

    /// Moves qubits by `qf` onto `n` physical qubits and registers by `rf`.
    pub fn relabeled(&self, n: usize, qf: impl Fn(usize) -> usize, rf: impl Fn(usize) -> usize) -> Result<Self> {
        Ok(match self {
            Op::Gate(g) => Op::Gate(g.relabeled(qf)),
            Op::Measure { obs, reg } => Op::Measure { obs: obs.relabeled(n, qf)?, reg: rf(*reg) },
            Op::WeakMeasure { obs, reg, angle } => {
                Op::WeakMeasure { obs: obs.relabeled(n, qf)?, reg: rf(*reg), angle: *angle }
            }
            Op::Cond { parity, gate } => {
                Op::Cond { parity: parity.iter().map(|&r| rf(r)).collect(), gate: gate.relabeled(qf) }
            }
        })
    }

    pub fn register(&self) -> Option<usize> {
        match self {
            Op::Measure { reg, .. } | Op::WeakMeasure { reg, .. } => Some(*reg),
            _ => None,
        }
    }
}

/// A layered measurement-and-feedback circuit.
#[derive(Clone, Debug, PartialEq)]
pub struct DilatedCircuit {
    pub n_physical: usize,
    pub geometry: Geometry,
    pub layers: Vec<Vec<Op>>,
}

impl DilatedCircuit {
    pub fn new(n_physical: usize, geometry: Geometry) -> Self {
        Self { n_physical, geometry, layers: Vec::new() }
    }

    pub fn chain(n: usize) -> Self {
        Self::new(n, Geometry::Chain { n })
    }

    pub fn push_layer(&mut self, layer: Vec<Op>) {
        self.layers.push(layer);
    }

    pub fn ops(&self) -> impl DoubleEndedIterator<Item = &Op> + '_ {
        self.layers.iter().flatten()
    }

    /// Number of Stinespring registers (one per measurement).
    pub fn n_registers(&self) -> usize {
        self.ops().filter(|o| o.register().is_some()).count()
    }

    /// Physical qubits plus registers.
    pub fn n_dilated(&self) -> usize {
        self.n_physical + self.n_registers()
    }

    /// Layers containing at least one two-site gate, conditioned or not.
    pub fn depth(&self) -> usize {
        self.layers.iter().filter(|l| l.iter().any(Op::is_two_site_gate)).count()
    }

    /// True if every gate, conditioned gate and measurement is stabilizer-simulable.
    pub fn is_clifford(&self) -> bool {
        self.ops().all(|o| match o {
            Op::Gate(g) | Op::Cond { gate: g, .. } => g.as_clifford().is_some(),
            Op::Measure { .. } => true,
            Op::WeakMeasure { .. } => false,
        })
    }

    /// Registers read by any conditioned gate.
    pub fn feedback_registers(&self) -> BTreeSet<usize> {
        self.ops()
            .filter_map(|o| match o {
                Op::Cond { parity, .. } => Some(parity.iter().copied()),
                _ => None,
            })
            .flatten()
            .collect()
    }

    /// Copy with every conditioned gate removed (empty layers are kept so the
    /// depth of the unconditioned part is unchanged).
    pub fn without_feedback(&self) -> Self {
        let layers = self
            .layers
            .iter()
            .map(|l| l.iter().filter(|o| !matches!(o, Op::Cond { .. })).cloned().collect())
            .collect();
        Self { layers, ..self.clone() }
    }

    /// Checks qubit ranges, geometry size, register order and references, and
    /// that two-site gates within a layer are disjoint.
    pub fn validate(&self) -> Result<()> {
        if self.geometry.n_sites() != self.n_physical {
            return Err(Error::InvalidCircuit(format!(
                "geometry has {} sites but circuit has {} physical qubits",
                self.geometry.n_sites(),
                self.n_physical
            )));
        }
        let mut next_reg = 0usize;
        for (li, layer) in self.layers.iter().enumerate() {
            let mut busy = BTreeSet::new();
            for op in layer {
                for q in op.qubits() {
                    if q >= self.n_physical {
                        return Err(Error::OutOfRange { index: q, n: self.n_physical });
                    }
                }
                match op {
                    Op::Measure { obs, reg } | Op::WeakMeasure { obs, reg, .. } => {
                        if obs.num_qubits() != self.n_physical {
                            return Err(Error::LengthMismatch { left: self.n_physical, right: obs.num_qubits() });
                        }
                        if obs.is_identity() {
                            return Err(Error::InvalidCircuit(format!("identity measurement in layer {li}")));
                        }
                        if *reg != next_reg {
                            return Err(Error::InvalidCircuit(format!(
                                "register {reg} declared out of order (expected {next_reg})"
                            )));
                        }
                        if let Op::WeakMeasure { angle, .. } = op {
                            if !(0.0..=std::f64::consts::FRAC_PI_2).contains(angle) {
                                return Err(Error::AngleOutOfRange(*angle));
                            }
                        }
                        next_reg += 1;
                    }
                    Op::Cond { parity, .. } => {
                        if parity.is_empty() {
                            return Err(Error::InvalidCircuit("conditioned gate with empty parity set".into()));
                        }
                        if let Some(&r) = parity.iter().find(|&&r| r >= next_reg) {
                            return Err(Error::UnallocatedRegister { register: r, allocated: next_reg });
                        }
                    }
                    Op::Gate(_) => {}
                }
                if op.is_two_site_gate() {
                    for q in op.qubits() {
                        if !busy.insert(q) {
                            return Err(Error::InvalidCircuit(format!(
                                "two-site gates overlap on qubit {} in layer {li}",
                                q + 1
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn to_record(&self) -> CircuitRecord {
        CircuitRecord {
            n_physical: self.n_physical,
            geometry: self.geometry.to_record(),
            ops: self.layers.iter().map(|l| l.iter().map(op_to_record).collect()).collect(),
        }
    }

    pub fn from_record(r: &CircuitRecord) -> Result<Self> {
        let n = r.n_physical;
        let mut c = Self::new(n, Geometry::from_record(&r.geometry)?);
        for layer in &r.ops {
            c.layers.push(layer.iter().map(|o| op_from_record(o, n)).collect::<Result<_>>()?);
        }
        c.validate()?;
        Ok(c)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_record()).expect("circuit record serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_record(&serde_json::from_str(text)?)
    }
}

impl fmt::Display for DilatedCircuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.layers.iter().enumerate() {
            write!(f, "{i:>3}:")?;
            for op in l {
                match op {
                    Op::Gate(g) => write!(f, " {}{:?}", g.name(), g.targets().iter().map(|q| q + 1).collect::<Vec<_>>())?,
                    Op::Measure { obs, reg } => write!(f, " M[{obs}->r{reg}]")?,
                    Op::WeakMeasure { obs, reg, angle } => write!(f, " W[{obs}->r{reg},{angle}]")?,
                    Op::Cond { parity, gate } => write!(
                        f,
                        " if{parity:?}:{}{:?}",
                        gate.name(),
                        gate.targets().iter().map(|q| q + 1).collect::<Vec<_>>()
                    )?,
                }
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeometryRecord {
    pub kind: String,
    pub dims: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateRecord {
    pub name: String,
    pub targets: Vec<usize>,
}

/// Observable as text (`"+Z4*Z5"`) or as a bit-vector record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ObsRecord {
    Text(String),
    Bits(PauliRecord),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum OpRecord {
    Gate {
        name: String,
        targets: Vec<usize>,
    },
    Measure {
        obs: ObsRecord,
        reg: usize,
    },
    WeakMeasure {
        obs: ObsRecord,
        reg: usize,
        angle: f64,
    },
    Cond {
        parity: Vec<usize>,
        gate: GateRecord,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircuitRecord {
    pub n_physical: usize,
    pub geometry: GeometryRecord,
    pub ops: Vec<Vec<OpRecord>>,
}

fn gate_to_record(g: &Gate) -> GateRecord {
    GateRecord { name: g.name().to_string(), targets: g.targets().iter().map(|q| q + 1).collect() }
}

fn gate_from_record(g: &GateRecord) -> Result<Gate> {
    if g.targets.contains(&0) {
        return Err(Error::Serde("qubit indices in circuit JSON are 1-based".into()));
    }
    Gate::parse(&g.name, g.targets.iter().map(|q| q - 1).collect())
}

fn op_to_record(op: &Op) -> OpRecord {
    match op {
        Op::Gate(g) => {
            let r = gate_to_record(g);
            OpRecord::Gate { name: r.name, targets: r.targets }
        }
        Op::Measure { obs, reg } => OpRecord::Measure { obs: ObsRecord::Text(obs.to_string()), reg: *reg },
        Op::WeakMeasure { obs, reg, angle } => {
            OpRecord::WeakMeasure { obs: ObsRecord::Text(obs.to_string()), reg: *reg, angle: *angle }
        }
        Op::Cond { parity, gate } => OpRecord::Cond { parity: parity.clone(), gate: gate_to_record(gate) },
    }
}

fn obs_from_record(o: &ObsRecord, n: usize) -> Result<PauliString> {
    match o {
        ObsRecord::Text(t) => PauliString::parse(t, n),
        ObsRecord::Bits(r) => {
            if r.n != n {
                return Err(Error::LengthMismatch { left: n, right: r.n });
            }
            PauliString::from_record(r)
        }
    }
}

fn op_from_record(o: &OpRecord, n: usize) -> Result<Op> {
    Ok(match o {
        OpRecord::Gate { name, targets } => {
            Op::Gate(gate_from_record(&GateRecord { name: name.clone(), targets: targets.clone() })?)
        }
        OpRecord::Measure { obs, reg } => Op::Measure { obs: obs_from_record(obs, n)?, reg: *reg },
        OpRecord::WeakMeasure { obs, reg, angle } => {
            Op::WeakMeasure { obs: obs_from_record(obs, n)?, reg: *reg, angle: *angle }
        }
        OpRecord::Cond { parity, gate } => Op::Cond { parity: parity.clone(), gate: gate_from_record(gate)? },
    })
}
