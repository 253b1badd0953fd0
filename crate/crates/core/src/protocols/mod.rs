//! Circuit constructors for the teleportation and state-preparation
//! protocols, with the sabotage transforms used as negative controls.
//!
//! Every constructor returns a [`ProtocolInstance`] whose metadata resources
//! (`m`, `n_obs`, `depth`) are recomputed from the circuit, never declared.

mod states;
mod teleport;
mod verify;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use states::{build_ghz_1d, build_w_state, w_gate, w_vector, WMode};
pub use teleport::{
    build_bell_distill, build_estp, build_estp_with, build_multiqubit_estp, build_stp, sabotage, EstpOptions,
    Sabotage,
};
pub use verify::{
    check_bell_pair, check_dilated, check_ghz, check_sampled, check_task, check_teleport_dense, check_teleport_stabilizer,
    check_w_dense,
    dense_process_matrix, heisenberg_verdict, Backend, TaskCheck,
};

use crate::circuit::{CircuitRecord, DilatedCircuit, Op};
use crate::dilation::count_regions_outcomes;
use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    Teleport,
    BellPair,
    Ghz,
    WState,
}

/// Sites playing the A/B (measured) and C/D (Bell-encoded) roles in one
/// region.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionRoles {
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub d: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolMetadata {
    pub protocol: String,
    pub task: TaskKind,
    /// `(i, f)` per logical qubit or lane; for state preparation, two
    /// maximally separated sites.
    pub task_sites: Vec<(usize, usize)>,
    pub claimed_d: usize,
    pub roles: Vec<RegionRoles>,
    pub ell: Option<usize>,
    pub m: usize,
    pub n_obs: usize,
    /// Measured two-site-gate depth.
    pub depth: usize,
    /// Depth parameter the circuit was built for; at least `depth`.
    pub t_budget: usize,
    pub q: usize,
    /// Offsets `(M0, T0)` at which the main bound is expected to hold.
    pub m0: i64,
    pub t0: i64,
    pub params: BTreeMap<String, i64>,
    pub notes: Vec<String>,
}

impl ProtocolMetadata {
    /// Copy with every site index 1-based, as written to JSON.
    pub fn one_based(&self) -> Self {
        self.shifted(true).expect("shifting up cannot fail")
    }

    fn shifted(&self, up: bool) -> Result<Self> {
        let f = |q: usize| -> Result<usize> {
            if up {
                Ok(q + 1)
            } else {
                q.checked_sub(1).ok_or_else(|| Error::Serde("sites in metadata are 1-based".into()))
            }
        };
        let mut m = self.clone();
        m.task_sites = self.task_sites.iter().map(|&(i, j)| Ok((f(i)?, f(j)?))).collect::<Result<_>>()?;
        m.roles = self
            .roles
            .iter()
            .map(|r| Ok(RegionRoles { a: f(r.a)?, b: f(r.b)?, c: f(r.c)?, d: f(r.d)? }))
            .collect::<Result<_>>()?;
        Ok(m)
    }
}

/// A built protocol: circuit plus audited metadata.
#[derive(Clone, Debug, PartialEq)]
pub struct ProtocolInstance {
    pub circuit: DilatedCircuit,
    pub metadata: ProtocolMetadata,
}

#[derive(Serialize, Deserialize)]
struct InstanceRecord {
    #[serde(flatten)]
    circuit: CircuitRecord,
    metadata: ProtocolMetadata,
}

impl ProtocolInstance {
    /// Validates the circuit and fills `m`, `n_obs` and `depth` from it.
    pub(crate) fn finish(circuit: DilatedCircuit, mut metadata: ProtocolMetadata) -> Result<Self> {
        circuit.validate()?;
        let sites = *metadata.task_sites.first().ok_or(Error::MissingParam("task_sites"))?;
        let count = count_regions_outcomes(&circuit, sites)?;
        metadata.m = count.m;
        metadata.n_obs = count.n_obs;
        metadata.depth = circuit.depth();
        metadata.t_budget = metadata.t_budget.max(metadata.depth);
        Ok(Self { circuit, metadata })
    }

    /// True if the stored resources match a fresh count on the circuit.
    pub fn is_self_consistent(&self) -> bool {
        let Some(&sites) = self.metadata.task_sites.first() else {
            return false;
        };
        match count_regions_outcomes(&self.circuit, sites) {
            Ok(c) => c.m == self.metadata.m && c.n_obs == self.metadata.n_obs && self.circuit.depth() == self.metadata.depth,
            Err(_) => false,
        }
    }

    /// Circuit JSON with a `metadata` block; sites are 1-based like qubits.
    pub fn to_json(&self) -> String {
        let rec = InstanceRecord {
            circuit: self.circuit.to_record(),
            metadata: self.metadata.one_based(),
        };
        serde_json::to_string_pretty(&rec).expect("instance records always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let rec: InstanceRecord = serde_json::from_str(text)?;
        let circuit = DilatedCircuit::from_record(&rec.circuit)?;
        circuit.validate()?;
        Ok(Self { circuit, metadata: rec.metadata.shifted(false)? })
    }
}

/// Layer-by-layer circuit assembly with sequential register allocation.
pub(crate) struct Builder {
    pub n: usize,
    pub layers: Vec<Vec<Op>>,
    next_reg: usize,
}

impl Builder {
    pub fn new(n: usize) -> Self {
        Self { n, layers: Vec::new(), next_reg: 0 }
    }

    pub fn push(&mut self, ops: Vec<Op>) {
        if !ops.is_empty() {
            self.layers.push(ops);
        }
    }

    /// Measurement op on a fresh register.
    pub fn measure(&mut self, factors: &[(usize, Pauli)]) -> Result<(Op, usize)> {
        let r = self.next_reg;
        self.next_reg += 1;
        Ok((Op::measure(PauliString::from_sparse(self.n, factors)?, r), r))
    }

    pub fn into_circuit(self, geometry: crate::circuit::Geometry) -> DilatedCircuit {
        DilatedCircuit { n_physical: self.n, geometry, layers: self.layers }
    }
}

pub(crate) fn metadata(protocol: &str, task: TaskKind, task_sites: Vec<(usize, usize)>, claimed_d: usize) -> ProtocolMetadata {
    ProtocolMetadata {
        protocol: protocol.to_string(),
        task,
        task_sites,
        claimed_d,
        roles: Vec::new(),
        ell: None,
        m: 0,
        n_obs: 0,
        depth: 0,
        t_budget: 0,
        q: 1,
        m0: 1,
        t0: 0,
        params: BTreeMap::new(),
        notes: Vec::new(),
    }
}

/// Small instances (at most 12 dilated qubits) covering every builder and
/// the sabotage transforms, used for cross-backend checks.
pub fn corpus() -> Result<Vec<ProtocolInstance>> {
    let mut out = vec![build_stp()?];
    for (m, t) in [(0, 3), (0, 4), (1, 3), (1, 4)] {
        out.push(build_estp(m, t)?);
    }
    out.push(build_estp_with(1, 3, EstpOptions { bell_basis: true, extra_spacing: 0 })?);
    out.push(sabotage(&build_estp(1, 3)?, Sabotage::StretchRegions(1))?);
    out.push(sabotage(&build_estp(1, 3)?, Sabotage::StripFeedback)?);
    out.push(sabotage(&build_stp()?, Sabotage::StripFeedback)?);
    for (m, t, flip) in [(0, 3, false), (1, 3, false), (1, 3, true)] {
        out.push(build_bell_distill(m, t, flip)?);
    }
    for (m, ell) in [(0, 4), (1, 2), (1, 4), (2, 2), (3, 2)] {
        out.push(build_ghz_1d(m, ell)?);
    }
    out.retain(|i| i.circuit.n_dilated() <= 12);
    Ok(out)
}
