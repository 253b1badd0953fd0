use thiserror::Error;

/// Errors raised across the simulation, protocol and bound layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("qubit count mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("qubit index {index} out of range for {n} qubits")]
    OutOfRange { index: usize, n: usize },

    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("cannot parse Pauli string {text:?}: {reason}")]
    PauliParse { text: String, reason: String },

    #[error("forced outcome {forced} contradicts deterministic outcome {actual}")]
    ContradictoryOutcome { forced: u8, actual: u8 },

    #[error("operator flips condition register {0}; conditioned conjugation needs Z-diagonal registers")]
    ConditionRegisterFlip(usize),

    #[error("weak-measurement angle {0} outside [0, pi/2]")]
    AngleOutOfRange(f64),

    #[error("operator terms mix commuting and anticommuting parts; split before conjugating")]
    MixedCommutation,

    #[error("non-Clifford operation: {0}")]
    NonClifford(String),

    #[error("register {register} is not allocated (only {allocated} registers)")]
    UnallocatedRegister { register: usize, allocated: usize },

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("site {site} outside geometry of {n} sites")]
    SiteOutsideGeometry { site: usize, n: usize },

    #[error("branch budget exceeded: more than {0} trajectories")]
    BranchBudget(usize),

    #[error("amplitude budget exceeded: {qubits} qubits > {limit}")]
    AmplitudeBudget { qubits: usize, limit: usize },

    #[error("projection onto a zero-probability outcome")]
    NormCollapse,

    #[error("empty trajectory ensemble")]
    EmptyEnsemble,

    #[error("zero-probability trajectory")]
    ZeroProbability,

    #[error("residual Stinespring factor {0} on register {1}: feedback is not of parity form")]
    ResidualStinespring(char, usize),

    #[error("logical pair commutes everywhere")]
    CommutingPair,

    #[error("invalid protocol parameters: {0}")]
    InvalidParams(String),

    #[error("missing bound parameter `{0}`")]
    MissingParam(&'static str),

    #[error("transform not applicable: {0}")]
    InvalidTransform(String),

    #[error("serialization: {0}")]
    Serde(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serde(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
