use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{bit, set_bit, PauliString};
use crate::error::{Error, Result};

/// Clifford generators understood by every backend.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CliffordKind {
    I,
    X,
    Y,
    Z,
    H,
    S,
    Sdg,
    Cnot,
    Cz,
    Swap,
}

impl CliffordKind {
    pub fn arity(self) -> usize {
        match self {
            CliffordKind::Cnot | CliffordKind::Cz | CliffordKind::Swap => 2,
            _ => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CliffordKind::I => "I",
            CliffordKind::X => "X",
            CliffordKind::Y => "Y",
            CliffordKind::Z => "Z",
            CliffordKind::H => "H",
            CliffordKind::S => "S",
            CliffordKind::Sdg => "SDG",
            CliffordKind::Cnot => "CNOT",
            CliffordKind::Cz => "CZ",
            CliffordKind::Swap => "SWAP",
        }
    }

    /// Pauli gates are their own conjugation up to sign.
    pub fn is_pauli(self) -> bool {
        matches!(self, CliffordKind::I | CliffordKind::X | CliffordKind::Y | CliffordKind::Z)
    }

    pub fn inverse(self) -> Self {
        match self {
            CliffordKind::S => CliffordKind::Sdg,
            CliffordKind::Sdg => CliffordKind::S,
            k => k,
        }
    }
}

impl FromStr for CliffordKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_uppercase().as_str() {
            "I" | "ID" => CliffordKind::I,
            "X" => CliffordKind::X,
            "Y" => CliffordKind::Y,
            "Z" => CliffordKind::Z,
            "H" => CliffordKind::H,
            "S" => CliffordKind::S,
            "SDG" | "S_DAG" | "SDAG" => CliffordKind::Sdg,
            "CNOT" | "CX" => CliffordKind::Cnot,
            "CZ" => CliffordKind::Cz,
            "SWAP" => CliffordKind::Swap,
            other => return Err(Error::InvalidGate(format!("unknown Clifford gate {other}"))),
        })
    }
}

/// A Clifford generator on concrete (0-based) qubits. For `Cnot` the first
/// target is the control.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CliffordGate {
    pub kind: CliffordKind,
    pub targets: Vec<usize>,
}

impl CliffordGate {
    pub fn new(kind: CliffordKind, targets: &[usize]) -> Result<Self> {
        if targets.len() != kind.arity() {
            return Err(Error::InvalidGate(format!(
                "{} takes {} target(s), got {}",
                kind.name(),
                kind.arity(),
                targets.len()
            )));
        }
        if targets.len() == 2 && targets[0] == targets[1] {
            return Err(Error::InvalidGate(format!("{} on repeated qubit {}", kind.name(), targets[0])));
        }
        Ok(Self { kind, targets: targets.to_vec() })
    }

    pub fn one(kind: CliffordKind, q: usize) -> Self {
        Self::new(kind, &[q]).expect("single-qubit Clifford")
    }

    pub fn two(kind: CliffordKind, a: usize, b: usize) -> Self {
        Self::new(kind, &[a, b]).expect("two-qubit Clifford")
    }

    pub fn h(q: usize) -> Self {
        Self::one(CliffordKind::H, q)
    }
    pub fn s(q: usize) -> Self {
        Self::one(CliffordKind::S, q)
    }
    pub fn x(q: usize) -> Self {
        Self::one(CliffordKind::X, q)
    }
    pub fn z(q: usize) -> Self {
        Self::one(CliffordKind::Z, q)
    }
    pub fn cnot(c: usize, t: usize) -> Self {
        Self::two(CliffordKind::Cnot, c, t)
    }
    pub fn cz(a: usize, b: usize) -> Self {
        Self::two(CliffordKind::Cz, a, b)
    }
    pub fn swap(a: usize, b: usize) -> Self {
        Self::two(CliffordKind::Swap, a, b)
    }

    pub fn inverse(&self) -> Self {
        Self { kind: self.kind.inverse(), targets: self.targets.clone() }
    }

    pub fn max_qubit(&self) -> usize {
        *self.targets.iter().max().unwrap()
    }

    /// The gate as a Pauli string, if it is one.
    pub fn as_pauli(&self, n: usize) -> Option<PauliString> {
        let p = match self.kind {
            CliffordKind::I => super::Pauli::I,
            CliffordKind::X => super::Pauli::X,
            CliffordKind::Y => super::Pauli::Y,
            CliffordKind::Z => super::Pauli::Z,
            _ => return None,
        };
        PauliString::single(n, self.targets[0], p).ok()
    }

    /// `g p g^dagger` applied in place to a row given as word slices.
    #[inline]
    pub(crate) fn forward_bits(&self, x: &mut [u64], z: &mut [u64], neg: &mut bool) {
        let t = &self.targets;
        match self.kind {
            CliffordKind::I => {}
            CliffordKind::X => *neg ^= bit(z, t[0]),
            CliffordKind::Z => *neg ^= bit(x, t[0]),
            CliffordKind::Y => *neg ^= bit(x, t[0]) ^ bit(z, t[0]),
            CliffordKind::H => {
                let q = t[0];
                let (a, b) = (bit(x, q), bit(z, q));
                *neg ^= a & b;
                set_bit(x, q, b);
                set_bit(z, q, a);
            }
            CliffordKind::S => {
                let q = t[0];
                let (a, b) = (bit(x, q), bit(z, q));
                *neg ^= a & b;
                set_bit(z, q, b ^ a);
            }
            CliffordKind::Sdg => {
                let q = t[0];
                let (a, b) = (bit(x, q), bit(z, q));
                *neg ^= a & !b;
                set_bit(z, q, b ^ a);
            }
            CliffordKind::Cnot => {
                let (c, g) = (t[0], t[1]);
                let (xc, zc, xt, zt) = (bit(x, c), bit(z, c), bit(x, g), bit(z, g));
                *neg ^= xc & zt & !(xt ^ zc);
                set_bit(x, g, xt ^ xc);
                set_bit(z, c, zc ^ zt);
            }
            CliffordKind::Cz => {
                let (a, b) = (t[0], t[1]);
                let (xa, za, xb, zb) = (bit(x, a), bit(z, a), bit(x, b), bit(z, b));
                *neg ^= xa & xb & (za ^ zb);
                set_bit(z, a, za ^ xb);
                set_bit(z, b, zb ^ xa);
            }
            CliffordKind::Swap => {
                let (a, b) = (t[0], t[1]);
                let (xa, za, xb, zb) = (bit(x, a), bit(z, a), bit(x, b), bit(z, b));
                set_bit(x, a, xb);
                set_bit(z, a, zb);
                set_bit(x, b, xa);
                set_bit(z, b, za);
            }
        }
    }

    /// `g p g^dagger` (Schrödinger-picture image of `p`).
    pub fn conjugate_forward(&self, p: &PauliString) -> Result<PauliString> {
        self.check(p.num_qubits())?;
        let mut out = p.clone();
        let mut neg = out.neg;
        self.forward_bits(&mut out.x, &mut out.z, &mut neg);
        out.neg = neg;
        Ok(out)
    }

    pub(crate) fn check(&self, n: usize) -> Result<()> {
        if let Some(&q) = self.targets.iter().find(|&&q| q >= n) {
            return Err(Error::OutOfRange { index: q, n });
        }
        Ok(())
    }
}

impl fmt::Display for CliffordGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind.name())?;
        for q in &self.targets {
            write!(f, " {}", q + 1)?;
        }
        Ok(())
    }
}

/// `g^dagger p g`, the Heisenberg-picture image of `p` under `g`.
pub fn conjugate_by_clifford(p: &PauliString, g: &CliffordGate) -> Result<PauliString> {
    g.inverse().conjugate_forward(p)
}
