use nalgebra::DMatrix;
use num_complex::Complex;

use super::{DilatedIndexMap, PauliSum};
use crate::dense::{operator_matrix, StateVector};
use crate::error::{Error, Result};
use crate::num::{Real, C};
use crate::pauli::{Pauli, PauliString};

/// Projective measurement of a physical Pauli observable into a register.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementOp {
    pub observable: PauliString,
    pub register: usize,
}

/// Weak measurement with coupling angle in `[0, pi/2]`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeakMeasurementOp {
    pub observable: PauliString,
    pub register: usize,
    pub angle: f64,
}

/// `sum_n P_n (x) exp(i angle X)^n` on the register, where `P_0, P_1` are the
/// eigenprojectors of the observable. With `angle == None` the flipped
/// branch carries plain `X`, which is the projective measurement unitary
/// `P+ (x) I + P- (x) X`.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementUnitary {
    /// Observable padded to the dilated qubit count.
    pub observable: PauliString,
    pub n_physical: usize,
    pub register: usize,
    pub angle: Option<f64>,
}

fn check_observable(obs: &PauliString, map: &DilatedIndexMap) -> Result<()> {
    if obs.num_qubits() != map.n_physical {
        return Err(Error::LengthMismatch { left: map.n_physical, right: obs.num_qubits() });
    }
    if obs.is_identity() {
        return Err(Error::InvalidParams("measured observable is the identity".into()));
    }
    Ok(())
}

/// Dilated unitary of a projective measurement. Pauli observables are
/// Hermitian involutions by construction, so only the register and size are
/// validated.
pub fn measurement_unitary(m: &MeasurementOp, map: &DilatedIndexMap) -> Result<MeasurementUnitary> {
    check_observable(&m.observable, map)?;
    map.qubit_of_register(m.register)?;
    Ok(MeasurementUnitary {
        observable: m.observable.extended(map.n_dilated()),
        n_physical: map.n_physical,
        register: m.register,
        angle: None,
    })
}

pub fn weak_measurement_unitary(w: &WeakMeasurementOp, map: &DilatedIndexMap) -> Result<MeasurementUnitary> {
    if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&w.angle) {
        return Err(Error::AngleOutOfRange(w.angle));
    }
    check_observable(&w.observable, map)?;
    map.qubit_of_register(w.register)?;
    Ok(MeasurementUnitary {
        observable: w.observable.extended(map.n_dilated()),
        n_physical: map.n_physical,
        register: w.register,
        angle: Some(w.angle),
    })
}

impl MeasurementUnitary {
    pub fn n_dilated(&self) -> usize {
        self.observable.num_qubits()
    }

    pub fn register_qubit(&self) -> usize {
        self.n_physical + self.register
    }

    /// Applies the unitary to a state on the dilated qubits.
    pub fn apply<R: Real>(&self, s: &mut StateVector<R>) -> Result<()> {
        if s.num_qubits() != self.n_dilated() {
            return Err(Error::LengthMismatch { left: self.n_dilated(), right: s.num_qubits() });
        }
        s.apply_weak_measurement(&self.observable, self.register_qubit(), self.angle.map(R::of))
    }

    pub fn matrix<R: Real>(&self) -> Result<DMatrix<C<R>>> {
        operator_matrix(self.n_dilated(), |s| self.apply(s))
    }

    /// Eigenprojector `(I +- S)/2` of outcome `bit` on the dilated space.
    pub fn outcome_projector(&self, bit: u8) -> PauliSum {
        let n = self.n_dilated();
        let mut s = PauliSum::zero(n);
        s.add(Complex::new(0.5, 0.0), &PauliString::identity(n)).expect("sizes agree");
        s.add(Complex::new(if bit == 0 { 0.5 } else { -0.5 }, 0.0), &self.observable).expect("sizes agree");
        s
    }
}

/// `U (A (x) B) U` for a single dilated Pauli string, where `B` is the
/// letter on the measurement's register. The result is again a single Pauli
/// string (the letter rows of the lookup table).
pub fn conjugate_pauli_through_measurement(a: &PauliString, m: &MeasurementUnitary) -> Result<PauliString> {
    if m.angle.is_some() {
        return Err(Error::NonClifford("weak measurement unitary".into()));
    }
    if a.num_qubits() != m.n_dilated() {
        return Err(Error::LengthMismatch { left: m.n_dilated(), right: a.num_qubits() });
    }
    let rq = m.register_qubit();
    let letter = a.get(rq);
    let mut rest = a.clone();
    rest.set(rq, Pauli::I);
    let commute = rest.commutes(&m.observable)?;
    let (prod, imag) = rest.product(&m.observable)?;
    let with = |mut p: PauliString, l: Pauli| {
        p.set(rq, l);
        p
    };
    Ok(match (commute, letter) {
        (true, Pauli::I) => rest,
        (true, Pauli::X) => with(rest, Pauli::X),
        (true, l) => with(prod, l),
        (false, Pauli::I) => with(rest, Pauli::X),
        (false, Pauli::X) => rest,
        // A S = i R, so i A S = -R and -i A S = R
        (false, Pauli::Y) => {
            debug_assert_eq!(imag, 1);
            with(prod, Pauli::Z).negated()
        }
        (false, Pauli::Z) => with(prod, Pauli::Y),
    })
}

/// `U a U` for a combination of dilated strings whose physical parts all
/// commute, or all anticommute, with the observable.
pub fn conjugate_through_measurement(a: &PauliSum, m: &MeasurementUnitary) -> Result<PauliSum> {
    let rq = m.register_qubit();
    let mut kind = None;
    let mut out = PauliSum::zero(a.num_qubits());
    for (c, p) in a.terms() {
        let mut rest = p.clone();
        rest.set(rq, Pauli::I);
        let k = rest.commutes(&m.observable)?;
        if *kind.get_or_insert(k) != k {
            return Err(Error::MixedCommutation);
        }
        out.add(*c, &conjugate_pauli_through_measurement(p, m)?)?;
    }
    Ok(out)
}
