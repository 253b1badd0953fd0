//! Dense state-vector backend.
//!
//! Qubit `q` is bit `q` of the amplitude index. In explicit-dilation runs the
//! Stinespring register `r` is qubit `n_physical + r`, so padding a physical
//! state with zeros appends registers in `|0>`.

mod density;
mod run;
mod stats;

pub use density::{fidelity, fidelity_on, ReducedDensity};
pub use run::{apply_circuit, enumerate_trajectories, DenseMode, DenseOptions, DenseRun};
pub use stats::{correlation, max_correlation, squeezing_stats, SqueezingStats};

use nalgebra::DMatrix;
use num_complex::Complex;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::circuit::{Gate, NamedKind};
use crate::error::{Error, Result};
use crate::num::{i_pow, Real, C};
use crate::pauli::{CliffordGate, CliffordKind, PauliString};

/// Default cap on the number of simulated qubits.
pub const DEFAULT_QUBIT_BUDGET: usize = 26;

/// Single-qubit matrix, row-major.
pub type Mat2<R> = [[C<R>; 2]; 2];

fn c<R: Real>(re: f64, im: f64) -> C<R> {
    Complex::new(R::of(re), R::of(im))
}

/// Matrix of a single-qubit Clifford kind.
pub fn clifford_matrix<R: Real>(kind: CliffordKind) -> Option<Mat2<R>> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let (o, l) = (c(0.0, 0.0), c(1.0, 0.0));
    Some(match kind {
        CliffordKind::I => [[l, o], [o, l]],
        CliffordKind::X => [[o, l], [l, o]],
        CliffordKind::Y => [[o, c(0.0, -1.0)], [c(0.0, 1.0), o]],
        CliffordKind::Z => [[l, o], [o, c(-1.0, 0.0)]],
        CliffordKind::H => [[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]],
        CliffordKind::S => [[l, o], [o, c(0.0, 1.0)]],
        CliffordKind::Sdg => [[l, o], [o, c(0.0, -1.0)]],
        _ => return None,
    })
}

/// Matrix of a linear map on `n` qubits, column `j` being the image of
/// basis state `j`.
pub fn operator_matrix<R: Real>(
    n: usize,
    mut f: impl FnMut(&mut StateVector<R>) -> Result<()>,
) -> Result<DMatrix<C<R>>> {
    let d = 1usize << n;
    let mut m = DMatrix::from_element(d, d, C::<R>::zero());
    for j in 0..d {
        let mut s = StateVector::basis(n, j)?;
        f(&mut s)?;
        for (i, a) in s.amps.iter().enumerate() {
            m[(i, j)] = *a;
        }
    }
    Ok(m)
}

/// Dense matrix of a signed Pauli string.
pub fn pauli_matrix<R: Real>(p: &PauliString) -> Result<DMatrix<C<R>>> {
    operator_matrix(p.num_qubits(), |s| {
        *s = s.pauli_applied(p)?;
        Ok(())
    })
}

/// Normalized state on `n` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<R: Real> {
    pub(crate) n: usize,
    pub(crate) amps: Vec<C<R>>,
}

/// Amplitudes as `(re, im)` pairs, the JSON dump format.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateDump {
    pub n_qubits: usize,
    pub amplitudes: Vec<(f64, f64)>,
}

impl<R: Real> StateVector<R> {
    /// `|0...0>` on `n` qubits, refusing more than [`DEFAULT_QUBIT_BUDGET`].
    pub fn zero(n: usize) -> Result<Self> {
        Self::zero_with_budget(n, DEFAULT_QUBIT_BUDGET)
    }

    pub fn zero_with_budget(n: usize, budget: usize) -> Result<Self> {
        Self::basis_with_budget(n, 0, budget)
    }

    pub fn basis(n: usize, index: usize) -> Result<Self> {
        Self::basis_with_budget(n, index, DEFAULT_QUBIT_BUDGET)
    }

    fn basis_with_budget(n: usize, index: usize, budget: usize) -> Result<Self> {
        if n > budget {
            return Err(Error::AmplitudeBudget { qubits: n, limit: budget });
        }
        if index >> n != 0 {
            return Err(Error::OutOfRange { index, n: 1 << n });
        }
        let mut amps = vec![C::<R>::zero(); 1 << n];
        amps[index] = C::one();
        Ok(Self { n, amps })
    }

    /// Takes the amplitudes as given after checking the length is a power
    /// of two and the norm is 1 within `1e-10`.
    pub fn from_amplitudes(amps: Vec<C<R>>) -> Result<Self> {
        let len = amps.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::InvalidParams(format!("amplitude count {len} is not a power of two")));
        }
        let s = Self { n: len.trailing_zeros() as usize, amps };
        if (s.norm_sqr().as_f64() - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidParams(format!("state norm^2 {} is not 1", s.norm_sqr().as_f64())));
        }
        Ok(s)
    }

    /// Unnormalized amplitudes are rescaled.
    pub fn normalized_from(amps: Vec<C<R>>) -> Result<Self> {
        let len = amps.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::InvalidParams(format!("amplitude count {len} is not a power of two")));
        }
        let mut s = Self { n: len.trailing_zeros() as usize, amps };
        s.normalize()?;
        Ok(s)
    }

    /// Tensor product of single-qubit states `(a0, a1)`, qubit 0 first.
    pub fn product(qubits: &[(C<R>, C<R>)]) -> Result<Self> {
        let mut amps = vec![C::<R>::one()];
        for &(a0, a1) in qubits {
            let mut next = Vec::with_capacity(amps.len() * 2);
            next.extend(amps.iter().map(|&a| a * a0));
            next.extend(amps.iter().map(|&a| a * a1));
            amps = next;
        }
        Self::normalized_from(amps)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[C<R>] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> R {
        self.amps.iter().fold(R::zero(), |acc, a| acc + a.norm_sqr())
    }

    fn normalize(&mut self) -> Result<()> {
        let ns = self.norm_sqr();
        if ns.as_f64() < 1e-300 {
            return Err(Error::NormCollapse);
        }
        let inv = R::one() / ns.sqrt();
        for a in &mut self.amps {
            *a *= inv;
        }
        Ok(())
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Result<C<R>> {
        if self.n != other.n {
            return Err(Error::LengthMismatch { left: self.n, right: other.n });
        }
        Ok(self.amps.iter().zip(&other.amps).fold(C::zero(), |acc, (a, b)| acc + a.conj() * b))
    }

    /// Appends `k` qubits in `|0>` as the most significant bits.
    pub fn with_ancillas(&self, k: usize, budget: usize) -> Result<Self> {
        if self.n + k > budget {
            return Err(Error::AmplitudeBudget { qubits: self.n + k, limit: budget });
        }
        let mut amps = self.amps.clone();
        amps.resize(1 << (self.n + k), C::zero());
        Ok(Self { n: self.n + k, amps })
    }

    pub fn to_dump(&self) -> StateDump {
        StateDump { n_qubits: self.n, amplitudes: self.amps.iter().map(|a| (a.re.as_f64(), a.im.as_f64())).collect() }
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n {
            return Err(Error::OutOfRange { index: q, n: self.n });
        }
        Ok(())
    }

    /// Applies `m` to qubit `q` on the subspace where `parity(index & cond)`
    /// is odd; `cond == 0` means unconditionally.
    pub fn apply_1q(&mut self, q: usize, m: &Mat2<R>, cond: u64) -> Result<()> {
        self.apply_controlled_1q(None, q, m, cond)
    }

    /// As [`apply_1q`](Self::apply_1q) but also requires `control` to be 1.
    pub fn apply_controlled_1q(&mut self, control: Option<usize>, q: usize, m: &Mat2<R>, cond: u64) -> Result<()> {
        self.check_qubit(q)?;
        let cmask = match control {
            Some(cq) => {
                self.check_qubit(cq)?;
                if cq == q {
                    return Err(Error::InvalidGate("control equals target".into()));
                }
                1usize << cq
            }
            None => 0,
        };
        let bit = 1usize << q;
        for i in 0..self.amps.len() {
            if i & bit != 0 || i & cmask != cmask {
                continue;
            }
            if cond != 0 && (i as u64 & cond).count_ones() & 1 == 0 {
                continue;
            }
            let j = i | bit;
            let (a, b) = (self.amps[i], self.amps[j]);
            self.amps[i] = m[0][0] * a + m[0][1] * b;
            self.amps[j] = m[1][0] * a + m[1][1] * b;
        }
        Ok(())
    }

    fn swap_qubits(&mut self, a: usize, b: usize, cond: u64) -> Result<()> {
        self.check_qubit(a)?;
        self.check_qubit(b)?;
        let (ba, bb) = (1usize << a, 1usize << b);
        for i in 0..self.amps.len() {
            if i & ba != 0 && i & bb == 0 {
                if cond != 0 && (i as u64 & cond).count_ones() & 1 == 0 {
                    continue;
                }
                self.amps.swap(i, i ^ ba ^ bb);
            }
        }
        Ok(())
    }

    pub fn apply_clifford(&mut self, g: &CliffordGate, cond: u64) -> Result<()> {
        let t = &g.targets;
        match g.kind {
            CliffordKind::Cnot => self.apply_controlled_1q(Some(t[0]), t[1], &clifford_matrix(CliffordKind::X).unwrap(), cond),
            CliffordKind::Cz => self.apply_controlled_1q(Some(t[0]), t[1], &clifford_matrix(CliffordKind::Z).unwrap(), cond),
            CliffordKind::Swap => self.swap_qubits(t[0], t[1], cond),
            k => self.apply_1q(t[0], &clifford_matrix(k).unwrap(), cond),
        }
    }

    pub fn apply_gate(&mut self, g: &Gate, cond: u64) -> Result<()> {
        match g {
            Gate::Clifford(c) => self.apply_clifford(c, cond),
            Gate::Named { kind: NamedKind::Ch, targets } => {
                self.apply_controlled_1q(Some(targets[0]), targets[1], &clifford_matrix(CliffordKind::H).unwrap(), cond)
            }
        }
    }

    /// X and Z bit masks of `p`, which may act on fewer qubits than the state.
    fn masks(&self, p: &PauliString) -> Result<(usize, usize)> {
        if p.num_qubits() > self.n {
            return Err(Error::LengthMismatch { left: self.n, right: p.num_qubits() });
        }
        let w = |v: &[u64]| v.first().copied().unwrap_or(0) as usize;
        Ok((w(p.x_words()), w(p.z_words())))
    }

    /// `p |self>` as a new vector, with the full phase of `p`.
    pub fn pauli_applied(&self, p: &PauliString) -> Result<Self> {
        let (xm, zm) = self.masks(p)?;
        let y = (xm & zm).count_ones() as u8 + if p.is_negative() { 2 } else { 0 };
        let base: C<R> = i_pow(y);
        let mut out = vec![C::<R>::zero(); self.amps.len()];
        for (i, &a) in self.amps.iter().enumerate() {
            let s = if (i & zm).count_ones() & 1 == 1 { -base } else { base };
            out[i ^ xm] = s * a;
        }
        Ok(Self { n: self.n, amps: out })
    }

    /// `<self| p |self>`, real for Hermitian `p`.
    pub fn expectation(&self, p: &PauliString) -> Result<R> {
        let pp = self.pauli_applied(p)?;
        Ok(self.inner(&pp)?.re)
    }

    /// Probability of outcome bit 1 (eigenvalue -1) when measuring `p`.
    pub fn prob_minus(&self, p: &PauliString) -> Result<R> {
        let e = self.expectation(p)?;
        let half = R::of(0.5);
        Ok(num_traits::clamp(half - half * e, R::zero(), R::one()))
    }

    /// Projects onto the eigenvalue `(-1)^bit` subspace of `p` without
    /// renormalizing.
    pub fn project(&mut self, p: &PauliString, bit: u8) -> Result<()> {
        let pp = self.pauli_applied(p)?;
        let half = R::of(0.5);
        for (a, b) in self.amps.iter_mut().zip(&pp.amps) {
            *a = if bit == 0 { (*a + b) * half } else { (*a - b) * half };
        }
        Ok(())
    }

    /// Projects and renormalizes; returns the Born probability.
    pub fn project_normalized(&mut self, p: &PauliString, bit: u8) -> Result<R> {
        self.project(p, bit)?;
        let pr = self.norm_sqr();
        self.normalize()?;
        Ok(pr)
    }

    /// `U = P+ (x) I + P- (x) X` on register qubit `reg`.
    pub fn apply_measurement_unitary(&mut self, p: &PauliString, reg: usize) -> Result<()> {
        self.apply_weak_measurement(p, reg, None)
    }

    /// `P+ (x) I + P- (x) exp(i angle X)` on register qubit `reg`; `None`
    /// gives the projective unitary (no phase on the flipped branch).
    pub fn apply_weak_measurement(&mut self, p: &PauliString, reg: usize, angle: Option<R>) -> Result<()> {
        self.check_qubit(reg)?;
        let (xm, zm) = self.masks(p)?;
        if (xm | zm) >> reg & 1 == 1 {
            return Err(Error::InvalidParams("register qubit inside the measured support".into()));
        }
        let pp = self.pauli_applied(p)?;
        let half = R::of(0.5);
        let rb = 1usize << reg;
        let (cos, isin) = match angle {
            None => (R::zero(), C::one()),
            Some(a) => (a.cos(), C::new(R::zero(), a.sin())),
        };
        let mut out = vec![C::<R>::zero(); self.amps.len()];
        for i in 0..self.amps.len() {
            let plus = (self.amps[i] + pp.amps[i]) * half;
            let minus = (self.amps[i] - pp.amps[i]) * half;
            out[i] += plus + minus * cos;
            out[i ^ rb] += minus * isin;
        }
        self.amps = out;
        Ok(())
    }

    /// Drops qubits `>= k`, which must all be in a definite basis state.
    /// Returns `None` if they are not.
    pub fn truncated(&self, k: usize, tol: f64) -> Option<Self> {
        let low = 1usize << k;
        let mut best = None;
        for hi in 0..(self.amps.len() >> k) {
            let w: f64 = self.amps[hi * low..(hi + 1) * low].iter().map(|a| a.norm_sqr().as_f64()).sum();
            if w > tol {
                if best.is_some() {
                    return None;
                }
                best = Some(hi);
            }
        }
        let hi = best?;
        Some(Self { n: k, amps: self.amps[hi * low..(hi + 1) * low].to_vec() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ps(s: &str, n: usize) -> PauliString {
        PauliString::parse(s, n).unwrap()
    }

    fn close(a: C<f64>, b: C<f64>) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn bell_circuit() {
        let mut s = StateVector::<f64>::zero(2).unwrap();
        s.apply_clifford(&CliffordGate::h(0), 0).unwrap();
        s.apply_clifford(&CliffordGate::cnot(0, 1), 0).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!(close(s.amplitudes()[0], c(h, 0.0)));
        assert!(close(s.amplitudes()[3], c(h, 0.0)));
        assert!((s.expectation(&ps("XX", 2)).unwrap() - 1.0).abs() < 1e-12);
        assert!((s.expectation(&ps("YY", 2)).unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn pauli_phases_match_matrices() {
        // Y|0> = i|1>, Y|1> = -i|0>
        let s = StateVector::<f64>::zero(1).unwrap();
        let y = s.pauli_applied(&ps("Y", 1)).unwrap();
        assert!(close(y.amplitudes()[1], c(0.0, 1.0)));
        let one = StateVector::<f64>::basis(1, 1).unwrap();
        let y1 = one.pauli_applied(&ps("-Y", 1)).unwrap();
        assert!(close(y1.amplitudes()[0], c(0.0, 1.0)));
    }

    #[test]
    fn measurement_unitary_flips_register_on_minus() {
        let mut s = StateVector::<f64>::basis(1, 1).unwrap().with_ancillas(1, 26).unwrap();
        s.apply_measurement_unitary(&ps("Z1", 1), 1).unwrap();
        assert!(close(s.amplitudes()[0b11], c(1.0, 0.0)));
    }

    #[test]
    fn gate_kernels_are_unitary() {
        let mut s = StateVector::<f64>::product(&[(c(0.6, 0.0), c(0.0, 0.8)), (c(1.0, 0.0), c(1.0, 1.0)), (c(0.3, 0.1), c(-0.2, 0.5))]).unwrap();
        for g in [CliffordGate::h(1), CliffordGate::s(2), CliffordGate::cnot(2, 0), CliffordGate::swap(0, 1), CliffordGate::cz(0, 2)] {
            s.apply_clifford(&g, 0).unwrap();
        }
        s.apply_gate(&Gate::ch(1, 0), 0).unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn conditioned_kernel_acts_on_odd_parity_only() {
        // register qubit 1 in |1>: X on qubit 0 fires
        let mut s = StateVector::<f64>::basis(2, 0b10).unwrap();
        s.apply_clifford(&CliffordGate::x(0), 0b10).unwrap();
        assert!(close(s.amplitudes()[0b11], c(1.0, 0.0)));
        let mut s = StateVector::<f64>::basis(2, 0b00).unwrap();
        s.apply_clifford(&CliffordGate::x(0), 0b10).unwrap();
        assert!(close(s.amplitudes()[0b00], c(1.0, 0.0)));
    }

    #[test]
    fn budget_enforced() {
        assert!(matches!(StateVector::<f64>::zero(27), Err(Error::AmplitudeBudget { qubits: 27, limit: 26 })));
        assert!(StateVector::<f64>::zero(3).unwrap().with_ancillas(2, 4).is_err());
    }

    #[test]
    fn single_precision_bell() {
        let mut s = StateVector::<f32>::zero(2).unwrap();
        s.apply_clifford(&CliffordGate::h(0), 0).unwrap();
        s.apply_clifford(&CliffordGate::cnot(0, 1), 0).unwrap();
        assert!((s.expectation(&ps("ZZ", 2)).unwrap() - 1.0).abs() < 1e-6);
    }
}
