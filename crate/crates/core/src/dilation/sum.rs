use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex;

use crate::dense::pauli_matrix;
use crate::error::{Error, Result};
use crate::num::{Real, C};
use crate::pauli::{Pauli, PauliString};

/// Complex combination of Pauli strings; strings are stored with sign `+1`
/// and the sign folded into the coefficient. Coefficients in every rule of
/// this module are dyadic, so `f64` holds them exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliSum {
    n: usize,
    terms: Vec<(Complex<f64>, PauliString)>,
}

impl PauliSum {
    pub fn zero(n: usize) -> Self {
        Self { n, terms: Vec::new() }
    }

    pub fn from_pauli(p: &PauliString) -> Self {
        let mut s = Self::zero(p.num_qubits());
        s.add(Complex::new(1.0, 0.0), p).expect("same length");
        s
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[(Complex<f64>, PauliString)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `c * p`, merging with an existing term on the same letters.
    pub fn add(&mut self, c: Complex<f64>, p: &PauliString) -> Result<()> {
        if p.num_qubits() != self.n {
            return Err(Error::LengthMismatch { left: self.n, right: p.num_qubits() });
        }
        let c = if p.is_negative() { -c } else { c };
        let key = p.unsigned();
        if let Some(k) = self.terms.iter().position(|(_, q)| *q == key) {
            self.terms[k].0 += c;
            if self.terms[k].0.norm() < 1e-15 {
                self.terms.remove(k);
            }
        } else if c.norm() >= 1e-15 {
            self.terms.push((c, key));
        }
        Ok(())
    }

    pub fn scaled(&self, c: Complex<f64>) -> Self {
        Self { n: self.n, terms: self.terms.iter().map(|(a, p)| (a * c, p.clone())).collect() }
    }

    pub fn plus(&self, other: &Self) -> Result<Self> {
        let mut s = self.clone();
        for (c, p) in &other.terms {
            s.add(*c, p)?;
        }
        Ok(s)
    }

    /// The single signed Pauli string this sum equals, if any.
    pub fn as_pauli(&self) -> Option<PauliString> {
        match self.terms.as_slice() {
            [(c, p)] if (c.re.abs() - 1.0).abs() < 1e-15 && c.im.abs() < 1e-15 => {
                Some(if c.re < 0.0 { p.clone().negated() } else { p.clone() })
            }
            _ => None,
        }
    }

    /// `(I +- Z_q) / 2 * a`: the register projector onto outcome `bit`
    /// attached to `a` (which must be the identity on qubit `q`).
    pub fn register_projector(a: &PauliString, q: usize, bit: u8) -> Result<Self> {
        if a.get(q) != Pauli::I {
            return Err(Error::InvalidParams("projector attached to an operator already acting on the register".into()));
        }
        let mut az = a.clone();
        az.set(q, Pauli::Z);
        let mut s = Self::zero(a.num_qubits());
        s.add(Complex::new(0.5, 0.0), a)?;
        s.add(Complex::new(if bit == 0 { 0.5 } else { -0.5 }, 0.0), &az)?;
        Ok(s)
    }

    /// Dense matrix (qubit `q` is bit `q` of the row index).
    pub fn to_matrix<R: Real>(&self) -> Result<DMatrix<C<R>>> {
        let d = 1usize << self.n;
        let mut m = DMatrix::from_element(d, d, C::<R>::new(R::zero(), R::zero()));
        for (c, p) in &self.terms {
            let pc = Complex::new(R::of(c.re), R::of(c.im));
            m += pauli_matrix::<R>(p)? * pc;
        }
        Ok(m)
    }
}

impl fmt::Display for PauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (c, p)) in self.terms.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({}{:+}i)[{}]", c.re, c.im, &p.to_string()[1..])?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signs_fold_and_terms_cancel() {
        let p = PauliString::parse("-X1*Z2", 2).unwrap();
        let mut s = PauliSum::from_pauli(&p);
        assert_eq!(s.as_pauli().unwrap(), p);
        s.add(Complex::new(1.0, 0.0), &p.clone().negated()).unwrap();
        assert!(s.is_empty());
    }

    #[test]
    fn projector_matrix_is_idempotent() {
        let a = PauliString::identity(2);
        let s = PauliSum::register_projector(&a, 1, 1).unwrap();
        let m = s.to_matrix::<f64>().unwrap();
        assert!((&m * &m - &m).norm() < 1e-15);
        assert!((m[(2, 2)].re - 1.0).abs() < 1e-15);
    }
}
