//! Signed Pauli strings, Clifford conjugation and the stabilizer tableau.
//!
//! A [`PauliString`] stores its X and Z supports as packed 64-bit words. The
//! letter on each qubit is the Hermitian Pauli selected by the bit pair
//! (`Y` when both bits are set), so the operator is
//! `sign * i^{|x & z|} X^x Z^z`. Only the overall sign is tracked; any factor
//! of `i` produced by multiplying anticommuting strings is reported
//! separately by [`PauliString::product`].

mod gate;
mod tableau;

pub use gate::{conjugate_by_clifford, CliffordGate, CliffordKind};
pub use tableau::{MeasureOutcome, OutcomeSource, Tableau};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Single-qubit Pauli letter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    fn from_letter(c: char) -> Option<Self> {
        match c.to_ascii_uppercase() {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

pub(crate) const fn words_for(n: usize) -> usize {
    n.div_ceil(64)
}

#[inline]
pub(crate) fn bit(words: &[u64], q: usize) -> bool {
    (words[q >> 6] >> (q & 63)) & 1 == 1
}

#[inline]
pub(crate) fn set_bit(words: &mut [u64], q: usize, v: bool) {
    let m = 1u64 << (q & 63);
    if v {
        words[q >> 6] |= m;
    } else {
        words[q >> 6] &= !m;
    }
}

/// Phase exponent (power of `i`, mod 4) of the product of two unsigned
/// Hermitian strings given by their word slices, excluding signs.
#[inline]
pub(crate) fn product_phase(x1: &[u64], z1: &[u64], x2: &[u64], z2: &[u64]) -> u8 {
    let mut e: u32 = 0;
    for w in 0..x1.len() {
        let (a, b, c, d) = (x1[w], z1[w], x2[w], z2[w]);
        let x3 = a ^ c;
        let z3 = b ^ d;
        e = e.wrapping_add((a & b).count_ones());
        e = e.wrapping_add((c & d).count_ones());
        e = e.wrapping_add(2 * (b & c).count_ones());
        e = e.wrapping_sub((x3 & z3).count_ones());
    }
    (e & 3) as u8
}

/// Signed Pauli word on `n` qubits.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    neg: bool,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        let w = words_for(n);
        Self { n, x: vec![0; w], z: vec![0; w], neg: false }
    }

    /// A single Pauli letter on qubit `q`.
    pub fn single(n: usize, q: usize, p: Pauli) -> Result<Self> {
        Self::from_sparse(n, &[(q, p)])
    }

    pub fn from_sparse(n: usize, factors: &[(usize, Pauli)]) -> Result<Self> {
        let mut s = Self::identity(n);
        for &(q, p) in factors {
            if q >= n {
                return Err(Error::OutOfRange { index: q, n });
            }
            let cur = s.get(q);
            if cur != Pauli::I {
                // repeated index: multiply in place
                let mut f = Self::identity(n);
                f.set(q, p);
                let (prod, e) = s.product(&f)?;
                if e & 1 == 1 {
                    return Err(Error::PauliParse {
                        text: format!("{factors:?}"),
                        reason: format!("anticommuting factors on qubit {q}"),
                    });
                }
                s = prod;
            } else {
                s.set(q, p);
            }
        }
        Ok(s)
    }

    /// Same word and sign with qubit `q` moved to `f(q)` on `n` qubits.
    pub fn relabeled(&self, n: usize, f: impl Fn(usize) -> usize) -> Result<Self> {
        let moved: Vec<_> = self.factors().into_iter().map(|(q, p)| (f(q), p)).collect();
        let mut s = Self::from_sparse(n, &moved)?;
        s.neg = self.neg;
        Ok(s)
    }

    /// Product of one letter over every qubit in `qubits`.
    pub fn uniform(n: usize, qubits: &[usize], p: Pauli) -> Result<Self> {
        let f: Vec<_> = qubits.iter().map(|&q| (q, p)).collect();
        Self::from_sparse(n, &f)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn get(&self, q: usize) -> Pauli {
        Pauli::from_bits(bit(&self.x, q), bit(&self.z, q))
    }

    pub fn set(&mut self, q: usize, p: Pauli) {
        let (x, z) = p.bits();
        set_bit(&mut self.x, q, x);
        set_bit(&mut self.z, q, z);
    }

    pub fn x_words(&self) -> &[u64] {
        &self.x
    }

    pub fn z_words(&self) -> &[u64] {
        &self.z
    }

    pub fn is_negative(&self) -> bool {
        self.neg
    }

    /// `+1` or `-1`.
    pub fn sign(&self) -> i8 {
        if self.neg {
            -1
        } else {
            1
        }
    }

    pub fn set_negative(&mut self, neg: bool) {
        self.neg = neg;
    }

    pub fn negated(mut self) -> Self {
        self.neg = !self.neg;
        self
    }

    /// Same letters with sign `+1`.
    pub fn unsigned(&self) -> Self {
        Self { neg: false, ..self.clone() }
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().chain(&self.z).all(|&w| w == 0)
    }

    pub fn weight(&self) -> usize {
        self.x.iter().zip(&self.z).map(|(a, b)| (a | b).count_ones() as usize).sum()
    }

    /// Qubits on which the string acts nontrivially, ascending.
    pub fn support(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (w, (a, b)) in self.x.iter().zip(&self.z).enumerate() {
            let mut m = a | b;
            while m != 0 {
                let t = m.trailing_zeros() as usize;
                out.push(w * 64 + t);
                m &= m - 1;
            }
        }
        out
    }

    /// Non-identity letters as `(qubit, letter)` pairs.
    pub fn factors(&self) -> Vec<(usize, Pauli)> {
        self.support().into_iter().map(|q| (q, self.get(q))).collect()
    }

    fn check_len(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::LengthMismatch { left: self.n, right: other.n });
        }
        Ok(())
    }

    /// True iff the symplectic product with `other` is even.
    pub fn commutes(&self, other: &Self) -> Result<bool> {
        self.check_len(other)?;
        Ok(self.commutes_unchecked(other))
    }

    pub(crate) fn commutes_unchecked(&self, other: &Self) -> bool {
        let mut parity = 0u32;
        for w in 0..self.x.len() {
            parity ^= ((self.x[w] & other.z[w]) ^ (self.z[w] & other.x[w])).count_ones();
        }
        parity & 1 == 0
    }

    /// `self * other = i^e * result`, with `e` in `{0, 1}` after folding any
    /// `-1` into the sign of `result`. `e == 1` exactly when the inputs
    /// anticommute.
    pub fn product(&self, other: &Self) -> Result<(Self, u8)> {
        self.check_len(other)?;
        let mut e = product_phase(&self.x, &self.z, &other.x, &other.z);
        e = (e + 2 * (self.neg as u8) + 2 * (other.neg as u8)) & 3;
        let x = self.x.iter().zip(&other.x).map(|(a, b)| a ^ b).collect();
        let z = self.z.iter().zip(&other.z).map(|(a, b)| a ^ b).collect();
        let neg = e >= 2;
        Ok((Self { n: self.n, x, z, neg }, e & 1))
    }

    /// `self * other` with the sign resolved; for anticommuting inputs the
    /// omitted factor is `i` (see [`PauliString::product`]).
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.product(other).map(|(p, _)| p)
    }

    /// Pads with identity up to `n` qubits.
    pub fn extended(&self, n: usize) -> Self {
        assert!(n >= self.n);
        let mut s = Self::identity(n);
        s.neg = self.neg;
        for (q, p) in self.factors() {
            s.set(q, p);
        }
        s
    }

    /// Keeps only qubits `< n`; returns `None` if anything is cut off.
    pub fn truncated(&self, n: usize) -> Option<Self> {
        if self.support().iter().any(|&q| q >= n) {
            return None;
        }
        let mut s = Self::identity(n);
        s.neg = self.neg;
        for (q, p) in self.factors() {
            s.set(q, p);
        }
        Some(s)
    }

    /// First `n` qubits, discarding the letters on the rest.
    pub fn truncated_letters(&self, n: usize) -> Self {
        let mut s = Self::identity(n);
        s.neg = self.neg;
        for (q, p) in self.factors().into_iter().filter(|&(q, _)| q < n) {
            s.set(q, p);
        }
        s
    }

    /// Parses `"+X1*Z4*Z5"` (1-based, `*` or whitespace separated), a bare
    /// `"I"`, or a dense word such as `"-XIZ"` whose length must equal `n`.
    pub fn parse(text: &str, n: usize) -> Result<Self> {
        let err = |reason: &str| Error::PauliParse { text: text.to_string(), reason: reason.into() };
        let t = text.trim();
        let (neg, body) = match t.chars().next() {
            Some('+') => (false, &t[1..]),
            Some('-') => (true, &t[1..]),
            _ => (false, t),
        };
        let body = body.trim();
        if body.is_empty() {
            return Err(err("empty"));
        }
        let mut s = Self::identity(n);
        if body.chars().all(|c| Pauli::from_letter(c).is_some()) && !body.eq_ignore_ascii_case("I") {
            if body.len() != n {
                return Err(err("dense word length differs from qubit count"));
            }
            for (q, c) in body.chars().enumerate() {
                s.set(q, Pauli::from_letter(c).unwrap());
            }
            s.neg = neg;
            return Ok(s);
        }
        let mut factors = Vec::new();
        for tok in body.split(|c: char| c == '*' || c.is_whitespace()).filter(|s| !s.is_empty()) {
            let mut chars = tok.chars();
            let letter = chars.next().and_then(Pauli::from_letter).ok_or_else(|| err("bad letter"))?;
            let digits = chars.as_str();
            if digits.is_empty() {
                if letter == Pauli::I {
                    continue;
                }
                return Err(err("missing qubit index"));
            }
            let idx: usize = digits.parse().map_err(|_| err("bad qubit index"))?;
            if idx == 0 || idx > n {
                return Err(err("qubit index out of range (indices are 1-based)"));
            }
            factors.push((idx - 1, letter));
        }
        let mut s = Self::from_sparse(n, &factors).map_err(|e| err(&e.to_string()))?;
        s.neg ^= neg;
        Ok(s)
    }

    /// Dense letter word, e.g. `"+XIZ"`.
    pub fn to_dense_string(&self) -> String {
        let mut s = String::with_capacity(self.n + 1);
        s.push(if self.neg { '-' } else { '+' });
        for q in 0..self.n {
            s.push(self.get(q).letter());
        }
        s
    }

    pub fn to_record(&self) -> PauliRecord {
        PauliRecord { n: self.n, x: self.x.clone(), z: self.z.clone(), neg: self.neg }
    }

    pub fn from_record(r: &PauliRecord) -> Result<Self> {
        let w = words_for(r.n);
        if r.x.len() != w || r.z.len() != w {
            return Err(Error::Serde("Pauli record word count does not match n".into()));
        }
        let tail = if r.n % 64 == 0 { u64::MAX } else { (1u64 << (r.n % 64)) - 1 };
        if w > 0 && ((r.x[w - 1] & !tail) != 0 || (r.z[w - 1] & !tail) != 0) {
            return Err(Error::Serde("Pauli record has bits beyond n".into()));
        }
        Ok(Self { n: r.n, x: r.x.clone(), z: r.z.clone(), neg: r.neg })
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.neg { "-" } else { "+" })?;
        let factors = self.factors();
        if factors.is_empty() {
            return f.write_str("I");
        }
        for (k, (q, p)) in factors.iter().enumerate() {
            if k > 0 {
                f.write_str("*")?;
            }
            write!(f, "{}{}", p.letter(), q + 1)?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({self} /{})", self.n)
    }
}

/// Compact bit-vector form used in serialized records.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PauliRecord {
    pub n: usize,
    pub x: Vec<u64>,
    pub z: Vec<u64>,
    pub neg: bool,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str, n: usize) -> PauliString {
        PauliString::parse(s, n).unwrap()
    }

    #[test]
    fn x_times_x_is_identity() {
        let x = p("X1", 3);
        let (r, e) = x.product(&x).unwrap();
        assert!(r.is_identity());
        assert_eq!(r.sign(), 1);
        assert_eq!(e, 0);
    }

    #[test]
    fn xz_and_zx_differ_by_sign() {
        let x = p("X1", 1);
        let z = p("Z1", 1);
        assert!(!x.commutes(&z).unwrap());
        let (xz, e1) = x.product(&z).unwrap();
        let (zx, e2) = z.product(&x).unwrap();
        assert_eq!((e1, e2), (1, 1));
        // X Z = -i Y and Z X = i Y
        assert_eq!(xz.get(0), Pauli::Y);
        assert_eq!(xz.sign(), -1);
        assert_eq!(zx.sign(), 1);
        // (XZ)(ZX) = -I up to the imaginary folding
        let (prod, e) = xz.product(&zx).unwrap();
        assert!(prod.is_identity());
        assert_eq!(e, 0);
        assert_eq!(prod.sign(), -1);
    }

    #[test]
    fn disjoint_z_strings_concatenate() {
        let za = p("Z1*Z2", 6);
        let zb = p("Z4*Z6", 6);
        let (r, e) = za.product(&zb).unwrap();
        assert_eq!(e, 0);
        assert_eq!(r, p("+Z1*Z2*Z4*Z6", 6));
    }

    #[test]
    fn commutation_examples() {
        assert!(p("XX", 2).commutes(&p("ZZ", 2)).unwrap());
        assert!(!p("X1", 2).commutes(&p("Z1", 2)).unwrap());
        // X1 Z_C versus Z1 Z_D with disjoint C, D
        let a = p("X1*Z3*Z5", 6);
        let b = p("Z1*Z4*Z6", 6);
        assert!(!a.commutes(&b).unwrap());
    }

    #[test]
    fn length_mismatch_is_an_error() {
        assert!(matches!(
            p("X1", 2).commutes(&p("X1", 3)),
            Err(Error::LengthMismatch { left: 2, right: 3 })
        ));
        assert!(p("X1", 2).product(&p("X1", 3)).is_err());
    }

    #[test]
    fn text_format_round_trips() {
        let s = p("-X1*Z4*Z5", 6);
        assert_eq!(s.to_string(), "-X1*Z4*Z5");
        assert_eq!(p(&s.to_string(), 6), s);
        assert_eq!(PauliString::identity(3).to_string(), "+I");
        assert_eq!(p("I", 3), PauliString::identity(3));
        assert_eq!(p("XIZ", 3), p("X1*Z3", 3));
        assert!(PauliString::parse("X0", 3).is_err());
        assert!(PauliString::parse("X4", 3).is_err());
        assert!(PauliString::parse("Q1", 3).is_err());
    }

    #[test]
    fn repeated_index_multiplies() {
        // Z1 * Z1 cancels, X1 * Z1 is rejected
        assert!(PauliString::from_sparse(2, &[(0, Pauli::Z), (0, Pauli::Z)]).unwrap().is_identity());
        assert!(PauliString::from_sparse(2, &[(0, Pauli::X), (0, Pauli::Z)]).is_err());
    }

    #[test]
    fn record_round_trip_and_validation() {
        let s = p("-Y2*X70", 80);
        let r = s.to_record();
        assert_eq!(PauliString::from_record(&r).unwrap(), s);
        let mut bad = r.clone();
        bad.x[1] |= 1 << 40;
        assert!(PauliString::from_record(&bad).is_err());
    }

    #[test]
    fn support_spans_words() {
        let s = p("X3*Z64*Y65*X130", 140);
        assert_eq!(s.support(), vec![2, 63, 64, 129]);
        assert_eq!(s.weight(), 4);
        assert_eq!(s.get(64), Pauli::Y);
    }
}
