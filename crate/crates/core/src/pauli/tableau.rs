use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{bit, product_phase, words_for, CliffordGate, PauliString};
use crate::error::{Error, Result};

/// Result of one measurement: the outcome bit (`0` for eigenvalue `+1`) and
/// whether it was forced by the state rather than drawn.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MeasureOutcome {
    pub bit: u8,
    pub deterministic: bool,
}

#[derive(Clone, Debug)]
enum SourceKind {
    Seeded(ChaCha8Rng),
    /// One bit per measurement, deterministic ones included.
    All(Vec<u8>),
    /// One bit per random measurement; missing bits default to 0.
    Random(Vec<u8>),
}

/// Where measurement outcomes come from: a seeded generator or injected
/// bits. Shared by both backends.
#[derive(Clone, Debug)]
pub struct OutcomeSource {
    kind: SourceKind,
    pos: usize,
}

/// Probabilities within this distance of 0 or 1 count as deterministic.
pub const DETERMINISTIC_EPS: f64 = 1e-12;

impl OutcomeSource {
    pub fn seeded(seed: u64) -> Self {
        Self { kind: SourceKind::Seeded(ChaCha8Rng::seed_from_u64(seed)), pos: 0 }
    }

    /// Forces every measurement, in order. A bit that contradicts a
    /// deterministic outcome is an error; bits past the end default to 0.
    pub fn forced(bits: Vec<u8>) -> Self {
        Self { kind: SourceKind::All(bits), pos: 0 }
    }

    /// Forces only the random measurements, in order; deterministic ones
    /// take their determined value. Used by trajectory enumeration.
    pub fn forced_random(bits: Vec<u8>) -> Self {
        Self { kind: SourceKind::Random(bits), pos: 0 }
    }

    /// Draws an outcome given the probability of bit 1.
    pub fn draw(&mut self, p_one: f64) -> Result<MeasureOutcome> {
        let det = if p_one <= DETERMINISTIC_EPS {
            Some(0u8)
        } else if p_one >= 1.0 - DETERMINISTIC_EPS {
            Some(1u8)
        } else {
            None
        };
        match (&mut self.kind, det) {
            (SourceKind::All(bits), d) => {
                let b = bits.get(self.pos).copied().unwrap_or(0) & 1;
                self.pos += 1;
                match d {
                    Some(v) if v != b => Err(Error::ContradictoryOutcome { forced: b, actual: v }),
                    Some(v) => Ok(MeasureOutcome { bit: v, deterministic: true }),
                    None => Ok(MeasureOutcome { bit: b, deterministic: false }),
                }
            }
            (_, Some(v)) => Ok(MeasureOutcome { bit: v, deterministic: true }),
            (SourceKind::Random(bits), None) => {
                let b = bits.get(self.pos).copied().unwrap_or(0) & 1;
                self.pos += 1;
                Ok(MeasureOutcome { bit: b, deterministic: false })
            }
            (SourceKind::Seeded(rng), None) => {
                let b = if p_one == 0.5 { rng.random::<bool>() } else { rng.random::<f64>() < p_one };
                Ok(MeasureOutcome { bit: b as u8, deterministic: false })
            }
        }
    }

    /// Number of injected bits consumed so far (0 for seeded sources).
    pub fn consumed(&self) -> usize {
        self.pos
    }
}

/// Aaronson-Gottesman tableau. Rows `0..n` are destabilizers, rows `n..2n`
/// stabilizers; each row is `w` contiguous words of X bits and of Z bits.
///
/// Every row also carries an inclusive word range outside of which it is
/// known to be zero, so local rows cost local work.
#[derive(Clone, Debug)]
pub struct Tableau {
    n: usize,
    w: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    neg: Vec<bool>,
    span: Vec<(usize, usize)>,
}

impl PartialEq for Tableau {
    fn eq(&self, o: &Self) -> bool {
        self.n == o.n && self.x == o.x && self.z == o.z && self.neg == o.neg
    }
}

impl Eq for Tableau {}

/// Gate with its target words precomputed.
struct Placed<'a> {
    g: &'a CliffordGate,
    a: usize,
    b: Option<usize>,
}

impl Tableau {
    /// The computational basis state `|0...0>`.
    pub fn new(n: usize) -> Self {
        let w = words_for(n);
        let mut t = Self {
            n,
            w,
            x: vec![0; 2 * n * w],
            z: vec![0; 2 * n * w],
            neg: vec![false; 2 * n],
            span: (0..2 * n).map(|r| ((r % n.max(1)) >> 6, (r % n.max(1)) >> 6)).collect(),
        };
        for q in 0..n {
            t.x[q * w + (q >> 6)] |= 1 << (q & 63);
            t.z[(n + q) * w + (q >> 6)] |= 1 << (q & 63);
        }
        t
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    fn row(&self, r: usize) -> PauliString {
        let s = r * self.w..(r + 1) * self.w;
        PauliString { n: self.n, x: self.x[s.clone()].to_vec(), z: self.z[s].to_vec(), neg: self.neg[r] }
    }

    pub fn stabilizer(&self, k: usize) -> PauliString {
        self.row(self.n + k)
    }

    pub fn destabilizer(&self, k: usize) -> PauliString {
        self.row(k)
    }

    pub fn stabilizers(&self) -> Vec<PauliString> {
        (0..self.n).map(|k| self.stabilizer(k)).collect()
    }

    pub fn destabilizers(&self) -> Vec<PauliString> {
        (0..self.n).map(|k| self.destabilizer(k)).collect()
    }

    /// Applies `g` to the state, i.e. conjugates every row forward.
    pub fn apply(&mut self, g: &CliffordGate) -> Result<()> {
        self.apply_all(&[g])
    }

    /// Applies `gates` in order with one pass over the rows. A row only
    /// visits the gates that touch words inside its span.
    pub fn apply_all(&mut self, gates: &[&CliffordGate]) -> Result<()> {
        let mut placed = Vec::with_capacity(gates.len());
        let mut by_word: Vec<Vec<usize>> = vec![Vec::new(); self.w];
        for (i, g) in gates.iter().enumerate() {
            g.check(self.n)?;
            let a = g.targets[0] >> 6;
            let b = (g.targets.len() == 2).then(|| g.targets[1] >> 6);
            by_word[a].push(i);
            if let Some(b) = b.filter(|&b| b != a) {
                by_word[b].push(i);
            }
            placed.push(Placed { g, a, b });
        }
        if placed.is_empty() {
            return Ok(());
        }
        let w = self.w;
        let mut todo: Vec<usize> = Vec::new();
        for r in 0..2 * self.n {
            let (mut lo, mut hi) = self.span[r];
            todo.clear();
            for list in &by_word[lo..=hi] {
                todo.extend_from_slice(list);
            }
            todo.sort_unstable();
            todo.dedup();
            let s = r * w..(r + 1) * w;
            let (x, z) = (&mut self.x[s.clone()], &mut self.z[s]);
            let mut neg = self.neg[r];
            let mut at = 0;
            while at < todo.len() {
                let i = todo[at];
                at += 1;
                let p = &placed[i];
                p.g.forward_bits(x, z, &mut neg);
                let Some(b) = p.b else { continue };
                // the words outside the span were zero before this gate
                let outside = [(p.a, p.g.targets[0]), (b, p.g.targets[1])]
                    .into_iter()
                    .filter(|&(k, q)| (k < lo || k > hi) && (bit(x, q) || bit(z, q)));
                let (mut nlo, mut nhi) = (lo, hi);
                for (k, _) in outside {
                    (nlo, nhi) = (nlo.min(k), nhi.max(k));
                }
                if (nlo, nhi) != (lo, hi) {
                    // gates already passed acted on zero words of this row
                    let mut later: Vec<usize> = (nlo..lo)
                        .chain(hi + 1..=nhi)
                        .flat_map(|k| by_word[k].iter().copied())
                        .filter(|&j| j > i)
                        .collect();
                    later.extend_from_slice(&todo[at..]);
                    later.sort_unstable();
                    later.dedup();
                    todo.truncate(at);
                    todo.extend(later);
                    (lo, hi) = (nlo, nhi);
                }
            }
            self.neg[r] = neg;
            self.span[r] = (lo, hi);
        }
        Ok(())
    }

    fn check_len(&self, p: &PauliString) -> Result<()> {
        if p.n != self.n {
            return Err(Error::LengthMismatch { left: self.n, right: p.n });
        }
        Ok(())
    }

    #[inline]
    fn anticommutes(&self, r: usize, pw: &[(usize, u64, u64)]) -> bool {
        let (lo, hi) = self.span[r];
        let base = r * self.w;
        let mut par = 0u32;
        for &(wi, px, pz) in pw {
            if wi < lo || wi > hi {
                continue;
            }
            par ^= ((self.x[base + wi] & pz) ^ (self.z[base + wi] & px)).count_ones();
        }
        par & 1 == 1
    }

    /// `row_h <- row_i * row_h` for commuting rows.
    fn rowsum(&mut self, h: usize, i: usize) {
        let w = self.w;
        let lo = self.span[h].0.min(self.span[i].0);
        let hi = self.span[h].1.max(self.span[i].1);
        let (hs, is) = (h * w + lo, i * w + lo);
        let len = hi + 1 - lo;
        let e = product_phase(&self.x[is..is + len], &self.z[is..is + len], &self.x[hs..hs + len], &self.z[hs..hs + len]);
        let e = (e + 2 * self.neg[i] as u8 + 2 * self.neg[h] as u8) & 3;
        debug_assert_eq!(e & 1, 0, "rowsum on anticommuting rows");
        self.neg[h] = e == 2;
        for k in 0..len {
            self.x[hs + k] ^= self.x[is + k];
            self.z[hs + k] ^= self.z[is + k];
        }
        self.span[h] = (lo, hi);
    }

    fn nonzero_words(p: &PauliString) -> Vec<(usize, u64, u64)> {
        p.x.iter()
            .zip(&p.z)
            .enumerate()
            .filter(|(_, (a, b))| **a != 0 || **b != 0)
            .map(|(i, (a, b))| (i, *a, *b))
            .collect()
    }

    /// Sign of the stabilizer-group element equal to `+-p` (letters only),
    /// given the destabilizers anticommuting with `p`. True means `-p`.
    fn group_sign(&self, p: &PauliString, destab: &[usize]) -> bool {
        let w = self.w;
        let mut sx = vec![0u64; w];
        let mut sz = vec![0u64; w];
        let mut sneg = false;
        for &k in destab {
            let row = self.n + k;
            let (lo, hi) = self.span[row];
            let r = row * w;
            let e = product_phase(&sx[lo..=hi], &sz[lo..=hi], &self.x[r + lo..=r + hi], &self.z[r + lo..=r + hi]);
            let e = (e + 2 * sneg as u8 + 2 * self.neg[row] as u8) & 3;
            sneg = e == 2;
            for j in lo..=hi {
                sx[j] ^= self.x[r + j];
                sz[j] ^= self.z[r + j];
            }
        }
        debug_assert!(sx == p.x && sz == p.z, "stabilizer product does not reproduce the observable");
        sneg
    }

    /// Rows anticommuting with `p`, in order.
    fn anticommuting_rows(&self, pw: &[(usize, u64, u64)]) -> Vec<usize> {
        let (plo, phi) = (pw[0].0, pw[pw.len() - 1].0);
        (0..2 * self.n)
            .filter(|&r| {
                let (lo, hi) = self.span[r];
                hi >= plo && lo <= phi && self.anticommutes(r, pw)
            })
            .collect()
    }

    /// Measures the Hermitian Pauli `p`; outcome bit 0 means eigenvalue +1.
    pub fn measure(&mut self, p: &PauliString, src: &mut OutcomeSource) -> Result<MeasureOutcome> {
        self.check_len(p)?;
        if p.is_identity() {
            return src.draw(if p.neg { 1.0 } else { 0.0 });
        }
        let pw = Self::nonzero_words(p);
        let n = self.n;
        let rows = self.anticommuting_rows(&pw);
        let Some(&pr) = rows.iter().find(|&&r| r >= n) else {
            let bit = self.group_sign(p, &rows) ^ p.neg;
            return src.draw(if bit { 1.0 } else { 0.0 });
        };
        for &r in &rows {
            if r != pr && r != pr - n {
                self.rowsum(r, pr);
            }
        }
        let w = self.w;
        let (d, s) = ((pr - n) * w, pr * w);
        self.x.copy_within(s..s + w, d);
        self.z.copy_within(s..s + w, d);
        self.neg[pr - n] = self.neg[pr];
        self.span[pr - n] = self.span[pr];
        let out = src.draw(0.5)?;
        self.x[s..s + w].copy_from_slice(&p.x);
        self.z[s..s + w].copy_from_slice(&p.z);
        self.neg[pr] = p.neg ^ (out.bit == 1);
        self.span[pr] = (pw[0].0, pw[pw.len() - 1].0);
        Ok(out)
    }

    /// `+1`/`-1` if `+-p` stabilizes the state, else `0`.
    pub fn expectation(&self, p: &PauliString) -> Result<i8> {
        self.check_len(p)?;
        if p.is_identity() {
            return Ok(p.sign());
        }
        let rows = self.anticommuting_rows(&Self::nonzero_words(p));
        if rows.last().is_some_and(|&r| r >= self.n) {
            return Ok(0);
        }
        Ok(if self.group_sign(p, &rows) ^ p.neg { -1 } else { 1 })
    }

    /// True iff `p` (with its sign) belongs to the stabilizer group.
    pub fn stabilizes(&self, p: &PauliString) -> Result<bool> {
        Ok(self.expectation(p)? == 1)
    }

    /// Checks the symplectic relations between all rows.
    pub fn check_invariants(&self) -> bool {
        let rows: Vec<_> = (0..2 * self.n).map(|r| self.row(r)).collect();
        let n = self.n;
        for a in 0..2 * n {
            for b in a + 1..2 * n {
                let should_anti = b == a + n && a < n;
                if rows[a].commutes_unchecked(&rows[b]) == should_anti {
                    return false;
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str, n: usize) -> PauliString {
        PauliString::parse(s, n).unwrap()
    }

    fn bell() -> Tableau {
        let mut t = Tableau::new(2);
        t.apply(&CliffordGate::h(0)).unwrap();
        t.apply(&CliffordGate::cnot(0, 1)).unwrap();
        t
    }

    #[test]
    fn z_on_zero_is_deterministic() {
        let mut t = Tableau::new(3);
        let before = t.clone();
        let o = t.measure(&p("Z1", 3), &mut OutcomeSource::seeded(1)).unwrap();
        assert_eq!(o, MeasureOutcome { bit: 0, deterministic: true });
        assert_eq!(t, before);
    }

    #[test]
    fn bell_pair_parities() {
        let mut t = bell();
        assert_eq!(t.expectation(&p("XX", 2)).unwrap(), 1);
        assert_eq!(t.expectation(&p("ZZ", 2)).unwrap(), 1);
        assert_eq!(t.expectation(&p("YY", 2)).unwrap(), -1);
        assert_eq!(t.expectation(&p("Z1", 2)).unwrap(), 0);
        let o = t.measure(&p("ZZ", 2), &mut OutcomeSource::seeded(3)).unwrap();
        assert_eq!(o, MeasureOutcome { bit: 0, deterministic: true });
    }

    #[test]
    fn plus_state_measurement_reaches_both_outcomes() {
        for b in [0u8, 1] {
            let mut t = Tableau::new(1);
            t.apply(&CliffordGate::h(0)).unwrap();
            let o = t.measure(&p("Z1", 1), &mut OutcomeSource::forced(vec![b])).unwrap();
            assert_eq!(o, MeasureOutcome { bit: b, deterministic: false });
            assert_eq!(t.expectation(&p("Z1", 1)).unwrap(), if b == 0 { 1 } else { -1 });
            assert!(t.check_invariants());
            let again = t.measure(&p("Z1", 1), &mut OutcomeSource::seeded(9)).unwrap();
            assert_eq!(again, MeasureOutcome { bit: b, deterministic: true });
        }
    }

    #[test]
    fn contradictory_forced_bit() {
        let mut t = Tableau::new(1);
        let r = t.measure(&p("Z1", 1), &mut OutcomeSource::forced(vec![1]));
        assert_eq!(r, Err(Error::ContradictoryOutcome { forced: 1, actual: 0 }));
    }

    #[test]
    fn negative_observable_flips_outcome() {
        let mut t = Tableau::new(2);
        let o = t.measure(&p("-Z2", 2), &mut OutcomeSource::seeded(0)).unwrap();
        assert_eq!(o.bit, 1);
        assert_eq!(t.expectation(&p("-Z2", 2)).unwrap(), -1);
    }

    #[test]
    fn seeded_source_is_reproducible() {
        let run = |seed| {
            let mut src = OutcomeSource::seeded(seed);
            (0..32).map(|_| src.draw(0.5).unwrap().bit).collect::<Vec<_>>()
        };
        assert_eq!(run(5), run(5));
        assert_ne!(run(5), run(6));
    }

    #[test]
    fn large_tableau_invariants() {
        let n = 70;
        let mut t = Tableau::new(n);
        let mut src = OutcomeSource::seeded(11);
        for q in 0..n {
            t.apply(&CliffordGate::h(q)).unwrap();
        }
        for q in 0..n - 1 {
            t.apply(&CliffordGate::cnot(q, q + 1)).unwrap();
            t.apply(&CliffordGate::s(q)).unwrap();
        }
        for q in (0..n).step_by(3) {
            t.measure(&PauliString::single(n, q, super::super::Pauli::X).unwrap(), &mut src).unwrap();
        }
        assert!(t.check_invariants());
    }

    #[test]
    fn word_spans_match_full_rows() {
        use super::super::{CliffordKind, Pauli};
        let n = 300;
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut t = Tableau::new(n);
        let mut full = Tableau::new(n);
        let near = |rng: &mut ChaCha8Rng, q: usize| (q + rng.random_range(1..80)) % n;
        for _ in 0..3000 {
            full.span.iter_mut().for_each(|s| *s = (0, full.w - 1));
            let q = rng.random_range(0..n);
            match rng.random_range(0..5) {
                0 => {
                    let kind = [CliffordKind::Cnot, CliffordKind::Cz, CliffordKind::Swap][rng.random_range(0..3)];
                    let g = CliffordGate::two(kind, q, near(&mut rng, q));
                    t.apply(&g).unwrap();
                    full.apply(&g).unwrap();
                }
                1 => {
                    let mut o = PauliString::identity(n);
                    o.set(q, Pauli::X);
                    o.set(near(&mut rng, q), Pauli::Z);
                    let seed = rng.random();
                    let a = t.measure(&o, &mut OutcomeSource::seeded(seed)).unwrap();
                    let b = full.measure(&o, &mut OutcomeSource::seeded(seed)).unwrap();
                    assert_eq!(a, b);
                }
                _ => {
                    let kind = [CliffordKind::H, CliffordKind::S, CliffordKind::Sdg, CliffordKind::X, CliffordKind::Y][rng.random_range(0..5)];
                    let g = CliffordGate::one(kind, q);
                    t.apply(&g).unwrap();
                    full.apply(&g).unwrap();
                }
            }
            assert_eq!(t, full);
        }
        assert!(t.check_invariants());
    }
}
