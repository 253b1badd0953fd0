use num_complex::Complex;

use super::PauliSum;
use crate::circuit::Gate;
use crate::error::{Error, Result};
use crate::pauli::{conjugate_by_clifford, Pauli, PauliString};

/// Gate applied iff the XOR of `parity` registers is 1.
#[derive(Clone, Debug, PartialEq)]
pub struct ConditionedGate {
    pub parity: Vec<usize>,
    pub gate: Gate,
}

/// `R^dagger a R` with `R = P_even (x) I + P_odd (x) G`. The registers in the
/// condition must carry `I` or `Z` in `a`.
///
/// If `G` maps `a` to `+a` the result is `a`; to `-a` it is `a` times the
/// condition's `Z` parity string. Any other Clifford image gives a
/// four-term combination.
pub fn conjugate_through_conditioned(a: &PauliString, c: &ConditionedGate, n_physical: usize) -> Result<PauliSum> {
    let n = a.num_qubits();
    let g = match &c.gate {
        Gate::Clifford(g) => g,
        Gate::Named { kind, .. } => return Err(Error::NonClifford(format!("conditioned {}", kind.name()))),
    };
    if g.targets.iter().any(|&q| q >= n_physical) {
        return Err(Error::InvalidGate("conditioned gate must act on physical qubits".into()));
    }
    let mut zp = PauliString::identity(n);
    for &r in &c.parity {
        let q = n_physical + r;
        if q >= n {
            return Err(Error::UnallocatedRegister { register: r, allocated: n.saturating_sub(n_physical) });
        }
        if matches!(a.get(q), Pauli::X | Pauli::Y) {
            return Err(Error::ConditionRegisterFlip(r));
        }
        zp = zp.multiply(&PauliString::single(n, q, Pauli::Z)?)?;
    }
    let image = conjugate_by_clifford(a, g)?;
    let az = a.multiply(&zp)?;
    if image == *a {
        return Ok(PauliSum::from_pauli(a));
    }
    if image == a.clone().negated() {
        return Ok(PauliSum::from_pauli(&az));
    }
    let half = Complex::new(0.5, 0.0);
    let mut s = PauliSum::zero(n);
    s.add(half, a)?;
    s.add(half, &image)?;
    s.add(half, &az)?;
    s.add(-half, &image.multiply(&zp)?)?;
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::CliffordGate;

    fn p(s: &str, n: usize) -> PauliString {
        PauliString::parse(s, n).unwrap()
    }

    #[test]
    fn z_feedback_attaches_parity_to_x() {
        // 2 physical, registers 0 and 1 at qubits 3, 4
        let c = ConditionedGate { parity: vec![0, 1], gate: CliffordGate::z(1).into() };
        let r = conjugate_through_conditioned(&p("X2", 4), &c, 2).unwrap();
        assert_eq!(r.as_pauli().unwrap(), p("X2*Z3*Z4", 4));
        let r = conjugate_through_conditioned(&p("Z2", 4), &c, 2).unwrap();
        assert_eq!(r.as_pauli().unwrap(), p("Z2", 4));
    }

    #[test]
    fn flipped_register_and_non_clifford_rejected() {
        let c = ConditionedGate { parity: vec![0], gate: CliffordGate::x(0).into() };
        assert_eq!(conjugate_through_conditioned(&p("Z1*X2", 2), &c, 1), Err(Error::ConditionRegisterFlip(0)));
        let ch = ConditionedGate { parity: vec![0], gate: Gate::ch(0, 1) };
        assert!(matches!(conjugate_through_conditioned(&p("Z1", 3), &ch, 2), Err(Error::NonClifford(_))));
    }

    #[test]
    fn hadamard_feedback_gives_four_terms() {
        let c = ConditionedGate { parity: vec![0], gate: CliffordGate::h(0).into() };
        let r = conjugate_through_conditioned(&p("X1", 2), &c, 1).unwrap();
        assert_eq!(r.len(), 4);
    }
}
