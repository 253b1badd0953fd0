use super::Trajectory;
use crate::dense::StateVector;
use crate::error::{Error, Result};
use crate::num::Real;

/// `|n><n|` on the registers of a dilated state; registers beyond the
/// outcome list are unconstrained.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrajectoryProjector {
    pub n_physical: usize,
    pub n_registers: usize,
    pub outcomes: Vec<u8>,
}

/// Projector for `traj` on a circuit with `allocated` registers. Outcomes
/// listed past the allocated registers must be 0 (not yet occurred).
pub fn trajectory_projector(traj: &Trajectory, n_physical: usize, allocated: usize) -> Result<TrajectoryProjector> {
    if let Some(r) = traj.outcomes.iter().skip(allocated).position(|&b| b != 0) {
        return Err(Error::UnallocatedRegister { register: allocated + r, allocated });
    }
    let k = traj.outcomes.len().min(allocated);
    Ok(TrajectoryProjector { n_physical, n_registers: allocated, outcomes: traj.outcomes[..k].to_vec() })
}

impl TrajectoryProjector {
    fn masks(&self) -> (usize, usize) {
        let mut mask = 0usize;
        let mut want = 0usize;
        for (r, &b) in self.outcomes.iter().enumerate() {
            mask |= 1 << (self.n_physical + r);
            want |= (b as usize & 1) << (self.n_physical + r);
        }
        (mask, want)
    }

    fn check<R: Real>(&self, s: &StateVector<R>) -> Result<()> {
        let n = self.n_physical + self.n_registers;
        if s.num_qubits() != n {
            return Err(Error::LengthMismatch { left: n, right: s.num_qubits() });
        }
        Ok(())
    }

    /// Zeroes every amplitude inconsistent with the outcomes.
    pub fn apply<R: Real>(&self, s: &mut StateVector<R>) -> Result<()> {
        self.check(s)?;
        let (mask, want) = self.masks();
        for (i, a) in s.amps.iter_mut().enumerate() {
            if i & mask != want {
                *a = num_complex::Complex::new(R::zero(), R::zero());
            }
        }
        Ok(())
    }

    /// `<P_n>` in `s`.
    pub fn probability<R: Real>(&self, s: &StateVector<R>) -> Result<f64> {
        self.check(s)?;
        let (mask, want) = self.masks();
        Ok(s.amps.iter().enumerate().filter(|(i, _)| i & mask == want).map(|(_, a)| a.norm_sqr().as_f64()).sum())
    }

    /// Projects, renormalizes and returns the physical state when every
    /// register is fixed by the outcomes, with the probability.
    pub fn project_physical<R: Real>(&self, s: &StateVector<R>) -> Result<(StateVector<R>, f64)> {
        self.check(s)?;
        if self.outcomes.len() != self.n_registers {
            return Err(Error::InvalidParams("physical projection needs an outcome for every register".into()));
        }
        let pr = self.probability(s)?;
        if pr <= 1e-15 {
            return Err(Error::ZeroProbability);
        }
        let (_, want) = self.masks();
        let low = 1usize << self.n_physical;
        let amps = s.amps[want..want + low].to_vec();
        Ok((StateVector::normalized_from(amps)?, pr))
    }
}

/// Probability of `traj` in a dilated state with `allocated` registers.
pub fn trajectory_probability<R: Real>(
    s: &StateVector<R>,
    traj: &Trajectory,
    n_physical: usize,
    allocated: usize,
) -> Result<f64> {
    trajectory_projector(traj, n_physical, allocated)?.probability(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_measurements_means_probability_one() {
        let s = StateVector::<f64>::zero(2).unwrap();
        let t = Trajectory::new();
        assert!((trajectory_probability(&s, &t, 2, 0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn unallocated_outcome_rejected() {
        let t = Trajectory { outcomes: vec![0, 1], ..Trajectory::new() };
        assert!(matches!(trajectory_projector(&t, 1, 1), Err(Error::UnallocatedRegister { register: 1, allocated: 1 })));
        let t = Trajectory { outcomes: vec![1, 0], ..Trajectory::new() };
        assert!(trajectory_projector(&t, 1, 1).is_ok());
    }
}
