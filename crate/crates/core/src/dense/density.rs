use nalgebra::DMatrix;
use num_complex::Complex;
use num_traits::Zero;

use super::StateVector;
use crate::error::{Error, Result};
use crate::num::{Real, C};

/// Reduced density matrix of a qubit subset; `subset[0]` is the least
/// significant bit of the matrix index.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedDensity<R: Real> {
    pub subset: Vec<usize>,
    pub matrix: DMatrix<C<R>>,
}

impl<R: Real> ReducedDensity<R> {
    pub fn maximally_mixed(subset: Vec<usize>) -> Self {
        let d = 1usize << subset.len();
        let mut m = DMatrix::from_element(d, d, C::<R>::zero());
        for i in 0..d {
            m[(i, i)] = Complex::new(R::one() / R::of(d as f64), R::zero());
        }
        Self { subset, matrix: m }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> C<R> {
        self.matrix.trace()
    }

    /// Largest entrywise deviation from the conjugate transpose.
    pub fn hermiticity_error(&self) -> f64 {
        let a = &self.matrix;
        let d = a.nrows();
        let mut e = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                e = e.max((a[(i, j)] - a[(j, i)].conj()).norm_sqr().sqrt().as_f64());
            }
        }
        e
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let h = (&self.matrix + self.matrix.adjoint()) * Complex::new(R::of(0.5), R::zero());
        h.symmetric_eigenvalues().iter().fold(f64::INFINITY, |m, v| m.min(v.as_f64()))
    }

    pub fn is_psd(&self, tol: f64) -> bool {
        self.min_eigenvalue() >= -tol
    }

    /// Largest entrywise absolute difference.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::LengthMismatch { left: self.dim(), right: other.dim() });
        }
        Ok(self.matrix.iter().zip(other.matrix.iter()).fold(0.0, |m, (a, b)| m.max((a - b).norm_sqr().sqrt().as_f64())))
    }

    /// Probability-weighted sum of densities on the same subset.
    pub fn mixture(parts: &[(f64, &Self)]) -> Result<Self> {
        let first = parts.first().ok_or(Error::EmptyEnsemble)?.1;
        let mut m = DMatrix::from_element(first.dim(), first.dim(), C::<R>::zero());
        for (w, r) in parts {
            if r.subset != first.subset {
                return Err(Error::InvalidParams("mixture over different subsets".into()));
            }
            m += &r.matrix * Complex::new(R::of(*w), R::zero());
        }
        Ok(Self { subset: first.subset.clone(), matrix: m })
    }

    /// Row-major `(re, im)` pairs for reports.
    pub fn to_rows(&self) -> Vec<Vec<(f64, f64)>> {
        (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| (self.matrix[(i, j)].re.as_f64(), self.matrix[(i, j)].im.as_f64())).collect())
            .collect()
    }
}

impl<R: Real> StateVector<R> {
    /// Partial trace onto `subset` (distinct qubits).
    pub fn reduced_density(&self, subset: &[usize]) -> Result<ReducedDensity<R>> {
        let mut seen = 0usize;
        for &q in subset {
            self.check_qubit(q)?;
            if seen >> q & 1 == 1 {
                return Err(Error::InvalidParams(format!("qubit {q} repeated in subset")));
            }
            seen |= 1 << q;
        }
        let k = subset.len();
        let d = 1usize << k;
        let scatter = |s: usize| subset.iter().enumerate().fold(0usize, |acc, (b, &q)| acc | ((s >> b & 1) << q));
        let offsets: Vec<usize> = (0..d).map(scatter).collect();
        let mut m = DMatrix::from_element(d, d, C::<R>::zero());
        for i in (0..self.amps.len()).filter(|i| i & seen == 0) {
            for s in 0..d {
                let ai = self.amps[i | offsets[s]];
                if ai.is_zero() {
                    continue;
                }
                for t in 0..d {
                    m[(s, t)] += ai * self.amps[i | offsets[t]].conj();
                }
            }
        }
        Ok(ReducedDensity { subset: subset.to_vec(), matrix: m })
    }
}

/// `|<target|s>|^2`, or `<target| rho |target>` on the low qubits of `s` when
/// `target` is smaller.
pub fn fidelity<R: Real>(s: &StateVector<R>, target: &StateVector<R>) -> Result<f64> {
    let k = target.num_qubits();
    if k == s.num_qubits() {
        return Ok(s.inner(target)?.norm_sqr().as_f64());
    }
    if k > s.num_qubits() {
        return Err(Error::LengthMismatch { left: s.num_qubits(), right: k });
    }
    fidelity_on(s, target, &(0..k).collect::<Vec<_>>())
}

/// `<target| rho_subset |target>` with `subset[b]` carrying bit `b` of the
/// target's index.
pub fn fidelity_on<R: Real>(s: &StateVector<R>, target: &StateVector<R>, subset: &[usize]) -> Result<f64> {
    if target.num_qubits() != subset.len() {
        return Err(Error::LengthMismatch { left: subset.len(), right: target.num_qubits() });
    }
    let rho = s.reduced_density(subset)?;
    let t = target.amplitudes();
    let mut f = C::<R>::zero();
    for i in 0..t.len() {
        for j in 0..t.len() {
            f += t[i].conj() * rho.matrix[(i, j)] * t[j];
        }
    }
    Ok(f.re.as_f64())
}
