use super::StateVector;
use crate::dilation::TrajectoryProjector;
use crate::error::{Error, Result};
use crate::num::Real;
use crate::pauli::{Pauli, PauliString};

const AXES: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

fn two_site<R: Real>(s: &StateVector<R>, i: usize, oi: Pauli, f: usize, of: Pauli) -> Result<R> {
    let n = s.num_qubits();
    s.expectation(&PauliString::from_sparse(n, &[(i, oi), (f, of)])?)
}

/// Connected correlator along a trajectory,
/// `<O_i O_f P_n> - <O_i P_n><O_f P_n> / p_n`, with single-site Pauli
/// observables. Without a projector `P_n` is the identity.
pub fn correlation<R: Real>(
    s: &StateVector<R>,
    i: usize,
    f: usize,
    oi: Pauli,
    of: Pauli,
    traj: Option<&TrajectoryProjector>,
) -> Result<f64> {
    if i == f {
        return Err(Error::InvalidParams("correlation needs two distinct sites".into()));
    }
    let n = s.num_qubits();
    for q in [i, f] {
        if q >= n {
            return Err(Error::OutOfRange { index: q, n });
        }
    }
    let projected;
    let (st, pn) = match traj {
        Some(p) => {
            let mut t = s.clone();
            p.apply(&mut t)?;
            let pn = t.norm_sqr().as_f64();
            projected = t;
            (&projected, pn)
        }
        None => (s, 1.0),
    };
    if pn <= 1e-15 {
        return Err(Error::ZeroProbability);
    }
    let e_if = two_site(st, i, oi, f, of)?.as_f64();
    let e_i = st.expectation(&PauliString::single(n, i, oi)?)?.as_f64();
    let e_f = st.expectation(&PauliString::single(n, f, of)?)?.as_f64();
    Ok(e_if - e_i * e_f / pn)
}

/// Correlation of largest magnitude over the nine Pauli-axis pairs.
pub fn max_correlation<R: Real>(
    s: &StateVector<R>,
    i: usize,
    f: usize,
    traj: Option<&TrajectoryProjector>,
) -> Result<(f64, Pauli, Pauli)> {
    let mut best = (0.0f64, Pauli::Z, Pauli::Z);
    for a in AXES {
        for b in AXES {
            let v = correlation(s, i, f, a, b, traj)?;
            if v.abs() > best.0.abs() + 1e-15 {
                best = (v, a, b);
            }
        }
    }
    Ok(best)
}

/// Collective-spin diagnostics of a physical state.
#[derive(Clone, Debug, PartialEq)]
pub struct SqueezingStats {
    /// `<S_x>, <S_y>, <S_z>`.
    pub mean: [f64; 3],
    /// `Delta S_x, Delta S_y, Delta S_z`.
    pub delta: [f64; 3],
    /// Symmetrized covariance of the collective spin.
    pub covariance: [[f64; 3]; 3],
    /// `N min_{n perp <S>} Delta S_n^2 / |<S>|^2`; `None` when `<S> = 0`
    /// leaves the transverse plane undefined.
    pub xi2: Option<f64>,
    /// Sum over ordered pairs `u != v` of the largest-magnitude Pauli-axis
    /// connected correlation.
    pub average_correlation: f64,
}

/// Squeezing parameter, variances and average correlation of `s`.
pub fn squeezing_stats<R: Real>(s: &StateVector<R>) -> Result<SqueezingStats> {
    let n = s.num_qubits();
    let mut single = vec![[0.0f64; 3]; n];
    for (q, row) in single.iter_mut().enumerate() {
        for (a, &p) in AXES.iter().enumerate() {
            row[a] = s.expectation(&PauliString::single(n, q, p)?)?.as_f64();
        }
    }
    let mut mean = [0.0; 3];
    for row in &single {
        for a in 0..3 {
            mean[a] += row[a] / 2.0;
        }
    }
    // <S_a S_b + S_b S_a>/2 = (N delta_ab + sum_{j != k} <s_a^j s_b^k>) / 4
    let mut second = [[0.0f64; 3]; 3];
    for (a, row) in second.iter_mut().enumerate() {
        row[a] += n as f64 / 4.0;
    }
    let mut avg = 0.0;
    for j in 0..n {
        for k in 0..n {
            if j == k {
                continue;
            }
            let mut best = 0.0f64;
            for (a, &pa) in AXES.iter().enumerate() {
                for (b, &pb) in AXES.iter().enumerate() {
                    let e = two_site(s, j, pa, k, pb)?.as_f64();
                    second[a][b] += e / 4.0;
                    let cor = e - single[j][a] * single[k][b];
                    if cor.abs() > best.abs() {
                        best = cor;
                    }
                }
            }
            avg += best.abs();
        }
    }
    let mut cov = [[0.0; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            cov[a][b] = second[a][b] - mean[a] * mean[b];
        }
    }
    let delta = [cov[0][0].max(0.0).sqrt(), cov[1][1].max(0.0).sqrt(), cov[2][2].max(0.0).sqrt()];
    let norm2: f64 = mean.iter().map(|m| m * m).sum();
    let xi2 = if norm2.sqrt() < 1e-12 {
        None
    } else {
        let (e1, e2) = transverse_basis(mean);
        let q = |u: [f64; 3], v: [f64; 3]| -> f64 {
            (0..3).map(|a| (0..3).map(|b| u[a] * cov[a][b] * v[b]).sum::<f64>()).sum()
        };
        let (a, b, d) = (q(e1, e1), q(e1, e2), q(e2, e2));
        let min = 0.5 * (a + d) - (0.25 * (a - d) * (a - d) + b * b).sqrt();
        Some(n as f64 * min / norm2)
    };
    Ok(SqueezingStats { mean, delta, covariance: cov, xi2, average_correlation: avg })
}

fn transverse_basis(m: [f64; 3]) -> ([f64; 3], [f64; 3]) {
    let norm = (m[0] * m[0] + m[1] * m[1] + m[2] * m[2]).sqrt();
    let u = [m[0] / norm, m[1] / norm, m[2] / norm];
    let pick = if u[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let cross = |a: [f64; 3], b: [f64; 3]| [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
    let e1 = cross(u, pick);
    let l = (e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]).sqrt();
    let e1 = [e1[0] / l, e1[1] / l, e1[2] / l];
    (e1, cross(u, e1))
}
