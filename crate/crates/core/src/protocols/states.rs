use num_complex::Complex;

use super::{metadata, Builder, ProtocolInstance, TaskKind};
use crate::circuit::{Gate, Geometry, Op};
use crate::dense::StateVector;
use crate::error::{Error, Result};
use crate::num::Real;
use crate::pauli::{CliffordGate, Pauli};

/// How the W-state protocol spreads newly incorporated qubits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WMode {
    Unitary,
    Estp,
}

/// GHZ state on `(m + 1) * ell` sites from `m + 1` patches joined by
/// measurement.
pub fn build_ghz_1d(m: usize, ell: usize) -> Result<ProtocolInstance> {
    if ell < 2 || ell % 2 != 0 {
        return Err(Error::InvalidParams(format!("patch size must be even and >= 2, got {ell}")));
    }
    let n = (m + 1) * ell;
    let h = ell / 2;
    let centers: Vec<usize> = (0..=m).map(|q| q * ell + h - 1).collect();
    let mut b = Builder::new(n);
    b.push(centers.iter().map(|&c| Op::gate(CliffordGate::h(c))).collect());
    b.push(centers.iter().map(|&c| Op::gate(CliffordGate::cnot(c, c + 1))).collect());
    for g in 1..h {
        let mut ops = Vec::new();
        for &c in &centers {
            ops.push(Op::gate(CliffordGate::cnot(c + 1 - g, c - g)));
            ops.push(Op::gate(CliffordGate::cnot(c + g, c + 1 + g)));
        }
        b.push(ops);
    }
    if m > 0 {
        // boundary q joins patch q (last site) and patch q + 1 (first site)
        let boundary: Vec<(usize, usize)> = (1..=m).map(|p| (p * ell - 1, p * ell)).collect();
        b.push(boundary.iter().map(|&(l, r)| Op::gate(CliffordGate::cnot(l, r))).collect());
        let mut meas = Vec::new();
        let mut regs = Vec::new();
        for &(_, r) in &boundary {
            let (op, reg) = b.measure(&[(r, Pauli::Z)])?;
            meas.push(op);
            regs.push(reg);
        }
        b.push(meas);
        let mut fb = Vec::new();
        for (k, &(_, r)) in boundary.iter().enumerate() {
            fb.push(Op::cond(vec![regs[k]], CliffordGate::x(r)));
        }
        for p in 1..=m {
            for j in p * ell + 1..(p + 1) * ell {
                fb.push(Op::cond(regs[..p].to_vec(), CliffordGate::x(j)));
            }
        }
        b.push(fb);
        b.push(boundary.iter().map(|&(l, r)| Op::gate(CliffordGate::cnot(l, r))).collect());
    }
    let mut meta = metadata("ghz_1d", TaskKind::Ghz, vec![(0, n - 1)], n - 1);
    meta.ell = Some(ell);
    meta.m0 = 2;
    meta.t0 = -1;
    meta.params.insert("m".into(), m as i64);
    meta.params.insert("ell".into(), ell as i64);
    ProtocolInstance::finish(b.into_circuit(Geometry::Chain { n }), meta)
}

/// The two-qubit W gate: controlled Hadamard `a -> b`, then `CNOT(b -> a)`.
pub fn w_gate(a: usize, b: usize) -> [Op; 2] {
    [Op::gate(Gate::ch(a, b)), Op::gate(CliffordGate::cnot(b, a))]
}

/// `sum_q |0..1_q..0> / sqrt(n)`.
pub fn w_vector<R: Real>(n: usize) -> Result<StateVector<R>> {
    if n > crate::dense::DEFAULT_QUBIT_BUDGET {
        return Err(Error::AmplitudeBudget { qubits: n, limit: crate::dense::DEFAULT_QUBIT_BUDGET });
    }
    let mut amps = vec![Complex::new(R::zero(), R::zero()); 1usize << n];
    let a = R::one() / R::of(n as f64).sqrt();
    for q in 0..n {
        amps[1 << q] = Complex::new(a, R::zero());
    }
    StateVector::from_amplitudes(amps)
}

/// W state on `2^n` sites by repeated doubling from the central pair.
pub fn build_w_state(n: usize, mode: WMode) -> Result<ProtocolInstance> {
    if n == 0 || n > 20 {
        return Err(Error::InvalidParams(format!("W state needs 1 <= n <= 20, got {n}")));
    }
    let big_n = 1usize << n;
    let c = big_n / 2 - 1;
    let mut b = Builder::new(big_n);
    b.push(vec![Op::gate(CliffordGate::h(c))]);
    b.push(vec![Op::gate(CliffordGate::cnot(c, c + 1))]);
    b.push(vec![Op::gate(CliffordGate::x(c + 1))]);
    // incorporated sites with their outward direction
    let mut inc: Vec<(usize, isize)> = vec![(c, -1), (c + 1, 1)];
    for k in 2..=n {
        let fresh: Vec<(usize, isize)> = inc.iter().map(|&(a, dir)| (step(a, dir, 1), dir)).collect();
        let dist = (1usize << (n - k)) - 1;
        let teleport = mode == WMode::Estp && k + 2 <= n;
        let (mut ch, mut cx) = (Vec::new(), Vec::new());
        for (&(a, _), &(bq, _)) in inc.iter().zip(&fresh) {
            let [g1, g2] = w_gate(a, bq);
            ch.push(g1);
            cx.push(g2);
        }
        if teleport {
            estp_spread(&mut b, &fresh, dist, ch, cx)?;
        } else {
            b.push(ch);
            b.push(cx);
            for s in 0..dist {
                b.push(
                    fresh.iter().map(|&(q, dir)| Op::gate(CliffordGate::swap(step(q, dir, s), step(q, dir, s + 1)))).collect(),
                );
            }
        }
        inc.extend(fresh.iter().map(|&(q, dir)| (step(q, dir, dist), dir)));
    }
    let mut meta = metadata("w_state", TaskKind::WState, vec![(0, big_n - 1)], big_n - 1);
    meta.params.insert("n".into(), n as i64);
    meta.params.insert("estp".into(), (mode == WMode::Estp) as i64);
    let inst = ProtocolInstance::finish(b.into_circuit(Geometry::Chain { n: big_n }), meta)?;
    Ok(annotate_w(inst, n, mode))
}

fn step(q: usize, dir: isize, s: usize) -> usize {
    (q as isize + dir * s as isize) as usize
}

/// One round of W growth whose spreading step is teleportation: a SWAP onto
/// the outward neighbour, then entanglement swapping along Bell pairs
/// encoded during the W gates, with Bell-basis measurements. Measured pairs
/// are reset to `|00>` by `Z` measurements and conditioned flips.
fn estp_spread(b: &mut Builder, fresh: &[(usize, isize)], dist: usize, mut ch: Vec<Op>, mut cx: Vec<Op>) -> Result<()> {
    let pairs = (dist - 1) / 2;
    for &(p, dir) in fresh {
        for j in 0..pairs {
            let (u, v) = (step(p, dir, 2 + 2 * j), step(p, dir, 3 + 2 * j));
            ch.push(Op::gate(CliffordGate::h(u)));
            cx.push(Op::gate(CliffordGate::cnot(u, v)));
        }
    }
    b.push(ch);
    b.push(cx);
    b.push(fresh.iter().map(|&(p, dir)| Op::gate(CliffordGate::swap(p, step(p, dir, 1)))).collect());
    let mut meas = Vec::new();
    let mut fb = Vec::new();
    for &(p, dir) in fresh {
        let (mut xs, mut zs) = (Vec::new(), Vec::new());
        let mut resets = Vec::new();
        for j in 0..pairs {
            let (u, v) = (step(p, dir, 1 + 2 * j), step(p, dir, 2 + 2 * j));
            let (mx, rx) = b.measure(&[(u, Pauli::X), (v, Pauli::X)])?;
            let (mz, rz) = b.measure(&[(u, Pauli::Z), (v, Pauli::Z)])?;
            let (mu, ru) = b.measure(&[(u, Pauli::Z)])?;
            let (mv, rv) = b.measure(&[(v, Pauli::Z)])?;
            meas.extend([mx, mz, mu, mv]);
            xs.push(rx);
            zs.push(rz);
            resets.push((u, ru));
            resets.push((v, rv));
        }
        let target = step(p, dir, dist);
        fb.push(Op::cond(zs, CliffordGate::x(target)));
        fb.push(Op::cond(xs, CliffordGate::z(target)));
        fb.extend(resets.into_iter().map(|(q, r)| Op::cond(vec![r], CliffordGate::x(q))));
    }
    b.push(meas);
    b.push(fb);
    Ok(())
}

/// Records the closed-form resource counts next to the audited ones.
fn annotate_w(mut inst: ProtocolInstance, n: usize, mode: WMode) -> ProtocolInstance {
    let big_n = 1i64 << n;
    let md = &mut inst.metadata;
    match mode {
        WMode::Unitary => {
            let expect = big_n / 2 + n as i64 - 1;
            if md.depth as i64 != expect {
                md.notes.push(format!("depth {} differs from N/2 + log2 N - 1 = {expect}", md.depth));
            }
        }
        WMode::Estp => {
            let t_min = 3 * n as i64 - 3;
            let m_max = big_n / 2 - 2 * n as i64 + 2;
            if md.depth as i64 != t_min {
                md.notes.push(format!("depth {} differs from 3 log2 N - 3 = {t_min}", md.depth));
            }
            if md.m as i64 != m_max {
                md.notes.push(format!("audited M = {} differs from N/2 - 2 log2 N + 2 = {m_max}", md.m));
            }
        }
    }
    inst
}
