use std::collections::BTreeMap;

use super::{metadata, Builder, ProtocolInstance, RegionRoles, TaskKind};
use crate::circuit::{DilatedCircuit, Geometry, Op};
use crate::error::{Error, Result};
use crate::pauli::{CliffordGate, Pauli};

/// Variants of the entanglement-swapping teleportation protocol.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EstpOptions {
    /// Measure `X_A X_B` and `Z_A Z_B` instead of decoding and measuring `Z`.
    pub bell_basis: bool,
    /// Extra sites between consecutive regions, with the gate schedule left
    /// unchanged.
    pub extra_spacing: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sabotage {
    StripFeedback,
    StretchRegions(usize),
    ShareMeasurement,
}

/// Three-qubit teleportation from site 0 to site 2.
pub fn build_stp() -> Result<ProtocolInstance> {
    let mut b = Builder::new(3);
    b.push(vec![Op::gate(CliffordGate::h(1))]);
    b.push(vec![Op::gate(CliffordGate::cnot(1, 2))]);
    b.push(vec![Op::gate(CliffordGate::cnot(0, 1))]);
    b.push(vec![Op::gate(CliffordGate::h(0))]);
    let (mi, ri) = b.measure(&[(0, Pauli::Z)])?;
    let (ma, ra) = b.measure(&[(1, Pauli::Z)])?;
    b.push(vec![mi, ma]);
    b.push(vec![Op::cond(vec![ra], CliffordGate::x(2)), Op::cond(vec![ri], CliffordGate::z(2))]);
    let mut meta = metadata("stp", TaskKind::Teleport, vec![(0, 2)], 2);
    meta.roles = vec![RegionRoles { a: 0, b: 1, c: 1, d: 2 }];
    ProtocolInstance::finish(b.into_circuit(Geometry::Chain { n: 3 }), meta)
}

pub fn build_estp(m: usize, t: usize) -> Result<ProtocolInstance> {
    build_estp_with(m, t, EstpOptions::default())
}

struct EstpLayout {
    n: usize,
    final_site: usize,
    ell: usize,
    roles: Vec<RegionRoles>,
}

fn estp_layout(m: usize, t: usize, opts: EstpOptions) -> EstpLayout {
    // psi is swapped from site 0 to A_1; C_s/D_s start next to each other
    let (a1, ell, c_off) = if opts.bell_basis { (t, 2 * t, t) } else { (t - 1, 2 * (t - 1), t - 1) };
    let stride = ell + opts.extra_spacing;
    let roles = (0..m)
        .map(|s| {
            let a = a1 + s * stride;
            RegionRoles { a, b: a + 1, c: a + c_off, d: a + c_off + 1 }
        })
        .collect();
    let final_site = a1 + m * stride;
    EstpLayout { n: final_site + 1, final_site, ell: stride, roles }
}

/// Teleportation over `m` regions at depth `t`.
pub fn build_estp_with(m: usize, t: usize, opts: EstpOptions) -> Result<ProtocolInstance> {
    let t_min = if opts.bell_basis { 1 } else { 3 };
    if t < t_min {
        return Err(Error::InvalidParams(format!("ESTP needs T >= {t_min}, got {t}")));
    }
    let lay = estp_layout(m, t, opts);
    let mut b = Builder::new(lay.n);
    emit_estp(&mut b, &lay, t, opts)?;
    let mut meta = metadata("estp", TaskKind::Teleport, vec![(0, lay.final_site)], lay.final_site);
    meta.roles = lay.roles;
    meta.ell = (m > 0).then_some(lay.ell);
    meta.t_budget = t;
    meta.t0 = if opts.bell_basis { 0 } else { -1 };
    meta.params = params(&[
        ("m", m as i64),
        ("t", t as i64),
        ("bell_basis", opts.bell_basis as i64),
        ("extra_spacing", opts.extra_spacing as i64),
    ]);
    ProtocolInstance::finish(b.into_circuit(Geometry::Chain { n: lay.n }), meta)
}

fn params(kv: &[(&str, i64)]) -> BTreeMap<String, i64> {
    kv.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn emit_estp(b: &mut Builder, lay: &EstpLayout, t: usize, opts: EstpOptions) -> Result<()> {
    let psi_swaps = lay.roles.first().map_or(lay.final_site, |r| r.a);
    // swap layers for C/D transport: layers 2..=last_swap_layer
    let last_swap_layer = if opts.bell_basis { t } else { t - 1 };
    b.push(lay.roles.iter().map(|r| Op::gate(CliffordGate::h(r.c))).collect());
    for k in 1..=last_swap_layer.max(psi_swaps) {
        let mut ops = Vec::new();
        if k <= psi_swaps {
            ops.push(Op::gate(CliffordGate::swap(k - 1, k)));
        }
        for r in &lay.roles {
            if k == 1 {
                ops.push(Op::gate(CliffordGate::cnot(r.c, r.d)));
            } else if k <= last_swap_layer {
                ops.push(Op::gate(CliffordGate::swap(r.c - k + 2, r.c - k + 1)));
                ops.push(Op::gate(CliffordGate::swap(r.d + k - 2, r.d + k - 1)));
            }
        }
        b.push(ops);
    }
    if lay.roles.is_empty() {
        return Ok(());
    }
    let f = lay.final_site;
    let (mut first, mut second) = (Vec::new(), Vec::new());
    let mut meas = Vec::new();
    if opts.bell_basis {
        for r in &lay.roles {
            let (mx, rx) = b.measure(&[(r.a, Pauli::X), (r.b, Pauli::X)])?;
            let (mz, rz) = b.measure(&[(r.a, Pauli::Z), (r.b, Pauli::Z)])?;
            meas.extend([mx, mz]);
            first.push(rx);
            second.push(rz);
        }
    } else {
        b.push(lay.roles.iter().map(|r| Op::gate(CliffordGate::cnot(r.a, r.b))).collect());
        b.push(lay.roles.iter().map(|r| Op::gate(CliffordGate::h(r.a))).collect());
        for r in &lay.roles {
            let (ma, ra) = b.measure(&[(r.a, Pauli::Z)])?;
            let (mb, rb) = b.measure(&[(r.b, Pauli::Z)])?;
            meas.extend([ma, mb]);
            first.push(ra);
            second.push(rb);
        }
    }
    b.push(meas);
    // first set -> Z correction, second set -> X correction
    b.push(vec![Op::cond(second, CliffordGate::x(f)), Op::cond(first, CliffordGate::z(f))]);
    Ok(())
}

/// Bell pair between site 0 and the last site using `m` measured regions.
/// With `flip`, the `Z` correction fires on even instead of odd parity,
/// which leaves the pair with `X X = -1`.
pub fn build_bell_distill(m: usize, t: usize, flip: bool) -> Result<ProtocolInstance> {
    if t < 3 {
        return Err(Error::InvalidParams(format!("Bell distillation needs T >= 3, got {t}")));
    }
    let ell = 2 * (t - 1);
    let d0 = t;
    let pairs: Vec<(usize, usize)> = (0..=m).map(|s| (d0 + s * ell - 1, d0 + s * ell)).collect();
    let regions: Vec<RegionRoles> = (1..=m)
        .map(|s| {
            let a = pairs[s - 1].1 + t - 2;
            RegionRoles { a, b: a + 1, c: pairs[s].0, d: pairs[s].1 }
        })
        .collect();
    let f = pairs[m].1 + t - 1;
    let n = f + 1;
    let mut b = Builder::new(n);
    b.push(pairs.iter().map(|&(c, _)| Op::gate(CliffordGate::h(c))).collect());
    b.push(pairs.iter().map(|&(c, d)| Op::gate(CliffordGate::cnot(c, d))).collect());
    for k in 2..t {
        let mut ops = Vec::new();
        for &(c, d) in &pairs {
            ops.push(Op::gate(CliffordGate::swap(c - k + 2, c - k + 1)));
            ops.push(Op::gate(CliffordGate::swap(d + k - 2, d + k - 1)));
        }
        b.push(ops);
    }
    let mut last: Vec<Op> = regions.iter().map(|r| Op::gate(CliffordGate::cnot(r.a, r.b))).collect();
    last.push(Op::gate(CliffordGate::swap(1, 0)));
    last.push(Op::gate(CliffordGate::swap(f - 1, f)));
    b.push(last);
    b.push(regions.iter().map(|r| Op::gate(CliffordGate::h(r.a))).collect());
    let (mut ra, mut rb, mut meas) = (Vec::new(), Vec::new(), Vec::new());
    for r in &regions {
        let (ma, a) = b.measure(&[(r.a, Pauli::Z)])?;
        let (mb, bb) = b.measure(&[(r.b, Pauli::Z)])?;
        meas.extend([ma, mb]);
        ra.push(a);
        rb.push(bb);
    }
    b.push(meas);
    let mut fb = Vec::new();
    if !rb.is_empty() {
        fb.push(Op::cond(rb, CliffordGate::x(f)));
        fb.push(Op::cond(ra, CliffordGate::z(f)));
    }
    if flip {
        fb.push(Op::gate(CliffordGate::z(f)));
    }
    b.push(fb);
    let mut meta = metadata("bell_distill", TaskKind::BellPair, vec![(0, f)], f);
    meta.roles = regions;
    meta.ell = (m > 0).then_some(ell);
    meta.t_budget = t;
    meta.m0 = 2;
    meta.t0 = -1;
    meta.params = params(&[("m", m as i64), ("t", t as i64), ("flip", flip as i64)]);
    ProtocolInstance::finish(b.into_circuit(Geometry::Chain { n }), meta)
}

/// Merges lanes into one circuit on a grid, one lane per row. Registers are
/// renumbered in the merged op order.
fn merge_lanes(lanes: &[DilatedCircuit]) -> Result<DilatedCircuit> {
    let cols = lanes.iter().map(|c| c.n_physical).max().unwrap_or(0);
    let rows = lanes.len();
    let n = rows * cols;
    let depth = lanes.iter().map(|c| c.layers.len()).max().unwrap_or(0);
    let mut reg_maps: Vec<BTreeMap<usize, usize>> = vec![BTreeMap::new(); rows];
    let mut next = 0;
    let mut out = DilatedCircuit::new(n, Geometry::Grid { rows, cols });
    for li in 0..depth {
        let mut layer = Vec::new();
        for (lane, c) in lanes.iter().enumerate() {
            for op in c.layers.get(li).into_iter().flatten() {
                if let Some(r) = op.register() {
                    reg_maps[lane].insert(r, next);
                    next += 1;
                }
                let map = &reg_maps[lane];
                layer.push(op.relabeled(n, |q| lane * cols + q, |r| map[&r])?);
            }
        }
        out.push_layer(layer);
    }
    Ok(out)
}

/// `q` parallel ESTP lanes on a `q x N` grid.
pub fn build_multiqubit_estp(q: usize, m: usize, t: usize) -> Result<ProtocolInstance> {
    build_lanes(q, m, t, 0)
}

fn build_lanes(q: usize, m: usize, t: usize, extra_spacing: usize) -> Result<ProtocolInstance> {
    if q == 0 {
        return Err(Error::InvalidParams("need at least one lane".into()));
    }
    let one = build_estp_with(m, t, EstpOptions { bell_basis: false, extra_spacing })?;
    let lanes = vec![one.circuit.clone(); q];
    let circuit = merge_lanes(&lanes)?;
    let cols = one.circuit.n_physical;
    let f = one.metadata.task_sites[0].1;
    let mut meta = one.metadata.clone();
    meta.protocol = "multi_estp".into();
    meta.task_sites = (0..q).map(|r| (r * cols, r * cols + f)).collect();
    meta.roles = (0..q)
        .flat_map(|r| {
            one.metadata.roles.iter().map(move |x| {
                let o = r * cols;
                RegionRoles { a: x.a + o, b: x.b + o, c: x.c + o, d: x.d + o }
            })
        })
        .collect();
    meta.q = q;
    meta.params.insert("q".into(), q as i64);
    ProtocolInstance::finish(circuit, meta)
}

/// Applies a sabotage transform.
pub fn sabotage(inst: &ProtocolInstance, s: Sabotage) -> Result<ProtocolInstance> {
    let mut out = match s {
        Sabotage::StripFeedback => ProtocolInstance::finish(inst.circuit.without_feedback(), inst.metadata.clone())?,
        Sabotage::StretchRegions(extra) => stretch(inst, extra)?,
        Sabotage::ShareMeasurement => share(inst)?,
    };
    let tag = match s {
        Sabotage::StripFeedback => "strip_feedback".to_string(),
        Sabotage::StretchRegions(e) => format!("stretch_regions({e})"),
        Sabotage::ShareMeasurement => "share_measurement".to_string(),
    };
    out.metadata.notes.push(format!("sabotaged: {tag}"));
    Ok(out)
}

fn param(inst: &ProtocolInstance, k: &'static str) -> Result<usize> {
    inst.metadata.params.get(k).map(|&v| v as usize).ok_or(Error::MissingParam(k))
}

fn stretch(inst: &ProtocolInstance, extra: usize) -> Result<ProtocolInstance> {
    let (m, t) = (param(inst, "m")?, param(inst, "t")?);
    if m == 0 {
        return Err(Error::InvalidTransform("stretch_regions needs at least one region".into()));
    }
    let base = param(inst, "extra_spacing").unwrap_or(0);
    match inst.metadata.protocol.as_str() {
        "estp" => {
            let bell_basis = param(inst, "bell_basis").unwrap_or(0) == 1;
            build_estp_with(m, t, EstpOptions { bell_basis, extra_spacing: base + extra })
        }
        "multi_estp" => build_lanes(param(inst, "q")?, m, t, base + extra),
        p => Err(Error::InvalidTransform(format!("stretch_regions does not apply to {p}"))),
    }
}

/// Lane 1's feedback reads lane 0's registers instead of its own.
fn share(inst: &ProtocolInstance) -> Result<ProtocolInstance> {
    if inst.metadata.protocol != "multi_estp" || inst.metadata.q != 2 {
        return Err(Error::InvalidTransform("share_measurement needs a two-lane ESTP".into()));
    }
    let cols = match inst.circuit.geometry {
        Geometry::Grid { cols, .. } => cols,
        Geometry::Chain { .. } => return Err(Error::InvalidTransform("multi-lane ESTP must be on a grid".into())),
    };
    let mut by_lane: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
    for op in inst.circuit.ops() {
        if let Op::Measure { obs, reg } = op {
            by_lane[obs.support()[0] / cols].push(*reg);
        }
    }
    let map: BTreeMap<usize, usize> = by_lane[1].iter().copied().zip(by_lane[0].iter().copied()).collect();
    let mut c = inst.circuit.clone();
    for layer in &mut c.layers {
        for op in layer.iter_mut() {
            if let Op::Cond { parity, gate } = op {
                if gate.targets()[0] / cols == 1 {
                    *parity = parity.iter().map(|r| map.get(r).copied().unwrap_or(*r)).collect();
                }
            }
        }
    }
    ProtocolInstance::finish(c, inst.metadata.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn estp_fig_instance_shape() {
        let i = build_estp(2, 4).unwrap();
        assert_eq!(i.circuit.n_physical, 16);
        assert_eq!(i.circuit.n_registers(), 4);
        assert_eq!(i.metadata.claimed_d, 15);
        assert_eq!(i.metadata.m, 2);
        assert_eq!(i.metadata.n_obs, 4);
        assert_eq!(i.metadata.depth, 4);
        assert_eq!(i.metadata.ell, Some(6));
        let r = i.metadata.roles[1];
        assert_eq!((r.a, r.b, r.c, r.d), (9, 10, 12, 13));
    }

    #[test]
    fn estp_without_regions_is_staircase() {
        let i = build_estp(0, 4).unwrap();
        assert_eq!(i.circuit.n_physical, 4);
        assert_eq!(i.metadata.claimed_d, 3);
        assert_eq!(i.metadata.depth, 3);
        assert_eq!(i.metadata.t_budget, 4);
        assert!(i.circuit.ops().all(|o| matches!(o, Op::Gate(_))));
    }

    #[test]
    fn estp_rejects_shallow_depth() {
        assert!(build_estp(1, 2).is_err());
        assert!(build_estp_with(1, 2, EstpOptions { bell_basis: true, extra_spacing: 0 }).is_ok());
    }

    #[test]
    fn bell_distill_distance() {
        let i = build_bell_distill(0, 3, false).unwrap();
        assert_eq!(i.metadata.claimed_d, 5);
        assert_eq!(i.metadata.depth, 3);
        let i = build_bell_distill(2, 4, false).unwrap();
        assert_eq!(i.metadata.claimed_d, 2 * 3 * 3 + 1);
        assert_eq!(i.metadata.m, 2);
        assert_eq!(i.metadata.depth, 4);
    }

    #[test]
    fn lanes_renumber_registers() {
        let i = build_multiqubit_estp(2, 1, 3).unwrap();
        assert_eq!(i.circuit.geometry, Geometry::Grid { rows: 2, cols: 7 });
        assert_eq!(i.metadata.task_sites, vec![(0, 6), (7, 13)]);
        assert_eq!(i.metadata.n_obs, 4);
        assert_eq!(i.metadata.depth, 3);
        assert!(i.is_self_consistent());
    }

    #[test]
    fn sabotage_transforms() {
        let i = build_estp(2, 4).unwrap();
        let s = sabotage(&i, Sabotage::StripFeedback).unwrap();
        assert_eq!(s.metadata.n_obs, 0);
        let s = sabotage(&i, Sabotage::StretchRegions(1)).unwrap();
        assert_eq!(s.metadata.ell, Some(7));
        assert_eq!(s.metadata.depth, 4);
        assert!(sabotage(&i, Sabotage::ShareMeasurement).is_err());
        let two = build_multiqubit_estp(2, 2, 4).unwrap();
        let s = sabotage(&two, Sabotage::ShareMeasurement).unwrap();
        assert_eq!(s.metadata.n_obs, 4);
    }

    #[test]
    fn json_round_trip_keeps_metadata() {
        let i = build_estp(1, 3).unwrap();
        let back = ProtocolInstance::from_json(&i.to_json()).unwrap();
        assert_eq!(back, i);
        assert!(i.to_json().contains("\"task_sites\""));
    }
}
