use std::collections::{BTreeMap, BTreeSet, BinaryHeap};

use crate::circuit::{DilatedCircuit, Op};
use crate::error::{Error, Result};

/// Measurement regions and feedback outcomes of a circuit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegionCount {
    /// Counted regions, excluding those relabeled as the initial/final task
    /// regions.
    pub m: usize,
    /// Registers read by conditioned gates.
    pub n_obs: usize,
    /// Every appended region in order of first appearance.
    pub regions: Vec<BTreeSet<usize>>,
    /// Index in `regions` standing in for the initial task site, if any.
    pub initial: Option<usize>,
    /// Index in `regions` standing in for the final task site, if any.
    pub final_: Option<usize>,
}

impl RegionCount {
    /// Regions that count toward `m`.
    pub fn counted(&self) -> Vec<&BTreeSet<usize>> {
        self.regions
            .iter()
            .enumerate()
            .filter(|(k, _)| Some(*k) != self.initial && Some(*k) != self.final_)
            .map(|(_, r)| r)
            .collect()
    }
}

fn is_measurement(op: &Op) -> bool {
    matches!(op, Op::Measure { .. } | Op::WeakMeasure { .. })
}

/// Support of each measurement after absorbing the gates that only prepare
/// it: single-site gates, and two-site gates whose qubits are all measured
/// next. Returned as `(register, sites)` in op order.
pub fn effective_supports(c: &DilatedCircuit) -> Vec<(usize, BTreeSet<usize>)> {
    let ops: Vec<&Op> = c.ops().collect();
    let qubits: Vec<Vec<usize>> = ops.iter().map(|o| o.qubits()).collect();
    // ops touching each qubit, in order
    let mut touch: Vec<Vec<usize>> = vec![Vec::new(); c.n_physical];
    for (j, qs) in qubits.iter().enumerate() {
        for &q in qs {
            touch[q].push(j);
        }
    }
    // next_measured[q][i]: after op touch[q][i], q is next touched by a
    // measurement rather than by a two-site gate
    let next_measured: Vec<Vec<bool>> = touch
        .iter()
        .map(|list| {
            let mut state = false;
            let mut out = vec![false; list.len()];
            for (i, &j) in list.iter().enumerate().rev() {
                out[i] = state;
                if is_measurement(ops[j]) {
                    state = true;
                } else if ops[j].is_two_site_gate() {
                    state = false;
                }
            }
            out
        })
        .collect();
    let pos = |q: usize, j: usize| touch[q].partition_point(|&x| x < j);
    let mut out = Vec::new();
    for (k, op) in ops.iter().enumerate() {
        let reg = match op {
            Op::Measure { reg, .. } | Op::WeakMeasure { reg, .. } => *reg,
            _ => continue,
        };
        let mut region: BTreeSet<usize> = qubits[k].iter().copied().collect();
        // (op index, qubit, position of the op in touch[qubit])
        let mut heap = BinaryHeap::new();
        let push_before = |heap: &mut BinaryHeap<(usize, usize, usize)>, q: usize, j: usize| {
            let i = pos(q, j);
            if i > 0 {
                heap.push((touch[q][i - 1], q, i - 1));
            }
        };
        for &q in &qubits[k] {
            push_before(&mut heap, q, k);
        }
        let mut last = None;
        while let Some((j, q, i)) = heap.pop() {
            if i > 0 {
                heap.push((touch[q][i - 1], q, i - 1));
            }
            if last == Some(j) {
                continue;
            }
            last = Some(j);
            let o = ops[j];
            if is_measurement(o) || qubits[j].len() == 1 {
                continue;
            }
            let all_next = qubits[j].iter().all(|&p| next_measured[p][pos(p, j)]);
            if !all_next {
                break;
            }
            for &p in &qubits[j] {
                if region.insert(p) {
                    push_before(&mut heap, p, j);
                }
            }
        }
        out.push((reg, region));
    }
    out
}

/// Applies the region-appending rule: a measurement's region is skipped if
/// it equals, or is a proper subset of, one already present. Regions holding
/// the task sites `i` and `f` stand in for the initial and final regions and
/// are not counted.
pub fn count_regions_outcomes(c: &DilatedCircuit, task_sites: (usize, usize)) -> Result<RegionCount> {
    let n = c.geometry.n_sites();
    for s in [task_sites.0, task_sites.1] {
        if s >= n {
            return Err(Error::SiteOutsideGeometry { site: s, n });
        }
    }
    let mut regions: Vec<BTreeSet<usize>> = Vec::new();
    // regions containing each site
    let mut holding: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (_, r) in effective_supports(c) {
        let known = match r.first() {
            Some(first) => holding.get(first).is_some_and(|ks| ks.iter().any(|&k| r.is_subset(&regions[k]))),
            None => !regions.is_empty(),
        };
        if known {
            continue;
        }
        for &q in &r {
            holding.entry(q).or_default().push(regions.len());
        }
        regions.push(r);
    }
    let initial = regions.iter().position(|r| r.contains(&task_sites.0));
    let final_ = regions
        .iter()
        .enumerate()
        .position(|(k, r)| Some(k) != initial && r.contains(&task_sites.1))
        .or_else(|| initial.filter(|&k| regions[k].contains(&task_sites.1)));
    let relabeled = [initial, final_].iter().flatten().collect::<BTreeSet<_>>().len();
    Ok(RegionCount {
        m: regions.len() - relabeled,
        n_obs: c.feedback_registers().len(),
        regions,
        initial,
        final_,
    })
}
