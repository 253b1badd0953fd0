use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{evaluate_bound, BoundKind, BoundParams, BoundValue};
use crate::dilation::count_regions_outcomes;
use crate::error::{Error, Result};
use crate::protocols::{ProtocolInstance, TaskCheck, TaskKind};

pub const CSV_HEADER_COMMENT: &str = "# mlr-report-csv v1";

/// Constants the circuit cannot supply.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditConfig {
    pub v: f64,
    /// Constant of the Dicke form.
    pub c: f64,
}

impl Default for AuditConfig {
    fn default() -> Self {
        Self { v: 1.0, c: 0.0 }
    }
}

/// Resources recomputed from the circuit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditedResources {
    pub m: usize,
    pub n_obs: usize,
    /// Measured two-site-gate depth.
    pub depth: usize,
    /// Depth used in the bounds: the larger of `depth` and the build budget.
    pub t: usize,
    pub d_achieved: usize,
    /// Largest gap between the centres of consecutive counted regions,
    /// rounded up; absent with fewer than two regions.
    pub ell: Option<usize>,
    pub q: usize,
    pub n_sites: usize,
    pub dim: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundEntry {
    pub kind: BoundKind,
    pub value: BoundValue,
    /// Quantity compared against `value`.
    pub achieved: f64,
    pub satisfied: bool,
    pub saturated: bool,
    pub asymptotic: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub caveat: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub protocol: String,
    pub task: TaskKind,
    pub params: BTreeMap<String, i64>,
    pub task_passed: bool,
    pub resources: AuditedResources,
    pub bounds: Vec<BoundEntry>,
    /// A bound is violated although the task check passed.
    pub inconsistent: bool,
    pub notes: Vec<String>,
}

/// One line of the CSV report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub protocol: String,
    pub params: String,
    pub task_passed: bool,
    pub m: usize,
    pub n_obs: usize,
    pub depth: usize,
    pub t: usize,
    pub d_achieved: usize,
    pub bound: String,
    pub value_type: String,
    pub value: f64,
    pub achieved: f64,
    pub satisfied: bool,
    pub saturated: bool,
    pub asymptotic: bool,
    pub inconsistent: bool,
}

impl BoundReport {
    pub fn params_string(&self) -> String {
        self.params.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";")
    }

    /// The bound each task is primarily compared with.
    pub fn primary(&self) -> Option<&BoundEntry> {
        let kind = match self.task {
            TaskKind::Teleport => BoundKind::Main,
            TaskKind::BellPair => BoundKind::Bell,
            TaskKind::Ghz => BoundKind::Ghz,
            TaskKind::WState => BoundKind::W,
        };
        self.bounds.iter().find(|b| b.kind == kind)
    }

    pub fn csv_rows(&self) -> Vec<CsvRow> {
        let r = &self.resources;
        self.bounds
            .iter()
            .map(|b| CsvRow {
                protocol: self.protocol.clone(),
                params: self.params_string(),
                task_passed: self.task_passed,
                m: r.m,
                n_obs: r.n_obs,
                depth: r.depth,
                t: r.t,
                d_achieved: r.d_achieved,
                bound: b.kind.name().into(),
                value_type: match b.value {
                    BoundValue::MaxDistance { .. } => "max_distance",
                    BoundValue::MinDepth { .. } => "min_depth",
                    BoundValue::Distance { .. } => "distance",
                    BoundValue::Predicate { .. } => "predicate",
                }
                .into(),
                value: b.value.number(),
                achieved: b.achieved,
                satisfied: b.satisfied,
                saturated: b.saturated,
                asymptotic: b.asymptotic,
                inconsistent: self.inconsistent,
            })
            .collect()
    }
}

fn region_spacing(inst: &ProtocolInstance) -> Result<Option<usize>> {
    let g = &inst.circuit.geometry;
    let rc = count_regions_outcomes(&inst.circuit, inst.metadata.task_sites[0])?;
    // doubled centre column of each region, grouped by row
    let mut rows: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for r in rc.counted() {
        let coords = r.iter().map(|&q| g.coord(q)).collect::<Result<Vec<_>>>()?;
        let row = coords.first().ok_or_else(|| Error::InvalidCircuit("empty region".into()))?.0;
        let lo = coords.iter().map(|c| c.1).min().unwrap_or(0);
        let hi = coords.iter().map(|c| c.1).max().unwrap_or(0);
        rows.entry(row).or_default().insert(lo + hi);
    }
    Ok(rows
        .values()
        .flat_map(|cs| cs.iter().zip(cs.iter().skip(1)).map(|(a, b)| (b - a).div_ceil(2)).collect::<Vec<_>>())
        .max())
}

fn applicable(inst: &ProtocolInstance) -> Vec<BoundKind> {
    use BoundKind::*;
    match inst.metadata.task {
        TaskKind::Teleport => {
            let mut v = vec![Main, Clifford, Generic, Spacing, Multiq, MultiqAdaptive];
            if inst.metadata.params.get("bell_basis") != Some(&1) {
                v.insert(1, Estp);
            }
            v
        }
        TaskKind::BellPair => vec![Bell, Generic],
        TaskKind::Ghz => vec![Ghz, Generic, Adaptive],
        TaskKind::WState => vec![W, Dicke],
    }
}

/// Recomputes the resources of `inst` from its circuit and checks every
/// bound that applies to its task.
pub fn audit_protocol(inst: &ProtocolInstance, check: &TaskCheck, cfg: &AuditConfig) -> Result<BoundReport> {
    let md = &inst.metadata;
    let c = &inst.circuit;
    let &(i, f) = md.task_sites.first().ok_or_else(|| Error::InvalidParams("no task sites".into()))?;
    let rc = count_regions_outcomes(c, (i, f))?;
    let depth = c.depth();
    let g = &c.geometry;
    let res = AuditedResources {
        m: rc.m,
        n_obs: rc.n_obs,
        depth,
        t: depth.max(md.t_budget),
        d_achieved: g.distance(i, f)?,
        ell: region_spacing(inst)?,
        q: md.task_sites.len(),
        n_sites: c.n_physical,
        dim: g.dim(),
    };
    let mut notes = Vec::new();
    if res.t != depth {
        notes.push(format!("depth {depth} below build budget {}; bounds use T = {}", md.t_budget, res.t));
    }
    let p = BoundParams {
        m: Some(res.m as u64),
        m0: Some(md.m0),
        t: Some(res.t as u64),
        t0: Some(md.t0),
        v: Some(cfg.v),
        d: Some(res.d_achieved as u64),
        q: Some(res.q as u64),
        n_obs: Some(res.n_obs as u64),
        dim: Some(res.dim as u64),
        n: Some(res.n_sites as u64),
        c: Some(cfg.c),
        ..Default::default()
    };
    let mut bounds = Vec::new();
    for kind in applicable(inst) {
        let achieved = match kind {
            BoundKind::Spacing => match res.ell {
                Some(l) => l as f64,
                None => continue,
            },
            BoundKind::W => res.n_sites as f64,
            _ => res.d_achieved as f64,
        };
        let asymptotic = kind.is_asymptotic();
        let mut kp = p.clone();
        if asymptotic {
            kp.m0 = None;
            kp.t0 = None;
        }
        let value = evaluate_bound(kind, &kp)?;
        let (satisfied, saturated) = match value {
            BoundValue::MaxDistance { value } => (achieved <= value as f64, achieved == value as f64),
            BoundValue::Predicate { holds, lhs, rhs } => (holds, holds && lhs == rhs),
            BoundValue::MinDepth { value } => (res.t as i64 >= value, res.t as i64 == value),
            BoundValue::Distance { value } => (achieved <= value as f64, achieved == value as f64),
        };
        bounds.push(BoundEntry {
            kind,
            value,
            achieved,
            satisfied,
            saturated: saturated && !asymptotic,
            asymptotic,
            caveat: kind.caveat().map(str::to_owned),
        });
    }
    let inconsistent = check.passed && bounds.iter().any(|b| !b.satisfied);
    if inconsistent {
        let bad: Vec<&str> = bounds.iter().filter(|b| !b.satisfied).map(|b| b.kind.name()).collect();
        notes.push(format!("task passed but violates {}", bad.join(", ")));
    }
    Ok(BoundReport {
        protocol: md.protocol.clone(),
        task: md.task,
        params: md.params.clone(),
        task_passed: check.passed,
        resources: res,
        bounds,
        inconsistent,
        notes,
    })
}
