use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use mlr_core::bounds::{
    audit_protocol, evaluate_bound, AuditConfig, BoundKind, BoundParams, BoundReport, BoundValue, CsvRow,
    CSV_HEADER_COMMENT,
};
use mlr_core::dense::DenseOptions;
use mlr_core::heisenberg::{anticommutation_front, evolve_logical_traced, verify_logical_action, LightconeReport, LogicalPair};
use mlr_core::protocols::{
    build_bell_distill, build_estp_with, build_ghz_1d, build_multiqubit_estp, build_stp, build_w_state, check_dilated,
    check_sampled, check_task, heisenberg_verdict, sabotage, Backend, EstpOptions, ProtocolInstance, ProtocolMetadata,
    Sabotage, TaskCheck, TaskKind, WMode,
};
use mlr_core::sim_stabilizer::{averaged_bloch, enumerate_trajectories, pauli_eigenstate};
use mlr_core::{Pauli, Tableau};
use rayon::prelude::*;
use serde::Serialize;

use crate::args::*;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_TASK_FAILED: i32 = 2;
pub const EXIT_INCONSISTENT: i32 = 3;

/// Anything that stops a command before it has a verdict; exits with 1.
#[derive(Debug)]
pub struct Failure(pub String);

impl From<mlr_core::Error> for Failure {
    fn from(e: mlr_core::Error) -> Self {
        Self(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Self(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Self(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Self(e.to_string())
    }
}

type Res<T> = Result<T, Failure>;

fn require(v: Option<usize>, p: ProtocolName, flag: &str) -> Res<usize> {
    v.ok_or_else(|| Failure(format!("{} needs --{flag}", protocol_label(p))))
}

fn protocol_label(p: ProtocolName) -> &'static str {
    match p {
        ProtocolName::Stp => "stp",
        ProtocolName::Estp => "estp",
        ProtocolName::Bell => "bell",
        ProtocolName::Ghz => "ghz",
        ProtocolName::W => "w",
        ProtocolName::MultiEstp => "multi-estp",
    }
}

fn apply_sabotage(inst: ProtocolInstance, s: Option<SabotageArg>) -> Res<ProtocolInstance> {
    let Some(s) = s else { return Ok(inst) };
    let s = match s {
        SabotageArg::StripFeedback => Sabotage::StripFeedback,
        SabotageArg::StretchRegions(k) => Sabotage::StretchRegions(k),
        SabotageArg::ShareMeasurement => Sabotage::ShareMeasurement,
    };
    Ok(sabotage(&inst, s)?)
}

pub fn build_instance(p: ProtocolName, a: &InstanceArgs) -> Res<ProtocolInstance> {
    let inst = match p {
        ProtocolName::Stp => build_stp()?,
        ProtocolName::Estp => build_estp_with(
            require(a.m, p, "m")?,
            require(a.t, p, "t")?,
            EstpOptions { bell_basis: a.bell_basis, extra_spacing: a.extra_spacing },
        )?,
        ProtocolName::Bell => build_bell_distill(require(a.m, p, "m")?, require(a.t, p, "t")?, a.flip)?,
        ProtocolName::Ghz => build_ghz_1d(require(a.m, p, "m")?, require(a.ell, p, "ell")?)?,
        ProtocolName::W => {
            let mode = match a.w_mode {
                WModeArg::Unitary => WMode::Unitary,
                WModeArg::Estp => WMode::Estp,
            };
            build_w_state(require(a.n, p, "n")?, mode)?
        }
        ProtocolName::MultiEstp => {
            build_multiqubit_estp(require(a.q, p, "q")?, require(a.m, p, "m")?, require(a.t, p, "t")?)?
        }
    };
    apply_sabotage(inst, a.sabotage)
}

fn load_or_build(protocol: Option<ProtocolName>, circuit: &Option<PathBuf>, a: &InstanceArgs) -> Res<ProtocolInstance> {
    match (protocol, circuit) {
        (_, Some(path)) => {
            let text = fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
            apply_sabotage(ProtocolInstance::from_json(&text)?, a.sabotage)
        }
        (Some(p), None) => build_instance(p, a),
        (None, None) => Err(Failure("give a protocol or --circuit".into())),
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Res<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure(format!("{}: {e}", path.display()))),
        None => {
            let mut s = io::stdout().lock();
            s.write_all(text.as_bytes())?;
            Ok(s.flush()?)
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> Res<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn to_csv(rows: &[CsvRow]) -> Res<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let body = w.into_inner().map_err(|e| Failure(e.to_string()))?;
    Ok(format!("{CSV_HEADER_COMMENT}\n{}", String::from_utf8_lossy(&body)))
}

pub fn cmd_build(a: &BuildArgs) -> Res<i32> {
    let inst = build_instance(a.protocol, &a.inst)?;
    emit(&a.out, &(inst.to_json() + "\n"))?;
    Ok(EXIT_OK)
}

fn backend_for(exec: &ExecArgs) -> Res<Backend> {
    let b = match (exec.mode, exec.backend) {
        (ModeArg::ExplicitDilation, None | Some(BackendArg::Dense)) => return Ok(Backend::Dense),
        (ModeArg::ExplicitDilation, Some(_)) => {
            return Err(Failure("explicit-dilation runs on the dense backend only".into()));
        }
        (_, b) => b.unwrap_or(BackendArg::Stabilizer),
    };
    Ok(match b {
        BackendArg::Stabilizer => Backend::Stabilizer,
        BackendArg::Dense => Backend::Dense,
        BackendArg::Both => Backend::Both,
    })
}

fn backend_label(b: Backend) -> &'static str {
    match b {
        Backend::Stabilizer => "stabilizer",
        Backend::Dense => "dense",
        Backend::Both => "both",
    }
}

fn mode_label(m: ModeArg) -> &'static str {
    match m {
        ModeArg::Trajectory => "trajectory",
        ModeArg::Enumerate => "enumerate",
        ModeArg::ExplicitDilation => "explicit-dilation",
    }
}

/// Task check in the requested mode, with the sampled outcomes in
/// trajectory mode.
fn execute(inst: &ProtocolInstance, exec: &ExecArgs) -> Res<(TaskCheck, Option<Vec<u8>>)> {
    let backend = backend_for(exec)?;
    Ok(match exec.mode {
        ModeArg::Enumerate => (check_task(inst, backend, exec.max_branches)?, None),
        ModeArg::Trajectory => {
            let (chk, outcomes) = check_sampled(inst, backend, exec.seed)?;
            (chk, Some(outcomes))
        }
        ModeArg::ExplicitDilation => {
            let opts = DenseOptions { qubit_budget: exec.qubit_budget, max_branches: exec.max_branches };
            (check_dilated(inst, opts)?, None)
        }
    })
}

fn verdict(chk: &TaskCheck, report: &BoundReport) -> i32 {
    if !chk.passed {
        EXIT_TASK_FAILED
    } else if report.inconsistent {
        EXIT_INCONSISTENT
    } else {
        EXIT_OK
    }
}

#[derive(Serialize)]
struct RunReport {
    protocol: String,
    backend: &'static str,
    mode: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    metadata: ProtocolMetadata,
    check: TaskCheck,
    #[serde(skip_serializing_if = "Option::is_none")]
    outcomes: Option<Vec<u8>>,
    /// Outcome-averaged Bloch vector at each lane's target for a `+Z`
    /// input (teleportation, enumerate mode).
    #[serde(skip_serializing_if = "Option::is_none")]
    averaged_bloch: Option<Vec<[f64; 3]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    heisenberg_verdict: Option<bool>,
    report: BoundReport,
    exit_code: i32,
}

fn plus_z_bloch(inst: &ProtocolInstance, max_branches: usize) -> Res<Vec<[f64; 3]>> {
    let c = &inst.circuit;
    let n = c.n_physical;
    let mut out = Vec::new();
    for &(i, f) in &inst.metadata.task_sites {
        let recs = enumerate_trajectories(c, &pauli_eigenstate(n, i, Pauli::Z, true)?, max_branches)?;
        out.push(averaged_bloch(&recs, f)?);
    }
    Ok(out)
}

fn audit_config(exec: &ExecArgs) -> AuditConfig {
    AuditConfig { v: exec.v, c: exec.c }
}

pub fn cmd_run(a: &RunArgs) -> Res<i32> {
    let inst = load_or_build(a.protocol, &a.circuit, &a.inst)?;
    let exec = &a.exec;
    let (check, outcomes) = execute(&inst, exec)?;
    let report = audit_protocol(&inst, &check, &audit_config(exec))?;
    let code = verdict(&check, &report);
    let teleport_clifford = inst.metadata.task == TaskKind::Teleport && inst.circuit.is_clifford();
    let text = match exec.format {
        FormatArg::Csv => to_csv(&report.csv_rows())?,
        FormatArg::Json => {
            let averaged_bloch = match exec.mode {
                ModeArg::Enumerate if teleport_clifford => Some(plus_z_bloch(&inst, exec.max_branches)?),
                _ => None,
            };
            to_json(&RunReport {
                protocol: inst.metadata.protocol.clone(),
                backend: backend_label(backend_for(exec)?),
                mode: mode_label(exec.mode),
                seed: (exec.mode == ModeArg::Trajectory).then_some(exec.seed),
                metadata: inst.metadata.one_based(),
                check,
                outcomes,
                averaged_bloch,
                heisenberg_verdict: teleport_clifford.then(|| heisenberg_verdict(&inst)),
                report,
                exit_code: code,
            })?
        }
    };
    emit(&exec.out, &text)?;
    Ok(code)
}

fn grid(g: &Option<Grid>) -> Vec<Option<usize>> {
    match g {
        Some(Grid(v)) => v.iter().copied().map(Some).collect(),
        None => vec![None],
    }
}

/// Grid points in row-major order of `m, t, ell, q, n, w_mode`.
fn grid_points(a: &SweepArgs) -> Vec<InstanceArgs> {
    let mut out = Vec::new();
    for m in grid(&a.m) {
        for t in grid(&a.t) {
            for ell in grid(&a.ell) {
                for q in grid(&a.q) {
                    for n in grid(&a.n) {
                        for &w_mode in &a.w_mode {
                            out.push(InstanceArgs {
                                m,
                                t,
                                ell,
                                q,
                                n,
                                bell_basis: a.bell_basis,
                                extra_spacing: a.extra_spacing,
                                flip: a.flip,
                                w_mode,
                                sabotage: a.sabotage,
                            });
                        }
                    }
                }
            }
        }
    }
    out
}

#[derive(Serialize)]
struct SweepPoint {
    check: TaskCheck,
    report: BoundReport,
}

pub fn cmd_sweep(a: &SweepArgs) -> Res<i32> {
    let points = grid_points(a);
    let exec = &a.exec;
    let cfg = audit_config(exec);
    // collect keeps grid order regardless of scheduling
    let results: Vec<SweepPoint> = points
        .par_iter()
        .map(|p| {
            let inst = build_instance(a.protocol, p)?;
            let (check, _) = execute(&inst, exec)?;
            let report = audit_protocol(&inst, &check, &cfg)?;
            Ok(SweepPoint { check, report })
        })
        .collect::<Res<_>>()?;
    let code = if results.iter().any(|r| verdict(&r.check, &r.report) == EXIT_INCONSISTENT) {
        EXIT_INCONSISTENT
    } else if results.iter().any(|r| !r.check.passed) {
        EXIT_TASK_FAILED
    } else {
        EXIT_OK
    };
    let text = match exec.format {
        FormatArg::Json => to_json(&results)?,
        FormatArg::Csv => {
            let rows: Vec<CsvRow> = results
                .iter()
                .flat_map(|r| {
                    let primary = r.report.primary().map(|b| b.kind.name());
                    r.report.csv_rows().into_iter().filter(move |row| Some(row.bound.as_str()) == primary)
                })
                .collect();
            to_csv(&rows)?
        }
    };
    emit(&exec.out, &text)?;
    Ok(code)
}

#[derive(Serialize)]
struct BoundOutput {
    kind: &'static str,
    params: BoundParams,
    value: BoundValue,
    asymptotic: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    caveat: Option<&'static str>,
}

pub fn cmd_bound(a: &BoundArgs) -> Res<i32> {
    let kind: BoundKind = a.kind.parse()?;
    let params = BoundParams {
        m: a.m,
        m0: a.m0,
        t: a.t,
        t0: a.t0,
        v: a.v,
        d: a.d,
        q: a.q,
        n_obs: a.n_obs,
        n_obs0: a.n_obs0,
        dim: a.dim,
        alpha: a.alpha,
        nu: a.nu,
        d_x: a.d_x,
        d_z: a.d_z,
        n: a.n,
        c: a.c,
        m0_prime: a.m0_prime,
        t0_prime: a.t0_prime,
    };
    let value = evaluate_bound(kind, &params)?;
    let out = BoundOutput { kind: kind.name(), params, value, asymptotic: kind.is_asymptotic(), caveat: kind.caveat() };
    emit(&a.out, &to_json(&out)?)?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct LightconeOutput {
    protocol: String,
    lane: usize,
    initial_site: usize,
    final_site: usize,
    /// Logicals at the start that act as `X`, `Z` at the final site.
    x_logical: String,
    z_logical: String,
    /// Furthest site where the pulled-back pair still anticommutes.
    front: usize,
    verified: bool,
    trace: LightconeReport,
}

pub fn cmd_lightcone(a: &LightconeArgs) -> Res<i32> {
    let inst = load_or_build(a.protocol, &a.circuit, &a.inst)?;
    let sites = &inst.metadata.task_sites;
    let &(i, f) = sites
        .get(a.lane)
        .ok_or_else(|| Failure(format!("lane {} out of range ({} lanes)", a.lane, sites.len())))?;
    let c = &inst.circuit;
    let n = c.n_physical;
    let (back, trace) = evolve_logical_traced(c, &LogicalPair::at_site(n, f)?)?;
    let front = anticommutation_front(&back, &c.geometry)?;
    let out = LightconeOutput {
        protocol: inst.metadata.protocol.clone(),
        lane: a.lane,
        initial_site: i + 1,
        final_site: f + 1,
        x_logical: back.x_logical.to_string(),
        z_logical: back.z_logical.to_string(),
        front: front + 1,
        verified: verify_logical_action(&Tableau::new(n), &back, i),
        trace,
    };
    emit(&a.out, &to_json(&out)?)?;
    Ok(EXIT_OK)
}

pub fn run(cli: &Cli) -> Res<i32> {
    match &cli.command {
        Command::Build(a) => cmd_build(a),
        Command::Run(a) => cmd_run(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Bound(a) => cmd_bound(a),
        Command::Lightcone(a) => cmd_lightcone(a),
    }
}
