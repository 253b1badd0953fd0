use mlr_core::bounds::*;
use mlr_core::protocols::*;
use proptest::prelude::*;

const BRANCHES: usize = 1 << 16;

fn params() -> impl Strategy<Value = BoundParams> {
    (
        (0..40u64, 0..4i64, 1..40u64, -1..3i64, 0.5..3.0f64, 1..6u64, 0..80u64, 0..5i64),
        (1..4u64, 0.0..3.0f64, 0.0..1.0f64, 1..100u64, 1..100u64, 1..2000u64, 0.0..2.0f64, (0..3i64, -1..3i64)),
    )
        .prop_map(|((m, m0, t, t0, v, q, n_obs, n_obs0), (dim, alpha, nu, d_x, d_z, n, c, (m0p, t0p)))| BoundParams {
            m: Some(m),
            m0: Some(m0),
            t: Some(t),
            t0: Some(t0),
            v: Some(v),
            d: None,
            q: Some(q),
            n_obs: Some(n_obs),
            n_obs0: Some(n_obs0),
            dim: Some(dim),
            alpha: Some(alpha),
            nu: Some(nu),
            d_x: Some(d_x),
            d_z: Some(d_z),
            n: Some(n),
            c: Some(c),
            m0_prime: Some(m0p),
            t0_prime: Some(t0p),
        })
}

/// `Some(ordering)` where `a <= b` means "b is at least as permissive".
fn at_most(a: BoundValue, b: BoundValue) -> bool {
    match (a, b) {
        (BoundValue::MaxDistance { value: x }, BoundValue::MaxDistance { value: y })
        | (BoundValue::Distance { value: x }, BoundValue::Distance { value: y }) => x <= y,
        // a smaller required depth is more permissive
        (BoundValue::MinDepth { value: x }, BoundValue::MinDepth { value: y }) => x >= y,
        (BoundValue::Predicate { holds: x, .. }, BoundValue::Predicate { holds: y, .. }) => !x || y,
        _ => false,
    }
}

fn eval(kind: BoundKind, p: &BoundParams) -> Option<BoundValue> {
    match evaluate_bound(kind, p) {
        Ok(v) => Some(v),
        Err(e) => {
            assert!(kind == BoundKind::Code && p.m == Some(0), "{kind}: {e}");
            None
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn bounds_are_monotone(p in params()) {
        for kind in BoundKind::ALL {
            let Some(base) = eval(kind, &p) else { continue };
            let mut more_m = p.clone();
            more_m.m = p.m.map(|m| m + 1);
            let mut more_t = p.clone();
            more_t.t = p.t.map(|t| t + 1);
            let mut more_obs = p.clone();
            more_obs.n_obs = p.n_obs.map(|x| x + 1);
            for bigger in [more_m, more_t, more_obs] {
                let v = eval(kind, &bigger).unwrap();
                prop_assert!(at_most(base, v), "{kind}: {base:?} then {v:?}");
            }
            let mut more_q = p.clone();
            more_q.q = p.q.map(|q| q + 1);
            let v = eval(kind, &more_q).unwrap();
            prop_assert!(at_most(v, base), "{kind} in Q: {base:?} then {v:?}");
        }
    }

    #[test]
    fn implicit_solutions_are_thresholds(p in params()) {
        let (m, vt) = (p.m.unwrap() as f64, p.v.unwrap() * p.t.unwrap() as f64);
        let dim = p.dim.unwrap() as f64;
        let k = (p.n_obs.unwrap() / p.q.unwrap()) as f64;
        let forms: [(BoundKind, Box<dyn Fn(f64) -> f64>); 4] = [
            (BoundKind::Adaptive, Box::new(move |d: f64| 2.0 * (m + 1.0) * (vt + (dim - 1.0) * d.log2()))),
            (BoundKind::Dicke, Box::new({ let c = p.c.unwrap(); move |d: f64| 2.0 * (m + 1.0) * (vt + (3.0 * dim - 1.0) * d.log2() + c) })),
            (BoundKind::Critical, Box::new({ let a = p.alpha.unwrap(); move |d: f64| 2.0 * (m + 1.0) * (vt + (a + dim - 1.0) * d.log2()) })),
            (BoundKind::MultiqAdaptive, Box::new(move |d: f64| 2.0 * (k + 1.0) * (vt + (dim - 1.0) * d.log2()))),
        ];
        for (kind, rhs) in forms {
            let BoundValue::MaxDistance { value } = evaluate_bound(kind, &p).unwrap() else { panic!() };
            prop_assert!(value >= 1);
            let d = value as f64;
            prop_assert!(d <= rhs(d) + 1e-9, "{kind}: {d} > {}", rhs(d));
            prop_assert!(d + 1.0 > rhs(d + 1.0) + 1e-9, "{kind}: {} <= {}", d + 1.0, rhs(d + 1.0));
        }
    }
}

#[test]
fn documented_values() {
    let main = BoundParams { m: Some(2), m0: Some(1), v: Some(1.0), t: Some(4), t0: Some(-1), ..Default::default() };
    assert_eq!(evaluate_bound(BoundKind::Main, &main).unwrap(), BoundValue::MaxDistance { value: 15 });
    let estp = BoundParams { m: Some(0), t: Some(4), ..Default::default() };
    assert_eq!(evaluate_bound(BoundKind::Estp, &estp).unwrap(), BoundValue::MaxDistance { value: 4 });
    for n in [3, 7, 12] {
        let qrc = BoundParams { d_x: Some(n), d_z: Some(1), dim: Some(1), ..Default::default() };
        assert_eq!(evaluate_bound(BoundKind::Css, &qrc).unwrap(), BoundValue::Distance { value: n as i64 });
    }
    let w = BoundParams { m: Some(0), v: Some(1.0), t: Some(11), n: Some(16), ..Default::default() };
    assert!(matches!(evaluate_bound(BoundKind::W, &w).unwrap(), BoundValue::Predicate { holds: true, .. }));
}

#[test]
fn solver_returns_zero_when_one_site_is_too_far() {
    assert_eq!(solve_implicit(|_| 0.5).unwrap(), 0);
    assert_eq!(solve_implicit(|d| 10.0 + d.log2()).unwrap(), 13);
}

fn audit(inst: &ProtocolInstance) -> BoundReport {
    let chk = check_task(inst, Backend::Stabilizer, BRANCHES).unwrap();
    audit_protocol(inst, &chk, &AuditConfig::default()).unwrap()
}

#[test]
fn passing_builders_never_violate_their_bounds() {
    let mut insts = corpus().unwrap();
    for m in 0..=3 {
        for t in 3..=6 {
            insts.push(build_estp(m, t).unwrap());
            insts.push(build_bell_distill(m, t, false).unwrap());
        }
        for t in 1..=4 {
            insts.push(build_estp_with(m, t, EstpOptions { bell_basis: true, extra_spacing: 0 }).unwrap());
        }
        for ell in [2, 4, 6] {
            insts.push(build_ghz_1d(m, ell).unwrap());
        }
    }
    insts.push(build_multiqubit_estp(2, 2, 4).unwrap());
    for inst in &insts {
        let r = audit(inst);
        let sabotaged = inst.metadata.notes.iter().any(|n| n.starts_with("sabotaged"));
        assert_eq!(r.task_passed, !sabotaged, "{} {:?}", r.protocol, r.params);
        assert!(!r.inconsistent, "{} {:?}: {:?}", r.protocol, r.params, r.notes);
    }
    for n in 1..=4 {
        for mode in [WMode::Unitary, WMode::Estp] {
            let inst = build_w_state(n, mode).unwrap();
            let chk = check_w_dense(&inst, BRANCHES).unwrap();
            let r = audit_protocol(&inst, &chk, &AuditConfig::default()).unwrap();
            assert!(r.task_passed && !r.inconsistent, "W n={n} {mode:?}: {:?}", r.notes);
        }
    }
}

#[test]
fn estp_saturates_main_bound_with_offsets() {
    for m in 0..=4 {
        for t in 3..=6 {
            let r = audit(&build_estp(m, t).unwrap());
            let main = r.primary().unwrap();
            assert_eq!(r.resources.d_achieved, (2 * m + 1) * (t - 1));
            assert!(main.saturated, "M={m} T={t}: {main:?}");
        }
    }
}

#[test]
fn ghz_fig_instance_is_within_bound() {
    let r = audit(&build_ghz_1d(3, 4).unwrap());
    let ghz = r.primary().unwrap();
    assert!(r.task_passed && ghz.satisfied);
    assert_eq!(r.resources.n_sites, 16);
    assert_eq!(ghz.value, BoundValue::MaxDistance { value: 2 * 4 * r.resources.t as i64 });
}

#[test]
fn sabotage_fails_the_task_whenever_it_breaks_a_bound() {
    let base = build_estp(2, 4).unwrap();
    let two = build_multiqubit_estp(2, 2, 4).unwrap();
    for (inst, s) in [
        (&base, Sabotage::StripFeedback),
        (&base, Sabotage::StretchRegions(1)),
        (&base, Sabotage::StretchRegions(3)),
        (&two, Sabotage::ShareMeasurement),
    ] {
        let r = audit(&sabotage(inst, s).unwrap());
        assert!(!r.task_passed, "{s:?}");
        assert!(!r.inconsistent);
    }
    let r = audit(&sabotage(&two, Sabotage::ShareMeasurement).unwrap());
    let multiq = r.bounds.iter().find(|b| b.kind == BoundKind::Multiq).unwrap();
    assert!(!multiq.satisfied, "{multiq:?}");
}

#[test]
fn reports_serialize() {
    let r = audit(&build_estp(1, 3).unwrap());
    let back: BoundReport = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
    assert_eq!(back, r);
    assert!(r.csv_rows().iter().all(|row| row.protocol == "estp" && row.task_passed));
}
