//! Acceptance criteria 1 to 10. Runs without the test harness so that each
//! criterion prints one line `criterion N: PASS|FAIL (...)`; the process
//! fails if any criterion does.

#[path = "../../core/tests/support/mod.rs"]
mod support;

use std::process::Command;
use std::time::{Duration, Instant};

use bifrac::harness::*;
use bifrac::*;

fn line(n: u32, pass: bool, elapsed: Duration, limit: Duration, detail: &str) -> bool {
    let ok = pass && elapsed <= limit;
    let verdict = if ok { "PASS" } else { "FAIL" };
    println!(
        "criterion {n}: {verdict} ({detail}; {:.2}s of {}s)",
        elapsed.as_secs_f64(),
        limit.as_secs()
    );
    ok
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn failures(reports: &[Report]) -> usize {
    reports.iter().filter(|r| !r.pass).count()
}

fn criterion_01_one_third_trick() -> bool {
    let t = Instant::now();
    let mut reports = one_third_reports(7, 1, 1000);
    reports.extend(one_third_reports(7, 2, 200));
    let worst = reports.iter().map(|r| r.lhs).fold(0.0, f64::max);
    let bad = failures(&reports);
    line(
        1,
        bad == 0,
        t.elapsed(),
        secs(5),
        &format!(
            "{} cubes, {bad} failures, worst side ratio {worst:.3}",
            reports.len()
        ),
    )
}

fn criterion_02_sparse_decomposition() -> bool {
    let t = Instant::now();
    let mut reports = sparse_reports(7, 1, 100);
    reports.extend(sparse_reports(7, 2, 20));
    let bad = failures(&reports);
    line(
        2,
        bad == 0,
        t.elapsed(),
        secs(60),
        &format!(
            "{} decompositions, {bad} with a failed invariant",
            reports.len()
        ),
    )
}

fn criterion_03_power_scaling_identity() -> bool {
    let t = Instant::now();
    let reports = power_scaling_reports(7, 100);
    let worst = reports
        .iter()
        .map(|r| support::rel(r.lhs, r.rhs))
        .fold(0.0, f64::max);
    line(
        3,
        failures(&reports) == 0,
        t.elapsed(),
        secs(5),
        &format!("100 functions, worst relative gap {worst:.2e}"),
    )
}

fn criterion_04_quadrature_oracles() -> bool {
    let t = Instant::now();
    let (b1, b2) = (
        support::bilinear_origin_error(256),
        support::bilinear_origin_error(1024),
    );
    let (i1, i2) = (support::riesz_error(256), support::riesz_error(1024));
    let pass = b1 <= 0.02 && b2 <= 0.005 && i1 <= 0.02 && i2 <= 0.005 && b2 < b1 && i2 < i1;
    line(
        4,
        pass,
        t.elapsed(),
        secs(30),
        &format!("bilinear {b1:.2e} -> {b2:.2e}, Riesz {i1:.2e} -> {i2:.2e}"),
    )
}

fn criterion_05_maximal_operator_enumeration() -> bool {
    let t = Instant::now();
    let d = support::maximal_discrepancies();
    let worst = d.iter().map(|x| x.1).fold(0.0, f64::max);
    line(
        5,
        worst <= 1e-12,
        t.elapsed(),
        secs(30),
        &format!("{} operators, worst relative gap {worst:.2e}", d.len()),
    )
}

/// Every constant of `ω ≡ 1` on the unit box `[-1/2, 1/2)`.
fn unit_constants() -> Vec<(&'static str, f64)> {
    let spec = GridSpec::new(1, 0.5, 32).unwrap();
    let idx = FamilyIndex::new(CubeFamily::lattice(spec));
    let pairs = PairFamily::nested(&idx);
    let one = GridFunction::constant(spec, 1.0);
    let wv = WeightVector::new(one.clone(), one.clone()).unwrap();
    vec![
        ("A_p", ap_constant(&one, 2.0, &idx).unwrap().value),
        ("A_(p,q)", apq_constant(&one, 2.0, 4.0, &idx).unwrap().value),
        (
            "multiple A_(P,q)",
            multiple_apq_constant(&wv, 2.0, 3.0, 1.5, &idx)
                .unwrap()
                .value,
        ),
        (
            "pair constant",
            iida_constant(&wv, 4.0, 1.5, 2.0, 3.0, &pairs, &idx)
                .unwrap()
                .value,
        ),
        (
            "two-weight",
            two_weight_constant(&one, &wv, 4.0, 1.5, 2.0, 3.0, &pairs, &idx, None)
                .unwrap()
                .value,
        ),
        (
            "two-weight with r0",
            two_weight_constant(&one, &wv, 4.0, 1.5, 2.0, 3.0, &pairs, &idx, Some(6.0))
                .unwrap()
                .value,
        ),
    ]
}

/// Scaling weights by constants leaves the one-weight constants unchanged
/// and scales the two-weight ones by `c_v / (c_1 c_2)`.
fn homogeneity_gaps() -> Vec<f64> {
    let spec = GridSpec::new(1, 1.0, 32).unwrap();
    let idx = FamilyIndex::new(CubeFamily::lattice(spec));
    let pairs = PairFamily::nested(&idx);
    let w1 = support::step_weight(spec, &[1.0, 3.0, 0.5, 2.0]);
    let w2 = support::step_weight(spec, &[0.25, 1.0, 4.0, 1.5, 1.0, 0.75, 2.0, 1.0]);
    let v = support::step_weight(spec, &[2.0, 1.0]);
    let (c1, c2, cv) = (3.7, 0.02, 55.0);
    let wv = WeightVector::new(w1.clone(), w2.clone()).unwrap();
    let sv = WeightVector::new(w1.scale(c1), w2.scale(c2)).unwrap();
    let (p1, p2, q, q0) = (1.6, 2.4, 1.3, 3.0);
    let two = |v: &GridFunction, wv: &WeightVector| {
        two_weight_constant(v, wv, q0, q, p1, p2, &pairs, &idx, None)
            .unwrap()
            .value
    };
    vec![
        support::rel(
            ap_constant(&w1, 2.5, &idx).unwrap().value,
            ap_constant(&w1.scale(c1), 2.5, &idx).unwrap().value,
        ),
        support::rel(
            apq_constant(&w2, 2.0, 4.0, &idx).unwrap().value,
            apq_constant(&w2.scale(c2), 2.0, 4.0, &idx).unwrap().value,
        ),
        support::rel(
            multiple_apq_constant(&wv, p1, p2, q, &idx).unwrap().value,
            multiple_apq_constant(&sv, p1, p2, q, &idx).unwrap().value,
        ),
        support::rel(
            iida_constant(&wv, q0, q, p1, p2, &pairs, &idx)
                .unwrap()
                .value,
            iida_constant(&sv, q0, q, p1, p2, &pairs, &idx)
                .unwrap()
                .value,
        ),
        support::rel(two(&v, &wv) * cv / (c1 * c2), two(&v.scale(cv), &sv)),
    ]
}

fn criterion_06_weight_constants() -> bool {
    let t = Instant::now();
    let units = unit_constants();
    let unit_gap = units
        .iter()
        .map(|(_, v)| (v - 1.0).abs())
        .fold(0.0, f64::max);
    let enumerated = support::weight_discrepancies()
        .iter()
        .map(|x| x.1)
        .fold(0.0, f64::max);
    let homogeneity = homogeneity_gaps().into_iter().fold(0.0, f64::max);
    let pass = unit_gap <= 1e-12 && enumerated <= 1e-12 && homogeneity <= 1e-12;
    line(
        6,
        pass,
        t.elapsed(),
        secs(30),
        &format!(
            "ω ≡ 1 gap {unit_gap:.1e} over {} constants, enumeration gap {enumerated:.1e}, homogeneity gap {homogeneity:.1e}",
            units.len()
        ),
    )
}

fn default_spec() -> GridSpec {
    GridSpec::new(1, 2.0, 64).unwrap()
}

fn criterion_07_pointwise_domination() -> bool {
    let t = Instant::now();
    let spec = default_spec();
    let ctx = Context::for_spec(spec, DEFAULT_CUBE_CAP);
    // 5 calibration and 13 held-out items per kind: 20 and 52
    let mut parts = Vec::new();
    let mut pass = true;
    for tag in [TheoremTag::T11, TheoremTag::T41, TheoremTag::T42] {
        let p = example_profiles(tag)[0];
        let kind = Domination::for_tag(tag).unwrap();
        let sc = Scenario::build(
            7,
            spec,
            &CorpusKind::ALL,
            5,
            13,
            &CorpusConfig::for_profile(&p),
        );
        let r = verify_pointwise_domination(&p, kind, &sc, &ctx, MARGIN).unwrap();
        pass &= r.all_pass() && r.reports.len() >= 50;
        parts.push(format!(
            "{} {}/{} max {:.2} of {:.2}",
            kind.name(),
            r.reports.len() - failures(&r.reports),
            r.reports.len(),
            r.max_ratio(),
            r.bound
        ));
    }
    let p = example_profiles(TheoremTag::T11)[0];
    let local_kinds = [
        CorpusKind::Indicators,
        CorpusKind::RandomSteps,
        CorpusKind::Spikes,
    ];
    let (lspec, q0) = local_sparse_setup();
    let sc = Scenario::build(7, lspec, &local_kinds, 7, 17, &CorpusConfig::default());
    let r = verify_local_sparse(&p, &sc, lspec, &q0, MARGIN).unwrap();
    pass &= r.all_pass();
    parts.push(format!(
        "local sparse {}/{} max {:.2} of {:.2}",
        r.reports.len() - failures(&r.reports),
        r.reports.len(),
        r.max_ratio(),
        r.bound
    ));
    let sc = Scenario::build(
        7,
        spec,
        &CorpusKind::ALL,
        5,
        13,
        &CorpusConfig::for_profile(&p),
    );
    let r = verify_global_term(&p, &sc, &global_term_root(), &ctx, MARGIN).unwrap();
    pass &= r.all_pass();
    parts.push(format!(
        "global term {}/{} max {:.2} of {:.2}",
        r.reports.len() - failures(&r.reports),
        r.reports.len(),
        r.max_ratio(),
        r.bound
    ));
    line(7, pass, t.elapsed(), secs(120), &parts.join("; "))
}

fn criterion_08_theorem_ratio_suites() -> bool {
    let t = Instant::now();
    let spec = default_spec();
    let ctx = Context::for_spec(spec, DEFAULT_CUBE_CAP);
    let mut pass = true;
    let mut suites = 0;
    let mut judged = 0;
    let mut skipped = 0;
    let mut worst_scaling: f64 = 0.0;
    for tag in TheoremTag::ALL {
        let profiles = example_profiles(tag);
        pass &= profiles.len() >= 3;
        for (k, p) in profiles.iter().enumerate() {
            let cfg = CorpusConfig::for_profile(p);
            // 5 calibration and 8 held-out items per kind: 32 held out
            let sc = Scenario::build(7, spec, &CorpusKind::ALL, 5, 8, &cfg);
            let r = verify_inequality(p, &profile_check_name(p, k), &sc, &ctx, MARGIN).unwrap();
            let finite = r
                .reports
                .iter()
                .filter(|x| x.skipped.is_none())
                .all(|x| x.ratio.is_finite());
            if !(r.all_pass() && finite && r.reports.len() >= 30 && r.calibration_max.is_finite()) {
                println!(
                    "  {}: {} failures, calibration max {}",
                    r.check,
                    failures(&r.reports),
                    r.calibration_max
                );
                pass = false;
            }
            suites += 1;
            skipped += r.reports.iter().filter(|x| x.skipped.is_some()).count();
            judged += r.reports.iter().filter(|x| x.skipped.is_none()).count();
            let table = kernel_table(spec, p.alpha).unwrap();
            for item in sc.evaluation.iter().step_by(8) {
                for c in [1e-3, 7.0, 1e4] {
                    worst_scaling =
                        worst_scaling.max(scaling_discrepancy(p, item, c, &table, &ctx).unwrap());
                }
            }
        }
    }
    pass &= worst_scaling <= 1e-10;

    let dspec = dilation_setup();
    let dctx = Context::for_spec(dspec, DEFAULT_CUBE_CAP);
    let mut drift_max: f64 = 0.0;
    let mut drift_items = 0;
    let mut drift_skipped = 0;
    for (k, p) in example_profiles(TheoremTag::T11).iter().enumerate() {
        for kind in CorpusKind::ALL {
            let reports =
                dilation_reports(p, &profile_check_name(p, k), 7, kind, 8, 3, 0.15, &dctx).unwrap();
            for r in &reports {
                if !r.pass {
                    println!("  dilation {}: drift {:.3}", r.id, r.lhs);
                    pass = false;
                }
                if r.skipped.is_some() {
                    drift_skipped += 1;
                } else {
                    drift_items += 1;
                    drift_max = drift_max.max(r.lhs);
                }
            }
        }
    }
    line(
        8,
        pass,
        t.elapsed(),
        secs(600),
        &format!(
            "{suites} suites, {judged} held-out ratios judged, {skipped} outside hypotheses; scaling gap {worst_scaling:.1e}; \
             dilation drift max {drift_max:.3} over {drift_items} items, {drift_skipped} unresolved skipped"
        ),
    )
}

fn criterion_09_reverse_holder_chain() -> bool {
    let t = Instant::now();
    let spec = default_spec();
    let ctx = Context::for_spec(spec, DEFAULT_CUBE_CAP);
    let ladder = [0.5, 0.25, 0.125, 0.0625];
    let mut parts = Vec::new();
    let mut pass = true;
    let base = example_profiles(TheoremTag::C14)[0];
    for (b1, b2) in [(0.1, 0.1), (-0.15, 0.2), (0.3, -0.1)] {
        let eps = stable_epsilon(
            spec,
            &[0.0],
            (b1 + b2) * base.q,
            &ladder,
            0.05,
            DEFAULT_CUBE_CAP,
        )
        .unwrap();
        let Some(eps) = eps else {
            parts.push(format!("β = ({b1}, {b2}): no stable ε"));
            pass = false;
            continue;
        };
        let raw = RawExponents {
            a: Some(1.0 + eps),
            ..free_exponents(&base)
        };
        let p = make_profile(TheoremTag::C14, &raw).unwrap();
        let wv = WeightVector::new(
            power_weight(spec, &[0.0], b1),
            power_weight(spec, &[0.0], b2),
        )
        .unwrap();
        let c = reverse_holder_chain(&p, &wv, &ctx).unwrap();
        let ok = c.iida.is_finite() && c.iida <= c.chain * (1.0 + 1e-12) && c.chain <= 2.0 * c.iida;
        pass &= ok;
        parts.push(format!(
            "β = ({b1}, {b2}), ε = {eps}: pair {:.4}, chain {:.4}, ratio {:.3}",
            c.iida,
            c.chain,
            c.chain / c.iida
        ));
    }
    line(9, pass, t.elapsed(), secs(60), &parts.join("; "))
}

fn free_exponents(p: &ExponentProfile) -> RawExponents {
    RawExponents {
        n: Some(p.n),
        alpha: Some(p.alpha),
        p1: Some(p.p1),
        p2: Some(p.p2),
        r: Some(p.r),
        ..Default::default()
    }
}

fn criterion_10_determinism() -> bool {
    let t = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, threads: &str| {
        let out = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_bifrac"))
            .args([
                "verify", "--tag", "T1.1", "--seed", "7", "--format", "csv", "-o",
            ])
            .arg(&out)
            .env("BIFRAC_THREADS", threads)
            .status()
            .unwrap();
        (status.code() == Some(0)).then(|| std::fs::read(out).unwrap())
    };
    let first = run("a.csv", "0");
    let second = run("b.csv", "0");
    let single = run("c.csv", "1");
    let rows = first.as_ref().map_or(0, |f| {
        f.iter().filter(|&&b| b == b'\n').count().saturating_sub(1)
    });
    let pass = first.is_some() && first == second && first == single && rows > 0;
    line(
        10,
        pass,
        t.elapsed(),
        secs(120),
        &format!("{rows} rows identical across two runs and a single-thread run"),
    )
}

/// Not a criterion: the `q ≤ 1` branch cannot be reached under the
/// hypotheses, so it is run once with an overridden `q` to show that it
/// produces finite values.
fn info_q_at_most_one_branch() -> bool {
    let spec = default_spec();
    let ctx = Context::for_spec(spec, DEFAULT_CUBE_CAP);
    let mut p = example_profiles(TheoremTag::T11)[0];
    p.q = 0.8;
    let table = kernel_table(spec, p.alpha).unwrap();
    let items = corpus(
        7,
        CorpusKind::RandomSteps,
        spec,
        4,
        &CorpusConfig::for_profile(&p),
    );
    let ratios: Vec<f64> = items
        .iter()
        .map(|it| inequality_terms(&p, it, &table, &ctx).unwrap().ratio())
        .collect();
    let finite = ratios.iter().all(|r| r.is_finite());
    println!("info: q = 0.8 off hypothesis, ratios {ratios:.3?}");
    finite
}

fn main() {
    let all = [
        criterion_01_one_third_trick,
        criterion_02_sparse_decomposition,
        criterion_03_power_scaling_identity,
        criterion_04_quadrature_oracles,
        criterion_05_maximal_operator_enumeration,
        criterion_06_weight_constants,
        criterion_07_pointwise_domination,
        criterion_08_theorem_ratio_suites,
        criterion_09_reverse_holder_chain,
        criterion_10_determinism,
        info_q_at_most_one_branch,
    ];
    let failed = all.iter().filter(|run| !run()).count();
    if failed > 0 {
        eprintln!("{failed} acceptance check(s) failed");
        std::process::exit(1);
    }
}
