//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

mod common;

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::lemma_cases::{b_field_case, pretype_case, type2_case, type_case};
use common::{
    oracle_courant, oracle_schouten, random_section, random_vector_multivector, raw_multi, rng,
    section_components,
};
use gkw_core::actions::verify_moment_map;
use gkw_core::catalog::{
    blowup1_polytope, build_cpn, build_grassmannian, build_toric, by_name, check_alpha,
    cp2_polytope, find_alpha, hirzebruch_polytope, hyperkahler_identity_residual,
    maurer_cartan_vanishes, octagon_polytope, AlphaResult, CASE_NAMES,
};
use gkw_core::poly::rat;
use gkw_core::reduction::{closure_test, sample_level_set, TypeRow};
use gkw_core::report::{run, Command, ReportDocument, RunConfig, Source};
use gkw_core::structure::StructureRecipe;
use gkw_core::{courant_bracket, ComplexPolynomial, DeformationBivector, Var};
use rand::Rng;

const INSTANCES: usize = 100;
const MAX_SEEDS: u64 = 20_000;
const DIMENSIONS: [usize; 3] = [4, 6, 8];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn reduce(name: &str, samples: Option<usize>) -> Result<ReportDocument, String> {
    let mut cfg = RunConfig::new(Command::Reduce, Some(Source::Case(name.into())));
    cfg.samples = samples;
    run(&cfg).map_err(|e| format!("{name}: {e}"))
}

fn rows(doc: &ReportDocument) -> &[TypeRow] {
    doc.type_table.as_ref().map_or(&[], |t| &t.rows)
}

/// Projective space of dimension `big_n`: J1 type 0 everywhere, J2 type `big_n`
/// on `z0 = 0` and `big_n - 2` elsewhere, with enough stratum samples.
fn projective(big_n: usize, budget: Duration) -> Outcome {
    let start = Instant::now();
    let doc = match reduce(&format!("cpn-{big_n}"), Some(20)) {
        Ok(d) => d,
        Err(e) => return outcome(false, e),
    };
    let elapsed = start.elapsed();
    let rows = rows(&doc);
    let on = rows.iter().filter(|r| r.stratum == "z0=0").count();
    let bad: Vec<_> = rows
        .iter()
        .filter(|r| {
            let want = if r.stratum == "z0=0" {
                big_n
            } else {
                big_n - 2
            };
            r.type_j1 != 0 || r.type_j2 != want
        })
        .map(|r| r.point_id)
        .collect();
    let pass = rows.len() == 20 && on >= 5 && bad.is_empty() && elapsed < budget;
    outcome(
        pass,
        format!(
            "{} rows, {on} on z0=0, mismatched rows {bad:?}, {:.2} s",
            rows.len(),
            elapsed.as_secs_f64()
        ),
    )
}

fn grassmannian() -> Outcome {
    let doc = match reduce("grassmann-2-3", None) {
        Ok(d) => d,
        Err(e) => return outcome(false, e),
    };
    let rows = rows(&doc);
    let upstairs: BTreeSet<usize> = rows.iter().map(|r| r.upstairs_type_j2).collect();
    let upstairs_ok = rows
        .iter()
        .all(|r| r.upstairs_type_j2 == if r.stratum == "generic" { 4 } else { 6 });
    let formula_ok = rows.iter().all(|r| r.formula_rhs == r.type_j2 as i64);
    let generic: BTreeSet<usize> = rows
        .iter()
        .filter(|r| r.stratum == "generic")
        .map(|r| r.type_j2)
        .collect();
    let generic_ok = generic == BTreeSet::from([0]);
    outcome(
        !rows.is_empty() && upstairs_ok && formula_ok && generic_ok,
        format!("upstairs J2 types {upstairs:?}, generic quotient J2 types {generic:?}, formula row-equal {formula_ok}"),
    )
}

fn maurer_cartan() -> Outcome {
    let t0 = rat(1, 4);
    let mut cases = Vec::new();
    for n in 2..=4 {
        cases.push(build_cpn(n, t0.clone()));
    }
    cases.push(build_toric("toric-cp2", &cp2_polytope(), t0.clone()));
    cases.push(build_toric(
        "toric-blowup1",
        &blowup1_polytope(),
        t0.clone(),
    ));
    cases.push(build_grassmannian(1, 3, t0.clone()));
    cases.push(build_grassmannian(2, 3, t0));
    let mut failed = Vec::new();
    for c in cases {
        match c {
            Ok(c) => {
                if !c
                    .eps
                    .as_ref()
                    .is_some_and(|e| maurer_cartan_vanishes(e).unwrap_or(false))
                {
                    failed.push(c.name);
                }
            }
            Err(e) => failed.push(e.to_string()),
        }
    }
    let n = 3;
    let coef = ComplexPolynomial::var(n, Var::Zbar(1));
    let mut bad = DeformationBivector::zero(n);
    let counter = bad.add_hol(1, 2, coef.clone()).is_ok()
        && bad.add_antihol(1, 2, coef).is_ok()
        && maurer_cartan_vanishes(&bad).is_ok_and(|v| !v);
    outcome(
        failed.is_empty() && counter,
        format!("nonvanishing catalog residuals {failed:?}, zbar_1 residual nonzero {counter}"),
    )
}

fn oracles() -> Outcome {
    let mut mismatches = 0;
    for seed in 0..50u64 {
        let mut r = rng(1000 + seed);
        let n = r.random_range(1..=3);
        let a = random_section(&mut r, n);
        let b = random_section(&mut r, n);
        if section_components(&courant_bracket(&a, &b)) != oracle_courant(&a, &b) {
            mismatches += 1;
        }
        let mut r = rng(2000 + seed);
        let n = r.random_range(1..=2);
        let p = r.random_range(1..=(2 * n).min(3));
        let q = r.random_range(1..=(2 * n).min(3));
        let a = random_vector_multivector(&mut r, n, p);
        let b = random_vector_multivector(&mut r, n, q);
        if raw_multi(&a.schouten(&b)) != oracle_schouten(&a, &b) {
            mismatches += 1;
        }
    }
    outcome(
        mismatches == 0,
        format!("50 Courant and 50 Schouten inputs, {mismatches} mismatches"),
    )
}

/// Runs `check` on seeds until `INSTANCES` admissible ones are found;
/// returns (admissible, failing) counts.
fn count(mut check: impl FnMut(u64) -> Option<bool>) -> (usize, usize) {
    let (mut seen, mut failed) = (0, 0);
    for seed in 0..MAX_SEEDS {
        if seen == INSTANCES {
            break;
        }
        if let Some(ok) = check(seed) {
            seen += 1;
            failed += usize::from(!ok);
        }
    }
    (seen, failed)
}

fn lemmas() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for m in DIMENSIONS {
        let pre = count(|s| {
            pretype_case(m, s)
                .map(|c| c.lhs == c.rhs && (c.library.lhs, c.library.rhs) == (c.lhs, c.rhs))
        });
        let ty = count(|s| {
            let c = type_case(m, s);
            Some(c.before == c.expected && c.after == c.before)
        });
        let t2 = count(|s| type2_case(m, s).map(|c| c.quotient_j1 == 0 && c.holds()));
        for (label, (seen, failed)) in [("pretype", pre), ("type", ty), ("type2", t2)] {
            pass &= seen == INSTANCES && failed == 0;
            parts.push(format!("m={m} {label} {}/{seen}", seen - failed));
        }
    }
    outcome(pass, parts.join(", "))
}

fn b_transform() -> Outcome {
    let mut failed = 0;
    for m in DIMENSIONS {
        for seed in 0..INSTANCES as u64 {
            let (expected, before, after) = b_field_case(m, seed);
            failed += usize::from(before != expected || after != before);
        }
    }
    let sc = match by_name("hyperkahler-flat") {
        Ok(c) => c.scenario.realify(),
        Err(e) => return outcome(false, e.to_string()),
    };
    let mut worst: f64 = 0.0;
    let mut moment_ok = false;
    if let Ok(set) = sample_level_set(&sc, sc.samples, sc.seed) {
        let zs: Vec<_> = set.points.iter().map(|p| p.z.clone()).collect();
        for z in &zs {
            for h in &sc.moment.h {
                worst = worst.max(h.eval(z).norm());
            }
        }
        moment_ok = verify_moment_map(
            |z| sc.structure.pair_at(z).map(|p| p.j1().clone()),
            &sc.action,
            &sc.moment,
            &zs,
            1e-10,
        )
        .pass;
    }
    let pass = failed == 0 && sc.moment.is_real() && worst < 1e-10 && moment_ok;
    outcome(
        pass,
        format!(
            "{failed} type changes over {} (J, B); realified imaginary part {worst:.1e}, moment map holds {moment_ok}",
            INSTANCES * DIMENSIONS.len()
        ),
    )
}

fn hyperkahler() -> Outcome {
    let case = match by_name("hyperkahler-flat") {
        Ok(c) => c,
        Err(e) => return outcome(false, e.to_string()),
    };
    let sc = &case.scenario;
    let Ok(set) = sample_level_set(sc, 20, sc.seed) else {
        return outcome(false, "sampling failed");
    };
    let (mut validity, mut identity): (f64, f64) = (0.0, 0.0);
    for p in &set.points {
        validity = validity.max(
            sc.structure
                .pair_at(&p.z)
                .map_or(f64::INFINITY, |pair| pair.residuals().max_residual()),
        );
        identity =
            identity.max(hyperkahler_identity_residual(&case, &p.z).unwrap_or(f64::INFINITY));
    }
    let zs: Vec<_> = set.points.iter().map(|p| p.z.clone()).collect();
    let mm = verify_moment_map(
        |z| sc.structure.pair_at(z).map(|p| p.j1().clone()),
        &sc.action,
        &sc.moment,
        &zs,
        1e-10,
    );
    outcome(
        set.points.len() == 20 && validity < 1e-10 && identity < 1e-12 && mm.pass,
        format!(
            "validity {validity:.1e}, identity {identity:.1e}, moment map {}",
            mm.pass
        ),
    )
}

fn bihermitian() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for name in CASE_NAMES {
        let case = match by_name(name) {
            Ok(c) => c,
            Err(e) => return outcome(false, e.to_string()),
        };
        let doc = match reduce(name, None) {
            Ok(d) => d,
            Err(e) => return outcome(false, e),
        };
        let Some(bh) = doc.bihermitian else {
            return outcome(false, format!("{name}: no bi-Hermitian section"));
        };
        let generic: Vec<_> = bh.rows.iter().filter(|r| r.stratum == "generic").collect();
        let residuals_ok = !generic.is_empty()
            && generic.iter().all(|r| {
                r.error.is_none()
                    && r.metric_min_eigenvalue > 1e-10
                    && r.max_square_residual < 1e-9
                    && r.max_orthogonality_residual < 1e-9
            });
        let want = match (&case.scenario.structure, name) {
            (StructureRecipe::Deformed { .. }, _) => Some(true),
            (_, "kahler-c3") => Some(false),
            _ => None,
        };
        let distinct_ok = want.is_none_or(|d| bh.generic_distinct == Some(d));
        if !(residuals_ok && distinct_ok) {
            pass = false;
            parts.push(format!(
                "{name}: residuals {residuals_ok}, distinct {:?} want {want:?}",
                bh.generic_distinct
            ));
        }
    }
    let detail = if parts.is_empty() {
        format!("{} cases", CASE_NAMES.len())
    } else {
        parts.join("; ")
    };
    outcome(pass, detail)
}

fn toric() -> Outcome {
    let mut specs = vec![("cp2".to_string(), cp2_polytope())];
    for k in 0..=3 {
        match hirzebruch_polytope(k) {
            Ok(s) => specs.push((format!("hirzebruch-{k}"), s)),
            Err(e) => return outcome(false, e.to_string()),
        }
    }
    let mut bad = Vec::new();
    for (label, spec) in &specs {
        match find_alpha(spec) {
            AlphaResult::Feasible { pair, alpha, .. } if check_alpha(spec, pair, &alpha) => {}
            _ => bad.push(label.clone()),
        }
    }
    let octagon = matches!(find_alpha(&octagon_polytope()), AlphaResult::Infeasible { certificates } if !certificates.is_empty());
    outcome(
        bad.is_empty() && octagon,
        format!("feasibility failures {bad:?}, octagon certified infeasible {octagon}"),
    )
}

fn closure() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut failed = Vec::new();
    for name in CASE_NAMES {
        let sc = match by_name(name) {
            Ok(c) => c.scenario,
            Err(e) => return outcome(false, e.to_string()),
        };
        let Ok(set) = sample_level_set(&sc, sc.samples, sc.seed) else {
            failed.push(name);
            continue;
        };
        let report = closure_test(&sc, 4, sc.seed, &set.points, 1e-9);
        worst = worst.max(report.max_pointwise_residual);
        if !report.pass || report.rows.iter().any(|r| r.symbolic == Some(false)) {
            failed.push(name);
        }
    }
    outcome(
        failed.is_empty(),
        format!("max pointwise residual {worst:.1e}, failing cases {failed:?}"),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, &str, fn() -> Outcome); 11] = [
        ("CP^2 quotient types", "exact, < 60 s", || {
            projective(2, Duration::from_secs(60))
        }),
        ("CP^3 quotient types", "exact, < 120 s", || {
            projective(3, Duration::from_secs(120))
        }),
        ("Gr(2,3) types and quotient formula", "exact", grassmannian),
        ("Maurer-Cartan certificates", "exact", maurer_cartan),
        ("Courant and Schouten oracles", "exact", oracles),
        ("linear lemma suite", "exact, 100 per dimension", lemmas),
        (
            "B-transform invariance and realification",
            "exact, 1e-10",
            b_transform,
        ),
        (
            "flat hyperkahler model",
            "1e-10 validity, 1e-12 identity",
            hyperkahler,
        ),
        (
            "quotient bi-Hermitian structures",
            "1e-10 eigenvalue, 1e-9 residuals",
            bihermitian,
        ),
        ("toric feasibility", "exact", toric),
        ("closure of section families", "symbolic or 1e-9", closure),
    ];
    let mut failures = 0;
    for (i, (label, tol, check)) in criteria.iter().enumerate() {
        let o = check();
        failures += usize::from(!o.pass);
        println!(
            "{} [{:>2}] {label} ({tol}): {}",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            o.detail
        );
    }
    println!(
        "{}/{} criteria pass",
        criteria.len() - failures,
        criteria.len()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
