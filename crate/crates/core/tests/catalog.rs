//! Catalog cases against their expected type tables, toric feasibility,
//! integrability of the deformations and the flat hyperkahler model.

use gkw_core::actions::{kahler_form, verify_moment_map};
use gkw_core::catalog::{
    blowup1_polytope, build_cpn, build_grassmannian, build_toric, by_name, check_alpha,
    cp2_polytope, deformation_hypotheses_hold, deformation_invariant, find_alpha,
    hirzebruch_polytope, hyperkahler_identity_residual, maurer_cartan_vanishes, octagon_polytope,
    AlphaResult, CatalogCase, PolytopeSpec,
};
use gkw_core::poly::rat;
use gkw_core::reduction::{sample_level_set, type_table};
use gkw_core::report::{run, Command, RunConfig, Source};
use gkw_core::{ComplexPolynomial, DeformationBivector, Var, VectorField};

fn case(name: &str) -> CatalogCase {
    by_name(name).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn reduce(name: &str) -> gkw_core::report::ReportDocument {
    run(&RunConfig::new(
        Command::Reduce,
        Some(Source::Case(name.into())),
    ))
    .unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn assert_expected(name: &str) {
    let doc = reduce(name);
    let e = doc
        .expected
        .as_ref()
        .expect("catalog cases carry expectations");
    for c in e.upstairs.iter().chain(&e.quotient) {
        assert!(
            c.pass,
            "{name} stratum {}: expected {:?}, computed {:?}",
            c.stratum, c.expected, c.computed
        );
    }
    assert_eq!(
        e.distinct_computed, e.distinct_expected,
        "{name}: distinctness"
    );
    assert!(doc.formula.as_ref().unwrap().pass, "{name}: type formula");
}

macro_rules! expected_types {
    ($($test:ident => $name:literal),* $(,)?) => {
        $(
            #[test]
            fn $test() {
                assert_expected($name);
            }
        )*
    };
}

expected_types! {
    expected_types_cpn_2 => "cpn-2",
    expected_types_cpn_3 => "cpn-3",
    expected_types_toric_cp2 => "toric-cp2",
    expected_types_toric_blowup1 => "toric-blowup1",
    expected_types_hirzebruch_2 => "hirzebruch-2",
    expected_types_grassmann_1_3 => "grassmann-1-3",
    expected_types_grassmann_2_3 => "grassmann-2-3",
    expected_types_hyperkahler_flat => "hyperkahler-flat",
    expected_types_kahler_c3 => "kahler-c3",
}

#[test]
fn projective_plane_builders_agree() {
    // the circle quotient and the toric construction of CP^2 have the same type profile
    let a = type_table(&case("cpn-2").scenario).unwrap();
    let b = type_table(&case("toric-cp2").scenario).unwrap();
    let profile = |t: &gkw_core::reduction::TypeTable| {
        t.strata()
            .into_values()
            .collect::<std::collections::BTreeSet<_>>()
    };
    assert_eq!(profile(&a), profile(&b));
    let grass = type_table(&case("grassmann-1-3").scenario).unwrap();
    assert_eq!(profile(&a), profile(&grass));
}

#[test]
fn type_tables_are_reproducible() {
    let sc = case("cpn-3").scenario;
    assert_eq!(type_table(&sc).unwrap(), type_table(&sc).unwrap());
}

fn assert_feasible(label: &str, spec: &PolytopeSpec) {
    match find_alpha(spec) {
        AlphaResult::Feasible {
            pair,
            alpha,
            exponents,
            ..
        } => {
            assert!(
                check_alpha(spec, pair, &alpha),
                "{label}: alpha {alpha:?} on {pair:?} fails the check"
            );
            assert_eq!(exponents.len(), spec.facets(), "{label}");
            assert_eq!((exponents[pair.0], exponents[pair.1]), (0, 0), "{label}");
            assert!(
                exponents
                    .iter()
                    .enumerate()
                    .any(|(k, &e)| k != pair.0 && k != pair.1 && e > 0),
                "{label}: {exponents:?}"
            );
        }
        AlphaResult::Infeasible { certificates } => panic!("{label}: infeasible {certificates:?}"),
    }
}

#[test]
fn feasible_toric_functionals() {
    assert_feasible("cp2", &cp2_polytope());
    assert_feasible("blowup1", &blowup1_polytope());
    for k in 0..=3 {
        assert_feasible(&format!("hirzebruch {k}"), &hirzebruch_polytope(k).unwrap());
    }
}

#[test]
fn blown_up_quadric_is_infeasible_with_certificates() {
    let spec = octagon_polytope();
    let AlphaResult::Infeasible { certificates } = find_alpha(&spec) else {
        panic!("octagon unexpectedly feasible");
    };
    assert!(!certificates.is_empty());
    for c in &certificates {
        assert!(!c.reason.is_empty());
    }
    assert!(
        certificates.iter().any(|c| c.farkas.is_some()),
        "no Farkas multipliers among {certificates:?}"
    );
    assert!(by_name("toric-octagon").is_err());
}

#[test]
fn catalog_deformations_are_maurer_cartan() {
    let t0 = rat(1, 4);
    let mut cases: Vec<CatalogCase> = (2..=4).map(|n| build_cpn(n, t0.clone()).unwrap()).collect();
    cases.push(build_toric("toric-cp2", &cp2_polytope(), t0.clone()).unwrap());
    cases.push(build_toric("toric-blowup1", &blowup1_polytope(), t0.clone()).unwrap());
    cases.push(build_toric("hirzebruch-2", &hirzebruch_polytope(2).unwrap(), t0.clone()).unwrap());
    cases.push(build_grassmannian(1, 3, t0.clone()).unwrap());
    cases.push(build_grassmannian(2, 3, t0).unwrap());
    for c in &cases {
        let eps = c.eps.as_ref().unwrap();
        assert!(maurer_cartan_vanishes(eps).unwrap(), "{}", c.name);
        assert!(deformation_hypotheses_hold(eps), "{}", c.name);
        assert!(
            deformation_invariant(eps, &c.scenario.action),
            "{} is not invariant under its group",
            c.name
        );
    }
}

#[test]
fn antiholomorphic_coefficient_is_not_maurer_cartan() {
    let n = 3;
    // zbar_1 d/dz_1 ^ d/dz_2 + zbar_1 dzbar_1 ^ dzbar_2; the field builder rejects such coefficients
    let coef = ComplexPolynomial::var(n, Var::Zbar(1));
    assert!(DeformationBivector::from_fields(
        &VectorField::basis(n, 1, coef.clone()),
        &VectorField::basis(n, 2, ComplexPolynomial::one(n)),
        &kahler_form(n)
    )
    .is_err());
    let mut eps = DeformationBivector::zero(n);
    eps.add_hol(1, 2, coef.clone()).unwrap();
    eps.add_antihol(1, 2, coef).unwrap();
    assert!(!maurer_cartan_vanishes(&eps).unwrap());
    assert!(!deformation_hypotheses_hold(&eps));
}

#[test]
fn flat_hyperkahler_model() {
    let c = case("hyperkahler-flat");
    let sc = &c.scenario;
    let set = sample_level_set(sc, 20, sc.seed).unwrap();
    assert_eq!(set.points.len(), 20);
    for p in &set.points {
        let r = sc.structure.pair_at(&p.z).unwrap().residuals();
        assert!(r.max_residual() < 1e-10 && r.min_eigenvalue > 0.0, "{r:?}");
        let id = hyperkahler_identity_residual(&c, &p.z).unwrap();
        assert!(id < 1e-12, "identity residual {id:e}");
    }
    let zs: Vec<_> = set.points.iter().map(|p| p.z.clone()).collect();
    let report = verify_moment_map(
        |z| sc.structure.pair_at(z).map(|p| p.j1().clone()),
        &sc.action,
        &sc.moment,
        &zs,
        1e-10,
    );
    assert!(
        report.pass,
        "max membership residual {:e}",
        report.max_membership_residual
    );
    assert!(!sc.moment.is_real());
}
