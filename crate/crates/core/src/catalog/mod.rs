//! Ready-made reduction scenarios with their expected type tables, and the
//! exact checks attached to each deformation.

mod toric;

pub use toric::{check_alpha, find_alpha, AlphaResult, PairCertificate, PolytopeSpec};

use std::collections::BTreeMap;

use nalgebra::DVector;
use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::actions::{
    grassmannian_moment_map, kahler_form, Action, ActionError, MomentMapPoly, TorusAction,
    UnitaryAction,
};
use crate::exterior::numeric::{eval_one_form, real_from_z};
use crate::exterior::real_frame::{coframe, coordinate, Axis};
use crate::exterior::{Ambient, DeformationBivector, Form, MultivectorError, VectorField};
use crate::poly::{gauss, gauss_int, rat, ComplexPolynomial, Gaussian, Rational, Var};
use crate::reduction::{
    adaptive_scale, sample_level_set, Level, ReductionError, SamplerKind, Scenario, StratumSpec,
};
use crate::structure::{exact_exp_b, exact_j_std, ExactMatrix, StructureError, StructureRecipe};

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("unknown catalog case {0:?}")]
    Unknown(String),
    #[error("polytope: {0}")]
    Polytope(String),
    #[error("invalid parameters: {0}")]
    Parameters(String),
    #[error("functional alpha: {0}")]
    Alpha(String),
    #[error("action: {0}")]
    Action(#[from] ActionError),
    #[error("deformation: {0}")]
    Deformation(#[from] MultivectorError),
    #[error("structure: {0}")]
    Structure(#[from] StructureError),
    #[error("reduction: {0}")]
    Reduction(#[from] ReductionError),
}

/// Expected `(type J1, type J2)` per stratum label.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Expected {
    pub upstairs: BTreeMap<String, (usize, usize)>,
    pub quotient: BTreeMap<String, (usize, usize)>,
    /// Whether the quotient bi-Hermitian structures differ at generic points.
    pub distinct: Option<bool>,
}

#[derive(Clone, Debug)]
pub struct CatalogCase {
    pub name: String,
    pub scenario: Scenario,
    pub expected: Expected,
    pub doc: String,
    /// Unscaled deformation, when the structure is a deformed Kahler pair.
    pub eps: Option<DeformationBivector>,
    /// Scale chosen by adaptive halving.
    pub scale: Option<Rational>,
    pub alpha: Option<AlphaResult>,
}

pub const CASE_NAMES: [&str; 9] = [
    "cpn-2",
    "cpn-3",
    "toric-cp2",
    "toric-blowup1",
    "hirzebruch-2",
    "grassmann-1-3",
    "grassmann-2-3",
    "hyperkahler-flat",
    "kahler-c3",
];

const DEFAULT_SCALE: (i64, i64) = (1, 4);
const PROBE_COUNT: usize = 64;
const DEFAULT_SAMPLES: usize = 20;
const DEFAULT_SEED: u64 = 7;

fn default_scale() -> Rational {
    rat(DEFAULT_SCALE.0, DEFAULT_SCALE.1)
}

fn types(entries: &[(&str, usize, usize)]) -> BTreeMap<String, (usize, usize)> {
    entries
        .iter()
        .map(|&(l, a, b)| (l.to_string(), (a, b)))
        .collect()
}

fn var(n: usize, v: Var) -> ComplexPolynomial {
    ComplexPolynomial::var(n, v)
}

/// Fixes the deformation scale by halving until the pair is valid on
/// seeded level-set probes, then halves once more as a margin for unprobed points.
fn fit_scale(
    mut scenario: Scenario,
    eps: &DeformationBivector,
    t0: Rational,
) -> Result<(Scenario, Rational), CatalogError> {
    let probes = sample_level_set(&scenario, PROBE_COUNT, 0)?;
    let zs: Vec<Vec<Complex64>> = probes.points.into_iter().map(|p| p.z).collect();
    let t = adaptive_scale(eps, &zs, t0)? / rat(2, 1);
    scenario.structure = StructureRecipe::Deformed {
        eps: eps.clone(),
        t: t.clone(),
    };
    Ok((scenario, t))
}

/// Complex projective space as the quotient of `C^{N+1}` by the diagonal circle,
/// deformed by `z0^2 d/dz1 ^ d/dz2` and its antiholomorphic partner.
pub fn build_cpn(big_n: usize, t0: Rational) -> Result<CatalogCase, CatalogError> {
    if big_n < 2 {
        return Err(CatalogError::Parameters(format!(
            "projective dimension {big_n} < 2"
        )));
    }
    let n = big_n + 1;
    let y = VectorField::basis(n, 1, var(n, Var::Z(0)).pow(2));
    let z = VectorField::basis(n, 2, ComplexPolynomial::one(n));
    let eps = DeformationBivector::from_fields(&y, &z, &kahler_form(n))?;
    let torus = TorusAction::diagonal(n);
    let moment = torus.standard_moment_map();
    let scenario = Scenario {
        name: format!("cpn-{big_n}"),
        structure: StructureRecipe::Deformed {
            eps: eps.clone(),
            t: t0.clone(),
        },
        action: Action::Torus(torus),
        moment,
        level: Level::Values(vec![Rational::one()]),
        sampler: SamplerKind::Radial,
        strata: vec![StratumSpec {
            label: "z0=0".into(),
            zero_coords: vec![0],
        }],
        samples: DEFAULT_SAMPLES,
        seed: DEFAULT_SEED,
    };
    let (scenario, t) = fit_scale(scenario, &eps, t0)?;
    Ok(CatalogCase {
        name: scenario.name.clone(),
        scenario,
        expected: Expected {
            upstairs: types(&[("generic", 0, n - 2), ("z0=0", 0, n)]),
            quotient: types(&[("generic", 0, big_n - 2), ("z0=0", 0, big_n)]),
            distinct: Some(true),
        },
        doc: format!("CP^{big_n} from the unit-level circle quotient of C^{n}; J2 drops to type {} off z0=0.", big_n - 2),
        eps: Some(eps),
        scale: Some(t),
        alpha: None,
    })
}

/// Toric quotient of `C^N` by the kernel torus of the facet map, deformed by
/// the monomial bivector attached to a feasible functional.
pub fn build_toric(
    name: &str,
    spec: &PolytopeSpec,
    t0: Rational,
) -> Result<CatalogCase, CatalogError> {
    let alpha = find_alpha(spec);
    let AlphaResult::Feasible {
        pair: (i, j),
        alpha: a,
        exponents,
        ..
    } = &alpha
    else {
        return Err(CatalogError::Alpha(
            "no facet pair admits a functional".into(),
        ));
    };
    if !check_alpha(spec, (*i, *j), a) {
        return Err(CatalogError::Alpha(format!(
            "functional fails the re-check on facets ({i}, {j})"
        )));
    }
    let n = spec.facets();
    let d = spec.dim();
    let mut exps = vec![0u32; 2 * n];
    exps[..n].copy_from_slice(exponents);
    let coef = ComplexPolynomial::monomial(n, exps, gauss_int(1, 0));
    let y = VectorField::basis(n, *i, coef);
    let z = VectorField::basis(n, *j, ComplexPolynomial::one(n));
    let eps = DeformationBivector::from_fields(&y, &z, &kahler_form(n))?;
    let torus = TorusAction::new(n, spec.kernel_weights())?;
    let moment = torus.standard_moment_map();
    let strata: Vec<StratumSpec> = exponents
        .iter()
        .enumerate()
        .filter(|(_, &e)| e > 0)
        .map(|(k, _)| StratumSpec {
            label: format!("z{k}=0"),
            zero_coords: vec![k],
        })
        .collect();
    let mut upstairs = types(&[("generic", 0, n - 2)]);
    let mut quotient = types(&[("generic", 0, d - 2)]);
    for s in &strata {
        upstairs.insert(s.label.clone(), (0, n));
        quotient.insert(s.label.clone(), (0, d));
    }
    let scenario = Scenario {
        name: name.to_string(),
        structure: StructureRecipe::Deformed {
            eps: eps.clone(),
            t: t0.clone(),
        },
        action: Action::Torus(torus),
        moment,
        level: Level::Values(spec.level()),
        sampler: SamplerKind::Polytope {
            normals: spec.normals().to_vec(),
            offsets: spec.offsets().to_vec(),
        },
        strata,
        samples: DEFAULT_SAMPLES,
        seed: DEFAULT_SEED,
    };
    let (scenario, t) = fit_scale(scenario, &eps, t0)?;
    Ok(CatalogCase {
        name: name.to_string(),
        scenario,
        expected: Expected {
            upstairs,
            quotient,
            distinct: Some(true),
        },
        doc: format!("Toric surface with {n} facets, deformed along facets {i} and {j}."),
        eps: Some(eps),
        scale: Some(t),
        alpha: Some(alpha),
    })
}

fn int_offsets(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| rat(x, 1)).collect()
}

pub fn cp2_polytope() -> PolytopeSpec {
    PolytopeSpec::new(
        vec![vec![-1, 0], vec![0, -1], vec![1, 1]],
        int_offsets(&[0, 0, 1]),
    )
    .expect("valid polytope")
}

pub fn blowup1_polytope() -> PolytopeSpec {
    PolytopeSpec::new(
        vec![vec![-1, 0], vec![0, -1], vec![1, 1], vec![1, 0]],
        int_offsets(&[0, 0, 3, 2]),
    )
    .expect("valid polytope")
}

/// Hirzebruch surface of degree `k`.
pub fn hirzebruch_polytope(k: i64) -> Result<PolytopeSpec, CatalogError> {
    if k < 0 {
        return Err(CatalogError::Parameters(format!(
            "Hirzebruch degree {k} < 0"
        )));
    }
    PolytopeSpec::new(
        vec![vec![-1, 0], vec![0, -1], vec![1, k], vec![0, 1]],
        int_offsets(&[0, 0, k + 1, 1]),
    )
}

/// `CP^1 x CP^1` blown up at its four fixed points.
pub fn octagon_polytope() -> PolytopeSpec {
    PolytopeSpec::new(
        vec![
            vec![1, 0],
            vec![1, 1],
            vec![0, 1],
            vec![-1, 1],
            vec![-1, 0],
            vec![-1, -1],
            vec![0, -1],
            vec![1, -1],
        ],
        int_offsets(&[2, 3, 2, 3, 2, 3, 2, 3]),
    )
    .expect("valid polytope")
}

/// Grassmannian of `n`-planes as the `U(n)` quotient of `n x m` matrices with
/// `Z Z^dagger = I`, deformed by the first column pushed into columns 2 and 3.
pub fn build_grassmannian(n: usize, m: usize, t0: Rational) -> Result<CatalogCase, CatalogError> {
    if n < 1 || m < 3 || m <= n {
        return Err(CatalogError::Parameters(format!(
            "need n >= 1, m >= 3 and m > n, got n={n}, m={m}"
        )));
    }
    let u = UnitaryAction::new(n, m)?;
    let nn = n * m;
    let column_field = |target: usize| {
        VectorField::from_components(
            nn,
            (0..n).map(|a| (u.index(a, target), var(nn, Var::Z(u.index(a, 0))))),
        )
    };
    let eps =
        DeformationBivector::from_fields(&column_field(1), &column_field(2), &kahler_form(nn))?;
    let moment = grassmannian_moment_map(n, m)?;
    let label = "z_col1=0";
    let scenario = Scenario {
        name: format!("grassmann-{n}-{m}"),
        structure: StructureRecipe::Deformed {
            eps: eps.clone(),
            t: t0.clone(),
        },
        action: Action::Unitary(u.clone()),
        moment,
        level: Level::CentralIdentity,
        sampler: SamplerKind::GramSchmidt,
        strata: vec![StratumSpec {
            label: label.into(),
            zero_coords: (0..n).map(|a| u.index(a, 0)).collect(),
        }],
        samples: DEFAULT_SAMPLES,
        seed: DEFAULT_SEED,
    };
    let (scenario, t) = fit_scale(scenario, &eps, t0)?;
    let q = n * (m - n);
    Ok(CatalogCase {
        name: scenario.name.clone(),
        scenario,
        expected: Expected {
            upstairs: types(&[("generic", 0, nn - 2), (label, 0, nn)]),
            quotient: types(&[("generic", 0, 0), (label, 0, q)]),
            distinct: Some(true),
        },
        doc: format!("Grassmannian of {n}-planes in C^{m}; the deformation vanishes where the first column does."),
        eps: Some(eps),
        scale: Some(t),
        alpha: None,
    })
}

/// Quaternionic structures on `H = R^4` in coordinates `(x1, y1, x2, y2)`.
pub struct QuaternionFrame {
    pub i: ExactMatrix,
    pub j: ExactMatrix,
    pub k: ExactMatrix,
}

impl QuaternionFrame {
    pub fn standard() -> Self {
        let i = exact_j_std(2);
        let j = ExactMatrix::from_i64_rows(&[
            vec![0, 0, -1, 0],
            vec![0, 0, 0, 1],
            vec![1, 0, 0, 0],
            vec![0, -1, 0, 0],
        ]);
        let k = i.mul(&j);
        QuaternionFrame { i, j, k }
    }
}

/// `1/2 p^T Q p` in the real coordinates of `C^n`.
fn quadratic_poly(q: &ExactMatrix, n: usize) -> ComplexPolynomial {
    let coords: Vec<ComplexPolynomial> = (0..n)
        .flat_map(|j| [coordinate(n, j, Axis::X), coordinate(n, j, Axis::Y)])
        .collect();
    let mut p = ComplexPolynomial::zero(n);
    for a in 0..2 * n {
        for b in 0..2 * n {
            let c = q.get(a, b);
            if !c.is_zero() {
                p += (&coords[a] * &coords[b]).scale(&gauss(c / rat(2, 1), Rational::zero()));
            }
        }
    }
    p
}

/// Constant 2-form whose map `V -> V*` is `w`.
pub fn two_form_from_map(w: &ExactMatrix, n: usize) -> Form {
    let cof: Vec<Form> = (0..n)
        .flat_map(|j| [coframe(n, j, Axis::X), coframe(n, j, Axis::Y)])
        .collect();
    let mut out = Form::zero(n, 2);
    for a in 0..2 * n {
        for b in a + 1..2 * n {
            let c = w.get(b, a);
            if !c.is_zero() {
                out = out.add(
                    &cof[a]
                        .wedge(&cof[b])
                        .scale(&gauss(c.clone(), Rational::zero())),
                );
            }
        }
    }
    out
}

fn real_torus_generator(weights: &[i64]) -> ExactMatrix {
    let m = 2 * weights.len();
    let mut g = ExactMatrix::zeros(m, m);
    for (j, &w) in weights.iter().enumerate() {
        g.set(2 * j + 1, 2 * j, rat(w, 1));
        g.set(2 * j, 2 * j + 1, rat(-w, 1));
    }
    g
}

/// Exact data of the flat hyperkahler model.
pub struct HyperkahlerData {
    pub frame: QuaternionFrame,
    pub j1: ExactMatrix,
    pub j2: ExactMatrix,
    pub action: Action,
    /// Moment maps for the forms `g(I., .)`, `g(J., .)`, `g(K., .)`.
    pub moments: [ComplexPolynomial; 3],
}

const HK_WEIGHTS: [i64; 2] = [1, -1];

pub fn hyperkahler_data() -> HyperkahlerData {
    let frame = QuaternionFrame::standard();
    let (wi, wj, wk) = (&frame.i, &frame.j, &frame.k);
    let half = rat(1, 2);
    let zero = ExactMatrix::zeros(4, 4);
    let inv = |w: &ExactMatrix| w.inverse().expect("complex structures are invertible");
    let m1 = ExactMatrix::blocks(
        &zero,
        &inv(wi).sub(&inv(wj)).scale(&-half.clone()),
        &wi.sub(wj),
        &zero,
    );
    let m2 = ExactMatrix::blocks(
        &zero,
        &inv(wi).add(&inv(wj)).scale(&-half),
        &wi.add(wj),
        &zero,
    );
    let (ek, ek_inv) = (exact_exp_b(wk), exact_exp_b(&wk.scale(&-Rational::one())));
    let j1 = ek.mul(&m1).mul(&ek_inv);
    let j2 = ek_inv.mul(&m2).mul(&ek);
    let gen = real_torus_generator(&HK_WEIGHTS);
    let moments = [wi, wj, wk].map(|w| quadratic_poly(&w.mul(&gen), 2));
    let action =
        Action::Torus(TorusAction::new(2, vec![HK_WEIGHTS.to_vec()]).expect("valid weights"));
    HyperkahlerData {
        frame,
        j1,
        j2,
        action,
        moments,
    }
}

/// Flat quaternions with the circle acting by right multiplication, reduced
/// along `mu_I - mu_J` with `mu_K` as imaginary part.
pub fn build_hyperkahler() -> Result<CatalogCase, CatalogError> {
    let hk = hyperkahler_data();
    let [mi, mj, mk] = hk.moments.clone();
    let moment = MomentMapPoly::new(vec![&mi - &mj], vec![mk])?;
    let scenario = Scenario {
        name: "hyperkahler-flat".into(),
        structure: StructureRecipe::Constant {
            j1: hk.j1,
            j2: hk.j2,
        },
        action: hk.action,
        moment,
        level: Level::Values(vec![Rational::zero()]),
        sampler: SamplerKind::LineRoot,
        strata: vec![],
        samples: DEFAULT_SAMPLES,
        seed: DEFAULT_SEED,
    };
    scenario.validate()?;
    Ok(CatalogCase {
        name: scenario.name.clone(),
        scenario,
        expected: Expected {
            upstairs: types(&[("generic", 0, 0)]),
            quotient: types(&[("generic", 0, 1)]),
            distinct: Some(false),
        },
        doc: "Flat hyperkahler R^4 with the pair built from the forms of I, J and K.".into(),
        eps: None,
        scale: None,
        alpha: None,
    })
}

/// `|J1 (0, df) + (X, d mu_K)|` at a point, for the hyperkahler case.
pub fn hyperkahler_identity_residual(
    case: &CatalogCase,
    z: &[Complex64],
) -> Result<f64, CatalogError> {
    let sc = &case.scenario;
    let pair = sc.structure.pair_at(z)?;
    let j1 = pair.j1().matrix();
    let m = 2 * sc.n();
    let x = real_from_z(z);
    let xi = sc.action.field_frame(&x);
    let df = eval_one_form(&Form::function(sc.moment.f[0].clone()).d(), z)
        .map_err(StructureError::from)?;
    let dh = eval_one_form(&Form::function(sc.moment.h[0].clone()).d(), z)
        .map_err(StructureError::from)?;
    let mut v = DVector::zeros(2 * m);
    let mut target = DVector::zeros(2 * m);
    for a in 0..m {
        v[m + a] = df[a].re;
        target[a] = -xi[(a, 0)];
        target[m + a] = -dh[a].re;
    }
    Ok((j1 * v - target).amax())
}

/// `C^n` with its flat Kahler pair, reduced by the diagonal circle.
pub fn build_kahler_cn(n: usize) -> Result<CatalogCase, CatalogError> {
    if n < 1 {
        return Err(CatalogError::Parameters("n must be positive".into()));
    }
    let torus = TorusAction::diagonal(n);
    let scenario = Scenario {
        name: format!("kahler-c{n}"),
        structure: StructureRecipe::kahler(n),
        moment: torus.standard_moment_map(),
        action: Action::Torus(torus),
        level: Level::Values(vec![Rational::one()]),
        sampler: SamplerKind::Radial,
        strata: vec![],
        samples: DEFAULT_SAMPLES,
        seed: DEFAULT_SEED,
    };
    scenario.validate()?;
    Ok(CatalogCase {
        name: scenario.name.clone(),
        scenario,
        expected: Expected {
            upstairs: types(&[("generic", 0, n)]),
            quotient: types(&[("generic", 0, n - 1)]),
            distinct: Some(false),
        },
        doc: format!(
            "Undeformed Kahler C^{n}; the quotient is the Kahler CP^{}.",
            n - 1
        ),
        eps: None,
        scale: None,
        alpha: None,
    })
}

fn parse_suffix(name: &str, prefix: &str) -> Option<Vec<usize>> {
    let rest = name.strip_prefix(prefix)?;
    rest.split('-').map(|s| s.parse().ok()).collect()
}

pub fn by_name(name: &str) -> Result<CatalogCase, CatalogError> {
    let t0 = default_scale();
    match name {
        "toric-cp2" => return build_toric(name, &cp2_polytope(), t0),
        "toric-blowup1" => return build_toric(name, &blowup1_polytope(), t0),
        "hyperkahler-flat" => return build_hyperkahler(),
        _ => {}
    }
    if let Some(v) = parse_suffix(name, "cpn-") {
        if let [big_n] = v[..] {
            return build_cpn(big_n, t0);
        }
    }
    if let Some(v) = parse_suffix(name, "hirzebruch-") {
        if let [k] = v[..] {
            let k = i64::try_from(k)
                .map_err(|_| CatalogError::Parameters("degree too large".into()))?;
            return build_toric(name, &hirzebruch_polytope(k)?, t0);
        }
    }
    if let Some(v) = parse_suffix(name, "grassmann-") {
        if let [n, m] = v[..] {
            return build_grassmannian(n, m, t0);
        }
    }
    if let Some(v) = parse_suffix(name, "kahler-c") {
        if let [n] = v[..] {
            return build_kahler_cn(n);
        }
    }
    Err(CatalogError::Unknown(name.to_string()))
}

/// Exact vanishing of `d_L eps + 1/2 [eps, eps]`.
pub fn maurer_cartan_vanishes(eps: &DeformationBivector) -> Result<bool, CatalogError> {
    Ok(eps
        .maurer_cartan_residual(Ambient::StandardComplex)?
        .is_zero())
}

/// Holomorphic coefficients, none depending on an index that carries a
/// `d/dz` factor.
pub fn deformation_hypotheses_hold(eps: &DeformationBivector) -> bool {
    let index_set: Vec<usize> = eps.hol().keys().flat_map(|&(i, j)| [i, j]).collect();
    eps.hol().values().all(|f| {
        f.is_holomorphic()
            && index_set
                .iter()
                .all(|&k| f.differentiate(Var::Z(k)).is_zero())
    })
}

/// Unit complex numbers with rational parts.
fn rational_phases() -> Vec<Gaussian> {
    vec![
        gauss(rat(3, 5), rat(4, 5)),
        gauss(rat(5, 13), rat(-12, 13)),
        gauss(rat(-8, 17), rat(15, 17)),
    ]
}

fn gpow(c: &Gaussian, k: i64) -> Gaussian {
    let base = if k < 0 { c.conj() } else { c.clone() };
    (0..k.unsigned_abs()).fold(gauss_int(1, 0), |acc, _| acc * &base)
}

fn diag(d: &[Gaussian]) -> Vec<Vec<Gaussian>> {
    let n = d.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        d[i].clone()
                    } else {
                        gauss_int(0, 0)
                    }
                })
                .collect()
        })
        .collect()
}

fn conj_transpose(g: &[Vec<Gaussian>]) -> Vec<Vec<Gaussian>> {
    let n = g.len();
    (0..n)
        .map(|i| (0..n).map(|j| g[j][i].conj()).collect())
        .collect()
}

/// Rational unitary `n x n` matrices: phases times `SU(2)` blocks on adjacent rows.
fn rational_unitaries(n: usize) -> Vec<Vec<Vec<Gaussian>>> {
    let quats: [(i64, i64, i64, i64, i64); 3] = [(1, 2, 2, 4, 5), (2, 4, 5, 6, 9), (1, 2, 2, 0, 3)];
    let mut out = Vec::new();
    for (r, ph) in rational_phases().iter().enumerate() {
        let mut g = diag(&vec![ph.clone(); n]);
        if n >= 2 {
            let (a, b, c, d, s) = quats[r % quats.len()];
            let top = r % (n - 1);
            let alpha = gauss(rat(a, s), rat(b, s));
            let beta = gauss(rat(c, s), rat(d, s));
            let block = [[alpha.clone(), -beta.conj()], [beta, alpha.conj()]];
            let mut su = diag(&vec![gauss_int(1, 0); n]);
            for (i, row) in block.iter().enumerate() {
                for (j, v) in row.iter().enumerate() {
                    su[top + i][top + j] = v.clone();
                }
            }
            g = matmul(&g, &su);
        }
        out.push(g);
    }
    out
}

fn matmul(a: &[Vec<Gaussian>], b: &[Vec<Gaussian>]) -> Vec<Vec<Gaussian>> {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).fold(gauss_int(0, 0), |acc, k| acc + &a[i][k] * &b[k][j]))
                .collect()
        })
        .collect()
}

/// Action of a group element on `C^N`, with its inverse.
fn group_elements(action: &Action) -> Vec<(Vec<Vec<Gaussian>>, Vec<Vec<Gaussian>>)> {
    match action {
        Action::Torus(t) => {
            let mut out = Vec::new();
            for w in t.weights() {
                for ph in rational_phases() {
                    let g = diag(&w.iter().map(|&k| gpow(&ph, k)).collect::<Vec<_>>());
                    out.push((g.clone(), conj_transpose(&g)));
                }
            }
            out
        }
        Action::Unitary(u) => rational_unitaries(u.rows())
            .into_iter()
            .map(|g| {
                let nn = u.rows() * u.cols();
                let mut big = diag(&vec![gauss_int(0, 0); nn]);
                for a in 0..u.rows() {
                    for b in 0..u.rows() {
                        for k in 0..u.cols() {
                            big[u.index(a, k)][u.index(b, k)] = g[a][b].clone();
                        }
                    }
                }
                let inv = conj_transpose(&big);
                (big, inv)
            })
            .collect(),
    }
}

/// Exact invariance of `eps` under rational group elements of the action.
pub fn deformation_invariant(eps: &DeformationBivector, action: &Action) -> bool {
    group_elements(action)
        .iter()
        .all(|(g, gi)| &eps.pushforward_linear(g, gi) == eps)
}
