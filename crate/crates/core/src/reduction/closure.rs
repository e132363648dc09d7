use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::sampling::LevelPoint;
use super::Scenario;
use crate::actions::Action;
use crate::exterior::numeric::{eval_one_form, eval_section, eval_vector};
use crate::exterior::{courant_bracket, Form, GeneralizedSection, VectorField};
use crate::linalg::ComplexSubspace;
use crate::poly::{gauss_int, ComplexPolynomial, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosureFamily {
    /// Polynomial multiples of frame sections of `L1`.
    L1,
    /// Polynomial multiples of frame sections of `L2`.
    L2,
    /// Sections `X + a` with `X` preserving every moment component.
    DfPerp,
    /// Invariant sections annihilating the orbit directions.
    InvariantPerp,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClosureRow {
    pub family: ClosureFamily,
    pub index: usize,
    /// Exact check of the bracket; `None` when no exact model is available.
    pub symbolic: Option<bool>,
    pub pointwise_residual: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClosureReport {
    pub rows: Vec<ClosureRow>,
    pub max_pointwise_residual: f64,
    pub pass: bool,
}

fn random_poly(rng: &mut ChaCha8Rng, n: usize, max_deg: usize) -> ComplexPolynomial {
    let terms = rng.random_range(1..=2);
    let mut p = ComplexPolynomial::zero(n);
    for _ in 0..terms {
        let deg = rng.random_range(0..=max_deg);
        let mut exps = vec![0u32; 2 * n];
        for _ in 0..deg {
            exps[rng.random_range(0..2 * n)] += 1;
        }
        let (mut re, mut im) = (0, 0);
        while re == 0 && im == 0 {
            re = rng.random_range(-2..=2);
            im = rng.random_range(-2..=2);
        }
        p += ComplexPolynomial::monomial(n, exps, gauss_int(re, im));
    }
    p
}

fn random_one_form(rng: &mut ChaCha8Rng, n: usize) -> Form {
    let slot = rng.random_range(0..2 * n);
    Form::one_form(n, slot, random_poly(rng, n, 1))
}

fn pick<'a, T>(rng: &mut ChaCha8Rng, v: &'a [T]) -> &'a T {
    &v[rng.random_range(0..v.len())]
}

/// Vector fields preserving every real moment component.
fn preserving_fields(scenario: &Scenario) -> Vec<VectorField> {
    let n = scenario.n();
    let mut cands: Vec<VectorField> = (0..scenario.action.dim())
        .map(|a| scenario.action.fundamental_field(a))
        .collect();
    match &scenario.action {
        Action::Torus(_) => {
            for j in 0..n {
                let z = ComplexPolynomial::var(n, Var::Z(j)).scale(&gauss_int(0, 1));
                let zb = ComplexPolynomial::var(n, Var::Zbar(j)).scale(&gauss_int(0, -1));
                cands.push(VectorField::from_components(n, [(j, z), (n + j, zb)]));
            }
        }
        Action::Unitary(u) => cands.extend(u.right_fields()),
    }
    cands.retain(|x| !x.is_zero() && scenario.moment.f.iter().all(|f| x.apply(f).is_zero()));
    cands
}

fn is_invariant_fn(action: &Action, g: &ComplexPolynomial) -> bool {
    (0..action.dim()).all(|a| action.fundamental_field(a).apply(g).is_zero())
}

fn is_invariant_field(action: &Action, x: &VectorField) -> bool {
    (0..action.dim()).all(|a| action.fundamental_field(a).bracket(x).is_zero())
}

/// Non-constant invariant polynomials and invariant vector fields of low degree.
fn invariants(action: &Action) -> (Vec<ComplexPolynomial>, Vec<VectorField>) {
    let n = action.ambient_n();
    let mut fns = Vec::new();
    let mut fields = Vec::new();
    match action {
        Action::Torus(_) => {
            for i in 0..2 * n {
                for j in i..2 * n {
                    let mut e = vec![0u32; 2 * n];
                    e[i] += 1;
                    e[j] += 1;
                    fns.push(ComplexPolynomial::monomial(n, e, gauss_int(1, 0)));
                }
            }
            let mut coefs = vec![ComplexPolynomial::one(n)];
            for s in 0..2 * n {
                let mut e = vec![0u32; 2 * n];
                e[s] = 1;
                coefs.push(ComplexPolynomial::monomial(n, e, gauss_int(1, 0)));
            }
            for slot in 0..2 * n {
                for c in &coefs {
                    fields.push(VectorField::basis(n, slot, c.clone()));
                }
            }
        }
        Action::Unitary(u) => {
            let (rows, cols) = (u.rows(), u.cols());
            for k in 0..cols {
                for l in 0..cols {
                    let mut g = ComplexPolynomial::zero(n);
                    let mut hol = Vec::new();
                    for a in 0..rows {
                        g += &ComplexPolynomial::var(n, Var::Zbar(u.index(a, k)))
                            * &ComplexPolynomial::var(n, Var::Z(u.index(a, l)));
                        hol.push((
                            u.index(a, k),
                            ComplexPolynomial::var(n, Var::Z(u.index(a, l))),
                        ));
                    }
                    fns.push(g);
                    let x = VectorField::from_components(n, hol);
                    fields.push(x.conjugate());
                    fields.push(x);
                }
            }
        }
    }
    fns.retain(|g| is_invariant_fn(action, g));
    fields.retain(|x| is_invariant_field(action, x));
    (fns, fields)
}

fn pointwise_membership(
    bundle_at: &[ComplexSubspace],
    s: &GeneralizedSection,
    points: &[LevelPoint],
) -> f64 {
    points
        .iter()
        .zip(bundle_at)
        .map(|(p, l)| l.residual(&eval_section(s, &p.z).expect("dimension fixed by scenario")))
        .fold(0.0, f64::max)
}

/// `|a(v)| / (1 + |a||v|)` over the points.
fn pointwise_annihilation(vec: &VectorField, forms: &[Form], points: &[LevelPoint]) -> f64 {
    let mut worst: f64 = 0.0;
    for p in points {
        let v = eval_vector(vec, &p.z).expect("dimension fixed by scenario");
        for f in forms {
            let a = eval_one_form(f, &p.z).expect("dimension fixed by scenario");
            let val: Complex64 = a.iter().zip(v.iter()).map(|(x, y)| x * y).sum();
            worst = worst.max(val.norm() / (1.0 + a.norm() * v.norm()));
        }
    }
    worst
}

/// Courant brackets of seeded random sections in each family, checked
/// exactly where an exact model exists and pointwise at `points`.
pub fn closure_test(
    scenario: &Scenario,
    pairs: usize,
    seed: u64,
    points: &[LevelPoint],
    tol: f64,
) -> ClosureReport {
    let n = scenario.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    let bundles = scenario.structure.symbolic_bundles();
    let numeric: Vec<Option<(ComplexSubspace, ComplexSubspace)>> = points
        .iter()
        .map(|p| {
            let pair = scenario.structure.pair_at(&p.z).ok()?;
            Some((pair.j1().eigenbundle().ok()?, pair.j2().eigenbundle().ok()?))
        })
        .collect();
    let numeric_ok = numeric.iter().all(|x| x.is_some());
    let l1_at: Vec<ComplexSubspace> = numeric.iter().flatten().map(|(a, _)| a.clone()).collect();
    let l2_at: Vec<ComplexSubspace> = numeric.iter().flatten().map(|(_, b)| b.clone()).collect();

    if let Some((b1, b2)) = &bundles {
        for (family, bundle, at) in [
            (ClosureFamily::L1, b1, &l1_at),
            (ClosureFamily::L2, b2, &l2_at),
        ] {
            let frame = bundle.frame(n);
            for index in 0..pairs {
                let s1 = pick(&mut rng, &frame).scale_poly(&random_poly(&mut rng, n, 2));
                let s2 = pick(&mut rng, &frame).scale_poly(&random_poly(&mut rng, n, 2));
                let br = courant_bracket(&s1, &s2);
                let symbolic = bundle.contains(&br);
                let res = if numeric_ok {
                    pointwise_membership(at, &br, points)
                } else {
                    f64::INFINITY
                };
                rows.push(ClosureRow {
                    family,
                    index,
                    symbolic: Some(symbolic),
                    pointwise_residual: res,
                    pass: symbolic && res < tol,
                });
            }
        }
    }

    let dfs: Vec<Form> = scenario
        .moment
        .f
        .iter()
        .map(|f| Form::function(f.clone()).d())
        .collect();
    let preserving = preserving_fields(scenario);
    for index in 0..pairs {
        let mk = |rng: &mut ChaCha8Rng| {
            let x = pick(rng, &preserving).scale_poly(&random_poly(rng, n, 1));
            GeneralizedSection::new(x, random_one_form(rng, n))
        };
        let (s1, s2) = (mk(&mut rng), mk(&mut rng));
        let br = courant_bracket(&s1, &s2);
        let symbolic = scenario.moment.f.iter().all(|f| br.vec.apply(f).is_zero());
        let res = pointwise_annihilation(&br.vec, &dfs, points);
        rows.push(ClosureRow {
            family: ClosureFamily::DfPerp,
            index,
            symbolic: Some(symbolic),
            pointwise_residual: res,
            pass: symbolic && res < tol,
        });
    }

    let (fns, fields) = invariants(&scenario.action);
    let orbit: Vec<VectorField> = (0..scenario.action.dim())
        .map(|a| scenario.action.fundamental_field(a))
        .collect();
    for index in 0..pairs {
        let mk = |rng: &mut ChaCha8Rng| {
            let x = pick(rng, &fields).scale_poly(pick(rng, &fns));
            let a = Form::function(pick(rng, &fns).clone())
                .d()
                .scale_poly(pick(rng, &fns));
            GeneralizedSection::new(x, a)
        };
        let (s1, s2) = (mk(&mut rng), mk(&mut rng));
        let br = courant_bracket(&s1, &s2);
        let symbolic = orbit.iter().all(|xi| br.form.pair_vector(xi).is_zero());
        let mut res: f64 = 0.0;
        for xi in &orbit {
            res = res.max(pointwise_annihilation(
                xi,
                std::slice::from_ref(&br.form),
                points,
            ));
        }
        rows.push(ClosureRow {
            family: ClosureFamily::InvariantPerp,
            index,
            symbolic: Some(symbolic),
            pointwise_residual: res,
            pass: symbolic && res < tol,
        });
    }

    let max_pointwise_residual = rows
        .iter()
        .map(|r| r.pointwise_residual)
        .fold(0.0, f64::max);
    let pass = !rows.is_empty() && rows.iter().all(|r| r.pass);
    ClosureReport {
        rows,
        max_pointwise_residual,
        pass,
    }
}
