use num_complex::Complex64;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::sampling::{sample_level_set, LevelPoint};
use super::{ReductionError, Scenario};
use crate::exterior::numeric::{eval_one_form, real_from_z};
use crate::exterior::{DeformationBivector, Form};
use crate::linalg::{
    extract_bihermitian, min_singular_value, pairing_matrix, BiHermitianResiduals, ComplexSubspace,
    KahlerPairNum, PairError, RMat, RANK_TOL,
};
use crate::poly::Rational;
use crate::structure::StructureRecipe;

/// Bi-Hermitian structures closer than this (in Frobenius norm) to `J+ = +-J-` are not distinct.
pub const DISTINCT_TOL: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct QuotientFrame {
    pub point: LevelPoint,
    pub upstairs_types: (usize, usize),
    /// Orbit directions `xi_M` (columns, real coordinates of `V`).
    pub orbit_frame: RMat,
    /// Moment differentials `df^xi` (columns, real coordinates of `V*`).
    pub differentials: RMat,
    pub p_basis: RMat,
    pub p_perp: ComplexSubspace,
    /// Columns spanning the quotient model `W^`.
    pub representatives: RMat,
    pub quotient: KahlerPairNum,
    pub type_j1: usize,
    pub type_j2: usize,
    /// Complex dimension of `(k_M)_C cap pi(L2)`.
    pub dim_k_cap_pil2: usize,
    /// Same with `pi(L2)` replaced by its real part `pi(L2) cap conj pi(L2)`.
    pub dim_k_cap_pil2_real: usize,
    pub formula_rhs: i64,
    pub isotropy_residual: f64,
    pub invariance_residual: f64,
    pub moment_residual: f64,
    pub pair_residual: f64,
    pub indeterminate: bool,
}

/// Quotient structures at one point of the level set.
pub fn quotient_at_point(
    scenario: &Scenario,
    point: &LevelPoint,
) -> Result<QuotientFrame, ReductionError> {
    let recipe = scenario.reduction_structure();
    quotient_with_recipe(scenario, &recipe, point)
}

fn quotient_with_recipe(
    scenario: &Scenario,
    recipe: &StructureRecipe,
    point: &LevelPoint,
) -> Result<QuotientFrame, ReductionError> {
    let z = &point.z;
    let x = real_from_z(z);
    let m = x.len();
    let pair = recipe.pair_at(z)?;
    let (t1, i1) = pair
        .j1()
        .type_with_info()
        .map_err(crate::linalg::PairError::from)?;
    let (t2, i2) = pair
        .j2()
        .type_with_info()
        .map_err(crate::linalg::PairError::from)?;

    let q = scenario.action.field_frame(&x);
    let k = q.ncols();
    let sigma = min_singular_value(&q).map_err(PairError::from)?;
    if sigma <= 1e-8 {
        return Err(ReductionError::NotFree { sigma });
    }
    let mut df = RMat::zeros(m, k);
    for (a, f) in scenario.moment.f.iter().enumerate() {
        let col = eval_one_form(&Form::function(f.clone()).d(), z)
            .map_err(crate::structure::StructureError::from)?;
        df.set_column(a, &col.map(|c| c.re));
    }
    // J1 (xi_M, 0) = (0, df^xi)
    let mut lifted = RMat::zeros(2 * m, k);
    lifted.view_mut((0, 0), (m, k)).copy_from(&q);
    let mut expected = RMat::zeros(2 * m, k);
    expected.view_mut((m, 0), (m, k)).copy_from(&df);
    let moment_residual =
        (pair.j1().matrix() * &lifted - &expected).norm() / (1.0 + expected.norm());
    if moment_residual > 1e-9 {
        return Err(ReductionError::MomentMismatch {
            residual: moment_residual,
        });
    }

    let reduced = pair.reduce(&q)?;
    let eta = pairing_matrix(m);
    let p_sub = ComplexSubspace::from_real_columns(&reduced.p_basis, RANK_TOL)
        .map_err(crate::linalg::PairError::from)?;
    let p_perp = p_sub
        .pairing_perp(&eta)
        .map_err(crate::linalg::PairError::from)?;
    let dim_p = p_sub.dim();
    if reduced.representatives.ncols() != 2 * m - 2 * dim_p || p_perp.dim() != 2 * m - dim_p {
        return Err(ReductionError::Scenario(format!(
            "quotient model has dimension {} for P of dimension {dim_p}",
            reduced.representatives.ncols()
        )));
    }
    let (tq1, iq1) = reduced
        .pair
        .j1()
        .type_with_info()
        .map_err(crate::linalg::PairError::from)?;
    let (tq2, iq2) = reduced
        .pair
        .j2()
        .type_with_info()
        .map_err(crate::linalg::PairError::from)?;

    let pil2 = pair
        .j2()
        .tangent_projection()
        .map_err(crate::linalg::PairError::from)?;
    let q_sub =
        ComplexSubspace::from_real_columns(&q, RANK_TOL).map_err(crate::linalg::PairError::from)?;
    let cap = q_sub
        .intersect(&pil2)
        .map_err(crate::linalg::PairError::from)?;
    let real_part = pil2
        .intersect(&pil2.conj())
        .map_err(crate::linalg::PairError::from)?;
    let cap_real = q_sub
        .intersect(&real_part)
        .map_err(crate::linalg::PairError::from)?;

    let indeterminate = [i1, i2, iq1, iq2, cap.rank_info()]
        .iter()
        .any(|r| r.indeterminate);
    let formula_rhs = t2 as i64 - k as i64 + 2 * cap.dim() as i64;
    Ok(QuotientFrame {
        point: point.clone(),
        upstairs_types: (t1, t2),
        orbit_frame: q,
        differentials: df,
        p_basis: reduced.p_basis.clone(),
        p_perp,
        representatives: reduced.representatives.clone(),
        pair_residual: reduced.pair.residuals().max_residual(),
        quotient: reduced.pair,
        type_j1: tq1,
        type_j2: tq2,
        dim_k_cap_pil2: cap.dim(),
        dim_k_cap_pil2_real: cap_real.dim(),
        formula_rhs,
        isotropy_residual: reduced.isotropy_residual,
        invariance_residual: reduced.invariance_residual,
        moment_residual,
        indeterminate,
    })
}

/// Quotient frames for a list of points, computed in parallel and returned in point order.
pub fn quotient_frames(
    scenario: &Scenario,
    points: &[LevelPoint],
) -> Vec<Result<QuotientFrame, ReductionError>> {
    let recipe = scenario.reduction_structure();
    points
        .par_iter()
        .map(|p| quotient_with_recipe(scenario, &recipe, p))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TypeRow {
    pub point_id: usize,
    pub stratum: String,
    pub type_j1: usize,
    pub type_j2: usize,
    pub dim_k_cap_pil2: usize,
    pub upstairs_type_j1: usize,
    pub upstairs_type_j2: usize,
    pub dim_k_cap_pil2_real: usize,
    pub formula_rhs: i64,
    pub isotropy_residual: f64,
    pub invariance_residual: f64,
    pub moment_residual: f64,
    pub pair_residual: f64,
    pub level_residual: f64,
    pub freeness: f64,
    pub indeterminate: bool,
}

impl TypeRow {
    fn from_frame(f: &QuotientFrame) -> Self {
        TypeRow {
            point_id: f.point.id,
            stratum: f.point.stratum.clone(),
            type_j1: f.type_j1,
            type_j2: f.type_j2,
            dim_k_cap_pil2: f.dim_k_cap_pil2,
            upstairs_type_j1: f.upstairs_types.0,
            upstairs_type_j2: f.upstairs_types.1,
            dim_k_cap_pil2_real: f.dim_k_cap_pil2_real,
            formula_rhs: f.formula_rhs,
            isotropy_residual: f.isotropy_residual,
            invariance_residual: f.invariance_residual,
            moment_residual: f.moment_residual,
            pair_residual: f.pair_residual,
            level_residual: f.point.level_residual,
            freeness: f.point.freeness,
            indeterminate: f.indeterminate,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointFailure {
    pub point_id: usize,
    pub stratum: String,
    pub error: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TypeTable {
    pub scenario: String,
    pub rows: Vec<TypeRow>,
    pub failures: Vec<PointFailure>,
    pub attempts: usize,
    pub rejected: std::collections::BTreeMap<String, usize>,
}

impl TypeTable {
    pub fn from_frames(
        scenario: &str,
        points: &[LevelPoint],
        frames: &[Result<QuotientFrame, ReductionError>],
    ) -> Self {
        let mut rows = Vec::new();
        let mut failures = Vec::new();
        for (p, f) in points.iter().zip(frames) {
            match f {
                Ok(f) => rows.push(TypeRow::from_frame(f)),
                Err(e) => failures.push(PointFailure {
                    point_id: p.id,
                    stratum: p.stratum.clone(),
                    error: e.to_string(),
                }),
            }
        }
        TypeTable {
            scenario: scenario.to_string(),
            rows,
            failures,
            attempts: points.len(),
            rejected: Default::default(),
        }
    }

    /// Distinct `(type_j1, type_j2)` values seen on each stratum.
    pub fn strata(
        &self,
    ) -> std::collections::BTreeMap<String, std::collections::BTreeSet<(usize, usize)>> {
        let mut out: std::collections::BTreeMap<
            String,
            std::collections::BTreeSet<(usize, usize)>,
        > = Default::default();
        for r in &self.rows {
            out.entry(r.stratum.clone())
                .or_default()
                .insert((r.type_j1, r.type_j2));
        }
        out
    }

    pub fn upstairs_strata(
        &self,
    ) -> std::collections::BTreeMap<String, std::collections::BTreeSet<(usize, usize)>> {
        let mut out: std::collections::BTreeMap<
            String,
            std::collections::BTreeSet<(usize, usize)>,
        > = Default::default();
        for r in &self.rows {
            out.entry(r.stratum.clone())
                .or_default()
                .insert((r.upstairs_type_j1, r.upstairs_type_j2));
        }
        out
    }

    pub fn has_indeterminate(&self) -> bool {
        self.rows.iter().any(|r| r.indeterminate)
    }
}

/// Sample the scenario's level set and tabulate quotient types.
pub fn type_table(scenario: &Scenario) -> Result<TypeTable, ReductionError> {
    let set = sample_level_set(scenario, scenario.samples, scenario.seed)?;
    let frames = quotient_frames(scenario, &set.points);
    let mut table = TypeTable::from_frames(&scenario.name, &set.points, &frames);
    table.attempts = set.attempts;
    table.rejected = set.rejected;
    Ok(table)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FormulaRow {
    pub point_id: usize,
    pub type_j2: usize,
    pub formula_rhs: i64,
    /// Symplectic-side type is unchanged by the reduction.
    pub j1_preserved: bool,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FormulaReport {
    pub rows: Vec<FormulaRow>,
    pub pass: bool,
}

/// Row-by-row comparison of the computed quotient type with the formula
/// `type(J2) - dim G + 2 dim(k_M cap pi(L2))`, and of `type(J~1)` with `type(J1)`.
pub fn verify_type_formula(table: &TypeTable) -> FormulaReport {
    let rows: Vec<FormulaRow> = table
        .rows
        .iter()
        .map(|r| {
            let j1_preserved = r.type_j1 == r.upstairs_type_j1;
            FormulaRow {
                point_id: r.point_id,
                type_j2: r.type_j2,
                formula_rhs: r.formula_rhs,
                j1_preserved,
                pass: j1_preserved && r.type_j2 as i64 == r.formula_rhs && !r.indeterminate,
            }
        })
        .collect();
    let pass = !rows.is_empty() && table.failures.is_empty() && rows.iter().all(|r| r.pass);
    FormulaReport { rows, pass }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BiHermitianSummary {
    pub point_id: usize,
    pub stratum: String,
    pub residuals: BiHermitianResiduals,
    pub distinct: bool,
    pub jminus_negated: bool,
    pub type_j2: usize,
    pub even_type: bool,
}

/// Bi-Hermitian data of the quotient pair at a point.
pub fn quotient_bihermitian(frame: &QuotientFrame) -> Result<BiHermitianSummary, ReductionError> {
    let data = extract_bihermitian(&frame.quotient)?;
    Ok(BiHermitianSummary {
        point_id: frame.point.id,
        stratum: frame.point.stratum.clone(),
        residuals: data.residuals(),
        distinct: data.distinct(DISTINCT_TOL),
        jminus_negated: data.jminus_negated,
        type_j2: frame.type_j2,
        even_type: frame.type_j2 % 2 == 0,
    })
}

/// Largest `t = t0 / 2^k` (k <= 30) for which the deformed pair is valid at every probe.
pub fn adaptive_scale(
    eps: &DeformationBivector,
    probes: &[Vec<Complex64>],
    t0: Rational,
) -> Result<Rational, ReductionError> {
    let mut t = t0;
    let two = Rational::one() + Rational::one();
    for _ in 0..=30 {
        if t.is_zero() {
            break;
        }
        let recipe = StructureRecipe::Deformed {
            eps: eps.clone(),
            t: t.clone(),
        };
        if probes.iter().all(|z| recipe.pair_at(z).is_ok()) {
            return Ok(t);
        }
        t /= two.clone();
    }
    Err(ReductionError::Scenario(
        "deformation is invalid at every tried scale".into(),
    ))
}
