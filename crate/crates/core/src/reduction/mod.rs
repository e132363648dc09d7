//! Reduction of generalized Kahler pairs on `C^N` along level sets of a
//! moment map: scenarios, level-set sampling, pointwise quotients, type
//! tables and bracket closure tests.

mod closure;
mod pipeline;
mod sampling;

pub use closure::{closure_test, ClosureFamily, ClosureReport, ClosureRow};
pub use pipeline::{
    adaptive_scale, quotient_at_point, quotient_bihermitian, quotient_frames, type_table,
    verify_type_formula, BiHermitianSummary, FormulaReport, FormulaRow, PointFailure,
    QuotientFrame, TypeRow, TypeTable, DISTINCT_TOL,
};
pub use sampling::{sample_level_set, stratum_of, LevelPoint, SampleSet};

use serde::Serialize;
use thiserror::Error;

use crate::actions::{Action, MomentMapPoly};
use crate::linalg::PairError;
use crate::poly::{rational_to_f64, Rational};
use crate::structure::{Connection, StructureError, StructureRecipe};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReductionError {
    #[error("invalid scenario: {0}")]
    Scenario(String),
    #[error("level value is not reachable: {0}")]
    Unreachable(String),
    #[error("rejection rate too high: {accepted} accepted out of {attempts} attempts")]
    RejectionRate { accepted: usize, attempts: usize },
    #[error("action is not free at the point: smallest singular value {sigma:.3e}")]
    NotFree { sigma: f64 },
    #[error("structure does not map orbit directions to the moment differentials (residual {residual:.3e})")]
    MomentMismatch { residual: f64 },
    #[error("structure: {0}")]
    Structure(#[from] StructureError),
    #[error("pair: {0}")]
    Pair(#[from] PairError),
}

/// Level value of the moment map.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Level {
    Values(#[serde(serialize_with = "ser_rationals")] Vec<Rational>),
    /// `Z Z^dagger = I` for unitary actions.
    CentralIdentity,
}

fn ser_rationals<S: serde::Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|r| r.to_string()))
}

/// How points on the level set are produced.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SamplerKind {
    /// Exact rescaling of a Gaussian point; one positive weighted-homogeneous quadratic.
    Radial,
    /// Point of the moment polytope `<x, n_i> <= offset_i`, lifted with random phases.
    Polytope {
        normals: Vec<Vec<i64>>,
        #[serde(serialize_with = "ser_rationals")]
        offsets: Vec<Rational>,
    },
    /// Row-orthonormalized Gaussian matrix.
    GramSchmidt,
    /// Root of the single moment component along a random line.
    LineRoot,
}

/// A locus where the listed coordinates vanish.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StratumSpec {
    pub label: String,
    pub zero_coords: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub structure: StructureRecipe,
    pub action: Action,
    pub moment: MomentMapPoly,
    pub level: Level,
    pub sampler: SamplerKind,
    pub strata: Vec<StratumSpec>,
    pub samples: usize,
    pub seed: u64,
}

impl Scenario {
    pub fn n(&self) -> usize {
        self.action.ambient_n()
    }

    pub fn validate(&self) -> Result<(), ReductionError> {
        let n = self.n();
        let bad = |s: String| Err(ReductionError::Scenario(s));
        if self.structure.n() != n {
            return bad(format!(
                "structure lives on C^{} but the action on C^{n}",
                self.structure.n()
            ));
        }
        self.structure.validate()?;
        if self.moment.len() != self.action.dim() {
            return bad(format!(
                "moment map has {} components for a group of dimension {}",
                self.moment.len(),
                self.action.dim()
            ));
        }
        if self
            .moment
            .f
            .iter()
            .chain(&self.moment.h)
            .any(|p| p.nvars() != n)
        {
            return bad("moment polynomial in the wrong number of variables".into());
        }
        match (&self.level, &self.action) {
            (Level::Values(v), _) if v.len() != self.action.dim() => {
                return bad(format!(
                    "level has {} entries for a group of dimension {}",
                    v.len(),
                    self.action.dim()
                ))
            }
            (Level::CentralIdentity, Action::Torus(_)) => {
                return bad("central identity level needs a unitary action".into())
            }
            _ => {}
        }
        match (&self.sampler, &self.action) {
            (SamplerKind::Radial | SamplerKind::LineRoot, _) if self.action.dim() != 1 => {
                return bad("radial and line-root sampling need a single moment component".into())
            }
            (SamplerKind::GramSchmidt, Action::Torus(_)) => {
                return bad("Gram-Schmidt sampling needs a unitary action".into())
            }
            (SamplerKind::GramSchmidt, _) if self.level != Level::CentralIdentity => {
                return bad("Gram-Schmidt sampling targets the central identity level".into())
            }
            (SamplerKind::Polytope { normals, offsets }, Action::Torus(t)) => {
                if normals.len() != n || offsets.len() != n {
                    return bad(format!("polytope needs {n} facets, got {}", normals.len()));
                }
                let d = normals.first().map_or(0, |v| v.len());
                if normals.iter().any(|v| v.len() != d) {
                    return bad("facet normals have different lengths".into());
                }
                for w in t.weights() {
                    for c in 0..d {
                        let s: i64 = w.iter().zip(normals).map(|(a, nv)| a * nv[c]).sum();
                        if s != 0 {
                            return bad(
                                "torus weights are not in the kernel of the facet map".into()
                            );
                        }
                    }
                }
            }
            (SamplerKind::Polytope { .. }, _) => {
                return bad("polytope sampling needs a torus action".into())
            }
            _ => {}
        }
        for s in &self.strata {
            if s.label == "generic"
                || s.zero_coords.is_empty()
                || s.zero_coords.iter().any(|&c| c >= n)
            {
                return bad(format!("bad stratum {:?}", s.label));
            }
        }
        Ok(())
    }

    pub fn level_values(&self) -> Vec<f64> {
        match (&self.level, &self.action) {
            (Level::Values(v), _) => v.iter().map(rational_to_f64).collect(),
            (Level::CentralIdentity, Action::Unitary(u)) => {
                u.central_level().iter().map(rational_to_f64).collect()
            }
            (Level::CentralIdentity, Action::Torus(_)) => vec![],
        }
    }

    /// The structure the quotient is taken of: the recipe itself for a real
    /// moment map, otherwise its B-transform making the moment map real.
    pub fn reduction_structure(&self) -> StructureRecipe {
        if self.moment.is_real() {
            return self.structure.clone();
        }
        realify_structure(&self.structure, &self.action, &self.moment)
    }

    /// Scenario with the imaginary part of the moment map absorbed in a B-field.
    pub fn realify(&self) -> Scenario {
        let mut out = self.clone();
        out.structure = self.reduction_structure();
        out.moment = MomentMapPoly::real(self.moment.f.clone()).expect("real part is real");
        out
    }
}

pub fn realify_structure(
    base: &StructureRecipe,
    action: &Action,
    moment: &MomentMapPoly,
) -> StructureRecipe {
    let connection = if base.is_constant() {
        Connection::Canonical
    } else {
        Connection::Euclidean
    };
    StructureRecipe::Realified {
        base: Box::new(base.clone()),
        action: action.clone(),
        h: moment.h.clone(),
        connection,
    }
}
