//! JSON scenario documents. Rationals are strings such as `"1/2"`; polynomial
//! terms are `[re_num, re_den, im_num, im_den, exponents]` with exponents
//! listed for `z_0..z_{n-1}` followed by `zbar_0..zbar_{n-1}`.

use serde::Deserialize;

use super::ReportError;
use crate::actions::{Action, MomentMapPoly, TorusAction, UnitaryAction};
use crate::exterior::DeformationBivector;
use crate::poly::{gauss, rat, ComplexPolynomial, Rational};
use crate::reduction::{Level, SamplerKind, Scenario, StratumSpec};
use crate::structure::{ExactMatrix, StructureRecipe};

pub const DEFAULT_SAMPLES: usize = 20;
pub const DEFAULT_SEED: u64 = 7;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub name: String,
    pub structure: StructureSpec,
    pub action: ActionSpec,
    /// Omitted: the standard moment map of the action.
    #[serde(default)]
    pub moment: Option<MomentSpec>,
    pub level: LevelSpec,
    pub sampler: SamplerSpec,
    #[serde(default)]
    pub strata: Vec<StratumFile>,
    #[serde(default)]
    pub samples: Option<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StructureSpec {
    /// Flat Kahler pair on `C^n`.
    Kahler { n: usize },
    /// Kahler pair with the complex side deformed by `t eps`.
    Deformed {
        n: usize,
        t: String,
        hol: Vec<BivectorEntry>,
        antihol: Vec<BivectorEntry>,
    },
    /// Exact `4n x 4n` matrices on the real frame.
    Constant {
        j1: Vec<Vec<String>>,
        j2: Vec<Vec<String>>,
    },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BivectorEntry {
    pub i: usize,
    pub j: usize,
    pub poly: Vec<Term>,
}

/// `[re_num, re_den, im_num, im_den, exponents]`.
#[derive(Clone, Debug, Deserialize)]
pub struct Term(pub i64, pub i64, pub i64, pub i64, pub Vec<u32>);

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ActionSpec {
    Torus { n: usize, weights: Vec<Vec<i64>> },
    Unitary { rows: usize, cols: usize },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MomentSpec {
    pub f: Vec<Vec<Term>>,
    #[serde(default)]
    pub h: Option<Vec<Vec<Term>>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum LevelSpec {
    Named(String),
    Values(Vec<String>),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SamplerSpec {
    Radial,
    Polytope {
        normals: Vec<Vec<i64>>,
        offsets: Vec<String>,
    },
    GramSchmidt,
    LineRoot,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StratumFile {
    pub label: String,
    pub zero_coords: Vec<usize>,
}

fn bad<T>(msg: impl Into<String>) -> Result<T, ReportError> {
    Err(ReportError::Scenario(msg.into()))
}

fn parse_rational(s: &str) -> Result<Rational, ReportError> {
    s.trim()
        .parse::<Rational>()
        .or_else(|_| bad(format!("not a rational number: {s:?}")))
}

fn parse_poly(n: usize, terms: &[Term]) -> Result<ComplexPolynomial, ReportError> {
    let mut p = ComplexPolynomial::zero(n);
    for Term(rn, rd, inum, id, exps) in terms {
        if *rd == 0 || *id == 0 {
            return bad("zero denominator in a polynomial coefficient");
        }
        if exps.len() != 2 * n {
            return bad(format!(
                "exponent vector of length {} in {n} complex variables",
                exps.len()
            ));
        }
        p += ComplexPolynomial::monomial(n, exps.clone(), gauss(rat(*rn, *rd), rat(*inum, *id)));
    }
    Ok(p)
}

fn parse_matrix(rows: &[Vec<String>]) -> Result<ExactMatrix, ReportError> {
    let r = rows.len();
    let c = rows.first().map_or(0, |x| x.len());
    let mut m = ExactMatrix::zeros(r, c);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != c {
            return bad("ragged matrix rows");
        }
        for (j, s) in row.iter().enumerate() {
            m.set(i, j, parse_rational(s)?);
        }
    }
    if r != c || r % 4 != 0 || r == 0 {
        return bad(format!("structure matrices must be 4n x 4n, got {r} x {c}"));
    }
    Ok(m)
}

impl StructureSpec {
    fn build(&self) -> Result<StructureRecipe, ReportError> {
        match self {
            StructureSpec::Kahler { n } => Ok(StructureRecipe::kahler(*n)),
            StructureSpec::Deformed { n, t, hol, antihol } => {
                let mut eps = DeformationBivector::zero(*n);
                for e in hol {
                    if e.i >= *n || e.j >= *n {
                        return bad("bivector index out of range");
                    }
                    eps.add_hol(e.i, e.j, parse_poly(*n, &e.poly)?)
                        .map_err(|e| ReportError::Scenario(e.to_string()))?;
                }
                for e in antihol {
                    if e.i >= *n || e.j >= *n {
                        return bad("bivector index out of range");
                    }
                    eps.add_antihol(e.i, e.j, parse_poly(*n, &e.poly)?)
                        .map_err(|e| ReportError::Scenario(e.to_string()))?;
                }
                Ok(StructureRecipe::Deformed {
                    eps,
                    t: parse_rational(t)?,
                })
            }
            StructureSpec::Constant { j1, j2 } => {
                let (a, b) = (parse_matrix(j1)?, parse_matrix(j2)?);
                if a.rows() != b.rows() {
                    return bad("j1 and j2 have different sizes");
                }
                Ok(StructureRecipe::Constant { j1: a, j2: b })
            }
        }
    }
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<Self, ReportError> {
        serde_json::from_str(text).map_err(|e| ReportError::Scenario(format!("scenario file: {e}")))
    }

    pub fn build(&self) -> Result<Scenario, ReportError> {
        let structure = self.structure.build()?;
        let action = match &self.action {
            ActionSpec::Torus { n, weights } => Action::Torus(
                TorusAction::new(*n, weights.clone())
                    .map_err(|e| ReportError::Scenario(e.to_string()))?,
            ),
            ActionSpec::Unitary { rows, cols } => Action::Unitary(
                UnitaryAction::new(*rows, *cols)
                    .map_err(|e| ReportError::Scenario(e.to_string()))?,
            ),
        };
        let n = action.ambient_n();
        let moment = match (&self.moment, &action) {
            (Some(spec), _) => {
                let f = spec
                    .f
                    .iter()
                    .map(|t| parse_poly(n, t))
                    .collect::<Result<Vec<_>, _>>()?;
                let h = match &spec.h {
                    Some(h) => h
                        .iter()
                        .map(|t| parse_poly(n, t))
                        .collect::<Result<Vec<_>, _>>()?,
                    None => f.iter().map(|_| ComplexPolynomial::zero(n)).collect(),
                };
                MomentMapPoly::new(f, h).map_err(|e| ReportError::Scenario(e.to_string()))?
            }
            (None, Action::Torus(t)) => t.standard_moment_map(),
            (None, Action::Unitary(u)) => u.moment_map(),
        };
        let level = match &self.level {
            LevelSpec::Named(s) if s == "central_identity" => Level::CentralIdentity,
            LevelSpec::Named(s) => return bad(format!("unknown level {s:?}")),
            LevelSpec::Values(v) => Level::Values(
                v.iter()
                    .map(|s| parse_rational(s))
                    .collect::<Result<_, _>>()?,
            ),
        };
        let sampler = match &self.sampler {
            SamplerSpec::Radial => SamplerKind::Radial,
            SamplerSpec::GramSchmidt => SamplerKind::GramSchmidt,
            SamplerSpec::LineRoot => SamplerKind::LineRoot,
            SamplerSpec::Polytope { normals, offsets } => SamplerKind::Polytope {
                normals: normals.clone(),
                offsets: offsets
                    .iter()
                    .map(|s| parse_rational(s))
                    .collect::<Result<_, _>>()?,
            },
        };
        let scenario = Scenario {
            name: self.name.clone(),
            structure,
            action,
            moment,
            level,
            sampler,
            strata: self
                .strata
                .iter()
                .map(|s| StratumSpec {
                    label: s.label.clone(),
                    zero_coords: s.zero_coords.clone(),
                })
                .collect(),
            samples: self.samples.unwrap_or(DEFAULT_SAMPLES),
            seed: self.seed.unwrap_or(DEFAULT_SEED),
        };
        scenario
            .validate()
            .map_err(|e| ReportError::Scenario(e.to_string()))?;
        Ok(scenario)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const CP2: &str = r#"{
        "name": "file-cp2",
        "structure": {"kind": "kahler", "n": 3},
        "action": {"kind": "torus", "n": 3, "weights": [[1, 1, 1]]},
        "level": ["1"],
        "sampler": {"kind": "radial"},
        "strata": [{"label": "z0=0", "zero_coords": [0]}]
    }"#;

    #[test]
    fn minimal_file_builds_with_defaults() {
        let s = ScenarioFile::parse(CP2).unwrap().build().unwrap();
        assert_eq!(s.samples, DEFAULT_SAMPLES);
        assert_eq!(s.seed, DEFAULT_SEED);
        assert_eq!(s.moment.len(), 1);
    }

    #[test]
    fn explicit_moment_matches_standard() {
        let text = CP2.replace(
            r#""level""#,
            r#""moment": {"f": [[[1,2,0,1,[1,0,0,1,0,0]],[1,2,0,1,[0,1,0,0,1,0]],[1,2,0,1,[0,0,1,0,0,1]]]]}, "level""#,
        );
        let s = ScenarioFile::parse(&text).unwrap().build().unwrap();
        let std = ScenarioFile::parse(CP2).unwrap().build().unwrap();
        assert_eq!(s.moment, std.moment);
    }

    #[test]
    fn malformed_inputs_are_scenario_errors() {
        assert!(matches!(
            ScenarioFile::parse("{"),
            Err(ReportError::Scenario(_))
        ));
        let wrong_level = CP2.replace(r#"["1"]"#, r#"["1", "2"]"#);
        assert!(matches!(
            ScenarioFile::parse(&wrong_level).unwrap().build(),
            Err(ReportError::Scenario(_))
        ));
        let bad_rational = CP2.replace(r#"["1"]"#, r#"["x"]"#);
        assert!(matches!(
            ScenarioFile::parse(&bad_rational).unwrap().build(),
            Err(ReportError::Scenario(_))
        ));
        let bad_exps = CP2.replace(
            r#""level""#,
            r#""moment": {"f": [[[1,1,0,1,[1]]]]}, "level""#,
        );
        assert!(matches!(
            ScenarioFile::parse(&bad_exps).unwrap().build(),
            Err(ReportError::Scenario(_))
        ));
    }
}
