use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

use crate::linalg::min_singular_value;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{ReductionError, SamplerKind, Scenario, StratumSpec};
use crate::actions::Action;
use crate::exterior::numeric::{eval_one_form, real_from_z};
use crate::exterior::Form;
use crate::poly::rational_to_f64;

/// Points closer than this to a coordinate hyperplane count as lying on it.
const STRATUM_EPS: f64 = 1e-10;
const LEVEL_TOL: f64 = 1e-12;
const FREENESS_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelPoint {
    pub id: usize,
    pub stratum: String,
    #[serde(serialize_with = "ser_point")]
    pub z: Vec<Complex64>,
    pub level_residual: f64,
    /// Smallest singular value of the orbit frame.
    pub freeness: f64,
    /// Smallest singular value of the moment differentials.
    pub regularity: f64,
}

fn ser_point<S: serde::Serializer>(z: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(z.iter().map(|c| [c.re, c.im]))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleSet {
    pub points: Vec<LevelPoint>,
    pub attempts: usize,
    pub rejected: BTreeMap<String, usize>,
}

/// First stratum whose coordinates all vanish at `z`, else `"generic"`.
pub fn stratum_of(strata: &[StratumSpec], z: &[Complex64]) -> String {
    strata
        .iter()
        .find(|s| s.zero_coords.iter().all(|&c| z[c].norm() < STRATUM_EPS))
        .map_or_else(|| "generic".to_string(), |s| s.label.clone())
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

fn gaussian_point(rng: &mut ChaCha8Rng, n: usize, zero: &[usize]) -> Vec<Complex64> {
    (0..n)
        .map(|j| {
            let c = Complex64::new(normal(rng), normal(rng));
            if zero.contains(&j) {
                Complex64::new(0.0, 0.0)
            } else {
                c
            }
        })
        .collect()
}

fn min_singular(m: &DMatrix<f64>) -> f64 {
    if m.ncols() == 0 {
        return f64::INFINITY;
    }
    min_singular_value(m).unwrap_or(0.0)
}

struct PolytopeGeometry {
    normals: Vec<DVector<f64>>,
    offsets: Vec<f64>,
    lo: DVector<f64>,
    hi: DVector<f64>,
}

fn solve_small(a: &DMatrix<f64>, b: &DVector<f64>) -> Option<DVector<f64>> {
    let lu = a.clone().lu();
    if a.determinant().abs() < 1e-12 {
        return None;
    }
    lu.solve(b)
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

impl PolytopeGeometry {
    fn new(normals: &[Vec<i64>], offsets: &[f64]) -> Result<Self, ReductionError> {
        let d = normals[0].len();
        let nv: Vec<DVector<f64>> = normals
            .iter()
            .map(|v| DVector::from_iterator(d, v.iter().map(|&x| x as f64)))
            .collect();
        let mut verts = Vec::new();
        for s in subsets(nv.len(), d) {
            let a = DMatrix::from_fn(d, d, |i, j| nv[s[i]][j]);
            let b = DVector::from_iterator(d, s.iter().map(|&i| offsets[i]));
            if let Some(x) = solve_small(&a, &b) {
                if nv.iter().zip(offsets).all(|(n, &l)| n.dot(&x) <= l + 1e-9) {
                    verts.push(x);
                }
            }
        }
        if verts.is_empty() {
            return Err(ReductionError::Unreachable(
                "moment polytope has no vertices".into(),
            ));
        }
        let lo = DVector::from_fn(d, |i, _| {
            verts.iter().map(|v| v[i]).fold(f64::INFINITY, f64::min)
        });
        let hi = DVector::from_fn(d, |i, _| {
            verts.iter().map(|v| v[i]).fold(f64::NEG_INFINITY, f64::max)
        });
        if (0..d).any(|i| hi[i] - lo[i] < 1e-9) {
            return Err(ReductionError::Unreachable(
                "moment polytope has empty interior".into(),
            ));
        }
        Ok(PolytopeGeometry {
            normals: nv,
            offsets: offsets.to_vec(),
            lo,
            hi,
        })
    }

    /// Slacks `offset_j - <x, n_j>` of a random point, forced onto the facets in `on`.
    fn slacks(&self, rng: &mut ChaCha8Rng, on: &[usize]) -> Option<Vec<f64>> {
        let d = self.lo.len();
        let mut x = DVector::from_fn(d, |i, _| {
            self.lo[i] + (self.hi[i] - self.lo[i]) * rng.random::<f64>()
        });
        for &k in on {
            let nk = &self.normals[k];
            let gap = nk.dot(&x) - self.offsets[k];
            x -= nk * (gap / nk.norm_squared());
        }
        let margin = 1e-3 * (1.0 + self.offsets.iter().fold(0.0_f64, |a, b| a.max(b.abs())));
        let c: Vec<f64> = self
            .normals
            .iter()
            .zip(&self.offsets)
            .map(|(n, &l)| l - n.dot(&x))
            .collect();
        for (j, &cj) in c.iter().enumerate() {
            if on.contains(&j) {
                continue;
            }
            if cj <= margin {
                return None;
            }
        }
        Some(c)
    }
}

struct Sampler<'a> {
    scenario: &'a Scenario,
    level: Vec<f64>,
    polytope: Option<PolytopeGeometry>,
    dmu: Vec<Form>,
}

impl<'a> Sampler<'a> {
    fn new(scenario: &'a Scenario) -> Result<Self, ReductionError> {
        let polytope = match &scenario.sampler {
            SamplerKind::Polytope { normals, offsets } => Some(PolytopeGeometry::new(
                normals,
                &offsets.iter().map(rational_to_f64).collect::<Vec<_>>(),
            )?),
            _ => None,
        };
        let dmu = scenario
            .moment
            .f
            .iter()
            .map(|f| Form::function(f.clone()).d())
            .collect();
        Ok(Sampler {
            scenario,
            level: scenario.level_values(),
            polytope,
            dmu,
        })
    }

    fn level_residual(&self, z: &[Complex64]) -> f64 {
        self.scenario
            .moment
            .f
            .iter()
            .zip(&self.level)
            .map(|(f, l)| (f.eval(z).re - l).abs())
            .fold(0.0, f64::max)
    }

    fn draw(
        &self,
        rng: &mut ChaCha8Rng,
        zero: &[usize],
    ) -> Result<Option<Vec<Complex64>>, ReductionError> {
        let n = self.scenario.n();
        let f = &self.scenario.moment.f;
        Ok(match &self.scenario.sampler {
            SamplerKind::Radial => {
                let z = gaussian_point(rng, n, zero);
                let v = f[0].eval(&z).re;
                if self.level[0] <= 0.0 {
                    return Err(ReductionError::Unreachable(
                        "radial sampling needs a positive level".into(),
                    ));
                }
                if v <= 0.0 {
                    return Ok(None);
                }
                let s = (self.level[0] / v).sqrt();
                Some(z.iter().map(|c| c * s).collect())
            }
            SamplerKind::Polytope { .. } => {
                let geo = self.polytope.as_ref().expect("built with the sampler");
                let Some(c) = geo.slacks(rng, zero) else {
                    return Ok(None);
                };
                Some(
                    c.iter()
                        .enumerate()
                        .map(|(j, &cj)| {
                            let phase = 2.0 * std::f64::consts::PI * rng.random::<f64>();
                            if zero.contains(&j) {
                                Complex64::new(0.0, 0.0)
                            } else {
                                Complex64::from_polar((2.0 * cj).sqrt(), phase)
                            }
                        })
                        .collect(),
                )
            }
            SamplerKind::GramSchmidt => {
                let Action::Unitary(u) = &self.scenario.action else {
                    unreachable!("validated")
                };
                let (rows, cols) = (u.rows(), u.cols());
                let mut m = gaussian_point(rng, n, zero);
                for _pass in 0..2 {
                    for a in 0..rows {
                        for b in 0..a {
                            let mut dot = Complex64::new(0.0, 0.0);
                            for k in 0..cols {
                                dot += m[a * cols + k] * m[b * cols + k].conj();
                            }
                            for k in 0..cols {
                                let v = m[b * cols + k];
                                m[a * cols + k] -= dot * v;
                            }
                        }
                        let norm: f64 = (0..cols)
                            .map(|k| m[a * cols + k].norm_sqr())
                            .sum::<f64>()
                            .sqrt();
                        if norm < 1e-6 {
                            return Ok(None);
                        }
                        for k in 0..cols {
                            m[a * cols + k] /= norm;
                        }
                    }
                }
                Some(m)
            }
            SamplerKind::LineRoot => {
                let u = gaussian_point(rng, n, zero);
                let v = gaussian_point(rng, n, zero);
                let g = |s: f64| {
                    let p: Vec<Complex64> = u.iter().zip(&v).map(|(a, b)| a + b * s).collect();
                    f[0].eval(&p).re - self.level[0]
                };
                let grid = 400;
                let (lo, hi) = (-4.0, 4.0);
                let mut best: Option<f64> = None;
                let mut prev = (lo, g(lo));
                for i in 1..=grid {
                    let s = lo + (hi - lo) * i as f64 / grid as f64;
                    let gs = g(s);
                    if prev.1 == 0.0 || prev.1.signum() != gs.signum() {
                        let (mut a, mut b, mut ga) = (prev.0, s, prev.1);
                        for _ in 0..200 {
                            let mid = 0.5 * (a + b);
                            let gm = g(mid);
                            if gm == 0.0 {
                                a = mid;
                                b = mid;
                                break;
                            }
                            if gm.signum() == ga.signum() {
                                a = mid;
                                ga = gm;
                            } else {
                                b = mid;
                            }
                        }
                        let root = 0.5 * (a + b);
                        if best.is_none_or(|r: f64| root.abs() < r.abs()) {
                            best = Some(root);
                        }
                    }
                    prev = (s, gs);
                }
                best.map(|s| u.iter().zip(&v).map(|(a, b)| a + b * s).collect())
            }
        })
    }

    fn check(&self, z: &[Complex64]) -> Result<(f64, f64, f64), &'static str> {
        let resid = self.level_residual(z);
        if resid >= LEVEL_TOL * (1.0 + self.level.iter().fold(0.0_f64, |a, b| a.max(b.abs()))) {
            return Err("level residual");
        }
        let x = real_from_z(z);
        let free = min_singular(&self.scenario.action.field_frame(&x));
        if free <= FREENESS_TOL {
            return Err("action not free");
        }
        let k = self.dmu.len();
        let mut dm = DMatrix::zeros(x.len(), k);
        for (a, d) in self.dmu.iter().enumerate() {
            let col = eval_one_form(d, z)
                .expect("dimension fixed by scenario")
                .map(|c| c.re);
            dm.set_column(a, &col);
        }
        let reg = min_singular(&dm);
        if reg <= FREENESS_TOL {
            return Err("level not regular");
        }
        Ok((resid, free, reg))
    }
}

/// Deterministic seeded samples of the level set. When strata are declared,
/// about 30% of the points are drawn on them (round robin), the rest off them.
pub fn sample_level_set(
    scenario: &Scenario,
    count: usize,
    seed: u64,
) -> Result<SampleSet, ReductionError> {
    scenario.validate()?;
    let sampler = Sampler::new(scenario)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_strata = scenario.strata.len();
    let on_strata = if n_strata == 0 || count == 0 {
        0
    } else {
        ((3 * count).div_ceil(10)).max(n_strata).min(count)
    };
    let mut targets: Vec<Option<usize>> = vec![None; count - on_strata];
    targets.extend((0..on_strata).map(|i| Some(i % n_strata)));
    let mut points = Vec::with_capacity(count);
    let mut rejected: BTreeMap<String, usize> = BTreeMap::new();
    let mut attempts = 0;
    let budget = 10 * count.max(1);
    for target in targets {
        let (zero, want): (&[usize], String) = match target {
            None => (&[], "generic".to_string()),
            Some(i) => (
                &scenario.strata[i].zero_coords,
                scenario.strata[i].label.clone(),
            ),
        };
        loop {
            attempts += 1;
            if attempts > budget {
                return Err(ReductionError::RejectionRate {
                    accepted: points.len(),
                    attempts: attempts - 1,
                });
            }
            let Some(z) = sampler.draw(&mut rng, zero)? else {
                *rejected.entry("no point on level set".into()).or_default() += 1;
                continue;
            };
            if stratum_of(&scenario.strata, &z) != want {
                *rejected.entry("off target stratum".into()).or_default() += 1;
                continue;
            }
            match sampler.check(&z) {
                Ok((level_residual, freeness, regularity)) => {
                    points.push(LevelPoint {
                        id: points.len(),
                        stratum: want,
                        z,
                        level_residual,
                        freeness,
                        regularity,
                    });
                    break;
                }
                Err(reason) => *rejected.entry(reason.into()).or_default() += 1,
            }
        }
    }
    Ok(SampleSet {
        points,
        attempts,
        rejected,
    })
}
