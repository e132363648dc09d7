//! Polytope data for toric quotients and the exact search for a functional
//! `alpha` with `alpha(n_i) = alpha(n_j) = -1` and `alpha(n_k) >= 0` otherwise.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::CatalogError;
use crate::poly::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolytopeSpec {
    normals: Vec<Vec<i64>>,
    offsets: Vec<Rational>,
}

impl PolytopeSpec {
    pub fn new(normals: Vec<Vec<i64>>, offsets: Vec<Rational>) -> Result<Self, CatalogError> {
        let d = normals.first().map_or(0, |v| v.len());
        if d == 0
            || normals.len() <= d
            || normals.iter().any(|v| v.len() != d)
            || offsets.len() != normals.len()
        {
            return Err(CatalogError::Polytope(
                "need more facets than dimensions, consistent lengths".into(),
            ));
        }
        for v in &normals {
            let g = v.iter().fold(0i64, |a, &b| a.gcd(&b));
            if g != 1 {
                return Err(CatalogError::Polytope(format!(
                    "normal {v:?} is not primitive"
                )));
            }
        }
        let spec = PolytopeSpec { normals, offsets };
        if rank(&spec.facet_matrix()) != d {
            return Err(CatalogError::Polytope("normals do not span".into()));
        }
        Ok(spec)
    }

    pub fn dim(&self) -> usize {
        self.normals[0].len()
    }

    pub fn facets(&self) -> usize {
        self.normals.len()
    }

    pub fn normals(&self) -> &[Vec<i64>] {
        &self.normals
    }

    pub fn offsets(&self) -> &[Rational] {
        &self.offsets
    }

    /// `d x N` matrix of the map `e_i -> n_i`.
    fn facet_matrix(&self) -> Vec<Vec<Rational>> {
        (0..self.dim())
            .map(|r| {
                self.normals
                    .iter()
                    .map(|v| Rational::from_integer(v[r].into()))
                    .collect()
            })
            .collect()
    }

    /// Primitive integer basis of the kernel of the facet map, one row per
    /// circle of the kernel torus.
    pub fn kernel_weights(&self) -> Vec<Vec<i64>> {
        let basis = nullspace(&self.facet_matrix(), self.facets());
        basis
            .into_iter()
            .map(|v| {
                let lcm = v.iter().fold(BigInt::one(), |a, r| a.lcm(r.denom()));
                let ints: Vec<BigInt> = v
                    .iter()
                    .map(|r| (r * Rational::from_integer(lcm.clone())).to_integer())
                    .collect();
                let g = ints.iter().fold(BigInt::zero(), |a, b| a.gcd(b));
                ints.iter()
                    .map(|x| i64::try_from(x / &g).expect("small weights"))
                    .collect()
            })
            .collect()
    }

    /// Kernel-torus level `W lambda` matching the offsets.
    pub fn level(&self) -> Vec<Rational> {
        self.kernel_weights()
            .iter()
            .map(|w| {
                w.iter()
                    .zip(&self.offsets)
                    .fold(Rational::zero(), |a, (wi, l)| {
                        a + Rational::from_integer((*wi).into()) * l
                    })
            })
            .collect()
    }
}

fn rref(m: &[Vec<Rational>], cols: usize) -> (Vec<Vec<Rational>>, Vec<usize>) {
    let mut a: Vec<Vec<Rational>> = m.to_vec();
    let mut pivots = Vec::new();
    let mut row = 0;
    for c in 0..cols {
        let Some(p) = (row..a.len()).find(|&r| !a[r][c].is_zero()) else {
            continue;
        };
        a.swap(row, p);
        let piv = a[row][c].clone();
        for x in a[row].iter_mut() {
            *x = &*x / &piv;
        }
        for r in 0..a.len() {
            if r != row && !a[r][c].is_zero() {
                let f = a[r][c].clone();
                let src = a[row].clone();
                for (x, s) in a[r].iter_mut().zip(&src) {
                    *x = &*x - &f * s;
                }
            }
        }
        pivots.push(c);
        row += 1;
        if row == a.len() {
            break;
        }
    }
    (a, pivots)
}

fn rank(m: &[Vec<Rational>]) -> usize {
    let cols = m.first().map_or(0, |r| r.len());
    rref(m, cols).1.len()
}

fn nullspace(m: &[Vec<Rational>], cols: usize) -> Vec<Vec<Rational>> {
    let (r, pivots) = rref(m, cols);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); cols];
            v[f] = Rational::one();
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = -r[i][f].clone();
            }
            v
        })
        .collect()
}

/// One inequality `coeffs . t <= rhs`, with the nonnegative multipliers of the
/// original inequalities that produced it.
#[derive(Clone, Debug)]
struct Ineq {
    coeffs: Vec<Rational>,
    rhs: Rational,
    mult: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairCertificate {
    pub pair: (usize, usize),
    pub reason: String,
    /// Nonnegative multipliers `y` over the facets outside the pair with
    /// `y^T A = 0` and `y^T b < 0` for the reduced system `A t <= b`.
    pub farkas: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum AlphaResult {
    Feasible {
        pair: (usize, usize),
        #[serde(serialize_with = "ser_rat")]
        alpha: Vec<Rational>,
        /// `alpha(n_k)` for facets outside the pair, zero on the pair.
        exponents: Vec<u32>,
        rejected_pairs: Vec<PairCertificate>,
    },
    Infeasible {
        certificates: Vec<PairCertificate>,
    },
}

fn ser_rat<S: serde::Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|r| r.to_string()))
}

impl AlphaResult {
    pub fn is_feasible(&self) -> bool {
        matches!(self, AlphaResult::Feasible { .. })
    }
}

/// Fourier-Motzkin elimination of the last variable.
fn eliminate(sys: &[Ineq]) -> Vec<Ineq> {
    if sys.is_empty() {
        return Vec::new();
    }
    let v = sys[0].coeffs.len() - 1;
    let (mut pos, mut neg, mut out) = (Vec::new(), Vec::new(), Vec::new());
    for r in sys {
        let c = &r.coeffs[v];
        if c.is_positive() {
            pos.push(r);
        } else if c.is_negative() {
            neg.push(r);
        } else {
            out.push(Ineq {
                coeffs: r.coeffs[..v].to_vec(),
                rhs: r.rhs.clone(),
                mult: r.mult.clone(),
            });
        }
    }
    for p in &pos {
        for q in &neg {
            let (a, b) = (p.coeffs[v].clone(), -q.coeffs[v].clone());
            let comb = |x: &Rational, y: &Rational| x / &a + y / &b;
            out.push(Ineq {
                coeffs: (0..v).map(|i| comb(&p.coeffs[i], &q.coeffs[i])).collect(),
                rhs: comb(&p.rhs, &q.rhs),
                mult: p
                    .mult
                    .iter()
                    .zip(&q.mult)
                    .map(|(x, y)| comb(x, y))
                    .collect(),
            });
        }
    }
    out
}

/// Value in `[lo, hi]`: the integer closest to zero when one exists.
fn choose(lo: Option<Rational>, hi: Option<Rational>) -> Rational {
    let zero = Rational::zero();
    match (lo, hi) {
        (None, None) => zero,
        (Some(l), None) => {
            if l <= zero {
                zero
            } else {
                l.ceil()
            }
        }
        (None, Some(h)) => {
            if h >= zero {
                zero
            } else {
                h.floor()
            }
        }
        (Some(l), Some(h)) => {
            if l <= zero && zero <= h {
                zero
            } else if l > zero && l.ceil() <= h {
                l.ceil()
            } else if h < zero && h.floor() >= l {
                h.floor()
            } else {
                (l + h) / Rational::from_integer(2.into())
            }
        }
    }
}

fn solve_pair(spec: &PolytopeSpec, i: usize, j: usize) -> Result<Vec<Rational>, PairCertificate> {
    let d = spec.dim();
    let to_r = |x: i64| Rational::from_integer(x.into());
    let cert = |reason: String, farkas| PairCertificate {
        pair: (i, j),
        reason,
        farkas,
    };
    // equalities alpha . n_i = alpha . n_j = -1
    let aug: Vec<Vec<Rational>> = [i, j]
        .iter()
        .map(|&f| {
            spec.normals[f]
                .iter()
                .map(|&x| to_r(x))
                .chain([to_r(-1)])
                .collect()
        })
        .collect();
    let (r, pivots) = rref(&aug, d + 1);
    if pivots.contains(&d) {
        return Err(cert(
            format!("alpha(n_{i}) = alpha(n_{j}) = -1 has no solution"),
            None,
        ));
    }
    let free: Vec<usize> = (0..d).filter(|c| !pivots.contains(c)).collect();
    // alpha = base + sum_f t_f dir_f
    let mut base = vec![Rational::zero(); d];
    for (row, &p) in pivots.iter().enumerate() {
        base[p] = r[row][d].clone();
    }
    let dirs: Vec<Vec<Rational>> = free
        .iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); d];
            v[f] = Rational::one();
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = -r[row][f].clone();
            }
            v
        })
        .collect();
    let others: Vec<usize> = (0..spec.facets()).filter(|&k| k != i && k != j).collect();
    let dot = |v: &[Rational], k: usize| {
        v.iter()
            .zip(&spec.normals[k])
            .fold(Rational::zero(), |a, (x, &y)| a + x * to_r(y))
    };
    // -(n_k . dir) t <= n_k . base
    let sys: Vec<Ineq> = others
        .iter()
        .enumerate()
        .map(|(idx, &k)| Ineq {
            coeffs: dirs.iter().map(|dv| -dot(dv, k)).collect(),
            rhs: dot(&base, k),
            mult: (0..others.len())
                .map(|e| {
                    if e == idx {
                        Rational::one()
                    } else {
                        Rational::zero()
                    }
                })
                .collect(),
        })
        .collect();
    let mut levels = vec![sys];
    for _ in 0..free.len() {
        let next = eliminate(levels.last().expect("nonempty"));
        levels.push(next);
    }
    if let Some(bad) = levels
        .last()
        .expect("nonempty")
        .iter()
        .find(|r| r.rhs.is_negative())
    {
        return Err(cert(
            format!("elimination derives 0 <= {}", bad.rhs),
            Some(bad.mult.iter().map(|m| m.to_string()).collect()),
        ));
    }
    let mut t: Vec<Rational> = Vec::new();
    for v in 0..free.len() {
        let sys = &levels[free.len() - 1 - v];
        let (mut lo, mut hi): (Option<Rational>, Option<Rational>) = (None, None);
        for r in sys {
            let c = &r.coeffs[v];
            if c.is_zero() {
                continue;
            }
            let rest = r.rhs.clone()
                - t.iter()
                    .zip(&r.coeffs)
                    .fold(Rational::zero(), |a, (x, y)| a + x * y);
            let bound = rest / c;
            if c.is_positive() {
                hi = Some(hi.map_or(bound.clone(), |h| h.min(bound)));
            } else {
                lo = Some(lo.map_or(bound.clone(), |l| l.max(bound)));
            }
        }
        t.push(choose(lo, hi));
    }
    let mut alpha = base;
    for (tv, dv) in t.iter().zip(&dirs) {
        for (a, x) in alpha.iter_mut().zip(dv) {
            *a += tv * x;
        }
    }
    for &k in &others {
        let e = dot(&alpha, k);
        if e.is_negative() {
            return Err(cert(format!("back substitution violated facet {k}"), None));
        }
        if !e.is_integer() {
            return Err(cert(format!("alpha(n_{k}) = {e} is not an integer"), None));
        }
    }
    Ok(alpha)
}

/// First feasible facet pair `(i, j)`, `i < j`, in lexicographic order, with
/// an exact `alpha`; otherwise a certificate for every pair.
pub fn find_alpha(spec: &PolytopeSpec) -> AlphaResult {
    let mut certs = Vec::new();
    for i in 0..spec.facets() {
        for j in i + 1..spec.facets() {
            match solve_pair(spec, i, j) {
                Ok(alpha) => {
                    let exponents = (0..spec.facets())
                        .map(|k| {
                            if k == i || k == j {
                                0
                            } else {
                                let e = alpha
                                    .iter()
                                    .zip(&spec.normals[k])
                                    .fold(Rational::zero(), |a, (x, &y)| {
                                        a + x * Rational::from_integer(y.into())
                                    });
                                u32::try_from(e.to_integer()).expect("checked nonnegative integer")
                            }
                        })
                        .collect();
                    return AlphaResult::Feasible {
                        pair: (i, j),
                        alpha,
                        exponents,
                        rejected_pairs: certs,
                    };
                }
                Err(c) => certs.push(c),
            }
        }
    }
    AlphaResult::Infeasible {
        certificates: certs,
    }
}

/// Re-check an `alpha` against a facet pair.
pub fn check_alpha(spec: &PolytopeSpec, pair: (usize, usize), alpha: &[Rational]) -> bool {
    if alpha.len() != spec.dim() || pair.0 == pair.1 || pair.0.max(pair.1) >= spec.facets() {
        return false;
    }
    (0..spec.facets()).all(|k| {
        let e = alpha
            .iter()
            .zip(&spec.normals[k])
            .fold(Rational::zero(), |a, (x, &y)| {
                a + x * Rational::from_integer(y.into())
            });
        if k == pair.0 || k == pair.1 {
            e == Rational::from_integer((-1).into())
        } else {
            !e.is_negative() && e.is_integer()
        }
    })
}
