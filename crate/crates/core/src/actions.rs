//! Linear torus and unitary actions on C^N, their fundamental fields and
//! moment maps, and generalized moment map verification.

use nalgebra::DVector;
use num_complex::Complex64;
use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::exterior::numeric::eval_one_form;
use crate::exterior::{Form, GeneralizedSection, VectorField};
use crate::linalg::{CVec, LinearGC, RMat};
use crate::poly::{gauss, gauss_i, gauss_int, rat, ComplexPolynomial, Gaussian, Rational, Var};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ActionError {
    #[error("weight rows must all have length {expected}, row {row} has {got}")]
    RaggedWeights {
        expected: usize,
        row: usize,
        got: usize,
    },
    #[error("moment map component {index} ({part}) is not real")]
    NotReal { index: usize, part: &'static str },
    #[error("moment map has {got} components, the group has dimension {expected}")]
    ComponentCount { expected: usize, got: usize },
    #[error("unitary action needs n >= 1 and m >= 1, got n = {n}, m = {m}")]
    BadUnitary { n: usize, m: usize },
}

/// Torus `T^k` acting on `C^N`; factor `a` rotates `z_j` with weight `weights[a][j]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TorusAction {
    n: usize,
    weights: Vec<Vec<i64>>,
}

impl TorusAction {
    pub fn new(n: usize, weights: Vec<Vec<i64>>) -> Result<Self, ActionError> {
        for (row, w) in weights.iter().enumerate() {
            if w.len() != n {
                return Err(ActionError::RaggedWeights {
                    expected: n,
                    row,
                    got: w.len(),
                });
            }
        }
        Ok(TorusAction { n, weights })
    }

    /// Diagonal circle with weight one on every coordinate.
    pub fn diagonal(n: usize) -> Self {
        TorusAction {
            n,
            weights: vec![vec![1; n]],
        }
    }

    pub fn weights(&self) -> &[Vec<i64>] {
        &self.weights
    }

    /// `i sum_j w_j (z_j d/dz_j - zbar_j d/dzbar_j)`, which is `x d/dy - y d/dx`
    /// for weight one on C.
    pub fn fundamental_field(&self, a: usize) -> VectorField {
        let n = self.n;
        let mut comps = Vec::new();
        for (j, &w) in self.weights[a].iter().enumerate() {
            if w == 0 {
                continue;
            }
            let c = gauss_int(0, w);
            comps.push((j, ComplexPolynomial::var(n, Var::Z(j)).scale(&c)));
            comps.push((n + j, ComplexPolynomial::var(n, Var::Zbar(j)).scale(&-c)));
        }
        VectorField::from_components(n, comps)
    }

    /// `Phi^a = (1/2) sum_j w_aj |z_j|^2`.
    pub fn standard_moment_map(&self) -> MomentMapPoly {
        let n = self.n;
        let f = self
            .weights
            .iter()
            .map(|w| {
                let mut p = ComplexPolynomial::zero(n);
                for (j, &wj) in w.iter().enumerate() {
                    let zz = &ComplexPolynomial::var(n, Var::Z(j))
                        * &ComplexPolynomial::var(n, Var::Zbar(j));
                    p += zz.scale(&gauss(rat(wj, 2), Rational::zero()));
                }
                p
            })
            .collect();
        MomentMapPoly::real(f).expect("weighted moduli are real")
    }

    /// Real generator: the fundamental field at `p` is `A p` in real coordinates.
    pub fn generator(&self, a: usize) -> RMat {
        let n = self.n;
        let mut g = RMat::zeros(2 * n, 2 * n);
        for (j, &w) in self.weights[a].iter().enumerate() {
            g[(2 * j + 1, 2 * j)] = w as f64;
            g[(2 * j, 2 * j + 1)] = -(w as f64);
        }
        g
    }
}

/// `U(n)` acting by left multiplication on `n x m` matrices, flattened as
/// `z_{a m + k} = Z_{a k}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UnitaryAction {
    n: usize,
    m: usize,
}

impl UnitaryAction {
    pub fn new(n: usize, m: usize) -> Result<Self, ActionError> {
        if n == 0 || m == 0 {
            return Err(ActionError::BadUnitary { n, m });
        }
        Ok(UnitaryAction { n, m })
    }

    pub fn rows(&self) -> usize {
        self.n
    }

    pub fn cols(&self) -> usize {
        self.m
    }

    pub fn index(&self, a: usize, k: usize) -> usize {
        a * self.m + k
    }

    /// Skew-Hermitian basis: for `a < b`, `E_ab - E_ba` then `i(E_ab + E_ba)`;
    /// then `i E_aa`.
    pub fn lie_basis(&self) -> Vec<Vec<Vec<Gaussian>>> {
        let n = self.n;
        let zero = || vec![vec![Gaussian::zero(); n]; n];
        let mut out = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                let mut e = zero();
                e[a][b] = gauss_int(1, 0);
                e[b][a] = gauss_int(-1, 0);
                out.push(e);
                let mut f = zero();
                f[a][b] = gauss_i();
                f[b][a] = gauss_i();
                out.push(f);
            }
        }
        for a in 0..n {
            let mut e = zero();
            e[a][a] = gauss_i();
            out.push(e);
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.n * self.n
    }

    /// Linearization of `Z -> exp(t xi) Z`.
    pub fn fundamental_field(&self, idx: usize) -> VectorField {
        let xi = &self.lie_basis()[idx];
        let nn = self.n * self.m;
        let mut comps = Vec::new();
        for a in 0..self.n {
            for k in 0..self.m {
                let mut p = ComplexPolynomial::zero(nn);
                for (b, row) in xi[a].iter().enumerate() {
                    if !row.is_zero() {
                        p += ComplexPolynomial::var(nn, Var::Z(self.index(b, k))).scale(row);
                    }
                }
                let i = self.index(a, k);
                comps.push((nn + i, p.conjugate()));
                comps.push((i, p));
            }
        }
        VectorField::from_components(nn, comps)
    }

    /// Entries of `Z Z^dagger` as polynomials.
    pub fn gram_matrix(&self) -> Vec<Vec<ComplexPolynomial>> {
        let nn = self.n * self.m;
        (0..self.n)
            .map(|a| {
                (0..self.n)
                    .map(|b| {
                        let mut p = ComplexPolynomial::zero(nn);
                        for k in 0..self.m {
                            p += &ComplexPolynomial::var(nn, Var::Z(self.index(a, k)))
                                * &ComplexPolynomial::var(nn, Var::Zbar(self.index(b, k)));
                        }
                        p
                    })
                    .collect()
            })
            .collect()
    }

    /// `f^xi = -(i/2) tr(xi Z Z^dagger)` for each basis element.
    pub fn moment_map(&self) -> MomentMapPoly {
        let gram = self.gram_matrix();
        let nn = self.n * self.m;
        let half_i = gauss(Rational::zero(), rat(-1, 2));
        let f = self
            .lie_basis()
            .iter()
            .map(|xi| {
                let mut p = ComplexPolynomial::zero(nn);
                for a in 0..self.n {
                    for b in 0..self.n {
                        if !xi[a][b].is_zero() {
                            p += gram[b][a].scale(&(&xi[a][b] * &half_i));
                        }
                    }
                }
                p
            })
            .collect();
        MomentMapPoly::real(f).expect("moment map of a unitary action is real")
    }

    /// Values of the moment map at `Z Z^dagger = I`.
    pub fn central_level(&self) -> Vec<Rational> {
        let half_i = gauss(Rational::zero(), rat(-1, 2));
        self.lie_basis()
            .iter()
            .map(|xi| {
                let mut tr = Gaussian::zero();
                for (a, row) in xi.iter().enumerate() {
                    tr += row[a].clone();
                }
                (tr * &half_i).re
            })
            .collect()
    }

    /// Real generator of the fundamental field of basis element `idx`.
    pub fn generator(&self, idx: usize) -> RMat {
        let xi = &self.lie_basis()[idx];
        let nn = self.n * self.m;
        let mut g = RMat::zeros(2 * nn, 2 * nn);
        for a in 0..self.n {
            for b in 0..self.n {
                let c = crate::poly::gaussian_to_c64(&xi[a][b]);
                if c == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for k in 0..self.m {
                    let (r, s) = (self.index(a, k), self.index(b, k));
                    g[(2 * r, 2 * s)] += c.re;
                    g[(2 * r, 2 * s + 1)] -= c.im;
                    g[(2 * r + 1, 2 * s)] += c.im;
                    g[(2 * r + 1, 2 * s + 1)] += c.re;
                }
            }
        }
        g
    }

    /// Fields of the commuting right action `Z -> Z exp(t B)`, `B` running over
    /// the skew-Hermitian basis of `u(m)`.
    pub fn right_fields(&self) -> Vec<VectorField> {
        let right = UnitaryAction { n: self.m, m: 1 };
        let nn = self.n * self.m;
        right
            .lie_basis()
            .iter()
            .map(|bm| {
                let mut comps = Vec::new();
                for a in 0..self.n {
                    for k in 0..self.m {
                        let mut p = ComplexPolynomial::zero(nn);
                        for l in 0..self.m {
                            if !bm[l][k].is_zero() {
                                p += ComplexPolynomial::var(nn, Var::Z(self.index(a, l)))
                                    .scale(&bm[l][k]);
                            }
                        }
                        let i = self.index(a, k);
                        comps.push((nn + i, p.conjugate()));
                        comps.push((i, p));
                    }
                }
                VectorField::from_components(nn, comps)
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Action {
    Torus(TorusAction),
    Unitary(UnitaryAction),
}

impl Action {
    pub fn ambient_n(&self) -> usize {
        match self {
            Action::Torus(t) => t.n,
            Action::Unitary(u) => u.n * u.m,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Action::Torus(t) => t.weights.len(),
            Action::Unitary(u) => u.dim(),
        }
    }

    pub fn is_abelian(&self) -> bool {
        match self {
            Action::Torus(_) => true,
            Action::Unitary(u) => u.n == 1,
        }
    }

    pub fn fundamental_field(&self, idx: usize) -> VectorField {
        match self {
            Action::Torus(t) => t.fundamental_field(idx),
            Action::Unitary(u) => u.fundamental_field(idx),
        }
    }

    pub fn fundamental_section(&self, idx: usize) -> GeneralizedSection {
        GeneralizedSection::from_vector(self.fundamental_field(idx))
    }

    pub fn generator(&self, idx: usize) -> RMat {
        match self {
            Action::Torus(t) => t.generator(idx),
            Action::Unitary(u) => u.generator(idx),
        }
    }

    /// Real `2N x k` matrix of fundamental fields at `x` (real coordinates).
    pub fn field_frame(&self, x: &[f64]) -> RMat {
        let p = DVector::from_column_slice(x);
        let k = self.dim();
        let mut q = RMat::zeros(x.len(), k);
        for a in 0..k {
            q.set_column(a, &(self.generator(a) * &p));
        }
        q
    }
}

/// Generalized moment map `mu = f + i h` with real polynomial components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MomentMapPoly {
    pub f: Vec<ComplexPolynomial>,
    pub h: Vec<ComplexPolynomial>,
}

impl MomentMapPoly {
    pub fn new(f: Vec<ComplexPolynomial>, h: Vec<ComplexPolynomial>) -> Result<Self, ActionError> {
        if f.len() != h.len() {
            return Err(ActionError::ComponentCount {
                expected: f.len(),
                got: h.len(),
            });
        }
        for (i, p) in f.iter().enumerate() {
            if !p.is_real() {
                return Err(ActionError::NotReal {
                    index: i,
                    part: "real part",
                });
            }
        }
        for (i, p) in h.iter().enumerate() {
            if !p.is_real() {
                return Err(ActionError::NotReal {
                    index: i,
                    part: "imaginary part",
                });
            }
        }
        Ok(MomentMapPoly { f, h })
    }

    pub fn real(f: Vec<ComplexPolynomial>) -> Result<Self, ActionError> {
        let h = f
            .iter()
            .map(|p| ComplexPolynomial::zero(p.nvars()))
            .collect();
        Self::new(f, h)
    }

    pub fn len(&self) -> usize {
        self.f.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f.is_empty()
    }

    pub fn is_real(&self) -> bool {
        self.h.iter().all(|p| p.is_zero())
    }

    /// `mu^xi` as a single complex polynomial.
    pub fn component(&self, a: usize) -> ComplexPolynomial {
        &self.f[a] + &self.h[a].scale(&gauss_i())
    }
}

pub fn grassmannian_moment_map(n: usize, m: usize) -> Result<MomentMapPoly, ActionError> {
    Ok(UnitaryAction::new(n, m)?.moment_map())
}

/// `mu + i Phi`.
pub fn shift_by_bfield(
    mu: &MomentMapPoly,
    phi: &MomentMapPoly,
) -> Result<MomentMapPoly, ActionError> {
    if mu.len() != phi.len() {
        return Err(ActionError::ComponentCount {
            expected: mu.len(),
            got: phi.len(),
        });
    }
    if !phi.is_real() {
        return Err(ActionError::NotReal {
            index: 0,
            part: "shift",
        });
    }
    let h = mu.h.iter().zip(&phi.f).map(|(a, b)| a + b).collect();
    MomentMapPoly::new(mu.f.clone(), h)
}

/// The Kahler form `sum_j dy_j ^ dx_j = -(i/2) sum_j dz_j ^ dzbar_j`, whose
/// pairing with the standard complex structure is positive.
pub fn kahler_form(n: usize) -> Form {
    let c = gauss(Rational::zero(), rat(-1, 2));
    let mut w = Form::zero(n, 2);
    for j in 0..n {
        w = w.add(&Form::from_components(
            n,
            2,
            [(vec![j, n + j], ComplexPolynomial::constant(n, c.clone()))],
        ));
    }
    w
}

/// `xi_M - i d mu^xi` at a point, in real coordinates of `V + V*`.
pub fn moment_vector(
    action: &Action,
    mu: &MomentMapPoly,
    a: usize,
    z: &[Complex64],
    x: &[f64],
) -> CVec {
    let nn = action.ambient_n();
    let xi = action.generator(a) * DVector::from_column_slice(x);
    let dmu = eval_one_form(&Form::function(mu.component(a)).d(), z)
        .expect("dimension checked by caller");
    let mut v = CVec::zeros(4 * nn);
    for i in 0..2 * nn {
        v[i] = Complex64::new(xi[i], 0.0);
        v[2 * nn + i] = -Complex64::new(0.0, 1.0) * dmu[i];
    }
    v
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentRow {
    pub point: usize,
    pub basis: usize,
    pub membership_residual: f64,
    pub equivariance_residual: Option<f64>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentMapReport {
    pub rows: Vec<MomentRow>,
    pub max_membership_residual: f64,
    pub pass: bool,
}

/// Check `xi_M - i d mu^xi in L` at every sample, and `i_{xi_M} d mu^eta = 0` for tori.
pub fn verify_moment_map<F, E>(
    structure_at: F,
    action: &Action,
    mu: &MomentMapPoly,
    samples: &[Vec<Complex64>],
    tol: f64,
) -> MomentMapReport
where
    F: Fn(&[Complex64]) -> Result<LinearGC, E>,
{
    let k = action.dim();
    let mut rows = Vec::new();
    let dmus: Vec<Form> = (0..k)
        .map(|a| Form::function(mu.component(a)).d())
        .collect();
    for (pi, z) in samples.iter().enumerate() {
        let x = crate::exterior::numeric::real_from_z(z);
        let j = structure_at(z).ok();
        let l = j.as_ref().and_then(|j| j.eigenbundle().ok());
        for a in 0..k {
            let v = moment_vector(action, mu, a, z, &x);
            let membership = l.as_ref().map(|l| l.residual(&v)).unwrap_or(f64::INFINITY);
            let equiv = if action.is_abelian() {
                let field = action.fundamental_field(a);
                let mut worst: f64 = 0.0;
                for d in &dmus {
                    let c = d.contract(&field).as_function().eval(z);
                    worst = worst.max(c.norm());
                }
                Some(worst)
            } else {
                None
            };
            let pass = membership < tol && equiv.map(|e| e < tol).unwrap_or(true);
            rows.push(MomentRow {
                point: pi,
                basis: a,
                membership_residual: membership,
                equivariance_residual: equiv,
                pass,
            });
        }
    }
    let max_membership_residual = rows
        .iter()
        .map(|r| r.membership_residual)
        .fold(0.0, f64::max);
    let pass = !rows.is_empty() && rows.iter().all(|r| r.pass);
    MomentMapReport {
        rows,
        max_membership_residual,
        pass,
    }
}

/// `d Phi^a - i_{xi_M} w` for each component, exactly.
pub fn moment_identity_residuals(action: &Action, mu: &MomentMapPoly, omega: &Form) -> Vec<Form> {
    (0..action.dim())
        .map(|a| {
            let lhs = Form::function(mu.f[a].clone()).d();
            lhs.sub(&omega.contract(&action.fundamental_field(a)))
        })
        .collect()
}
