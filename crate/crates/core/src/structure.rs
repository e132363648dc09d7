//! Structure recipes: how a generalized Kahler pair on `C^n` is specified,
//! evaluated at a point, and tested for membership symbolically.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::actions::Action;
use crate::exterior::numeric::{eval_deformation, eval_one_form, eval_two_form_map, real_from_z};
use crate::exterior::real_frame::{section_components, section_from_components};
use crate::exterior::{CalculusError, DeformationBivector, Form, GeneralizedSection};
use crate::linalg::{
    deform_pointwise, pairing_matrix, real_part, GcsError, KahlerPairNum, LinearGC, PairError, RMat,
};
use crate::poly::{gauss, rational_to_f64, ComplexPolynomial, Gaussian, Rational};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StructureError {
    #[error("matrix shape {rows}x{cols} does not fit ambient dimension {n}")]
    Shape { rows: usize, cols: usize, n: usize },
    #[error("exact matrix is singular")]
    Singular,
    #[error("orbit directions degenerate at this point: smallest eigenvalue {eig:e}")]
    DegenerateOrbit { eig: f64 },
    #[error("canonical connection needs a constant base structure")]
    NotConstant,
    #[error("generalized complex structure: {0}")]
    Gcs(#[from] GcsError),
    #[error("generalized Kahler pair: {0}")]
    Pair(#[from] PairError),
    #[error("calculus: {0}")]
    Calculus(#[from] CalculusError),
}

/// Dense matrix with exact rational entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl ExactMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ExactMatrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, Rational::from_integer(v.into()));
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn mul(&self, o: &ExactMatrix) -> ExactMatrix {
        assert_eq!(self.cols, o.rows);
        let mut out = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if !b.is_zero() {
                        let v = out.get(i, j) + a * b;
                        out.set(i, j, v);
                    }
                }
            }
        }
        out
    }

    fn zip(&self, o: &ExactMatrix, f: impl Fn(&Rational, &Rational) -> Rational) -> ExactMatrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        ExactMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&o.data)
                .map(|(a, b)| f(a, b))
                .collect(),
        }
    }

    pub fn add(&self, o: &ExactMatrix) -> ExactMatrix {
        self.zip(o, |a, b| a + b)
    }

    pub fn sub(&self, o: &ExactMatrix) -> ExactMatrix {
        self.zip(o, |a, b| a - b)
    }

    pub fn scale(&self, c: &Rational) -> ExactMatrix {
        ExactMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * c).collect(),
        }
    }

    pub fn transpose(&self) -> ExactMatrix {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    /// Gauss-Jordan inverse.
    pub fn inverse(&self) -> Result<ExactMatrix, StructureError> {
        let n = self.rows;
        if n != self.cols {
            return Err(StructureError::Singular);
        }
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let piv = (col..n)
                .find(|&r| !a.get(r, col).is_zero())
                .ok_or(StructureError::Singular)?;
            if piv != col {
                for j in 0..n {
                    a.data.swap(piv * n + j, col * n + j);
                    inv.data.swap(piv * n + j, col * n + j);
                }
            }
            let p = a.get(col, col).clone();
            for j in 0..n {
                let (x, y) = (a.get(col, j) / &p, inv.get(col, j) / &p);
                a.set(col, j, x);
                inv.set(col, j, y);
            }
            for r in 0..n {
                if r == col || a.get(r, col).is_zero() {
                    continue;
                }
                let f = a.get(r, col).clone();
                for j in 0..n {
                    let (x, y) = (
                        a.get(r, j) - &f * a.get(col, j),
                        inv.get(r, j) - &f * inv.get(col, j),
                    );
                    a.set(r, j, x);
                    inv.set(r, j, y);
                }
            }
        }
        Ok(inv)
    }

    /// `[[a, b], [c, d]]`.
    pub fn blocks(
        a: &ExactMatrix,
        b: &ExactMatrix,
        c: &ExactMatrix,
        d: &ExactMatrix,
    ) -> ExactMatrix {
        let (r, s) = (a.rows, a.cols);
        let mut out = Self::zeros(r + c.rows, s + b.cols);
        for (blk, (oi, oj)) in [(a, (0, 0)), (b, (0, s)), (c, (r, 0)), (d, (r, s))] {
            for i in 0..blk.rows {
                for j in 0..blk.cols {
                    out.set(oi + i, oj + j, blk.get(i, j).clone());
                }
            }
        }
        out
    }

    pub fn to_f64(&self) -> RMat {
        DMatrix::from_fn(self.rows, self.cols, |i, j| rational_to_f64(self.get(i, j)))
    }
}

/// Standard complex structure on `R^{2n}`: `(x, y) -> (-y, x)` per coordinate.
pub fn exact_j_std(n: usize) -> ExactMatrix {
    let mut j = ExactMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        j.set(2 * k + 1, 2 * k, Rational::one());
        j.set(2 * k, 2 * k + 1, -Rational::one());
    }
    j
}

/// `[[0, -W^{-1}], [W, 0]]` for a nondegenerate 2-form given as a map `V -> V*`.
pub fn exact_from_symplectic(w: &ExactMatrix) -> Result<ExactMatrix, StructureError> {
    let m = w.rows();
    let z = ExactMatrix::zeros(m, m);
    let winv = w.inverse()?;
    Ok(ExactMatrix::blocks(
        &z,
        &winv.scale(&-Rational::one()),
        w,
        &z,
    ))
}

/// `diag(-J, J^T)`.
pub fn exact_from_complex(j: &ExactMatrix) -> ExactMatrix {
    let m = j.rows();
    let z = ExactMatrix::zeros(m, m);
    ExactMatrix::blocks(&j.scale(&-Rational::one()), &z, &z, &j.transpose())
}

/// `e^B = [[I, 0], [B, I]]`.
pub fn exact_exp_b(b: &ExactMatrix) -> ExactMatrix {
    let m = b.rows();
    let id = ExactMatrix::identity(m);
    ExactMatrix::blocks(&id, &ExactMatrix::zeros(m, m), b, &id)
}

/// Exact Kahler pair on `C^n` for the catalog form `sum dy ^ dx` and the
/// standard complex structure.
pub fn exact_kahler(n: usize) -> (ExactMatrix, ExactMatrix) {
    let j = exact_j_std(n);
    let w = j.scale(&-Rational::one());
    (
        exact_from_symplectic(&w).expect("complex structure is invertible"),
        exact_from_complex(&j),
    )
}

/// Connection used to turn an imaginary moment map part into a B-field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Connection {
    /// Orthogonal projection onto orbits for the metric of the base pair.
    Canonical,
    /// Orthogonal projection for the flat Euclidean metric.
    Euclidean,
}

#[derive(Clone, Debug, PartialEq)]
pub enum StructureRecipe {
    /// Constant pair given exactly on the real frame.
    Constant { j1: ExactMatrix, j2: ExactMatrix },
    /// Symplectic side of the Kahler pair, complex side deformed by `t eps`.
    Deformed {
        eps: DeformationBivector,
        t: Rational,
    },
    /// Conjugation by `e^B` for a closed real polynomial 2-form.
    BShifted { base: Box<StructureRecipe>, b: Form },
    /// Conjugation by `e^B` with `B = d(theta, h)`, evaluated pointwise.
    Realified {
        base: Box<StructureRecipe>,
        action: Action,
        h: Vec<ComplexPolynomial>,
        connection: Connection,
    },
}

impl StructureRecipe {
    pub fn kahler(n: usize) -> Self {
        let (j1, j2) = exact_kahler(n);
        StructureRecipe::Constant { j1, j2 }
    }

    pub fn n(&self) -> usize {
        match self {
            StructureRecipe::Constant { j1, .. } => j1.rows() / 4,
            StructureRecipe::Deformed { eps, .. } => eps.n(),
            StructureRecipe::BShifted { base, .. } | StructureRecipe::Realified { base, .. } => {
                base.n()
            }
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, StructureRecipe::Constant { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            StructureRecipe::Constant { .. } => "constant",
            StructureRecipe::Deformed { .. } => "deformed",
            StructureRecipe::BShifted { .. } => "b_shifted",
            StructureRecipe::Realified { .. } => "realified",
        }
    }

    pub fn validate(&self) -> Result<(), StructureError> {
        match self {
            StructureRecipe::Constant { j1, j2 } => {
                let m = j1.rows();
                if m % 4 != 0 || j1.cols() != m || j2.rows() != m || j2.cols() != m {
                    return Err(StructureError::Shape {
                        rows: j2.rows(),
                        cols: j2.cols(),
                        n: m / 4,
                    });
                }
                Ok(())
            }
            StructureRecipe::Deformed { .. } => Ok(()),
            StructureRecipe::BShifted { base, b } => {
                if b.n() != base.n() || b.degree() != 2 {
                    return Err(StructureError::Shape {
                        rows: b.degree(),
                        cols: b.n(),
                        n: base.n(),
                    });
                }
                base.validate()
            }
            StructureRecipe::Realified {
                base,
                action,
                connection,
                ..
            } => {
                if action.ambient_n() != base.n() {
                    return Err(StructureError::Shape {
                        rows: action.ambient_n(),
                        cols: action.ambient_n(),
                        n: base.n(),
                    });
                }
                if *connection == Connection::Canonical && !base.is_constant() {
                    return Err(StructureError::NotConstant);
                }
                base.validate()
            }
        }
    }

    /// The pair at a point.
    pub fn pair_at(&self, z: &[Complex64]) -> Result<KahlerPairNum, StructureError> {
        match self {
            StructureRecipe::Constant { j1, j2 } => Ok(KahlerPairNum::new(
                LinearGC::new(j1.to_f64())?,
                LinearGC::new(j2.to_f64())?,
            )?),
            StructureRecipe::Deformed { eps, t } => {
                let n = eps.n();
                let (j1, j2) = exact_kahler(n);
                let base =
                    KahlerPairNum::new(LinearGC::new(j1.to_f64())?, LinearGC::new(j2.to_f64())?)?;
                let e = eval_deformation(eps, z)?;
                Ok(deform_pointwise(&base, &e, rational_to_f64(t))?)
            }
            StructureRecipe::BShifted { base, b } => {
                let bm = real_part(&eval_two_form_map(b, z)?);
                Ok(base.pair_at(z)?.b_transform(&bm)?)
            }
            StructureRecipe::Realified {
                base,
                action,
                h,
                connection,
            } => {
                let pair = base.pair_at(z)?;
                let metric = match connection {
                    Connection::Canonical => {
                        let m = pair.m();
                        let gt = pair.metric().transpose() * pairing_matrix(m);
                        let blk = gt.view((0, 0), (m, m)).into_owned();
                        (&blk + blk.transpose()) * 0.5
                    }
                    Connection::Euclidean => RMat::identity(2 * base.n(), 2 * base.n()),
                };
                let bm = realifying_bfield(&metric, action, h, z)?;
                Ok(pair.b_transform(&bm)?)
            }
        }
    }

    /// Exact eigenbundle models of `(L1, L2)` when the recipe is polynomial.
    pub fn symbolic_bundles(&self) -> Option<(SymbolicBundle, SymbolicBundle)> {
        match self {
            StructureRecipe::Constant { j1, j2 } => Some((
                SymbolicBundle::Constant(j1.clone()),
                SymbolicBundle::Constant(j2.clone()),
            )),
            StructureRecipe::Deformed { eps, t } => {
                let (j1, _) = exact_kahler(eps.n());
                let scaled = eps.scale(&gauss(t.clone(), Rational::zero()));
                Some((
                    SymbolicBundle::Constant(j1),
                    SymbolicBundle::Deformed(scaled),
                ))
            }
            StructureRecipe::BShifted { base, b } => {
                let (l1, l2) = base.symbolic_bundles()?;
                Some((
                    SymbolicBundle::BTransformed(Box::new(l1), b.clone()),
                    SymbolicBundle::BTransformed(Box::new(l2), b.clone()),
                ))
            }
            StructureRecipe::Realified { .. } => None,
        }
    }
}

/// Real 2-form `B = d(theta, h)` at a point, as a map `V -> V*`, where
/// `theta^a = sum_b K_ab <A_b p, .>_M` with `K` the inverse orbit Gram matrix.
/// The metric `M` must be constant and invariant.
pub fn realifying_bfield(
    metric: &RMat,
    action: &Action,
    h: &[ComplexPolynomial],
    z: &[Complex64],
) -> Result<RMat, StructureError> {
    let x = real_from_z(z);
    let p = DVector::from_column_slice(&x);
    let m = x.len();
    let k = action.dim();
    let gens: Vec<RMat> = (0..k).map(|a| action.generator(a)).collect();
    let v: Vec<DVector<f64>> = gens.iter().map(|g| g * &p).collect();
    let gram = RMat::from_fn(k, k, |a, b| (v[a].transpose() * metric * &v[b])[(0, 0)]);
    let eig = gram.clone().symmetric_eigen().eigenvalues.min();
    if eig <= 1e-16 {
        return Err(StructureError::DegenerateOrbit { eig });
    }
    let kinv = gram
        .try_inverse()
        .ok_or(StructureError::DegenerateOrbit { eig })?;
    let u: Vec<DVector<f64>> = v.iter().map(|vb| metric * vb).collect();
    // d(H_cd) as covectors
    let dgram: Vec<Vec<DVector<f64>>> = (0..k)
        .map(|c| {
            (0..k)
                .map(|d| gens[c].transpose() * &u[d] + gens[d].transpose() * &u[c])
                .collect()
        })
        .collect();
    let wedge = |a: &DVector<f64>, b: &DVector<f64>| a * b.transpose() - b * a.transpose();
    let mut beta = RMat::zeros(m, m);
    for (a, ha) in h.iter().enumerate() {
        let hval = ha.eval(z).re;
        let dh = eval_one_form(&Form::function(ha.clone()).d(), z)?.map(|c| c.re);
        let mut theta = DVector::zeros(m);
        for b in 0..k {
            theta += &u[b] * kinv[(a, b)];
        }
        beta += wedge(&dh, &theta);
        if hval == 0.0 {
            continue;
        }
        let mut dtheta = RMat::zeros(m, m);
        for b in 0..k {
            let mut dk = DVector::zeros(m);
            for c in 0..k {
                for d in 0..k {
                    dk -= &dgram[c][d] * (kinv[(a, c)] * kinv[(d, b)]);
                }
            }
            dtheta += wedge(&dk, &u[b]);
            let cm = metric * &gens[b];
            dtheta += (cm.transpose() - &cm) * kinv[(a, b)];
        }
        beta += dtheta * hval;
    }
    Ok(beta.transpose())
}

/// Exact model of an eigenbundle, for symbolic membership tests.
#[derive(Clone, Debug, PartialEq)]
pub enum SymbolicBundle {
    /// `+i` eigenbundle of a constant rational structure on the real frame.
    Constant(ExactMatrix),
    /// Graph of `eps` over the standard complex bundle.
    Deformed(DeformationBivector),
    /// `e^B` applied to another bundle.
    BTransformed(Box<SymbolicBundle>, Form),
}

fn b_apply(s: &GeneralizedSection, b: &Form, sign: i64) -> GeneralizedSection {
    let shift = b.contract(&s.vec).scale(&crate::poly::gauss_int(sign, 0));
    GeneralizedSection::new(s.vec.clone(), s.form.add(&shift))
}

impl SymbolicBundle {
    /// Polynomial frame with exact coefficients.
    pub fn frame(&self, n: usize) -> Vec<GeneralizedSection> {
        match self {
            SymbolicBundle::Constant(j) => {
                let m = j.rows();
                let half = m / 2;
                (0..m)
                    .map(|c| {
                        let col: Vec<ComplexPolynomial> = (0..m)
                            .map(|r| {
                                let re = if r == c {
                                    Rational::one()
                                } else {
                                    Rational::zero()
                                };
                                ComplexPolynomial::constant(n, gauss(re, -j.get(r, c).clone()))
                            })
                            .collect();
                        section_from_components(n, &col[..half], &col[half..])
                    })
                    .filter(|s| !s.is_zero())
                    .collect()
            }
            SymbolicBundle::Deformed(eps) => eps.deformed_frame(),
            SymbolicBundle::BTransformed(base, b) => {
                base.frame(n).iter().map(|s| b_apply(s, b, 1)).collect()
            }
        }
    }

    /// Exact residual polynomials, all zero iff the section lies in the bundle.
    pub fn membership_residual(&self, s: &GeneralizedSection) -> Vec<ComplexPolynomial> {
        match self {
            SymbolicBundle::Constant(j) => {
                let comps = section_components(s);
                let i = gauss(Rational::zero(), Rational::one());
                (0..comps.len())
                    .map(|r| {
                        let mut acc = comps[r].scale(&-i.clone());
                        for (c, p) in comps.iter().enumerate() {
                            let e = j.get(r, c);
                            if !e.is_zero() {
                                acc += p.scale(&Gaussian::new(e.clone(), Rational::zero()));
                            }
                        }
                        acc
                    })
                    .collect()
            }
            SymbolicBundle::Deformed(eps) => {
                let r = eps.membership_residual(s);
                section_components(&r)
            }
            SymbolicBundle::BTransformed(base, b) => base.membership_residual(&b_apply(s, b, -1)),
        }
    }

    pub fn contains(&self, s: &GeneralizedSection) -> bool {
        self.membership_residual(s).iter().all(|p| p.is_zero())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::actions::{kahler_form, TorusAction};
    use crate::exterior::numeric::{eval_section, z_from_real};
    use crate::exterior::VectorField;
    use crate::poly::{gauss_int, Var};

    #[test]
    fn exact_inverse_roundtrip() {
        let a = ExactMatrix::from_i64_rows(&[vec![2, 1, 0], vec![0, 1, 3], vec![1, 0, 1]]);
        assert_eq!(a.mul(&a.inverse().unwrap()), ExactMatrix::identity(3));
        assert!(ExactMatrix::from_i64_rows(&[vec![1, 2], vec![2, 4]])
            .inverse()
            .is_err());
    }

    #[test]
    fn kahler_recipe_matches_numeric_constructors() {
        let (j1, j2) = exact_kahler(2);
        let js = exact_j_std(2).to_f64();
        assert!(
            (LinearGC::from_symplectic(&(-&js)).unwrap().matrix() - j1.to_f64()).norm() < 1e-15
        );
        assert!((LinearGC::from_complex(&js).unwrap().matrix() - j2.to_f64()).norm() < 1e-15);
    }

    #[test]
    fn constant_frames_lie_in_numeric_eigenbundles() {
        let rec = StructureRecipe::kahler(2);
        let (l1, l2) = rec.symbolic_bundles().unwrap();
        let z = z_from_real(2, &[0.1, 0.2, -0.3, 0.4]).unwrap();
        let pair = rec.pair_at(&z).unwrap();
        for (bundle, j) in [(&l1, pair.j1()), (&l2, pair.j2())] {
            let l = j.eigenbundle().unwrap();
            let frame = bundle.frame(2);
            assert!(!frame.is_empty());
            for s in &frame {
                assert!(bundle.contains(s));
                assert!(l.residual(&eval_section(s, &z).unwrap()) < 1e-13);
            }
        }
    }

    #[test]
    fn symplectic_bundle_is_graph_of_form() {
        let n = 2;
        let (l1, _) = StructureRecipe::kahler(n).symbolic_bundles().unwrap();
        let x = VectorField::basis(n, 1, ComplexPolynomial::var(n, Var::Zbar(0)));
        let w = kahler_form(n);
        let good = GeneralizedSection::new(x.clone(), w.contract(&x).scale(&gauss_int(0, -1)));
        assert!(l1.contains(&good));
        let bad = GeneralizedSection::new(x.clone(), w.contract(&x).scale(&gauss_int(0, 1)));
        assert!(!l1.contains(&bad));
    }

    #[test]
    fn deformed_and_bshifted_frames_are_members() {
        let n = 3;
        let f = ComplexPolynomial::var(n, Var::Z(0)).pow(2);
        let y = VectorField::basis(n, 1, f);
        let zf = VectorField::basis(n, 2, ComplexPolynomial::one(n));
        let eps = DeformationBivector::from_fields(&y, &zf, &kahler_form(n)).unwrap();
        let rec = StructureRecipe::Deformed {
            eps,
            t: Rational::new(1.into(), 2.into()),
        };
        let b = Form::function(
            ComplexPolynomial::var(n, Var::Z(1)) + ComplexPolynomial::var(n, Var::Zbar(1)),
        )
        .d()
        .wedge(&crate::exterior::real_frame::coframe(
            n,
            2,
            crate::exterior::real_frame::Axis::Y,
        ));
        let shifted = StructureRecipe::BShifted {
            base: Box::new(rec.clone()),
            b,
        };
        let z = z_from_real(n, &[0.5, -0.2, 0.3, 0.1, -0.6, 0.25]).unwrap();
        for r in [&rec, &shifted] {
            let (l1, l2) = r.symbolic_bundles().unwrap();
            let pair = r.pair_at(&z).unwrap();
            for (bundle, j) in [(&l1, pair.j1()), (&l2, pair.j2())] {
                let l = j.eigenbundle().unwrap();
                for s in bundle.frame(n) {
                    assert!(bundle.contains(&s));
                    assert!(l.residual(&eval_section(&s, &z).unwrap()) < 1e-12);
                }
            }
        }
    }

    #[test]
    fn realified_bfield_vanishes_for_zero_h() {
        let n = 2;
        let act = Action::Torus(TorusAction::diagonal(n));
        let z = z_from_real(n, &[0.5, -0.2, 0.3, 0.1]).unwrap();
        let b = realifying_bfield(
            &RMat::identity(4, 4),
            &act,
            &[ComplexPolynomial::zero(n)],
            &z,
        )
        .unwrap();
        assert_eq!(b.norm(), 0.0);
    }

    #[test]
    fn realified_bfield_contracts_to_minus_dh() {
        let n = 2;
        let act = Action::Torus(TorusAction::new(n, vec![vec![1, 2]]).unwrap());
        let h = ComplexPolynomial::var(n, Var::Z(0)) * ComplexPolynomial::var(n, Var::Zbar(0));
        let z = z_from_real(n, &[0.5, -0.2, 0.3, 0.1]).unwrap();
        let b =
            realifying_bfield(&RMat::identity(4, 4), &act, std::slice::from_ref(&h), &z).unwrap();
        let xi = act.field_frame(&real_from_z(&z)).column(0).into_owned();
        let dh = eval_one_form(&Form::function(h).d(), &z)
            .unwrap()
            .map(|c| c.re);
        assert!((&b * xi + dh).norm() < 1e-13);
        assert!((&b + b.transpose()).norm() < 1e-14);
    }
}
