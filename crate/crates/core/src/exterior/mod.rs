//! Polynomial vector fields, differential forms and generalized sections on
//! C^n, stored in the z/zbar frame, with exact d, contraction, Lie derivative
//! and Courant bracket.
//!
//! Frame slots run over `0..2n`: slot `s < n` is `d/dz_s` (resp. `dz_s`),
//! slot `n + s` is `d/dzbar_s` (resp. `dzbar_s`).

mod multivector;
pub mod numeric;

pub use multivector::{Ambient, DeformationBivector, LMultivector, MultivectorError};

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::poly::{gauss, gauss_i, rat, ComplexPolynomial, Gaussian, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CalculusError {
    #[error("interior product needs a form of degree at least 1")]
    DegreeZero,
    #[error("ambient dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("form degree {degree} exceeds the real dimension {max}")]
    DegreeTooLarge { degree: usize, max: usize },
}

/// Slot of the conjugate frame element.
pub fn conj_slot(slot: usize, n: usize) -> usize {
    if slot < n {
        slot + n
    } else {
        slot - n
    }
}

/// Sort `idx` in place, returning the permutation sign, or `None` on a repeat.
pub fn sort_with_sign(idx: &mut [usize]) -> Option<i32> {
    let mut sign = 1;
    for i in 1..idx.len() {
        let mut j = i;
        while j > 0 && idx[j - 1] > idx[j] {
            idx.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if idx.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some(sign)
    }
}

fn signed(p: &ComplexPolynomial, sign: i32) -> ComplexPolynomial {
    if sign >= 0 {
        p.clone()
    } else {
        -p.clone()
    }
}

fn accumulate<K: Ord>(map: &mut BTreeMap<K, ComplexPolynomial>, key: K, p: ComplexPolynomial) {
    if p.is_zero() {
        return;
    }
    match map.remove(&key) {
        Some(old) => {
            let s = old + p;
            if !s.is_zero() {
                map.insert(key, s);
            }
        }
        None => {
            map.insert(key, p);
        }
    }
}

/// Polynomial vector field `sum_s X^s e_s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorField {
    n: usize,
    comps: BTreeMap<usize, ComplexPolynomial>,
}

impl VectorField {
    pub fn zero(n: usize) -> Self {
        VectorField {
            n,
            comps: BTreeMap::new(),
        }
    }

    pub fn from_components<I: IntoIterator<Item = (usize, ComplexPolynomial)>>(
        n: usize,
        it: I,
    ) -> Self {
        let mut v = Self::zero(n);
        for (s, p) in it {
            assert!(s < 2 * n, "frame slot out of range");
            assert_eq!(p.nvars(), n);
            accumulate(&mut v.comps, s, p);
        }
        v
    }

    /// `coef * e_slot`.
    pub fn basis(n: usize, slot: usize, coef: ComplexPolynomial) -> Self {
        Self::from_components(n, [(slot, coef)])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn components(&self) -> &BTreeMap<usize, ComplexPolynomial> {
        &self.comps
    }

    pub fn component(&self, slot: usize) -> ComplexPolynomial {
        self.comps
            .get(&slot)
            .cloned()
            .unwrap_or_else(|| ComplexPolynomial::zero(self.n))
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn add(&self, other: &VectorField) -> VectorField {
        let mut out = self.clone();
        for (s, p) in &other.comps {
            accumulate(&mut out.comps, *s, p.clone());
        }
        out
    }

    pub fn neg(&self) -> VectorField {
        self.scale_poly(&ComplexPolynomial::constant(self.n, -Gaussian::one()))
    }

    pub fn scale_poly(&self, f: &ComplexPolynomial) -> VectorField {
        VectorField::from_components(self.n, self.comps.iter().map(|(s, p)| (*s, p * f)))
    }

    pub fn scale(&self, c: &Gaussian) -> VectorField {
        VectorField::from_components(self.n, self.comps.iter().map(|(s, p)| (*s, p.scale(c))))
    }

    /// Directional derivative `X(f)`.
    pub fn apply(&self, f: &ComplexPolynomial) -> ComplexPolynomial {
        let mut out = ComplexPolynomial::zero(self.n);
        for (s, p) in &self.comps {
            let df = f.differentiate_slot(*s);
            if !df.is_zero() {
                out += p * &df;
            }
        }
        out
    }

    /// Lie bracket of vector fields.
    pub fn bracket(&self, other: &VectorField) -> VectorField {
        let mut out = VectorField::zero(self.n);
        for k in 0..2 * self.n {
            let a = self.apply(&other.component(k));
            let b = other.apply(&self.component(k));
            accumulate(&mut out.comps, k, a - b);
        }
        out
    }

    pub fn conjugate(&self) -> VectorField {
        VectorField::from_components(
            self.n,
            self.comps
                .iter()
                .map(|(s, p)| (conj_slot(*s, self.n), p.conjugate())),
        )
    }

    pub fn is_real(&self) -> bool {
        *self == self.conjugate()
    }
}

/// Polynomial differential form of fixed degree; keys are strictly increasing
/// slot lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Form {
    n: usize,
    degree: usize,
    comps: BTreeMap<Vec<usize>, ComplexPolynomial>,
}

impl Form {
    pub fn zero(n: usize, degree: usize) -> Self {
        Form {
            n,
            degree,
            comps: BTreeMap::new(),
        }
    }

    pub fn function(f: ComplexPolynomial) -> Self {
        let n = f.nvars();
        let mut out = Form::zero(n, 0);
        accumulate(&mut out.comps, vec![], f);
        out
    }

    /// Build from (slot list, coefficient) pairs; slot lists may be unsorted.
    pub fn from_components<I: IntoIterator<Item = (Vec<usize>, ComplexPolynomial)>>(
        n: usize,
        degree: usize,
        it: I,
    ) -> Self {
        let mut out = Form::zero(n, degree);
        for (mut idx, p) in it {
            assert_eq!(idx.len(), degree, "component degree mismatch");
            assert!(idx.iter().all(|&s| s < 2 * n), "frame slot out of range");
            if let Some(sign) = sort_with_sign(&mut idx) {
                accumulate(&mut out.comps, idx, signed(&p, sign));
            }
        }
        out
    }

    /// `coef * d(var slot)`.
    pub fn one_form(n: usize, slot: usize, coef: ComplexPolynomial) -> Self {
        Self::from_components(n, 1, [(vec![slot], coef)])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn components(&self) -> &BTreeMap<Vec<usize>, ComplexPolynomial> {
        &self.comps
    }

    pub fn component(&self, idx: &[usize]) -> ComplexPolynomial {
        let mut k = idx.to_vec();
        match sort_with_sign(&mut k) {
            None => ComplexPolynomial::zero(self.n),
            Some(sign) => self
                .comps
                .get(&k)
                .map(|p| signed(p, sign))
                .unwrap_or_else(|| ComplexPolynomial::zero(self.n)),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn add(&self, other: &Form) -> Form {
        assert_eq!(self.degree, other.degree, "degree mismatch");
        let mut out = self.clone();
        for (k, p) in &other.comps {
            accumulate(&mut out.comps, k.clone(), p.clone());
        }
        out
    }

    pub fn neg(&self) -> Form {
        self.scale(&-Gaussian::one())
    }

    pub fn sub(&self, other: &Form) -> Form {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Gaussian) -> Form {
        Form::from_components(
            self.n,
            self.degree,
            self.comps.iter().map(|(k, p)| (k.clone(), p.scale(c))),
        )
    }

    pub fn scale_poly(&self, f: &ComplexPolynomial) -> Form {
        Form::from_components(
            self.n,
            self.degree,
            self.comps.iter().map(|(k, p)| (k.clone(), p * f)),
        )
    }

    pub fn wedge(&self, other: &Form) -> Form {
        let mut out = Form::zero(self.n, self.degree + other.degree);
        for (a, p) in &self.comps {
            for (b, q) in &other.comps {
                let mut idx: Vec<usize> = a.iter().chain(b.iter()).copied().collect();
                if let Some(sign) = sort_with_sign(&mut idx) {
                    accumulate(&mut out.comps, idx, signed(&(p * q), sign));
                }
            }
        }
        out
    }

    pub fn conjugate(&self) -> Form {
        Form::from_components(
            self.n,
            self.degree,
            self.comps.iter().map(|(k, p)| {
                (
                    k.iter().map(|&s| conj_slot(s, self.n)).collect(),
                    p.conjugate(),
                )
            }),
        )
    }

    pub fn is_real(&self) -> bool {
        *self == self.conjugate()
    }

    /// The underlying function of a 0-form.
    pub fn as_function(&self) -> ComplexPolynomial {
        assert_eq!(self.degree, 0);
        self.component(&[])
    }

    /// Exact exterior derivative (`d = del + delbar` in this frame).
    pub fn d(&self) -> Form {
        let mut out = Form::zero(self.n, self.degree + 1);
        for (idx, p) in &self.comps {
            for s in 0..2 * self.n {
                let dp = p.differentiate_slot(s);
                if dp.is_zero() {
                    continue;
                }
                let mut k = Vec::with_capacity(idx.len() + 1);
                k.push(s);
                k.extend_from_slice(idx);
                if let Some(sign) = sort_with_sign(&mut k) {
                    accumulate(&mut out.comps, k, signed(&dp, sign));
                }
            }
        }
        out
    }

    /// `d` with an explicit degree check.
    pub fn exterior_derivative(&self) -> Result<Form, CalculusError> {
        if self.degree >= 2 * self.n {
            return Err(CalculusError::DegreeTooLarge {
                degree: self.degree,
                max: 2 * self.n - 1,
            });
        }
        Ok(self.d())
    }

    /// Contraction with no degree check; zero on functions.
    pub fn contract(&self, x: &VectorField) -> Form {
        if self.degree == 0 {
            return Form::zero(self.n, 0);
        }
        let mut out = Form::zero(self.n, self.degree - 1);
        for (idx, p) in &self.comps {
            for (pos, s) in idx.iter().enumerate() {
                let xs = match x.comps.get(s) {
                    Some(v) => v,
                    None => continue,
                };
                let mut rest = idx.clone();
                rest.remove(pos);
                let sign = if pos % 2 == 0 { 1 } else { -1 };
                accumulate(&mut out.comps, rest, signed(&(xs * p), sign));
            }
        }
        out
    }

    /// Interior product `i_X` of a form of positive degree.
    pub fn interior(&self, x: &VectorField) -> Result<Form, CalculusError> {
        if self.degree == 0 {
            return Err(CalculusError::DegreeZero);
        }
        Ok(self.contract(x))
    }

    /// Lie derivative via Cartan's formula.
    pub fn lie(&self, x: &VectorField) -> Form {
        if self.degree == 0 {
            return Form::function(x.apply(&self.as_function()));
        }
        self.contract(x).d().add(&self.d().contract(x))
    }

    /// Full evaluation of a 1-form on a vector field.
    pub fn pair_vector(&self, x: &VectorField) -> ComplexPolynomial {
        assert_eq!(self.degree, 1);
        self.contract(x).as_function()
    }
}

pub fn interior_product(x: &VectorField, w: &Form) -> Result<Form, CalculusError> {
    w.interior(x)
}

pub fn exterior_derivative(w: &Form) -> Result<Form, CalculusError> {
    w.exterior_derivative()
}

pub fn lie_derivative(x: &VectorField, w: &Form) -> Form {
    w.lie(x)
}

/// Polynomial section `X + alpha` of the complexified generalized tangent bundle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneralizedSection {
    pub vec: VectorField,
    pub form: Form,
}

impl GeneralizedSection {
    pub fn new(vec: VectorField, form: Form) -> Self {
        assert_eq!(form.degree(), 1, "the form part must be a 1-form");
        assert_eq!(vec.n(), form.n(), "ambient mismatch");
        GeneralizedSection { vec, form }
    }

    pub fn zero(n: usize) -> Self {
        GeneralizedSection {
            vec: VectorField::zero(n),
            form: Form::zero(n, 1),
        }
    }

    pub fn from_vector(vec: VectorField) -> Self {
        let n = vec.n();
        GeneralizedSection {
            vec,
            form: Form::zero(n, 1),
        }
    }

    pub fn from_form(form: Form) -> Self {
        let n = form.n();
        Self::new(VectorField::zero(n), form)
    }

    pub fn n(&self) -> usize {
        self.vec.n()
    }

    pub fn is_zero(&self) -> bool {
        self.vec.is_zero() && self.form.is_zero()
    }

    pub fn add(&self, o: &GeneralizedSection) -> GeneralizedSection {
        GeneralizedSection {
            vec: self.vec.add(&o.vec),
            form: self.form.add(&o.form),
        }
    }

    pub fn sub(&self, o: &GeneralizedSection) -> GeneralizedSection {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> GeneralizedSection {
        GeneralizedSection {
            vec: self.vec.neg(),
            form: self.form.neg(),
        }
    }

    pub fn scale(&self, c: &Gaussian) -> GeneralizedSection {
        GeneralizedSection {
            vec: self.vec.scale(c),
            form: self.form.scale(c),
        }
    }

    pub fn scale_poly(&self, f: &ComplexPolynomial) -> GeneralizedSection {
        GeneralizedSection {
            vec: self.vec.scale_poly(f),
            form: self.form.scale_poly(f),
        }
    }

    pub fn conjugate(&self) -> GeneralizedSection {
        GeneralizedSection {
            vec: self.vec.conjugate(),
            form: self.form.conjugate(),
        }
    }

    pub fn is_real(&self) -> bool {
        *self == self.conjugate()
    }

    /// Pairing `<X+a, Y+b> = (a(Y) + b(X)) / 2` as a polynomial.
    pub fn pairing(&self, o: &GeneralizedSection) -> ComplexPolynomial {
        let s = self.form.pair_vector(&o.vec) + o.form.pair_vector(&self.vec);
        s.scale_rational(&rat(1, 2))
    }

    /// Coefficient on a basis element of the 4n-dimensional frame
    /// (`0..2n` vectors, `2n..4n` forms).
    pub fn coefficient(&self, basis: usize) -> ComplexPolynomial {
        let n = self.n();
        if basis < 2 * n {
            self.vec.component(basis)
        } else {
            self.form.component(&[basis - 2 * n])
        }
    }

    /// Constant basis element `e_basis` of the 4n-dimensional frame.
    pub fn basis_element(n: usize, basis: usize) -> GeneralizedSection {
        let one = ComplexPolynomial::one(n);
        if basis < 2 * n {
            GeneralizedSection::from_vector(VectorField::basis(n, basis, one))
        } else {
            GeneralizedSection::from_form(Form::one_form(n, basis - 2 * n, one))
        }
    }

    pub fn components(&self) -> Vec<(usize, ComplexPolynomial)> {
        let n = self.n();
        let mut out: Vec<(usize, ComplexPolynomial)> = self
            .vec
            .components()
            .iter()
            .map(|(s, p)| (*s, p.clone()))
            .collect();
        out.extend(
            self.form
                .components()
                .iter()
                .map(|(k, p)| (2 * n + k[0], p.clone())),
        );
        out
    }
}

/// `[X+a, Y+b] = [X,Y] + L_X b - L_Y a - d(i_X b - i_Y a)/2`.
pub fn courant_bracket(s1: &GeneralizedSection, s2: &GeneralizedSection) -> GeneralizedSection {
    let vec = s1.vec.bracket(&s2.vec);
    let lx_b = s2.form.lie(&s1.vec);
    let ly_a = s1.form.lie(&s2.vec);
    let diff = s2.form.contract(&s1.vec).sub(&s1.form.contract(&s2.vec));
    let half = gauss(rat(1, 2), Rational::zero());
    let form = lx_b.sub(&ly_a).sub(&diff.d().scale(&half));
    GeneralizedSection::new(vec, form)
}

/// Real-frame building blocks expressed in the z/zbar frame.
pub mod real_frame {
    use super::*;

    #[derive(Clone, Copy, Debug, PartialEq, Eq)]
    pub enum Axis {
        X,
        Y,
    }

    fn half() -> Gaussian {
        gauss(rat(1, 2), Rational::zero())
    }

    /// `x_j = (z + zbar)/2`, `y_j = (z - zbar)/(2i)`.
    pub fn coordinate(n: usize, j: usize, axis: Axis) -> ComplexPolynomial {
        let z = ComplexPolynomial::var(n, crate::poly::Var::Z(j));
        let zb = ComplexPolynomial::var(n, crate::poly::Var::Zbar(j));
        match axis {
            Axis::X => (z + zb).scale(&half()),
            Axis::Y => (z - zb).scale(&gauss(Rational::zero(), rat(-1, 2))),
        }
    }

    /// `dx_j = (dz + dzbar)/2`, `dy_j = (dz - dzbar)/(2i)`.
    pub fn coframe(n: usize, j: usize, axis: Axis) -> Form {
        coordinate(n, j, axis).pipe_d()
    }

    /// `d/dx_j = d/dz + d/dzbar`, `d/dy_j = i (d/dz - d/dzbar)`.
    pub fn frame(n: usize, j: usize, axis: Axis) -> VectorField {
        let one = ComplexPolynomial::one(n);
        match axis {
            Axis::X => VectorField::from_components(n, [(j, one.clone()), (n + j, one)]),
            Axis::Y => VectorField::from_components(
                n,
                [(j, one.scale(&gauss_i())), (n + j, one.scale(&-gauss_i()))],
            ),
        }
    }

    trait PipeD {
        fn pipe_d(self) -> Form;
    }

    impl PipeD for ComplexPolynomial {
        fn pipe_d(self) -> Form {
            Form::function(self).d()
        }
    }

    /// Components of a vector field on the real frame `(d/dx_1, d/dy_1, ...)`.
    pub fn vector_components(x: &VectorField) -> Vec<ComplexPolynomial> {
        let n = x.n();
        let mut out = Vec::with_capacity(2 * n);
        for j in 0..n {
            let a = x.component(j);
            let b = x.component(n + j);
            out.push((&a + &b).scale(&half()));
            out.push((&b - &a).scale(&gauss(Rational::zero(), rat(1, 2))));
        }
        out
    }

    /// Components of a 1-form on the real coframe `(dx_1, dy_1, ...)`.
    pub fn covector_components(w: &Form) -> Vec<ComplexPolynomial> {
        assert_eq!(w.degree(), 1);
        let n = w.n();
        let mut out = Vec::with_capacity(2 * n);
        for j in 0..n {
            let c = w.component(&[j]);
            let d = w.component(&[n + j]);
            out.push(&c + &d);
            out.push((&c - &d).scale(&gauss_i()));
        }
        out
    }

    /// Section from real-frame component polynomials (vector part, then form part).
    pub fn section_from_components(
        n: usize,
        vec: &[ComplexPolynomial],
        form: &[ComplexPolynomial],
    ) -> GeneralizedSection {
        let mut v = VectorField::zero(n);
        let mut f = Form::zero(n, 1);
        for j in 0..n {
            v = v.add(&frame(n, j, Axis::X).scale_poly(&vec[2 * j]));
            v = v.add(&frame(n, j, Axis::Y).scale_poly(&vec[2 * j + 1]));
            f = f.add(&coframe(n, j, Axis::X).scale_poly(&form[2 * j]));
            f = f.add(&coframe(n, j, Axis::Y).scale_poly(&form[2 * j + 1]));
        }
        GeneralizedSection::new(v, f)
    }

    /// Real-frame components of a section: `2n` vector entries then `2n` form entries.
    pub fn section_components(s: &GeneralizedSection) -> Vec<ComplexPolynomial> {
        let mut out = vector_components(&s.vec);
        out.extend(covector_components(&s.form));
        out
    }
}
