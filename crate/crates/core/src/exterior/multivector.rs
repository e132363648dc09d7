//! Multivectors over the generalized frame, the Schouten bracket, the
//! Lie-algebroid differential of the standard complex structure and the
//! Maurer-Cartan residual of a deformation.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use thiserror::Error;

use super::{
    accumulate, courant_bracket, signed, sort_with_sign, Form, GeneralizedSection, VectorField,
};
use crate::poly::{gauss, rat, ComplexPolynomial, Gaussian, Rational};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MultivectorError {
    #[error("d_L is only implemented for the standard complex structure, not {0:?}")]
    UnsupportedAmbient(Ambient),
    #[error("deformation entries need distinct indices, got ({0}, {0})")]
    DiagonalEntry(usize),
    #[error("{0} must be holomorphic (no zbar dependence, only d/dz components)")]
    NotHolomorphic(&'static str),
    #[error("the form part of i_Y w ^ i_Z w has components outside dzbar ^ dzbar")]
    FormNotAntiholomorphic,
}

/// Generalized complex structure whose eigenbundle carries the algebroid.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ambient {
    /// `L = T_{0,1} + T*_{1,0}` on C^n.
    StandardComplex,
    /// `L = {X - i i_X w}`; listed so callers get an explicit rejection.
    Symplectic,
}

/// Element of the exterior algebra on the generalized frame
/// `e_0..e_{4n-1}` (vector slots, then form slots) with polynomial coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LMultivector {
    n: usize,
    degree: usize,
    terms: BTreeMap<Vec<usize>, ComplexPolynomial>,
}

impl LMultivector {
    pub fn zero(n: usize, degree: usize) -> Self {
        LMultivector {
            n,
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn function(f: ComplexPolynomial) -> Self {
        let n = f.nvars();
        let mut out = Self::zero(n, 0);
        accumulate(&mut out.terms, vec![], f);
        out
    }

    /// Build from possibly unsorted frame-index lists; swaps flip signs and
    /// repeated factors vanish.
    pub fn from_terms<I: IntoIterator<Item = (Vec<usize>, ComplexPolynomial)>>(
        n: usize,
        degree: usize,
        it: I,
    ) -> Self {
        let mut out = Self::zero(n, degree);
        for (mut idx, p) in it {
            assert_eq!(idx.len(), degree, "factor count mismatch");
            assert!(idx.iter().all(|&b| b < 4 * n), "frame index out of range");
            if let Some(sign) = sort_with_sign(&mut idx) {
                accumulate(&mut out.terms, idx, signed(&p, sign));
            }
        }
        out
    }

    pub fn from_section(s: &GeneralizedSection) -> Self {
        Self::from_terms(
            s.n(),
            1,
            s.components().into_iter().map(|(b, p)| (vec![b], p)),
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> &BTreeMap<Vec<usize>, ComplexPolynomial> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &LMultivector) -> LMultivector {
        assert_eq!(self.degree, o.degree, "degree mismatch");
        let mut out = self.clone();
        for (k, p) in &o.terms {
            accumulate(&mut out.terms, k.clone(), p.clone());
        }
        out
    }

    pub fn scale(&self, c: &Gaussian) -> LMultivector {
        Self::from_terms(
            self.n,
            self.degree,
            self.terms.iter().map(|(k, p)| (k.clone(), p.scale(c))),
        )
    }

    pub fn wedge(&self, o: &LMultivector) -> LMultivector {
        let mut out = Self::zero(self.n, self.degree + o.degree);
        for (a, p) in &self.terms {
            for (b, q) in &o.terms {
                let mut idx: Vec<usize> = a.iter().chain(b.iter()).copied().collect();
                if let Some(sign) = sort_with_sign(&mut idx) {
                    accumulate(&mut out.terms, idx, signed(&(p * q), sign));
                }
            }
        }
        out
    }

    /// Degree-1 multivector as a generalized section.
    pub fn to_section(&self) -> GeneralizedSection {
        assert_eq!(self.degree, 1);
        let n = self.n;
        let mut s = GeneralizedSection::zero(n);
        for (k, p) in &self.terms {
            s = s.add(&GeneralizedSection::basis_element(n, k[0]).scale_poly(p));
        }
        s
    }

    fn basis_wedge(n: usize, idx: &[usize], coef: ComplexPolynomial) -> LMultivector {
        Self::from_terms(n, idx.len(), [(idx.to_vec(), coef)])
    }

    /// Schouten bracket, extending the Courant bracket as a graded derivation.
    pub fn schouten(&self, o: &LMultivector) -> LMultivector {
        assert_eq!(self.n, o.n, "ambient mismatch");
        let n = self.n;
        let p = self.degree;
        let q = o.degree;
        let out_degree = (p + q).saturating_sub(1);
        let mut out = Self::zero(n, out_degree);
        if p == 0 && q == 0 {
            return out;
        }
        if p == 0 {
            // [f, b] = -(-1)^{(p-1)(q-1)} [b, f] with p = 0.
            let r = o.schouten(self);
            return if (q - 1) % 2 == 0 {
                r.scale(&-Gaussian::one())
            } else {
                r
            };
        }
        for (ia, fa) in &self.terms {
            for (ib, gb) in &o.terms {
                out = out.add(&schouten_decomposable(n, ia, fa, ib, gb));
            }
        }
        out
    }

    /// Contraction of a bivector by a section through the pairing:
    /// `i_W(e1 ^ e2) = 2<W,e1> e2 - 2<W,e2> e1`.
    pub fn contract_pairing(&self, w: &GeneralizedSection) -> GeneralizedSection {
        assert_eq!(
            self.degree, 2,
            "pairing contraction is defined on bivectors"
        );
        let n = self.n;
        let two = gauss(rat(2, 1), Rational::zero());
        let mut out = GeneralizedSection::zero(n);
        for (idx, f) in &self.terms {
            let e1 = GeneralizedSection::basis_element(n, idx[0]);
            let e2 = GeneralizedSection::basis_element(n, idx[1]);
            let a = w.pairing(&e1);
            let b = w.pairing(&e2);
            out = out.add(&e2.scale_poly(&(&a * f).scale(&two)));
            out = out.sub(&e1.scale_poly(&(&b * f).scale(&two)));
        }
        out
    }
}

/// Bracket of `f e_I` and `g e_J`, with the coefficients carried by the first factors.
fn schouten_decomposable(
    n: usize,
    ia: &[usize],
    fa: &ComplexPolynomial,
    ib: &[usize],
    gb: &ComplexPolynomial,
) -> LMultivector {
    let p = ia.len();
    let q = ib.len();
    let one = ComplexPolynomial::one(n);
    let factor = |idx: &[usize], k: usize, coef: &ComplexPolynomial| -> GeneralizedSection {
        let e = GeneralizedSection::basis_element(n, idx[k]);
        if k == 0 {
            e.scale_poly(coef)
        } else {
            e
        }
    };
    if q == 0 {
        // [X_1 ^ ... ^ X_p, g] = sum_k (-1)^{p-k} X_k(g) X_1 ^ ..^X_k-hat.. ^ X_p
        let mut out = LMultivector::zero(n, p - 1);
        for k in 0..p {
            let xk = factor(ia, k, fa);
            let xg = xk.vec.apply(gb);
            if xg.is_zero() {
                continue;
            }
            let rest: Vec<usize> = ia
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != k)
                .map(|(_, b)| *b)
                .collect();
            let coef = if k == 0 { xg } else { &xg * fa };
            // 1-based exponent p - (k+1)
            let sign = if (p - (k + 1)) % 2 == 0 { 1 } else { -1 };
            out = out.add(&LMultivector::basis_wedge(n, &rest, signed(&coef, sign)));
        }
        return out;
    }
    let mut out = LMultivector::zero(n, p + q - 1);
    for k in 0..p {
        for l in 0..q {
            if k != 0 && l != 0 {
                continue; // constant frame elements commute
            }
            let br = courant_bracket(&factor(ia, k, fa), &factor(ib, l, gb));
            if br.is_zero() {
                continue;
            }
            let mut coef = one.clone();
            if k != 0 {
                coef = &coef * fa;
            }
            if l != 0 {
                coef = &coef * gb;
            }
            let mut rest: Vec<usize> = ia
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != k)
                .map(|(_, b)| *b)
                .collect();
            rest.extend(
                ib.iter()
                    .enumerate()
                    .filter(|(j, _)| *j != l)
                    .map(|(_, b)| *b),
            );
            let sign = if (k + l) % 2 == 0 { 1 } else { -1 };
            let head = LMultivector::from_section(&br);
            let tail = LMultivector::basis_wedge(n, &rest, signed(&coef, sign));
            out = out.add(&head.wedge(&tail));
        }
    }
    out
}

/// Deformation `sum F_ij d/dz_i ^ d/dz_j + sum H_ij dzbar_i ^ dzbar_j`, stored for i < j.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeformationBivector {
    n: usize,
    hol: BTreeMap<(usize, usize), ComplexPolynomial>,
    antihol: BTreeMap<(usize, usize), ComplexPolynomial>,
}

impl DeformationBivector {
    pub fn zero(n: usize) -> Self {
        DeformationBivector {
            n,
            hol: BTreeMap::new(),
            antihol: BTreeMap::new(),
        }
    }

    fn insert(
        map: &mut BTreeMap<(usize, usize), ComplexPolynomial>,
        i: usize,
        j: usize,
        p: ComplexPolynomial,
    ) -> Result<(), MultivectorError> {
        if i == j {
            return Err(MultivectorError::DiagonalEntry(i));
        }
        let (key, p) = if i < j { ((i, j), p) } else { ((j, i), -p) };
        accumulate(map, key, p);
        Ok(())
    }

    /// Add `p d/dz_i ^ d/dz_j`.
    pub fn add_hol(
        &mut self,
        i: usize,
        j: usize,
        p: ComplexPolynomial,
    ) -> Result<(), MultivectorError> {
        Self::insert(&mut self.hol, i, j, p)
    }

    /// Add `p dzbar_i ^ dzbar_j`.
    pub fn add_antihol(
        &mut self,
        i: usize,
        j: usize,
        p: ComplexPolynomial,
    ) -> Result<(), MultivectorError> {
        Self::insert(&mut self.antihol, i, j, p)
    }

    /// `Y ^ Z + i_Y w ^ i_Z w` for holomorphic `Y`, `Z`.
    pub fn from_fields(
        y: &VectorField,
        z: &VectorField,
        omega: &Form,
    ) -> Result<Self, MultivectorError> {
        let n = y.n();
        for (name, f) in [("Y", y), ("Z", z)] {
            let ok = f
                .components()
                .iter()
                .all(|(s, p)| *s < n && p.is_holomorphic());
            if !ok {
                return Err(MultivectorError::NotHolomorphic(name));
            }
        }
        let mut eps = DeformationBivector::zero(n);
        for (i, a) in y.components() {
            for (j, b) in z.components() {
                if i != j {
                    eps.add_hol(*i, *j, a * b)?;
                }
            }
        }
        let w = omega.contract(y).wedge(&omega.contract(z));
        for (idx, p) in w.components() {
            if idx[0] < n || idx[1] < n {
                return Err(MultivectorError::FormNotAntiholomorphic);
            }
            eps.add_antihol(idx[0] - n, idx[1] - n, p.clone())?;
        }
        Ok(eps)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn hol(&self) -> &BTreeMap<(usize, usize), ComplexPolynomial> {
        &self.hol
    }

    pub fn antihol(&self) -> &BTreeMap<(usize, usize), ComplexPolynomial> {
        &self.antihol
    }

    pub fn is_zero(&self) -> bool {
        self.hol.is_empty() && self.antihol.is_empty()
    }

    pub fn scale(&self, c: &Gaussian) -> Self {
        DeformationBivector {
            n: self.n,
            hol: self
                .hol
                .iter()
                .filter(|_| !c.is_zero())
                .map(|(k, p)| (*k, p.scale(c)))
                .collect(),
            antihol: self
                .antihol
                .iter()
                .filter(|_| !c.is_zero())
                .map(|(k, p)| (*k, p.scale(c)))
                .collect(),
        }
    }

    /// Frame index of `d/dz_i` and `dzbar_i` in the generalized frame.
    fn hol_index(&self, i: usize) -> usize {
        i
    }

    fn antihol_index(&self, i: usize) -> usize {
        3 * self.n + i
    }

    pub fn to_lmultivector(&self) -> LMultivector {
        let n = self.n;
        let mut terms: Vec<(Vec<usize>, ComplexPolynomial)> = Vec::new();
        for ((i, j), p) in &self.hol {
            terms.push((vec![self.hol_index(*i), self.hol_index(*j)], p.clone()));
        }
        for ((i, j), p) in &self.antihol {
            terms.push((
                vec![self.antihol_index(*i), self.antihol_index(*j)],
                p.clone(),
            ));
        }
        LMultivector::from_terms(n, 2, terms)
    }

    /// All coefficients holomorphic.
    pub fn is_holomorphic(&self) -> bool {
        self.hol
            .values()
            .chain(self.antihol.values())
            .all(|p| p.is_holomorphic())
    }

    /// Push forward by the linear map `z -> g z` (`g_inv` its inverse).
    pub fn pushforward_linear(&self, g: &[Vec<Gaussian>], g_inv: &[Vec<Gaussian>]) -> Self {
        let n = self.n;
        let mut out = DeformationBivector::zero(n);
        for ((i, j), p) in &self.hol {
            let q = p.linear_substitute(g_inv);
            for a in 0..n {
                for b in 0..n {
                    if a == b {
                        continue;
                    }
                    let c = &g[a][*i] * &g[b][*j];
                    if !c.is_zero() {
                        out.add_hol(a, b, q.scale(&c)).expect("distinct indices");
                    }
                }
            }
        }
        for ((i, j), p) in &self.antihol {
            let q = p.linear_substitute(g_inv);
            for a in 0..n {
                for b in 0..n {
                    if a == b {
                        continue;
                    }
                    // (g^{-1})^* dzbar_i = sum_a conj(ginv_{i a}) dzbar_a
                    let c = g_inv[*i][a].conj() * g_inv[*j][b].conj();
                    if !c.is_zero() {
                        out.add_antihol(a, b, q.scale(&c))
                            .expect("distinct indices");
                    }
                }
            }
        }
        out
    }

    /// Pointwise contraction `i_W eps` of a section.
    pub fn contract(&self, w: &GeneralizedSection) -> GeneralizedSection {
        self.to_lmultivector().contract_pairing(w)
    }

    /// Frame of the deformed bundle: `s + i_s eps` over the basis
    /// `dzbar-directions d/dzbar_k` and `dz_k` of the undeformed bundle.
    pub fn deformed_frame(&self) -> Vec<GeneralizedSection> {
        let n = self.n;
        let mut out = Vec::with_capacity(2 * n);
        for k in 0..n {
            for basis in [n + k, 2 * n + k] {
                let s = GeneralizedSection::basis_element(n, basis);
                out.push(s.add(&self.contract(&s)));
            }
        }
        out
    }

    /// Exact membership residual of a section in the deformed bundle:
    /// `(conjugate part) - i_{(L part)} eps`, zero iff the section lies in it.
    pub fn membership_residual(&self, s: &GeneralizedSection) -> GeneralizedSection {
        let (l_part, lbar_part) = split_standard(s);
        lbar_part.sub(&self.contract(&l_part))
    }
}

/// Split a section into its `T_{0,1} + T*_{1,0}` and `T_{1,0} + T*_{0,1}` parts.
pub fn split_standard(s: &GeneralizedSection) -> (GeneralizedSection, GeneralizedSection) {
    let n = s.n();
    let mut l = GeneralizedSection::zero(n);
    let mut lb = GeneralizedSection::zero(n);
    for (b, p) in s.components() {
        let e = GeneralizedSection::basis_element(n, b).scale_poly(&p);
        let in_l = (n..2 * n).contains(&b) || (2 * n..3 * n).contains(&b);
        if in_l {
            l = l.add(&e);
        } else {
            lb = lb.add(&e);
        }
    }
    (l, lb)
}

/// `d_L` of a multivector: coefficientwise delbar,
/// `d_L(f e_I) = sum_j (df/dzbar_j) dzbar_j ^ e_I`.
pub fn d_l(a: &LMultivector, ambient: Ambient) -> Result<LMultivector, MultivectorError> {
    if ambient != Ambient::StandardComplex {
        return Err(MultivectorError::UnsupportedAmbient(ambient));
    }
    let n = a.n;
    let mut out = LMultivector::zero(n, a.degree + 1);
    for (idx, f) in &a.terms {
        for j in 0..n {
            let df = f.differentiate_slot(n + j);
            if df.is_zero() {
                continue;
            }
            let mut k = Vec::with_capacity(idx.len() + 1);
            k.push(3 * n + j);
            k.extend_from_slice(idx);
            out = out.add(&LMultivector::from_terms(n, a.degree + 1, [(k, df)]));
        }
    }
    Ok(out)
}

impl DeformationBivector {
    pub fn d_l(&self, ambient: Ambient) -> Result<LMultivector, MultivectorError> {
        d_l(&self.to_lmultivector(), ambient)
    }

    /// `d_L eps + [eps, eps] / 2`.
    pub fn maurer_cartan_residual(
        &self,
        ambient: Ambient,
    ) -> Result<LMultivector, MultivectorError> {
        let e = self.to_lmultivector();
        let dl = d_l(&e, ambient)?;
        let half = gauss(rat(1, 2), Rational::zero());
        Ok(dl.add(&e.schouten(&e).scale(&half)))
    }
}
