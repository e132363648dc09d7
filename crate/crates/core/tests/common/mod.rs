#![allow(dead_code)]

//! Shared helpers for the integration tests: seeded generators, an
//! independent term-level implementation of the Courant and Schouten
//! brackets, and random linear structures with known types.

pub mod lemma_cases;

use std::collections::BTreeMap;

use gkw_core::exterior::{GeneralizedSection, LMultivector};
use gkw_core::linalg::{checked_svd, orth_real, singular_values, CMat, LinearGC, RMat, RANK_TOL};
use gkw_core::poly::{gauss, rat, ComplexPolynomial, Gaussian};
use gkw_core::{Form, VectorField};
use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------------------
// Seeded polynomial data

pub fn random_gaussian<R: Rng>(r: &mut R) -> Gaussian {
    let den = r.random_range(1..=3);
    gauss(
        rat(r.random_range(-3..=3), den),
        rat(r.random_range(-3..=3), den),
    )
}

/// Up to `terms` monomials of degree at most `max_deg` in each variable.
pub fn random_poly<R: Rng>(r: &mut R, n: usize, terms: usize, max_deg: u32) -> ComplexPolynomial {
    let mut p = ComplexPolynomial::zero(n);
    for _ in 0..r.random_range(1..=terms) {
        let exps: Vec<u32> = (0..2 * n)
            .map(|_| {
                if r.random_bool(0.35) {
                    r.random_range(0..=max_deg)
                } else {
                    0
                }
            })
            .collect();
        p += ComplexPolynomial::monomial(n, exps, random_gaussian(r));
    }
    p
}

pub fn random_vector_field<R: Rng>(r: &mut R, n: usize) -> VectorField {
    let slots: Vec<usize> = (0..2 * n).filter(|_| r.random_bool(0.5)).collect();
    VectorField::from_components(
        n,
        slots
            .into_iter()
            .map(|s| (s, random_poly(r, n, 3, 2)))
            .collect::<Vec<_>>(),
    )
}

pub fn random_one_form<R: Rng>(r: &mut R, n: usize) -> Form {
    let slots: Vec<usize> = (0..2 * n).filter(|_| r.random_bool(0.5)).collect();
    Form::from_components(
        n,
        1,
        slots
            .into_iter()
            .map(|s| (vec![s], random_poly(r, n, 3, 2)))
            .collect::<Vec<_>>(),
    )
}

/// Random `k`-form with sorted component indices.
pub fn random_form<R: Rng>(r: &mut R, n: usize, k: usize) -> Form {
    let mut comps = Vec::new();
    for _ in 0..r.random_range(1..=3) {
        let mut idx: Vec<usize> = (0..2 * n).collect();
        for i in (1..idx.len()).rev() {
            idx.swap(i, r.random_range(0..=i));
        }
        idx.truncate(k);
        idx.sort_unstable();
        comps.push((idx, random_poly(r, n, 2, 2)));
    }
    Form::from_components(n, k, comps)
}

pub fn random_section<R: Rng>(r: &mut R, n: usize) -> GeneralizedSection {
    GeneralizedSection::new(random_vector_field(r, n), random_one_form(r, n))
}

/// Multivector of the given degree with only vector-frame factors.
pub fn random_vector_multivector<R: Rng>(r: &mut R, n: usize, degree: usize) -> LMultivector {
    let mut terms = Vec::new();
    for _ in 0..r.random_range(1..=3) {
        let mut idx: Vec<usize> = (0..2 * n).collect();
        for i in (1..idx.len()).rev() {
            idx.swap(i, r.random_range(0..=i));
        }
        idx.truncate(degree);
        terms.push((idx, random_poly(r, n, 2, 2)));
    }
    LMultivector::from_terms(n, degree, terms)
}

// ---------------------------------------------------------------------------
// Term-level oracle. Polynomials are raw exponent maps multiplied by a
// double loop; nothing below calls the library's arithmetic.

pub type Raw = BTreeMap<Vec<u32>, Gaussian>;

pub fn raw(p: &ComplexPolynomial) -> Raw {
    p.terms()
        .iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(e, c)| (e.clone(), c.clone()))
        .collect()
}

fn raw_add_into(acc: &mut Raw, p: &Raw, c: &Gaussian) {
    for (e, v) in p {
        let slot = acc.entry(e.clone()).or_insert_with(Gaussian::zero);
        *slot = slot.clone() + v.clone() * c.clone();
    }
    acc.retain(|_, v| !v.is_zero());
}

fn raw_mul(a: &Raw, b: &Raw) -> Raw {
    let mut out = Raw::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            let slot = out.entry(e).or_insert_with(Gaussian::zero);
            *slot = slot.clone() + ca.clone() * cb.clone();
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}

fn raw_diff(a: &Raw, slot: usize) -> Raw {
    let mut out = Raw::new();
    for (e, c) in a {
        if e[slot] == 0 {
            continue;
        }
        let mut f = e.clone();
        f[slot] -= 1;
        let k = gauss(rat(e[slot] as i64, 1), rat(0, 1));
        out.insert(f, c.clone() * k);
    }
    out
}

fn one() -> Gaussian {
    Gaussian::one()
}

fn minus_one() -> Gaussian {
    -Gaussian::one()
}

/// Component arrays `(X^j, alpha_j)` of a section, `j` over the `2n` slots.
fn raw_section(s: &GeneralizedSection) -> (Vec<Raw>, Vec<Raw>) {
    let n = s.n();
    let v = (0..2 * n).map(|j| raw(&s.vec.component(j))).collect();
    let f = (0..2 * n).map(|j| raw(&s.form.component(&[j]))).collect();
    (v, f)
}

/// Courant bracket in components:
/// `vec^k = X^j d_j Y^k - Y^j d_j X^k`,
/// `form_k = X^j d_j b_k + b_j d_k X^j - Y^j d_j a_k - a_j d_k Y^j - d_k(X^j b_j - Y^j a_j)/2`.
pub fn oracle_courant(s1: &GeneralizedSection, s2: &GeneralizedSection) -> (Vec<Raw>, Vec<Raw>) {
    let d = 2 * s1.n();
    let (x, a) = raw_section(s1);
    let (y, b) = raw_section(s2);
    let mut pair = Raw::new();
    for j in 0..d {
        raw_add_into(&mut pair, &raw_mul(&x[j], &b[j]), &one());
        raw_add_into(&mut pair, &raw_mul(&y[j], &a[j]), &minus_one());
    }
    let half = gauss(rat(-1, 2), rat(0, 1));
    let mut vec = Vec::with_capacity(d);
    let mut form = Vec::with_capacity(d);
    for k in 0..d {
        let mut v = Raw::new();
        let mut f = Raw::new();
        for j in 0..d {
            raw_add_into(&mut v, &raw_mul(&x[j], &raw_diff(&y[k], j)), &one());
            raw_add_into(&mut v, &raw_mul(&y[j], &raw_diff(&x[k], j)), &minus_one());
            raw_add_into(&mut f, &raw_mul(&x[j], &raw_diff(&b[k], j)), &one());
            raw_add_into(&mut f, &raw_mul(&b[j], &raw_diff(&x[j], k)), &one());
            raw_add_into(&mut f, &raw_mul(&y[j], &raw_diff(&a[k], j)), &minus_one());
            raw_add_into(&mut f, &raw_mul(&a[j], &raw_diff(&y[j], k)), &minus_one());
        }
        raw_add_into(&mut f, &raw_diff(&pair, k), &half);
        vec.push(v);
        form.push(f);
    }
    (vec, form)
}

pub fn section_components(s: &GeneralizedSection) -> (Vec<Raw>, Vec<Raw>) {
    raw_section(s)
}

/// Multivector over odd generators `theta_s` (sorted index lists).
pub type RawMulti = BTreeMap<Vec<usize>, Raw>;

pub fn raw_multi(a: &LMultivector) -> RawMulti {
    a.terms()
        .iter()
        .map(|(k, p)| (k.clone(), raw(p)))
        .filter(|(_, p)| !p.is_empty())
        .collect()
}

/// `theta_a theta_b` as a sorted list with the sign of the reordering, or
/// `None` when a generator repeats.
fn theta_product(a: &[usize], b: &[usize]) -> Option<(Vec<usize>, bool)> {
    let mut all: Vec<usize> = a.iter().chain(b).copied().collect();
    let mut inversions = 0usize;
    for i in 0..all.len() {
        for j in i + 1..all.len() {
            if all[i] == all[j] {
                return None;
            }
            if all[i] > all[j] {
                inversions += 1;
            }
        }
    }
    all.sort_unstable();
    Some((all, inversions % 2 == 1))
}

fn add_multi(acc: &mut RawMulti, idx: Vec<usize>, p: &Raw, c: &Gaussian) {
    let slot = acc.entry(idx.clone()).or_default();
    raw_add_into(slot, p, c);
    if slot.is_empty() {
        acc.remove(&idx);
    }
}

/// `sum_k (P right-d/dtheta_k)(d/dx_k Q)` over the vector slots.
fn half_bracket(p: &RawMulti, q: &RawMulti, p_deg: usize, out: &mut RawMulti, sign: &Gaussian) {
    for (ip, cp) in p {
        for (pos, &k) in ip.iter().enumerate() {
            let mut rest = ip.clone();
            rest.remove(pos);
            let right_sign = if (p_deg - 1 - pos) % 2 == 0 {
                one()
            } else {
                minus_one()
            };
            for (iq, cq) in q {
                let dq = raw_diff(cq, k);
                if dq.is_empty() {
                    continue;
                }
                if let Some((idx, flip)) = theta_product(&rest, iq) {
                    let mut c = right_sign.clone() * sign.clone();
                    if flip {
                        c = -c;
                    }
                    add_multi(out, idx, &raw_mul(cp, &dq), &c);
                }
            }
        }
    }
}

/// Schouten bracket of vector-slot multivectors of degrees `p, q >= 1`:
/// `[P,Q] = (P d/dtheta_k)(d_k Q) - (-1)^{(p-1)(q-1)} (Q d/dtheta_k)(d_k P)`.
pub fn oracle_schouten(a: &LMultivector, b: &LMultivector) -> RawMulti {
    let (p, q) = (a.degree(), b.degree());
    assert!(p >= 1 && q >= 1);
    let (ra, rb) = (raw_multi(a), raw_multi(b));
    let mut out = RawMulti::new();
    half_bracket(&ra, &rb, p, &mut out, &one());
    let s = if ((p - 1) * (q - 1)) % 2 == 0 {
        minus_one()
    } else {
        one()
    };
    half_bracket(&rb, &ra, q, &mut out, &s);
    out
}

// ---------------------------------------------------------------------------
// Random linear structures

pub fn j_std(m: usize) -> RMat {
    let mut j = RMat::zeros(m, m);
    for k in 0..m / 2 {
        j[(2 * k + 1, 2 * k)] = 1.0;
        j[(2 * k, 2 * k + 1)] = -1.0;
    }
    j
}

pub fn random_matrix<R: Rng>(r: &mut R, rows: usize, cols: usize) -> RMat {
    RMat::from_fn(rows, cols, |_, _| r.random_range(-1.0..1.0))
}

pub fn random_antisymmetric<R: Rng>(r: &mut R, m: usize) -> RMat {
    let a = random_matrix(r, m, m);
    &a - a.transpose()
}

/// Well-conditioned change of basis.
pub fn random_basis_change<R: Rng>(r: &mut R, m: usize) -> RMat {
    RMat::identity(m, m) + random_matrix(r, m, m) * 0.3
}

/// Symplectic block on the first `2a` coordinates times a complex block on
/// the last `2b`; type `b`.
pub fn block_structure(a: usize, b: usize) -> LinearGC {
    let sym = (a > 0).then(|| LinearGC::from_symplectic(&j_std(2 * a)).unwrap());
    let cx = (b > 0).then(|| LinearGC::from_complex(&j_std(2 * b)).unwrap());
    match (sym, cx) {
        (Some(s), Some(c)) => LinearGC::product(&s, &c),
        (Some(s), None) => s,
        (None, Some(c)) => c,
        (None, None) => panic!("empty structure"),
    }
}

/// Random structure of type `b` on `R^{2a+2b}`, twisted by a basis change
/// and a B-field.
pub fn random_structure<R: Rng>(r: &mut R, a: usize, b: usize) -> LinearGC {
    let m = 2 * (a + b);
    block_structure(a, b)
        .change_basis(&random_basis_change(r, m))
        .unwrap()
        .b_transform(&(random_antisymmetric(r, m) * 0.5))
        .unwrap()
}

pub fn rank_of(m: &DMatrix<Complex64>) -> usize {
    if m.ncols() == 0 || m.nrows() == 0 {
        return 0;
    }
    let sv = singular_values(m).unwrap();
    let top = sv[0].max(1.0);
    sv.iter().filter(|s| **s > RANK_TOL * top).count()
}

pub fn orthonormal_real(q: &RMat) -> RMat {
    orth_real(q, RANK_TOL, 0.0).unwrap().0
}

pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Orthonormal basis of the kernel of `k`, from a full SVD.
pub fn kernel_basis(k: &CMat) -> CMat {
    let n = k.ncols();
    if k.nrows() == 0 {
        return CMat::identity(n, n);
    }
    let svd = checked_svd(k).unwrap();
    let top = svd.sv.first().copied().unwrap_or(0.0).max(1.0);
    let rank = svd.sv.iter().filter(|s| **s > RANK_TOL * top).count();
    svd.v_t.adjoint().columns(rank, n - rank).into_owned()
}
