//! Floating-point evaluation of polynomial tensors at a point, producing
//! real-frame coordinates `(x_1, y_1, ..., x_n, y_n)` for the linear algebra layer.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::{CalculusError, DeformationBivector, Form, GeneralizedSection, VectorField};
use crate::poly::ComplexPolynomial;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// `z_j = x_j + i y_j` from interleaved real coordinates.
pub fn z_from_real(n: usize, p: &[f64]) -> Result<Vec<Complex64>, CalculusError> {
    if p.len() != 2 * n {
        return Err(CalculusError::DimensionMismatch {
            expected: 2 * n,
            got: p.len(),
        });
    }
    Ok((0..n)
        .map(|j| Complex64::new(p[2 * j], p[2 * j + 1]))
        .collect())
}

pub fn real_from_z(z: &[Complex64]) -> Vec<f64> {
    z.iter().flat_map(|w| [w.re, w.im]).collect()
}

/// Real-frame components of the frame vector `d/d(var slot)`.
pub fn frame_vector(n: usize, slot: usize) -> DVector<Complex64> {
    let mut v = DVector::zeros(2 * n);
    let j = slot % n;
    v[2 * j] = Complex64::new(0.5, 0.0);
    v[2 * j + 1] = if slot < n {
        Complex64::new(0.0, -0.5)
    } else {
        Complex64::new(0.0, 0.5)
    };
    v
}

/// Real-coframe components of `d(var slot)`.
pub fn frame_covector(n: usize, slot: usize) -> DVector<Complex64> {
    let mut v = DVector::zeros(2 * n);
    let j = slot % n;
    v[2 * j] = Complex64::new(1.0, 0.0);
    v[2 * j + 1] = if slot < n { I } else { -I };
    v
}

/// Real-coordinate vector (length `4n`) of a generalized frame element.
pub fn frame_element(n: usize, basis: usize) -> DVector<Complex64> {
    let mut v = DVector::zeros(4 * n);
    if basis < 2 * n {
        v.rows_mut(0, 2 * n).copy_from(&frame_vector(n, basis));
    } else {
        v.rows_mut(2 * n, 2 * n)
            .copy_from(&frame_covector(n, basis - 2 * n));
    }
    v
}

fn check(n: usize, z: &[Complex64]) -> Result<(), CalculusError> {
    if z.len() != n {
        return Err(CalculusError::DimensionMismatch {
            expected: n,
            got: z.len(),
        });
    }
    Ok(())
}

pub fn eval_poly(p: &ComplexPolynomial, z: &[Complex64]) -> Result<Complex64, CalculusError> {
    check(p.nvars(), z)?;
    Ok(p.eval(z))
}

/// Components in the z/zbar frame, frame indices preserved.
pub fn eval_vector_frame(
    x: &VectorField,
    z: &[Complex64],
) -> Result<BTreeMap<usize, Complex64>, CalculusError> {
    check(x.n(), z)?;
    Ok(x.components()
        .iter()
        .map(|(s, p)| (*s, p.eval(z)))
        .collect())
}

pub fn eval_form_frame(
    w: &Form,
    z: &[Complex64],
) -> Result<BTreeMap<Vec<usize>, Complex64>, CalculusError> {
    check(w.n(), z)?;
    Ok(w.components()
        .iter()
        .map(|(k, p)| (k.clone(), p.eval(z)))
        .collect())
}

pub fn eval_vector(x: &VectorField, z: &[Complex64]) -> Result<DVector<Complex64>, CalculusError> {
    let n = x.n();
    let mut v = DVector::zeros(2 * n);
    for (s, c) in eval_vector_frame(x, z)? {
        v += frame_vector(n, s) * c;
    }
    Ok(v)
}

pub fn eval_one_form(w: &Form, z: &[Complex64]) -> Result<DVector<Complex64>, CalculusError> {
    assert_eq!(w.degree(), 1);
    let n = w.n();
    let mut v = DVector::zeros(2 * n);
    for (k, c) in eval_form_frame(w, z)? {
        v += frame_covector(n, k[0]) * c;
    }
    Ok(v)
}

/// Matrix `beta(e_a, e_b)` of a 2-form on the real frame.
pub fn eval_two_form(w: &Form, z: &[Complex64]) -> Result<DMatrix<Complex64>, CalculusError> {
    assert_eq!(w.degree(), 2);
    let n = w.n();
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    for (k, c) in eval_form_frame(w, z)? {
        let u = frame_covector(n, k[0]);
        let v = frame_covector(n, k[1]);
        m += (&u * v.transpose() - &v * u.transpose()) * c;
    }
    Ok(m)
}

/// The same 2-form as a map `V -> V*` (column `a` is `i_{e_a} beta`).
pub fn eval_two_form_map(w: &Form, z: &[Complex64]) -> Result<DMatrix<Complex64>, CalculusError> {
    Ok(eval_two_form(w, z)?.transpose())
}

pub fn eval_section(
    s: &GeneralizedSection,
    z: &[Complex64],
) -> Result<DVector<Complex64>, CalculusError> {
    let n = s.n();
    let mut v = DVector::zeros(4 * n);
    v.rows_mut(0, 2 * n).copy_from(&eval_vector(&s.vec, z)?);
    v.rows_mut(2 * n, 2 * n)
        .copy_from(&eval_one_form(&s.form, z)?);
    Ok(v)
}

/// Antisymmetric `E = sum f (e1 e2^T - e2 e1^T)`, so that the pairing
/// contraction is `i_W eps = 2 E^T eta w`.
pub fn eval_deformation(
    eps: &DeformationBivector,
    z: &[Complex64],
) -> Result<DMatrix<Complex64>, CalculusError> {
    let n = eps.n();
    check(n, z)?;
    let mut m = DMatrix::zeros(4 * n, 4 * n);
    for (idx, p) in eps.to_lmultivector().terms() {
        let c = p.eval(z);
        if c == Complex64::new(0.0, 0.0) {
            continue;
        }
        let a = frame_element(n, idx[0]);
        let b = frame_element(n, idx[1]);
        m += (&a * b.transpose() - &b * a.transpose()) * c;
    }
    Ok(m)
}
