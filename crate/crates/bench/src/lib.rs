//! Deterministic inputs shared by the benchmarks.

use gkw_core::poly::Var;
use gkw_core::{ComplexPolynomial, Form, GeneralizedSection, VectorField};

/// `(1 + sum z_i + sum zbar_i)^degree` on `C^n`.
pub fn dense_poly(n: usize, degree: u32) -> ComplexPolynomial {
    let mut base = ComplexPolynomial::one(n);
    for i in 0..n {
        base += ComplexPolynomial::var(n, Var::Z(i));
        base += ComplexPolynomial::var(n, Var::Zbar(i));
    }
    base.pow(degree)
}

/// A section whose vector part cycles the holomorphic coordinates with
/// coefficients of the given degree and whose form part is exact.
pub fn section(n: usize, degree: u32, shift: usize) -> GeneralizedSection {
    let mut vec = VectorField::basis(n, 0, ComplexPolynomial::zero(n));
    for i in 0..n {
        let coef = ComplexPolynomial::var(n, Var::Z((i + shift) % n)).pow(degree);
        vec = vec.add(&VectorField::basis(n, (i + 1) % n, coef));
        let anti = ComplexPolynomial::var(n, Var::Zbar(i)).pow(degree);
        vec = vec.add(&VectorField::basis(n, n + (i + shift) % n, anti));
    }
    let form = Form::function(dense_poly(n, degree)).d();
    GeneralizedSection::new(vec, form)
}
