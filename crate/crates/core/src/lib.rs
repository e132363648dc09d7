//! Generalized complex and generalized Kahler geometry workbench.

pub mod actions;
pub mod catalog;
pub mod exterior;
pub mod linalg;
pub mod poly;
pub mod reduction;
pub mod report;
pub mod structure;

pub use exterior::{
    courant_bracket, DeformationBivector, Form, GeneralizedSection, LMultivector, VectorField,
};
pub use poly::{ComplexPolynomial, Gaussian, Rational, Var};
