//! Random admissible instances for the pointwise type identities, shared by
//! the property tests and the acceptance runner. Each builder is a pure
//! function of `(m, seed)` and returns `None` when the drawn instance
//! violates a precondition.

use gkw_core::actions::kahler_form;
use gkw_core::exterior::DeformationBivector;
use gkw_core::linalg::{
    pairing_matrix, pretype_dim, reduce_gcs, to_complex, ComplexSubspace, GcsError, LinearGC,
    PretypeReport, RMat, RANK_TOL,
};
use gkw_core::poly::{gauss, gaussian_to_c64, rat, ComplexPolynomial, Var};
use gkw_core::structure::StructureRecipe;
use gkw_core::VectorField;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

use super::{
    block_structure, c64, kernel_basis, orthonormal_real, random_antisymmetric,
    random_basis_change, random_structure, rank_of, rng,
};

/// Splits `m/2` into a symplectic part `a` and a complex part `b`.
pub fn split<R: Rng>(r: &mut R, m: usize) -> (usize, usize) {
    let b = r.random_range(0..=m / 2);
    (m / 2 - b, b)
}

pub fn real_subspace_pool<R: Rng>(r: &mut R, j: &LinearGC, dim: usize) -> RMat {
    let m = j.m();
    let mut cols = RMat::zeros(2 * m, dim);
    for c in 0..dim {
        let v: DVector<f64> = DVector::from_fn(2 * m, |_, _| r.random_range(-1.0..1.0));
        let v = match r.random_range(0..4) {
            0 => v,
            1 => DVector::from_fn(2 * m, |i, _| if i < m { v[i] } else { 0.0 }),
            2 => DVector::from_fn(2 * m, |i, _| if i >= m { v[i] } else { 0.0 }),
            _ => j.matrix() * v,
        };
        cols.set_column(c, &v);
    }
    cols
}

/// Real coordinates `(Re c_0, Im c_0, ...)` of the vector `c^j d/dz_j + conj`.
pub fn real_vector(c: &DVector<Complex64>) -> DVector<f64> {
    DVector::from_fn(2 * c.len(), |i, _| {
        if i % 2 == 0 {
            c[i / 2].re
        } else {
            c[i / 2].im
        }
    })
}

/// Hermitian Gram-Schmidt; drops near-dependent candidates.
pub fn unitary_frame(candidates: Vec<DVector<Complex64>>, k: usize) -> Vec<DVector<Complex64>> {
    let mut out: Vec<DVector<Complex64>> = Vec::new();
    for mut v in candidates {
        for u in &out {
            let p = u.dotc(&v);
            v -= u * p;
        }
        let norm = v.norm();
        if norm > 1e-6 {
            out.push(v / c64(norm, 0.0));
        }
        if out.len() == k {
            break;
        }
    }
    out
}

#[derive(Debug)]
pub struct Type2Case {
    pub k: usize,
    /// Complex dimension of `Q_C cap pi(L2)`.
    pub cap: usize,
    /// 0: generic directions; 1: first aligned with `Y(z)`; 2: also `Z(z)`.
    pub aligned: usize,
    pub upstairs: usize,
    pub downstairs: usize,
    pub quotient_j1: usize,
}

impl Type2Case {
    pub fn formula(&self) -> i64 {
        self.upstairs as i64 - self.k as i64 + 2 * self.cap as i64
    }

    pub fn holds(&self) -> bool {
        self.downstairs as i64 == self.formula() && self.quotient_j1 == 0
    }
}

/// Flat Kahler pair deformed by `Y ^ Z + i_Y w ^ i_Z w` at a random point,
/// reduced by the real span of `k` unitary directions, optionally aligned
/// with `Y(z)` and `Z(z)`.
pub fn type2_case(m: usize, seed: u64) -> Option<Type2Case> {
    let mut r = rng(seed);
    let n = m / 2;
    let k = r.random_range(1..n);
    let i = r.random_range(0..n);
    let jj = (i + r.random_range(1..n)) % n;
    let l = r.random_range(0..n);
    let e = r.random_range(0..=1u32);
    let coef = c64(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0));
    let y = VectorField::basis(n, i, ComplexPolynomial::var(n, Var::Z(0)).pow(e));
    let cz = ComplexPolynomial::constant(
        n,
        gauss(
            rat((coef.re * 8.0) as i64, 8),
            rat((coef.im * 8.0) as i64, 8),
        ),
    );
    let zf = VectorField::basis(n, jj, ComplexPolynomial::one(n)).add(&VectorField::basis(
        n,
        l,
        cz.clone(),
    ));
    let eps = DeformationBivector::from_fields(&y, &zf, &kahler_form(n)).unwrap();
    let t = [rat(1, 8), rat(1, 4), rat(1, 2)][r.random_range(0..3)].clone();
    let mut z: Vec<Complex64> = (0..n)
        .map(|_| c64(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)))
        .collect();
    if r.random_bool(0.35) {
        z[0] = c64(0.0, 0.0);
    }
    let pair = StructureRecipe::Deformed { eps, t }.pair_at(&z).ok()?;

    // unitary frame, optionally aligned with the deforming directions at z
    let mut cand: Vec<DVector<Complex64>> = Vec::new();
    let mode = r.random_range(0..3);
    if mode >= 1 {
        let mut yv = DVector::zeros(n);
        yv[i] = z[0].powu(e);
        cand.push(yv);
    }
    if mode == 2 {
        let mut zv = DVector::zeros(n);
        zv[jj] += c64(1.0, 0.0);
        zv[l] += gaussian_to_c64(&cz.as_constant().unwrap());
        cand.push(zv);
    }
    for _ in 0..2 * n {
        cand.push(DVector::from_fn(n, |_, _| {
            c64(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0))
        }));
    }
    let frame = unitary_frame(cand, k);
    assert_eq!(frame.len(), k);
    let mut q = RMat::zeros(m, k);
    for (c, u) in frame.iter().enumerate() {
        q.set_column(c, &real_vector(u));
    }

    let reduced = pair.reduce(&q).ok()?;

    // dim(Q_C cap pi(L2)) from ranks, with L2 the range of I - i J2
    let j2 = to_complex(pair.j2().matrix());
    let proj_l = (DMatrix::<Complex64>::identity(2 * m, 2 * m) - j2 * c64(0.0, 1.0))
        .rows(0, m)
        .into_owned();
    let qc = to_complex(&q);
    let mut joint = DMatrix::<Complex64>::zeros(m, k + 2 * m);
    joint.columns_mut(0, k).copy_from(&qc);
    joint.columns_mut(k, 2 * m).copy_from(&proj_l);
    let cap = k + rank_of(&proj_l) - rank_of(&joint);

    Some(Type2Case {
        k,
        cap,
        aligned: mode,
        upstairs: pair.j2().type_of().unwrap(),
        downstairs: reduced.pair.j2().type_of().unwrap(),
        quotient_j1: reduced.pair.j1().type_of().unwrap(),
    })
}

#[derive(Debug)]
pub struct PretypeCase {
    pub ty: usize,
    pub dim_r: usize,
    /// `R + J(R)` is nondegenerate for the pairing.
    pub nondegenerate: bool,
    pub library: PretypeReport,
    /// Both sides recomputed here from ranks.
    pub lhs: usize,
    pub rhs: usize,
}

/// Both sides of the pretype identity for a random structure and a real
/// subspace drawn from generic, `V`-only, `V*`-only and `J`-image vectors.
pub fn pretype_case(m: usize, seed: u64) -> Option<PretypeCase> {
    let mut r = rng(seed);
    let (a, b) = split(&mut r, m);
    let j = random_structure(&mut r, a, b);
    let dim = r.random_range(0..=m);
    let cols = real_subspace_pool(&mut r, &j, dim);
    let rs = ComplexSubspace::from_real_columns(&cols, RANK_TOL).unwrap();
    let library = match pretype_dim(&j, &rs) {
        Err(GcsError::Precondition(_)) => return None,
        Err(e) => panic!("m {m}, seed {seed}: {e}"),
        Ok(rep) => rep,
    };

    let eta = to_complex(&pairing_matrix(m));
    let lc = DMatrix::<Complex64>::identity(2 * m, 2 * m) - to_complex(j.matrix()) * c64(0.0, 1.0);
    let rc = to_complex(&cols);
    let jrc = to_complex(&(j.matrix() * &cols));
    let mut both = DMatrix::<Complex64>::zeros(2 * m, 2 * dim);
    both.columns_mut(0, dim).copy_from(&rc);
    both.columns_mut(dim, dim).copy_from(&jrc);
    let gram = both.transpose() * &eta * &both;
    let nondegenerate = rank_of(&gram) == rank_of(&both);
    let constraints = both.transpose() * &eta * &lc;
    let inside = &lc * kernel_basis(&constraints);
    let lhs = rank_of(&inside.rows(0, m).into_owned());
    let mut sum = DMatrix::<Complex64>::zeros(2 * m, 2 * m + dim);
    sum.columns_mut(0, 2 * m).copy_from(&lc);
    sum.columns_mut(2 * m, dim).copy_from(&rc);
    let rhs = rank_of(&sum.rows(0, m).into_owned()) - rank_of(&rc);
    Some(PretypeCase {
        ty: b,
        dim_r: rank_of(&rc),
        nondegenerate,
        library,
        lhs,
        rhs,
    })
}

#[derive(Debug)]
pub struct TypeCase {
    pub m: usize,
    pub k: usize,
    /// Type fixed by construction.
    pub expected: usize,
    pub before: usize,
    pub after: usize,
    pub quotient_m: usize,
}

/// A symplectic-times-complex structure twisted by a basis change and a
/// B-field vanishing on `Q`, reduced by `k` isotropic directions of the
/// symplectic block.
pub fn type_case(m: usize, seed: u64) -> TypeCase {
    let mut r = rng(seed);
    let a = r.random_range(1..=m / 2);
    let b = m / 2 - a;
    let k = r.random_range(1..=a);
    let basis = random_basis_change(&mut r, m);
    let mut q0 = RMat::zeros(m, k);
    for i in 0..k {
        q0[(2 * i, i)] = 1.0;
    }
    let q = &basis * q0;
    let qh = orthonormal_real(&q);
    let proj = RMat::identity(m, m) - &qh * qh.transpose();
    let bf = proj.transpose() * random_antisymmetric(&mut r, m) * &proj;
    let j = block_structure(a, b)
        .change_basis(&basis)
        .unwrap()
        .b_transform(&bf)
        .unwrap();
    let reduced = reduce_gcs(&j, &q).unwrap();
    TypeCase {
        m,
        k,
        expected: b,
        before: j.type_of().unwrap(),
        after: reduced.j.type_of().unwrap(),
        quotient_m: reduced.j.m(),
    }
}

/// `(type by construction, type of J, type of e^B J e^-B)`.
pub fn b_field_case(m: usize, seed: u64) -> (usize, usize, usize) {
    let mut r = rng(seed);
    let (a, b) = split(&mut r, m);
    let j: LinearGC = random_structure(&mut r, a, b);
    let bf = random_antisymmetric(&mut r, m);
    (
        b,
        j.type_of().unwrap(),
        j.b_transform(&bf).unwrap().type_of().unwrap(),
    )
}
