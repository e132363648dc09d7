//! Pointwise linear algebra on `V + V*` (real dimension `2m`): the pairing,
//! complex subspaces with thresholded ranks, generalized complex structures
//! and Kahler pairs.

mod gcs;
mod kahler;

pub use gcs::{
    pretype_dim, reduce_gcs, GcsError, GcsResiduals, LinearGC, PretypeReport, ReducedGc,
};
pub use kahler::{
    deform_pointwise, extract_bihermitian, pfaffian, BiHermitianData, BiHermitianResiduals,
    KahlerPairNum, PairError, PairResiduals, ReducedPair,
};

use nalgebra::{ComplexField, DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

pub type RMat = DMatrix<f64>;
pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

/// Singular values below `RANK_TOL * sigma_max` count as zero.
pub const RANK_TOL: f64 = 1e-9;
/// Validity residual bound for structures.
pub const VALIDITY_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("rank indeterminate: a singular value ratio {ratio:.3e} lies within a decade of the tolerance {tol:.1e}")]
    RankIndeterminate { ratio: f64, tol: f64 },
    #[error("singular value decomposition did not converge")]
    SvdFailed,
}

/// Outcome of a thresholded rank decision, with the spectral gap around the cut.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RankInfo {
    pub rank: usize,
    /// Smallest kept singular value relative to the reference scale.
    pub smallest_kept: f64,
    /// Largest dropped singular value relative to the reference scale.
    pub largest_dropped: f64,
    pub indeterminate: bool,
}

/// Rank of a list of singular values; `reference` is the scale the tolerance is
/// relative to (the largest singular value unless a larger scale is supplied).
pub fn numerical_rank(sv: &[f64], tol: f64, reference: f64) -> RankInfo {
    let smax = sv.iter().cloned().fold(0.0_f64, f64::max);
    let scale = smax.max(reference);
    if scale <= 0.0 || scale < 1e-300 {
        return RankInfo {
            rank: 0,
            smallest_kept: 0.0,
            largest_dropped: 0.0,
            indeterminate: false,
        };
    }
    let mut rank = 0;
    let mut smallest_kept = f64::INFINITY;
    let mut largest_dropped: f64 = 0.0;
    let mut indeterminate = false;
    for &s in sv {
        let r = s / scale;
        if r > tol {
            rank += 1;
            smallest_kept = smallest_kept.min(r);
        } else {
            largest_dropped = largest_dropped.max(r);
        }
        if r > tol / 10.0 && r < tol * 10.0 {
            indeterminate = true;
        }
    }
    if rank == 0 {
        smallest_kept = 0.0;
    }
    RankInfo {
        rank,
        smallest_kept,
        largest_dropped,
        indeterminate,
    }
}

pub fn to_complex(m: &RMat) -> CMat {
    m.map(|x| Complex64::new(x, 0.0))
}

pub fn real_part(m: &CMat) -> RMat {
    m.map(|x| x.re)
}

pub fn imag_part(m: &CMat) -> RMat {
    m.map(|x| x.im)
}

pub fn max_abs(m: &RMat) -> f64 {
    m.iter().fold(0.0, |a, x| a.max(x.abs()))
}

pub fn max_abs_c(m: &CMat) -> f64 {
    m.iter().fold(0.0, |a, x| a.max(x.norm()))
}

/// Symmetric pairing `<X+a, Y+b> = (a(Y) + b(X)) / 2` on `V + V*`, `dim V = m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PairingForm {
    pub m: usize,
}

impl PairingForm {
    pub fn new(m: usize) -> Self {
        PairingForm { m }
    }

    pub fn matrix(&self) -> RMat {
        pairing_matrix(self.m)
    }

    /// Bilinear (not sesquilinear) pairing of complexified elements.
    pub fn pair(&self, w1: &CVec, w2: &CVec) -> Result<Complex64, LinalgError> {
        for w in [w1, w2] {
            if w.len() != 2 * self.m {
                return Err(LinalgError::DimensionMismatch {
                    expected: 2 * self.m,
                    got: w.len(),
                });
            }
        }
        let m = self.m;
        let a = w1.rows(m, m).transpose() * w2.rows(0, m);
        let b = w2.rows(m, m).transpose() * w1.rows(0, m);
        Ok((a[(0, 0)] + b[(0, 0)]) * 0.5)
    }

    pub fn pair_real(&self, w1: &DVector<f64>, w2: &DVector<f64>) -> f64 {
        (w1.transpose() * self.matrix() * w2)[(0, 0)]
    }
}

pub fn pairing_matrix(m: usize) -> RMat {
    let mut eta = RMat::zeros(2 * m, 2 * m);
    for i in 0..m {
        eta[(i, m + i)] = 0.5;
        eta[(m + i, i)] = 0.5;
    }
    eta
}

/// Full singular value decomposition `m = u * diag(sv) * v_t` with the
/// singular values in descending order.
#[derive(Clone, Debug)]
pub struct Svd<T: nalgebra::Scalar> {
    pub u: DMatrix<T>,
    pub sv: Vec<f64>,
    pub v_t: DMatrix<T>,
}

/// Scalars with a dense SVD backend.
pub trait SvdScalar: ComplexField<RealField = f64> + Copy {
    fn svd_raw(m: &DMatrix<Self>) -> Option<Svd<Self>>;
}

macro_rules! impl_svd_scalar {
    ($t:ty) => {
        impl SvdScalar for $t {
            fn svd_raw(m: &DMatrix<Self>) -> Option<Svd<Self>> {
                let a = faer::Mat::<$t>::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)]);
                let s = a.svd().ok()?;
                let (u, v, d) = (s.U(), s.V(), s.S().column_vector());
                let k = m.nrows().min(m.ncols());
                Some(Svd {
                    u: DMatrix::from_fn(m.nrows(), m.nrows(), |i, j| u[(i, j)]),
                    sv: (0..k).map(|i| ComplexField::real(d[i])).collect(),
                    v_t: DMatrix::from_fn(m.ncols(), m.ncols(), |i, j| {
                        ComplexField::conjugate(v[(j, i)])
                    }),
                })
            }
        }
    };
}

impl_svd_scalar!(f64);
impl_svd_scalar!(Complex64);

impl<T: SvdScalar> Svd<T> {
    /// Least-squares solution of `m x = b` through the pseudo-inverse, dropping
    /// singular values below `tol * sigma_max`.
    pub fn solve(&self, b: &DMatrix<T>, tol: f64) -> DMatrix<T> {
        let smax = self.sv.first().cloned().unwrap_or(0.0);
        let ut_b = self.u.adjoint() * b;
        let n = self.v_t.nrows();
        let mut y = DMatrix::<T>::zeros(n, b.ncols());
        for (i, &s) in self.sv.iter().enumerate() {
            if s > tol * smax && s > 0.0 {
                for c in 0..b.ncols() {
                    y[(i, c)] = ut_b[(i, c)] * T::from_real(1.0 / s);
                }
            }
        }
        self.v_t.adjoint() * y
    }
}

fn max_abs_t<T: SvdScalar>(m: &DMatrix<T>) -> f64 {
    m.iter().map(|x| x.abs()).fold(0.0, f64::max)
}

/// SVD with both factors, accepted only when it reconstructs the input and the
/// factors are unitary.
pub fn checked_svd<T: SvdScalar>(m: &DMatrix<T>) -> Result<Svd<T>, LinalgError> {
    let s = T::svd_raw(m).ok_or(LinalgError::SvdFailed)?;
    if s.sv.windows(2).any(|w| w[0] < w[1]) || s.sv.iter().any(|x| !x.is_finite()) {
        return Err(LinalgError::SvdFailed);
    }
    let (r, c) = m.shape();
    let mut sig = DMatrix::<T>::zeros(r, c);
    for (i, &x) in s.sv.iter().enumerate() {
        sig[(i, i)] = T::from_real(x);
    }
    let scale = 1.0 + max_abs_t(m);
    let recon = max_abs_t(&(&s.u * sig * &s.v_t - m));
    let ortho_u = max_abs_t(&(s.u.adjoint() * &s.u - DMatrix::<T>::identity(r, r)));
    let ortho_v = max_abs_t(&(&s.v_t * s.v_t.adjoint() - DMatrix::<T>::identity(c, c)));
    let bound = 1e-12 * (1.0 + (r.max(c) as f64).sqrt());
    if recon <= bound * scale && ortho_u <= bound && ortho_v <= bound {
        Ok(s)
    } else {
        Err(LinalgError::SvdFailed)
    }
}

/// Singular values in descending order.
pub fn singular_values<T: SvdScalar>(m: &DMatrix<T>) -> Result<Vec<f64>, LinalgError> {
    if m.is_empty() {
        return Ok(vec![]);
    }
    Ok(checked_svd(m)?.sv)
}

/// Smallest singular value; infinite for an empty matrix.
pub fn min_singular_value<T: SvdScalar>(m: &DMatrix<T>) -> Result<f64, LinalgError> {
    Ok(singular_values(m)?.last().cloned().unwrap_or(f64::INFINITY))
}

fn svd(m: &CMat) -> Result<(CMat, Vec<f64>, CMat), LinalgError> {
    if m.ncols() == 0 || m.nrows() == 0 {
        return Ok((
            CMat::identity(m.nrows(), m.nrows()),
            vec![],
            CMat::identity(m.ncols(), m.ncols()),
        ));
    }
    let s = checked_svd(m)?;
    Ok((s.u, s.sv, s.v_t))
}

/// Orthonormal basis of the column span, with its rank decision.
pub fn orth(m: &CMat, tol: f64, reference: f64) -> Result<(CMat, RankInfo), LinalgError> {
    let (u, sv, _) = svd(m)?;
    let info = numerical_rank(&sv, tol, reference);
    let keep: Vec<usize> = (0..sv.len())
        .filter(|&i| sv[i] > tol * sv.iter().cloned().fold(reference, f64::max))
        .collect();
    let mut b = CMat::zeros(m.nrows(), keep.len());
    for (c, &i) in keep.iter().enumerate() {
        b.set_column(c, &u.column(i));
    }
    Ok((b, info))
}

/// Orthonormal basis of the Hermitian orthogonal complement of orthonormal columns.
pub fn hermitian_complement(q: &CMat) -> Result<CMat, LinalgError> {
    let n = q.nrows();
    let k = q.ncols();
    if k == 0 {
        return Ok(CMat::identity(n, n));
    }
    let proj = CMat::identity(n, n) - q * q.adjoint();
    let (u, sv, _) = svd(&proj)?;
    let mut idx: Vec<usize> = (0..sv.len()).collect();
    idx.sort_by(|a, b| sv[*b].partial_cmp(&sv[*a]).unwrap());
    let keep = n.saturating_sub(k);
    let mut b = CMat::zeros(n, keep);
    for (c, &i) in idx.iter().take(keep).enumerate() {
        b.set_column(c, &u.column(i));
    }
    Ok(b)
}

/// Orthonormal basis of `{w : K w = 0}`.
pub fn null_space(k: &CMat, tol: f64) -> Result<(CMat, RankInfo), LinalgError> {
    let (row, info) = orth(&k.adjoint(), tol, 0.0)?;
    Ok((hermitian_complement(&row)?, info))
}

/// Real orthonormal basis of the column span of a real matrix.
pub fn orth_real(m: &RMat, tol: f64, reference: f64) -> Result<(RMat, RankInfo), LinalgError> {
    if m.ncols() == 0 || m.nrows() == 0 {
        return Ok((
            RMat::zeros(m.nrows(), 0),
            numerical_rank(&[], tol, reference),
        ));
    }
    let s = checked_svd(m)?;
    let info = numerical_rank(&s.sv, tol, reference);
    let scale = s.sv.iter().cloned().fold(reference, f64::max);
    let keep = s.sv.iter().filter(|&&x| x > tol * scale).count();
    Ok((s.u.columns(0, keep).into_owned(), info))
}

/// Real orthonormal basis of `{w : K w = 0}` for a real matrix.
pub fn null_space_real(k: &RMat, tol: f64) -> Result<(RMat, RankInfo), LinalgError> {
    let n = k.ncols();
    if k.nrows() == 0 {
        return Ok((RMat::identity(n, n), numerical_rank(&[], tol, 0.0)));
    }
    let s = checked_svd(k)?;
    let info = numerical_rank(&s.sv, tol, 0.0);
    let v = s.v_t.transpose();
    Ok((v.columns(info.rank, n - info.rank).into_owned(), info))
}

/// A complex subspace of `C^N` held by an orthonormal basis.
#[derive(Clone, Debug)]
pub struct ComplexSubspace {
    basis: CMat,
    tol: f64,
    rank: RankInfo,
}

impl ComplexSubspace {
    pub fn zero(ambient: usize) -> Self {
        ComplexSubspace {
            basis: CMat::zeros(ambient, 0),
            tol: RANK_TOL,
            rank: RankInfo {
                rank: 0,
                smallest_kept: 0.0,
                largest_dropped: 0.0,
                indeterminate: false,
            },
        }
    }

    pub fn full(ambient: usize) -> Self {
        Self::from_orthonormal(CMat::identity(ambient, ambient), RANK_TOL)
    }

    /// Span of the columns with singular values thresholded relative to the largest.
    pub fn from_columns(cols: &CMat, tol: f64) -> Result<Self, LinalgError> {
        let (basis, rank) = orth(cols, tol, 0.0)?;
        Ok(ComplexSubspace { basis, tol, rank })
    }

    pub fn from_real_columns(cols: &RMat, tol: f64) -> Result<Self, LinalgError> {
        Self::from_columns(&to_complex(cols), tol)
    }

    fn from_orthonormal(basis: CMat, tol: f64) -> Self {
        let k = basis.ncols();
        ComplexSubspace {
            basis,
            tol,
            rank: RankInfo {
                rank: k,
                smallest_kept: 1.0,
                largest_dropped: 0.0,
                indeterminate: false,
            },
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn basis(&self) -> &CMat {
        &self.basis
    }

    pub fn rank_info(&self) -> RankInfo {
        self.rank
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn projector(&self) -> CMat {
        &self.basis * self.basis.adjoint()
    }

    /// Relative norm of the component of `v` outside the subspace.
    pub fn residual(&self, v: &CVec) -> f64 {
        let nv = v.norm();
        if nv == 0.0 {
            return 0.0;
        }
        let inside = &self.basis * (self.basis.adjoint() * v);
        (v - inside).norm() / nv
    }

    pub fn contains(&self, v: &CVec, tol: f64) -> bool {
        self.residual(v) < tol
    }

    pub fn sum(&self, other: &ComplexSubspace) -> Result<ComplexSubspace, LinalgError> {
        let mut cols = CMat::zeros(self.ambient_dim(), self.dim() + other.dim());
        cols.columns_mut(0, self.dim()).copy_from(&self.basis);
        cols.columns_mut(self.dim(), other.dim())
            .copy_from(&other.basis);
        if cols.ncols() == 0 {
            return Ok(ComplexSubspace::zero(self.ambient_dim()));
        }
        let (basis, rank) = orth(&cols, self.tol, 1.0)?;
        Ok(ComplexSubspace {
            basis,
            tol: self.tol,
            rank,
        })
    }

    /// Intersection: directions of `self` whose component outside `other`
    /// has singular value below the tolerance.
    pub fn intersect(&self, other: &ComplexSubspace) -> Result<ComplexSubspace, LinalgError> {
        let k = self.dim();
        if k == 0 || other.dim() == 0 {
            return Ok(ComplexSubspace::zero(self.ambient_dim()));
        }
        let outside = &self.basis - other.basis() * (other.basis().adjoint() * &self.basis);
        let (_, sv, vt) = svd(&outside)?;
        let tol = self.tol;
        let mut indeterminate = false;
        let mut picked = Vec::new();
        let mut smallest_kept = f64::INFINITY;
        let mut largest_dropped: f64 = 0.0;
        for (i, &s) in sv.iter().enumerate() {
            if s < tol {
                picked.push(i);
                largest_dropped = largest_dropped.max(s);
            } else {
                smallest_kept = smallest_kept.min(s);
            }
            if s > tol / 10.0 && s < tol * 10.0 {
                indeterminate = true;
            }
        }
        let mut coeffs = CMat::zeros(k, picked.len());
        for (c, &i) in picked.iter().enumerate() {
            coeffs.set_column(c, &vt.row(i).adjoint());
        }
        let vecs = &self.basis * coeffs;
        let basis = if vecs.ncols() > 0 {
            orth(&vecs, tol, 1.0)?.0
        } else {
            CMat::zeros(self.ambient_dim(), 0)
        };
        let dim = basis.ncols();
        Ok(ComplexSubspace {
            basis,
            tol,
            rank: RankInfo {
                rank: dim,
                smallest_kept,
                largest_dropped,
                indeterminate,
            },
        })
    }

    pub fn conj(&self) -> ComplexSubspace {
        ComplexSubspace {
            basis: self.basis.map(|x| x.conj()),
            tol: self.tol,
            rank: self.rank,
        }
    }

    /// Image under a linear map.
    pub fn map(&self, a: &CMat) -> Result<ComplexSubspace, LinalgError> {
        if a.ncols() != self.ambient_dim() {
            return Err(LinalgError::DimensionMismatch {
                expected: self.ambient_dim(),
                got: a.ncols(),
            });
        }
        if self.dim() == 0 {
            return Ok(ComplexSubspace::zero(a.nrows()));
        }
        Self::from_columns(&(a * &self.basis), self.tol)
    }

    pub fn map_real(&self, a: &RMat) -> Result<ComplexSubspace, LinalgError> {
        self.map(&to_complex(a))
    }

    /// Rows `start..start+len` of every basis vector, e.g. the projection to `V`.
    /// The basis is orthonormal, so ranks are decided on the absolute scale.
    pub fn project_rows(&self, start: usize, len: usize) -> Result<ComplexSubspace, LinalgError> {
        if self.dim() == 0 {
            return Ok(ComplexSubspace::zero(len));
        }
        let rows = self.basis.rows(start, len).into_owned();
        let (basis, rank) = orth(&rows, self.tol, 1.0)?;
        Ok(ComplexSubspace {
            basis,
            tol: self.tol,
            rank,
        })
    }

    /// Orthogonal complement with respect to a symmetric bilinear form `eta`.
    pub fn pairing_perp(&self, eta: &RMat) -> Result<ComplexSubspace, LinalgError> {
        if self.dim() == 0 {
            return Ok(ComplexSubspace::full(self.ambient_dim()));
        }
        let k = self.basis.transpose() * to_complex(eta);
        let (basis, _) = null_space(&k, self.tol)?;
        Ok(ComplexSubspace::from_orthonormal(basis, self.tol))
    }

    /// Largest `|b_i^T eta b_j|` over basis vectors.
    pub fn isotropy_residual(&self, eta: &RMat) -> f64 {
        let g = self.basis.transpose() * to_complex(eta) * &self.basis;
        max_abs_c(&g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(n: usize, i: usize) -> CVec {
        let mut v = CVec::zeros(n);
        v[i] = Complex64::new(1.0, 0.0);
        v
    }

    #[test]
    fn pairing_examples() {
        let p = PairingForm::new(2);
        let dx_plus_x = e(4, 0) + e(4, 2);
        assert_eq!(
            p.pair(&dx_plus_x, &dx_plus_x).unwrap(),
            Complex64::new(1.0, 0.0)
        );
        assert_eq!(
            p.pair(&e(4, 0), &e(4, 1)).unwrap(),
            Complex64::new(0.0, 0.0)
        );
        assert_eq!(
            p.pair(&e(4, 0), &e(4, 2)).unwrap(),
            Complex64::new(0.5, 0.0)
        );
        assert!(p.pair(&e(3, 0), &e(4, 2)).is_err());
    }

    #[test]
    fn perp_examples() {
        let m = 2;
        let eta = pairing_matrix(m);
        let mut v = CMat::zeros(4, 2);
        v[(0, 0)] = Complex64::new(1.0, 0.0);
        v[(1, 1)] = Complex64::new(1.0, 0.0);
        let vs = ComplexSubspace::from_columns(&v, RANK_TOL).unwrap();
        let vp = vs.pairing_perp(&eta).unwrap();
        assert_eq!(vp.dim(), 2);
        assert_eq!(vp.intersect(&vs).unwrap().dim(), 2);
        assert_eq!(
            ComplexSubspace::full(4).pairing_perp(&eta).unwrap().dim(),
            0
        );
        let dx = ComplexSubspace::from_columns(&CMat::from_columns(&[e(4, 0)]), RANK_TOL).unwrap();
        let p = dx.pairing_perp(&eta).unwrap();
        assert_eq!(p.dim(), 3);
        assert!(p.residual(&e(4, 2)) > 0.5);
    }

    #[test]
    fn projection_of_a_subspace_of_the_forms_is_zero() {
        let mut v = CMat::zeros(4, 2);
        v[(2, 0)] = Complex64::new(1.0, 0.0);
        v[(3, 1)] = Complex64::new(1.0, 0.0);
        v[(0, 0)] = Complex64::new(1e-16, 0.0);
        v[(1, 1)] = Complex64::new(0.0, -2e-16);
        let s = ComplexSubspace::from_columns(&v, RANK_TOL).unwrap();
        assert_eq!(s.dim(), 2);
        assert_eq!(s.project_rows(0, 2).unwrap().dim(), 0);
        assert_eq!(s.project_rows(2, 2).unwrap().dim(), 2);
    }

    #[test]
    fn rank_flags_borderline_values() {
        let r = numerical_rank(&[1.0, 5e-9], 1e-9, 0.0);
        assert!(r.indeterminate);
        assert_eq!(r.rank, 2);
        let r = numerical_rank(&[1.0, 1e-15], 1e-9, 0.0);
        assert!(!r.indeterminate);
        assert_eq!(r.rank, 1);
    }
}
