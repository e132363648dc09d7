use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use super::{
    checked_svd, max_abs, min_singular_value, null_space_real, orth_real, pairing_matrix,
    to_complex, CMat, ComplexSubspace, LinalgError, RMat, RankInfo, RANK_TOL, VALIDITY_TOL,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GcsError {
    #[error("matrix must be {expected}x{expected}, got {rows}x{cols}")]
    Shape {
        expected: usize,
        rows: usize,
        cols: usize,
    },
    #[error("J^2 + I has residual {0:.3e}")]
    NotInvolutive(f64),
    #[error("J is not orthogonal for the pairing (residual {0:.3e})")]
    NotOrthogonal(f64),
    #[error("matrix is not antisymmetric (residual {0:.3e})")]
    NotAntisymmetric(f64),
    #[error("two-form is degenerate (smallest singular value {0:.3e})")]
    Degenerate(f64),
    #[error(
        "eigenbundle check failed: dim {dim}, isotropy {isotropy:.3e}, dim(L cap conj L) {overlap}"
    )]
    BadEigenbundle {
        dim: usize,
        isotropy: f64,
        overlap: usize,
    },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GcsResiduals {
    pub square: f64,
    pub orthogonality: f64,
}

/// Generalized complex structure on `V` (`dim V = m`) as a real `2m x 2m`
/// matrix on `V + V*` (vector coordinates first).
#[derive(Clone, Debug, PartialEq)]
pub struct LinearGC {
    m: usize,
    j: RMat,
}

pub(crate) fn check_square(a: &RMat, n: usize) -> Result<(), GcsError> {
    if a.nrows() != n || a.ncols() != n {
        return Err(GcsError::Shape {
            expected: n,
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    Ok(())
}

fn check_antisymmetric(a: &RMat) -> Result<(), GcsError> {
    let r = max_abs(&(a + a.transpose()));
    if r > VALIDITY_TOL * (1.0 + max_abs(a)) {
        return Err(GcsError::NotAntisymmetric(r));
    }
    Ok(())
}

/// `e^B = [[I, 0], [B, I]]` for a map `B: V -> V*`.
pub fn exp_b(b: &RMat) -> RMat {
    let m = b.nrows();
    let mut e = RMat::identity(2 * m, 2 * m);
    e.view_mut((m, 0), (m, m)).copy_from(b);
    e
}

impl LinearGC {
    pub fn new(j: RMat) -> Result<Self, GcsError> {
        Self::new_with_tol(j, VALIDITY_TOL)
    }

    pub fn new_with_tol(j: RMat, tol: f64) -> Result<Self, GcsError> {
        if j.nrows() % 2 != 0 {
            return Err(GcsError::Shape {
                expected: j.nrows() + 1,
                rows: j.nrows(),
                cols: j.ncols(),
            });
        }
        check_square(&j, j.nrows())?;
        let out = LinearGC {
            m: j.nrows() / 2,
            j,
        };
        let r = out.residuals();
        if r.square > tol {
            return Err(GcsError::NotInvolutive(r.square));
        }
        if r.orthogonality > tol {
            return Err(GcsError::NotOrthogonal(r.orthogonality));
        }
        Ok(out)
    }

    /// `[[0, -W^{-1}], [W, 0]]` for a nondegenerate 2-form given as the map
    /// `W: V -> V*` (column `a` is `i_{e_a} w`). The eigenbundle is `{X - i i_X w}`.
    pub fn from_symplectic(w: &RMat) -> Result<Self, GcsError> {
        let m = w.nrows();
        check_square(w, m)?;
        check_antisymmetric(w)?;
        let smin = min_singular_value(w)?;
        if smin < 1e-12 * (1.0 + max_abs(w)) {
            return Err(GcsError::Degenerate(smin));
        }
        let winv = w.clone().try_inverse().ok_or(GcsError::Degenerate(smin))?;
        let mut j = RMat::zeros(2 * m, 2 * m);
        j.view_mut((0, m), (m, m)).copy_from(&(-winv));
        j.view_mut((m, 0), (m, m)).copy_from(w);
        Self::new(j)
    }

    /// `diag(-J, J^T)`; eigenbundle `T_{0,1} + T*_{1,0}`.
    pub fn from_complex(jc: &RMat) -> Result<Self, GcsError> {
        let m = jc.nrows();
        check_square(jc, m)?;
        let r = max_abs(&(jc * jc + RMat::identity(m, m)));
        if r > VALIDITY_TOL * (1.0 + max_abs(jc)).powi(2) {
            return Err(GcsError::NotInvolutive(r));
        }
        let mut j = RMat::zeros(2 * m, 2 * m);
        j.view_mut((0, 0), (m, m)).copy_from(&(-jc));
        j.view_mut((m, m), (m, m)).copy_from(&jc.transpose());
        Self::new(j)
    }

    /// Structure on `V_a + V_b`, coordinates ordered `(V_a, V_b, V_a*, V_b*)`.
    pub fn product(a: &LinearGC, b: &LinearGC) -> LinearGC {
        let (ma, mb) = (a.m, b.m);
        let m = ma + mb;
        // positions of a's and b's coordinates in the product
        let pos_a: Vec<usize> = (0..ma).chain((0..ma).map(|i| m + i)).collect();
        let pos_b: Vec<usize> = (0..mb)
            .map(|i| ma + i)
            .chain((0..mb).map(|i| m + ma + i))
            .collect();
        let mut j = RMat::zeros(2 * m, 2 * m);
        for (r, &pr) in pos_a.iter().enumerate() {
            for (c, &pc) in pos_a.iter().enumerate() {
                j[(pr, pc)] = a.j[(r, c)];
            }
        }
        for (r, &pr) in pos_b.iter().enumerate() {
            for (c, &pc) in pos_b.iter().enumerate() {
                j[(pr, pc)] = b.j[(r, c)];
            }
        }
        LinearGC { m, j }
    }

    /// `e^B J e^{-B}`.
    pub fn b_transform(&self, b: &RMat) -> Result<Self, GcsError> {
        check_square(b, self.m)?;
        check_antisymmetric(b)?;
        let j = exp_b(b) * &self.j * exp_b(&(-b));
        let tol = VALIDITY_TOL * (1.0 + max_abs(b)).powi(2);
        Self::new_with_tol(j, tol)
    }

    /// Conjugation by `diag(A, A^{-T})`, induced by a change of basis of `V`.
    pub fn change_basis(&self, a: &RMat) -> Result<Self, GcsError> {
        check_square(a, self.m)?;
        let ainv = a
            .clone()
            .try_inverse()
            .ok_or_else(|| GcsError::Precondition("singular basis change".into()))?;
        let d = block_diag(a, &ainv.transpose());
        let dinv = block_diag(&ainv, &a.transpose());
        let tol = VALIDITY_TOL * (max_abs(a) * max_abs(&ainv)).max(1.0).powi(2);
        Self::new_with_tol(d * &self.j * dinv, tol)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn matrix(&self) -> &RMat {
        &self.j
    }

    pub fn residuals(&self) -> GcsResiduals {
        let n = 2 * self.m;
        let eta = pairing_matrix(self.m);
        GcsResiduals {
            square: max_abs(&(&self.j * &self.j + RMat::identity(n, n))),
            orthogonality: max_abs(&(self.j.transpose() * &eta * &self.j - eta)),
        }
    }

    /// The `+i` eigenspace `range(I - iJ)`, with its defining checks.
    pub fn eigenbundle(&self) -> Result<ComplexSubspace, GcsError> {
        let n = 2 * self.m;
        let p = CMat::identity(n, n) - to_complex(&self.j) * Complex64::new(0.0, 1.0);
        let l = ComplexSubspace::from_columns(&p, RANK_TOL)?;
        let eta = pairing_matrix(self.m);
        let iso = l.isotropy_residual(&eta);
        let overlap = l.intersect(&l.conj())?.dim();
        if l.dim() != self.m || iso > 1e-9 || overlap != 0 {
            return Err(GcsError::BadEigenbundle {
                dim: l.dim(),
                isotropy: iso,
                overlap,
            });
        }
        Ok(l)
    }

    /// `pi(L)` together with its rank decision.
    pub fn tangent_projection(&self) -> Result<ComplexSubspace, GcsError> {
        Ok(self.eigenbundle()?.project_rows(0, self.m)?)
    }

    /// Codimension of `pi(L)` in `V_C`; errors when the rank cut is borderline.
    pub fn type_of(&self) -> Result<usize, GcsError> {
        let pl = self.tangent_projection()?;
        let info = pl.rank_info();
        if info.indeterminate {
            return Err(LinalgError::RankIndeterminate {
                ratio: info.smallest_kept.min(info.largest_dropped.max(1e-300)),
                tol: RANK_TOL,
            }
            .into());
        }
        Ok(self.m - pl.dim())
    }

    /// Type plus the rank diagnostics behind it.
    pub fn type_with_info(&self) -> Result<(usize, RankInfo), GcsError> {
        let pl = self.tangent_projection()?;
        Ok((self.m - pl.dim(), pl.rank_info()))
    }
}

pub(crate) fn block_diag(a: &RMat, b: &RMat) -> RMat {
    let mut d = RMat::zeros(a.nrows() + b.nrows(), a.ncols() + b.ncols());
    d.view_mut((0, 0), (a.nrows(), a.ncols())).copy_from(a);
    d.view_mut((a.nrows(), a.ncols()), (b.nrows(), b.ncols()))
        .copy_from(b);
    d
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PretypeReport {
    /// `dim pi(L cap R^perp cap J(R)^perp)`
    pub lhs: usize,
    /// `dim pi(L + R) - dim R`
    pub rhs: usize,
}

/// Both sides of the pretype identity for a subspace `R` with `J(R) cap R = 0`.
pub fn pretype_dim(j: &LinearGC, r: &ComplexSubspace) -> Result<PretypeReport, GcsError> {
    let m = j.m();
    if r.ambient_dim() != 2 * m {
        return Err(LinalgError::DimensionMismatch {
            expected: 2 * m,
            got: r.ambient_dim(),
        }
        .into());
    }
    let jr = r.map_real(j.matrix())?;
    let overlap = jr.intersect(r)?;
    if overlap.dim() != 0 {
        return Err(GcsError::Precondition(format!(
            "J(R) cap R has dimension {}",
            overlap.dim()
        )));
    }
    let eta = pairing_matrix(m);
    let l = j.eigenbundle()?;
    let lhs_space = l
        .intersect(&r.pairing_perp(&eta)?)?
        .intersect(&jr.pairing_perp(&eta)?)?;
    let lhs = lhs_space.project_rows(0, m)?.dim();
    let rhs = l.sum(r)?.project_rows(0, m)?.dim() - r.dim();
    Ok(PretypeReport { lhs, rhs })
}

/// Reduction of a single structure by `Q` (columns of a real `m x k` matrix).
#[derive(Clone, Debug)]
pub struct ReducedGc {
    pub j: LinearGC,
    /// Basis of `V + V*` representing `V~ + V~*` (pairing-standard).
    pub representatives: RMat,
    /// Basis of `P = Q + J(Q)`.
    pub p_basis: RMat,
    pub isotropy_residual: f64,
    pub invariance_residual: f64,
}

/// Data shared by both reduction routines: the split `P = Q + D` and a
/// pairing-standard basis of a complement of `P` in `P^perp`.
pub(crate) struct SplitReduction {
    pub p_basis: RMat,
    pub phi: RMat,
    pub isotropy_residual: f64,
}

pub(crate) fn split_reduction(j1: &LinearGC, q: &RMat) -> Result<SplitReduction, GcsError> {
    let m = j1.m();
    if q.nrows() != m {
        return Err(LinalgError::DimensionMismatch {
            expected: m,
            got: q.nrows(),
        }
        .into());
    }
    let (qr, qinfo) = orth_real(q, RANK_TOL, 0.0)?;
    let k = qr.ncols();
    if qinfo.indeterminate {
        return Err(GcsError::Precondition("Q has borderline rank".into()));
    }
    let mut q_full = RMat::zeros(2 * m, k);
    q_full.view_mut((0, 0), (m, k)).copy_from(&qr);
    let jq = j1.matrix() * &q_full;
    let v_part = max_abs(&jq.rows(0, m).into_owned());
    if v_part > 1e-9 {
        return Err(GcsError::Precondition(format!(
            "J(Q) is not contained in V* (residual {v_part:.3e})"
        )));
    }
    let d = jq.rows(m, m).into_owned();
    let mut p_basis = RMat::zeros(2 * m, 2 * k);
    p_basis.view_mut((0, 0), (2 * m, k)).copy_from(&q_full);
    p_basis.view_mut((m, k), (m, k)).copy_from(&d);
    let eta = pairing_matrix(m);
    let iso = max_abs(&(p_basis.transpose() * &eta * &p_basis));
    if iso > 1e-9 {
        return Err(GcsError::Precondition(format!(
            "P = Q + J(Q) is not isotropic (residual {iso:.3e})"
        )));
    }
    // ker D inside V, then the Euclidean complement of Q inside it
    let (ker_d, dinfo) = null_space_real(&d.transpose(), RANK_TOL)?;
    if dinfo.rank != k {
        return Err(GcsError::Precondition(format!(
            "J(Q) has dimension {} instead of {k}",
            dinfo.rank
        )));
    }
    let proj = &ker_d - &qr * (qr.transpose() * &ker_d);
    let (u, _) = orth_real(&proj, 1e-8, 1.0)?;
    if u.ncols() != m - 2 * k {
        return Err(GcsError::Precondition(format!(
            "quotient has dimension {} instead of {}",
            u.ncols(),
            m - 2 * k
        )));
    }
    let mt = m - 2 * k;
    let mut phi = RMat::zeros(2 * m, 2 * mt);
    phi.view_mut((0, 0), (m, mt)).copy_from(&u);
    phi.view_mut((m, mt), (m, mt)).copy_from(&u);
    Ok(SplitReduction {
        p_basis,
        phi,
        isotropy_residual: iso,
    })
}

/// Coefficients of `J * reps` on the quotient basis, ignoring `P` components.
pub(crate) fn induced_matrix(
    j: &RMat,
    reps: &RMat,
    phi: &RMat,
    p_basis: &RMat,
) -> Result<(RMat, f64), GcsError> {
    let nq = phi.ncols();
    let np = p_basis.ncols();
    let mut frame = RMat::zeros(phi.nrows(), nq + np);
    frame.view_mut((0, 0), (phi.nrows(), nq)).copy_from(phi);
    frame
        .view_mut((0, nq), (phi.nrows(), np))
        .copy_from(p_basis);
    let target = j * reps;
    let svd = checked_svd(&frame)?;
    let coeff = svd.solve(&target, 1e-12);
    let resid = max_abs(&(&frame * &coeff - &target));
    Ok((coeff.rows(0, nq).into_owned(), resid))
}

/// Reduce by `Q` with `J(Q) inside V*` and `P = Q + J(Q)` isotropic.
pub fn reduce_gcs(j: &LinearGC, q: &RMat) -> Result<ReducedGc, GcsError> {
    let s = split_reduction(j, q)?;
    let (jt, resid) = induced_matrix(j.matrix(), &s.phi, &s.phi, &s.p_basis)?;
    if resid > 1e-8 {
        return Err(GcsError::Precondition(format!(
            "J does not preserve P^perp (residual {resid:.3e})"
        )));
    }
    let jt = LinearGC::new_with_tol(jt, 1e-9)?;
    Ok(ReducedGc {
        j: jt,
        representatives: s.phi,
        p_basis: s.p_basis,
        isotropy_residual: s.isotropy_residual,
        invariance_residual: resid,
    })
}
