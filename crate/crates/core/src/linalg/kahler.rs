use nalgebra::SymmetricEigen;
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use super::gcs::{induced_matrix, split_reduction};
use super::{
    checked_svd, imag_part, max_abs, min_singular_value, numerical_rank, pairing_matrix, real_part,
    singular_values, to_complex, CMat, ComplexSubspace, GcsError, LinalgError, LinearGC, RMat,
    RANK_TOL, VALIDITY_TOL,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PairError {
    #[error("structures do not commute (residual {0:.3e})")]
    NotCommuting(f64),
    #[error("G = -J1 J2 fails G^2 = I or orthogonality (residuals {square:.3e}, {orth:.3e})")]
    MetricInvalid { square: f64, orth: f64 },
    #[error("metric is not positive definite (min eigenvalue {0:.3e})")]
    NotPositive(f64),
    #[error("deformation at scale t = {t} is not admissible: {reason}")]
    Deformation { t: f64, reason: String },
    #[error("C+ does not project isomorphically onto V (smallest singular value {0:.3e})")]
    SplitFailed(f64),
    #[error(transparent)]
    Gcs(#[from] GcsError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PairResiduals {
    pub commutator: f64,
    pub metric_square: f64,
    pub metric_orthogonality: f64,
    pub min_eigenvalue: f64,
    pub j1_square: f64,
    pub j2_square: f64,
    pub j1_orthogonality: f64,
    pub j2_orthogonality: f64,
}

impl PairResiduals {
    pub fn max_residual(&self) -> f64 {
        [
            self.commutator,
            self.metric_square,
            self.metric_orthogonality,
            self.j1_square,
            self.j2_square,
            self.j1_orthogonality,
            self.j2_orthogonality,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Commuting pair of generalized complex structures with positive `G = -J1 J2`.
#[derive(Clone, Debug, PartialEq)]
pub struct KahlerPairNum {
    j1: LinearGC,
    j2: LinearGC,
    g: RMat,
}

/// Smallest eigenvalue of the symmetrized form `w -> <G w, w>`.
pub fn metric_min_eigenvalue(g: &RMat) -> f64 {
    let m = g.nrows() / 2;
    let s = pairing_matrix(m) * g;
    let sym = (&s + s.transpose()) * 0.5;
    SymmetricEigen::new(sym).eigenvalues.min()
}

impl KahlerPairNum {
    pub fn new(j1: LinearGC, j2: LinearGC) -> Result<Self, PairError> {
        Self::new_with_tol(j1, j2, VALIDITY_TOL)
    }

    pub fn new_with_tol(j1: LinearGC, j2: LinearGC, tol: f64) -> Result<Self, PairError> {
        let g = -(j1.matrix() * j2.matrix());
        let pair = KahlerPairNum { j1, j2, g };
        let r = pair.residuals();
        if r.commutator > tol {
            return Err(PairError::NotCommuting(r.commutator));
        }
        if r.metric_square > tol || r.metric_orthogonality > tol {
            return Err(PairError::MetricInvalid {
                square: r.metric_square,
                orth: r.metric_orthogonality,
            });
        }
        if r.min_eigenvalue <= 1e-10 {
            return Err(PairError::NotPositive(r.min_eigenvalue));
        }
        Ok(pair)
    }

    pub fn j1(&self) -> &LinearGC {
        &self.j1
    }

    pub fn j2(&self) -> &LinearGC {
        &self.j2
    }

    pub fn metric(&self) -> &RMat {
        &self.g
    }

    pub fn m(&self) -> usize {
        self.j1.m()
    }

    pub fn residuals(&self) -> PairResiduals {
        let n = 2 * self.m();
        let (a, b) = (self.j1.matrix(), self.j2.matrix());
        let eta = pairing_matrix(self.m());
        let r1 = self.j1.residuals();
        let r2 = self.j2.residuals();
        PairResiduals {
            commutator: max_abs(&(a * b - b * a)),
            metric_square: max_abs(&(&self.g * &self.g - RMat::identity(n, n))),
            metric_orthogonality: max_abs(&(self.g.transpose() * &eta * &self.g - eta)),
            min_eigenvalue: metric_min_eigenvalue(&self.g),
            j1_square: r1.square,
            j2_square: r2.square,
            j1_orthogonality: r1.orthogonality,
            j2_orthogonality: r2.orthogonality,
        }
    }

    /// Apply `e^B` to both structures.
    pub fn b_transform(&self, b: &RMat) -> Result<Self, PairError> {
        let tol = VALIDITY_TOL * (1.0 + max_abs(b)).powi(2);
        KahlerPairNum::new_with_tol(self.j1.b_transform(b)?, self.j2.b_transform(b)?, tol)
    }

    /// Reduce by `Q` (real `m x k` basis in `V`) with `J1(Q) inside V*` and
    /// `P = Q + J1(Q)` isotropic. The quotient is modelled on
    /// `W^ = P^perp cap G(P)^perp`, which both structures preserve.
    pub fn reduce(&self, q: &RMat) -> Result<ReducedPair, PairError> {
        let s = split_reduction(&self.j1, q)?;
        let eta = pairing_matrix(self.m());
        let gp = &self.g * &s.p_basis;
        // w^ = phi + P c with <G w^, P> = 0
        let lhs = gp.transpose() * &eta * &s.p_basis;
        let rhs = -(gp.transpose() * &eta * &s.phi);
        let c = lhs
            .clone()
            .try_inverse()
            .ok_or_else(|| GcsError::Precondition("P cap G(P) is nonzero".into()))?
            * rhs;
        let reps = &s.phi + &s.p_basis * c;
        let (jt1, r1) = induced_matrix(self.j1.matrix(), &reps, &s.phi, &s.p_basis)?;
        let (jt2, r2) = induced_matrix(self.j2.matrix(), &reps, &s.phi, &s.p_basis)?;
        let invariance = r1.max(r2);
        if invariance > 1e-8 {
            return Err(GcsError::Precondition(format!(
                "W^ is not preserved (residual {invariance:.3e})"
            ))
            .into());
        }
        let jt1 = LinearGC::new_with_tol(jt1, 1e-9)?;
        let jt2 = LinearGC::new_with_tol(jt2, 1e-9)?;
        let pair = KahlerPairNum::new_with_tol(jt1, jt2, 1e-9)?;
        Ok(ReducedPair {
            pair,
            representatives: reps,
            p_basis: s.p_basis,
            isotropy_residual: s.isotropy_residual,
            invariance_residual: invariance,
        })
    }
}

#[derive(Clone, Debug)]
pub struct ReducedPair {
    pub pair: KahlerPairNum,
    /// Columns spanning `W^`, matched with the standard basis of `V~ + V~*`.
    pub representatives: RMat,
    pub p_basis: RMat,
    pub isotropy_residual: f64,
    pub invariance_residual: f64,
}

/// Replace `J2` by the structure whose eigenbundle is the graph
/// `{l + i_l(t eps) : l in L2}`. `eps` is the antisymmetric matrix `E`
/// with `i_W eps = 2 E^T eta w`.
pub fn deform_pointwise(
    pair: &KahlerPairNum,
    eps: &CMat,
    t: f64,
) -> Result<KahlerPairNum, PairError> {
    let m = pair.m();
    let n = 2 * m;
    if eps.nrows() != n || eps.ncols() != n {
        return Err(LinalgError::DimensionMismatch {
            expected: n,
            got: eps.nrows(),
        }
        .into());
    }
    let l = pair.j2().eigenbundle()?;
    let eta = to_complex(&pairing_matrix(m));
    let ell = l.basis().clone();
    let graph = &ell + (eps.transpose() * &eta * &ell) * Complex64::new(2.0 * t, 0.0);
    // A_eps: coordinates of [L_eps, conj L_eps] on [L, conj L]
    let s = hstack(&ell, &ell.map(|x| x.conj()));
    let big = hstack(&graph, &graph.map(|x| x.conj()));
    let a_eps = s
        .clone()
        .try_inverse()
        .ok_or_else(|| PairError::Deformation {
            t,
            reason: "undeformed frame singular".into(),
        })?
        * &big;
    let sv = singular_values(&a_eps)?;
    let ratio = sv[sv.len() - 1] / sv[0];
    if ratio < RANK_TOL {
        return Err(PairError::Deformation {
            t,
            reason: format!("A_eps is singular (singular value ratio {ratio:.3e})"),
        });
    }
    let mut d = CMat::zeros(n, n);
    for k in 0..m {
        d[(k, k)] = Complex64::new(0.0, 1.0);
        d[(m + k, m + k)] = Complex64::new(0.0, -1.0);
    }
    let inv = big
        .clone()
        .try_inverse()
        .ok_or_else(|| PairError::Deformation {
            t,
            reason: "L_eps meets its conjugate".into(),
        })?;
    let jc = &big * d * inv;
    let im = max_abs(&imag_part(&jc));
    if im > 1e-9 * (1.0 + max_abs(&real_part(&jc))) {
        return Err(PairError::Deformation {
            t,
            reason: format!("deformed structure is not real (residual {im:.3e})"),
        });
    }
    let j2 = LinearGC::new_with_tol(real_part(&jc), 1e-9).map_err(|e| PairError::Deformation {
        t,
        reason: e.to_string(),
    })?;
    KahlerPairNum::new_with_tol(pair.j1().clone(), j2, 1e-9).map_err(|e| PairError::Deformation {
        t,
        reason: e.to_string(),
    })
}

fn hstack(a: &CMat, b: &CMat) -> CMat {
    let mut out = CMat::zeros(a.nrows(), a.ncols() + b.ncols());
    out.columns_mut(0, a.ncols()).copy_from(a);
    out.columns_mut(a.ncols(), b.ncols()).copy_from(b);
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BiHermitianResiduals {
    pub metric_min_eigenvalue: f64,
    pub jplus_square: f64,
    pub jminus_square: f64,
    pub jplus_orthogonality: f64,
    pub jminus_orthogonality: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BiHermitianData {
    pub g: RMat,
    pub jplus: RMat,
    pub jminus: RMat,
    /// `J-` was negated to match the orientation of `J+`.
    pub jminus_negated: bool,
}

impl BiHermitianData {
    pub fn residuals(&self) -> BiHermitianResiduals {
        let m = self.g.nrows();
        let id = RMat::identity(m, m);
        BiHermitianResiduals {
            metric_min_eigenvalue: SymmetricEigen::new((&self.g + self.g.transpose()) * 0.5)
                .eigenvalues
                .min(),
            jplus_square: max_abs(&(&self.jplus * &self.jplus + &id)),
            jminus_square: max_abs(&(&self.jminus * &self.jminus + &id)),
            jplus_orthogonality: max_abs(
                &(self.jplus.transpose() * &self.g * &self.jplus - &self.g),
            ),
            jminus_orthogonality: max_abs(
                &(self.jminus.transpose() * &self.g * &self.jminus - &self.g),
            ),
        }
    }

    /// `J+ != J-` and `J+ != -J-` beyond `tol` (Frobenius norm).
    pub fn distinct(&self, tol: f64) -> bool {
        (&self.jplus - &self.jminus).norm() > tol && (&self.jplus + &self.jminus).norm() > tol
    }

    pub fn orientation_sign(&self, j: &RMat) -> f64 {
        pfaffian(&(&self.g * j)).signum()
    }
}

/// Pfaffian of an antisymmetric matrix by skew Gaussian elimination.
pub fn pfaffian(a: &RMat) -> f64 {
    let n = a.nrows();
    if n % 2 == 1 {
        return 0.0;
    }
    let mut a = (a - a.transpose()) * 0.5;
    let mut pf = 1.0;
    let mut k = 0;
    while k + 1 < n {
        let mut kp = k + 1;
        for j in k + 2..n {
            if a[(k, j)].abs() > a[(k, kp)].abs() {
                kp = j;
            }
        }
        if kp != k + 1 {
            a.swap_rows(k + 1, kp);
            a.swap_columns(k + 1, kp);
            pf = -pf;
        }
        let piv = a[(k, k + 1)];
        if piv == 0.0 {
            return 0.0;
        }
        pf *= piv;
        for i in k + 2..n {
            let tau_i = a[(k, i)] / piv;
            for j in k + 2..n {
                let tau_j = a[(k, j)] / piv;
                a[(i, j)] += a[(k + 1, i)] * tau_j - tau_i * a[(k + 1, j)];
            }
        }
        k += 2;
    }
    pf
}

/// Graph map `V -> C` of the eigenspace of `G` spanned by the columns of `G + sign I`.
fn eigen_graph(pair: &KahlerPairNum, sign: f64) -> Result<RMat, PairError> {
    let m = pair.m();
    let n = 2 * m;
    let cols = pair.metric() + RMat::identity(n, n) * sign;
    let svd = checked_svd(&cols)?;
    let info = numerical_rank(&svd.sv, RANK_TOL, 0.0);
    if info.rank != m {
        return Err(PairError::SplitFailed(info.smallest_kept));
    }
    let c = svd.u.columns(0, m).into_owned();
    let a = c.rows(0, m).into_owned();
    let smin = min_singular_value(&a)?;
    if smin < 1e-8 {
        return Err(PairError::SplitFailed(smin));
    }
    Ok(&c * a.try_inverse().ok_or(PairError::SplitFailed(smin))?)
}

/// Metric and the two complex structures induced on `V` through
/// `C+ = ker(G - I)` and `C- = ker(G + I)`.
/// Signs are fixed so that a genuine Kahler pair `(J_w, J_J)` returns `J`.
pub fn extract_bihermitian(pair: &KahlerPairNum) -> Result<BiHermitianData, PairError> {
    let m = pair.m();
    let tp = eigen_graph(pair, 1.0)?;
    let tm = eigen_graph(pair, -1.0)?;
    let eta = pairing_matrix(m);
    let g = tp.transpose() * eta * &tp;
    let g = (&g + g.transpose()) * 0.5;
    let jplus = -(pair.j1().matrix() * &tp).rows(0, m).into_owned();
    let mut jminus = -(pair.j2().matrix() * &tm).rows(0, m).into_owned();
    let op = pfaffian(&(&g * &jplus)).signum();
    let om = pfaffian(&(&g * &jminus)).signum();
    let negated = op != om;
    if negated {
        jminus = -jminus;
    }
    Ok(BiHermitianData {
        g,
        jplus,
        jminus,
        jminus_negated: negated,
    })
}

/// The `+1` eigenspace of `G` as a complex subspace (diagnostics).
#[allow(dead_code)]
pub(crate) fn c_plus(pair: &KahlerPairNum) -> Result<ComplexSubspace, PairError> {
    let n = 2 * pair.m();
    Ok(ComplexSubspace::from_real_columns(
        &(pair.metric() + RMat::identity(n, n)),
        RANK_TOL,
    )?)
}
