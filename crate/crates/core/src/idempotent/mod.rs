//! Validated idempotent and projection types.
//!
//! An [`Idempotent`] caches the SVD of its matrix: the rank, the range
//! projection, `|Q*|` and the pseudo-inverse are all read off that one
//! factorization.

mod block;
mod random;

pub use block::{block_compose, block_decompose, projection_from_params, BlockForm, ProjectionParams};
pub use random::{
    random_complex_gaussian, random_covering_projection, random_idempotent, random_projection,
    random_projection_params, random_unitary, seeded_rng,
};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, SvdResult};

/// Default relative idempotency tolerance: `||Q^2 - Q||_F <= tol (1 + ||Q||_F^2)`.
pub const IDEMPOTENT_TOL: f64 = 1e-8;

/// Admissible distance of `tr(Q)` from the integer rank.
pub const TRACE_RANK_TOL: f64 = 1e-6;

/// Gap test on the singular values of an idempotent: the `r` leading ones
/// must be at least `1 - SV_GAP_TOL`, the rest at most `SV_GAP_TOL (1 + ||Q||_F)`.
pub const SV_GAP_TOL: f64 = 1e-6;

pub const PROJECTION_HERMITIAN_TOL: f64 = 1e-9;
pub const PROJECTION_IDEMPOTENT_TOL: f64 = 1e-8;
pub const PROJECTION_EIGEN_TOL: f64 = 1e-7;

/// A square matrix `Q` with `Q^2 = Q`.
#[derive(Clone, Debug)]
pub struct Idempotent {
    q: ComplexMatrix,
    rank: usize,
    svd: SvdResult,
}

impl Idempotent {
    /// Validates with the default tolerance.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        validate_idempotent(&m, IDEMPOTENT_TOL)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.q
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.q
    }

    pub fn dim(&self) -> usize {
        self.q.rows()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn svd(&self) -> &SvdResult {
        &self.svd
    }

    /// The `rank` non-zero singular values (all `>= 1`).
    pub fn nonzero_singular_values(&self) -> &[f64] {
        &self.svd.singular_values[..self.rank]
    }

    /// `||Q^2 - Q||_F`.
    pub fn residual(&self) -> f64 {
        (&self.q * &self.q).distance(&self.q)
    }

    pub fn is_zero(&self) -> bool {
        self.rank == 0
    }

    pub fn is_identity(&self) -> bool {
        self.rank == self.dim()
    }

    /// Whether `Q` is Hermitian within `tol` in Frobenius norm.
    pub fn is_projection(&self, tol: f64) -> bool {
        self.q.distance(&self.q.adjoint()) <= tol
    }

    /// `Q*`, again idempotent.
    pub fn adjoint(&self) -> Result<Idempotent> {
        Idempotent::new(self.q.adjoint())
    }

    /// `I - Q`, again idempotent.
    pub fn complement(&self) -> Result<Idempotent> {
        Idempotent::new(&ComplexMatrix::identity(self.dim()) - &self.q)
    }

    /// `I - Q*`; its range is the null space of `Q*`.
    pub fn dual(&self) -> Result<Idempotent> {
        Idempotent::new(&ComplexMatrix::identity(self.dim()) - &self.q.adjoint())
    }

    /// Orthonormal basis of `R(Q)` as an `n x r` matrix.
    pub fn range_basis(&self) -> ComplexMatrix {
        self.svd.u.block(0, 0, self.dim(), self.rank)
    }

    /// Moore-Penrose inverse `Q^dagger`, truncated at the validated rank.
    pub fn pinv(&self) -> ComplexMatrix {
        self.svd.truncated_pinv(self.rank)
    }

    /// `|Q*| = U diag(s) U*` with the dust singular values set to zero.
    pub fn abs_conjugate(&self) -> ComplexMatrix {
        self.abs_conjugate_function(|s| s, 0.0)
    }

    /// `h(|Q*|)` built from the cached SVD, where `h` is applied to the
    /// singular values on `R(Q)` and `on_kernel` is used on the orthogonal complement.
    pub(crate) fn abs_conjugate_function(
        &self,
        on_range: impl Fn(f64) -> f64,
        on_kernel: f64,
    ) -> ComplexMatrix {
        let r = self.rank;
        let sig: Vec<f64> = (0..self.dim())
            .map(|i| {
                if i < r {
                    on_range(self.svd.singular_values[i])
                } else {
                    on_kernel
                }
            })
            .collect();
        linalg::spectral_apply(&self.svd.u, &sig, |x| x).hermitian_part()
    }
}

/// Checks `m` is idempotent (relative to `tol`) and determines its rank.
///
/// The rank is `round(Re tr Q)`; it must agree with the singular values,
/// which for an idempotent split into `r` values `>= 1` and `n - r` zeros.
pub fn validate_idempotent(m: &ComplexMatrix, tol: f64) -> Result<Idempotent> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            op: "validate_idempotent",
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let n = m.rows();
    let norm = m.frobenius_norm();
    let residual = (m * m).distance(m);
    if residual > tol * (1.0 + norm * norm) {
        return Err(Error::NotIdempotent { residual });
    }
    let tr = linalg::trace(m)?;
    let rank_f = tr.re.round();
    if (tr - Complex64::new(rank_f, 0.0)).norm() > TRACE_RANK_TOL || rank_f < 0.0 || rank_f > n as f64
    {
        return Err(Error::Numeric(format!(
            "trace {tr} of an idempotent is not an integer rank in [0, {n}]"
        )));
    }
    let rank = rank_f as usize;
    let svd = linalg::svd(m)?;
    let sv = &svd.singular_values;
    if rank > 0 && sv[rank - 1] < 1.0 - SV_GAP_TOL {
        return Err(Error::Numeric(format!(
            "singular value {} of a rank-{rank} idempotent is below 1",
            sv[rank - 1]
        )));
    }
    if rank < n && sv[rank] > SV_GAP_TOL * (1.0 + norm) {
        return Err(Error::Numeric(format!(
            "rank from trace is {rank} but singular value {} is not negligible",
            sv[rank]
        )));
    }
    Ok(Idempotent {
        q: m.clone(),
        rank,
        svd,
    })
}

/// A Hermitian idempotent `P = P* = P^2`.
#[derive(Clone, Debug)]
pub struct Projection {
    p: ComplexMatrix,
    rank: usize,
}

impl Projection {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        validate_projection(&m)
    }

    /// Re-symmetrizes `(M + M*) / 2` before validating.
    pub fn from_nearly_hermitian(m: &ComplexMatrix) -> Result<Self> {
        validate_projection(&m.hermitian_part())
    }

    pub fn zero(n: usize) -> Self {
        Projection {
            p: ComplexMatrix::zeros(n, n),
            rank: 0,
        }
    }

    pub fn identity(n: usize) -> Self {
        Projection {
            p: ComplexMatrix::identity(n),
            rank: n,
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.p
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.p.rows()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// `I - P`.
    pub fn complement(&self) -> Projection {
        Projection {
            p: &ComplexMatrix::identity(self.dim()) - &self.p,
            rank: self.dim() - self.rank,
        }
    }

    /// `||P - M||_F`.
    pub fn distance_to(&self, m: &ComplexMatrix) -> f64 {
        self.p.distance(m)
    }

    pub fn as_idempotent(&self) -> Result<Idempotent> {
        Idempotent::new(self.p.clone())
    }
}

pub fn validate_projection(m: &ComplexMatrix) -> Result<Projection> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            op: "validate_projection",
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let norm = m.frobenius_norm();
    let herm = m.distance(&m.adjoint());
    if herm > PROJECTION_HERMITIAN_TOL * (1.0 + norm) {
        return Err(Error::NotProjection {
            detail: format!("||P - P*||_F = {herm:e}"),
        });
    }
    let idem = (m * m).distance(m);
    if idem > PROJECTION_IDEMPOTENT_TOL {
        return Err(Error::NotProjection {
            detail: format!("||P^2 - P||_F = {idem:e}"),
        });
    }
    let (vals, _) = linalg::hermitian_eigen(m)?;
    let mut rank = 0;
    for &lam in &vals {
        let off = lam.abs().min((lam - 1.0).abs());
        if off > PROJECTION_EIGEN_TOL {
            return Err(Error::NotProjection {
                detail: format!("eigenvalue {lam} is not in {{0, 1}}"),
            });
        }
        if lam > 0.5 {
            rank += 1;
        }
    }
    Ok(Projection { p: m.clone(), rank })
}

/// `P_{R(Q)}`, the orthogonal projection onto the range of `Q` (`Q Q^dagger`).
pub fn range_projection(q: &Idempotent) -> Projection {
    Projection {
        p: q.svd.left_range_projection(q.rank).hermitian_part(),
        rank: q.rank,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qa(a: f64) -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[1.0, a], &[0.0, 0.0]])
    }

    #[test]
    fn validate_examples() {
        let q = validate_idempotent(&qa(1.0), IDEMPOTENT_TOL).unwrap();
        assert_eq!(q.rank(), 1);
        let q = validate_idempotent(&ComplexMatrix::identity(3), IDEMPOTENT_TOL).unwrap();
        assert_eq!(q.rank(), 3);
        let bad = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 0.5]]);
        match validate_idempotent(&bad, IDEMPOTENT_TOL) {
            Err(Error::NotIdempotent { residual }) => assert!((residual - 0.25).abs() < 1e-15),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            validate_idempotent(&ComplexMatrix::zeros(2, 3), IDEMPOTENT_TOL),
            Err(Error::NotSquare { .. })
        ));
    }

    #[test]
    fn range_projection_examples() {
        let p = ComplexMatrix::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]]);
        let rp = range_projection(&Idempotent::new(p.clone()).unwrap());
        assert!(rp.matrix().distance(&p) < 1e-14);

        let rp = range_projection(&Idempotent::new(qa(3.0)).unwrap());
        let expected = ComplexMatrix::from_real_diagonal(&[1.0, 0.0]);
        assert!(rp.matrix().distance(&expected) < 1e-14);
        // ||P_R(Q_a) - Q_a||_F = a
        assert!((rp.distance_to(&qa(3.0)) - 3.0).abs() < 1e-14);

        let rp = range_projection(&Idempotent::new(ComplexMatrix::zeros(3, 3)).unwrap());
        assert_eq!(rp.matrix().max_abs(), 0.0);
        assert_eq!(rp.rank(), 0);
    }

    #[test]
    fn range_projection_matches_q_times_pinv() {
        let q = Idempotent::new(qa(2.0)).unwrap();
        let via_pinv = q.matrix() * &linalg::pinv_default(q.matrix()).unwrap();
        assert!(range_projection(&q).matrix().distance(&via_pinv) < 1e-13);
    }

    #[test]
    fn projection_validation() {
        assert!(validate_projection(&qa(1.0)).is_err());
        let p = validate_projection(&ComplexMatrix::from_real_diagonal(&[1.0, 0.0, 1.0])).unwrap();
        assert_eq!(p.rank(), 2);
        assert_eq!(p.complement().rank(), 1);
        let half = ComplexMatrix::from_real_diagonal(&[0.5]);
        assert!(matches!(validate_projection(&half), Err(Error::NotProjection { .. })));
    }

    #[test]
    fn q_pinv_is_product_of_range_projections() {
        // Q^dagger = P_R(Q*) P_R(Q)
        let q = Idempotent::new(qa(0.7)).unwrap();
        let prq = range_projection(&q);
        let prqs = range_projection(&q.adjoint().unwrap());
        let prod = prqs.matrix() * prq.matrix();
        assert!(q.pinv().distance(&prod) < 1e-13);
    }
}
