use crate::error::{Error, Result};
use crate::idempotent::{Idempotent, Projection};
use crate::linalg::{self, ComplexMatrix};

/// Unitary tolerance for [`BlockForm::u`].
pub const UNITARY_TOL: f64 = 1e-9;

/// Recomposition tolerance, relative to `1 + ||Q||_F`.
pub const RECOMPOSE_TOL: f64 = 1e-8;

/// `Q = U* [[I_r, A], [0, 0]] U` with `U` unitary and `A` of shape `r x (n - r)`.
///
/// In this basis `P_{R(Q)} = U* diag(I_r, 0) U`.
#[derive(Clone, Debug)]
pub struct BlockForm {
    pub u: ComplexMatrix,
    pub a: ComplexMatrix,
    pub r: usize,
}

impl BlockForm {
    pub fn new(u: ComplexMatrix, a: ComplexMatrix, r: usize) -> Result<Self> {
        let n = u.rows();
        if !u.is_square() || a.rows() != r || a.cols() + r != n {
            return Err(Error::DimensionMismatch {
                op: "BlockForm::new",
                detail: format!(
                    "U is {}x{}, A is {}x{}, r = {r}",
                    u.rows(),
                    u.cols(),
                    a.rows(),
                    a.cols()
                ),
            });
        }
        let unitary_residual = (&u.adjoint() * &u).distance(&ComplexMatrix::identity(n));
        if unitary_residual > UNITARY_TOL {
            return Err(Error::InvalidParameter(format!(
                "U is not unitary: ||U*U - I||_F = {unitary_residual:e}"
            )));
        }
        Ok(BlockForm { u, a, r })
    }

    pub fn dim(&self) -> usize {
        self.u.rows()
    }

    /// `[[I_r, A], [0, 0]]` in the rotated basis.
    pub fn inner_matrix(&self) -> ComplexMatrix {
        let n = self.dim();
        let mut m = ComplexMatrix::zeros(n, n);
        m.set_block(0, 0, &ComplexMatrix::identity(self.r));
        m.set_block(0, self.r, &self.a);
        m
    }

    /// Conjugates an operator from the rotated basis back: `U* M U`.
    pub fn unrotate(&self, inner: &ComplexMatrix) -> ComplexMatrix {
        &(&self.u.adjoint() * inner) * &self.u
    }

    /// `U* [[I_r, A], [0, 0]] U` without re-validation.
    pub fn compose_matrix(&self) -> ComplexMatrix {
        self.unrotate(&self.inner_matrix())
    }

    /// Same basis, off-diagonal block scaled by `t`.
    pub fn with_scaled_a(&self, t: f64) -> BlockForm {
        BlockForm {
            u: self.u.clone(),
            a: self.a.scale(t),
            r: self.r,
        }
    }

    /// `U* diag(I_r, 0) U`.
    pub fn range_projection_matrix(&self) -> ComplexMatrix {
        let mut d = vec![0.0; self.dim()];
        d[..self.r].iter_mut().for_each(|x| *x = 1.0);
        self.unrotate(&ComplexMatrix::from_real_diagonal(&d))
    }
}

/// Block decomposition of `Q`; `U` comes from the left singular vectors of `Q`.
pub fn block_decompose(q: &Idempotent) -> Result<BlockForm> {
    let n = q.dim();
    let r = q.rank();
    if r == 0 || r == n {
        return Ok(BlockForm {
            u: ComplexMatrix::identity(n),
            a: ComplexMatrix::zeros(r, n - r),
            r,
        });
    }
    let u = q.svd().u.adjoint();
    let rotated = &(&u * q.matrix()) * &u.adjoint();
    let scale = 1.0 + q.matrix().frobenius_norm();
    let lower = rotated.block(r, 0, n - r, n).frobenius_norm();
    if lower > RECOMPOSE_TOL * scale {
        return Err(Error::Numeric(format!(
            "block decomposition: lower block rows have norm {lower:e}"
        )));
    }
    let bf = BlockForm {
        a: rotated.block(0, r, r, n - r),
        u,
        r,
    };
    let residual = bf.compose_matrix().distance(q.matrix());
    if residual > RECOMPOSE_TOL * scale {
        return Err(Error::Numeric(format!(
            "block decomposition: recomposition residual {residual:e}"
        )));
    }
    Ok(bf)
}

/// Inverse of [`block_decompose`].
pub fn block_compose(bf: &BlockForm) -> Result<Idempotent> {
    let n = bf.dim();
    if bf.a.rows() != bf.r || bf.a.cols() + bf.r != n {
        return Err(Error::DimensionMismatch {
            op: "block_compose",
            detail: format!("A is {}x{} for r = {} and n = {n}", bf.a.rows(), bf.a.cols(), bf.r),
        });
    }
    Idempotent::new(bf.compose_matrix())
}

/// Parameters of an arbitrary projection relative to a fixed block basis:
///
/// ```text
/// P = U* [[C,            D U0*              ],
///         [U0 D,          U0 (I - C) U0* + Q0]] U,   D = C^{1/2} (I - C)^{1/2}
/// ```
#[derive(Clone, Debug)]
pub struct ProjectionParams {
    /// Positive contraction, `r x r`.
    pub c: ComplexMatrix,
    /// Partial isometry, `(n - r) x r`, with `R(U0*) = R(C - C^2)`.
    pub u0: ComplexMatrix,
    /// Projection, `(n - r) x (n - r)`, with `U0* Q0 = 0`.
    pub q0: ComplexMatrix,
}

const CONTRACTION_TOL: f64 = 1e-9;
const ISOMETRY_TOL: f64 = 1e-8;
const ORTHOGONALITY_TOL: f64 = 1e-9;

impl ProjectionParams {
    pub fn new(c: ComplexMatrix, u0: ComplexMatrix, q0: ComplexMatrix) -> Result<Self> {
        let r = c.rows();
        if !c.is_square() || !q0.is_square() || u0.rows() != q0.rows() || u0.cols() != r {
            return Err(Error::DimensionMismatch {
                op: "ProjectionParams::new",
                detail: format!(
                    "C is {}x{}, U0 is {}x{}, Q0 is {}x{}",
                    c.rows(),
                    c.cols(),
                    u0.rows(),
                    u0.cols(),
                    q0.rows(),
                    q0.cols()
                ),
            });
        }
        let herm = c.distance(&c.adjoint());
        if herm > CONTRACTION_TOL * (1.0 + c.frobenius_norm()) {
            return Err(Error::InvalidParameter(format!(
                "C is not Hermitian: ||C - C*||_F = {herm:e}"
            )));
        }
        let (cvals, cvecs) = linalg::hermitian_eigen(&c)?;
        if let Some(bad) = cvals
            .iter()
            .find(|&&x| x < -CONTRACTION_TOL || x > 1.0 + CONTRACTION_TOL)
        {
            return Err(Error::InvalidParameter(format!(
                "C is not a positive contraction: eigenvalue {bad}"
            )));
        }
        // projection onto R(C - C^2)
        let support = linalg::spectral_apply(&cvecs, &cvals, |x| {
            if x * (1.0 - x) > CONTRACTION_TOL {
                1.0
            } else {
                0.0
            }
        });
        let gram = &u0.adjoint() * &u0;
        let gap = gram.distance(&support);
        if gap > ISOMETRY_TOL {
            return Err(Error::InvalidParameter(format!(
                "U0*U0 is not the projection onto R(C - C^2): gap {gap:e}"
            )));
        }
        if let Err(e) = super::validate_projection(&q0) {
            return Err(Error::InvalidParameter(format!("Q0 is not a projection: {e}")));
        }
        let cross = (&u0.adjoint() * &q0).frobenius_norm();
        if cross > ORTHOGONALITY_TOL {
            return Err(Error::InvalidParameter(format!(
                "U0* Q0 != 0: ||U0* Q0||_F = {cross:e}"
            )));
        }
        Ok(ProjectionParams { c, u0, q0 })
    }

    pub fn rank_split(&self) -> (usize, usize) {
        (self.c.rows(), self.q0.rows())
    }
}

/// Assembles the projection described by `params` in the basis `u`.
pub fn projection_from_params(u: &ComplexMatrix, params: &ProjectionParams) -> Result<Projection> {
    let (r, m) = params.rank_split();
    let n = r + m;
    if u.rows() != n || !u.is_square() {
        return Err(Error::DimensionMismatch {
            op: "projection_from_params",
            detail: format!("U is {}x{} but the parameters describe n = {n}", u.rows(), u.cols()),
        });
    }
    let unitary_residual = (&u.adjoint() * u).distance(&ComplexMatrix::identity(n));
    if unitary_residual > UNITARY_TOL {
        return Err(Error::InvalidParameter(format!(
            "U is not unitary: ||U*U - I||_F = {unitary_residual:e}"
        )));
    }
    let (cvals, cvecs) = linalg::hermitian_eigen(&params.c)?;
    let d = linalg::spectral_apply(&cvecs, &cvals, |x| {
        let x = x.clamp(0.0, 1.0);
        (x * (1.0 - x)).sqrt()
    });
    let u0 = &params.u0;
    let one_minus_c = &ComplexMatrix::identity(r) - &params.c;

    let mut inner = ComplexMatrix::zeros(n, n);
    inner.set_block(0, 0, &params.c);
    inner.set_block(0, r, &(&d * &u0.adjoint()));
    inner.set_block(r, 0, &(u0 * &d));
    inner.set_block(r, r, &(&(&(u0 * &one_minus_c) * &u0.adjoint()) + &params.q0));
    let p = &(&u.adjoint() * &inner) * u;
    Projection::from_nearly_hermitian(&p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::idempotent::range_projection;

    #[test]
    fn decompose_q_a() {
        let q = Idempotent::new(ComplexMatrix::from_real_rows(&[&[1.0, 2.5], &[0.0, 0.0]])).unwrap();
        let bf = block_decompose(&q).unwrap();
        assert_eq!(bf.r, 1);
        // U may differ from I by a phase; A is determined up to that phase
        assert!((bf.a.get(0, 0).norm() - 2.5).abs() < 1e-13);
        assert!(bf.compose_matrix().distance(q.matrix()) < 1e-13);
    }

    #[test]
    fn projections_have_zero_off_block() {
        let p = ComplexMatrix::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]]);
        let bf = block_decompose(&Idempotent::new(p).unwrap()).unwrap();
        assert!(bf.a.frobenius_norm() <= 1e-8);
    }

    #[test]
    fn trivial_ranks() {
        let q = Idempotent::new(ComplexMatrix::identity(3)).unwrap();
        let bf = block_decompose(&q).unwrap();
        assert_eq!((bf.a.rows(), bf.a.cols()), (3, 0));
        assert!(block_compose(&bf).unwrap().matrix().distance(&ComplexMatrix::identity(3)) < 1e-15);
        let z = Idempotent::new(ComplexMatrix::zeros(2, 2)).unwrap();
        assert_eq!(block_decompose(&z).unwrap().r, 0);
    }

    #[test]
    fn compose_example() {
        let bf = BlockForm::new(
            ComplexMatrix::identity(2),
            ComplexMatrix::from_real_rows(&[&[1.0]]),
            1,
        )
        .unwrap();
        let q = block_compose(&bf).unwrap();
        let expected = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 0.0]]);
        assert!(q.matrix().distance(&expected) < 1e-15);
        assert!(bf.range_projection_matrix().distance(range_projection(&q).matrix()) < 1e-14);
    }

    #[test]
    fn params_examples() {
        let u = ComplexMatrix::identity(3);
        let r = 2;
        let p = projection_from_params(
            &u,
            &ProjectionParams::new(
                ComplexMatrix::identity(r),
                ComplexMatrix::zeros(1, r),
                ComplexMatrix::zeros(1, 1),
            )
            .unwrap(),
        )
        .unwrap();
        assert!(p.matrix().distance(&ComplexMatrix::from_real_diagonal(&[1.0, 1.0, 0.0])) < 1e-15);

        let p = projection_from_params(
            &u,
            &ProjectionParams::new(
                ComplexMatrix::identity(r),
                ComplexMatrix::zeros(1, r),
                ComplexMatrix::identity(1),
            )
            .unwrap(),
        )
        .unwrap();
        assert!(p.matrix().distance(&ComplexMatrix::identity(3)) < 1e-15);

        let p = projection_from_params(
            &ComplexMatrix::identity(2),
            &ProjectionParams::new(
                ComplexMatrix::from_real_diagonal(&[0.5]),
                ComplexMatrix::from_real_rows(&[&[1.0]]),
                ComplexMatrix::zeros(1, 1),
            )
            .unwrap(),
        )
        .unwrap();
        let expected = ComplexMatrix::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]]);
        assert!(p.matrix().distance(&expected) < 1e-15);
    }

    #[test]
    fn params_reject_violations() {
        let err = ProjectionParams::new(
            ComplexMatrix::from_real_diagonal(&[1.5]),
            ComplexMatrix::zeros(1, 1),
            ComplexMatrix::zeros(1, 1),
        )
        .unwrap_err();
        assert!(err.to_string().contains("positive contraction"), "{err}");

        // C = 1/2 forces U0*U0 = 1
        let err = ProjectionParams::new(
            ComplexMatrix::from_real_diagonal(&[0.5]),
            ComplexMatrix::zeros(1, 1),
            ComplexMatrix::zeros(1, 1),
        )
        .unwrap_err();
        assert!(err.to_string().contains("U0*U0"), "{err}");

        let err = ProjectionParams::new(
            ComplexMatrix::from_real_diagonal(&[0.5]),
            ComplexMatrix::from_real_rows(&[&[1.0]]),
            ComplexMatrix::identity(1),
        )
        .unwrap_err();
        assert!(err.to_string().contains("U0* Q0"), "{err}");
    }
}
