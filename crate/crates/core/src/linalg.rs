//! Dense complex linear algebra kernels.
//!
//! [`ComplexMatrix`] is a thin validated wrapper over a column-major
//! `nalgebra::DMatrix<Complex64>`. The decompositions (SVD, Hermitian
//! eigendecomposition) are delegated to faer; everything built on top of
//! them (pseudo-inverse with a rank cutoff, PSD square roots, `|Q*|`) lives
//! here.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use faer::{Mat, Side};
use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative Hermiticity tolerance accepted by [`sqrtm_psd`].
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Floor below which an eigenvalue of a supposedly PSD matrix is an error.
pub const NEGATIVE_EIGEN_TOL: f64 = 1e-10;

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<Complex64>);

impl ComplexMatrix {
    /// Builds a matrix from row-major entries, rejecting NaN/Inf.
    pub fn from_row_major(rows: usize, cols: usize, entries: &[Complex64]) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::EntryCount {
                rows,
                cols,
                expected: rows * cols,
                actual: entries.len(),
            });
        }
        Self::from_dmatrix(DMatrix::from_row_slice(rows, cols, entries))
    }

    /// Wraps an nalgebra matrix after checking every entry is finite.
    pub fn from_dmatrix(m: DMatrix<Complex64>) -> Result<Self> {
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                let z = m[(i, j)];
                if !(z.re.is_finite() && z.im.is_finite()) {
                    return Err(Error::NonFinite { row: i, col: j });
                }
            }
        }
        Ok(Self(m))
    }

    /// Real matrix from a slice of rows. Panics on ragged input; intended for
    /// literals in tests and fixed families.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        Self(DMatrix::from_fn(r, c, |i, j| {
            assert_eq!(rows[i].len(), c, "ragged row {i}");
            Complex64::new(rows[i][j], 0.0)
        }))
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        Self(DMatrix::from_fn(rows, cols, f))
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    /// Square diagonal matrix with real diagonal.
    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(diag[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.0[(i, j)]
    }

    pub fn as_dmatrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_dmatrix(self) -> DMatrix<Complex64> {
        self.0
    }

    /// Entries in row-major order.
    pub fn row_major(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                out.push(self.0[(i, j)]);
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.map(|z| z * s))
    }

    /// `(M + M*) / 2`.
    pub fn hermitian_part(&self) -> Self {
        Self((&self.0 + self.0.adjoint()).map(|z| z * 0.5))
    }

    /// Copy of the `nr x nc` block whose top-left corner is `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Self {
        Self(self.0.view((r0, c0), (nr, nc)).into_owned())
    }

    /// Overwrites the block starting at `(r0, c0)` with `src`.
    pub fn set_block(&mut self, r0: usize, c0: usize, src: &ComplexMatrix) {
        self.0
            .view_mut((r0, c0), (src.rows(), src.cols()))
            .copy_from(&src.0);
    }

    /// Diagonal entries (of the leading square part).
    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.rows().min(self.cols()))
            .map(|i| self.0[(i, i)])
            .collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        frobenius_norm(self)
    }

    /// `||self - other||_F`.
    pub fn distance(&self, other: &ComplexMatrix) -> f64 {
        debug_assert_eq!((self.rows(), self.cols()), (other.rows(), other.cols()));
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `M^k` by repeated multiplication; `M^0 = I`.
    pub fn pow(&self, k: usize) -> Self {
        let mut acc = Self::identity(self.rows());
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &ComplexMatrix) -> Self {
        assert_eq!(self.rows(), other.rows());
        let mut out = Self::zeros(self.rows(), self.cols() + other.cols());
        out.set_block(0, 0, self);
        out.set_block(0, self.cols(), other);
        out
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexMatrix({}x{}) [", self.rows(), self.cols())?;
        for i in 0..self.rows() {
            write!(f, "\n  ")?;
            for j in 0..self.cols() {
                let z = self.0[(i, j)];
                write!(f, "{:>10.6}{:+.6}i ", z.re, z.im)?;
            }
        }
        write!(f, "\n]")
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl<'a> $trait<&'a ComplexMatrix> for &'a ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
                ComplexMatrix($trait::$method(&self.0, &rhs.0))
            }
        }
        impl $trait<ComplexMatrix> for ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: ComplexMatrix) -> ComplexMatrix {
                ComplexMatrix($trait::$method(self.0, rhs.0))
            }
        }
        impl<'a> $trait<&'a ComplexMatrix> for ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
                ComplexMatrix($trait::$method(self.0, &rhs.0))
            }
        }
        impl<'a> $trait<ComplexMatrix> for &'a ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: ComplexMatrix) -> ComplexMatrix {
                ComplexMatrix($trait::$method(&self.0, rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Neg for ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix(-self.0)
    }
}

impl Mul<Complex64> for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: Complex64) -> ComplexMatrix {
        ComplexMatrix(&self.0 * rhs)
    }
}

/// Full singular value decomposition `M = U diag(s) V*`.
#[derive(Clone, Debug)]
pub struct SvdResult {
    /// Unitary, `rows x rows`.
    pub u: ComplexMatrix,
    /// Descending, non-negative, length `min(rows, cols)`.
    pub singular_values: Vec<f64>,
    /// Unitary, `cols x cols`.
    pub v: ComplexMatrix,
}

impl SvdResult {
    pub fn sigma_max(&self) -> f64 {
        self.singular_values.first().copied().unwrap_or(0.0)
    }

    /// Number of singular values strictly above `rel_tol * sigma_max`.
    pub fn rank_above(&self, rel_tol: f64) -> usize {
        let cutoff = rel_tol * self.sigma_max();
        self.singular_values.iter().filter(|&&s| s > cutoff).count()
    }

    /// `U diag(s) V*` with the stored factors.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let (m, n) = (self.u.rows(), self.v.rows());
        let mut s = ComplexMatrix::zeros(m, n);
        for (i, &sv) in self.singular_values.iter().enumerate() {
            s.0[(i, i)] = Complex64::new(sv, 0.0);
        }
        &(&self.u * &s) * &self.v.adjoint()
    }

    /// Pseudo-inverse keeping only the leading `rank` singular triplets.
    pub fn truncated_pinv(&self, rank: usize) -> ComplexMatrix {
        let (m, n) = (self.u.rows(), self.v.rows());
        let mut acc = DMatrix::<Complex64>::zeros(n, m);
        for k in 0..rank.min(self.singular_values.len()) {
            let inv = 1.0 / self.singular_values[k];
            let vk = self.v.0.column(k);
            let uk = self.u.0.column(k);
            acc += (vk * uk.adjoint()) * Complex64::new(inv, 0.0);
        }
        ComplexMatrix(acc)
    }

    /// Orthogonal projection onto the span of the leading `rank` left singular vectors.
    pub fn left_range_projection(&self, rank: usize) -> ComplexMatrix {
        let ur = self.u.block(0, 0, self.u.rows(), rank);
        &ur * &ur.adjoint()
    }
}

/// Columns spanning the orthogonal complement of the orthonormal columns of `basis`.
fn to_faer(m: &DMatrix<Complex64>) -> Mat<Complex64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn from_faer(m: faer::MatRef<'_, Complex64>) -> DMatrix<Complex64> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Full SVD with descending singular values and square unitary factors.
pub fn svd(m: &ComplexMatrix) -> Result<SvdResult> {
    let (rows, cols) = (m.rows(), m.cols());
    if rows == 0 || cols == 0 {
        return Ok(SvdResult {
            u: ComplexMatrix::identity(rows),
            singular_values: Vec::new(),
            v: ComplexMatrix::identity(cols),
        });
    }
    let dec = to_faer(&m.0)
        .svd()
        .map_err(|e| Error::Numeric(format!("SVD of a {rows}x{cols} matrix failed: {e:?}")))?;
    let s = dec.S().column_vector();
    let singular_values = (0..s.nrows()).map(|i| s[i].re).collect();
    Ok(SvdResult {
        u: ComplexMatrix(from_faer(dec.U())),
        singular_values,
        v: ComplexMatrix(from_faer(dec.V())),
    })
}

/// Default relative rank cutoff `max(rows, cols) * eps`.
pub fn default_rank_tol(m: &ComplexMatrix) -> f64 {
    m.rows().max(m.cols()) as f64 * f64::EPSILON
}

/// Moore-Penrose inverse; singular values `<= rank_tol * sigma_max` count as zero.
pub fn pinv(m: &ComplexMatrix, rank_tol: f64) -> Result<ComplexMatrix> {
    if rank_tol < 0.0 || !rank_tol.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "rank_tol must be finite and non-negative, got {rank_tol}"
        )));
    }
    let dec = svd(m)?;
    let rank = dec.rank_above(rank_tol);
    Ok(dec.truncated_pinv(rank))
}

/// [`pinv`] with the default cutoff.
pub fn pinv_default(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    pinv(m, default_rank_tol(m))
}

/// Numerical rank under the default cutoff.
pub fn numerical_rank(m: &ComplexMatrix) -> Result<usize> {
    Ok(svd(m)?.rank_above(default_rank_tol(m)))
}

fn hermitian_eigen_raw(h: &DMatrix<Complex64>) -> Result<(Vec<f64>, DMatrix<Complex64>)> {
    let n = h.nrows();
    if n == 0 {
        return Ok((Vec::new(), DMatrix::zeros(0, 0)));
    }
    let sym = (h + h.adjoint()).map(|z| z * 0.5);
    let eig = to_faer(&sym).self_adjoint_eigen(Side::Lower).map_err(|e| {
        Error::Numeric(format!("Hermitian eigendecomposition of a {n}x{n} matrix failed: {e:?}"))
    })?;
    let s = eig.S().column_vector();
    let vals = (0..n).map(|i| s[i].re).collect();
    Ok((vals, from_faer(eig.U())))
}

/// Eigendecomposition of the Hermitian part of `h`: ascending eigenvalues and
/// the unitary whose columns are the matching eigenvectors.
pub fn hermitian_eigen(h: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    if !h.is_square() {
        return Err(Error::NotSquare {
            op: "hermitian_eigen",
            rows: h.rows(),
            cols: h.cols(),
        });
    }
    let (vals, vecs) = hermitian_eigen_raw(&h.0)?;
    Ok((vals, ComplexMatrix(vecs)))
}

/// `V diag(f(lambda)) V*` for orthonormal eigenvector columns `V`.
pub fn spectral_apply(vecs: &ComplexMatrix, vals: &[f64], f: impl Fn(f64) -> f64) -> ComplexMatrix {
    let n = vecs.rows();
    let mut scaled = vecs.0.clone();
    for (j, &lam) in vals.iter().enumerate() {
        let fj = f(lam);
        for i in 0..n {
            scaled[(i, j)] *= fj;
        }
    }
    ComplexMatrix(scaled * vecs.0.adjoint())
}

fn check_hermitian(h: &ComplexMatrix) -> Result<f64> {
    if !h.is_square() {
        return Err(Error::NotSquare {
            op: "sqrtm_psd",
            rows: h.rows(),
            cols: h.cols(),
        });
    }
    let norm = h.frobenius_norm();
    let residual = h.distance(&h.adjoint());
    if residual > HERMITIAN_TOL * (1.0 + norm) {
        return Err(Error::NotHermitian { residual });
    }
    Ok(norm)
}

/// Principal square root of a Hermitian positive semidefinite matrix.
///
/// Eigenvalues in `[-1e-10 (1 + ||h||_F), 0)` are treated as roundoff and
/// clipped to zero; anything more negative is rejected.
pub fn sqrtm_psd(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    let norm = check_hermitian(h)?;
    let (vals, vecs) = hermitian_eigen(h)?;
    if let Some(&lowest) = vals.first() {
        if lowest < -NEGATIVE_EIGEN_TOL * (1.0 + norm) {
            return Err(Error::NegativeEigenvalue { value: lowest });
        }
    }
    Ok(spectral_apply(&vecs, &vals, |x| x.max(0.0).sqrt()).hermitian_part())
}

/// `|Q*| = (Q Q*)^{1/2}`, evaluated from the SVD of `q` as `U diag(s) U*`.
pub fn abs_conjugate(q: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !q.is_square() {
        return Err(Error::NotSquare {
            op: "abs_conjugate",
            rows: q.rows(),
            cols: q.cols(),
        });
    }
    let dec = svd(q)?;
    Ok(spectral_apply(&dec.u, &dec.singular_values, |s| s).hermitian_part())
}

pub fn frobenius_norm(m: &ComplexMatrix) -> f64 {
    m.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest singular value.
pub fn spectral_norm(m: &ComplexMatrix) -> Result<f64> {
    Ok(svd(m)?.sigma_max())
}

pub fn trace(m: &ComplexMatrix) -> Result<Complex64> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            op: "trace",
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    Ok(m.0.trace())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn q1() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 0.0]])
    }

    #[test]
    fn rejects_non_finite_and_bad_counts() {
        let err = ComplexMatrix::from_row_major(1, 2, &[c(1.0), c(f64::NAN)]).unwrap_err();
        assert_eq!(err, Error::NonFinite { row: 0, col: 1 });
        assert!(matches!(
            ComplexMatrix::from_row_major(2, 2, &[c(1.0)]),
            Err(Error::EntryCount { expected: 4, actual: 1, .. })
        ));
    }

    #[test]
    fn svd_examples() {
        let s = svd(&ComplexMatrix::identity(2)).unwrap();
        assert!((s.singular_values[0] - 1.0).abs() < 1e-15);
        assert!((s.singular_values[1] - 1.0).abs() < 1e-15);

        let s = svd(&q1()).unwrap();
        assert!((s.singular_values[0] - 2f64.sqrt()).abs() < 1e-14);
        assert!(s.singular_values[1].abs() < 1e-14);
        assert!(s.reconstruct().distance(&q1()) < 1e-14);

        let s = svd(&ComplexMatrix::zeros(3, 3)).unwrap();
        assert_eq!(s.singular_values, vec![0.0; 3]);
    }

    #[test]
    fn svd_rectangular_factors_are_square_unitaries() {
        let m = ComplexMatrix::from_fn(5, 2, |i, j| Complex64::new(i as f64 - j as f64, 0.5 * j as f64));
        let s = svd(&m).unwrap();
        assert_eq!((s.u.rows(), s.u.cols()), (5, 5));
        assert_eq!((s.v.rows(), s.v.cols()), (2, 2));
        assert!((&s.u.adjoint() * &s.u).distance(&ComplexMatrix::identity(5)) < 1e-12);
        assert!(s.reconstruct().distance(&m) < 1e-12);
    }

    #[test]
    fn pinv_examples() {
        let id = ComplexMatrix::identity(3);
        assert!(pinv_default(&id).unwrap().distance(&id) < 1e-15);

        let expected = ComplexMatrix::from_real_rows(&[&[0.5, 0.0], &[0.5, 0.0]]);
        assert!(pinv_default(&q1()).unwrap().distance(&expected) < 1e-14);

        let z = ComplexMatrix::zeros(2, 3);
        let zp = pinv_default(&z).unwrap();
        assert_eq!((zp.rows(), zp.cols()), (3, 2));
        assert_eq!(zp.max_abs(), 0.0);

        assert!(matches!(pinv(&id, -1.0), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn sqrtm_examples() {
        let r = sqrtm_psd(&ComplexMatrix::from_real_diagonal(&[4.0, 9.0])).unwrap();
        assert!(r.distance(&ComplexMatrix::from_real_diagonal(&[2.0, 3.0])) < 1e-14);

        let r = sqrtm_psd(&ComplexMatrix::from_real_diagonal(&[2.0, 0.0])).unwrap();
        assert!(r.distance(&ComplexMatrix::from_real_diagonal(&[2f64.sqrt(), 0.0])) < 1e-14);

        let id = ComplexMatrix::identity(4);
        assert!(sqrtm_psd(&id).unwrap().distance(&id) < 1e-14);
    }

    #[test]
    fn sqrtm_rejects_indefinite_and_non_hermitian() {
        let err = sqrtm_psd(&ComplexMatrix::from_real_diagonal(&[1.0, -0.5])).unwrap_err();
        match err {
            Error::NegativeEigenvalue { value } => assert!((value + 0.5).abs() < 1e-14),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(sqrtm_psd(&q1()), Err(Error::NotHermitian { .. })));
        // roundoff-sized negative eigenvalue clips to zero
        let r = sqrtm_psd(&ComplexMatrix::from_real_diagonal(&[1.0, -1e-13])).unwrap();
        assert_eq!(r.get(1, 1).re, 0.0);
    }

    #[test]
    fn abs_conjugate_examples() {
        let p = ComplexMatrix::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]]);
        assert!(abs_conjugate(&p).unwrap().distance(&p) < 1e-14);

        let expected = ComplexMatrix::from_real_diagonal(&[2f64.sqrt(), 0.0]);
        assert!(abs_conjugate(&q1()).unwrap().distance(&expected) < 1e-14);
        // same operator as the PSD square root of Q Q*
        let via_sqrt = sqrtm_psd(&(&q1() * &q1().adjoint())).unwrap();
        assert!(via_sqrt.distance(&expected) < 1e-14);

        let z = ComplexMatrix::zeros(3, 3);
        assert_eq!(abs_conjugate(&z).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn norms_and_trace() {
        assert!((frobenius_norm(&ComplexMatrix::identity(3)) - 3f64.sqrt()).abs() < 1e-15);
        assert!((spectral_norm(&q1()).unwrap() - 2f64.sqrt()).abs() < 1e-14);
        let qa = ComplexMatrix::from_real_rows(&[&[1.0, 7.5], &[0.0, 0.0]]);
        assert_eq!(trace(&qa).unwrap(), c(1.0));
        assert!(matches!(
            trace(&ComplexMatrix::zeros(2, 3)),
            Err(Error::NotSquare { .. })
        ));
    }

    #[test]
    fn rank_cutoff() {
        assert_eq!(numerical_rank(&q1()).unwrap(), 1);
        assert_eq!(numerical_rank(&ComplexMatrix::zeros(2, 2)).unwrap(), 0);
        assert_eq!(numerical_rank(&ComplexMatrix::identity(4)).unwrap(), 4);
    }
}
