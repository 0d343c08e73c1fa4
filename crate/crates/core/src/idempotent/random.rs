//! Seeded random generators for idempotents, projections and projection
//! parameters. Everything draws from a caller-supplied RNG, so a fixed seed
//! gives a fixed sample stream.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::idempotent::{block::BlockForm, block_compose, Idempotent, Projection, ProjectionParams};
use crate::linalg::{self, ComplexMatrix};

const COVERING_RETRIES: usize = 10;

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Complex Gaussian entries with `E|z|^2 = std^2`.
pub fn random_complex_gaussian<R: Rng + ?Sized>(
    rows: usize,
    cols: usize,
    std: f64,
    rng: &mut R,
) -> ComplexMatrix {
    let s = std / std::f64::consts::SQRT_2;
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(s * re, s * im)
    })
}

/// Haar-distributed unitary: QR of a Gaussian matrix with the phases of
/// `diag(R)` folded back into `Q`.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    if n == 0 {
        return ComplexMatrix::zeros(0, 0);
    }
    let g = random_complex_gaussian(n, n, 1.0, rng).into_dmatrix();
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    ComplexMatrix::from_dmatrix(q).expect("finite unitary")
}

/// `U* [[I_r, A], [0, 0]] U` with Haar `U` and Gaussian `A` of entry std `scale`.
pub fn random_idempotent<R: Rng + ?Sized>(
    n: usize,
    r: usize,
    scale: f64,
    rng: &mut R,
) -> Result<Idempotent> {
    if r > n || n == 0 {
        return Err(Error::InvalidParameter(format!("rank {r} invalid for dimension {n}")));
    }
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::InvalidParameter(format!("scale must be positive, got {scale}")));
    }
    let u = random_unitary(n, rng);
    let a = random_complex_gaussian(r, n - r, scale, rng);
    block_compose(&BlockForm { u, a, r })
}

/// `V V*` for `V` the first `r` columns of a Haar unitary.
pub fn random_projection<R: Rng + ?Sized>(n: usize, r: usize, rng: &mut R) -> Result<Projection> {
    if r > n {
        return Err(Error::InvalidParameter(format!("rank {r} exceeds dimension {n}")));
    }
    if r == 0 {
        return Ok(Projection::zero(n));
    }
    let v = random_unitary(n, rng).block(0, 0, n, r);
    Ok(Projection {
        p: (&v * &v.adjoint()).hermitian_part(),
        rank: r,
    })
}

/// Random projection `P` with `P Q = Q` and `rank(P) = rank(Q) + extra_rank`:
/// the range projection of `[basis of R(Q) | Gaussian columns]`.
pub fn random_covering_projection<R: Rng + ?Sized>(
    q: &Idempotent,
    extra_rank: usize,
    rng: &mut R,
) -> Result<Projection> {
    let n = q.dim();
    let k = q.rank() + extra_rank;
    if k > n {
        return Err(Error::InvalidParameter(format!(
            "rank(Q) + extra_rank = {k} exceeds dimension {n}"
        )));
    }
    if k == 0 {
        return Ok(Projection::zero(n));
    }
    for _ in 0..COVERING_RETRIES {
        let cols = q.range_basis().hstack(&random_complex_gaussian(n, extra_rank, 1.0, rng));
        let dec = linalg::svd(&cols)?;
        if dec.singular_values[k - 1] > 1e-8 * dec.sigma_max() {
            return Ok(Projection {
                p: dec.left_range_projection(k).hermitian_part(),
                rank: k,
            });
        }
    }
    Err(Error::Numeric(format!(
        "covering projection of rank {k} was rank deficient in {COVERING_RETRIES} draws"
    )))
}

/// Random basis `U` and valid [`ProjectionParams`] for an `n x n` projection
/// relative to a rank-`r` block split.
///
/// `C` gets `s <= min(r, n - r)` eigenvalues strictly inside `(0, 1)` and the
/// rest in `{0, 1}`; `U0 = Z E*` maps the corresponding eigenvectors `E`
/// isometrically onto random orthonormal columns `Z`, and `Q0` projects onto a
/// random subspace of the orthogonal complement of `R(Z)`.
pub fn random_projection_params<R: Rng + ?Sized>(
    n: usize,
    r: usize,
    rng: &mut R,
) -> Result<(ComplexMatrix, ProjectionParams)> {
    if r > n {
        return Err(Error::InvalidParameter(format!("rank {r} exceeds dimension {n}")));
    }
    let m = n - r;
    let s = rng.random_range(0..=r.min(m));
    let mut cvals = Vec::with_capacity(r);
    for i in 0..r {
        if i < s {
            cvals.push(rng.random_range(0.02..0.98));
        } else {
            cvals.push(if rng.random_bool(0.5) { 1.0 } else { 0.0 });
        }
    }
    let w = random_unitary(r, rng);
    let c = linalg::spectral_apply(&w, &cvals, |x| x).hermitian_part();
    let e = w.block(0, 0, r, s);

    let y = random_unitary(m, rng);
    let z = y.block(0, 0, m, s);
    let u0 = &z * &e.adjoint();

    let free = m - s;
    let q0_rank = if free == 0 { 0 } else { rng.random_range(0..=free) };
    let q0 = if q0_rank == 0 {
        ComplexMatrix::zeros(m, m)
    } else {
        let zc = y.block(0, s, m, free);
        let rot = random_unitary(free, rng).block(0, 0, free, q0_rank);
        let basis = &zc * &rot;
        (&basis * &basis.adjoint()).hermitian_part()
    };
    let u = random_unitary(n, rng);
    let params = ProjectionParams::new(c, u0, q0)?;
    Ok((u, params))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::idempotent::{projection_from_params, validate_idempotent, IDEMPOTENT_TOL};

    #[test]
    fn trivial_ranks() {
        let mut rng = seeded_rng(1);
        let z = random_idempotent(4, 0, 1.0, &mut rng).unwrap();
        assert_eq!(z.matrix().max_abs(), 0.0);
        let i = random_idempotent(4, 4, 1.0, &mut rng).unwrap();
        assert!(i.matrix().distance(&ComplexMatrix::identity(4)) < 1e-13);
        assert_eq!(random_projection(3, 0, &mut rng).unwrap().matrix().max_abs(), 0.0);
    }

    #[test]
    fn seeded_idempotent_validates() {
        let q = random_idempotent(5, 2, 1.0, &mut seeded_rng(7)).unwrap();
        let again = validate_idempotent(q.matrix(), IDEMPOTENT_TOL).unwrap();
        assert_eq!(again.rank(), 2);
        let q2 = random_idempotent(5, 2, 1.0, &mut seeded_rng(7)).unwrap();
        assert_eq!(q.matrix(), q2.matrix());
    }

    #[test]
    fn unitary_is_unitary() {
        let u = random_unitary(6, &mut seeded_rng(3));
        assert!((&u.adjoint() * &u).distance(&ComplexMatrix::identity(6)) < 1e-13);
    }

    #[test]
    fn covering_examples() {
        let mut rng = seeded_rng(3);
        let q = random_idempotent(5, 2, 1.0, &mut rng).unwrap();
        let p0 = random_covering_projection(&q, 0, &mut rng).unwrap();
        let rq = crate::idempotent::range_projection(&q);
        assert!(p0.matrix().distance(rq.matrix()) < 1e-12);

        let p = random_covering_projection(&q, 2, &mut rng).unwrap();
        assert_eq!(p.rank(), 4);
        assert!((p.matrix() * q.matrix()).distance(q.matrix()) < 1e-8);
        assert_eq!(crate::idempotent::validate_projection(p.matrix()).unwrap().rank(), 4);

        assert!(matches!(
            random_covering_projection(&q, 4, &mut rng),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn params_generate_projections() {
        let mut rng = seeded_rng(11);
        for n in 1..=6 {
            for r in 0..=n {
                let (u, params) = random_projection_params(n, r, &mut rng).unwrap();
                projection_from_params(&u, &params).unwrap();
            }
        }
    }
}
