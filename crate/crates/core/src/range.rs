//! Projections at any prescribed Frobenius distance from an idempotent `Q`.
//!
//! The attainable distances form the interval `[min_Q, max_Q]`, split at
//! `lambda1 = ||P_R(Q) - Q||_F` and `lambda2 = sqrt(lambda1^2 + n)`:
//!
//! * `J1 = [min_Q, lambda1]`: `t -> m(Q_tau(t))` with `Q_tau = U* [[I, tau A], [0, 0]] U`;
//! * `J2 = [lambda1, lambda2]`: explicit rotation paths `P_t^(i)` in the basis `U`;
//! * `J3 = [lambda2, max_Q]`: the J1 construction for `Q' = I - Q*`.
//!
//! On J1 and J3, `tau(t) = tan(t atan s) / s` with `s = ||A||_2`: `m(Q_tau)`
//! moves on the scale `tau ~ 1 / s`, and this spreads that motion over `[0, 1]`.
//! The rotation basis is rephased so that `Re tr A[:, :r] = 0`, which makes
//! the J2 distances `sqrt(lambda1^2 + i + 2r sin^2(pi t / 2))` exactly.
//!
//! J1 and J3 are solved by bisection; on J2 the right path index is chosen
//! from the closed-form endpoint distances and then bisected as well.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::idempotent::{block_compose, block_decompose, range_projection, BlockForm, Idempotent, Projection};
use crate::linalg::{self, ComplexMatrix};
use crate::matched::{matched_distance, matched_projection, matched_projection_block};

pub const DEFAULT_TOL: f64 = 1e-8;
pub const MAX_BISECTIONS: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Segment {
    J1,
    J2,
    J3,
}

impl Segment {
    pub fn as_str(&self) -> &'static str {
        match self {
            Segment::J1 => "J1",
            Segment::J2 => "J2",
            Segment::J3 => "J3",
        }
    }
}

impl fmt::Display for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug)]
pub struct PathPoint {
    pub segment: Segment,
    /// Rotation path index; only meaningful on J2.
    pub path_index: Option<usize>,
    pub t: f64,
    pub projection: Projection,
    pub achieved_distance: f64,
}

/// `Q_t = U* [[I_r, tA], [0, 0]] U`.
pub fn idempotent_path(bf: &BlockForm, t: f64) -> Result<Idempotent> {
    check_t(t)?;
    block_compose(&bf.with_scaled_a(t))
}

fn check_t(t: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidParameter(format!("path parameter t = {t} not in [0, 1]")));
    }
    Ok(())
}

/// `U* P_t^(i) U` with `P_t^(i) = [[c^2 I, sc I], [sc I, s^2 I]] (+) diag(I_i, 0)`,
/// `c = cos(pi t / 2)`, `s = sin(pi t / 2)`, in the block basis of `bf`.
fn rotation_projection(bf: &BlockForm, i: usize, t: f64) -> Result<Projection> {
    let n = bf.dim();
    let r = bf.r;
    if 2 * r > n {
        return Err(Error::InvalidParameter(format!(
            "rotation path needs rank <= n - rank, got rank {r} in dimension {n}"
        )));
    }
    if i > n - 2 * r {
        return Err(Error::InvalidParameter(format!(
            "path index {i} exceeds n - 2r = {}",
            n - 2 * r
        )));
    }
    check_t(t)?;
    let theta = std::f64::consts::FRAC_PI_2 * t;
    let (s, c) = theta.sin_cos();
    let mut inner = ComplexMatrix::zeros(n, n);
    let z = |x: f64| ComplexMatrix::identity(r).scale(x);
    inner.set_block(0, 0, &z(c * c));
    inner.set_block(0, r, &z(s * c));
    inner.set_block(r, 0, &z(s * c));
    inner.set_block(r, r, &z(s * s));
    inner.set_block(2 * r, 2 * r, &ComplexMatrix::identity(i));
    let p = bf.unrotate(&inner);
    Projection::from_nearly_hermitian(&p).map_err(|e| Error::Numeric(format!("rotation path: {e}")))
}

/// `tan(t atan s) / s`, a reparametrization of `[0, 1]` fixing both ends.
fn stretch(t: f64, speed: f64) -> f64 {
    if speed <= 1e-12 {
        return t;
    }
    ((t * speed.atan()).tan() / speed).clamp(0.0, 1.0)
}

/// Same `Q`, basis rows of the range part multiplied by a phase `w` (and `A`
/// by `w`) chosen so that `tr A[:, :r]` is purely imaginary.
fn balanced_rotation_basis(bf: &BlockForm) -> BlockForm {
    let r = bf.r;
    let tr: Complex64 = (0..r.min(bf.a.cols())).map(|k| bf.a.get(k, k)).sum();
    if tr.norm() == 0.0 {
        return bf.clone();
    }
    let w = Complex64::i() * tr.conj() / tr.norm();
    let n = bf.dim();
    BlockForm {
        u: ComplexMatrix::from_fn(n, n, |i, j| if i < r { w * bf.u.get(i, j) } else { bf.u.get(i, j) }),
        a: ComplexMatrix::from_fn(r, bf.a.cols(), |i, j| w * bf.a.get(i, j)),
        r,
    }
}

/// J2 rotation path for `q`, which must satisfy `rank <= n - rank`.
pub fn j2_path(q: &Idempotent, i: usize, t: f64) -> Result<Projection> {
    rotation_projection(&balanced_rotation_basis(&block_decompose(q)?), i, t)
}

/// `(min_Q, max_Q)`.
pub fn distance_range(q: &Idempotent) -> Result<(f64, f64)> {
    let min = matched_distance(q)?;
    let max = matched_projection(q)?.complement().distance_to(q.matrix());
    Ok((min, max))
}

/// The three distance paths of one idempotent, with their junction values.
pub struct SegmentPaths {
    q: Idempotent,
    block: BlockForm,
    dual_block: BlockForm,
    /// `||A||_2`, shared by `Q` and `I - Q*`.
    speed: f64,
    /// Block form the rotation paths live in: `Q` itself, or `I - Q*` when `2r > n`.
    rotation_block: BlockForm,
    dualized: bool,
    pub min: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub max: f64,
}

impl SegmentPaths {
    pub fn new(q: &Idempotent) -> Result<Self> {
        if q.is_zero() || q.is_identity() {
            return Err(Error::InvalidParameter(
                "distance paths need Q != 0 and Q != I".into(),
            ));
        }
        let n = q.dim();
        let block = block_decompose(q)?;
        let dual = q.dual()?;
        let dual_block = block_decompose(&dual)?;
        let dualized = 2 * q.rank() > n;
        let rotation_block = balanced_rotation_basis(if dualized { &dual_block } else { &block });
        let speed = linalg::spectral_norm(&block.a)?;
        let (min, max) = distance_range(q)?;
        let lambda1 = range_projection(q).distance_to(q.matrix());
        let lambda2 = (lambda1 * lambda1 + n as f64).sqrt();
        Ok(SegmentPaths {
            q: q.clone(),
            block,
            dual_block,
            speed,
            rotation_block,
            dualized,
            min,
            lambda1,
            lambda2,
            max,
        })
    }

    pub fn dualized(&self) -> bool {
        self.dualized
    }

    /// Largest valid J2 path index, `n - 2 min(r, n - r)`.
    pub fn max_path_index(&self) -> usize {
        self.rotation_block.dim() - 2 * self.rotation_block.r
    }

    /// Closed-form J2 endpoint distances `(f_i(0), f_i(1)) = (sqrt(l1^2 + i), sqrt(l1^2 + 2r' + i))`.
    pub fn j2_endpoints(&self, i: usize) -> (f64, f64) {
        let l1 = self.lambda1 * self.lambda1;
        let r = self.rotation_block.r as f64;
        ((l1 + i as f64).sqrt(), (l1 + 2.0 * r + i as f64).sqrt())
    }

    /// The J2 path whose endpoint interval contains `alpha`.
    pub fn j2_index_for(&self, alpha: f64) -> usize {
        let excess = alpha * alpha - self.lambda1 * self.lambda1;
        (excess.floor().max(0.0) as usize).min(self.max_path_index())
    }

    pub fn projection_at(&self, segment: Segment, path_index: usize, t: f64) -> Result<Projection> {
        match segment {
            Segment::J1 => matched_projection_block(&self.block.with_scaled_a(stretch(t, self.speed))),
            Segment::J3 => matched_projection_block(&self.dual_block.with_scaled_a(stretch(t, self.speed))),
            Segment::J2 => {
                let p = rotation_projection(&self.rotation_block, path_index, t)?;
                Ok(if self.dualized { p.complement() } else { p })
            }
        }
    }

    pub fn point(&self, segment: Segment, path_index: usize, t: f64) -> Result<PathPoint> {
        check_t(t)?;
        let projection = self.projection_at(segment, path_index, t)?;
        let achieved_distance = projection.distance_to(self.q.matrix());
        Ok(PathPoint {
            segment,
            path_index: (segment == Segment::J2).then_some(path_index),
            t,
            projection,
            achieved_distance,
        })
    }

    /// Bisection for `distance(t) = alpha` along one path, keeping a
    /// sign-changing bracket that starts at the endpoints.
    pub fn solve(&self, segment: Segment, path_index: usize, alpha: f64, tol: f64) -> Result<PathPoint> {
        let mut lo = self.point(segment, path_index, 0.0)?;
        if (lo.achieved_distance - alpha).abs() <= tol {
            return Ok(lo);
        }
        let mut hi = self.point(segment, path_index, 1.0)?;
        if (hi.achieved_distance - alpha).abs() <= tol {
            return Ok(hi);
        }
        let g_lo = lo.achieved_distance - alpha;
        if g_lo.signum() == (hi.achieved_distance - alpha).signum() {
            return Err(Error::Numeric(format!(
                "{segment} path {path_index}: alpha = {alpha} not bracketed by endpoint distances {} and {}",
                lo.achieved_distance, hi.achieved_distance
            )));
        }
        for _ in 0..MAX_BISECTIONS {
            let mid = self.point(segment, path_index, 0.5 * (lo.t + hi.t))?;
            let g = mid.achieved_distance - alpha;
            if g.abs() <= tol {
                return Ok(mid);
            }
            if g.signum() == g_lo.signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Err(Error::Numeric(format!(
            "{segment} bisection did not reach tol {tol:e} in {MAX_BISECTIONS} steps; last bracket t in [{}, {}]",
            lo.t, hi.t
        )))
    }

    /// Segment and path index used for a target distance already inside `[min, max]`.
    pub fn locate(&self, alpha: f64) -> (Segment, usize) {
        if alpha <= self.lambda1 {
            (Segment::J1, 0)
        } else if alpha <= self.lambda2 {
            (Segment::J2, self.j2_index_for(alpha))
        } else {
            (Segment::J3, 0)
        }
    }
}

/// A projection `P` with `| ||P - Q||_F - alpha | <= tol`.
pub fn construct_at_distance(q: &Idempotent, alpha: f64, tol: f64) -> Result<PathPoint> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidParameter(format!("tol must be positive, got {tol}")));
    }
    if !alpha.is_finite() {
        return Err(Error::InvalidParameter(format!("alpha must be finite, got {alpha}")));
    }
    let paths = SegmentPaths::new(q)?;
    if alpha < paths.min - tol || alpha > paths.max + tol {
        return Err(Error::OutOfRange {
            alpha,
            min: paths.min,
            max: paths.max,
        });
    }
    let alpha = alpha.clamp(paths.min, paths.max);
    let (segment, i) = paths.locate(alpha);
    paths.solve(segment, i, alpha, tol)
}
