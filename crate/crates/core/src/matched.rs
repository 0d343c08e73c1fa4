//! The matched projection `m(Q)` of an idempotent and the distance
//! quantities it controls.
//!
//! `m(Q)` is the unique projection closest to `Q` in Frobenius norm and
//! `I - m(Q)` the unique farthest one. Two independent routes compute it:
//!
//! * the closed form `1/2 (|Q*| + Q*) |Q*|^dagger (|Q*| + I)^{-1} (|Q*| + Q)`,
//!   evaluated on the spectral decomposition of `|Q*|`;
//! * the block form, starting from `Q = U* [[I, A], [0, 0]] U` and
//!   `B = (I + A A*)^{1/2}`.
//!
//! Both are registered as [`MatchedRoute`] strategies.

use crate::error::{Error, Result};
use crate::idempotent::{block_decompose, range_projection, BlockForm, Idempotent, Projection};
use crate::linalg::{self, ComplexMatrix};
use crate::registry::{Named, Registry};

/// Floor for the smallest eigenvalue of `B`, which is `>= 1` in exact arithmetic.
const B_FLOOR_TOL: f64 = 1e-8;

/// Residual allowed in `V V* = m(Q)` and `V* V = P_{R(Q)}`.
pub const FACTOR_TOL: f64 = 1e-7;

/// Tolerance on `lambda2 = sqrt(lambda1^2 + n)`.
pub const LAMBDA_TOL: f64 = 1e-8;

/// Tolerance on `min^2 + max^2 = tr(I - Q* - Q + 2 Q Q*)`.
pub const CONSTANT_SUM_TOL: f64 = 1e-7;

/// Everything [`analyze`] learns about one idempotent.
#[derive(Clone, Debug)]
pub struct MatchedResult {
    pub m_q: Projection,
    /// `||m(Q) - Q||_F`, the minimum over all projections.
    pub min_distance: f64,
    /// `||I - m(Q) - Q||_F`, the maximum over all projections.
    pub max_distance: f64,
    /// `||P_{R(Q)} - Q||_F`.
    pub lambda1: f64,
    /// `||I - P_{R(Q)} - Q||_F`.
    pub lambda2: f64,
    /// `Re tr(I - Q* - Q + 2 Q Q*)`, equal to `||P - Q||^2 + ||I - P - Q||^2` for every projection `P`.
    pub invariant_constant: f64,
}

fn as_numeric(context: &str) -> impl Fn(Error) -> Error + '_ {
    move |e| match e {
        Error::Numeric(_) => e,
        other => Error::Numeric(format!("{context}: {other}")),
    }
}

/// `m(Q)` from the closed form.
pub fn matched_projection(q: &Idempotent) -> Result<Projection> {
    let n = q.dim();
    if q.is_zero() {
        return Ok(Projection::zero(n));
    }
    if q.is_identity() {
        return Ok(Projection::identity(n));
    }
    let qm = q.matrix();
    let abs = q.abs_conjugate();
    let abs_pinv = q.abs_conjugate_function(|s| 1.0 / s, 0.0);
    let shifted_inv = q.abs_conjugate_function(|s| 1.0 / (s + 1.0), 1.0);
    let left = &abs + &qm.adjoint();
    let right = &abs + qm;
    let m = (&(&(&left * &abs_pinv) * &shifted_inv) * &right).scale(0.5);
    Projection::from_nearly_hermitian(&m).map_err(as_numeric("matched projection"))
}

/// `m(Q)` from a block decomposition of `Q`.
pub fn matched_projection_block(bf: &BlockForm) -> Result<Projection> {
    let n = bf.dim();
    let r = bf.r;
    if r == 0 {
        return Ok(Projection::zero(n));
    }
    if r == n {
        return Ok(Projection::identity(n));
    }
    let a = &bf.a;
    let gram = &ComplexMatrix::identity(r) + &(a * &a.adjoint());
    let (vals, vecs) = linalg::hermitian_eigen(&gram)?;
    let beta: Vec<f64> = vals.iter().map(|v| v.max(0.0).sqrt()).collect();
    if beta[0] < 1.0 - B_FLOOR_TOL {
        return Err(Error::Numeric(format!(
            "B = (I + AA*)^(1/2) has eigenvalue {} < 1",
            beta[0]
        )));
    }
    let b_inv = linalg::spectral_apply(&vecs, &beta, |b| 1.0 / b);
    let top_left = linalg::spectral_apply(&vecs, &beta, |b| (b + 1.0) / b);
    let middle = linalg::spectral_apply(&vecs, &beta, |b| 1.0 / (b * (b + 1.0)));

    let mut inner = ComplexMatrix::zeros(n, n);
    inner.set_block(0, 0, &top_left);
    inner.set_block(0, r, &(&b_inv * a));
    inner.set_block(r, 0, &(&a.adjoint() * &b_inv));
    inner.set_block(r, r, &(&(&a.adjoint() * &middle) * a));
    let m = bf.unrotate(&inner.scale(0.5));
    Projection::from_nearly_hermitian(&m).map_err(as_numeric("block matched projection"))
}

/// `min_Q = sqrt(tr(|Q*|^2 - |Q*|)) = sqrt(sum (s_i^2 - s_i))` over the non-zero singular values.
///
/// The non-trivial `s_i` are `sqrt(1 + a_i^2)` with `a_i` the singular values of
/// `P_R(Q) - Q`; writing each term as `s a^2 / (s + 1)` avoids the cancellation
/// of `s^2 - s` for `s` near 1, which would otherwise leave `min_Q ~ sqrt(eps)`
/// for a projection.
pub fn matched_distance(q: &Idempotent) -> Result<f64> {
    let offdiag = &range_projection(q).into_matrix() - q.matrix();
    let radicand: f64 = linalg::svd(&offdiag)?
        .singular_values
        .iter()
        .map(|a| {
            let s = (1.0 + a * a).sqrt();
            s * a * a / (s + 1.0)
        })
        .sum();
    Ok(radicand.sqrt())
}

/// `(min_Q, max_Q)`.
pub fn distance_extremes(q: &Idempotent, m_q: &Projection) -> Result<(f64, f64)> {
    let min = matched_distance(q)?;
    let max = m_q.complement().distance_to(q.matrix());
    Ok((min, max))
}

pub fn analyze(q: &Idempotent) -> Result<MatchedResult> {
    let n = q.dim();
    let qm = q.matrix();
    let m_q = matched_projection(q)?;
    let (min_distance, max_distance) = distance_extremes(q, &m_q)?;
    let range = range_projection(q);
    let lambda1 = range.distance_to(qm);
    let lambda2 = range.complement().distance_to(qm);
    let gram = qm * &qm.adjoint();
    let invariant_constant = n as f64 - 2.0 * linalg::trace(qm)?.re + 2.0 * linalg::trace(&gram)?.re;

    let lambda_gap = (lambda2 - (lambda1 * lambda1 + n as f64).sqrt()).abs();
    if lambda_gap > LAMBDA_TOL {
        return Err(Error::Numeric(format!(
            "lambda2 deviates from sqrt(lambda1^2 + n) by {lambda_gap:e}"
        )));
    }
    let sum_gap = (min_distance.powi(2) + max_distance.powi(2) - invariant_constant).abs();
    if sum_gap > CONSTANT_SUM_TOL {
        return Err(Error::Numeric(format!(
            "min^2 + max^2 deviates from the invariant constant by {sum_gap:e}"
        )));
    }
    Ok(MatchedResult {
        m_q,
        min_distance,
        max_distance,
        lambda1,
        lambda2,
        invariant_constant,
    })
}

/// `||m(Q)||_F`, which equals `sqrt(rank Q)`.
pub fn norm_of_matched(q: &Idempotent) -> Result<f64> {
    Ok(matched_projection(q)?.matrix().frobenius_norm())
}

/// `V = (sqrt2/2) (|Q*| + Q*) (|Q*|^dagger)^{1/2} (|Q*| + I)^{-1/2}` with
/// `V V* = m(Q)` and `V* V = P_{R(Q)}`.
pub fn factor_v(q: &Idempotent) -> Result<ComplexMatrix> {
    let qm = q.matrix();
    let abs = q.abs_conjugate();
    let pinv_sqrt = q.abs_conjugate_function(|s| 1.0 / s.sqrt(), 0.0);
    let shifted_inv_sqrt = q.abs_conjugate_function(|s| 1.0 / (s + 1.0).sqrt(), 1.0);
    let v = (&(&(&abs + &qm.adjoint()) * &pinv_sqrt) * &shifted_inv_sqrt)
        .scale(std::f64::consts::FRAC_1_SQRT_2);

    let m_q = matched_projection(q)?;
    let range = range_projection(q);
    let outer = (&v * &v.adjoint()).distance(m_q.matrix());
    let inner = (&v.adjoint() * &v).distance(range.matrix());
    if outer > FACTOR_TOL || inner > FACTOR_TOL {
        return Err(Error::Numeric(format!(
            "factorization residuals: ||VV* - m(Q)||_F = {outer:e}, ||V*V - P_R(Q)||_F = {inner:e}"
        )));
    }
    Ok(v)
}

/// `tr[(I + T T*)^{1/2}] - sum_i sqrt(1 + |t_ii|^2)`, non-negative for every square `T`
/// and zero only for diagonal `T`.
pub fn majorization_gap(t: &ComplexMatrix) -> Result<f64> {
    if !t.is_square() {
        return Err(Error::NotSquare {
            op: "majorization_gap",
            rows: t.rows(),
            cols: t.cols(),
        });
    }
    let n = t.rows();
    let root = linalg::sqrtm_psd(&(&ComplexMatrix::identity(n) + &(t * &t.adjoint())))?;
    let lhs = linalg::trace(&root)?.re;
    let rhs: f64 = t.diagonal().iter().map(|z| (1.0 + z.norm_sqr()).sqrt()).sum();
    Ok(lhs - rhs)
}

/// A way of computing `m(Q)`.
pub trait MatchedRoute: Named + Send + Sync {
    fn description(&self) -> &'static str;
    fn matched(&self, q: &Idempotent) -> Result<Projection>;
}

pub struct ClosedFormRoute;

impl Named for ClosedFormRoute {
    fn name(&self) -> &'static str {
        "closed-form"
    }
}

impl MatchedRoute for ClosedFormRoute {
    fn description(&self) -> &'static str {
        "1/2 (|Q*| + Q*) |Q*|^+ (|Q*| + I)^-1 (|Q*| + Q) on the spectrum of |Q*|"
    }

    fn matched(&self, q: &Idempotent) -> Result<Projection> {
        matched_projection(q)
    }
}

pub struct BlockRoute;

impl Named for BlockRoute {
    fn name(&self) -> &'static str {
        "block"
    }
}

impl MatchedRoute for BlockRoute {
    fn description(&self) -> &'static str {
        "block formula in the basis Q = U* [[I, A], [0, 0]] U with B = (I + AA*)^(1/2)"
    }

    fn matched(&self, q: &Idempotent) -> Result<Projection> {
        matched_projection_block(&block_decompose(q)?)
    }
}

/// All built-in routes; `closed-form` is the default.
pub fn routes() -> Registry<dyn MatchedRoute> {
    Registry::new("matched route")
        .with(Box::new(ClosedFormRoute) as Box<dyn MatchedRoute>)
        .with(Box::new(BlockRoute))
}

pub const DEFAULT_ROUTE: &str = "closed-form";
