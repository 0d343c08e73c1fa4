//! Frobenius bounds for `||P - Q||_F` when the projection `P` covers the
//! idempotent `Q` (`PQ = Q`), the Drazin inverse, and the closed-form
//! example families `Q_a` and `A_{n,a}`.

use crate::error::{Error, Result};
use crate::idempotent::{range_projection, validate_idempotent, Idempotent, Projection, IDEMPOTENT_TOL};
use crate::linalg::{self, ComplexMatrix};
use crate::matched::matched_distance;

const SQRT2: f64 = std::f64::consts::SQRT_2;

/// Absolute slack for the bound inequalities.
pub const BOUND_SLACK: f64 = 1e-9;
/// Absolute slack for the equality diagnostics.
pub const TIGHT_SLACK: f64 = 1e-7;
/// `||PQ - Q||_F <= COVER_TOL (1 + ||Q||_F)` counts as `PQ = Q`.
pub const COVER_TOL: f64 = 1e-8;
/// Relative tolerance on the Drazin identities.
pub const DRAZIN_TOL: f64 = 1e-8;
const POWER_OVERFLOW: f64 = 1e12;
/// Agreement required between closed-form and generic values in the families and the scan.
pub const FAMILY_TOL: f64 = 1e-9;
pub const SCAN_AGREEMENT_TOL: f64 = 1e-7;

#[derive(Clone, Debug)]
pub struct BoundReport {
    pub rank_p: usize,
    pub rank_q: usize,
    pub min_distance: f64,
    /// `||P - Q||_F`.
    pub distance: f64,
    /// `sqrt(min_Q^2 + rank P - rank Q)`.
    pub lambda_pq: f64,
    pub lower_ok: bool,
    pub upper_ok: bool,
    /// `||P - Q^dagger||_F`.
    pub pinv_distance: f64,
    /// `sqrt(1 + ||Q^dagger Q - Q Q^dagger||_2^2)`.
    pub pinv_coefficient: f64,
    pub pinv_ok: bool,
    pub lower_tight: bool,
    pub upper_tight: bool,
    pub pinv_tight: bool,
    /// The lower bound is attained exactly when `Q` is a projection.
    pub q_is_projection: bool,
    /// The upper bounds are attained exactly when `P = Q = P_R(Q)`.
    pub p_equals_q: bool,
}

impl BoundReport {
    pub fn all_ok(&self) -> bool {
        self.lower_ok && self.upper_ok && self.pinv_ok
    }
}

fn cover_residual(p: &Projection, q: &Idempotent) -> Result<f64> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            op: "covering check",
            detail: format!("P is {0}x{0}, Q is {1}x{1}", p.dim(), q.dim()),
        });
    }
    Ok((p.matrix() * q.matrix()).distance(q.matrix()))
}

/// `lambda_{P,Q} = sqrt(||m(Q) - Q||_F^2 + rank P - rank Q)` for `PQ = Q`.
pub fn lambda_bound(p: &Projection, q: &Idempotent) -> Result<f64> {
    let residual = cover_residual(p, q)?;
    if residual > COVER_TOL * (1.0 + q.matrix().frobenius_norm()) {
        return Err(Error::CoveringViolated { residual });
    }
    if p.rank() < q.rank() {
        return Err(Error::Numeric(format!(
            "PQ = Q holds but rank P = {} < rank Q = {}",
            p.rank(),
            q.rank()
        )));
    }
    let min = matched_distance(q)?;
    Ok((min * min + (p.rank() - q.rank()) as f64).sqrt())
}

pub fn check_bounds(p: &Projection, q: &Idempotent) -> Result<BoundReport> {
    let lambda_pq = lambda_bound(p, q)?;
    let min_distance = matched_distance(q)?;
    let qm = q.matrix();
    let distance = p.distance_to(qm);
    let q_pinv = q.pinv();
    let pinv_distance = p.distance_to(&q_pinv);
    let commutator = &(&q_pinv * qm) - &(qm * &q_pinv);
    let c2 = linalg::spectral_norm(&commutator)?;
    let pinv_coefficient = (1.0 + c2 * c2).sqrt();
    let upper = SQRT2 * lambda_pq;
    let pinv_upper = SQRT2 * pinv_coefficient * lambda_pq;
    Ok(BoundReport {
        rank_p: p.rank(),
        rank_q: q.rank(),
        min_distance,
        distance,
        lambda_pq,
        lower_ok: distance >= lambda_pq - BOUND_SLACK,
        upper_ok: distance <= upper + BOUND_SLACK,
        pinv_distance,
        pinv_coefficient,
        pinv_ok: pinv_distance <= pinv_upper + BOUND_SLACK,
        lower_tight: (distance - lambda_pq).abs() <= TIGHT_SLACK,
        upper_tight: (distance - upper).abs() <= TIGHT_SLACK,
        pinv_tight: (pinv_distance - pinv_upper).abs() <= TIGHT_SLACK,
        q_is_projection: qm.distance(&qm.adjoint()) <= TIGHT_SLACK,
        p_equals_q: distance <= TIGHT_SLACK,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Bilateral {
    /// `ratio = min_Q / ||P_R(Q) - Q||_F`, and by how much the two-sided
    /// bound `sqrt2/2 <= ratio <= 1` is violated (0 when it holds).
    Ratio { ratio: f64, residual: f64 },
    /// `Q` is a projection: both sides vanish.
    Degenerate,
}

impl Bilateral {
    pub fn ratio(&self) -> Option<f64> {
        match self {
            Bilateral::Ratio { ratio, .. } => Some(*ratio),
            Bilateral::Degenerate => None,
        }
    }
}

pub fn bilateral_check(q: &Idempotent) -> Result<Bilateral> {
    let lambda1 = range_projection(q).distance_to(q.matrix());
    if lambda1 == 0.0 || q.is_projection(0.0) {
        return Ok(Bilateral::Degenerate);
    }
    let min = matched_distance(q)?;
    let residual = (SQRT2 / 2.0 * lambda1 - min).max(min - lambda1).max(0.0);
    Ok(Bilateral::Ratio {
        ratio: min / lambda1,
        residual,
    })
}

/// `||P_R(Q) - Q||_F - sqrt2 ||P - Q||_F`, non-positive for every projection `P`.
pub fn range_projection_excess(p: &Projection, q: &Idempotent) -> Result<f64> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            op: "range_projection_excess",
            detail: format!("P is {0}x{0}, Q is {1}x{1}", p.dim(), q.dim()),
        });
    }
    let lambda1 = range_projection(q).distance_to(q.matrix());
    Ok(lambda1 - SQRT2 * p.distance_to(q.matrix()))
}

#[derive(Clone, Debug)]
pub struct DrazinResult {
    pub index: usize,
    pub a_d: ComplexMatrix,
    /// `A A^dagger`, the range projection of `A`.
    pub aa_dag: Projection,
    /// `A A^d`, an idempotent onto `R(A^k)`.
    pub aa_d: Idempotent,
}

/// Drazin inverse `A^d = A^k (A^{2k+1})^dagger A^k` with `k = ind(A)`.
pub fn drazin(a: &ComplexMatrix) -> Result<DrazinResult> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            op: "drazin",
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let n = a.rows();
    let power = |j: usize| -> Result<ComplexMatrix> {
        let p = a.pow(j);
        let norm = p.frobenius_norm();
        if !(norm <= POWER_OVERFLOW) {
            return Err(Error::Numeric(format!("||A^{j}||_F = {norm:e} overflows")));
        }
        Ok(p)
    };

    let mut powers = vec![ComplexMatrix::identity(n)];
    let mut ranks = vec![n];
    let mut index = None;
    for j in 0..=n {
        let next = &powers[j] * a;
        let norm = next.frobenius_norm();
        if !(norm <= POWER_OVERFLOW) {
            return Err(Error::Numeric(format!("||A^{}||_F = {norm:e} overflows", j + 1)));
        }
        ranks.push(linalg::numerical_rank(&next)?);
        powers.push(next);
        if ranks[j] == ranks[j + 1] {
            index = Some(j);
            break;
        }
    }
    let k = index.ok_or_else(|| Error::Numeric(format!("Drazin index search exceeded {n}")))?;
    let ak = &powers[k];
    let rank_k = ranks[k];
    let high = power(2 * k + 1)?;
    let high_pinv = linalg::svd(&high)?.truncated_pinv(rank_k);
    let a_d = &(ak * &high_pinv) * ak;

    let scale = 1.0 + a.frobenius_norm().powi(k as i32 + 1);
    let commute = (a * &a_d).distance(&(&a_d * a));
    let outer = (&(&a_d * a) * &a_d).distance(&a_d);
    let apex = (&powers[k + 1] * &a_d).distance(ak);
    if commute > DRAZIN_TOL * scale || outer > DRAZIN_TOL * scale || apex > DRAZIN_TOL * scale {
        return Err(Error::Numeric(format!(
            "Drazin identities violated: ||AX - XA|| = {commute:e}, ||XAX - X|| = {outer:e}, \
             ||A^(k+1) X - A^k|| = {apex:e} (allowed {:e})",
            DRAZIN_TOL * scale
        )));
    }
    let aa_d = validate_idempotent(&(a * &a_d), IDEMPOTENT_TOL)
        .map_err(|e| Error::Numeric(format!("A A^d is not idempotent: {e}")))?;
    if aa_d.rank() != rank_k {
        return Err(Error::Numeric(format!(
            "rank(A A^d) = {} but rank(A^k) = {rank_k}",
            aa_d.rank()
        )));
    }
    let dec = linalg::svd(a)?;
    let rank_a = ranks[1];
    let aa_dag = Projection::from_nearly_hermitian(&dec.left_range_projection(rank_a))
        .map_err(|e| Error::Numeric(format!("A A^dagger: {e}")))?;
    Ok(DrazinResult {
        index: k,
        a_d,
        aa_dag,
        aa_d,
    })
}

/// [`check_bounds`] with `P = A A^dagger` and `Q = A A^d`.
pub fn drazin_corollaries(a: &ComplexMatrix) -> Result<(DrazinResult, BoundReport)> {
    let d = drazin(a)?;
    let report = check_bounds(&d.aa_dag, &d.aa_d)?;
    Ok((d, report))
}

fn check_positive(name: &str, a: f64) -> Result<()> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::InvalidParameter(format!("{name} must be positive and finite, got {a}")));
    }
    Ok(())
}

/// `Q_a = [[1, a], [0, 0]]`.
pub fn q_family(a: f64) -> Result<Idempotent> {
    check_positive("a", a)?;
    Idempotent::new(ComplexMatrix::from_real_rows(&[&[1.0, a], &[0.0, 0.0]]))
}

/// Closed-form `min_{Q_a} = sqrt(1 + a^2 - sqrt(1 + a^2))`.
pub fn q_family_min_distance(a: f64) -> f64 {
    let s = 1.0 + a * a;
    (s - s.sqrt()).sqrt()
}

/// The `2n x 2n` nilpotent with a single 1 in position (0, 1).
pub fn shift_block(n: usize) -> ComplexMatrix {
    let mut j = ComplexMatrix::zeros(2 * n, 2 * n);
    j.set_block(0, 1, &ComplexMatrix::identity(1));
    j
}

/// `A_{n,a} = [[I, aI], [0, J_n]]` and `Q_{n,a} = [[I, a(I + J_n)], [0, 0]]`, both `4n x 4n`.
pub fn drazin_family(n: usize, a: f64) -> Result<(ComplexMatrix, Idempotent)> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    check_positive("a", a)?;
    let m = 2 * n;
    let id = ComplexMatrix::identity(m);
    let j = shift_block(n);
    let mut am = ComplexMatrix::zeros(2 * m, 2 * m);
    am.set_block(0, 0, &id);
    am.set_block(0, m, &id.scale(a));
    am.set_block(m, m, &j);
    let mut qm = ComplexMatrix::zeros(2 * m, 2 * m);
    qm.set_block(0, 0, &id);
    qm.set_block(0, m, &(&id + &j).scale(a));

    let square = (&am * &am).distance(&qm);
    if square > FAMILY_TOL {
        return Err(Error::Numeric(format!("A^2 differs from Q by {square:e}")));
    }
    let q = Idempotent::new(qm)?;
    let mut got: Vec<f64> = q.nonzero_singular_values().iter().map(|s| s * s).collect();
    got.sort_by(|x, y| y.total_cmp(x));
    let expected = drazin_family_gram_eigenvalues(n, a);
    let worst = got
        .iter()
        .zip(&expected)
        .map(|(g, e)| (g - e).abs())
        .fold(0.0, f64::max);
    if got.len() != expected.len() || worst > FAMILY_TOL {
        return Err(Error::Numeric(format!(
            "eigenvalues of Q Q* deviate from closed form by {worst:e}"
        )));
    }
    Ok((am, q))
}

/// Non-zero eigenvalues of `Q_{n,a} Q_{n,a}*`, descending:
/// `((2 + 3a^2) +- sqrt5 a^2) / 2` and `1 + a^2` with multiplicity `2n - 2`.
pub fn drazin_family_gram_eigenvalues(n: usize, a: f64) -> Vec<f64> {
    let a2 = a * a;
    let (l1, l2) = drazin_family_leading_eigenvalues(a);
    let mut v = vec![l1, l2];
    v.extend(std::iter::repeat_n(1.0 + a2, 2 * n - 2));
    v.sort_by(|x, y| y.total_cmp(x));
    v
}

/// `((2 + 3a^2) +- sqrt5 a^2) / 2`.
fn drazin_family_leading_eigenvalues(a: f64) -> (f64, f64) {
    let a2 = a * a;
    let centre = (2.0 + 3.0 * a2) / 2.0;
    let half_gap = 5f64.sqrt() * a2 / 2.0;
    (centre + half_gap, centre - half_gap)
}

/// `||A A^dagger - Q_{n,a}||_F^2 = 1 + (2n + 1) a^2`.
pub fn drazin_family_distance_sq(n: usize, a: f64) -> f64 {
    1.0 + (2 * n + 1) as f64 * a * a
}

/// `||m(Q_{n,a}) - Q_{n,a}||_F^2 = b + (2n - 2)[(1 + a^2) - sqrt(1 + a^2)]`.
pub fn drazin_family_min_sq(n: usize, a: f64) -> f64 {
    let (l1, l2) = drazin_family_leading_eigenvalues(a);
    let b = l1 - l1.sqrt() + l2 - l2.sqrt();
    let s = 1.0 + a * a;
    b + (2 * n - 2) as f64 * (s - s.sqrt())
}

#[derive(Clone, Debug)]
pub struct ScanRow {
    pub n: usize,
    pub a: f64,
    /// `||A A^dagger - Q_{n,a}||_F^2 / (||m(Q_{n,a}) - Q_{n,a}||_F^2 + 1)`.
    pub ratio_sq: f64,
    pub distance_sq: f64,
    pub min_sq_closed: f64,
    pub min_sq_generic: f64,
}

/// Evaluates the squared bound ratio over a grid of the `A_{n,a}` family,
/// computing the matched distance both in closed form and generically.
pub fn sqrt2_optimality_scan(n_values: &[usize], a_values: &[f64]) -> Result<Vec<ScanRow>> {
    let mut rows = Vec::with_capacity(n_values.len() * a_values.len());
    for &n in n_values {
        for &a in a_values {
            let (am, q) = drazin_family(n, a)?;
            let d = drazin(&am)?;
            let distance_sq = d.aa_dag.distance_to(q.matrix()).powi(2);
            let min_sq_closed = drazin_family_min_sq(n, a);
            let min_sq_generic = matched_distance(&q)?.powi(2);
            let gap = (min_sq_closed - min_sq_generic).abs();
            if gap > SCAN_AGREEMENT_TOL {
                return Err(Error::Numeric(format!(
                    "(n={n}, a={a}): closed-form and generic min^2 differ by {gap:e}"
                )));
            }
            rows.push(ScanRow {
                n,
                a,
                ratio_sq: distance_sq / (min_sq_generic + 1.0),
                distance_sq,
                min_sq_closed,
                min_sq_generic,
            });
        }
    }
    Ok(rows)
}
