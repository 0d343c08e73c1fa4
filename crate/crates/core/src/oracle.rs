//! Brute-force search over projections, independent of the closed forms.
//!
//! In dimension 2 every projection is `0`, `I`, or `(I + x sx + y sy + z sz) / 2`
//! for a unit vector `(x, y, z)`, so a dense sphere lattice is exhaustive up
//! to its spacing. In higher dimension random projections of every rank are
//! sampled alongside the known optimizers.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::idempotent::{random_projection, range_projection, Idempotent, Projection};
use crate::linalg::ComplexMatrix;
use crate::matched::matched_projection;

pub const MIN_GRID_RESOLUTION: usize = 100;
pub const MIN_SAMPLES: usize = 1000;
pub const MAX_SAMPLED_DIM: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleMethod {
    Grid2,
    Sampled,
}

#[derive(Clone, Debug)]
pub struct OracleResult {
    pub best_distance: f64,
    pub best_projection: Projection,
    pub samples_evaluated: usize,
    pub method: OracleMethod,
}

/// `k`-th of `count >= 2` Fibonacci-lattice points on the unit sphere; the
/// first and last points are the poles `(0, 0, +-1)`.
pub fn fibonacci_point(k: usize, count: usize) -> [f64; 3] {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    let z = 1.0 - 2.0 * k as f64 / (count - 1) as f64;
    let rho = (1.0 - z * z).max(0.0).sqrt();
    let phi = golden * k as f64;
    [rho * phi.cos(), rho * phi.sin(), z]
}

/// `(I + x sx + y sy + z sz) / 2` as row-major entries.
fn bloch_entries(v: [f64; 3]) -> [[Complex64; 2]; 2] {
    let [x, y, z] = v;
    [
        [Complex64::new(0.5 * (1.0 + z), 0.0), Complex64::new(0.5 * x, -0.5 * y)],
        [Complex64::new(0.5 * x, 0.5 * y), Complex64::new(0.5 * (1.0 - z), 0.0)],
    ]
}

fn distance_2x2(p: &[[Complex64; 2]; 2], q: &[[Complex64; 2]; 2]) -> f64 {
    let mut acc = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            acc += (p[i][j] - q[i][j]).norm_sqr();
        }
    }
    acc.sqrt()
}

/// Minimizes `||P - Q||_F` over `{0, I}` and a Fibonacci lattice of
/// `resolution^2` rank-one projections.
pub fn grid_min_2x2(q: &Idempotent, resolution: usize) -> Result<OracleResult> {
    if q.dim() != 2 {
        return Err(Error::InvalidParameter(format!(
            "grid oracle needs a 2x2 idempotent, got {0}x{0}",
            q.dim()
        )));
    }
    if resolution < MIN_GRID_RESOLUTION {
        return Err(Error::InvalidParameter(format!(
            "grid resolution must be at least {MIN_GRID_RESOLUTION}, got {resolution}"
        )));
    }
    let qm = q.matrix();
    let qe = [[qm.get(0, 0), qm.get(0, 1)], [qm.get(1, 0), qm.get(1, 1)]];
    let zero = [[Complex64::new(0.0, 0.0); 2]; 2];
    let mut ident = zero;
    ident[0][0] = Complex64::new(1.0, 0.0);
    ident[1][1] = Complex64::new(1.0, 0.0);

    let count = resolution * resolution;
    let mut best = (distance_2x2(&zero, &qe), zero);
    let d = distance_2x2(&ident, &qe);
    if d < best.0 {
        best = (d, ident);
    }
    for k in 0..count {
        let p = bloch_entries(fibonacci_point(k, count));
        let d = distance_2x2(&p, &qe);
        if d < best.0 {
            best = (d, p);
        }
    }
    let e = best.1;
    let pm = ComplexMatrix::from_row_major(2, 2, &[e[0][0], e[0][1], e[1][0], e[1][1]])?;
    let best_projection = Projection::from_nearly_hermitian(&pm)?;
    Ok(OracleResult {
        best_distance: best_projection.distance_to(qm),
        best_projection,
        samples_evaluated: count + 2,
        method: OracleMethod::Grid2,
    })
}

/// `(min, max)` of `||P - Q||_F` over `num_samples` random projections of
/// every rank plus `m(Q)`, `I - m(Q)`, `P_R(Q)` and `I - P_R(Q)`.
pub fn sampled_extrema<R: Rng + ?Sized>(
    q: &Idempotent,
    num_samples: usize,
    rng: &mut R,
) -> Result<(OracleResult, OracleResult)> {
    let n = q.dim();
    if n > MAX_SAMPLED_DIM {
        return Err(Error::InvalidParameter(format!(
            "sampled oracle supports n <= {MAX_SAMPLED_DIM}, got {n}"
        )));
    }
    if num_samples < MIN_SAMPLES {
        return Err(Error::InvalidParameter(format!(
            "need at least {MIN_SAMPLES} samples, got {num_samples}"
        )));
    }
    let qm = q.matrix();
    let m = matched_projection(q)?;
    let pr = range_projection(q);
    let mut candidates = vec![m.complement(), m, pr.complement(), pr];
    for k in 0..num_samples {
        candidates.push(random_projection(n, k % (n + 1), rng)?);
    }
    let total = candidates.len();
    let mut min: Option<(f64, Projection)> = None;
    let mut max: Option<(f64, Projection)> = None;
    for p in candidates {
        let d = p.distance_to(qm);
        if min.as_ref().is_none_or(|(b, _)| d < *b) {
            min = Some((d, p.clone()));
        }
        if max.as_ref().is_none_or(|(b, _)| d > *b) {
            max = Some((d, p));
        }
    }
    let wrap = |(best_distance, best_projection): (f64, Projection)| OracleResult {
        best_distance,
        best_projection,
        samples_evaluated: total,
        method: OracleMethod::Sampled,
    };
    Ok((wrap(min.expect("candidates")), wrap(max.expect("candidates"))))
}
