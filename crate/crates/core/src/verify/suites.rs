use num_complex::Complex64;
use rand::Rng;

use super::{ensure, Checked, Counterexample, FnSuite, OrCounterexample, PropertySuite, SuiteConfig, SuiteRng};
use crate::bounds::{
    check_bounds, drazin, drazin_family, drazin_family_distance_sq, drazin_family_gram_eigenvalues,
    range_projection_excess, BOUND_SLACK,
};
use crate::error::Result;
use crate::idempotent::{
    block_compose, block_decompose, projection_from_params, random_complex_gaussian, random_covering_projection,
    random_idempotent, random_projection, random_projection_params, random_unitary, range_projection,
    validate_projection, BlockForm, Idempotent,
};
use crate::linalg::{self, ComplexMatrix};
use crate::matched::{analyze, factor_v, majorization_gap, matched_projection, routes};
use crate::oracle::{grid_min_2x2, sampled_extrema, MIN_SAMPLES};
use crate::range::{construct_at_distance, Segment, SegmentPaths};
use crate::registry::Registry;

const SCALES: [f64; 3] = [0.1, 1.0, 10.0];
const PROJECTIONS_PER_Q: usize = 500;
const CONSTANT_SUM_SAMPLES: usize = 50;
const ALPHAS_PER_Q: usize = 20;
const PATH_SAMPLES: usize = 50;
const GRID_RESOLUTION: usize = 400;
const GRID_TRIALS: usize = 50;
const MAX_GRID_OFFDIAG: f64 = 5.0;

fn dim(cfg: &SuiteConfig, rng: &mut SuiteRng) -> usize {
    rng.random_range(2..=cfg.max_dim)
}

/// Random idempotent with `0 < rank < n` and an off-diagonal scale drawn from [`SCALES`].
fn proper_idempotent(cfg: &SuiteConfig, rng: &mut SuiteRng) -> Result<Idempotent> {
    let n = dim(cfg, rng);
    let r = rng.random_range(1..n);
    let scale = SCALES[rng.random_range(0..SCALES.len())];
    random_idempotent(n, r, scale, rng)
}

fn gen_q(cfg: &SuiteConfig, rng: &mut SuiteRng) -> std::result::Result<Idempotent, Counterexample> {
    proper_idempotent(cfg, rng).or_counter(&[])
}

fn rectangular(cfg: &SuiteConfig, rng: &mut SuiteRng) -> ComplexMatrix {
    let rows = rng.random_range(1..=cfg.max_dim);
    let cols = rng.random_range(1..=cfg.max_dim);
    // rank-deficient about a third of the time
    if rng.random_bool(1.0 / 3.0) {
        let k = rng.random_range(1..=rows.min(cols));
        &random_complex_gaussian(rows, k, 1.0, rng) * &random_complex_gaussian(k, cols, 1.0, rng)
    } else {
        random_complex_gaussian(rows, cols, 1.0, rng)
    }
}

fn svd_reconstruction(cfg: &SuiteConfig, rng: &mut SuiteRng) -> Checked {
    for _ in 0..cfg.trials {
        let m = rectangular(cfg, rng);
        let dec = linalg::svd(&m).or_counter(&[("m", &m)])?;
        let err = dec.reconstruct().distance(&m);
        ensure(
            err <= 1e-10 * (1.0 + dec.sigma_max()),
            || format!("reconstruction error {err:e}"),
            &[("m", &m)],
        )?;
        let sorted = dec.singular_values.windows(2).all(|w| w[0] >= w[1]) && dec.singular_values.iter().all(|&s| s >= 0.0);
        ensure(sorted, || format!("singular values {:?}", dec.singular_values), &[("m", &m)])?;
    }
    Ok(cfg.trials)
}

fn norm_ordering(cfg: &SuiteConfig, rng: &mut SuiteRng) -> Checked {
    for _ in 0..cfg.trials {
        let m = rectangular(cfg, rng);
        let two = linalg::spectral_norm(&m).or_counter(&[("m", &m)])?;
        let fro = m.frobenius_norm();
        let rank = linalg::numerical_rank(&m).or_counter(&[("m", &m)])?;
        let slack = 1e-9 * fro;
        ensure(
            two <= fro + slack && fro <= (rank as f64).sqrt() * two + slack,
            || format!("||m||_2 = {two}, ||m||_F = {fro}, rank {rank}"),
            &[("m", &m)],
        )?;
    }
    Ok(cfg.trials)
}

fn pinv_involution(cfg: &SuiteConfig, rng: &mut SuiteRng) -> Checked {
    for _ in 0..cfg.trials {
        let n = rng.random_range(1..=cfg.max_dim);
        let m = random_complex_gaussian(n, n, 1.0, rng);
        let back = linalg::pinv_default(&m)
            .and_then(|p| linalg::pinv_default(&p))
            .or_counter(&[("m", &m)])?;
        let err = back.distance(&m);
        ensure(
            err <= 1e-8 * (1.0 + m.frobenius_norm()),
            || format!("||pinv(pinv(m)) - m||_F = {err:e}"),
            &[("m", &m)],
        )?;
    }
    Ok(cfg.trials)
}

fn sqrtm_psd(cfg: &SuiteConfig, rng: &mut SuiteRng) -> Checked {
    for _ in 0..cfg.trials {
        let n = rng.random_range(1..=cfg.max_dim);
        let k = rng.random_range(1..=n);
        let g = random_complex_gaussian(n, k, 1.0, rng);
        let h = (&g * &g.adjoint()).hermitian_part();
        let root = linalg::sqrtm_psd(&h).or_counter(&[("h", &h)])?;
        let err = (&root * &root).distance(&h);
        ensure(
            err <= 1e-9 * (1.0 + h.frobenius_norm()),
            || format!("||R^2 - h||_F = {err:e}"),
            &[("h", &h)],
        )?;
    }
    Ok(cfg.trials)
}

fn idempotent_generation(cfg: &SuiteConfig, rng: &mut SuiteRng) -> Checked {
    let mut checks = 0;
    for k in 0..cfg.trials {
        // alternate genuinely oblique samples with projections
        let q = if k % 2 == 0 {
            gen_q(cfg, rng)?
        } else {
            let n = dim(cfg, rng);
            let r = rng.random_range(0..=n);
            random_projection(n, r, rng)
                .and_then(|p| p.as_idempotent())
                .or_counter(&[])?
        };
        let qm = q.matrix();
        let ctx = [("q", qm)];
        let smallest = q.nonzero_singular_values().iter().cloned().fold(f64::INFINITY, f64::min);
        ensure(
            q.rank() == 0 || smallest >= 1.0 - 1e-8,
            || format!("nonzero singular value {smallest} < 1"),
            &ctx,
        )?;
        let tr_abs = linalg::trace(&q.abs_conjugate()).or_counter(&ctx)?.re;
        let tr_q = linalg::trace(qm).or_counter(&ctx)?.re;
        let r = q.rank() as f64;
        ensure(
            (tr_q - r).abs() <= 1e-7 && tr_abs >= r - 1e-7,
            || format!("tr|Q*| = {tr_abs}, tr Q = {tr_q}, rank {r}"),
            &ctx,
        )?;
        let equal = (tr_abs - tr_q).abs() <= 1e-7;
        let hermitian = qm.distance(&qm.adjoint()) <= 1e-7;
        ensure(
            equal == hermitian,
            || format!("tr|Q*| = tr Q is {equal} but Q = Q* is {hermitian}"),
            &ctx,
        )?;
        let back = block_decompose(&q).and_then(|bf| block_compose(&bf)).or_counter(&ctx)?;
        let err = back.matrix().distance(qm);
        ensure(err <= 1e-8, || format!("block round trip error {err:e}"), &ctx)?;
        checks += 4;
    }
    Ok(checks)
}

fn projection_params(cfg: &SuiteConfig, rng: &mut SuiteRng) -> Checked {
    for _ in 0..cfg.trials {
        let n = dim(cfg, rng);
        let r = rng.random_range(0..=n);
        let (u, params) = random_projection_params(n, r, rng).or_counter(&[])?;
        let p = projection_from_params(&u, &params).or_counter(&[("u", &u), ("c", &params.c)])?;
        validate_projection(p.matrix()).or_counter(&[("p", p.matrix())])?;
    }
    Ok(cfg.trials)
}

fn matched_minimality(cfg: &SuiteConfig, rng: &mut SuiteRng) -> Checked {
    let mut checks = 0;
    for _ in 0..cfg.trials {
        let q = gen_q(cfg, rng)?;
        let n = q.dim();
        let qm = q.matrix();
        let res = analyze(&q).or_counter(&[("q", qm)])?;
        let ident = ComplexMatrix::identity(n);
        for k in 0..PROJECTIONS_PER_Q {
            let p = random_projection(n, k % (n + 1), rng).or_counter(&[("q", qm)])?;
            let ctx = [("q", qm), ("p", p.matrix())];
            let d = p.distance_to(qm);
            ensure(
                res.min_distance <= d + 1e-9,
                || format!("projection at {d} beats the minimum {}", res.min_distance),
                &ctx,
            )?;
            ensure(
                d <= res.max_distance + 1e-9,
                || format!("projection at {d} beats the maximum {}", res.max_distance),
                &ctx,
            )?;
            if d <= res.min_distance + 1e-7 {
                let gap = p.matrix().distance(res.m_q.matrix());
                ensure(gap <= 1e-3, || format!("near-minimizer {gap} away from m(Q)"), &ctx)?;
            }
            if k < CONSTANT_SUM_SAMPLES {
                let other = (&(&ident - p.matrix()) - qm).frobenius_norm();
                let dev = (d * d + other * other - res.invariant_constant).abs();
                ensure(dev <= 1e-7, || format!("constant sum off by {dev:e}"), &ctx)?;
            }
            checks += 1;
        }
    }
    Ok(checks)
}

fn matched_routes(cfg: &SuiteConfig, rng: &mut SuiteRng) -> Checked {
    let reg = routes();
    for _ in 0..cfg.trials {
        let q = gen_q(cfg, rng)?;
        let qm = q.matrix();
        let ctx = [("q", qm)];
        let closed = reg.get("closed-form").and_then(|r| r.matched(&q)).or_counter(&ctx)?;
        let block = reg.get("block").and_then(|r| r.matched(&q)).or_counter(&ctx)?;
        let gap = closed.matrix().distance(block.matrix());
        ensure(gap <= 1e-9, || format!("routes disagree by {gap:e}"), &ctx)?;
        let norm_gap = (closed.matrix().frobenius_norm() - (q.rank() as f64).sqrt()).abs();
        ensure(norm_gap <= 1e-8, || format!("||m(Q)||_F off sqrt(rank) by {norm_gap:e}"), &ctx)?;
        // factor_v checks VV* = m(Q) and V*V = P_R(Q) itself
        factor_v(&q).or_counter(&ctx)?;
    }
    Ok(cfg.trials * 3)
}

fn matched_symmetry(cfg: &SuiteConfig, rng: &mut SuiteRng) -> Checked {
    for _ in 0..cfg.trials {
        let q = gen_q(cfg, rng)?;
        let qm = q.matrix();
        let ctx = [("q", qm)];
        let m = matched_projection(&q).or_counter(&ctx)?;
        let m_adj = q.adjoint().and_then(|a| matched_projection(&a)).or_counter(&ctx)?;
        let m_comp = q.complement().and_then(|c| matched_projection(&c)).or_counter(&ctx)?;
        let e1 = m_adj.matrix().distance(m.matrix());
        let e2 = m_comp.matrix().distance(m.complement().matrix());
        ensure(
            e1 <= 1e-8 && e2 <= 1e-8,
            || format!("||m(Q*) - m(Q)||_F = {e1:e}, ||m(I-Q) - (I - m(Q))||_F = {e2:e}"),
            &ctx,
        )?;
    }
    Ok(cfg.trials * 2)
}

fn majorization(cfg: &SuiteConfig, rng: &mut SuiteRng) -> Checked {
    for k in 0..cfg.trials {
        let n = rng.random_range(1..=cfg.max_dim);
        let t = random_complex_gaussian(n, n, 1.0, rng);
        let gap = majorization_gap(&t).or_counter(&[("t", &t)])?;
        ensure(gap >= -1e-9, || format!("negative gap {gap:e}"), &[("t", &t)])?;
        let mut off = t.clone();
        for i in 0..n {
            off.set_block(i, i, &ComplexMatrix::zeros(1, 1));
        }
        ensure(
            gap > 1e-7 || off.frobenius_norm() <= 1e-6,
            || format!("gap {gap:e} with off-diagonal mass {}", off.frobenius_norm()),
            &[("t", &t)],
        )?;
        // equality direction on a diagonal matrix
        if k % 4 == 0 {
            let d = random_complex_gaussian(n, 1, 1.0, rng);
            let diag = ComplexMatrix::from_fn(n, n, |i, j| if i == j { d.get(i, 0) } else { Complex64::new(0.0, 0.0) });
            let gap = majorization_gap(&diag).or_counter(&[("t", &diag)])?;
            ensure(gap.abs() <= 1e-10, || format!("diagonal gap {gap:e}"), &[("t", &diag)])?;
        }
    }
    Ok(cfg.trials)
}

/// Distances at `PATH_SAMPLES` equally spaced parameters; neighbors may differ
/// by at most a tenth of the segment's span.
fn check_path(paths: &SegmentPaths, seg: Segment, i: usize, qm: &ComplexMatrix) -> Checked {
    let mut dist = Vec::with_capacity(PATH_SAMPLES);
    for k in 0..PATH_SAMPLES {
        let t = k as f64 / (PATH_SAMPLES - 1) as f64;
        dist.push(paths.point(seg, i, t).or_counter(&[("q", qm)])?.achieved_distance);
    }
    let span = (dist[PATH_SAMPLES - 1] - dist[0]).abs();
    let jump = dist.windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0, f64::max);
    ensure(
        jump <= span / 10.0 + 1e-12,
        || format!("{seg} path {i}: neighbor jump {jump} over span {span}"),
        &[("q", qm)],
    )?;
    Ok(1)
}

fn range_continuity(cfg: &SuiteConfig, rng: &mut SuiteRng) -> Checked {
    let mut checks = 0;
    for _ in 0..cfg.trials {
        let q = gen_q(cfg, rng)?;
        let qm = q.matrix();
        let paths = SegmentPaths::new(&q).or_counter(&[("q", qm)])?;
        checks += check_path(&paths, Segment::J1, 0, qm)?;
        checks += check_path(&paths, Segment::J3, 0, qm)?;
        for i in 0..=paths.max_path_index() {
            checks += check_path(&paths, Segment::J2, i, qm)?;
        }
    }
    Ok(checks)
}

fn range_coverage(cfg: &SuiteConfig, rng: &mut SuiteRng) -> Checked {
    for _ in 0..cfg.trials {
        let q = gen_q(cfg, rng)?;
        let qm = q.matrix();
        let paths = SegmentPaths::new(&q).or_counter(&[("q", qm)])?;
        for _ in 0..ALPHAS_PER_Q {
            let alpha = rng.random_range(paths.min..=paths.max);
            let ctx = [("q", qm)];
            let pt = construct_at_distance(&q, alpha, 1e-8)
                .map_err(|e| Counterexample::new(format!("alpha {alpha}: {e}"), &ctx))?;
            let p = validate_projection(pt.projection.matrix()).or_counter(&[("q", qm), ("p", pt.projection.matrix())])?;
            let err = (p.distance_to(qm) - alpha).abs();
            ensure(
                err <= 1e-6,
                || format!("alpha {alpha} missed by {err:e}"),
                &[("q", qm), ("p", p.matrix())],
            )?;
        }
    }
    Ok(cfg.trials * ALPHAS_PER_Q)
}

fn range_j2_chaining(cfg: &SuiteConfig, rng: &mut SuiteRng) -> Checked {
    let mut checks = 0;
    for _ in 0..cfg.trials {
        let q = gen_q(cfg, rng)?;
        let qm = q.matrix();
        let ctx = [("q", qm)];
        let paths = SegmentPaths::new(&q).or_counter(&ctx)?;
        let last = paths.max_path_index();
        let end = |i: usize, t: f64| paths.point(Segment::J2, i, t).map(|p| p.achieved_distance).or_counter(&ctx);
        for i in 0..=last {
            let (lo, hi) = (end(i, 0.0)?, end(i, 1.0)?);
            let (lo_cf, hi_cf) = paths.j2_endpoints(i);
            ensure(
                (lo - lo_cf).abs() <= 1e-8 && (hi - hi_cf).abs() <= 1e-8,
                || format!("J2 path {i} endpoints ({lo}, {hi}) vs closed form ({lo_cf}, {hi_cf})"),
                &ctx,
            )?;
            if i < last {
                let next = end(i + 1, 0.0)?;
                ensure(hi >= next - 1e-9, || format!("J2 path {i} ends at {hi} below next start {next}"), &ctx)?;
            }
            checks += 1;
        }
        let (first, _) = paths.j2_endpoints(0);
        let (_, final_hi) = paths.j2_endpoints(last);
        ensure(
            (first - paths.lambda1).abs() <= 1e-9 && (final_hi - paths.lambda2).abs() <= 1e-9,
            || format!("J2 chain covers [{first}, {final_hi}], not [{}, {}]", paths.lambda1, paths.lambda2),
            &ctx,
        )?;
    }
    Ok(checks)
}

fn range_dualization(cfg: &SuiteConfig, rng: &mut SuiteRng) -> Checked {
    let max_dim = cfg.max_dim.max(3);
    for _ in 0..cfg.trials {
        let n = rng.random_range(3..=max_dim);
        let r = rng.random_range(n / 2 + 1..n);
        let scale = SCALES[rng.random_range(0..SCALES.len())];
        let q = random_idempotent(n, r, scale, rng).or_counter(&[])?;
        let qm = q.matrix();
        let ctx = [("q", qm)];
        let paths = SegmentPaths::new(&q).or_counter(&ctx)?;
        ensure(paths.dualized(), || format!("rank {r} of {n} not dualized"), &ctx)?;
        // aim inside the rotation segment so the dual basis is exercised
        let alpha = rng.random_range(paths.lambda1..=paths.lambda2);
        let pt = construct_at_distance(&q, alpha, 1e-8).or_counter(&ctx)?;
        let pm = pt.projection.matrix();
        let lhs = pt.projection.distance_to(qm);
        let rhs = (&ComplexMatrix::identity(n) - pm).distance(&(&ComplexMatrix::identity(n) - &qm.adjoint()));
        ensure(
            (lhs - rhs).abs() <= 1e-9 && (lhs - alpha).abs() <= 1e-6,
            || format!("||P - Q|| = {lhs}, ||(I-P) - (I-Q*)|| = {rhs}, alpha {alpha}"),
            &[("q", qm), ("p", pm)],
        )?;
    }
    Ok(cfg.trials)
}

fn bounds_sandwich(cfg: &SuiteConfig, rng: &mut SuiteRng) -> Checked {
    for k in 0..cfg.trials {
        let as_projection = k % 3 == 2;
        let q = if as_projection {
            let n = dim(cfg, rng);
            let r = rng.random_range(1..n);
            random_projection(n, r, rng).and_then(|p| p.as_idempotent()).or_counter(&[])?
        } else {
            gen_q(cfg, rng)?
        };
        let qm = q.matrix();
        let extra = rng.random_range(0..=q.dim() - q.rank());
        let p = random_covering_projection(&q, extra, rng).or_counter(&[("q", qm)])?;
        let ctx = [("q", qm), ("p", p.matrix())];
        let rep = check_bounds(&p, &q).or_counter(&ctx)?;
        ensure(rep.all_ok(), || format!("{rep:?}"), &ctx)?;
        let excess = rep.distance - rep.lambda_pq;
        if as_projection {
            ensure(excess.abs() <= 1e-8, || format!("projection Q: lower bound gap {excess:e}"), &ctx)?;
        } else if qm.distance(&qm.adjoint()) > 1e-3 {
            ensure(excess > 0.0, || format!("oblique Q attains the lower bound: gap {excess:e}"), &ctx)?;
        }
    }
    Ok(cfg.trials)
}

fn bounds_pinv_coefficient(cfg: &SuiteConfig, rng: &mut SuiteRng) -> Checked {
    for _ in 0..cfg.trials {
        let q = gen_q(cfg, rng)?;
        let qm = q.matrix();
        let pinv = q.pinv();
        let comm = &(&pinv * qm) - &(qm * &pinv);
        let norm = linalg::spectral_norm(&comm).or_counter(&[("q", qm)])?;
        ensure(norm <= 1.0 + 1e-9, || format!("||Q'Q - QQ'||_2 = {norm}"), &[("q", qm)])?;
    }
    Ok(cfg.trials)
}

fn bounds_range_vs_any(cfg: &SuiteConfig, rng: &mut SuiteRng) -> Checked {
    let mut checks = 0;
    for _ in 0..cfg.trials {
        let q = gen_q(cfg, rng)?;
        let n = q.dim();
        for r in 0..=n {
            let p = random_projection(n, r, rng).or_counter(&[])?;
            let ctx = [("q", q.matrix()), ("p", p.matrix())];
            let excess = range_projection_excess(&p, &q).or_counter(&ctx)?;
            ensure(excess <= BOUND_SLACK, || format!("range projection excess {excess:e}"), &ctx)?;
            checks += 1;
        }
        let pr = range_projection(&q);
        let excess = range_projection_excess(&pr, &q).or_counter(&[("q", q.matrix())])?;
        ensure(excess <= BOUND_SLACK, || format!("P_R(Q) excess {excess:e}"), &[("q", q.matrix())])?;
    }
    Ok(checks)
}

fn bounds_drazin_family(_cfg: &SuiteConfig, _rng: &mut SuiteRng) -> Checked {
    let mut checks = 0;
    for n in 1..=3 {
        for a in [0.5, 1.0, 2.0] {
            let (am, q) = drazin_family(n, a).or_counter(&[])?;
            let ctx = [("a", &am)];
            let d = drazin(&am).or_counter(&ctx)?;
            let err = d.a_d.distance(q.matrix());
            ensure(d.index == 2 && err <= 1e-8, || format!("n={n} a={a}: index {}, ||A^d - Q|| = {err:e}", d.index), &ctx)?;
            let gap = d.aa_dag.matrix().distance(d.aa_d.matrix());
            let expected = drazin_family_distance_sq(n, a);
            ensure(
                (gap * gap - expected).abs() <= 1e-8 && (expected - (1.0 + (2 * n + 1) as f64 * a * a)).abs() <= 1e-12,
                || format!("n={n} a={a}: ||AA' - AA^d||^2 = {} vs {expected}", gap * gap),
                &ctx,
            )?;
            let qm = q.matrix();
            let (mut ev, _) = linalg::hermitian_eigen(&(qm * &qm.adjoint())).or_counter(&ctx)?;
            ev.retain(|&x| x > 1e-9);
            ev.sort_by(|x, y| y.total_cmp(x));
            let want = drazin_family_gram_eigenvalues(n, a);
            ensure(
                ev.len() == want.len() && ev.iter().zip(&want).all(|(x, y)| (x - y).abs() <= 1e-9),
                || format!("n={n} a={a}: eigenvalues {ev:?} vs {want:?}"),
                &ctx,
            )?;
            checks += 1;
        }
    }
    Ok(checks)
}

/// 2x2 idempotent `U* [[1, a], [0, 0]] U` with `|a| <= MAX_GRID_OFFDIAG`.
fn grid_idempotent(rng: &mut SuiteRng) -> Result<Idempotent> {
    let mag = rng.random_range(0.0..=MAX_GRID_OFFDIAG);
    let phase = rng.random_range(0.0..std::f64::consts::TAU);
    let a = ComplexMatrix::from_fn(1, 1, |_, _| Complex64::from_polar(mag, phase));
    block_compose(&BlockForm { u: random_unitary(2, rng), a, r: 1 })
}

fn oracle_grid(cfg: &SuiteConfig, rng: &mut SuiteRng) -> Checked {
    let trials = cfg.trials.min(GRID_TRIALS);
    for _ in 0..trials {
        let q = grid_idempotent(rng).or_counter(&[])?;
        let qm = q.matrix();
        let ctx = [("q", qm)];
        let m = matched_projection(&q).or_counter(&ctx)?;
        let min = m.distance_to(qm);
        let res = grid_min_2x2(&q, GRID_RESOLUTION).or_counter(&ctx)?;
        let gap = res.best_distance - min;
        let off = res.best_projection.matrix().distance(m.matrix());
        ensure(
            gap >= -1e-9 && gap <= 2e-3 && off <= 5e-2,
            || format!("grid best {} vs minimum {min}; minimizer {off} from m(Q)", res.best_distance),
            &[("q", qm), ("grid_best", res.best_projection.matrix())],
        )?;
    }
    Ok(trials)
}

fn oracle_sampled(cfg: &SuiteConfig, rng: &mut SuiteRng) -> Checked {
    for _ in 0..cfg.trials {
        let q = gen_q(cfg, rng)?;
        let qm = q.matrix();
        let ctx = [("q", qm)];
        let res = analyze(&q).or_counter(&ctx)?;
        let (lo, hi) = sampled_extrema(&q, MIN_SAMPLES, rng).or_counter(&ctx)?;
        ensure(
            lo.best_distance >= res.min_distance - 1e-9,
            || format!("sample at {} beats the minimum {}", lo.best_distance, res.min_distance),
            &[("q", qm), ("p", lo.best_projection.matrix())],
        )?;
        ensure(
            hi.best_distance <= res.max_distance + 1e-9,
            || format!("sample at {} beats the maximum {}", hi.best_distance, res.max_distance),
            &[("q", qm), ("p", hi.best_projection.matrix())],
        )?;
    }
    Ok(cfg.trials)
}

/// Claims every idempotent is a projection; the first oblique sample refutes it.
fn forced_failure(cfg: &SuiteConfig, rng: &mut SuiteRng) -> Checked {
    for k in 0..cfg.trials {
        let q = gen_q(cfg, rng)?;
        let qm = q.matrix();
        let asym = qm.distance(&qm.adjoint());
        ensure(asym <= 1e-9, || format!("sample {k}: ||Q - Q*||_F = {asym}"), &[("q", qm)])?;
    }
    Ok(cfg.trials)
}

const CORE_SUITES: &[(&str, &str, fn(&SuiteConfig, &mut SuiteRng) -> Checked)] = &[
    ("svd-reconstruction", "SVD reconstructs rectangular matrices, ordered singular values", svd_reconstruction),
    ("norm-ordering", "||m||_2 <= ||m||_F <= sqrt(rank) ||m||_2", norm_ordering),
    ("pinv-involution", "pinv(pinv(m)) = m for square m", pinv_involution),
    ("sqrtm-psd", "PSD square roots square back", sqrtm_psd),
    ("idempotent-generation", "singular values >= 1, trace identities, block round trip", idempotent_generation),
    ("projection-params", "parameterized projections validate", projection_params),
    ("matched-minimality", "m(Q) minimizes, I - m(Q) maximizes, constant sum, uniqueness proxy", matched_minimality),
    ("matched-routes", "closed-form and block routes agree; ||m(Q)||_F = sqrt(rank); V factorization", matched_routes),
    ("matched-symmetry", "m(Q*) = m(Q) and m(I - Q) = I - m(Q)", matched_symmetry),
    ("majorization", "tr (I + TT*)^{1/2} >= sum sqrt(1 + |t_ii|^2), equality for diagonal T", majorization),
    ("range-continuity", "distance paths have no jumps", range_continuity),
    ("range-coverage", "every distance in [min, max] is constructed", range_coverage),
    ("range-j2-chaining", "rotation paths chain from lambda1 to lambda2", range_j2_chaining),
    ("range-dualization", "rank > n/2 constructions via I - Q*", range_dualization),
    ("bounds-sandwich", "lambda <= ||P - Q|| <= sqrt2 lambda and the pseudo-inverse bound for covering P", bounds_sandwich),
    ("bounds-pinv-coefficient", "||Q'Q - QQ'||_2 <= 1", bounds_pinv_coefficient),
    ("bounds-range-vs-any", "||P_R(Q) - Q|| <= sqrt2 ||P - Q|| for all P", bounds_range_vs_any),
    ("bounds-drazin-family", "Drazin family closed forms", bounds_drazin_family),
    ("oracle-grid", "2x2 sphere grid agrees with m(Q)", oracle_grid),
    ("oracle-sampled", "no sampled projection beats the extremes", oracle_sampled),
];

pub fn register_core_suites(reg: &mut Registry<dyn PropertySuite>) -> Result<()> {
    for &(name, description, body) in CORE_SUITES {
        reg.register(Box::new(FnSuite { name, description, body, self_test: false }))?;
    }
    reg.register(Box::new(FnSuite {
        name: "forced-failure",
        description: "harness self-check that must report a counterexample",
        body: forced_failure,
        self_test: true,
    }))
}
