//! Analysis reports and family sidecars as JSON values.

use matched_proj::bounds::{bilateral_check, check_bounds};
use matched_proj::families::{Expected, FamilyOutput};
use matched_proj::idempotent::validate_projection;
use matched_proj::matched::{analyze, routes};
use matched_proj::{ComplexMatrix, Idempotent};
use serde_json::{json, Map, Value};

use crate::io::{fmt15, matrix_to_value, round_matrix};
use crate::CliError;

/// Analysis of `q` (and of a covering projection `p`), computed on the
/// 15-digit rounding of the inputs that the report embeds.
pub fn analysis_report(q: &ComplexMatrix, p: Option<&ComplexMatrix>, route: &str) -> Result<Value, CliError> {
    let q = round_matrix(q);
    let reg = routes();
    let route_impl = reg.get(route)?;
    let idem = Idempotent::new(q.clone())?;
    let res = analyze(&idem)?;
    let m_q = route_impl.matched(&idem)?;

    let bilateral = match bilateral_check(&idem)?.ratio() {
        Some(r) => Value::String(fmt15(r)),
        None => Value::Null,
    };
    let mut report = json!({
        "input": {
            "dimension": idem.dim(),
            "rank": idem.rank(),
            "idempotency_residual": fmt15(idem.residual()),
            "matrix": matrix_to_value(&q),
        },
        "route": route,
        "rank": idem.rank(),
        "min_distance": fmt15(res.min_distance),
        "max_distance": fmt15(res.max_distance),
        "lambda1": fmt15(res.lambda1),
        "lambda2": fmt15(res.lambda2),
        "invariant_constant": fmt15(res.invariant_constant),
        "bilateral_ratio": bilateral,
        "qq_star_eigenvalues": gram_eigenvalues(&idem),
        "matched_projection": matrix_to_value(m_q.matrix()),
    });
    if let Some(p) = p {
        let p = round_matrix(p);
        let proj = validate_projection(&p)?;
        let b = check_bounds(&proj, &idem)?;
        report["bounds"] = json!({
            "projection": matrix_to_value(&p),
            "projection_rank": b.rank_p,
            "distance": fmt15(b.distance),
            "distance_squared": fmt15(b.distance * b.distance),
            "lambda_pq": fmt15(b.lambda_pq),
            "ratio_squared": fmt15((b.distance / b.lambda_pq).powi(2)),
            "pinv_distance": fmt15(b.pinv_distance),
            "pinv_coefficient": fmt15(b.pinv_coefficient),
            "lower_ok": b.lower_ok,
            "upper_ok": b.upper_ok,
            "pinv_ok": b.pinv_ok,
            "lower_tight": b.lower_tight,
            "upper_tight": b.upper_tight,
            "pinv_tight": b.pinv_tight,
            "q_is_projection": b.q_is_projection,
            "p_equals_q": b.p_equals_q,
        });
    }
    Ok(report)
}

/// Non-zero eigenvalues of `Q Q*`, descending: the squared non-zero singular values.
fn gram_eigenvalues(q: &Idempotent) -> Value {
    Value::Array(
        q.nonzero_singular_values()
            .iter()
            .map(|s| Value::String(fmt15(s * s)))
            .collect(),
    )
}

fn expected_value(e: &Expected) -> Value {
    match e {
        Expected::Scalar(x) => Value::String(fmt15(*x)),
        Expected::Integer(k) => json!(k),
        Expected::List(xs) => Value::Array(xs.iter().map(|x| Value::String(fmt15(*x))).collect()),
    }
}

pub fn family_sidecar(name: &str, out: &FamilyOutput, companions: &[(String, String)]) -> Value {
    let params: Map<String, Value> = out.parameters.iter().map(|(k, v)| (k.to_string(), expected_value(v))).collect();
    let expected: Map<String, Value> = out.expected.iter().map(|(k, v)| (k.to_string(), expected_value(v))).collect();
    let files: Map<String, Value> = companions.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect();
    json!({
        "family": name,
        "parameters": params,
        "companions": files,
        "expected": expected,
    })
}

/// Looks `key` up at the top level of a report, then in its bounds section.
pub fn report_field<'a>(report: &'a Value, key: &str) -> Option<&'a Value> {
    report.get(key).or_else(|| report.get("bounds").and_then(|b| b.get(key)))
}

/// Largest absolute difference between a sidecar value and the report's,
/// or an error naming the key that has no comparable counterpart.
pub fn value_gap(expected: &Value, got: &Value) -> Result<f64, String> {
    let num = |v: &Value| -> Option<f64> {
        match v {
            Value::String(s) => s.parse().ok(),
            Value::Number(n) => n.as_f64(),
            _ => None,
        }
    };
    match (expected, got) {
        (Value::Array(a), Value::Array(b)) => {
            if a.len() != b.len() {
                return Err(format!("lengths {} and {}", a.len(), b.len()));
            }
            a.iter().zip(b).try_fold(0.0f64, |acc, (x, y)| Ok(acc.max(value_gap(x, y)?)))
        }
        _ => match (num(expected), num(got)) {
            (Some(x), Some(y)) => Ok((x - y).abs()),
            _ => Err(format!("incomparable values {expected} and {got}")),
        },
    }
}

/// What `analyze` is run on to reproduce a family sidecar: the `q` companion
/// if there is one (else the family matrix), against the `aa_dagger` companion.
pub fn analysis_inputs(out: &FamilyOutput) -> (&ComplexMatrix, Option<&ComplexMatrix>) {
    let companion = |role: &str| out.companions.iter().find(|(k, _)| *k == role).map(|(_, m)| m);
    (companion("q").unwrap_or(&out.matrix), companion("aa_dagger"))
}
