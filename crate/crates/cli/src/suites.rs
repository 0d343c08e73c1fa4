//! Property suites for the file formats, registered next to the library's.

use matched_proj::families::{families, FamilyParams};
use matched_proj::idempotent::random_idempotent;
use matched_proj::registry::Registry;
use matched_proj::verify::{ensure, Checked, Counterexample, FnSuite, OrCounterexample, PropertySuite, SuiteConfig, SuiteRng};
use matched_proj::{matched::DEFAULT_ROUTE, ComplexMatrix};
use serde_json::Value;

use crate::io::{fmt15, matrix_to_string, parse_matrix, round_matrix};
use crate::report::{analysis_inputs, analysis_report, family_sidecar, report_field, value_gap};

pub const REPRODUCTION_TOL: f64 = 1e-9;
/// Recomputing a report from its own embedded input.
pub const REREAD_TOL: f64 = 1e-12;

const QA_VALUES: [f64; 5] = [0.25, 0.5, 1.0, 2.0, 10.0];
const DRAZIN_N: [usize; 3] = [1, 2, 3];
const DRAZIN_A: [f64; 3] = [0.5, 1.0, 2.0];

fn counter(detail: String, m: &ComplexMatrix) -> Counterexample {
    Counterexample::new(detail, &[("q", m)])
}

/// Every string scalar reachable in `v`, keyed by path.
fn scalars(v: &Value, path: String, out: &mut Vec<(String, f64)>) {
    match v {
        Value::String(s) => {
            if let Ok(x) = s.parse::<f64>() {
                out.push((path, x));
            }
        }
        Value::Array(items) => {
            for (i, item) in items.iter().enumerate() {
                scalars(item, format!("{path}[{i}]"), out);
            }
        }
        Value::Object(map) => {
            for (k, item) in map {
                scalars(item, format!("{path}.{k}"), out);
            }
        }
        _ => {}
    }
}

fn cli_roundtrip(cfg: &SuiteConfig, rng: &mut SuiteRng) -> Checked {
    for k in 0..cfg.trials {
        let n = 2 + k % (cfg.max_dim - 1);
        let r = 1 + k % (n - 1);
        let q = random_idempotent(n, r, [0.1, 1.0, 10.0][k % 3], rng).or_counter(&[])?;
        let qm = q.matrix();
        let text = matrix_to_string(qm);
        let back = parse_matrix(&text, "round trip").map_err(|e| counter(e.to_string(), qm))?;
        ensure(matrix_to_string(&back) == text, || "write -> read -> write changed bytes".into(), &[("q", qm)])?;
        let gap = back.distance(&round_matrix(qm));
        ensure(gap == 0.0, || format!("parsed matrix differs from the rounded one by {gap:e}"), &[("q", qm)])?;

        let report = analysis_report(qm, None, DEFAULT_ROUTE).map_err(|e| counter(e.to_string(), qm))?;
        let embedded = serde_json::to_string(&report["input"]["matrix"]).expect("json");
        let reread = parse_matrix(&embedded, "embedded input").map_err(|e| counter(e.to_string(), qm))?;
        let again = analysis_report(&reread, None, DEFAULT_ROUTE).map_err(|e| counter(e.to_string(), qm))?;
        let (mut first, mut second) = (Vec::new(), Vec::new());
        scalars(&report, String::new(), &mut first);
        scalars(&again, String::new(), &mut second);
        ensure(first.len() == second.len(), || "report shapes differ".into(), &[("q", qm)])?;
        for ((path, x), (_, y)) in first.iter().zip(&second) {
            ensure(
                (x - y).abs() <= REREAD_TOL,
                || format!("{path}: {x} then {y} on re-reading"),
                &[("q", qm)],
            )?;
        }
        let rendered: f64 = fmt15(qm.get(0, 0).re).parse().expect("rendered");
        ensure(
            rendered == round_matrix(qm).get(0, 0).re,
            || "scalar rendering disagrees with matrix rounding".into(),
            &[("q", qm)],
        )?;
    }
    Ok(cfg.trials)
}

fn reproduce(name: &str, params: FamilyParams) -> Checked {
    let reg = families();
    let out = reg.get(name).and_then(|f| f.build(&params)).or_counter(&[])?;
    let sidecar = family_sidecar(name, &out, &[]);
    // go through the file format exactly as the command line does
    let (q, p) = analysis_inputs(&out);
    let q = parse_matrix(&matrix_to_string(q), "family").map_err(|e| counter(e.to_string(), q))?;
    let p = match p {
        Some(p) => Some(parse_matrix(&matrix_to_string(p), "family").map_err(|e| counter(e.to_string(), p))?),
        None => None,
    };
    let report = analysis_report(&q, p.as_ref(), DEFAULT_ROUTE).map_err(|e| counter(e.to_string(), &q))?;
    let expected = sidecar["expected"].as_object().expect("expected map");
    for (key, want) in expected {
        let got = report_field(&report, key)
            .ok_or_else(|| counter(format!("{name} {params:?}: report lacks {key}"), &q))?;
        let gap = value_gap(want, got).map_err(|e| counter(format!("{name} {params:?}: {key}: {e}"), &q))?;
        ensure(
            gap <= REPRODUCTION_TOL,
            || format!("{name} {params:?}: {key} expected {want}, analyzed {got}"),
            &[("q", &q)],
        )?;
    }
    Ok(expected.len())
}

fn family_reproduction(_cfg: &SuiteConfig, _rng: &mut SuiteRng) -> Checked {
    let mut checks = 0;
    for a in QA_VALUES {
        checks += reproduce("qa", FamilyParams { a: Some(a), n: None })?;
    }
    for n in DRAZIN_N {
        for a in DRAZIN_A {
            checks += reproduce("drazin", FamilyParams { a: Some(a), n: Some(n) })?;
        }
    }
    Ok(checks)
}

pub fn register_cli_suites(reg: &mut Registry<dyn PropertySuite>) -> matched_proj::Result<()> {
    reg.register(Box::new(FnSuite {
        name: "cli-roundtrip",
        description: "matrix files round-trip byte-identically; reports reproduce from their embedded input",
        body: cli_roundtrip,
        self_test: false,
    }))?;
    reg.register(Box::new(FnSuite {
        name: "family-reproduction",
        description: "analyzing family outputs reproduces every sidecar value",
        body: family_reproduction,
        self_test: false,
    }))
}
