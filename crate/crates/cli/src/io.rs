//! Matrix files and number rendering.
//!
//! A matrix file is `{"n": .., "entries": [[[re, im], ..], ..]}`. Entries are
//! written rounded to 15 significant digits, one row per line, so that
//! write -> read -> write is byte-identical.

use std::fs;
use std::path::{Path, PathBuf};

use matched_proj::ComplexMatrix;
use num_complex::Complex64;
use serde::Deserialize;
use serde_json::Value;

use crate::CliError;

pub const SIGNIFICANT_DIGITS: usize = 15;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMatrixFile {
    n: usize,
    entries: Vec<Vec<[f64; 2]>>,
}

/// Nearest double to `x` printed with 15 significant digits; `-0` becomes `0`.
pub fn round15(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { 0.0 } else { x };
    }
    let r: f64 = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().expect("rendered float");
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// 15 significant digits, positional for exponents in `[-5, 15)`, scientific otherwise.
pub fn fmt15(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent digits");
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mantissa),
    };
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    if (0..SIGNIFICANT_DIGITS as i32).contains(&exp) {
        let (int, frac) = digits.split_at(exp as usize + 1);
        if frac.is_empty() {
            format!("{sign}{int}")
        } else {
            format!("{sign}{int}.{frac}")
        }
    } else if (-5..0).contains(&exp) {
        format!("{sign}0.{}{digits}", "0".repeat((-exp - 1) as usize))
    } else {
        format!("{sign}{mantissa}e{exp}")
    }
}

pub fn round_matrix(m: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::from_fn(m.rows(), m.cols(), |i, j| {
        let z = m.get(i, j);
        Complex64::new(round15(z.re), round15(z.im))
    })
}

fn number(x: f64) -> String {
    serde_json::to_string(&round15(x)).expect("finite float")
}

/// Canonical text of a square matrix file.
pub fn matrix_to_string(m: &ComplexMatrix) -> String {
    let n = m.rows();
    let rows: Vec<String> = (0..n)
        .map(|i| {
            let cells: Vec<String> = (0..m.cols())
                .map(|j| {
                    let z = m.get(i, j);
                    format!("[{}, {}]", number(z.re), number(z.im))
                })
                .collect();
            format!("    [{}]", cells.join(", "))
        })
        .collect();
    if rows.is_empty() {
        return format!("{{\n  \"n\": {n},\n  \"entries\": []\n}}\n");
    }
    format!("{{\n  \"n\": {n},\n  \"entries\": [\n{}\n  ]\n}}\n", rows.join(",\n"))
}

/// The same payload as a JSON value, for embedding in reports.
pub fn matrix_to_value(m: &ComplexMatrix) -> Value {
    let entries: Vec<Value> = (0..m.rows())
        .map(|i| {
            Value::Array(
                (0..m.cols())
                    .map(|j| {
                        let z = m.get(i, j);
                        serde_json::json!([round15(z.re), round15(z.im)])
                    })
                    .collect(),
            )
        })
        .collect();
    serde_json::json!({ "n": m.rows(), "entries": entries })
}

pub fn parse_matrix(text: &str, origin: &str) -> Result<ComplexMatrix, CliError> {
    let raw: RawMatrixFile = serde_json::from_str(text)
        .map_err(|e| CliError::Usage(format!("{origin}: malformed matrix file: {e}")))?;
    if raw.entries.len() != raw.n {
        return Err(CliError::Usage(format!(
            "{origin}: field \"entries\" has {} rows but \"n\" is {}",
            raw.entries.len(),
            raw.n
        )));
    }
    let mut flat = Vec::with_capacity(raw.n * raw.n);
    for (i, row) in raw.entries.iter().enumerate() {
        if row.len() != raw.n {
            return Err(CliError::Usage(format!(
                "{origin}: field \"entries\" row {i} has {} columns, expected {}",
                row.len(),
                raw.n
            )));
        }
        flat.extend(row.iter().map(|[re, im]| Complex64::new(*re, *im)));
    }
    ComplexMatrix::from_row_major(raw.n, raw.n, &flat).map_err(|e| CliError::Usage(format!("{origin}: {e}")))
}

pub fn read_matrix(path: &Path) -> Result<ComplexMatrix, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    parse_matrix(&text, &path.display().to_string())
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))
}

pub fn write_matrix(path: &Path, m: &ComplexMatrix) -> Result<(), CliError> {
    write_text(path, &matrix_to_string(m))
}

pub fn write_json(path: &Path, v: &Value) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(v).expect("serializable report");
    text.push('\n');
    write_text(path, &text)
}

/// `<output>.sidecar.json`.
pub fn sidecar_path(output: &Path) -> PathBuf {
    let mut s = output.as_os_str().to_owned();
    s.push(".sidecar.json");
    PathBuf::from(s)
}

/// `dir/stem.json` -> `dir/stem.<role>.json`.
pub fn companion_path(output: &Path, role: &str) -> PathBuf {
    let stem = output.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let ext = output.extension().map(|e| e.to_string_lossy().into_owned()).unwrap_or_else(|| "json".into());
    output.with_file_name(format!("{stem}.{role}.{ext}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fifteen_digits() {
        assert_eq!(fmt15(0.765_366_864_730_179_543), "0.765366864730180");
        assert_eq!(fmt15(1.0), "1.00000000000000");
        assert_eq!(fmt15(-2.25), "-2.25000000000000");
        assert_eq!(fmt15(0.0), "0");
        assert_eq!(fmt15(1e-7), "1.00000000000000e-7");
        assert_eq!(fmt15(123456.0), "123456.000000000");
        assert_eq!(fmt15(9.9999999999999999), "10.0000000000000");
        assert_eq!(fmt15(0.000123), "0.000123000000000000");
    }

    #[test]
    fn rounding_is_idempotent() {
        for x in [std::f64::consts::PI, -1.0 / 3.0, 1e-300, 6.02214076e23, -0.0] {
            let r = round15(x);
            assert_eq!(round15(r).to_bits(), r.to_bits());
        }
        assert_eq!(round15(-0.0).to_bits(), 0f64.to_bits());
    }

    #[test]
    fn byte_identical_round_trip() {
        let m = ComplexMatrix::from_fn(3, 3, |i, j| Complex64::new((i as f64 + 1.0).sqrt(), -(j as f64) / 7.0));
        let text = matrix_to_string(&m);
        let back = parse_matrix(&text, "mem").unwrap();
        assert_eq!(matrix_to_string(&back), text);
        assert_eq!(serde_json::from_str::<Value>(&text).unwrap(), matrix_to_value(&m));
    }

    #[test]
    fn parse_errors_name_the_field() {
        let e = parse_matrix(r#"{"entries": []}"#, "x").unwrap_err();
        assert!(e.to_string().contains("`n`"), "{e}");
        let e = parse_matrix(r#"{"n": 2, "entries": [[[1, 0], [0, 0]]]}"#, "x").unwrap_err();
        assert!(e.to_string().contains("entries"), "{e}");
    }

    #[test]
    fn derived_paths() {
        assert_eq!(sidecar_path(Path::new("out/p.json")), PathBuf::from("out/p.json.sidecar.json"));
        assert_eq!(companion_path(Path::new("out/a.json"), "q"), PathBuf::from("out/a.q.json"));
    }
}
