//! Randomized property suites over every module, registered by name.
//!
//! A suite either passes after a number of checks or stops at the first
//! counterexample, carrying the matrices that triggered it.

mod suites;

use std::time::{Duration, Instant};

use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::idempotent::seeded_rng;
use crate::linalg::ComplexMatrix;
use crate::registry::{Named, Registry};

pub use suites::register_core_suites;

pub const MIN_DIM: usize = 2;
pub const MAX_DIM: usize = 8;

#[derive(Clone, Copy, Debug)]
pub struct SuiteConfig {
    pub seed: u64,
    pub trials: usize,
    pub max_dim: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 42,
            trials: 200,
            max_dim: 6,
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be at least 1".into()));
        }
        if !(MIN_DIM..=MAX_DIM).contains(&self.max_dim) {
            return Err(Error::InvalidParameter(format!(
                "max_dim must lie in [{MIN_DIM}, {MAX_DIM}], got {}",
                self.max_dim
            )));
        }
        Ok(())
    }

    /// Independent stream per suite, stable under suite selection.
    pub fn rng_for(&self, suite: &str) -> SuiteRng {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in suite.bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        seeded_rng(self.seed ^ h)
    }
}

#[derive(Clone, Debug)]
pub struct Counterexample {
    pub detail: String,
    pub matrices: Vec<(String, ComplexMatrix)>,
}

impl Counterexample {
    pub fn new(detail: impl Into<String>, matrices: &[(&str, &ComplexMatrix)]) -> Self {
        Counterexample {
            detail: detail.into(),
            matrices: matrices.iter().map(|(k, m)| (k.to_string(), (*m).clone())).collect(),
        }
    }
}

/// Generator handed to every suite body.
pub type SuiteRng = ChaCha8Rng;

/// Result of the body of a suite: number of checks performed, or the first failure.
pub type Checked = std::result::Result<usize, Counterexample>;

/// Turns library errors into counterexamples tagged with the offending matrices.
pub trait OrCounterexample<T> {
    fn or_counter(self, ctx: &[(&str, &ComplexMatrix)]) -> std::result::Result<T, Counterexample>;
}

impl<T> OrCounterexample<T> for Result<T> {
    fn or_counter(self, ctx: &[(&str, &ComplexMatrix)]) -> std::result::Result<T, Counterexample> {
        self.map_err(|e| Counterexample::new(format!("error: {e}"), ctx))
    }
}

/// `Err(counterexample)` unless `cond`.
pub fn ensure(
    cond: bool,
    detail: impl FnOnce() -> String,
    ctx: &[(&str, &ComplexMatrix)],
) -> std::result::Result<(), Counterexample> {
    if cond {
        Ok(())
    } else {
        Err(Counterexample::new(detail(), ctx))
    }
}

#[derive(Clone, Debug)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub checks: usize,
    pub elapsed: Duration,
    pub failure: Option<Counterexample>,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

pub trait PropertySuite: Named + Send + Sync {
    fn description(&self) -> &'static str;
    fn check(&self, cfg: &SuiteConfig) -> Checked;

    /// Harness self-checks that must fail; skipped unless asked for.
    fn is_self_test(&self) -> bool {
        false
    }

    fn run(&self, cfg: &SuiteConfig) -> SuiteOutcome {
        let start = Instant::now();
        let result = self.check(cfg);
        let elapsed = start.elapsed();
        match result {
            Ok(checks) => SuiteOutcome {
                name: self.name(),
                checks,
                elapsed,
                failure: None,
            },
            Err(c) => SuiteOutcome {
                name: self.name(),
                checks: 0,
                elapsed,
                failure: Some(c),
            },
        }
    }
}

/// A suite backed by a plain function.
pub struct FnSuite {
    pub name: &'static str,
    pub description: &'static str,
    pub body: fn(&SuiteConfig, &mut SuiteRng) -> Checked,
    pub self_test: bool,
}

impl Named for FnSuite {
    fn name(&self) -> &'static str {
        self.name
    }
}

impl PropertySuite for FnSuite {
    fn description(&self) -> &'static str {
        self.description
    }

    fn check(&self, cfg: &SuiteConfig) -> Checked {
        let mut rng = cfg.rng_for(self.name);
        (self.body)(cfg, &mut rng)
    }

    fn is_self_test(&self) -> bool {
        self.self_test
    }
}

/// All library suites, including the forced-failure self test.
pub fn suites() -> Registry<dyn PropertySuite> {
    let mut reg = Registry::new("suite");
    register_core_suites(&mut reg).expect("unique suite names");
    reg
}

/// Runs the selected suites in registration order. Self-test suites run only
/// when `include_self_tests` is set; `only` restricts to the named suites.
pub fn run_suites(
    reg: &Registry<dyn PropertySuite>,
    cfg: &SuiteConfig,
    only: &[String],
    include_self_tests: bool,
) -> Result<Vec<SuiteOutcome>> {
    cfg.validate()?;
    for name in only {
        reg.get(name)?;
    }
    Ok(reg
        .iter()
        .filter(|s| {
            if only.is_empty() {
                include_self_tests || !s.is_self_test()
            } else {
                only.iter().any(|n| n == s.name())
            }
        })
        .map(|s| s.run(cfg))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        assert!(SuiteConfig::default().validate().is_ok());
        assert!(SuiteConfig { trials: 0, ..Default::default() }.validate().is_err());
        assert!(SuiteConfig { max_dim: 9, ..Default::default() }.validate().is_err());
        assert!(SuiteConfig { max_dim: 1, ..Default::default() }.validate().is_err());
    }

    #[test]
    fn forced_failure_only_on_request() {
        let reg = suites();
        let cfg = SuiteConfig { trials: 2, max_dim: 3, seed: 1 };
        let out = run_suites(&reg, &cfg, &["forced-failure".to_string()], false).unwrap();
        assert_eq!(out.len(), 1);
        let fail = out[0].failure.as_ref().expect("self test must fail");
        assert!(!fail.matrices.is_empty());
        assert!(run_suites(&reg, &cfg, &["nope".to_string()], false).is_err());
    }

    #[test]
    fn small_run_passes() {
        let reg = suites();
        let cfg = SuiteConfig { trials: 3, max_dim: 4, seed: 5 };
        for o in run_suites(&reg, &cfg, &[], false).unwrap() {
            assert!(o.passed(), "{}: {:?}", o.name, o.failure);
        }
    }
}
