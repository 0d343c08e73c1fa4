//! Named example families with their closed-form expected quantities.

use crate::bounds::{
    drazin_family, drazin_family_distance_sq, drazin_family_gram_eigenvalues, drazin_family_min_sq, q_family,
    q_family_min_distance,
};
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::registry::{Named, Registry};

pub const DEFAULT_A: f64 = 1.0;
pub const DEFAULT_N: usize = 1;

#[derive(Clone, Copy, Debug, Default)]
pub struct FamilyParams {
    pub a: Option<f64>,
    pub n: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expected {
    Scalar(f64),
    Integer(i64),
    List(Vec<f64>),
}

#[derive(Clone, Debug)]
pub struct FamilyOutput {
    /// The family member itself.
    pub matrix: ComplexMatrix,
    /// Companion matrices keyed by a short role name.
    pub companions: Vec<(&'static str, ComplexMatrix)>,
    pub parameters: Vec<(&'static str, Expected)>,
    /// Closed-form values, keyed like the fields of an analysis report.
    pub expected: Vec<(&'static str, Expected)>,
}

pub trait Family: Named + Send + Sync {
    fn description(&self) -> &'static str;
    fn build(&self, params: &FamilyParams) -> Result<FamilyOutput>;
}

pub struct QaFamily;

impl Named for QaFamily {
    fn name(&self) -> &'static str {
        "qa"
    }
}

impl Family for QaFamily {
    fn description(&self) -> &'static str {
        "Q_a = [[1, a], [0, 0]]"
    }

    fn build(&self, params: &FamilyParams) -> Result<FamilyOutput> {
        if params.n.is_some() {
            return Err(Error::InvalidParameter("family qa takes no n".into()));
        }
        let a = params.a.unwrap_or(DEFAULT_A);
        let q = q_family(a)?;
        let s = 1.0 + a * a;
        let min = q_family_min_distance(a);
        Ok(FamilyOutput {
            matrix: q.into_matrix(),
            companions: Vec::new(),
            parameters: vec![("a", Expected::Scalar(a))],
            expected: vec![
                ("rank", Expected::Integer(1)),
                ("min_distance", Expected::Scalar(min)),
                ("max_distance", Expected::Scalar((s + s.sqrt()).sqrt())),
                ("lambda1", Expected::Scalar(a)),
                ("lambda2", Expected::Scalar((a * a + 2.0).sqrt())),
                ("invariant_constant", Expected::Scalar(2.0 * s)),
                ("bilateral_ratio", Expected::Scalar(min / a)),
                ("qq_star_eigenvalues", Expected::List(vec![s])),
            ],
        })
    }
}

pub struct DrazinFamily;

impl Named for DrazinFamily {
    fn name(&self) -> &'static str {
        "drazin"
    }
}

impl Family for DrazinFamily {
    fn description(&self) -> &'static str {
        "A_{n,a} = [[I, aI], [0, J_n]] with Drazin inverse Q_{n,a} = [[I, a(I + J_n)], [0, 0]]"
    }

    fn build(&self, params: &FamilyParams) -> Result<FamilyOutput> {
        let a = params.a.unwrap_or(DEFAULT_A);
        let n = params.n.unwrap_or(DEFAULT_N);
        let (am, q) = drazin_family(n, a)?;
        let m = 4 * n;
        let mut range_diag = vec![0.0; m];
        range_diag[..2 * n + 1].fill(1.0);
        let aa_dag = ComplexMatrix::from_real_diagonal(&range_diag);
        let min_sq = drazin_family_min_sq(n, a);
        let dist_sq = drazin_family_distance_sq(n, a);
        Ok(FamilyOutput {
            matrix: am,
            companions: vec![("q", q.into_matrix()), ("aa_dagger", aa_dag)],
            parameters: vec![
                ("n", Expected::Integer(n as i64)),
                ("a", Expected::Scalar(a)),
                ("drazin_index", Expected::Integer(2)),
            ],
            expected: vec![
                ("rank", Expected::Integer(2 * n as i64)),
                ("projection_rank", Expected::Integer(2 * n as i64 + 1)),
                ("min_distance", Expected::Scalar(min_sq.sqrt())),
                ("qq_star_eigenvalues", Expected::List(drazin_family_gram_eigenvalues(n, a))),
                ("distance", Expected::Scalar(dist_sq.sqrt())),
                ("distance_squared", Expected::Scalar(dist_sq)),
                ("lambda_pq", Expected::Scalar((min_sq + 1.0).sqrt())),
                ("ratio_squared", Expected::Scalar(dist_sq / (min_sq + 1.0))),
            ],
        })
    }
}

pub fn families() -> Registry<dyn Family> {
    Registry::new("family")
        .with(Box::new(QaFamily) as Box<dyn Family>)
        .with(Box::new(DrazinFamily))
}
