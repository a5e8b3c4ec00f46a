use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Outcome of checking one relation. Serializes as
/// `{"relation": ..., "residual": ..., "pass": ...}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub relation: String,
    pub residual: f64,
    pub pass: bool,
    #[serde(skip)]
    pub bound: f64,
}

impl Report {
    /// Passes iff `residual <= bound`. A NaN residual never passes.
    pub fn check(relation: impl Into<String>, residual: f64, bound: f64) -> Self {
        Self {
            relation: relation.into(),
            residual,
            pass: residual <= bound,
            bound,
        }
    }

    pub fn into_result(self) -> Result<Self, Error> {
        if self.pass {
            Ok(self)
        } else {
            Err(Error::VerificationFailed {
                relation: self.relation,
                residual: self.residual,
                bound: self.bound,
            })
        }
    }
}

/// A group of reports; passes iff every member passes.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ReportSet {
    pub reports: Vec<Report>,
}

impl ReportSet {
    pub fn new(reports: Vec<Report>) -> Self {
        Self { reports }
    }

    pub fn pass(&self) -> bool {
        self.reports.iter().all(|r| r.pass)
    }

    pub fn first_failure(&self) -> Option<&Report> {
        self.reports.iter().find(|r| !r.pass)
    }

    pub fn max_residual(&self) -> f64 {
        self.reports.iter().map(|r| r.residual).fold(0.0, f64::max)
    }

    pub fn get(&self, relation: &str) -> Option<&Report> {
        self.reports.iter().find(|r| r.relation == relation)
    }

    pub fn into_result(self) -> Result<Self, Error> {
        match self.first_failure() {
            Some(r) => Err(Error::VerificationFailed {
                relation: r.relation.clone(),
                residual: r.residual,
                bound: r.bound,
            }),
            None => Ok(self),
        }
    }
}

impl FromIterator<Report> for ReportSet {
    fn from_iter<I: IntoIterator<Item = Report>>(iter: I) -> Self {
        Self::new(iter.into_iter().collect())
    }
}
