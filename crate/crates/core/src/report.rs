use serde::{Deserialize, Serialize};

/// Global tolerance for deciding whether a checked inequality holds.
pub const TAU_CHECK: f64 = 1e-9;

/// Outcome of checking one inequality `lhs <= rhs`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - lhs`; negative means the inequality is violated.
    pub slack: f64,
    pub holds: bool,
    /// `slack / rhs` when `rhs > 0`, for comparing instances of different size.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalized_slack: Option<f64>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub dims: Vec<usize>,
}

impl InequalityReport {
    pub fn new(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Self::with_tol(name, lhs, rhs, TAU_CHECK)
    }

    pub fn with_tol(name: impl Into<String>, lhs: f64, rhs: f64, tol: f64) -> Self {
        let slack = rhs - lhs;
        Self {
            name: name.into(),
            lhs,
            rhs,
            slack,
            holds: slack >= -tol,
            normalized_slack: (rhs > 0.0).then(|| slack / rhs),
            seed: None,
            dims: Vec::new(),
        }
    }

    /// Re-evaluates `holds` against a different tolerance.
    pub fn recheck(mut self, tol: f64) -> Self {
        self.holds = self.slack >= -tol;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_dims(mut self, dims: &[usize]) -> Self {
        self.dims = dims.to_vec();
        self
    }
}
