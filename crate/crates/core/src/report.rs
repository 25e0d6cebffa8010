//! Uniform verdict records shared by every verifier and the command line.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

/// One named check. Failed checks always carry a witness.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub check: String,
    pub verdict: Verdict,
    pub witness: Option<String>,
    pub value: Option<f64>,
}

impl Check {
    pub fn new(check: impl Into<String>, ok: bool, witness: impl FnOnce() -> String) -> Self {
        Check {
            check: check.into(),
            verdict: if ok { Verdict::Pass } else { Verdict::Fail },
            witness: if ok { None } else { Some(witness()) },
            value: None,
        }
    }

    /// Passes when `value <= tol`.
    pub fn residual(check: impl Into<String>, value: f64, tol: f64) -> Self {
        let mut c = Check::new(check, value <= tol, || format!("residual {value:.3e} exceeds {tol:.1e}"));
        c.value = Some(value);
        c
    }

    pub fn with_value(mut self, value: f64) -> Self {
        self.value = Some(value);
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// Anything that can be flattened into checks.
pub trait Verdicts {
    fn checks(&self) -> Vec<Check>;

    fn all_passed(&self) -> bool {
        self.checks().iter().all(Check::passed)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockRow {
    pub orbit: usize,
    pub dim: usize,
    pub multiplicity: usize,
}

/// A pipeline run: verdicts, block table and timing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub pipeline: String,
    pub input_digest: String,
    pub checks: Vec<Check>,
    pub blocks: Vec<BlockRow>,
    /// Wall-clock time; left out unless asked for, so reports stay reproducible.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn witnesses_only_on_failure() {
        assert!(Check::new("a", true, || "x".into()).witness.is_none());
        let c = Check::residual("b", 1.0, 1e-8);
        assert_eq!(c.verdict, Verdict::Fail);
        assert!(c.witness.unwrap().contains("exceeds"));
        let json = serde_json::to_string(&Check::residual("c", 0.0, 1e-8)).unwrap();
        assert!(json.contains("\"pass\""));
    }
}
