//! Nonparametric run test for randomness of a sequence.
//!
//! Observations are labeled L or M by comparison to their median; U counts
//! the maximal same-letter runs. Under randomness E(U) = (n+2)/2 and
//! Var(U) = (n/4)(n-2)/(n-1), and Z = (U - E(U))/sqrt(Var(U)) is
//! asymptotically standard normal.

use crate::error::{Error, Result};

/// How observations equal to the median are handled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TiePolicy {
    /// Label ties L, keeping n unchanged.
    #[default]
    AssignL,
    /// Label ties M, keeping n unchanged.
    AssignM,
    /// Remove ties, reducing n.
    Drop,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunTestResult {
    pub n: usize,
    pub runs: usize,
    pub expected_runs: f64,
    pub var_runs: f64,
    pub z: f64,
    /// `|Z| >= 1.96`, rejection at the 5% level.
    pub significant: bool,
}

impl RunTestResult {
    /// Builds the result directly from a sequence length and run count.
    pub fn from_counts(n: usize, runs: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid(format!("run test needs n >= 2, got {n}")));
        }
        if runs < 1 || runs > n {
            return Err(Error::invalid(format!("run count {runs} outside 1..={n}")));
        }
        let nf = n as f64;
        let expected_runs = (nf + 2.0) / 2.0;
        let var_runs = (nf / 4.0) * ((nf - 2.0) / (nf - 1.0));
        let z = if var_runs > 0.0 {
            (runs as f64 - expected_runs) / var_runs.sqrt()
        } else {
            0.0
        };
        Ok(RunTestResult {
            n,
            runs,
            expected_runs,
            var_runs,
            z,
            significant: z.abs() >= 1.96,
        })
    }
}

/// Number of maximal same-value runs in a sequence.
pub fn count_runs<T: PartialEq>(labels: &[T]) -> usize {
    if labels.is_empty() {
        return 0;
    }
    1 + labels.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Runs the median run test over integer codes in arrival order.
pub fn run_test(codes: &[i64], tie_policy: TiePolicy) -> Result<RunTestResult> {
    if codes.len() < 2 {
        return Err(Error::invalid(format!(
            "run test needs at least 2 observations, got {}",
            codes.len()
        )));
    }
    let mut sorted = codes.to_vec();
    sorted.sort_unstable();
    let n = sorted.len();
    let median = if n % 2 == 1 {
        sorted[n / 2] as f64
    } else {
        (sorted[n / 2 - 1] as f64 + sorted[n / 2] as f64) / 2.0
    };

    let mut labels: Vec<bool> = Vec::with_capacity(n); // false = L, true = M
    for &c in codes {
        let v = c as f64;
        if v < median {
            labels.push(false);
        } else if v > median {
            labels.push(true);
        } else {
            match tie_policy {
                TiePolicy::AssignL => labels.push(false),
                TiePolicy::AssignM => labels.push(true),
                TiePolicy::Drop => {}
            }
        }
    }
    if labels.len() < 2 {
        return Err(Error::invalid("sequence degenerate after dropping ties"));
    }
    RunTestResult::from_counts(labels.len(), count_runs(&labels))
}
