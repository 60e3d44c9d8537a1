//! Multinomial probability mass and moments.

use super::gamma::ln_gamma;
use crate::error::{Error, Result};

/// A multinomial model: `n` independent trials over `k` outcomes.
#[derive(Debug, Clone, PartialEq)]
pub struct MultinomialModel {
    n: u64,
    p: Vec<f64>,
}

impl MultinomialModel {
    /// Validates that every probability lies in the unit interval and the vector sums
    /// to 1 within 1e-9.
    pub fn new(n: u64, p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::invalid("probability vector must be non-empty"));
        }
        let mut sum = 0.0;
        for (i, &pi) in p.iter().enumerate() {
            if !(0.0..=1.0).contains(&pi) || !pi.is_finite() {
                return Err(Error::invalid(format!("p[{i}] = {pi} outside [0, 1]")));
            }
            sum += pi;
        }
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(format!(
                "probabilities sum to {sum}, expected 1"
            )));
        }
        Ok(MultinomialModel { n, p })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn k(&self) -> usize {
        self.p.len()
    }
}

fn ln_factorial(n: u64) -> f64 {
    ln_gamma(n as f64 + 1.0)
}

/// Probability of the count vector `x` under the model, computed in log
/// space: `n!/(x_1!..x_k!) p_1^x_1 .. p_k^x_k`.
pub fn multinomial_pmf(model: &MultinomialModel, x: &[u64]) -> Result<f64> {
    if x.len() != model.k() {
        return Err(Error::invalid(format!(
            "x has {} entries, model has {}",
            x.len(),
            model.k()
        )));
    }
    let total: u64 = x.iter().sum();
    if total != model.n {
        return Err(Error::invalid(format!(
            "counts sum to {total}, model has n = {}",
            model.n
        )));
    }
    let mut log_p = ln_factorial(model.n);
    for (&xi, &pi) in x.iter().zip(&model.p) {
        if xi > 0 && pi == 0.0 {
            return Ok(0.0);
        }
        log_p -= ln_factorial(xi);
        if xi > 0 {
            log_p += xi as f64 * pi.ln();
        }
    }
    Ok(log_p.exp())
}

/// Means, variances, covariance and correlation matrices of the counts.
#[derive(Debug, Clone, PartialEq)]
pub struct MultinomialMoments {
    /// `E(x_i) = n p_i`
    pub expected: Vec<f64>,
    /// `Var(x_i) = n p_i (1 - p_i)`
    pub variance: Vec<f64>,
    /// `Cov(x_i, x_j) = -n p_i p_j` off-diagonal, `Var(x_i)` on it.
    pub covariance: Vec<Vec<f64>>,
    /// `Cov / sqrt(Var_i Var_j)`; `None` where a variance is zero
    /// (p_i in {0, 1} leaves the correlation undefined).
    pub correlation: Vec<Vec<Option<f64>>>,
}

pub fn multinomial_moments(model: &MultinomialModel) -> MultinomialMoments {
    let n = model.n as f64;
    let k = model.k();
    let p = model.p();
    let expected: Vec<f64> = p.iter().map(|&pi| n * pi).collect();
    let variance: Vec<f64> = p.iter().map(|&pi| n * pi * (1.0 - pi)).collect();
    let mut covariance = vec![vec![0.0; k]; k];
    let mut correlation = vec![vec![None; k]; k];
    for i in 0..k {
        for j in 0..k {
            covariance[i][j] = if i == j {
                variance[i]
            } else {
                -n * p[i] * p[j]
            };
            correlation[i][j] = if variance[i] > 0.0 && variance[j] > 0.0 {
                if i == j {
                    Some(1.0)
                } else {
                    Some(covariance[i][j] / (variance[i] * variance[j]).sqrt())
                }
            } else {
                None
            };
        }
    }
    MultinomialMoments {
        expected,
        variance,
        covariance,
        correlation,
    }
}

/// All count vectors of length `k` summing to `n`, in lexicographic order.
///
/// Enumeration support for brute-force pmf checks; small n and k only.
pub fn compositions(n: u64, k: usize) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    let mut current = vec![0u64; k];
    fn recurse(n: u64, idx: usize, current: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if idx == current.len() - 1 {
            current[idx] = n;
            out.push(current.clone());
            return;
        }
        for v in 0..=n {
            current[idx] = v;
            recurse(n - v, idx + 1, current, out);
        }
    }
    if k > 0 {
        recurse(n, 0, &mut current, &mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn pmf_trivial_cases() {
        let fair = MultinomialModel::new(2, vec![0.5, 0.5]).unwrap();
        assert!((multinomial_pmf(&fair, &[1, 1]).unwrap() - 0.5).abs() < 1e-12);

        let degenerate = MultinomialModel::new(3, vec![1.0, 0.0]).unwrap();
        assert!((multinomial_pmf(&degenerate, &[3, 0]).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(multinomial_pmf(&degenerate, &[2, 1]).unwrap(), 0.0);

        assert!(multinomial_pmf(&fair, &[1, 2]).is_err());
        assert!(multinomial_pmf(&fair, &[2]).is_err());
    }

    #[test]
    fn pmf_sums_to_one_by_enumeration() {
        let model = MultinomialModel::new(4, vec![0.2, 0.3, 0.5]).unwrap();
        let comps = compositions(4, 3);
        assert_eq!(comps.len(), 15);
        let total: f64 = comps
            .iter()
            .map(|x| multinomial_pmf(&model, x).unwrap())
            .sum();
        assert!((total - 1.0).abs() < 1e-10, "{total}");
    }

    #[test]
    fn pilu_reference_moments() {
        let p: Vec<f64> = [30u64, 22, 21, 8, 11, 6, 17]
            .iter()
            .map(|&c| c as f64 / 115.0)
            .collect();
        let model = MultinomialModel::new(115, p).unwrap();
        let m = multinomial_moments(&model);
        // Komal Ga index 2, Sudh Ni index 6
        assert!((m.variance[2] - 17.16524).abs() < 1e-3);
        assert!((m.variance[6] - 14.48695).abs() < 1e-3);
        assert!((m.covariance[2][6] - (-3.104351)).abs() < 1e-3);
        assert!((m.correlation[2][6].unwrap() - (-0.19686)).abs() < 1e-3);
        assert_eq!(m.correlation[2][2], Some(1.0));
    }

    #[test]
    fn degenerate_moments() {
        let model = MultinomialModel::new(10, vec![1.0, 0.0]).unwrap();
        let m = multinomial_moments(&model);
        assert_eq!(m.variance, vec![0.0, 0.0]);
        assert_eq!(m.correlation[0][1], None);
        assert_eq!(m.correlation[0][0], None);
    }

    #[test]
    fn model_validation() {
        assert!(MultinomialModel::new(3, vec![]).is_err());
        assert!(MultinomialModel::new(3, vec![0.5, 0.6]).is_err());
        assert!(MultinomialModel::new(3, vec![1.2, -0.2]).is_err());
    }

    proptest! {
        #[test]
        fn covariance_rows_sum_to_zero(weights in proptest::collection::vec(0.01f64..10.0, 2..8), n in 1u64..500) {
            let total: f64 = weights.iter().sum();
            let p: Vec<f64> = weights.iter().map(|w| w / total).collect();
            let model = MultinomialModel::new(n, p).unwrap();
            let m = multinomial_moments(&model);
            for row in &m.covariance {
                let s: f64 = row.iter().sum();
                prop_assert!(s.abs() < 1e-9 * n as f64, "row sum {s}");
            }
        }
    }
}
