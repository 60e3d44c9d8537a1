//! Chi-square goodness-of-fit statistic and its upper-tail probability.

use super::freq::FrequencyTable;
use super::gamma::reg_upper_gamma;
use super::pool::PoolingSpec;
use crate::error::{Error, Result};

/// Result of one goodness-of-fit test.
#[derive(Debug, Clone, PartialEq)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
    pub pooling: PoolingSpec,
}

/// Computes `sum over blocks of (O_b - E_b)^2 / E_b` with `#blocks - 1`
/// degrees of freedom.
pub fn chi_square_gof(
    observed: &FrequencyTable,
    expected: &[f64],
    pooling: &PoolingSpec,
) -> Result<ChiSquareResult> {
    if observed.counts().len() != expected.len() {
        return Err(Error::invalid(format!(
            "observed has {} classes but expected has {}",
            observed.counts().len(),
            expected.len()
        )));
    }
    // the pooling must cover exactly this class count
    let covered: usize = pooling.blocks().iter().map(|b| b.len()).sum();
    if covered != expected.len() {
        return Err(Error::invalid(format!(
            "pooling covers {covered} classes but the table has {}",
            expected.len()
        )));
    }
    if pooling.n_blocks() < 2 {
        return Err(Error::invalid(
            "chi-square needs at least two pooled classes",
        ));
    }
    let pooled_obs = pooling.pool_counts(observed.counts());
    let pooled_exp = pooling.pool(expected);
    let mut statistic = 0.0;
    for (&o, &e) in pooled_obs.iter().zip(&pooled_exp) {
        if e <= 0.0 {
            return Err(Error::invalid("pooled expected count must be positive"));
        }
        let d = o as f64 - e;
        statistic += d * d / e;
    }
    let df = pooling.n_blocks() - 1;
    let p_value = chi_square_pvalue(statistic, df as u32);
    Ok(ChiSquareResult {
        statistic,
        df,
        p_value,
        pooling: pooling.clone(),
    })
}

/// Upper-tail probability of the chi-square distribution:
/// `Q(df/2, statistic/2)` via the regularized incomplete gamma.
pub fn chi_square_pvalue(statistic: f64, df: u32) -> f64 {
    debug_assert!(df >= 1);
    let statistic = statistic.max(0.0);
    reg_upper_gamma(df as f64 / 2.0, statistic / 2.0)
}
