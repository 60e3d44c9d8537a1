//! Class pooling for the goodness-of-fit test.
//!
//! Chi-square needs every theoretical cell frequency to be at least the
//! floor (conventionally 5), and only adjacent classes may be pooled.
//! `auto_pool` finds a contiguous partition with the maximum number of
//! blocks subject to the floor, breaking ties toward the leftmost cuts.

use std::fmt;

use crate::error::{Error, Result};

/// An ordered partition of class indices `0..k` into contiguous blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PoolingSpec {
    blocks: Vec<Vec<usize>>,
}

impl PoolingSpec {
    /// Validates that `blocks` cover `0..k` exactly once, in order, each
    /// block contiguous.
    pub fn new(blocks: Vec<Vec<usize>>, k: usize) -> Result<Self> {
        let mut next = 0usize;
        for block in &blocks {
            if block.is_empty() {
                return Err(Error::invalid("pooling block must be non-empty"));
            }
            for &idx in block {
                if idx != next {
                    return Err(Error::invalid(format!(
                        "pooling blocks must cover 0..{k} contiguously; expected index {next}, got {idx}"
                    )));
                }
                next += 1;
            }
        }
        if next != k {
            return Err(Error::invalid(format!(
                "pooling covers {next} of {k} classes"
            )));
        }
        Ok(PoolingSpec { blocks })
    }

    pub fn singletons(k: usize) -> Self {
        PoolingSpec {
            blocks: (0..k).map(|i| vec![i]).collect(),
        }
    }

    /// Parses an explicit 1-based block list like `1;2;3;4-7`.
    pub fn parse(s: &str, k: usize) -> Result<Self> {
        let mut blocks = Vec::new();
        for part in s.split(';') {
            let part = part.trim();
            let block = if let Some((a, b)) = part.split_once('-') {
                let lo: usize = a
                    .trim()
                    .parse()
                    .map_err(|_| Error::invalid(format!("bad pooling range '{part}'")))?;
                let hi: usize = b
                    .trim()
                    .parse()
                    .map_err(|_| Error::invalid(format!("bad pooling range '{part}'")))?;
                if lo == 0 || hi < lo {
                    return Err(Error::invalid(format!("bad pooling range '{part}'")));
                }
                (lo - 1..hi).collect()
            } else {
                let idx: usize = part
                    .parse()
                    .map_err(|_| Error::invalid(format!("bad pooling class '{part}'")))?;
                if idx == 0 {
                    return Err(Error::invalid("pooling classes are 1-based"));
                }
                vec![idx - 1]
            };
            blocks.push(block);
        }
        PoolingSpec::new(blocks, k)
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn n_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Sums `values` over each block.
    pub fn pool(&self, values: &[f64]) -> Vec<f64> {
        self.blocks
            .iter()
            .map(|b| b.iter().map(|&i| values[i]).sum())
            .collect()
    }

    pub fn pool_counts(&self, values: &[u64]) -> Vec<u64> {
        self.blocks
            .iter()
            .map(|b| b.iter().map(|&i| values[i]).sum())
            .collect()
    }
}

impl fmt::Display for PoolingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .blocks
            .iter()
            .map(|b| {
                if b.len() == 1 {
                    format!("{}", b[0] + 1)
                } else {
                    format!("{}-{}", b[0] + 1, b[b.len() - 1] + 1)
                }
            })
            .collect();
        f.write_str(&parts.join(";"))
    }
}

/// Finds a maximal-block contiguous pooling with every block sum at least
/// `min_expected`; ties break toward the leftmost block boundaries.
///
/// Errors when even the single all-covering block falls below the floor.
#[allow(clippy::needless_range_loop)] // index arithmetic over cut points
pub fn auto_pool(expected: &[f64], min_expected: f64) -> Result<PoolingSpec> {
    let k = expected.len();
    if k == 0 {
        return Err(Error::invalid("auto_pool needs at least one class"));
    }
    // prefix[i] = sum of expected[0..i]
    let mut prefix = vec![0.0; k + 1];
    for i in 0..k {
        prefix[i + 1] = prefix[i] + expected[i];
    }
    let block_sum = |i: usize, j: usize| prefix[j] - prefix[i];

    // max_blocks[i] = best block count partitioning expected[i..], None if infeasible
    let mut max_blocks: Vec<Option<usize>> = vec![None; k + 1];
    max_blocks[k] = Some(0);
    for i in (0..k).rev() {
        let mut best: Option<usize> = None;
        for j in i + 1..=k {
            if block_sum(i, j) >= min_expected {
                if let Some(rest) = max_blocks[j] {
                    best = Some(best.map_or(rest + 1, |b: usize| b.max(rest + 1)));
                }
            }
        }
        max_blocks[i] = best;
    }

    let total_blocks = max_blocks[0].ok_or_else(|| {
        Error::invalid(format!(
            "total expected count {:.4} is below the pooling floor {min_expected}",
            prefix[k]
        ))
    })?;

    // leftmost-greedy walk: cut as early as possible while preserving the optimum
    let mut blocks = Vec::with_capacity(total_blocks);
    let mut i = 0usize;
    let mut remaining = total_blocks;
    while i < k {
        let j = (i + 1..=k)
            .find(|&j| block_sum(i, j) >= min_expected && max_blocks[j] == Some(remaining - 1))
            .expect("feasible cut must exist by construction");
        blocks.push((i..j).collect());
        i = j;
        remaining -= 1;
    }
    Ok(PoolingSpec { blocks })
}
