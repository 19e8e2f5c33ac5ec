//! The two descending-chain inequalities used to bound the l2 mass of a
//! tail block by l1 masses of the blocks before it.
//!
//! For `a_1 >= ... >= a_{2w} >= 0`:
//!
//! ```text
//! sqrt(a_{w+1}^2 + ... + a_{2w}^2) <= (a_1 + ... + a_{2w}) / (2 sqrt w)
//! ```
//!
//! and for `a_1 >= ... >= a_{3w} >= 0`:
//!
//! ```text
//! sqrt(a_{w+1}^2 + ... + a_{3w}^2)
//!     <= (a_1 + ... + a_w + 2 (a_{w+1} + ... + a_{2w}) + a_{2w+1} + ... + a_{3w}) / (2 sqrt(2w))
//! ```

use crate::{Error, Result};

/// Relative tolerance for reporting the equality case.
pub const TIGHT_TOL: f64 = 1e-12;

/// A validated nonincreasing, nonnegative chain split into blocks of
/// length `block_w`.
#[derive(Clone, Debug, PartialEq)]
pub struct DescendingChain {
    values: Vec<f64>,
    block_w: usize,
}

impl DescendingChain {
    /// Validates without reordering; an unsorted input is an error.
    pub fn new(values: Vec<f64>, block_w: usize) -> Result<Self> {
        if block_w == 0 {
            return Err(Error::InvalidChain("block width must be positive".into()));
        }
        if let Some(i) = values.iter().position(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(Error::InvalidChain(format!(
                "entry {i} = {} is negative or not finite",
                values[i]
            )));
        }
        if let Some(i) = values.windows(2).position(|w| w[0] < w[1]) {
            return Err(Error::InvalidChain(format!(
                "not descending at position {}: {} < {}",
                i + 1,
                values[i],
                values[i + 1]
            )));
        }
        Ok(DescendingChain { values, block_w })
    }

    /// Sorts `values` descending first.
    pub fn sorted(mut values: Vec<f64>, block_w: usize) -> Result<Self> {
        sort_descending(&mut values);
        Self::new(values, block_w)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn block_w(&self) -> usize {
        self.block_w
    }

    fn expect_blocks(&self, blocks: usize) -> Result<()> {
        if self.values.len() != blocks * self.block_w {
            return Err(Error::InvalidChain(format!(
                "expected length {} ({blocks} blocks of {}), found {}",
                blocks * self.block_w,
                self.block_w,
                self.values.len()
            )));
        }
        Ok(())
    }

    fn block(&self, i: usize) -> &[f64] {
        &self.values[i * self.block_w..(i + 1) * self.block_w]
    }
}

pub fn sort_descending(values: &mut [f64]) {
    values.sort_by(|a, b| b.total_cmp(a));
}

/// Both sides of a chain inequality; the contract is `lhs <= rhs`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChainBound {
    pub lhs: f64,
    pub rhs: f64,
}

impl ChainBound {
    pub fn holds(&self, tol: f64) -> bool {
        self.lhs <= self.rhs + tol
    }

    pub fn is_tight(&self) -> bool {
        (self.lhs - self.rhs).abs() <= TIGHT_TOL * self.rhs.max(1.0)
    }
}

fn sum(xs: &[f64]) -> f64 {
    xs.iter().sum()
}

fn sum_sq(xs: &[f64]) -> f64 {
    xs.iter().map(|x| x * x).sum()
}

/// Two-block inequality on a chain of length `2w`.
pub fn prop22_eval(chain: &DescendingChain) -> Result<ChainBound> {
    chain.expect_blocks(2)?;
    let w = chain.block_w as f64;
    Ok(ChainBound {
        lhs: sum_sq(chain.block(1)).sqrt(),
        rhs: sum(&chain.values) / (2.0 * w.sqrt()),
    })
}

/// Three-block inequality on a chain of length `3w`; the middle block is
/// weighted twice on the right.
pub fn prop23_eval(chain: &DescendingChain) -> Result<ChainBound> {
    chain.expect_blocks(3)?;
    let w = chain.block_w as f64;
    let tail = &chain.values[chain.block_w..];
    Ok(ChainBound {
        lhs: sum_sq(tail).sqrt(),
        rhs: (sum(chain.block(0)) + 2.0 * sum(chain.block(1)) + sum(chain.block(2)))
            / (2.0 * (2.0 * w).sqrt()),
    })
}
