//! Exact distribution of a sum of i.i.d. adjusted statistics, feasible for
//! small `n`.

use alloc::vec::Vec;

use libm::fabs;

use crate::adjust::AdjustedStatistic;
use crate::error::{Error, Result};

/// Largest support allowed while convolving.
pub const SUPPORT_CAP: usize = 10_000_000;
/// Support points closer than this (relative to `max(1, |value|)`) merge.
pub const MERGE_TOLERANCE: f64 = 1e-12;

/// A finite discrete law with sorted, distinct support.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteSum {
    pub values: Vec<f64>,
    pub masses: Vec<f64>,
}

impl DiscreteSum {
    pub fn mean(&self) -> f64 {
        self.values
            .iter()
            .zip(&self.masses)
            .map(|(v, p)| v * p)
            .sum()
    }

    /// `P(S < q)`.
    pub fn prob_below(&self, q: f64) -> f64 {
        let k = self.values.partition_point(|&v| v < q);
        self.masses[..k].iter().sum()
    }

    /// `P(S <= q)`.
    pub fn prob_at_most(&self, q: f64) -> f64 {
        let k = self.values.partition_point(|&v| v <= q);
        self.masses[..k].iter().sum()
    }

    /// `P(S >= q)`.
    pub fn prob_at_least(&self, q: f64) -> f64 {
        let k = self.values.partition_point(|&v| v < q);
        self.masses[k..].iter().sum()
    }
}

fn merge(mut pairs: Vec<(f64, f64)>) -> DiscreteSum {
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut values: Vec<f64> = Vec::with_capacity(pairs.len());
    let mut masses: Vec<f64> = Vec::with_capacity(pairs.len());
    for (v, p) in pairs {
        if let Some(&last) = values.last() {
            if fabs(v - last) <= MERGE_TOLERANCE * fabs(last).max(1.0) {
                *masses.last_mut().unwrap() += p;
                continue;
            }
        }
        values.push(v);
        masses.push(p);
    }
    DiscreteSum { values, masses }
}

/// Law of `Z_1 + … + Z_n` for i.i.d. copies of `adjusted`.
pub fn exact_convolution(adjusted: &AdjustedStatistic, n: usize) -> Result<DiscreteSum> {
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    let base = merge(
        adjusted
            .z
            .iter()
            .copied()
            .zip(adjusted.masses.iter().copied())
            .collect(),
    );
    let mut acc = base.clone();
    for _ in 1..n {
        let size = acc.values.len() * base.values.len();
        if size > SUPPORT_CAP {
            return Err(Error::SupportTooLarge {
                size,
                cap: SUPPORT_CAP,
            });
        }
        let mut pairs = Vec::with_capacity(size);
        for (&v, &p) in acc.values.iter().zip(&acc.masses) {
            for (&w, &q) in base.values.iter().zip(&base.masses) {
                pairs.push((v + w, p * q));
            }
        }
        acc = merge(pairs);
    }
    Ok(acc)
}
