//! Moment-matched surrogate nulls for sums of adjusted statistics, and the
//! resulting global p-values.

use alloc::vec::Vec;

use libm::sqrt;

use crate::adjust::{adjust, AdjustedStatistic, Method, Tail};
use crate::distributions::DiscretePValueDist;
use crate::error::{Error, Result};
use crate::laws::ContinuousLaw;

/// Relative tolerance for matching an observed p-value to an atom.
pub const ATOM_MATCH_TOLERANCE: f64 = 1e-9;

/// Parametric null for the sum of `n` adjusted statistics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurrogateDist {
    /// Either `Gamma { shape, scale }` or `Normal { mean, sd }`.
    pub law: ContinuousLaw,
    pub n: usize,
    pub tail: Tail,
}

impl SurrogateDist {
    pub fn mean(&self) -> f64 {
        self.law.mean()
    }

    pub fn variance(&self) -> f64 {
        self.law.variance()
    }

    /// Probability, under the surrogate, of a sum at least as extreme as `s`
    /// in the rejection direction.
    pub fn tail_p(&self, s: f64) -> f64 {
        match self.tail {
            Tail::Upper => self.law.sf(s),
            Tail::Lower => self.law.cdf(s),
        }
    }

    /// The `p` quantile.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::ProbabilityOutOfRange(p));
        }
        Ok(self.law.quantile(p))
    }

    /// The rejection threshold at level `alpha`: the upper `alpha` point for
    /// upper-tail methods, the lower one otherwise.
    pub fn critical_value(&self, alpha: f64) -> Result<f64> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::ProbabilityOutOfRange(alpha));
        }
        Ok(match self.tail {
            Tail::Upper => self.law.isf(alpha),
            Tail::Lower => self.law.quantile(alpha),
        })
    }
}

/// Builds the surrogate for `method` from per-test adjusted variances.
///
/// With `ν̄` the mean variance and `n` the count: Fisher and Pearson get
/// `Gamma(4n/ν̄, ν̄/2)`; Stouffer and George `Normal(0, √(nν̄))`; Edgington
/// `Normal(n/2, √(nν̄))`.
pub fn surrogate(method: Method, variances: &[f64]) -> Result<SurrogateDist> {
    if variances.is_empty() {
        return Err(Error::EmptyInput);
    }
    for (index, &value) in variances.iter().enumerate() {
        if !(value > 0.0 && value.is_finite()) {
            return Err(Error::NonPositiveVariance { index, value });
        }
    }
    let n = variances.len();
    let nf = n as f64;
    let total: f64 = variances.iter().sum();
    let nu = total / nf;
    let law = match method {
        Method::Fisher | Method::Pearson => ContinuousLaw::Gamma {
            shape: 4.0 * nf / nu,
            scale: nu / 2.0,
        },
        Method::Stouffer | Method::George | Method::Edgington => ContinuousLaw::Normal {
            mean: nf * method.spec().continuous_mean,
            sd: sqrt(total),
        },
    };
    Ok(SurrogateDist {
        law,
        n,
        tail: method.spec().tail,
    })
}

/// Upper-tail probability for upper-tail surrogates, lower-tail otherwise.
pub fn surrogate_tail_p(surrogate: &SurrogateDist, s: f64) -> f64 {
    surrogate.tail_p(s)
}

/// Inverse CDF of the surrogate.
pub fn surrogate_quantile(surrogate: &SurrogateDist, p: f64) -> Result<f64> {
    surrogate.quantile(p)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CombinedResult {
    pub method: Method,
    pub n: usize,
    pub statistic: f64,
    pub surrogate: SurrogateDist,
    pub global_p: f64,
    /// Atom index used from each input distribution.
    pub indices: Vec<usize>,
}

/// Adjusts each distribution once; reusable across many combinations.
#[derive(Debug, Clone)]
pub struct Combiner {
    method: Method,
    adjusted: Vec<AdjustedStatistic>,
    surrogate: SurrogateDist,
}

impl Combiner {
    pub fn new(method: Method, dists: &[DiscretePValueDist]) -> Result<Self> {
        if dists.is_empty() {
            return Err(Error::EmptyInput);
        }
        let adjusted: Vec<AdjustedStatistic> = dists.iter().map(|d| adjust(method, d)).collect();
        if let Some(index) = adjusted.iter().position(|a| a.is_degenerate()) {
            return Err(Error::Degenerate { index });
        }
        let variances: Vec<f64> = adjusted.iter().map(|a| a.variance).collect();
        let surrogate = surrogate(method, &variances)?;
        Ok(Combiner {
            method,
            adjusted,
            surrogate,
        })
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn surrogate(&self) -> &SurrogateDist {
        &self.surrogate
    }

    pub fn adjusted(&self) -> &[AdjustedStatistic] {
        &self.adjusted
    }

    /// Sum of adjusted values at the given atom indices, one per input.
    pub fn statistic(&self, indices: &[usize]) -> f64 {
        indices
            .iter()
            .zip(&self.adjusted)
            .map(|(&i, a)| a.z[i])
            .sum()
    }

    pub fn combine_indices(&self, indices: &[usize]) -> Result<CombinedResult> {
        if indices.len() != self.adjusted.len() {
            return Err(Error::LengthMismatch {
                expected: self.adjusted.len(),
                found: indices.len(),
            });
        }
        for (j, (&i, a)) in indices.iter().zip(&self.adjusted).enumerate() {
            if i >= a.len() {
                return Err(Error::UnmatchedPValue {
                    index: j,
                    value: f64::NAN,
                });
            }
        }
        let statistic = self.statistic(indices);
        Ok(CombinedResult {
            method: self.method,
            n: indices.len(),
            statistic,
            surrogate: self.surrogate,
            global_p: self.surrogate.tail_p(statistic),
            indices: indices.to_vec(),
        })
    }

    pub fn combine_pvalues(&self, observed: &[f64]) -> Result<CombinedResult> {
        if observed.len() != self.adjusted.len() {
            return Err(Error::LengthMismatch {
                expected: self.adjusted.len(),
                found: observed.len(),
            });
        }
        let indices = observed
            .iter()
            .zip(&self.adjusted)
            .enumerate()
            .map(|(j, (&p, a))| {
                a.source
                    .match_atom(p, ATOM_MATCH_TOLERANCE)
                    .ok_or(Error::UnmatchedPValue { index: j, value: p })
            })
            .collect::<Result<Vec<usize>>>()?;
        self.combine_indices(&indices)
    }
}

/// Combines observed p-values, each an atom of the corresponding
/// distribution.
pub fn combine(
    method: Method,
    observed: &[f64],
    dists: &[DiscretePValueDist],
) -> Result<CombinedResult> {
    if observed.len() != dists.len() {
        return Err(Error::LengthMismatch {
            expected: dists.len(),
            found: observed.len(),
        });
    }
    Combiner::new(method, dists)?.combine_pvalues(observed)
}

/// Combines raw observations of each distribution's statistic model.
pub fn combine_observations(
    method: Method,
    observations: &[i64],
    dists: &[DiscretePValueDist],
) -> Result<CombinedResult> {
    if observations.len() != dists.len() {
        return Err(Error::LengthMismatch {
            expected: dists.len(),
            found: observations.len(),
        });
    }
    let indices = observations
        .iter()
        .zip(dists)
        .map(|(&x, d)| d.observe(x).map(|o| o.index))
        .collect::<Result<Vec<usize>>>()?;
    Combiner::new(method, dists)?.combine_indices(&indices)
}
