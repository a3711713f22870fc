#![no_std]
extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod adjust;
pub mod combine;
pub mod convolution;
pub mod distributions;
pub mod error;
pub mod laws;
pub mod metrics;
pub mod quadrature;
pub mod special;

pub use adjust::{
    adjust, adjust_generic, continuous_moments, AdjustedStatistic, Method, MethodSpec, Orientation,
    Tail,
};
pub use combine::{
    combine, combine_observations, surrogate, surrogate_quantile, surrogate_tail_p, CombinedResult,
    Combiner, SurrogateDist,
};
pub use convolution::{exact_convolution, DiscreteSum};
pub use distributions::{
    custom_pvalue_distribution, observed_pvalue, pvalue_distribution, DiscretePValueDist, Family,
    ModelSpec, ObservedPValue, Side, StatisticModel,
};
pub use error::{Error, Result};
pub use laws::{ContinuousLaw, Quantile};
pub use metrics::{
    rank_methods, scaled_w2, variance_ratio, w2_discrete_continuous, w2_lower_bound, MethodMetrics,
    MetricsReport,
};
