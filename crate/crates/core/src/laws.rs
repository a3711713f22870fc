//! Continuous reference laws: the per-term null laws of the combination
//! statistics and the gamma/normal surrogates.

use core::f64::consts::PI;

use libm::{exp, log, log1p};

use crate::special::{
    gamma_density, gamma_p, gamma_p_inv, gamma_q, gamma_q_inv, norm_cdf, norm_isf, norm_pdf,
    norm_quantile, norm_sf,
};

/// A quantile function on (0, 1).
///
/// `upper_quantile(v)` must equal `quantile(1 - v)`; implementors should
/// override it when they can evaluate it without forming `1 - v`.
pub trait Quantile {
    fn quantile(&self, w: f64) -> f64;

    fn upper_quantile(&self, v: f64) -> f64 {
        self.quantile(1.0 - v)
    }
}

impl<F: Fn(f64) -> f64> Quantile for F {
    fn quantile(&self, w: f64) -> f64 {
        self(w)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ContinuousLaw {
    Gamma { shape: f64, scale: f64 },
    Normal { mean: f64, sd: f64 },
    Uniform { lo: f64, hi: f64 },
    Logistic { loc: f64, scale: f64 },
}

impl ContinuousLaw {
    /// Chi-square with two degrees of freedom.
    pub const CHI2_2: ContinuousLaw = ContinuousLaw::Gamma {
        shape: 1.0,
        scale: 2.0,
    };
    pub const STANDARD_NORMAL: ContinuousLaw = ContinuousLaw::Normal { mean: 0.0, sd: 1.0 };
    pub const STANDARD_UNIFORM: ContinuousLaw = ContinuousLaw::Uniform { lo: 0.0, hi: 1.0 };
    pub const STANDARD_LOGISTIC: ContinuousLaw = ContinuousLaw::Logistic {
        loc: 0.0,
        scale: 1.0,
    };

    pub fn mean(&self) -> f64 {
        match *self {
            ContinuousLaw::Gamma { shape, scale } => shape * scale,
            ContinuousLaw::Normal { mean, .. } => mean,
            ContinuousLaw::Uniform { lo, hi } => 0.5 * (lo + hi),
            ContinuousLaw::Logistic { loc, .. } => loc,
        }
    }

    pub fn variance(&self) -> f64 {
        match *self {
            ContinuousLaw::Gamma { shape, scale } => shape * scale * scale,
            ContinuousLaw::Normal { sd, .. } => sd * sd,
            ContinuousLaw::Uniform { lo, hi } => (hi - lo) * (hi - lo) / 12.0,
            ContinuousLaw::Logistic { scale, .. } => scale * scale * PI * PI / 3.0,
        }
    }

    pub fn sd(&self) -> f64 {
        libm::sqrt(self.variance())
    }

    pub fn pdf(&self, x: f64) -> f64 {
        match *self {
            ContinuousLaw::Gamma { shape, scale } => gamma_density(shape, x / scale) / scale,
            ContinuousLaw::Normal { mean, sd } => norm_pdf((x - mean) / sd) / sd,
            ContinuousLaw::Uniform { lo, hi } => {
                if x < lo || x > hi {
                    0.0
                } else {
                    1.0 / (hi - lo)
                }
            }
            ContinuousLaw::Logistic { loc, scale } => {
                let e = exp(-libm::fabs(x - loc) / scale);
                e / (scale * (1.0 + e) * (1.0 + e))
            }
        }
    }

    /// `P(X <= x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            ContinuousLaw::Gamma { shape, scale } => gamma_p(shape, x / scale),
            ContinuousLaw::Normal { mean, sd } => norm_cdf((x - mean) / sd),
            ContinuousLaw::Uniform { lo, hi } => ((x - lo) / (hi - lo)).clamp(0.0, 1.0),
            ContinuousLaw::Logistic { loc, scale } => logistic_cdf((x - loc) / scale),
        }
    }

    /// `P(X > x)`, computed without cancellation.
    pub fn sf(&self, x: f64) -> f64 {
        match *self {
            ContinuousLaw::Gamma { shape, scale } => gamma_q(shape, x / scale),
            ContinuousLaw::Normal { mean, sd } => norm_sf((x - mean) / sd),
            ContinuousLaw::Uniform { lo, hi } => ((hi - x) / (hi - lo)).clamp(0.0, 1.0),
            ContinuousLaw::Logistic { loc, scale } => logistic_cdf(-(x - loc) / scale),
        }
    }

    /// Inverse of [`cdf`](Self::cdf).
    pub fn quantile(&self, p: f64) -> f64 {
        match *self {
            ContinuousLaw::Gamma { shape, scale } => scale * gamma_p_inv(shape, p),
            ContinuousLaw::Normal { mean, sd } => mean + sd * norm_quantile(p),
            ContinuousLaw::Uniform { lo, hi } => lo + p * (hi - lo),
            ContinuousLaw::Logistic { loc, scale } => loc + scale * (log(p) - log1p(-p)),
        }
    }

    /// Inverse of [`sf`](Self::sf): the `1 - q` quantile.
    pub fn isf(&self, q: f64) -> f64 {
        match *self {
            ContinuousLaw::Gamma { shape, scale } => scale * gamma_q_inv(shape, q),
            ContinuousLaw::Normal { mean, sd } => mean + sd * norm_isf(q),
            ContinuousLaw::Uniform { lo, hi } => hi - q * (hi - lo),
            ContinuousLaw::Logistic { loc, scale } => loc + scale * (log1p(-q) - log(q)),
        }
    }

    /// Returns the law of `a * X` for `a > 0`.
    pub fn scaled(&self, a: f64) -> ContinuousLaw {
        match *self {
            ContinuousLaw::Gamma { shape, scale } => ContinuousLaw::Gamma {
                shape,
                scale: scale * a,
            },
            ContinuousLaw::Normal { mean, sd } => ContinuousLaw::Normal {
                mean: mean * a,
                sd: sd * a,
            },
            ContinuousLaw::Uniform { lo, hi } => ContinuousLaw::Uniform {
                lo: lo * a,
                hi: hi * a,
            },
            ContinuousLaw::Logistic { loc, scale } => ContinuousLaw::Logistic {
                loc: loc * a,
                scale: scale * a,
            },
        }
    }
}

impl Quantile for ContinuousLaw {
    fn quantile(&self, w: f64) -> f64 {
        ContinuousLaw::quantile(self, w)
    }

    fn upper_quantile(&self, v: f64) -> f64 {
        self.isf(v)
    }
}

fn logistic_cdf(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + exp(-t))
    } else {
        let e = exp(t);
        e / (1.0 + e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use libm::fabs;

    const LAWS: [ContinuousLaw; 5] = [
        ContinuousLaw::CHI2_2,
        ContinuousLaw::Gamma {
            shape: 1040.7,
            scale: 1.9,
        },
        ContinuousLaw::Normal {
            mean: 500.0,
            sd: 8.45,
        },
        ContinuousLaw::STANDARD_UNIFORM,
        ContinuousLaw::STANDARD_LOGISTIC,
    ];

    #[test]
    fn quantile_and_cdf_round_trip() {
        for law in LAWS {
            for &p in &[1e-6, 1e-3, 0.05, 0.3, 0.5, 0.7, 0.95, 0.999, 1.0 - 1e-6] {
                let x = law.quantile(p);
                assert!(fabs(law.cdf(x) - p) < 1e-12, "{law:?} p={p}");
                let y = law.isf(p);
                assert!(fabs(law.sf(y) - p) < 1e-12, "{law:?} q={p}");
            }
        }
    }

    #[test]
    fn tails_sum_to_one() {
        for law in LAWS {
            let x = law.quantile(0.37);
            assert!(fabs(law.cdf(x) + law.sf(x) - 1.0) < 1e-14);
        }
    }

    #[test]
    fn logistic_extremes() {
        let l = ContinuousLaw::STANDARD_LOGISTIC;
        assert!(fabs(l.isf(1e-300) - 690.7755278982137) < 1e-9);
        assert_eq!(l.quantile(0.5), 0.0);
    }
}
