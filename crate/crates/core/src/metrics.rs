//! Method-selection diagnostics: 1-D Wasserstein distances by quantile
//! coupling, the variance ratio and the single-cell lower bound.

use alloc::vec::Vec;

use libm::{fabs, sqrt};

use crate::adjust::{adjust, AdjustedStatistic, Method};
use crate::distributions::DiscretePValueDist;
use crate::error::{Error, Result};
use crate::laws::ContinuousLaw;
use crate::quadrature::{integrate_scalar, QuadratureError, Tolerance};
use crate::special::{norm_isf, norm_pdf, norm_quantile};

/// Absolute quadrature tolerance on each transport cell.
pub const CELL_TOLERANCE: f64 = 1e-12;
const TIE_REL: f64 = 1e-12;

fn cell_tolerance() -> Tolerance {
    Tolerance {
        abs: CELL_TOLERANCE,
        rel: 0.0,
        max_panels: 4000,
    }
}

/// Probability level carried with its complement, both to full precision.
#[derive(Debug, Clone, Copy)]
struct Level {
    w: f64,
    v: f64,
}

fn quantile_at(law: &ContinuousLaw, w: f64, v: f64) -> f64 {
    if w <= 0.5 {
        law.quantile(w)
    } else {
        law.isf(v)
    }
}

/// `t = u²(3 - 2u)` maps [0, 1] onto itself with zero slope at both ends,
/// which tames the endpoint singularities of unbounded quantiles. Returns
/// `(t, 1 - t, dt/du)`.
#[inline]
fn smoothstep(u: f64) -> (f64, f64, f64) {
    let s = 1.0 - u;
    (
        u * u * (3.0 - 2.0 * u),
        s * s * (1.0 + 2.0 * u),
        6.0 * u * s,
    )
}

/// `∫ (z - Q(w))² dw` over `[lo.w, hi.w]` on the probability scale.
fn cost_probability_scale(
    z: f64,
    law: &ContinuousLaw,
    lo: Level,
    hi: Level,
) -> core::result::Result<f64, QuadratureError> {
    let d = hi.w - lo.w;
    integrate_scalar(
        |u| {
            let (t, t_bar, jac) = smoothstep(u);
            if jac == 0.0 {
                return 0.0;
            }
            let w = lo.w + t * d;
            let v = hi.v + t_bar * d;
            let e = z - quantile_at(law, w, v);
            e * e * jac * d
        },
        0.0,
        1.0,
        cell_tolerance(),
    )
}

/// `∫ (z - y)² g(y) dy` over a cell with finite endpoints.
fn cost_value_scale(
    z: f64,
    law: &ContinuousLaw,
    y0: f64,
    y1: f64,
) -> core::result::Result<f64, QuadratureError> {
    integrate_scalar(
        |y| {
            let e = z - y;
            e * e * law.pdf(y)
        },
        y0,
        y1,
        cell_tolerance(),
    )
}

/// `σ² ∫_α^β (c - x)² φ(x) dx` with `ΔΦ = d`, `c = (z - μ)/σ`.
fn normal_cell(z: f64, mean: f64, sd: f64, lo: Level, hi: Level, d: f64) -> f64 {
    let c = (z - mean) / sd;
    // (φ(x), xφ(x)) at a standard-normal level, zero at ±∞.
    let ends = |l: Level| -> (f64, f64) {
        if l.w <= 0.0 || l.v <= 0.0 {
            (0.0, 0.0)
        } else {
            let x = if l.w <= 0.5 {
                norm_quantile(l.w)
            } else {
                norm_isf(l.v)
            };
            let p = norm_pdf(x);
            (p, x * p)
        }
    };
    let (pa, xpa) = ends(lo);
    let (pb, xpb) = ends(hi);
    let val = (c * c + 1.0) * d + 2.0 * c * (pb - pa) - (xpb - xpa);
    sd * sd * val.max(0.0)
}

fn uniform_cell(z: f64, lo_y: f64, hi_y: f64, width: f64) -> f64 {
    let (a, b) = (z - lo_y, z - hi_y);
    (a * a * a - b * b * b) / (3.0 * width)
}

/// Per-atom transport costs `∫_{P(Z<z_i)}^{P(Z≤z_i)} (z_i - Q(w))² dw`,
/// for `(value, mass)` pairs sorted by value.
pub fn cell_costs(points: &[(f64, f64)], law: &ContinuousLaw) -> Result<Vec<f64>> {
    let m = points.len();
    // Cumulative levels and their complements, each accumulated from its
    // own end of the distribution.
    let mut below = Vec::with_capacity(m + 1);
    let mut acc = 0.0;
    below.push(0.0);
    for &(_, p) in points {
        acc += p;
        below.push(acc);
    }
    let mut above = alloc::vec![0.0; m + 1];
    let mut acc = 0.0;
    for i in (0..m).rev() {
        acc += points[i].1;
        above[i] = acc;
    }
    let level = |k: usize| -> Level {
        if k == 0 {
            Level { w: 0.0, v: 1.0 }
        } else if k == m {
            Level { w: 1.0, v: 0.0 }
        } else {
            Level {
                w: below[k],
                v: above[k],
            }
        }
    };

    let mut out = Vec::with_capacity(m);
    for (i, &(z, p)) in points.iter().enumerate() {
        let (lo, hi) = (level(i), level(i + 1));
        let cost = match *law {
            ContinuousLaw::Normal { mean, sd } => normal_cell(z, mean, sd, lo, hi, p),
            ContinuousLaw::Uniform { lo: a, hi: b } => {
                let y0 = quantile_at(law, lo.w, lo.v);
                let y1 = quantile_at(law, hi.w, hi.v);
                uniform_cell(z, y0, y1, b - a)
            }
            ContinuousLaw::Gamma { .. } | ContinuousLaw::Logistic { .. } => {
                let y0 = match (*law, lo.w <= 0.0) {
                    // The gamma law starts at 0, so its first cell is finite.
                    (ContinuousLaw::Gamma { .. }, true) => 0.0,
                    (_, true) => f64::NEG_INFINITY,
                    _ => quantile_at(law, lo.w, lo.v),
                };
                let y1 = if hi.v <= 0.0 {
                    f64::INFINITY
                } else {
                    quantile_at(law, hi.w, hi.v)
                };
                let r = if y0.is_finite() && y1.is_finite() {
                    cost_value_scale(z, law, y0, y1)
                } else {
                    cost_probability_scale(z, law, lo, hi)
                };
                r.map_err(|source| Error::Quadrature { cell: i, source })?
            }
        };
        out.push(cost);
    }
    Ok(out)
}

/// W2 between an adjusted statistic and a continuous law, by quantile
/// coupling.
pub fn w2_discrete_continuous(adjusted: &AdjustedStatistic, law: &ContinuousLaw) -> Result<f64> {
    let costs = cell_costs(&adjusted.sorted(), law)?;
    Ok(sqrt(costs.iter().sum()))
}

/// W2 between two continuous laws, `(∫_0^1 (Q₁ - Q₂)² dw)^{1/2}`.
pub fn w2_between_laws(a: &ContinuousLaw, b: &ContinuousLaw) -> Result<f64> {
    let half = |lo: Level, hi: Level| -> Result<f64> {
        let d = hi.w - lo.w;
        integrate_scalar(
            |u| {
                let (t, t_bar, jac) = smoothstep(u);
                if jac == 0.0 {
                    return 0.0;
                }
                let w = lo.w + t * d;
                let v = hi.v + t_bar * d;
                let e = quantile_at(a, w, v) - quantile_at(b, w, v);
                e * e * jac * d
            },
            0.0,
            1.0,
            cell_tolerance(),
        )
        .map_err(|source| Error::Quadrature { cell: 0, source })
    };
    let mid = Level { w: 0.5, v: 0.5 };
    let left = half(Level { w: 0.0, v: 1.0 }, mid)?;
    let right = half(mid, Level { w: 1.0, v: 0.0 })?;
    Ok(sqrt(left + right))
}

/// Moment-matched surrogate for a single adjusted term with variance `nu`.
pub fn per_term_surrogate(method: Method, nu: f64) -> ContinuousLaw {
    match method {
        Method::Fisher | Method::Pearson => ContinuousLaw::Gamma {
            shape: 4.0 / nu,
            scale: nu / 2.0,
        },
        _ => ContinuousLaw::Normal {
            mean: method.spec().continuous_mean,
            sd: sqrt(nu),
        },
    }
}

fn non_degenerate(adjusted: &AdjustedStatistic) -> Result<()> {
    if adjusted.is_degenerate() {
        Err(Error::Degenerate { index: 0 })
    } else {
        Ok(())
    }
}

fn sd_y(method: Method) -> f64 {
    sqrt(method.spec().continuous_var)
}

/// `W2(Z, Ỹ) / SD(Y)` with `Ỹ` the per-term surrogate.
pub fn scaled_w2(method: Method, dist: &DiscretePValueDist) -> Result<f64> {
    let z = adjust(method, dist);
    non_degenerate(&z)?;
    let law = per_term_surrogate(method, z.variance);
    Ok(w2_discrete_continuous(&z, &law)? / sd_y(method))
}

/// `ν / Var(Y)`, averaged over `dists` as `Σ ν_j / (n Var(Y))`.
pub fn variance_ratio(method: Method, dists: &[DiscretePValueDist]) -> Result<f64> {
    if dists.is_empty() {
        return Err(Error::EmptyInput);
    }
    let total: f64 = dists.iter().map(|d| adjust(method, d).variance).sum();
    Ok(total / (dists.len() as f64 * method.spec().continuous_var))
}

/// Largest single-cell transport cost against the per-term surrogate,
/// square-rooted and scaled by `SD(Y)`.
pub fn w2_lower_bound(method: Method, dist: &DiscretePValueDist) -> Result<f64> {
    let z = adjust(method, dist);
    non_degenerate(&z)?;
    let law = per_term_surrogate(method, z.variance);
    let costs = cell_costs(&z.sorted(), &law)?;
    let top = costs.iter().cloned().fold(0.0, f64::max);
    Ok(sqrt(top) / sd_y(method))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MethodMetrics {
    pub method: Method,
    pub variance: f64,
    pub ratio: f64,
    pub scaled_w2: f64,
    /// `W2(Z, Y)` against the exact continuous law.
    pub w2_to_y: f64,
    pub lower_bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    /// One row per method, in [`Method::ALL`] order.
    pub rows: Vec<MethodMetrics>,
    pub max_ratio: Method,
    pub min_scaled_w2: Method,
}

impl MetricsReport {
    pub fn get(&self, method: Method) -> &MethodMetrics {
        self.rows
            .iter()
            .find(|r| r.method == method)
            .expect("every method has a row")
    }
}

/// Metrics of one method on one distribution.
pub fn method_metrics(method: Method, dist: &DiscretePValueDist) -> Result<MethodMetrics> {
    let z = adjust(method, dist);
    non_degenerate(&z)?;
    let sorted = z.sorted();
    let surrogate_costs = cell_costs(&sorted, &per_term_surrogate(method, z.variance))?;
    let exact_costs = cell_costs(&sorted, &method.continuous_law())?;
    let sd = sd_y(method);
    Ok(MethodMetrics {
        method,
        variance: z.variance,
        ratio: z.variance / method.spec().continuous_var,
        scaled_w2: sqrt(surrogate_costs.iter().sum()) / sd,
        w2_to_y: sqrt(exact_costs.iter().sum()),
        lower_bound: sqrt(surrogate_costs.iter().cloned().fold(0.0, f64::max)) / sd,
    })
}

fn better(candidate: f64, best: f64, larger: bool) -> bool {
    let margin = TIE_REL * fabs(best).max(fabs(candidate));
    if larger {
        candidate > best + margin
    } else {
        candidate < best - margin
    }
}

/// Computes every method's metrics and the two recommendations.
///
/// Over several distributions the variance and ratio are averaged, and the
/// distances are combined as root mean squares, so that `w2_to_y` stays
/// equal to `√(Var(Y) − ν̄)`.
pub fn rank_methods(dists: &[DiscretePValueDist]) -> Result<MetricsReport> {
    if dists.is_empty() {
        return Err(Error::EmptyInput);
    }
    let k = dists.len() as f64;
    let mut rows = Vec::with_capacity(Method::ALL.len());
    for method in Method::ALL {
        let mut sum = MethodMetrics {
            method,
            variance: 0.0,
            ratio: 0.0,
            scaled_w2: 0.0,
            w2_to_y: 0.0,
            lower_bound: 0.0,
        };
        for (index, d) in dists.iter().enumerate() {
            let m = method_metrics(method, d).map_err(|e| match e {
                Error::Degenerate { .. } => Error::Degenerate { index },
                other => other,
            })?;
            sum.variance += m.variance;
            sum.ratio += m.ratio;
            sum.scaled_w2 += m.scaled_w2 * m.scaled_w2;
            sum.w2_to_y += m.w2_to_y * m.w2_to_y;
            sum.lower_bound += m.lower_bound * m.lower_bound;
        }
        rows.push(MethodMetrics {
            method,
            variance: sum.variance / k,
            ratio: sum.ratio / k,
            scaled_w2: sqrt(sum.scaled_w2 / k),
            w2_to_y: sqrt(sum.w2_to_y / k),
            lower_bound: sqrt(sum.lower_bound / k),
        });
    }
    let mut max_ratio = rows[0];
    let mut min_w2 = rows[0];
    for r in &rows[1..] {
        if better(r.ratio, max_ratio.ratio, true) {
            max_ratio = *r;
        }
        if better(r.scaled_w2, min_w2.scaled_w2, false) {
            min_w2 = *r;
        }
    }
    Ok(MetricsReport {
        max_ratio: max_ratio.method,
        min_scaled_w2: min_w2.method,
        rows,
    })
}
