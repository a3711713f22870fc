//! Wasserstein-minimal adjustment of transformed discrete p-values.
//!
//! Each atom `F_i` is replaced by the average of the continuous transform
//! over its probability cell `[F_{i-1}, F_i]`. For the five classical
//! methods the averages have closed forms; any other strictly increasing
//! quantile function goes through [`adjust_generic`].

use alloc::string::ToString;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;
use core::str::FromStr;

use libm::{fabs, log};

use crate::distributions::DiscretePValueDist;
use crate::error::{Error, Result};
use crate::laws::{ContinuousLaw, Quantile};
use crate::quadrature::{integrate, Tolerance};
use crate::special::{log1p_ratio, norm_pdf, norm_quantile, xlogx};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Fisher,
    Pearson,
    George,
    Stouffer,
    Edgington,
}

/// Whether the statistic transforms `P` or `1 - P`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    /// `G⁻¹(P)`
    Direct,
    /// `G⁻¹(1 - P)`
    Reflected,
}

/// Which tail of the combined statistic is evidence against the null.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Tail {
    Upper,
    Lower,
}

impl Method {
    /// Fixed order, also used to break ties in rankings.
    pub const ALL: [Method; 5] = [
        Method::Fisher,
        Method::Pearson,
        Method::George,
        Method::Stouffer,
        Method::Edgington,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Fisher => "fisher",
            Method::Pearson => "pearson",
            Method::George => "george",
            Method::Stouffer => "stouffer",
            Method::Edgington => "edgington",
        }
    }

    pub fn spec(self) -> MethodSpec {
        let (mean, variance) = continuous_moments(self);
        MethodSpec {
            method: Some(self),
            orientation: if self == Method::Fisher {
                Orientation::Reflected
            } else {
                Orientation::Direct
            },
            continuous_mean: mean,
            continuous_var: variance,
            tail: if self == Method::Fisher {
                Tail::Upper
            } else {
                Tail::Lower
            },
        }
    }

    /// Null law of one transformed continuous p-value.
    pub fn continuous_law(self) -> ContinuousLaw {
        match self {
            Method::Fisher | Method::Pearson => ContinuousLaw::CHI2_2,
            Method::George => ContinuousLaw::STANDARD_LOGISTIC,
            Method::Stouffer => ContinuousLaw::STANDARD_NORMAL,
            Method::Edgington => ContinuousLaw::STANDARD_UNIFORM,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::UnknownMethod(s.to_string()))
    }
}

/// Mean and variance of one transformed continuous p-value.
pub fn continuous_moments(method: Method) -> (f64, f64) {
    match method {
        Method::Fisher | Method::Pearson => (2.0, 4.0),
        Method::Stouffer => (0.0, 1.0),
        Method::George => (0.0, PI * PI / 3.0),
        Method::Edgington => (0.5, 1.0 / 12.0),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MethodSpec {
    /// `None` for a user-supplied quantile function.
    pub method: Option<Method>,
    pub orientation: Orientation,
    pub continuous_mean: f64,
    pub continuous_var: f64,
    pub tail: Tail,
}

impl MethodSpec {
    pub fn name(&self) -> &'static str {
        self.method.map_or("generic", Method::name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdjustedStatistic {
    pub spec: MethodSpec,
    /// One adjusted value per atom, in atom order.
    pub z: Vec<f64>,
    pub masses: Vec<f64>,
    pub mean: f64,
    pub variance: f64,
    pub source: DiscretePValueDist,
}

impl AdjustedStatistic {
    pub fn is_degenerate(&self) -> bool {
        self.z.len() < 2
    }

    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    /// Returns `(value, mass)` pairs sorted by value.
    pub fn sorted(&self) -> Vec<(f64, f64)> {
        let mut out: Vec<(f64, f64)> = self
            .z
            .iter()
            .copied()
            .zip(self.masses.iter().copied())
            .collect();
        out.sort_by(|a, b| a.0.total_cmp(&b.0));
        out
    }
}

/// `F ln F + (1 - F) ln(1 - F)`, zero at both ends.
#[inline]
fn entropy_term(f: f64, f_bar: f64) -> f64 {
    xlogx(f) + xlogx(f_bar)
}

/// Density of the standard normal at its own `F`-quantile, zero at 0 and 1.
#[inline]
fn normal_height(f: f64) -> f64 {
    if f <= 0.0 || f >= 1.0 {
        0.0
    } else {
        norm_pdf(norm_quantile(f))
    }
}

/// Cell average of `-2 ln w` over `[a, b]`.
#[inline]
fn fisher_cell(a: f64, b: f64) -> f64 {
    let d = b - a;
    let r = if a > 0.0 { d / a } else { f64::INFINITY };
    2.0 - 2.0 * (log(b) + log1p_ratio(r))
}

/// Applies the closed-form adjustment of `method` to `dist`.
pub fn adjust(method: Method, dist: &DiscretePValueDist) -> AdjustedStatistic {
    let atoms = dist.atoms();
    let masses = dist.masses();
    let spec = method.spec();
    let m = atoms.len();
    let mut z = Vec::with_capacity(m);
    let mut variance = 0.0;

    for i in 0..m {
        let a = dist.lower(i);
        let b = atoms[i];
        let d = masses[i];
        // Complements straight from the atoms keep tail cells accurate.
        let (a_bar, b_bar) = (1.0 - a, 1.0 - b);
        let zi = match method {
            Method::Fisher => fisher_cell(a, b),
            // Same integral mirrored through w -> 1 - w.
            Method::Pearson => fisher_cell(b_bar, a_bar),
            Method::George => 0.5 * (fisher_cell(b_bar, a_bar) - fisher_cell(a, b)),
            Method::Stouffer => (normal_height(a) - normal_height(b)) / d,
            Method::Edgington => 0.5 * (a + b),
        };
        let vi = match method {
            Method::Fisher | Method::Pearson => d * (zi - 2.0) * (zi - 2.0),
            Method::George => {
                let dh = entropy_term(b, b_bar) - entropy_term(a, a_bar);
                dh * dh / d
            }
            Method::Stouffer => {
                let dk = normal_height(a) - normal_height(b);
                dk * dk / d
            }
            Method::Edgington => a * b * d / 4.0,
        };
        z.push(zi);
        variance += vi;
    }
    let mean = z.iter().zip(&masses).map(|(z, p)| z * p).sum();
    AdjustedStatistic {
        spec,
        z,
        masses,
        mean,
        variance,
        source: dist.clone(),
    }
}

/// Absolute tolerance on each cell average in [`adjust_generic`].
pub const GENERIC_CELL_TOLERANCE: f64 = 1e-10;

/// Adjusts `dist` for an arbitrary strictly increasing quantile function by
/// adaptive quadrature of each cell.
///
/// The returned spec carries the mean and variance of the continuous law,
/// integrated over (0, 1) from the same cell evaluations.
pub fn adjust_generic<Q: Quantile + ?Sized>(
    quantile: &Q,
    orientation: Orientation,
    dist: &DiscretePValueDist,
) -> Result<AdjustedStatistic> {
    let atoms = dist.atoms();
    let masses = dist.masses();
    let m = atoms.len();
    let mut z = Vec::with_capacity(m);
    let mut first = 0.0;
    let mut second = 0.0;
    let tol = Tolerance::absolute(GENERIC_CELL_TOLERANCE);

    for i in 0..m {
        let a = dist.lower(i);
        let d = masses[i];
        let a_bar = 1.0 - a;
        let mut samples: Vec<(f64, f64)> = Vec::new();
        // Evaluate at w = a + t d, carrying the complement separately so
        // cells next to 1 keep full precision.
        let eval = |t: f64, samples: &mut Vec<(f64, f64)>| -> [f64; 2] {
            let w = a + t * d;
            let v = a_bar - t * d;
            let (p, c) = match orientation {
                Orientation::Direct => (w, v),
                Orientation::Reflected => (v, w),
            };
            let q = if p <= 0.5 {
                quantile.quantile(p)
            } else {
                quantile.upper_quantile(c)
            };
            samples.push((w, q));
            [q, q * q]
        };
        let (avg, _) = integrate(|t| eval(t, &mut samples), 0.0, 1.0, tol)
            .map_err(|source| Error::Quadrature { cell: i, source })?;

        samples.sort_by(|x, y| x.0.total_cmp(&y.0));
        let sign = match orientation {
            Orientation::Direct => 1.0,
            Orientation::Reflected => -1.0,
        };
        for pair in samples.windows(2) {
            let (w0, q0) = pair[0];
            let (w1, q1) = pair[1];
            let slack = 1e-12 * fabs(q0).max(fabs(q1)).max(1.0);
            if w1 > w0 && sign * (q1 - q0) < -slack {
                return Err(Error::NonMonotoneQuantile { cell: i, w: w1 });
            }
        }
        z.push(avg[0]);
        first += d * avg[0];
        second += d * avg[1];
    }

    let mean: f64 = z.iter().zip(&masses).map(|(z, p)| z * p).sum();
    let variance = z
        .iter()
        .zip(&masses)
        .map(|(z, p)| p * (z - mean) * (z - mean))
        .sum();
    let spec = MethodSpec {
        method: None,
        orientation,
        continuous_mean: first,
        continuous_var: second - first * first,
        tail: match orientation {
            Orientation::Direct => Tail::Lower,
            Orientation::Reflected => Tail::Upper,
        },
    };
    Ok(AdjustedStatistic {
        spec,
        z,
        masses,
        mean,
        variance,
        source: dist.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::Side;
    use alloc::vec;

    fn dist(atoms: &[f64]) -> DiscretePValueDist {
        DiscretePValueDist::from_atoms(atoms, Side::Left).unwrap()
    }

    fn cum(masses: &[f64]) -> Vec<f64> {
        let mut acc = 0.0;
        let mut out: Vec<f64> = masses
            .iter()
            .map(|m| {
                acc += m;
                acc
            })
            .collect();
        *out.last_mut().unwrap() = 1.0;
        out
    }

    fn p_l() -> DiscretePValueDist {
        let mut m = vec![0.4];
        m.extend([0.01; 60]);
        dist(&cum(&m))
    }

    #[test]
    fn single_atom() {
        let d = dist(&[1.0]);
        let e = adjust(Method::Edgington, &d);
        assert_eq!(e.z, vec![0.5]);
        assert_eq!(e.variance, 0.0);
        assert!(e.is_degenerate());
        let s = adjust(Method::Stouffer, &d);
        assert_eq!(s.z, vec![0.0]);
        assert_eq!(s.variance, 0.0);
    }

    #[test]
    fn two_atoms() {
        let d = dist(&[0.5, 1.0]);
        let e = adjust(Method::Edgington, &d);
        assert_eq!(e.z, vec![0.25, 0.75]);
        assert!(fabs(e.variance - 0.0625) < 1e-15);
        let f = adjust(Method::Fisher, &d);
        let ln2 = core::f64::consts::LN_2;
        assert!(fabs(f.z[0] - (2.0 + 2.0 * ln2)) < 1e-14);
        assert!(fabs(f.z[1] - (2.0 - 2.0 * ln2)) < 1e-14);
    }

    #[test]
    fn fisher_variance_on_left_heavy_dist() {
        let f = adjust(Method::Fisher, &p_l());
        assert!(fabs(f.variance - 2.4) < 5e-4, "{}", f.variance);
    }

    #[test]
    fn generic_matches_closed_forms() {
        let d = p_l();
        let s = adjust(Method::Stouffer, &d);
        let g = adjust_generic(&ContinuousLaw::STANDARD_NORMAL, Orientation::Direct, &d).unwrap();
        for (a, b) in s.z.iter().zip(&g.z) {
            assert!(fabs(a - b) < 1e-9);
        }
        let id = |w: f64| w;
        let g = adjust_generic(&id, Orientation::Direct, &dist(&[0.5, 1.0])).unwrap();
        assert!(fabs(g.z[0] - 0.25) < 1e-12 && fabs(g.z[1] - 0.75) < 1e-12);
    }

    #[test]
    fn generic_chi_square_on_right_heavy_dist() {
        let mut m = vec![0.01; 60];
        m.push(0.4);
        let d = dist(&cum(&m));
        let g = adjust_generic(&ContinuousLaw::CHI2_2, Orientation::Reflected, &d).unwrap();
        assert!(fabs(g.variance - 3.922) < 1e-3);
        assert!(fabs(g.spec.continuous_mean - 2.0) < 1e-9);
        assert!(fabs(g.spec.continuous_var - 4.0) < 1e-8);
    }

    #[test]
    fn generic_rejects_decreasing_quantile() {
        let bad = |w: f64| -w;
        let err = adjust_generic(&bad, Orientation::Direct, &dist(&[0.5, 1.0])).unwrap_err();
        assert!(matches!(err, Error::NonMonotoneQuantile { cell: 0, .. }));
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("cauchy".parse::<Method>().is_err());
        assert_eq!(continuous_moments(Method::Fisher), (2.0, 4.0));
        assert_eq!(continuous_moments(Method::Edgington), (0.5, 1.0 / 12.0));
    }
}
