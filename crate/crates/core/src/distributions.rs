//! Discrete test-statistic models and the sided p-value distributions they
//! induce.

use alloc::string::ToString;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use libm::{exp, fabs, log, log1p, pow};

use crate::error::{Error, Result};
use crate::special::{ln_choose, ln_gamma};

/// Residual tail mass left after truncating an infinite support.
pub const TAIL_CUTOFF: f64 = 1e-14;
/// Relative tolerance for grouping equal masses in the two-sided construction.
pub const TIE_TOLERANCE: f64 = 1e-12;
/// Tolerance on the total of a user-supplied PMF.
pub const CUSTOM_PMF_TOLERANCE: f64 = 1e-9;
/// Tolerance on the last atom of a user-supplied p-value distribution.
pub const LAST_ATOM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Binomial,
    Poisson,
    NegativeBinomial,
    Geometric,
    Hypergeometric,
    NoncentralHypergeometric,
    Custom,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::Binomial,
        Family::Poisson,
        Family::NegativeBinomial,
        Family::Geometric,
        Family::Hypergeometric,
        Family::NoncentralHypergeometric,
        Family::Custom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Binomial => "binomial",
            Family::Poisson => "poisson",
            Family::NegativeBinomial => "negative-binomial",
            Family::Geometric => "geometric",
            Family::Hypergeometric => "hypergeometric",
            Family::NoncentralHypergeometric => "noncentral-hypergeometric",
            Family::Custom => "custom",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|fam| fam.name() == s)
            .ok_or_else(|| Error::UnknownFamily(s.to_string()))
    }
}

/// Family together with its parameters.
///
/// The negative binomial counts failures before the `successes`-th success,
/// so its support starts at 0. The geometric counts trials up to and
/// including the first success, so its support starts at 1.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelSpec {
    Binomial {
        trials: u64,
        prob: f64,
    },
    Poisson {
        rate: f64,
    },
    NegativeBinomial {
        successes: f64,
        prob: f64,
    },
    Geometric {
        prob: f64,
    },
    Hypergeometric {
        population: u64,
        successes: u64,
        draws: u64,
    },
    /// Fisher's noncentral hypergeometric law.
    NoncentralHypergeometric {
        population: u64,
        successes: u64,
        draws: u64,
        odds_ratio: f64,
    },
    Custom {
        support: Vec<i64>,
        pmf: Vec<f64>,
    },
}

impl ModelSpec {
    pub fn family(&self) -> Family {
        match self {
            ModelSpec::Binomial { .. } => Family::Binomial,
            ModelSpec::Poisson { .. } => Family::Poisson,
            ModelSpec::NegativeBinomial { .. } => Family::NegativeBinomial,
            ModelSpec::Geometric { .. } => Family::Geometric,
            ModelSpec::Hypergeometric { .. } => Family::Hypergeometric,
            ModelSpec::NoncentralHypergeometric { .. } => Family::NoncentralHypergeometric,
            ModelSpec::Custom { .. } => Family::Custom,
        }
    }

    /// Named numeric parameters, in a fixed order per family.
    pub fn params(&self) -> Vec<(&'static str, f64)> {
        match *self {
            ModelSpec::Binomial { trials, prob } => {
                vec![("trials", trials as f64), ("prob", prob)]
            }
            ModelSpec::Poisson { rate } => vec![("rate", rate)],
            ModelSpec::NegativeBinomial { successes, prob } => {
                vec![("successes", successes), ("prob", prob)]
            }
            ModelSpec::Geometric { prob } => vec![("prob", prob)],
            ModelSpec::Hypergeometric {
                population,
                successes,
                draws,
            } => vec![
                ("population", population as f64),
                ("successes", successes as f64),
                ("draws", draws as f64),
            ],
            ModelSpec::NoncentralHypergeometric {
                population,
                successes,
                draws,
                odds_ratio,
            } => vec![
                ("population", population as f64),
                ("successes", successes as f64),
                ("draws", draws as f64),
                ("odds_ratio", odds_ratio),
            ],
            ModelSpec::Custom { .. } => Vec::new(),
        }
    }
}

/// A discrete null distribution over an explicit finite integer support.
#[derive(Debug, Clone, PartialEq)]
pub struct StatisticModel {
    spec: ModelSpec,
    support: Vec<i64>,
    pmf: Vec<f64>,
}

fn invalid(name: &'static str, value: f64, reason: &'static str) -> Error {
    Error::InvalidParameter {
        name,
        value,
        reason,
    }
}

fn check_prob(name: &'static str, p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(invalid(name, p, "must lie in (0, 1)"))
    }
}

/// Scales masses to sum to one.
fn normalize(pmf: &mut [f64]) {
    let total: f64 = pmf.iter().sum();
    for p in pmf.iter_mut() {
        *p /= total;
    }
}

/// Masses from log-weights, stabilised by the largest weight.
fn from_log_weights(logw: &[f64]) -> Vec<f64> {
    let top = logw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut pmf: Vec<f64> = logw.iter().map(|&l| exp(l - top)).collect();
    normalize(&mut pmf);
    pmf
}

/// Generates `ln pmf(start), ln pmf(start + 1), …` until past `mode` and
/// far below the cutoff, then truncates where the remaining tail drops below
/// [`TAIL_CUTOFF`] and folds that tail into the last kept atom.
fn truncated_infinite<F: Fn(f64) -> f64>(start: i64, mode: f64, ln_pmf: F) -> (Vec<i64>, Vec<f64>) {
    let mut terms = Vec::new();
    let mut k = start;
    loop {
        let p = exp(ln_pmf(k as f64));
        terms.push(p);
        if (k as f64) > mode && p < 1e-30 {
            break;
        }
        k += 1;
    }
    // tails[i] = P(X >= start + i), accumulated from the far end.
    let mut tails = vec![0.0; terms.len() + 1];
    for i in (0..terms.len()).rev() {
        tails[i] = tails[i + 1] + terms[i];
    }
    let total = tails[0];
    let mut last = terms.len() - 1;
    for i in 0..terms.len() {
        if tails[i + 1] / total < TAIL_CUTOFF {
            last = i;
            break;
        }
    }
    let mut pmf: Vec<f64> = terms[..=last].to_vec();
    pmf[last] = tails[last];
    normalize(&mut pmf);
    let support = (start..=start + last as i64).collect();
    (support, pmf)
}

impl StatisticModel {
    /// Builds the model, truncating infinite supports.
    pub fn new(spec: ModelSpec) -> Result<Self> {
        let (support, pmf) = match &spec {
            &ModelSpec::Binomial { trials, prob } => {
                if trials == 0 {
                    return Err(invalid("trials", 0.0, "must be at least 1"));
                }
                check_prob("prob", prob)?;
                binomial_pmf(trials, prob)
            }
            &ModelSpec::Poisson { rate } => {
                if !(rate > 0.0 && rate.is_finite()) {
                    return Err(invalid("rate", rate, "must be positive and finite"));
                }
                let lr = log(rate);
                truncated_infinite(0, rate, |k| k * lr - rate - ln_gamma(k + 1.0))
            }
            &ModelSpec::NegativeBinomial { successes, prob } => {
                if !(successes > 0.0 && successes.is_finite()) {
                    return Err(invalid(
                        "successes",
                        successes,
                        "must be positive and finite",
                    ));
                }
                check_prob("prob", prob)?;
                let lp = log(prob);
                let lq = log1p(-prob);
                let lr = ln_gamma(successes);
                let mode = (successes - 1.0) * (1.0 - prob) / prob;
                truncated_infinite(0, mode, |k| {
                    ln_gamma(k + successes) - lr - ln_gamma(k + 1.0) + successes * lp + k * lq
                })
            }
            &ModelSpec::Geometric { prob } => {
                check_prob("prob", prob)?;
                let lp = log(prob);
                let lq = log1p(-prob);
                truncated_infinite(1, 1.0, |x| lp + (x - 1.0) * lq)
            }
            &ModelSpec::Hypergeometric {
                population,
                successes,
                draws,
            } => {
                check_urn(population, successes, draws)?;
                noncentral_hypergeometric_pmf(population, successes, draws, 1.0)
            }
            &ModelSpec::NoncentralHypergeometric {
                population,
                successes,
                draws,
                odds_ratio,
            } => {
                check_urn(population, successes, draws)?;
                if !(odds_ratio > 0.0 && odds_ratio.is_finite()) {
                    return Err(invalid(
                        "odds_ratio",
                        odds_ratio,
                        "must be positive and finite",
                    ));
                }
                noncentral_hypergeometric_pmf(population, successes, draws, odds_ratio)
            }
            ModelSpec::Custom { support, pmf } => custom_pmf(support, pmf)?,
        };
        Ok(StatisticModel { spec, support, pmf })
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn family(&self) -> Family {
        self.spec.family()
    }

    pub fn support(&self) -> &[i64] {
        &self.support
    }

    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    /// Position of `x` in the support.
    pub fn index_of(&self, x: i64) -> Result<usize> {
        self.support
            .binary_search(&x)
            .map_err(|_| Error::OutsideSupport { x })
    }

    /// Position of `x` in the support, clamping values beyond either end to
    /// the nearest outcome. Used when an alternative model has a wider
    /// support than the null.
    pub fn index_of_clamped(&self, x: i64) -> usize {
        match self.support.binary_search(&x) {
            Ok(i) => i,
            Err(0) => 0,
            Err(i) if i >= self.support.len() => self.support.len() - 1,
            // Inside the range but not an outcome (custom supports with gaps):
            // take the lower neighbour.
            Err(i) => i - 1,
        }
    }

    /// Cumulative masses `P(X <= x_k)`, with the last entry exactly 1.
    pub fn cdf_table(&self) -> Vec<f64> {
        accumulate(self.pmf.iter().copied())
    }
}

fn check_urn(population: u64, successes: u64, draws: u64) -> Result<()> {
    if population == 0 {
        return Err(invalid("population", 0.0, "must be at least 1"));
    }
    if successes > population {
        return Err(invalid("successes", successes as f64, "exceeds population"));
    }
    if draws > population {
        return Err(invalid("draws", draws as f64, "exceeds population"));
    }
    Ok(())
}

fn binomial_pmf(trials: u64, prob: f64) -> (Vec<i64>, Vec<f64>) {
    let n = trials;
    let mut pmf = Vec::with_capacity(n as usize + 1);
    if n <= 60 {
        // Direct products are exact enough and keep symmetric ties bit-equal.
        let q = 1.0 - prob;
        let mut coef = 1.0;
        for k in 0..=n {
            pmf.push(coef * pow(prob, k as f64) * pow(q, (n - k) as f64));
            coef = coef * (n - k) as f64 / (k + 1) as f64;
        }
        normalize(&mut pmf);
    } else {
        let lp = log(prob);
        let lq = log1p(-prob);
        let nf = n as f64;
        let logw: Vec<f64> = (0..=n)
            .map(|k| {
                let kf = k as f64;
                ln_choose(nf, kf) + kf * lp + (nf - kf) * lq
            })
            .collect();
        pmf = from_log_weights(&logw);
    }
    ((0..=n as i64).collect(), pmf)
}

fn noncentral_hypergeometric_pmf(
    population: u64,
    successes: u64,
    draws: u64,
    odds_ratio: f64,
) -> (Vec<i64>, Vec<f64>) {
    let failures = population - successes;
    let lo = draws.saturating_sub(failures);
    let hi = draws.min(successes);
    let lw = log(odds_ratio);
    let (nk, nf) = (successes as f64, failures as f64);
    let logw: Vec<f64> = (lo..=hi)
        .map(|k| {
            let kf = k as f64;
            ln_choose(nk, kf) + ln_choose(nf, draws as f64 - kf) + kf * lw
        })
        .collect();
    ((lo as i64..=hi as i64).collect(), from_log_weights(&logw))
}

fn custom_pmf(support: &[i64], pmf: &[f64]) -> Result<(Vec<i64>, Vec<f64>)> {
    if support.is_empty() {
        return Err(Error::EmptyInput);
    }
    if support.len() != pmf.len() {
        return Err(Error::LengthMismatch {
            expected: support.len(),
            found: pmf.len(),
        });
    }
    for i in 1..support.len() {
        if support[i] <= support[i - 1] {
            return Err(Error::NotIncreasing { index: i });
        }
    }
    for &p in pmf {
        if !(p >= 0.0 && p.is_finite()) {
            return Err(invalid("pmf", p, "masses must be finite and nonnegative"));
        }
    }
    let total: f64 = pmf.iter().sum();
    if fabs(total - 1.0) > CUSTOM_PMF_TOLERANCE {
        return Err(Error::NotNormalized { total });
    }
    let mut pmf = pmf.to_vec();
    normalize(&mut pmf);
    Ok((support.to_vec(), pmf))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
    Two,
}

impl Side {
    pub const ALL: [Side; 3] = [Side::Left, Side::Right, Side::Two];

    pub fn name(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
            Side::Two => "two",
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "left" => Ok(Side::Left),
            "right" => Ok(Side::Right),
            "two" | "two-sided" => Ok(Side::Two),
            _ => Err(invalid("side", f64::NAN, "expected left, right or two")),
        }
    }
}

/// Link from a p-value distribution back to the model that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub model: Arc<StatisticModel>,
    /// Atom index for every support point of the model.
    pub atom_of: Vec<usize>,
}

/// The atoms `0 < F_1 < … < F_m = 1` of a discrete p-value.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretePValueDist {
    atoms: Vec<f64>,
    side: Side,
    provenance: Option<Provenance>,
}

/// An observed p-value: its value and its position among the atoms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservedPValue {
    pub value: f64,
    pub index: usize,
}

impl DiscretePValueDist {
    /// Validates a user-supplied atom sequence. The last atom is snapped to
    /// exactly 1.
    pub fn from_atoms(atoms: &[f64], side: Side) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::EmptyInput);
        }
        for (i, &a) in atoms.iter().enumerate() {
            if !(a > 0.0 && a <= 1.0 + LAST_ATOM_TOLERANCE) {
                return Err(Error::AtomOutOfRange { index: i, value: a });
            }
            if i > 0 && a <= atoms[i - 1] {
                return Err(Error::NotIncreasing { index: i });
            }
        }
        let last = atoms[atoms.len() - 1];
        if fabs(last - 1.0) > LAST_ATOM_TOLERANCE {
            return Err(Error::LastAtom { value: last });
        }
        let mut atoms = atoms.to_vec();
        let m = atoms.len();
        atoms[m - 1] = 1.0;
        if m > 1 && atoms[m - 2] >= 1.0 {
            return Err(Error::NotIncreasing { index: m - 1 });
        }
        Ok(DiscretePValueDist {
            atoms,
            side,
            provenance: None,
        })
    }

    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn provenance(&self) -> Option<&Provenance> {
        self.provenance.as_ref()
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn is_degenerate(&self) -> bool {
        self.atoms.len() < 2
    }

    /// Masses `F_i - F_{i-1}`.
    pub fn masses(&self) -> Vec<f64> {
        let mut prev = 0.0;
        self.atoms
            .iter()
            .map(|&f| {
                let d = f - prev;
                prev = f;
                d
            })
            .collect()
    }

    /// Lower cell boundary `F_{i-1}` of atom `i`.
    pub fn lower(&self, i: usize) -> f64 {
        if i == 0 {
            0.0
        } else {
            self.atoms[i - 1]
        }
    }

    /// Atom index whose value matches `p` within `rel_tol` relative error.
    pub fn match_atom(&self, p: f64, rel_tol: f64) -> Option<usize> {
        let i = self.atoms.partition_point(|&a| a < p);
        let near = |j: usize| fabs(self.atoms[j] - p) <= rel_tol * self.atoms[j];
        if i < self.atoms.len() && near(i) {
            Some(i)
        } else if i > 0 && near(i - 1) {
            Some(i - 1)
        } else {
            None
        }
    }

    /// Maps an outcome of the generating model to its atom.
    pub fn observe(&self, x: i64) -> Result<ObservedPValue> {
        let prov = self.provenance.as_ref().ok_or(Error::NoProvenance)?;
        let k = prov.model.index_of(x)?;
        let index = prov.atom_of[k];
        Ok(ObservedPValue {
            value: self.atoms[index],
            index,
        })
    }

    /// Atom index for the outcome at support position `k` of the model.
    pub fn atom_for_outcome(&self, k: usize) -> Option<usize> {
        self.provenance.as_ref().map(|p| p.atom_of[k])
    }
}

/// Running totals of `masses`, taken from the nearer end so that values
/// close to 1 are formed as `1 - tail` and the final total is exactly 1.
fn accumulate<I: Iterator<Item = f64>>(masses: I) -> Vec<f64> {
    let masses: Vec<f64> = masses.collect();
    let mut out = vec![0.0; masses.len()];
    let mut head = 0.0;
    for (o, &p) in out.iter_mut().zip(&masses) {
        head += p;
        *o = head;
    }
    let mut tail = 0.0;
    for k in (0..masses.len()).rev() {
        // tail = mass strictly after position k
        if out[k] > 0.5 {
            out[k] = 1.0 - tail / head;
        } else {
            out[k] /= head;
        }
        tail += masses[k];
    }
    out
}

/// Builds the sided p-value distribution of `model`.
///
/// * left: `F = P(X <= x)` over the support.
/// * right: `F = P(X >= x)` over the support, sorted ascending.
/// * two: outcomes are ranked from least to most likely; outcomes whose
///   masses agree within [`TIE_TOLERANCE`] share one atom, and each atom is
///   the previous one plus the mass of its tie group.
///
/// Outcomes with zero mass never occur under the model; they are mapped to
/// the nearest atom in the direction of stronger evidence.
pub fn pvalue_distribution(model: &StatisticModel, side: Side) -> DiscretePValueDist {
    let pmf = model.pmf();
    let m = pmf.len();
    let mut atoms: Vec<f64> = Vec::with_capacity(m);
    let mut atom_of = vec![0usize; m];
    match side {
        Side::Left => {
            let cdf = accumulate(pmf.iter().copied());
            for k in 0..m {
                if cdf[k] > atoms.last().copied().unwrap_or(0.0) {
                    atoms.push(cdf[k]);
                }
                atom_of[k] = atoms.len().saturating_sub(1);
            }
        }
        Side::Right => {
            // upper[j] = P(X >= x_{m-1-j})
            let upper = accumulate(pmf.iter().rev().copied());
            for k in (0..m).rev() {
                let u = upper[m - 1 - k];
                if u > atoms.last().copied().unwrap_or(0.0) {
                    atoms.push(u);
                }
                atom_of[k] = atoms.len().saturating_sub(1);
            }
        }
        Side::Two => {
            let mut order: Vec<usize> = (0..m).filter(|&k| pmf[k] > 0.0).collect();
            order.sort_by(|&a, &b| pmf[a].total_cmp(&pmf[b]).then(a.cmp(&b)));
            // Tie groups as ranges of `order`.
            let mut groups: Vec<(usize, usize, f64)> = Vec::new();
            let mut i = 0;
            while i < order.len() {
                let head = pmf[order[i]];
                let mut j = i;
                let mut mass = 0.0;
                while j < order.len() && pmf[order[j]] - head <= TIE_TOLERANCE * head {
                    mass += pmf[order[j]];
                    j += 1;
                }
                groups.push((i, j, mass));
                i = j;
            }
            let cum = accumulate(groups.iter().map(|g| g.2));
            for (&(i, j, _), &value) in groups.iter().zip(&cum) {
                if value > atoms.last().copied().unwrap_or(0.0) {
                    atoms.push(value);
                }
                for &k in &order[i..j] {
                    atom_of[k] = atoms.len() - 1;
                }
            }
        }
    }
    if let Some(last) = atoms.last_mut() {
        *last = 1.0;
    }
    DiscretePValueDist {
        atoms,
        side,
        provenance: Some(Provenance {
            model: Arc::new(model.clone()),
            atom_of,
        }),
    }
}

/// The atom to which outcome `x` maps under `side`.
pub fn observed_pvalue(model: &StatisticModel, side: Side, x: i64) -> Result<ObservedPValue> {
    model.index_of(x)?;
    pvalue_distribution(model, side).observe(x)
}

/// Validates a user-supplied atom sequence; see [`DiscretePValueDist::from_atoms`].
pub fn custom_pvalue_distribution(atoms: &[f64], side: Side) -> Result<DiscretePValueDist> {
    DiscretePValueDist::from_atoms(atoms, side)
}
