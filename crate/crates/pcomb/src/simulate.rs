//! Monte-Carlo type I error and power experiments.
//!
//! Every replicate draws from its own ChaCha12 stream, chosen from the seed,
//! the grid point and the replicate number, and per-method rejection counts
//! are summed as integers. Reports therefore do not depend on how replicates
//! are spread over threads.

use std::fmt;
use std::str::FromStr;

use anyhow::{anyhow, bail, ensure, Result};
use pcomb_core::{
    adjust, pvalue_distribution, surrogate, DiscretePValueDist, Method, ModelSpec, Side,
    StatisticModel,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub const RNG_NAME: &str = "ChaCha12";
pub const DEFAULT_REPS: u64 = 20_000;
pub const DEFAULT_N_GRID: [usize; 6] = [2, 5, 10, 20, 50, 100];
pub const DEFAULT_SEED: u64 = 20_240_101;

/// The four synthetic shapes: a 0.4 point mass at the left, right, centre,
/// or split 0.3/0.3 over both ends, with 0.01 masses elsewhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Synthetic {
    PL,
    PR,
    PC,
    PS,
}

impl Synthetic {
    pub const ALL: [Synthetic; 4] = [Synthetic::PL, Synthetic::PR, Synthetic::PC, Synthetic::PS];

    pub fn name(self) -> &'static str {
        match self {
            Synthetic::PL => "PL",
            Synthetic::PR => "PR",
            Synthetic::PC => "PC",
            Synthetic::PS => "PS",
        }
    }

    /// Atoms in hundredths.
    fn hundredths(self) -> Vec<u32> {
        match self {
            Synthetic::PL => (40..=100).collect(),
            Synthetic::PR => (1..=60).chain([100]).collect(),
            Synthetic::PC => (1..=30).chain(70..=100).collect(),
            Synthetic::PS => (30..=70).chain([100]).collect(),
        }
    }

    pub fn dist(self) -> DiscretePValueDist {
        let atoms: Vec<f64> = self
            .hundredths()
            .into_iter()
            .map(|k| k as f64 / 100.0)
            .collect();
        DiscretePValueDist::from_atoms(&atoms, Side::Left).expect("valid synthetic atoms")
    }
}

impl FromStr for Synthetic {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        Synthetic::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s) || format!("P_{}", &k.name()[1..]) == s)
            .ok_or_else(|| anyhow!("unknown synthetic shape `{s}` (expected PL, PR, PC or PS)"))
    }
}

mod side_name {
    use super::*;

    pub fn serialize<S: Serializer>(side: &Side, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(side.name())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Side, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A family of null and alternative laws, indexed by one alternative
/// parameter.
///
/// The alternative parameter is the success probability `θ` for binomial,
/// `p₁` for i.i.d. geometric, a common offset `δ` added to every `p₀ⱼ` for
/// non-i.i.d. geometric, and the concentration `λ` for circular scenarios.
/// Synthetic scenarios only have a null.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Scenario {
    Synthetic {
        shape: Synthetic,
    },
    Binomial {
        theta0: f64,
        trials: u64,
        #[serde(with = "side_name")]
        side: Side,
    },
    GeometricIid {
        p0: f64,
        #[serde(with = "side_name")]
        side: Side,
    },
    /// Each test's `p₀ⱼ` is drawn uniformly from `p0_set` per replicate.
    GeometricNoniid {
        p0_set: Vec<f64>,
        #[serde(with = "side_name")]
        side: Side,
    },
    /// `X` uniform on `{1..N}` under the null; the test uses
    /// `T = min(X, N − X)` with p-value `(2T + 1)/N`.
    Circular {
        points: u64,
    },
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scenario::Synthetic { shape } => f.write_str(shape.name()),
            Scenario::Binomial {
                theta0,
                trials,
                side,
            } => write!(f, "binomial:{theta0}:{trials}:{side}"),
            Scenario::GeometricIid { p0, side } => write!(f, "geometric-iid:{p0}:{side}"),
            Scenario::GeometricNoniid { p0_set, side } => {
                let set: Vec<String> = p0_set.iter().map(|p| p.to_string()).collect();
                write!(f, "geometric-noniid:{}:{side}", set.join("/"))
            }
            Scenario::Circular { points } => write!(f, "circular:{points}"),
        }
    }
}

/// Law of `T = min(X, N − X)` when `P(X = i) ∝ exp(−λ min(i, N − i))`.
pub fn circular_model(points: u64, lambda: f64) -> Result<ModelSpec> {
    ensure!(
        points >= 3 && points % 2 == 1,
        "circular N must be odd and at least 3, got {points}"
    );
    ensure!(lambda.is_finite(), "circular lambda must be finite");
    let half = (points - 1) / 2;
    let weights: Vec<f64> = (0..=half)
        .map(|t| {
            let mult = if t == 0 { 1.0 } else { 2.0 };
            mult * (-lambda * t as f64).exp()
        })
        .collect();
    let c: f64 = weights.iter().sum();
    Ok(ModelSpec::Custom {
        support: (0..=half as i64).collect(),
        pmf: weights.iter().map(|w| w / c).collect(),
    })
}

/// One null test together with the law its statistic is drawn from.
#[derive(Debug, Clone)]
struct Component {
    dist: DiscretePValueDist,
    /// Cumulative masses of the generating law's outcomes.
    cum: Vec<f64>,
    /// Atom of `dist` hit by each generating outcome.
    atom_of: Vec<usize>,
    /// Raw outcome values, for the likelihood-ratio comparator.
    values: Vec<i64>,
    /// Adjusted values and variances, one entry per method in `Method::ALL`.
    z: Vec<Vec<f64>>,
    nu: Vec<f64>,
}

impl Component {
    fn new(dist: DiscretePValueDist, cum: Vec<f64>, atom_of: Vec<usize>, values: Vec<i64>) -> Self {
        let (z, nu) = Method::ALL
            .iter()
            .map(|&m| {
                let a = adjust(m, &dist);
                (a.z, a.variance)
            })
            .unzip();
        Component {
            dist,
            cum,
            atom_of,
            values,
            z,
            nu,
        }
    }

    fn from_models(null: &StatisticModel, alt: &StatisticModel, side: Side) -> Self {
        let dist = pvalue_distribution(null, side);
        let atom_of = alt
            .support()
            .iter()
            .map(|&x| {
                dist.atom_for_outcome(null.index_of_clamped(x))
                    .expect("model-built")
            })
            .collect();
        Component::new(dist, alt.cdf_table(), atom_of, alt.support().to_vec())
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        self.cum
            .partition_point(|&c| c <= u)
            .min(self.cum.len() - 1)
    }
}

fn check_prob(name: &str, p: f64) -> Result<()> {
    ensure!(p > 0.0 && p < 1.0, "{name} must lie in (0, 1), got {p}");
    Ok(())
}

impl Scenario {
    /// The alternative parameter value at which the alternative is the null.
    pub fn null_parameter(&self) -> Option<f64> {
        match self {
            Scenario::Synthetic { .. } => None,
            Scenario::Binomial { theta0, .. } => Some(*theta0),
            Scenario::GeometricIid { p0, .. } => Some(*p0),
            Scenario::GeometricNoniid { .. } | Scenario::Circular { .. } => Some(0.0),
        }
    }

    /// Components for the alternative `alt` (`None` for the null).
    fn components(&self, alt: Option<f64>) -> Result<Vec<Component>> {
        let alt = match (alt, self.null_parameter()) {
            (Some(_), None) => bail!("scenario {self} has no alternative parameter"),
            (Some(a), Some(_)) => Some(a),
            (None, p) => p,
        };
        Ok(match self {
            Scenario::Synthetic { shape } => {
                let dist = shape.dist();
                let cum = dist.atoms().to_vec();
                let n = cum.len();
                vec![Component::new(
                    dist,
                    cum,
                    (0..n).collect(),
                    (0..n as i64).collect(),
                )]
            }
            Scenario::Binomial {
                theta0,
                trials,
                side,
            } => {
                let theta = alt.expect("has a null parameter");
                check_prob("theta0", *theta0)?;
                check_prob("theta", theta)?;
                let null = StatisticModel::new(ModelSpec::Binomial {
                    trials: *trials,
                    prob: *theta0,
                })?;
                let alt = StatisticModel::new(ModelSpec::Binomial {
                    trials: *trials,
                    prob: theta,
                })?;
                vec![Component::from_models(&null, &alt, *side)]
            }
            Scenario::GeometricIid { p0, side } => {
                let p1 = alt.expect("has a null parameter");
                check_prob("p0", *p0)?;
                check_prob("p1", p1)?;
                let null = StatisticModel::new(ModelSpec::Geometric { prob: *p0 })?;
                let alt = StatisticModel::new(ModelSpec::Geometric { prob: p1 })?;
                vec![Component::from_models(&null, &alt, *side)]
            }
            Scenario::GeometricNoniid { p0_set, side } => {
                ensure!(!p0_set.is_empty(), "p0_set is empty");
                let delta = alt.expect("has a null parameter");
                p0_set
                    .iter()
                    .map(|&p0| {
                        check_prob("p0", p0)?;
                        check_prob("p0 + offset", p0 + delta)?;
                        let null = StatisticModel::new(ModelSpec::Geometric { prob: p0 })?;
                        let alt = StatisticModel::new(ModelSpec::Geometric { prob: p0 + delta })?;
                        Ok(Component::from_models(&null, &alt, *side))
                    })
                    .collect::<Result<_>>()?
            }
            Scenario::Circular { points } => {
                let lambda = alt.expect("has a null parameter");
                let null = StatisticModel::new(circular_model(*points, 0.0)?)?;
                let alt = StatisticModel::new(circular_model(*points, lambda)?)?;
                vec![Component::from_models(&null, &alt, Side::Left)]
            }
        })
    }
}

/// A scenario with its laws built for one alternative.
#[derive(Debug, Clone)]
pub struct Prepared {
    components: Vec<Component>,
}

/// One sampled p-value and the null distribution it belongs to.
#[derive(Debug, Clone, Copy)]
pub struct SampledPValue<'a> {
    pub value: f64,
    pub index: usize,
    pub dist: &'a DiscretePValueDist,
}

impl Prepared {
    pub fn new(scenario: &Scenario, alt: Option<f64>) -> Result<Self> {
        Ok(Prepared {
            components: scenario.components(alt)?,
        })
    }

    fn pick<R: Rng>(&self, rng: &mut R) -> &Component {
        if self.components.len() == 1 {
            &self.components[0]
        } else {
            &self.components[rng.random_range(0..self.components.len())]
        }
    }

    /// Draws `n` observed p-values.
    pub fn sample_pvalues<R: Rng>(&self, n: usize, rng: &mut R) -> Vec<SampledPValue<'_>> {
        (0..n)
            .map(|_| {
                let c = self.pick(rng);
                let index = c.atom_of[c.draw(rng)];
                SampledPValue {
                    value: c.dist.atoms()[index],
                    index,
                    dist: &c.dist,
                }
            })
            .collect()
    }
}

/// Per-replicate generator: stream `point << 32 | rep` of the seeded ChaCha12.
pub fn replicate_rng(seed: u64, point: u64, rep: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream((point << 32) | rep);
    rng
}

/// Which way the likelihood-ratio test for a geometric rate rejects.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LrtRegion {
    /// Reject when `ΣX ≥ t`.
    AtLeast(i64),
    /// Reject when `ΣX ≤ t`.
    AtMost(i64),
}

impl LrtRegion {
    fn rejects(self, total: i64) -> bool {
        match self {
            LrtRegion::AtLeast(t) => total >= t,
            LrtRegion::AtMost(t) => total <= t,
        }
    }
}

/// Conservative rejection region for `ΣX` over `n` i.i.d. geometric(p₀)
/// trials counts: `ΣX − n` is negative binomial, and the threshold is the
/// most extreme one whose exact tail is at most `alpha`.
///
/// Right-sided p-values come with large totals (alternatives `p₁ < p₀`),
/// left-sided ones with small totals.
pub fn lrt_region(p0: f64, n: usize, side: Side, alpha: f64) -> Result<LrtRegion> {
    let nb = StatisticModel::new(ModelSpec::NegativeBinomial {
        successes: n as f64,
        prob: p0,
    })?;
    let pmf = nb.pmf();
    let shift = n as i64;
    match side {
        Side::Right => {
            // smallest t with P(T >= t) <= alpha
            let mut tail = 0.0;
            let mut t = nb.support()[pmf.len() - 1] + 1;
            for k in (0..pmf.len()).rev() {
                if tail + pmf[k] > alpha {
                    break;
                }
                tail += pmf[k];
                t = nb.support()[k];
            }
            Ok(LrtRegion::AtLeast(t + shift))
        }
        Side::Left => {
            let mut head = 0.0;
            let mut t = nb.support()[0] - 1;
            for k in 0..pmf.len() {
                if head + pmf[k] > alpha {
                    break;
                }
                head += pmf[k];
                t = nb.support()[k];
            }
            Ok(LrtRegion::AtMost(t + shift))
        }
        Side::Two => bail!("the likelihood-ratio comparator needs one-sided p-values"),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentRow {
    pub scenario: String,
    pub method: String,
    pub n: usize,
    pub alt_param: Option<f64>,
    pub alpha: f64,
    pub reps: u64,
    pub rejections: u64,
    pub proportion: f64,
    pub mc_se: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub rng: &'static str,
    pub seed: u64,
    pub reps: u64,
    pub alpha: f64,
    pub rows: Vec<ExperimentRow>,
}

impl ExperimentReport {
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "scenario",
            "method",
            "n",
            "alt_param",
            "alpha",
            "reps",
            "rejections",
            "proportion",
            "mc_se",
            "seed",
        ])?;
        for r in &self.rows {
            w.write_record([
                r.scenario.clone(),
                r.method.clone(),
                r.n.to_string(),
                r.alt_param.map(|a| a.to_string()).unwrap_or_default(),
                r.alpha.to_string(),
                r.reps.to_string(),
                r.rejections.to_string(),
                format!("{:.6}", r.proportion),
                format!("{:.6}", r.mc_se),
                r.seed.to_string(),
            ])?;
        }
        Ok(String::from_utf8(w.into_inner()?)?)
    }

    pub fn row(&self, method: &str, n: usize, alt: Option<f64>) -> Option<&ExperimentRow> {
        self.rows
            .iter()
            .find(|r| r.method == method && r.n == n && r.alt_param == alt)
    }
}

/// Settings shared by both experiment kinds.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub methods: Vec<Method>,
    pub alpha: f64,
    pub reps: u64,
    pub seed: u64,
}

impl Settings {
    pub fn new(methods: &[Method], alpha: f64, reps: u64, seed: u64) -> Self {
        Settings {
            methods: methods.to_vec(),
            alpha,
            reps,
            seed,
        }
    }

    fn check(&self) -> Result<()> {
        ensure!(
            self.alpha > 0.0 && self.alpha < 1.0,
            "alpha must lie in (0, 1)"
        );
        ensure!(self.reps >= 1, "reps must be at least 1");
        ensure!(self.reps <= u32::MAX as u64, "reps must fit in 32 bits");
        ensure!(!self.methods.is_empty(), "no methods requested");
        Ok(())
    }
}

/// Rejection counts per method (in `settings.methods` order), then the
/// comparator if `lrt` is given.
fn run_point(
    prepared: &Prepared,
    n: usize,
    settings: &Settings,
    lrt: Option<LrtRegion>,
    point: u64,
) -> Result<Vec<u64>> {
    ensure!(n >= 1, "n must be at least 1");
    let cols: Vec<usize> = settings
        .methods
        .iter()
        .map(|m| Method::ALL.iter().position(|x| x == m).expect("listed"))
        .collect();
    let width = cols.len() + lrt.is_some() as usize;
    let alpha = settings.alpha;
    (0..settings.reps)
        .into_par_iter()
        .map(|rep| -> Result<Vec<u64>> {
            let mut rng = replicate_rng(settings.seed, point, rep);
            let mut sums = vec![0.0; cols.len()];
            let mut nus: Vec<Vec<f64>> = vec![Vec::with_capacity(n); cols.len()];
            let mut total = 0i64;
            for _ in 0..n {
                let c = prepared.pick(&mut rng);
                let k = c.draw(&mut rng);
                let i = c.atom_of[k];
                total += c.values[k];
                for (j, &m) in cols.iter().enumerate() {
                    sums[j] += c.z[m][i];
                    nus[j].push(c.nu[m]);
                }
            }
            let mut out = vec![0u64; width];
            for (j, &m) in settings.methods.iter().enumerate() {
                let p = surrogate(m, &nus[j])?.tail_p(sums[j]);
                out[j] = (p <= alpha) as u64;
            }
            if let Some(region) = lrt {
                out[width - 1] = region.rejects(total) as u64;
            }
            Ok(out)
        })
        .try_reduce(
            || vec![0u64; width],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                Ok(a)
            },
        )
}

fn rows_for(
    scenario: &Scenario,
    n: usize,
    alt: Option<f64>,
    settings: &Settings,
    names: &[&str],
    counts: &[u64],
) -> Vec<ExperimentRow> {
    let reps = settings.reps as f64;
    names
        .iter()
        .zip(counts)
        .map(|(name, &rejections)| {
            let r = rejections as f64 / reps;
            ExperimentRow {
                scenario: scenario.to_string(),
                method: name.to_string(),
                n,
                alt_param: alt,
                alpha: settings.alpha,
                reps: settings.reps,
                rejections,
                proportion: r,
                mc_se: (r * (1.0 - r) / reps).sqrt(),
                seed: settings.seed,
            }
        })
        .collect()
}

fn report(settings: &Settings, rows: Vec<ExperimentRow>) -> ExperimentReport {
    ExperimentReport {
        rng: RNG_NAME,
        seed: settings.seed,
        reps: settings.reps,
        alpha: settings.alpha,
        rows,
    }
}

/// Rejection rates under the null for every `n` in `n_grid`.
pub fn type1_experiment(
    scenario: &Scenario,
    n_grid: &[usize],
    settings: &Settings,
) -> Result<ExperimentReport> {
    settings.check()?;
    let prepared = Prepared::new(scenario, None)?;
    let names: Vec<&str> = settings.methods.iter().map(|m| m.name()).collect();
    let mut rows = Vec::new();
    for (point, &n) in n_grid.iter().enumerate() {
        let counts = run_point(&prepared, n, settings, None, point as u64)?;
        rows.extend(rows_for(
            scenario,
            n,
            scenario.null_parameter(),
            settings,
            &names,
            &counts,
        ));
    }
    Ok(report(settings, rows))
}

/// Rejection rates at each alternative parameter in `alt_grid`, with the
/// likelihood-ratio comparator (reported as method `lrt`) when `lrt` is set.
pub fn power_experiment(
    scenario: &Scenario,
    alt_grid: &[f64],
    n: usize,
    settings: &Settings,
    lrt: bool,
) -> Result<ExperimentReport> {
    settings.check()?;
    let region = if lrt {
        match scenario {
            Scenario::GeometricIid { p0, side } => Some(lrt_region(*p0, n, *side, settings.alpha)?),
            _ => {
                bail!("the likelihood-ratio comparator is only defined for geometric-iid scenarios")
            }
        }
    } else {
        None
    };
    let mut names: Vec<&str> = settings.methods.iter().map(|m| m.name()).collect();
    if lrt {
        names.push("lrt");
    }
    let mut rows = Vec::new();
    for (point, &alt) in alt_grid.iter().enumerate() {
        let prepared = Prepared::new(scenario, Some(alt))?;
        let counts = run_point(&prepared, n, settings, region, point as u64)?;
        rows.extend(rows_for(scenario, n, Some(alt), settings, &names, &counts));
    }
    Ok(report(settings, rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn synthetic_shapes() {
        let masses = |s: Synthetic| s.dist().masses();
        assert_eq!(Synthetic::PL.dist().len(), 61);
        assert!((masses(Synthetic::PL)[0] - 0.4).abs() < 1e-15);
        assert!((masses(Synthetic::PR)[60] - 0.4).abs() < 1e-15);
        assert!((masses(Synthetic::PC)[30] - 0.4).abs() < 1e-15);
        let ps = masses(Synthetic::PS);
        assert!((ps[0] - 0.3).abs() < 1e-15 && (ps[41] - 0.3).abs() < 1e-15);
        assert_eq!(ps.len(), 42);
    }

    #[test]
    fn sampling_replays() {
        let p = Prepared::new(
            &Scenario::Synthetic {
                shape: Synthetic::PC,
            },
            None,
        )
        .unwrap();
        let a: Vec<f64> = p
            .sample_pvalues(3, &mut replicate_rng(7, 0, 5))
            .iter()
            .map(|s| s.value)
            .collect();
        let b: Vec<f64> = p
            .sample_pvalues(3, &mut replicate_rng(7, 0, 5))
            .iter()
            .map(|s| s.value)
            .collect();
        assert_eq!(a, b);
        let atoms = Synthetic::PC.dist();
        assert!(a.iter().all(|v| atoms.atoms().contains(v)));
    }

    #[test]
    fn geometric_right_atoms() {
        let s = Scenario::GeometricIid {
            p0: 0.5,
            side: Side::Right,
        };
        let p = Prepared::new(&s, None).unwrap();
        for draw in p.sample_pvalues(50, &mut replicate_rng(1, 0, 0)) {
            let x = (draw.value.ln() / 0.5f64.ln()).round();
            assert!((0.5f64.powf(x) - draw.value).abs() < 1e-12 * draw.value);
        }
    }

    #[test]
    fn circular_null_atoms() {
        let p = Prepared::new(&Scenario::Circular { points: 11 }, None).unwrap();
        let expect: Vec<f64> = (0..6).map(|t| (2 * t + 1) as f64 / 11.0).collect();
        let atoms = p.components[0].dist.atoms();
        for (a, b) in atoms.iter().zip(&expect) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!(circular_model(10, 0.0).is_err());
    }

    #[test]
    fn alternatives_need_a_parameter() {
        assert!(Prepared::new(
            &Scenario::Synthetic {
                shape: Synthetic::PL
            },
            Some(0.1)
        )
        .is_err());
        let s = Scenario::GeometricNoniid {
            p0_set: vec![0.2, 0.5, 0.8],
            side: Side::Right,
        };
        assert!(Prepared::new(&s, Some(0.25)).is_err());
        assert!(Prepared::new(&s, Some(-0.1)).is_ok());
    }

    #[test]
    fn lrt_thresholds_are_conservative() {
        // n = 1000 trials counts at p0 = 0.5. Reference tails of T - 1000 under
        // NB(1000, 0.5): P(T >= 2074) = 0.05204, P(T >= 2075) = 0.04978,
        // P(T <= 1926) = 0.04810, P(T <= 1927) = 0.05047,
        // P(T >= 2106) = 0.01042, P(T >= 2107) = 0.00985, P(T <= 1897) = 0.00958.
        assert_eq!(
            lrt_region(0.5, 1000, Side::Right, 0.05).unwrap(),
            LrtRegion::AtLeast(2075)
        );
        assert_eq!(
            lrt_region(0.5, 1000, Side::Left, 0.05).unwrap(),
            LrtRegion::AtMost(1926)
        );
        assert_eq!(
            lrt_region(0.5, 1000, Side::Right, 0.01).unwrap(),
            LrtRegion::AtLeast(2107)
        );
        assert_eq!(
            lrt_region(0.5, 1000, Side::Left, 0.01).unwrap(),
            LrtRegion::AtMost(1897)
        );
    }

    #[test]
    fn scenario_json() {
        let s: Scenario =
            serde_json::from_str(r#"{"kind":"binomial","theta0":0.1,"trials":5,"side":"left"}"#)
                .unwrap();
        assert_eq!(
            s,
            Scenario::Binomial {
                theta0: 0.1,
                trials: 5,
                side: Side::Left
            }
        );
        assert_eq!(s.to_string(), "binomial:0.1:5:left");
        let s: Scenario = serde_json::from_str(r#"{"kind":"synthetic","shape":"PS"}"#).unwrap();
        assert_eq!(s.to_string(), "PS");
        assert!(serde_json::from_str::<Scenario>(
            r#"{"kind":"geometric-iid","p0":0.5,"side":"up"}"#
        )
        .is_err());
    }

    #[test]
    fn power_at_null_is_type1() {
        let s = Scenario::Binomial {
            theta0: 0.3,
            trials: 5,
            side: Side::Right,
        };
        let set = Settings::new(&Method::ALL, 0.05, 500, 3);
        let t1 = type1_experiment(&s, &[10], &set).unwrap();
        let pw = power_experiment(&s, &[0.3], 10, &set, false).unwrap();
        for (a, b) in t1.rows.iter().zip(&pw.rows) {
            assert_eq!(a.rejections, b.rejections);
        }
    }
}
