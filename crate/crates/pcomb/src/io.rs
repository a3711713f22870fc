//! JSON and CSV forms of the core types.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Read, Write};
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use pcomb_core::{
    pvalue_distribution, AdjustedStatistic, CombinedResult, ContinuousLaw, DiscretePValueDist,
    Family, Method, MetricsReport, ModelSpec, Side, StatisticModel, SurrogateDist, Tail,
};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

/// Tolerance when checking stored atoms against the ones rebuilt from a
/// stored model.
pub const ATOM_CHECK_TOLERANCE: f64 = 1e-12;

/// Reads a whole file, or standard input when `path` is `-`.
pub fn read_input(path: &str) -> Result<String> {
    if path == "-" {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .context("reading standard input")?;
        Ok(s)
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {path}"))
    }
}

/// Writes to a file, or standard output when `path` is `None` or `-`.
pub fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) if p != Path::new("-") => {
            fs::write(p, text).with_context(|| format!("writing {}", p.display()))
        }
        _ => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

pub fn parse_json<T: for<'de> Deserialize<'de>>(text: &str, what: &str) -> Result<T> {
    serde_json::from_str(text).with_context(|| format!("malformed {what} JSON"))
}

/// `{"family": "binomial", "params": {"trials": 5, "prob": 0.5}}`, or for
/// custom models `{"family": "custom", "support": [...], "pmf": [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelJson {
    pub family: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pmf: Option<Vec<f64>>,
}

impl ModelJson {
    pub fn from_spec(spec: &ModelSpec) -> Self {
        let (support, pmf) = match spec {
            ModelSpec::Custom { support, pmf } => (Some(support.clone()), Some(pmf.clone())),
            _ => (None, None),
        };
        ModelJson {
            family: spec.family().name().to_string(),
            params: spec
                .params()
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect(),
            support,
            pmf,
        }
    }

    pub fn to_spec(&self) -> Result<ModelSpec> {
        let family: Family = self.family.parse()?;
        let real = |name: &str| -> Result<f64> {
            self.params
                .get(name)
                .copied()
                .ok_or_else(|| anyhow!("{} model needs parameter `{name}`", family.name()))
        };
        let count = |name: &str| -> Result<u64> {
            let v = real(name)?;
            if v < 0.0 || v.fract() != 0.0 || v > u64::MAX as f64 {
                bail!("parameter `{name}` must be a non-negative integer, got {v}");
            }
            Ok(v as u64)
        };
        Ok(match family {
            Family::Binomial => ModelSpec::Binomial {
                trials: count("trials")?,
                prob: real("prob")?,
            },
            Family::Poisson => ModelSpec::Poisson {
                rate: real("rate")?,
            },
            Family::NegativeBinomial => ModelSpec::NegativeBinomial {
                successes: real("successes")?,
                prob: real("prob")?,
            },
            Family::Geometric => ModelSpec::Geometric {
                prob: real("prob")?,
            },
            Family::Hypergeometric => ModelSpec::Hypergeometric {
                population: count("population")?,
                successes: count("successes")?,
                draws: count("draws")?,
            },
            Family::NoncentralHypergeometric => ModelSpec::NoncentralHypergeometric {
                population: count("population")?,
                successes: count("successes")?,
                draws: count("draws")?,
                odds_ratio: real("odds_ratio")?,
            },
            Family::Custom => ModelSpec::Custom {
                support: self
                    .support
                    .clone()
                    .ok_or_else(|| anyhow!("custom model needs `support`"))?,
                pmf: self
                    .pmf
                    .clone()
                    .ok_or_else(|| anyhow!("custom model needs `pmf`"))?,
            },
        })
    }

    pub fn build(&self) -> Result<StatisticModel> {
        Ok(StatisticModel::new(self.to_spec()?)?)
    }
}

/// `{"side": "left", "F": [...]}`, with the generating model attached when
/// there is one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PDistJson {
    pub side: String,
    #[serde(rename = "F")]
    pub atoms: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelJson>,
}

impl PDistJson {
    pub fn from_dist(dist: &DiscretePValueDist) -> Self {
        PDistJson {
            side: dist.side().name().to_string(),
            atoms: dist.atoms().to_vec(),
            model: dist
                .provenance()
                .map(|p| ModelJson::from_spec(p.model.spec())),
        }
    }

    /// Rebuilds the distribution. With a model present the atoms are
    /// recomputed from it and must agree with the stored ones.
    pub fn to_dist(&self) -> Result<DiscretePValueDist> {
        let side: Side = self.side.parse()?;
        match &self.model {
            Some(m) => {
                let dist = pvalue_distribution(&m.build()?, side);
                let agree = dist.len() == self.atoms.len()
                    && dist
                        .atoms()
                        .iter()
                        .zip(&self.atoms)
                        .all(|(a, b)| (a - b).abs() <= ATOM_CHECK_TOLERANCE);
                if !agree && !self.atoms.is_empty() {
                    bail!("stored atoms F do not match the {side}-sided distribution of the stored model");
                }
                Ok(dist)
            }
            None => Ok(DiscretePValueDist::from_atoms(&self.atoms, side)?),
        }
    }
}

pub fn dist_to_json(dist: &DiscretePValueDist) -> String {
    serde_json::to_string(&PDistJson::from_dist(dist)).expect("serializable")
}

pub fn dist_from_json(text: &str) -> Result<DiscretePValueDist> {
    parse_json::<PDistJson>(text, "p-value distribution")?.to_dist()
}

/// `{"method", "z", "F", "mean", "variance"}` plus the masses and side.
pub fn adjusted_to_value(a: &AdjustedStatistic) -> Value {
    json!({
        "method": a.spec.name(),
        "side": a.source.side().name(),
        "z": a.z,
        "F": a.source.atoms(),
        "masses": a.masses,
        "mean": a.mean,
        "variance": a.variance,
    })
}

fn tail_name(t: Tail) -> &'static str {
    match t {
        Tail::Upper => "upper",
        Tail::Lower => "lower",
    }
}

pub fn surrogate_to_value(s: &SurrogateDist) -> Value {
    match s.law {
        ContinuousLaw::Gamma { shape, scale } => json!({
            "family": "gamma", "shape": shape, "scale": scale, "n": s.n, "tail": tail_name(s.tail),
        }),
        ContinuousLaw::Normal { mean, sd } => json!({
            "family": "normal", "mean": mean, "sd": sd, "n": s.n, "tail": tail_name(s.tail),
        }),
        ContinuousLaw::Uniform { lo, hi } => json!({
            "family": "uniform", "lo": lo, "hi": hi, "n": s.n, "tail": tail_name(s.tail),
        }),
        ContinuousLaw::Logistic { loc, scale } => json!({
            "family": "logistic", "loc": loc, "scale": scale, "n": s.n, "tail": tail_name(s.tail),
        }),
    }
}

/// `{"method", "S", "p", "surrogate"}` plus the matched atom indices.
pub fn combined_to_value(r: &CombinedResult) -> Value {
    json!({
        "method": r.method.name(),
        "n": r.n,
        "S": r.statistic,
        "p": r.global_p,
        "surrogate": surrogate_to_value(&r.surrogate),
        "indices": r.indices,
    })
}

/// One test in a `combine` input: either a raw observation `x` of the
/// statistic (needs a model), or an observed p-value `p` that must be an atom.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TestInput {
    #[serde(default)]
    pub pdist: Option<PDistJson>,
    #[serde(default)]
    pub model: Option<ModelJson>,
    #[serde(default)]
    pub side: Option<String>,
    #[serde(default)]
    pub x: Option<i64>,
    #[serde(default)]
    pub p: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CombineInput {
    pub tests: Vec<TestInput>,
}

pub enum Observation {
    Raw(i64),
    PValue(f64),
}

impl TestInput {
    pub fn resolve(&self, j: usize) -> Result<(DiscretePValueDist, Observation)> {
        let dist = match (&self.pdist, &self.model) {
            (Some(d), None) => d.to_dist()?,
            (None, Some(m)) => {
                let side: Side = self
                    .side
                    .as_deref()
                    .ok_or_else(|| anyhow!("test {j}: `model` needs a `side`"))?
                    .parse()?;
                pvalue_distribution(&m.build()?, side)
            }
            _ => bail!("test {j}: give exactly one of `pdist` or `model`"),
        };
        let obs = match (self.x, self.p) {
            (Some(x), None) => Observation::Raw(x),
            (None, Some(p)) => Observation::PValue(p),
            _ => bail!("test {j}: give exactly one of `x` or `p`"),
        };
        Ok((dist, obs))
    }
}

/// Formats a number for CSV output: fixed point with `decimals` places,
/// no locale dependence.
pub fn fixed(x: f64, decimals: usize) -> String {
    format!("{x:.decimals$}")
}

pub const METRICS_DECIMALS: usize = 6;

pub fn metrics_to_csv(report: &MetricsReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "method",
        "variance",
        "ratio",
        "scaled_w2",
        "w2_to_Y",
        "lower_bound",
    ])?;
    for r in &report.rows {
        w.write_record([
            r.method.name().to_string(),
            fixed(r.variance, METRICS_DECIMALS),
            fixed(r.ratio, METRICS_DECIMALS),
            fixed(r.scaled_w2, METRICS_DECIMALS),
            fixed(r.w2_to_y, METRICS_DECIMALS),
            fixed(r.lower_bound, METRICS_DECIMALS),
        ])?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

pub fn metrics_to_value(report: &MetricsReport) -> Value {
    let rows: Vec<Value> = report
        .rows
        .iter()
        .map(|r| {
            json!({
                "method": r.method.name(),
                "variance": r.variance,
                "ratio": r.ratio,
                "scaled_w2": r.scaled_w2,
                "w2_to_Y": r.w2_to_y,
                "lower_bound": r.lower_bound,
            })
        })
        .collect();
    json!({
        "rows": rows,
        "recommended": {
            "max_ratio": report.max_ratio.name(),
            "min_scaled_w2": report.min_scaled_w2.name(),
        },
    })
}

pub fn parse_methods(list: &str) -> Result<Vec<Method>> {
    if list == "all" {
        return Ok(Method::ALL.to_vec());
    }
    list.split(',')
        .map(|s| s.trim().parse::<Method>().map_err(Into::into))
        .collect()
}
