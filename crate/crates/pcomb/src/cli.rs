//! Command-line front end.

use std::ffi::OsString;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use pcomb_core::{
    adjust, combine, combine_observations, pvalue_distribution, rank_methods, DiscretePValueDist,
    Method, ModelSpec, Side, StatisticModel,
};

use crate::gene::{gene_example, gene_rows_to_csv};
use crate::io::{
    adjusted_to_value, combined_to_value, dist_from_json, dist_to_json, metrics_to_csv,
    metrics_to_value, parse_json, parse_methods, read_input, write_output, CombineInput, ModelJson,
    Observation,
};
use crate::simulate::{
    power_experiment, type1_experiment, Scenario, Settings, DEFAULT_N_GRID, DEFAULT_REPS,
    DEFAULT_SEED,
};

/// Environment variable holding the default simulation seed.
pub const SEED_ENV: &str = "PCOMB_SEED";

#[derive(Debug, Parser)]
#[command(
    name = "pcomb",
    version,
    about = "Combine independent discrete p-values"
)]
pub struct Cli {
    /// Write output here instead of standard output.
    #[arg(short, long, global = true, value_name = "PATH")]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a sided p-value distribution.
    Pdist(PdistArgs),
    /// Adjust a p-value distribution for one method.
    Adjust {
        #[arg(short, long, value_parser = parse_method)]
        method: Method,
        /// p-value distribution JSON file, or `-` for standard input.
        #[arg(long, value_name = "FILE")]
        pdist: String,
    },
    /// Combine observed p-values into a global p-value.
    Combine {
        #[arg(short, long, value_parser = parse_method)]
        method: Method,
        /// JSON `{"tests": [...]}`, or `-` for standard input.
        #[arg(long, value_name = "FILE")]
        input: String,
    },
    /// Per-method variance ratio and scaled distance diagnostics.
    Metrics {
        /// One or more p-value distribution JSON files (`-` for standard input).
        #[arg(long, value_name = "FILE", required = true, num_args = 1..)]
        pdist: Vec<String>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Monte-Carlo type I error or power experiment.
    Simulate(SimulateArgs),
    /// Built-in worked examples.
    Example {
        #[command(subcommand)]
        which: Example,
    },
}

#[derive(Debug, Subcommand)]
enum Example {
    /// Gene-level combination of the embedded SNP counts.
    Gene {
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
}

#[derive(Debug, Args)]
struct PdistArgs {
    #[arg(long, value_parser = parse_side, default_value = "left")]
    side: Side,
    /// Distribution family (binomial, poisson, negative-binomial, geometric,
    /// hypergeometric, noncentral-hypergeometric).
    #[arg(long, conflicts_with_all = ["model", "atoms"])]
    family: Option<String>,
    /// Model JSON file, or `-` for standard input.
    #[arg(long, value_name = "FILE", conflicts_with = "atoms")]
    model: Option<String>,
    /// Comma-separated atoms `F_1,...,F_m`.
    #[arg(long, value_delimiter = ',')]
    atoms: Option<Vec<f64>>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    prob: Option<f64>,
    #[arg(long)]
    rate: Option<f64>,
    #[arg(long)]
    successes: Option<f64>,
    #[arg(long)]
    population: Option<u64>,
    #[arg(long)]
    draws: Option<u64>,
    #[arg(long)]
    odds_ratio: Option<f64>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Scenario JSON, inline or as a file path (`-` for standard input).
    #[arg(long)]
    scenario: String,
    /// Methods, comma-separated, or `all`.
    #[arg(long, default_value = "all")]
    methods: String,
    /// Tests per replicate for a type I error run.
    #[arg(long, value_delimiter = ',', conflicts_with = "alt_grid")]
    n_grid: Option<Vec<usize>>,
    /// Alternative parameter values; selects a power run.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    alt_grid: Option<Vec<f64>>,
    /// Tests per replicate for a power run.
    #[arg(long, default_value_t = 100, requires = "alt_grid")]
    n: usize,
    /// Add the likelihood-ratio comparator (geometric-iid power runs only).
    #[arg(long, requires = "alt_grid")]
    lrt: bool,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, default_value_t = DEFAULT_REPS)]
    reps: u64,
    #[arg(long, env = SEED_ENV, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Worker threads (defaults to all cores).
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

fn parse_method(s: &str) -> std::result::Result<Method, String> {
    s.parse().map_err(|e: pcomb_core::Error| e.to_string())
}

fn parse_side(s: &str) -> std::result::Result<Side, String> {
    s.parse().map_err(|e: pcomb_core::Error| e.to_string())
}

fn json_line<T: serde::Serialize>(v: &T) -> Result<String> {
    Ok(serde_json::to_string(v)? + "\n")
}

fn model_from_flags(a: &PdistArgs, family: &str) -> Result<ModelSpec> {
    let need = |name: &str, v: Option<f64>| v.ok_or_else(|| anyhow!("{family} needs --{name}"));
    let needu = |name: &str, v: Option<u64>| v.ok_or_else(|| anyhow!("{family} needs --{name}"));
    Ok(match family {
        "binomial" => ModelSpec::Binomial {
            trials: needu("trials", a.trials)?,
            prob: need("prob", a.prob)?,
        },
        "poisson" => ModelSpec::Poisson {
            rate: need("rate", a.rate)?,
        },
        "negative-binomial" => ModelSpec::NegativeBinomial {
            successes: need("successes", a.successes)?,
            prob: need("prob", a.prob)?,
        },
        "geometric" => ModelSpec::Geometric {
            prob: need("prob", a.prob)?,
        },
        "hypergeometric" => ModelSpec::Hypergeometric {
            population: needu("population", a.population)?,
            successes: needu("successes", a.successes.map(|s| s as u64))?,
            draws: needu("draws", a.draws)?,
        },
        "noncentral-hypergeometric" => ModelSpec::NoncentralHypergeometric {
            population: needu("population", a.population)?,
            successes: needu("successes", a.successes.map(|s| s as u64))?,
            draws: needu("draws", a.draws)?,
            odds_ratio: need("odds-ratio", a.odds_ratio)?,
        },
        other => bail!("unknown family `{other}`"),
    })
}

fn pdist(a: &PdistArgs) -> Result<DiscretePValueDist> {
    if let Some(atoms) = &a.atoms {
        return Ok(DiscretePValueDist::from_atoms(atoms, a.side)?);
    }
    let spec = match (&a.family, &a.model) {
        (Some(f), _) => model_from_flags(a, f)?,
        (None, Some(path)) => parse_json::<ModelJson>(&read_input(path)?, "model")?.to_spec()?,
        (None, None) => bail!("give one of --family, --model or --atoms"),
    };
    Ok(pvalue_distribution(&StatisticModel::new(spec)?, a.side))
}

fn load_scenario(arg: &str) -> Result<Scenario> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        read_input(arg)?
    };
    parse_json(&text, "scenario")
}

fn simulate(a: &SimulateArgs) -> Result<String> {
    let scenario = load_scenario(&a.scenario)?;
    let settings = Settings::new(&parse_methods(&a.methods)?, a.alpha, a.reps, a.seed);
    let run = || match &a.alt_grid {
        Some(grid) => power_experiment(&scenario, grid, a.n, &settings, a.lrt),
        None => type1_experiment(
            &scenario,
            a.n_grid.as_deref().unwrap_or(&DEFAULT_N_GRID),
            &settings,
        ),
    };
    let report = match a.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .context("starting worker pool")?
            .install(run)?,
        None => run()?,
    };
    match a.format {
        Format::Csv => report.to_csv(),
        Format::Json => json_line(&report),
    }
}

fn execute(cli: &Cli) -> Result<String> {
    match &cli.command {
        Command::Pdist(a) => Ok(dist_to_json(&pdist(a)?) + "\n"),
        Command::Adjust { method, pdist } => {
            let dist = dist_from_json(&read_input(pdist)?)?;
            json_line(&adjusted_to_value(&adjust(*method, &dist)))
        }
        Command::Combine { method, input } => {
            let input: CombineInput = parse_json(&read_input(input)?, "combine input")?;
            let mut dists = Vec::new();
            let mut raw = Vec::new();
            let mut ps = Vec::new();
            for (j, t) in input.tests.iter().enumerate() {
                let (d, obs) = t.resolve(j)?;
                dists.push(d);
                match obs {
                    Observation::Raw(x) => raw.push(x),
                    Observation::PValue(p) => ps.push(p),
                }
            }
            let result = match (raw.is_empty(), ps.is_empty()) {
                (false, true) => combine_observations(*method, &raw, &dists)?,
                (true, false) => combine(*method, &ps, &dists)?,
                (true, true) => bail!("no tests given"),
                (false, false) => {
                    // Mixed input: resolve raw observations to their atoms first.
                    let mut ps = Vec::with_capacity(dists.len());
                    for (j, t) in input.tests.iter().enumerate() {
                        ps.push(match (t.x, t.p) {
                            (Some(x), _) => dists[j].observe(x)?.value,
                            (_, Some(p)) => p,
                            _ => unreachable!(),
                        });
                    }
                    combine(*method, &ps, &dists)?
                }
            };
            json_line(&combined_to_value(&result))
        }
        Command::Metrics { pdist, format } => {
            let dists = pdist
                .iter()
                .map(|p| dist_from_json(&read_input(p)?))
                .collect::<Result<Vec<_>>>()?;
            let report = rank_methods(&dists)?;
            match format {
                Format::Csv => metrics_to_csv(&report),
                Format::Json => json_line(&metrics_to_value(&report)),
            }
        }
        Command::Simulate(a) => simulate(a),
        Command::Example {
            which: Example::Gene { format },
        } => {
            let rows = gene_example()?;
            match format {
                Format::Csv => gene_rows_to_csv(&rows),
                Format::Json => json_line(&rows),
            }
        }
    }
}

/// Runs the command line and returns the process exit code: 0 on success,
/// 2 on a usage error, 1 when the computation fails.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli).and_then(|text| write_output(cli.output.as_deref(), &text)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}
