//! Command-line front end. Settings merge as defaults, then preset, then
//! config file, then flags, each layer overriding the one before.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::Parser;
use log::LevelFilter;

use crate::error::Error;
use crate::experiment::{run_experiment, ExperimentResult, ExperimentSpec, Preset, Variant};
use crate::ga::{CrossoverMode, GaConfig, Selection};
use crate::mge::MgeConfig;
use crate::trail::TrailGrid;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "mge-ant",
    version,
    about = "Evolve finite-state trail-following ants with and without artificial transposons"
)]
pub struct Cli {
    /// Flat `key = value` file using the configuration field names.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Trail document; the bundled 89-cell trail when omitted.
    #[arg(long, value_name = "PATH")]
    pub trail: Option<PathBuf>,
    #[arg(long, value_name = "NAME")]
    pub preset: Option<Preset>,
    /// With a preset: 100 runs of 5000 generations.
    #[arg(long)]
    pub full_scale: bool,
    #[arg(long, value_name = "N")]
    pub runs: Option<usize>,
    /// Base seed; every run derives its own seed from it.
    #[arg(long, value_name = "S")]
    pub seed: Option<u64>,
    #[arg(long, value_name = "G")]
    pub generations: Option<u64>,
    #[arg(long, alias = "population", value_name = "P")]
    pub population_size: Option<usize>,
    #[arg(long, value_name = "STEPS")]
    pub max_steps: Option<u32>,
    #[arg(long, value_name = "P")]
    pub crossover_rate: Option<f64>,
    #[arg(long, value_name = "P")]
    pub mutation_rate: Option<f64>,
    /// per-bit or one-point.
    #[arg(long, value_name = "MODE")]
    pub crossover: Option<CrossoverMode>,
    /// mean, roulette, quota (uses --reproduce-quota) or quota:FRACTION.
    #[arg(long, value_name = "RULE")]
    pub selection: Option<String>,
    #[arg(long, value_name = "FRACTION")]
    pub reproduce_quota: Option<f64>,
    /// on or off.
    #[arg(long, value_name = "on|off")]
    pub mge: Option<String>,
    #[arg(long, value_name = "M")]
    pub min_len: Option<usize>,
    #[arg(long, value_name = "M")]
    pub max_len: Option<usize>,
    #[arg(long, value_name = "N")]
    pub period_n: Option<usize>,
    #[arg(long, value_name = "RATE")]
    pub mge1_rate: Option<f64>,
    #[arg(long, value_name = "RATE")]
    pub mge2_rate: Option<f64>,
    #[arg(long, value_name = "DIR", default_value = "mge-ant-out")]
    pub out: PathBuf,
    /// Print each run's final best genome as hex and keep a best.hex per run.
    #[arg(long)]
    pub dump_best: bool,
    /// Log operator traces and per-run progress.
    #[arg(short, long)]
    pub verbose: bool,
}

/// Settings that every layer may override.
#[derive(Debug, Clone, Default, PartialEq)]
struct Layer {
    runs: Option<usize>,
    seed: Option<u64>,
    generations: Option<u64>,
    population_size: Option<usize>,
    max_steps: Option<u32>,
    crossover_rate: Option<f64>,
    mutation_rate: Option<f64>,
    crossover: Option<CrossoverMode>,
    selection: Option<SelectionRule>,
    reproduce_quota: Option<f64>,
    mge: Option<bool>,
    min_len: Option<usize>,
    max_len: Option<usize>,
    period_n: Option<usize>,
    mge1_rate: Option<f64>,
    mge2_rate: Option<f64>,
}

impl Layer {
    fn over(self, top: Layer) -> Layer {
        Layer {
            runs: top.runs.or(self.runs),
            seed: top.seed.or(self.seed),
            generations: top.generations.or(self.generations),
            population_size: top.population_size.or(self.population_size),
            max_steps: top.max_steps.or(self.max_steps),
            crossover_rate: top.crossover_rate.or(self.crossover_rate),
            mutation_rate: top.mutation_rate.or(self.mutation_rate),
            crossover: top.crossover.or(self.crossover),
            selection: top.selection.or(self.selection),
            reproduce_quota: top.reproduce_quota.or(self.reproduce_quota),
            mge: top.mge.or(self.mge),
            min_len: top.min_len.or(self.min_len),
            max_len: top.max_len.or(self.max_len),
            period_n: top.period_n.or(self.period_n),
            mge1_rate: top.mge1_rate.or(self.mge1_rate),
            mge2_rate: top.mge2_rate.or(self.mge2_rate),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum SelectionRule {
    Mean,
    Roulette,
    /// `None` takes the reproduce quota.
    Quota(Option<f64>),
}

fn parse_selection(s: &str) -> Result<SelectionRule, String> {
    match s.trim() {
        "mean" | "truncation-mean" => Ok(SelectionRule::Mean),
        "roulette" => Ok(SelectionRule::Roulette),
        "quota" | "truncation-quota" => Ok(SelectionRule::Quota(None)),
        other => match other.strip_prefix("quota:") {
            Some(q) => q
                .parse()
                .map(|q| SelectionRule::Quota(Some(q)))
                .map_err(|_| format!("invalid quota in `{other}`")),
            None => Err(format!(
                "unknown selection `{other}` (expected mean, roulette, quota or quota:FRACTION)"
            )),
        },
    }
}

fn parse_switch(s: &str) -> Result<bool, String> {
    match s.trim() {
        "on" | "true" | "yes" | "1" => Ok(true),
        "off" | "false" | "no" | "0" => Ok(false),
        other => Err(format!("expected on or off, got `{other}`")),
    }
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, String>
where
    T::Err: std::fmt::Display,
{
    value
        .parse()
        .map_err(|e| format!("invalid value `{value}` for {key}: {e}"))
}

/// Parses a flat `key = value` document; `#` starts a comment.
fn parse_config_file(text: &str) -> Result<Layer, String> {
    let mut layer = Layer::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected `key = value`", i + 1))?;
        let (key, value) = (key.trim(), value.trim());
        let at = |e: String| format!("line {}: {e}", i + 1);
        match key {
            "runs" => layer.runs = Some(parse_value(key, value).map_err(at)?),
            "seed" => layer.seed = Some(parse_value(key, value).map_err(at)?),
            "generations" => layer.generations = Some(parse_value(key, value).map_err(at)?),
            "population_size" => layer.population_size = Some(parse_value(key, value).map_err(at)?),
            "max_steps" => layer.max_steps = Some(parse_value(key, value).map_err(at)?),
            "crossover_rate" => layer.crossover_rate = Some(parse_value(key, value).map_err(at)?),
            "mutation_rate" => layer.mutation_rate = Some(parse_value(key, value).map_err(at)?),
            "crossover" => layer.crossover = Some(parse_value(key, value).map_err(at)?),
            "selection" => layer.selection = Some(parse_selection(value).map_err(at)?),
            "reproduce_quota" => layer.reproduce_quota = Some(parse_value(key, value).map_err(at)?),
            "mge" => layer.mge = Some(parse_switch(value).map_err(at)?),
            "min_len" => layer.min_len = Some(parse_value(key, value).map_err(at)?),
            "max_len" => layer.max_len = Some(parse_value(key, value).map_err(at)?),
            "period_n" => layer.period_n = Some(parse_value(key, value).map_err(at)?),
            "mge1_rate" => layer.mge1_rate = Some(parse_value(key, value).map_err(at)?),
            "mge2_rate" => layer.mge2_rate = Some(parse_value(key, value).map_err(at)?),
            other => return Err(at(format!("unknown key `{other}`"))),
        }
    }
    Ok(layer)
}

fn cli_layer(cli: &Cli) -> Result<Layer, String> {
    Ok(Layer {
        runs: cli.runs,
        seed: cli.seed,
        generations: cli.generations,
        population_size: cli.population_size,
        max_steps: cli.max_steps,
        crossover_rate: cli.crossover_rate,
        mutation_rate: cli.mutation_rate,
        crossover: cli.crossover,
        selection: cli.selection.as_deref().map(parse_selection).transpose()?,
        reproduce_quota: cli.reproduce_quota,
        mge: cli.mge.as_deref().map(parse_switch).transpose()?,
        min_len: cli.min_len,
        max_len: cli.max_len,
        period_n: cli.period_n,
        mge1_rate: cli.mge1_rate,
        mge2_rate: cli.mge2_rate,
    })
}

/// Builds the experiment described by `cli`. Every failure here is a usage
/// error.
pub fn build_spec(cli: &Cli) -> Result<ExperimentSpec, String> {
    let plan = cli.preset.map(|p| p.plan(cli.full_scale));
    let preset_layer = plan
        .as_ref()
        .map(|p| Layer {
            runs: Some(p.runs),
            generations: Some(p.generations),
            population_size: p.population_size,
            ..Layer::default()
        })
        .unwrap_or_default();
    let file_layer = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
            parse_config_file(&text).map_err(|e| format!("{}: {e}", path.display()))?
        }
        None => Layer::default(),
    };
    let l = preset_layer.over(file_layer).over(cli_layer(cli)?);

    let d = GaConfig::default();
    let dm = MgeConfig::default();
    let mge_params = MgeConfig {
        min_len: l.min_len.unwrap_or(dm.min_len),
        max_len: l.max_len.unwrap_or(dm.max_len),
        period_n: l.period_n.unwrap_or(dm.period_n),
        mge1_rate: l.mge1_rate.unwrap_or(dm.mge1_rate),
        mge2_rate: l.mge2_rate.unwrap_or(dm.mge2_rate),
    };
    let reproduce_quota = l.reproduce_quota.unwrap_or(d.reproduce_quota);
    let selection = match l.selection.unwrap_or(SelectionRule::Mean) {
        SelectionRule::Mean => Selection::TruncationMean,
        SelectionRule::Roulette => Selection::Roulette,
        SelectionRule::Quota(q) => Selection::TruncationQuota(q.unwrap_or(reproduce_quota)),
    };
    let seed = l.seed.unwrap_or(d.seed);
    let base = GaConfig {
        population_size: l.population_size.unwrap_or(d.population_size),
        generations: l.generations.unwrap_or(d.generations),
        max_steps: l.max_steps.unwrap_or(d.max_steps),
        crossover_rate: l.crossover_rate.unwrap_or(d.crossover_rate),
        mutation_rate: l.mutation_rate.unwrap_or(d.mutation_rate),
        selection,
        reproduce_quota,
        crossover: l.crossover.unwrap_or(d.crossover),
        seed,
        mge: l.mge.unwrap_or(true).then_some(mge_params),
    };

    let trail = match &cli.trail {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| format!("cannot read trail {}: {e}", path.display()))?;
            TrailGrid::load_trail(&text).map_err(|e| format!("{}: {e}", path.display()))?
        }
        None => TrailGrid::bundled(),
    };

    let mut spec = ExperimentSpec::new(base, &cli.out);
    spec.mge_params = mge_params;
    spec.base_seed = seed;
    spec.runs = l.runs.unwrap_or(1);
    spec.trail = trail;
    spec.dump_best = cli.dump_best;
    if let Some(plan) = plan {
        spec.variants = plan.variants;
    } else {
        spec.variants = vec![Variant::new("default", &[])];
    }
    spec.validate().map_err(|e| e.to_string())?;
    Ok(spec)
}

/// Summary lines on stdout. Write errors (a closed pipe, say) are ignored.
fn report(out: &mut impl Write, result: &ExperimentResult, dump_best: bool) {
    for v in &result.variants {
        let finals: Vec<u32> = v
            .runs
            .iter()
            .filter_map(|r| r.stats.last().map(|s| s.best_score))
            .collect();
        if finals.is_empty() {
            let _ = writeln!(out, "{}: no generations run", v.name);
        } else {
            let mean = finals.iter().map(|&b| b as f64).sum::<f64>() / finals.len() as f64;
            let peak = v.runs.iter().filter_map(|r| r.summary.peak()).max().unwrap_or(0);
            let _ = writeln!(
                out,
                "{}: {} runs, mean final best {mean:.2}, highest score {peak}",
                v.name,
                finals.len()
            );
        }
        if dump_best {
            for r in &v.runs {
                if let Some((_, g)) = &r.summary.final_best {
                    let _ = writeln!(out, "{}", g.to_hex());
                }
            }
        }
    }
}

/// Runs the CLI and returns the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let level = if cli.verbose { LevelFilter::Debug } else { LevelFilter::Warn };
    let _ = env_logger::Builder::new().filter_level(level).try_init();

    let spec = match build_spec(&cli) {
        Ok(spec) => spec,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_USAGE;
        }
    };
    match run_experiment(&spec) {
        Ok(result) => {
            let mut out = io::stdout().lock();
            report(&mut out, &result, cli.dump_best);
            let _ = writeln!(out, "output written to {}", spec.out_dir.display());
            EXIT_OK
        }
        Err(e @ Error::Config(_)) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_RUNTIME
        }
    }
}
