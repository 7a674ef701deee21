//! Multi-run experiments: presets, per-run seeding, parallel execution and
//! CSV output.
//!
//! Output tree under `out_dir`:
//!
//! ```text
//! <variant>/run_NNN/curves.csv    generation,best,mean,mge1_fraction,mge2_fraction
//! <variant>/run_NNN/census.csv    generation,code,count,kind,is_dominant
//! <variant>/run_NNN/timeline.csv  generation,old_dominant,new_dominant
//! <variant>/run_NNN/best.hex      (with dump_best) final best genome
//! <variant>/curves.csv            generation,mean_best,mean_mean,stderr_best
//! <variant>/runs.csv              run,seed,final_best,peak_best,final_mean
//! <variant>/milestones.csv        score,median_generation,success_rate
//! plots/scores.csv                generation,<variant>_best,<variant>_mean,...
//! plots/mge_fractions_<variant>.csv  generation,mge1_fraction,mge2_fraction
//! plots/dominance_<variant>.csv   generation,dominant,dominant_count,carriers  (run 0)
//! ```

use std::fmt::{self, Write as _};
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use log::info;
use rayon::prelude::*;

use crate::analytics::{
    aggregate_runs, census, summarize_run, Aggregate, DominanceTimeline, RunSummary,
    DEFAULT_ABUNDANCE_THRESHOLD,
};
use crate::automaton::Genome;
use crate::error::{Error, Result};
use crate::ga::{Evolution, GaConfig, GenerationStats};
use crate::mge::MgeConfig;
use crate::trail::{TrailGrid, BUNDLED_HARD_GAP_CELL};

/// Per-run seed for run `run` of variant `variant`.
///
/// splitmix64's finalizer applied to `base + GOLDEN * (key + 1)` with
/// `key = variant << 32 | run`. Both steps are bijections on u64, so distinct
/// (variant, run) pairs below 2^32 always get distinct seeds.
pub fn mix_seed(base: u64, variant: u32, run: u32) -> u64 {
    const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;
    let key = ((variant as u64) << 32) | run as u64;
    let mut z = base.wrapping_add(GOLDEN.wrapping_mul(key.wrapping_add(1)));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Override {
    /// Switch MGE on (with the experiment's MGE parameters) or off.
    Mge(bool),
    MaxLen(usize),
    Mge1Rate(f64),
    Mge2Rate(f64),
    PopulationSize(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variant {
    pub name: String,
    pub overrides: Vec<Override>,
}

impl Variant {
    pub fn new(name: &str, overrides: &[Override]) -> Self {
        Variant {
            name: name.to_string(),
            overrides: overrides.to_vec(),
        }
    }

    /// The variant's configuration: `base` with the overrides applied.
    /// `mge_params` supplies the MGE settings whenever MGE ends up enabled.
    pub fn config(&self, base: &GaConfig, mge_params: &MgeConfig) -> GaConfig {
        let mut cfg = base.clone();
        let mut params = *mge_params;
        let mut enabled = base.mge.is_some();
        for o in &self.overrides {
            match *o {
                Override::Mge(on) => enabled = on,
                Override::MaxLen(n) => params.max_len = n,
                Override::Mge1Rate(r) => params.mge1_rate = r,
                Override::Mge2Rate(r) => params.mge2_rate = r,
                Override::PopulationSize(n) => cfg.population_size = n,
            }
        }
        cfg.mge = enabled.then_some(params);
        cfg
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// MGE against control.
    Fig5,
    /// Transposon length range 5-32 against 5-11.
    Fig7,
    /// Low transposition rate against the default and control.
    Fig8,
    /// Large population, for affected-fraction series.
    Fig9,
}

impl FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "fig5" => Ok(Preset::Fig5),
            "fig7" => Ok(Preset::Fig7),
            "fig8" => Ok(Preset::Fig8),
            "fig9" => Ok(Preset::Fig9),
            other => Err(format!("unknown preset `{other}` (expected fig5, fig7, fig8 or fig9)")),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Preset::Fig5 => "fig5",
            Preset::Fig7 => "fig7",
            Preset::Fig8 => "fig8",
            Preset::Fig9 => "fig9",
        })
    }
}

/// Scale settings a preset puts on top of the defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct PresetPlan {
    pub runs: usize,
    pub generations: u64,
    pub population_size: Option<usize>,
    pub variants: Vec<Variant>,
}

impl Preset {
    /// Desk scale unless `full_scale`, which restores 100 runs of 5000
    /// generations.
    pub fn plan(self, full_scale: bool) -> PresetPlan {
        use Override::*;
        let (runs, generations) = match self {
            Preset::Fig5 => (30, 1500),
            Preset::Fig7 | Preset::Fig8 => (20, 1500),
            Preset::Fig9 => (1, 200),
        };
        let (runs, generations) = if full_scale { (100, 5000) } else { (runs, generations) };
        let variants = match self {
            Preset::Fig5 => vec![
                Variant::new("test", &[Mge(true)]),
                Variant::new("control", &[Mge(false)]),
            ],
            Preset::Fig7 => vec![
                Variant::new("long", &[Mge(true), MaxLen(32)]),
                Variant::new("short", &[Mge(true), MaxLen(11)]),
            ],
            Preset::Fig8 => vec![
                Variant::new("low", &[Mge(true), Mge2Rate(0.05)]),
                Variant::new("default", &[Mge(true)]),
                Variant::new("control", &[Mge(false)]),
            ],
            Preset::Fig9 => vec![Variant::new("test", &[Mge(true)])],
        };
        PresetPlan {
            runs,
            generations,
            population_size: (self == Preset::Fig9).then_some(1000),
            variants,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    /// Configuration shared by all variants; its `seed` is ignored in favour
    /// of the mixed per-run seeds.
    pub base: GaConfig,
    /// MGE settings used by variants that switch MGE on.
    pub mge_params: MgeConfig,
    pub runs: usize,
    pub base_seed: u64,
    pub variants: Vec<Variant>,
    pub out_dir: PathBuf,
    pub trail: TrailGrid,
    pub milestones: Vec<u32>,
    pub abundance_threshold: usize,
    pub dump_best: bool,
}

impl ExperimentSpec {
    /// A single-variant experiment with default settings on the bundled trail.
    pub fn new(base: GaConfig, out_dir: impl Into<PathBuf>) -> Self {
        let mge_params = base.mge.unwrap_or_default();
        ExperimentSpec {
            base_seed: base.seed,
            base,
            mge_params,
            runs: 1,
            variants: vec![Variant::new("default", &[])],
            out_dir: out_dir.into(),
            trail: TrailGrid::bundled(),
            milestones: vec![BUNDLED_HARD_GAP_CELL, BUNDLED_HARD_GAP_CELL + 1],
            abundance_threshold: DEFAULT_ABUNDANCE_THRESHOLD,
            dump_best: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::Config("runs must be at least 1".into()));
        }
        if self.variants.is_empty() {
            return Err(Error::Config("at least one variant is required".into()));
        }
        for (i, v) in self.variants.iter().enumerate() {
            if v.name.is_empty() || v.name.contains(['/', '\\', ',']) {
                return Err(Error::Config(format!("invalid variant name `{}`", v.name)));
            }
            if self.variants[..i].iter().any(|w| w.name == v.name) {
                return Err(Error::Config(format!("duplicate variant name `{}`", v.name)));
            }
            v.config(&self.base, &self.mge_params).validate()?;
        }
        Ok(())
    }

    pub fn variant_config(&self, variant: usize, run: usize) -> GaConfig {
        let mut cfg = self.variants[variant].config(&self.base, &self.mge_params);
        cfg.seed = mix_seed(self.base_seed, variant as u32, run as u32);
        cfg
    }
}

/// Everything recorded for one run.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub seed: u64,
    pub stats: Vec<GenerationStats>,
    pub summary: RunSummary,
    pub timeline: DominanceTimeline,
}

/// Runs one configuration, taking a census of every generation before it is
/// exposed.
pub fn execute_run(
    cfg: &GaConfig,
    grid: &TrailGrid,
    milestones: &[u32],
    abundance_threshold: usize,
) -> Result<RunRecord> {
    let census_cfg = cfg.mge.unwrap_or_default();
    let mut evo = Evolution::new(cfg.clone(), grid)?;
    let mut timeline = DominanceTimeline::new(abundance_threshold);
    let mut stats = Vec::with_capacity(cfg.generations as usize);
    for g in 0..cfg.generations {
        let record = census(&evo.population().genomes, &census_cfg, g, abundance_threshold);
        timeline.update(record)?;
        stats.push(evo.step());
    }
    let pop = evo.evaluate();
    let final_best = pop
        .scores
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
        .map(|(i, &s)| (s, pop.genomes[i]));
    let mut summary = summarize_run(&stats, milestones);
    summary.final_best = final_best;
    Ok(RunRecord {
        seed: cfg.seed,
        stats,
        summary,
        timeline,
    })
}

#[derive(Debug, Clone)]
pub struct VariantResult {
    pub name: String,
    pub config: GaConfig,
    pub runs: Vec<RunRecord>,
    pub aggregate: Aggregate,
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub variants: Vec<VariantResult>,
}

impl ExperimentResult {
    pub fn variant(&self, name: &str) -> Option<&VariantResult> {
        self.variants.iter().find(|v| v.name == name)
    }
}

/// Executes every (variant, run) pair, in parallel, without writing files.
pub fn simulate(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    spec.validate()?;
    let jobs: Vec<(usize, usize)> = (0..spec.variants.len())
        .flat_map(|v| (0..spec.runs).map(move |r| (v, r)))
        .collect();
    let mut records: Vec<RunRecord> = jobs
        .par_iter()
        .map(|&(v, r)| {
            let cfg = spec.variant_config(v, r);
            let rec = execute_run(&cfg, &spec.trail, &spec.milestones, spec.abundance_threshold)?;
            info!(
                "{} run {r}: final best {}, peak {}",
                spec.variants[v].name,
                rec.stats.last().map_or(0, |s| s.best_score),
                rec.summary.peak().unwrap_or(0)
            );
            Ok(rec)
        })
        .collect::<Result<_>>()?;

    let mut variants = Vec::with_capacity(spec.variants.len());
    for (v, variant) in spec.variants.iter().enumerate().rev() {
        let runs = records.split_off(v * spec.runs);
        let summaries: Vec<RunSummary> = runs.iter().map(|r| r.summary.clone()).collect();
        variants.push(VariantResult {
            name: variant.name.clone(),
            config: variant.config(&spec.base, &spec.mge_params),
            aggregate: aggregate_runs(&summaries)?,
            runs,
        });
    }
    variants.reverse();
    Ok(ExperimentResult { variants })
}

/// Simulates and writes the output tree.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    let result = simulate(spec)?;
    write_outputs(spec, &result)?;
    Ok(result)
}

pub fn write_outputs(spec: &ExperimentSpec, result: &ExperimentResult) -> Result<()> {
    let out = &spec.out_dir;
    for v in &result.variants {
        let dir = out.join(&v.name);
        for (r, run) in v.runs.iter().enumerate() {
            let run_dir = dir.join(format!("run_{r:03}"));
            write_file(&run_dir.join("curves.csv"), &run_curves_csv(&run.stats))?;
            write_file(&run_dir.join("census.csv"), &census_csv(&run.timeline))?;
            write_file(&run_dir.join("timeline.csv"), &timeline_csv(&run.timeline))?;
            if spec.dump_best {
                if let Some((_, g)) = &run.summary.final_best {
                    write_file(&run_dir.join("best.hex"), &format!("{}\n", g.to_hex()))?;
                }
            }
        }
        write_file(&dir.join("curves.csv"), &aggregate_csv(&v.aggregate))?;
        write_file(&dir.join("runs.csv"), &runs_csv(&v.runs))?;
        write_file(&dir.join("milestones.csv"), &milestones_csv(&v.aggregate))?;
    }
    emit_plot_data(&out.join("plots"), result)
}

/// Multi-series data files, one per plot.
pub fn emit_plot_data(dir: &Path, result: &ExperimentResult) -> Result<()> {
    write_file(&dir.join("scores.csv"), &scores_csv(result))?;
    for v in &result.variants {
        if v.config.mge.is_none() {
            continue;
        }
        write_file(
            &dir.join(format!("mge_fractions_{}.csv", v.name)),
            &fractions_csv(&v.aggregate),
        )?;
        if let Some(run) = v.runs.first() {
            write_file(
                &dir.join(format!("dominance_{}.csv", v.name)),
                &dominance_csv(&run.timeline),
            )?;
        }
    }
    Ok(())
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

pub fn run_curves_csv(stats: &[GenerationStats]) -> String {
    let mut s = String::from("generation,best,mean,mge1_fraction,mge2_fraction\n");
    for st in stats {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            st.generation,
            st.best_score,
            st.mean_score,
            st.mge1_affected_fraction,
            st.mge2_affected_fraction
        );
    }
    s
}

pub fn census_csv(timeline: &DominanceTimeline) -> String {
    let mut s = String::from("generation,code,count,kind,is_dominant\n");
    for rec in &timeline.records {
        for (code, &count) in &rec.counts {
            let dominant = rec.dominant.as_deref() == Some(code.as_str());
            let _ = writeln!(
                s,
                "{},{},{},{},{}",
                rec.generation, code, count, rec.kinds[code], dominant
            );
        }
    }
    s
}

pub fn timeline_csv(timeline: &DominanceTimeline) -> String {
    let mut s = String::from("generation,old_dominant,new_dominant\n");
    for sh in &timeline.shifts {
        let _ = writeln!(
            s,
            "{},{},{}",
            sh.generation,
            sh.old.as_deref().unwrap_or(""),
            sh.new.as_deref().unwrap_or("")
        );
    }
    s
}

fn dominance_csv(timeline: &DominanceTimeline) -> String {
    let mut s = String::from("generation,dominant,dominant_count,carriers\n");
    for rec in &timeline.records {
        let _ = writeln!(
            s,
            "{},{},{},{}",
            rec.generation,
            rec.dominant.as_deref().unwrap_or(""),
            rec.dominant_count,
            rec.carriers()
        );
    }
    s
}

pub fn aggregate_csv(agg: &Aggregate) -> String {
    let mut s = String::from("generation,mean_best,mean_mean,stderr_best\n");
    for g in 0..agg.mean_best.len() {
        let _ = writeln!(
            s,
            "{g},{},{},{}",
            agg.mean_best[g], agg.mean_mean[g], agg.stderr_best[g]
        );
    }
    s
}

fn runs_csv(runs: &[RunRecord]) -> String {
    let mut s = String::from("run,seed,final_best,peak_best,final_mean\n");
    for (r, run) in runs.iter().enumerate() {
        let last = run.stats.last();
        let _ = writeln!(
            s,
            "{r},{},{},{},{}",
            run.seed,
            last.map_or(String::new(), |l| l.best_score.to_string()),
            run.summary.peak().map_or(String::new(), |p| p.to_string()),
            last.map_or(String::new(), |l| l.mean_score.to_string()),
        );
    }
    s
}

fn milestones_csv(agg: &Aggregate) -> String {
    let mut s = String::from("score,median_generation,success_rate\n");
    for m in &agg.milestones {
        let median = m.median_generation.map_or(String::new(), |g| g.to_string());
        let _ = writeln!(s, "{},{median},{}", m.score, m.success_rate);
    }
    s
}

fn scores_csv(result: &ExperimentResult) -> String {
    let mut s = String::from("generation");
    for v in &result.variants {
        let _ = write!(s, ",{0}_best,{0}_mean", v.name);
    }
    s.push('\n');
    let len = result
        .variants
        .iter()
        .map(|v| v.aggregate.mean_best.len())
        .max()
        .unwrap_or(0);
    for g in 0..len {
        let _ = write!(s, "{g}");
        for v in &result.variants {
            let a = &v.aggregate;
            match (a.mean_best.get(g), a.mean_mean.get(g)) {
                (Some(b), Some(m)) => {
                    let _ = write!(s, ",{b},{m}");
                }
                _ => s.push_str(",,"),
            }
        }
        s.push('\n');
    }
    s
}

fn fractions_csv(agg: &Aggregate) -> String {
    let mut s = String::from("generation,mge1_fraction,mge2_fraction\n");
    for g in 0..agg.mean_mge1_fraction.len() {
        let _ = writeln!(
            s,
            "{g},{},{}",
            agg.mean_mge1_fraction[g], agg.mean_mge2_fraction[g]
        );
    }
    s
}

/// One hex line per genome.
pub fn hex_dump(genomes: &[Genome]) -> String {
    genomes.iter().map(|g| g.to_hex() + "\n").collect()
}
