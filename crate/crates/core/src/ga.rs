//! The generational loop: Expose (score every ant), Select (mark parents),
//! Reproduce (overwrite unmarked ants with copies of marked ones, then cross
//! over and mutate the copies) and the optional MGE phase, which like the
//! other variation operators only touches the copies.

use std::borrow::Cow;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};
use rayon::prelude::*;

use crate::automaton::{run_ant, Genome, GENOME_BITS, GENOME_WORDS};
use crate::error::{Error, Result};
use crate::mge::{apply_mge_phase_to, MgeConfig, MgePhaseOutcome};
use crate::trail::TrailGrid;

/// Populations at least this large are scored in parallel.
const PARALLEL_EXPOSE_MIN: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Selection {
    /// Mark every ant scoring strictly above the population mean.
    TruncationMean,
    /// Mark the top `ceil(fraction * N)` ants.
    TruncationQuota(f64),
    /// Mark each ant with probability `score / max_score`.
    Roulette,
}

impl fmt::Display for Selection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Selection::TruncationMean => f.write_str("mean"),
            Selection::TruncationQuota(q) => write!(f, "quota:{q}"),
            Selection::Roulette => f.write_str("roulette"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrossoverMode {
    /// Every bit position is a potential tail-swap point.
    PerBit,
    /// At most one tail swap per pair, with probability `rate * 448`.
    OnePoint,
}

impl FromStr for CrossoverMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "per-bit" | "per_bit" => Ok(CrossoverMode::PerBit),
            "one-point" | "one_point" => Ok(CrossoverMode::OnePoint),
            other => Err(format!("unknown crossover mode `{other}`")),
        }
    }
}

impl fmt::Display for CrossoverMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CrossoverMode::PerBit => "per-bit",
            CrossoverMode::OnePoint => "one-point",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaConfig {
    pub population_size: usize,
    pub generations: u64,
    pub max_steps: u32,
    /// Probability per bit per generation.
    pub crossover_rate: f64,
    /// Probability per bit per generation.
    pub mutation_rate: f64,
    pub selection: Selection,
    pub reproduce_quota: f64,
    pub crossover: CrossoverMode,
    pub seed: u64,
    /// `None` disables both MGE operators.
    pub mge: Option<MgeConfig>,
}

impl Default for GaConfig {
    fn default() -> Self {
        GaConfig {
            population_size: 100,
            generations: 5000,
            max_steps: 330,
            crossover_rate: 0.0001,
            mutation_rate: 0.04,
            selection: Selection::TruncationMean,
            reproduce_quota: 0.15,
            crossover: CrossoverMode::PerBit,
            seed: 0,
            mge: Some(MgeConfig::default()),
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if self.population_size == 0 {
            return fail("population_size must be positive".into());
        }
        if self.max_steps == 0 {
            return fail("max_steps must be positive".into());
        }
        for (name, p) in [
            ("crossover_rate", self.crossover_rate),
            ("mutation_rate", self.mutation_rate),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return fail(format!("{name} must lie in [0, 1], got {p}"));
            }
        }
        let quota_ok = |q: f64| q > 0.0 && q <= 1.0;
        if !quota_ok(self.reproduce_quota) {
            return fail(format!(
                "reproduce_quota must lie in (0, 1], got {}",
                self.reproduce_quota
            ));
        }
        if let Selection::TruncationQuota(q) = self.selection {
            if !quota_ok(q) {
                return fail(format!("selection quota must lie in (0, 1], got {q}"));
            }
        }
        if let Some(mge) = &self.mge {
            mge.validate()?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    pub genomes: Vec<Genome>,
    /// Scores parallel to `genomes`; empty when the genomes have changed
    /// since they were last exposed.
    pub scores: Vec<u32>,
    pub generation: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenerationStats {
    pub generation: u64,
    pub best_score: u32,
    pub mean_score: f64,
    pub marked_count: usize,
    pub mge1_affected_fraction: f64,
    pub mge2_affected_fraction: f64,
}

/// Scores every genome against the trail.
pub fn expose(genomes: &[Genome], grid: &TrailGrid, max_steps: u32) -> Vec<u32> {
    let score = |g: &Genome| run_ant(&g.decode(), grid, max_steps).score;
    if genomes.len() >= PARALLEL_EXPOSE_MIN {
        genomes.par_iter().map(score).collect()
    } else {
        genomes.iter().map(score).collect()
    }
}

/// Marks ants scoring strictly above the mean; marks everyone when no score
/// exceeds it.
pub fn select_truncation_mean(scores: &[u32]) -> Vec<bool> {
    let n = scores.len() as u64;
    let sum: u64 = scores.iter().map(|&s| s as u64).sum();
    let marks: Vec<bool> = scores.iter().map(|&s| s as u64 * n > sum).collect();
    if marks.iter().any(|&m| m) {
        marks
    } else {
        vec![true; scores.len()]
    }
}

/// Marks the `ceil(quota * N)` best ants, lower index first among ties.
pub fn select_truncation_quota(scores: &[u32], quota: f64) -> Vec<bool> {
    let n = scores.len();
    let k = ((quota * n as f64 - 1e-9).ceil() as usize).clamp(1, n.max(1));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| scores[b].cmp(&scores[a]).then(a.cmp(&b)));
    let mut marks = vec![false; n];
    for &i in order.iter().take(k) {
        marks[i] = true;
    }
    marks
}

/// Marks each ant independently with probability `score / max_score`
/// (one uniform draw per ant, in index order). An all-zero population uses
/// probability 1/2; if nothing gets marked the best ant is marked.
pub fn select_roulette<R: Rng + ?Sized>(scores: &[u32], rng: &mut R) -> Vec<bool> {
    let max = scores.iter().copied().max().unwrap_or(0);
    let mut marks: Vec<bool> = scores
        .iter()
        .map(|&s| {
            let p = if max == 0 { 0.5 } else { s as f64 / max as f64 };
            rng.random::<f64>() < p
        })
        .collect();
    if !marks.iter().any(|&m| m) {
        if let Some(best) = scores.iter().position(|&s| s == max) {
            marks[best] = true;
        }
    }
    marks
}

fn select<R: Rng + ?Sized>(scores: &[u32], selection: Selection, rng: &mut R) -> Vec<bool> {
    match selection {
        Selection::TruncationMean => select_truncation_mean(scores),
        Selection::TruncationQuota(q) => select_truncation_quota(scores, q),
        Selection::Roulette => select_roulette(scores, rng),
    }
}

/// Positions `0..GENOME_BITS` at which an independent event with
/// probability `rate` fires, sampled by geometric gap skipping.
fn bernoulli_positions<R: Rng + ?Sized>(rate: f64, rng: &mut R) -> Vec<usize> {
    let mut hits = Vec::new();
    if rate <= 0.0 {
        return hits;
    }
    if rate >= 1.0 {
        return (0..GENOME_BITS).collect();
    }
    let gaps = Geometric::new(rate).expect("rate lies in (0, 1)");
    let mut pos = 0u64;
    loop {
        pos += gaps.sample(rng);
        if pos >= GENOME_BITS as u64 {
            return hits;
        }
        hits.push(pos as usize);
        pos += 1;
    }
}

/// Swaps the tails of `a` and `b` at every listed position: bit `i` ends up
/// exchanged iff an odd number of points lie at or before `i`.
pub fn crossover_at(a: &mut Genome, b: &mut Genome, points: &[usize]) {
    if points.is_empty() {
        return;
    }
    let mut mask = [0u64; GENOME_WORDS];
    let mut inside = false;
    let mut next = points.iter().peekable();
    for i in 0..GENOME_BITS {
        while next.peek() == Some(&&i) {
            inside = !inside;
            next.next();
        }
        if inside {
            mask[i / 64] |= 1u64 << (63 - i % 64);
        }
    }
    let mut wa = *a.words();
    let mut wb = *b.words();
    for k in 0..GENOME_WORDS {
        let diff = (wa[k] ^ wb[k]) & mask[k];
        wa[k] ^= diff;
        wb[k] ^= diff;
    }
    *a = Genome::from_words(wa);
    *b = Genome::from_words(wb);
}

/// Multi-point crossover: each bit position independently starts a tail
/// swap with probability `rate`.
pub fn crossover_pair<R: Rng + ?Sized>(
    a: &Genome,
    b: &Genome,
    rate: f64,
    rng: &mut R,
) -> (Genome, Genome) {
    let (mut a, mut b) = (*a, *b);
    crossover_at(&mut a, &mut b, &bernoulli_positions(rate, rng));
    (a, b)
}

/// Classic one-point crossover, fired with probability `min(1, rate * 448)`.
pub fn crossover_one_point<R: Rng + ?Sized>(
    a: &Genome,
    b: &Genome,
    rate: f64,
    rng: &mut R,
) -> (Genome, Genome) {
    let (mut a, mut b) = (*a, *b);
    let p = (rate * GENOME_BITS as f64).min(1.0);
    if p > 0.0 && rng.random::<f64>() < p {
        let point = rng.random_range(1..GENOME_BITS);
        crossover_at(&mut a, &mut b, &[point]);
    }
    (a, b)
}

/// Flips each bit independently with probability `rate`.
pub fn point_mutate<R: Rng + ?Sized>(g: &Genome, rate: f64, rng: &mut R) -> Genome {
    let mut out = *g;
    for i in bernoulli_positions(rate, rng) {
        out.flip(i);
    }
    out
}

/// Overwrites every unmarked genome with a copy of a uniformly drawn marked
/// one, then crosses over consecutive offspring pairs and mutates every
/// offspring. Marked genomes are not touched.
///
/// Panics when nothing is marked.
pub fn reproduce<R: Rng + ?Sized>(
    genomes: &mut [Genome],
    marks: &[bool],
    config: &GaConfig,
    rng: &mut R,
) {
    assert_eq!(genomes.len(), marks.len());
    let parents: Vec<usize> = (0..marks.len()).filter(|&i| marks[i]).collect();
    assert!(!parents.is_empty(), "reproduce needs at least one marked ant");
    let offspring: Vec<usize> = (0..marks.len()).filter(|&i| !marks[i]).collect();

    for &o in &offspring {
        let p = parents[rng.random_range(0..parents.len())];
        genomes[o] = genomes[p];
    }
    for pair in offspring.chunks_exact(2) {
        let (a, b) = (genomes[pair[0]], genomes[pair[1]]);
        let (a, b) = match config.crossover {
            CrossoverMode::PerBit => crossover_pair(&a, &b, config.crossover_rate, rng),
            CrossoverMode::OnePoint => crossover_one_point(&a, &b, config.crossover_rate, rng),
        };
        genomes[pair[0]] = a;
        genomes[pair[1]] = b;
    }
    for &o in &offspring {
        genomes[o] = point_mutate(&genomes[o], config.mutation_rate, rng);
    }
}

/// A running evolution. Each [`Evolution::step`] performs one full generation.
///
/// All randomness comes from one ChaCha8 stream seeded with `config.seed`,
/// consumed in this order: initial genomes, then per generation roulette
/// draws (if any), the MGE phase, parent picks, crossover, mutation.
pub struct Evolution<'g> {
    config: GaConfig,
    grid: Cow<'g, TrailGrid>,
    rng: ChaCha8Rng,
    population: Population,
    best: Option<(u32, Genome)>,
}

impl<'g> Evolution<'g> {
    pub fn new(config: GaConfig, grid: &'g TrailGrid) -> Result<Self> {
        Self::with_grid(config, Cow::Borrowed(grid))
    }

    /// An evolution that owns its trail.
    pub fn owned(config: GaConfig, grid: TrailGrid) -> Result<Evolution<'static>> {
        Evolution::with_grid(config, Cow::Owned(grid))
    }

    fn with_grid(config: GaConfig, grid: Cow<'g, TrailGrid>) -> Result<Self> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let genomes: Vec<Genome> = (0..config.population_size)
            .map(|_| Genome::random(&mut rng))
            .collect();
        Ok(Evolution {
            population: Population {
                scores: Vec::new(),
                genomes,
                generation: 0,
            },
            config,
            grid,
            rng,
            best: None,
        })
    }

    pub fn config(&self) -> &GaConfig {
        &self.config
    }

    /// The population about to be exposed by the next step.
    pub fn population(&self) -> &Population {
        &self.population
    }

    pub fn into_population(self) -> Population {
        self.population
    }

    /// Scores the current genomes if they have not been scored yet.
    pub fn evaluate(&mut self) -> &Population {
        let pop = &mut self.population;
        if pop.scores.len() != pop.genomes.len() {
            pop.scores = expose(&pop.genomes, &self.grid, self.config.max_steps);
        }
        &self.population
    }

    /// Best ant of the most recently exposed generation.
    pub fn best(&self) -> Option<(u32, Genome)> {
        self.best
    }

    pub fn step(&mut self) -> GenerationStats {
        self.evaluate();
        let pop = &mut self.population;
        let n = pop.scores.len();
        let (best_idx, &best_score) = pop
            .scores
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
            .expect("population is non-empty");
        self.best = Some((best_score, pop.genomes[best_idx]));
        let mean_score = pop.scores.iter().map(|&s| s as f64).sum::<f64>() / n as f64;

        let marks = select(&pop.scores, self.config.selection, &mut self.rng);
        let marked_count = marks.iter().filter(|&&m| m).count();

        reproduce(&mut pop.genomes, &marks, &self.config, &mut self.rng);

        // Transposons land in the fresh copies only. Letting them rewrite the
        // marked parents as well destroys the elite every generation.
        let phase = match &self.config.mge {
            Some(mge) => {
                let offspring: Vec<bool> = marks.iter().map(|&m| !m).collect();
                apply_mge_phase_to(&mut pop.genomes, &offspring, mge, &mut self.rng)
            }
            None => MgePhaseOutcome::default(),
        };

        let stats = GenerationStats {
            generation: pop.generation,
            best_score,
            mean_score,
            marked_count,
            mge1_affected_fraction: phase.mge1_affected_fraction,
            mge2_affected_fraction: phase.mge2_affected_fraction,
        };
        pop.scores.clear();
        pop.generation += 1;
        stats
    }
}

/// Runs `config.generations` generations and returns every generation's
/// statistics together with the final population.
pub fn run_evolution(config: &GaConfig, grid: &TrailGrid) -> Result<(Vec<GenerationStats>, Population)> {
    let mut evo = Evolution::new(config.clone(), grid)?;
    let stats = (0..config.generations).map(|_| evo.step()).collect();
    evo.evaluate();
    Ok((stats, evo.into_population()))
}
