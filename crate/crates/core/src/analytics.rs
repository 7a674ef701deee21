//! Transposon census, dominance timeline and cross-run aggregation.

use std::collections::BTreeMap;

use crate::automaton::Genome;
use crate::error::{Error, Result};
use crate::ga::GenerationStats;
use crate::mge::{extract_chain, match_transposon, MgeConfig, TransposonKind};

/// Forms carried by fewer ants than this are counted but never dominant.
pub const DEFAULT_ABUNDANCE_THRESHOLD: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct CensusRecord {
    pub generation: u64,
    /// Ants carrying each transposon code (one code per ant at most).
    pub counts: BTreeMap<String, usize>,
    pub kinds: BTreeMap<String, TransposonKind>,
    pub dominant: Option<String>,
    pub dominant_count: usize,
}

impl CensusRecord {
    /// Total number of ants carrying any detected transposon.
    pub fn carriers(&self) -> usize {
        self.counts.values().sum()
    }

    /// Fraction of carriers whose transposon has at least `len` elements;
    /// `None` when nobody carries one.
    pub fn length_fraction(&self, len: usize) -> Option<f64> {
        let total = self.carriers();
        if total == 0 {
            return None;
        }
        let long: usize = self
            .counts
            .iter()
            .filter(|(code, _)| code.len() >= len)
            .map(|(_, &n)| n)
            .sum();
        Some(long as f64 / total as f64)
    }
}

/// Counts transposon forms across `genomes`.
pub fn census(genomes: &[Genome], cfg: &MgeConfig, generation: u64, threshold: usize) -> CensusRecord {
    let mut counts = BTreeMap::new();
    let mut kinds = BTreeMap::new();
    for g in genomes {
        if let Some(tp) = match_transposon(&extract_chain(&g.decode()), cfg) {
            *counts.entry(tp.code.clone()).or_insert(0) += 1;
            kinds.entry(tp.code).or_insert(tp.kind);
        }
    }
    let (dominant, dominant_count) = dominant_of(&counts, threshold);
    CensusRecord {
        generation,
        counts,
        kinds,
        dominant,
        dominant_count,
    }
}

/// Largest count at or above `threshold`; ties go to the lexicographically
/// smallest code.
fn dominant_of(counts: &BTreeMap<String, usize>, threshold: usize) -> (Option<String>, usize) {
    let mut best: Option<(&String, usize)> = None;
    // BTreeMap iterates in code order, so a strict comparison keeps the
    // smallest code on ties.
    for (code, &n) in counts {
        if n >= threshold && best.is_none_or(|(_, b)| n > b) {
            best = Some((code, n));
        }
    }
    match best {
        Some((code, n)) => (Some(code.clone()), n),
        None => (None, 0),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Shift {
    pub generation: u64,
    pub old: Option<String>,
    pub new: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DominanceTimeline {
    pub records: Vec<CensusRecord>,
    pub shifts: Vec<Shift>,
    pub abundance_threshold: usize,
}

impl Default for DominanceTimeline {
    fn default() -> Self {
        DominanceTimeline::new(DEFAULT_ABUNDANCE_THRESHOLD)
    }
}

impl DominanceTimeline {
    pub fn new(abundance_threshold: usize) -> Self {
        DominanceTimeline {
            records: Vec::new(),
            shifts: Vec::new(),
            abundance_threshold,
        }
    }

    /// Appends a census record, noting a shift when the dominant form
    /// differs from the previous record's.
    pub fn update(&mut self, record: CensusRecord) -> Result<()> {
        if let Some(last) = self.records.last() {
            if record.generation <= last.generation {
                return Err(Error::Ordering {
                    last: last.generation,
                    got: record.generation,
                });
            }
            if last.dominant != record.dominant {
                self.shifts.push(Shift {
                    generation: record.generation,
                    old: last.dominant.clone(),
                    new: record.dominant.clone(),
                });
            }
        }
        self.records.push(record);
        Ok(())
    }

    /// Recomputes the shift list from the stored records.
    pub fn derive_shifts(&self) -> Vec<Shift> {
        self.records
            .windows(2)
            .filter(|w| w[0].dominant != w[1].dominant)
            .map(|w| Shift {
                generation: w[1].generation,
                old: w[0].dominant.clone(),
                new: w[1].dominant.clone(),
            })
            .collect()
    }
}

/// First generation at which the best score reached `score`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Milestone {
    pub score: u32,
    pub generation: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub best: Vec<u32>,
    pub mean: Vec<f64>,
    pub mge1_fraction: Vec<f64>,
    pub mge2_fraction: Vec<f64>,
    pub milestones: Vec<Milestone>,
    /// Score and genome of the best ant in the final population.
    pub final_best: Option<(u32, Genome)>,
}

impl RunSummary {
    pub fn generations(&self) -> usize {
        self.best.len()
    }

    /// Highest best-of-generation score over the whole run.
    pub fn peak(&self) -> Option<u32> {
        self.best.iter().copied().max()
    }
}

/// `milestones` need not be sorted; the summary keeps them sorted.
pub fn summarize_run(stats: &[GenerationStats], milestones: &[u32]) -> RunSummary {
    let mut scores = milestones.to_vec();
    scores.sort_unstable();
    scores.dedup();
    let milestones = scores
        .into_iter()
        .map(|score| Milestone {
            score,
            generation: stats
                .iter()
                .position(|s| s.best_score >= score)
                .map(|i| stats[i].generation),
        })
        .collect();
    RunSummary {
        best: stats.iter().map(|s| s.best_score).collect(),
        mean: stats.iter().map(|s| s.mean_score).collect(),
        mge1_fraction: stats.iter().map(|s| s.mge1_affected_fraction).collect(),
        mge2_fraction: stats.iter().map(|s| s.mge2_affected_fraction).collect(),
        milestones,
        final_best: None,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MilestoneStats {
    pub score: u32,
    /// Median generation over the runs that reached the milestone.
    pub median_generation: Option<f64>,
    pub success_rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Aggregate {
    pub runs: usize,
    pub mean_best: Vec<f64>,
    pub mean_mean: Vec<f64>,
    /// Standard error of the best-of-generation mean.
    pub stderr_best: Vec<f64>,
    pub mean_mge1_fraction: Vec<f64>,
    pub mean_mge2_fraction: Vec<f64>,
    pub milestones: Vec<MilestoneStats>,
}

pub fn aggregate_runs(summaries: &[RunSummary]) -> Result<Aggregate> {
    let Some(first) = summaries.first() else {
        return Ok(Aggregate {
            runs: 0,
            mean_best: Vec::new(),
            mean_mean: Vec::new(),
            stderr_best: Vec::new(),
            mean_mge1_fraction: Vec::new(),
            mean_mge2_fraction: Vec::new(),
            milestones: Vec::new(),
        });
    };
    let len = first.generations();
    for s in summaries {
        if s.generations() != len {
            return Err(Error::Shape {
                expected: len,
                actual: s.generations(),
            });
        }
    }
    let n = summaries.len() as f64;
    let column_mean = |f: &dyn Fn(&RunSummary, usize) -> f64| -> Vec<f64> {
        (0..len)
            .map(|g| summaries.iter().map(|s| f(s, g)).sum::<f64>() / n)
            .collect()
    };
    let mean_best = column_mean(&|s, g| s.best[g] as f64);
    let stderr_best = (0..len)
        .map(|g| {
            if summaries.len() < 2 {
                return 0.0;
            }
            let m = mean_best[g];
            let var = summaries
                .iter()
                .map(|s| (s.best[g] as f64 - m).powi(2))
                .sum::<f64>()
                / (n - 1.0);
            (var / n).sqrt()
        })
        .collect();

    let milestones = first
        .milestones
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let mut reached: Vec<u64> = summaries
                .iter()
                .filter_map(|s| s.milestones.get(i).and_then(|x| x.generation))
                .collect();
            reached.sort_unstable();
            MilestoneStats {
                score: m.score,
                median_generation: median(&reached),
                success_rate: reached.len() as f64 / n,
            }
        })
        .collect();

    Ok(Aggregate {
        runs: summaries.len(),
        mean_best,
        mean_mean: column_mean(&|s, g| s.mean[g]),
        stderr_best,
        mean_mge1_fraction: column_mean(&|s, g| s.mge1_fraction[g]),
        mean_mge2_fraction: column_mean(&|s, g| s.mge2_fraction[g]),
        milestones,
    })
}

fn median(sorted: &[u64]) -> Option<f64> {
    let n = sorted.len();
    match n {
        0 => None,
        _ if n % 2 == 1 => Some(sorted[n / 2] as f64),
        _ => Some((sorted[n / 2 - 1] + sorted[n / 2]) as f64 / 2.0),
    }
}
