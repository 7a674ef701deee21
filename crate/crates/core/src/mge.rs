//! Artificial transposons and the two mobile-genetic-element operators.
//!
//! Only the input-0 half of a decision table (what the ant does while facing
//! a white cell) is visible to these operators. Following input-0 transitions
//! from state 0 until a state repeats yields an [`ActionChain`]; a transposon
//! is the prefix of that chain that is free of NOPs except possibly its last
//! element, and ends either with a NOP (immature) or with the chain's jump
//! back into itself (mature).

use std::fmt;

use log::{debug, log_enabled, Level};
use rand::Rng;

use crate::automaton::{Action, Genome, StateEntry, StateTable, STATES};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MgeConfig {
    /// Shortest sequence recognised as a transposon.
    pub min_len: usize,
    /// Longest sequence the one-place operator will edit.
    pub max_len: usize,
    /// Period used by the one-place operator's context-dependent edit.
    pub period_n: usize,
    /// Fraction of the population given a one-place mutation attempt per generation.
    pub mge1_rate: f64,
    /// Fraction of the population given a transposition attempt per generation.
    pub mge2_rate: f64,
}

impl Default for MgeConfig {
    fn default() -> Self {
        MgeConfig {
            min_len: 5,
            max_len: 11,
            period_n: 5,
            mge1_rate: 0.5,
            mge2_rate: 0.5,
        }
    }
}

impl MgeConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if self.min_len < 1 {
            return fail("min_len must be at least 1".into());
        }
        if self.max_len > STATES {
            return fail(format!("max_len must be at most {STATES}"));
        }
        if self.min_len > self.max_len {
            return fail(format!(
                "min_len ({}) exceeds max_len ({})",
                self.min_len, self.max_len
            ));
        }
        if !(3..=8).contains(&self.period_n) {
            return fail(format!("period_n must lie in 3..=8, got {}", self.period_n));
        }
        if self.period_n > self.min_len {
            return fail(format!(
                "period_n ({}) exceeds min_len ({})",
                self.period_n, self.min_len
            ));
        }
        for (name, r) in [("mge1_rate", self.mge1_rate), ("mge2_rate", self.mge2_rate)] {
            if !(0.0..=1.0).contains(&r) {
                return fail(format!("{name} must lie in [0, 1], got {r}"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChainElement {
    pub state: u8,
    pub action: Action,
    pub next_state: u8,
}

/// How an action chain ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainTerminal {
    /// The last element jumps back to the element at this 1-based position.
    Revisit(usize),
    /// The chain was cut without closing a loop.
    EndByLength,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionChain {
    pub elements: Vec<ChainElement>,
    pub terminal: ChainTerminal,
}

impl ActionChain {
    /// A chain over states `0, 1, 2, ...` carrying the given actions. Used to
    /// build chains independent of any table.
    pub fn from_actions(actions: &[Action], terminal: ChainTerminal) -> ActionChain {
        let n = actions.len();
        let elements = actions
            .iter()
            .enumerate()
            .map(|(i, &action)| {
                let next_state = if i + 1 < n {
                    i + 1
                } else {
                    match terminal {
                        ChainTerminal::Revisit(p) => p - 1,
                        ChainTerminal::EndByLength => n,
                    }
                };
                ChainElement {
                    state: i as u8,
                    action,
                    next_state: next_state as u8,
                }
            })
            .collect();
        ActionChain { elements, terminal }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Action letters, e.g. `LRRLF`.
    pub fn code(&self) -> String {
        self.elements.iter().map(|e| e.action.letter()).collect()
    }
}

/// Follows input-0 transitions from state 0 until the next state was already
/// visited.
pub fn extract_chain(table: &StateTable) -> ActionChain {
    let mut position = [0usize; STATES];
    let mut elements = Vec::with_capacity(8);
    let mut state = 0usize;
    loop {
        let e = table.entry(state, 0);
        elements.push(ChainElement {
            state: state as u8,
            action: e.action,
            next_state: e.next_state,
        });
        position[state] = elements.len();
        let next = e.next_state as usize;
        if position[next] != 0 {
            return ActionChain {
                elements,
                terminal: ChainTerminal::Revisit(position[next]),
            };
        }
        state = next;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TransposonKind {
    /// Loop-terminated, length within `[min_len, max_len]`.
    Mature,
    /// NOP-terminated, length within `[min_len, max_len]`.
    Immature,
    /// Well-formed but longer than `max_len`.
    Overlong,
}

impl TransposonKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TransposonKind::Mature => "mature",
            TransposonKind::Immature => "immature",
            TransposonKind::Overlong => "overlong",
        }
    }
}

impl fmt::Display for TransposonKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Terminus {
    Nop,
    /// Jumps back to this 1-based position inside the sequence.
    Cycle { target: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transposon {
    pub code: String,
    pub states: Vec<u8>,
    pub kind: TransposonKind,
    pub terminus: Terminus,
}

impl Transposon {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn cycle_target(&self) -> Option<usize> {
        match self.terminus {
            Terminus::Cycle { target } => Some(target),
            Terminus::Nop => None,
        }
    }

    /// Loop-terminated sequences, including overlong ones, can be transposed.
    pub fn is_cycle(&self) -> bool {
        self.cycle_target().is_some()
    }
}

/// Finds the transposon anchored at the start of `chain`, if any.
pub fn match_transposon(chain: &ActionChain, cfg: &MgeConfig) -> Option<Transposon> {
    let nop_at = chain.elements.iter().position(|e| e.action == Action::Nop);
    let (len, terminus) = match nop_at {
        Some(i) => (i + 1, Terminus::Nop),
        None => match chain.terminal {
            ChainTerminal::Revisit(target) if (1..=chain.len()).contains(&target) => {
                (chain.len(), Terminus::Cycle { target })
            }
            _ => return None,
        },
    };
    if len < cfg.min_len {
        return None;
    }
    let kind = if len > cfg.max_len {
        TransposonKind::Overlong
    } else if terminus == Terminus::Nop {
        TransposonKind::Immature
    } else {
        TransposonKind::Mature
    };
    let covered = &chain.elements[..len];
    Some(Transposon {
        code: covered.iter().map(|e| e.action.letter()).collect(),
        states: covered.iter().map(|e| e.state).collect(),
        kind,
        terminus,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mge1Event {
    NopFilled,
    CycleBroken,
    LeftIntact,
    NoMatch,
}

/// Details of a one-place mutation, for tracing and invariant checks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mge1Edit {
    pub event: Mge1Event,
    pub transposon: Option<Transposon>,
    /// State whose action was copied onto the last element.
    pub source_state: Option<u8>,
    /// State whose input-0 entry was rewritten.
    pub edited_state: Option<u8>,
}

/// One-place operator: rewrites the rightmost element of the state-0
/// transposon with the action found `period_n - 1` positions before it.
///
/// A NOP terminus just takes the copied action. A loop terminus also gets
/// its jump redirected to a random state outside the sequence, breaking the
/// loop. Overlong sequences are left alone.
pub fn mge1_mutate<R: Rng + ?Sized>(
    table: &StateTable,
    cfg: &MgeConfig,
    rng: &mut R,
) -> (StateTable, Mge1Event) {
    let mut out = table.clone();
    let edit = mge1_mutate_in_place(&mut out, cfg, rng);
    (out, edit.event)
}

pub fn mge1_mutate_in_place<R: Rng + ?Sized>(
    table: &mut StateTable,
    cfg: &MgeConfig,
    rng: &mut R,
) -> Mge1Edit {
    let chain = extract_chain(table);
    let Some(tp) = match_transposon(&chain, cfg) else {
        return Mge1Edit {
            event: Mge1Event::NoMatch,
            transposon: None,
            source_state: None,
            edited_state: None,
        };
    };
    let intact = |tp: Transposon| Mge1Edit {
        event: Mge1Event::LeftIntact,
        transposon: Some(tp),
        source_state: None,
        edited_state: None,
    };
    if tp.kind == TransposonKind::Overlong {
        return intact(tp);
    }

    let len = tp.len();
    let source = chain.elements[len - cfg.period_n];
    let last = chain.elements[len - 1];
    let old = table.entry(last.state as usize, 0);
    let (event, next_state) = match tp.terminus {
        Terminus::Nop => (Mge1Event::NopFilled, old.next_state),
        Terminus::Cycle { .. } => {
            let outside: Vec<u8> = (0..STATES as u8)
                .filter(|s| !tp.states.contains(s))
                .collect();
            if outside.is_empty() {
                return intact(tp);
            }
            (
                Mge1Event::CycleBroken,
                outside[rng.random_range(0..outside.len())],
            )
        }
    };
    table.set_entry(
        last.state as usize,
        0,
        StateEntry::new(source.action, next_state),
    );
    Mge1Edit {
        event,
        transposon: Some(tp),
        source_state: Some(source.state),
        edited_state: Some(last.state),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mge2Event {
    Copied,
    NoDonorTransposon,
}

/// Two-place operator: copies the donor's loop-terminated transposon into
/// the acceptor at the same state indices, overwriting whatever is there.
pub fn mge2_transpose(
    donor: &StateTable,
    acceptor: &StateTable,
    cfg: &MgeConfig,
) -> (StateTable, Mge2Event) {
    let mut out = acceptor.clone();
    let (event, _) = mge2_transpose_in_place(donor, &mut out, cfg);
    (out, event)
}

pub fn mge2_transpose_in_place(
    donor: &StateTable,
    acceptor: &mut StateTable,
    cfg: &MgeConfig,
) -> (Mge2Event, Option<Transposon>) {
    match match_transposon(&extract_chain(donor), cfg) {
        Some(tp) if tp.is_cycle() => {
            for &s in &tp.states {
                acceptor.set_entry(s as usize, 0, donor.entry(s as usize, 0));
            }
            (Mge2Event::Copied, Some(tp))
        }
        _ => (Mge2Event::NoDonorTransposon, None),
    }
}

/// Outcome of one generation's MGE phase.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MgePhaseOutcome {
    /// Fraction of the population whose genome a one-place edit changed.
    pub mge1_affected_fraction: f64,
    /// Fraction of the population whose genome a transposition changed.
    pub mge2_affected_fraction: f64,
    pub mge1_attempts: usize,
    pub mge2_attempts: usize,
}

pub(crate) fn attempts(rate: f64, population: usize) -> usize {
    (rate * population as f64 + 1e-9).floor() as usize
}

/// Runs the transposition attempts, then the one-place attempts, over the
/// whole population.
///
/// Draw order: for each transposition, donor index then acceptor index; for
/// each one-place attempt, the ant index followed by any retarget draw.
pub fn apply_mge_phase<R: Rng + ?Sized>(
    genomes: &mut [Genome],
    cfg: &MgeConfig,
    rng: &mut R,
) -> MgePhaseOutcome {
    let all = vec![true; genomes.len()];
    apply_mge_phase_to(genomes, &all, cfg, rng)
}

/// Like [`apply_mge_phase`], but acceptors and one-place targets are drawn
/// only from ants flagged in `eligible`; donors come from the whole
/// population. Attempt counts still scale with the full population size and
/// affected fractions are relative to it.
pub fn apply_mge_phase_to<R: Rng + ?Sized>(
    genomes: &mut [Genome],
    eligible: &[bool],
    cfg: &MgeConfig,
    rng: &mut R,
) -> MgePhaseOutcome {
    assert_eq!(genomes.len(), eligible.len());
    let pop = genomes.len();
    let targets: Vec<usize> = (0..pop).filter(|&i| eligible[i]).collect();
    let mut out = MgePhaseOutcome::default();
    if targets.is_empty() {
        return out;
    }
    let mut hit2 = vec![false; pop];
    let mut hit1 = vec![false; pop];

    if pop >= 2 {
        out.mge2_attempts = attempts(cfg.mge2_rate, pop);
        for _ in 0..out.mge2_attempts {
            let a = targets[rng.random_range(0..targets.len())];
            let mut d = rng.random_range(0..pop - 1);
            if d >= a {
                d += 1;
            }
            let donor = genomes[d].decode();
            let mut acceptor = genomes[a].decode();
            if let (Mge2Event::Copied, Some(tp)) =
                mge2_transpose_in_place(&donor, &mut acceptor, cfg)
            {
                let written = acceptor.encode();
                if written != genomes[a] {
                    hit2[a] = true;
                    genomes[a] = written;
                }
                if log_enabled!(Level::Debug) {
                    debug!(
                        "-Transpose ant #{d} to ant #{a}. Pattern {} over states {:?}",
                        tp.code, tp.states
                    );
                }
            }
        }
    }

    out.mge1_attempts = attempts(cfg.mge1_rate, pop);
    for _ in 0..out.mge1_attempts {
        let i = targets[rng.random_range(0..targets.len())];
        let mut table = genomes[i].decode();
        let before = log_enabled!(Level::Debug).then(|| table.clone());
        let edit = mge1_mutate_in_place(&mut table, cfg, rng);
        if let Some(before) = before {
            trace_mge1(i, &before, &table, &edit);
        }
        if matches!(edit.event, Mge1Event::NopFilled | Mge1Event::CycleBroken) {
            let written = table.encode();
            if written != genomes[i] {
                hit1[i] = true;
                genomes[i] = written;
            }
        }
    }

    out.mge1_affected_fraction = hit1.iter().filter(|&&h| h).count() as f64 / pop as f64;
    out.mge2_affected_fraction = hit2.iter().filter(|&&h| h).count() as f64 / pop as f64;
    out
}

fn entry_line(table: &StateTable, state: u8) -> String {
    let e = table.entry(state as usize, 0);
    format!("state #{state}...{}/#{}", e.action, e.next_state)
}

fn trace_mge1(ant: usize, before: &StateTable, after: &StateTable, edit: &Mge1Edit) {
    let Some(tp) = &edit.transposon else {
        return;
    };
    let form = match tp.terminus {
        Terminus::Nop => "NOP",
        Terminus::Cycle { .. } => "cycle",
    };
    let mut lines = vec![format!(
        "-Check Ant #{ant} to pattern. Find pattern with {form}. Pattern is:"
    )];
    lines.extend(tp.states.iter().map(|&s| entry_line(before, s)));
    match (edit.event, edit.source_state, edit.edited_state) {
        (Mge1Event::NopFilled, Some(src), Some(dst)) => {
            lines.push(format!("Change NOP to node #{src} action"));
            lines.push(entry_line(after, dst));
        }
        (Mge1Event::CycleBroken, Some(src), Some(dst)) => {
            lines.push(format!(
                "Change last action to node #{src} action: {}",
                entry_line(after, dst)
            ));
        }
        _ => lines.push("Pattern left intact".into()),
    }
    debug!("{}", lines.join("\n"));
}
