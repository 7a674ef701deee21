//! Finite-state ants: the 448-bit genome, its decision table, and the trial
//! that scores one ant against a trail.
//!
//! Genome layout, most significant bit first: states 0..31 in order; per state
//! the input-0 entry then the input-1 entry; per entry two action bits
//! (`00` NOP, `01` FWD, `10` RGT, `11` LFT) followed by five next-state bits.
//! Every bit pattern decodes to a valid table.

use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::trail::{Pose, TrailGrid};

pub const STATES: usize = 32;
pub const INPUTS: usize = 2;
pub const ENTRY_BITS: usize = 7;
/// Chromosome length in bits.
pub const GENOME_BITS: usize = STATES * INPUTS * ENTRY_BITS;
pub const GENOME_WORDS: usize = GENOME_BITS / 64;
pub const HEX_LEN: usize = GENOME_BITS / 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Action {
    Nop,
    Fwd,
    Rgt,
    Lft,
}

impl Action {
    pub const ALL: [Action; 4] = [Action::Nop, Action::Fwd, Action::Rgt, Action::Lft];

    pub fn code(self) -> u8 {
        match self {
            Action::Nop => 0b00,
            Action::Fwd => 0b01,
            Action::Rgt => 0b10,
            Action::Lft => 0b11,
        }
    }

    pub fn from_code(code: u8) -> Action {
        match code & 0b11 {
            0b00 => Action::Nop,
            0b01 => Action::Fwd,
            0b10 => Action::Rgt,
            _ => Action::Lft,
        }
    }

    /// Single-letter form used in transposon codes.
    pub fn letter(self) -> char {
        match self {
            Action::Nop => 'N',
            Action::Fwd => 'F',
            Action::Rgt => 'R',
            Action::Lft => 'L',
        }
    }

    pub fn from_letter(c: char) -> Option<Action> {
        match c {
            'N' => Some(Action::Nop),
            'F' => Some(Action::Fwd),
            'R' => Some(Action::Rgt),
            'L' => Some(Action::Lft),
            _ => None,
        }
    }

    pub fn mnemonic(self) -> &'static str {
        match self {
            Action::Nop => "NOP",
            Action::Fwd => "FWD",
            Action::Rgt => "RGT",
            Action::Lft => "LFT",
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.mnemonic())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StateEntry {
    pub action: Action,
    pub next_state: u8,
}

impl StateEntry {
    pub const NOP_TO_ZERO: StateEntry = StateEntry {
        action: Action::Nop,
        next_state: 0,
    };

    /// Panics if `next_state` is not a valid state index.
    pub fn new(action: Action, next_state: u8) -> Self {
        assert!((next_state as usize) < STATES, "next state {next_state} out of range");
        StateEntry { action, next_state }
    }

    fn bits(self) -> u8 {
        self.action.code() << 5 | self.next_state
    }

    fn from_bits(bits: u8) -> Self {
        StateEntry {
            action: Action::from_code(bits >> 5),
            next_state: bits & 0x1f,
        }
    }
}

/// Decision table indexed by `(state, input)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StateTable {
    entries: [[StateEntry; INPUTS]; STATES],
}

impl Default for StateTable {
    fn default() -> Self {
        StateTable {
            entries: [[StateEntry::NOP_TO_ZERO; INPUTS]; STATES],
        }
    }
}

impl StateTable {
    #[inline]
    pub fn entry(&self, state: usize, input: usize) -> StateEntry {
        self.entries[state][input]
    }

    pub fn set_entry(&mut self, state: usize, input: usize, entry: StateEntry) {
        self.entries[state][input] = entry;
    }

    /// Builds a table from `(input0, input1)` pairs for states 0..n; the rest
    /// stay `NOP/0`.
    pub fn from_rows(rows: &[(StateEntry, StateEntry)]) -> Self {
        assert!(rows.len() <= STATES);
        let mut t = StateTable::default();
        for (s, (e0, e1)) in rows.iter().enumerate() {
            t.entries[s] = [*e0, *e1];
        }
        t
    }

    pub fn encode(&self) -> Genome {
        encode_table(self)
    }
}

/// Fixed-width bit-string genome (448 bits, MSB-first within each word).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Genome {
    words: [u64; GENOME_WORDS],
}

impl fmt::Debug for Genome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Genome({})", self.to_hex())
    }
}

impl Genome {
    pub fn zeros() -> Self {
        Genome::default()
    }

    pub fn from_words(words: [u64; GENOME_WORDS]) -> Self {
        Genome { words }
    }

    pub fn words(&self) -> &[u64; GENOME_WORDS] {
        &self.words
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let mut words = [0u64; GENOME_WORDS];
        for w in &mut words {
            *w = rng.random();
        }
        Genome { words }
    }

    pub fn from_bits(bits: &[bool]) -> Result<Self> {
        if bits.len() != GENOME_BITS {
            return Err(Error::Size {
                expected: GENOME_BITS,
                actual: bits.len(),
            });
        }
        let mut g = Genome::zeros();
        for (i, &b) in bits.iter().enumerate() {
            g.set_bit(i, b);
        }
        Ok(g)
    }

    pub fn to_bits(&self) -> Vec<bool> {
        (0..GENOME_BITS).map(|i| self.bit(i)).collect()
    }

    #[inline]
    pub fn bit(&self, i: usize) -> bool {
        self.words[i / 64] >> (63 - i % 64) & 1 == 1
    }

    #[inline]
    pub fn set_bit(&mut self, i: usize, value: bool) {
        let mask = 1u64 << (63 - i % 64);
        if value {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        self.words[i / 64] ^= 1u64 << (63 - i % 64);
    }

    /// Number of differing bits.
    pub fn hamming(&self, other: &Genome) -> u32 {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones())
            .sum()
    }

    /// Bit offset of the entry for `(state, input)`.
    pub fn entry_offset(state: usize, input: usize) -> usize {
        (state * INPUTS + input) * ENTRY_BITS
    }

    fn field(&self, offset: usize) -> u8 {
        let mut v = 0u8;
        for i in offset..offset + ENTRY_BITS {
            v = v << 1 | self.bit(i) as u8;
        }
        v
    }

    fn set_field(&mut self, offset: usize, v: u8) {
        for k in 0..ENTRY_BITS {
            self.set_bit(offset + k, v >> (ENTRY_BITS - 1 - k) & 1 == 1);
        }
    }

    pub fn entry(&self, state: usize, input: usize) -> StateEntry {
        StateEntry::from_bits(self.field(Genome::entry_offset(state, input)))
    }

    pub fn set_entry(&mut self, state: usize, input: usize, entry: StateEntry) {
        self.set_field(Genome::entry_offset(state, input), entry.bits());
    }

    pub fn decode(&self) -> StateTable {
        decode_genome(self)
    }

    /// 112 lowercase hex digits, most significant bit first.
    pub fn to_hex(&self) -> String {
        self.words.iter().map(|w| format!("{w:016x}")).collect()
    }

    pub fn from_hex(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.len() != HEX_LEN {
            return Err(Error::Size {
                expected: GENOME_BITS,
                actual: s.len() * 4,
            });
        }
        if !s.is_ascii() {
            return Err(Error::Hex("non-ASCII input".into()));
        }
        let mut words = [0u64; GENOME_WORDS];
        for (i, w) in words.iter_mut().enumerate() {
            let chunk = &s[i * 16..(i + 1) * 16];
            *w = u64::from_str_radix(chunk, 16).map_err(|e| Error::Hex(format!("`{chunk}`: {e}")))?;
        }
        Ok(Genome { words })
    }
}

pub fn decode_genome(genome: &Genome) -> StateTable {
    let mut t = StateTable::default();
    for s in 0..STATES {
        for i in 0..INPUTS {
            t.entries[s][i] = genome.entry(s, i);
        }
    }
    t
}

pub fn encode_table(table: &StateTable) -> Genome {
    let mut g = Genome::zeros();
    for s in 0..STATES {
        for i in 0..INPUTS {
            g.set_entry(s, i, table.entries[s][i]);
        }
    }
    g
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialResult {
    pub score: u32,
    pub steps_used: u32,
    pub final_pose: Pose,
}

/// Runs one ant from the trail start in state 0 on a private copy of the grid.
///
/// Each step senses the cell ahead, looks up `(action, next_state)`, performs
/// the action (a forward move consumes the cell it lands on), then switches
/// state. Stops after `max_steps` steps or once every trail cell is eaten.
pub fn run_ant(table: &StateTable, grid: &TrailGrid, max_steps: u32) -> TrialResult {
    let mut world = grid.clone();
    let total = grid.total_cells() as u32;
    let mut pose = grid.start();
    let mut state = 0usize;
    let mut score = 0u32;
    let mut steps = 0u32;
    while steps < max_steps && score < total {
        let input = world.sense_ahead(pose) as usize;
        let e = table.entries[state][input];
        match e.action {
            Action::Fwd => {
                pose = world.step_forward(pose);
                if world.consume(pose.x, pose.y) {
                    score += 1;
                }
            }
            Action::Rgt => pose.heading = pose.heading.turn_right(),
            Action::Lft => pose.heading = pose.heading.turn_left(),
            Action::Nop => {}
        }
        state = e.next_state as usize;
        steps += 1;
    }
    TrialResult {
        score,
        steps_used: steps,
        final_pose: pose,
    }
}

/// The decision table printed in the usual `STATE  ACT/NEXT  ACT/NEXT` form
/// with hexadecimal state numbers.
pub fn format_table(table: &StateTable) -> String {
    let mut out = String::from("State\tInput=0\tInput=1\n");
    for s in 0..STATES {
        let e0 = table.entry(s, 0);
        let e1 = table.entry(s, 1);
        out.push_str(&format!(
            "{s:02X}\t{}/{:02X}\t{}/{:02X}\n",
            e0.action, e0.next_state, e1.action, e1.next_state
        ));
    }
    out
}
