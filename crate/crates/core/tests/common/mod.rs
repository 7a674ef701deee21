//! Reference implementations and generators shared by the integration tests.
//! Nothing here calls into the code under test beyond plain data types.
#![allow(dead_code)]

use std::collections::HashSet;

use mge_ant::mge::{extract_chain, match_transposon, mge1_mutate_in_place, mge2_transpose, ActionChain, ChainTerminal, Mge1Event, Mge2Event};
use mge_ant::{Action, Genome, MgeConfig, StateEntry, StateTable, TrailGrid, TransposonKind};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const SAMPLE_TABLE: &str = "\
State\tInput=0\tInput=1
00\tFWD/0A\tNOP/09
01\tRGT/0E\tFWD/03
02\tNOP/08\tNOP/0E
03\tFWD/13\tRGT/18
04\tNOP/17\tNOP/0B
05\tRGT/17\tRGT/0A
06\tFWD/04\tNOP/09
07\tLFT/0A\tLFT/17
08\tLFT/12\tFWD/1E
09\tRGT/1E\tRGT/16
0A\tRGT/16\tFWD/06
0B\tRGT/13\tNOP/16
0C\tLFT/03\tLFT/0B
0D\tLFT/0E\tNOP/14
0E\tLFT/0C\tNOP/12
0F\tRGT/15\tFWD/1F
10\tNOP/0E\tLFT/17
11\tFWD/12\tFWD/0F
12\tLFT/11\tNOP/0C
13\tRGT/02\tNOP/1D
14\tRGT/0C\tLFT/0E
15\tFWD/18\tFWD/09
16\tFWD/01\tNOP/08
17\tNOP/0B\tLFT/1A
18\tLFT/13\tNOP/11
19\tNOP/0D\tRGT/01
1A\tNOP/1E\tLFT/1B
1B\tFWD/03\tFWD/10
1C\tRGT/0A\tNOP/00
1D\tRGT/06\tLFT/0A
1E\tRGT/0C\tNOP/18
1F\tRGT/10\tFWD/04
";

fn parse_cell(cell: &str) -> StateEntry {
    let (act, next) = cell.split_once('/').unwrap();
    let action = match act {
        "NOP" => Action::Nop,
        "FWD" => Action::Fwd,
        "RGT" => Action::Rgt,
        "LFT" => Action::Lft,
        _ => panic!("bad action {act}"),
    };
    StateEntry::new(action, u8::from_str_radix(next, 16).unwrap())
}

/// Parses the tab-separated table text above.
pub fn parse_table(text: &str) -> StateTable {
    let rows: Vec<_> = text
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split('\t').collect();
            (parse_cell(f[1]), parse_cell(f[2]))
        })
        .collect();
    StateTable::from_rows(&rows)
}

pub fn action(c: char) -> Action {
    match c {
        'N' => Action::Nop,
        'F' => Action::Fwd,
        'R' => Action::Rgt,
        'L' => Action::Lft,
        _ => panic!("bad letter {c}"),
    }
}

/// Table whose input-0 walk from state 0 visits `states` with `code`, the
/// last element jumping to `last_next`. Every other entry is FWD/0.
pub fn chain_table(states: &[u8], code: &str, last_next: u8) -> StateTable {
    let mut t = StateTable::from_rows(&[]);
    for (i, (&s, c)) in states.iter().zip(code.chars()).enumerate() {
        let next = states.get(i + 1).copied().unwrap_or(last_next);
        t.set_entry(s as usize, 0, StateEntry::new(action(c), next));
    }
    t
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefRun {
    pub score: u32,
    pub steps: u32,
    pub pose: (usize, usize, char),
    /// Cells in the order they were eaten.
    pub eaten: Vec<(usize, usize)>,
}

/// Ant simulation written independently of the library: its own heading
/// arithmetic, a hash set for the trail, and the same step rules.
pub fn reference_run(table: &StateTable, grid: &TrailGrid, max_steps: u32) -> RefRun {
    const DX: [i64; 4] = [0, 1, 0, -1];
    const DY: [i64; 4] = [-1, 0, 1, 0];
    let (w, h) = (grid.width() as i64, grid.height() as i64);
    let mut black: HashSet<(i64, i64)> = grid.trail_order().iter().map(|&(x, y)| (x as i64, y as i64)).collect();
    let total = black.len() as u32;
    let start = grid.start();
    let (mut x, mut y) = (start.x as i64, start.y as i64);
    let mut dir = "NESW".find(start.heading.letter()).unwrap();
    let (mut state, mut score, mut steps) = (0usize, 0u32, 0u32);
    let mut eaten = Vec::new();
    while steps < max_steps && score < total {
        let ahead = ((x + DX[dir]).rem_euclid(w), (y + DY[dir]).rem_euclid(h));
        let e = table.entry(state, black.contains(&ahead) as usize);
        match e.action {
            Action::Fwd => {
                (x, y) = ahead;
                if black.remove(&ahead) {
                    score += 1;
                    eaten.push((x as usize, y as usize));
                }
            }
            Action::Rgt => dir = (dir + 1) % 4,
            Action::Lft => dir = (dir + 3) % 4,
            Action::Nop => {}
        }
        state = e.next_state as usize;
        steps += 1;
    }
    RefRun {
        score,
        steps,
        pose: (x as usize, y as usize, "NESW".as_bytes()[dir] as char),
        eaten,
    }
}

/// A pure input-0 loop of `code` over states 0..len, FWD/0 on input 1.
pub fn scanning_loop(code: &str) -> StateTable {
    let n = code.len();
    let rows: Vec<_> = code
        .chars()
        .enumerate()
        .map(|(i, c)| (StateEntry::new(action(c), ((i + 1) % n) as u8), StateEntry::new(Action::Fwd, 0)))
        .collect();
    StateTable::from_rows(&rows)
}

/// Outcome of the literal transposon definition on an abstract chain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleMatch {
    pub code: String,
    pub kind: TransposonKind,
    pub cycle_target: Option<usize>,
}

/// The transposon definition applied clause by clause to an action string
/// with a given terminal. A sequence qualifies when it starts at the chain
/// start, has at least `min_len` symbols, and either contains no NOP and
/// closes a loop onto one of its own elements, or ends with its only NOP.
pub fn oracle_match(code: &str, terminal: ChainTerminal, cfg: &MgeConfig) -> Option<OracleMatch> {
    let chars: Vec<char> = code.chars().collect();
    let mut found = None;
    for k in 1..=chars.len() {
        let prefix = &chars[..k];
        let nops = prefix.iter().filter(|&&c| c == 'N').count();
        let immature = nops == 1 && prefix[k - 1] == 'N';
        let closes = match terminal {
            ChainTerminal::Revisit(p) => k == chars.len() && p >= 1 && p <= k,
            ChainTerminal::EndByLength => false,
        };
        let mature = nops == 0 && closes;
        if immature || mature {
            let cycle_target = match (mature, terminal) {
                (true, ChainTerminal::Revisit(p)) => Some(p),
                _ => None,
            };
            found = Some((k, immature, cycle_target));
            break;
        }
    }
    let (k, immature, cycle_target) = found?;
    if k < cfg.min_len {
        return None;
    }
    let kind = if k > cfg.max_len {
        TransposonKind::Overlong
    } else if immature {
        TransposonKind::Immature
    } else {
        TransposonKind::Mature
    };
    Some(OracleMatch {
        code: chars[..k].iter().collect(),
        kind,
        cycle_target,
    })
}

/// Every action string of length 1..=max over {L,R,F,N} with every terminal.
pub fn all_chains(max: usize) -> impl Iterator<Item = (String, ChainTerminal)> {
    (1..=max).flat_map(|len| {
        (0..4usize.pow(len as u32)).flat_map(move |mut n| {
            let code: String = (0..len)
                .map(|_| {
                    let c = b"LRFN"[n % 4] as char;
                    n /= 4;
                    c
                })
                .collect();
            let terminals = (1..=len)
                .map(ChainTerminal::Revisit)
                .chain(std::iter::once(ChainTerminal::EndByLength));
            terminals.map(move |t| (code.clone(), t)).collect::<Vec<_>>()
        })
    })
}

pub fn chain_of(code: &str, terminal: ChainTerminal) -> ActionChain {
    let acts: Vec<Action> = code.chars().map(action).collect();
    ActionChain::from_actions(&acts, terminal)
}

/// A random genome with a planted input-0 walk from state 0. The walk has a
/// random length, its actions are drawn with NOP rarer than the rest, and it
/// ends either in a loop back into itself or in an edge to a fresh state.
pub fn planted_genome<R: Rng + ?Sized>(rng: &mut R) -> Genome {
    let mut g = Genome::random(rng);
    let len = rng.random_range(1..=16usize);
    let mut states: Vec<u8> = (1..32).collect();
    states.shuffle(rng);
    let mut walk = vec![0u8];
    walk.extend_from_slice(&states[..len - 1]);
    let nop_at = if rng.random_bool(0.4) { Some(rng.random_range(0..len)) } else { None };
    for (i, &s) in walk.iter().enumerate() {
        let a = if Some(i) == nop_at {
            Action::Nop
        } else {
            [Action::Fwd, Action::Rgt, Action::Lft][rng.random_range(0..3)]
        };
        let next = if i + 1 < len {
            walk[i + 1]
        } else if rng.random_bool(0.8) {
            walk[rng.random_range(0..len)]
        } else {
            states[len - 1]
        };
        g.set_entry(s as usize, 0, StateEntry::new(a, next));
    }
    g
}

/// States whose input-0 entries differ, and whether any input-1 entry differs.
pub fn diff(before: &Genome, after: &Genome) -> (Vec<usize>, bool) {
    let changed0 = (0..32).filter(|&s| before.entry(s, 0) != after.entry(s, 0)).collect();
    let changed1 = (0..32).any(|s| before.entry(s, 1) != after.entry(s, 1));
    (changed0, changed1)
}

/// Checks every postcondition of one one-place mutation of `before`.
pub fn check_mge1(before: &Genome, c: &MgeConfig, rng: &mut ChaCha8Rng) -> Result<(), String> {
    let table = before.decode();
    let chain = extract_chain(&table);
    let mut t = table.clone();
    let edit = mge1_mutate_in_place(&mut t, c, rng);
    let after = t.encode();
    let (changed0, changed1) = diff(before, &after);
    if changed1 {
        return Err("input-1 entry changed".into());
    }
    if changed0.len() > 1 {
        return Err(format!("{} states changed", changed0.len()));
    }
    match edit.event {
        Mge1Event::NoMatch | Mge1Event::LeftIntact => {
            if after != *before {
                return Err("untouched event changed the genome".into());
            }
        }
        Mge1Event::NopFilled | Mge1Event::CycleBroken => {
            let tp = edit.transposon.as_ref().unwrap();
            let l = tp.len();
            let source = chain.elements[l - c.period_n];
            let last = chain.elements[l - 1];
            let e = t.entry(last.state as usize, 0);
            if e.action != source.action {
                return Err("edited action is not the period source's".into());
            }
            if edit.event == Mge1Event::NopFilled {
                if e.next_state != last.next_state {
                    return Err("NOP fill changed the link".into());
                }
                if l >= 2 * c.period_n - 1 {
                    let code: Vec<char> = extract_chain(&t).code().chars().collect();
                    if code[l - 1] != code[l - c.period_n] {
                        return Err("period not extended".into());
                    }
                }
            } else if tp.states.contains(&e.next_state) {
                return Err("retarget stays inside the sequence".into());
            }
        }
    }
    Ok(())
}

/// Checks every postcondition of transposing `donor` into `acceptor`.
pub fn check_mge2(donor: &Genome, acceptor: &Genome, c: &MgeConfig) -> Result<(), String> {
    let d = donor.decode();
    let (out, event) = mge2_transpose(&d, &acceptor.decode(), c);
    let after = out.encode();
    let (changed0, changed1) = diff(acceptor, &after);
    if changed1 {
        return Err("input-1 entry changed".into());
    }
    let tp = match_transposon(&extract_chain(&d), c);
    match event {
        Mge2Event::NoDonorTransposon => {
            if tp.as_ref().is_some_and(|t| t.is_cycle()) {
                return Err("cyclic donor transposon ignored".into());
            }
            if after != *acceptor {
                return Err("acceptor changed without a donor transposon".into());
            }
        }
        Mge2Event::Copied => {
            let tp = tp.ok_or("copied without a transposon")?;
            for s in 0..32u8 {
                let covered = tp.states.contains(&s);
                let e = out.entry(s as usize, 0);
                if covered && e != d.entry(s as usize, 0) {
                    return Err(format!("state {s} not copied"));
                }
                if !covered && changed0.contains(&(s as usize)) {
                    return Err(format!("state {s} changed outside the transposon"));
                }
            }
            if !extract_chain(&out).code().starts_with(&tp.code) {
                return Err("acceptor chain does not start with the transposon".into());
            }
        }
    }
    Ok(())
}
