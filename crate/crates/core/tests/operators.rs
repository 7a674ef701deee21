mod common;

use common::*;
use mge_ant::mge::{
    apply_mge_phase, apply_mge_phase_to, extract_chain, match_transposon, mge1_mutate_in_place, mge2_transpose,
    ChainTerminal, Mge1Event,
};
use mge_ant::{Action, Genome, MgeConfig, StateEntry, TransposonKind};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cfg(min_len: usize, max_len: usize, period_n: usize) -> MgeConfig {
    MgeConfig {
        min_len,
        max_len,
        period_n,
        ..MgeConfig::default()
    }
}

#[test]
fn five_element_cycle_chain() {
    let t = chain_table(&[0, 17, 13, 21, 9], "LRRLF", 0);
    let chain = extract_chain(&t);
    assert_eq!(chain.code(), "LRRLF");
    assert_eq!(chain.terminal, ChainTerminal::Revisit(1));
    let states: Vec<u8> = chain.elements.iter().map(|e| e.state).collect();
    assert_eq!(states, [0, 17, 13, 21, 9]);

    let tp = match_transposon(&chain, &MgeConfig::default()).unwrap();
    assert_eq!(tp.kind, TransposonKind::Mature);
    assert_eq!(tp.code, "LRRLF");
    assert_eq!(tp.cycle_target(), Some(1));
}

#[test]
fn nop_terminated_chain() {
    let t = chain_table(&[0, 4, 20, 23, 21, 2], "LFFLNR", 0);
    let tp = match_transposon(&extract_chain(&t), &MgeConfig::default()).unwrap();
    assert_eq!(tp.kind, TransposonKind::Immature);
    assert_eq!(tp.code, "LFFLN");
}

#[test]
fn chain_through_every_state() {
    let mut order: Vec<u8> = (1..32).collect();
    order.reverse();
    let mut states = vec![0u8];
    states.extend(order);
    let code: String = "FRL".chars().cycle().take(32).collect();
    let t = chain_table(&states, &code, 0);
    let chain = extract_chain(&t);
    assert_eq!(chain.len(), 32);
    assert_eq!(chain.code(), code);
    let tp = match_transposon(&chain, &cfg(5, 32, 5)).unwrap();
    assert_eq!(tp.kind, TransposonKind::Mature);
}

#[test]
fn nop_fill_takes_first_action() {
    // L(0) R(4) L(20) L(23) N(21): the NOP takes state 0's action.
    let before = chain_table(&[0, 4, 20, 23, 21], "LRLLN", 7);
    let mut after = before.clone();
    let edit = mge1_mutate_in_place(&mut after, &MgeConfig::default(), &mut ChaCha8Rng::seed_from_u64(0));
    assert_eq!(edit.event, Mge1Event::NopFilled);
    assert_eq!(edit.source_state, Some(0));
    assert_eq!(after.entry(21, 0), StateEntry::new(Action::Lft, 7));
}

#[test]
fn cycle_break_takes_second_action() {
    let states = [0, 25, 1, 10, 21, 7];
    let before = chain_table(&states, "FFFFFF", 0);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..50 {
        let mut after = before.clone();
        let edit = mge1_mutate_in_place(&mut after, &MgeConfig::default(), &mut rng);
        assert_eq!(edit.event, Mge1Event::CycleBroken);
        assert_eq!(edit.source_state, Some(25));
        let e = after.entry(7, 0);
        assert_eq!(e.action, Action::Fwd);
        assert!(!states.contains(&e.next_state));
    }
}

#[test]
fn matcher_agrees_with_definition_on_all_short_chains() {
    let configs = [cfg(5, 11, 5), cfg(3, 6, 3), cfg(1, 8, 1), cfg(4, 4, 3)];
    let mut checked = 0usize;
    for (code, terminal) in all_chains(6) {
        let chain = chain_of(&code, terminal);
        for c in &configs {
            let got = match_transposon(&chain, c).map(|t| (t.cycle_target(), t)).map(|(ct, t)| (t.code, t.kind, ct));
            let want = oracle_match(&code, terminal, c).map(|o| (o.code, o.kind, o.cycle_target));
            assert_eq!(got, want, "{code} {terminal:?} {c:?}");
            checked += 1;
        }
    }
    assert!(checked > 10_000);
}

/// Ten thousand applications of each operator on genomes with planted walks.
#[test]
fn operator_postconditions_hold_on_planted_genomes() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let configs = [MgeConfig::default(), cfg(5, 32, 5), cfg(3, 8, 3)];
    let mut events = std::collections::HashMap::new();
    for i in 0..10_000 {
        let c = &configs[i % configs.len()];
        let g = planted_genome(&mut rng);
        let mut probe = g.decode();
        *events.entry(mge1_mutate_in_place(&mut probe, c, &mut rng.clone()).event).or_insert(0) += 1;
        check_mge1(&g, c, &mut rng).unwrap();
        let acceptor = if rng.random_bool(0.5) { planted_genome(&mut rng) } else { Genome::random(&mut rng) };
        check_mge2(&g, &acceptor, c).unwrap();
    }
    for e in [Mge1Event::NopFilled, Mge1Event::CycleBroken, Mge1Event::LeftIntact, Mge1Event::NoMatch] {
        assert!(events.get(&e).copied().unwrap_or(0) > 100, "{e:?} too rare: {events:?}");
    }
}

#[test]
fn phase_touches_only_eligible_ants() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let before: Vec<Genome> = (0..40).map(|_| planted_genome(&mut rng)).collect();
        let eligible: Vec<bool> = (0..40).map(|_| rng.random_bool(0.5)).collect();
        let mut g = before.clone();
        let out = apply_mge_phase_to(&mut g, &eligible, &MgeConfig::default(), &mut rng);
        for i in 0..40 {
            if !eligible[i] {
                assert_eq!(g[i], before[i]);
            }
        }
        assert!((0.0..=1.0).contains(&out.mge1_affected_fraction));
        assert!((0.0..=1.0).contains(&out.mge2_affected_fraction));
        let changed = (0..40).filter(|&i| g[i] != before[i]).count() as f64 / 40.0;
        assert!(changed <= out.mge1_affected_fraction + out.mge2_affected_fraction + 1e-12);
    }
}

#[test]
fn phase_with_zero_rates_is_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let before: Vec<Genome> = (0..30).map(|_| planted_genome(&mut rng)).collect();
    let mut g = before.clone();
    let c = MgeConfig {
        mge1_rate: 0.0,
        mge2_rate: 0.0,
        ..MgeConfig::default()
    };
    let out = apply_mge_phase(&mut g, &c, &mut rng);
    assert_eq!(g, before);
    assert_eq!((out.mge1_affected_fraction, out.mge2_affected_fraction), (0.0, 0.0));
}

fn genome() -> impl Strategy<Value = Genome> {
    any::<u64>().prop_map(|s| planted_genome(&mut ChaCha8Rng::seed_from_u64(s)))
}

proptest! {
    #[test]
    fn chain_states_are_distinct_and_follow_input0(g in any::<[u64; 7]>().prop_map(Genome::from_words)) {
        let t = g.decode();
        let chain = extract_chain(&t);
        let mut seen = [false; 32];
        prop_assert_eq!(chain.elements[0].state, 0);
        for (i, e) in chain.elements.iter().enumerate() {
            prop_assert!(!seen[e.state as usize]);
            seen[e.state as usize] = true;
            let entry = t.entry(e.state as usize, 0);
            prop_assert_eq!((entry.action, entry.next_state), (e.action, e.next_state));
            if i + 1 < chain.len() {
                prop_assert_eq!(e.next_state, chain.elements[i + 1].state);
            }
        }
        match chain.terminal {
            ChainTerminal::Revisit(p) => {
                prop_assert_eq!(chain.elements.last().unwrap().next_state, chain.elements[p - 1].state)
            }
            ChainTerminal::EndByLength => prop_assert!(false, "a 32-state table always closes"),
        }
    }

    #[test]
    fn mge1_postconditions(g in genome(), seed in any::<u64>(), max_len in 5usize..=32) {
        let c = cfg(5, max_len, 5);
        prop_assert_eq!(check_mge1(&g, &c, &mut ChaCha8Rng::seed_from_u64(seed)), Ok(()));
    }

    #[test]
    fn mge2_postconditions(d in genome(), a in genome()) {
        prop_assert_eq!(check_mge2(&d, &a, &MgeConfig::default()), Ok(()));
    }

    #[test]
    fn self_transposition_is_identity(g in genome()) {
        let t = g.decode();
        prop_assert_eq!(mge2_transpose(&t, &t, &MgeConfig::default()).0, t);
    }
}

