mod common;

use common::*;
use mge_ant::automaton::{format_table, run_ant, GENOME_BITS};
use mge_ant::trail::BUNDLED_HARD_GAP_CELL;
use mge_ant::{Action, Genome, Heading, Pose, StateEntry, StateTable, TrailGrid};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn genome() -> impl Strategy<Value = Genome> {
    any::<[u64; 7]>().prop_map(Genome::from_words)
}

#[test]
fn sample_table_roundtrips() {
    let t = parse_table(SAMPLE_TABLE);
    assert_eq!(t.entry(0, 0), StateEntry::new(Action::Fwd, 0x0a));
    assert_eq!(t.entry(0, 1), StateEntry::new(Action::Nop, 0x09));
    let g = t.encode();
    assert_eq!(g.decode(), t);
    assert_eq!(Genome::from_hex(&g.to_hex()).unwrap(), g);
    assert_eq!(format_table(&g.decode()), SAMPLE_TABLE);
}

#[test]
fn sample_table_first_state_bit_layout() {
    let g = parse_table(SAMPLE_TABLE).encode();
    // FWD/0A then NOP/09: 01 01010 00 01001
    let want = "01010100001001";
    let got: String = (0..14).map(|i| if g.bit(i) { '1' } else { '0' }).collect();
    assert_eq!(got, want);
}

#[test]
fn straight_runner_eats_straight_trail() {
    let mut doc = String::from("32 32 0 5 E\n");
    for x in 1..=10 {
        doc.push_str(&format!("{x} 5\n"));
    }
    let grid = TrailGrid::load_trail(&doc).unwrap();
    let t = StateTable::from_rows(&[(StateEntry::new(Action::Fwd, 0), StateEntry::new(Action::Fwd, 0))]);
    let r = run_ant(&t, &grid, 11);
    assert_eq!(r.score, 10);
    assert!(r.steps_used <= 11);
}

#[test]
fn sensing_wraps_around_the_torus() {
    let grid = TrailGrid::load_trail("32 32 31 4 E\n0 4\n").unwrap();
    assert_eq!(grid.sense_ahead(Pose::new(31, 4, Heading::East)), 1);
    assert_eq!(grid.sense_ahead(Pose::new(31, 4, Heading::North)), 0);
    let grid = TrailGrid::load_trail("32 32 4 0 N\n4 31\n").unwrap();
    assert_eq!(grid.sense_ahead(grid.start()), 1);
}

#[test]
fn bundled_trail_can_be_eaten_completely() {
    let mut grid = TrailGrid::bundled();
    assert_eq!(grid.total_cells(), 89);
    let cells = grid.trail_order().to_vec();
    for (x, y) in cells {
        assert!(grid.consume(x, y));
    }
    assert_eq!(grid.black_count(), 0);
}

/// A pure scanning loop follows the easy part of the bundled trail up to
/// the hard gap, cell by cell in trail order.
#[test]
fn scanning_loops_clear_the_easy_part() {
    let grid = TrailGrid::bundled();
    let prefix = &grid.trail_order()[..BUNDLED_HARD_GAP_CELL as usize];
    for code in ["RLLRF", "LRRLF"] {
        let t = scanning_loop(code);
        let reference = reference_run(&t, &grid, 330);
        assert_eq!(&reference.eaten[..prefix.len()], prefix, "{code}");
        let r = run_ant(&t, &grid, 330);
        assert_eq!(r.score, reference.score, "{code}");
        assert!(r.score >= BUNDLED_HARD_GAP_CELL);
    }
}

#[test]
fn runner_on_bundled_trail_matches_reference_for_random_ants() {
    let grid = TrailGrid::bundled();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..500 {
        let t = Genome::random(&mut rng).decode();
        let r = run_ant(&t, &grid, 330);
        let reference = reference_run(&t, &grid, 330);
        assert_eq!(r.score, reference.score);
        assert_eq!(r.steps_used, reference.steps);
        assert_eq!(
            (r.final_pose.x, r.final_pose.y, r.final_pose.heading.letter()),
            reference.pose
        );
    }
}

proptest! {
    #[test]
    fn hex_and_bits_roundtrip(g in genome()) {
        prop_assert_eq!(Genome::from_hex(&g.to_hex()).unwrap(), g);
        let bits = g.to_bits();
        prop_assert_eq!(bits.len(), GENOME_BITS);
        prop_assert_eq!(Genome::from_bits(&bits).unwrap(), g);
        prop_assert_eq!(g.decode().encode(), g);
    }

    #[test]
    fn run_matches_reference(g in genome(), steps in 0u32..400) {
        let grid = TrailGrid::bundled();
        let t = g.decode();
        let r = run_ant(&t, &grid, steps);
        let reference = reference_run(&t, &grid, steps);
        prop_assert_eq!(r.score, reference.score);
        prop_assert_eq!(r.steps_used, reference.steps);
    }

    #[test]
    fn run_is_deterministic_and_monotone_in_budget(g in genome(), a in 0u32..330, extra in 0u32..200) {
        let grid = TrailGrid::bundled();
        let t = g.decode();
        let r1 = run_ant(&t, &grid, a);
        prop_assert_eq!(r1, run_ant(&t, &grid, a));
        let r2 = run_ant(&t, &grid, a + extra);
        prop_assert!(r1.score <= r2.score);
        prop_assert!(r1.steps_used <= a);
        prop_assert!(r2.score as usize <= grid.total_cells());
    }

    #[test]
    fn entry_writes_touch_only_their_bits(g in genome(), s in 0usize..32, i in 0usize..2, code in 0u8..4, next in 0u8..32) {
        let mut h = g;
        h.set_entry(s, i, StateEntry::new(Action::from_code(code), next));
        prop_assert_eq!(h.entry(s, i), StateEntry::new(Action::from_code(code), next));
        for t in 0..32 {
            for j in 0..2 {
                if (t, j) != (s, i) {
                    prop_assert_eq!(h.entry(t, j), g.entry(t, j));
                }
            }
        }
    }
}
