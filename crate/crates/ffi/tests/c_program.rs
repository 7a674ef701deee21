//! Builds a small C program against the generated header and the static
//! library, then runs it.

use std::path::PathBuf;
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include <string.h>
#include "mge_ant.h"

int main(void) {
    MgeTrail *trail = NULL;
    MgeEvolution *evo = NULL;
    MgeGenome *best = NULL;
    MgeGaConfig cfg = mge_ga_config_default();
    cfg.population_size = 30;
    cfg.seed = 3;

    if (mge_trail_bundled(&trail) != MGE_STATUS_OK) return 10;
    if (mge_trail_total_cells(trail) != 89) return 11;
    if (mge_evolution_new(&cfg, trail, &evo) != MGE_STATUS_OK) return 12;
    mge_trail_free(trail);

    MgeGenerationStats s;
    for (int g = 0; g < 20; g++) {
        if (mge_evolution_step(evo, &s) != MGE_STATUS_OK) return 13;
    }
    if (s.generation != 19) return 14;

    uint32_t score = 0;
    if (mge_evolution_best(evo, &score, &best) != MGE_STATUS_OK) return 15;
    char hex[MGE_GENOME_HEX_LEN + 1];
    if (mge_genome_to_hex(best, hex, sizeof hex) != MGE_STATUS_OK) return 16;
    if (strlen(hex) != MGE_GENOME_HEX_LEN) return 17;

    MgeGenome *bad = NULL;
    if (mge_genome_from_hex("zz", &bad) != MGE_STATUS_PARSE) return 18;
    char msg[256];
    size_t need = mge_last_error(msg, sizeof msg);
    if (need < 2 || need > sizeof msg) return 19;

    printf("%u %s\n", score, hex);
    mge_genome_free(best);
    mge_evolution_free(evo);
    return 0;
}
"#;

fn find_cc() -> Option<String> {
    ["cc", "gcc", "clang"]
        .into_iter()
        .find(|c| Command::new(c).arg("--version").output().is_ok_and(|o| o.status.success()))
        .map(String::from)
}

#[test]
fn c_program_links_and_runs() {
    let Some(cc) = find_cc() else {
        eprintln!("no C compiler found; skipping");
        return;
    };
    // target/<profile>/deps/<this test> -> target/<profile>
    let profile_dir = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    let lib = profile_dir.join("libmge_ant_ffi.a");
    assert!(lib.is_file(), "{} not built", lib.display());
    let include = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");

    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    let exe = dir.path().join("main");
    std::fs::write(&src, PROGRAM).unwrap();
    let status = Command::new(&cc)
        .args(["-std=c99", "-Wall", "-Werror", "-o"])
        .arg(&exe)
        .arg(&src)
        .arg("-I")
        .arg(&include)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .status()
        .unwrap();
    assert!(status.success(), "C build failed");

    let out = Command::new(&exe).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "C program exit {:?}", out.status.code());
    let stdout = String::from_utf8(out.stdout).unwrap();
    let mut fields = stdout.split_whitespace();
    let score: u32 = fields.next().unwrap().parse().unwrap();
    let hex = fields.next().unwrap();
    assert!(score <= 89);
    assert_eq!(hex.len(), 112);
}
