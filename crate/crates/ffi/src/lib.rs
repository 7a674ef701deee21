//! C ABI over the `mge-ant` library.
//!
//! Every object crosses the boundary as an opaque pointer created by a
//! `*_new`/`*_from_*` function and released by the matching `*_free`.
//! Fallible calls return an [`MgeStatus`]; on failure a message is kept per
//! thread and can be fetched with [`mge_last_error`].
//!
//! Panics never unwind into C. They are caught and reported as
//! [`MgeStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use mge_ant::automaton::run_ant;
use mge_ant::ga::CrossoverMode;
use mge_ant::mge::{extract_chain, match_transposon};
use mge_ant::{Error, Evolution, GaConfig, Genome, MgeConfig, Selection, TrailGrid, TransposonKind};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Hex characters in an encoded genome, not counting the terminating NUL.
pub const MGE_GENOME_HEX_LEN: usize = 112;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MgeStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    Config = 4,
    Io = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

pub struct MgeTrail(TrailGrid);

pub struct MgeGenome(Genome);

pub struct MgeEvolution(Evolution<'static>);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MgeSelection {
    Mean = 0,
    Quota = 1,
    Roulette = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MgeCrossover {
    PerBit = 0,
    OnePoint = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MgeParams {
    pub min_len: usize,
    pub max_len: usize,
    pub period_n: usize,
    pub mge1_rate: f64,
    pub mge2_rate: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MgeGaConfig {
    pub population_size: usize,
    pub generations: u64,
    pub max_steps: u32,
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    pub selection: MgeSelection,
    /// Fraction kept by `MgeSelection::Quota`.
    pub reproduce_quota: f64,
    pub crossover: MgeCrossover,
    pub seed: u64,
    /// When false, `mge` is ignored and both transposon operators are off.
    pub mge_enabled: bool,
    pub mge: MgeParams,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct MgeTrialResult {
    pub score: u32,
    pub steps_used: u32,
    pub final_x: usize,
    pub final_y: usize,
    /// 'N', 'E', 'S' or 'W'.
    pub final_heading: c_char,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MgeTransposonKind {
    None = 0,
    Mature = 1,
    Immature = 2,
    Overlong = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MgeTransposonInfo {
    pub kind: MgeTransposonKind,
    pub length: usize,
    /// 1-based loop target inside the sequence, 0 for NOP-terminated ones.
    pub cycle_target: usize,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MgeGenerationStats {
    pub generation: u64,
    pub best_score: u32,
    pub mean_score: f64,
    pub marked_count: usize,
    pub mge1_affected_fraction: f64,
    pub mge2_affected_fraction: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn fail(status: MgeStatus, msg: impl Into<String>) -> MgeStatus {
    set_error(msg);
    status
}

fn from_error(err: Error) -> MgeStatus {
    let status = match &err {
        Error::TrailParse { .. } | Error::TrailBounds { .. } | Error::TrailDuplicate { .. } | Error::Hex(_)
        | Error::Size { .. } => {
            MgeStatus::Parse
        }
        Error::Config(_) => MgeStatus::Config,
        Error::Io { .. } => MgeStatus::Io,
        _ => MgeStatus::InvalidArgument,
    };
    fail(status, err.to_string())
}

fn guard(f: impl FnOnce() -> MgeStatus) -> MgeStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(MgeStatus::Panic, format!("panic: {msg}"))
        }
    }
}

unsafe fn c_str<'a>(p: *const c_char) -> Result<&'a str, MgeStatus> {
    if p.is_null() {
        return Err(fail(MgeStatus::NullPointer, "null string"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(MgeStatus::InvalidArgument, "string is not valid UTF-8"))
}

/// Copies `s` plus a NUL into `buf` if it fits.
unsafe fn write_c_str(s: &str, buf: *mut c_char, len: usize) -> MgeStatus {
    if buf.is_null() {
        return fail(MgeStatus::NullPointer, "null output buffer");
    }
    if len < s.len() + 1 {
        return fail(
            MgeStatus::BufferTooSmall,
            format!("buffer holds {len} bytes, {} needed", s.len() + 1),
        );
    }
    ptr::copy_nonoverlapping(s.as_ptr() as *const c_char, buf, s.len());
    *buf.add(s.len()) = 0;
    MgeStatus::Ok
}

macro_rules! non_null {
    ($($p:ident),+) => {
        $(if $p.is_null() {
            return fail(MgeStatus::NullPointer, concat!("`", stringify!($p), "` is null"));
        })+
    };
}

/// Copies the calling thread's last error message into `buf`.
///
/// Returns the number of bytes the message needs including the NUL, so a
/// call with `len == 0` sizes the buffer. Writes nothing if `buf` is too small.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn mge_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > msg.len() {
            ptr::copy_nonoverlapping(msg.as_ptr() as *const c_char, buf, msg.len());
            *buf.add(msg.len()) = 0;
        }
        msg.len() + 1
    })
}

/// Static name of a status code.
#[no_mangle]
pub extern "C" fn mge_status_name(status: MgeStatus) -> *const c_char {
    let s: &'static [u8] = match status {
        MgeStatus::Ok => b"ok\0",
        MgeStatus::NullPointer => b"null pointer\0",
        MgeStatus::InvalidArgument => b"invalid argument\0",
        MgeStatus::Parse => b"parse error\0",
        MgeStatus::Config => b"invalid configuration\0",
        MgeStatus::Io => b"i/o error\0",
        MgeStatus::BufferTooSmall => b"buffer too small\0",
        MgeStatus::Panic => b"panic\0",
    };
    s.as_ptr() as *const c_char
}

// ---- trails ----

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mge_trail_bundled(out: *mut *mut MgeTrail) -> MgeStatus {
    non_null!(out);
    guard(|| {
        *out = Box::into_raw(Box::new(MgeTrail(TrailGrid::bundled())));
        MgeStatus::Ok
    })
}

/// Parses a trail document given as a NUL-terminated string.
///
/// # Safety
/// `document` must be a valid C string and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mge_trail_load(document: *const c_char, out: *mut *mut MgeTrail) -> MgeStatus {
    non_null!(out);
    guard(|| {
        let doc = match c_str(document) {
            Ok(d) => d,
            Err(s) => return s,
        };
        match TrailGrid::load_trail(doc) {
            Ok(grid) => {
                *out = Box::into_raw(Box::new(MgeTrail(grid)));
                MgeStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Number of cells on the trail, 0 for a null handle.
///
/// # Safety
/// `trail` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mge_trail_total_cells(trail: *const MgeTrail) -> usize {
    trail.as_ref().map_or(0, |t| t.0.total_cells())
}

/// # Safety
/// `trail` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mge_trail_free(trail: *mut MgeTrail) {
    if !trail.is_null() {
        drop(Box::from_raw(trail));
    }
}

// ---- genomes ----

/// # Safety
/// `hex` must be a valid C string and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mge_genome_from_hex(hex: *const c_char, out: *mut *mut MgeGenome) -> MgeStatus {
    non_null!(out);
    guard(|| {
        let s = match c_str(hex) {
            Ok(s) => s,
            Err(s) => return s,
        };
        match Genome::from_hex(s) {
            Ok(g) => {
                *out = Box::into_raw(Box::new(MgeGenome(g)));
                MgeStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Uniformly random genome, reproducible from `seed`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mge_genome_random(seed: u64, out: *mut *mut MgeGenome) -> MgeStatus {
    non_null!(out);
    guard(|| {
        let g = Genome::random(&mut ChaCha8Rng::seed_from_u64(seed));
        *out = Box::into_raw(Box::new(MgeGenome(g)));
        MgeStatus::Ok
    })
}

/// Writes the genome as `MGE_GENOME_HEX_LEN` hex digits plus a NUL.
///
/// # Safety
/// `genome` must be a live handle and `buf` valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn mge_genome_to_hex(genome: *const MgeGenome, buf: *mut c_char, len: usize) -> MgeStatus {
    non_null!(genome);
    guard(|| write_c_str(&(*genome).0.to_hex(), buf, len))
}

/// Runs the ant encoded by `genome` on a fresh copy of `trail`.
///
/// # Safety
/// Handles must be live and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mge_genome_run(
    genome: *const MgeGenome,
    trail: *const MgeTrail,
    max_steps: u32,
    out: *mut MgeTrialResult,
) -> MgeStatus {
    non_null!(genome, trail, out);
    guard(|| {
        let r = run_ant(&(*genome).0.decode(), &(*trail).0, max_steps);
        *out = MgeTrialResult {
            score: r.score,
            steps_used: r.steps_used,
            final_x: r.final_pose.x,
            final_y: r.final_pose.y,
            final_heading: r.final_pose.heading.letter() as c_char,
        };
        MgeStatus::Ok
    })
}

/// Classifies the transposon anchored at state 0, if any.
///
/// Only `min_len` and `max_len` of `params` matter here.
///
/// # Safety
/// `genome` must be a live handle; `params` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn mge_genome_transposon(
    genome: *const MgeGenome,
    params: *const MgeParams,
    out: *mut MgeTransposonInfo,
) -> MgeStatus {
    non_null!(genome, params, out);
    guard(|| {
        let cfg = mge_params_to_config(&*params);
        if let Err(e) = cfg.validate() {
            return from_error(e);
        }
        let chain = extract_chain(&(*genome).0.decode());
        *out = match match_transposon(&chain, &cfg) {
            Some(t) => MgeTransposonInfo {
                kind: match t.kind {
                    TransposonKind::Mature => MgeTransposonKind::Mature,
                    TransposonKind::Immature => MgeTransposonKind::Immature,
                    TransposonKind::Overlong => MgeTransposonKind::Overlong,
                },
                length: t.len(),
                cycle_target: t.cycle_target().unwrap_or(0),
            },
            None => MgeTransposonInfo {
                kind: MgeTransposonKind::None,
                length: 0,
                cycle_target: 0,
            },
        };
        MgeStatus::Ok
    })
}

/// # Safety
/// `genome` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mge_genome_free(genome: *mut MgeGenome) {
    if !genome.is_null() {
        drop(Box::from_raw(genome));
    }
}

// ---- evolution ----

fn mge_params_to_config(p: &MgeParams) -> MgeConfig {
    MgeConfig {
        min_len: p.min_len,
        max_len: p.max_len,
        period_n: p.period_n,
        mge1_rate: p.mge1_rate,
        mge2_rate: p.mge2_rate,
    }
}

fn ga_config(c: &MgeGaConfig) -> GaConfig {
    GaConfig {
        population_size: c.population_size,
        generations: c.generations,
        max_steps: c.max_steps,
        crossover_rate: c.crossover_rate,
        mutation_rate: c.mutation_rate,
        selection: match c.selection {
            MgeSelection::Mean => Selection::TruncationMean,
            MgeSelection::Quota => Selection::TruncationQuota(c.reproduce_quota),
            MgeSelection::Roulette => Selection::Roulette,
        },
        reproduce_quota: c.reproduce_quota,
        crossover: match c.crossover {
            MgeCrossover::PerBit => CrossoverMode::PerBit,
            MgeCrossover::OnePoint => CrossoverMode::OnePoint,
        },
        seed: c.seed,
        mge: c.mge_enabled.then(|| mge_params_to_config(&c.mge)),
    }
}

/// The library's default GA settings.
#[no_mangle]
pub extern "C" fn mge_ga_config_default() -> MgeGaConfig {
    let d = GaConfig::default();
    let m = d.mge.unwrap_or_default();
    MgeGaConfig {
        population_size: d.population_size,
        generations: d.generations,
        max_steps: d.max_steps,
        crossover_rate: d.crossover_rate,
        mutation_rate: d.mutation_rate,
        selection: MgeSelection::Mean,
        reproduce_quota: d.reproduce_quota,
        crossover: MgeCrossover::PerBit,
        seed: d.seed,
        mge_enabled: d.mge.is_some(),
        mge: MgeParams {
            min_len: m.min_len,
            max_len: m.max_len,
            period_n: m.period_n,
            mge1_rate: m.mge1_rate,
            mge2_rate: m.mge2_rate,
        },
    }
}

/// Creates a population. The trail is copied, so `trail` may be freed
/// afterwards.
///
/// # Safety
/// `config` and `trail` must be valid and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mge_evolution_new(
    config: *const MgeGaConfig,
    trail: *const MgeTrail,
    out: *mut *mut MgeEvolution,
) -> MgeStatus {
    non_null!(config, trail, out);
    guard(|| match Evolution::owned(ga_config(&*config), (*trail).0.clone()) {
        Ok(evo) => {
            *out = Box::into_raw(Box::new(MgeEvolution(evo)));
            MgeStatus::Ok
        }
        Err(e) => from_error(e),
    })
}

/// Advances one generation. `out` may be null.
///
/// # Safety
/// `evolution` must be a live handle; `out` null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mge_evolution_step(evolution: *mut MgeEvolution, out: *mut MgeGenerationStats) -> MgeStatus {
    non_null!(evolution);
    guard(|| {
        let s = (*evolution).0.step();
        if let Some(o) = out.as_mut() {
            *o = MgeGenerationStats {
                generation: s.generation,
                best_score: s.best_score,
                mean_score: s.mean_score,
                marked_count: s.marked_count,
                mge1_affected_fraction: s.mge1_affected_fraction,
                mge2_affected_fraction: s.mge2_affected_fraction,
            };
        }
        MgeStatus::Ok
    })
}

/// Number of generations stepped so far.
///
/// # Safety
/// `evolution` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mge_evolution_generation(evolution: *const MgeEvolution) -> u64 {
    evolution.as_ref().map_or(0, |e| e.0.population().generation)
}

/// Best ant of the current population, scoring it first if needed.
/// `genome_out` receives a new handle the caller must free; it may be null.
///
/// # Safety
/// `evolution` must be a live handle; outputs null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mge_evolution_best(
    evolution: *mut MgeEvolution,
    score_out: *mut u32,
    genome_out: *mut *mut MgeGenome,
) -> MgeStatus {
    non_null!(evolution);
    guard(|| {
        let pop = (*evolution).0.evaluate();
        let best = pop
            .scores
            .iter()
            .zip(&pop.genomes)
            .max_by_key(|(s, _)| **s)
            .map(|(s, g)| (*s, *g));
        let Some((score, genome)) = best else {
            return fail(MgeStatus::InvalidArgument, "empty population");
        };
        if let Some(s) = score_out.as_mut() {
            *s = score;
        }
        if !genome_out.is_null() {
            *genome_out = Box::into_raw(Box::new(MgeGenome(genome)));
        }
        MgeStatus::Ok
    })
}

/// # Safety
/// `evolution` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mge_evolution_free(evolution: *mut MgeEvolution) {
    if !evolution.is_null() {
        drop(Box::from_raw(evolution));
    }
}
