#ifndef MGE_ANT_H
#define MGE_ANT_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Hex characters in an encoded genome, not counting the terminating NUL.
 */
#define MGE_GENOME_HEX_LEN 112

typedef enum MgeStatus {
  MGE_STATUS_OK = 0,
  MGE_STATUS_NULL_POINTER = 1,
  MGE_STATUS_INVALID_ARGUMENT = 2,
  MGE_STATUS_PARSE = 3,
  MGE_STATUS_CONFIG = 4,
  MGE_STATUS_IO = 5,
  MGE_STATUS_BUFFER_TOO_SMALL = 6,
  MGE_STATUS_PANIC = 7,
} MgeStatus;

typedef enum MgeTransposonKind {
  MGE_TRANSPOSON_KIND_NONE = 0,
  MGE_TRANSPOSON_KIND_MATURE = 1,
  MGE_TRANSPOSON_KIND_IMMATURE = 2,
  MGE_TRANSPOSON_KIND_OVERLONG = 3,
} MgeTransposonKind;

typedef enum MgeSelection {
  MGE_SELECTION_MEAN = 0,
  MGE_SELECTION_QUOTA = 1,
  MGE_SELECTION_ROULETTE = 2,
} MgeSelection;

typedef enum MgeCrossover {
  MGE_CROSSOVER_PER_BIT = 0,
  MGE_CROSSOVER_ONE_POINT = 1,
} MgeCrossover;

typedef struct MgeEvolution MgeEvolution;

typedef struct MgeGenome MgeGenome;

typedef struct MgeTrail MgeTrail;

typedef struct MgeTrialResult {
  uint32_t score;
  uint32_t steps_used;
  size_t final_x;
  size_t final_y;
  /**
   * 'N', 'E', 'S' or 'W'.
   */
  char final_heading;
} MgeTrialResult;

typedef struct MgeParams {
  size_t min_len;
  size_t max_len;
  size_t period_n;
  double mge1_rate;
  double mge2_rate;
} MgeParams;

typedef struct MgeTransposonInfo {
  enum MgeTransposonKind kind;
  size_t length;
  /**
   * 1-based loop target inside the sequence, 0 for NOP-terminated ones.
   */
  size_t cycle_target;
} MgeTransposonInfo;

typedef struct MgeGaConfig {
  size_t population_size;
  uint64_t generations;
  uint32_t max_steps;
  double crossover_rate;
  double mutation_rate;
  enum MgeSelection selection;
  /**
   * Fraction kept by `MgeSelection::Quota`.
   */
  double reproduce_quota;
  enum MgeCrossover crossover;
  uint64_t seed;
  /**
   * When false, `mge` is ignored and both transposon operators are off.
   */
  bool mge_enabled;
  struct MgeParams mge;
} MgeGaConfig;

typedef struct MgeGenerationStats {
  uint64_t generation;
  uint32_t best_score;
  double mean_score;
  size_t marked_count;
  double mge1_affected_fraction;
  double mge2_affected_fraction;
} MgeGenerationStats;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the calling thread's last error message into `buf`.
 *
 * Returns the number of bytes the message needs including the NUL, so a
 * call with `len == 0` sizes the buffer. Writes nothing if `buf` is too small.
 *
 * # Safety
 * `buf` must be null or valid for `len` bytes.
 */
size_t mge_last_error(char *buf, size_t len);

/**
 * Static name of a status code.
 */
const char *mge_status_name(enum MgeStatus status);

/**
 * # Safety
 * `out` must be valid for writes.
 */
enum MgeStatus mge_trail_bundled(struct MgeTrail **out);

/**
 * Parses a trail document given as a NUL-terminated string.
 *
 * # Safety
 * `document` must be a valid C string and `out` valid for writes.
 */
enum MgeStatus mge_trail_load(const char *document, struct MgeTrail **out);

/**
 * Number of cells on the trail, 0 for a null handle.
 *
 * # Safety
 * `trail` must be null or a live handle.
 */
size_t mge_trail_total_cells(const struct MgeTrail *trail);

/**
 * # Safety
 * `trail` must be null or a handle not yet freed.
 */
void mge_trail_free(struct MgeTrail *trail);

/**
 * # Safety
 * `hex` must be a valid C string and `out` valid for writes.
 */
enum MgeStatus mge_genome_from_hex(const char *hex, struct MgeGenome **out);

/**
 * Uniformly random genome, reproducible from `seed`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum MgeStatus mge_genome_random(uint64_t seed, struct MgeGenome **out);

/**
 * Writes the genome as `MGE_GENOME_HEX_LEN` hex digits plus a NUL.
 *
 * # Safety
 * `genome` must be a live handle and `buf` valid for `len` bytes.
 */
enum MgeStatus mge_genome_to_hex(const struct MgeGenome *genome, char *buf, size_t len);

/**
 * Runs the ant encoded by `genome` on a fresh copy of `trail`.
 *
 * # Safety
 * Handles must be live and `out` valid for writes.
 */
enum MgeStatus mge_genome_run(const struct MgeGenome *genome,
                              const struct MgeTrail *trail,
                              uint32_t max_steps,
                              struct MgeTrialResult *out);

/**
 * Classifies the transposon anchored at state 0, if any.
 *
 * Only `min_len` and `max_len` of `params` matter here.
 *
 * # Safety
 * `genome` must be a live handle; `params` and `out` must be valid.
 */
enum MgeStatus mge_genome_transposon(const struct MgeGenome *genome,
                                     const struct MgeParams *params,
                                     struct MgeTransposonInfo *out);

/**
 * # Safety
 * `genome` must be null or a handle not yet freed.
 */
void mge_genome_free(struct MgeGenome *genome);

/**
 * The library's default GA settings.
 */
struct MgeGaConfig mge_ga_config_default(void);

/**
 * Creates a population. The trail is copied, so `trail` may be freed
 * afterwards.
 *
 * # Safety
 * `config` and `trail` must be valid and `out` valid for writes.
 */
enum MgeStatus mge_evolution_new(const struct MgeGaConfig *config,
                                 const struct MgeTrail *trail,
                                 struct MgeEvolution **out);

/**
 * Advances one generation. `out` may be null.
 *
 * # Safety
 * `evolution` must be a live handle; `out` null or valid for writes.
 */
enum MgeStatus mge_evolution_step(struct MgeEvolution *evolution, struct MgeGenerationStats *out);

/**
 * Number of generations stepped so far.
 *
 * # Safety
 * `evolution` must be null or a live handle.
 */
uint64_t mge_evolution_generation(const struct MgeEvolution *evolution);

/**
 * Best ant of the current population, scoring it first if needed.
 * `genome_out` receives a new handle the caller must free; it may be null.
 *
 * # Safety
 * `evolution` must be a live handle; outputs null or valid for writes.
 */
enum MgeStatus mge_evolution_best(struct MgeEvolution *evolution,
                                  uint32_t *score_out,
                                  struct MgeGenome **genome_out);

/**
 * # Safety
 * `evolution` must be null or a handle not yet freed.
 */
void mge_evolution_free(struct MgeEvolution *evolution);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MGE_ANT_H */
