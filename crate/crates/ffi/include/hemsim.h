/* C interface to the hemsim household scheduling library. */

#ifndef HEMSIM_H
#define HEMSIM_H

/* Generated by cbindgen from the hemsim-ffi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define HEMSIM_SEASON_SUMMER 0

#define HEMSIM_SEASON_WINTER 1

#define HEMSIM_OPTIMIZER_BASELINE 0

#define HEMSIM_OPTIMIZER_GA 1

#define HEMSIM_OPTIMIZER_HSA 2

#define HEMSIM_OPTIMIZER_ORACLE 3

#define HEMSIM_BILLING_TRUE_TARIFF 0

#define HEMSIM_BILLING_FORGED_TARIFF 1

/*
 Result of every fallible call. Matches the command-line exit codes where
 the cause is the same kind of problem.
 */
typedef enum HemsimStatus {
  /*
   The call succeeded.
   */
  HEMSIM_STATUS_OK = 0,
  /*
   A required pointer argument was null.
   */
  HEMSIM_STATUS_NULL_POINTER = 1,
  /*
   Unparseable or invalid input: bad TOML, bad attack text, bad
   parameters, or an undefined resilience index.
   */
  HEMSIM_STATUS_INVALID_INPUT = 2,
  /*
   The input parsed but no feasible schedule satisfies it.
   */
  HEMSIM_STATUS_INFEASIBLE = 3,
  /*
   The library broke one of its own invariants; report this.
   */
  HEMSIM_STATUS_INTERNAL = 4,
  /*
   The exhaustive search space exceeds the given limit.
   */
  HEMSIM_STATUS_TOO_LARGE = 5,
} HemsimStatus;

/*
 Owned household scenario handle.
 */
typedef struct HemsimScenario HemsimScenario;

/*
 Owned tariff handle.
 */
typedef struct HemsimTariff HemsimTariff;

/*
 Outcome of one optimizer run.
 */
typedef struct HemsimRunSummary {
  /*
   Scheduled day cost, in ten-thousandths of a cent.
   */
  int64_t total_cost;
  /*
   Schedules priced while searching.
   */
  uint64_t evaluations;
  /*
   Seed the run used; zero for seedless optimizers.
   */
  uint64_t seed;
} HemsimRunSummary;

/*
 Outcome of one clean-versus-attacked experiment pair.
 */
typedef struct HemsimAttackSummary {
  /*
   Billed cost of the clean leg, in ten-thousandths of a cent.
   */
  int64_t clean_cost;
  /*
   Billed cost of the attacked leg, in ten-thousandths of a cent.
   */
  int64_t attacked_cost;
  /*
   Resilience index, in ten-thousandths of a percent; 1000000 is full
   resilience.
   */
  int64_t resilience;
} HemsimAttackSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Library version as a static NUL-terminated string.
 */
const char *hemsim_version(void);

/*
 Message for the most recent failure on this thread. Empty until a call
 fails; the pointer stays valid until the next failing call on the same
 thread.
 */
const char *hemsim_last_error(void);

/*
 Builds the bundled reference household.

 # Safety
 `out` must point to writable scenario-pointer storage.
 */
enum HemsimStatus hemsim_scenario_builtin(struct HemsimScenario **out);

/*
 Parses a household scenario from TOML text.

 # Safety
 `text` must be a NUL-terminated string and `out` must point to writable
 scenario-pointer storage.
 */
enum HemsimStatus hemsim_scenario_from_toml(const char *text, struct HemsimScenario **out);

/*
 Releases a scenario handle. Null is a no-op.

 # Safety
 `scenario` must be null or a pointer returned by a scenario constructor,
 released at most once.
 */
void hemsim_scenario_free(struct HemsimScenario *scenario);

/*
 Builds a bundled seasonal tariff.

 # Safety
 `out` must point to writable tariff-pointer storage.
 */
enum HemsimStatus hemsim_tariff_builtin(uint32_t season, struct HemsimTariff **out);

/*
 Parses a tariff day from TOML text.

 # Safety
 `text` must be a NUL-terminated string and `out` must point to writable
 tariff-pointer storage.
 */
enum HemsimStatus hemsim_tariff_from_toml(const char *text, struct HemsimTariff **out);

/*
 Releases a tariff handle. Null is a no-op.

 # Safety
 `tariff` must be null or a pointer returned by a tariff constructor,
 released at most once.
 */
void hemsim_tariff_free(struct HemsimTariff *tariff);

/*
 Runs one optimizer over the scenario and tariff. `seed` steers the
 seeded optimizers and is ignored by the rest; `oracle_limit` caps the
 exhaustive search and is ignored by the rest.

 # Safety
 `scenario` and `tariff` must be live handles from this library and `out`
 must point to writable summary storage.
 */
enum HemsimStatus hemsim_optimize(const struct HemsimScenario *scenario,
                                  const struct HemsimTariff *tariff,
                                  uint32_t optimizer,
                                  uint64_t seed,
                                  uint64_t oracle_limit,
                                  struct HemsimRunSummary *out);

/*
 Runs a clean leg and a leg on the forged tariff, then scores resilience.
 `attacks` is one or more compact attack expressions separated by
 semicolons, applied in order. Billing selects which tariff prices the
 attacked schedule.

 # Safety
 `scenario` and `tariff` must be live handles from this library,
 `attacks` must be a NUL-terminated string, and `out` must point to
 writable summary storage.
 */
enum HemsimStatus hemsim_attack_experiment(const struct HemsimScenario *scenario,
                                           const struct HemsimTariff *tariff,
                                           const char *attacks,
                                           uint32_t optimizer,
                                           uint64_t seed,
                                           uint64_t oracle_limit,
                                           uint32_t billing,
                                           struct HemsimAttackSummary *out);

/*
 Scores an attacked cost against a clean cost, both in ten-thousandths of
 a cent, writing the index in ten-thousandths of a percent. Fails when the
 clean cost is zero, where the index is undefined.

 # Safety
 `out` must point to writable storage.
 */
enum HemsimStatus hemsim_resilience_index(int64_t attacked_cost, int64_t clean_cost, int64_t *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HEMSIM_H */
