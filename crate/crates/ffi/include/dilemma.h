#ifndef DILEMMA_H
#define DILEMMA_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Reported by `dilemma_dominant_action` when no action strictly dominates.
 */
#define DILEMMA_NO_DOMINANT_ACTION -1

typedef enum {
  DILEMMA_STATUS_OK = 0,
  DILEMMA_STATUS_INVALID_ARGUMENT = 1,
  DILEMMA_STATUS_CONFIG = 2,
  DILEMMA_STATUS_PARSE = 3,
  DILEMMA_STATUS_IO = 4,
  DILEMMA_STATUS_NULL_POINTER = 5,
  DILEMMA_STATUS_PANIC = 6,
} DilemmaStatus;

typedef enum {
  DILEMMA_PLAYER_ROW = 0,
  DILEMMA_PLAYER_COL = 1,
} DilemmaPlayer;

typedef enum {
  DILEMMA_ACTION_REPAIR = 0,
  DILEMMA_ACTION_NO_REPAIR = 1,
} DilemmaAction;

typedef enum {
  /**
   * The expected utilities cross at the reported accuracy.
   */
  DILEMMA_THRESHOLD_KIND_CROSSING = 0,
  /**
   * One action is preferred at every accuracy.
   */
  DILEMMA_THRESHOLD_KIND_NO_CROSSING = 1,
  /**
   * Both actions have the same expected utility everywhere.
   */
  DILEMMA_THRESHOLD_KIND_ALWAYS_INDIFFERENT = 2,
} DilemmaThresholdKind;

typedef struct DilemmaConfig DilemmaConfig;

typedef struct DilemmaGame DilemmaGame;

typedef struct DilemmaSweep DilemmaSweep;

typedef struct {
  double probability;
  double mean_payout;
  double mean_payout_stderr;
  double repair_freq;
  double repair_freq_stderr;
  uint64_t runs;
} DilemmaSweepPoint;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *dilemma_last_error_message(void);

void dilemma_string_free(char *s);

/**
 * Writes whether (T, R, P, S) form a Prisoner's Dilemma to `out_valid`.
 */
DilemmaStatus dilemma_check_pd(double t, double r, double p, double s, bool *out_valid);

/**
 * Symmetric game from (T, R, P, S).
 */
DilemmaStatus dilemma_game_new_pd(double t, double r, double p, double s, DilemmaGame **out_game);

/**
 * Game from two row-major 2x2 tables indexed `[row action][col action]`,
 * action 0 being repair.
 */
DilemmaStatus dilemma_game_new(const double *row, const double *col, DilemmaGame **out_game);

/**
 * Game from the text of a game file.
 */
DilemmaStatus dilemma_game_parse(const char *text, DilemmaGame **out_game);

void dilemma_game_free(DilemmaGame *game);

/**
 * The 2x2 view `viewer` faces when the opponent's move is a prediction,
 * written row-major as `[prediction][own action]` into `out_cells[4]`.
 */
DilemmaStatus dilemma_game_newcomb_view(const DilemmaGame *game,
                                        DilemmaPlayer viewer,
                                        double *out_cells);

DilemmaStatus dilemma_expected_utility(const DilemmaGame *game,
                                       DilemmaPlayer viewer,
                                       DilemmaAction action_,
                                       double accuracy,
                                       double *out_value);

/**
 * Accuracy at which both actions have equal expected utility. On a crossing,
 * `out_value` receives the threshold and `out_exact` (if not null) an owned
 * string holding it as an exact fraction. Otherwise `out_value` is NaN and
 * `out_exact` null.
 */
DilemmaStatus dilemma_eu_threshold(const DilemmaGame *game,
                                   DilemmaPlayer viewer,
                                   DilemmaThresholdKind *out_kind,
                                   double *out_value,
                                   char **out_exact);

/**
 * Strictly dominant action for `viewer` as a `DilemmaAction` value, or
 * `DILEMMA_NO_DOMINANT_ACTION`.
 */
DilemmaStatus dilemma_dominant_action(const DilemmaGame *game,
                                      DilemmaPlayer viewer,
                                      int32_t *out_action);

/**
 * Configuration of one of the built-in figure experiments (`fig1a` ... `fig2c`).
 */
DilemmaStatus dilemma_config_from_preset(const char *name, DilemmaConfig **out_config);

/**
 * Newcomb sweep over the accuracy of predictions about `viewer`, with a
 * comma-separated agent list such as `"sarsa,avgq,eu"`.
 */
DilemmaStatus dilemma_config_newcomb(const DilemmaGame *game,
                                     DilemmaPlayer viewer,
                                     const char *agents,
                                     DilemmaConfig **out_config);

/**
 * Prisoner's Dilemma sweep over the opponent's cooperation probability.
 * `modes` is a comma-separated list of `individual` and `sum`.
 */
DilemmaStatus dilemma_config_pd(const DilemmaGame *game,
                                const char *agents,
                                const char *modes,
                                DilemmaConfig **out_config);

void dilemma_config_free(DilemmaConfig *config);

DilemmaStatus dilemma_config_set_steps(DilemmaConfig *config, uint64_t steps);

DilemmaStatus dilemma_config_set_runs(DilemmaConfig *config, uint64_t runs);

DilemmaStatus dilemma_config_set_seed(DilemmaConfig *config, uint64_t seed);

/**
 * Worker threads for the sweep; 0 uses the global pool.
 */
DilemmaStatus dilemma_config_set_threads(DilemmaConfig *config, uint32_t threads);

/**
 * Hyperparameters for SARSA (alpha, gamma, epsilon); epsilon also applies to AVGQ.
 */
DilemmaStatus dilemma_config_set_hyperparams(DilemmaConfig *config,
                                             double alpha,
                                             double gamma,
                                             double epsilon);

/**
 * Probability grid `start, start + step, ..., stop`.
 */
DilemmaStatus dilemma_config_set_grid(DilemmaConfig *config,
                                      double start,
                                      double stop,
                                      double step);

DilemmaStatus dilemma_run_sweep(const DilemmaConfig *config, DilemmaSweep **out_sweep);

void dilemma_sweep_free(DilemmaSweep *sweep);

/**
 * Number of (agent, probability) points; 0 for a null handle.
 */
size_t dilemma_sweep_len(const DilemmaSweep *sweep);

DilemmaStatus dilemma_sweep_point(const DilemmaSweep *sweep,
                                  size_t index,
                                  DilemmaSweepPoint *out_point);

/**
 * Series label of a point, as an owned string.
 */
DilemmaStatus dilemma_sweep_agent(const DilemmaSweep *sweep, size_t index, char **out_agent);

DilemmaStatus dilemma_sweep_to_csv(const DilemmaSweep *sweep, char **out_csv);

/**
 * SVG chart of the sweep; `plot` is `"payout"` or `"action"`.
 */
DilemmaStatus dilemma_sweep_to_svg(const DilemmaSweep *sweep, const char *plot, char **out_svg);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DILEMMA_H */
