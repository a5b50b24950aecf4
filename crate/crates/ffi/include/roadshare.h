#ifndef ROADSHARE_H
#define ROADSHARE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RoadshareStatus {
  ROADSHARE_STATUS_OK = 0,
  ROADSHARE_STATUS_NULL_POINTER = 1,
  ROADSHARE_STATUS_INVALID_ARGUMENT = 2,
  ROADSHARE_STATUS_CONFIG = 3,
  ROADSHARE_STATUS_INFEASIBLE = 4,
  ROADSHARE_STATUS_IO = 5,
  ROADSHARE_STATUS_NUMERIC = 6,
  ROADSHARE_STATUS_PANIC = 7,
} RoadshareStatus;

typedef enum RoadshareAlgo {
  ROADSHARE_ALGO_DDPG = 0,
  ROADSHARE_ALGO_MADDPG = 1,
} RoadshareAlgo;

typedef struct RoadshareNetwork RoadshareNetwork;

/**
 * A deterministic actor plus the state scaling it was trained with.
 */
typedef struct RoadsharePolicy RoadsharePolicy;

typedef struct RoadshareTrainer RoadshareTrainer;

/**
 * Result of mapping a raw actor output onto an edge cross-section.
 */
typedef struct RoadshareRowAction {
  double clipped;
  uint32_t lanes;
  double sidewalk_ratio;
} RoadshareRowAction;

/**
 * Summary of one training epoch.
 */
typedef struct RoadshareEpochStats {
  uint64_t epoch;
  uint64_t start_slot;
  double epoch_reward;
  double mean_action;
  double mean_lanes;
  double mean_drive_speed_mps;
  double mean_walk_speed_mps;
  double mean_critic_loss;
  /**
   * Exploration scale after this epoch's decay.
   */
  double sigma;
} RoadshareEpochStats;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or an empty string.
 * The pointer stays valid until the next call into this library on the
 * same thread.
 */
const char *roadshare_last_error_message(void);

/**
 * Builds one of the template networks: `street_section`, `t_junction`,
 * `intersection` or `roundabout`.
 *
 * # Safety
 * `kind` must be a NUL-terminated string and `out` a valid pointer.
 */
enum RoadshareStatus roadshare_network_from_template(const char *kind,
                                                     struct RoadshareNetwork **out);

/**
 * # Safety
 * `net` must come from this library; `out` must be valid.
 */
enum RoadshareStatus roadshare_network_edge_count(const struct RoadshareNetwork *net, size_t *out);

/**
 * Width and facility-belt share of one edge.
 *
 * # Safety
 * `net` must come from this library; the out pointers must be valid.
 */
enum RoadshareStatus roadshare_network_edge_geometry(const struct RoadshareNetwork *net,
                                                     size_t edge,
                                                     double *width_m,
                                                     double *facility_ratio);

/**
 * # Safety
 * `net` must come from this library or be null; it is invalid afterwards.
 */
void roadshare_network_free(struct RoadshareNetwork *net);

/**
 * Clips a raw sidewalk proportion, picks the lane count and snaps the
 * sidewalk to the remaining width.
 *
 * # Safety
 * `out` must be valid.
 */
enum RoadshareStatus roadshare_map_action(double raw,
                                          double width_m,
                                          double facility_ratio,
                                          struct RoadshareRowAction *out);

/**
 * Creates a trainer from a TOML experiment config. A null `config_toml`
 * uses the defaults.
 *
 * # Safety
 * `config_toml` must be null or NUL-terminated; `out` must be valid.
 */
enum RoadshareStatus roadshare_trainer_new(const char *config_toml,
                                           enum RoadshareAlgo algo,
                                           uint64_t seed,
                                           struct RoadshareTrainer **out);

/**
 * Runs one epoch of simulation and learning.
 *
 * # Safety
 * `trainer` must come from this library; `out` must be null or valid.
 */
enum RoadshareStatus roadshare_trainer_train_epoch(struct RoadshareTrainer *trainer,
                                                   struct RoadshareEpochStats *out);

/**
 * Copies the actor currently controlling `edge` into a new policy handle.
 *
 * # Safety
 * `trainer` must come from this library; `out` must be valid.
 */
enum RoadshareStatus roadshare_trainer_policy(const struct RoadshareTrainer *trainer,
                                              size_t edge,
                                              struct RoadsharePolicy **out);

/**
 * # Safety
 * `trainer` must come from this library or be null; it is invalid afterwards.
 */
void roadshare_trainer_free(struct RoadshareTrainer *trainer);

/**
 * Loads an actor checkpoint. The default state scaling is assumed.
 *
 * # Safety
 * `path` must be NUL-terminated; `out` must be valid.
 */
enum RoadshareStatus roadshare_policy_load(const char *path, struct RoadsharePolicy **out);

/**
 * # Safety
 * `policy` must come from this library; `path` must be NUL-terminated.
 */
enum RoadshareStatus roadshare_policy_save(const struct RoadsharePolicy *policy, const char *path);

/**
 * Noise-free sidewalk proportion for the given mean vehicle and pedestrian
 * counts on an edge.
 *
 * # Safety
 * `policy` must come from this library; `out` must be valid.
 */
enum RoadshareStatus roadshare_policy_act(const struct RoadsharePolicy *policy,
                                          double mean_veh_count,
                                          double mean_ped_count,
                                          double *out);

/**
 * # Safety
 * `policy` must come from this library or be null; it is invalid afterwards.
 */
void roadshare_policy_free(struct RoadsharePolicy *policy);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ROADSHARE_H */
