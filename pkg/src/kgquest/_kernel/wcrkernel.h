#ifndef WCRKERNEL_H
#define WCRKERNEL_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

/* Substring match of each pattern against text (raw bytes, UTF-8 safe).
 * mask_out[i] = 1 if patterns[i] occurs in text. Returns match count. */
int wcr_match_mask(const char *text, int64_t text_len,
                   const char *const *patterns, const int64_t *pattern_lens,
                   int n_patterns, uint8_t *mask_out);

/* Group max-normalization of raw coverage plus the shaped reward law:
 *   r = 1              if correct
 *   r = alpha * g_norm if incorrect but well-formed
 *   r = 0              otherwise
 * An all-zero coverage group normalizes to all zeros. */
void wcr_group_rewards(const double *coverage, const uint8_t *correct,
                       const uint8_t *valid, int g_count, double alpha,
                       double *norm_out, double *reward_out);

/* Group-relative advantages: (r_i - mean) / (population std + epsilon).
 * Values are centered on reward[0] before the moment computations so an
 * exact shift of the inputs yields bit-identical advantages. */
void wcr_advantage_stats(const double *reward, int g_count, double epsilon,
                         double *adv_out, double *mean_out, double *std_out);

/* Difficulty-seeking proposer reward: 1 - mean(correct). */
double wcr_proposer_reward(const uint8_t *correct, int g_count);

/* Full group scoring from raw strings; composition of the above.
 * Returns 0 on success, -1 on empty group or empty waypoint set. */
int wcr_score_group(const char *const *think_texts, const int64_t *text_lens,
                    int g_count,
                    const char *const *waypoints, const int64_t *waypoint_lens,
                    int n_waypoints,
                    const uint8_t *correct, const uint8_t *valid,
                    double alpha, double epsilon,
                    double *coverage_out, double *norm_out, double *reward_out,
                    double *adv_out, double *mean_out, double *std_out,
                    double *proposer_out);

#ifdef __cplusplus
}
#endif

#endif /* WCRKERNEL_H */
