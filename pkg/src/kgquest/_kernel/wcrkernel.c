/* Scoring kernel: waypoint substring matching and per-group reward math.
 *
 * Dependency-free C so the same source builds both as part of the Python
 * extension and as a standalone shared library for foreign-function
 * callers. All float work is plain IEEE-754 double with left-to-right
 * sums; the pure-Python fallback mirrors the operation order exactly, so
 * both backends produce bit-identical results. Byte-level search over
 * UTF-8 is equivalent to code-point search because UTF-8 is
 * self-synchronizing.
 */

#include <math.h>
#include <string.h>

#include "wcrkernel.h"

static int contains(const char *hay, int64_t hay_len,
                    const char *needle, int64_t needle_len)
{
    const char *p;
    const char *last;

    if (needle_len == 0)
        return 1; /* matches Python: "" in s is always true */
    if (needle_len > hay_len)
        return 0;
    last = hay + (hay_len - needle_len);
    p = hay;
    while (p <= last) {
        p = memchr(p, needle[0], (size_t)(last - p + 1));
        if (p == NULL)
            return 0;
        if (memcmp(p, needle, (size_t)needle_len) == 0)
            return 1;
        p++;
    }
    return 0;
}

int wcr_match_mask(const char *text, int64_t text_len,
                   const char *const *patterns, const int64_t *pattern_lens,
                   int n_patterns, uint8_t *mask_out)
{
    int i, hits = 0;

    for (i = 0; i < n_patterns; i++) {
        mask_out[i] = (uint8_t)contains(text, text_len, patterns[i], pattern_lens[i]);
        hits += mask_out[i];
    }
    return hits;
}

void wcr_group_rewards(const double *coverage, const uint8_t *correct,
                       const uint8_t *valid, int g_count, double alpha,
                       double *norm_out, double *reward_out)
{
    double g_max = 0.0;
    int i;

    for (i = 0; i < g_count; i++) {
        if (coverage[i] > g_max)
            g_max = coverage[i];
    }
    for (i = 0; i < g_count; i++) {
        double norm = (g_max > 0.0) ? coverage[i] / g_max : 0.0;
        norm_out[i] = norm;
        if (correct[i])
            reward_out[i] = 1.0;
        else if (valid[i])
            reward_out[i] = alpha * norm;
        else
            reward_out[i] = 0.0;
    }
}

void wcr_advantage_stats(const double *reward, int g_count, double epsilon,
                         double *adv_out, double *mean_out, double *std_out)
{
    double base = reward[0];
    double s = 0.0, ds = 0.0, ss = 0.0;
    double mean_d, sigma, denom;
    int i;

    for (i = 0; i < g_count; i++)
        s += reward[i];
    for (i = 0; i < g_count; i++)
        ds += reward[i] - base;
    mean_d = ds / g_count;
    for (i = 0; i < g_count; i++) {
        double dev = (reward[i] - base) - mean_d;
        ss += dev * dev;
    }
    sigma = sqrt(ss / g_count);
    denom = sigma + epsilon;
    for (i = 0; i < g_count; i++)
        adv_out[i] = ((reward[i] - base) - mean_d) / denom;
    *mean_out = s / g_count;
    *std_out = sigma;
}

double wcr_proposer_reward(const uint8_t *correct, int g_count)
{
    double s = 0.0;
    int i;

    for (i = 0; i < g_count; i++)
        s += correct[i];
    return 1.0 - s / g_count;
}

int wcr_score_group(const char *const *think_texts, const int64_t *text_lens,
                    int g_count,
                    const char *const *waypoints, const int64_t *waypoint_lens,
                    int n_waypoints,
                    const uint8_t *correct, const uint8_t *valid,
                    double alpha, double epsilon,
                    double *coverage_out, double *norm_out, double *reward_out,
                    double *adv_out, double *mean_out, double *std_out,
                    double *proposer_out)
{
    int i, j;

    if (g_count < 1 || n_waypoints < 1)
        return -1;
    for (i = 0; i < g_count; i++) {
        int cnt = 0;
        for (j = 0; j < n_waypoints; j++)
            cnt += contains(think_texts[i], text_lens[i],
                            waypoints[j], waypoint_lens[j]);
        coverage_out[i] = (double)cnt / (double)n_waypoints;
    }
    wcr_group_rewards(coverage_out, correct, valid, g_count, alpha,
                      norm_out, reward_out);
    wcr_advantage_stats(reward_out, g_count, epsilon,
                        adv_out, mean_out, std_out);
    *proposer_out = wcr_proposer_reward(correct, g_count);
    return 0;
}
