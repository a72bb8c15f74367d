# cython: language_level=3
"""Cython bridge to the C scoring kernel.

Thin marshalling layer only: encodes str arguments to UTF-8, hands raw
pointers to wcrkernel.c, and converts results back to plain Python lists.
All arithmetic lives in the C file.
"""

from libc.stdint cimport int64_t, uint8_t
from libc.stdlib cimport free, malloc

cdef extern from "wcrkernel.h":
    int c_match_mask "wcr_match_mask" (const char *text, int64_t text_len,
                                       const char * const *patterns,
                                       const int64_t *pattern_lens,
                                       int n_patterns, uint8_t *mask_out)
    void c_group_rewards "wcr_group_rewards" (const double *coverage,
                                              const uint8_t *correct,
                                              const uint8_t *valid,
                                              int g_count, double alpha,
                                              double *norm_out,
                                              double *reward_out)
    void c_advantage_stats "wcr_advantage_stats" (const double *reward,
                                                  int g_count, double epsilon,
                                                  double *adv_out,
                                                  double *mean_out,
                                                  double *std_out)
    double c_proposer_reward "wcr_proposer_reward" (const uint8_t *correct,
                                                    int g_count)

BACKEND_NAME = "c"


def match_mask(text, patterns):
    """Return [pattern in text, ...] as a list of bool."""
    cdef bytes text_b = text.encode("utf-8")
    encoded = [p.encode("utf-8") for p in patterns]
    cdef int n = len(encoded)
    if n == 0:
        return []
    cdef const char **pats = <const char **>malloc(n * sizeof(char *))
    cdef int64_t *lens = <int64_t *>malloc(n * sizeof(int64_t))
    cdef uint8_t *mask = <uint8_t *>malloc(n * sizeof(uint8_t))
    cdef bytes pb
    cdef int i
    if pats == NULL or lens == NULL or mask == NULL:
        free(pats); free(lens); free(mask)
        raise MemoryError()
    try:
        for i in range(n):
            pb = encoded[i]
            pats[i] = pb
            lens[i] = len(pb)
        c_match_mask(text_b, len(text_b), pats, lens, n, mask)
        return [mask[i] != 0 for i in range(n)]
    finally:
        free(pats); free(lens); free(mask)


def group_rewards(coverage, correct, valid, double alpha):
    """Normalize coverage by the group max and apply the reward law."""
    cdef int n = len(coverage)
    cdef double *cov = <double *>malloc(n * sizeof(double))
    cdef uint8_t *cor = <uint8_t *>malloc(n * sizeof(uint8_t))
    cdef uint8_t *val = <uint8_t *>malloc(n * sizeof(uint8_t))
    cdef double *norm = <double *>malloc(n * sizeof(double))
    cdef double *rew = <double *>malloc(n * sizeof(double))
    cdef int i
    if cov == NULL or cor == NULL or val == NULL or norm == NULL or rew == NULL:
        free(cov); free(cor); free(val); free(norm); free(rew)
        raise MemoryError()
    try:
        for i in range(n):
            cov[i] = coverage[i]
            cor[i] = 1 if correct[i] else 0
            val[i] = 1 if valid[i] else 0
        c_group_rewards(cov, cor, val, n, alpha, norm, rew)
        return ([norm[i] for i in range(n)], [rew[i] for i in range(n)])
    finally:
        free(cov); free(cor); free(val); free(norm); free(rew)


def advantage_stats(rewards, double epsilon):
    """Return (advantages, mean, population std) for one reward group."""
    cdef int n = len(rewards)
    cdef double *rew = <double *>malloc(n * sizeof(double))
    cdef double *adv = <double *>malloc(n * sizeof(double))
    cdef double mean = 0.0
    cdef double std = 0.0
    cdef int i
    if rew == NULL or adv == NULL:
        free(rew); free(adv)
        raise MemoryError()
    try:
        for i in range(n):
            rew[i] = rewards[i]
        c_advantage_stats(rew, n, epsilon, adv, &mean, &std)
        return ([adv[i] for i in range(n)], mean, std)
    finally:
        free(rew); free(adv)


def proposer_reward_value(correct):
    """1 - mean(correct) over the group."""
    cdef int n = len(correct)
    cdef uint8_t *cor = <uint8_t *>malloc(n * sizeof(uint8_t))
    cdef int i
    if cor == NULL:
        raise MemoryError()
    try:
        for i in range(n):
            cor[i] = 1 if correct[i] else 0
        return c_proposer_reward(cor, n)
    finally:
        free(cor)
