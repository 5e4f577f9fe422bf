"""Collapsed Gibbs sweeps for LDA, compiled with numba.

Uniform draws are supplied by the caller (one per token per sweep) so that
the random stream is owned by a numpy Generator and runs are bit-identical
for a fixed seed.
"""

from __future__ import annotations

from numba import njit


@njit(cache=True)
def train_sweep(words, docs, z, ndk, nwk, nk, alpha, beta, vbeta, u, p):
    """One full sweep over all tokens. ``nwk`` is laid out V x K."""
    n_topics = nk.shape[0]
    for i in range(words.shape[0]):
        w = words[i]
        d = docs[i]
        k = z[i]
        ndk[d, k] -= 1
        nwk[w, k] -= 1
        nk[k] -= 1
        total = 0.0
        for j in range(n_topics):
            total += (ndk[d, j] + alpha) * (nwk[w, j] + beta) / (nk[j] + vbeta)
            p[j] = total
        target = u[i] * total
        k = 0
        while k < n_topics - 1 and p[k] <= target:
            k += 1
        z[i] = k
        ndk[d, k] += 1
        nwk[w, k] += 1
        nk[k] += 1


@njit(cache=True)
def frozen_sweep(words, docs, z, ndk, phi_t, alpha, u, p):
    """Sweep with topic-word probabilities held fixed (``phi_t`` is V x K)."""
    n_topics = ndk.shape[1]
    for i in range(words.shape[0]):
        w = words[i]
        d = docs[i]
        k = z[i]
        ndk[d, k] -= 1
        total = 0.0
        for j in range(n_topics):
            total += (ndk[d, j] + alpha) * phi_t[w, j]
            p[j] = total
        target = u[i] * total
        k = 0
        while k < n_topics - 1 and p[k] <= target:
            k += 1
        z[i] = k
        ndk[d, k] += 1
