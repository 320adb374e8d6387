"""Compiled inner loops for state updates (numba)."""

import numpy as np
from numba import njit


@njit(cache=True)
def apply_blocks(amps, idx, block):
    """``amps[idx[g]] = block @ amps[idx[g]]`` for every row g, in place."""
    n_groups, m = idx.shape
    n_anc = amps.shape[1]
    tmp = np.empty(m, dtype=np.complex128)
    for g in range(n_groups):
        for a in range(n_anc):
            for k in range(m):
                tmp[k] = amps[idx[g, k], a]
            for k in range(m):
                acc = 0j
                for l in range(m):
                    acc += block[k, l] * tmp[l]
                amps[idx[g, k], a] = acc


@njit(cache=True)
def outcome_weights(amps, labels, n_outcomes):
    probs = np.zeros(n_outcomes)
    n_anc = amps.shape[1]
    for i in range(amps.shape[0]):
        w = 0.0
        for a in range(n_anc):
            z = amps[i, a]
            w += z.real * z.real + z.imag * z.imag
        probs[labels[i]] += w
    return probs


@njit(cache=True)
def project(amps, labels, outcome, scale):
    """Zero amplitudes with another label and multiply the rest by ``scale``."""
    n_anc = amps.shape[1]
    for i in range(amps.shape[0]):
        if labels[i] == outcome:
            for a in range(n_anc):
                amps[i, a] *= scale
        else:
            for a in range(n_anc):
                amps[i, a] = 0j


@njit(cache=True)
def scale_rows(amps, phases):
    n_anc = amps.shape[1]
    for i in range(amps.shape[0]):
        for a in range(n_anc):
            amps[i, a] *= phases[i]
