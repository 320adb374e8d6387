"""Reduced density matrices and von Neumann entropies of sector states."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .basis import PureState
from .errors import DomainError

#: Spectral weights below this contribute nothing to an entropy.
EIGEN_CUTOFF = 1e-14


def entropy_from_spectrum(weights: np.ndarray, base: float = 2.0) -> float:
    """Shannon entropy of a (sub-)normalised spectrum in the given base."""
    w = np.asarray(weights, dtype=float)
    w = w[w > EIGEN_CUTOFF]
    if w.size == 0:
        return 0.0
    return float(max(0.0, -np.sum(w * np.log(w)) / math.log(base)))


def ancilla_density_matrix(state: PureState) -> np.ndarray:
    """2x2 reduced state of the reference ancilla (modes traced out)."""
    if state.n_anc != 2:
        raise DomainError("state carries no reference ancilla")
    a = state.amps
    return a.T @ a.conj()


def ancilla_entropy(state: PureState, base: float = 2.0) -> float:
    rho = ancilla_density_matrix(state)
    return entropy_from_spectrum(np.linalg.eigvalsh(rho), base)


def schmidt_weights(state: PureState, cut: int, ancilla_with_left: bool = False) -> np.ndarray:
    """Squared Schmidt coefficients for modes ``[0, cut)`` versus the rest.

    The reference ancilla, when present, joins the right part (equivalently,
    it is traced out of the left reduced state) unless ``ancilla_with_left``.
    The amplitude matrix is block diagonal in the photon number of the left
    modes, so each charge block is decomposed separately.
    """
    left, right, charge = state.basis.bipartition(cut)
    n_anc = state.n_anc
    anc = np.arange(n_anc)[None, :]
    out = []
    for q in np.unique(charge):
        rows = np.flatnonzero(charge[left] == q)
        if rows.size == 0:
            continue
        left_ids, left_pos = np.unique(left[rows], return_inverse=True)
        right_ids, right_pos = np.unique(right[rows], return_inverse=True)
        if ancilla_with_left:
            shape = (left_ids.size * n_anc, right_ids.size)
            r_idx, c_idx = left_pos[:, None] * n_anc + anc, right_pos[:, None]
        else:
            shape = (left_ids.size, right_ids.size * n_anc)
            r_idx, c_idx = left_pos[:, None], right_pos[:, None] * n_anc + anc
        mat = np.zeros(shape, dtype=np.complex128)
        mat[r_idx, c_idx] = state.amps[rows]
        out.append(np.linalg.svd(mat, compute_uv=False) ** 2)
    return np.concatenate(out) if out else np.zeros(0)


def bipartite_entropy(
    state: PureState,
    cut: int | None = None,
    base: float = math.e,
    ancilla_with_left: bool = False,
) -> float:
    """Entanglement entropy of modes ``[0, cut)``; default cut is L // 2."""
    if cut is None:
        cut = state.basis.L // 2
    return entropy_from_spectrum(schmidt_weights(state, cut, ancilla_with_left), base)


@dataclass(frozen=True)
class EntropyRecord:
    L: int
    Q: int
    p: float
    t: int
    mean: float
    sem: float
    n_realizations: int
    base: float

    CSV_HEADER = ("L", "Q", "p", "t", "mean", "sem", "n_realizations", "base")


def mean_and_sem(values: np.ndarray) -> tuple[float, float]:
    """Sample mean and standard error of the mean (ddof=1)."""
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        raise DomainError("no samples")
    sem = float(v.std(ddof=1) / math.sqrt(v.size)) if v.size > 1 else 0.0
    return float(v.mean()), sem
