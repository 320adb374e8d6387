"""Fixed-photon-number sector of L bosonic modes.

Basis states are occupation vectors ``(n_0, ..., n_{L-1})`` with
``sum(n) == Q``. They are ordered lexicographically with mode 0 most
significant and larger occupations first, so rank 0 is ``(Q, 0, ..., 0)``
and the last state is ``(0, ..., 0, Q)``. Modes are indexed from 0.

Amplitude arrays have shape ``(dim, n_anc)``: one row per sector state and
one column per reference-ancilla level, so the ancilla index varies fastest
in the flattened (C-order) layout.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb
from typing import Sequence

import numpy as np

from .errors import CapacityError, DomainError

#: Default cap on stored amplitudes (sector dimension times ancilla levels).
DEFAULT_MAX_AMPLITUDES = 20_000_000


def sector_dimension(L: int, Q: int) -> int:
    """Number of ways to place Q photons in L modes, C(Q+L-1, Q)."""
    if L < 1 or Q < 0:
        raise DomainError(f"need L >= 1 and Q >= 0, got L={L}, Q={Q}")
    return comb(Q + L - 1, Q)


def _compositions(n: int, parts: int) -> int:
    if parts == 0:
        return 1 if n == 0 else 0
    return comb(n + parts - 1, parts - 1)


class SectorBasis:
    """Ordered basis of the charge-Q sector with vectorised ranking.

    Immutable after construction; lazily built lookup tables are memoised
    but never change, so one instance can be shared between workers.
    """

    def __init__(self, L: int, Q: int, max_amplitudes: int = DEFAULT_MAX_AMPLITUDES):
        dim = sector_dimension(L, Q)
        if 2 * dim > max_amplitudes:
            raise CapacityError(
                f"sector L={L}, Q={Q} has dimension {dim}; "
                f"2*dim exceeds the cap of {max_amplitudes} amplitudes"
            )
        self.L = L
        self.Q = Q
        self.dim = dim
        # skip[i, r, x]: number of states that share the prefix before mode i,
        # have r photons left for modes i.., and put more than x photons on i.
        skip = np.zeros((max(L, 1), Q + 1, Q + 1), dtype=np.int64)
        for i in range(L):
            rest = L - i - 1
            for r in range(Q + 1):
                acc = 0
                for x in range(r, -1, -1):
                    skip[i, r, x] = acc
                    acc += _compositions(r - x, rest)
        self._skip = skip
        self.states = self._enumerate()
        self.states.setflags(write=False)
        self._pair_cache: dict[int, tuple[np.ndarray, ...]] = {}
        self._bipartition_cache: dict[int, tuple[np.ndarray, np.ndarray, np.ndarray]] = {}

    def __repr__(self) -> str:
        return f"SectorBasis(L={self.L}, Q={self.Q}, dim={self.dim})"

    def __len__(self) -> int:
        return self.dim

    def _enumerate(self) -> np.ndarray:
        L, Q = self.L, self.Q
        out = np.empty((self.dim, L), dtype=np.int16)
        if L == 1:
            out[0, 0] = Q
            return out
        row = 0
        occ = [0] * L

        def fill(i: int, r: int) -> None:
            nonlocal row
            if i == L - 1:
                occ[i] = r
                out[row] = occ
                row += 1
                return
            for v in range(r, -1, -1):
                occ[i] = v
                fill(i + 1, r - v)

        fill(0, Q)
        return out

    # -- ranking -----------------------------------------------------------

    def rank(self, occupations: Sequence[int]) -> int:
        """Position of one occupation vector in the basis order."""
        occ = np.asarray(occupations, dtype=np.int64)
        if occ.shape != (self.L,):
            raise DomainError(f"expected {self.L} occupations, got shape {occ.shape}")
        if (occ < 0).any() or int(occ.sum()) != self.Q:
            raise DomainError(f"occupation {tuple(occ)} is not in the Q={self.Q} sector")
        return int(self.rank_many(occ[None, :])[0])

    def rank_many(self, occupations: np.ndarray) -> np.ndarray:
        """Vectorised rank of a stack of valid occupation vectors (no checks)."""
        occ = np.asarray(occupations, dtype=np.int64)
        remaining = self.Q - np.concatenate(
            [np.zeros((occ.shape[0], 1), dtype=np.int64), np.cumsum(occ, axis=1)[:, :-1]],
            axis=1,
        )
        idx = np.zeros(occ.shape[0], dtype=np.int64)
        for i in range(self.L - 1):
            idx += self._skip[i, remaining[:, i], occ[:, i]]
        return idx

    def unrank(self, k: int) -> tuple[int, ...]:
        """Occupation vector at position ``k``."""
        if not 0 <= k < self.dim:
            raise DomainError(f"index {k} outside [0, {self.dim})")
        occ = []
        r = self.Q
        for i in range(self.L - 1):
            rest = self.L - i - 1
            for v in range(r, -1, -1):
                c = _compositions(r - v, rest)
                if k < c:
                    occ.append(v)
                    r -= v
                    break
                k -= c
        occ.append(r)
        return tuple(occ)

    # -- lookup tables used by gates and observables -----------------------

    def occupation(self, site: int) -> np.ndarray:
        """Photon number of ``site`` for every basis state."""
        self.check_site(site)
        return self.states[:, site]

    def check_site(self, site: int) -> None:
        if not 0 <= site < self.L:
            raise DomainError(f"site {site} outside [0, {self.L})")

    def pair_groups(self, site: int) -> tuple[np.ndarray, ...]:
        """Index blocks for a two-mode gate on ``(site, site + 1)``.

        Entry ``s`` is an integer array of shape ``(n_groups, s + 1)``. Row g
        lists the basis indices of one group of states that agree on every
        other mode and carry s photons on the pair, ordered so that column k
        holds ``n_site = s - k`` and ``n_{site+1} = k``.
        """
        if not 0 <= site < self.L - 1:
            raise DomainError(f"pair site {site} outside [0, {self.L - 1})")
        cached = self._pair_cache.get(site)
        if cached is not None:
            return cached
        a, b = site, site + 1
        pair_total = self.states[:, a].astype(np.int64) + self.states[:, b]
        heads_all = np.flatnonzero(self.states[:, b] == 0)
        blocks = []
        for s in range(self.Q + 1):
            heads = heads_all[pair_total[heads_all] == s]
            base = self.states[heads].astype(np.int64)
            idx = np.empty((heads.size, s + 1), dtype=np.intp)
            for k in range(s + 1):
                occ = base.copy()
                occ[:, a] = s - k
                occ[:, b] = k
                idx[:, k] = self.rank_many(occ)
            idx.setflags(write=False)
            blocks.append(idx)
        result = tuple(blocks)
        self._pair_cache[site] = result
        return result

    def bipartition(self, cut: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Labels for the split into modes ``[0, cut)`` and ``[cut, L)``.

        Returns ``(left_label, right_label, left_charge)`` where the labels
        number the distinct occupation patterns on either side and
        ``left_charge[label]`` is the photon count of each left pattern.
        """
        if not 1 <= cut <= self.L - 1:
            raise DomainError(f"cut {cut} outside [1, {self.L - 1}]")
        cached = self._bipartition_cache.get(cut)
        if cached is not None:
            return cached
        left_patterns, left = np.unique(self.states[:, :cut], axis=0, return_inverse=True)
        _, right = np.unique(self.states[:, cut:], axis=0, return_inverse=True)
        charge = left_patterns.sum(axis=1).astype(np.int64)
        result = (left.ravel(), right.ravel(), charge)
        self._bipartition_cache[cut] = result
        return result


@lru_cache(maxsize=32)
def build_basis(L: int, Q: int, max_amplitudes: int = DEFAULT_MAX_AMPLITUDES) -> SectorBasis:
    """Return the (cached, shared) basis for L modes holding Q photons."""
    return SectorBasis(L, Q, max_amplitudes=max_amplitudes)


@dataclass
class PureState:
    """Amplitudes over the sector tensored with an optional reference ancilla.

    ``amps`` has shape ``(basis.dim, n_anc)``; ``n_anc`` is 2 when the
    reference qubit is present and 1 for system-only states.
    """

    basis: SectorBasis
    amps: np.ndarray

    def __post_init__(self) -> None:
        self.amps = np.asarray(self.amps, dtype=np.complex128)
        if self.amps.ndim == 1:
            self.amps = self.amps.reshape(-1, 1)
        if self.amps.shape[0] != self.basis.dim:
            raise DomainError(
                f"amplitude rows {self.amps.shape[0]} != basis dimension {self.basis.dim}"
            )

    @property
    def n_anc(self) -> int:
        return self.amps.shape[1]

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def normalize(self) -> None:
        self.amps /= self.norm()

    def copy(self) -> "PureState":
        return PureState(self.basis, self.amps.copy())

    @classmethod
    def from_branches(cls, basis: SectorBasis, branches: Sequence[np.ndarray]) -> "PureState":
        """Equal-weight superposition ``sum_a |branch_a>|a>`` (normalised)."""
        amps = np.stack([np.asarray(b, dtype=np.complex128) for b in branches], axis=1)
        state = cls(basis, amps)
        state.normalize()
        return state

    @classmethod
    def fock(cls, basis: SectorBasis, occupations: Sequence[int], ancilla: int | None = None) -> "PureState":
        """Single basis state, optionally tensored with ancilla level ``ancilla``."""
        n_anc = 1 if ancilla is None else 2
        amps = np.zeros((basis.dim, n_anc), dtype=np.complex128)
        amps[basis.rank(occupations), 0 if ancilla is None else ancilla] = 1.0
        return cls(basis, amps)
