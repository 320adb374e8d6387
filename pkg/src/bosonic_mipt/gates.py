"""Number-conserving beam-splitter and SNAP gates on a sector state.

The hopping gate on modes ``(a, b) = (site, site + 1)`` is

    V(theta, phi) = exp[i theta (e^{i phi} a^dag b + e^{-i phi} a b^dag)]

and conserves the pair total ``s``; it is applied block by block on the
``(s + 1)``-dimensional spaces spanned by ``|s, 0>, |s-1, 1>, ..., |0, s>``.
The on-site (SNAP) gate is the diagonal ``exp(-i U n^2)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache

import numpy as np

from . import _kernels
from .basis import PureState, SectorBasis
from .errors import DomainError

TWO_PI = 2.0 * np.pi


class GateMode(str, Enum):
    BSFP = "BSFP"  # fixed phase, phi = 0
    BSRP = "BSRP"  # phi uniform on [0, 2 pi)


@dataclass(frozen=True)
class BeamSplitterSpec:
    site: int
    theta: float
    phi: float = 0.0


@dataclass(frozen=True)
class SnapSpec:
    site: int
    U: float


@dataclass(frozen=True)
class LayerSchedule:
    """Gates of one brick layer; ``layer_index`` counts from 1."""

    layer_index: int
    gates: tuple[BeamSplitterSpec, ...]
    snaps: tuple[SnapSpec, ...] = field(default=())
    gate_mode: GateMode = GateMode.BSFP


@lru_cache(maxsize=None)
def _unit_block_eigh(s: int) -> tuple[np.ndarray, np.ndarray]:
    # a^dag b + a b^dag in the basis |s-k, k>, k = 0..s; real symmetric tridiagonal.
    k = np.arange(1, s + 1)
    off = np.sqrt((s - k + 1) * k, dtype=float)
    h = np.diag(off, 1) + np.diag(off, -1)
    evals, evecs = np.linalg.eigh(h)
    evecs.setflags(write=False)
    return evals, evecs


def two_mode_block(s: int, theta: float, phi: float = 0.0) -> np.ndarray:
    """Unitary of the hopping gate restricted to pair total ``s``.

    Rows and columns are ordered ``|s, 0>, |s-1, 1>, ..., |0, s>``.
    """
    if s < 0:
        raise DomainError(f"pair photon number must be >= 0, got {s}")
    if not (np.isfinite(theta) and np.isfinite(phi)):
        raise DomainError("theta and phi must be finite")
    evals, evecs = _unit_block_eigh(s)
    # The phi-dependence is a diagonal gauge: H(phi) = D H(0) D^dag, D_kk = e^{-i k phi}.
    gauge = np.exp(-1j * phi * np.arange(s + 1))
    left = gauge[:, None] * evecs
    return (left * np.exp(1j * theta * evals)) @ left.conj().T


def apply_beam_splitter(state: PureState, gate: BeamSplitterSpec) -> PureState:
    """Apply a hopping gate in place and return the state."""
    groups = state.basis.pair_groups(gate.site)
    amps = state.amps
    for s in range(1, len(groups)):
        idx = groups[s]
        if idx.size == 0:
            continue
        _kernels.apply_blocks(amps, idx, two_mode_block(s, gate.theta, gate.phi))
    return state


@lru_cache(maxsize=256)
def snap_phases(basis: SectorBasis, U: float, sites: tuple[int, ...]) -> np.ndarray:
    """Diagonal of the product of SNAP gates of strength U on ``sites``."""
    n2 = np.zeros(basis.dim, dtype=float)
    for site in sites:
        n = basis.occupation(site).astype(float)
        n2 += n * n
    phases = np.exp(-1j * U * n2)
    phases.setflags(write=False)
    return phases


def apply_snap(state: PureState, gate: SnapSpec) -> PureState:
    """Multiply every amplitude by ``exp(-i U n_site^2)`` in place."""
    state.basis.check_site(gate.site)
    _kernels.scale_rows(state.amps, snap_phases(state.basis, float(gate.U), (gate.site,)))
    return state


def pair_sites(layer_index: int, L: int) -> list[int]:
    """Left sites of the pairs acted on in brick layer ``layer_index``.

    Odd layers pair (0,1), (2,3), ...; even layers pair (1,2), (3,4), ...
    with open boundaries.
    """
    start = 0 if layer_index % 2 == 1 else 1
    return list(range(start, L - 1, 2))


def sample_layer(
    rng: np.random.Generator,
    layer_index: int,
    L: int,
    gate_mode: GateMode | str = GateMode.BSFP,
    U: float = 0.0,
    with_snap: bool = False,
    snap_sites: str = "pairs",
) -> LayerSchedule:
    """Draw the random gates of one brick layer.

    Each gate consumes one uniform draw for theta and, in BSRP mode, one for
    phi, in pair order. With ``with_snap`` the layer carries SNAP gates of
    strength U on both modes of every pair (``snap_sites="pairs"``) or on
    every mode (``snap_sites="all"``); they act after the hopping gates.
    """
    if L < 2:
        raise DomainError(f"need at least two modes, got L={L}")
    mode = GateMode(gate_mode)
    gates = []
    for site in pair_sites(layer_index, L):
        theta = float(rng.uniform(0.0, TWO_PI))
        phi = float(rng.uniform(0.0, TWO_PI)) if mode is GateMode.BSRP else 0.0
        gates.append(BeamSplitterSpec(site, theta, phi))
    snaps: tuple[SnapSpec, ...] = ()
    if with_snap:
        if snap_sites == "all":
            targets = range(L)
        elif snap_sites == "pairs":
            targets = [m for g in gates for m in (g.site, g.site + 1)]
        else:
            raise DomainError(f"unknown snap placement {snap_sites!r}")
        snaps = tuple(SnapSpec(m, float(U)) for m in targets)
    return LayerSchedule(layer_index, tuple(gates), snaps, mode)


def apply_layer(state: PureState, layer: LayerSchedule) -> PureState:
    """Apply all hopping gates of a layer, then its SNAP gates."""
    for gate in layer.gates:
        apply_beam_splitter(state, gate)
    if layer.snaps:
        by_strength: dict[float, list[int]] = {}
        for snap in layer.snaps:
            by_strength.setdefault(snap.U, []).append(snap.site)
        for U, sites in by_strength.items():
            if U != 0.0:
                _kernels.scale_rows(state.amps, snap_phases(state.basis, U, tuple(sites)))
    return state

