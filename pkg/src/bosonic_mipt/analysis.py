"""Post-hoc analysis of entropy curves: size crossings and scaling coordinates."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, NoCrossingError
from .observables import EntropyRecord


@dataclass(frozen=True)
class Curve:
    """S_R sampled on a p grid at fixed t, with standard errors."""

    p: np.ndarray
    mean: np.ndarray
    sem: np.ndarray

    def __post_init__(self) -> None:
        for name in ("p", "mean", "sem"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        if not self.p.shape == self.mean.shape == self.sem.shape or self.p.ndim != 1:
            raise DomainError("p, mean and sem must be 1-d arrays of equal length")
        if np.any(np.diff(self.p) <= 0):
            raise DomainError("p grid must be strictly increasing")

    @classmethod
    def from_records(cls, records: Iterable[EntropyRecord], L: int, t: int) -> "Curve":
        rows = sorted((r.p, r.mean, r.sem) for r in records if r.L == L and r.t == t)
        if not rows:
            raise DomainError(f"no records at L={L}, t={t}")
        p, mean, sem = zip(*rows)
        return cls(np.array(p), np.array(mean), np.array(sem))


@dataclass(frozen=True)
class Crossing:
    p_star: float
    sigma: float
    roots: tuple[float, ...]
    sigmas: tuple[float, ...]

    @property
    def multiple(self) -> bool:
        return len(self.roots) > 1


def crossing_estimate(small: Curve, large: Curve) -> Crossing:
    """Where the curves of two system sizes cross, by linear interpolation.

    Each root of the difference curve comes with an uncertainty propagated
    from the SEMs of the two sizes at the two bracketing grid points. With
    several sign changes all roots are returned and ``multiple`` is set;
    ``p_star`` is the first one.
    """
    if small.p.size < 2 or not np.array_equal(small.p, large.p):
        raise DomainError("curves must share a p grid with at least two points")
    p = small.p
    diff = large.mean - small.mean
    var = small.sem**2 + large.sem**2
    sign = np.sign(diff)
    roots: list[float] = []
    sigmas: list[float] = []
    for i in range(p.size - 1):
        if sign[i] * sign[i + 1] < 0:
            h = p[i + 1] - p[i]
            span = diff[i] - diff[i + 1]
            roots.append(float(p[i] + h * diff[i] / span))
            d_left = h * diff[i + 1] / span**2
            d_right = h * diff[i] / span**2
            sigmas.append(float(math.sqrt(d_left**2 * var[i] + d_right**2 * var[i + 1])))
    # exact zeros between strictly opposite neighbours also count
    for i in range(1, p.size - 1):
        if sign[i] == 0 and sign[i - 1] * sign[i + 1] < 0:
            slope = (diff[i + 1] - diff[i - 1]) / (p[i + 1] - p[i - 1])
            roots.append(float(p[i]))
            sigmas.append(float(math.sqrt(var[i]) / abs(slope)))
    if not roots:
        raise NoCrossingError("the difference of the two curves never changes sign on the grid")
    order = np.argsort(roots)
    roots = [roots[k] for k in order]
    sigmas = [sigmas[k] for k in order]
    return Crossing(roots[0], sigmas[0], tuple(roots), tuple(sigmas))


@dataclass(frozen=True)
class CollapseTable:
    p_selected: float
    z: float
    rows: tuple[tuple[int, float, float, float, float], ...]  # (L, p, t / L^z, mean, sem)

    HEADER = ("L", "p", "scaled_t", "mean", "sem")


def collapse_transform(
    records: Sequence[EntropyRecord],
    z: float,
    p_c: float,
    max_distance: float | None = None,
) -> CollapseTable:
    """Rescale time to t / L^z for the records at the grid point nearest p_c.

    No fitting happens here. ``max_distance`` rejects a grid point that is
    too far from p_c; the error names the nearest available value.
    """
    if z <= 0:
        raise DomainError(f"z must be > 0, got {z}")
    if not 0.0 <= p_c <= 1.0:
        raise DomainError(f"p_c must lie in [0, 1], got {p_c}")
    if not records:
        raise DomainError("no records to transform")
    grid = sorted({r.p for r in records})
    nearest = min(grid, key=lambda q: (abs(q - p_c), q))
    if max_distance is not None and abs(nearest - p_c) > max_distance:
        raise DomainError(f"no records within {max_distance} of p_c={p_c}; nearest available p is {nearest}")
    rows = tuple(
        (r.L, r.p, r.t / r.L**z, r.mean, r.sem)
        for r in sorted(records, key=lambda r: (r.L, r.t))
        if r.p == nearest
    )
    return CollapseTable(nearest, z, rows)
