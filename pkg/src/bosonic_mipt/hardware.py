"""Classical models of the cQED hardware: Ramsey readout, inherited rates, timing.

Units: frequencies are angular (rad per unit time) and times share one unit;
the defaults below use microseconds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .errors import DomainError, ModelInconsistencyError

#: Probabilities this close to 0 or 1 count as deterministic readout.
SNAP_TOLERANCE = 1e-12


@dataclass(frozen=True)
class DispersiveParams:
    chi: float
    T: float
    phi_R: float = 0.0

    def __post_init__(self) -> None:
        if self.chi == 0 or not math.isfinite(self.chi):
            raise DomainError(f"chi must be finite and non-zero, got {self.chi!r}")
        if not self.T >= 0:
            raise DomainError(f"idle time must be >= 0, got {self.T!r}")


def ramsey_probs(n: int, params: DispersiveParams) -> tuple[float, float]:
    """(P_g, P_e) after a Ramsey sequence on a transmon dispersively coupled to n photons.

    P_g = sin^2(chi n T / 2 + phi_R) and P_e = 1 - P_g.
    """
    if n < 0:
        raise DomainError(f"photon number must be >= 0, got {n}")
    arg = 0.5 * params.chi * n * params.T + params.phi_R
    p_g = math.sin(arg) ** 2
    return p_g, 1.0 - p_g


@dataclass(frozen=True)
class BitReadout:
    m: int
    n_tilde: int
    bit: int
    p_g: float = 0.0

    def __post_init__(self) -> None:
        if self.m < 0 or not 0 <= self.n_tilde < 2**self.m:
            raise DomainError(f"n_tilde={self.n_tilde} not representable by {self.m} bits")
        if self.bit not in (0, 1):
            raise DomainError(f"bit must be 0 or 1, got {self.bit}")


def bit_params(m: int, n_tilde: int, chi: float = 1.0) -> DispersiveParams:
    """Ramsey settings that read bit ``m`` given the lower bits ``n_tilde``.

    The idle time T = pi / (2^m chi) rotates by n pi / 2^(m+1); the final-pulse
    phase -n_tilde pi / 2^(m+1) cancels the known lower bits, leaving
    (n - n_tilde) / 2^m = b_m + 2j in units of pi/2.
    """
    return DispersiveParams(chi, math.pi / (2**m * chi), -n_tilde * math.pi / 2 ** (m + 1))


def _snap(p: float) -> int | None:
    if abs(p) <= SNAP_TOLERANCE:
        return 0
    if abs(p - 1.0) <= SNAP_TOLERANCE:
        return 1
    return None


def photon_count_bits(
    n: int,
    K: int,
    chi: float = 1.0,
    settings: Callable[[int, int, float], DispersiveParams] = bit_params,
) -> tuple[list[int], list[BitReadout]]:
    """Adaptive bitwise photon counting; bits come out least significant first.

    Each bit is one Ramsey sequence whose phase is fed forward from the bits
    already read. ``|g>`` reads as 1 and ``|e>`` as 0. Raises
    ModelInconsistencyError if a step is not deterministic.
    """
    if K < 0:
        raise DomainError(f"K must be >= 0, got {K}")
    if not 0 <= n < 2**K:
        raise DomainError(f"n={n} is not representable with K={K} bits")
    bits: list[int] = []
    trace: list[BitReadout] = []
    n_tilde = 0
    for m in range(K):
        p_g, _ = ramsey_probs(n, settings(m, n_tilde, chi))
        bit = _snap(p_g)
        if bit is None:
            raise ModelInconsistencyError(f"bit {m} readout is not deterministic (P_g = {p_g:.6g})")
        trace.append(BitReadout(m, n_tilde, bit, p_g))
        bits.append(bit)
        n_tilde += bit << m
    return bits, trace


# -- coupler-inherited noise ---------------------------------------------------


def effective_rates(
    g: float,
    Delta: float,
    kappa_C: float,
    gamma_C: float,
    n_C: float,
    spectrum: str = "pink",
    kappa_a: float = 0.0,
) -> tuple[float, float]:
    """Decay and dephasing rates a cavity inherits from a dispersively coupled coupler.

    kappa = kappa_a + (g/Delta)^2 kappa_C; gamma = (g/Delta)^e gamma_C + n_C kappa_C
    with e = 2 for pink (1/f) flux noise and e = 4 for white noise.
    """
    if Delta == 0:
        raise DomainError("detuning must be non-zero")
    for name, value in (("kappa_C", kappa_C), ("gamma_C", gamma_C), ("n_C", n_C), ("kappa_a", kappa_a)):
        if value < 0:
            raise DomainError(f"{name} must be >= 0, got {value}")
    exponents = {"pink": 2, "white": 4}
    if spectrum not in exponents:
        raise DomainError(f"spectrum must be 'pink' or 'white', got {spectrum!r}")
    ratio = g / Delta
    kappa = kappa_a + ratio**2 * kappa_C
    gamma = abs(ratio) ** exponents[spectrum] * gamma_C + n_C * kappa_C
    return kappa, gamma


# -- timing ---------------------------------------------------------------------

WALL_TIME_MODELS = ("BSFP", "BSRP", "with_hubbard")


@dataclass(frozen=True)
class WallTimeParams:
    """Operation durations in microseconds."""

    T_snap: float = 1.32
    T_parity: float = 1.47
    tau_bs: float = 0.25
    model: str = "BSFP"

    def __post_init__(self) -> None:
        for name in ("T_snap", "T_parity", "tau_bs"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be > 0")
        if self.model not in WALL_TIME_MODELS:
            raise DomainError(f"model must be one of {WALL_TIME_MODELS}, got {self.model!r}")


def wall_time(L: int, S: int, M: int, p: float, params: WallTimeParams = WallTimeParams()) -> float:
    """Experimental duration of S scrambling and M monitored layers on L modes.

    SNAP gates run on every mode in each SNAP-bearing layer (only the S
    scrambling layers unless the model carries on-site Hubbard gates in the
    monitored layers too), L p parity checks run per monitored layer, and
    each layer's L/2 beam splitters run in parallel for tau_bs on average.
    """
    for name, value in (("L", L), ("S", S), ("M", M), ("p", p)):
        if value < 0:
            raise DomainError(f"{name} must be >= 0, got {value}")
    snap_layers = S + M if params.model == "with_hubbard" else S
    return (
        L * snap_layers * params.T_snap
        + L * M * p * params.T_parity
        + L * (params.tau_bs / 2) * (S + M)
    )


def state_prep_time(L: int) -> float:
    """Checkerboard preparation time in microseconds: 1.9 + (L/2) * 1.3."""
    if L < 0:
        raise DomainError(f"L must be >= 0, got {L}")
    return 1.9 + (L / 2) * 1.3
