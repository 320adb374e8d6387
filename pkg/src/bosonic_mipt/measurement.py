"""Projective single-mode measurements and measurement records.

Three kinds are supported: photon-number parity (outcome 0 = even,
1 = odd), photon number modulo n, and the full photon number.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator

import numpy as np

from . import _kernels
from .basis import PureState, SectorBasis
from .errors import DomainError, ZeroProbabilityError
from .gates import LayerSchedule, apply_layer

#: Forced outcomes with less Born weight than this are treated as impossible.
ZERO_PROBABILITY = 1e-14


@dataclass(frozen=True)
class MeasurementKind:
    """What a single-mode measurement resolves.

    ``modulus`` is None for a full number measurement; parity is modulus 2.
    """

    modulus: int | None = 2

    def __post_init__(self) -> None:
        if self.modulus is not None and self.modulus < 2:
            raise DomainError(f"modulus must be >= 2, got {self.modulus}")

    @classmethod
    def parse(cls, text: str) -> "MeasurementKind":
        """Accepts ``parity``, ``number`` or ``mod<n>`` (e.g. ``mod3``)."""
        text = text.strip().lower()
        if text == "parity":
            return cls(2)
        if text == "number":
            return cls(None)
        if text.startswith("mod"):
            try:
                return cls(int(text[3:].lstrip("_")))
            except ValueError:
                pass
        raise DomainError(f"unknown measurement kind {text!r}")

    @property
    def name(self) -> str:
        if self.modulus is None:
            return "number"
        if self.modulus == 2:
            return "parity"
        return f"mod{self.modulus}"

    def n_outcomes(self, Q: int) -> int:
        return Q + 1 if self.modulus is None else self.modulus

    def label(self, n: np.ndarray) -> np.ndarray:
        return n if self.modulus is None else n % self.modulus


PARITY = MeasurementKind(2)
NUMBER = MeasurementKind(None)


@dataclass(frozen=True)
class MeasurementEvent:
    layer: int
    site: int
    kind: str
    outcome: int
    born_probability: float


@dataclass
class MeasurementRecord:
    events: list[MeasurementEvent] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.events)

    def __iter__(self) -> Iterator[MeasurementEvent]:
        return iter(self.events)

    def append(self, event: MeasurementEvent) -> None:
        self.events.append(event)

    @property
    def log_probability(self) -> float:
        return float(sum(math.log(e.born_probability) for e in self.events))

    @property
    def probability(self) -> float:
        """Trajectory probability: product of the per-event Born weights."""
        return math.exp(self.log_probability)

    def to_jsonl(self) -> str:
        # json writes floats with repr, which round-trips float64 exactly
        lines = [json.dumps(asdict(e)) for e in self.events]
        return "\n".join(lines) + ("\n" if lines else "")

    @classmethod
    def from_jsonl(cls, text: str) -> "MeasurementRecord":
        events = [MeasurementEvent(**json.loads(line)) for line in text.splitlines() if line.strip()]
        return cls(events)


@lru_cache(maxsize=512)
def outcome_labels(basis: SectorBasis, site: int, kind: MeasurementKind) -> np.ndarray:
    """Outcome assigned to every basis state by measuring ``site``."""
    labels = kind.label(basis.occupation(site).astype(np.intp))
    labels.setflags(write=False)
    return labels


def outcome_distribution(state: PureState, site: int, kind: MeasurementKind = PARITY) -> np.ndarray:
    """Born probabilities of every outcome of ``kind`` on ``site``."""
    labels = outcome_labels(state.basis, site, kind)
    probs = _kernels.outcome_weights(state.amps, labels, kind.n_outcomes(state.basis.Q))
    return probs / probs.sum()


def _project(state: PureState, labels: np.ndarray, outcome: int, prob: float) -> None:
    _kernels.project(state.amps, labels, outcome, 1.0 / math.sqrt(prob))


def sample_and_collapse(
    state: PureState,
    site: int,
    kind: MeasurementKind,
    rng: np.random.Generator,
    layer: int = 0,
) -> MeasurementEvent:
    """Draw an outcome with the Born rule, project onto it, renormalise."""
    probs = outcome_distribution(state, site, kind)
    u = rng.random()
    cdf = np.cumsum(probs)
    outcome = int(np.searchsorted(cdf, u * cdf[-1], side="right"))
    outcome = min(outcome, probs.size - 1)
    while probs[outcome] <= 0.0:
        # u landed exactly on a flat segment of the CDF; step to a supported outcome
        outcome = (outcome - 1) % probs.size
    prob = float(probs[outcome])
    _project(state, outcome_labels(state.basis, site, kind), outcome, prob)
    return MeasurementEvent(layer, site, kind.name, outcome, prob)


def force_and_collapse(state: PureState, site: int, kind: MeasurementKind, outcome: int) -> float:
    """Project onto a prescribed outcome and return its Born probability.

    Raises ZeroProbabilityError when the outcome is impossible from the
    current state; the state is left untouched in that case.
    """
    probs = outcome_distribution(state, site, kind)
    if not 0 <= outcome < probs.size:
        raise DomainError(f"outcome {outcome} outside the range of {kind.name}")
    prob = float(probs[outcome])
    if prob < ZERO_PROBABILITY:
        raise ZeroProbabilityError(
            f"outcome {outcome} of {kind.name} on site {site} has probability {prob:.3g}"
        )
    _project(state, outcome_labels(state.basis, site, kind), outcome, prob)
    return prob


def sample_measured_sites(rng: np.random.Generator, L: int, p: float) -> list[int]:
    """Sites measured after a layer: each independently with probability p."""
    return [int(i) for i in np.flatnonzero(rng.random(L) < p)]


def replay(
    state: PureState,
    layers: Iterable[LayerSchedule],
    record: MeasurementRecord,
    kind: MeasurementKind,
) -> float:
    """Run a fixed gate list with forced outcomes; return log P(record).

    Each record event is forced right after the gates of the layer whose
    ``layer_index`` matches the event's ``layer``. Returns ``-inf`` as soon as a
    forced outcome is impossible.
    """
    by_layer: dict[int, list[MeasurementEvent]] = {}
    for event in record:
        by_layer.setdefault(event.layer, []).append(event)
    logp = 0.0
    for layer in layers:
        apply_layer(state, layer)
        for event in by_layer.get(layer.layer_index, ()):
            try:
                logp += math.log(force_and_collapse(state, event.site, kind, event.outcome))
            except ZeroProbabilityError:
                return -math.inf
    return logp
