"""Experiment drivers: state preparation, monitored evolution, decoding.

A monitored layer is one brick layer of gates followed by independent
Bernoulli(p) measurements of every mode. Scrambling layers are the same
brick layers without measurements. Brick parity runs continuously from the
first scrambling layer into the monitored layers.

Random numbers are drawn from a single ``numpy.random.Generator`` per
trajectory in a fixed order (initial state, then per layer: gate angles,
measured-site coin flips, outcome draws), so a trajectory is a pure
function of its seed.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .basis import PureState, SectorBasis, build_basis
from .errors import ConfigError, DomainError, ZeroProbabilityError
from .gates import LayerSchedule, apply_layer, sample_layer
from .measurement import (
    MeasurementKind,
    MeasurementRecord,
    force_and_collapse,
    sample_and_collapse,
    sample_measured_sites,
)
from .observables import EntropyRecord, ancilla_entropy, bipartite_entropy, mean_and_sem

INITS = ("haar_pair", "checkerboard")
SNAP_PLACEMENTS = ("pairs", "all")
TIE_TOLERANCE = 1e-12


@dataclass(frozen=True)
class CircuitConfig:
    """Full definition of one monitored-circuit experiment.

    ``None`` fields take defaults that depend on the others: Q = L // 2;
    scramble_layers = 2L for checkerboard, else 0; monitored_layers = 2L for
    checkerboard, 4L for haar_pair; scramble_U and scramble_with_snap copy
    U and with_snap.
    """

    L: int
    p: float = 0.0
    Q: int | None = None
    U: float = 0.0
    gate_mode: str = "BSFP"
    with_snap: bool = False
    snap_sites: str = "pairs"
    scramble_layers: int | None = None
    monitored_layers: int | None = None
    scramble_U: float | None = None
    scramble_with_snap: bool | None = None
    measurement: str = "parity"
    init: str = "haar_pair"
    seed: int = 0
    entropy_base: float = 2.0
    bipartite: bool = False
    bipartite_base: float = math.e
    bipartite_ancilla_with_left: bool = False

    def __post_init__(self) -> None:
        self.validate()

    def validate(self) -> None:
        def need(cond: bool, key: str, msg: str) -> None:
            if not cond:
                raise ConfigError(f"circuit.{key}: {msg}", key=f"circuit.{key}")

        need(isinstance(self.L, int) and self.L >= 2, "L", f"must be an integer >= 2, got {self.L!r}")
        need(0.0 <= self.p <= 1.0, "p", f"must lie in [0, 1], got {self.p!r}")
        need(self.Q is None or self.Q >= 0, "Q", f"must be >= 0, got {self.Q!r}")
        need(self.gate_mode in ("BSFP", "BSRP"), "gate_mode", f"must be BSFP or BSRP, got {self.gate_mode!r}")
        need(self.snap_sites in SNAP_PLACEMENTS, "snap_sites", f"must be one of {SNAP_PLACEMENTS}")
        need(self.init in INITS, "init", f"must be one of {INITS}, got {self.init!r}")
        for key in ("scramble_layers", "monitored_layers"):
            value = getattr(self, key)
            need(value is None or value >= 0, key, f"must be >= 0, got {value!r}")
        need(self.entropy_base > 1.0, "entropy_base", "must exceed 1")
        need(self.bipartite_base > 1.0, "bipartite_base", "must exceed 1")
        try:
            MeasurementKind.parse(self.measurement)
        except DomainError as exc:
            need(False, "measurement", str(exc))
        if self.init == "checkerboard":
            need(self.L % 2 == 0, "L", "checkerboard initial state needs an even number of modes")
            need(self.charge == self.L // 2, "Q", "checkerboard initial state needs Q = L/2")
        else:
            need(math.comb(self.charge + self.L - 1, self.charge) >= 2, "Q", "sector must have dimension >= 2")

    @property
    def charge(self) -> int:
        return self.L // 2 if self.Q is None else self.Q

    @property
    def n_scramble(self) -> int:
        if self.scramble_layers is not None:
            return self.scramble_layers
        return 2 * self.L if self.init == "checkerboard" else 0

    @property
    def n_monitored(self) -> int:
        if self.monitored_layers is not None:
            return self.monitored_layers
        return 2 * self.L if self.init == "checkerboard" else 4 * self.L

    @property
    def kind(self) -> MeasurementKind:
        return MeasurementKind.parse(self.measurement)

    def scramble_layer(self, rng: np.random.Generator, index: int) -> LayerSchedule:
        U = self.U if self.scramble_U is None else self.scramble_U
        snap = self.with_snap if self.scramble_with_snap is None else self.scramble_with_snap
        return sample_layer(rng, index, self.L, self.gate_mode, U, snap, self.snap_sites)

    def monitored_layer(self, rng: np.random.Generator, index: int) -> LayerSchedule:
        return sample_layer(rng, index, self.L, self.gate_mode, self.U, self.with_snap, self.snap_sites)

    def to_dict(self) -> dict:
        return asdict(self)


# -- seeds --------------------------------------------------------------------

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def mix_seed(seed: int, k: int) -> int:
    """64-bit seed of trajectory ``k``: splitmix64(seed + (k + 1) * golden)."""
    z = (seed + (k + 1) * _GOLDEN) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def trajectory_rng(seed: int, k: int) -> np.random.Generator:
    return np.random.default_rng(mix_seed(seed, k))


# -- initial states -----------------------------------------------------------


def init_haar_pair(basis: SectorBasis, rng: np.random.Generator) -> tuple[PureState, np.ndarray, np.ndarray]:
    """Two orthonormal Haar-random sector states entangled with the ancilla.

    Returns ``(state, psi0, psi1)`` with
    ``state = (|psi0>|0> + |psi1>|1>) / sqrt(2)``.
    """
    if basis.dim < 2:
        raise DomainError("need a sector of dimension >= 2 for two orthogonal states")
    z = rng.normal(size=(2, basis.dim)) + 1j * rng.normal(size=(2, basis.dim))
    psi0 = z[0] / np.linalg.norm(z[0])
    psi1 = z[1] - np.vdot(psi0, z[1]) * psi0
    psi1 /= np.linalg.norm(psi1)
    return PureState.from_branches(basis, [psi0, psi1]), psi0, psi1


def checkerboard_patterns(L: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """(0,1,0,1,...) paired with ancilla 0 and (1,0,1,0,...) with ancilla 1."""
    return tuple(i % 2 for i in range(L)), tuple((i + 1) % 2 for i in range(L))


def init_checkerboard(basis: SectorBasis) -> PureState:
    if basis.L % 2 or basis.Q != basis.L // 2:
        raise ConfigError("checkerboard state needs even L and Q = L/2", key="circuit.init")
    even, odd = checkerboard_patterns(basis.L)
    amps = np.zeros((basis.dim, 2), dtype=np.complex128)
    amps[basis.rank(even), 0] = 1 / math.sqrt(2)
    amps[basis.rank(odd), 1] = 1 / math.sqrt(2)
    return PureState(basis, amps)


def initial_state(config: CircuitConfig, rng: np.random.Generator) -> PureState:
    basis = build_basis(config.L, config.charge)
    if config.init == "checkerboard":
        return init_checkerboard(basis)
    return init_haar_pair(basis, rng)[0]


# -- single trajectories ------------------------------------------------------


@dataclass
class TrajectoryResult:
    """Ancilla entropy after scrambling (t = 0) and after each monitored layer."""

    entropies: list[tuple[int, float]]
    record: MeasurementRecord
    seed: int | None = None
    bipartite: list[tuple[int, float]] = field(default_factory=list)

    def entropy_array(self) -> np.ndarray:
        return np.array([s for _, s in self.entropies])


def run_purification(config: CircuitConfig, rng: np.random.Generator, seed: int | None = None) -> TrajectoryResult:
    """One ancilla-purification trajectory."""
    kind = config.kind
    state = initial_state(config, rng)
    for index in range(1, config.n_scramble + 1):
        apply_layer(state, config.scramble_layer(rng, index))
    record = MeasurementRecord()
    entropies = [(0, ancilla_entropy(state, config.entropy_base))]
    bipartite = []
    for t in range(1, config.n_monitored + 1):
        index = config.n_scramble + t
        apply_layer(state, config.monitored_layer(rng, index))
        if config.bipartite:
            s_bip = bipartite_entropy(state, None, config.bipartite_base, config.bipartite_ancilla_with_left)
            bipartite.append((t, s_bip))
        for site in sample_measured_sites(rng, config.L, config.p):
            record.append(sample_and_collapse(state, site, kind, rng, layer=index))
        entropies.append((t, ancilla_entropy(state, config.entropy_base)))
    return TrajectoryResult(entropies, record, seed, bipartite)


@dataclass
class LearnabilityTrial:
    alpha_true: int
    record: MeasurementRecord
    logP0: float
    logP1: float
    prediction: int | None  # None marks a tie
    credit: float

    @property
    def correct(self) -> bool:
        return self.prediction == self.alpha_true


def decode(logP0: float, logP1: float) -> int | None:
    """Label with the larger record likelihood, or None on a tie."""
    if logP0 == logP1 or abs(logP0 - logP1) < TIE_TOLERANCE:
        return None
    return 0 if logP0 > logP1 else 1


def run_learnability(config: CircuitConfig, rng: np.random.Generator) -> LearnabilityTrial:
    """One decoder trial on system-only states (no reference ancilla).

    The circuit runs from ``|psi_alpha>`` with sampled outcomes while the
    other candidate is replayed through the same gates with the outcomes
    forced, in lockstep. The sampled branch's running product of Born
    weights is exactly the forced replay of ``|psi_alpha>``.
    """
    if config.init != "haar_pair":
        raise ConfigError("learnability trials need init = haar_pair", key="circuit.init")
    kind = config.kind
    basis = build_basis(config.L, config.charge)
    _, psi0, psi1 = init_haar_pair(basis, rng)
    alpha = int(rng.integers(2))
    branches = [PureState(basis, psi0.copy()), PureState(basis, psi1.copy())]
    true_state, other = branches[alpha], branches[1 - alpha]
    logp_true, logp_other = 0.0, 0.0
    record = MeasurementRecord()
    for index in range(1, config.n_scramble + config.n_monitored + 1):
        monitored = index > config.n_scramble
        layer = config.monitored_layer(rng, index) if monitored else config.scramble_layer(rng, index)
        apply_layer(true_state, layer)
        if logp_other > -math.inf:
            apply_layer(other, layer)
        if not monitored:
            continue
        for site in sample_measured_sites(rng, config.L, config.p):
            event = sample_and_collapse(true_state, site, kind, rng, layer=index)
            record.append(event)
            logp_true += math.log(event.born_probability)
            if logp_other > -math.inf:
                try:
                    logp_other += math.log(force_and_collapse(other, site, kind, event.outcome))
                except ZeroProbabilityError:
                    logp_other = -math.inf
    logs = (logp_true, logp_other) if alpha == 0 else (logp_other, logp_true)
    prediction = decode(*logs)
    credit = 0.5 if prediction is None else float(prediction == alpha)
    return LearnabilityTrial(alpha, record, logs[0], logs[1], prediction, credit)


# -- ensembles ----------------------------------------------------------------


def _purification_task(args) -> tuple[np.ndarray, np.ndarray, int, MeasurementRecord | None]:
    (config, keep_records), k = args
    result = run_purification(config, trajectory_rng(config.seed, k), mix_seed(config.seed, k))
    bip = np.array([s for _, s in result.bipartite])
    return result.entropy_array(), bip, len(result.record), result.record if keep_records else None


def _learnability_task(args: tuple[CircuitConfig, int]) -> float:
    config, k = args
    return run_learnability(config, trajectory_rng(config.seed, k)).credit


def map_trajectories(fn: Callable, config, n: int, workers: int = 1) -> list:
    """Evaluate ``fn((config, k))`` for k = 0..n-1, in order of k.

    Results never depend on ``workers``: every trajectory owns a seed derived
    from ``(config.seed, k)`` and the output order is fixed.
    """
    if n < 1:
        raise DomainError(f"need at least one realization, got {n}")
    tasks = [(config, k) for k in range(n)]
    if workers <= 1:
        return [fn(task) for task in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks, chunksize=max(1, n // (4 * workers))))


@dataclass
class EnsembleResult:
    """Per-trajectory samples of one configuration, stacked by trajectory."""

    config: CircuitConfig
    entropies: np.ndarray  # (n, M + 1)
    bipartite: np.ndarray  # (n, M) or (n, 0)
    n_events: np.ndarray  # (n,)
    trajectory_records: list[MeasurementRecord] | None = None

    @property
    def n(self) -> int:
        return self.entropies.shape[0]

    def records(self) -> list[EntropyRecord]:
        c = self.config
        out = []
        for t in range(self.entropies.shape[1]):
            mean, sem = mean_and_sem(self.entropies[:, t])
            out.append(EntropyRecord(c.L, c.charge, c.p, t, mean, sem, self.n, c.entropy_base))
        return out

    def bipartite_records(self) -> list[EntropyRecord]:
        c = self.config
        out = []
        for j in range(self.bipartite.shape[1]):
            mean, sem = mean_and_sem(self.bipartite[:, j])
            out.append(EntropyRecord(c.L, c.charge, c.p, j + 1, mean, sem, self.n, c.bipartite_base))
        return out

    def at(self, t: int) -> tuple[float, float]:
        return mean_and_sem(self.entropies[:, t])


def run_ensemble(
    config: CircuitConfig, n_realizations: int, workers: int = 1, keep_records: bool = False
) -> EnsembleResult:
    rows = map_trajectories(_purification_task, (config, keep_records), n_realizations, workers)
    entropies = np.stack([r[0] for r in rows])
    bip = np.stack([r[1] for r in rows]) if config.bipartite else np.zeros((len(rows), 0))
    events = np.array([r[2] for r in rows])
    records = [r[3] for r in rows] if keep_records else None
    return EnsembleResult(config, entropies, bip, events, records)


def ensemble_average(config: CircuitConfig, n_realizations: int, workers: int = 1) -> list[EntropyRecord]:
    """Mean and SEM of the ancilla entropy at every monitored layer."""
    return run_ensemble(config, n_realizations, workers).records()


def sweep(config: CircuitConfig, p_grid: Sequence[float], n_realizations: int, workers: int = 1) -> list[EnsembleResult]:
    """Ensembles at each measurement rate; all rates share the base seed."""
    return [run_ensemble(replace(config, p=float(p)), n_realizations, workers) for p in p_grid]


def learnability_credits(config: CircuitConfig, n_trials: int, workers: int = 1) -> np.ndarray:
    return np.array(map_trajectories(_learnability_task, config, n_trials, workers))


def decoder_accuracy(config: CircuitConfig, n_trials: int, workers: int = 1) -> tuple[float, float]:
    """Binary-success decoder accuracy A(p) and its standard error."""
    return mean_and_sem(learnability_credits(config, n_trials, workers))
