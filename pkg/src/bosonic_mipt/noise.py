"""Mixed-state trajectories of the monitored circuit with local noise.

The register is L truncated cavity modes (d levels each) plus the reference
ancilla, held as a full density matrix of size (d^L * 2)^2. Decoherence is
applied exactly as local channels exp(tau * Lindbladian); measurements are
unravelled by sampling outcomes. Channels on different factors commute, so
idle decay is accumulated per factor and flushed lazily right before an
operation touches that factor (and at the end of every layer).

Time unit: microseconds. Rates are in 1/us.

Operation timing per layer follows the sequential hardware schedule:
beam splitters one at a time (duration tau_bs * theta / pi), then SNAP
gates on each target (swap, active window, swap back), then parity checks
on each measured mode (swap, active window including readout, swap back).
Every factor that is not being acted on idles meanwhile.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, fields, replace
from functools import lru_cache

import numpy as np
from scipy.linalg import expm

from .errors import ConfigError, DomainError, TraceDriftError
from .gates import LayerSchedule
from .hardware import effective_rates
from .measurement import PARITY, MeasurementKind, sample_measured_sites
from .observables import entropy_from_spectrum, mean_and_sem
from .protocols import CircuitConfig, initial_state, map_trajectories, trajectory_rng

log = logging.getLogger(__name__)

TRACE_DRIFT_LIMIT = 1e-6
KRAUS_TOLERANCE = 1e-10
ZERO_WEIGHT = 1e-14


# -- single-mode channels ---------------------------------------------------------


def _lowering(d: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, d, dtype=float)), 1).astype(complex)


def _dissipator(c: np.ndarray) -> np.ndarray:
    """Superoperator of c rho c^dag - {c^dag c, rho}/2 on row-major vec(rho)."""
    d = c.shape[0]
    eye = np.eye(d)
    cdc = c.conj().T @ c
    return np.kron(c, c.conj()) - 0.5 * np.kron(cdc, eye) - 0.5 * np.kron(eye, cdc.T)


@dataclass(frozen=True)
class Channel:
    """A CPTP map on one local factor of dimension d, as a d^2 x d^2 superoperator.

    ``superop`` acts on row-major vectorised density matrices:
    vec(rho)[i * d + j] = rho[i, j].
    """

    superop: np.ndarray
    d: int
    duration: float = 0.0

    def apply(self, rho: np.ndarray) -> np.ndarray:
        return (self.superop @ rho.reshape(-1)).reshape(self.d, self.d)

    def kraus(self) -> list[np.ndarray]:
        """Kraus operators from the eigendecomposition of the Choi matrix."""
        d = self.d
        # Choi[(i,k),(j,l)] = S[(i,j),(k,l)]
        choi = self.superop.reshape(d, d, d, d).transpose(0, 2, 1, 3).reshape(d * d, d * d)
        w, v = np.linalg.eigh(0.5 * (choi + choi.conj().T))
        ops = []
        for weight, vec in zip(w, v.T):
            if weight > 1e-13:
                ops.append(math.sqrt(weight) * vec.reshape(d, d))
        return ops

    def completeness_error(self) -> float:
        """max |sum K^dag K - I|."""
        total = sum(k.conj().T @ k for k in self.kraus())
        return float(np.max(np.abs(total - np.eye(self.d))))

    def trace_error(self) -> float:
        """Deviation from trace preservation read directly off the superoperator."""
        d = self.d
        tr_rows = self.superop.reshape(d, d, d * d)[np.arange(d), np.arange(d)].sum(axis=0)
        return float(np.max(np.abs(tr_rows - np.eye(d).reshape(-1))))


@lru_cache(maxsize=4096)
def local_channel(tau: float, kappa_down: float, kappa_up: float, gamma_phi: float, d: int) -> Channel:
    """exp(tau * L) for decay (rate kappa_down), excitation (kappa_up) and number dephasing."""
    if tau < 0 or min(kappa_down, kappa_up, gamma_phi) < 0:
        raise DomainError("durations and rates must be >= 0")
    if d < 2:
        raise DomainError(f"local dimension must be >= 2, got {d}")
    a = _lowering(d)
    gen = np.zeros((d * d, d * d), dtype=complex)
    if kappa_down:
        gen += kappa_down * _dissipator(a)
    if kappa_up:
        gen += kappa_up * _dissipator(a.conj().T)
    if gamma_phi:
        gen += gamma_phi * _dissipator(a.conj().T @ a)
    superop = expm(tau * gen) if tau else np.eye(d * d, dtype=complex)
    superop.setflags(write=False)
    return Channel(superop, d, tau)


def thermal_decay_channel(tau: float, T1: float, n_bar: float, d: int) -> Channel:
    """Generalised amplitude damping: collapse ops sqrt(k(1+n)) a and sqrt(k n) a^dag, k = 1/T1."""
    if T1 <= 0 or n_bar < 0:
        raise DomainError("T1 must be > 0 and n_bar >= 0")
    kappa = 1.0 / T1
    return local_channel(float(tau), kappa * (1 + n_bar), kappa * n_bar, 0.0, d)


def dephasing_channel(tau: float, gamma_phi: float, d: int) -> Channel:
    """rho_jk -> rho_jk exp(-gamma_phi tau (j - k)^2 / 2)."""
    if tau < 0 or gamma_phi < 0:
        raise DomainError("tau and gamma_phi must be >= 0")
    j = np.arange(d)
    factors = np.exp(-0.5 * gamma_phi * tau * (j[:, None] - j[None, :]) ** 2).reshape(-1)
    superop = np.diag(factors).astype(complex)
    superop.setflags(write=False)
    return Channel(superop, d, tau)


# -- parameters ---------------------------------------------------------------------


@dataclass(frozen=True)
class NoiseParams:
    """Device parameters; times in microseconds, frequencies in GHz for g and Delta."""

    T1_cavity: float = 1500.0
    n_bar_cavity: float = 0.001
    T1_ancilla: float | None = None  # defaults to T1_cavity
    g: tuple[float, float] = (0.533, 0.592)
    Delta: tuple[float, float] = (2.261, 2.590)
    T1_C: float = 50.0
    T_phi_C: float = 5.0
    n_C: float = 0.02
    spectrum: str = "pink"
    T1_q: float = 200.0
    n_q: float = 0.005
    T_phi_q: float = 100.0
    epsilon_readout: float = 0.004
    T_snap: float = 1.32
    T_parity: float = 1.47
    tau_bs: float = 0.25
    swap: float = 0.5
    d: int | None = None  # defaults to L // 2 + 1

    def __post_init__(self) -> None:
        def need(cond: bool, key: str, msg: str) -> None:
            if not cond:
                raise ConfigError(f"noise.{key}: {msg}", key=f"noise.{key}")

        for name in ("T1_cavity", "T1_C", "T_phi_C", "T1_q", "T_phi_q", "T_snap", "T_parity", "tau_bs"):
            need(getattr(self, name) > 0, name, "must be > 0")
        need(self.T1_ancilla is None or self.T1_ancilla > 0, "T1_ancilla", "must be > 0")
        need(self.swap >= 0, "swap", "must be >= 0")
        need(2 * self.swap < min(self.T_snap, self.T_parity), "swap", "swaps must fit inside T_snap and T_parity")
        for name in ("n_bar_cavity", "n_C", "n_q", "epsilon_readout"):
            need(0.0 <= getattr(self, name) <= 1.0, name, "must lie in [0, 1]")
        need(len(self.g) == 2 and len(self.Delta) == 2, "g", "g and Delta need one value per beam-splitter port")
        need(all(x != 0 for x in self.Delta), "Delta", "must be non-zero")
        need(self.spectrum in ("pink", "white"), "spectrum", "must be 'pink' or 'white'")
        need(self.d is None or self.d >= 2, "d", "must be >= 2")

    def local_dim(self, L: int) -> int:
        return self.d if self.d is not None else L // 2 + 1

    @property
    def kappa(self) -> float:
        return 1.0 / self.T1_cavity

    @property
    def kappa_ancilla(self) -> float:
        return 1.0 / (self.T1_ancilla if self.T1_ancilla is not None else self.T1_cavity)

    def beam_splitter_rates(self, port: int) -> tuple[float, float]:
        """(extra decay, dephasing) inherited from the coupler by port 0 or 1 while driven."""
        kappa, gamma = effective_rates(
            self.g[port], self.Delta[port], 1.0 / self.T1_C, 1.0 / self.T_phi_C, self.n_C, self.spectrum, self.kappa
        )
        return kappa - self.kappa, gamma

    @property
    def transmon_dephasing(self) -> float:
        """Number-dephasing rate imprinted on a mode while it is coupled to the transmon."""
        return (1 + 2 * self.n_q) / self.T1_q + 1.0 / self.T_phi_q

    def to_dict(self) -> dict:
        return asdict(self)


CHANNELS = ("decay", "beam_splitter", "snap", "parity")


@dataclass(frozen=True)
class NoiseToggles:
    decay: bool = True
    beam_splitter: bool = True
    snap: bool = True
    parity: bool = True

    @classmethod
    def all_off(cls) -> "NoiseToggles":
        return cls(False, False, False, False)

    @classmethod
    def only(cls, *names: str) -> "NoiseToggles":
        unknown = set(names) - set(CHANNELS)
        if unknown:
            raise DomainError(f"unknown noise channel(s) {sorted(unknown)}")
        return cls(**{name: name in names for name in CHANNELS})

    @property
    def mask(self) -> str:
        on = [f.name for f in fields(self) if getattr(self, f.name)]
        return "+".join(on) if on else "none"

    @property
    def any(self) -> bool:
        return any(getattr(self, f.name) for f in fields(self))


# -- the density matrix -------------------------------------------------------------


class DensityMatrix:
    """Joint state of L modes of local dimension d and one reference qubit.

    Index order: mode 0 most significant, ancilla last.
    """

    def __init__(self, L: int, d: int, matrix: np.ndarray):
        self.L, self.d = L, d
        self.dims = (d,) * L + (2,)
        self.D = d**L * 2
        if matrix.shape != (self.D, self.D):
            raise DomainError(f"matrix shape {matrix.shape} does not match dimension {self.D}")
        self.matrix = np.ascontiguousarray(matrix, dtype=np.complex128)

    @classmethod
    def from_pure(cls, amps: np.ndarray, occupations: np.ndarray, d: int) -> "DensityMatrix":
        """Embed a sector state (rows = occupation vectors, columns = ancilla)."""
        L = occupations.shape[1]
        if occupations.max(initial=0) >= d:
            raise DomainError(f"occupations up to {occupations.max()} do not fit local dimension {d}")
        index = np.zeros(occupations.shape[0], dtype=np.intp)
        for col in range(L):
            index = index * d + occupations[:, col]
        vec = np.zeros(d**L * 2, dtype=np.complex128)
        vec[2 * index] = amps[:, 0]
        vec[2 * index + 1] = amps[:, 1]
        return cls(L, d, np.outer(vec, vec.conj()))

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def check(self, tol_trace: float = 1e-9, tol_herm: float = 1e-10, tol_eig: float = 1e-9) -> None:
        if abs(self.trace - 1.0) > tol_trace:
            raise TraceDriftError(f"trace {self.trace:.12g}")
        if np.max(np.abs(self.matrix - self.matrix.conj().T)) > tol_herm:
            raise DomainError("density matrix is not Hermitian")
        if np.linalg.eigvalsh(self.matrix).min() < -tol_eig:
            raise DomainError("density matrix has a negative eigenvalue")

    def _tensor(self) -> np.ndarray:
        return self.matrix.reshape(self.dims + self.dims)

    def apply_local_superop(self, superop: np.ndarray, factor: int) -> None:
        """Apply a superoperator (on row-major vec) to one factor (mode index or L for the ancilla)."""
        n = self.L + 1
        k = self.dims[factor]
        t = self._tensor()
        s = superop.reshape(k, k, k, k)
        out = np.tensordot(s, t, axes=([2, 3], [factor, n + factor]))
        out = np.moveaxis(out, [0, 1], [factor, n + factor])
        self.matrix = np.ascontiguousarray(out).reshape(self.D, self.D)

    def apply_channel(self, channel: Channel, factor: int) -> None:
        self.apply_local_superop(channel.superop, factor)

    def apply_unitary(self, U: np.ndarray, first: int, width: int) -> None:
        """rho -> U rho U^dag for U acting on modes first .. first + width - 1."""
        n = self.L + 1
        k = self.d**width
        if U.shape != (k, k):
            raise DomainError("unitary has the wrong size")
        u = U.reshape((self.d,) * (2 * width))
        rows = list(range(first, first + width))
        cols = [n + r for r in rows]
        t = self._tensor()
        t = np.moveaxis(np.tensordot(u, t, axes=(list(range(width, 2 * width)), rows)), list(range(width)), rows)
        t = np.moveaxis(
            np.tensordot(u.conj(), t, axes=(list(range(width, 2 * width)), cols)), list(range(width)), cols
        )
        self.matrix = np.ascontiguousarray(t).reshape(self.D, self.D)

    def apply_diagonal(self, phases: np.ndarray) -> None:
        """rho -> V rho V^dag with V = diag(phases) on the full register."""
        self.matrix = phases[:, None] * self.matrix * phases.conj()[None, :]

    def site_values(self, site: int) -> np.ndarray:
        """Occupation of ``site`` for every register basis index."""
        idx = np.arange(self.D) // 2
        return (idx // self.d ** (self.L - 1 - site)) % self.d

    def outcome_probabilities(self, labels: np.ndarray, n_outcomes: int) -> np.ndarray:
        diag = np.real(np.diagonal(self.matrix))
        return np.bincount(labels, weights=diag, minlength=n_outcomes)[:n_outcomes]

    def project(self, labels: np.ndarray, outcome: int) -> float:
        """Project onto ``labels == outcome``, renormalise, return the weight."""
        mask = labels == outcome
        weight = float(np.real(np.diagonal(self.matrix)[mask].sum()))
        self.matrix = self.matrix * np.outer(mask, mask) / weight
        return weight

    def ancilla_state(self) -> np.ndarray:
        t = self.matrix.reshape(self.D // 2, 2, self.D // 2, 2)
        return np.einsum("iaib->ab", t)

    def ancilla_entropy(self, base: float = 2.0) -> float:
        rho = self.ancilla_state()
        return entropy_from_spectrum(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)) / np.trace(rho).real, base)


def noisy_measure(
    rho: DensityMatrix,
    site: int,
    kind: MeasurementKind,
    epsilon: float,
    rng: np.random.Generator,
) -> tuple[int, float]:
    """Sample a mode measurement with readout misassignment; returns (recorded outcome, weight).

    The ideal outcome is drawn from the Born rule. With probability epsilon
    (parity only) the recorded outcome flips and the state collapses onto the
    flipped parity. If the flipped parity carries no weight the recorded
    outcome still flips but the state collapses onto the ideal outcome.
    With epsilon = 0 no extra random number is drawn.
    """
    if not 0 <= site < rho.L:
        raise DomainError(f"site {site} outside 0..{rho.L - 1}")
    if not 0.0 <= epsilon <= 1.0:
        raise DomainError(f"epsilon must lie in [0, 1], got {epsilon}")
    if epsilon > 0 and kind != PARITY:
        raise DomainError("readout misassignment is defined for parity measurements only")
    n_out = kind.n_outcomes(rho.L * (rho.d - 1))
    labels = kind.label(rho.site_values(site))
    probs = rho.outcome_probabilities(labels, n_out)
    cdf = np.cumsum(probs)
    u = rng.random()
    outcome = min(int(np.searchsorted(cdf, u * cdf[-1], side="right")), n_out - 1)
    while probs[outcome] <= 0.0:
        outcome = (outcome - 1) % n_out
    recorded = outcome
    if epsilon > 0 and rng.random() < epsilon:
        recorded = 1 - outcome
        if probs[recorded] / cdf[-1] >= ZERO_WEIGHT:
            outcome = recorded
        else:
            log.debug("flipped parity on site %d has no weight; collapsing onto the ideal outcome", site)
    weight = rho.project(labels, outcome)
    return recorded, weight / cdf[-1]


# -- circuit runner -------------------------------------------------------------------


@lru_cache(maxsize=64)
def _pair_hamiltonian(d: int) -> tuple[np.ndarray, np.ndarray]:
    a = _lowering(d)
    eye = np.eye(d)
    hop = np.kron(a.conj().T, eye) @ np.kron(eye, a)  # a^dag b
    return hop, np.kron(a.conj().T @ a, eye)


def pair_unitary(theta: float, phi: float, d: int) -> np.ndarray:
    """exp[i theta (e^{i phi} a^dag b + h.c.)] on two d-level truncated modes."""
    hop, _ = _pair_hamiltonian(d)
    h = np.exp(1j * phi) * hop
    return expm(1j * theta * (h + h.conj().T))


class _NoisyRegister:
    """Density matrix plus per-factor bookkeeping of pending idle time."""

    def __init__(self, rho: DensityMatrix, noise: NoiseParams, toggles: NoiseToggles):
        self.rho, self.noise, self.toggles = rho, noise, toggles
        self.pending = np.zeros(rho.L + 1)

    def idle(self, duration: float, busy: tuple[int, ...] = ()) -> None:
        if duration <= 0 or not self.toggles.decay:
            return
        self.pending += duration
        for f in busy:
            self.pending[f] -= duration

    def flush(self, factors=None) -> None:
        n = self.noise
        for f in range(self.rho.L + 1) if factors is None else factors:
            tau = float(self.pending[f])
            if tau <= 0:
                continue
            if f == self.rho.L:
                ch = local_channel(tau, n.kappa_ancilla * (1 + n.n_bar_cavity), n.kappa_ancilla * n.n_bar_cavity, 0.0, 2)
            else:
                ch = thermal_decay_channel(tau, n.T1_cavity, n.n_bar_cavity, self.rho.d)
            self.rho.apply_channel(ch, f)
            self.pending[f] = 0.0

    def driven(self, site: int, tau: float, extra_kappa: float, gamma_phi: float) -> None:
        """Decoherence of a mode during an operation it takes part in."""
        n = self.noise
        down, up = 0.0, 0.0
        if self.toggles.decay:
            down, up = n.kappa * (1 + n.n_bar_cavity), n.kappa * n.n_bar_cavity
        down += extra_kappa
        if tau > 0 and (down or up or gamma_phi):
            self.rho.apply_channel(local_channel(float(tau), down, up, gamma_phi, self.rho.d), site)


def _beam_splitter(reg: _NoisyRegister, site: int, theta: float, phi: float) -> None:
    n, d = reg.noise, reg.rho.d
    tau = n.tau_bs * theta / math.pi
    reg.flush((site, site + 1))
    reg.rho.apply_unitary(pair_unitary(theta, phi, d), site, 2)
    for port in (0, 1):
        extra, gamma = n.beam_splitter_rates(port) if reg.toggles.beam_splitter else (0.0, 0.0)
        reg.driven(site + port, tau, extra, gamma)
    reg.idle(tau, busy=(site, site + 1))


def _mode_phases(rho: DensityMatrix, site: int, U: float) -> np.ndarray:
    n = rho.site_values(site).astype(float)
    return np.exp(-1j * U * n * n)


def _snap(reg: _NoisyRegister, site: int, U: float) -> None:
    n = reg.noise
    active = n.T_snap - 2 * n.swap
    reg.idle(n.swap)
    reg.flush((site,))
    reg.rho.apply_diagonal(_mode_phases(reg.rho, site, U))
    reg.driven(site, active, 0.0, n.transmon_dephasing if reg.toggles.snap else 0.0)
    reg.idle(active, busy=(site,))
    reg.idle(n.swap)


def _parity_check(
    reg: _NoisyRegister, site: int, kind: MeasurementKind, rng: np.random.Generator
) -> tuple[int, float]:
    n = reg.noise
    active = n.T_parity - 2 * n.swap
    reg.idle(n.swap)
    reg.flush((site,))
    reg.driven(site, active, 0.0, n.transmon_dephasing if reg.toggles.parity else 0.0)
    reg.idle(active, busy=(site,))
    epsilon = n.epsilon_readout if reg.toggles.parity else 0.0
    result = noisy_measure(reg.rho, site, kind, epsilon, rng)
    reg.idle(n.swap)
    return result


def _noisy_layer(
    reg: _NoisyRegister, layer: LayerSchedule, measured: bool, config: CircuitConfig, rng: np.random.Generator
) -> None:
    for gate in layer.gates:
        _beam_splitter(reg, gate.site, gate.theta, gate.phi)
    for snap in layer.snaps:
        if snap.U != 0.0:
            _snap(reg, snap.site, snap.U)
    if measured:
        for site in sample_measured_sites(rng, config.L, config.p):
            _parity_check(reg, site, config.kind, rng)
    reg.flush()
    drift = abs(reg.rho.trace - 1.0)
    if drift > TRACE_DRIFT_LIMIT:
        raise TraceDriftError(f"trace drifted by {drift:.3g} in layer {layer.layer_index}")


def run_noisy_trajectory(
    config: CircuitConfig,
    noise: NoiseParams,
    toggles: NoiseToggles,
    rng: np.random.Generator,
) -> np.ndarray:
    """Ancilla entropy after scrambling and after each monitored layer.

    Random numbers are consumed in the same order as the pure-state runner;
    with every toggle off the trajectory reproduces it exactly.
    """
    d = noise.local_dim(config.L)
    if config.charge > d - 1 and config.init == "haar_pair":
        raise ConfigError(f"noise.d: charge {config.charge} does not fit local dimension {d}", key="noise.d")
    pure = initial_state(config, rng)
    rho = DensityMatrix.from_pure(pure.amps, pure.basis.states, d)
    reg = _NoisyRegister(rho, noise, toggles)
    for index in range(1, config.n_scramble + 1):
        _noisy_layer(reg, config.scramble_layer(rng, index), False, config, rng)
    out = [rho.ancilla_entropy(config.entropy_base)]
    for t in range(1, config.n_monitored + 1):
        _noisy_layer(reg, config.monitored_layer(rng, config.n_scramble + t), True, config, rng)
        out.append(reg.rho.ancilla_entropy(config.entropy_base))
    return np.array(out)


def _noisy_task(args) -> np.ndarray:
    (config, noise, toggles), k = args
    return run_noisy_trajectory(config, noise, toggles, trajectory_rng(config.seed, k))


@dataclass
class NoisyRunResult:
    """Noisy and noiseless entropy samples on identical seeds, shape (n, M + 1)."""

    config: CircuitConfig
    toggles: NoiseToggles
    noisy: np.ndarray
    ideal: np.ndarray
    window: int = 1

    @property
    def n(self) -> int:
        return self.noisy.shape[0]

    def curve(self, which: str = "noisy") -> list[tuple[int, float, float]]:
        data = self.noisy if which == "noisy" else self.ideal
        return [(t, *mean_and_sem(data[:, t])) for t in range(data.shape[1])]

    @property
    def residual(self) -> tuple[float, float]:
        """Mean excess of the noisy over the ideal S_R, averaged over the last ``window`` layers.

        The SEM comes from the per-seed paired differences.
        """
        w = max(1, min(self.window, self.noisy.shape[1]))
        diff = self.noisy[:, -w:].mean(axis=1) - self.ideal[:, -w:].mean(axis=1)
        return mean_and_sem(diff)


def run_noisy_circuit(
    config: CircuitConfig,
    noise: NoiseParams,
    toggles: NoiseToggles,
    n_realizations: int,
    workers: int = 1,
    window: int = 1,
    ideal: np.ndarray | None = None,
) -> NoisyRunResult:
    """Noisy ensemble and its noiseless twin (same seeds, every channel off).

    The noiseless samples do not depend on ``noise``; pass ``ideal`` from an
    earlier run of the same circuit to skip recomputing them.
    """
    if ideal is None:
        ideal = np.stack(map_trajectories(_noisy_task, (config, noise, NoiseToggles.all_off()), n_realizations, workers))
    elif ideal.shape[0] != n_realizations:
        raise DomainError("ideal samples do not match n_realizations")
    if toggles.any:
        noisy = np.stack(map_trajectories(_noisy_task, (config, noise, toggles), n_realizations, workers))
    else:
        noisy = ideal.copy()
    return NoisyRunResult(config, toggles, noisy, ideal, window)


def noise_config(L: int = 4, p: float = 1.0, U: float = 2.0, seed: int = 0, **overrides) -> CircuitConfig:
    """Circuit used for error budgets: checkerboard start, S = M = 2L, SNAP on every mode."""
    base = CircuitConfig(
        L=L, p=p, U=U, with_snap=U != 0, snap_sites="all", init="checkerboard",
        scramble_layers=2 * L, monitored_layers=2 * L, scramble_U=2.0, scramble_with_snap=True, seed=seed,
    )
    return replace(base, **overrides) if overrides else base
