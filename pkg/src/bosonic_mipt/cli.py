"""Command-line entry point: ``bosonic-mipt {purify,learn,noise,analyze,hw}``.

Every subcommand reads an optional JSON config with the top-level sections
``circuit``, ``ensemble``, ``noise``, ``analysis`` and ``output``, writes its
tables into the output directory together with ``manifest.json``, and exits
0 on success, 2 on a configuration error and 1 on a runtime failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from dataclasses import asdict, dataclass, replace
from pathlib import Path
from typing import Any, Sequence

from .analysis import Curve, collapse_transform, crossing_estimate
from .errors import ConfigError, NoCrossingError
from .hardware import WALL_TIME_MODELS, WallTimeParams, effective_rates, photon_count_bits, state_prep_time, wall_time
from .noise import CHANNELS, NoiseParams, NoiseToggles, noise_config, run_noisy_circuit
from .persistence import (
    RunManifest,
    config_hash,
    read_records_csv,
    write_jsonl,
    write_records_csv,
    write_table,
)
from .protocols import CircuitConfig, learnability_credits, run_ensemble
from .observables import EntropyRecord, mean_and_sem

log = logging.getLogger("bosonic_mipt")

# -- config schema -------------------------------------------------------------------

INT, FLOAT, BOOL, STR = "int", "float", "bool", "str"


def _check_type(value: Any, kind: str, key: str) -> Any:
    if isinstance(kind, tuple):  # ("list", element kind) or ("opt", kind)
        tag, inner = kind
        if tag == "opt":
            return None if value is None else _check_type(value, inner, key)
        if not isinstance(value, list):
            raise ConfigError(f"{key}: expected a list, got {type(value).__name__}", key)
        return [_check_type(v, inner, f"{key}[{i}]") for i, v in enumerate(value)]
    ok = {
        INT: isinstance(value, int) and not isinstance(value, bool),
        FLOAT: isinstance(value, (int, float)) and not isinstance(value, bool),
        BOOL: isinstance(value, bool),
        STR: isinstance(value, str),
    }[kind]
    if not ok:
        raise ConfigError(f"{key}: expected {kind}, got {type(value).__name__} {value!r}", key)
    if kind == FLOAT:
        value = float(value)
        if not math.isfinite(value):
            raise ConfigError(f"{key}: must be finite", key)
    return value


def opt(kind):
    return ("opt", kind)


def listof(kind):
    return ("list", kind)


SCHEMA: dict[str, dict[str, Any]] = {
    "circuit": {
        "L": INT, "p": FLOAT, "Q": opt(INT), "U": FLOAT, "gate_mode": STR, "with_snap": BOOL,
        "snap_sites": STR, "scramble_layers": opt(INT), "monitored_layers": opt(INT),
        "scramble_U": opt(FLOAT), "scramble_with_snap": opt(BOOL), "measurement": STR, "init": STR,
        "seed": INT, "entropy_base": FLOAT, "bipartite": BOOL, "bipartite_base": FLOAT,
        "bipartite_ancilla_with_left": BOOL,
    },
    "ensemble": {"n_realizations": INT, "p_grid": listof(FLOAT), "L_list": listof(INT), "workers": INT},
    "noise": {
        "T1_cavity": FLOAT, "n_bar_cavity": FLOAT, "T1_ancilla": opt(FLOAT), "g": listof(FLOAT),
        "Delta": listof(FLOAT), "T1_C": FLOAT, "T_phi_C": FLOAT, "n_C": FLOAT, "spectrum": STR,
        "T1_q": FLOAT, "n_q": FLOAT, "T_phi_q": FLOAT, "epsilon_readout": FLOAT, "T_snap": FLOAT,
        "T_parity": FLOAT, "tau_bs": FLOAT, "swap": FLOAT, "d": opt(INT),
        "channels": listof(STR), "window": INT,
    },
    "analysis": {
        "z": FLOAT, "p_c": FLOAT, "p_grid": listof(FLOAT), "L_list": listof(INT),
        "t_over_L": INT, "input": STR, "photons": INT, "bits": INT,
    },
    "output": {"dir": STR, "records": BOOL},
}


def validate_config(raw: Any) -> dict[str, dict[str, Any]]:
    """Check section and key names and value types; returns a cleaned copy."""
    if not isinstance(raw, dict):
        raise ConfigError("config: top level must be a JSON object", "config")
    out: dict[str, dict[str, Any]] = {}
    for section, body in raw.items():
        if section not in SCHEMA:
            raise ConfigError(f"{section}: unknown section (expected one of {sorted(SCHEMA)})", section)
        if not isinstance(body, dict):
            raise ConfigError(f"{section}: must be a JSON object", section)
        clean = {}
        for key, value in body.items():
            full = f"{section}.{key}"
            if key not in SCHEMA[section]:
                raise ConfigError(f"{full}: unknown key", full)
            clean[key] = _check_type(value, SCHEMA[section][key], full)
        out[section] = clean
    for section in SCHEMA:
        out.setdefault(section, {})
    return out


@dataclass(frozen=True)
class EnsembleParams:
    n_realizations: int = 1000
    workers: int = 1
    p_grid: tuple[float, ...] = ()
    L_list: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.n_realizations < 1:
            raise ConfigError("ensemble.n_realizations: must be >= 1", "ensemble.n_realizations")
        if self.workers < 1:
            raise ConfigError("ensemble.workers: must be >= 1", "ensemble.workers")
        if any(not 0.0 <= p <= 1.0 for p in self.p_grid):
            raise ConfigError("ensemble.p_grid: values must lie in [0, 1]", "ensemble.p_grid")
        if any(L < 2 for L in self.L_list):
            raise ConfigError("ensemble.L_list: sizes must be >= 2", "ensemble.L_list")


@dataclass(frozen=True)
class AnalysisParams:
    z: float = 1.0
    p_c: float = 0.3
    p_grid: tuple[float, ...] = ()
    L_list: tuple[int, ...] = ()
    t_over_L: int = 2
    input: str | None = None
    photons: int = 5
    bits: int = 3

    def __post_init__(self) -> None:
        if not self.z > 0:
            raise ConfigError("analysis.z: must be > 0", "analysis.z")
        if not 0.0 <= self.p_c <= 1.0:
            raise ConfigError("analysis.p_c: must lie in [0, 1]", "analysis.p_c")
        if self.t_over_L < 0:
            raise ConfigError("analysis.t_over_L: must be >= 0", "analysis.t_over_L")
        if self.bits < 0 or not 0 <= self.photons < 2**self.bits:
            raise ConfigError("analysis.photons: must lie in [0, 2^bits)", "analysis.photons")


def _tuples(d: dict, *keys: str) -> dict:
    return {k: tuple(v) if k in keys else v for k, v in d.items()}


# -- subcommands -----------------------------------------------------------------------


def _circuit(cfg: dict, seed: int | None) -> CircuitConfig:
    section = dict(cfg["circuit"])
    if seed is not None:
        section["seed"] = seed
    if "L" not in section:
        raise ConfigError("circuit.L: required", "circuit.L")
    return CircuitConfig(**section)


def cmd_purify(cfg: dict, args, out: Path, manifest: RunManifest) -> None:
    base = _circuit(cfg, args.seed)
    ens = EnsembleParams(**_tuples(cfg["ensemble"], "p_grid", "L_list"))
    workers = args.workers or ens.workers
    keep = cfg["output"].get("records", False)
    records: list[EntropyRecord] = []
    bip: list[EntropyRecord] = []
    traj_rows: list[dict] = []
    for L in ens.L_list or (base.L,):
        for p in ens.p_grid or (base.p,):
            config = replace(base, L=L, p=p)
            result = run_ensemble(config, ens.n_realizations, workers, keep_records=keep)
            records += result.records()
            bip += result.bipartite_records()
            if keep:
                for k, rec in enumerate(result.trajectory_records):
                    traj_rows.append({"L": L, "p": p, "k": k, "events": [asdict(e) for e in rec]})
            log.info("L=%d p=%.4g S_R(final)=%.4f", L, p, result.at(-1)[0])
    write_records_csv(out / "purify.csv", records)
    manifest.outputs.append("purify.csv")
    if bip:
        write_records_csv(out / "bipartite.csv", bip)
        manifest.outputs.append("bipartite.csv")
    if keep:
        write_jsonl(out / "records.jsonl", traj_rows)
        manifest.outputs.append("records.jsonl")


def cmd_learn(cfg: dict, args, out: Path, manifest: RunManifest) -> None:
    base = _circuit(cfg, args.seed)
    ens = EnsembleParams(**_tuples(cfg["ensemble"], "p_grid", "L_list"))
    workers = args.workers or ens.workers
    rows = []
    trials = []
    for L in ens.L_list or (base.L,):
        for p in ens.p_grid or (base.p,):
            config = replace(base, L=L, p=p)
            credits = learnability_credits(config, ens.n_realizations, workers)
            mean, sem = mean_and_sem(credits)
            rows.append((L, config.charge, p, mean, sem, ens.n_realizations))
            trials += [{"L": L, "p": p, "k": k, "credit": float(c)} for k, c in enumerate(credits)]
            log.info("L=%d p=%.4g A=%.4f", L, p, mean)
    write_table(out / "learn.csv", ("L", "Q", "p", "accuracy", "sem", "n_trials"), rows)
    manifest.outputs.append("learn.csv")
    if cfg["output"].get("records", False):
        write_jsonl(out / "trials.jsonl", trials)
        manifest.outputs.append("trials.jsonl")


def cmd_noise(cfg: dict, args, out: Path, manifest: RunManifest) -> None:
    section = dict(cfg["circuit"])
    if args.seed is not None:
        section["seed"] = args.seed
    config = noise_config(**section) if section else noise_config()
    noise_section = dict(cfg["noise"])
    channels = noise_section.pop("channels", list(CHANNELS))
    window = noise_section.pop("window", 1)
    for key in ("g", "Delta"):
        if key in noise_section:
            noise_section[key] = tuple(noise_section[key])
    noise = NoiseParams(**noise_section)
    try:
        toggles = NoiseToggles.only(*channels)
    except Exception as exc:
        raise ConfigError(f"noise.channels: {exc}", "noise.channels") from exc
    if window < 1:
        raise ConfigError("noise.window: must be >= 1", "noise.window")
    ens = EnsembleParams(**_tuples(cfg["ensemble"], "p_grid", "L_list"))
    result = run_noisy_circuit(config, noise, toggles, ens.n_realizations, args.workers or ens.workers, window)
    residual, residual_sem = result.residual
    rows = []
    for mask, which, res in ((toggles.mask, "noisy", residual), ("none", "ideal", 0.0)):
        for t, mean, sem in result.curve(which):
            rows.append((config.L, config.charge, config.p, t, mean, sem, result.n, config.entropy_base, mask, res))
    write_table(out / "noise.csv", EntropyRecord.CSV_HEADER + ("channel_mask", "residual_entropy"), rows)
    summary = {"channel_mask": toggles.mask, "residual_entropy": residual, "residual_sem": residual_sem,
               "window": window, "n_realizations": result.n, "noise": noise.to_dict()}
    (out / "noise_summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    manifest.outputs += ["noise.csv", "noise_summary.json"]
    print(f"residual entropy ({toggles.mask}): {residual:.4f} +/- {residual_sem:.4f}")


def cmd_analyze(cfg: dict, args, out: Path, manifest: RunManifest) -> None:
    ana = AnalysisParams(**_tuples(cfg["analysis"], "p_grid", "L_list"))
    source = Path(ana.input) if ana.input else out / "purify.csv"
    if not source.exists():
        raise ConfigError(f"analysis.input: {source} does not exist", "analysis.input")
    records = read_records_csv(source)
    sizes = sorted(ana.L_list or {r.L for r in records})
    rows = []
    for small, large in zip(sizes, sizes[1:]):
        try:
            c = crossing_estimate(
                Curve.from_records(records, small, ana.t_over_L * small),
                Curve.from_records(records, large, ana.t_over_L * large),
            )
            for root, sigma in zip(c.roots, c.sigmas):
                rows.append((small, large, ana.t_over_L, root, sigma, len(c.roots)))
        except NoCrossingError:
            rows.append((small, large, ana.t_over_L, float("nan"), float("nan"), 0))
    write_table(out / "crossings.csv", ("L1", "L2", "t_over_L", "p_star", "sigma", "n_roots"), rows)
    table = collapse_transform(records, ana.z, ana.p_c)
    write_table(out / "collapse.csv", table.HEADER, table.rows)
    manifest.outputs += ["crossings.csv", "collapse.csv"]
    print(f"collapse at p = {table.p_selected} (requested p_c = {ana.p_c}), z = {ana.z}")


def cmd_hw(cfg: dict, args, out: Path, manifest: RunManifest) -> None:
    noise_section = {k: v for k, v in cfg["noise"].items() if k not in ("channels", "window")}
    for key in ("g", "Delta"):
        if key in noise_section:
            noise_section[key] = tuple(noise_section[key])
    noise = NoiseParams(**noise_section)
    ana = AnalysisParams(**_tuples(cfg["analysis"], "p_grid", "L_list"))
    circuit = cfg["circuit"]
    L, p = circuit.get("L", 4), circuit.get("p", 1.0)
    S = circuit.get("scramble_layers") or 2 * L
    M = circuit.get("monitored_layers") or 2 * L
    ports = []
    for port in range(2):
        kappa, gamma = effective_rates(
            noise.g[port], noise.Delta[port], 1 / noise.T1_C, 1 / noise.T_phi_C, noise.n_C, noise.spectrum, noise.kappa
        )
        ports.append({"g": noise.g[port], "Delta": noise.Delta[port], "kappa": kappa, "gamma": gamma,
                      "T1_effective": 1 / kappa, "T_phi_effective": 1 / gamma})
    bits, trace = photon_count_bits(ana.photons, ana.bits)
    report = {
        "effective_rates": ports,
        "wall_time_us": {m: wall_time(L, S, M, p, WallTimeParams(model=m)) for m in WALL_TIME_MODELS},
        "state_prep_us": state_prep_time(L),
        "photon_count": {"n": ana.photons, "K": ana.bits, "bits": bits, "trace": [asdict(b) for b in trace]},
        "inputs": {"L": L, "S": S, "M": M, "p": p},
    }
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    (out / "hw.json").write_text(text)
    manifest.outputs.append("hw.json")
    print(text, end="")


COMMANDS = {"purify": cmd_purify, "learn": cmd_learn, "noise": cmd_noise, "analyze": cmd_analyze, "hw": cmd_hw}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bosonic-mipt", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", type=Path, help="JSON config file")
    parser.add_argument("--seed", type=int, help="overrides circuit.seed")
    parser.add_argument("--workers", type=int, help="overrides ensemble.workers")
    parser.add_argument("--out", type=Path, help="output directory (overrides output.dir)")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        raw: Any = {}
        if args.config is not None:
            try:
                raw = json.loads(args.config.read_text())
            except OSError as exc:
                raise ConfigError(f"config: cannot read {args.config}: {exc}", "config") from exc
            except json.JSONDecodeError as exc:
                raise ConfigError(f"config: invalid JSON ({exc})", "config") from exc
        cfg = validate_config(raw)
        if args.workers is not None and args.workers < 1:
            raise ConfigError("--workers: must be >= 1", "workers")
        out = args.out or Path(cfg["output"].get("dir", "results"))
        seed = args.seed if args.seed is not None else cfg["circuit"].get("seed", 0)
        manifest = RunManifest(args.command, config_hash(raw), seed)
        out.mkdir(parents=True, exist_ok=True)
        COMMANDS[args.command](cfg, args, out, manifest)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - any runtime failure maps to exit 1
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    manifest.write(out / "manifest.json")
    return 0


if __name__ == "__main__":
    sys.exit(main())
