"""Result files: entropy CSVs, JSONL trial logs and run manifests."""

from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import asdict, dataclass, field, fields
from datetime import datetime, timezone
from importlib import metadata
from pathlib import Path
from typing import Iterable, Sequence

from .errors import DomainError
from .observables import EntropyRecord


def fmt(value) -> str:
    """Lossless text for ints and floats (shortest repr that round-trips)."""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return repr(float(value))
    return str(value)


def write_table(path: Path | str, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    Path(path).write_text(buf.getvalue())


def read_table(path: Path | str) -> tuple[list[str], list[list[str]]]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise DomainError(f"{path} is empty")
    return rows[0], rows[1:]


def record_row(r: EntropyRecord) -> tuple:
    return (r.L, r.Q, r.p, r.t, r.mean, r.sem, r.n_realizations, r.base)


def write_records_csv(path: Path | str, records: Iterable[EntropyRecord], extra: dict | None = None) -> None:
    """Entropy records; ``extra`` appends constant columns (name -> value)."""
    extra = extra or {}
    header = list(EntropyRecord.CSV_HEADER) + list(extra)
    write_table(path, header, (record_row(r) + tuple(extra.values()) for r in records))


def read_records_csv(path: Path | str) -> list[EntropyRecord]:
    header, rows = read_table(path)
    width = len(EntropyRecord.CSV_HEADER)
    if tuple(header[:width]) != EntropyRecord.CSV_HEADER:
        raise DomainError(f"{path}: unexpected header {header}")
    out = []
    for row in rows:
        L, Q, p, t, mean, sem, n, base = row[:width]
        out.append(EntropyRecord(int(L), int(Q), float(p), int(t), float(mean), float(sem), int(n), float(base)))
    return out


def write_jsonl(path: Path | str, items: Iterable[dict]) -> None:
    with open(path, "w") as fh:
        for item in items:
            fh.write(json.dumps(item, sort_keys=True) + "\n")


def read_jsonl(path: Path | str) -> list[dict]:
    with open(path) as fh:
        return [json.loads(line) for line in fh if line.strip()]


def config_hash(config: dict) -> str:
    """SHA-256 of the canonical JSON form (keys sorted at every level)."""
    text = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()


def package_version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "unknown"


def utc_now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


@dataclass
class RunManifest:
    command: str
    config_hash: str
    seed: int
    version: str = field(default_factory=package_version)
    started: str = field(default_factory=utc_now)
    finished: str = ""
    outputs: list[str] = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "RunManifest":
        data = json.loads(text)
        known = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in data.items() if k in known})

    def write(self, path: Path | str) -> None:
        self.finished = utc_now()
        Path(path).write_text(self.to_json())
