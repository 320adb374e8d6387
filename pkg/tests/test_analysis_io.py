import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bosonic_mipt.analysis import Curve, collapse_transform, crossing_estimate
from bosonic_mipt.errors import DomainError, NoCrossingError
from bosonic_mipt.observables import EntropyRecord
from bosonic_mipt.persistence import (
    RunManifest,
    config_hash,
    read_jsonl,
    read_records_csv,
    write_jsonl,
    write_records_csv,
)

GRID = np.linspace(0.0, 1.0, 11)


def curve(values, sem=0.01):
    values = np.asarray(values, dtype=float)
    return Curve(GRID[: values.size], values, np.full(values.size, sem))


def test_linear_crossing():
    c = crossing_estimate(curve(1 - GRID), curve(np.full(11, 0.5)))
    assert c.p_star == pytest.approx(0.5, abs=1e-12)
    assert not c.multiple
    # the difference has slope 1, so sigma is the combined SEM at the root
    assert c.sigma == pytest.approx(0.01 * math.sqrt(2), rel=1e-9)


def test_crossing_between_grid_points():
    c = crossing_estimate(curve(1 - GRID), curve(np.full(11, 0.45)))
    assert c.p_star == pytest.approx(0.55, abs=1e-12)


def test_identical_curves_have_no_crossing():
    with pytest.raises(NoCrossingError):
        crossing_estimate(curve(1 - GRID), curve(1 - GRID))


def test_multiple_roots_flagged():
    wiggle = 0.5 + 0.2 * np.sin(2 * np.pi * GRID * 1.5)
    c = crossing_estimate(curve(np.full(11, 0.5)), curve(wiggle))
    assert c.multiple and len(c.roots) == len(c.sigmas) >= 2
    assert c.p_star == c.roots[0] and list(c.roots) == sorted(c.roots)


def test_curve_validation():
    with pytest.raises(DomainError):
        Curve(np.array([0.2, 0.1]), np.zeros(2), np.zeros(2))
    with pytest.raises(DomainError):
        crossing_estimate(curve([0.5]), curve([0.4]))


def records_grid(sizes=(4, 6), ps=(0.1, 0.15, 0.3), tmax_over_L=2):
    out = []
    for L in sizes:
        for p in ps:
            for t in range(tmax_over_L * L + 1):
                out.append(EntropyRecord(L, L // 2, p, t, math.exp(-p * t), 0.01, 100, 2.0))
    return out


def test_collapse_z_one_is_t_over_L():
    table = collapse_transform(records_grid(), 1.0, 0.1)
    assert table.p_selected == 0.1
    assert len(table.rows) == 9 + 13
    for L, p, scaled, mean, sem in table.rows:
        assert p == 0.1
        assert scaled * L == pytest.approx(round(scaled * L))


def test_collapse_dynamical_exponent():
    table = collapse_transform(records_grid(), 5 / 3, 0.15)
    assert table.p_selected == 0.15
    for L, _, scaled, mean, _ in table.rows:
        t = -math.log(mean) / 0.15
        assert scaled == pytest.approx(t / L ** (5 / 3), abs=1e-9)


def test_collapse_errors():
    with pytest.raises(DomainError) as err:
        collapse_transform(records_grid(ps=(0.1, 0.3)), 1.0, 0.18, max_distance=0.05)
    assert "0.1" in str(err.value)
    with pytest.raises(DomainError):
        collapse_transform(records_grid(), 0.0, 0.1)
    with pytest.raises(DomainError):
        collapse_transform([], 1.0, 0.1)


@given(st.lists(st.floats(allow_nan=False, allow_infinity=False, width=64), min_size=1, max_size=20))
def test_csv_roundtrip_exact(values):
    import tempfile
    from pathlib import Path

    records = [EntropyRecord(4, 2, abs(v) % 1.0, k, v, abs(v), 10, 2.0) for k, v in enumerate(values)]
    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "r.csv"
        write_records_csv(path, records)
        assert read_records_csv(path) == records


def test_csv_extra_columns_and_bad_header(tmp_path):
    path = tmp_path / "r.csv"
    write_records_csv(path, records_grid()[:3], extra={"channel_mask": "decay"})
    assert path.read_text().splitlines()[0].endswith(",channel_mask")
    assert len(read_records_csv(path)) == 3
    (tmp_path / "bad.csv").write_text("a,b\n1,2\n")
    with pytest.raises(DomainError):
        read_records_csv(tmp_path / "bad.csv")


def test_jsonl_roundtrip(tmp_path):
    items = [{"k": 1, "events": [{"site": 0, "outcome": 1}]}, {"k": 2, "events": []}]
    write_jsonl(tmp_path / "x.jsonl", items)
    assert read_jsonl(tmp_path / "x.jsonl") == items


def test_config_hash_ignores_key_order():
    a = {"circuit": {"L": 4, "p": 0.5}, "ensemble": {"n_realizations": 10}}
    b = {"ensemble": {"n_realizations": 10}, "circuit": {"p": 0.5, "L": 4}}
    assert config_hash(a) == config_hash(b)
    assert config_hash(a) != config_hash({"circuit": {"L": 4, "p": 0.25}})
    assert len(config_hash({})) == 64


def test_manifest_roundtrip(tmp_path):
    m = RunManifest("purify", config_hash({}), 3, outputs=["purify.csv"])
    m.write(tmp_path / "manifest.json")
    back = RunManifest.from_json((tmp_path / "manifest.json").read_text())
    assert back == m
    assert back.finished >= back.started
    assert set(json.loads(m.to_json())) == {"command", "config_hash", "seed", "version", "started", "finished", "outputs"}
