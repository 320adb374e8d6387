import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bosonic_mipt.basis import PureState, build_basis
from bosonic_mipt.errors import DomainError
from bosonic_mipt.gates import (
    BeamSplitterSpec,
    GateMode,
    SnapSpec,
    apply_beam_splitter,
    apply_layer,
    apply_snap,
    pair_sites,
    sample_layer,
    two_mode_block,
)
from bosonic_mipt.measurement import NUMBER, outcome_distribution

from conftest import brute_basis, dense_beam_splitter, dense_snap


def random_state(basis, rng, n_anc=2):
    z = rng.normal(size=(basis.dim, n_anc)) + 1j * rng.normal(size=(basis.dim, n_anc))
    return PureState(basis, z / np.linalg.norm(z))


def test_single_photon_full_swap():
    block = two_mode_block(1, np.pi / 2)
    out = block @ np.array([1, 0])
    assert np.allclose(out, [0, 1j], atol=1e-12)


@pytest.mark.parametrize("s", range(0, 7))
def test_theta_zero_is_identity(s):
    assert np.allclose(two_mode_block(s, 0.0, 1.3), np.eye(s + 1), atol=1e-12)


def test_hong_ou_mandel():
    out = two_mode_block(2, np.pi / 4) @ np.array([0, 1, 0])
    assert np.allclose(out, 1j * np.array([1, 0, 1]) / np.sqrt(2), atol=1e-12)


@pytest.mark.parametrize("s", range(0, 9))
def test_block_unitary(s):
    rng = np.random.default_rng(s)
    for theta, phi in rng.uniform(0, 2 * np.pi, size=(5, 2)):
        u = two_mode_block(s, theta, phi)
        assert np.max(np.abs(u.conj().T @ u - np.eye(s + 1))) < 1e-12


@pytest.mark.parametrize("s", range(1, 6))
def test_block_matches_dense_expm(s):
    # two modes with s photons: the whole sector is one block
    states = brute_basis(2, s)
    for theta, phi in [(0.7, 0.0), (2.1, 1.1), (5.9, 4.0)]:
        assert np.allclose(two_mode_block(s, theta, phi), dense_beam_splitter(states, 0, theta, phi), atol=1e-12)


@pytest.mark.parametrize("L,Q", [(2, 3), (3, 2), (4, 2), (5, 3)])
def test_layer_matches_dense_oracle(L, Q, rng):
    basis = build_basis(L, Q)
    states = brute_basis(L, Q)
    state = random_state(basis, rng)
    expected = state.amps.copy()
    for layer_index in (1, 2, 3):
        layer = sample_layer(rng, layer_index, L, "BSRP", U=0.8, with_snap=True)
        apply_layer(state, layer)
        for g in layer.gates:
            expected = dense_beam_splitter(states, g.site, g.theta, g.phi) @ expected
        for snap in layer.snaps:
            expected = dense_snap(states, snap.site, snap.U) @ expected
    assert np.max(np.abs(state.amps - expected)) < 1e-10


def test_theta_then_minus_theta_returns(rng):
    basis = build_basis(2, 4)
    state = random_state(basis, rng)
    before = state.amps.copy()
    apply_beam_splitter(state, BeamSplitterSpec(0, 1.234, 0.5))
    apply_beam_splitter(state, BeamSplitterSpec(0, -1.234, 0.5))
    assert np.max(np.abs(state.amps - before)) < 1e-10


def test_gate_leaves_other_modes_marginal(rng):
    basis = build_basis(5, 3)
    state = random_state(basis, rng)
    before = [outcome_distribution(state, m, NUMBER) for m in (2, 3, 4)]
    apply_beam_splitter(state, BeamSplitterSpec(0, 1.0, 0.3))
    after = [outcome_distribution(state, m, NUMBER) for m in (2, 3, 4)]
    for b, a in zip(before, after):
        assert np.allclose(a, b, atol=1e-12)


def test_snap_phases():
    basis = build_basis(3, 2)
    state = PureState.fock(basis, (2, 0, 0))
    apply_snap(state, SnapSpec(0, 0.7))
    assert np.isclose(state.amps[0, 0], np.exp(-4j * 0.7))


def test_snap_zero_is_identity(rng):
    basis = build_basis(4, 2)
    state = random_state(basis, rng)
    before = state.amps.copy()
    apply_snap(state, SnapSpec(1, 0.0))
    assert np.array_equal(state.amps, before)


def test_snap_preserves_probabilities_and_number_statistics(rng):
    basis = build_basis(4, 3)
    state = random_state(basis, rng)
    probs = np.abs(state.amps) ** 2
    dist = outcome_distribution(state, 2, NUMBER)
    apply_snap(state, SnapSpec(2, 1.9))
    assert np.allclose(np.abs(state.amps) ** 2, probs, atol=1e-15)
    assert np.allclose(outcome_distribution(state, 2, NUMBER), dist, atol=1e-15)


def test_site_errors():
    basis = build_basis(3, 1)
    state = PureState.fock(basis, (1, 0, 0))
    with pytest.raises(DomainError):
        apply_snap(state, SnapSpec(3, 1.0))
    with pytest.raises(DomainError):
        apply_beam_splitter(state, BeamSplitterSpec(2, 1.0))
    with pytest.raises(DomainError):
        two_mode_block(2, np.inf)


def test_pairing_pattern():
    assert pair_sites(1, 4) == [0, 2]
    assert pair_sites(2, 4) == [1]
    assert pair_sites(3, 5) == [0, 2]
    assert pair_sites(4, 5) == [1, 3]


def test_sample_layer_modes(rng):
    fp = sample_layer(rng, 1, 6, GateMode.BSFP)
    assert all(g.phi == 0.0 for g in fp.gates)
    rp = sample_layer(rng, 1, 6, "BSRP")
    assert all(0 <= g.phi < 2 * np.pi for g in rp.gates) and any(g.phi != 0 for g in rp.gates)
    assert all(0 <= g.theta < 2 * np.pi for g in fp.gates + rp.gates)
    snapped = sample_layer(rng, 2, 6, "BSFP", U=2.0, with_snap=True)
    assert [s.site for s in snapped.snaps] == [1, 2, 3, 4]
    everywhere = sample_layer(rng, 2, 6, "BSFP", U=2.0, with_snap=True, snap_sites="all")
    assert [s.site for s in everywhere.snaps] == list(range(6))


def test_sample_layer_deterministic():
    a = sample_layer(np.random.default_rng(7), 3, 8, "BSRP", 2.0, True)
    b = sample_layer(np.random.default_rng(7), 3, 8, "BSRP", 2.0, True)
    assert a == b


@settings(max_examples=40, deadline=None)
@given(
    st.integers(2, 6),
    st.integers(0, 4),
    st.lists(st.tuples(st.floats(0, 2 * np.pi), st.floats(0, 2 * np.pi)), min_size=1, max_size=6),
    st.integers(0, 2**32 - 1),
)
def test_gates_preserve_norm_and_charge(L, Q, angles, seed):
    basis = build_basis(L, Q)
    state = random_state(basis, np.random.default_rng(seed))
    for k, (theta, phi) in enumerate(angles):
        apply_beam_splitter(state, BeamSplitterSpec(k % (L - 1), theta, phi))
        apply_snap(state, SnapSpec(k % L, theta))
    assert abs(state.norm() - 1.0) < 1e-10
    # every representable amplitude lives in the Q sector by construction
    assert np.all(basis.states.sum(axis=1) == Q)
