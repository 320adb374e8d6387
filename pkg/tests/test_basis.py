import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bosonic_mipt.basis import PureState, SectorBasis, build_basis, sector_dimension
from bosonic_mipt.errors import CapacityError, DomainError

from conftest import brute_basis


@pytest.mark.parametrize("L,Q,dim", [(4, 2, 10), (2, 2, 3), (1, 0, 1), (16, 8, 490314)])
def test_dimension_examples(L, Q, dim):
    assert sector_dimension(L, Q) == dim


def test_two_mode_two_photon_states():
    assert [tuple(s) for s in build_basis(2, 2).states] == [(2, 0), (1, 1), (0, 2)]


def test_single_empty_mode():
    assert [tuple(s) for s in build_basis(1, 0).states] == [(0,)]


@pytest.mark.parametrize("L", range(1, 11))
@pytest.mark.parametrize("Q", range(0, 6))
def test_enumeration_matches_binomial(L, Q):
    basis = build_basis(L, Q)
    assert basis.dim == len(basis.states) == math.comb(Q + L - 1, Q)
    assert np.all(basis.states.sum(axis=1) == Q)


@pytest.mark.parametrize("L,Q", [(3, 3), (4, 2), (5, 4), (6, 3)])
def test_order_matches_bruteforce(L, Q):
    assert [tuple(s) for s in build_basis(L, Q).states] == brute_basis(L, Q)


@pytest.mark.parametrize("L,Q", [(8, 4), (10, 5), (12, 6)])
def test_rank_unrank_exhaustive(L, Q):
    basis = build_basis(L, Q)
    assert basis.dim <= 10**5
    ranks = basis.rank_many(basis.states)
    assert np.array_equal(ranks, np.arange(basis.dim))
    for k in range(0, basis.dim, max(1, basis.dim // 300)):
        assert basis.rank(basis.unrank(k)) == k
        assert basis.unrank(k) == tuple(basis.states[k])


def test_random_ranks_against_enumeration_oracle():
    oracle = brute_basis(8, 4)
    basis = build_basis(8, 4)
    rng = np.random.default_rng(0)
    for k in rng.integers(0, len(oracle), size=1000):
        assert basis.unrank(int(k)) == oracle[k]
        assert basis.rank(oracle[k]) == k


def test_first_state_rank_zero():
    basis = build_basis(5, 3)
    assert basis.rank((3, 0, 0, 0, 0)) == 0
    assert basis.unrank(basis.dim - 1) == (0, 0, 0, 0, 3)


def test_rank_errors():
    basis = build_basis(4, 2)
    with pytest.raises(DomainError):
        basis.rank((1, 1, 1, 0))  # wrong charge
    with pytest.raises(DomainError):
        basis.rank((2, 0, 0))  # wrong length
    with pytest.raises(DomainError):
        basis.rank((3, -1, 0, 0))
    with pytest.raises(DomainError):
        basis.unrank(basis.dim)
    with pytest.raises(DomainError):
        basis.unrank(-1)


def test_capacity_error():
    with pytest.raises(CapacityError):
        SectorBasis(16, 8, max_amplitudes=1000)


def test_states_are_read_only():
    basis = build_basis(4, 2)
    with pytest.raises(ValueError):
        basis.states[0, 0] = 5


def test_pure_state_layout():
    basis = build_basis(3, 1)
    state = PureState.fock(basis, (0, 1, 0), ancilla=1)
    assert state.amps.shape == (3, 2)
    assert state.amps[basis.rank((0, 1, 0)), 1] == 1
    with pytest.raises(DomainError):
        PureState(basis, np.zeros(4))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 7), st.integers(0, 5), st.data())
def test_rank_unrank_roundtrip_property(L, Q, data):
    basis = build_basis(L, Q)
    k = data.draw(st.integers(0, basis.dim - 1))
    occ = basis.unrank(k)
    assert sum(occ) == Q and len(occ) == L
    assert basis.rank(occ) == k
