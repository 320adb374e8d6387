"""Independent oracles shared by the test modules.

Nothing here calls into the package: the sector basis is brute-forced with
itertools and operators are built densely from occupation arithmetic.
"""

import itertools
import math

import numpy as np
import pytest
from scipy.linalg import expm


def brute_basis(L, Q):
    """All occupation vectors of total Q, mode 0 most significant, larger first."""
    states = [s for s in itertools.product(range(Q + 1), repeat=L) if sum(s) == Q]
    return sorted(states, reverse=True)


def dense_hopping(states, site, phi=0.0):
    """Matrix of e^{i phi} a_site^dag a_{site+1} + h.c. on the listed states."""
    index = {s: k for k, s in enumerate(states)}
    h = np.zeros((len(states), len(states)), dtype=complex)
    for s in states:
        if s[site + 1] == 0:
            continue
        t = list(s)
        t[site] += 1
        t[site + 1] -= 1
        amp = math.sqrt(s[site + 1] * (s[site] + 1))
        h[index[tuple(t)], index[s]] += np.exp(1j * phi) * amp
    return h + h.conj().T


def dense_beam_splitter(states, site, theta, phi=0.0):
    return expm(1j * theta * dense_hopping(states, site, phi))


def dense_snap(states, site, U):
    return np.diag([np.exp(-1j * U * s[site] ** 2) for s in states])


def vn_entropy(rho, base=2.0):
    w = np.linalg.eigvalsh(rho)
    w = w[w > 1e-14]
    return float(-np.sum(w * np.log(w)) / math.log(base))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE_REPORT: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_REPORT:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE_REPORT):
            terminalreporter.write_line(ACCEPTANCE_REPORT[number])
