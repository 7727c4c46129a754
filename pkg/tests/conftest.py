"""Shared fixtures and independent oracles for the test suite.

The oracles here deliberately avoid the library's own fast paths: the
closest-point oracle scans an explicit integer box and the codebook
oracle filters a grid through plain modular arithmetic, so agreement is
meaningful.
"""

import itertools

import numpy as np
import pytest

from latrelay.lattice import ConstructionALattice


def brute_force_nearest(lat: ConstructionALattice, y, reach: int = 3):
    """Exhaustive closest lattice point, lexicographic tie-break.

    Scans gamma * (c + p*m) for every codeword c and every integer shift
    m with |m_i| <= reach around y. reach must cover the Voronoi cell;
    for the small instances used in tests 3 is plenty.
    """
    y = np.asarray(y, dtype=float)
    p, n, g = lat.p, lat.n, lat.gamma
    center = np.round(y / (g * p)).astype(int)
    best = None
    best_d = np.inf
    for c in _codeword_grid(lat):
        for m in itertools.product(range(-reach, reach + 1), repeat=n):
            pt = g * (c + p * (center + np.array(m)))
            d = float(np.sum((pt - y) ** 2))
            if d < best_d - 1e-12 or (abs(d - best_d) <= 1e-12
                                      and _lex_less(pt, best)):
                best, best_d = pt, d
    return best


def _lex_less(a, b):
    if b is None:
        return True
    for x, y in zip(a, b):
        if x < y - 1e-12:
            return True
        if x > y + 1e-12:
            return False
    return False


def _codeword_grid(lat: ConstructionALattice):
    """All codewords of the underlying linear code, by direct span."""
    p, k, n = lat.p, lat.k, lat.n
    if k == 0:
        return [np.zeros(n, dtype=int)]
    out = []
    for coeffs in itertools.product(range(p), repeat=k):
        out.append(np.array(coeffs, dtype=int) @ lat.rows % p)
    return out


def second_moment_quadrature(lat: ConstructionALattice, grid: int = 120):
    """Grid quadrature of the normalized second moment over the Voronoi
    cell, n = 2 only. Assigns grid points in a covering box to the cell
    by brute-force nearest."""
    assert lat.n == 2
    h = lat.gamma * lat.p   # covering box half-width, ample for n=2
    xs = np.linspace(-h, h, grid, endpoint=False) + h / grid
    total = 0.0
    count = 0
    for x in xs:
        for y in xs:
            pt = np.array([x, y])
            q = brute_force_nearest(lat, pt, reach=2)
            if np.allclose(q, 0.0, atol=1e-9):
                total += float(pt @ pt)
                count += 1
    return total / count / lat.n


@pytest.fixture
def small_lattice():
    return ConstructionALattice(3, np.array([[1, 1]]), gamma=1.0, n=2)


# one line per acceptance criterion, echoed after the test summary so the
# verdicts are visible even when pytest captures stdout
ACCEPTANCE_RESULTS = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_RESULTS:
        terminalreporter.write_line("")
        terminalreporter.write_line("acceptance criteria:")
        for line in ACCEPTANCE_RESULTS:
            terminalreporter.write_line(line)
