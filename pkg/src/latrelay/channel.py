"""Dithered nested-lattice transmission over AWGN and the list decoder.

The decoder outputs the fixed-size set of fine-lattice points falling in
the intermediate lattice's cell around the MMSE-scaled observation,
reduced mod the coarse lattice. Two implementations are provided: the
production decoder walks the V_s/V_c cosets of the intermediate lattice
inside the fine lattice, while the alternate form scans an inflated box
around the observation and applies the shifted-cell membership test
directly. Both are exact and must agree everywhere except cell
boundaries (measure zero).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import gf
from .errors import EnumerationBudgetExceeded, NotACodeword
from .lattice import (
    TOL,
    ConstructionALattice,
    Lattice,
    enumerate_codebook,
    is_sublattice,
)


@dataclass(frozen=True)
class AwgnParams:
    """Per-dimension transmit power and noise variance."""
    P: float
    N: float

    def __post_init__(self):
        if self.P <= 0 or self.N <= 0:
            raise ValueError("P and N must be positive")

    @property
    def alpha(self) -> float:
        """MMSE scaling P/(P+N)."""
        return self.P / (self.P + self.N)


@dataclass
class ListDecodeResult:
    points: np.ndarray          # (size, n), each reduced mod the coarse lattice
    size: int
    contains_truth: Optional[bool] = None


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Independent per-trial stream derived from (seed, trial index)."""
    return np.random.default_rng(np.random.SeedSequence(entropy=seed,
                                                        spawn_key=(trial,)))


def encode_dithered(t: np.ndarray, U: np.ndarray, coarse: Lattice) -> np.ndarray:
    """X = (t - U) mod Lambda. Requires t to lie in the coarse cell."""
    t = np.asarray(t, dtype=float)
    if not np.allclose(coarse.nearest(t), 0.0, atol=TOL):
        raise NotACodeword("t does not lie in the coarse fundamental region")
    return coarse.mod(t - U)


def receiver_front_end(Y: np.ndarray, U: np.ndarray, P: float, N: float,
                       coarse: Lattice) -> np.ndarray:
    """Y' = (alpha Y + U) mod Lambda with the MMSE coefficient."""
    alpha = P / (P + N)
    return coarse.mod(alpha * np.asarray(Y, dtype=float) + U)


def effective_noise(X: np.ndarray, Z: np.ndarray, P: float, N: float,
                    coarse: Lattice) -> np.ndarray:
    """Z' = (-(1-alpha) X + alpha Z) mod Lambda."""
    alpha = P / (P + N)
    return coarse.mod(-(1.0 - alpha) * X + alpha * Z)


def _point_in_set(t: np.ndarray, points: np.ndarray) -> bool:
    if len(points) == 0:
        return False
    return bool(np.any(np.all(np.abs(points - t[None, :]) <= 1e-6, axis=1)))


class NestedListDecoder:
    """List decoder for a chain Lambda subseteq Lambda_s subseteq Lambda_c.

    Precomputes the coset representatives of Lambda_s inside Lambda_c, so a
    decode costs |L| = V_s/V_c nearest-point operations.
    """

    def __init__(self, coarse: ConstructionALattice, mid: ConstructionALattice,
                 fine: ConstructionALattice):
        if not (is_sublattice(coarse, mid) and is_sublattice(mid, fine)):
            raise ValueError("chain nesting invalid")
        self.coarse = coarse
        self.mid = mid
        self.fine = fine
        self.reps = np.array([e.t for e in enumerate_codebook(mid, fine)])
        self.list_size = int(round(mid.volume / fine.volume))

    def decode(self, y_prime: np.ndarray,
               truth: Optional[np.ndarray] = None) -> ListDecodeResult:
        """All fine points in (y_prime + V_s), reduced mod the coarse lattice."""
        y_prime = np.asarray(y_prime, dtype=float)
        anchors = self.reps + self.mid.nearest_many(y_prime[None, :] - self.reps)
        members = self.coarse.mod_many(anchors)
        contains = _point_in_set(np.asarray(truth, dtype=float), members) \
            if truth is not None else None
        return ListDecodeResult(points=members, size=len(members),
                                contains_truth=contains)


def list_decode(y_prime: np.ndarray, coarse: ConstructionALattice,
                mid: ConstructionALattice, fine: ConstructionALattice,
                truth: Optional[np.ndarray] = None) -> ListDecodeResult:
    """One-shot wrapper around :class:`NestedListDecoder`."""
    return NestedListDecoder(coarse, mid, fine).decode(y_prime, truth)


def _fine_points_in_box(fine: ConstructionALattice, center: np.ndarray,
                        halfwidth: float, budget: int) -> np.ndarray:
    """All fine-lattice points with coordinates in center +- halfwidth."""
    g = fine.gamma
    lo = np.ceil((center - halfwidth) / g - 1e-12).astype(int)
    hi = np.floor((center + halfwidth) / g + 1e-12).astype(int)
    counts = hi - lo + 1
    if np.prod(counts.astype(float)) > budget:
        raise EnumerationBudgetExceeded(
            f"box scan of {np.prod(counts.astype(float)):.3g} points "
            f"exceeds budget {budget}")
    axes = [np.arange(a, b + 1) for a, b in zip(lo, hi)]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, fine.n)
    keep = gf.in_rowspan_many(fine.rows, grid % fine.p, fine.p)
    return g * grid[keep].astype(float)


def list_decode_q_form(y_prime: np.ndarray, coarse: ConstructionALattice,
                       mid: ConstructionALattice, fine: ConstructionALattice,
                       truth: Optional[np.ndarray] = None,
                       budget: int = 2_000_000) -> ListDecodeResult:
    """Alternate decoder: membership test y_prime in (lambda_c + V_s).

    Scans every fine point in the box around y_prime circumscribing V_s
    inflated by the fine lattice's covering box, keeps those lambda_c with
    Q_s(y_prime - lambda_c) = 0, and reduces mod the coarse lattice.
    """
    y_prime = np.asarray(y_prime, dtype=float)
    halfwidth = mid.voronoi_box_halfwidth() + fine.voronoi_box_halfwidth()
    cand = _fine_points_in_box(fine, y_prime, halfwidth, budget)
    q = mid.nearest_many(y_prime[None, :] - cand)
    keep = np.all(np.abs(q) <= TOL, axis=1)
    members = coarse.mod_many(cand[keep])
    members = np.unique(np.round(members, 9), axis=0)
    contains = _point_in_set(np.asarray(truth, dtype=float), members) \
        if truth is not None else None
    return ListDecodeResult(points=members, size=len(members),
                            contains_truth=contains)


def unique_decode(y_prime: np.ndarray, coarse: Lattice, fine: Lattice) -> np.ndarray:
    """Classic nested-lattice point decoder: Q_c(Y') mod Lambda."""
    return coarse.mod(fine.nearest(np.asarray(y_prime, dtype=float)))


@dataclass
class P2PStats:
    """Monte Carlo summary for the point-to-point list-decoding harness."""
    trials: int
    pe_hat: float
    pe_ci95: float
    list_size: int
    mean_list_size: float
    n: int
    p: int
    ranks: tuple[int, ...]
    P: float
    N: float
    seed: int
    log: list = field(default_factory=list, repr=False)

    CSV_COLUMNS = ("trials", "pe_hat", "pe_ci95", "list_size", "n", "p",
                   "ranks", "P", "N", "seed")

    def csv_row(self) -> str:
        ranks = "|".join(str(k) for k in self.ranks)
        return (f"{self.trials},{self.pe_hat!r},{self.pe_ci95!r},"
                f"{self.list_size},{self.n},{self.p},{ranks},"
                f"{self.P!r},{self.N!r},{self.seed}")


def simulate_p2p(chain, awgn: AwgnParams, trials: int, seed: int,
                 keep_log: bool = False) -> P2PStats:
    """Dithered transmission + list decoding over AWGN, Monte Carlo.

    ``chain`` is a 3-lattice LatticeChain (coarse, list, fine). Per trial
    the membership event (t not in L) is cross-checked against the direct
    effective-noise event (Z' not in V_s); a mismatch is a bug and raises.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    coarse, mid, fine = chain[0], chain[1], chain[2]
    decoder = NestedListDecoder(coarse, mid, fine)
    codebook = enumerate_codebook(coarse, fine)
    errors = 0
    size_total = 0
    log = []
    for trial in range(trials):
        rng = trial_rng(seed, trial)
        w = int(rng.integers(0, len(codebook)))
        t = codebook[w].t
        U = coarse.sample_voronoi(rng)
        Z = rng.normal(0.0, math.sqrt(awgn.N), size=coarse.n)
        X = encode_dithered(t, U, coarse)
        Y = X + Z
        y_prime = receiver_front_end(Y, U, awgn.P, awgn.N, coarse)
        result = decoder.decode(y_prime, truth=t)
        z_eff = effective_noise(X, Z, awgn.P, awgn.N, coarse)
        z_outside = not np.allclose(mid.nearest(z_eff), 0.0, atol=TOL)
        miss = not result.contains_truth
        if miss != z_outside:
            raise AssertionError(
                "error-event identity violated: (t not in L) != (Z' not in V_s)")
        errors += miss
        size_total += result.size
        if keep_log:
            log.append((trial, w + 1, result.size, int(miss)))
    pe = errors / trials
    ci = 1.96 * math.sqrt(max(pe * (1 - pe), 1e-300) / trials)
    return P2PStats(trials=trials, pe_hat=pe, pe_ci95=ci,
                    list_size=decoder.list_size,
                    mean_list_size=size_total / trials,
                    n=coarse.n, p=getattr(coarse, "p", 0),
                    ranks=tuple(getattr(lat, "k", -1) for lat in (coarse, mid, fine)),
                    P=awgn.P, N=awgn.N, seed=seed, log=log)
