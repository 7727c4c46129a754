"""Nested lattice chains and list-lattice sizing.

A chain is a family of Construction-A lattices sharing (p, n, gamma) whose
code generators are prefix-nested: the rank-k member uses the first k rows
of a common row matrix, so nesting holds by construction and every
pairwise coding rate is an exact multiple of log2(p)/n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import gf
from .errors import Infeasible, InvalidRanks
from .lattice import ConstructionALattice, is_sublattice


def shortest_vector_norm(p: int, rows: np.ndarray) -> tuple[float, int]:
    """Shortest nonzero vector of the unit-scale lattice and its multiplicity.

    The shortest vector either comes from p*Z^n (norm p) or from a nonzero
    codeword's centered lift into (-p/2, p/2]^n.
    """
    rows = np.atleast_2d(np.asarray(rows, dtype=np.int64))
    n = rows.shape[1]
    cw = gf.all_codewords(rows, p)
    centered = cw - p * np.round(cw / p)
    norms = np.linalg.norm(centered, axis=1)
    norms = norms[norms > 1e-12]
    if norms.size == 0:
        return float(p), 2 * n
    best = float(norms.min())
    mult = int(np.sum(norms <= best + 1e-12))
    if best > p:
        return float(p), 2 * n
    return best, mult


def pick_generator_rows(p: int, n: int, kmax: int, seed: int = 0,
                        candidates: int = 200) -> np.ndarray:
    """Greedy seeded search for prefix-nested rows with good packing.

    Rank by rank, the next row is the sampled candidate (independent of the
    rows so far) that maximizes the shortest-vector norm of the enlarged
    code, breaking ties toward fewer minimal vectors. A single fixed draw
    per seed is used throughout the toolkit.
    """
    gf.check_prime(p)
    if not 0 <= kmax <= n:
        raise InvalidRanks(f"kmax = {kmax} outside [0, {n}]")
    rng = np.random.default_rng(seed)
    rows = np.zeros((0, n), dtype=np.int64)
    for _ in range(kmax):
        best_row, best_score = None, None
        for _ in range(candidates):
            cand = rng.integers(0, p, size=n, dtype=np.int64)
            trial = np.vstack([rows, cand[None, :]])
            if gf.rank(trial, p) != trial.shape[0]:
                continue
            norm, mult = shortest_vector_norm(p, trial)
            score = (norm, -mult)
            if best_score is None or score > best_score:
                best_score, best_row = score, cand
        if best_row is None:
            raise InvalidRanks("could not extend rows to requested rank")
        rows = np.vstack([rows, best_row[None, :]])
    return rows


@dataclass(frozen=True)
class LatticeChain:
    """Ordered nested lattices Lambda_1 subseteq ... subseteq Lambda_K."""

    p: int
    n: int
    gamma: float
    ranks: tuple[int, ...]
    rows: np.ndarray
    lattices: tuple[ConstructionALattice, ...] = field(repr=False)

    def __len__(self) -> int:
        return len(self.ranks)

    def __getitem__(self, i: int) -> ConstructionALattice:
        return self.lattices[i]

    def volume(self, i: int) -> float:
        return self.lattices[i].volume

    def rate(self, i: int, j: int) -> float:
        """Coding rate of the (Lambda_i, Lambda_j) pair in bits/dimension."""
        if not 0 <= i <= j < len(self.ranks):
            raise InvalidRanks(f"bad pair ({i}, {j})")
        return (self.ranks[j] - self.ranks[i]) * math.log2(self.p) / self.n

    def to_record(self) -> str:
        ranks = ",".join(str(k) for k in self.ranks)
        rows = ";".join(",".join(str(int(v)) for v in r) for r in self.rows)
        rows_part = f" rows={rows}" if self.rows.size else ""
        return (f"p={self.p} n={self.n} ranks={ranks}{rows_part} "
                f"gamma={self.gamma!r}")

    @classmethod
    def from_record(cls, record: str) -> "LatticeChain":
        fields = dict(tok.split("=", 1) for tok in record.split())
        p = int(fields["p"])
        n = int(fields["n"])
        ranks = [int(v) for v in fields["ranks"].split(",")]
        rows_txt = fields.get("rows", "")
        if rows_txt:
            rows = np.array([[int(v) for v in r.split(",")]
                             for r in rows_txt.split(";")], dtype=np.int64)
        else:
            rows = np.zeros((0, n), dtype=np.int64)
        return build_chain(p, n, ranks, float(fields["gamma"]), rows=rows)


def build_chain(p: int, n: int, ranks, gamma: float = 1.0,
                rows: np.ndarray = None, seed: int = 0) -> LatticeChain:
    """Build a prefix-nested chain with the given per-lattice code ranks.

    V_i = gamma^n p^(n - k_i) exactly; the achievable pairwise rates are
    quantized to multiples of log2(p)/n. If ``rows`` is omitted a seeded
    greedy search picks them.
    """
    gf.check_prime(p)
    ranks = tuple(int(k) for k in ranks)
    if any(not 0 <= k <= n for k in ranks) or list(ranks) != sorted(ranks):
        raise InvalidRanks(f"ranks must be nondecreasing in [0, {n}]: {ranks}")
    kmax = max(ranks) if ranks else 0
    if rows is None:
        rows = pick_generator_rows(p, n, kmax, seed=seed)
    rows = np.atleast_2d(np.asarray(rows, dtype=np.int64)) % p
    if rows.size == 0:
        rows = np.zeros((0, n), dtype=np.int64)
    if rows.shape[0] < kmax:
        raise InvalidRanks(f"need at least {kmax} rows, got {rows.shape[0]}")
    master = ConstructionALattice(p, rows, gamma=gamma, n=n)
    lattices = tuple(master.with_rank(k) for k in ranks)
    for a, b in zip(lattices, lattices[1:]):
        assert is_sublattice(a, b)
    return LatticeChain(p=p, n=n, gamma=float(gamma), ranks=ranks,
                        rows=master.rows, lattices=lattices)


def required_list_volume(V: float, P: float, N: float, n: int) -> float:
    """Minimum V_s for vanishing list-decode error: (N/(P+N))^(n/2) * V."""
    return (N / (P + N)) ** (n / 2.0) * V


def size_list_lattice(coarse: ConstructionALattice, fine: ConstructionALattice,
                      P: float, N: float, margin: float = 0.0
                      ) -> ConstructionALattice:
    """Intermediate list-decoding lattice for the nested pair (coarse, fine).

    Picks the largest rank k_s (smallest volume V_s) with
    V_s >= (1 + margin) * (N/(P+N))^(n/2) * V, clamped so that
    Lambda subseteq Lambda_s subseteq Lambda_c. Expected list size V_s/Vc.
    """
    if P <= 0 or N <= 0:
        raise ValueError("P and N must be positive")
    if coarse.p != fine.p or abs(coarse.gamma - fine.gamma) > 1e-12 * coarse.gamma:
        raise InvalidRanks("pair must share p and gamma")
    if not np.array_equal(coarse.rows, fine.rows[:coarse.k]):
        raise InvalidRanks("pair rows must be prefix-nested")
    n = coarse.n
    target = (1.0 + margin) * required_list_volume(coarse.volume, P, N, n)
    k_s = None
    for k in range(fine.k, coarse.k - 1, -1):
        v = coarse.gamma ** n * float(coarse.p) ** (n - k)
        if v >= target - 1e-12 * target:
            k_s = k
            break
    if k_s is None:
        raise Infeasible(
            f"no rank in [{coarse.k}, {fine.k}] reaches V_s >= {target:g}; "
            "rebuild with larger p or different ranks")
    return fine.with_rank(k_s)
