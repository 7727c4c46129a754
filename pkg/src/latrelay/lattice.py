"""Exact small-dimension lattice arithmetic.

Lattices are realized either by an explicit generator matrix or by
Construction A over a prime field: the points of a Construction-A lattice
are ``gamma * {x in Z^n : x mod p is a codeword}`` for a linear code with
generator ``rows`` over GF(p). All quantization and enumeration is exact at
the dimensions used here (n <= 8 or so); there is no approximate CVP.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from sympy import Matrix
from sympy.matrices.normalforms import hermite_normal_form

from . import gf
from .errors import (
    DimensionMismatch,
    EnumerationBudgetExceeded,
    NotNested,
    RejectionBudgetExceeded,
)

# Absolute tolerance for exact lattice identities in double precision.
TOL = 1e-9

# Cap on the number of candidate points any exact enumeration may touch.
DEFAULT_ENUM_BUDGET = 2_000_000


def _round_ties_down(y: np.ndarray) -> np.ndarray:
    """Nearest integer, exact halves toward -inf (lexicographic tie rule)."""
    return np.ceil(y - 0.5)


def _lex_smallest(points: np.ndarray) -> np.ndarray:
    """Lexicographically smallest row of ``points`` (m x n)."""
    order = np.lexsort(points[:, ::-1].T)
    return points[order[0]]


class Lattice:
    """A full-rank lattice ``{gamma * G m : m in Z^n}``.

    ``generator`` holds the basis vectors as columns. Instances are
    immutable after construction and safe to share across workers.
    """

    def __init__(self, generator: np.ndarray, gamma: float = 1.0,
                 enum_budget: int = DEFAULT_ENUM_BUDGET):
        G = np.array(generator, dtype=float)
        if G.ndim != 2 or G.shape[0] != G.shape[1]:
            raise DimensionMismatch("generator must be square")
        det = np.linalg.det(G)
        if abs(det) <= 0.0:
            raise ValueError("generator must be full rank")
        if gamma <= 0:
            raise ValueError("gamma must be positive")
        self.generator = G
        self.gamma = float(gamma)
        self.n = G.shape[0]
        self.enum_budget = int(enum_budget)
        self._ginv = np.linalg.inv(G)
        self._ginv_row_norms = np.linalg.norm(self._ginv, axis=1)

    @property
    def volume(self) -> float:
        return self.gamma ** self.n * abs(np.linalg.det(self.generator))

    def _check_dim(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n,):
            raise DimensionMismatch(
                f"expected vector of length {self.n}, got shape {x.shape}")
        return x

    def nearest(self, x: np.ndarray) -> np.ndarray:
        """Exact nearest lattice point, ties broken lexicographically.

        Babai rounding gives a distance bound, which bounds how far the
        true coefficient vector can be from the real solution; the induced
        coefficient box is enumerated exactly.
        """
        x = self._check_dim(x)
        y = x / self.gamma
        c = self._ginv @ y
        c0 = _round_ties_down(c)
        d0 = np.linalg.norm(y - self.generator @ c0)
        if d0 < TOL:
            return self.gamma * (self.generator @ c0)
        widths = np.ceil(self._ginv_row_norms * d0 + 1e-12).astype(int)
        total = np.prod(2 * widths + 1.0)
        if total > self.enum_budget:
            raise EnumerationBudgetExceeded(
                f"{total:.3g} candidates exceed budget {self.enum_budget}")
        axes = [np.arange(int(np.floor(ci - w)), int(np.ceil(ci + w)) + 1)
                for ci, w in zip(c, widths)]
        grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, self.n)
        pts = grid @ self.generator.T
        d = np.linalg.norm(pts - y, axis=1)
        dmin = d.min()
        best = pts[d <= dmin + 1e-12]
        return self.gamma * _lex_smallest(best)

    def mod(self, x: np.ndarray) -> np.ndarray:
        """``x mod Lambda``: subtract the nearest lattice point."""
        x = self._check_dim(x)
        return x - self.nearest(x)

    def nearest_many(self, X: np.ndarray) -> np.ndarray:
        """Row-wise nearest points for a batch (m x n). Ties by argmin."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return np.array([self.nearest(x) for x in X])

    def mod_many(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return X - self.nearest_many(X)

    def contains(self, x: np.ndarray, tol: float = TOL) -> bool:
        x = self._check_dim(x)
        m = self._ginv @ (x / self.gamma)
        return bool(np.all(np.abs(m - np.round(m)) <= tol))

    def voronoi_box_halfwidth(self) -> float:
        """Half-width of an axis-aligned box guaranteed to contain the cell.

        The Voronoi cell sits inside the ball of the covering radius, which
        is at most half the sum of basis vector norms.
        """
        return 0.5 * self.gamma * float(
            np.sum(np.linalg.norm(self.generator, axis=0)))

    def sample_voronoi(self, rng: np.random.Generator,
                       max_attempts: int = 200_000) -> np.ndarray:
        """Uniform sample from the Voronoi cell by box rejection."""
        h = self.voronoi_box_halfwidth()
        for _ in range(max_attempts):
            u = rng.uniform(-h, h, size=self.n)
            if np.allclose(self.nearest(u), 0.0, atol=TOL):
                return u
        raise RejectionBudgetExceeded(
            f"no accept in {max_attempts} attempts (halfwidth {h:g})")

    def second_moment_exact(self) -> Optional[float]:
        """Exact per-dimension second moment when the cell is a cube."""
        G = self.generator
        if np.allclose(G, np.diag(np.diag(G))) and np.ptp(np.diag(G)) < TOL:
            side = self.gamma * abs(G[0, 0])
            return side ** 2 / 12.0
        return None

    def scaled(self, factor: float) -> "Lattice":
        """The lattice ``factor * Lambda``."""
        return Lattice(self.generator, self.gamma * factor, self.enum_budget)

    def __repr__(self) -> str:
        return f"Lattice(n={self.n}, gamma={self.gamma!r})"


def integer_lattice(n: int, gamma: float = 1.0) -> "ConstructionALattice":
    """The scaled integer lattice ``gamma * Z^n`` (Construction A, k = n)."""
    return ConstructionALattice(2, np.eye(n, dtype=np.int64), gamma=gamma)


class ConstructionALattice(Lattice):
    """Construction-A lattice: scaled lift of a linear code over GF(p).

    ``rows`` is the k x n code generator (entries mod p, rows linearly
    independent over GF(p)); k = 0 gives ``gamma * p Z^n`` and k = n gives
    ``gamma * Z^n``. Volume is exactly ``gamma^n p^(n-k)``.
    """

    def __init__(self, p: int, rows: np.ndarray, gamma: float = 1.0, n: int = None,
                 enum_budget: int = DEFAULT_ENUM_BUDGET):
        gf.check_prime(p)
        rows = np.atleast_2d(np.asarray(rows, dtype=np.int64)) % p
        if rows.size == 0:
            if n is None:
                raise ValueError("n required when rows is empty")
            rows = np.zeros((0, n), dtype=np.int64)
        k, dim = rows.shape
        if n is not None and n != dim:
            raise DimensionMismatch(f"rows have {dim} columns, expected n={n}")
        if k and gf.rank(rows, p) != k:
            raise ValueError("code generator rows are linearly dependent mod p")
        self.p = int(p)
        self.k = k
        self.rows = rows
        self.rows.setflags(write=False)
        gen = self._hnf_basis(p, rows, dim)
        super().__init__(gen, gamma=gamma, enum_budget=enum_budget)
        self._codewords: Optional[np.ndarray] = None

    @staticmethod
    def _hnf_basis(p: int, rows: np.ndarray, n: int) -> np.ndarray:
        cols = np.hstack([rows.T, p * np.eye(n, dtype=np.int64)])
        H = hermite_normal_form(Matrix(cols.tolist()))
        return np.array(H.tolist(), dtype=float)

    @property
    def volume(self) -> float:
        return self.gamma ** self.n * float(self.p) ** (self.n - self.k)

    def codewords(self) -> np.ndarray:
        """All p^k codewords of the underlying code (cached)."""
        if self._codewords is None:
            count = self.p ** self.k
            if count > self.enum_budget:
                raise EnumerationBudgetExceeded(
                    f"p^k = {count} cosets exceed budget {self.enum_budget}")
            cw = gf.all_codewords(self.rows, self.p)
            cw.setflags(write=False)
            self._codewords = cw
        return self._codewords

    def nearest(self, x: np.ndarray) -> np.ndarray:
        """Exact nearest point: per-coset rounding over all p^k cosets."""
        x = self._check_dim(x)
        y = x / self.gamma
        if self.k == 0:
            return self.gamma * self.p * _round_ties_down(y / self.p)
        if self.k == self.n:
            return self.gamma * _round_ties_down(y)
        cw = self.codewords()
        z = _round_ties_down((y[None, :] - cw) / self.p)
        pts = cw + self.p * z
        d = np.linalg.norm(pts - y[None, :], axis=1)
        dmin = d.min()
        best = pts[d <= dmin + 1e-12]
        return self.gamma * _lex_smallest(best)

    def nearest_many(self, X: np.ndarray) -> np.ndarray:
        """Vectorized per-coset rounding, chunked to bound memory."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        Y = X / self.gamma
        if self.k == 0:
            return self.gamma * self.p * _round_ties_down(Y / self.p)
        if self.k == self.n:
            return self.gamma * _round_ties_down(Y)
        cw = self.codewords()
        chunk = max(1, 4_000_000 // (cw.shape[0] * self.n))
        out = np.empty_like(Y)
        for lo in range(0, Y.shape[0], chunk):
            yc = Y[lo:lo + chunk]
            z = _round_ties_down((yc[:, None, :] - cw[None, :, :]) / self.p)
            pts = cw[None, :, :] + self.p * z
            d = np.sum((pts - yc[:, None, :]) ** 2, axis=2)
            idx = np.argmin(d, axis=1)
            out[lo:lo + chunk] = pts[np.arange(len(yc)), idx]
        return self.gamma * out

    def contains(self, x: np.ndarray, tol: float = TOL) -> bool:
        x = self._check_dim(x)
        y = x / self.gamma
        yi = np.round(y)
        if not np.all(np.abs(y - yi) <= tol):
            return False
        return gf.in_rowspan(self.rows, yi.astype(np.int64) % self.p, self.p)

    def voronoi_box_halfwidth(self) -> float:
        # gamma*p*Z^n is a sublattice, so the cell sits inside its cube cell.
        return 0.5 * self.gamma * self.p

    def second_moment_exact(self) -> Optional[float]:
        if self.k == 0:
            return (self.gamma * self.p) ** 2 / 12.0
        if self.k == self.n:
            return self.gamma ** 2 / 12.0
        return None

    def scaled(self, factor: float) -> "ConstructionALattice":
        return ConstructionALattice(self.p, self.rows, gamma=self.gamma * factor,
                                    n=self.n, enum_budget=self.enum_budget)

    def with_rank(self, k: int) -> "ConstructionALattice":
        """Sibling lattice built from the first ``k`` generator rows."""
        if not 0 <= k <= min(self.k, self.n):
            raise ValueError(f"rank {k} outside [0, {self.k}]")
        return ConstructionALattice(self.p, self.rows[:k], gamma=self.gamma,
                                    n=self.n, enum_budget=self.enum_budget)

    def to_record(self) -> str:
        """Serialize to the flat text record {p, n, k, rows, gamma}."""
        rows = ";".join(",".join(str(int(v)) for v in r) for r in self.rows)
        return f"p={self.p} n={self.n} k={self.k} rows={rows} gamma={self.gamma!r}"

    @classmethod
    def from_record(cls, record: str) -> "ConstructionALattice":
        fields = dict(tok.split("=", 1) for tok in record.split())
        p = int(fields["p"])
        n = int(fields["n"])
        k = int(fields["k"])
        rows_txt = fields.get("rows", "")
        if rows_txt:
            rows = np.array([[int(v) for v in r.split(",")]
                             for r in rows_txt.split(";")], dtype=np.int64)
        else:
            rows = np.zeros((0, n), dtype=np.int64)
        if rows.shape != (k, n):
            raise ValueError(f"rows shape {rows.shape} does not match k={k}, n={n}")
        return cls(p, rows, gamma=float(fields["gamma"]), n=n)

    def __repr__(self) -> str:
        return (f"ConstructionALattice(p={self.p}, n={self.n}, k={self.k}, "
                f"gamma={self.gamma!r})")


@dataclass(frozen=True)
class CodebookEntry:
    """Message index (1-based) and its codeword point."""
    w: int
    t: np.ndarray


def nearest_point(lattice: Lattice, x: np.ndarray) -> np.ndarray:
    return lattice.nearest(x)


def mod_lattice(lattice: Lattice, x: np.ndarray) -> np.ndarray:
    return lattice.mod(x)


def sample_uniform_voronoi(lattice: Lattice, rng: np.random.Generator) -> np.ndarray:
    return lattice.sample_voronoi(rng)


def second_moment(lattice: Lattice, samples: int, seed: int) -> float:
    """Monte Carlo estimate of the per-dimension second moment of the cell."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    total = 0.0
    for _ in range(samples):
        u = lattice.sample_voronoi(rng)
        total += float(u @ u)
    return total / (samples * lattice.n)


def is_sublattice(coarse: Lattice, fine: Lattice, tol: float = TOL) -> bool:
    """True iff every point of ``coarse`` is a point of ``fine``.

    Checked exactly by membership of each coarse basis vector in ``fine``.
    """
    if coarse.n != fine.n:
        raise DimensionMismatch(f"dimensions differ: {coarse.n} vs {fine.n}")
    basis = coarse.gamma * coarse.generator
    return all(fine.contains(basis[:, i], tol=tol) for i in range(coarse.n))


def _codebook_construction_a(coarse: ConstructionALattice,
                             fine: ConstructionALattice) -> list[np.ndarray]:
    reps = gf.quotient_coset_reps(coarse.rows, fine.rows, coarse.p)
    return [coarse.mod(coarse.gamma * rep.astype(float)) for rep in reps]


def _codebook_generic(coarse: Lattice, fine: Lattice,
                      budget: int) -> list[np.ndarray]:
    h = coarse.voronoi_box_halfwidth()
    ginv = np.linalg.inv(fine.generator)
    widths = np.ceil(np.linalg.norm(ginv, axis=1) * h / fine.gamma + 1e-9).astype(int)
    total = np.prod(2 * widths + 1.0)
    if total > budget:
        raise EnumerationBudgetExceeded(
            f"{total:.3g} candidates exceed budget {budget}")
    axes = [np.arange(-w, w + 1) for w in widths]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, fine.n)
    pts = fine.gamma * (grid @ fine.generator.T)
    out = []
    for pt in pts:
        if np.allclose(coarse.nearest(pt), 0.0, atol=TOL):
            out.append(pt)
    return out


def enumerate_codebook(coarse: Lattice, fine: Lattice,
                       budget: int = DEFAULT_ENUM_BUDGET) -> list[CodebookEntry]:
    """Codebook of the nested pair: fine points inside the coarse cell.

    Entries are sorted lexicographically and indexed 1..V/Vc, fixing the
    message <-> codeword bijection. Cardinality is checked exactly.
    """
    if not is_sublattice(coarse, fine):
        raise NotNested("coarse lattice is not a sublattice of fine lattice")
    expected = int(round(coarse.volume / fine.volume))
    if expected > budget:
        raise EnumerationBudgetExceeded(
            f"codebook size {expected} exceeds budget {budget}")
    same_family = (
        isinstance(coarse, ConstructionALattice)
        and isinstance(fine, ConstructionALattice)
        and coarse.p == fine.p
        and abs(coarse.gamma - fine.gamma) <= TOL * max(1.0, coarse.gamma)
    )
    if same_family:
        points = _codebook_construction_a(coarse, fine)
    else:
        points = _codebook_generic(coarse, fine, budget)
    if len(points) != expected:
        raise NotNested(
            f"enumerated {len(points)} codewords, expected V/Vc = {expected}")
    arr = np.array(points)
    order = np.lexsort(arr[:, ::-1].T)
    return [CodebookEntry(w=i + 1, t=arr[j]) for i, j in enumerate(order)]
