"""Two-way relay channel with direct links: sum decoding at the relay,
uniform binning broadcast, and list-plus-bin resolution at the terminals.

The relay decodes the dithered sum of the two terminals' codewords (a
single lattice point, no individual-message MAC constraint), throws it
uniformly into bins, and broadcasts the bin index with a random Gaussian
codebook. Each terminal list decodes the other terminal's codeword from
its direct observation of the previous block and keeps the unique list
member whose implied sum falls in the decoded bin.

Terminal 2's dither enters with a plus sign (X2 = (t2 + U2) mod Lambda_2)
so the decoded sum is exactly (t1 + t2 - Q2(t2 + U2)) mod Lambda_1 and the
algebraic recovery identities below hold verbatim.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .chain import build_chain, size_list_lattice
from .channel import trial_rng, NestedListDecoder
from .errors import Infeasible, NotNested
from .lattice import (
    ConstructionALattice,
    enumerate_codebook,
    is_sublattice,
    second_moment,
)
from .rates import RatePoint, TwrcParams, capacity_c
from .rates import twrc_region as _twrc_region_rates


def twrc_region(params: TwrcParams) -> RatePoint:
    """Per-user achievable maxima (see rates.twrc_region)."""
    return _twrc_region_rates(params)


def sum_codeword(t1: np.ndarray, t2: np.ndarray, U2: np.ndarray,
                 lam1: ConstructionALattice, lam2: ConstructionALattice
                 ) -> np.ndarray:
    """T = (t1 + t2 - Q2(t2 + U2)) mod Lambda_1."""
    return lam1.mod(t1 + t2 - lam2.nearest(t2 + U2))


def recover_t1_from_sum(T: np.ndarray, t2: np.ndarray, U2: np.ndarray,
                        lam1: ConstructionALattice, lam2: ConstructionALattice
                        ) -> np.ndarray:
    """t1 = (T - t2 + Q2(t2 + U2)) mod Lambda_1, exact algebra."""
    if not is_sublattice(lam1, lam2):
        raise NotNested("Lambda_1 must be a sublattice of Lambda_2")
    return lam1.mod(T - t2 + lam2.nearest(t2 + U2))


def recover_t2_from_sum(T: np.ndarray, t1: np.ndarray,
                        lam1: ConstructionALattice, lam2: ConstructionALattice
                        ) -> np.ndarray:
    """t2 = (T mod Lambda_2 - t1) mod Lambda_2, using the distributive
    mod law for Lambda_1 subseteq Lambda_2."""
    if not is_sublattice(lam1, lam2):
        raise NotNested("Lambda_1 must be a sublattice of Lambda_2")
    return lam2.mod(lam2.mod(T) - t1)


@dataclass(frozen=True)
class TwrcSimParams:
    """Channel parameters plus operating rates for the simulator."""
    channel: TwrcParams
    R1: float
    R2: float
    R: float      # relay broadcast rate (free parameter)
    B: int

    def __post_init__(self):
        if self.R1 < 0 or self.R2 < 0 or self.R < 0:
            raise ValueError("rates must be nonnegative")
        if self.B < 2:
            raise ValueError("need at least 2 blocks")


@dataclass
class TwrcCodebooks:
    """Shared chain, per-terminal codebooks, relay codebook and binning."""
    lam1: ConstructionALattice
    lam2: ConstructionALattice
    lam_c1: ConstructionALattice
    lam_c2: ConstructionALattice
    lam_s1: ConstructionALattice
    lam_s2: ConstructionALattice
    chain_order: tuple[int, ...]          # ranks sorted coarse to fine
    entries1: list
    entries2: list
    sum_entries: list
    relay_codebook: np.ndarray            # (num_bins, n), Gaussian, power PR
    bin_table: np.ndarray                 # sum index -> bin index (1-based)
    power1: float
    power2: float
    rate1_achieved: float
    rate2_achieved: float

    @property
    def num_bins(self) -> int:
        return self.relay_codebook.shape[0]

    def bin_of_sum(self, T: np.ndarray) -> int:
        key = tuple(np.round(T / self.lam1.gamma).astype(int).tolist())
        return int(self.bin_table[self._sum_index[key]])

    def __post_init__(self):
        self._sum_index = {
            tuple(np.round(e.t / self.lam1.gamma).astype(int).tolist()): i
            for i, e in enumerate(self.sum_entries)}


def _rank_for_power(p: int, n: int, P1: float, P2: float) -> int:
    # cubic-cell approximation: second moment scales like V^(2/n)
    return max(0, round(0.5 * n * math.log(P1 / P2, p)))


def build_twrc_codebooks(params: TwrcSimParams, p: int, n: int, seed: int = 0,
                         power_samples: int = 2000,
                         enforce_broadcast_rate: bool = True) -> TwrcCodebooks:
    """Build the nested 6-lattice family and the relay's bin codebook.

    The shaping lattice for terminal 1 is rank 0 (exact power P1); terminal
    2's rank is chosen to approximate P2 on the volume grid and its
    achieved power is measured and used by the MMSE front ends. Lattice
    order in the chain is by volume, coarse to fine.
    """
    ch = params.channel
    gamma = math.sqrt(12.0 * ch.P1) / p
    k1 = 0
    k2 = _rank_for_power(p, n, ch.P1, ch.P2)
    dk1 = round(params.R1 * n / math.log2(p))
    dk2 = round(params.R2 * n / math.log2(p))
    kc1, kc2 = k1 + dk1, k2 + dk2
    kmax = max(kc1, kc2)
    if kmax > n:
        raise Infeasible(f"rates require rank {kmax} > n = {n}")

    base = build_chain(p, n, sorted({k1, k2, kc1, kc2, kmax}), gamma=gamma,
                       seed=seed)
    master = ConstructionALattice(p, base.rows, gamma=gamma, n=n)
    lam1, lam2 = master.with_rank(k1), master.with_rank(k2)
    lam_c1, lam_c2 = master.with_rank(kc1), master.with_rank(kc2)
    lam_s1 = size_list_lattice(lam1, lam_c1, P=ch.P1, N=ch.N2)
    lam_s2 = size_list_lattice(lam2, lam_c2, P=ch.P2, N=ch.N1)

    power1 = lam1.second_moment_exact()
    exact2 = lam2.second_moment_exact()
    power2 = exact2 if exact2 is not None else second_moment(
        lam2, power_samples, seed)

    mi1 = capacity_c(ch.PR / (power1 + ch.N2))
    mi2 = capacity_c(ch.PR / (power2 + ch.N1))
    if enforce_broadcast_rate and params.R < max(mi1, mi2) - 1e-12:
        raise Infeasible(
            f"broadcast rate {params.R:g} below required {max(mi1, mi2):g}")

    fine = master.with_rank(kmax)
    sum_entries = enumerate_codebook(lam1, fine)
    num_bins = max(1, min(round(2.0 ** (n * params.R)), len(sum_entries)))
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed,
                                                       spawn_key=(0xC0DE,)))
    relay_codebook = rng.normal(0.0, math.sqrt(ch.PR), size=(num_bins, n))
    bin_table = rng.integers(1, num_bins + 1, size=len(sum_entries))
    if num_bins == len(sum_entries):
        bin_table = np.arange(1, num_bins + 1)   # degenerate: one sum per bin

    order = tuple(sorted([k1, k2, kc1, kc2, lam_s1.k, lam_s2.k]))
    return TwrcCodebooks(
        lam1=lam1, lam2=lam2, lam_c1=lam_c1, lam_c2=lam_c2,
        lam_s1=lam_s1, lam_s2=lam_s2, chain_order=order,
        entries1=enumerate_codebook(lam1, lam_c1),
        entries2=enumerate_codebook(lam2, lam_c2),
        sum_entries=sum_entries,
        relay_codebook=relay_codebook, bin_table=bin_table,
        power1=power1, power2=power2,
        rate1_achieved=dk1 * math.log2(p) / n,
        rate2_achieved=dk2 * math.log2(p) / n)


def relay_decode_sum(YR: np.ndarray, U1: np.ndarray, U2: np.ndarray,
                     cbs: TwrcCodebooks, NR: float) -> np.ndarray:
    """MMSE-scaled lattice decode of the dithered sum codeword."""
    fine = cbs.lam_c1 if cbs.lam_c1.k >= cbs.lam_c2.k else cbs.lam_c2
    psum = cbs.power1 + cbs.power2
    alpha = psum / (psum + NR)
    y = cbs.lam1.mod(alpha * YR + U1 - U2)
    return cbs.lam1.mod(fine.nearest(y))


@dataclass
class TwrcBlockRecord:
    b: int
    w1: int
    w2: int
    sum_ok: bool
    bin_ok: bool
    list1_size: int
    list2_size: int
    resolve1_ok: bool
    resolve2_ok: bool

    CSV_COLUMNS = ("b", "w1", "w2", "sum_ok", "bin_ok", "list1_size",
                   "list2_size", "resolve1_ok", "resolve2_ok")

    def csv_row(self) -> str:
        return (f"{self.b},{self.w1},{self.w2},{int(self.sum_ok)},"
                f"{int(self.bin_ok)},{self.list1_size},{self.list2_size},"
                f"{int(self.resolve1_ok)},{int(self.resolve2_ok)}")


@dataclass
class TwrcRunResult:
    messages: int
    errors_dir1: int     # terminal 2 failing to recover w1
    errors_dir2: int     # terminal 1 failing to recover w2
    sum_errors: int
    transcript: list[TwrcBlockRecord] = field(repr=False, default_factory=list)

    @property
    def error_rate_dir1(self) -> float:
        return self.errors_dir1 / self.messages

    @property
    def error_rate_dir2(self) -> float:
        return self.errors_dir2 / self.messages


def _min_distance_index(y: np.ndarray, codebook: np.ndarray) -> int:
    return int(np.argmin(np.sum((codebook - y[None, :]) ** 2, axis=1))) + 1


def twrc_round_trip(cbs: TwrcCodebooks, params: TwrcSimParams, seed: int,
                    keep_transcript: bool = True) -> TwrcRunResult:
    """Simulate B message blocks plus one flush block.

    Per direction, the block-(b-1) message is recovered at the end of block
    b; empty or ambiguous bin intersections count as errors.
    """
    ch = params.channel
    lam1, lam2 = cbs.lam1, cbs.lam2
    dec1 = NestedListDecoder(lam1, cbs.lam_s1, cbs.lam_c1)   # decodes t1 at T2
    dec2 = NestedListDecoder(lam2, cbs.lam_s2, cbs.lam_c2)   # decodes t2 at T1
    a1 = cbs.power1 / (cbs.power1 + ch.N2)
    a2 = cbs.power2 / (cbs.power2 + ch.N1)

    rng_msg = trial_rng(seed, 0)
    B = params.B
    w1s = [int(rng_msg.integers(1, len(cbs.entries1) + 1)) for _ in range(B)] + [1]
    w2s = [int(rng_msg.integers(1, len(cbs.entries2) + 1)) for _ in range(B)] + [1]

    relay_s_hat = 1            # relay's bin for the previous block's sum
    pending = None             # block b-1 state needed for resolution at b
    errors1 = errors2 = sum_errors = 0
    transcript: list[TwrcBlockRecord] = []
    prev_obs1 = prev_obs2 = None
    prev_sum_ok = True

    for b in range(1, B + 2):
        rng = trial_rng(seed, b)
        w1, w2 = w1s[b - 1], w2s[b - 1]
        t1 = cbs.entries1[w1 - 1].t
        t2 = cbs.entries2[w2 - 1].t
        U1 = lam1.sample_voronoi(rng)
        U2 = lam2.sample_voronoi(rng)
        X1 = lam1.mod(t1 - U1)
        X2 = lam2.mod(t2 + U2)
        XR = cbs.relay_codebook[relay_s_hat - 1]
        ZR = rng.normal(0.0, math.sqrt(ch.NR), size=lam1.n)
        Z1 = rng.normal(0.0, math.sqrt(ch.N1), size=lam1.n)
        Z2 = rng.normal(0.0, math.sqrt(ch.N2), size=lam1.n)

        # Relay: decode this block's sum, bin it for the next block.
        YR = X1 + X2 + ZR
        T_true = sum_codeword(t1, t2, U2, lam1, lam2)
        T_hat = relay_decode_sum(YR, U1, U2, cbs, ch.NR)
        sum_ok = bool(np.allclose(T_hat, T_true, atol=1e-6))
        sum_errors += not sum_ok
        relay_s_hat = cbs.bin_of_sum(T_hat)

        # Terminals: own transmit signal is dropped by the channel model.
        Y1 = XR + X2 + Z1
        Y2 = XR + X1 + Z2
        s1_hat = _min_distance_index(Y1, cbs.relay_codebook)
        s2_hat = _min_distance_index(Y2, cbs.relay_codebook)
        obs1 = Y1 - cbs.relay_codebook[s1_hat - 1]
        obs2 = Y2 - cbs.relay_codebook[s2_hat - 1]

        bin_ok = True
        resolve1_ok = resolve2_ok = True
        l1size = l2size = 0
        if pending is not None:
            w1p, w2p, t1p, t2p, U1p, U2p = pending

            # Terminal 2 resolves w1(b-1): list decode t1 from the stored
            # direct observation, then intersect with the fresh bin index.
            ylist = lam1.mod(a1 * prev_obs2 + U1p)
            lres1 = dec1.decode(ylist, truth=t1p)
            l1size = lres1.size
            matches = [pt for pt in lres1.points
                       if cbs.bin_of_sum(sum_codeword(pt, t2p, U2p,
                                                      lam1, lam2)) == s2_hat]
            resolve1_ok = (len(matches) == 1
                           and np.allclose(matches[0], t1p, atol=1e-6))
            errors1 += not resolve1_ok

            # Terminal 1 resolves w2(b-1) symmetrically.
            yl2 = lam2.mod(a2 * prev_obs1 - U2p)
            lres2 = dec2.decode(yl2, truth=t2p)
            l2size = lres2.size
            matches2 = [pt for pt in lres2.points
                        if cbs.bin_of_sum(sum_codeword(t1p, pt, U2p,
                                                       lam1, lam2)) == s1_hat]
            resolve2_ok = (len(matches2) == 1
                           and np.allclose(matches2[0], t2p, atol=1e-6))
            errors2 += not resolve2_ok

            prev_bin = cbs.bin_of_sum(sum_codeword(t1p, t2p, U2p, lam1, lam2))
            bin_ok = (s1_hat == prev_bin and s2_hat == prev_bin)
            if keep_transcript:
                transcript.append(TwrcBlockRecord(
                    b=b - 1, w1=w1p, w2=w2p, sum_ok=prev_sum_ok, bin_ok=bin_ok,
                    list1_size=l1size, list2_size=l2size,
                    resolve1_ok=resolve1_ok, resolve2_ok=resolve2_ok))

        pending = (w1, w2, t1, t2, U1, U2)
        prev_obs1, prev_obs2 = obs1, obs2
        prev_sum_ok = sum_ok

    return TwrcRunResult(messages=B, errors_dir1=errors1, errors_dir2=errors2,
                         sum_errors=sum_errors, transcript=transcript)
