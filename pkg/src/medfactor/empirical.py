"""Empirical local law M_nu(x, p), distribution A_nu(x, t) and tail counts.

Middle primes up to ``p_cut`` are counted exactly in a dense array indexed by
p.  Larger middle primes are binned by beta_p = log log p / log log x into
buckets of width ``delta_beta``; their mass is attributed to the bucket
midpoint when the distribution function is evaluated.
"""

from __future__ import annotations

import csv
import json
import math
import multiprocessing as mp
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, SchemaError, UsageError
from .sieve import (
    DEFAULT_SEGMENT_SIZE,
    WORD_LIMIT,
    SegmentPlan,
    check_nu,
    primes_up_to,
    sieve_segment,
)
from .theory import q_fn

COUNTS_SCHEMA_VERSION = 1
DEFAULT_P_CUT = 1 << 20
DEFAULT_DELTA_BETA = 0.005


@dataclass
class LocalLawCounts:
    x: int
    nu: str
    p_cut: int
    delta_beta: float
    exact: np.ndarray  # exact[p] = M_nu(x, p), length p_cut + 1
    buckets: np.ndarray  # buckets[i] counts middle primes p > p_cut with beta_p in [i, i+1) * delta_beta
    ranges: tuple[tuple[int, int], ...] = ()  # half-open n-ranges already counted
    _cdf_cache: tuple | None = field(default=None, repr=False, compare=False)

    @property
    def total(self) -> int:
        return int(self.exact.sum() + self.buckets.sum())

    @property
    def config(self) -> tuple:
        return (self.x, self.nu, self.p_cut, self.delta_beta)

    @property
    def complete(self) -> bool:
        return _merge_ranges(self.ranges) == ((2, self.x + 1),)

    @property
    def exact_counts(self) -> dict[int, int]:
        nz = np.flatnonzero(self.exact)
        return dict(zip(nz.tolist(), self.exact[nz].tolist()))

    @property
    def L2(self) -> float:
        return math.log(math.log(self.x))

    def bucket_midpoints(self) -> np.ndarray:
        return (np.arange(self.buckets.size) + 0.5) * self.delta_beta

    def payload(self) -> dict:
        """Everything except provenance; byte-stable for identical inputs."""
        return {
            "schema_version": COUNTS_SCHEMA_VERSION,
            "x": self.x,
            "nu": self.nu,
            "p_cut": self.p_cut,
            "delta_beta": self.delta_beta,
            "exact_counts": [[p, c] for p, c in self.exact_counts.items()],
            "bucket_counts": self.buckets.tolist(),
            "total": self.total,
            "ranges": [list(r) for r in _merge_ranges(self.ranges)],
        }


def n_buckets(delta_beta: float) -> int:
    return int(math.ceil(1.0 / delta_beta - 1e-9))


def empty_counts(x: int, nu: str, p_cut: int = DEFAULT_P_CUT, delta_beta: float = DEFAULT_DELTA_BETA) -> LocalLawCounts:
    _check_config(x, nu, p_cut, delta_beta)
    return LocalLawCounts(
        x, nu, p_cut, delta_beta,
        np.zeros(p_cut + 1, dtype=np.int64),
        np.zeros(n_buckets(delta_beta), dtype=np.int64),
    )


def _check_config(x, nu, p_cut, delta_beta):
    check_nu(nu)
    if x < 2:
        raise DomainError(f"x must be >= 2, got {x}")
    if x > WORD_LIMIT:
        raise DomainError("x exceeds 2^63 - 1")
    if p_cut < 2:
        raise DomainError("p_cut must be >= 2")
    if not 0 < delta_beta <= 0.01:
        raise DomainError("delta_beta must lie in (0, 0.01]")


def _merge_ranges(ranges: Iterable[tuple[int, int]]) -> tuple[tuple[int, int], ...]:
    out: list[list[int]] = []
    for a, b in sorted(ranges):
        if out and a <= out[-1][1]:
            out[-1][1] = max(out[-1][1], b)
        else:
            out.append([a, b])
    return tuple((a, b) for a, b in out)


def _overlaps(r1, r2) -> bool:
    return any(a < d and c < b for a, b in r1 for c, d in r2)


def merge(a: LocalLawCounts, b: LocalLawCounts) -> LocalLawCounts:
    """Pointwise sum of two shards of one configuration over disjoint n-ranges."""
    if a.config != b.config:
        raise UsageError(f"cannot merge configurations {a.config} and {b.config}")
    if _overlaps(a.ranges, b.ranges):
        raise UsageError("shards cover overlapping n-ranges")
    return LocalLawCounts(
        a.x, a.nu, a.p_cut, a.delta_beta,
        a.exact + b.exact, a.buckets + b.buckets,
        _merge_ranges(a.ranges + b.ranges),
    )


# --------------------------------------------------------------------------
# accumulation
# --------------------------------------------------------------------------

def _bucket_index(mid: np.ndarray, L2: float, delta_beta: float, nb: int) -> np.ndarray:
    beta = np.log(np.log(mid.astype(np.float64))) / L2
    return np.clip(np.floor(beta / delta_beta).astype(np.int64), 0, nb - 1)


def _count_segments(args) -> dict[str, tuple[np.ndarray, np.ndarray]]:
    bounds, base_primes, x, nus, p_cut, delta_beta = args
    L2 = math.log(math.log(x))
    nb = n_buckets(delta_beta)
    out = {nu: (np.zeros(p_cut + 1, dtype=np.int64), np.zeros(nb, dtype=np.int64)) for nu in nus}
    for a, b in bounds:
        seg = sieve_segment(a, b, base_primes)
        for nu in nus:
            mid = seg.middle_primes(nu)
            exact, buckets = out[nu]
            small = mid <= p_cut
            exact += np.bincount(mid[small], minlength=p_cut + 1)
            big = mid[~small]
            if big.size:
                buckets += np.bincount(_bucket_index(big, L2, delta_beta, nb), minlength=nb)
    return out


def _chunk(seq: Sequence, parts: int) -> list[list]:
    parts = max(1, min(parts, len(seq)))
    size = -(-len(seq) // parts)
    return [list(seq[i:i + size]) for i in range(0, len(seq), size)]


def accumulate_range(
    lo: int,
    hi: int,
    x: int,
    nus: Sequence[str] = ("omega", "Omega"),
    p_cut: int = DEFAULT_P_CUT,
    delta_beta: float = DEFAULT_DELTA_BETA,
    segment_size: int = DEFAULT_SEGMENT_SIZE,
    workers: int = 1,
) -> dict[str, LocalLawCounts]:
    """Counts over n in [lo, hi) for several nu at once (one sieve pass).

    Shards of a run over [2, x] must all use the same x so that bucket
    boundaries agree.
    """
    for nu in nus:
        _check_config(x, nu, p_cut, delta_beta)
    if not 2 <= lo < hi <= x + 1:
        raise DomainError(f"shard [{lo}, {hi}) must lie inside [2, {x + 1})")
    plan = SegmentPlan(lo, hi, segment_size)
    bounds = list(plan.segments())
    jobs = [(chunk, plan.base_primes, x, tuple(nus), p_cut, delta_beta) for chunk in _chunk(bounds, workers)]
    if workers <= 1:
        partials = [_count_segments(j) for j in jobs]
    else:
        ctx = mp.get_context("fork")
        with ProcessPoolExecutor(max_workers=workers, mp_context=ctx) as pool:
            partials = list(pool.map(_count_segments, jobs))
    result = {}
    for nu in nus:
        c = empty_counts(x, nu, p_cut, delta_beta)
        # partials come back in submission order; integer sums are order-free anyway
        for part in partials:
            c.exact += part[nu][0]
            c.buckets += part[nu][1]
        c.ranges = ((lo, hi),)
        result[nu] = c
    return result


def accumulate(
    x: int,
    nu: str,
    p_cut: int = DEFAULT_P_CUT,
    delta_beta: float = DEFAULT_DELTA_BETA,
    segment_size: int = DEFAULT_SEGMENT_SIZE,
    workers: int = 1,
) -> LocalLawCounts:
    """Empirical local law M_nu(x, p) over 2 <= n <= x."""
    check_nu(nu)
    _check_config(x, nu, p_cut, delta_beta)
    return accumulate_range(2, x + 1, x, (nu,), p_cut, delta_beta, segment_size, workers)[nu]


def accumulate_both(x: int, **kwargs) -> dict[str, LocalLawCounts]:
    return accumulate_range(2, x + 1, x, ("omega", "Omega"), **kwargs)


# --------------------------------------------------------------------------
# distribution function
# --------------------------------------------------------------------------

def _cdf_tables(c: LocalLawCounts):
    if c._cdf_cache is None:
        primes = np.flatnonzero(c.exact)
        keys = np.concatenate((np.log(np.log(primes.astype(np.float64))), c.bucket_midpoints() * c.L2))
        weights = np.concatenate((c.exact[primes], c.buckets))
        order = np.argsort(keys, kind="stable")
        c._cdf_cache = (keys[order], np.concatenate(([0], np.cumsum(weights[order]))))
    return c._cdf_cache


def empirical_cdf_grid(c: LocalLawCounts, t_grid) -> np.ndarray:
    """A_nu(x, t) = (1/floor(x)) #{n <= x : log log p_m(n) < L2/2 + t sqrt(L2)}."""
    keys, cum = _cdf_tables(c)
    t = np.asarray(t_grid, dtype=np.float64)
    lam = 0.5 * c.L2 + t * math.sqrt(c.L2)
    idx = np.searchsorted(keys, lam, side="left")
    return cum[idx] / float(c.x)


def empirical_cdf(c: LocalLawCounts, t: float) -> float:
    return float(empirical_cdf_grid(c, [t])[0])


# --------------------------------------------------------------------------
# Hall-Tenenbaum tail counts
# --------------------------------------------------------------------------

def prime_harmonic(E: tuple[int, int], x: int) -> float:
    """E(x) = sum of 1/p over primes p <= x in E = [p1, p2]."""
    lo, hi = E
    if lo > hi:
        raise DomainError(f"empty interval {E}")
    primes = primes_up_to(min(hi, x))
    primes = primes[primes >= lo]
    if primes.size == 0:
        raise DomainError(f"no primes of {E} below {x}")
    return math.fsum((1.0 / primes.astype(np.float64)).tolist())


@dataclass(frozen=True)
class TailCountReport:
    x: int
    nu: str
    E: tuple[int, int]
    E_of_x: float
    side: str
    factor: float
    count: int
    bound: float
    hypotheses_hold: bool  # factor b < smallest prime of E, as the lemma requires

    @property
    def ratio(self) -> float:
        return self.count / self.bound

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        d["E"] = list(self.E)
        d["ratio"] = self.ratio
        return d


def tail_count(
    x: int,
    nu: str,
    E: tuple[int, int],
    side: str,
    factor: float,
    segment_size: int = DEFAULT_SEGMENT_SIZE,
) -> TailCountReport:
    """Count n <= x with nu(n, E) <= a E(x) (side 'below') or >= b E(x) (side 'above')."""
    check_nu(nu)
    if side == "below":
        if not 0 < factor < 1:
            raise DomainError(f"below-side factor must lie in (0, 1), got {factor}")
    elif side == "above":
        if not factor > 1:
            raise DomainError(f"above-side factor must exceed 1, got {factor}")
    else:
        raise ValueError(f"side must be 'below' or 'above', got {side!r}")
    Ex = prime_harmonic(E, x)
    primes = primes_up_to(min(E[1], x))
    p0 = int(primes[primes >= E[0]][0])
    threshold = factor * Ex
    count = 0
    plan = SegmentPlan(2, x + 1, segment_size)
    for a, b in plan.segments():
        seg = sieve_segment(a, b, plan.base_primes)
        k = seg.restricted_count(nu, E[0], E[1])
        count += int(np.count_nonzero(k <= threshold if side == "below" else k >= threshold))
    if side == "below":
        # n = 1 has nu(1, E) = 0 and belongs to the count
        count += 1
    bound = x * math.exp(-Ex * q_fn(factor))
    return TailCountReport(x, nu, (int(E[0]), int(E[1])), Ex, side, float(factor), count, bound,
                           side == "below" or factor < p0)


# --------------------------------------------------------------------------
# persistence
# --------------------------------------------------------------------------

def counts_to_json(c: LocalLawCounts, manifest: dict | None = None) -> str:
    doc = c.payload()
    doc["manifest"] = manifest or {}
    return json.dumps(doc, indent=None, separators=(",", ":")) + "\n"


def counts_from_dict(doc: dict) -> LocalLawCounts:
    found = doc.get("schema_version")
    if found != COUNTS_SCHEMA_VERSION:
        raise SchemaError(f"counts schema version: expected {COUNTS_SCHEMA_VERSION}, found {found}")
    c = empty_counts(int(doc["x"]), doc["nu"], int(doc["p_cut"]), float(doc["delta_beta"]))
    for p, k in doc["exact_counts"]:
        c.exact[p] = k
    c.buckets[:] = doc["bucket_counts"]
    c.ranges = tuple(tuple(r) for r in doc.get("ranges", [[2, c.x + 1]]))
    if c.total != doc["total"]:
        raise SchemaError(f"counts file total {doc['total']} disagrees with its counts ({c.total})")
    return c


def counts_from_json(text: str) -> LocalLawCounts:
    return counts_from_dict(json.loads(text))


def write_counts_csv(c: LocalLawCounts, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["p", "count"])
    for p, k in c.exact_counts.items():
        w.writerow([p, k])


def write_cdf_csv(c: LocalLawCounts, t_grid, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["t", "A"])
    for t, a in zip(np.asarray(t_grid, dtype=float), empirical_cdf_grid(c, t_grid)):
        w.writerow([f"{t:.12g}", f"{a:.12g}"])
