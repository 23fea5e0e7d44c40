"""Segmented factorization sieve and middle-prime extraction.

Every integer in a half-open window [lo, hi) is factored by striding the base
primes (all primes up to sqrt(hi - 1)) across the window.  Whatever survives
after stripping the base primes is either 1 or a single prime larger than every
base prime.  Factorizations are kept in a CSR layout per segment: ``offsets``
indexes into flat ``primes``/``mults`` arrays, one ascending run per integer.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterator, Literal

import numpy as np

from .errors import DomainError

Nu = Literal["omega", "Omega"]
NUS: tuple[str, ...] = ("omega", "Omega")

DEFAULT_SEGMENT_SIZE = 1 << 18
WORD_LIMIT = 2**63 - 1

PRIME_CACHE_ENV = "MEDFACTOR_PRIME_CACHE"
PRIME_CACHE_MAGIC = b"MFPRIME1"


def check_nu(nu: str) -> str:
    if nu not in NUS:
        raise ValueError(f"nu must be 'omega' or 'Omega', got {nu!r}")
    return nu


# --------------------------------------------------------------------------
# prime tables
# --------------------------------------------------------------------------

def _eratosthenes(n: int) -> np.ndarray:
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    # odd-only: index i stands for 2i + 1
    size = (n - 1) // 2 + 1
    odd = np.ones(size, dtype=bool)
    odd[0] = False
    for i in range(1, (math.isqrt(n) - 1) // 2 + 1):
        if odd[i]:
            p = 2 * i + 1
            odd[p * p // 2::p] = False
    primes = 2 * np.flatnonzero(odd).astype(np.int64) + 1
    return np.concatenate(([2], primes)).astype(np.int64)


def write_prime_cache(path: str | os.PathLike, primes: np.ndarray) -> None:
    """Write primes as little-endian uint64 after the 8-byte magic header."""
    data = np.asarray(primes, dtype="<u8").tobytes()
    with open(path, "wb") as fh:
        fh.write(PRIME_CACHE_MAGIC)
        fh.write(data)


def read_prime_cache(path: str | os.PathLike) -> np.ndarray:
    with open(path, "rb") as fh:
        head = fh.read(len(PRIME_CACHE_MAGIC))
        if head != PRIME_CACHE_MAGIC:
            raise ValueError(f"{path}: bad prime cache header {head!r}")
        body = fh.read()
    if len(body) % 8:
        raise ValueError(f"{path}: truncated prime cache")
    return np.frombuffer(body, dtype="<u8").astype(np.int64)


@lru_cache(maxsize=8)
def _cached_file_primes(path: str, mtime: float) -> np.ndarray:
    arr = read_prime_cache(path)
    arr.setflags(write=False)
    return arr


@lru_cache(maxsize=16)
def _primes_up_to_cached(n: int) -> np.ndarray:
    path = os.environ.get(PRIME_CACHE_ENV)
    if path and os.path.exists(path):
        cached = _cached_file_primes(path, os.path.getmtime(path))
        # the cache only helps when it provably covers n
        if cached.size and cached[-1] >= n:
            out = cached[: np.searchsorted(cached, n, side="right")].copy()
            out.setflags(write=False)
            return out
    out = _eratosthenes(n)
    out.setflags(write=False)
    return out


def primes_up_to(n: int) -> np.ndarray:
    """All primes <= n as a read-only int64 array."""
    return _primes_up_to_cached(int(n))


# --------------------------------------------------------------------------
# single-integer factorization
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class FactorizationView:
    """An integer n >= 2 with its ascending (prime, multiplicity) pairs."""

    n: int
    factors: tuple[tuple[int, int], ...]

    @property
    def omega(self) -> int:
        return len(self.factors)

    @property
    def Omega(self) -> int:
        return sum(k for _, k in self.factors)

    def nu(self, nu: str) -> int:
        return self.omega if check_nu(nu) == "omega" else self.Omega

    def multiset(self) -> list[int]:
        return [p for p, k in self.factors for _ in range(k)]

    def validate(self) -> None:
        prod = 1
        last = 1
        for p, k in self.factors:
            if p <= last or k < 1:
                raise ValueError(f"bad factor list for {self.n}: {self.factors}")
            prod *= p**k
            last = p
        if prod != self.n:
            raise ValueError(f"factors of {self.n} multiply to {prod}")

    def format(self) -> str:
        return "*".join(f"{p}^{k}" for p, k in self.factors)


def factorize(n: int) -> FactorizationView:
    """Trial-division factorization of a single integer (wheel 2, 3, 6k +- 1)."""
    n = int(n)
    if n < 2:
        raise DomainError(f"factorize requires n >= 2, got {n}")
    if n > WORD_LIMIT:
        raise DomainError(f"n exceeds the 64-bit word limit: {n}")
    factors = []
    m = n
    for p in (2, 3):
        k = 0
        while m % p == 0:
            m //= p
            k += 1
        if k:
            factors.append((p, k))
    p, step = 5, 2
    while p * p <= m:
        if m % p == 0:
            k = 0
            while m % p == 0:
                m //= p
                k += 1
            factors.append((p, k))
        p += step
        step = 6 - step
    if m > 1:
        factors.append((m, 1))
    return FactorizationView(n, tuple(factors))


def middle_prime(f: FactorizationView, nu: str) -> int:
    """The ceil(nu(n)/2)-th smallest prime factor, without or with multiplicity."""
    if check_nu(nu) == "omega":
        return f.factors[(f.omega + 1) // 2 - 1][0]
    target = (f.Omega + 1) // 2
    seen = 0
    for p, k in f.factors:
        seen += k
        if seen >= target:
            return p
    raise AssertionError("unreachable: target <= Omega")


def nu_count_restricted(f: FactorizationView, nu: str, E: tuple[int, int]) -> int:
    """omega(n, E) or Omega(n, E) for the prime interval E = [p1, p2]."""
    lo, hi = E
    if lo > hi:
        raise ValueError(f"empty interval {E}")
    if check_nu(nu) == "omega":
        return sum(1 for p, _ in f.factors if lo <= p <= hi)
    return sum(k for p, k in f.factors if lo <= p <= hi)


# --------------------------------------------------------------------------
# segmented sieve
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SegmentPlan:
    lo: int
    hi: int
    segment_size: int = DEFAULT_SEGMENT_SIZE
    base_primes: np.ndarray = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if not (2 <= self.lo < self.hi):
            raise DomainError(f"need 2 <= lo < hi, got [{self.lo}, {self.hi})")
        if self.hi - 1 > WORD_LIMIT:
            raise DomainError("hi exceeds the 64-bit word limit")
        if self.segment_size < 1:
            raise ValueError("segment_size must be >= 1")
        if self.base_primes is None:
            object.__setattr__(self, "base_primes", primes_up_to(math.isqrt(self.hi - 1)))

    def segments(self) -> Iterator[tuple[int, int]]:
        for a in range(self.lo, self.hi, self.segment_size):
            yield a, min(a + self.segment_size, self.hi)


@dataclass
class SegmentFactors:
    """CSR factorizations of every n in [lo, hi)."""

    lo: int
    hi: int
    offsets: np.ndarray  # length hi - lo + 1
    primes: np.ndarray
    mults: np.ndarray

    @property
    def omega(self) -> np.ndarray:
        return np.diff(self.offsets)

    @property
    def Omega(self) -> np.ndarray:
        cm = np.concatenate(([0], np.cumsum(self.mults, dtype=np.int64)))
        return cm[self.offsets[1:]] - cm[self.offsets[:-1]]

    def middle_primes(self, nu: str) -> np.ndarray:
        start = self.offsets[:-1]
        if check_nu(nu) == "omega":
            return self.primes[start + (self.omega + 1) // 2 - 1]
        cm = np.cumsum(self.mults, dtype=np.int64)
        before = np.where(start > 0, cm[start - 1], 0)
        target = before + (self.Omega + 1) // 2
        return self.primes[np.searchsorted(cm, target, side="left")]

    def restricted_count(self, nu: str, lo_p: int, hi_p: int) -> np.ndarray:
        """nu(n, [lo_p, hi_p]) for each n in the segment."""
        inside = (self.primes >= lo_p) & (self.primes <= hi_p)
        w = inside.astype(np.int64)
        if check_nu(nu) == "Omega":
            w *= self.mults
        cw = np.concatenate(([0], np.cumsum(w)))
        return cw[self.offsets[1:]] - cw[self.offsets[:-1]]

    def views(self) -> Iterator[FactorizationView]:
        off = self.offsets
        ps = self.primes.tolist()
        ks = self.mults.tolist()
        for i in range(self.hi - self.lo):
            a, b = off[i], off[i + 1]
            yield FactorizationView(self.lo + i, tuple(zip(ps[a:b], ks[a:b])))


def sieve_segment(lo: int, hi: int, base_primes: np.ndarray) -> SegmentFactors:
    """Factor every n in [lo, hi); base_primes must contain all primes <= sqrt(hi - 1)."""
    size = hi - lo
    resid = np.arange(lo, hi, dtype=np.int64)
    hits: list[tuple[int, np.ndarray, np.ndarray]] = []
    omega = np.zeros(size, dtype=np.int64)
    for p in base_primes.tolist():
        if p * p > hi - 1:
            break
        first = (-lo) % p
        if first >= size:
            continue
        idx = np.arange(first, size, p)
        r = resid[idx] // p
        k = np.ones(idx.size, dtype=np.int64)
        again = np.flatnonzero(r % p == 0)
        while again.size:
            r[again] //= p
            k[again] += 1
            again = again[r[again] % p == 0]
        resid[idx] = r
        omega[idx] += 1
        hits.append((p, idx, k))
    big = resid > 1
    omega += big

    offsets = np.zeros(size + 1, dtype=np.int64)
    np.cumsum(omega, out=offsets[1:])
    total = int(offsets[-1])
    primes = np.empty(total, dtype=np.int64)
    mults = np.empty(total, dtype=np.int64)
    fill = offsets[:-1].copy()
    # primes arrive in ascending order, so each run is written sorted
    for p, idx, k in hits:
        pos = fill[idx]
        primes[pos] = p
        mults[pos] = k
        fill[idx] += 1
    pos = fill[big]
    primes[pos] = resid[big]
    mults[pos] = 1
    return SegmentFactors(lo, hi, offsets, primes, mults)


def iter_segments(plan: SegmentPlan) -> Iterator[SegmentFactors]:
    for a, b in plan.segments():
        yield sieve_segment(a, b, plan.base_primes)


def stream_factorizations(
    plan: SegmentPlan,
    visitor: Callable[[FactorizationView], None],
    workers: int = 1,
) -> None:
    """Call ``visitor`` once for each n in [plan.lo, plan.hi).

    With ``workers > 1`` segments are sieved on a thread pool and the visitor
    may be invoked concurrently from different threads (never twice for the
    same n).
    """

    def run(bounds):
        a, b = bounds
        try:
            seg = sieve_segment(a, b, plan.base_primes)
        except MemoryError as exc:
            raise MemoryError(f"segment buffers for [{a}, {b}) could not be allocated") from exc
        for view in seg.views():
            visitor(view)

    if workers <= 1:
        for bounds in plan.segments():
            run(bounds)
        return
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for fut in [pool.submit(run, b) for b in plan.segments()]:
            fut.result()


def dump_factorizations(plan: SegmentPlan, fh) -> None:
    """Debug dump: CSV ``n,factorization`` with factorization as ``p^k*p^k``."""
    fh.write("n,factorization\n")
    for seg in iter_segments(plan):
        for view in seg.views():
            fh.write(f"{view.n},{view.format()}\n")
