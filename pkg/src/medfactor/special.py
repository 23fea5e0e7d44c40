"""Classical special functions and prime-indexed products.

Everything here is float64.  Prime sums over all primes are split into an
explicit head (q <= Q0) and a tail expanded in powers of 1/q; the tail power
sums come from the prime zeta function, itself obtained from log zeta by
Moebius inversion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError, PoleError
from .sieve import check_nu, primes_up_to

EULER_GAMMA = 0.5772156649015329
SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)


@dataclass(frozen=True)
class PrecisionConfig:
    prime_cutoff: int = 10**5
    tail_order: int = 6
    target_rel_err: float = 1e-12

    def __post_init__(self):
        if self.prime_cutoff < 10**3:
            raise ValueError("prime_cutoff must be >= 1000")
        if not 2 <= self.tail_order <= 8:
            raise ValueError("tail_order must lie in [2, 8]")
        if self.target_rel_err < 1e-13:
            raise ValueError("target_rel_err below 1e-13 is not reachable in float64")


DEFAULT_PRECISION = PrecisionConfig()


@dataclass(frozen=True, order=True)
class LogValue:
    """A positive real stored by its natural logarithm (-inf encodes zero)."""

    log_magnitude: float

    def __post_init__(self):
        if math.isnan(self.log_magnitude) or self.log_magnitude == math.inf:
            raise ValueError(f"invalid log magnitude {self.log_magnitude}")

    @classmethod
    def of(cls, value: float) -> "LogValue":
        if value < 0:
            raise ValueError("LogValue holds non-negative quantities only")
        return cls(math.log(value) if value > 0 else -math.inf)

    @property
    def value(self) -> float:
        return math.exp(self.log_magnitude)

    def __mul__(self, other: "LogValue") -> "LogValue":
        return LogValue(self.log_magnitude + other.log_magnitude)

    def __truediv__(self, other: "LogValue") -> "LogValue":
        return LogValue(self.log_magnitude - other.log_magnitude)


# --------------------------------------------------------------------------
# gamma, normal law
# --------------------------------------------------------------------------

# Lanczos approximation, g = 7, nine terms (Godfrey's coefficient set).
_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def ln_gamma(s: float) -> float:
    """log Gamma(s) for real s > 0."""
    s = float(s)
    if not s > 0 or math.isinf(s):
        raise DomainError(f"ln_gamma needs finite s > 0, got {s}")
    if s < 0.5:
        return ln_gamma(s + 1.0) - math.log(s)
    # exact zeros of log Gamma
    if s == 1.0 or s == 2.0:
        return 0.0
    z = s - 1.0
    acc = _LANCZOS[0]
    for i in range(1, len(_LANCZOS)):
        acc += _LANCZOS[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * math.log(t) - t + math.log(acc)


def normal_cdf(v: float) -> float:
    """Standard normal distribution function, via erfc to keep tail accuracy."""
    return 0.5 * math.erfc(-v / math.sqrt(2.0))


# --------------------------------------------------------------------------
# zeta and prime zeta
# --------------------------------------------------------------------------

# B_2, B_4, B_6, B_8, B_10
_BERNOULLI = (1.0 / 6, -1.0 / 30, 1.0 / 42, -1.0 / 30, 5.0 / 66)


def _em_tail(s: float, N: int) -> tuple[float, float]:
    """Euler-Maclaurin tail sum_{n >= N} n^-s (four corrections) and remainder bound."""
    terms = [N ** (1.0 - s) / (s - 1.0), 0.5 * N ** (-s)]
    rising = s  # s (s+1) ... (s + 2j - 2)
    fact = 2.0  # (2j)!
    for j in range(1, 5):
        terms.append(_BERNOULLI[j - 1] / fact * rising * N ** (-s - 2 * j + 1))
        rising *= (s + 2 * j - 1) * (s + 2 * j)
        fact *= (2 * j + 1) * (2 * j + 2)
    bound = abs(_BERNOULLI[4] / fact * rising * N ** (-s - 9))
    return math.fsum(terms), bound


def _zeta_parts(s: float) -> tuple[float, float]:
    """(zeta(s) - 1, remainder bound)."""
    N = 8
    while True:
        tail, bound = _em_tail(s, N)
        head = math.fsum(n ** (-s) for n in range(2, N))
        val = head + tail
        if bound <= 1e-17 * val or N > 4096:
            return val, bound
        N *= 2


@lru_cache(maxsize=4096)
def zeta_minus_one(s: float) -> float:
    """zeta(s) - 1, computed without the cancellation of zeta(s) - 1 for large s."""
    s = float(s)
    if s < 1.1:
        raise DomainError(f"zeta needs s >= 1.1, got {s}")
    return _zeta_parts(s)[0]


def zeta(s: float) -> float:
    """Riemann zeta for real s >= 1.1 (Euler-Maclaurin with explicit remainder)."""
    return 1.0 + zeta_minus_one(s)


def log_zeta(s: float) -> float:
    return math.log1p(zeta_minus_one(s))


@lru_cache(maxsize=None)
def mobius(k: int) -> int:
    mu = 1
    m = k
    p = 2
    while p * p <= m:
        if m % p == 0:
            m //= p
            if m % p == 0:
                return 0
            mu = -mu
        p += 1
    return -mu if m > 1 else mu


@lru_cache(maxsize=1024)
def prime_zeta(s: float) -> float:
    """P(s) = sum_p p^-s = sum_k mu(k)/k log zeta(ks), s >= 2."""
    s = float(s)
    if s < 2:
        raise DomainError(f"prime_zeta needs s >= 2, got {s}")
    lead = 2.0 ** (-s)
    terms = []
    k = 1
    while True:
        # log zeta(ks) ~ 2^-ks; stop once far below double resolution of P(s)
        if 2.0 ** (-k * s) / k < 1e-18 * lead:
            break
        mu = mobius(k)
        if mu:
            terms.append(mu * log_zeta(k * s) / k)
        k += 1
    return math.fsum(terms)


def euler_gamma() -> float:
    return EULER_GAMMA


@lru_cache(maxsize=1)
def meissel_mertens() -> float:
    """Meissel-Mertens constant: gamma - sum_{k >= 2} P(k)/k."""
    terms = []
    k = 2
    while True:
        t = prime_zeta(k) / k
        terms.append(t)
        if t < 1e-19:
            break
        k += 1
    return EULER_GAMMA - math.fsum(terms)


# --------------------------------------------------------------------------
# Euler products H_nu(z)
# --------------------------------------------------------------------------

@lru_cache(maxsize=16)
def _head_primes(cutoff: int) -> np.ndarray:
    q = primes_up_to(cutoff).astype(np.float64)
    q.setflags(write=False)
    return q


@lru_cache(maxsize=256)
def prime_power_tail(cutoff: int, j: int) -> float:
    """sum_{q > cutoff} q^-j, as P(j) minus the explicit head."""
    inv = 1.0 / _head_primes(cutoff)
    return prime_zeta(j) - math.fsum((inv**j).tolist())


def _tail_coeff(nu: str, j: int, z: np.ndarray) -> np.ndarray:
    # coefficient of q^-j in the log of the q-th Euler factor
    if nu == "omega":
        return (1.0 - (1.0 - z) ** j) / j
    return (z**j - z) / j


def _check_H_domain(nu: str, z: np.ndarray) -> None:
    if np.any(~np.isfinite(z)) or np.any(z <= 0):
        raise DomainError(f"log_H({nu}) needs z > 0")
    if nu == "Omega" and np.any(z >= 2):
        raise PoleError("log_H(Omega) has a pole at z = 2 (factor (1 - z/2)^-1)")


def log_H_array(nu: str, z, cfg: PrecisionConfig = DEFAULT_PRECISION) -> np.ndarray:
    """Vectorized log H_nu(z) over an array of real z."""
    check_nu(nu)
    z = np.atleast_1d(np.asarray(z, dtype=np.float64))
    _check_H_domain(nu, z)
    q = _head_primes(cfg.prime_cutoff)
    out = np.empty(z.shape, dtype=np.float64)
    chunk = max(1, (1 << 22) // q.size)
    for a in range(0, z.size, chunk):
        zz = z[a:a + chunk, None]
        if nu == "omega":
            body = np.log1p(zz / (q - 1.0)) - zz / q
        else:
            body = zz * np.log1p(-1.0 / q) - np.log1p(-zz / q)
        out[a:a + chunk] = body.sum(axis=1)
    for j in range(2, cfg.tail_order + 1):
        out += _tail_coeff(nu, j, z) * prime_power_tail(cfg.prime_cutoff, j)
    out += meissel_mertens() if nu == "omega" else EULER_GAMMA * z
    return out


def log_H(nu: str, z: float, cfg: PrecisionConfig = DEFAULT_PRECISION) -> float:
    """log H_nu(z) for real z.

    omega: log(e^kappa prod_q (1 + z/(q-1)) e^(-z/q)), z > 0.
    Omega: log(e^(gamma z) prod_q (1 - 1/q)^z (1 - z/q)^-1), 0 < z < 2.
    """
    return float(log_H_array(nu, [z], cfg)[0])


def log_H_error_bound(nu: str, z: float, cfg: PrecisionConfig = DEFAULT_PRECISION) -> float:
    """Size of the first omitted tail term, |c_{K+1}(z)| sum_{q > Q0} q^-(K+1)."""
    j = cfg.tail_order + 1
    return float(abs(_tail_coeff(check_nu(nu), j, np.float64(z))) * prime_power_tail(cfg.prime_cutoff, j))
