"""Local-law densities and the semi-theoretical distribution of the middle prime.

Scales are carried in log coordinates (L1 = log x, L2 = log log x,
L3 = log log log x) so that x far beyond anything sieveable can be handled.
Densities that underflow are returned as LogValue.

The optimality constant tau is the linear coefficient in

    h(1/2 + v) / h(1/2) = (1 + tau v + ...) exp(-2 v^2 L2),

and since kappa(1/2 + v) is even in v, tau is the derivative at v = 0 of
log rho(1/2 + v).  It is estimated by central differences with one Richardson
step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .quadrature import integrate
from .errors import DomainError, PoleError
from .sieve import WORD_LIMIT, check_nu
from .special import (
    DEFAULT_PRECISION,
    EULER_GAMMA,
    LogValue,
    PrecisionConfig,
    ln_gamma,
    log_H,
    log_H_array,
)

A_NU = {"omega": 0.0, "Omega": 0.2}
V_MAX = 0.995  # beyond this w < 0.071 and the Euler product loses accuracy
WINDOW_MARGIN = 0.01
QUAD_REL_TOL = 1e-8


# --------------------------------------------------------------------------
# scales
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ScalePoint:
    L1: float
    L2: float
    L3: float
    exact_x: int | None = None

    @property
    def eps(self) -> float:
        return 1.0 / self.L2

    @property
    def eta(self) -> float:
        return math.sqrt(self.L3 / self.L2)


def scale_point(x: int | None = None, L1: float | None = None) -> ScalePoint:
    """Build a ScalePoint from an exact integer x >= 16 or from L1 = log x."""
    if (x is None) == (L1 is None):
        raise ValueError("give exactly one of x or L1")
    exact = None
    if x is not None:
        x = int(x)
        if x < 16:
            raise DomainError(f"x must be >= 16, got {x}")
        L1 = math.log(x)
        exact = x if x <= WORD_LIMIT else None
    L1 = float(L1)
    if not L1 > 0:
        raise DomainError("L1 must be positive")
    L2 = math.log(L1)
    if not L2 > 1:
        raise DomainError(f"log log x must exceed 1, got {L2}")
    return ScalePoint(L1, L2, math.log(L2), exact)


def scale_from_log2(L2: float) -> ScalePoint:
    """ScalePoint from L2 = log log x directly (x need not be representable)."""
    L2 = float(L2)
    if not L2 > 1:
        raise DomainError(f"log log x must exceed 1, got {L2}")
    if L2 > 700:
        raise DomainError("L2 > 700 would overflow log x")
    return ScalePoint(math.exp(L2), L2, math.log(L2), None)


def lambda_of(s: ScalePoint, t: float) -> float:
    return 0.5 * s.L2 + t * math.sqrt(s.L2)


def eta_of(s: ScalePoint) -> float:
    return s.eta


def eps_of(s: ScalePoint) -> float:
    return s.eps


def beta_of_log(log_p: float, s: ScalePoint) -> float:
    """beta from log p; requires p >= 3 and p <= x."""
    if log_p < math.log(3) - 1e-12:
        raise DomainError("beta_p is defined for p >= 3")
    b = math.log(log_p) / s.L2
    if b > 1 + 1e-12:
        raise DomainError(f"p exceeds x (beta = {b})")
    return b


def beta_of(p: int, s: ScalePoint) -> float:
    """beta_p = log log p / log log x."""
    if p < 3:
        raise DomainError(f"beta_p needs p >= 3, got {p}")
    return beta_of_log(math.log(p), s)


# --------------------------------------------------------------------------
# elementary shape functions
# --------------------------------------------------------------------------

def _open_unit(v: float, name: str) -> None:
    if not 0 < v < 1:
        raise DomainError(f"{name} needs 0 < v < 1, got {v}")


def kappa_v(v: float) -> float:
    """2 sqrt(v(1-v)) - 1, written as -(1-2v)^2 / (1 + 2 sqrt(v(1-v))) to avoid cancellation."""
    _open_unit(v, "kappa_v")
    return -((1.0 - 2.0 * v) ** 2) / (1.0 + 2.0 * math.sqrt(v * (1.0 - v)))


def _kappa_array(v: np.ndarray) -> np.ndarray:
    return -((1.0 - 2.0 * v) ** 2) / (1.0 + 2.0 * np.sqrt(v * (1.0 - v)))


def gamma_nu(nu: str, v: float) -> float:
    """Decay exponent of M_nu(x, p) in log x (piecewise for Omega below 1/5)."""
    _open_unit(v, "gamma_nu")
    if v <= A_NU[check_nu(nu)]:
        return 0.5 * (1.0 - 3.0 * v)
    return -kappa_v(v)


def q_fn(v: float) -> float:
    """Large-deviation rate v log v - v + 1."""
    if not v > 0:
        raise DomainError(f"Q(v) needs v > 0, got {v}")
    return v * math.log(v) - v + 1.0


# --------------------------------------------------------------------------
# densities
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class DensityValue:
    value: LogValue
    v: float
    nu: str


def _check_z(nu: str, z: float) -> None:
    if not z > 0:
        raise DomainError(f"f_nu needs z > 0, got {z}")
    if nu == "Omega" and z >= 2:
        raise PoleError("f_Omega has a pole at z = 2")


def f_nu(nu: str, z: float, cfg: PrecisionConfig = DEFAULT_PRECISION) -> LogValue:
    """log f_nu(z) = log H_nu(z) - gamma/z - log Gamma(1 + 1/z)."""
    check_nu(nu)
    _check_z(nu, z)
    return LogValue(log_H(nu, z, cfg) - EULER_GAMMA / z - ln_gamma(1.0 + 1.0 / z))


def _check_v(nu: str, v: float) -> None:
    a = A_NU[check_nu(nu)]
    if not a < v < 1:
        raise DomainError(f"rho_{nu} needs {a} < v < 1, got {v}")
    if v > V_MAX:
        raise DomainError(f"rho_{nu} is not evaluated for v > {V_MAX} (w too small)")


def _log_rho_from_parts(v, w, log_f):
    return np.log1p(w) + log_f - math.log(2.0) - np.log(w) - 0.5 * np.log(math.pi * v * w)


def rho_nu(nu: str, v: float, cfg: PrecisionConfig = DEFAULT_PRECISION) -> DensityValue:
    """Local-law density (1 + w) f(w) / (2 w sqrt(pi v w)), w = sqrt((1 - v)/v)."""
    _check_v(nu, v)
    w = math.sqrt((1.0 - v) / v)
    log_f = f_nu(nu, w, cfg).log_magnitude
    return DensityValue(LogValue(float(_log_rho_from_parts(v, w, log_f))), v, nu)


def log_rho_array(nu: str, v, cfg: PrecisionConfig = DEFAULT_PRECISION) -> np.ndarray:
    """Vectorized log rho_nu; no domain checks beyond those of log_H."""
    v = np.asarray(v, dtype=np.float64)
    w = np.sqrt((1.0 - v) / v)
    lg = np.array([ln_gamma(1.0 + 1.0 / wi) for wi in w.ravel()]).reshape(w.shape)
    log_f = log_H_array(nu, w.ravel(), cfg).reshape(w.shape) - EULER_GAMMA / w - lg
    return _log_rho_from_parts(v, w, log_f)


def h_nu_x(nu: str, v: float, s: ScalePoint, cfg: PrecisionConfig = DEFAULT_PRECISION) -> LogValue:
    """rho_nu(v) (log x)^kappa(v), in log form: log rho + kappa(v) L2."""
    r = rho_nu(nu, v, cfg)
    return LogValue(r.value.log_magnitude + kappa_v(v) * s.L2)


def predict_local_law(nu: str, s: ScalePoint, p: int, cfg: PrecisionConfig = DEFAULT_PRECISION) -> LogValue:
    """Main term of M_nu(x, p): x rho(beta_p) (log x)^kappa(beta_p) / (p sqrt(log log x))."""
    check_nu(nu)
    b = beta_of(p, s)
    lo, hi = A_NU[nu] + WINDOW_MARGIN, 1.0 - WINDOW_MARGIN
    if not lo < b < hi:
        raise DomainError(
            f"beta_p = {b:.4f} outside ({lo}, {hi}); the local law needs "
            f"a_nu + eps < beta_p < 1 - eps"
        )
    log_x = math.log(s.exact_x) if s.exact_x is not None else s.L1
    log_rho = rho_nu(nu, b, cfg).value.log_magnitude
    return LogValue(log_x + log_rho + kappa_v(b) * s.L2 - math.log(p) - 0.5 * math.log(s.L2))


# --------------------------------------------------------------------------
# semi-theoretical distribution
# --------------------------------------------------------------------------

def integration_window(nu: str, s: ScalePoint) -> tuple[float, float]:
    """Admissible beta range [1/2 - eta_x, ...) clipped to the density's domain."""
    lo = max(0.5 - s.eta, A_NU[check_nu(nu)] + WINDOW_MARGIN)
    return lo, 1.0 - WINDOW_MARGIN


def _h_integrand(nu: str, s: ScalePoint, cfg: PrecisionConfig):
    def f(beta: np.ndarray) -> np.ndarray:
        return np.exp(log_rho_array(nu, beta, cfg) + _kappa_array(beta) * s.L2)
    return f


def predict_cdf(nu: str, s: ScalePoint, t: float, cfg: PrecisionConfig = DEFAULT_PRECISION) -> float:
    """sqrt(L2) * integral of h_{nu,x} over [1/2 - eta_x, 1/2 + t/sqrt(L2))."""
    return float(predict_cdf_grid(nu, s, [t], cfg)[0])


def predict_cdf_grid(
    nu: str, s: ScalePoint, t_grid: Sequence[float], cfg: PrecisionConfig = DEFAULT_PRECISION
) -> np.ndarray:
    """predict_cdf on a grid of t, integrating piecewise between successive upper limits."""
    t = np.asarray(t_grid, dtype=np.float64)
    order = np.argsort(t, kind="stable")
    lo, top = integration_window(nu, s)
    f = _h_integrand(nu, s, cfg)
    root = math.sqrt(s.L2)
    out = np.zeros(t.size)
    acc = 0.0
    prev = lo
    for i in order:
        upper = min(0.5 + t[i] / root, top)
        if upper > prev:
            piece, _ = integrate(f, prev, upper, rel_tol=QUAD_REL_TOL, abs_tol=1e-13, breakpoints=(0.5,))
            acc += piece
            prev = upper
        out[i] = root * acc if upper > lo else 0.0
    return out


# --------------------------------------------------------------------------
# optimality constant
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class TauEstimate:
    nu: str
    tau: float
    coarse: float  # extrapolated from steps (h, h/2)
    fine: float  # extrapolated from steps (h/2, h/4)

    @property
    def stability(self) -> float:
        return abs(self.coarse - self.fine)


def _central_diff(nu: str, h: float, cfg: PrecisionConfig) -> float:
    g = log_rho_array(nu, np.array([0.5 + h, 0.5 - h]), cfg)
    return float(g[0] - g[1]) / (2.0 * h)


def tau_details(nu: str, step: float = 1e-3, cfg: PrecisionConfig = DEFAULT_PRECISION) -> TauEstimate:
    check_nu(nu)
    d = [_central_diff(nu, step / 2**i, cfg) for i in range(3)]
    coarse = (4.0 * d[1] - d[0]) / 3.0
    fine = (4.0 * d[2] - d[1]) / 3.0
    return TauEstimate(nu, coarse, coarse, fine)


def estimate_tau(nu: str, cfg: PrecisionConfig = DEFAULT_PRECISION) -> float:
    """d/dv log rho_nu(1/2 + v) at v = 0 (steps 1e-3 and 5e-4, Richardson-extrapolated)."""
    return tau_details(nu, 1e-3, cfg).tau


def scaled_center_deviation(nu: str, s: ScalePoint, cfg: PrecisionConfig = DEFAULT_PRECISION) -> float:
    """sqrt(L2) (predict_cdf(t = 0) - 1/2)."""
    return math.sqrt(s.L2) * (predict_cdf(nu, s, 0.0, cfg) - 0.5)
