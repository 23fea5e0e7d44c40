"""Confront empirical counts, semi-theoretical predictions and the Gaussian law."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .empirical import LocalLawCounts, accumulate_both, empirical_cdf_grid, tail_count
from .errors import DomainError, UsageError
from .special import SQRT_2_OVER_PI, meissel_mertens, normal_cdf
from .theory import (
    A_NU,
    WINDOW_MARGIN,
    ScalePoint,
    beta_of,
    estimate_tau,
    predict_cdf_grid,
    predict_local_law,
    scale_from_log2,
    scale_point,
)

NOISE_FLOOR = 30


def default_t_grid() -> np.ndarray:
    return np.round(np.arange(-4.0, 4.0 + 1e-9, 0.02), 10)


def sig12(v: float) -> float:
    return float(f"{v:.12g}")


# --------------------------------------------------------------------------
# sup deviation
# --------------------------------------------------------------------------

@dataclass
class DeviationReport:
    s: ScalePoint
    nu: str
    t_grid: np.ndarray
    empirical: np.ndarray  # empirical or semi-theoretical A_nu(x, t)
    phi2t: np.ndarray
    source: str = "empirical"

    @property
    def diff(self) -> np.ndarray:
        return self.empirical - self.phi2t

    @property
    def sup_dev(self) -> float:
        return float(np.max(np.abs(self.diff)))

    @property
    def scaled_sup_dev(self) -> float:
        return self.sup_dev * math.sqrt(self.s.L2)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "empirical", "phi2t", "diff"])
        for row in zip(self.t_grid, self.empirical, self.phi2t, self.diff):
            w.writerow([f"{v:.12g}" for v in row])
        return buf.getvalue()


def _check_grid(t_grid: np.ndarray) -> None:
    t = np.sort(np.asarray(t_grid, dtype=float))
    if t.size < 2 or t[0] > -3 or t[-1] < 3 or np.max(np.diff(t)) > 0.05 + 1e-12:
        raise UsageError("t grid must cover [-3, 3] with step <= 0.05")


def _phi2t(t_grid) -> np.ndarray:
    return np.array([normal_cdf(2.0 * t) for t in t_grid])


def sup_deviation(c: LocalLawCounts, t_grid=None) -> DeviationReport:
    t = default_t_grid() if t_grid is None else np.asarray(t_grid, dtype=float)
    _check_grid(t)
    return DeviationReport(scale_point(x=c.x), c.nu, t, empirical_cdf_grid(c, t), _phi2t(t))


def theory_deviation(nu: str, s: ScalePoint, t_grid=None) -> DeviationReport:
    """Same report with predict_cdf in place of the empirical distribution."""
    t = default_t_grid() if t_grid is None else np.asarray(t_grid, dtype=float)
    _check_grid(t)
    return DeviationReport(s, nu, t, predict_cdf_grid(nu, s, t), _phi2t(t), source="theory")


# --------------------------------------------------------------------------
# local-law ratios
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class RatioRow:
    p: int
    beta: float
    empirical_M: int
    predicted_log: float  # log of the predicted M_nu(x, p)

    @property
    def ratio(self) -> float:
        return self.empirical_M / math.exp(self.predicted_log)


def ratio_table(c: LocalLawCounts, beta_window: tuple[float, float]) -> list[RatioRow]:
    """Empirical / predicted M_nu(x, p) for exact-counted primes with beta_p in the window."""
    lo, hi = beta_window
    a = A_NU[c.nu] + WINDOW_MARGIN
    if not (a < lo <= hi < 1.0 - WINDOW_MARGIN):
        raise DomainError(f"window {beta_window} leaves the local-law range ({a}, {1 - WINDOW_MARGIN})")
    s = scale_point(x=c.x)
    rows = []
    for p, k in c.exact_counts.items():
        if p < 3 or k < NOISE_FLOOR:
            continue
        b = beta_of(p, s)
        if lo <= b <= hi:
            rows.append(RatioRow(p, b, k, predict_local_law(c.nu, s, p).log_magnitude))
    return rows


def median_ratio(rows: list[RatioRow]) -> float:
    if not rows:
        return math.nan
    return float(np.median([r.ratio for r in rows]))


def ratio_csv(rows: list[RatioRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["p", "beta", "empirical", "predicted_log", "ratio"])
    for r in rows:
        w.writerow([r.p, f"{r.beta:.12g}", r.empirical_M, f"{r.predicted_log:.12g}", f"{r.ratio:.12g}"])
    return buf.getvalue()


def prefactor_drift(c: LocalLawCounts, windows=((0.35, 0.45), (0.45, 0.55), (0.55, 0.65))) -> list[dict]:
    """Median ratio per beta window next to the factor exp(kappa (w - 1)).

    The omega prefactor of H is taken as the constant e^kappa.  If it should
    scale as e^(kappa z), predictions would move by exp(kappa (w - 1)) with
    w = sqrt((1 - beta)/beta); this records both so the question stays visible.
    """
    kappa = meissel_mertens()
    out = []
    for lo, hi in windows:
        mid = 0.5 * (lo + hi)
        w = math.sqrt((1 - mid) / mid)
        out.append({
            "window": [lo, hi],
            "median_ratio": median_ratio(ratio_table(c, (lo, hi))),
            "alt_prefactor_factor": math.exp(kappa * (w - 1)),
        })
    return out


# --------------------------------------------------------------------------
# uniform envelope away from the centre
# --------------------------------------------------------------------------

@dataclass
class EnvelopeReport:
    x: int
    nu: str
    eta: float
    qualifying: int
    constant: float | None  # sup of M p (log log x)^(5/2) / x, None when vacuous
    ceiling: float = 100.0

    @property
    def vacuous(self) -> bool:
        return self.qualifying == 0

    @property
    def ok(self) -> bool:
        return self.vacuous or (math.isfinite(self.constant) and self.constant <= self.ceiling)

    def describe(self) -> str:
        if self.vacuous:
            return f"x={self.x} {self.nu}: vacuous at this scale (eta_x={self.eta:.4f})"
        return f"x={self.x} {self.nu}: {self.qualifying} primes, implied constant {self.constant:.4g}"


def lemma1_envelope_check(c: LocalLawCounts) -> EnvelopeReport:
    s = scale_point(x=c.x)
    best = None
    n = 0
    for p, k in c.exact_counts.items():
        if p < 3:
            continue
        if abs(beta_of(p, s) - 0.5) >= s.eta:
            n += 1
            val = k * p * s.L2**2.5 / c.x
            best = val if best is None else max(best, val)
    return EnvelopeReport(c.x, c.nu, s.eta, n, best)


# --------------------------------------------------------------------------
# optimality of the error term
# --------------------------------------------------------------------------

@dataclass
class OptimalityReport:
    nu: str
    tau: float
    L2: list[float]
    d: list[float]  # sqrt(L2) (predict_cdf(t=0) - 1/2)
    band: tuple[float, float] = (0.5, 1.5)
    checked_from: float = 100.0

    @property
    def limit(self) -> float:
        """Expected limit of d: -sqrt(2/pi) tau / 4 (h(1/2) = sqrt(2/pi) multiplies the linear term)."""
        return -SQRT_2_OVER_PI * self.tau / 4.0

    def ratios(self) -> list[float]:
        q = abs(self.tau) / 4.0
        return [abs(v) / q if q > 0 else math.inf for v in self.d]

    @property
    def passed(self) -> bool:
        lo, hi = self.band
        return all(lo <= r <= hi for L2, r in zip(self.L2, self.ratios()) if L2 >= self.checked_from)

    def check(self) -> None:
        if not self.passed:
            raise AssertionError(
                f"{self.nu}: scaled deviation {self.d} leaves the band {self.band} x |tau|/4 (tau={self.tau})"
            )


def optimality_study(nu: str, L2_grid, tau: float | None = None) -> OptimalityReport:
    if any(L2 < 16 for L2 in L2_grid):
        raise DomainError("optimality study needs L2 >= 16")
    if tau is None:
        tau = estimate_tau(nu)
    d = []
    for L2 in L2_grid:
        s = scale_from_log2(L2)
        d.append(math.sqrt(L2) * (float(predict_cdf_grid(nu, s, [0.0])[0]) - 0.5))
    return OptimalityReport(nu, tau, list(map(float, L2_grid)), d)


# --------------------------------------------------------------------------
# combined convergence table
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ConvergenceRow:
    source: str
    L2: float
    sup_dev: float
    scaled_sup_dev: float


@dataclass
class ConvergenceReport:
    nu: str
    rows: list[ConvergenceRow] = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["source", "L2", "sup_dev", "scaled_sup_dev"])
        for r in self.rows:
            w.writerow([r.source, f"{r.L2:.12g}", f"{r.sup_dev:.12g}", f"{r.scaled_sup_dev:.12g}"])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, nu: str, text: str) -> "ConvergenceReport":
        rows = []
        for rec in csv.DictReader(io.StringIO(text)):
            rows.append(ConvergenceRow(rec["source"], float(rec["L2"]), float(rec["sup_dev"]),
                                       float(rec["scaled_sup_dev"])))
        return cls(nu, rows)


def _row(rep: DeviationReport) -> ConvergenceRow:
    return ConvergenceRow(rep.source, sig12(rep.s.L2), sig12(rep.sup_dev), sig12(rep.scaled_sup_dev))


def convergence_study(nu: str, x_list=(), L2_list=(), counts: dict[int, LocalLawCounts] | None = None,
                      t_grid=None) -> ConvergenceReport:
    """Empirical rows (sieve at each x) followed by semi-theoretical rows (each L2).

    ``counts`` may supply precomputed LocalLawCounts keyed by x.
    """
    rep = ConvergenceReport(nu)
    for x in x_list:
        if x > 10**9:
            raise DomainError("empirical rows are limited to x <= 1e9")
        c = (counts or {}).get(x) or accumulate_both(x)[nu]
        rep.rows.append(_row(sup_deviation(c, t_grid)))
    for L2 in L2_list:
        rep.rows.append(_row(theory_deviation(nu, scale_from_log2(L2), t_grid)))
    return rep


# --------------------------------------------------------------------------
# Hall-Tenenbaum envelope
# --------------------------------------------------------------------------

def hall_tenenbaum_check(x: int = 10**6, nu: str = "Omega", b: float = 2.0, ceiling: float = 10.0):
    """count{n <= x : nu(n) >= b E(x)} against ceiling * x exp(-E(x) Q(b)), E = all primes <= x."""
    rep = tail_count(x, nu, (2, x), "above", b)
    return rep, rep.count <= ceiling * rep.bound
