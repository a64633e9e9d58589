"""Numerically stable evaluation of the binomial probability mass function.

Single masses are computed in log space through the log-gamma function, so
trial counts up to 1e7 never overflow.  Full rows are built by a
multiplicative recurrence seeded at the mode, which keeps relative accuracy
in the far tails where a cumulative construction would not.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .exceptions import ParameterDomainError, PreconditionError

__all__ = [
    "PMFParams",
    "PMFRow",
    "pmf",
    "log_pmf",
    "log_pmf_many",
    "pmf_row",
    "mode_index",
    "tail_mass_outside",
    "chernoff_bound",
    "center_ratio",
    "peak_asymptotic_ratio",
]


@dataclass(frozen=True)
class PMFParams:
    """Binomial distribution parameters: n trials, success probability p."""

    n: int
    p: float

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or isinstance(self.n, bool):
            raise ParameterDomainError(f"n must be an integer, got {self.n!r}")
        if self.n < 0:
            raise ParameterDomainError(f"n must be non-negative, got {self.n}")
        if not (0.0 < self.p < 1.0):
            raise ParameterDomainError(f"p must lie strictly inside (0, 1), got {self.p!r}")


@dataclass(frozen=True)
class PMFRow:
    """Full mass vector of a binomial distribution: mass[i] = P[X = i]."""

    params: PMFParams
    mass: np.ndarray


def log_pmf(params: PMFParams, i: int) -> float:
    """Natural log of P[X = i], or -inf outside the support."""
    n, p = params.n, params.p
    if i < 0 or i > n:
        return -math.inf
    return (
        math.lgamma(n + 1)
        - math.lgamma(i + 1)
        - math.lgamma(n - i + 1)
        + i * math.log(p)
        + (n - i) * math.log1p(-p)
    )


def pmf(params: PMFParams, i: int) -> float:
    """P[X = i] for X ~ Binomial(n, p); exactly 0 for i outside [0, n]."""
    if i < 0 or i > params.n:
        return 0.0
    return math.exp(log_pmf(params, i))


def log_pmf_many(n: int, p: float, indices) -> np.ndarray:
    """Vectorized log_pmf over an array of indices inside the support.

    Used by the sparse transform paths, where a handful of nonzero sequence
    positions must be weighted for many different n.
    """
    i = np.asarray(indices, dtype=float)
    return (
        math.lgamma(n + 1)
        - gammaln(i + 1.0)
        - gammaln(n - i + 1.0)
        + i * math.log(p)
        + (n - i) * math.log1p(-p)
    )


def mode_index(params: PMFParams) -> int:
    """Smallest index maximizing the mass.

    Equals floor((n+1)p), except when (n+1)p is an integer m: then mass[m]
    ties mass[m-1] and the smaller index wins.
    """
    n, p = params.n, params.p
    x = (n + 1) * p
    m = math.floor(x)
    if m == x:
        m -= 1
    return min(max(m, 0), n)


def _row_mass(n: int, p: float) -> np.ndarray:
    # Multiplicative recurrence mass[i+1] = mass[i] * ratio(i+1), run outward
    # from a log-gamma seed at the mode; products only shrink moving away
    # from the peak, so there is no overflow and tails keep relative accuracy.
    mass = np.empty(n + 1)
    m = mode_index(PMFParams(n, p))
    mass[m] = math.exp(
        math.lgamma(n + 1)
        - math.lgamma(m + 1)
        - math.lgamma(n - m + 1)
        + m * math.log(p)
        + (n - m) * math.log1p(-p)
    )
    if m < n:
        i = np.arange(m + 1, n + 1, dtype=float)
        ratio_up = (n - i + 1.0) * p / (i * (1.0 - p))
        mass[m + 1 :] = mass[m] * np.cumprod(ratio_up)
    if m > 0:
        i = np.arange(m, 0, -1, dtype=float)
        ratio_down = i * (1.0 - p) / ((n - i + 1.0) * p)
        mass[m - 1 :: -1] = mass[m] * np.cumprod(ratio_down)
    # the recurrence drifts by ~n*eps in total mass; rescaling pins the sum
    # without disturbing relative tail accuracy
    mass /= mass.sum()
    return mass


def pmf_row(params: PMFParams) -> PMFRow:
    """All n+1 masses at once; entry i equals pmf(params, i)."""
    return PMFRow(params, _row_mass(params.n, params.p))


def tail_mass_outside(params: PMFParams, radius: float) -> float:
    """Total mass at indices i with |i - n p| >= radius."""
    if radius < 0:
        raise ParameterDomainError(f"radius must be non-negative, got {radius!r}")
    mass = _row_mass(params.n, params.p)
    dist = np.abs(np.arange(params.n + 1, dtype=float) - params.n * params.p)
    return float(mass[dist >= radius].sum())


def chernoff_bound(params: PMFParams, alpha: float) -> float:
    """Exponential tail bound 2 exp(-alpha^2 / (3 p)).

    Dominates tail_mass_outside(params, sqrt(n) * alpha) whenever
    0 < alpha < p * sqrt(n); outside that range nothing is guaranteed and
    the call is rejected.
    """
    n, p = params.n, params.p
    if not (0.0 < alpha < p * math.sqrt(n)):
        raise PreconditionError(
            f"alpha must satisfy 0 < alpha < p*sqrt(n) = {p * math.sqrt(n)!r}, got {alpha!r}"
        )
    return 2.0 * math.exp(-alpha * alpha / (3.0 * p))


def center_ratio(params: PMFParams, beta: int) -> float:
    """mass[floor(n p)] / mass[floor(n p) - beta], as a log-space difference.

    For n >= 100 and 8 <= |beta| <= sqrt(n) the result stays below
    exp(beta**2 / (p (1-p) n)) up to rounding; for smaller |beta| the ratio
    is still computed but no bound is promised (integer floor effects can
    push it past that expression).
    """
    n, p = params.n, params.p
    m = math.floor(n * p)
    j = m - beta
    if not (0 <= j <= n):
        raise PreconditionError(
            f"denominator index {j} falls outside the support [0, {n}]"
        )
    return math.exp(log_pmf(params, m) - log_pmf(params, j))


def peak_asymptotic_ratio(params: PMFParams) -> float:
    """sqrt(2 pi p (1-p) n) times the mass at floor(n p); tends to 1 in n."""
    n, p = params.n, params.p
    if n < 1:
        raise PreconditionError("n must be at least 1")
    peak = math.exp(log_pmf(params, math.floor(n * p)))
    return math.sqrt(2.0 * math.pi * p * (1.0 - p) * n) * peak
