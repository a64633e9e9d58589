"""Sequence transforms: Cesaro means, p-binomial means, their composition,
and the weight-table representation of the Cesaro-of-binomial transform.

A transform prefix of horizon H is the vector of transform values at indices
0..H.  Binomial prefixes cost O(H^2) on dense sequences, which is fine at
desk scale (H <= ~2e4); sequences that declare a sparse support get a path
that only touches their nonzero positions and scales to H ~ 1e6.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .binomial_kernel import _row_mass, log_pmf_many
from .exceptions import HorizonError, ParameterDomainError
from .summation import running_mean, suffix_sums

__all__ = [
    "RealSequence",
    "TransformedPrefix",
    "WeightTable",
    "SplitSums",
    "cesaro_prefix",
    "binomial_prefix",
    "binomial_mean_at",
    "pstar_prefix",
    "compose_check",
    "weights",
    "epsilon",
    "split_xyz",
]


def _check_prob(p, name="p"):
    if not (0.0 < p < 1.0):
        raise ParameterDomainError(f"{name} must lie strictly inside (0, 1), got {p!r}")


def _check_horizon(horizon):
    if not isinstance(horizon, (int, np.integer)) or horizon < 0:
        raise ParameterDomainError(f"horizon must be a non-negative integer, got {horizon!r}")


@dataclass
class RealSequence:
    """A real sequence indexed from 0.

    Backed either by an explicit finite vector or by a term rule; rules may
    additionally carry a vectorized materializer and a sparse-support
    enumerator (sorted indices of the nonzero terms up to a horizon).  The
    ``nonneg`` flag is a claim that every term is >= 0, checked lazily when
    terms are materialized.
    """

    name: str = "sequence"
    nonneg: bool = False
    _values: Optional[np.ndarray] = field(default=None, repr=False)
    _term: Optional[Callable[[int], float]] = field(default=None, repr=False)
    _prefix: Optional[Callable[[int], np.ndarray]] = field(default=None, repr=False)
    _support: Optional[Callable[[int], np.ndarray]] = field(default=None, repr=False)
    _support_values: Optional[Callable[[np.ndarray], np.ndarray]] = field(
        default=None, repr=False
    )

    @classmethod
    def from_values(cls, values, nonneg=False, name="explicit"):
        arr = np.asarray(values, dtype=float)
        if arr.ndim != 1 or arr.size == 0:
            raise ParameterDomainError("explicit sequences need a non-empty 1-d vector")
        return cls(name=name, nonneg=nonneg, _values=arr)

    @classmethod
    def from_function(
        cls, term, nonneg=False, prefix=None, support=None, support_values=None, name="rule"
    ):
        return cls(
            name=name,
            nonneg=nonneg,
            _term=term,
            _prefix=prefix,
            _support=support,
            _support_values=support_values,
        )

    @property
    def sparse(self) -> bool:
        """True when the sequence declares its nonzero support."""
        return self._support is not None

    def term(self, i: int) -> float:
        if i < 0:
            raise ParameterDomainError(f"sequence index must be >= 0, got {i}")
        if self._values is not None:
            if i >= len(self._values):
                raise HorizonError(
                    f"index {i} beyond explicit sequence of length {len(self._values)}"
                )
            value = float(self._values[i])
        else:
            value = float(self._term(i))
        if self.nonneg and value < 0:
            raise ParameterDomainError(
                f"sequence {self.name!r} is declared non-negative but term {i} is {value}"
            )
        return value

    def prefix(self, horizon: int) -> np.ndarray:
        """Terms 0..horizon as a vector."""
        _check_horizon(horizon)
        if self._values is not None:
            if horizon >= len(self._values):
                raise HorizonError(
                    f"horizon {horizon} beyond explicit sequence of length {len(self._values)}"
                )
            out = self._values[: horizon + 1].astype(float, copy=True)
        elif self._prefix is not None:
            out = np.asarray(self._prefix(horizon), dtype=float)
        else:
            out = np.array([float(self._term(i)) for i in range(horizon + 1)])
        if self.nonneg:
            finite = out[np.isfinite(out)]
            if finite.size and finite.min() < 0:
                raise ParameterDomainError(
                    f"sequence {self.name!r} is declared non-negative but has a negative term"
                )
        return out

    def support(self, horizon: int):
        """Sorted nonzero indices up to horizon, with their values."""
        if not self.sparse:
            raise ParameterDomainError(f"sequence {self.name!r} declares no support set")
        idx = np.asarray(self._support(horizon), dtype=np.int64)
        if self._support_values is not None:
            vals = np.asarray(self._support_values(idx), dtype=float)
            if self.nonneg and vals.size and vals.min() < 0:
                raise ParameterDomainError(
                    f"sequence {self.name!r} is declared non-negative but has a negative term"
                )
        else:
            vals = np.array([self.term(int(i)) for i in idx])
        return idx, vals


@dataclass(frozen=True)
class TransformedPrefix:
    """Transform values at indices 0..horizon of some source sequence."""

    kind: str  # 'cesaro' | 'binomial' | 'pstar'
    p: Optional[float]
    values: np.ndarray

    @property
    def horizon(self) -> int:
        return len(self.values) - 1


@dataclass(frozen=True)
class WeightTable:
    """Weights of the Cesaro-of-binomial transform at one index.

    weights[i] is (1/p) times the probability that a Binomial(n+1, p)
    variable exceeds i: a plateau close to 1/p, then a sharp drop to 0 in a
    window of width ~sqrt(n) around n*p.
    """

    n: int
    p: float
    weights: np.ndarray


@dataclass(frozen=True)
class SplitSums:
    """Weighted partial sums over the plateau / drop window / tail index ranges.

    (x + y + z) / (n + 1) reproduces the Cesaro-of-binomial transform at n.
    """

    x: float
    y: float
    z: float
    n: int
    p: float

    @property
    def total_mean(self) -> float:
        return (self.x + self.y + self.z) / (self.n + 1)


def cesaro_prefix(a: RealSequence, horizon: int) -> TransformedPrefix:
    """Running arithmetic means: entry n is the mean of a_0..a_n.

    One compensated pass, O(horizon) total.
    """
    seq = a.prefix(horizon)
    return TransformedPrefix("cesaro", None, running_mean(seq))


def _binomial_prefix_dense(seq: np.ndarray, p: float) -> np.ndarray:
    horizon = len(seq) - 1
    vals = np.empty(horizon + 1)
    vals[0] = seq[0]
    with np.errstate(over="ignore", invalid="ignore"):
        for n in range(1, horizon + 1):
            vals[n] = _row_mass(n, p) @ seq[: n + 1]
    return vals


def _binomial_prefix_sparse(a: RealSequence, p: float, horizon: int) -> np.ndarray:
    idx, av = a.support(horizon)
    vals = np.zeros(horizon + 1)
    if horizon >= 0 and idx.size and idx[0] == 0:
        vals[0] = av[0]
    k = 0
    with np.errstate(over="ignore", invalid="ignore"):
        for n in range(1, horizon + 1):
            while k < idx.size and idx[k] <= n:
                k += 1
            if k == 0:
                continue
            logs = log_pmf_many(n, p, idx[:k])
            vals[n] = np.exp(logs) @ av[:k]
    return vals


def binomial_prefix(a: RealSequence, p: float, horizon: int) -> TransformedPrefix:
    """Binomially weighted means: entry n is sum_i B(n,i,p) * a_i.

    Dense sequences get a fresh PMF row per n (O(horizon^2) total); sparse
    sequences are weighted only on their declared support.
    """
    _check_prob(p)
    _check_horizon(horizon)
    if a.sparse:
        vals = _binomial_prefix_sparse(a, p, horizon)
    else:
        vals = _binomial_prefix_dense(a.prefix(horizon), p)
    return TransformedPrefix("binomial", p, vals)


def binomial_mean_at(a: RealSequence, p: float, n: int) -> float:
    """Single binomial-mean value at index n, without building the prefix."""
    _check_prob(p)
    _check_horizon(n)
    if a.sparse:
        idx, av = a.support(n)
        if idx.size == 0:
            return 0.0
        with np.errstate(over="ignore", invalid="ignore"):
            return float(np.exp(log_pmf_many(n, p, idx)) @ av)
    seq = a.prefix(n)
    if n == 0:
        return float(seq[0])
    with np.errstate(over="ignore", invalid="ignore"):
        return float(_row_mass(n, p) @ seq)


def pstar_prefix(a: RealSequence, p: float, horizon: int) -> TransformedPrefix:
    """Cesaro means of the binomial means (the two-stage averaging transform)."""
    binom = binomial_prefix(a, p, horizon)
    return TransformedPrefix("pstar", p, running_mean(binom.values))


def compose_check(a: RealSequence, p: float, q: float, horizon: int) -> float:
    """Max absolute gap between the q-mean of the p-means and the direct pq-mean.

    The two sides are identical in exact arithmetic, so the returned value is
    pure floating-point error.
    """
    _check_prob(p)
    _check_prob(q, "q")
    inner = binomial_prefix(a, p, horizon)
    two_step = binomial_prefix(
        RealSequence.from_values(inner.values, name=f"{a.name}^p"), q, horizon
    )
    direct = binomial_prefix(a, p * q, horizon)
    return float(np.max(np.abs(two_step.values - direct.values)))


def weights(n: int, p: float) -> WeightTable:
    """Weight table for the Cesaro-of-binomial transform at index n.

    Computed from the closed form w[i] = (1/p) * (1 - CDF_{n+1,p}(i)); the
    complement is accumulated right-to-left over the PMF row of n+1 trials so
    the right tail keeps relative accuracy (w[n] comes out as p**n instead of
    a cancelled 1 - 1).  Matches the direct double-sum definition.
    """
    if not isinstance(n, (int, np.integer)) or n < 0:
        raise ParameterDomainError(f"n must be a non-negative integer, got {n!r}")
    _check_prob(p)
    mass = _row_mass(n + 1, p)
    # survival[i] = P[Y > i] for Y ~ Binomial(n+1, p), i = 0..n
    survival = suffix_sums(mass[1:])
    w = np.clip(survival, 0.0, 1.0) / p
    return WeightTable(int(n), p, w)


def epsilon(n: int) -> float:
    """Half-width sqrt(n) * ln(n) of the weight-table drop window (1 for n < 2)."""
    if n < 0:
        raise ParameterDomainError(f"n must be non-negative, got {n!r}")
    if n < 2:
        return 1.0
    return math.sqrt(n) * math.log(n)


def split_xyz(a: RealSequence, p: float, n: int) -> SplitSums:
    """Split the weighted sum behind the Cesaro-of-binomial value at n into
    plateau (x), drop-window (y) and tail (z) blocks.

    Block boundaries floor(p n -/+ eps(n)) are clamped to [0, n]; empty
    blocks contribute 0, so x + y + z always covers indices 0..n exactly once.
    """
    _check_prob(p)
    _check_horizon(n)
    table = weights(n, p)
    seq = a.prefix(n)
    eps = epsilon(n)
    lo = math.floor(p * n - eps)  # last plateau index
    hi = math.floor(p * n + eps)  # first tail index
    terms = table.weights * seq
    x = math.fsum(terms[0 : min(lo, n) + 1]) if lo >= 0 else 0.0
    y_start, y_stop = max(lo + 1, 0), min(hi - 1, n) + 1
    y = math.fsum(terms[y_start:y_stop]) if y_stop > y_start else 0.0
    z = math.fsum(terms[max(hi, 0) : n + 1]) if hi <= n else 0.0
    return SplitSums(x, y, z, int(n), p)
