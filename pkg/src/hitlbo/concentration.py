"""Concentration calculators and sample-size solvers.

These are the closed-form tail bounds that justify averaging the maxima of
re-sampled reductions: a bounded-difference (McDiarmid) bound, the mean
concentration bound for m re-samples of a range-bounded objective, the
probability of expanding the optimal cell along a full root-to-leaf path,
and the smallest m that pushes that probability past a target.

All probabilities are clamped into [0, 1]; the underlying inequalities are
bounds, not exact probabilities, and clamping keeps downstream logic total.
Note the mean bound uses the exponent -2 m^2 t^2 / (b - a)^2 exactly as
printed in its source; with per-coordinate sensitivities c_i = (b - a) / m
the bounded-difference form agrees with it only at m = 1 and is weaker for
m > 1 (see the consistency tests).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence


def _clamp01(x: float) -> float:
    return min(max(x, 0.0), 1.0)


@dataclass(frozen=True)
class ConcentrationParams:
    """Validated parameter bundle: m re-samples, deviation t, value range
    [a, b], optional per-coordinate sensitivities, tree depth h."""

    m: int
    t: float
    a: float
    b: float
    c: tuple[float, ...] | None = None
    h: int = 0

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be >= 1")
        if self.t < 0:
            raise ValueError("t must be non-negative")
        if self.b < self.a:
            raise ValueError("need b >= a")
        if self.h < 0:
            raise ValueError("h must be non-negative")
        if self.c is not None and any(ci < 0 for ci in self.c):
            raise ValueError("sensitivities must be non-negative")

    def mean_bound(self) -> float:
        return mean_concentration_bound(self.m, self.t, self.a, self.b)

    def path_probability(self) -> float:
        return path_success(self.m, self.t, self.a, self.b, self.h)


def mcdiarmid_bound(c: Sequence[float], t: float) -> float:
    """Bounded-difference tail bound exp(-2 t^2 / sum c_i^2).

    A function whose value moves by at most c_i when coordinate i changes
    deviates from its expectation by at least t with at most this
    probability.  All-zero sensitivities make any positive deviation
    impossible, hence probability 0.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    if not c:
        raise ValueError("need at least one sensitivity")
    if any(ci < 0 for ci in c):
        raise ValueError("sensitivities must be non-negative")
    ssq = sum(ci * ci for ci in c)
    if ssq == 0:
        return 1.0 if t == 0 else 0.0
    return _clamp01(math.exp(-2.0 * t * t / ssq))


def mean_concentration_bound(m: int, t: float, a: float, b: float) -> float:
    """Tail bound exp(-2 m^2 t^2 / (b - a)^2) for the mean of m re-samples."""
    if m < 1:
        raise ValueError("m must be >= 1")
    if t < 0:
        raise ValueError("t must be non-negative")
    if b < a:
        raise ValueError("need b >= a")
    if b == a:
        return 1.0 if t == 0 else 0.0
    return _clamp01(math.exp(-2.0 * (m * t) ** 2 / (b - a) ** 2))


def path_success(m: int, t: float, a: float, b: float, h: int) -> float:
    """Probability (1 - mean bound)^h of staying on the optimal cell for a
    whole depth-h expansion path."""
    if h < 0:
        raise ValueError("h must be non-negative")
    if h == 0:
        return 1.0
    return _clamp01((1.0 - mean_concentration_bound(m, t, a, b)) ** h)


def required_samples(h: int, t: float, a: float, b: float, target: float) -> int:
    """Smallest m with path_success(m, t, a, b, h) > target.

    Uses doubling followed by binary search; path success is non-decreasing
    in m.  Raises if no m can satisfy the target (for example t = 0 with a
    positive target at positive depth).
    """
    if not 0 <= target < 1:
        raise ValueError("target must be in [0, 1)")
    if b <= a:
        raise ValueError("need b > a")
    if h == 0:
        return 1
    if t <= 0:
        raise ValueError(f"unsatisfiable: zero deviation cannot exceed target {target}")
    if path_success(1, t, a, b, h) > target:
        return 1
    lo = 1
    hi = 2
    while path_success(hi, t, a, b, h) <= target:
        lo = hi
        hi *= 2
        if hi > 1 << 62:  # pragma: no cover - parameter sanity stop
            raise ValueError("target unreachable within 2^62 samples")
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if path_success(mid, t, a, b, h) > target:
            hi = mid
        else:
            lo = mid
    return hi
