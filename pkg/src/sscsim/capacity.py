"""Closed-form rates, bounds, and exponents for the shotgun-sequencing channel.

Everything here is stateless float math in bits per input symbol, written as
functions of the coverage depth c and the normalized read length lbar.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ParameterError

RATE_KINDS = (
    "ssc_capacity",
    "shuf_capacity",
    "coverage_bound",
    "omniscient_genie",
    "constrained_genie",
    "no_merge_rate",
    "merge_cost_exponent",
    "lander_waterman",
)


def _check_c_lbar(c: float, lbar: float) -> None:
    if c <= 0:
        raise ParameterError(f"c must be positive, got {c}")
    if lbar <= 0:
        raise ParameterError(f"lbar must be positive, got {lbar}")


def ssc_capacity_raw(c: float, lbar: float) -> float:
    """1 - e^{-c (1 - 1/lbar)} without the positive-part clamp.

    The unclamped value is what the converse algebra produces; it is negative
    for lbar < 1.
    """
    _check_c_lbar(c, lbar)
    return 1.0 - math.exp(-c * (1.0 - 1.0 / lbar))


def ssc_capacity(c: float, lbar: float) -> float:
    """Channel capacity (1 - e^{-c (1 - 1/lbar)})^+; zero for lbar <= 1."""
    return max(0.0, ssc_capacity_raw(c, lbar))


def shuffling_capacity(c: float, lbar: float) -> float:
    """Capacity (1 - e^{-c})(1 - 1/lbar) of sampling from disjoint length-L strings."""
    _check_c_lbar(c, lbar)
    if lbar <= 1.0:
        return 0.0
    return (1.0 - math.exp(-c)) * (1.0 - 1.0 / lbar)


def coverage_fraction(c: float) -> float:
    """Expected fraction of covered positions, 1 - e^{-c}; an outer capacity bound."""
    if c <= 0:
        raise ParameterError(f"c must be positive, got {c}")
    return 1.0 - math.exp(-c)


def omniscient_genie_bound(c: float, lbar: float) -> float:
    """Upper bound (1 - e^{-c}) - (c/lbar) e^{-c} from handing the decoder all merges."""
    _check_c_lbar(c, lbar)
    return (1.0 - math.exp(-c)) - (c / lbar) * math.exp(-c)


def sigma_from_delta(delta: float, lbar: float) -> float:
    """Fraction of the read informative after thresholded merging, 1 - delta/lbar."""
    if lbar <= 0:
        raise ParameterError(f"lbar must be positive, got {lbar}")
    return 1.0 - delta / lbar


def constrained_genie_bound(c: float, lbar: float, sigma: float) -> float:
    """Upper bound (1 - e^{-c s}) + c (1 - s) e^{-c s} - (c/lbar) e^{-c s}.

    sigma in (0, 1] parameterizes how much of each read remains after the
    genie refuses to merge small overlaps; sigma = 1 recovers the omniscient
    bound, and the minimum over sigma is attained at 1 - 1/lbar.
    """
    _check_c_lbar(c, lbar)
    if not (0.0 < sigma <= 1.0):
        raise ParameterError(f"sigma must lie in (0, 1], got {sigma}")
    e = math.exp(-c * sigma)
    return (1.0 - e) + c * (1.0 - sigma) * e - (c / lbar) * e


def minimize_constrained_genie(c: float, lbar: float, tol: float = 1e-7) -> tuple[float, float]:
    """Golden-section minimization of the constrained bound over sigma in (0, 1].

    Returns (sigma_star, minimum value); the bracket shrinks below ``tol``.
    """
    _check_c_lbar(c, lbar)
    f = lambda s: constrained_genie_bound(c, lbar, s)
    lo, hi = 1e-9, 1.0
    inv_gold = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = hi - inv_gold * (hi - lo)
    x2 = lo + inv_gold * (hi - lo)
    f1, f2 = f(x1), f(x2)
    while hi - lo > tol:
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - inv_gold * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + inv_gold * (hi - lo)
            f2 = f(x2)
    s = 0.5 * (lo + hi)
    return s, f(s)


def no_merge_rate(c: float, lbar: float) -> float:
    """Rate 1 - e^{-c} - c/lbar achievable without merging reads; raw, may be negative."""
    _check_c_lbar(c, lbar)
    return 1.0 - math.exp(-c) - c / lbar


def merge_cost_exponent(c: float, lbar: float) -> float:
    """Exponential growth rate e^{-c (1 - 1/lbar)} - (c/lbar + 1) e^{-c} of the
    candidate-island count produced by the brute-force merge search; nonnegative."""
    _check_c_lbar(c, lbar)
    if lbar < 1:
        raise ParameterError(f"lbar must be >= 1, got {lbar}")
    return math.exp(-c * (1.0 - 1.0 / lbar)) - (c / lbar + 1.0) * math.exp(-c)


def rate_identity_residual(c: float, lbar: float) -> float:
    """Residual of the achievable-rate assembly; zero to machine precision.

    [(1 - e^{-c}) - (c/lbar) e^{-c} - merge_cost_exponent] - ssc_capacity_raw
    cancels algebraically, so any nonzero residual is numerical error.
    """
    assembled = (
        (1.0 - math.exp(-c))
        - (c / lbar) * math.exp(-c)
        - merge_cost_exponent(c, lbar)
    )
    return assembled - ssc_capacity_raw(c, lbar)


def lander_waterman_coverage(n: int, eps: float) -> float:
    """Coverage depth ln(n / eps) at which all positions are read w.p. 1 - eps."""
    if n < 2:
        raise ParameterError(f"n must be >= 2, got {n}")
    if not (0.0 < eps < 1.0):
        raise ParameterError(f"eps must lie in (0, 1), got {eps}")
    return math.log(n / eps)


@dataclass(frozen=True)
class RatePoint:
    """One (c, lbar) evaluation of a named rate expression."""

    c: float
    lbar: float
    value: float
    kind: str

    def __post_init__(self):
        if self.kind not in RATE_KINDS:
            raise ParameterError(f"unknown rate kind {self.kind!r}")
        if self.kind in ("ssc_capacity", "shuf_capacity", "coverage_bound"):
            if not (0.0 <= self.value <= 1.0):
                raise ParameterError(f"{self.kind} value {self.value} outside [0, 1]")


def capacity_curve(lbar: float, c_grid) -> list[RatePoint]:
    """Evaluates the five comparison curves on a coverage-depth grid.

    Per grid point: expected coverage, the shuffling capacity, the channel
    capacity, the omniscient-genie bound, and the no-merge rate clamped at 0.
    """
    points = []
    for c in c_grid:
        c = float(c)
        points.append(RatePoint(c, lbar, coverage_fraction(c), "coverage_bound"))
        points.append(RatePoint(c, lbar, shuffling_capacity(c, lbar), "shuf_capacity"))
        points.append(RatePoint(c, lbar, ssc_capacity(c, lbar), "ssc_capacity"))
        points.append(RatePoint(c, lbar, omniscient_genie_bound(c, lbar), "omniscient_genie"))
        points.append(RatePoint(c, lbar, max(0.0, no_merge_rate(c, lbar)), "no_merge_rate"))
    return points


def curve_rows(lbar: float, c_grid) -> list[dict]:
    """capacity_curve reshaped to one CSV-ready dict per grid point."""
    rows = []
    for c in c_grid:
        c = float(c)
        rows.append(
            {
                "c": c,
                "coverage": coverage_fraction(c),
                "c_shuf": shuffling_capacity(c, lbar),
                "c_ssc": ssc_capacity(c, lbar),
                "genie": omniscient_genie_bound(c, lbar),
                "no_merge": max(0.0, no_merge_rate(c, lbar)),
            }
        )
    return rows
