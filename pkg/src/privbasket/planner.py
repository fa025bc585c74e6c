"""Choosing distortion parameters before any data is distorted.

Estimates come from two closed forms: basic privacy at the expected
average support s0, and the sampling error of a reconstructed singleton
count. A (p, q) pair qualifies when privacy clears a floor and the
error stays within a slack factor of a reference setting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import ConfigError
from .privacy import basic_privacy

_NORMALIZATIONS = ("paper_printed", "exact")


def stddev_distorted_ones(n: float, dbsize: int, p: float, q: float) -> float:
    """Standard deviation of the distorted ones-count of an item with n
    true ones in a database of dbsize rows."""
    if not 0 <= n <= dbsize:
        raise ConfigError("n must lie in [0, dbsize]")
    if not 0.0 <= p <= 1.0 or not 0.0 <= q <= 1.0:
        raise ConfigError("p and q must lie in [0, 1]")
    return math.sqrt(n * p * (1.0 - p) + (dbsize - n) * (1.0 - q) * q)


def relative_error_estimate(
    p: float,
    q: float,
    s: float,
    dbsize: int,
    normalization: str = "paper_printed",
) -> float:
    """Predicted relative error of a reconstructed singleton count.

    "exact" is stddev / (n * |p+q-1|) with n = s * dbsize, the true
    relative standard error. "paper_printed" divides by sqrt(n) instead
    of n (it depends on dbsize only through 1/s), and is the form the
    reference tables were computed with, so it is the default.
    Returns inf when p + q = 1.
    """
    if normalization not in _NORMALIZATIONS:
        raise ConfigError(f"unknown normalization {normalization!r}")
    if not 0.0 < s <= 1.0:
        raise ConfigError("support must lie in (0, 1]")
    if dbsize < 1:
        raise ConfigError("dbsize must be >= 1")
    if not 0.0 <= p <= 1.0 or not 0.0 <= q <= 1.0:
        raise ConfigError("p and q must lie in [0, 1]")
    gap = abs(p + q - 1.0)
    if gap == 0.0:
        return math.inf
    if normalization == "paper_printed":
        return math.sqrt(p * (1.0 - p) + (1.0 / s - 1.0) * (1.0 - q) * q) / gap
    n = s * dbsize
    return stddev_distorted_ones(n, dbsize, p, q) / (n * gap)


def _default_p_grid() -> tuple[float, ...]:
    return tuple(round(0.1 * i, 10) for i in range(1, 10))


@dataclass(frozen=True)
class PlanThresholds:
    bp_min: float = 90.0
    error_slack: float = 1.05
    q_min: float = 0.95  # exclusive: only q strictly above survives
    p_grid: tuple[float, ...] = field(default_factory=_default_p_grid)
    q_grid: tuple[float, ...] = (0.96, 0.97, 0.98, 0.99)
    # None: use the estimate at (p, q) = (0.9, 0.9) as the reference
    error_reference: float | None = None
    normalization: str = "paper_printed"


@dataclass(frozen=True)
class PlanRow:
    p: float
    q: float
    bp: float
    error: float
    priv_ok: bool
    acc_ok: bool


def _reference(s0: float, dbsize: int, thresholds: PlanThresholds) -> float:
    if thresholds.error_reference is not None:
        return thresholds.error_reference
    return relative_error_estimate(0.9, 0.9, s0, dbsize, thresholds.normalization)


def plan_report(
    s0: float, dbsize: int, thresholds: PlanThresholds = PlanThresholds()
) -> list[PlanRow]:
    """Privacy and accuracy estimates for the full grid, q descending
    then p ascending. Flags carry the two filter outcomes; grid
    membership additionally requires q > q_min."""
    ref = _reference(s0, dbsize, thresholds)
    limit = ref * thresholds.error_slack
    rows = []
    for q in sorted(set(thresholds.q_grid), reverse=True):
        for p in sorted(set(thresholds.p_grid)):
            bp = basic_privacy(p, q, s0, mode="simplified")
            err = relative_error_estimate(p, q, s0, dbsize, thresholds.normalization)
            rows.append(
                PlanRow(
                    p=p,
                    q=q,
                    bp=bp,
                    error=err,
                    priv_ok=bp >= thresholds.bp_min,
                    acc_ok=err <= limit,
                )
            )
    return rows


def candidate_grid(
    s0: float, dbsize: int, thresholds: PlanThresholds = PlanThresholds()
) -> list[tuple[float, float]]:
    """(p, q) pairs passing all three filters, sorted q descending then
    p ascending (most protective zeros first)."""
    return [
        (r.p, r.q)
        for r in plan_report(s0, dbsize, thresholds)
        if r.priv_ok and r.acc_ok and r.q > thresholds.q_min
    ]
