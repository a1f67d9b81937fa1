"""Step functions on (0, 1], prefix sums, and majorization comparisons.

A surplus profile induces a step function mapping population quantiles to
expected surplus.  Two prefix sums drive all comparisons here: the plain
integral from 0, and the integral after rearranging segments in ascending
order (the least surplus any sub-population of a given mass can carry).
Both are piecewise linear in the mass argument, so a finite grid of
breakpoints certifies inequalities for every mass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Union

from .market import MarketError, SurplusProfile

WELFARE_KINDS = ("utilitarian", "nash", "maxmin")


@dataclass(frozen=True)
class StepFunction:
    """Right-continuous-from-the-left step function on (0, 1].

    ``breakpoints`` are the right edges of the segments, strictly increasing
    and ending at exactly 1; ``values`` holds one non-negative value per
    segment.
    """

    breakpoints: tuple[Fraction, ...]
    values: tuple[Fraction, ...]

    def __post_init__(self):
        if not self.breakpoints:
            raise MarketError("step function needs at least one segment")
        if len(self.breakpoints) != len(self.values):
            raise MarketError("one value per segment required")
        prev = Fraction(0)
        for b in self.breakpoints:
            if b <= prev:
                raise MarketError("breakpoints must be strictly increasing")
            prev = b
        if self.breakpoints[-1] != 1:
            raise MarketError("last breakpoint must be exactly 1")
        for v in self.values:
            if v < 0:
                raise MarketError("segment values must be non-negative")

    def segments(self) -> list[tuple[Fraction, Fraction, Fraction]]:
        """(left, right, value) triples with left-open segments."""
        out = []
        left = Fraction(0)
        for right, value in zip(self.breakpoints, self.values):
            out.append((left, right, value))
            left = right
        return out

    def value_at(self, x: Fraction) -> Fraction:
        """Value on the segment containing x (segments are left-open)."""
        if not 0 < x <= 1:
            raise MarketError(f"argument {x} outside (0, 1]")
        for right, value in zip(self.breakpoints, self.values):
            if x <= right:
                return value
        raise AssertionError("unreachable")


def profile_step_function(profile: SurplusProfile) -> StepFunction:
    """Step function of a surplus profile: segment i spans value i's mass."""
    return StepFunction(profile.dist.cdf, profile.surpluses)


def integration_prefix(f: StepFunction, m: Fraction) -> Fraction:
    """Integral of f over (0, m]."""
    if not 0 < m <= 1:
        raise MarketError(f"prefix mass {m} outside (0, 1]")
    total = Fraction(0)
    for left, right, value in f.segments():
        if m <= left:
            break
        total += value * (min(m, right) - left)
    return total


def _ascending_segments(f: StepFunction) -> list[tuple[Fraction, Fraction]]:
    """(width, value) pairs sorted by value ascending, equal values merged."""
    widths: dict[Fraction, Fraction] = {}
    for left, right, value in f.segments():
        widths[value] = widths.get(value, Fraction(0)) + (right - left)
    return [(widths[v], v) for v in sorted(widths)]


def sorted_prefix(f: StepFunction, m: Fraction) -> Fraction:
    """Integral over (0, m] after rearranging segments in ascending order.

    Equals the minimum total surplus carried by any measurable selection of
    mass m.
    """
    if not 0 < m <= 1:
        raise MarketError(f"prefix mass {m} outside (0, 1]")
    total = Fraction(0)
    remaining = m
    for width, value in _ascending_segments(f):
        take = min(width, remaining)
        total += take * value
        remaining -= take
        if remaining == 0:
            break
    return total


def sorted_breakpoints(f: StepFunction) -> tuple[Fraction, ...]:
    """Masses at which the ascending rearrangement changes value."""
    out = []
    acc = Fraction(0)
    for width, _ in _ascending_segments(f):
        acc += width
        out.append(acc)
    return tuple(out)


def default_alpha_grid(f1: StepFunction, f2: StepFunction) -> tuple[Fraction, ...]:
    """Grid sufficient to certify sorted-prefix domination for every mass.

    Both sorted prefix sums are piecewise linear between the union of their
    rearrangement breakpoints (and vanish at 0), so the ratio is monotone on
    each cell and extremes occur on this grid.
    """
    grid = set(f1.breakpoints) | set(f2.breakpoints)
    grid |= set(sorted_breakpoints(f1)) | set(sorted_breakpoints(f2))
    return tuple(sorted(grid))


def alpha_between(
    f1: StepFunction,
    f2: StepFunction,
    m_grid: Optional[Iterable[Fraction]] = None,
) -> Union[Fraction, float]:
    """Smallest alpha with alpha * PF(f1, m) >= PF(f2, m) on the grid.

    Returns math.inf when f2 carries surplus at a mass where f1 carries
    none.  With the default grid the result certifies the inequality for
    every mass in (0, 1].
    """
    grid = tuple(m_grid) if m_grid is not None else default_alpha_grid(f1, f2)
    alpha: Union[Fraction, float] = Fraction(0)
    for m in grid:
        lhs = sorted_prefix(f1, m)
        rhs = sorted_prefix(f2, m)
        if rhs == 0:
            continue
        if lhs == 0:
            return math.inf
        ratio = rhs / lhs
        if ratio > alpha:
            alpha = ratio
    return alpha


def evaluate_welfare(profile: SurplusProfile, kind: str) -> Union[Fraction, float]:
    """Welfare of the per-buyer surplus allocation, mass-weighted.

    utilitarian: weighted sum (exact); maxmin: minimum over value classes
    (exact); nash: weighted geometric mean, computed in floating point via
    logs, with 0 whenever some class earns nothing.
    """
    if kind not in WELFARE_KINDS:
        raise ValueError(f"unknown welfare kind {kind!r}")
    masses = profile.dist.masses
    surpluses = profile.surpluses
    if kind == "utilitarian":
        return sum((f * cs for f, cs in zip(masses, surpluses)), Fraction(0))
    if kind == "maxmin":
        return min(surpluses)
    if any(cs == 0 for cs in surpluses):
        return 0.0
    return math.exp(sum(float(f) * math.log(cs) for f, cs in zip(masses, surpluses)))
