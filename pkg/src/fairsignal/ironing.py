"""Ironing and smoothing: from the greedy decomposition to a monotone scheme.

The surplus step function of the greedy decomposition is ironed by taking
the lower convex envelope of its cumulative integral; the envelope's
derivative is a weakly increasing step function that agrees with the
original integral at every contact point.  Inside each ironing interval the
surplus excess above the ironed level is matched to the deficit below it by
equal-area rectangles, which drive a mass-reshuffling pass lifting every
poor class to at least half the ironed level.  A final thinning pass then
cuts every class down to exactly half the ironed level, yielding a monotone
efficient scheme.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .market import (
    InvariantViolation,
    MarketError,
    SurplusProfile,
    ValueDistribution,
)
from .splitmatch import (
    BinarySignalEntry,
    DecomposedScheme,
    SingletonEntry,
    split_and_match,
)


@dataclass(frozen=True)
class IroningInterval:
    """Maximal open interval where the envelope lies strictly below F."""

    left: Fraction
    right: Fraction
    level: Fraction
    classes: tuple[int, ...]


@dataclass(frozen=True)
class IronedFunction:
    """Lower convex envelope of the cumulative surplus and its derivative."""

    profile: SurplusProfile
    cumulative: tuple[tuple[Fraction, Fraction], ...]
    envelope: tuple[tuple[Fraction, Fraction], ...]
    ironed_values: tuple[Fraction, ...]
    contact_points: tuple[Fraction, ...]
    intervals: tuple[IroningInterval, ...]

    def envelope_at(self, x: Fraction) -> Fraction:
        for (x0, y0), (x1, y1) in zip(self.envelope, self.envelope[1:]):
            if x0 <= x <= x1:
                return y0 + (y1 - y0) * (x - x0) / (x1 - x0)
        raise MarketError(f"argument {x} outside [0, 1]")


def _lower_hull(points: Sequence[tuple[Fraction, Fraction]]):
    hull: list[tuple[Fraction, Fraction]] = []
    for p in points:
        while len(hull) >= 2:
            (x0, y0), (x1, y1) = hull[-2], hull[-1]
            # pop the middle point when it is on or above the chord
            if (y1 - y0) * (p[0] - x1) >= (p[1] - y1) * (x1 - x0):
                hull.pop()
            else:
                break
        hull.append(p)
    return hull


def iron(profile: SurplusProfile) -> IronedFunction:
    """Monotone rewrite of the surplus function via the convex envelope.

    The cumulative integral F is piecewise linear with vertices at the
    class boundaries, so its lower convex envelope is attained on that
    vertex set and a single hull sweep computes it.  The derivative is
    constant on each ironing interval and equals the original surplus
    elsewhere; values at discontinuities are left limits.
    """
    dist = profile.dist
    xs = [Fraction(0)]
    ys = [Fraction(0)]
    for f, cs in zip(dist.masses, profile.surpluses):
        xs.append(xs[-1] + f)
        ys.append(ys[-1] + f * cs)
    vertices = list(zip(xs, ys))
    hull = _lower_hull(vertices)

    def hull_value(x: Fraction) -> Fraction:
        for (x0, y0), (x1, y1) in zip(hull, hull[1:]):
            if x0 <= x <= x1:
                return y0 + (y1 - y0) * (x - x0) / (x1 - x0)
        return ys[-1] if x == xs[-1] else Fraction(0)

    contact = [i for i, (x, y) in enumerate(vertices) if hull_value(x) == y]
    intervals = []
    ironed = list(profile.surpluses)
    for a, b in zip(contact, contact[1:]):
        if b == a + 1:
            continue
        left, right = xs[a], xs[b]
        level = (ys[b] - ys[a]) / (right - left)
        classes = tuple(range(a, b))
        for i in classes:
            ironed[i] = level
        intervals.append(IroningInterval(left, right, level, classes))
    for lo, hi in zip(ironed, ironed[1:]):
        if lo > hi:
            raise InvariantViolation("ironed surplus must be weakly increasing")
    return IronedFunction(
        profile=profile,
        cumulative=tuple(vertices),
        envelope=tuple(hull),
        ironed_values=tuple(ironed),
        contact_points=tuple(xs[i] for i in contact),
        intervals=tuple(intervals),
    )


@dataclass(frozen=True)
class RectanglePair:
    """Equal-area excess/deficit rectangles inside one ironing interval.

    The plus rectangle sits above the ironed level on a single class with
    surplus above it; the minus rectangle sits below the level, further
    right, on a class with surplus beneath it.
    """

    plus_index: int
    minus_index: int
    plus_left: Fraction
    plus_width: Fraction
    plus_height: Fraction
    minus_left: Fraction
    minus_width: Fraction
    minus_height: Fraction

    @property
    def area(self) -> Fraction:
        return self.plus_width * self.plus_height


def pair_rectangles(
    profile: SurplusProfile, ironed: IronedFunction, t: int
) -> tuple[RectanglePair, ...]:
    """Sweep interval t left to right, matching excess area to deficit area.

    Each step takes the smaller of the two frontier rectangles' remaining
    areas, so one frontier advances per step and the total excess equals
    the total deficit exactly.
    """
    interval = ironed.intervals[t]
    dist = profile.dist
    level = interval.level
    plus = []
    minus = []
    for i in interval.classes:
        left = dist.cdf_before(i)
        right = left + dist.masses[i]
        cs = profile.surpluses[i]
        if cs > level:
            plus.append((i, left, right, cs - level))
        elif cs < level:
            minus.append((i, left, right, level - cs))
    pairs = []
    pp = pm = 0
    x_p = plus[0][1] if plus else None
    x_m = minus[0][1] if minus else None
    while pp < len(plus) and pm < len(minus):
        ip, _, right_p, h_p = plus[pp]
        im, _, right_m, h_m = minus[pm]
        area = min((right_p - x_p) * h_p, (right_m - x_m) * h_m)
        w_p = area / h_p
        w_m = area / h_m
        if x_p + w_p > x_m:
            raise InvariantViolation("excess rectangle must lie left of deficit")
        pairs.append(
            RectanglePair(ip, im, x_p, w_p, h_p, x_m, w_m, h_m)
        )
        x_p += w_p
        x_m += w_m
        if x_p == right_p:
            pp += 1
            x_p = plus[pp][1] if pp < len(plus) else None
        if x_m == right_m:
            pm += 1
            x_m = minus[pm][1] if pm < len(minus) else None
    if pp < len(plus) or pm < len(minus):
        raise InvariantViolation("excess and deficit areas must balance exactly")
    return tuple(pairs)


def _consolidated_singletons(
    weights_by_index: dict[int, Fraction]
) -> tuple[SingletonEntry, ...]:
    return tuple(
        SingletonEntry(i, w) for i, w in sorted(weights_by_index.items()) if w > 0
    )


def _assemble(
    dist: ValueDistribution,
    binaries: Sequence[BinarySignalEntry],
    singleton_weights: dict[int, Fraction],
) -> DecomposedScheme:
    """Build a scheme, covering any per-value mass deficit with singletons."""
    for w in singleton_weights.values():
        if w < 0:
            raise InvariantViolation("singleton weight went negative")
    used = [Fraction(0)] * dist.n
    for b in binaries:
        used[b.giver] += b.giver_mass(dist)
        used[b.taker] += b.taker_mass(dist)
    for i, w in singleton_weights.items():
        used[i] += w
    weights = dict(singleton_weights)
    for i, f in enumerate(dist.masses):
        residual = f - used[i]
        if residual < 0:
            raise InvariantViolation(
                f"value index {i} is oversubscribed by {-residual}"
            )
        if residual > 0:
            weights[i] = weights.get(i, Fraction(0)) + residual
    return DecomposedScheme(dist, tuple(binaries), _consolidated_singletons(weights))


def smooth(
    scheme: DecomposedScheme,
    ironed: IronedFunction,
    pairings: Sequence[Sequence[RectanglePair]],
) -> DecomposedScheme:
    """Lift every class below half the ironed level up to at least half.

    For each rectangle pair whose deficit class earns less than half the
    level: collect taker mass on the deficit value by scaling down the
    singletons and binaries that deliver it, collect giver mass by scaling
    down the binaries feeding the excess value, and rebuild equal-revenue
    binaries from the collected givers onto the deficit value.  Leftover
    mass returns as singletons, so the mixture still matches the prior.
    """
    dist = scheme.dist
    values = dist.values
    bin_weights = [b.weight for b in scheme.binaries]
    orig_sing: dict[int, Fraction] = {}
    for s in scheme.singletons:
        orig_sing[s.index] = orig_sing.get(s.index, Fraction(0)) + s.weight
    sing_weights = dict(orig_sing)
    new_binaries: list[BinarySignalEntry] = []
    for interval, pairs in zip(ironed.intervals, pairings):
        level = interval.level
        for pair in pairs:
            if 2 * pair.minus_height <= level:
                continue
            vm = pair.minus_index
            vp = pair.plus_index
            taker_cut = pair.minus_width / dist.masses[vm]
            for j, b in enumerate(scheme.binaries):
                if b.taker == vm:
                    bin_weights[j] -= b.weight * taker_cut
            if vm in sing_weights:
                sing_weights[vm] -= orig_sing[vm] * taker_cut
            giver_cut = (
                pair.plus_width
                / dist.masses[vp]
                * (pair.plus_height / (level + pair.plus_height))
            )
            for j, b in enumerate(scheme.binaries):
                if b.taker != vp:
                    continue
                removed = b.weight * giver_cut
                bin_weights[j] -= removed
                g = b.giver
                new_weight = (
                    removed
                    * (1 - values[g] / values[vp])
                    / (1 - values[g] / values[vm])
                )
                new_binaries.append(BinarySignalEntry(g, vm, new_weight))
    for w in bin_weights:
        if w < 0:
            raise InvariantViolation("binary signal weight went negative")
    survivors = [
        BinarySignalEntry(b.giver, b.taker, w)
        for b, w in zip(scheme.binaries, bin_weights)
        if w > 0
    ]
    return _assemble(dist, survivors + new_binaries, sing_weights)


def finalize(scheme: DecomposedScheme, ironed: IronedFunction) -> DecomposedScheme:
    """Cut every class down to exactly half the ironed surplus.

    Classes above the half level lose the matching fraction of every binary
    signal in which they are the taker; the removed weight splits into
    singletons on the giver and taker values, which carry no surplus.
    """
    dist = scheme.dist
    current = scheme.surplus_values()
    target = ironed.ironed_values
    for cs, s in zip(current, target):
        if 2 * cs < s:
            raise InvariantViolation("smoothed surplus fell below half the level")
    bin_weights = [b.weight for b in scheme.binaries]
    sing_weights: dict[int, Fraction] = {}
    for s in scheme.singletons:
        sing_weights[s.index] = sing_weights.get(s.index, Fraction(0)) + s.weight
    for i in range(dist.n):
        if 2 * current[i] == target[i]:
            continue
        cut = (2 * current[i] - target[i]) / (2 * current[i])
        for j, b in enumerate(scheme.binaries):
            if b.taker != i:
                continue
            removed = b.weight * cut
            bin_weights[j] -= removed
            sing_weights[b.giver] = (
                sing_weights.get(b.giver, Fraction(0))
                + removed * b.giver_fraction(dist)
            )
            sing_weights[i] = (
                sing_weights.get(i, Fraction(0)) + removed * b.taker_fraction(dist)
            )
    survivors = [
        BinarySignalEntry(b.giver, b.taker, w)
        for b, w in zip(scheme.binaries, bin_weights)
        if w > 0
    ]
    return _assemble(dist, survivors, sing_weights)


@dataclass(frozen=True)
class FairSchemeResult:
    """All intermediate artifacts of the monotone-scheme pipeline."""

    base: DecomposedScheme
    ironed: IronedFunction
    pairings: tuple[tuple[RectanglePair, ...], ...]
    smoothed: DecomposedScheme
    final: DecomposedScheme


def monotone_fair_scheme(dist: ValueDistribution) -> FairSchemeResult:
    """Full pipeline: decompose, iron, smooth, and thin to half the level.

    The result is efficient and monotone with per-class surplus exactly
    half the ironed surplus; each stage's mass accounting is re-verified.
    """
    base = split_and_match(dist)
    profile = base.surplus_profile()
    ironed = iron(profile)
    pairings = tuple(
        pair_rectangles(profile, ironed, t) for t in range(len(ironed.intervals))
    )
    smoothed = smooth(base, ironed, pairings)
    final = finalize(smoothed, ironed)
    for stage in (base, smoothed, final):
        for i, f in enumerate(dist.masses):
            if stage.mass_on(i) != f:
                raise InvariantViolation(f"stage mixture differs at value index {i}")
    for cs, s in zip(final.surplus_values(), ironed.ironed_values):
        if 2 * cs != s:
            raise InvariantViolation("final surplus must be half the ironed level")
    return FairSchemeResult(base, ironed, pairings, smoothed, final)
