"""Greedy decomposition of a prior into equal-revenue binary signals.

Each value's mass is split into a giver half and a taker half.  The greedy
pass repeatedly pairs the lowest value with remaining giver budget to the
lowest higher value with remaining taker budget, emitting an equal-revenue
binary signal that exhausts at least one of the two budgets.  Leftover mass
becomes singleton signals.  The resulting scheme charges every buyer the
lowest value in their signal, so the item always sells.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .market import (
    MarketError,
    Signal,
    SignalingScheme,
    SurplusProfile,
    ValueDistribution,
)


@dataclass(frozen=True)
class BinarySignalEntry:
    """Equal-revenue binary signal on (v_giver, v_taker), weighted.

    The posterior puts mass 1 - v_g/v_t on the giver and v_g/v_t on the
    taker, so both posted prices yield revenue v_g and the seller charges
    the giver value.  The taker class therefore gains v_t - v_g.
    """

    giver: int
    taker: int
    weight: Fraction

    def __post_init__(self):
        if self.giver >= self.taker:
            raise MarketError("giver index must be below taker index")
        if self.weight <= 0:
            raise MarketError("weight must be positive")

    def giver_fraction(self, dist: ValueDistribution) -> Fraction:
        return 1 - dist.values[self.giver] / dist.values[self.taker]

    def taker_fraction(self, dist: ValueDistribution) -> Fraction:
        return dist.values[self.giver] / dist.values[self.taker]

    def giver_mass(self, dist: ValueDistribution) -> Fraction:
        return self.weight * self.giver_fraction(dist)

    def taker_mass(self, dist: ValueDistribution) -> Fraction:
        return self.weight * self.taker_fraction(dist)


@dataclass(frozen=True)
class SingletonEntry:
    index: int
    weight: Fraction

    def __post_init__(self):
        if self.weight <= 0:
            raise MarketError("weight must be positive")


@dataclass(frozen=True)
class DecomposedScheme:
    """A scheme made of equal-revenue binaries and singletons only."""

    dist: ValueDistribution
    binaries: tuple[BinarySignalEntry, ...]
    singletons: tuple[SingletonEntry, ...]

    def mass_on(self, index: int) -> Fraction:
        total = Fraction(0)
        for b in self.binaries:
            if b.giver == index:
                total += b.giver_mass(self.dist)
            elif b.taker == index:
                total += b.taker_mass(self.dist)
        for s in self.singletons:
            if s.index == index:
                total += s.weight
        return total

    def total_weight(self) -> Fraction:
        return sum((b.weight for b in self.binaries), Fraction(0)) + sum(
            (s.weight for s in self.singletons), Fraction(0)
        )

    def surplus_values(self) -> tuple[Fraction, ...]:
        """Expected surplus per value class; only taker mass contributes."""
        dist = self.dist
        totals = [Fraction(0)] * dist.n
        for b in self.binaries:
            gain = dist.values[b.taker] - dist.values[b.giver]
            totals[b.taker] += b.taker_mass(dist) * gain
        return tuple(t / f for t, f in zip(totals, dist.masses))

    def surplus_profile(self) -> SurplusProfile:
        return SurplusProfile(self.dist, self.surplus_values())

    def to_signaling_scheme(self) -> SignalingScheme:
        entries = []
        for b in self.binaries:
            signal = Signal(
                self.dist,
                (
                    (b.giver, b.giver_fraction(self.dist)),
                    (b.taker, b.taker_fraction(self.dist)),
                ),
            )
            entries.append((signal, b.weight))
        for s in self.singletons:
            entries.append((Signal.singleton(self.dist, s.index), s.weight))
        return SignalingScheme(self.dist, tuple(entries))


@dataclass
class HalfMassLedger:
    """Remaining giver/taker budgets, each starting at half the prior mass."""

    giver: list[Fraction]
    taker: list[Fraction]

    @classmethod
    def fresh(cls, dist: ValueDistribution) -> "HalfMassLedger":
        halves = [f / 2 for f in dist.masses]
        return cls(list(halves), list(halves))


def split_and_match(
    dist: ValueDistribution,
    trace: Optional[list[tuple[int, int, Fraction]]] = None,
) -> DecomposedScheme:
    """Decompose the prior into equal-revenue binaries plus singletons.

    Greedy pairing: the smallest index s with giver budget left is matched
    to the smallest index l > s with taker budget left; the signal weight is
    the largest value both budgets allow, so at least one budget hits zero
    each round.  ``trace`` collects (s, l, weight) triples when provided.
    """
    ledger = HalfMassLedger.fresh(dist)
    binaries: list[BinarySignalEntry] = []
    n = dist.n
    while True:
        s = next((i for i in range(n) if ledger.giver[i] > 0), None)
        if s is None:
            break
        l = next((i for i in range(s + 1, n) if ledger.taker[i] > 0), None)
        if l is None:
            break
        ratio = dist.values[s] / dist.values[l]
        weight = min(ledger.giver[s] / (1 - ratio), ledger.taker[l] / ratio)
        binaries.append(BinarySignalEntry(s, l, weight))
        ledger.giver[s] -= weight * (1 - ratio)
        ledger.taker[l] -= weight * ratio
        if trace is not None:
            trace.append((s, l, weight))
    singletons = []
    for i in range(n):
        leftover = ledger.giver[i] + ledger.taker[i]
        if leftover > 0:
            singletons.append(SingletonEntry(i, leftover))
    return DecomposedScheme(dist, tuple(binaries), tuple(singletons))


def truncated_upper_bound(dist: ValueDistribution, k: int) -> Fraction:
    """Largest surplus the k lowest value classes can jointly receive.

    Their total value minus the best revenue a posted price extracts from
    that sub-population alone; k is 1-based.
    """
    if not 1 <= k <= dist.n:
        raise MarketError(f"k must be in [1, {dist.n}], got {k}")
    total_value = sum(
        (dist.values[i] * dist.masses[i] for i in range(k)), Fraction(0)
    )
    best = Fraction(0)
    tail = Fraction(0)
    for i in range(k - 1, -1, -1):
        tail += dist.masses[i]
        rev = dist.values[i] * tail
        if rev > best:
            best = rev
    return total_value - best
