"""Convex-envelope ironing, rectangle pairing, smoothing, final thinning."""

from __future__ import annotations

import random
from fractions import Fraction

from fairsignal.ironing import (
    finalize,
    iron,
    monotone_fair_scheme,
    pair_rectangles,
    smooth,
)
from fairsignal.market import (
    SurplusProfile,
    ValueDistribution,
    is_efficient,
    is_monotone,
    scheme_surplus,
)
from fairsignal.splitmatch import split_and_match
from fairsignal.steps import integration_prefix, profile_step_function

from conftest import random_distribution

F = Fraction


def envelope_oracle(profile: SurplusProfile) -> list[Fraction]:
    """Independent ironed values: hull as a minimum over all chords."""
    dist = profile.dist
    xs = [F(0)]
    ys = [F(0)]
    for f, cs in zip(dist.masses, profile.surpluses):
        xs.append(xs[-1] + f)
        ys.append(ys[-1] + f * cs)

    def envelope(x: Fraction) -> Fraction:
        best = None
        for i in range(len(xs)):
            for j in range(i, len(xs)):
                if not xs[i] <= x <= xs[j]:
                    continue
                if i == j:
                    cand = ys[i]
                else:
                    cand = ys[i] + (ys[j] - ys[i]) * (x - xs[i]) / (xs[j] - xs[i])
                if best is None or cand < best:
                    best = cand
        return best

    return [
        (envelope(xs[i + 1]) - envelope(xs[i])) / dist.masses[i]
        for i in range(dist.n)
    ]


class TestIron:
    def test_monotone_profile_untouched(self, running_example):
        profile = SurplusProfile(running_example, (F(0), F(1), F(2), F(3)))
        ironed = iron(profile)
        assert ironed.ironed_values == profile.surpluses
        assert ironed.intervals == ()
        assert ironed.contact_points == (F(0),) + running_example.cdf

    def test_greedy_output_running_example(self, running_example):
        profile = split_and_match(running_example).surplus_profile()
        ironed = iron(profile)
        assert ironed.ironed_values == (F(0), F(1, 2), F(3, 4), F(3, 4))
        assert len(ironed.intervals) == 1
        interval = ironed.intervals[0]
        assert (interval.left, interval.right) == (F(1, 2), F(1))
        assert interval.level == F(3, 4)
        assert interval.classes == (2, 3)

    def test_two_interval_profile(self, running_example):
        # hand-computed hull with two separate sagging sections
        profile = SurplusProfile(running_example, (F(2), F(0), F(4), F(0)))
        ironed = iron(profile)
        assert ironed.ironed_values == (F(1), F(1), F(2), F(2))
        assert [
            (iv.left, iv.right, iv.level, iv.classes) for iv in ironed.intervals
        ] == [
            (F(0), F(1, 2), F(1), (0, 1)),
            (F(1, 2), F(1), F(2), (2, 3)),
        ]

    def test_prefix_preserved_at_contacts(self):
        rng = random.Random(59)
        for _ in range(100):
            dist = random_distribution(rng)
            profile = split_and_match(dist).surplus_profile()
            ironed = iron(profile)
            step = profile_step_function(profile)
            # the envelope never exceeds the cumulative surplus anywhere
            # (both are piecewise linear, so class boundaries suffice)
            for m in dist.cdf:
                assert ironed.envelope_at(m) <= integration_prefix(step, m)
            for m in ironed.contact_points:
                if m > 0:
                    assert ironed.envelope_at(m) == integration_prefix(step, m)

    def test_matches_chord_oracle(self):
        rng = random.Random(61)
        for _ in range(100):
            dist = random_distribution(rng)
            profile = split_and_match(dist).surplus_profile()
            assert list(iron(profile).ironed_values) == envelope_oracle(profile)

    def test_ironed_values_weakly_increasing(self):
        rng = random.Random(67)
        for _ in range(100):
            profile = split_and_match(random_distribution(rng)).surplus_profile()
            vals = iron(profile).ironed_values
            assert all(a <= b for a, b in zip(vals, vals[1:]))


class TestPairRectangles:
    def test_running_example_single_pair(self, running_example):
        profile = split_and_match(running_example).surplus_profile()
        ironed = iron(profile)
        pairs = pair_rectangles(profile, ironed, 0)
        assert len(pairs) == 1
        p = pairs[0]
        assert (p.plus_index, p.minus_index) == (2, 3)
        assert (p.plus_width, p.plus_height) == (F(1, 4), F(1, 4))
        assert (p.minus_width, p.minus_height) == (F(1, 4), F(1, 4))
        assert p.area == F(1, 16)

    def test_no_intervals_means_no_pairs(self, running_example):
        profile = SurplusProfile(running_example, (F(0), F(1), F(2), F(3)))
        assert iron(profile).intervals == ()

    def test_area_balance_and_ordering(self):
        rng = random.Random(71)
        multi_pair_intervals = 0
        for _ in range(150):
            dist = random_distribution(rng)
            profile = split_and_match(dist).surplus_profile()
            ironed = iron(profile)
            for t, interval in enumerate(ironed.intervals):
                pairs = pair_rectangles(profile, ironed, t)
                if len(pairs) >= 2:
                    multi_pair_intervals += 1
                plus_area = sum((p.plus_width * p.plus_height for p in pairs), F(0))
                minus_area = sum((p.minus_width * p.minus_height for p in pairs), F(0))
                assert plus_area == minus_area
                excess = sum(
                    (
                        (profile.surpluses[i] - interval.level) * dist.masses[i]
                        for i in interval.classes
                        if profile.surpluses[i] > interval.level
                    ),
                    F(0),
                )
                assert plus_area == excess
                for p in pairs:
                    assert p.plus_width * p.plus_height == p.minus_width * p.minus_height
                    assert p.plus_left + p.plus_width <= p.minus_left
        assert multi_pair_intervals > 0

    def test_interval_prefixes_run_surplus_rich(self):
        # within an interval, cumulative excess never trails cumulative
        # deficit, which is what lets the sweep pair left to right
        rng = random.Random(77)
        for _ in range(150):
            dist = random_distribution(rng)
            profile = split_and_match(dist).surplus_profile()
            ironed = iron(profile)
            for interval in ironed.intervals:
                plus = minus = F(0)
                for i in interval.classes:
                    gap = (profile.surpluses[i] - interval.level) * dist.masses[i]
                    if gap > 0:
                        plus += gap
                    else:
                        minus -= gap
                    assert plus >= minus


class TestSmooth:
    def test_running_example_noop(self, running_example):
        # the only deficit is shallower than half the level
        base = split_and_match(running_example)
        profile = base.surplus_profile()
        ironed = iron(profile)
        pairs = tuple(
            pair_rectangles(profile, ironed, t) for t in range(len(ironed.intervals))
        )
        assert 2 * pairs[0][0].minus_height <= ironed.intervals[0].level
        smoothed = smooth(base, ironed, pairs)
        assert smoothed.surplus_values() == base.surplus_values()
        assert smoothed.binaries == base.binaries

    def test_monotone_profile_identity(self):
        d = ValueDistribution.from_pairs([1, 4], [F(1, 2), F(1, 2)])
        base = split_and_match(d)
        ironed = iron(base.surplus_profile())
        smoothed = smooth(base, ironed, ())
        assert smoothed.binaries == base.binaries
        assert smoothed.singletons == base.singletons

    def test_poor_classes_get_lifted(self):
        rng = random.Random(73)
        checked = 0
        for _ in range(300):
            dist = random_distribution(rng)
            base = split_and_match(dist)
            profile = base.surplus_profile()
            ironed = iron(profile)
            pairs = tuple(
                pair_rectangles(profile, ironed, t)
                for t in range(len(ironed.intervals))
            )
            smoothed = smooth(base, ironed, pairs)
            after = smoothed.surplus_values()
            for i in range(dist.n):
                assert 2 * after[i] >= ironed.ironed_values[i]
            if any(
                2 * profile.surpluses[i] < ironed.ironed_values[i]
                for i in range(dist.n)
            ):
                checked += 1
            for i, f in enumerate(dist.masses):
                assert smoothed.mass_on(i) == f
        assert checked > 0  # corpus really exercises the lifting branch


class TestFinalize:
    def test_running_example_weights(self, running_example):
        res = monotone_fair_scheme(running_example)
        assert res.final.surplus_values() == (F(0), F(1, 4), F(3, 8), F(3, 8))
        weights = {(b.giver, b.taker): b.weight for b in res.final.binaries}
        assert weights == {
            (0, 1): F(1, 8),
            (1, 2): F(5, 64),
            (2, 3): F(9, 80),
        }

    def test_identity_when_already_half(self, running_example):
        res = monotone_fair_scheme(running_example)
        again = finalize(res.final, res.ironed)
        assert again.surplus_values() == res.final.surplus_values()
        assert again.binaries == res.final.binaries

    def test_five_value_pipeline(self, fig3_instance):
        res = monotone_fair_scheme(fig3_instance)
        target = envelope_oracle(res.base.surplus_profile())
        assert [2 * cs for cs in res.final.surplus_values()] == target
        scheme = res.final.to_signaling_scheme()
        assert is_efficient(scheme)
        assert is_monotone(scheme_surplus(scheme))

    def test_pipeline_on_random_instances(self):
        rng = random.Random(79)
        for _ in range(150):
            dist = random_distribution(rng)
            res = monotone_fair_scheme(dist)
            final = res.final.surplus_values()
            assert all(
                2 * cs == s for cs, s in zip(final, res.ironed.ironed_values)
            )
            scheme = res.final.to_signaling_scheme()
            assert is_efficient(scheme)
            assert is_monotone(scheme_surplus(scheme))
