"""Batch front end: build schemes, verify guarantees, emit reports.

Exit codes: 0 success, 1 a requested guarantee failed, 2 malformed input,
3 internal invariant violation.  Reports are plain deterministic text on
stdout; tables can be exported as CSV or JSON for plotting.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction
from typing import Optional, Sequence

from . import fileio
from .ironing import monotone_fair_scheme
from .market import (
    InvariantViolation,
    MarketError,
    PlausibilityError,
    SignalingScheme,
    SurplusProfile,
    ValueDistribution,
    as_fraction,
    full_revelation,
    is_efficient,
    is_monotone,
    myerson,
    no_signal,
    scheme_revenue,
    scheme_surplus,
)
from .oracles import (
    adversary_grid,
    adversary_sorted_prefix,
    buyer_optimal_lb_instance,
    buyer_optimal_scheme,
    max_min_surplus_lp,
    universal_lb_instance,
)
from .splitmatch import split_and_match
from .steps import (
    WELFARE_KINDS,
    evaluate_welfare,
    integration_prefix,
    profile_step_function,
    sorted_prefix,
)

SCHEME_KINDS = ("splitmatch", "final", "buyeropt", "fullreveal", "nosignal")
REQUIREMENTS = ("efficient", "monotone", "majorized")
MAJORIZATION_FACTOR = 8

EXIT_OK = 0
EXIT_GUARANTEE_FAILED = 1
EXIT_BAD_INPUT = 2
EXIT_INVARIANT = 3


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


def _instance_lines(dist: ValueDistribution) -> list[str]:
    price, revenue = myerson(dist)
    return [
        f"instance: n={dist.n}",
        "values: [" + ", ".join(map(str, dist.values)) + "]",
        "masses: [" + ", ".join(map(str, dist.masses)) + "]",
        f"expected value: {dist.expected_value()}",
        f"myerson price: {price}",
        f"myerson revenue: {revenue}",
        "posted revenues: [" + ", ".join(map(str, dist.posted_revenues())) + "]",
    ]


def _scheme_lines(name: str, scheme: SignalingScheme) -> list[str]:
    profile = scheme_surplus(scheme)
    lines = [
        f"scheme: {name}",
        f"signals: {len(scheme.entries)}",
        f"revenue: {scheme_revenue(scheme)}",
        "surplus profile: [" + ", ".join(map(str, profile.surpluses)) + "]",
        f"total consumer surplus: {profile.total()}",
        f"efficient: {_fmt(is_efficient(scheme))}",
        f"monotone: {_fmt(is_monotone(profile))}",
    ]
    for kind in WELFARE_KINDS:
        lines.append(f"welfare {kind}: {_fmt(evaluate_welfare(profile, kind))}")
    return lines


def build_named_scheme(dist: ValueDistribution, name: str) -> SignalingScheme:
    if name == "splitmatch":
        return split_and_match(dist).to_signaling_scheme()
    if name == "final":
        return monotone_fair_scheme(dist).final.to_signaling_scheme()
    if name == "buyeropt":
        scheme, _ = buyer_optimal_scheme(dist)
        return scheme
    if name == "fullreveal":
        return full_revelation(dist)
    if name == "nosignal":
        return no_signal(dist)
    raise ValueError(f"unknown scheme kind {name!r}")


def majorization_rows(
    profile: SurplusProfile,
    grid: Sequence[Fraction],
    with_adversary: bool,
    max_support: Optional[int] = None,
) -> list[dict]:
    step = profile_step_function(profile)
    rows = []
    for m in grid:
        row = {
            "m": m,
            "integration_prefix": integration_prefix(step, m),
            "sorted_prefix": sorted_prefix(step, m),
        }
        if with_adversary:
            adv, _ = adversary_sorted_prefix(profile.dist, m, max_support)
            row["adversary_prefix"] = adv
            if adv == 0:
                row["ratio"] = Fraction(0)
            elif row["sorted_prefix"] == 0:
                row["ratio"] = math.inf
            else:
                row["ratio"] = adv / row["sorted_prefix"]
        rows.append(row)
    return rows


def _table_lines(rows: Sequence[dict], with_adversary: bool) -> list[str]:
    lines = []
    header = "m | Pfv | PF"
    if with_adversary:
        header += " | adversary PF | ratio"
    lines.append(header)
    for row in rows:
        cells = [str(row["m"]), str(row["integration_prefix"]), str(row["sorted_prefix"])]
        if with_adversary:
            ratio = row["ratio"]
            cells.append(str(row["adversary_prefix"]))
            cells.append("inf" if ratio == math.inf else str(ratio))
        lines.append(" | ".join(cells))
    return lines


def _certified_alpha(rows: Sequence[dict]):
    alpha = Fraction(0)
    for row in rows:
        ratio = row.get("ratio")
        if ratio is None:
            continue
        if ratio == math.inf:
            return math.inf
        if ratio > alpha:
            alpha = ratio
    return alpha


def _parse_grid(text: str) -> tuple[Fraction, ...]:
    grid = tuple(as_fraction(part) for part in text.split(","))
    for m in grid:
        if not 0 < m <= 1:
            raise MarketError(f"grid mass {m} outside (0, 1]")
    return tuple(sorted(set(grid)))


def _json_rows(rows: Sequence[dict]) -> list[dict]:
    out = []
    for row in rows:
        jrow = {}
        for key, val in row.items():
            jrow[key] = "inf" if val == math.inf else str(val)
        out.append(jrow)
    return out


def cmd_build(args) -> int:
    try:
        dist = fileio.load_instance(args.instance)
    except (MarketError, ValueError, KeyError, OSError, json.JSONDecodeError) as e:
        print(f"error: invalid instance: {e}", file=sys.stderr)
        return EXIT_BAD_INPUT
    try:
        scheme = build_named_scheme(dist, args.scheme)
        lines = _instance_lines(dist) + _scheme_lines(args.scheme, scheme)
        if args.scheme == "buyeropt":
            _, total = buyer_optimal_scheme(dist)
            lines.append(f"buyer-optimal surplus: {total}")
    except InvariantViolation as e:
        print(f"error: internal invariant violated: {e}", file=sys.stderr)
        return EXIT_INVARIANT
    if args.format == "json":
        payload = {"report": lines, "scheme": fileio.scheme_payload(scheme)}
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print("\n".join(lines))
    if args.out:
        fileio.save_scheme(scheme, args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        dist = fileio.load_instance(args.instance)
    except (MarketError, ValueError, KeyError, OSError, json.JSONDecodeError) as e:
        print(f"error: invalid instance: {e}", file=sys.stderr)
        return EXIT_BAD_INPUT
    try:
        scheme = fileio.load_scheme(args.scheme_file, dist)
    except PlausibilityError as e:
        print(
            f"error: scheme is not Bayes plausible at value index {e.index}: {e}",
            file=sys.stderr,
        )
        return EXIT_BAD_INPUT
    except (MarketError, ValueError, KeyError, OSError, json.JSONDecodeError) as e:
        print(f"error: invalid scheme file: {e}", file=sys.stderr)
        return EXIT_BAD_INPUT

    required = [r for r in args.require.split(",") if r] if args.require else []
    for r in required:
        if r not in REQUIREMENTS:
            print(f"error: unknown requirement {r!r}", file=sys.stderr)
            return EXIT_BAD_INPUT
    with_adversary = args.adversary or "majorized" in required

    profile = scheme_surplus(scheme)
    try:
        grid = _parse_grid(args.grid) if args.grid else adversary_grid(profile)
        rows = majorization_rows(profile, grid, with_adversary, args.max_support)
    except MarketError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_BAD_INPUT

    flags = {
        "efficient": is_efficient(scheme),
        "monotone": is_monotone(profile),
    }
    lines = _instance_lines(dist) + _scheme_lines("file", scheme)
    if with_adversary:
        alpha = _certified_alpha(rows)
        flags["majorized"] = alpha != math.inf and alpha <= MAJORIZATION_FACTOR
        lines.append(f"certified alpha: {_fmt(alpha)}")
        lines.append(
            f"majorized (alpha <= {MAJORIZATION_FACTOR}): {_fmt(flags['majorized'])}"
        )
    lines += _table_lines(rows, with_adversary)
    print("\n".join(lines))

    if args.out:
        if args.format == "json":
            with open(args.out, "w", encoding="utf-8") as fh:
                json.dump(_json_rows(rows), fh, indent=2, sort_keys=True)
                fh.write("\n")
        else:
            fileio.write_majorization_table(args.out, rows)

    failed = [r for r in required if not flags[r]]
    if failed:
        print("failed requirements: " + ", ".join(failed))
        return EXIT_GUARANTEE_FAILED
    return EXIT_OK


def cmd_lowerbound(args) -> int:
    lines = []
    try:
        if args.kind == "buyeropt":
            n = as_fraction(args.parameter)
            if n <= 1:
                raise MarketError(f"parameter must exceed 1, got {n}")
            inst = buyer_optimal_lb_instance(n)
            profile_opt = scheme_surplus(inst.buyer_optimal)
            profile_alt = scheme_surplus(inst.alternative)
            lines += _instance_lines(inst.dist)
            lines += [
                f"buyer-optimal cs (mid, high): {inst.cs_mid_optimal}, {inst.cs_high_optimal}",
                f"alternative cs (mid, high): {inst.cs_mid_alternative}, {inst.cs_high_alternative}",
                f"min positive surplus ratio: {inst.ratio}",
            ]
            if profile_opt.surpluses[1:] != (inst.cs_mid_optimal, inst.cs_high_optimal):
                raise InvariantViolation("buyer-optimal surplus mismatch")
            if profile_alt.surpluses[1:] != (
                inst.cs_mid_alternative,
                inst.cs_high_alternative,
            ):
                raise InvariantViolation("alternative surplus mismatch")
            _, best = buyer_optimal_scheme(inst.dist)
            if profile_opt.total() != best:
                raise InvariantViolation("reference scheme is not buyer-optimal")
            lines.append("verified: true")
        else:
            eps = as_fraction(args.parameter)
            if not 0 < eps <= Fraction(1, 100):
                raise MarketError(f"epsilon must lie in (0, 1/100], got {eps}")
            inst = universal_lb_instance(eps)
            result = max_min_surplus_lp(inst.values, inst.raw_masses)
            lines += _instance_lines(inst.dist)
            lines += [
                f"max-min LP value: {result.value}",
                f"closed form: {inst.best_min_surplus}",
                f"match: {_fmt(result.value == inst.best_min_surplus)}",
            ]
            if result.value != inst.best_min_surplus:
                raise InvariantViolation("max-min LP value differs from closed form")
            final = monotone_fair_scheme(inst.dist).final
            rows = majorization_rows(
                final.surplus_profile(), adversary_grid(final.surplus_profile()), True
            )
            alpha = _certified_alpha(rows)
            lines.append(f"certified alpha of monotone scheme: {_fmt(alpha)}")
    except MarketError as e:
        if isinstance(e, InvariantViolation):
            print(f"error: internal invariant violated: {e}", file=sys.stderr)
            return EXIT_INVARIANT
        print(f"error: {e}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_BAD_INPUT
    print("\n".join(lines))
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fairsignal",
        description="Construct and verify fair signaling schemes for "
        "third-degree price discrimination over discrete value distributions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="construct a scheme and report on it")
    b.add_argument("--in", dest="instance", required=True, help="instance JSON file")
    b.add_argument("--scheme", required=True, choices=SCHEME_KINDS)
    b.add_argument("--out", help="write the scheme JSON here")
    b.add_argument("--format", choices=("text", "json"), default="text")
    b.set_defaults(func=cmd_build)

    v = sub.add_parser("verify", help="check guarantees of a scheme file")
    v.add_argument("--in", dest="instance", required=True, help="instance JSON file")
    v.add_argument("--scheme", dest="scheme_file", required=True, help="scheme JSON file")
    v.add_argument("--adversary", action="store_true", help="run the exact LP adversary")
    v.add_argument("--grid", help="comma-separated masses in (0, 1]")
    v.add_argument(
        "--require",
        default="",
        help="comma-separated guarantees that must hold: "
        + ",".join(REQUIREMENTS),
    )
    v.add_argument("--out", help="write the per-mass table here")
    v.add_argument("--format", choices=("csv", "json"), default="csv")
    v.add_argument("--max-support", type=int, default=None, help=argparse.SUPPRESS)
    v.set_defaults(func=cmd_verify)

    l = sub.add_parser("lowerbound", help="reproduce a hard instance family")
    l.add_argument("kind", choices=("buyeropt", "universal"))
    l.add_argument("parameter", help="N > 1 for buyeropt, epsilon in (0, 1/100] for universal")
    l.set_defaults(func=cmd_lowerbound)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except InvariantViolation as e:
        print(f"error: internal invariant violated: {e}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
