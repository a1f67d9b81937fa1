"""Instance and scheme files, plus CSV tables for plots.

Rationals are serialized as "p/q" strings so nothing is lost to decimal
rounding; on input, plain numbers and decimal strings are also accepted
and converted exactly.  CSV tables carry each quantity twice: the exact
rational and a 12-decimal rounding for plotting.
"""

from __future__ import annotations

import csv
import json
from fractions import Fraction
from typing import IO, Iterable, Mapping, Sequence, Union

from .ironing import RectanglePair
from .market import (
    MarketError,
    Signal,
    SignalingScheme,
    ValueDistribution,
    as_fraction,
)

PathOrFile = Union[str, IO[str]]


def rational_str(x: Fraction) -> str:
    return str(x)


def decimal_str(x) -> str:
    """12-decimal rounding of a rational or float, for plot axes."""
    return repr(round(float(x), 12))


def _load_json(source: PathOrFile):
    if isinstance(source, str):
        with open(source, "r", encoding="utf-8") as fh:
            return json.load(fh, parse_float=Fraction)
    return json.load(source, parse_float=Fraction)


def _dump_json(payload, target: PathOrFile) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if isinstance(target, str):
        with open(target, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        target.write(text)


def instance_payload(dist: ValueDistribution) -> dict:
    return {
        "values": [rational_str(v) for v in dist.values],
        "masses": [rational_str(f) for f in dist.masses],
    }


def payload_to_instance(payload) -> ValueDistribution:
    if not isinstance(payload, Mapping):
        raise MarketError("instance file must hold an object")
    try:
        values = payload["values"]
        masses = payload["masses"]
    except KeyError as missing:
        raise MarketError(f"instance file lacks key {missing}") from None
    if not isinstance(values, Sequence) or not isinstance(masses, Sequence):
        raise MarketError("values and masses must be arrays")
    return ValueDistribution.from_pairs(
        [as_fraction(v) for v in values], [as_fraction(f) for f in masses]
    )


def load_instance(source: PathOrFile) -> ValueDistribution:
    return payload_to_instance(_load_json(source))


def save_instance(dist: ValueDistribution, target: PathOrFile) -> None:
    _dump_json(instance_payload(dist), target)


def scheme_payload(scheme: SignalingScheme) -> dict:
    entries = []
    for signal, weight in scheme.entries:
        entries.append(
            {
                "weight": rational_str(weight),
                "support": {str(i): rational_str(f) for i, f in signal.support},
            }
        )
    return {"entries": entries}


def payload_to_scheme(dist: ValueDistribution, payload) -> SignalingScheme:
    if not isinstance(payload, Mapping) or "entries" not in payload:
        raise MarketError("scheme file must hold an object with entries")
    entries = []
    for entry in payload["entries"]:
        weight = as_fraction(entry["weight"])
        support = tuple(
            (int(i), as_fraction(f)) for i, f in entry["support"].items()
        )
        entries.append((Signal(dist, support), weight))
    return SignalingScheme(dist, tuple(entries))


def load_scheme(source: PathOrFile, dist: ValueDistribution) -> SignalingScheme:
    return payload_to_scheme(dist, _load_json(source))


def save_scheme(scheme: SignalingScheme, target: PathOrFile) -> None:
    _dump_json(scheme_payload(scheme), target)


def _open_csv(target: PathOrFile):
    if isinstance(target, str):
        return open(target, "w", encoding="utf-8", newline="")
    return target


def write_majorization_table(
    target: PathOrFile,
    rows: Iterable[Mapping],
) -> None:
    """Per-mass certification rows; see cli.majorization_rows for keys."""
    fields = [
        "m",
        "integration_prefix",
        "sorted_prefix",
        "adversary_prefix",
        "ratio",
    ]
    fh = _open_csv(target)
    try:
        writer = csv.writer(fh)
        header = []
        for f in fields:
            header += [f, f + "_decimal"]
        writer.writerow(header)
        for row in rows:
            out = []
            for f in fields:
                val = row.get(f)
                if val is None:
                    out += ["", ""]
                elif val == float("inf"):
                    out += ["inf", "inf"]
                else:
                    out += [rational_str(val), decimal_str(val)]
            writer.writerow(out)
    finally:
        if isinstance(target, str):
            fh.close()


def write_match_trace(
    target: PathOrFile, trace: Sequence[tuple[int, int, Fraction]]
) -> None:
    """Greedy pairing log: one (giver, taker, weight) row per signal."""
    fh = _open_csv(target)
    try:
        writer = csv.writer(fh)
        writer.writerow(["giver_index", "taker_index", "weight", "weight_decimal"])
        for s, l, w in trace:
            writer.writerow([s, l, rational_str(w), decimal_str(w)])
    finally:
        if isinstance(target, str):
            fh.close()


def write_ironing_segments(target: PathOrFile, ironed) -> None:
    """Per-class surplus before and after ironing, plus interval levels."""
    dist = ironed.profile.dist
    fh = _open_csv(target)
    try:
        writer = csv.writer(fh)
        writer.writerow(["class", "left", "right", "surplus", "ironed_surplus"])
        left = Fraction(0)
        for i, (f, cs, ironed_cs) in enumerate(
            zip(dist.masses, ironed.profile.surpluses, ironed.ironed_values)
        ):
            writer.writerow(
                [
                    i,
                    rational_str(left),
                    rational_str(left + f),
                    rational_str(cs),
                    rational_str(ironed_cs),
                ]
            )
            left += f
        writer.writerow([])
        writer.writerow(["interval", "left", "right", "level"])
        for t, iv in enumerate(ironed.intervals):
            writer.writerow(
                [t, rational_str(iv.left), rational_str(iv.right), rational_str(iv.level)]
            )
    finally:
        if isinstance(target, str):
            fh.close()


def write_rectangle_dump(
    target: PathOrFile,
    pairings: Sequence[Sequence[RectanglePair]],
) -> None:
    """Rectangle pairs per ironing interval, one row per pair."""
    fh = _open_csv(target)
    try:
        writer = csv.writer(fh)
        writer.writerow(
            [
                "interval",
                "pair",
                "plus_index",
                "plus_width",
                "plus_height",
                "minus_index",
                "minus_width",
                "minus_height",
            ]
        )
        for t, pairs in enumerate(pairings):
            for y, p in enumerate(pairs):
                writer.writerow(
                    [
                        t,
                        y,
                        p.plus_index,
                        rational_str(p.plus_width),
                        rational_str(p.plus_height),
                        p.minus_index,
                        rational_str(p.minus_width),
                        rational_str(p.minus_height),
                    ]
                )
    finally:
        if isinstance(target, str):
            fh.close()
