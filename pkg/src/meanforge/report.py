"""Deterministic text, JSON and markdown renderings of verification results.

Reports carry no timestamps, host data or thread counts, so identical runs
give byte-identical output.  JSON floats use 17 significant digits; the
standard ``json`` encoder only offers shortest round-trip repr, hence the
small writer below.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Any, Sequence

from meanforge.chains import ChainReport, PairReport
from meanforge.convexity import GridSpec
from meanforge.means import PositivePair, ToleranceConfig
from meanforge.ratios import (
    PUBLISHED_PAIRS,
    RATIO_GRID,
    PublishedConstant,
    Pattern,
    RatioPair,
    RatioProfile,
    inequality_from_profile,
    profile,
    render_constant,
)

__all__ = [
    "RATIO_MATCH_TOLERANCE",
    "RatioRow",
    "published_constant",
    "ratio_row",
    "ratio_rows",
    "to_json",
    "build_report",
    "fmt15",
    "chain_text",
    "ratio_text",
    "constants_markdown",
    "chains_markdown",
]

RATIO_MATCH_TOLERANCE = 1e-9


def fmt15(x: float) -> str:
    return f"{x:.15g}"


def _dump(obj: Any, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return "null"
        return f"{obj:.17g}"
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_dump(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{pad}{_dump(v, indent, level + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def to_json(obj: Any, indent: int = 2) -> str:
    """JSON text with 17-significant-digit floats; NaN and infinities become null."""
    return _dump(obj, indent, 0) + "\n"


@dataclass(frozen=True)
class RatioRow:
    """A ratio profile, its derived inequality and the published constant, if any."""

    profile: RatioProfile
    published: PublishedConstant | None
    statement: str

    @property
    def extremum(self) -> float:
        return self.profile.inf if self.profile.pattern is Pattern.VALLEY else self.profile.sup

    @property
    def matches_published(self) -> bool | None:
        if self.published is None:
            return None
        c = float(self.published.constant)
        p = self.profile
        return (
            abs(p.value_at_1 - c) <= RATIO_MATCH_TOLERANCE
            and abs(self.extremum - p.value_at_1) <= RATIO_MATCH_TOLERANCE
            and p.pattern is self.published.pattern
        )


def published_constant(pair: RatioPair) -> PublishedConstant | None:
    for pc in PUBLISHED_PAIRS:
        if pc.pair == pair:
            return pc
    return None


def ratio_row(pair: RatioPair, grid: GridSpec = RATIO_GRID) -> RatioRow:
    prof = profile(pair, grid)
    return RatioRow(prof, published_constant(pair), inequality_from_profile(prof).statement())


def ratio_rows(pairs: Sequence[RatioPair] | None = None, grid: GridSpec = RATIO_GRID) -> list[RatioRow]:
    """Rows for ``pairs``, by default the fourteen published ones."""
    if pairs is None:
        pairs = [pc.pair for pc in PUBLISHED_PAIRS]
    return [ratio_row(pair, grid) for pair in pairs]


def _pair_dict(p: PositivePair | None):
    return None if p is None else {"a": p.a, "b": p.b}


def _pair_report_dict(pr: PairReport) -> dict:
    return {
        "lhs": pr.lhs,
        "rhs": pr.rhs,
        "holds": pr.holds,
        "violations": pr.violations,
        "worst_margin": pr.worst_margin,
        "worst_at": _pair_dict(pr.worst_witness),
        "witness": _pair_dict(pr.simplest_witness),
    }


def _chain_dict(r: ChainReport) -> dict:
    return {
        "id": r.chain_id,
        "source": r.source,
        "expectation": r.expectation.value,
        "holds": r.holds,
        "meets_expectation": r.meets_expectation,
        "samples": r.samples,
        "violations": r.violations,
        "worst_margin": r.worst_margin,
        "witness": _pair_dict(r.witness),
        "per_pair": [_pair_report_dict(p) for p in r.per_pair],
        "side_conditions": [_pair_report_dict(p) for p in r.aux],
    }


def _ratio_dict(row: RatioRow) -> dict:
    p, pc = row.profile, row.published
    return {
        "num": p.pair.numerator.value,
        "den": p.pair.denominator.value,
        "value_at_1": p.value_at_1,
        "sup": p.sup,
        "sup_at": p.sup_location,
        "inf": p.inf,
        "inf_at": p.inf_location,
        "pattern": p.pattern.value,
        "paper_constant": None if pc is None else float(pc.constant),
        "paper_constant_text": None if pc is None else str(pc.constant),
        "matches_paper": row.matches_published,
        "inequality": row.statement,
        "note": "" if pc is None else pc.note,
    }


def build_report(
    version: str,
    seed: int | None,
    tol: ToleranceConfig,
    chains: Sequence[ChainReport] = (),
    ratios: Sequence[RatioRow] = (),
) -> dict:
    return {
        "tool_version": version,
        "seed": seed,
        "tolerance": {"rel": tol.rel, "abs_floor": tol.abs_floor},
        "chains": [_chain_dict(r) for r in chains],
        "ratios": [_ratio_dict(r) for r in ratios],
    }


def chain_text(r: ChainReport) -> str:
    verdict = "holds" if r.holds else "REFUTED"
    status = "as expected" if r.meets_expectation else "UNEXPECTED"
    lines = [
        f"{r.chain_id}: {verdict} ({status}); {r.violations} violations in {r.samples} samples; "
        f"worst margin {fmt15(r.worst_margin)}"
    ]
    w = r.witness
    if w is not None:
        lines.append(f"  witness (a, b) = ({fmt15(w.a)}, {fmt15(w.b)})")
    for pr in r.per_pair + r.aux:
        lines.append(
            f"  {pr.lhs} <= {pr.rhs}: {pr.violations} violations, worst margin {fmt15(pr.worst_margin)} "
            f"at ({fmt15(pr.worst_witness.a)}, {fmt15(pr.worst_witness.b)})"
        )
    return "\n".join(lines)


def ratio_text(row: RatioRow) -> str:
    p, pc = row.profile, row.published
    if p.pattern is Pattern.VALLEY:
        sharp = f"inf = {p.inf:.9g} at x={p.inf_location:.9g}"
        other = f"sup = {p.sup:.9g} at x={p.sup_location:.9g}"
    else:
        sharp = f"sup = {p.sup:.9g} at x={p.sup_location:.9g}"
        other = f"inf = {p.inf:.9g} at x={p.inf_location:.9g}"
    lines = [
        f"{sharp}; {row.statement}",
        f"  {p.pair.label}: value_at_1 = {fmt15(p.value_at_1)}; pattern {p.pattern.value}; {other}",
    ]
    if pc is None:
        lines.append("  no published constant for this pair")
        return "\n".join(lines)
    lines.append(f"  published constant {pc.constant}: {'matches' if row.matches_published else 'MISMATCH'}")
    if pc.note:
        lines.append(f"  inconsistency: {pc.note}")
    return "\n".join(lines)


def constants_markdown(rows: Sequence[RatioRow]) -> str:
    out = [
        "| g | g(1) | sup | inf | pattern | published | match | inequality |",
        "|---|---|---|---|---|---|---|---|",
    ]
    for row in rows:
        p, pc = row.profile, row.published
        published = "" if pc is None else str(pc.constant)
        match = {True: "yes", False: "no", None: ""}[row.matches_published]
        out.append(
            f"| {p.pair.label} | {render_constant(p.value_at_1)} | {p.sup:.9g} | {p.inf:.9g} | "
            f"{p.pattern.value} | {published} | {match} | {row.statement} |"
        )
    notes = [f"- {r.profile.pair.label}: {r.published.note}" for r in rows if r.published and r.published.note]
    if notes:
        out += ["", "Notes:", ""] + notes
    return "\n".join(out) + "\n"


def chains_markdown(reports: Sequence[ChainReport]) -> str:
    out = [
        "| chain | expectation | result | violations | worst margin | witness |",
        "|---|---|---|---|---|---|",
    ]
    for r in reports:
        w = r.witness
        wt = "" if w is None else f"({fmt15(w.a)}, {fmt15(w.b)})"
        out.append(
            f"| {r.chain_id} | {r.expectation.value} | {'holds' if r.holds else 'refuted'} | "
            f"{r.violations} | {fmt15(r.worst_margin)} | {wt} |"
        )
    return "\n".join(out) + "\n"

