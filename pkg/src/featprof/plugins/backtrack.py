"""Backtracking cost of ordered-choice disjunctions.

Each sample taken while the parser feature executes carries one parser triple
per active disjunction on its stack: (disjunction, branch, input offset).  A
sample's cost is *wasted* for branch ``b`` of disjunction ``d`` at offset
``o`` when some later sample shows ``d`` at ``o`` in a branch above ``b``:
the parser came back to the same place and tried a later alternative.

Samples in a branch below the highest branch seen at ``(d, o)`` that are not
followed by such evidence are *unresolved*; they are reported apart and
never counted as wasted.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from featprof.analysis import CostedSample, attribute, format_ms, format_percent
from featprof.marks import FeatureKey
from featprof.payloads import ParserTriple, SourceLoc
from featprof.plugins.errors import PluginInputError


@dataclass(frozen=True)
class BranchCost:
    disjunction: SourceLoc
    branch_index: int
    wasted_ns: int
    share_of_total: float
    unresolved_ns: int = 0


@dataclass
class BacktrackReport:
    total_ns: int
    branches: list[BranchCost] = field(default_factory=list)
    # (disjunction, offset, branch) -> wasted ns, for machine-readable output
    per_offset: dict[tuple[SourceLoc, int, int], int] = field(default_factory=dict)

    def branch(self, disjunction: SourceLoc, index: int) -> BranchCost | None:
        for b in self.branches:
            if b.disjunction == disjunction and b.branch_index == index:
                return b
        return None

    @property
    def wasted_ns(self) -> int:
        return sum(b.wasted_ns for b in self.branches)

    def to_dict(self) -> dict:
        return {
            "total_ns": self.total_ns,
            "branches": [
                {
                    "disjunction": str(b.disjunction),
                    "branch": b.branch_index,
                    "wasted_ns": b.wasted_ns,
                    "share_of_total": b.share_of_total,
                    "unresolved_ns": b.unresolved_ns,
                }
                for b in self.branches
            ],
            "per_offset": [
                {"disjunction": str(d), "offset": o, "branch": b, "wasted_ns": t}
                for (d, o, b), t in sorted(self.per_offset.items(), key=lambda kv: (str(kv[0][0]), kv[0][1], kv[0][2]))
            ],
        }


def parser_triples(sample, key: FeatureKey) -> frozenset[tuple[SourceLoc, int, int]]:
    """Distinct ``(disjunction, offset, branch)`` of every active disjunction in a core sample."""
    out = set()
    for entry in sample.entries:
        if entry.key != key or entry.is_antimark:
            continue
        p = entry.payload
        if not isinstance(p, ParserTriple):
            raise PluginInputError(f"parser payload must be ParserTriple, got {p!r}")
        out.add((p.disjunction, p.input_offset, p.branch_index))
    return frozenset(out)


def analyze_backtracking(
    samples: Sequence[CostedSample],
    key: FeatureKey | str = "parser-disj",
    total_ns: int | None = None,
) -> BacktrackReport:
    key = FeatureKey(key) if isinstance(key, str) else key
    ordered = sorted(
        (cs for cs in samples if key in attribute(cs.sample)),
        key=lambda cs: cs.sample.t,
    )
    triples = [parser_triples(cs.sample, key) for cs in ordered]
    if total_ns is None:
        total_ns = sum(cs.cost_ns for cs in ordered)

    highest: dict[tuple[SourceLoc, int], int] = {}
    for ts in triples:
        for d, o, b in ts:
            if b > highest.get((d, o), -1):
                highest[(d, o)] = b

    wasted: dict[tuple[SourceLoc, int, int], int] = {}
    unresolved: dict[tuple[SourceLoc, int], int] = {}
    seen_branches: set[tuple[SourceLoc, int]] = set()
    later_max: dict[tuple[SourceLoc, int], int] = {}
    for cs, ts in zip(reversed(ordered), reversed(triples)):
        for d, o, b in ts:
            seen_branches.add((d, b))
            if later_max.get((d, o), -1) > b:
                wasted[(d, o, b)] = wasted.get((d, o, b), 0) + cs.cost_ns
            elif b < highest[(d, o)]:
                unresolved[(d, b)] = unresolved.get((d, b), 0) + cs.cost_ns
        # update only after the whole sample: one stack cannot supersede itself
        for d, o, b in ts:
            if b > later_max.get((d, o), -1):
                later_max[(d, o)] = b

    per_branch: dict[tuple[SourceLoc, int], int] = {}
    for (d, o, b), t in wasted.items():
        per_branch[(d, b)] = per_branch.get((d, b), 0) + t

    branches = [
        BranchCost(
            disjunction=d,
            branch_index=b,
            wasted_ns=per_branch.get((d, b), 0),
            share_of_total=(per_branch.get((d, b), 0) / total_ns) if total_ns > 0 else 0.0,
            unresolved_ns=unresolved.get((d, b), 0),
        )
        for d, b in seen_branches
    ]
    branches.sort(key=lambda bc: (-bc.wasted_ns, str(bc.disjunction), bc.branch_index))
    return BacktrackReport(total_ns, branches, wasted)


def render_backtracking(report: BacktrackReport) -> str:
    total = report.total_ns
    lines = [f"Parser backtracking ({format_ms(total)} ms total)"]
    shown = [b for b in report.branches if b.wasted_ns > 0]
    if not shown:
        lines.append("  no backtracking observed")
    for b in shown:
        lines.append(
            f"  Branch {b.branch_index} of {b.disjunction} accounts for "
            f"{format_percent(b.wasted_ns, total)}% of total execution time"
            f" ({format_ms(b.wasted_ns)} ms wasted)"
        )
    unresolved = [b for b in report.branches if b.unresolved_ns > 0]
    for b in unresolved:
        lines.append(
            f"  (unresolved: {format_ms(b.unresolved_ns)} ms in branch {b.branch_index} of {b.disjunction})"
        )
    return "\n".join(lines) + "\n"
