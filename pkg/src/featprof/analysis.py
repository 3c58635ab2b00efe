"""Offline analysis: sample costing, attribution, grouping and report text.

The pipeline is pure.  ``analyze(trace)`` composes the four stages::

    assign_costs -> attribute (per sample) -> group_by_payload -> compose_report
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from featprof.marks import FeatureKey
from featprof.payloads import ANTIMARK, Payload, payload_text
from featprof.trace import SampleRecord, Trace, payload_to_json

__all__ = [
    "ContractError",
    "CostedSample",
    "InstanceReport",
    "FeatureReport",
    "Report",
    "assign_costs",
    "attribute",
    "group_by_payload",
    "compose_report",
    "render_text",
    "analyze",
    "report_to_dict",
    "feature_label",
    "format_ms",
    "format_percent",
]

REPORT_TITLE = "Feature Report"
DISCLAIMER = "(Feature times may sum to more or less than 100% of the total running time)"


class ContractError(ValueError):
    pass


@dataclass(frozen=True)
class CostedSample:
    sample: SampleRecord
    cost_ns: int


@dataclass(frozen=True)
class InstanceReport:
    payload: Payload
    time_ns: int
    share_of_feature: float


@dataclass(frozen=True)
class FeatureReport:
    key: FeatureKey
    time_ns: int
    share_of_total: float
    instances: tuple[InstanceReport, ...]


@dataclass(frozen=True)
class Report:
    total_duration_ns: int
    sample_count: int
    features: tuple[FeatureReport, ...] = ()
    threads: tuple[str, ...] = field(default=())

    def feature(self, name: str) -> FeatureReport | None:
        for f in self.features:
            if f.key.name == name:
                return f
        return None


def assign_costs(samples: Sequence[SampleRecord]) -> list[CostedSample]:
    """Sliding-window cost: each sample gets half the gap to each neighbour.

    Works per thread.  The window boundaries are the integer midpoints
    ``(t[i] + t[i+1]) // 2`` clamped at the first and last timestamps, so the
    costs of one thread's samples sum to exactly ``t_last - t_first`` and each
    differs from ``(t[i+1] - t[i-1]) / 2`` by less than 1 ns.  Output order
    follows input order.
    """
    by_thread: dict[str, list[int]] = defaultdict(list)
    for i, s in enumerate(samples):
        by_thread[s.thread].append(i)
    costs = [0] * len(samples)
    for thread, idx in by_thread.items():
        ts = [samples[i].t for i in idx]
        for a, b in zip(ts, ts[1:]):
            if b < a:
                raise ContractError(f"samples of thread {thread!r} are not sorted by t")
        n = len(ts)
        if n < 2:
            continue
        lo = ts[0]
        for j in range(n):
            hi = ts[-1] if j == n - 1 else (ts[j] + ts[j + 1]) // 2
            costs[idx[j]] = hi - lo
            lo = hi
    return [CostedSample(s, c) for s, c in zip(samples, costs)]


def attribute(sample: SampleRecord) -> dict[FeatureKey, Payload]:
    """Executing instance per feature: the topmost entry for each key decides."""
    decided: dict[FeatureKey, Payload] = {}
    for entry in reversed(sample.entries):
        if entry.key not in decided:
            decided[entry.key] = entry.payload
    return {k: p for k, p in decided.items() if p is not ANTIMARK}


def group_by_payload(costed: Iterable[CostedSample]) -> dict[FeatureKey, dict[Payload, int]]:
    grouped: dict[FeatureKey, dict[Payload, int]] = {}
    for cs in costed:
        for key, payload in attribute(cs.sample).items():
            per = grouped.setdefault(key, {})
            per[payload] = per.get(payload, 0) + cs.cost_ns
    return grouped


def compose_report(
    grouped: Mapping[FeatureKey, Mapping[Payload, int]],
    total_duration_ns: int,
    sample_count: int,
    threads: Sequence[str] = (),
) -> Report:
    features = []
    for key, per in grouped.items():
        instances = [(p, t) for p, t in per.items() if t > 0]
        ftime = sum(t for _, t in instances)
        if ftime == 0:
            continue
        if total_duration_ns <= 0:
            raise ContractError("total_duration_ns must be positive to compute shares")
        instances.sort(key=lambda pt: (-pt[1], payload_text(pt[0])))
        features.append(FeatureReport(
            key=key,
            time_ns=ftime,
            share_of_total=ftime / total_duration_ns,
            instances=tuple(InstanceReport(p, t, t / ftime) for p, t in instances),
        ))
    features.sort(key=lambda f: (-f.time_ns, f.key.name))
    return Report(total_duration_ns, sample_count, tuple(features), tuple(threads))


def analyze(trace: Trace) -> Report:
    samples = trace.samples
    costed = assign_costs(samples)
    return compose_report(
        group_by_payload(costed),
        trace.total_duration_ns,
        len(samples),
        trace.threads(),
    )


# -- rendering ---------------------------------------------------------------


def feature_label(name: str) -> str:
    words = name.replace("-", " ").replace("_", " ")
    return words[:1].upper() + words[1:]


def _verb(label: str) -> str:
    # "Generic sequences account", "Output accounts", "Process accounts"
    last = label.rsplit(" ", 1)[-1]
    plural = last.endswith("s") and not last.endswith("ss")
    return "account" if plural else "accounts"


def format_ms(ns: int) -> str:
    return str((ns + 500_000) // 1_000_000)


def format_percent(part: int, whole: int) -> str:
    """``part / whole`` as a percentage with 2 decimals, rounded half up, exactly."""
    hundredths = (2 * part * 10_000 + whole) // (2 * whole)
    return f"{hundredths // 100}.{hundredths % 100:02d}"


def render_text(report: Report) -> str:
    lines = [REPORT_TITLE, DISCLAIMER]
    if len(report.threads) > 1:
        lines.append(f"(Samples merged from {len(report.threads)} threads)")
    total = report.total_duration_ns
    for f in report.features:
        lines.append("")
        label = feature_label(f.key.name)
        lines.append(
            f"{label} {_verb(label)} for "
            f"{format_percent(f.time_ns, total)}% of running time"
        )
        lines.append(f"      ({format_ms(f.time_ns)} / {format_ms(total)} ms)")
        for inst in f.instances:
            lines.append(f"  {format_ms(inst.time_ns)} ms : {payload_text(inst.payload)}")
    return "\n".join(lines) + "\n"


def report_to_dict(report: Report) -> dict:
    return {
        "total_duration_ns": report.total_duration_ns,
        "sample_count": report.sample_count,
        "threads": list(report.threads),
        "features": [
            {
                "key": f.key.name,
                "time_ns": f.time_ns,
                "share_of_total": f.share_of_total,
                "instances": [
                    {
                        "payload": payload_to_json(i.payload),
                        "text": payload_text(i.payload),
                        "time_ns": i.time_ns,
                        "share_of_feature": i.share_of_feature,
                    }
                    for i in f.instances
                ],
            }
            for f in report.features
        ],
    }
