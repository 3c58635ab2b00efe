"""Shared builders for hand-made traces and random mark histories."""
from __future__ import annotations

import pytest
from hypothesis import strategies as st

from featprof.marks import FeatureKey, MarkEntry
from featprof.payloads import ANTIMARK, Blame, ParserTriple, ProcessId, SourceLoc, Text
from featprof.trace import SampleRecord, Trace, TraceHeader

MS = 1_000_000


def make_trace(samples, total=None, features=None, interval_ns=4 * MS):
    samples = tuple(samples)
    if total is None:
        total = max((s.t for s in samples), default=0)
    if features is None:
        names = {}
        for s in samples:
            for e in s.entries:
                names.setdefault(e.key.name, None)
        features = tuple((n, True) for n in names)
    header = TraceHeader(
        interval_ns=interval_ns,
        start_wall="2026-01-01T00:00:00+00:00",
        features=tuple(features),
        total_duration_ns=total,
    )
    return Trace(header, samples)


def rec(t, *entries, thread="main"):
    return SampleRecord(t, thread, tuple(MarkEntry(FeatureKey(k), p) for k, p in entries))


# -- hypothesis strategies ----------------------------------------------------

names = st.text("abcdefghijklmnopqrstuvwxyz-_", min_size=1, max_size=8)
texts = st.text(max_size=12)
locs = st.builds(SourceLoc, texts, st.integers(1, 10_000), st.integers(0, 500))
payloads = st.one_of(
    locs,
    st.builds(Blame, texts, texts, texts),
    st.builds(ProcessId, texts),
    st.builds(ParserTriple, locs, st.integers(0, 9), st.integers(0, 10**6)),
    st.builds(Text, texts),
)


@st.composite
def traces(draw, max_samples=20):
    feats = draw(st.lists(names, min_size=0, max_size=4, unique=True))
    threads = draw(st.lists(names, min_size=1, max_size=3, unique=True))
    times = sorted(draw(st.lists(st.integers(0, 10**12), max_size=max_samples)))
    samples = []
    for t in times:
        entries = ()
        if feats:
            entries = tuple(
                MarkEntry(FeatureKey(draw(st.sampled_from(feats))),
                          draw(st.one_of(payloads, st.just(ANTIMARK))))
                for _ in range(draw(st.integers(0, 4)))
            )
        samples.append(SampleRecord(t, draw(st.sampled_from(threads)), entries))
    total = draw(st.integers(max(times, default=0), 10**12 + 1))
    header = TraceHeader(
        interval_ns=draw(st.integers(1, 10**9)),
        start_wall=draw(st.text(max_size=30)),
        features=tuple((f, draw(st.booleans())) for f in feats),
        total_duration_ns=total,
    )
    return Trace(header, tuple(samples))


@st.composite
def push_pop_histories(draw, max_depth=20, max_features=5, max_ops=60):
    """Lists of ("push", key, payload) / ("pop",) that never underflow."""
    n = draw(st.integers(1, max_features))
    feats = [f"f{i}" for i in range(n)]
    ops, depth = [], 0
    for _ in range(draw(st.integers(0, max_ops))):
        can_push = depth < max_depth
        if can_push and (depth == 0 or draw(st.booleans())):
            key = draw(st.sampled_from(feats))
            payload = ANTIMARK if draw(st.integers(0, 2)) == 0 else Text(str(draw(st.integers(0, 3))))
            ops.append(("push", key, payload))
            depth += 1
        elif depth:
            ops.append(("pop",))
            depth -= 1
    return ops


@pytest.fixture
def runtime():
    from featprof.marks import MarkRuntime
    return MarkRuntime()
