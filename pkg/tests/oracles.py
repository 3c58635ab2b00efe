"""Independent brute-force recomputations used to check the plug-ins."""
from __future__ import annotations

from featprof.marks import FeatureKey, MarkEntry
from featprof.payloads import ANTIMARK


def executing(sample, key: FeatureKey) -> bool:
    # scan from the bottom, the last entry for the key wins
    state = False
    for e in sample.entries:
        if e.key == key:
            state = e.payload is not ANTIMARK
    return state


def backtrack_oracle(costed, key: FeatureKey):
    """O(n^2) replay: ``(wasted, unresolved)`` keyed by (disjunction, branch)."""
    rows = []
    for cs in sorted((c for c in costed if executing(c.sample, key)), key=lambda c: c.sample.t):
        trip = {(e.payload.disjunction, e.payload.input_offset, e.payload.branch_index)
                for e in cs.sample.entries if e.key == key and e.payload is not ANTIMARK}
        rows.append((cs.cost_ns, trip))
    wasted, unresolved = {}, {}
    for i, (cost, trip) in enumerate(rows):
        for d, o, b in trip:
            later = [b2 for _, t2 in rows[i + 1:] for d2, o2, b2 in t2 if (d2, o2) == (d, o)]
            anywhere = [b2 for _, t2 in rows for d2, o2, b2 in t2 if (d2, o2) == (d, o)]
            if any(b2 > b for b2 in later):
                wasted[(d, b)] = wasted.get((d, b), 0) + cost
            elif any(b2 > b for b2 in anywhere):
                unresolved[(d, b)] = unresolved.get((d, b), 0) + cost
    return wasted, unresolved


def tree_oracle(costed, key: FeatureKey):
    """``path -> (total, self)`` computed straight from the sample list."""
    paths = []
    for cs in costed:
        if not executing(cs.sample, key):
            continue
        path = tuple(e.payload.name for e in cs.sample.entries
                     if e.key == key and e.payload is not ANTIMARK)
        paths.append((path, cs.cost_ns))
    nodes = {p[:i] for p, _ in paths for i in range(1, len(p) + 1)}
    return {
        n: (sum(c for p, c in paths if p[:len(n)] == n), sum(c for p, c in paths if p == n))
        for n in nodes
    }


def simulate(ops):
    """Per-feature executing state, tracked incrementally along the history."""
    state: dict[str, list] = {}
    stack: list[MarkEntry] = []
    for op in ops:
        if op[0] == "push":
            _, name, payload = op
            stack.append(MarkEntry(FeatureKey(name), payload))
            state.setdefault(name, []).append(None if payload is ANTIMARK else payload)
        else:
            e = stack.pop()
            state[e.key.name].pop()
        executing = {FeatureKey(n): v[-1] for n, v in state.items() if v and v[-1] is not None}
        yield tuple(stack), executing
