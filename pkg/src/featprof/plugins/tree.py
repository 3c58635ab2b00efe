"""Ancestry attribution for nested schedulers and processes.

Every sample is charged to each node on its ancestry path (total time) and
to the deepest node only (self time), the same bookkeeping an edge profiler
does for call paths.  Nodes are identified by their full path, so two
processes with the same name under different parents stay distinct.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from featprof.analysis import CostedSample, attribute, format_ms, format_percent
from featprof.marks import FeatureKey
from featprof.payloads import ProcessId
from featprof.plugins.errors import PluginInputError

PATH_SEP = "/"


@dataclass
class TreeNode:
    path: tuple[str, ...]
    total_ns: int = 0
    self_ns: int = 0
    children: list["TreeNode"] = field(default_factory=list)

    @property
    def name(self) -> str:
        return self.path[-1]

    @property
    def identity(self) -> str:
        return PATH_SEP.join(self.path)

    def walk(self):
        yield self
        for child in self.children:
            yield from child.walk()

    def to_dict(self) -> dict:
        return {
            "path": self.identity,
            "total_ns": self.total_ns,
            "self_ns": self.self_ns,
            "children": [c.to_dict() for c in self.children],
        }


@dataclass
class TreeAttribution:
    roots: list[TreeNode]
    total_ns: int

    def nodes(self):
        for root in self.roots:
            yield from root.walk()

    def find(self, path: str | tuple[str, ...]) -> TreeNode | None:
        if isinstance(path, str):
            path = tuple(path.split(PATH_SEP))
        for node in self.nodes():
            if node.path == path:
                return node
        return None

    @property
    def attributed_ns(self) -> int:
        return sum(r.total_ns for r in self.roots)

    def to_dict(self) -> dict:
        return {"total_ns": self.total_ns, "roots": [r.to_dict() for r in self.roots]}


def ancestry(sample, key: FeatureKey) -> tuple[str, ...]:
    """Root-first process names of ``key``'s marks, antimarks skipped."""
    path = []
    for entry in sample.entries:
        if entry.key != key or entry.is_antimark:
            continue
        if not isinstance(entry.payload, ProcessId):
            raise PluginInputError(f"actor payload must be ProcessId, got {entry.payload!r}")
        path.append(entry.payload.name)
    return tuple(path)


def analyze_tree(
    samples: Iterable[CostedSample],
    key: FeatureKey | str = "actor",
    total_ns: int | None = None,
) -> TreeAttribution:
    key = FeatureKey(key) if isinstance(key, str) else key
    nodes: dict[tuple[str, ...], TreeNode] = {}
    roots: list[TreeNode] = []
    seen_cost = 0
    for cs in samples:
        if key not in attribute(cs.sample):
            continue
        path = ancestry(cs.sample, key)
        if not path:
            raise PluginInputError("sample attributed to the feature has an empty ancestry")
        seen_cost += cs.cost_ns
        parent = None
        for depth in range(1, len(path) + 1):
            prefix = path[:depth]
            node = nodes.get(prefix)
            if node is None:
                node = nodes[prefix] = TreeNode(prefix)
                (parent.children if parent is not None else roots).append(node)
            node.total_ns += cs.cost_ns
            parent = node
        parent.self_ns += cs.cost_ns

    def order(siblings):
        siblings.sort(key=lambda n: (-n.total_ns, n.name))
        for n in siblings:
            order(n.children)

    order(roots)
    return TreeAttribution(roots, seen_cost if total_ns is None else total_ns)


def render_tree(tree: TreeAttribution) -> str:
    """Indented tree with total/self columns and each child's share of its parent."""
    total = tree.total_ns
    lines = [f"Process accounting ({format_ms(total)} ms)"]
    header = f"  {'name':<32} {'total ms':>9} {'total %':>8} {'self ms':>9} {'self %':>8} {'of parent':>10}"
    lines.append(header)

    def pct(part, whole):
        return format_percent(part, whole) if whole > 0 else "0.00"

    def emit(node: TreeNode, depth: int, parent_total: int | None):
        label = "  " * depth + node.name
        share = pct(node.total_ns, parent_total) + "%" if parent_total is not None else ""
        lines.append(
            f"  {label:<32} {format_ms(node.total_ns):>9} {pct(node.total_ns, total):>7}%"
            f" {format_ms(node.self_ns):>9} {pct(node.self_ns, total):>7}% {share:>10}"
        )
        for child in node.children:
            emit(child, depth + 1, node.total_ns)

    for root in tree.roots:
        emit(root, 0, None)
    return "\n".join(lines) + "\n"
