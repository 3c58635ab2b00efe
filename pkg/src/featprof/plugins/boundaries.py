"""Contract boundary graph: modules as nodes, boundaries as cost-labelled edges."""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from featprof.analysis import CostedSample, attribute, format_ms, format_percent
from featprof.marks import FeatureKey
from featprof.payloads import Blame
from featprof.plugins.errors import PluginInputError

NODE_KINDS = ("typed", "untyped", "plain")

# typed modules dark, untyped light
_FILL = {"typed": "#5f5f5f", "untyped": "#dfdfdf"}
_FONT = {"typed": "white"}


@dataclass
class BoundaryGraph:
    nodes: dict[str, str] = field(default_factory=dict)
    edges: dict[tuple[str, str], int] = field(default_factory=dict)
    value_costs: dict[tuple[str, str, str], int] = field(default_factory=dict)

    @property
    def total_ns(self) -> int:
        return sum(self.edges.values())

    def values_on(self, server: str, client: str) -> dict[str, int]:
        return {v: t for (s, c, v), t in self.value_costs.items() if (s, c) == (server, client)}

    def to_dict(self) -> dict:
        return {
            "nodes": [{"name": n, "kind": k} for n, k in sorted(self.nodes.items())],
            "edges": [
                {"server": s, "client": c, "time_ns": t}
                for (s, c), t in sorted(self.edges.items())
            ],
            "values": [
                {"server": s, "client": c, "value": v, "time_ns": t}
                for (s, c, v), t in sorted(self.value_costs.items())
            ],
        }


def analyze_boundaries(
    samples: Iterable[CostedSample],
    key: FeatureKey | str = "contract",
    kinds: Mapping[str, str] | None = None,
) -> BoundaryGraph:
    """Group the executing contract instance of each sample by its pair of parties."""
    key = FeatureKey(key) if isinstance(key, str) else key
    kinds = kinds or {}
    graph = BoundaryGraph()
    for cs in samples:
        payload = attribute(cs.sample).get(key)
        if payload is None:
            continue
        if not isinstance(payload, Blame):
            raise PluginInputError(f"contract payload must be Blame, got {payload!r}")
        edge = (payload.server, payload.client)
        graph.edges[edge] = graph.edges.get(edge, 0) + cs.cost_ns
        triple = (payload.server, payload.client, payload.value_name)
        graph.value_costs[triple] = graph.value_costs.get(triple, 0) + cs.cost_ns
        for name in edge:
            kind = kinds.get(name, "plain")
            if kind not in NODE_KINDS:
                raise ValueError(f"unknown node kind {kind!r}")
            graph.nodes[name] = kind
    return graph


_BARE_ID = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def _dot_id(name: str) -> str:
    if _BARE_ID.match(name):
        return name
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


def render_dot(graph: BoundaryGraph, name: str = "contracts") -> str:
    lines = [f"digraph {_dot_id(name)} {{"]
    for node, kind in sorted(graph.nodes.items()):
        if kind in _FILL:
            attrs = f'style=filled, fillcolor="{_FILL[kind]}"'
            if kind in _FONT:
                attrs += f", fontcolor={_FONT[kind]}"
            lines.append(f"  {_dot_id(node)} [{attrs}];")
        else:
            lines.append(f"  {_dot_id(node)};")
    for (server, client), t in sorted(graph.edges.items()):
        lines.append(f'  {_dot_id(server)} -> {_dot_id(client)} [label="{format_ms(t)} ms"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def render_boundaries(graph: BoundaryGraph) -> str:
    """Text form of the module graph followed by the by-value breakdown."""
    total = graph.total_ns
    lines = [f"Contract boundaries ({format_ms(total)} ms)"]
    for (server, client), t in sorted(graph.edges.items(), key=lambda kv: (-kv[1], kv[0])):
        lines.append(f"  {server} -> {client} : {format_ms(t)} ms ({format_percent(t, total)}%)")
        values = graph.values_on(server, client)
        for value, vt in sorted(values.items(), key=lambda kv: (-kv[1], kv[0])):
            lines.append(f"    {format_ms(vt)} ms : {value}")
    return "\n".join(lines) + "\n"
