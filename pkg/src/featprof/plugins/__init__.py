"""Feature-specific analyses over full core samples.

A plug-in owns one feature key.  It receives every costed sample whose stack
holds that key (the whole stack, not just the topmost instance) and turns it
into a feature-specific view.  Plug-ins only add output; the base report is
computed without them.
"""
from __future__ import annotations

from typing import Iterable, Sequence

from featprof.analysis import CostedSample, assign_costs
from featprof.marks import FeatureKey
from featprof.trace import Trace

from featprof.plugins.errors import PluginInputError
from featprof.plugins.backtrack import BacktrackReport, analyze_backtracking, render_backtracking
from featprof.plugins.boundaries import BoundaryGraph, analyze_boundaries, render_boundaries, render_dot
from featprof.plugins.tree import TreeAttribution, TreeNode, analyze_tree, render_tree

__all__ = [
    "PluginInputError",
    "Plugin",
    "BoundaryPlugin",
    "TreePlugin",
    "BacktrackPlugin",
    "PLUGINS",
    "samples_with_key",
    "run_plugin",
    "BoundaryGraph",
    "TreeAttribution",
    "TreeNode",
    "BacktrackReport",
    "analyze_boundaries",
    "analyze_tree",
    "analyze_backtracking",
    "render_dot",
    "render_boundaries",
    "render_tree",
    "render_backtracking",
]


def samples_with_key(costed: Iterable[CostedSample], key: FeatureKey | str) -> list[CostedSample]:
    key = FeatureKey(key) if isinstance(key, str) else key
    return [cs for cs in costed if any(e.key == key for e in cs.sample.entries)]


class Plugin:
    key: str
    has_graph = False

    def __init__(self, key: str | None = None):
        if key is not None:
            self.key = key

    def analyze(self, costed: Sequence[CostedSample], total_ns: int):
        raise NotImplementedError

    def render(self, result) -> str:
        raise NotImplementedError

    def render_dot(self, result) -> str:
        raise TypeError(f"no graph view for feature {self.key!r}")

    def to_dict(self, result) -> dict:
        return result.to_dict()


class BoundaryPlugin(Plugin):
    key = "contract"
    has_graph = True

    def __init__(self, key: str | None = None, kinds: dict[str, str] | None = None):
        super().__init__(key)
        self.kinds = kinds or {}

    def analyze(self, costed, total_ns):
        return analyze_boundaries(costed, key=self.key, kinds=self.kinds)

    def render(self, result):
        return render_boundaries(result)

    def render_dot(self, result):
        return render_dot(result)


class TreePlugin(Plugin):
    key = "actor"

    def analyze(self, costed, total_ns):
        return analyze_tree(costed, key=self.key, total_ns=total_ns)

    def render(self, result):
        return render_tree(result)


class BacktrackPlugin(Plugin):
    key = "parser-disj"

    def analyze(self, costed, total_ns):
        return analyze_backtracking(costed, key=self.key, total_ns=total_ns)

    def render(self, result):
        return render_backtracking(result)


def default_plugins() -> dict[str, Plugin]:
    return {p.key: p for p in (BoundaryPlugin(), TreePlugin(), BacktrackPlugin())}


PLUGINS = default_plugins()


def run_plugin(trace: Trace, plugin: Plugin, costed: Sequence[CostedSample] | None = None):
    """Cost the whole trace, then hand the plug-in the samples holding its key."""
    if costed is None:
        costed = assign_costs(trace.samples)
    return plugin.analyze(samples_with_key(costed, plugin.key), trace.total_duration_ns)
