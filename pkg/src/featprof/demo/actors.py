"""Cooperative actor system: nested schedulers ("VMs") and leaf processes.

A process is a generator; each ``next()`` is one scheduling slice and may
yield an output value.  A VM runs its own bookkeeping and then one slice of
each live child, round robin.  Each slice runs under an ``actor`` mark naming
the process, pushed inside the marks of every enclosing VM, so a core sample
taken during the slice spells out the process's full ancestry.
"""
from __future__ import annotations

from typing import Callable, Iterator, Union

from featprof.demo.common import ensure_feature
from featprof.marks import MarkRuntime
from featprof.payloads import ProcessId

__all__ = ["FEATURE", "Process", "VM", "run_actors"]

FEATURE = "actor"


class Process:
    def __init__(self, name: str, behavior: Callable[[], Iterator]):
        self.name = name
        self.behavior = behavior


class VM:
    def __init__(self, name: str, children: list[Union["VM", Process]],
                 bookkeeping: Callable[[], None] | None = None):
        self.name = name
        self.children = list(children)
        self.bookkeeping = bookkeeping


class _Running:
    __slots__ = ("node", "path", "gen", "children", "done")

    def __init__(self, node, path):
        self.node = node
        self.path = path
        self.done = False
        if isinstance(node, VM):
            self.gen = None
            self.children = [_Running(c, path + (c.name,)) for c in node.children]
        else:
            self.gen = node.behavior()
            self.children = None


def run_actors(root: VM, runtime: MarkRuntime | None = None, max_rounds: int | None = None) -> list:
    """Run until every process finishes; returns ``(path, value)`` outputs in order."""
    key = ensure_feature(runtime, FEATURE, True) if runtime is not None else None
    outputs: list = []
    top = _Running(root, (root.name,))

    if runtime is None:
        def scoped(name):
            return _NoScope
    else:
        mark = runtime.mark

        def scoped(name):
            return mark(key, ProcessId(name))

    def step(r: _Running) -> None:
        with scoped(r.node.name):
            if r.gen is not None:
                try:
                    value = next(r.gen)
                except StopIteration:
                    r.done = True
                    return
                if value is not None:
                    outputs.append(("/".join(r.path), value))
                return
            if r.node.bookkeeping is not None:
                r.node.bookkeeping()
            for child in r.children:
                step(child)
            r.children = [c for c in r.children if not c.done]
            r.done = not r.children

    rounds = 0
    while not top.done:
        step(top)
        rounds += 1
        if max_rounds is not None and rounds >= max_rounds:
            break
    return outputs


class _NoScopeType:
    def __enter__(self):
        return None

    def __exit__(self, *exc):
        return False


_NoScope = _NoScopeType()
