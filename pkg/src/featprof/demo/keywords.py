"""Keyword-argument call protocol: a feature that calls back into user code.

The protocol's own work (sorting and checking keywords) is marked; the
callee's body runs under an antimark so it is not charged to the protocol.
"""
from __future__ import annotations

from typing import Callable

from featprof.demo.common import caller_loc, ensure_feature
from featprof.marks import MarkRuntime
from featprof.payloads import SourceLoc

FEATURE = "kw-protocol"


class KeywordProtocol:
    def __init__(self, runtime: MarkRuntime | None = None,
                 overhead: Callable[[dict], None] | None = None):
        self.runtime = runtime
        self.key = ensure_feature(runtime, FEATURE, True) if runtime is not None else None
        self.overhead = overhead

    def call(self, f: Callable, loc: SourceLoc | None = None, /, **kwargs):
        loc = loc or caller_loc()
        rt = self.runtime
        if rt is None:
            return self._call(f, kwargs)
        with rt.mark(self.key, loc):
            return self._call(f, kwargs, rt.antimark(self.key))

    def _call(self, f, kwargs, body_scope=None):
        names = sorted(kwargs)
        if self.overhead is not None:
            self.overhead(kwargs)
        ordered = {n: kwargs[n] for n in names}
        if body_scope is None:
            return f(**ordered)
        with body_scope:
            return f(**ordered)
