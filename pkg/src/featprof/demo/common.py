from __future__ import annotations

import os
import sys
import time

from featprof.marks import FeatureKey, MarkRuntime
from featprof.payloads import SourceLoc


def ensure_feature(runtime: MarkRuntime, name: str, default_active: bool) -> FeatureKey:
    """The runtime's key for ``name``, registering it on first use."""
    if name in dict(runtime.features()):
        return runtime.feature(name)
    return runtime.register_feature(name, default_active)


def caller_loc(depth: int = 2) -> SourceLoc:
    frame = sys._getframe(depth)
    return SourceLoc(os.path.basename(frame.f_code.co_filename), frame.f_lineno, 0)


def spin(ns: int) -> None:
    """Busy-wait on the monotonic clock so CPU sampling observes the time."""
    clock = time.perf_counter_ns
    end = clock() + ns
    while clock() < end:
        pass


def spin_ms(ms: float) -> None:
    spin(int(ms * 1_000_000))
