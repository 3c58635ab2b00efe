"""Background collector that periodically snapshots mark stacks."""
from __future__ import annotations

import logging
import threading
import time
import warnings
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Iterable

from featprof.marks import MarkRuntime, UnknownThreadError, default_runtime
from featprof.trace import SampleRecord, Trace, TraceHeader

__all__ = [
    "SamplerConfig",
    "SamplerHandle",
    "SamplerError",
    "SampleRecord",
    "start",
    "stop",
    "collect_once",
    "profile",
]

log = logging.getLogger(__name__)

DEFAULT_INTERVAL_NS = 10_000_000
CLOCK = "perf_counter"


class SamplerError(RuntimeError):
    pass


@dataclass(frozen=True)
class SamplerConfig:
    interval_ns: int = DEFAULT_INTERVAL_NS
    clock: str = CLOCK

    def __post_init__(self):
        if self.interval_ns <= 0:
            raise SamplerError(f"interval must be positive, got {self.interval_ns} ns")
        if self.clock != CLOCK:
            raise SamplerError(f"unsupported clock {self.clock!r}")

    @classmethod
    def from_ms(cls, interval_ms: float) -> "SamplerConfig":
        return cls(interval_ns=round(interval_ms * 1_000_000))


def collect_once(
    threads: Iterable[str],
    runtime: MarkRuntime | None = None,
    t0: int | None = None,
) -> list[SampleRecord]:
    """Snapshot each thread once.  Unknown threads are skipped with a warning."""
    rt = runtime or default_runtime
    now = time.perf_counter_ns()
    t = 0 if t0 is None else now - t0
    records, skipped = [], 0
    for label in threads:
        try:
            entries = rt.snapshot(label)
        except UnknownThreadError:
            skipped += 1
            continue
        records.append(SampleRecord(t, label, entries))
    if skipped:
        warnings.warn(f"skipped {skipped} unregistered thread(s)", RuntimeWarning, stacklevel=2)
    return records


class SamplerHandle:
    """A running collector; ``stop()`` halts it and returns the trace."""

    def __init__(self, config: SamplerConfig, threads: list[str], runtime: MarkRuntime):
        self.config = config
        self.threads = threads
        self.runtime = runtime
        self._records: list[SampleRecord] = []
        self._halt = threading.Event()
        self._stopped = False
        self._start_wall = datetime.now(timezone.utc).isoformat(timespec="microseconds")
        self._t0 = time.perf_counter_ns()
        self._thread = threading.Thread(target=self._run, name="featprof-sampler", daemon=True)
        self._thread.start()

    def _run(self):
        interval = self.config.interval_ns / 1e9
        snapshot = self.runtime.snapshot
        records = self._records
        threads = self.threads
        t0 = self._t0
        clock = time.perf_counter_ns
        while not self._halt.wait(interval):
            t = clock() - t0
            for label in threads:
                records.append(SampleRecord(t, label, snapshot(label)))

    @property
    def running(self) -> bool:
        return not self._stopped

    def stop(self) -> Trace:
        if self._stopped:
            raise SamplerError("sampler already stopped")
        self._halt.set()
        self._thread.join()
        total = time.perf_counter_ns() - self._t0
        self._stopped = True
        header = TraceHeader(
            interval_ns=self.config.interval_ns,
            start_wall=self._start_wall,
            features=tuple(self.runtime.features()),
            total_duration_ns=total,
            clock=self.config.clock,
        )
        # a single collector appends in time order; sort anyway so the
        # post-condition does not depend on that
        samples = tuple(sorted(self._records, key=lambda r: r.t))
        log.debug("sampler stopped: %d samples over %d ns", len(samples), total)
        return Trace(header, samples)


def start(
    config: SamplerConfig | None = None,
    threads: Iterable[str] | None = None,
    runtime: MarkRuntime | None = None,
) -> SamplerHandle:
    """Start sampling ``threads`` (default: the calling thread)."""
    rt = runtime or default_runtime
    config = config or SamplerConfig()
    if threads is None:
        threads = [rt.current_thread_label()]
    threads = list(threads)
    if not threads:
        raise SamplerError("no threads to sample")
    known = set(rt.threads())
    missing = [t for t in threads if t not in known]
    if missing:
        raise UnknownThreadError(f"threads not registered: {missing}")
    return SamplerHandle(config, threads, rt)


def stop(handle: SamplerHandle) -> Trace:
    return handle.stop()


class profile:
    """``with profile(rt) as p: ...`` then ``p.trace``."""

    def __init__(self, runtime: MarkRuntime | None = None, config: SamplerConfig | None = None,
                 threads: Iterable[str] | None = None):
        self.runtime = runtime or default_runtime
        self.config = config
        self.threads = threads
        self.trace: Trace | None = None
        self._handle: SamplerHandle | None = None

    def __enter__(self):
        self._handle = start(self.config, self.threads, self.runtime)
        return self

    def __exit__(self, exc_type, exc, tb):
        self.trace = self._handle.stop()
        return False
