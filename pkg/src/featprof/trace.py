"""Trace records and the ``.fsp.jsonl`` file format.

Line 1 is the header object; each following line is one sample::

    {"version":1,"clock":"perf_counter","interval_ns":10000000,
     "start_wall":"2026-10-14T09:00:00+00:00","total_duration_ns":1234,
     "features":[{"name":"output","active":true}]}
    {"t":0,"thread":"MainThread","marks":[{"key":"output","payload":{...}}]}

Marks are listed bottom-to-top.  Payloads are objects tagged by ``type``
(``SourceLoc``, ``Blame``, ``ProcessId``, ``ParserTriple``, ``Text``); the
antimark is ``{"anti":true}``.  Field order is fixed and separators are
compact, so serialization is byte-deterministic.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import IO, Iterable

from featprof.marks import FeatureKey, MarkEntry
from featprof.payloads import (
    ANTIMARK,
    Blame,
    ParserTriple,
    Payload,
    ProcessId,
    SourceLoc,
    Text,
)

__all__ = [
    "FORMAT_VERSION",
    "TRACE_SUFFIX",
    "SampleRecord",
    "TraceHeader",
    "Trace",
    "TraceError",
    "TraceParseError",
    "TraceVersionError",
    "write_trace",
    "read_trace",
    "dumps_trace",
    "loads_trace",
    "save_trace",
    "load_trace",
    "payload_to_json",
    "payload_from_json",
]

FORMAT_VERSION = 1
TRACE_SUFFIX = ".fsp.jsonl"


class TraceError(Exception):
    pass


class TraceParseError(TraceError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class TraceVersionError(TraceError):
    pass


@dataclass(frozen=True)
class SampleRecord:
    t: int
    thread: str
    entries: tuple[MarkEntry, ...] = ()

    def top_first(self) -> tuple[MarkEntry, ...]:
        return self.entries[::-1]

    def keys(self) -> set[FeatureKey]:
        return {e.key for e in self.entries}


@dataclass(frozen=True)
class TraceHeader:
    interval_ns: int
    start_wall: str
    features: tuple[tuple[str, bool], ...]
    total_duration_ns: int
    clock: str = "perf_counter"
    version: int = FORMAT_VERSION

    def __post_init__(self):
        if self.version != FORMAT_VERSION:
            raise TraceVersionError(f"unsupported trace version {self.version}")
        if self.interval_ns <= 0:
            raise ValueError("interval_ns must be positive")
        if self.total_duration_ns < 0:
            raise ValueError("total_duration_ns must be non-negative")

    @property
    def feature_names(self) -> list[str]:
        return [name for name, _ in self.features]


@dataclass(frozen=True)
class Trace:
    """A finalized trace: header plus samples in collection order."""

    header: TraceHeader
    samples: tuple[SampleRecord, ...] = field(default_factory=tuple)

    @property
    def total_duration_ns(self) -> int:
        return self.header.total_duration_ns

    @property
    def interval_ns(self) -> int:
        return self.header.interval_ns

    def threads(self) -> list[str]:
        seen: dict[str, None] = {}
        for s in self.samples:
            seen.setdefault(s.thread, None)
        return list(seen)


# -- payload codec ---------------------------------------------------------


def _loc_to_json(loc: SourceLoc) -> dict:
    return {"type": "SourceLoc", "file": loc.file, "line": loc.line, "col": loc.col}


def payload_to_json(payload: Payload) -> dict:
    if payload is ANTIMARK:
        return {"anti": True}
    if isinstance(payload, SourceLoc):
        return _loc_to_json(payload)
    if isinstance(payload, Blame):
        return {
            "type": "Blame",
            "server": payload.server,
            "client": payload.client,
            "value": payload.value_name,
        }
    if isinstance(payload, ProcessId):
        return {"type": "ProcessId", "name": payload.name}
    if isinstance(payload, ParserTriple):
        return {
            "type": "ParserTriple",
            "disjunction": _loc_to_json(payload.disjunction),
            "branch": payload.branch_index,
            "offset": payload.input_offset,
        }
    if isinstance(payload, Text):
        return {"type": "Text", "text": payload.text}
    raise TypeError(f"cannot serialize payload {payload!r}")


def _loc_from_json(obj) -> SourceLoc:
    if not isinstance(obj, dict) or obj.get("type") != "SourceLoc":
        raise ValueError("expected a SourceLoc object")
    return SourceLoc(_str(obj["file"]), _int(obj["line"]), _int(obj["col"]))


def _str(v) -> str:
    if not isinstance(v, str):
        raise ValueError(f"expected string, got {v!r}")
    return v


def _int(v) -> int:
    if not isinstance(v, int) or isinstance(v, bool):
        raise ValueError(f"expected integer, got {v!r}")
    return v


def payload_from_json(obj) -> Payload:
    if not isinstance(obj, dict):
        raise ValueError(f"payload must be an object, got {obj!r}")
    if obj.get("anti") is True:
        return ANTIMARK
    kind = obj.get("type")
    if kind == "SourceLoc":
        return _loc_from_json(obj)
    if kind == "Blame":
        return Blame(_str(obj["server"]), _str(obj["client"]), _str(obj["value"]))
    if kind == "ProcessId":
        return ProcessId(_str(obj["name"]))
    if kind == "ParserTriple":
        return ParserTriple(
            _loc_from_json(obj["disjunction"]), _int(obj["branch"]), _int(obj["offset"])
        )
    if kind == "Text":
        return Text(_str(obj["text"]))
    # forward compatibility: keep unknown variants as their canonical JSON text
    return Text(json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False))


# -- writing -----------------------------------------------------------------


def _dumps(obj) -> str:
    return json.dumps(obj, separators=(",", ":"), ensure_ascii=False)


def _header_line(h: TraceHeader) -> str:
    return _dumps({
        "version": h.version,
        "clock": h.clock,
        "interval_ns": h.interval_ns,
        "start_wall": h.start_wall,
        "total_duration_ns": h.total_duration_ns,
        "features": [{"name": n, "active": a} for n, a in h.features],
    })


def _sample_line(s: SampleRecord) -> str:
    return _dumps({
        "t": s.t,
        "thread": s.thread,
        "marks": [
            {"key": e.key.name, "payload": payload_to_json(e.payload)} for e in s.entries
        ],
    })


def _lines(trace: Trace) -> Iterable[str]:
    yield _header_line(trace.header)
    for s in trace.samples:
        yield _sample_line(s)


def dumps_trace(trace: Trace) -> str:
    return "".join(line + "\n" for line in _lines(trace))


def write_trace(trace: Trace, sink: IO[bytes]) -> None:
    """Write ``trace`` to a binary sink as UTF-8 JSON lines."""
    for line in _lines(trace):
        sink.write((line + "\n").encode("utf-8"))


def save_trace(trace: Trace, path) -> None:
    with open(path, "wb") as f:
        write_trace(trace, f)


# -- reading -----------------------------------------------------------------


def _parse_header(line: str) -> TraceHeader:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as e:
        raise TraceParseError(1, f"malformed header: {e.msg}") from None
    if not isinstance(obj, dict):
        raise TraceParseError(1, "header must be an object")
    if "version" in obj and obj["version"] != FORMAT_VERSION:
        raise TraceVersionError(f"unsupported trace version {obj['version']!r}")
    try:
        features = tuple(
            (_str(f["name"]), bool(f["active"])) for f in obj["features"]
        )
        return TraceHeader(
            interval_ns=_int(obj["interval_ns"]),
            start_wall=_str(obj["start_wall"]),
            features=features,
            total_duration_ns=_int(obj["total_duration_ns"]),
            clock=_str(obj.get("clock", "perf_counter")),
            version=_int(obj["version"]),
        )
    except TraceVersionError:
        raise
    except (KeyError, TypeError, ValueError) as e:
        raise TraceParseError(1, f"bad header: {e}") from None


def _parse_sample(line: str, lineno: int, keys: dict[str, FeatureKey], total: int) -> SampleRecord:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as e:
        raise TraceParseError(lineno, f"malformed sample: {e.msg}") from None
    try:
        t = _int(obj["t"])
        thread = _str(obj["thread"])
        entries = []
        for m in obj["marks"]:
            name = _str(m["key"])
            if name not in keys:
                raise TraceParseError(lineno, f"sample references unregistered feature {name!r}")
            entries.append(MarkEntry(keys[name], payload_from_json(m["payload"])))
    except TraceParseError:
        raise
    except (KeyError, TypeError, ValueError) as e:
        raise TraceParseError(lineno, f"bad sample: {e}") from None
    if t < 0 or t > total:
        raise TraceParseError(lineno, f"timestamp {t} outside [0, {total}]")
    return SampleRecord(t, thread, tuple(entries))


def loads_trace(text: str) -> Trace:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise TraceParseError(1, "empty trace file")
    header = _parse_header(lines[0])
    keys = {name: FeatureKey(name) for name in header.feature_names}
    samples = tuple(
        _parse_sample(line, i, keys, header.total_duration_ns)
        for i, line in enumerate(lines[1:], start=2)
    )
    return Trace(header, samples)


def read_trace(source: IO[bytes]) -> Trace:
    """Parse a whole trace; raises before returning anything on bad input."""
    data = source.read()
    try:
        text = data.decode("utf-8") if isinstance(data, bytes) else data
    except UnicodeDecodeError as e:
        raise TraceParseError(data.count(b"\n", 0, e.start) + 1, "invalid UTF-8") from None
    return loads_trace(text)


def load_trace(path) -> Trace:
    with open(path, "rb") as f:
        return read_trace(f)
