"""Payload variants carried by feature marks.

A payload identifies the feature *instance* a mark belongs to.  All variants
are small frozen records so they can be built cheaply on every push and
compared structurally when samples are grouped.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

__all__ = [
    "SourceLoc",
    "Blame",
    "ProcessId",
    "ParserTriple",
    "Text",
    "Antimark",
    "ANTIMARK",
    "Payload",
    "payload_text",
]


@dataclass(frozen=True, slots=True)
class SourceLoc:
    file: str
    line: int
    col: int = 0

    def __post_init__(self):
        if self.line < 1:
            raise ValueError(f"line must be positive, got {self.line}")
        if self.col < 0:
            raise ValueError(f"col must be non-negative, got {self.col}")

    def __str__(self):
        return f"{self.file}:{self.line}:{self.col}"


@dataclass(frozen=True, slots=True)
class Blame:
    """Parties to a contract boundary plus the name of the contracted value."""

    server: str
    client: str
    value_name: str

    def __str__(self):
        return f"{self.value_name} ({self.server} -> {self.client})"


@dataclass(frozen=True, slots=True)
class ProcessId:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True, slots=True)
class ParserTriple:
    disjunction: SourceLoc
    branch_index: int
    input_offset: int

    def __post_init__(self):
        if self.branch_index < 0 or self.input_offset < 0:
            raise ValueError("branch_index and input_offset must be non-negative")

    def __str__(self):
        return f"{self.disjunction} branch {self.branch_index} @ {self.input_offset}"


@dataclass(frozen=True, slots=True)
class Text:
    text: str

    def __str__(self):
        return self.text


class Antimark:
    """The distinguished payload that cancels its own feature's attribution."""

    __slots__ = ()
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "ANTIMARK"

    def __str__(self):
        return "antimark"

    def __reduce__(self):
        return (Antimark, ())


ANTIMARK = Antimark()

Payload = Union[SourceLoc, Blame, ProcessId, ParserTriple, Text, Antimark]


def payload_text(payload: Payload) -> str:
    """Canonical human-readable text; also the tie-break key in reports."""
    return str(payload)
