"""Output and generic-sequence features, both with functional latent marks.

Neither feature marks anything unless it is active when its call sites are
bound: ``OutputFeature.bind`` and ``SequenceFeature.bind`` hand back the
plain library function for an inactive feature, so latent marks cost
nothing at run time.
"""
from __future__ import annotations

from typing import Callable, IO, Iterable

from featprof.demo.common import caller_loc, ensure_feature
from featprof.marks import MarkEntry, MarkRuntime
from featprof.payloads import SourceLoc

__all__ = [
    "OUTPUT",
    "SEQUENCES",
    "printf",
    "GenericSequence",
    "generic_sequence",
    "OutputFeature",
    "SequenceFeature",
]

OUTPUT = "output"
SEQUENCES = "generic-sequences"


def printf(stream: IO[str], fmt: str, *args) -> None:
    stream.write(fmt % args if args else fmt)


class GenericSequence:
    """Iterator over any sequence-like value, dispatching on its kind each step."""

    __slots__ = ("_kind", "_src", "_i", "_n", "_it")

    def __init__(self, src):
        self._src = src
        self._i = 0
        if isinstance(src, range):
            self._kind, self._n = "range", len(src)
        elif isinstance(src, (list, tuple, str)):
            self._kind, self._n = "indexed", len(src)
        else:
            self._kind, self._n, self._it = "iter", -1, iter(src)

    def __iter__(self):
        return self

    def __next__(self):
        kind = self._kind
        if kind == "range" or kind == "indexed":
            i = self._i
            if i >= self._n:
                raise StopIteration
            self._i = i + 1
            return self._src[i]
        return next(self._it)


def generic_sequence(src) -> GenericSequence:
    return GenericSequence(src)


class OutputFeature:
    def __init__(self, runtime: MarkRuntime):
        self.runtime = runtime
        self.key = ensure_feature(runtime, OUTPUT, False)

    def bind(self, f: Callable = printf, loc: SourceLoc | None = None) -> Callable:
        """``f`` rewritten for one call site; identity when the feature is latent."""
        return self.runtime.wrap_function(self.key, loc or caller_loc(), f, antimark_args=True)


class _MarkedSequence(GenericSequence):
    __slots__ = ("_stack", "_entry", "_is_active")

    def __next__(self):
        if not self._is_active(self._entry.key):
            return GenericSequence.__next__(self)
        stack = self._stack
        stack.append(self._entry)
        try:
            return GenericSequence.__next__(self)
        finally:
            stack.pop()


class SequenceFeature:
    """Marks the per-step dispatch of generic iteration; the loop body runs unmarked."""

    def __init__(self, runtime: MarkRuntime):
        self.runtime = runtime
        self.key = ensure_feature(runtime, SEQUENCES, False)

    def bind(self, loc: SourceLoc | None = None) -> Callable[[Iterable], GenericSequence]:
        if not self.runtime.is_active(self.key):
            return generic_sequence
        entry = MarkEntry(self.key, loc or caller_loc())
        rt = self.runtime

        def marked_sequence(src):
            # bound to the stack of the thread that starts the iteration
            s = _MarkedSequence(src)
            s._stack = rt.current_stack()
            s._entry = entry
            s._is_active = rt.is_active
            return s

        return marked_sequence
