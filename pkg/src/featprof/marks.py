"""Per-thread mark stacks implementing the mark/antimark protocol.

Feature code brackets its dynamic extent with :meth:`MarkRuntime.mark`;
callbacks into user code are bracketed with :meth:`MarkRuntime.antimark`.
A sampler on another thread reads the stacks through
:meth:`MarkRuntime.snapshot`.

Stacks are plain lists mutated only by their owning thread.  ``snapshot``
copies the list with a single C-level ``tuple(list)`` call, which CPython
performs without running Python code, so a copy always reflects one instant
of the stack (the copy holds the GIL, or the list's own lock on
free-threaded builds).
"""
from __future__ import annotations

import functools
import threading
from dataclasses import dataclass
from typing import Any, Callable, NamedTuple

from featprof.payloads import ANTIMARK, Payload

__all__ = [
    "FeatureKey",
    "MarkEntry",
    "MarkRuntime",
    "Deferred",
    "defer",
    "RegistrationError",
    "UnknownFeatureError",
    "UnknownThreadError",
    "MarkStateError",
    "default_runtime",
]


class RegistrationError(ValueError):
    pass


class UnknownFeatureError(LookupError):
    pass


class UnknownThreadError(LookupError):
    pass


class MarkStateError(RuntimeError):
    pass


@dataclass(frozen=True, slots=True)
class FeatureKey:
    name: str

    def __post_init__(self):
        if not isinstance(self.name, str) or not self.name:
            raise ValueError("feature name must be a non-empty string")

    def __str__(self):
        return self.name


class MarkEntry(NamedTuple):
    key: FeatureKey
    payload: Payload

    @property
    def is_antimark(self) -> bool:
        return self.payload is ANTIMARK


class Deferred:
    """An argument whose evaluation a wrapped function performs under an antimark."""

    __slots__ = ("thunk",)

    def __init__(self, thunk: Callable[[], Any]):
        self.thunk = thunk

    def force(self):
        return self.thunk()


def defer(thunk: Callable[[], Any]) -> Deferred:
    return Deferred(thunk)


class _Scope:
    __slots__ = ("_stack", "_entry")

    def __init__(self, stack, entry):
        self._stack = stack
        self._entry = entry

    def __enter__(self):
        self._stack.append(self._entry)
        return self._entry

    def __exit__(self, exc_type, exc, tb):
        # the with-statement guarantees inner scopes already exited, so the
        # top is ours even when an exception is propagating
        self._stack.pop()
        return False


class _NullScope:
    __slots__ = ()

    def __enter__(self):
        return None

    def __exit__(self, exc_type, exc, tb):
        return False


_NULL_SCOPE = _NullScope()


class MarkRuntime:
    """Feature registry, activation state and per-thread mark stacks."""

    def __init__(self):
        self._features: dict[str, FeatureKey] = {}
        self._active: set[FeatureKey] = set()
        self._stacks: dict[str, list[MarkEntry]] = {}
        self._local = threading.local()
        self._lock = threading.Lock()

    # -- registry ---------------------------------------------------------

    def register_feature(self, name: str, default_active: bool = True) -> FeatureKey:
        key = FeatureKey(name)
        with self._lock:
            if name in self._features:
                raise RegistrationError(f"feature {name!r} is already registered")
            self._features[name] = key
            if default_active:
                self._active.add(key)
        return key

    def feature(self, name: str) -> FeatureKey:
        try:
            return self._features[name]
        except KeyError:
            raise UnknownFeatureError(f"unknown feature {name!r}") from None

    def features(self) -> list[tuple[str, bool]]:
        """``(name, active)`` pairs in registration order."""
        return [(name, key in self._active) for name, key in self._features.items()]

    def is_registered(self, key: FeatureKey) -> bool:
        return self._features.get(key.name) == key

    def is_active(self, key: FeatureKey) -> bool:
        return key in self._active

    def set_active(self, key: FeatureKey, on: bool) -> None:
        if not self.is_registered(key):
            raise UnknownFeatureError(f"unknown feature {key.name!r}")
        if (key in self._active) == bool(on):
            return
        for label, stack in list(self._stacks.items()):
            if any(entry.key == key for entry in tuple(stack)):
                raise MarkStateError(
                    f"cannot toggle {key.name!r}: a mark is live on thread {label!r}"
                )
        if on:
            self._active.add(key)
        else:
            self._active.discard(key)

    # -- threads ----------------------------------------------------------

    def register_thread(self, label: str | None = None) -> str:
        """Give the calling thread a mark stack; returns its label."""
        existing = getattr(self._local, "label", None)
        if existing is not None:
            return existing
        current = threading.current_thread()
        with self._lock:
            if label is None:
                label = current.name
                if label in self._stacks:
                    label = f"{current.name}-{current.ident}"
            elif label in self._stacks:
                raise RegistrationError(f"thread label {label!r} is already registered")
            stack: list[MarkEntry] = []
            self._stacks[label] = stack
        self._local.label = label
        self._local.stack = stack
        return label

    def threads(self) -> list[str]:
        return list(self._stacks)

    def current_thread_label(self) -> str:
        return self.register_thread()

    def current_stack(self) -> list[MarkEntry]:
        """The calling thread's live stack, for feature code that pushes directly.

        Callers must pop exactly what they push, in LIFO order.
        """
        return self._stack()

    def _stack(self) -> list[MarkEntry]:
        try:
            return self._local.stack
        except AttributeError:
            self.register_thread()
            return self._local.stack

    # -- marking ----------------------------------------------------------

    def mark(self, key: FeatureKey, payload: Payload):
        """Context manager pushing ``(key, payload)`` for the duration of a block."""
        if payload is ANTIMARK:
            raise ValueError("use antimark() to push an antimark")
        if key in self._active:
            return _Scope(self._stack(), MarkEntry(key, payload))
        if key.name not in self._features:
            raise UnknownFeatureError(f"unknown feature {key.name!r}")
        return _NULL_SCOPE

    def antimark(self, key: FeatureKey):
        if key in self._active:
            return _Scope(self._stack(), MarkEntry(key, ANTIMARK))
        if key.name not in self._features:
            raise UnknownFeatureError(f"unknown feature {key.name!r}")
        return _NULL_SCOPE

    def with_mark(self, key: FeatureKey, payload: Payload, body: Callable, *args, **kwargs):
        with self.mark(key, payload):
            return body(*args, **kwargs)

    def with_antimark(self, key: FeatureKey, body: Callable, *args, **kwargs):
        with self.antimark(key):
            return body(*args, **kwargs)

    def wrap_function(
        self,
        key: FeatureKey,
        payload: Payload,
        f: Callable,
        antimark_args: bool = False,
    ) -> Callable:
        """Functional latent mark: bind ``f`` so calls run under ``(key, payload)``.

        Activation is resolved here, at wrap time, the way a call-site rewrite
        would be: for an inactive key ``f`` itself is returned.  A wrapper made
        while the key was active stops marking if the key is later switched off.  With
        ``antimark_args``, :class:`Deferred` arguments are forced under an
        antimark inside the marked region.
        """
        if not self.is_registered(key):
            raise UnknownFeatureError(f"unknown feature {key.name!r}")
        if payload is ANTIMARK:
            raise ValueError("cannot wrap a function with an antimark payload")
        if key not in self._active:
            return f
        entry = MarkEntry(key, payload)
        anti = MarkEntry(key, ANTIMARK)
        local = self._local
        current_stack = self._stack
        active = self._active

        if antimark_args:
            @functools.wraps(f)
            def wrapped(*args, **kwargs):
                if key not in active:
                    return f(*args, **kwargs)
                try:
                    stack = local.stack
                except AttributeError:
                    stack = current_stack()
                stack.append(entry)
                try:
                    if Deferred in map(type, args) or (
                        kwargs and Deferred in map(type, kwargs.values())
                    ):
                        stack.append(anti)
                        try:
                            args = tuple(a.force() if type(a) is Deferred else a for a in args)
                            kwargs = {
                                k: v.force() if type(v) is Deferred else v
                                for k, v in kwargs.items()
                            }
                        finally:
                            stack.pop()
                    return f(*args, **kwargs)
                finally:
                    stack.pop()
        else:
            @functools.wraps(f)
            def wrapped(*args, **kwargs):
                if key not in active:
                    return f(*args, **kwargs)
                try:
                    stack = local.stack
                except AttributeError:
                    stack = current_stack()
                stack.append(entry)
                try:
                    return f(*args, **kwargs)
                finally:
                    stack.pop()

        return wrapped

    # -- inspection -------------------------------------------------------

    def snapshot(self, thread: str | None = None) -> tuple[MarkEntry, ...]:
        """Copy of a thread's stack, bottom-to-top, taken at a single instant."""
        if thread is None:
            return tuple(self._stack())
        try:
            stack = self._stacks[thread]
        except KeyError:
            raise UnknownThreadError(f"thread {thread!r} is not registered") from None
        return tuple(stack)

    def depth(self, thread: str | None = None) -> int:
        return len(self.snapshot(thread))


default_runtime = MarkRuntime()
