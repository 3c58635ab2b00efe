"""First-order contract wrappers with blame.

Checks run under a ``contract`` mark whose payload is the boundary's
:class:`~featprof.payloads.Blame`; the wrapped function's own body runs
under an antimark so its cost stays with the caller.  Higher-order contracts
are approximated by wrapping returned callables with the same blame.
"""
from __future__ import annotations

import functools
from typing import Callable

from featprof.demo.common import ensure_feature
from featprof.marks import MarkRuntime
from featprof.payloads import Blame

__all__ = ["FEATURE", "BlameError", "wrap_contract"]

FEATURE = "contract"


class BlameError(Exception):
    def __init__(self, blame: Blame, party: str, message: str):
        super().__init__(
            f"contract violation on {blame.value_name!r}: {message}; "
            f"blaming {party} (server {blame.server}, client {blame.client})"
        )
        self.blame = blame
        self.party = party


class _Unmarked:
    def __enter__(self):
        return None

    def __exit__(self, *exc):
        return False


_UNMARKED = _Unmarked()


def wrap_contract(
    f: Callable,
    server: str,
    client: str,
    value_name: str,
    pre_check: Callable[..., bool] | None = None,
    post_check: Callable[[object], bool] | None = None,
    runtime: MarkRuntime | None = None,
    codomain: tuple | None = None,
) -> Callable:
    """Wrap ``f`` exported by ``server`` to ``client``.

    ``pre_check(*args, **kwargs)`` failing blames the client; ``post_check(result)``
    failing blames the server.  When ``codomain`` is a ``(pre, post)`` pair and
    the result is callable, the result is wrapped with the same blame and
    those checks (a delayed, higher-order check).
    """
    blame = Blame(server, client, value_name)
    if runtime is not None:
        key = ensure_feature(runtime, FEATURE, True)

        def marked():
            return runtime.mark(key, blame)

        def unmarked():
            return runtime.antimark(key)
    else:
        def marked():
            return _UNMARKED

        unmarked = marked

    @functools.wraps(f)
    def wrapper(*args, **kwargs):
        with marked():
            if pre_check is not None and not pre_check(*args, **kwargs):
                raise BlameError(blame, client, "precondition failed")
            with unmarked():
                result = f(*args, **kwargs)
            if post_check is not None and not post_check(result):
                raise BlameError(blame, server, "postcondition failed")
            if codomain is not None and callable(result):
                result = wrap_contract(result, server, client, value_name,
                                       codomain[0], codomain[1], runtime)
        return result

    wrapper.__blame__ = blame
    return wrapper
