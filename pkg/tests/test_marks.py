import threading

import pytest
from hypothesis import given, settings, strategies as st

from featprof.marks import (
    Deferred,
    MarkRuntime,
    MarkStateError,
    RegistrationError,
    UnknownFeatureError,
    UnknownThreadError,
    defer,
)
from featprof.payloads import ANTIMARK, SourceLoc, Text


def test_mark_pushes_and_pops(runtime):
    k = runtime.register_feature("output")
    loc = SourceLoc("a.py", 1, 0)
    with runtime.mark(k, loc):
        (entry,) = runtime.snapshot()
        assert entry.key == k and entry.payload == loc
        with runtime.antimark(k):
            assert runtime.snapshot()[-1].is_antimark
        assert runtime.depth() == 1
    assert runtime.snapshot() == ()


def test_registration_errors(runtime):
    runtime.register_feature("x")
    with pytest.raises(RegistrationError):
        runtime.register_feature("x")
    with pytest.raises(UnknownFeatureError):
        runtime.feature("nope")
    other = MarkRuntime().register_feature("y")
    with pytest.raises(UnknownFeatureError):
        runtime.mark(other, Text("p"))
    with pytest.raises(ValueError):
        runtime.mark(runtime.feature("x"), ANTIMARK)


def test_features_in_registration_order(runtime):
    runtime.register_feature("b", False)
    runtime.register_feature("a")
    assert runtime.features() == [("b", False), ("a", True)]


def test_inactive_mark_is_noop(runtime):
    k = runtime.register_feature("lat", default_active=False)
    with runtime.mark(k, Text("p")):
        with runtime.antimark(k):
            assert runtime.snapshot() == ()


def test_set_active_rejects_live_mark(runtime):
    k = runtime.register_feature("x")
    with runtime.mark(k, Text("p")):
        with pytest.raises(MarkStateError):
            runtime.set_active(k, False)
    runtime.set_active(k, False)
    assert not runtime.is_active(k)
    with pytest.raises(UnknownFeatureError):
        runtime.set_active(MarkRuntime().register_feature("z"), True)


def test_exception_unwinds_stack(runtime):
    k = runtime.register_feature("x")
    with pytest.raises(ZeroDivisionError):
        with runtime.mark(k, Text("outer")):
            with runtime.antimark(k):
                1 / 0
    assert runtime.snapshot() == ()
    with pytest.raises(KeyError):
        runtime.with_mark(k, Text("p"), lambda: {}["missing"])
    assert runtime.depth() == 0


def test_wrap_function_latent_returns_identity(runtime):
    k = runtime.register_feature("lat", default_active=False)

    def f(x):
        return x + 1

    assert runtime.wrap_function(k, Text("site"), f) is f


def test_wrap_function_marks_and_defers(runtime):
    k = runtime.register_feature("out")
    seen = []

    def f(x, y=0):
        seen.append(runtime.snapshot())
        return x + y

    g = runtime.wrap_function(k, Text("site"), f, antimark_args=True)
    assert g.__name__ == "f"

    def thunk():
        seen.append(runtime.snapshot())
        return 2

    assert g(1, y=defer(thunk)) == 3
    assert [e.payload for e in seen[0]] == [Text("site"), ANTIMARK]
    assert [e.payload for e in seen[1]] == [Text("site")]
    assert runtime.snapshot() == ()
    # without antimark_args a Deferred is passed through untouched
    h = runtime.wrap_function(k, Text("s2"), lambda d: d)
    d = Deferred(lambda: 1)
    assert h(d) is d


def test_wrapper_stops_marking_after_deactivation(runtime):
    k = runtime.register_feature("out")
    g = runtime.wrap_function(k, Text("s"), runtime.snapshot)
    assert len(g()) == 1
    runtime.set_active(k, False)
    assert g() == ()


def test_deep_nesting(runtime):
    k = runtime.register_feature("deep")
    n = 100_000
    scopes = [runtime.mark(k, Text(str(i))) for i in range(n)]
    for s in scopes:
        s.__enter__()
    assert runtime.depth() == n
    for s in reversed(scopes):
        s.__exit__(None, None, None)
    assert runtime.depth() == 0


@given(st.lists(st.tuples(st.integers(0, 2), st.booleans()), max_size=50))
@settings(max_examples=200, deadline=None)
def test_balanced_nesting_restores_stack(plan):
    rt = MarkRuntime()
    keys = [rt.register_feature(f"f{i}") for i in range(3)]

    def nest(items):
        if not items:
            return
        (i, anti), rest = items[0], items[1:]
        before = rt.snapshot()
        scope = rt.antimark(keys[i]) if anti else rt.mark(keys[i], Text(str(i)))
        with scope:
            assert len(rt.snapshot()) == len(before) + 1
            nest(rest)
        assert rt.snapshot() == before

    nest(plan)
    assert rt.snapshot() == ()


def test_threads_are_isolated(runtime):
    k = runtime.register_feature("x")
    main = runtime.register_thread("main")
    ready, done = threading.Event(), threading.Event()
    out = {}

    def worker():
        runtime.register_thread("worker")
        with runtime.mark(k, Text("w")):
            ready.set()
            done.wait(5)
        out["after"] = runtime.snapshot()

    t = threading.Thread(target=worker)
    t.start()
    ready.wait(5)
    assert runtime.snapshot(main) == ()
    assert [e.payload for e in runtime.snapshot("worker")] == [Text("w")]
    done.set()
    t.join()
    assert out["after"] == ()
    assert set(runtime.threads()) == {"main", "worker"}
    with pytest.raises(UnknownThreadError):
        runtime.snapshot("ghost")
    err = []
    th = threading.Thread(target=lambda: err.append(_try_register(runtime, "main")))
    th.start()
    th.join()
    assert isinstance(err[0], RegistrationError)


def _try_register(rt, label):
    try:
        rt.register_thread(label)
    except RegistrationError as e:
        return e
    return None


def test_snapshot_consistency_under_concurrent_mutation(runtime):
    """Every snapshot is one instant: entry i carries depth i and a single generation."""
    k = runtime.register_feature("x")
    stop = threading.Event()
    label = {}

    def mutator():
        label["l"] = runtime.register_thread("mut")
        gen = 0
        while not stop.is_set():
            gen += 1
            scopes = []
            for depth in range(30):
                s = runtime.mark(k, Text(f"{gen}:{depth}"))
                s.__enter__()
                scopes.append(s)
            for s in reversed(scopes):
                s.__exit__(None, None, None)

    t = threading.Thread(target=mutator)
    t.start()
    try:
        while "l" not in label:
            pass
        for _ in range(20_000):
            snap = runtime.snapshot("mut")
            parts = [e.payload.text.split(":") for e in snap]
            assert [int(d) for _, d in parts] == list(range(len(snap)))
            assert len({g for g, _ in parts}) <= 1
    finally:
        stop.set()
        t.join()
