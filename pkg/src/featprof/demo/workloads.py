"""Named demo scenarios used by the CLI, the benchmark and the acceptance tests.

``Scenario.build(runtime, scale)`` binds the scenario's features against a
runtime (``None`` builds the uninstrumented program) and returns a
zero-argument callable that runs the workload and returns its functional
output.  Binding happens before timing starts, the way latent marks are
resolved before a program runs.
"""
from __future__ import annotations

import io
from dataclasses import dataclass
from typing import Any, Callable

from featprof.demo import actors, contracts, keywords, output, parser
from featprof.demo.common import spin
from featprof.marks import MarkRuntime
from featprof.payloads import SourceLoc

__all__ = ["Scenario", "SCENARIOS", "demo_workloads", "get_scenario", "UnknownScenarioError"]


class UnknownScenarioError(LookupError):
    pass


@dataclass(frozen=True)
class Scenario:
    name: str
    description: str
    expected: str
    features: tuple[tuple[str, bool], ...]
    builder: Callable[[MarkRuntime | None, float], Callable[[], Any]]

    def register(self, runtime: MarkRuntime) -> None:
        for name, active in self.features:
            runtime.register_feature(name, active)

    def build(self, runtime: MarkRuntime | None, scale: float = 1.0) -> Callable[[], Any]:
        if scale <= 0:
            raise ValueError("scale must be positive")
        return self.builder(runtime, scale)


# -- fizzbuzz ----------------------------------------------------------------

FIZZBUZZ_FILE = "fizzbuzz.py"


def fizzbuzz(n, out, iterate, p_fizzbuzz, p_buzz, p_fizz, p_num):
    for i in iterate(range(n)):
        if i % 15 == 0:
            p_fizzbuzz(out, "FizzBuzz\n")
        elif i % 5 == 0:
            p_buzz(out, "Buzz\n")
        elif i % 3 == 0:
            p_fizz(out, "Fizz\n")
        else:
            p_num(out, "%d\n", i)


def _build_fizzbuzz(rt, scale):
    n = max(1, int(400_000 * scale))
    if rt is None:
        sites = (output.printf,) * 4
        iterate = output.generic_sequence
    else:
        out_feature = output.OutputFeature(rt)
        sites = tuple(
            out_feature.bind(output.printf, SourceLoc(FIZZBUZZ_FILE, line, 12))
            for line in (5, 6, 7, 8)
        )
        iterate = output.SequenceFeature(rt).bind(SourceLoc(FIZZBUZZ_FILE, 3, 13))

    def run():
        out = io.StringIO()
        fizzbuzz(n, out, iterate, *sites)
        return out.getvalue()

    return run


# -- parser backtracking -----------------------------------------------------

PARSER_FILE = "bs_parser.py"


def backtracking_grammar(rt: MarkRuntime | None):
    """``(many b then a) | many b``: on input without an ``a`` the first branch fails late."""
    b = parser.char("b")
    bs = parser.many(b)
    return parser.disj(
        parser.seq(bs, parser.char("a")),
        bs,
        loc=SourceLoc(PARSER_FILE, 4, 2),
        runtime=rt,
    )


def _build_parser(rt, scale):
    text = "b" * max(1, int(1_000_000 * scale))
    grammar = backtracking_grammar(rt)

    def run():
        r = parser.parse(grammar, text)
        return (len(r.value) if isinstance(r.value, list) else r.value, r.end)

    return run


# -- actors ------------------------------------------------------------------

def echo_topology(scale: float = 1.0, unit_ns: int = 200_000, messages: int | None = None,
                  bookkeeping_ns: int = 800_000):
    """Ground VM with a listener VM and two clients; the second sends 10x the input."""
    if messages is None:
        messages = max(1, int(300 * scale))

    def client(weight):
        def behavior():
            for i in range(messages):
                spin(unit_ns * weight)
                yield f"echo {i}"
        return behavior

    def listener():
        for _ in range(messages):
            yield None

    return actors.VM("ground", [
        actors.VM("tcp-driver", [actors.Process("listener", listener)],
                  bookkeeping=lambda: spin(bookkeeping_ns // 10)),
        actors.Process("client-53587", client(1)),
        actors.Process("client-53588", client(10)),
    ], bookkeeping=lambda: spin(bookkeeping_ns))


def _build_actors(rt, scale):
    topology = echo_topology(scale)

    def run():
        return actors.run_actors(topology, rt)

    return run


# -- contracts ---------------------------------------------------------------

def _build_contracts(rt, scale):
    unit = int(2_000_000 * scale)

    def matrix_mul(a, b):
        return [[sum(x * y for x, y in zip(row, col)) for col in zip(*b)] for row in a]

    def vector_add(a, b):
        return [x + y for x, y in zip(a, b)]

    def expensive_check(ns):
        def check(*args, **kwargs):
            spin(ns)
            return True
        return check

    mul = contracts.wrap_contract(matrix_mul, "math", "mixer", "matrix*",
                                  pre_check=expensive_check(3 * unit), runtime=rt)
    add = contracts.wrap_contract(vector_add, "math", "mixer", "vector+",
                                  pre_check=expensive_check(unit), runtime=rt)
    gain = contracts.wrap_contract(lambda k: (lambda v: [k * x for x in v]), "synth", "mixer",
                                   "make-gain", pre_check=expensive_check(unit // 4),
                                   codomain=(expensive_check(unit // 4), None), runtime=rt)

    def run():
        results = []
        m = [[1, 2], [3, 4]]
        v = [1.0, 2.0]
        for i in range(50):
            results.append(mul(m, m))
            results.append(add(v, v))
            results.append(gain(i)(v))
        return results

    return run


# -- keyword protocol with callbacks ------------------------------------------

def _build_callbacks(rt, scale, feature_ms: float = 600.0, callback_ms: float = 600.0):
    feature_ns = int(feature_ms * 1_000_000 * scale)
    callback_ns = int(callback_ms * 1_000_000 * scale)
    protocol = keywords.KeywordProtocol(rt, overhead=lambda kw: spin(feature_ns))

    def callback(*, width, height):
        spin(callback_ns)
        return width * height

    def run():
        return protocol.call(callback, SourceLoc("shapes.py", 9, 4), width=3, height=4)

    return run


SCENARIOS: dict[str, Scenario] = {
    s.name: s
    for s in (
        Scenario(
            "fizzbuzz",
            "FizzBuzz writing to an in-memory stream through generic iteration.",
            "output dominates; its four call sites are listed in the order num > fizz > buzz > fizzbuzz",
            ((output.OUTPUT, False), (output.SEQUENCES, False)),
            _build_fizzbuzz,
        ),
        Scenario(
            "parser-backtrack",
            "(many b then a) | many b over a long run of b characters.",
            "branch 0 of the only disjunction is wasted, roughly half of the parse",
            ((parser.FEATURE, False),),
            _build_parser,
        ),
        Scenario(
            "echo-actors",
            "Echo server: ground VM, a driver VM and two clients with a 1:10 load ratio.",
            "ground VM has positive self time; client-53588 costs about 10x client-53587",
            ((actors.FEATURE, True),),
            _build_actors,
        ),
        Scenario(
            "contracts",
            "Untyped mixer calling typed math and synth exports through contracts.",
            "math -> mixer carries most contract time; matrix* costs about 3x vector+",
            ((contracts.FEATURE, True),),
            _build_contracts,
        ),
        Scenario(
            "kw-callback",
            "Keyword-argument protocol doing 600 ms of work around a 600 ms callback.",
            "kw-protocol near 600 ms; nothing of the callback is charged to it",
            ((keywords.FEATURE, True),),
            _build_callbacks,
        ),
    )
}

# node kinds for the boundary graph of the contracts scenario
CONTRACT_KINDS = {"math": "typed", "synth": "typed", "mixer": "untyped"}


def demo_workloads() -> dict[str, Scenario]:
    return dict(SCENARIOS)


def get_scenario(name: str) -> Scenario:
    try:
        return SCENARIOS[name]
    except KeyError:
        raise UnknownScenarioError(
            f"unknown scenario {name!r}; choose from {', '.join(sorted(SCENARIOS))}"
        ) from None
