"""Command-line front end: ``featprof run|report|graph|bench``.

Exit codes are 0 on success, 2 for usage or input errors and 3 when a trace
file is corrupt.
"""
from __future__ import annotations

import argparse
import json
import statistics
import sys
import time
from pathlib import Path

from featprof import sampler
from featprof.analysis import analyze, render_text, report_to_dict
from featprof.demo.workloads import CONTRACT_KINDS, UnknownScenarioError, get_scenario, SCENARIOS
from featprof.marks import MarkRuntime
from featprof.plugins import PLUGINS, BoundaryPlugin, run_plugin
from featprof.trace import TraceError, load_trace, save_trace

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CORRUPT = 3


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_USAGE):
        super().__init__(message)
        self.code = code


def _positive(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _scenario(name):
    try:
        return get_scenario(name)
    except UnknownScenarioError as e:
        raise CliError(str(e)) from None


def _load(path):
    try:
        return load_trace(path)
    except FileNotFoundError:
        raise CliError(f"no such trace file: {path}") from None
    except TraceError as e:
        raise CliError(f"corrupt trace {path}: {e}", EXIT_CORRUPT) from None
    except UnicodeDecodeError as e:
        raise CliError(f"corrupt trace {path}: not UTF-8 ({e})", EXIT_CORRUPT) from None


def configured_runtime(scenario, active: list[str] | None) -> MarkRuntime:
    """Runtime with the scenario's features registered.

    ``active=None`` turns every scenario feature on; otherwise exactly the
    named features are active.
    """
    rt = MarkRuntime()
    scenario.register(rt)
    names = [n for n, _ in scenario.features]
    if active is not None:
        unknown = [a for a in active if a not in names]
        if unknown:
            raise CliError(
                f"scenario {scenario.name!r} has no feature(s) {', '.join(unknown)}; "
                f"choose from {', '.join(names)}"
            )
    for n in names:
        rt.set_active(rt.feature(n), active is None or n in active)
    return rt


def profile_scenario(scenario, active=None, interval_ms: float = 10.0, scale: float = 1.0):
    """Run a scenario under the sampler; returns ``(trace, result)``."""
    rt = configured_runtime(scenario, active)
    run = scenario.build(rt, scale)
    rt.register_thread()
    handle = sampler.start(sampler.SamplerConfig.from_ms(interval_ms), runtime=rt)
    try:
        result = run()
    finally:
        trace = handle.stop()
    return trace, result


# -- commands ----------------------------------------------------------------

def cmd_run(args, out) -> int:
    scenario = _scenario(args.scenario)
    active = None
    if args.active is not None:
        active = [a for part in args.active for a in part.split(",") if a]
    trace, _ = profile_scenario(scenario, active, args.interval_ms, args.scale)
    path = Path(args.out or f"{scenario.name}.fsp.jsonl")
    save_trace(trace, path)
    print(
        f"{scenario.name}: {trace.total_duration_ns / 1e6:.1f} ms, "
        f"{len(trace.samples)} samples -> {path}",
        file=out,
    )
    return EXIT_OK


def _plugin_for(name, kinds=None):
    if name == BoundaryPlugin.key:
        return BoundaryPlugin(kinds=kinds)
    return PLUGINS[name]


def cmd_report(args, out) -> int:
    trace = _load(args.trace)
    report = analyze(trace)
    wanted = args.plugin or []
    for name in wanted:
        if name not in PLUGINS:
            raise CliError(f"no plug-in for feature {name!r}; choose from {', '.join(PLUGINS)}")
    if args.format == "machine":
        doc = report_to_dict(report)
        views = {}
        for name in wanted:
            plugin = _plugin_for(name)
            views[name] = plugin.to_dict(run_plugin(trace, plugin))
        if views:
            doc["plugins"] = views
        out.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")
        return EXIT_OK
    out.write(render_text(report))
    for name in wanted:
        plugin = _plugin_for(name)
        out.write("\n" + plugin.render(run_plugin(trace, plugin)))
    return EXIT_OK


def cmd_graph(args, out) -> int:
    plugin = PLUGINS.get(args.feature)
    if plugin is None or not plugin.has_graph:
        raise CliError(f"feature {args.feature!r} has no graph view")
    trace = _load(args.trace)
    kinds = dict(CONTRACT_KINDS) if args.feature == BoundaryPlugin.key else {}
    for spec, kind in ((args.typed, "typed"), (args.untyped, "untyped")):
        for part in spec or []:
            kinds.update({n: kind for n in part.split(",") if n})
    plugin = _plugin_for(args.feature, kinds)
    dot = plugin.render_dot(run_plugin(trace, plugin))
    if args.out:
        Path(args.out).write_text(dot, encoding="utf-8")
        print(f"wrote {args.out}", file=out)
    else:
        out.write(dot)
    return EXIT_OK


BENCH_CONFIGS = ("no marks", "default marks", "all marks", "all marks + sampling")


def bench_scenario(scenario, repetitions: int = 30, scale: float = 1.0,
                   interval_ms: float = 10.0) -> dict[str, list[float]]:
    """Wall times in seconds per configuration, runs interleaved round by round."""
    def default_rt():
        rt = MarkRuntime()
        scenario.register(rt)
        return rt

    def all_rt():
        return configured_runtime(scenario, None)

    builds = {
        BENCH_CONFIGS[0]: lambda: (None, scenario.build(None, scale)),
        BENCH_CONFIGS[1]: lambda: (None, scenario.build(default_rt(), scale)),
        BENCH_CONFIGS[2]: lambda: (None, scenario.build(all_rt(), scale)),
    }

    def sampled():
        rt = all_rt()
        return rt, scenario.build(rt, scale)

    builds[BENCH_CONFIGS[3]] = sampled
    times: dict[str, list[float]] = {c: [] for c in BENCH_CONFIGS}
    for _ in range(repetitions):
        for name in BENCH_CONFIGS:
            rt, run = builds[name]()
            handle = None
            if rt is not None:
                rt.register_thread()
                handle = sampler.start(sampler.SamplerConfig.from_ms(interval_ms), runtime=rt)
            t0 = time.perf_counter()
            run()
            times[name].append(time.perf_counter() - t0)
            if handle is not None:
                handle.stop()
    return times


def format_bench(times: dict[str, list[float]]) -> str:
    base = statistics.median(times[BENCH_CONFIGS[0]])
    lines = [f"{'configuration':<22}{'median ms':>11}{'mean ms':>10}{'stdev ms':>10}{'ratio':>8}"]
    for name, ts in times.items():
        med = statistics.median(ts)
        sd = statistics.stdev(ts) if len(ts) > 1 else 0.0
        lines.append(
            f"{name:<22}{med * 1e3:>11.1f}{statistics.fmean(ts) * 1e3:>10.1f}"
            f"{sd * 1e3:>10.1f}{med / base:>8.3f}"
        )
    return "\n".join(lines) + "\n"


def cmd_bench(args, out) -> int:
    scenario = _scenario(args.scenario)
    times = bench_scenario(scenario, args.repetitions, args.scale)
    out.write(f"{scenario.name}: {args.repetitions} interleaved runs per configuration\n")
    out.write(format_bench(times))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="featprof", description="Profile programs by the library features they use.")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="profile a demo scenario and write a trace")
    r.add_argument("scenario", help=f"one of: {', '.join(SCENARIOS)}")
    r.add_argument("--interval-ms", type=_positive, default=10.0)
    r.add_argument("--active", action="append", metavar="FEATURE[,FEATURE]",
                   help="activate exactly these features (default: all of the scenario's)")
    r.add_argument("--out", help="trace path (default: SCENARIO.fsp.jsonl)")
    r.add_argument("--scale", type=_positive, default=1.0, help="workload size multiplier")
    r.set_defaults(func=cmd_run)

    rep = sub.add_parser("report", help="analyze a trace file")
    rep.add_argument("trace")
    rep.add_argument("--format", choices=("text", "machine"), default="text")
    rep.add_argument("--plugin", action="append", metavar="FEATURE",
                     help="add a plug-in view for FEATURE")
    rep.set_defaults(func=cmd_report)

    g = sub.add_parser("graph", help="write a feature's graph view as DOT")
    g.add_argument("trace")
    g.add_argument("feature")
    g.add_argument("--out")
    g.add_argument("--typed", action="append", metavar="NODE[,NODE]")
    g.add_argument("--untyped", action="append", metavar="NODE[,NODE]")
    g.set_defaults(func=cmd_graph)

    b = sub.add_parser("bench", help="instrumentation and sampling overhead")
    b.add_argument("scenario")
    b.add_argument("--repetitions", type=int, default=30)
    b.add_argument("--scale", type=_positive, default=1.0)
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE
    if getattr(args, "repetitions", 1) < 1:
        print("featprof: --repetitions must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args, out)
    except CliError as e:
        print(f"featprof: {e}", file=sys.stderr)
        return e.code
    except sampler.SamplerError as e:
        print(f"featprof: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
