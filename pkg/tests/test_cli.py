import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from conftest import make_trace, rec
from fizzbuzz_report import fizzbuzz_report_trace
from featprof.cli import main
from featprof.demo.workloads import SCENARIOS
from featprof.payloads import Blame
from featprof.trace import load_trace, save_trace

GOLDEN = Path(__file__).parent / "golden"


def cli(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def test_run_writes_trace(tmp_path):
    path = tmp_path / "t.fsp.jsonl"
    code, out = cli("run", "fizzbuzz", "--interval-ms", "10", "--out", str(path), "--scale", "0.05")
    assert code == 0
    assert "samples" in out and str(path) in out
    trace = load_trace(path)
    assert trace.header.interval_ns == 10_000_000
    assert dict(trace.header.features) == {"output": True, "generic-sequences": True}


def test_run_active_subset(tmp_path):
    path = tmp_path / "f.fsp.jsonl"
    assert cli("run", "fizzbuzz", "--active", "output", "--out", str(path), "--scale", "0.05")[0] == 0
    trace = load_trace(path)
    assert dict(trace.header.features) == {"output": True, "generic-sequences": False}
    assert all(e.key.name == "output" for s in trace.samples for e in s.entries)


def test_run_parser_only_has_parser_feature(tmp_path):
    path = tmp_path / "p.fsp.jsonl"
    assert cli("run", "parser-backtrack", "--active", "parser-disj", "--out", str(path),
               "--scale", "0.05")[0] == 0
    assert {n for n, _ in load_trace(path).header.features} == {"parser-disj"}


def test_run_errors(tmp_path, capsys):
    assert cli("run", "nope")[0] == 2
    assert cli("run", "fizzbuzz", "--active", "contract", "--out", str(tmp_path / "x"))[0] == 2
    assert cli("run", "fizzbuzz", "--interval-ms", "0")[0] == 2
    assert cli("bench", "fizzbuzz", "--repetitions", "0")[0] == 2
    assert cli()[0] == 2
    assert "unknown scenario" in capsys.readouterr().err


def test_report_golden(tmp_path):
    path = tmp_path / "fizzbuzz.fsp.jsonl"
    save_trace(fizzbuzz_report_trace(), path)
    code, out = cli("report", str(path))
    assert code == 0
    assert out == (GOLDEN / "fizzbuzz_report.txt").read_text()


def test_report_machine_format(tmp_path):
    path = tmp_path / "fizzbuzz.fsp.jsonl"
    save_trace(fizzbuzz_report_trace(), path)
    code, out = cli("report", str(path), "--format", "machine")
    doc = json.loads(out)
    assert doc["total_duration_ns"] == 8180 * 10**6
    assert doc["features"][0]["time_ns"] == 5580 * 10**6


def test_report_empty_trace(tmp_path):
    path = tmp_path / "e.fsp.jsonl"
    save_trace(make_trace([], total=0, features=()), path)
    code, out = cli("report", str(path))
    assert code == 0
    assert out.splitlines()[0] == "Feature Report" and len(out.splitlines()) == 2


def test_report_corrupt_trace(tmp_path, capsys):
    path = tmp_path / "bad.fsp.jsonl"
    save_trace(fizzbuzz_report_trace(), path)
    text = path.read_text().splitlines()
    text[5] = text[5][:10]
    path.write_text("\n".join(text) + "\n")
    assert cli("report", str(path))[0] == 3
    assert "line 6" in capsys.readouterr().err
    assert cli("report", str(tmp_path / "missing"))[0] == 2


def contract_trace(tmp_path):
    b = Blame("math", "mixer", "matrix*")
    path = tmp_path / "c.fsp.jsonl"
    save_trace(make_trace([rec(0, ("contract", b)), rec(3_000_000_000, ("contract", b))]), path)
    return path


def test_graph_contract(tmp_path):
    path = contract_trace(tmp_path)
    code, dot = cli("graph", str(path), "contract")
    assert code == 0
    assert 'math -> mixer [label="3000 ms"];' in dot
    assert 'math [style=filled, fillcolor="#5f5f5f", fontcolor=white];' in dot
    out = tmp_path / "g.dot"
    assert cli("graph", str(path), "contract", "--out", str(out), "--untyped", "math")[0] == 0
    assert 'math [style=filled, fillcolor="#dfdfdf"];' in out.read_text()
    assert cli("graph", str(path), "contract")[1] == dot


def test_graph_errors(tmp_path):
    path = contract_trace(tmp_path)
    assert cli("graph", str(path), "parser-disj")[0] == 2
    empty = tmp_path / "e.fsp.jsonl"
    save_trace(make_trace([], total=0, features=()), empty)
    assert cli("graph", str(empty), "contract") == (0, "digraph contracts {\n}\n")


def test_report_with_plugin_views(tmp_path):
    path = contract_trace(tmp_path)
    code, out = cli("report", str(path), "--plugin", "contract")
    assert code == 0 and "Contract boundaries" in out
    code, out = cli("report", str(path), "--plugin", "contract", "--format", "machine")
    assert json.loads(out)["plugins"]["contract"]["edges"][0]["server"] == "math"
    assert cli("report", str(path), "--plugin", "nope")[0] == 2


@pytest.mark.parametrize("name", sorted(SCENARIOS))
def test_run_then_report_every_scenario(tmp_path, name):
    path = tmp_path / f"{name}.fsp.jsonl"
    assert cli("run", name, "--out", str(path), "--scale", "0.05", "--interval-ms", "1")[0] == 0
    code, out = cli("report", str(path))
    assert code == 0 and out.startswith("Feature Report\n")
    # report is deterministic for a fixed file
    assert cli("report", str(path))[1] == out


def test_bench_structure():
    code, out = cli("bench", "kw-callback", "--repetitions", "2", "--scale", "0.01")
    assert code == 0
    rows = out.splitlines()[2:]
    assert [r.split("  ")[0].strip() for r in rows] == [
        "no marks", "default marks", "all marks", "all marks + sampling"]
    assert float(rows[0].split()[-1]) == 1.0


def test_module_entry_point(tmp_path):
    path = tmp_path / "fizzbuzz.fsp.jsonl"
    save_trace(fizzbuzz_report_trace(), path)
    r = subprocess.run([sys.executable, "-m", "featprof", "report", str(path)],
                       capture_output=True, text=True, check=False)
    assert r.returncode == 0
    assert r.stdout == (GOLDEN / "fizzbuzz_report.txt").read_text()
