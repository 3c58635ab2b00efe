"""Instrumented demo features and the scenarios built from them."""
from featprof.demo.actors import Process, VM, run_actors
from featprof.demo.contracts import BlameError, wrap_contract
from featprof.demo.keywords import KeywordProtocol
from featprof.demo.output import OutputFeature, SequenceFeature, printf
from featprof.demo.parser import ParseError, char, disj, many, parse, seq
from featprof.demo.workloads import SCENARIOS, Scenario, demo_workloads, get_scenario

__all__ = [
    "Process", "VM", "run_actors",
    "BlameError", "wrap_contract",
    "KeywordProtocol",
    "OutputFeature", "SequenceFeature", "printf",
    "ParseError", "char", "disj", "many", "parse", "seq",
    "SCENARIOS", "Scenario", "demo_workloads", "get_scenario",
]
