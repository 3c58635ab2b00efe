"""Profile run time by library feature: attribute samples to instances of features.

Feature code marks its dynamic extent on a per-thread annotation stack; a
sampler thread snapshots the stacks; an offline pipeline turns the samples
into a per-feature, per-instance report.
"""
from featprof.analysis import Report, analyze, render_text
from featprof.marks import FeatureKey, MarkEntry, MarkRuntime, default_runtime, defer
from featprof.payloads import (
    ANTIMARK,
    Blame,
    ParserTriple,
    ProcessId,
    SourceLoc,
    Text,
)
from featprof.sampler import SamplerConfig, profile
from featprof.trace import Trace, load_trace, save_trace

__version__ = "0.1.0"

__all__ = [
    "ANTIMARK",
    "Blame",
    "FeatureKey",
    "MarkEntry",
    "MarkRuntime",
    "ParserTriple",
    "ProcessId",
    "Report",
    "SamplerConfig",
    "SourceLoc",
    "Text",
    "Trace",
    "analyze",
    "default_runtime",
    "defer",
    "load_trace",
    "profile",
    "render_text",
    "save_trace",
]
