"""Hand-built trace with the arithmetic of the FizzBuzz feature report.

2046 samples 4 ms apart span 8180 ms; interior samples each cost exactly
4 ms.  Output call sites are sampled 1157/141/58/39 times (4628/564/232/156
ms, 5580 in all) and generic iteration 241 times (964 ms).
"""
from conftest import MS, make_trace, rec
from featprof.payloads import SourceLoc

OUTPUT_SITES = ((8, 1157), (7, 141), (6, 58), (5, 39))
SEQUENCE_SAMPLES = 241
N_SAMPLES = 2046
STEP = 4 * MS


def fizzbuzz_report_trace():
    labels = []
    for line, n in OUTPUT_SITES:
        labels += [("output", SourceLoc("fizzbuzz.rkt", line, 24))] * n
    labels += [("generic-sequences", SourceLoc("fizzbuzz.rkt", 3, 11))] * SEQUENCE_SAMPLES
    # the two end samples cost only 2 ms each, so they stay unmarked
    marked = dict(zip(range(1, N_SAMPLES - 1), labels))
    samples = [
        rec(i * STEP, marked[i]) if i in marked else rec(i * STEP)
        for i in range(N_SAMPLES)
    ]
    return make_trace(
        samples,
        total=(N_SAMPLES - 1) * STEP,
        features=(("output", True), ("generic-sequences", True)),
    )
