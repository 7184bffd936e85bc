"""Which gain formula leaves the smaller nilpotency residual?

Random standard-normal pairs for n = 3..10; the set-iteration gain wins more
often as n grows. Pass a trial count as the first argument (default 1000).
"""

import os
import sys
import time

from deadbeat.bench import BenchConfig, run_benchmark

trials = int(sys.argv[1]) if len(sys.argv) > 1 else 1000
t0 = time.perf_counter()
report = run_benchmark(BenchConfig(trials=trials, seed=0), workers=os.cpu_count() or 1)
print(report.to_table())
print(report.to_csv())
print(f"{time.perf_counter() - t0:.1f} s")
