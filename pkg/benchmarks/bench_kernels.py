"""Compare the numba FIR kernel against the pure-numpy fallback.

The kernel backend is chosen at import time from FDSIM_NO_NUMBA, so each
configuration runs in its own subprocess and this driver collates the
timings.  Run from the repository root:

    python3 benchmarks/bench_kernels.py
"""

import json
import os
import subprocess
import sys

CASES = [
    # (signal length, filter taps) drawn from the hot paths:
    # pulse shaping (short filter), channel application (256 taps),
    # matched filtering on a long burst
    (20_000, 17),
    (20_000, 256),
    (1_000_000, 17),
    (1_000_000, 256),
]

WORKER = r"""
import json, sys, timeit
import numpy as np
from fdsim._kernels import USE_NUMBA, fir_convolve

rng = np.random.default_rng(0)
results = []
for n, k in json.loads(sys.argv[1]):
    x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    h = rng.standard_normal(k) + 1j * rng.standard_normal(k)
    fir_convolve(x, h)  # warm-up (includes any JIT compile)
    reps = max(1, int(2e8 / (n * k)))
    t = min(timeit.repeat(lambda: fir_convolve(x, h), number=reps, repeat=3))
    results.append(t / reps)
json.dump({"numba": USE_NUMBA, "times": results}, sys.stdout)
"""


def run_backend(no_numba: bool) -> dict:
    env = dict(os.environ, FDSIM_NO_NUMBA="1" if no_numba else "0")
    out = subprocess.run([sys.executable, "-c", WORKER, json.dumps(CASES)],
                         env=env, capture_output=True, text=True, check=True)
    return json.loads(out.stdout)


def main() -> int:
    fast = run_backend(no_numba=False)
    slow = run_backend(no_numba=True)
    if not fast["numba"]:
        print("note: numba unavailable; comparing the fallback to itself")
    print(f"{'signal':>9} {'taps':>5} {'numba':>12} {'numpy':>12} {'speedup':>8}")
    for (n, k), tf, ts in zip(CASES, fast["times"], slow["times"]):
        print(f"{n:>9} {k:>5} {tf*1e3:>10.2f}ms {ts*1e3:>10.2f}ms "
              f"{ts/tf:>7.2f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
