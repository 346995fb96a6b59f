#!/usr/bin/env python3
"""Benchmark the numba-compiled hot kernels against the numpy fallback.

Runs each kernel through both paths by re-importing groupquant._kernels
with QG_NO_NUMBA toggled in a subprocess, and prints median timings.

Usage: python3 benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import json
import os
import subprocess
import sys
import time

WORK = r"""
import json, time
import numpy as np
from groupquant import _kernels as K

rng = np.random.default_rng(0)
results = {}

def bench(name, fn, repeat):
    fn()  # warmup / compile
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    results[name] = float(np.median(times))

beta = np.linspace(0.01, 3.1, 4000)
bench("wigner_d_grid(2j=16)", lambda: K.wigner_d_grid(16, beta), REPEAT)

p = np.linspace(-5.0, 15.0, 200000)
bench("itn_denominator", lambda: K.itn_denominator(p, 2.0, 40), REPEAT)

h = np.linspace(0.0, 8.0, 100000)
bench("su2_norm_series", lambda: K.su2_norm_series(h, 0.5, 60), REPEAT)

print(json.dumps({"numba": K.USE_NUMBA, "results": results}))
"""


def run(no_numba, repeat):
    env = dict(os.environ)
    env["QG_NO_NUMBA"] = "1" if no_numba else "0"
    code = WORK.replace("REPEAT", str(repeat))
    out = subprocess.run([sys.executable, "-c", code], env=env,
                         capture_output=True, text=True, check=True)
    return json.loads(out.stdout.strip().splitlines()[-1])


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    t0 = time.time()
    plain = run(True, args.repeat)
    jit = run(False, args.repeat)
    print("%-28s %12s %12s %9s" % ("kernel", "numpy [ms]", "numba [ms]",
                                   "speedup"))
    for name in plain["results"]:
        a = plain["results"][name] * 1e3
        b = jit["results"][name] * 1e3
        print("%-28s %12.3f %12.3f %8.1fx" % (name, a, b, a / b))
    if not jit["numba"]:
        print("note: numba path unavailable, both columns are numpy")
    print("total wall time %.1fs" % (time.time() - t0))


if __name__ == "__main__":
    main()
