#!/usr/bin/env python3
"""Compare the numba and pure-numpy kernel backends.

Each backend runs in its own interpreter because the choice is fixed at
import time by ``MORSEWIG_DISABLE_NUMBA``.  Usage:

    python3 benchmarks/bench_backends.py [--n 41] [--repeat 3]
"""

import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, time
import numpy as np
from morsewig import BACKEND, morse, states, wigner
from morsewig.specfun import bessel_k_row

n, repeat = int(sys.argv[1]), int(sys.argv[2])
s = morse.make_system(10)
st = states.docs(s, states.solve_zeta_for_mean(s, 0.25))
xs, ps = np.linspace(-4, 12, n), np.linspace(-3, 3, n)

t0 = time.perf_counter()
wigner.wigner_values(st, xs[:2], ps[:2])
bessel_k_row(5.0, 2.0, 9)
warm = time.perf_counter() - t0

def best(fn):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t)
    return min(times), out

t_grid, w = best(lambda: wigner.wigner_values(st, xs, ps))
t_row, _ = best(lambda: [bessel_k_row(sig, 7.0, 9) for sig in np.linspace(-40, 40, 200)])
print(json.dumps({"backend": BACKEND, "warmup_s": warm, "grid_s": t_grid, "points": n * n,
                  "rows_s": t_row, "checksum": float(np.sum(w))}))
"""


def run(disable, n, repeat):
    env = dict(os.environ)
    env.pop("MORSEWIG_DISABLE_NUMBA", None)
    if disable:
        env["MORSEWIG_DISABLE_NUMBA"] = "1"
    out = subprocess.run([sys.executable, "-c", WORKER, str(n), str(repeat)],
                         env=env, capture_output=True, text=True, check=True)
    return json.loads(out.stdout)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=41, help="grid points per axis")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    results = [run(False, args.n, args.repeat), run(True, args.n, args.repeat)]
    print(f"{'backend':8s} {'warm-up s':>10s} {'grid s':>9s} {'us/point':>9s} {'200 rows s':>11s}  checksum")
    for r in results:
        print(f"{r['backend']:8s} {r['warmup_s']:10.2f} {r['grid_s']:9.3f} {1e6 * r['grid_s'] / r['points']:9.1f} "
              f"{r['rows_s']:11.3f}  {r['checksum']:.15g}")
    fast, slow = results
    print(f"speed-up on the grid: {slow['grid_s'] / fast['grid_s']:.1f}x")
    if abs(fast["checksum"] - slow["checksum"]) > 1e-10 * abs(fast["checksum"]):
        sys.exit("backends disagree")


if __name__ == "__main__":
    main()
