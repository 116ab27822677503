#!/usr/bin/env python3
"""Time the hot kernels with numba on and off.

Each mode runs in its own interpreter because ``KOLMO_DISABLE_NUMBA`` is
read at import time. Usage::

    python benchmarks/bench_kernels.py [--repeat N] [--grid N]
"""
import argparse
import json
import os
import subprocess
import sys
import time

WORKER = r"""
import json, sys, time
import numpy as np
from kolmo import _accel, catalog, lyapunov, system
from kolmo import _kernels as K

repeat, n = int(sys.argv[1]), int(sys.argv[2])
out = {"numba": _accel.HAS_NUMBA}

sys_ = catalog.load_model("pp2").system
d = sys_.domain
args = (0.01, 0.03, 50.0, 1e-10, 1e-12, 0.0, 10**6, d.x_lo, d.x_hi, d.y_lo, d.y_hi,
        0.0, 0.0, 0.0, 0.0, 0.0, False)
t = time.perf_counter()
K.dopri5(sys_.family, sys_.p, *args)
out["dopri5_first_call_s"] = time.perf_counter() - t
t = time.perf_counter()
for _ in range(repeat):
    res = K.dopri5(sys_.family, sys_.p, *args)
out["dopri5_s"] = (time.perf_counter() - t) / repeat
out["dopri5_steps"] = int(res[4])

eq = system.find_equilibrium(sys_, (1.0, 1.0))
L = lyapunov.build(sys_, eq, lyapunov.select_variant(sys_, eq))
xs = np.linspace(1e-3, d.x_hi, n)
ys = np.linspace(1e-3, d.y_hi, n)
F = L.values_or_nan(*np.meshgrid(xs, ys))
level = float(L.G(1.5))
K.marching_squares(F, xs, ys, level)
t = time.perf_counter()
for _ in range(repeat):
    segs = K.marching_squares(F, xs, ys, level)
out["marching_squares_s"] = (time.perf_counter() - t) / repeat
out["segments"] = int(len(segs))
print(json.dumps(out))
"""


def run(disable, repeat, grid):
    env = dict(os.environ)
    if disable:
        env["KOLMO_DISABLE_NUMBA"] = "1"
    else:
        env.pop("KOLMO_DISABLE_NUMBA", None)
    res = subprocess.run([sys.executable, "-c", WORKER, str(repeat), str(grid)],
                         env=env, capture_output=True, text=True, check=True)
    return json.loads(res.stdout.strip().splitlines()[-1])


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=20)
    ap.add_argument("--grid", type=int, default=400)
    args = ap.parse_args()
    t = time.perf_counter()
    fast = run(False, args.repeat, args.grid)
    slow = run(True, args.repeat, args.grid)
    print(f"{'kernel':<22}{'numba':>12}{'fallback':>12}{'speedup':>10}")
    for key, label in (("dopri5_s", "dopri5 (pp2, t=50)"), ("marching_squares_s", f"marching sq {args.grid}^2")):
        print(f"{label:<22}{fast[key] * 1e3:>10.3f}ms{slow[key] * 1e3:>10.3f}ms{slow[key] / fast[key]:>9.1f}x")
    print(f"first dopri5 call (compile or cache load): {fast['dopri5_first_call_s']:.2f}s")
    same = fast["dopri5_steps"] == slow["dopri5_steps"] and fast["segments"] == slow["segments"]
    print(f"results identical in size: {same}; total {time.perf_counter() - t:.1f}s")


if __name__ == "__main__":
    main()
