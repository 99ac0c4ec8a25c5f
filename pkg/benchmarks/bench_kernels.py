#!/usr/bin/env python3
"""
Backend benchmark: numba @njit kernels vs the pure-numpy fallback
(MAHLER3D_DISABLE_NUMBA=1) on hull construction and fan volume.
"""

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np

SIZES = [4, 8, 16, 32]


def time_function(func, *args, iterations=50, warmup=3):
    """Median runtime in microseconds after warmup."""
    for _ in range(warmup):
        func(*args)
    times = []
    for _ in range(iterations):
        start = time.perf_counter()
        func(*args)
        times.append(time.perf_counter() - start)
    return np.median(times) * 1e6


def _bodies(sizes):
    import mahler3d as M
    rng = np.random.default_rng(7)
    out = {}
    for n in sizes:
        pts = rng.normal(size=(n, 3))
        pts /= np.linalg.norm(pts, axis=1)[:, None]
        out[n] = (M.build_sym_polytope([tuple(map(float, p)) for p in pts],
                                       kernel=M.DOUBLE),
                  [tuple(map(float, p)) for p in pts])
    return out


def run_inner():
    import mahler3d as M
    from mahler3d import _kernels
    results = {"backend": _kernels.backend_name(), "hull": {}, "volume": {}}
    for n, (P, pts) in _bodies(SIZES).items():
        # The vectorized fallback materializes an all-triples matrix, so hull
        # sizes stay modest to bound memory; fewer iterations bound runtime.
        results["hull"][n] = time_function(
            lambda: M.build_sym_polytope(pts, kernel=M.DOUBLE),
            iterations=10, warmup=2)
        results["volume"][n] = time_function(lambda: M.volume(P),
                                             iterations=200, warmup=5)
    print(json.dumps(results))


def run_outer():
    rows = {}
    for disable in ("0", "1"):
        env = dict(os.environ, MAHLER3D_DISABLE_NUMBA=disable)
        out = subprocess.run([sys.executable, __file__, "--inner"],
                             env=env, capture_output=True, text=True,
                             check=True)
        data = json.loads(out.stdout.strip().splitlines()[-1])
        rows[data["backend"]] = data
    if set(rows) == {"numpy"}:
        print("numba unavailable; only the numpy fallback was timed")
        return
    print(f"{'case':>12} {'n_pairs':>8} {'numba us':>10} {'numpy us':>10} "
          f"{'speedup':>8}")
    for case in ("hull", "volume"):
        for n in SIZES:
            tb = rows["numba"][case][str(n)]
            tn = rows["numpy"][case][str(n)]
            print(f"{case:>12} {n:>8} {tb:>10.1f} {tn:>10.1f} "
                  f"{tn / tb:>7.2f}x")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--inner", action="store_true",
                    help="time the currently selected backend and dump JSON")
    args = ap.parse_args()
    if args.inner:
        run_inner()
    else:
        run_outer()


if __name__ == "__main__":
    main()
