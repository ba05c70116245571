"""Time the accelerated kernels against the pure-numpy fallback.

The backend is chosen at import time from the SCALEREG_NO_NUMBA
environment flag, so each backend is timed in its own subprocess and the
parent only assembles the comparison table:

    python3 benchmarks/bench_kernels.py
"""

import argparse
import json
import os
import subprocess
import sys
import time

TABLE_SIZES = [(1024, 128), (4096, 512), (16384, 1024)]
CLENSHAW_SIZES = [(4096, 64), (4096, 512), (4096, 2048)]
REPEATS = 7


def _best_of(fn, repeats=REPEATS):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def run_worker():
    import numpy as np

    from scalereg import (backend_name, clenshaw_cosine, warmup,
                          weighted_cosine_table)

    warmup()
    rng = np.random.Generator(np.random.Philox(0))
    rows = []
    for m, d in TABLE_SIZES:
        x, w = rng.random(m), rng.standard_normal(d)
        rows.append({"kernel": "weighted_cosine_table", "shape": f"{m}x{d}",
                     "seconds": _best_of(lambda: weighted_cosine_table(x, w))})
    for m, d in CLENSHAW_SIZES:
        x, coef = rng.random(m), rng.standard_normal(d)
        rows.append({"kernel": "clenshaw_cosine", "shape": f"{m}x{d}",
                     "seconds": _best_of(lambda: clenshaw_cosine(x, coef))})
    json.dump({"backend": backend_name(), "rows": rows}, sys.stdout)


def run_comparison():
    results = {}
    for flag in ("", "1"):
        env = dict(os.environ, SCALEREG_NO_NUMBA=flag)
        out = subprocess.run([sys.executable, __file__, "--worker"],
                             env=env, capture_output=True, text=True,
                             check=True)
        doc = json.loads(out.stdout)
        results[doc["backend"]] = doc["rows"]
    if "numba" not in results:
        print("numba backend unavailable; fallback timings only:")
        for row in results["numpy"]:
            print(f"  {row['kernel']:22s} {row['shape']:>10s} "
                  f"{row['seconds'] * 1e3:8.3f} ms")
        return
    print(f"{'kernel':22s} {'shape':>10s} {'numba ms':>10s} "
          f"{'numpy ms':>10s} {'speedup':>8s}")
    for fast, slow in zip(results["numba"], results["numpy"]):
        assert (fast["kernel"], fast["shape"]) == (slow["kernel"],
                                                   slow["shape"])
        ratio = slow["seconds"] / fast["seconds"]
        print(f"{fast['kernel']:22s} {fast['shape']:>10s} "
              f"{fast['seconds'] * 1e3:10.3f} {slow['seconds'] * 1e3:10.3f} "
              f"{ratio:8.2f}x")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--worker", action="store_true",
                        help="time the active backend and emit JSON")
    args = parser.parse_args()
    if args.worker:
        run_worker()
    else:
        run_comparison()


if __name__ == "__main__":
    main()
