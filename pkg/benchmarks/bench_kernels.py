#!/usr/bin/env python3
"""Benchmark the shared path-integral kernels: numba JIT vs pure-numpy fallback.

The fallback path is selected by the environment flag HPLAB_NO_NUMBA, read at
import time, so the comparison runs each variant in a fresh subprocess.

Usage: python3 benchmarks/bench_kernels.py [--paths N] [--repeat R]
"""

import argparse
import json
import os
import subprocess
import sys

_WORKER = r"""
import json, sys, time
import numpy as np
from hplab import _kernels

n_paths = int(sys.argv[1])
repeat = int(sys.argv[2])

# p = 2 style configuration: one double zero, four simple poles
num = [0.05 + 0j, 0.05 + 0j]
den = [-0.5 + 0.25j, -0.5 - 0.25j, 0.45 + 0.2j, 0.45 - 0.2j]

rng = np.random.default_rng(0)
targets = (rng.random(n_paths) * 4 - 2) + 1j * (rng.random(n_paths) * 4 - 2)
paths = np.stack(
    [np.full(n_paths, den[0], dtype=complex), targets.astype(complex)], axis=1
)

# warm-up triggers JIT compilation so it is not billed to the timing loop
_kernels.green_values(num, den, paths[:2])

best = float("inf")
for _ in range(repeat):
    t0 = time.perf_counter()
    vals = _kernels.green_values(num, den, paths)
    best = min(best, time.perf_counter() - t0)

print(json.dumps({
    "jit": bool(_kernels.JIT_ENABLED),
    "paths": n_paths,
    "best_seconds": best,
    "checksum": float(np.sum(vals)),
}))
"""


def run_variant(no_numba: bool, n_paths: int, repeat: int) -> dict:
    env = dict(os.environ, HPLAB_NO_NUMBA="1" if no_numba else "0")
    out = subprocess.run(
        [sys.executable, "-c", _WORKER, str(n_paths), str(repeat)],
        env=env,
        capture_output=True,
        text=True,
        check=True,
    )
    return json.loads(out.stdout.strip().splitlines()[-1])


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--paths", type=int, default=2000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    jit = run_variant(False, args.paths, args.repeat)
    plain = run_variant(True, args.paths, args.repeat)

    if not jit["jit"]:
        print("note: numba unavailable, both runs used the numpy fallback")
    drift = abs(jit["checksum"] - plain["checksum"]) / max(1.0, abs(plain["checksum"]))
    print(f"paths per batch : {args.paths}")
    print(f"numba kernel    : {jit['best_seconds'] * 1e3:9.2f} ms")
    print(f"numpy fallback  : {plain['best_seconds'] * 1e3:9.2f} ms")
    if jit["best_seconds"] > 0:
        print(f"speedup         : {plain['best_seconds'] / jit['best_seconds']:9.2f}x")
    print(f"checksum drift  : {drift:.3e}")
    if drift > 1e-9:
        print("ERROR: variants disagree", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
