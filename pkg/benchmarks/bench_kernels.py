"""Compare the numba kernels with the pure-numpy fallback.

Each backend runs in its own interpreter because the choice is fixed at
import time (EXACTSERIATION_DISABLE_NUMBA). The first timed call of every
kernel is a warm-up so JIT compilation is excluded.

    python benchmarks/bench_kernels.py [--repeats 3]
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
from exactseriation import _kernels, backend
from exactseriation.neighborhoods import NeighborhoodSpec

rng = np.random.default_rng(0)
repeats = int(sys.argv[1])
vn = NeighborhoodSpec.von_neumann().offset_array()
moore = NeighborhoodSpec.moore().offset_array()
big = rng.random((200, 200))
small = rng.random((5, 6))
w16 = rng.random((16, 16)); w16 = w16 + w16.T; np.fill_diagonal(w16, 0)
w11 = rng.random((11, 11)); w11 = w11 + w11.T; np.fill_diagonal(w11, 0)
w60 = rng.random((60, 60)); w60 = w60 + w60.T; np.fill_diagonal(w60, 0)

cases = {
    "stress moore 200x200": lambda: _kernels.stress_value(big, moore, 1.0),
    "ME 200x200": lambda: _kernels.me_value(big),
    "brute force VN 5x6": lambda: _kernels.brute_force_search(small, vn, 1.0, False, False),
    "Held-Karp n=16": lambda: _kernels.held_karp_min(w16),
    "second-order DP n=11": lambda: _kernels.held_karp2_min(w11, w11),
    "2-opt n=60": lambda: _kernels.two_opt(w60, list(range(60))),
}
out = {"backend": backend(), "times": {}}
for name, fn in cases.items():
    fn()
    best = float("inf")
    for _ in range(repeats):
        t = time.perf_counter(); fn(); best = min(best, time.perf_counter() - t)
    out["times"][name] = best
print(json.dumps(out))
"""


def run(disable: bool, repeats: int) -> dict:
    env = dict(os.environ)
    if disable:
        env["EXACTSERIATION_DISABLE_NUMBA"] = "1"
    else:
        env.pop("EXACTSERIATION_DISABLE_NUMBA", None)
    proc = subprocess.run(
        [sys.executable, "-c", WORKER, str(repeats)], env=env, capture_output=True, text=True, check=True
    )
    return json.loads(proc.stdout.strip().splitlines()[-1])


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()
    t0 = time.perf_counter()
    jit = run(False, args.repeats)
    ref = run(True, args.repeats)
    if jit["backend"] != "numba":
        print("numba is not installed: both columns use the numpy fallback")
    print(f"{'kernel':<24}{'numba [s]':>12}{'numpy [s]':>12}{'speedup':>10}")
    for name, t_jit in jit["times"].items():
        t_np = ref["times"][name]
        print(f"{name:<24}{t_jit:>12.5f}{t_np:>12.5f}{t_np / t_jit:>9.1f}x")
    print(f"(total wall time {time.perf_counter() - t0:.1f}s, best of {args.repeats})")


if __name__ == "__main__":
    main()
