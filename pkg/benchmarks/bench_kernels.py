"""Time the numba kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 200] [--trials 50]

Part 1 calls both implementations of each kernel directly in this process.
Part 2 runs a full slope estimate and a K=8 MAC oracle in fresh interpreters with DOF_LAB_NUMBA
set to 1 and to 0, so module-level backend selection is exercised as in
normal use. Both parts exclude JIT compilation with an untimed warm-up call.
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import time
import timeit

import numpy as np

from doflab import _kernels
from doflab.mac_region import all_masks

RUN_SNIPPET = """
import json, sys, time
from doflab import CsitProfile, _kernels, estimate_dof_slopes
args = ((4, 4, 1, 3), CsitProfile(5 / 6, 0.5))
t0 = time.perf_counter()
estimate_dof_slopes(*args, trials=10, seed=1)  # warm-up, includes any JIT compile
warm = time.perf_counter() - t0
t0 = time.perf_counter()
rep = estimate_dof_slopes(*args, trials=int(sys.argv[1]), seed=0)
seconds = time.perf_counter() - t0
from doflab import mac_mi_slope_oracle
mac_mi_slope_oracle(8, 4, (0.25, 0.5, 0.5, 1.0), (1e6, 1e8, 1e10), trials=2, seed=1)
t0 = time.perf_counter()
mac_mi_slope_oracle(8, 4, (0.25, 0.5, 0.5, 1.0), (1e6, 1e8, 1e10), trials=int(sys.argv[1]), seed=0)
print(json.dumps({"backend": _kernels.backend(), "seconds": seconds, "warmup": warm,
                  "oracle": time.perf_counter() - t0, "slope": rep.slope}))
"""


def random_problem(rng, n, k):
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    noise = np.eye(n) + g @ g.conj().T * 1e3
    cols = (rng.standard_normal((n, k)) + 1j * rng.standard_normal((n, k))) * 1e4
    return noise, cols


def per_call_us(fn, repeat):
    fn()  # warm-up / JIT compile
    return min(timeit.repeat(fn, number=repeat, repeat=3)) / repeat * 1e6


def kernel_table(repeat):
    rng = np.random.default_rng(0)
    rows = []
    for n, k in [(3, 3), (3, 5), (4, 8)]:
        noise, cols = random_problem(rng, n, k)
        masks = all_masks(k)
        gram = _kernels.whitened_gram(noise, cols)
        cases = {
            "subset_gram_log2dets": (lambda: _kernels.subset_gram_log2dets_numpy(gram, masks),
                                     lambda: _kernels.subset_gram_log2dets_numba(gram, masks)),
            "subset_log2dets": (lambda: _kernels.subset_log2dets_numpy(noise, cols, masks),
                                lambda: _kernels.subset_log2dets_numba(noise, cols, masks)),
        }
        for name, (np_fn, jit_fn) in cases.items():
            a, b = per_call_us(np_fn, repeat), per_call_us(jit_fn, repeat)
            rows.append((name, n, k, a, b))
    return rows


def end_to_end(trials):
    out = {}
    for flag in ("1", "0"):
        env = {**os.environ, "DOF_LAB_NUMBA": flag}
        wall = time.perf_counter()
        proc = subprocess.run([sys.executable, "-c", RUN_SNIPPET, str(trials)], env=env,
                              capture_output=True, text=True, check=True)
        data = json.loads(proc.stdout)
        data["wall"] = time.perf_counter() - wall
        out[data["backend"]] = data
    return out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=200)
    ap.add_argument("--trials", type=int, default=50)
    args = ap.parse_args(argv)
    if not _kernels.HAVE_NUMBA:
        sys.exit("numba is not importable; nothing to compare")

    print(f"{'kernel':<22}{'n':>3}{'subsets':>9}{'numpy us':>11}{'numba us':>11}{'speedup':>9}")
    for name, n, k, a, b in kernel_table(args.repeat):
        print(f"{name:<22}{n:>3}{2 ** k:>9}{a:>11.1f}{b:>11.1f}{a / b:>8.1f}x")

    res = end_to_end(args.trials)
    print(f"\nslope estimate, (4,4,1,3) beta=(5/6,1/2), {args.trials} trials")
    for name in ("numba", "numpy"):
        r = res[name]
        print(f"  {name:<6} timed {r['seconds']:6.2f}s  warm-up {r['warmup']:5.2f}s  "
              f"wall {r['wall']:6.2f}s  slope {r['slope']}")
    print(f"  speedup (timed run): {res['numpy']['seconds'] / res['numba']['seconds']:.1f}x")
    print(f"\nMAC oracle, K=8 users (255 subsets), M=4, {args.trials} trials")
    for name in ("numba", "numpy"):
        print(f"  {name:<6} {res[name]['oracle']:6.2f}s")
    print(f"  speedup: {res['numpy']['oracle'] / res['numba']['oracle']:.1f}x")


if __name__ == "__main__":
    main()
