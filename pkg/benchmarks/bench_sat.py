"""Compare the numba-compiled kernels with the FAULTSAT_NO_JIT fallback.

Each mode runs in its own interpreter because the switch is read at import.
The first pass in JIT mode may include compilation if numba's cache is cold;
it is reported separately from the timed repetitions.

    python benchmarks/bench_sat.py [--reps 3]
"""

import argparse
import json
import os
import subprocess
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent

WORKLOAD = r"""
import json, random, sys, time
from faultsat.frontend.lower import load_program
from faultsat.executor import TestInput
from faultsat.localizer import localize
from faultsat.sat import Solver

root, reps = sys.argv[1], int(sys.argv[2])

def sat_batch():
    rng = random.Random(0)
    statuses = []
    for _ in range(20):
        n = 60
        clauses = [[v if rng.random() < 0.5 else -v for v in rng.sample(range(1, n + 1), 3)] for _ in range(int(4.26 * n))]
        statuses.append(Solver(clauses, nvars=n).solve().status)
    return statuses

def localize_sqrt():
    p = load_program(root + "/corpus/worked/squareroot.mc", 50)
    return [c.lines() for c in localize(p, None, TestInput({})).iterations]

out = {}
for name, fn in (("random-3sat", sat_batch), ("squareroot-localize", localize_sqrt)):
    t0 = time.perf_counter()
    first = fn()
    warm = time.perf_counter() - t0
    times = []
    for _ in range(reps):
        t0 = time.perf_counter()
        assert fn() == first
        times.append(time.perf_counter() - t0)
    out[name] = {"first": warm, "best": min(times), "result": first}
print(json.dumps(out))
"""


def run(no_jit, reps):
    env = dict(os.environ)
    env.pop("FAULTSAT_NO_JIT", None)
    if no_jit:
        env["FAULTSAT_NO_JIT"] = "1"
    proc = subprocess.run(
        [sys.executable, "-c", WORKLOAD, str(ROOT), str(reps)], env=env, capture_output=True, text=True, check=True
    )
    return json.loads(proc.stdout)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--reps", type=int, default=3)
    args = ap.parse_args(argv)
    jit, plain = run(False, args.reps), run(True, args.reps)
    print(f"{'workload':22s} {'jit first':>10s} {'jit best':>10s} {'no-jit best':>12s} {'speedup':>8s}")
    for name in jit:
        a, b = jit[name], plain[name]
        if a["result"] != b["result"]:
            raise SystemExit(f"{name}: results differ between modes")
        print(f"{name:22s} {a['first']:10.3f} {a['best']:10.3f} {b['best']:12.3f} {b['best'] / a['best']:7.1f}x")


if __name__ == "__main__":
    main()
