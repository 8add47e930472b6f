import json
import os
import subprocess
import sys

from conftest import ROOT

SCRIPT = r"""
import json, random, sys
sys.path.insert(0, sys.argv[1])
from conftest import random_maxsat, WORKED
from faultsat._jit import jit_enabled
from faultsat.frontend.lower import load_program
from faultsat.executor import TestInput
from faultsat.localizer import localize
from faultsat.maxsat import solve_pmaxsat
from faultsat.errors import HardUnsat
from faultsat.oracles import brute_force_maxsat

rng = random.Random(1)
costs = []
for _ in range(25):
    raw, inst = random_maxsat(rng, max_vars=14, max_soft=6)
    try:
        r = solve_pmaxsat(inst)
        costs.append([r.cost, sorted(r.comss.selectors)])
    except HardUnsat:
        costs.append(None)
    costs.append(list(brute_force_maxsat(*raw)))
fig1 = load_program(WORKED / "fig1.mc", 2)
report = localize(fig1, None, TestInput({"index": 1})).to_json()
print(json.dumps({"jit": jit_enabled(), "costs": costs, "fig1": report}))
"""


def _run(no_jit):
    env = dict(os.environ)
    env.pop("FAULTSAT_NO_JIT", None)
    if no_jit:
        env["FAULTSAT_NO_JIT"] = "1"
    proc = subprocess.run(
        [sys.executable, "-c", SCRIPT, str(ROOT / "tests")], capture_output=True, text=True, env=env, timeout=600
    )
    assert proc.returncode == 0, proc.stderr
    return json.loads(proc.stdout)


def test_fallback_matches_compiled_kernels():
    fast, slow = _run(False), _run(True)
    assert fast["jit"] is True and slow["jit"] is False
    assert fast["costs"] == slow["costs"]
    assert fast["fig1"] == slow["fig1"]
