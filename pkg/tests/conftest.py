import json
from pathlib import Path

import pytest

from faultsat.frontend.lower import load_program, lower_to_cfg
from faultsat.frontend.parser import parse

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"
WORKED = CORPUS / "worked"
INJECTED = CORPUS / "injected"

STRNCAT_TRUSTED = ("strncat", "memset")


def program(src, bound=4, width=8, trusted=()):
    return lower_to_cfg(parse(src, "t.mc"), bound, width, trusted)


def manifest():
    return json.loads((INJECTED / "manifest.json").read_text())


def load_case(entry):
    return load_program(INJECTED / entry["file"], entry["bound"], entry["width"], tuple(entry["trusted"]))


@pytest.fixture(scope="session")
def fig1():
    return load_program(WORKED / "fig1.mc", 2)


@pytest.fixture(scope="session")
def squareroot():
    return load_program(WORKED / "squareroot.mc", 50)


@pytest.fixture(scope="session")
def strncat():
    return load_program(WORKED / "strncat.mc", 16, trusted=STRNCAT_TRUSTED)


def random_maxsat(rng, max_vars=20, max_soft=12, max_weight=4):
    """Random partial weighted instance: ``(raw, instance)``.

    ``raw = (nvars, hard, soft_clauses, weights)`` over the program variables
    only; ``instance`` guards each soft group with a selector variable.
    """
    from faultsat.cnf import Cnf
    from faultsat.encoder import ClauseGroup, MaxSatInstance, SoftUnit

    n = rng.randint(2, max_vars - max_soft) if max_vars - max_soft >= 2 else 2
    nsoft = rng.randint(1, max_soft)

    def clause():
        k = rng.randint(1, 3)
        return [v if rng.random() < 0.5 else -v for v in rng.sample(range(1, n + 1), min(k, n))]

    hard = [clause() for _ in range(rng.randint(0, 2 * n))]
    soft = [clause() for _ in range(nsoft)]
    weights = [rng.randint(1, max_weight) for _ in soft]
    cnf = Cnf(var_count=n)
    cnf.extend(hard)
    units = []
    for i, (c, w) in enumerate(zip(soft, weights)):
        lam = cnf.new_var(("selector", i))
        cnf.add_clause([-lam] + c)
        units.append(SoftUnit(lam, w, ClauseGroup(lam, i, i + 1, "rand")))
    return (n, hard, soft, weights), MaxSatInstance(cnf, units)
