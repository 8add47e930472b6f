import random

import numpy as np
import pytest

from faultsat.cnf import Cnf
from faultsat.oracles import brute_force_sat
from faultsat.sat import Solver, check_model, solve


def random_cnf(rng, nvars, nclauses, k=3):
    out = []
    for _ in range(nclauses):
        vs = rng.sample(range(1, nvars + 1), min(k, nvars))
        out.append([v if rng.random() < 0.5 else -v for v in vs])
    return out


def test_random_3sat_agrees_with_brute_force():
    rng = random.Random(7)
    for _ in range(300):
        n = rng.randint(3, 12)
        clauses = random_cnf(rng, n, rng.randint(1, 6 * n))
        res = Solver(clauses, nvars=n).solve()
        assert res.sat == brute_force_sat(n, clauses)
        if res.sat:
            assert check_model(clauses, res.model)


def test_cores_are_subsets_of_assumptions_and_unsat():
    rng = random.Random(11)
    checked = 0
    for _ in range(200):
        n = rng.randint(4, 10)
        clauses = random_cnf(rng, n, rng.randint(n, 4 * n))
        assume = [v if rng.random() < 0.5 else -v for v in rng.sample(range(1, n + 1), rng.randint(1, n))]
        s = Solver(clauses, nvars=n)
        res = s.solve(assume)
        if res.sat:
            assert all(res.value(a) for a in assume)
            continue
        assert set(res.core) <= set(assume)
        assert not brute_force_sat(n, clauses + [[a] for a in res.core])
        checked += 1
    assert checked > 20


def test_incremental_reuse():
    s = Solver(nvars=3)
    s.add_clause([1, 2])
    assert s.solve([-1]).value(2)
    s.add_clause([-2])
    assert s.solve([-1]).unsat
    assert s.solve().value(1)
    v = s.new_var()
    assert v == 4 and s.solve([v]).sat


def test_empty_clause_and_timeout():
    assert Solver([[]]).solve().unsat
    assert Solver().solve().sat
    # pigeonhole 7 into 6 needs many conflicts
    holes, pigeons = 6, 7
    var = lambda p, h: p * holes + h + 1
    clauses = [[var(p, h) for h in range(holes)] for p in range(pigeons)]
    for h in range(holes):
        for p in range(pigeons):
            for q in range(p + 1, pigeons):
                clauses.append([-var(p, h), -var(q, h)])
    assert Solver(clauses).solve(max_conflicts=5).status == "timeout"


def test_zero_literal_rejected():
    with pytest.raises(ValueError):
        Solver(nvars=2).solve([0])


def test_check_model_vectorized_matches_loop():
    rng = random.Random(3)
    for _ in range(50):
        n = 8
        cnf = Cnf(var_count=n)
        for c in random_cnf(rng, n, 12):
            cnf.add_clause(c)
        model = np.array([False] + [rng.random() < 0.5 for _ in range(n)])
        assert check_model(cnf, model) == check_model(cnf.clauses, model)


def test_solve_is_deterministic_for_a_seed():
    rng = random.Random(5)
    clauses = random_cnf(rng, 30, 100)
    cnf = Cnf(var_count=30)
    cnf.extend(clauses)
    a, b = solve(cnf, seed=1), solve(cnf, seed=1)
    assert a.status == b.status
    if a.sat:
        assert (a.model == b.model).all()
