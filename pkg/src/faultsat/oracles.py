"""Exhaustive reference implementations used by the test-suite and benchmarks.

They are exponential by design and only meant for small instances.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np

from faultsat._jit import jit_enabled
from faultsat.sat import Solver
from faultsat.sat import kernels


def _flatten(clauses):
    lens = np.array([len(c) for c in clauses], dtype=np.int64)
    lits = np.array([l for c in clauses for l in c], dtype=np.int64)
    starts = np.concatenate(([0], np.cumsum(lens)[:-1])).astype(np.int64) if len(clauses) else np.zeros(0, np.int64)
    return lits, starts, lens


def _numpy_eval(nvars, hard, soft, weights):
    a = np.arange(1 << nvars, dtype=np.int64)
    bits = ((a[:, None] >> np.arange(nvars)) & 1).astype(bool)
    ok = np.ones(a.shape[0], dtype=bool)

    def clause_sat(c):
        out = np.zeros(a.shape[0], dtype=bool)
        for l in c:
            col = bits[:, abs(l) - 1]
            out |= col if l > 0 else ~col
        return out

    for c in hard:
        ok &= clause_sat(c)
    if not ok.any():
        return -1, 0
    cost = np.zeros(a.shape[0], dtype=np.int64)
    for c, w in zip(soft, weights):
        cost += np.where(clause_sat(c), 0, w)
    cost = cost[ok]
    best = int(cost.min())
    return best, int((cost == best).sum())


def brute_force_maxsat(nvars, hard, soft, weights):
    """Minimum falsified soft weight over all assignments: ``(cost, count)``.

    Returns ``(-1, 0)`` if ``hard`` is unsatisfiable.
    """
    if nvars > 24:
        raise ValueError("brute force is limited to 24 variables")
    if not jit_enabled():
        return _numpy_eval(nvars, hard, soft, weights)
    lits, starts, lens = _flatten(list(hard) + list(soft))
    res = kernels.brute_force_eval(
        np.int64(nvars), lits, starts, lens.astype(np.int32), np.int64(len(hard)), np.asarray(weights, dtype=np.int64)
    )
    return int(res[0]), int(res[1])


def brute_force_sat(nvars, clauses) -> bool:
    return brute_force_maxsat(nvars, clauses, [], [])[0] >= 0


def soft_subset_optimum(instance):
    """Optimum by enumerating every enable/disable choice of the soft units.

    Each subset is checked with a SAT call, so the instance may have any
    number of hard variables; the soft count should stay small (<= 12).
    Returns ``(cost, minimal_correction_sets)`` with ``cost = None`` when
    the hard clauses are unsatisfiable.
    """
    solver = Solver(nvars=instance.cnf.var_count)
    solver.add_clauses(instance.cnf.clauses)
    lits = [s.lit for s in instance.soft]
    weight = {s.lit: s.weight for s in instance.soft}
    correcting = []
    for k in range(len(lits) + 1):
        for off in combinations(lits, k):
            off_set = frozenset(off)
            if any(m <= off_set for m in correcting):
                continue  # a subset already corrects, so this one is not minimal
            if solver.solve([l for l in lits if l not in off_set]).sat:
                correcting.append(off_set)
    if not correcting:
        return None, []
    best = min(sum(weight[l] for l in m) for m in correcting)
    return best, correcting
