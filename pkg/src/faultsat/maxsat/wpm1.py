"""Core-guided partial weighted MAX-SAT (Fu & Malik with weight splitting).

Each unsatisfiable core over the active soft clauses is relaxed: every
member gets a fresh relaxation variable, at most one of which may be true,
and members heavier than the core's minimum weight are split so the
residual weight stays unrelaxed.  The accumulated minimum weights give the
optimum cost once the remaining soft clauses become satisfiable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

from faultsat.encoder.instance import MaxSatInstance
from faultsat.errors import HardUnsat, ModelViolatesHard
from faultsat.maxsat.cardinality import encode_at_most_k
from faultsat.sat import Solver
from faultsat.sat.solver import check_model


@dataclass(frozen=True)
class Comss:
    selectors: frozenset
    statements: tuple  # location dicts {file, line[, iter]}, sorted
    cost: int
    sids: tuple = field(default=(), compare=False)  # source statement ids, sorted

    def __len__(self):
        return len(self.selectors)

    def lines(self):
        return sorted({loc["line"] for loc in self.statements})


class MaxSatResult(NamedTuple):
    cost: int
    comss: Comss
    model: object


class _Soft:
    __slots__ = ("lits", "weight", "assume", "unit")

    def __init__(self, lits, weight, assume, unit):
        self.lits = lits  # clause literals (original selector plus relaxation vars)
        self.weight = weight
        self.assume = assume  # assumption literal activating the clause
        self.unit = unit  # index of the original soft unit


def _make_solver(instance, seed):
    solver = Solver(nvars=instance.cnf.var_count, seed=seed)
    solver.add_clauses(instance.cnf.clauses)
    for s in instance.soft:
        solver.set_phase(s.lit, True)
    return solver


def solve_pmaxsat(instance: MaxSatInstance, seed: int = 0, solver: Solver | None = None) -> MaxSatResult:
    """Minimum total weight of falsified soft units, with a subset-minimal CoMSS.

    Raises :class:`HardUnsat` when the hard clauses alone are unsatisfiable.
    """
    if solver is None:
        solver = _make_solver(instance, seed)
    softs = [_Soft([s.lit], s.weight, s.lit, i) for i, s in enumerate(instance.soft)]
    cost = 0
    fresh = []
    while True:
        by_assume = {s.assume: s for s in softs}
        res = solver.solve([s.assume for s in softs])
        if res.sat:
            break
        if not res.core:
            raise HardUnsat("hard clauses are unsatisfiable")
        members = [by_assume[l] for l in res.core]
        wmin = min(s.weight for s in members)
        cost += wmin
        relax = []
        for s in members:
            r = solver.new_var()
            solver.set_phase(r, False)
            relax.append(r)
            b = solver.new_var()
            fresh += [r, b]
            solver.set_phase(b, True)
            solver.add_clause([-b] + s.lits + [r])
            relaxed = _Soft(s.lits + [r], wmin, b, s.unit)
            if s.weight > wmin:
                s.weight -= wmin  # residual clone keeps the old clause and assumption
                softs.append(relaxed)
            else:
                softs[softs.index(s)] = relaxed
        scratch = _VarSource(solver)
        solver.add_clauses(encode_at_most_k(relax, 1, scratch))
    model = _prefer(instance, solver, [s.assume for s in softs], res.model)
    comss = extract_comss(instance, model, solver=solver)
    # retire this call's relaxation so a reused solver sees the plain instance
    solver.add_clauses([-v] for v in fresh)
    if comss.cost != cost:
        raise AssertionError(f"internal error: CoMSS cost {comss.cost} differs from optimum {cost}")
    return MaxSatResult(cost, comss, res.model)


def _prefer(instance, solver, assumptions, model):
    """Deterministic choice among optimal solutions.

    Every model of the relaxed formula costs at most the optimum, so
    selectors can be re-assumed greedily without losing optimality.  They are
    tried earliest-executed first, which leaves the blame on the statements
    executed closest to the failure.
    """
    recency = instance.meta.get("recency", {})
    assumptions = list(assumptions)
    for s in sorted(instance.soft, key=lambda s: (recency.get(s.lit, -1), s.lit)):
        if model[s.lit]:
            assumptions.append(s.lit)
            continue
        res = solver.solve(assumptions + [s.lit])
        if res.sat:
            model = res.model
            assumptions.append(s.lit)
    return model


class _VarSource:
    """Adapter so the cardinality encoder allocates variables in the solver."""

    def __init__(self, solver):
        self.solver = solver

    def new_var(self, meta=None):
        return self.solver.new_var()


def comss_from_selectors(instance: MaxSatInstance, selectors) -> Comss:
    weights = {s.lit: s for s in instance.soft}
    chosen = [weights[l] for l in selectors]
    locs = sorted(
        (s.group.location() for s in chosen), key=lambda d: (d["file"], d["line"], d.get("iter", 0))
    )
    sids = tuple(sorted({s.group.statement_id for s in chosen}))
    return Comss(frozenset(selectors), tuple(locs), sum(s.weight for s in chosen), sids)


def extract_comss(instance: MaxSatInstance, model, solver: Solver | None = None) -> Comss:
    """Falsified soft units of ``model``, shrunk to a subset-minimal correction set."""
    if not check_model(instance.cnf, model):
        raise ModelViolatesHard("model does not satisfy the hard clauses")
    if solver is None:
        solver = _make_solver(instance, 0)
    lits = [s.lit for s in instance.soft]
    falsified = [l for l in lits if not model[l]]
    enabled = [l for l in lits if model[l]]
    # heaviest first, so expensive members are re-enabled when possible; among
    # equal weights, statements executed earliest are re-enabled first
    weight = {s.lit: s.weight for s in instance.soft}
    recency = instance.meta.get("recency", {})
    for l in sorted(falsified, key=lambda x: (-weight[x], recency.get(x, -1), x)):
        res = solver.solve(enabled + [l])
        if res.sat:
            enabled.append(l)
            # the new model may satisfy further members for free
            enabled.extend(m for m in falsified if m not in enabled and res.model[m])
    remaining = [l for l in falsified if l not in enabled]
    return comss_from_selectors(instance, remaining)


def is_correction_set(instance: MaxSatInstance, selectors) -> bool:
    """hard and every soft unit outside ``selectors`` is satisfiable."""
    solver = _make_solver(instance, 0)
    return solver.solve([s.lit for s in instance.soft if s.lit not in selectors]).sat
