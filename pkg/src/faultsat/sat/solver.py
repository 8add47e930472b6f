"""Incremental CDCL solver with assumption literals and unsat cores."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from faultsat.cnf import Cnf
from faultsat.sat import kernels


@dataclass(frozen=True)
class SolveResult:
    status: str  # "sat" | "unsat" | "timeout"
    model: np.ndarray | None = None  # bool per variable, index 0 unused
    core: tuple[int, ...] | None = None  # subset of the assumptions (unsat only)
    conflicts: int = 0

    @property
    def sat(self) -> bool:
        return self.status == "sat"

    @property
    def unsat(self) -> bool:
        return self.status == "unsat"

    def value(self, lit: int) -> bool:
        v = bool(self.model[abs(lit)])
        return v if lit > 0 else not v


def _to_internal(lits) -> np.ndarray:
    a = np.asarray(lits, dtype=np.int64)
    return np.where(a > 0, 2 * a, -2 * a + 1).astype(np.int32)


def _to_external(lits) -> list[int]:
    return [int(l >> 1) if not (l & 1) else -int(l >> 1) for l in lits]


class Solver:
    """Clause database plus a persistent CDCL state.

    Clauses may be added between calls to :meth:`solve`; learnt clauses,
    variable activities and saved phases carry over.  ``seed`` perturbs the
    initial variable order (seed 0 keeps the natural order), which is how
    distinct counterexamples are diversified.
    """

    def __init__(self, clauses=(), nvars: int = 0, seed: int = 0):
        self.nvars = 0
        self._seed = seed
        self._rng = np.random.default_rng(seed) if seed else None
        self._lits = np.zeros(64, dtype=np.int32)
        self._nlits = 0
        self._cstart = np.zeros(16, dtype=np.int64)
        self._clen = np.zeros(16, dtype=np.int32)
        self._cflags = np.zeros(16, dtype=np.int8)
        self._ncl = 0
        self._pending: list[list[int]] = []
        self._act = np.zeros(1, dtype=np.float64)
        self._phase = np.zeros(1, dtype=np.int8)
        self.ensure_vars(nvars)
        for c in clauses:
            self.add_clause(c)

    @classmethod
    def from_cnf(cls, cnf: Cnf, seed: int = 0) -> Solver:
        s = cls(nvars=cnf.var_count, seed=seed)
        s.add_clauses(cnf.clauses)
        return s

    def ensure_vars(self, n: int) -> None:
        if n <= self.nvars:
            return
        act = np.zeros(n + 1, dtype=np.float64)
        act[: self._act.shape[0]] = self._act
        if self._rng is not None:
            act[self.nvars + 1 :] = self._rng.random(n - self.nvars) * 1e-3
        phase = np.zeros(n + 1, dtype=np.int8)
        phase[: self._phase.shape[0]] = self._phase
        self._act, self._phase = act, phase
        self.nvars = n

    def new_var(self) -> int:
        self.ensure_vars(self.nvars + 1)
        return self.nvars

    def set_phase(self, var: int, value: bool) -> None:
        self._phase[var] = 1 if value else 0

    def add_clause(self, lits) -> None:
        clause = sorted(set(int(l) for l in lits), key=abs)
        for i in range(1, len(clause)):
            if clause[i] == -clause[i - 1]:
                return  # tautology
        top = max((abs(l) for l in clause), default=0)
        if top > self.nvars:
            self.ensure_vars(top)
        self._pending.append(clause)

    def add_clauses(self, clauses) -> None:
        for c in clauses:
            self.add_clause(c)

    def _flush(self) -> None:
        if not self._pending:
            return
        lens = np.fromiter((len(c) for c in self._pending), dtype=np.int32, count=len(self._pending))
        flat = _to_internal([l for c in self._pending for l in c]) if lens.sum() else np.zeros(0, np.int32)
        n_new = len(self._pending)
        need_cl = self._ncl + n_new
        if need_cl > self._cstart.shape[0]:
            cap = max(need_cl, 2 * self._cstart.shape[0])
            self._cstart = np.resize(self._cstart, cap)
            self._clen = np.resize(self._clen, cap)
            self._cflags = np.resize(self._cflags, cap)
        need_l = self._nlits + flat.shape[0]
        if need_l > self._lits.shape[0]:
            self._lits = np.resize(self._lits, max(need_l, 2 * self._lits.shape[0]))
        starts = self._nlits + np.concatenate(([0], np.cumsum(lens)[:-1])).astype(np.int64)
        self._cstart[self._ncl : need_cl] = starts
        self._clen[self._ncl : need_cl] = lens
        self._cflags[self._ncl : need_cl] = 0
        self._lits[self._nlits : need_l] = flat
        self._ncl = need_cl
        self._nlits = need_l
        self._pending = []

    def _compact(self) -> None:
        live = (self._cflags[: self._ncl] & kernels.DELETED) == 0
        if live.all():
            return
        lens = self._clen[: self._ncl]
        lit_mask = np.repeat(live, lens)
        self._lits = self._lits[: self._nlits][lit_mask].copy()
        self._nlits = self._lits.shape[0]
        new_lens = lens[live]
        self._clen = new_lens.copy()
        self._cflags = self._cflags[: self._ncl][live].copy()
        self._cstart = np.concatenate(([0], np.cumsum(new_lens)[:-1])).astype(np.int64)
        self._ncl = self._clen.shape[0]

    def solve(self, assumptions=(), max_conflicts: int = -1) -> SolveResult:
        assumptions = [int(a) for a in assumptions]
        for a in assumptions:
            if a == 0:
                raise ValueError("0 is not a literal")
            self.ensure_vars(abs(a))
        self._flush()
        out = kernels.cdcl(
            np.int64(self.nvars),
            self._lits,
            np.int64(self._nlits),
            self._cstart,
            self._clen,
            self._cflags,
            np.int64(self._ncl),
            _to_internal(assumptions) if assumptions else np.zeros(0, dtype=np.int32),
            self._act,
            self._phase,
            np.int64(max_conflicts),
        )
        status, assigns, core, self._lits, nlits, self._cstart, self._clen, self._cflags, ncl, nconf = out
        self._nlits, self._ncl = int(nlits), int(ncl)
        if self._ncl > 2000:
            self._compact()
        if status == kernels.SAT:
            return SolveResult("sat", model=assigns == 1, conflicts=int(nconf))
        if status == kernels.UNSAT:
            return SolveResult("unsat", core=tuple(_to_external(core)), conflicts=int(nconf))
        return SolveResult("timeout", conflicts=int(nconf))


def solve(formula: Cnf, assumptions=(), seed: int = 0, max_conflicts: int = -1) -> SolveResult:
    """One-shot solve of ``formula`` under ``assumptions``."""
    return Solver.from_cnf(formula, seed=seed).solve(assumptions, max_conflicts=max_conflicts)


def check_model(clauses, model) -> bool:
    """Independent clause-by-clause model check.

    ``clauses`` is a :class:`Cnf` (checked vectorized) or any iterable of
    literal lists.
    """
    if isinstance(clauses, Cnf):
        lits, starts = clauses.flat()
        if lits.shape[0] == 0:
            return all(len(c) for c in clauses.clauses)
        if (np.diff(np.append(starts, lits.shape[0])) == 0).any():
            return False
        m = np.asarray(model, dtype=bool)
        truth = m[np.abs(lits)] == (lits > 0)
        return bool(np.logical_or.reduceat(truth, starts).all())
    for c in clauses:
        if not any(model[abs(l)] == (l > 0) for l in c):
            return False
    return True
