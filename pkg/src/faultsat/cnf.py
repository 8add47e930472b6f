"""CNF container shared by the encoder, the SAT core and the MAX-SAT layer."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np


class BitMeta(NamedTuple):
    """Provenance of a Boolean variable: bit ``bit`` of SSA copy ``version`` of ``name``."""

    name: str
    version: int
    bit: int


TSEITIN = "tseitin"


@dataclass
class Cnf:
    var_count: int = 0
    clauses: list[list[int]] = field(default_factory=list)
    var_meta: dict[int, object] = field(default_factory=dict)

    def new_var(self, meta=TSEITIN) -> int:
        self.var_count += 1
        if meta is not None:
            self.var_meta[self.var_count] = meta
        return self.var_count

    def add_clause(self, lits) -> int:
        """Append a clause and return its index."""
        clause = [int(l) for l in lits]
        for l in clause:
            if l == 0 or abs(l) > self.var_count:
                raise ValueError(f"literal {l} out of range (var_count={self.var_count})")
        self.clauses.append(clause)
        return len(self.clauses) - 1

    def extend(self, clauses) -> None:
        for c in clauses:
            self.add_clause(c)

    def copy(self) -> Cnf:
        return Cnf(self.var_count, [list(c) for c in self.clauses], dict(self.var_meta))

    def __len__(self):
        return len(self.clauses)

    def flat(self):
        """``(lits, starts)`` arrays over all clauses, extended incrementally."""
        cache = self.__dict__.get("_flat")
        done = cache[0] if cache else 0
        if done == len(self.clauses) and cache:
            return cache[1], cache[2]
        new = self.clauses[done:]
        lens = np.fromiter((len(c) for c in new), dtype=np.int64, count=len(new))
        lits = np.fromiter((l for c in new for l in c), dtype=np.int64, count=int(lens.sum()))
        if cache:
            base = cache[1].shape[0]
            lits = np.concatenate((cache[1], lits))
            starts = np.concatenate((cache[2], base + np.cumsum(lens) - lens))
        else:
            starts = np.cumsum(lens) - lens
        self.__dict__["_flat"] = (len(self.clauses), lits, starts)
        return lits, starts
