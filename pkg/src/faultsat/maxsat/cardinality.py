"""At-most-k constraints: pairwise for tiny sets, sequential counter otherwise."""

from __future__ import annotations

from itertools import combinations

from faultsat.cnf import Cnf

PAIRWISE_LIMIT = 6


def encode_at_most_k(literals, k: int, cnf: Cnf | None = None) -> list:
    """Clauses allowing at most ``k`` of ``literals`` to be true.

    Auxiliary variables are allocated from ``cnf`` (a scratch :class:`Cnf`
    sized to the literals is used when omitted).  The clauses are returned,
    not added.
    """
    lits = [int(l) for l in literals]
    if len(set(map(abs, lits))) != len(lits):
        raise ValueError("literals must be over distinct variables")
    if k < 0:
        raise ValueError("k must be non-negative")
    if cnf is None:
        cnf = Cnf(var_count=max((abs(l) for l in lits), default=0))
    n = len(lits)
    if k >= n:
        return []
    if k == 0:
        return [[-l] for l in lits]
    if k == 1 and n <= PAIRWISE_LIMIT:
        return [[-a, -b] for a, b in combinations(lits, 2)]
    # Sinz sequential counter: s[i][j] <=> at least j+1 of lits[0..i] are true
    s = [[cnf.new_var() for _ in range(k)] for _ in range(n - 1)]
    out = [[-lits[0], s[0][0]]]
    out += [[-s[0][j]] for j in range(1, k)]
    for i in range(1, n - 1):
        x = lits[i]
        out.append([-x, s[i][0]])
        out.append([-s[i - 1][0], s[i][0]])
        for j in range(1, k):
            out.append([-x, -s[i - 1][j - 1], s[i][j]])
            out.append([-s[i - 1][j], s[i][j]])
        out.append([-x, -s[i - 1][k - 1]])
    out.append([-lits[-1], -s[n - 2][k - 1]])
    return out
