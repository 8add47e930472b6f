"""Tseitin circuit builder over a :class:`~faultsat.cnf.Cnf`.

Gates fold constants and are hash-consed, so structurally equal
subcircuits share one output literal.  All gate definitions are hard
clauses; only clauses passed through :meth:`Circuit.add` with a selector
become members of a clause group.
"""

from __future__ import annotations

from faultsat.cnf import TSEITIN, BitMeta, Cnf


class Circuit:
    def __init__(self, cnf: Cnf | None = None):
        self.cnf = cnf if cnf is not None else Cnf()
        self.TRUE = self.cnf.new_var("true")
        self.FALSE = -self.TRUE
        self.cnf.clauses.append([self.TRUE])
        self._cache = {}
        self.groups = {}  # selector var -> list of clause indices
        self.versions = {}  # program variable -> last SSA version

    # -- variables and clauses --
    def fresh(self, meta=TSEITIN) -> int:
        return self.cnf.new_var(meta)

    def fresh_bits(self, name, width):
        """A new SSA copy of ``name``: ``width`` fresh variables, LSB first."""
        version = self.versions.get(name, -1) + 1
        self.versions[name] = version
        return [self.cnf.new_var(BitMeta(name, version, b)) for b in range(width)]

    def add(self, clause, selector=None) -> int | None:
        """Add ``clause``; with a selector it becomes ``(-selector or clause)``."""
        lits = []
        for l in clause:
            if l == self.TRUE:
                return None  # satisfied
            if l == self.FALSE:
                continue
            lits.append(l)
        if selector is not None:
            lits.insert(0, -selector)
        if not lits:
            lits = [self.FALSE]
        clauses = self.cnf.clauses
        clauses.append(lits)
        idx = len(clauses) - 1
        if selector is not None:
            self.groups.setdefault(selector, []).append(idx)
        return idx

    def is_const(self, l) -> bool:
        return l == self.TRUE or l == self.FALSE

    def const(self, b: bool) -> int:
        return self.TRUE if b else self.FALSE

    # -- gates --
    def AND(self, a, b):
        T, F = self.TRUE, self.FALSE
        if a == F or b == F or a == -b:
            return F
        if a == T:
            return b
        if b == T or a == b:
            return a
        if a > b:
            a, b = b, a
        key = ("and", a, b)
        out = self._cache.get(key)
        if out is None:
            out = self.fresh()
            cl = self.cnf.clauses
            cl.append([-out, a])
            cl.append([-out, b])
            cl.append([out, -a, -b])
            self._cache[key] = out
        return out

    def OR(self, a, b):
        return -self.AND(-a, -b)

    def XOR(self, a, b):
        T, F = self.TRUE, self.FALSE
        if a == F:
            return b
        if b == F:
            return a
        if a == T:
            return -b
        if b == T:
            return -a
        if a == b:
            return F
        if a == -b:
            return T
        # normalise polarity so x^y, -x^y, ... share one gate
        neg = (a < 0) != (b < 0)
        a, b = abs(a), abs(b)
        if a > b:
            a, b = b, a
        key = ("xor", a, b)
        out = self._cache.get(key)
        if out is None:
            out = self.fresh()
            cl = self.cnf.clauses
            cl.append([-out, a, b])
            cl.append([-out, -a, -b])
            cl.append([out, -a, b])
            cl.append([out, a, -b])
            self._cache[key] = out
        return -out if neg else out

    def ITE(self, c, t, e):
        T, F = self.TRUE, self.FALSE
        if c == T or t == e:
            return t
        if c == F:
            return e
        if t == T:
            return self.OR(c, e)
        if t == F:
            return self.AND(-c, e)
        if e == T:
            return self.OR(-c, t)
        if e == F:
            return self.AND(c, t)
        if c < 0:
            c, t, e = -c, e, t
        if t == -e:
            return self.XOR(c, e)
        key = ("ite", c, t, e)
        out = self._cache.get(key)
        if out is None:
            out = self.fresh()
            cl = self.cnf.clauses
            cl.append([-out, -c, t])
            cl.append([-out, c, e])
            cl.append([out, -c, -t])
            cl.append([out, c, -e])
            cl.append([out, -t, -e])  # redundant, helps propagation
            cl.append([-out, t, e])
            self._cache[key] = out
        return out

    def AND_all(self, lits):
        out = self.TRUE
        for l in lits:
            out = self.AND(out, l)
            if out == self.FALSE:
                break
        return out

    def OR_all(self, lits):
        return -self.AND_all([-l for l in lits])

    def equiv(self, a, b, selector=None):
        """Constrain ``a <-> b`` (optionally under a selector)."""
        self.add([-a, b], selector)
        self.add([a, -b], selector)
