"""DIMACS CNF and WCNF reading and writing."""

from __future__ import annotations

import io
import re
from pathlib import Path

from faultsat.cnf import Cnf
from faultsat.encoder.instance import ClauseGroup, MaxSatInstance, SoftUnit

_GROUP_RE = re.compile(r"c group (\d+) (.*):(\d+)(?: iter (\d+))?\s*$")


def _open_out(target):
    if hasattr(target, "write"):
        return target, False
    return open(target, "w", encoding="utf-8"), True


def _read_text(source):
    if hasattr(source, "read"):
        return source.read()
    if isinstance(source, (str, Path)) and Path(source).exists():
        return Path(source).read_text(encoding="utf-8")
    return str(source)


def _fmt(clause):
    return " ".join(map(str, clause)) + " 0"


def write_dimacs(cnf: Cnf, target) -> None:
    fh, close = _open_out(target)
    try:
        fh.write(f"p cnf {cnf.var_count} {len(cnf.clauses)}\n")
        for c in cnf.clauses:
            fh.write(_fmt(c) + "\n")
    finally:
        if close:
            fh.close()


def _clauses(lines):
    """Yield integer lists terminated by 0, allowing clauses to span lines."""
    buf = []
    for line in lines:
        for tok in line.split():
            v = int(tok)
            if v == 0:
                yield buf
                buf = []
            else:
                buf.append(v)
    if buf:
        yield buf


def read_dimacs(source) -> Cnf:
    text = _read_text(source)
    nvars = None
    body = []
    for line in text.splitlines():
        s = line.strip()
        if not s or s.startswith("c") or s.startswith("%"):
            continue
        if s.startswith("p"):
            parts = s.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ValueError(f"bad problem line: {line!r}")
            nvars = int(parts[2])
            continue
        body.append(s)
    if nvars is None:
        raise ValueError("missing 'p cnf' line")
    cnf = Cnf(var_count=nvars)
    for c in _clauses(body):
        cnf.add_clause(c)
    return cnf


def export_wcnf(instance: MaxSatInstance, target) -> None:
    """Write ``instance`` as DIMACS WCNF with ``c group`` source comments."""
    top = instance.top_weight
    fh, close = _open_out(target)
    try:
        n = len(instance.cnf.clauses) + len(instance.soft)
        fh.write(f"p wcnf {instance.cnf.var_count} {n} {top}\n")
        for s in instance.soft:
            g = s.group
            extra = f" iter {g.loop_context}" if g.loop_context is not None else ""
            fh.write(f"c group {s.lit} {g.file}:{g.line}{extra}\n")
        for c in instance.cnf.clauses:
            fh.write(f"{top} {_fmt(c)}\n")
        for s in instance.soft:
            fh.write(f"{s.weight} {s.lit} 0\n")
    finally:
        if close:
            fh.close()


def wcnf_text(instance: MaxSatInstance) -> str:
    buf = io.StringIO()
    export_wcnf(instance, buf)
    return buf.getvalue()


def import_wcnf(source) -> MaxSatInstance:
    """Read a WCNF file.

    Soft clauses that are not positive units are given a fresh selector ``s``
    with the hard clause ``(-s or clause)``, so the result always has
    selector-style soft units.
    """
    text = _read_text(source)
    groups = {}
    header = None
    rows = []
    for line in text.splitlines():
        s = line.strip()
        if not s:
            continue
        if s.startswith("c"):
            m = _GROUP_RE.match(s)
            if m:
                lam, file, ln, it = m.groups()
                groups[int(lam)] = (file, int(ln), int(it) if it else None)
            continue
        if s.startswith("p"):
            parts = s.split()
            if len(parts) < 4 or parts[1] != "wcnf":
                raise ValueError(f"bad problem line: {line!r}")
            header = (int(parts[2]), int(parts[4]) if len(parts) > 4 else None)
            continue
        if s.startswith("h"):
            s = "-1" + s[1:]  # new-style hard clause marker
        rows.append(s)
    if header is None:
        if not rows:
            raise ValueError("missing 'p wcnf' line")
        header = (0, None)
    nvars, top = header
    parsed = list(_clauses(rows))
    nvars = max([nvars] + [abs(l) for row in parsed for l in row[1:]])
    cnf = Cnf(var_count=nvars)
    soft = {}
    for row in parsed:
        weight, lits = row[0], row[1:]
        if weight == -1 or (top is not None and weight >= top):
            cnf.add_clause(lits)
            continue
        if weight <= 0:
            raise ValueError("soft weights must be positive")
        if len(lits) == 1 and lits[0] > 0:
            lam = lits[0]
        else:
            lam = cnf.new_var(("selector",))
            cnf.add_clause([-lam] + lits)
        if lam in soft:
            prev = soft[lam]
            soft[lam] = SoftUnit(lam, prev.weight + weight, prev.group)
            continue
        file, ln, it = groups.get(lam, ("<wcnf>", 0, None))
        soft[lam] = SoftUnit(lam, weight, ClauseGroup(lam, -1, ln, file, it))
    units = list(soft.values())
    return MaxSatInstance(cnf, units, "iteration" if any(u.group.loop_context for u in units) else "statement")
