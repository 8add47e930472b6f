"""Regenerate the injected-fault corpus from the correct programs in base/.

Each faulty program is the base program with one edit applied to one
function, followed by a trusted copy of the correct functions (renamed with
a ``ref_`` prefix) and the checking harness from the base file.  The
manifest records the edited line, its fault class, the command-line
settings needed to reproduce the run and ``code_lines``, the number of
non-blank, non-comment lines outside the trusted reference copy.

    python corpus/injected/make_corpus.py
"""

from __future__ import annotations

import json
import re
from pathlib import Path

HERE = Path(__file__).resolve().parent

BASES = {
    "advisory": {"bound": 1, "width": 8},
    "grades": {"bound": 6, "width": 8},
    "calendar": {"bound": 12, "width": 16},
}

# (name, base, class, function, old line, new line); old=None inserts new after `after`
FAULTS = [
    ("advisory_v1", "advisory", "op", "non_crossing_biased_climb", "if (ibc > down_sep) {", "if (ibc >= down_sep) {"),
    ("advisory_v2", "advisory", "const", "alim", "t = 24;", "t = 26;"),
    (
        "advisory_v3",
        "advisory",
        "branch",
        "alt_sep_test",
        "if (high_confidence != 0 && own_rate <= OLEV && cur_vsep > MAXALTDIFF)",
        "if (high_confidence != 0 && cur_vsep > MAXALTDIFF)",
    ),
    ("advisory_v4", "advisory", "assign", "alt_sep_test", "need_down = need_down && above;", "need_down = need_down && below;"),
    ("advisory_v5", "advisory", "init", "non_crossing_biased_descend", "int result = 0;", "int result = 1;"),
    ("advisory_v6", "advisory", "code", "inhibit_biased_climb", None, "c = c + 1;", "c = up_sep + NOZCROSS;"),
    ("advisory_v7", "advisory", "const", "inhibit_biased_climb", "c = up_sep + NOZCROSS;", "c = up_sep + MINSEP;"),
    ("advisory_v8", "advisory", "op", "alt_sep_test", "need_up = need_up && below;", "need_up = need_up || below;"),
    ("grades_v1", "grades", "op", "count_pass", "if (a[i] >= PASS)", "if (a[i] > PASS)"),
    ("grades_v2", "grades", "index", "max_grade", "best = a[i];", "best = a[i - 1];"),
    ("grades_v3", "grades", "init", "max_grade", "int i = 1;", "int i = 2;"),
    ("grades_v4", "grades", "const", "mode_bucket", "if (b > 3)", "if (b > 4)"),
    ("grades_v5", "grades", "assign", "average", "r = r + a[i] % N;", "r = a[i] % N;"),
    ("grades_v6", "grades", "branch", "mode_bucket", "if (h[k] > h[m])", "if (h[k] >= h[m])"),
    ("calendar_v1", "calendar", "const", "days_in_month", "d = 29;", "d = 30;"),
    ("calendar_v2", "calendar", "op", "valid_date", "if (d < 1 || d > len)", "if (d < 1 || d >= len)"),
    (
        "calendar_v3",
        "calendar",
        "branch",
        "days_in_month",
        "} else if (m == 4 || m == 6 || m == 9 || m == 11) {",
        "} else if (m == 4 || m == 6 || m == 11) {",
    ),
    ("calendar_v4", "calendar", "init", "day_of_year", "int total = d;", "int total = d - 1;"),
    ("calendar_v5", "calendar", "op", "weekday", "int leaps = (y + 3) / 4;", "int leaps = (y + 3) % 4;"),
    ("calendar_v6", "calendar", "code", "day_of_year", None, "k = k + 1;", "total = total + len;"),
]


def _split(text):
    """Header lines, {function name: lines}, function order, harness lines."""
    lines = text.rstrip("\n").split("\n")
    cut = lines.index("//@harness")
    body, harness = lines[:cut], lines[cut + 1 :]
    header, funcs, order = [], {}, []
    cur = None
    pending = []  # comment lines directly above a function
    for line in body:
        m = re.match(r"(int|void) (\w+)\(", line)
        if m and cur is None:
            cur = m.group(2)
            order.append(cur)
            funcs[cur] = pending + [line]
            pending = []
            continue
        if cur is not None:
            funcs[cur].append(line)
            if line == "}":
                cur = None
            continue
        if line.startswith("//") and order:
            pending.append(line)
        elif not order or line.strip():
            header.append(line)
    return header, funcs, order, harness


def _rename(lines, names):
    pat = re.compile(r"\b(" + "|".join(map(re.escape, names)) + r")\(")
    return [pat.sub(r"ref_\1(", l) for l in lines if not l.startswith("//")]


def _apply(func_lines, old, new, after):
    out = list(func_lines)
    if old is None:
        hits = [i for i, l in enumerate(out) if l.strip() == after]
        if len(hits) != 1:
            raise ValueError(f"anchor {after!r} found {len(hits)} times")
        i = hits[0]
        indent = out[i][: len(out[i]) - len(out[i].lstrip())]
        out.insert(i + 1, indent + new)
        return out, i + 1
    hits = [i for i, l in enumerate(out) if l.strip() == old]
    if len(hits) != 1:
        raise ValueError(f"line {old!r} found {len(hits)} times")
    i = hits[0]
    out[i] = out[i].replace(old, new)
    return out, i


def build(name, base, cls, func, old, new, after=None):
    text = (HERE / "base" / f"{base}.mc").read_text(encoding="utf-8")
    header, funcs, order, harness = _split(text)
    out = list(header)
    fault_line = None
    for f in order:
        if out and out[-1].strip():
            out.append("")
        lines = funcs[f]
        if f == func:
            lines, k = _apply(lines, old, new, after)
            fault_line = len(out) + k + 1
        out += lines
    code = _count(out) + _count(harness)  # the trusted reference copy is not counted
    out += ["", "// reference implementation, trusted"]
    for f in order:
        out += _rename(funcs[f], order)
    out += [""] + harness
    return "\n".join(out) + "\n", fault_line, ["ref_" + f for f in order], code


def _count(lines):
    """Non-blank lines that are not comments or preprocessor directives."""
    return sum(1 for l in lines if l.strip() and not l.strip().startswith(("//", "#")))


def main():
    manifest = []
    for fault in FAULTS:
        name, base, cls, func, old, new = fault[:6]
        after = fault[6] if len(fault) > 6 else None
        text, line, trusted, code = build(name, base, cls, func, old, new, after)
        (HERE / f"{name}.mc").write_text(text, encoding="utf-8")
        manifest.append(
            {
                "file": f"{name}.mc",
                "base": f"base/{base}.mc",
                "class": cls,
                "fault_line": line,
                "original": old,
                "faulty": new,
                "trusted": trusted,
                "code_lines": code,
                **BASES[base],
            }
        )
    (HERE / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    print(f"wrote {len(manifest)} programs")


if __name__ == "__main__":
    main()
