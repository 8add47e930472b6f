"""Concrete interpreter over lowered programs.

It serves two purposes: running tests (``faultsat run``) and acting as the
ground truth the encoder is checked against.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from faultsat import program as P
from faultsat.errors import InvalidTestInput
from faultsat.semantics import evaluate, fits, wrap

PASS = "pass"
FAIL = "fail"
BOUND_EXCEEDED = "bound-exceeded"
ASSUME_VIOLATED = "assume-violated"


@dataclass(frozen=True)
class TestInput:
    """Values for the program's input variables.

    Scalars map to ints, arrays to tuples of ints.  Arrays given fewer values
    than their length are padded with zeros by :meth:`validate`.
    """

    __test__ = False  # keep pytest from collecting this class

    assignments: dict = field(default_factory=dict)

    def __hash__(self):
        return hash(self.key())

    def key(self):
        return tuple(sorted((k, tuple(v) if isinstance(v, (list, tuple)) else v) for k, v in self.assignments.items()))

    def validate(self, program: P.Program) -> "TestInput":
        """Check coverage and ranges against ``program``; return a normalised copy."""
        inputs = {v.name: v for v in program.inputs}
        extra = set(self.assignments) - set(inputs)
        if extra:
            raise InvalidTestInput(f"not an input variable: {', '.join(sorted(extra))}")
        missing = set(inputs) - set(self.assignments)
        if missing:
            raise InvalidTestInput(f"missing value for input(s): {', '.join(sorted(missing))}")
        out = {}
        for name, decl in inputs.items():
            value = self.assignments[name]
            if decl.length is None:
                if isinstance(value, (list, tuple)):
                    raise InvalidTestInput(f"{name} is a scalar input")
                values = [value]
            else:
                values = [value] if isinstance(value, int) else list(value)
                if len(values) > decl.length:
                    raise InvalidTestInput(f"{name} has {decl.length} cells, got {len(values)} values")
                values += [0] * (decl.length - len(values))
            for v in values:
                if not isinstance(v, int) or isinstance(v, bool) or not fits(v, decl.width):
                    raise InvalidTestInput(f"value {v!r} for {name} does not fit a signed {decl.width}-bit int")
            out[name] = values[0] if decl.length is None else tuple(values)
        return TestInput(out)

    def format(self) -> str:
        parts = []
        for k, v in sorted(self.assignments.items()):
            parts.append(f"{k}={','.join(map(str, v))}" if isinstance(v, tuple) else f"{k}={v}")
        return " ".join(parts)

    def to_json(self):
        return {k: list(v) if isinstance(v, tuple) else v for k, v in sorted(self.assignments.items())}

    @classmethod
    def parse(cls, pairs) -> "TestInput":
        """Build from ``name=value`` strings; arrays as ``name=v1,v2,...``."""
        if isinstance(pairs, str):
            pairs = pairs.split()
        out = {}
        for pair in pairs:
            name, sep, text = pair.partition("=")
            name = name.strip()
            if not sep or not name:
                raise InvalidTestInput(f"expected name=value, got {pair!r}")
            if name in out:
                raise InvalidTestInput(f"input {name!r} given twice")
            try:
                values = [int(x, 0) for x in text.split(",")]
            except ValueError:
                raise InvalidTestInput(f"bad integer in {pair!r}") from None
            out[name] = tuple(values) if "," in text else values[0]
        return cls(out)

    @classmethod
    def from_json(cls, obj) -> "TestInput":
        if not isinstance(obj, dict):
            raise InvalidTestInput("a test must be a JSON object mapping names to values")
        return cls({k: tuple(v) if isinstance(v, list) else v for k, v in obj.items()})


def load_tests(path) -> list:
    """Read tests from a JSON file holding one object or a list of objects."""
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if isinstance(data, dict):
        data = [data]
    return [TestInput.from_json(d) for d in data]


@dataclass(frozen=True)
class Verdict:
    status: str
    assertion: Optional[int] = None
    line: Optional[int] = None

    def __str__(self):
        if self.status == FAIL:
            return f"fail(assertion {self.assertion}, line {self.line})"
        return self.status


@dataclass(frozen=True)
class ExecutionResult:
    trace: tuple  # transition ids in execution order
    final_state: dict
    verdict: Verdict
    locations: tuple = ()  # visited locations, one more than len(trace)

    @property
    def failed(self):
        return self.verdict.status == FAIL


def _initial_state(program, test):
    w = program.width
    scalars = {v.name: 0 for v in program.vars}
    arrays = {a.name: [0] * a.length for a in program.arrays}
    for name, value in test.assignments.items():
        if isinstance(value, tuple):
            arrays[name] = [wrap(x, w) for x in value]
        else:
            scalars[name] = wrap(value, w)
    return scalars, arrays


def execute(program: P.Program, test: TestInput) -> ExecutionResult:
    """Run ``program`` on ``test`` and record the path taken."""
    test = test.validate(program)
    w = program.width
    scalars, arrays = _initial_state(program, test)
    loc = program.initial_location
    trace = []
    visited = [loc]

    def done(verdict):
        state = dict(scalars)
        state.update({k: tuple(v) for k, v in arrays.items()})
        return ExecutionResult(tuple(trace), state, verdict, tuple(visited))

    while True:
        for a in program.assertions_at(loc):
            if not evaluate(a.predicate, scalars, arrays, w):
                return done(Verdict(FAIL, a.id, a.line))
        taken = None
        for t in program.outgoing(loc):
            if t.kind == P.GUARD:
                if bool(evaluate(t.expr, scalars, arrays, w)) != t.negated:
                    taken = t
                    break
                continue
            taken = t
            break
        if taken is None:
            return done(Verdict(PASS))
        t = taken
        if t.kind == P.ASSUME and not evaluate(t.expr, scalars, arrays, w):
            return done(Verdict(ASSUME_VIOLATED, None, t.line))
        if t.kind == P.UNWIND and evaluate(t.expr, scalars, arrays, w):
            return done(Verdict(BOUND_EXCEEDED, None, t.line))
        if t.kind == P.ASSIGN:
            scalars[t.var] = evaluate(t.expr, scalars, arrays, w)
        elif t.kind == P.STORE:
            i = evaluate(t.index, scalars, arrays, w)
            arrays[t.var][i] = evaluate(t.expr, scalars, arrays, w)
        elif t.kind == P.INIT:
            if t.var in arrays:
                arrays[t.var] = [0] * len(arrays[t.var])
            else:
                scalars[t.var] = 0
        trace.append(t.id)
        loc = t.target
        visited.append(loc)
