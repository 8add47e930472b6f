"""Bit-blasting of MiniC programs into CNF and MAX-SAT instances."""

from faultsat.encoder.circuit import Circuit
from faultsat.encoder.encode import (
    ProgramEncoding,
    State,
    bitblast,
    build_trace_formula,
    encode_program,
)
from faultsat.encoder.instance import (
    ITERATION,
    STATEMENT,
    ClauseGroup,
    MaxSatInstance,
    SoftUnit,
    assign_loop_weights,
    build_instance,
    check_unsat,
)

__all__ = [
    "Circuit",
    "ClauseGroup",
    "ITERATION",
    "MaxSatInstance",
    "ProgramEncoding",
    "STATEMENT",
    "SoftUnit",
    "State",
    "assign_loop_weights",
    "bitblast",
    "build_instance",
    "build_trace_formula",
    "check_unsat",
    "encode_program",
]
