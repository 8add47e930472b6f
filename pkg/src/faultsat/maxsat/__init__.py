"""Partial weighted MAX-SAT: core-guided solving, CoMSS extraction, WCNF I/O."""

from faultsat.maxsat.cardinality import encode_at_most_k
from faultsat.maxsat.wcnf import export_wcnf, import_wcnf, read_dimacs, wcnf_text, write_dimacs
from faultsat.maxsat.wpm1 import (
    Comss,
    MaxSatResult,
    comss_from_selectors,
    extract_comss,
    is_correction_set,
    solve_pmaxsat,
)

__all__ = [
    "Comss",
    "MaxSatResult",
    "comss_from_selectors",
    "encode_at_most_k",
    "export_wcnf",
    "extract_comss",
    "import_wcnf",
    "is_correction_set",
    "read_dimacs",
    "solve_pmaxsat",
    "wcnf_text",
    "write_dimacs",
]
