from faultsat.sat.solver import SolveResult, Solver, check_model, solve

__all__ = ["SolveResult", "Solver", "check_model", "solve"]
