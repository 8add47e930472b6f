"""Fault localization and repair for MiniC programs via partial MAX-SAT."""

__version__ = "0.1.0"
