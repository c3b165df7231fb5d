"""Finite-model workbench for quasivarieties.

Everything operates on finite algebras with total operation tables; all
class-level claims are bound-parameterized and never asserted beyond the
enumerated instances.
"""

__version__ = "0.1.0"
