"""Symbolic-numeric evaluation of closed-form index formulas for moduli
of principal bundles on curves: classical fixed-point sums, their formal
deformations by evaluation classes, graded-differential indices with
their t -> -1 degeneration, and large-level asymptotics."""

__version__ = "0.1.0"
