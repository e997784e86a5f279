"""Exact and numerical verification of the product formula for regularized Fredholm determinants."""

from regdet.freealg import NCPoly, TSeries
from regdet.cyclic import CyclicPoly, cyclic_trace, is_commutator_sum

__version__ = "0.1.0"

__all__ = ["NCPoly", "TSeries", "CyclicPoly", "cyclic_trace", "is_commutator_sum"]
