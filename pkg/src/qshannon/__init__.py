"""Quantum channel capacities, fault-tolerance bounds and [[4,2,2]] code simulations."""

from . import capacity, channels, circuits, ftbounds, infotheory, linalg, simulator

__all__ = ["capacity", "channels", "circuits", "ftbounds", "infotheory", "linalg", "simulator"]
__version__ = "0.1.0"
