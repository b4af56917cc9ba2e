"""
Stabilization parameters for the SUPG method.
"""

from .parameters import (
    PecletPair,
    peclet,
    mu_from_peclet,
    global_from_local,
    upwind_xi,
    tau_theory,
)

__all__ = [
    'PecletPair',
    'peclet',
    'mu_from_peclet',
    'global_from_local',
    'upwind_xi',
    'tau_theory',
]
