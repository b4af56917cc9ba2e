"""
Péclet numbers, the upwind function and the closed-form SUPG parameters.

    Pe_h  = |beta| h / (2 mu)
    Pe_g  = |beta| L / (2 mu)
    xi(t) = coth(t) - 1/t
    tau_r = h / (2 |beta| r) * xi(Pe_h / r)
"""

import math
from dataclasses import dataclass

import numpy as np

from core.errors import InvalidArgumentError
from fem.lagrange import check_degree

SERIES_SWITCH = 1e-3


@dataclass(frozen=True)
class PecletPair:
    local: float
    global_: float

    def as_dict(self) -> dict:
        return {"pe_h": self.local, "pe_g": self.global_}


def _positive(**values) -> None:
    for name, value in values.items():
        if not (math.isfinite(value) and value > 0):
            raise InvalidArgumentError(f"{name} must be positive and finite, got {value}")


def peclet(beta_norm: float, h: float, L: float, mu: float) -> PecletPair:
    _positive(beta_norm=beta_norm, h=h, L=L, mu=mu)
    return PecletPair(local=beta_norm * h / (2.0 * mu), global_=beta_norm * L / (2.0 * mu))


def mu_from_peclet(beta_norm: float, length: float, pe: float) -> float:
    """Diffusion coefficient giving Péclet number pe on the length scale `length`."""
    _positive(beta_norm=beta_norm, length=length, pe=pe)
    return beta_norm * length / (2.0 * pe)


def global_from_local(pe_h: float, h: float, L: float = 1.0) -> float:
    _positive(pe_h=pe_h, h=h, L=L)
    return pe_h * L / h


def upwind_xi(t):
    """coth(t) - 1/t for t > 0, switching to t/3 - t^3/45 below 1e-3."""
    arr = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
        raise InvalidArgumentError(f"Upwind function needs t > 0, got {t}")
    small = arr < SERIES_SWITCH
    safe = np.where(small, 1.0, arr)
    out = np.where(small, arr / 3.0 - arr ** 3 / 45.0, 1.0 / np.tanh(safe) - 1.0 / safe)
    if out.ndim == 0:
        return float(out)
    return out


def tau_theory(beta_norm: float, h: float, mu: float, r: int) -> float:
    """Closed-form SUPG parameter h/(2|beta| r) xi(Pe_h / r); r=1 is the nodally exact 1D value."""
    _positive(beta_norm=beta_norm, h=h, mu=mu)
    r = check_degree(r)
    pe_h = beta_norm * h / (2.0 * mu)
    return h / (2.0 * beta_norm * r) * upwind_xi(pe_h / r)
