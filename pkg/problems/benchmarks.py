"""
Benchmark advection-diffusion problems

    -mu lap u + beta . grad u = f  in Omega,   u = g  on the boundary

with closed-form exact solutions where available.

Boundary-layer profiles are evaluated with negative exponents only:

    (e^{a s} - 1) / (e^{a} - 1) = e^{a (s - 1)} (1 - e^{-a s}) / (1 - e^{-a})

which stays finite for a = 1/mu up to 1e5 and beyond.
"""

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from core.errors import InvalidArgumentError

Field = Callable[[np.ndarray], np.ndarray]

DEFAULT_BETA_NORM = math.sqrt(2.0)


@dataclass(frozen=True)
class ExactSolution:
    """Closed-form field: value (...,) , gradient (..., dim) and optional Laplacian (...,)."""

    value: Field
    gradient: Optional[Field] = None
    laplacian: Optional[Field] = None


@dataclass(frozen=True, eq=False)
class ProblemSpec:
    """
    Advection-diffusion problem with constant mu and beta.

    Callables take points of shape (..., dim) and return arrays of shape (...,).
    """

    problem_id: str
    dim: int
    mu: float
    beta: np.ndarray
    forcing: Field
    dirichlet: Field
    exact: Optional[ExactSolution] = None
    char_length: float = 1.0
    theta: Optional[float] = None

    @property
    def beta_norm(self) -> float:
        return float(np.linalg.norm(self.beta))

    def advection(self, points: np.ndarray) -> np.ndarray:
        return np.broadcast_to(self.beta, np.shape(points))

    def advection_divergence(self, points: np.ndarray) -> np.ndarray:
        return np.zeros(np.shape(points)[:-1])

    def describe(self) -> dict:
        return {
            "problem_id": self.problem_id,
            "dim": self.dim,
            "mu": self.mu,
            "beta": [float(b) for b in self.beta],
            "theta": self.theta,
            "char_length": self.char_length,
            "has_exact": self.exact is not None,
        }


def _check_mu(mu: float) -> float:
    mu = float(mu)
    if not (math.isfinite(mu) and mu > 0):
        raise InvalidArgumentError(f"Diffusion coefficient must be positive, got {mu}")
    return mu


def advection_from_angle(theta: float, magnitude: float = DEFAULT_BETA_NORM) -> np.ndarray:
    """beta = |beta| (cos theta, sin theta)."""
    if not (math.isfinite(theta) and math.isfinite(magnitude) and magnitude > 0):
        raise InvalidArgumentError(f"Invalid advection angle/magnitude: {theta}, {magnitude}")
    return np.array([magnitude * math.cos(theta), magnitude * math.sin(theta)])


def _as_beta(beta: Sequence[float], dim: int) -> np.ndarray:
    beta = np.asarray(beta, dtype=float).reshape(-1)
    if beta.shape != (dim,) or not np.all(np.isfinite(beta)):
        raise InvalidArgumentError(f"Advection must be a finite {dim}-vector, got {beta}")
    beta.setflags(write=False)
    return beta


class _Layer:
    """Profile s -> (e^{a s} - 1)/(e^{a} - 1) on [0, 1] and its derivatives."""

    def __init__(self, a: float):
        self.a = a
        self.denominator = -math.expm1(-a)

    def value(self, s):
        return np.exp(self.a * (s - 1.0)) * (-np.expm1(-self.a * s)) / self.denominator

    def first(self, s):
        return self.a * np.exp(self.a * (s - 1.0)) / self.denominator

    def second(self, s):
        return self.a * self.a * np.exp(self.a * (s - 1.0)) / self.denominator


def _zeros(points):
    return np.zeros(np.shape(points)[:-1])


def _ones(points):
    return np.ones(np.shape(points)[:-1])


def make_1d_validation(mu: float, beta: float = 1.0) -> ProblemSpec:
    """Omega=(0,1), f=0, u(0)=0, u(1)=1, u(x) = (e^{beta x/mu} - 1)/(e^{beta/mu} - 1)."""
    mu = _check_mu(mu)
    if not (math.isfinite(beta) and beta > 0):
        raise InvalidArgumentError(f"Advection must be positive, got {beta}")
    layer = _Layer(beta / mu)

    exact = ExactSolution(
        value=lambda p: layer.value(p[..., 0]),
        gradient=lambda p: layer.first(p[..., 0])[..., None],
        laplacian=lambda p: layer.second(p[..., 0]),
    )
    return ProblemSpec(problem_id="val1d", dim=1, mu=mu, beta=_as_beta([beta], 1),
                       forcing=_zeros, dirichlet=exact.value, exact=exact)


def make_2d_training(mu: float) -> ProblemSpec:
    """beta=(1,1), f=0, u = layer(x) + layer(y) with layer(s) = (e^{s/mu}-1)/(e^{1/mu}-1)."""
    mu = _check_mu(mu)
    layer = _Layer(1.0 / mu)

    def value(p):
        return layer.value(p[..., 0]) + layer.value(p[..., 1])

    def gradient(p):
        return np.stack([layer.first(p[..., 0]), layer.first(p[..., 1])], axis=-1)

    def laplacian(p):
        return layer.second(p[..., 0]) + layer.second(p[..., 1])

    exact = ExactSolution(value=value, gradient=gradient, laplacian=laplacian)
    return ProblemSpec(problem_id="train2d", dim=2, mu=mu, beta=_as_beta([1.0, 1.0], 2),
                       forcing=_zeros, dirichlet=value, exact=exact)


def make_2d_constant_forcing(mu: float, beta: Sequence[float] = (1.0, 1.0),
                             theta: Optional[float] = None) -> ProblemSpec:
    """
    u = (x + y)/2 + (1 - (e^{x/mu} + e^{y/mu})/2)/(e^{1/mu} - 1)
      = (x + y)/2 - (layer(x) + layer(y))/2

    For beta = (1, 1) the forcing is f = 1. For other directions

        f = (b1 + b2)/2 + (1 - b1) layer'(x)/2 + (1 - b2) layer'(y)/2
    """
    mu = _check_mu(mu)
    beta = _as_beta(beta, 2)
    b1, b2 = float(beta[0]), float(beta[1])
    layer = _Layer(1.0 / mu)

    def value(p):
        x, y = p[..., 0], p[..., 1]
        return 0.5 * (x + y) - 0.5 * (layer.value(x) + layer.value(y))

    def gradient(p):
        return np.stack([0.5 - 0.5 * layer.first(p[..., 0]),
                         0.5 - 0.5 * layer.first(p[..., 1])], axis=-1)

    def laplacian(p):
        return -0.5 * (layer.second(p[..., 0]) + layer.second(p[..., 1]))

    if b1 == 1.0 and b2 == 1.0:
        forcing = _ones
    else:
        def forcing(p):
            return (0.5 * (b1 + b2) + 0.5 * (1.0 - b1) * layer.first(p[..., 0])
                    + 0.5 * (1.0 - b2) * layer.first(p[..., 1]))

    exact = ExactSolution(value=value, gradient=gradient, laplacian=laplacian)
    return ProblemSpec(problem_id="forced2d", dim=2, mu=mu, beta=beta, forcing=forcing,
                       dirichlet=value, exact=exact, theta=theta)


def make_2d_homogeneous(mu: float) -> ProblemSpec:
    """beta=(1,1), f=1, g=0; no closed form (see problems.reference)."""
    mu = _check_mu(mu)
    return ProblemSpec(problem_id="homog2d", dim=2, mu=mu, beta=_as_beta([1.0, 1.0], 2),
                       forcing=_ones, dirichlet=_zeros, exact=None)


def make_2d_atan(mu: float, beta: Sequence[float] = (1.0, 1.0),
                 theta: Optional[float] = None) -> ProblemSpec:
    """
    u = -atan(q)/sqrt(mu),  q = (x - 1/2)^2 + (y - 1/2)^2 - 1/16

    f = sqrt(mu) (lap q/(1 + q^2) - 2 q |grad q|^2/(1 + q^2)^2)
        - beta . grad q / (sqrt(mu) (1 + q^2))
    """
    mu = _check_mu(mu)
    beta = _as_beta(beta, 2)
    root = math.sqrt(mu)

    def parts(p):
        dx, dy = p[..., 0] - 0.5, p[..., 1] - 0.5
        q = dx * dx + dy * dy - 1.0 / 16.0
        return q, 2.0 * dx, 2.0 * dy

    def value(p):
        q, _, _ = parts(p)
        return -np.arctan(q) / root

    def gradient(p):
        q, qx, qy = parts(p)
        scale = -1.0 / (root * (1.0 + q * q))
        return np.stack([scale * qx, scale * qy], axis=-1)

    def laplacian(p):
        q, qx, qy = parts(p)
        s = 1.0 + q * q
        return -(4.0 / s - 2.0 * q * (qx * qx + qy * qy) / (s * s)) / root

    def forcing(p):
        q, qx, qy = parts(p)
        s = 1.0 + q * q
        diffusion = root * (4.0 / s - 2.0 * q * (qx * qx + qy * qy) / (s * s))
        transport = (beta[0] * qx + beta[1] * qy) / (root * s)
        return diffusion - transport

    exact = ExactSolution(value=value, gradient=gradient, laplacian=laplacian)
    return ProblemSpec(problem_id="atan2d", dim=2, mu=mu, beta=beta, forcing=forcing,
                       dirichlet=value, exact=exact, theta=theta)
