"""Characteristic polynomials of the Y walk and their roots over C."""
from __future__ import annotations

import cmath
from dataclasses import dataclass

from .model import QueueParams

#: |p(beta, alpha) - 1| below this counts as a point on the surface
SURFACE_TOL = 1e-10


class DomainError(ValueError):
    """Argument outside the domain of a surface formula (zero divisor etc.)."""


def csqrt(z: complex) -> complex:
    """Square root with Re >= 0; on the imaginary axis the Im >= 0 root."""
    s = cmath.sqrt(complex(z))
    if s.real < 0.0 or (s.real == 0.0 and s.imag < 0.0):
        s = -s
    return s


def char_poly(params: QueueParams, beta: complex, alpha: complex) -> complex:
    """Interior polynomial lambda1/beta + mu1*beta + lambda2*alpha/beta + mu2*beta/alpha."""
    if beta == 0 or alpha == 0:
        raise DomainError("char_poly needs beta != 0 and alpha != 0")
    p = params
    return p.lambda1 / beta + p.mu1 * beta + p.lambda2 * alpha / beta + p.mu2 * beta / alpha


def char_poly_boundary(params: QueueParams, beta: complex, alpha: complex) -> complex:
    """Polynomial on the y2 = 0 axis, where the (0,-1) jump is suppressed."""
    if beta == 0:
        raise DomainError("char_poly_boundary needs beta != 0")
    p = params
    return p.lambda1 / beta + p.mu1 * beta + p.lambda2 * alpha / beta + p.mu2


@dataclass(frozen=True)
class SurfacePoint:
    beta: complex
    alpha: complex
    residual: float

    @classmethod
    def make(cls, params: QueueParams, beta: complex, alpha: complex) -> SurfacePoint:
        res = abs(char_poly(params, beta, alpha) - 1.0)
        return cls(complex(beta), complex(alpha), float(res))

    @property
    def on_surface(self) -> bool:
        return self.residual <= SURFACE_TOL


@dataclass(frozen=True)
class RootPair:
    beta1: complex
    beta2: complex
    discriminant: complex


def betas_of_alpha(params: QueueParams, alpha: complex) -> RootPair:
    """Roots in beta of p(beta, alpha) = 1 for fixed alpha.

    beta1 takes the minus sign in front of the square root, whatever the
    resulting moduli.
    """
    if alpha == 0:
        raise DomainError("alpha must be nonzero")
    p = params
    a = p.mu2 / alpha + p.mu1
    if abs(a) == 0.0:
        raise DomainError(f"degenerate leading coefficient at alpha={alpha!r}")
    disc = 1.0 - 4.0 * a * (p.lambda1 + p.lambda2 * alpha)
    s = csqrt(disc)
    return RootPair((1.0 - s) / (2.0 * a), (1.0 + s) / (2.0 * a), complex(disc))


def beta1(params: QueueParams, alpha: complex) -> complex:
    return betas_of_alpha(params, alpha).beta1


def conjugate_alpha(params: QueueParams, beta: complex, alpha: complex) -> complex:
    """The conjugator beta**2 / (alpha * rho2): the other alpha-root for this beta."""
    if alpha == 0:
        raise DomainError("alpha must be nonzero")
    return complex(beta) ** 2 / (alpha * params.rho2)


def alphas_of_beta(params: QueueParams, beta: complex) -> tuple[complex, complex]:
    """Both roots in alpha of lambda2 a^2/b + a(lambda1/b + mu1 b - 1) + mu2 b = 0."""
    if beta == 0:
        raise DomainError("beta must be nonzero")
    p = params
    qa = p.lambda2 / beta
    qb = complex(p.lambda1 / beta + p.mu1 * beta - 1.0)
    qc = p.mu2 * beta
    s = csqrt(qb * qb - 4.0 * qa * qc)
    # cancellation-free root first, the other from the product of roots
    q = -0.5 * (qb + s) if (qb.conjugate() * s).real >= 0 else -0.5 * (qb - s)
    if q == 0:
        return (0j, 0j)
    return (complex(q / qa), complex(qc / q))
