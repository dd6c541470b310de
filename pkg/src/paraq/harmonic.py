"""Harmonic functions of the Y walk built from characteristic-surface points.

A point (beta, alpha) gives the log-linear function
``[(beta, alpha), y] = beta**(y1 - y2) * alpha**y2``.  It is harmonic in the
interior whenever p(beta, alpha) = 1; on the y2 = 0 axis it needs either
p1(beta, alpha) = 1 as well (:class:`SinglePoint`) or a partner point with the
same beta that cancels the boundary defect (:class:`ConjugatePair`).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Union

from .model import QueueParams, as_point, require_valid
from .surface import (
    SURFACE_TOL,
    DomainError,
    beta1,
    char_poly,
    char_poly_boundary,
    conjugate_alpha,
)

#: slack in the modulus test |beta| < 1, |alpha| <= 1
MODULUS_SLACK = 1e-12
#: constructors reject a basis whose spot-check residual exceeds this
SPOT_TOL = 1e-9
_SPOT_POINTS = ((0, 0), (1, 0), (4, 0), (2, 1), (6, 3))


class HarmonicityError(ValueError):
    """A constructed function fails the numerical harmonicity spot check."""


def ipow(z: complex, k: int) -> complex:
    """Integer power by repeated squaring (no exp/log branch choices)."""
    k = int(k)
    if k < 0:
        if z == 0:
            raise DomainError("zero base with negative exponent")
        return 1.0 / ipow(z, -k)
    result = 1.0 + 0j
    base = complex(z)
    while k:
        if k & 1:
            result *= base
        base *= base
        k >>= 1
    return result


def eval_bracket(point: tuple[complex, complex], y) -> complex:
    """``[(beta, alpha), y] = beta**(y1 - y2) * alpha**y2``."""
    beta, alpha = point
    y1, y2 = _coords(y)
    if y2 < 0:
        raise DomainError(f"bracket needs y2 >= 0, got {y2}")
    return ipow(beta, y1 - y2) * ipow(alpha, y2)


def _coords(y) -> tuple[int, int]:
    if isinstance(y, tuple):
        return int(y[0]), int(y[1])
    p = as_point(y)
    return p.c1, p.c2


def C(beta: complex, alpha: complex) -> complex:
    return 1.0 - beta / alpha


@dataclass(frozen=True)
class SinglePoint:
    """[(beta, alpha), .] for a point on both characteristic surfaces."""

    beta: complex
    alpha: complex
    kind: str = field(default="single-point", init=False)

    def brackets(self) -> tuple[tuple[complex, tuple[complex, complex]], ...]:
        return ((1.0 + 0j, (self.beta, self.alpha)),)

    def __call__(self, y) -> complex:
        return eval_bracket((self.beta, self.alpha), y)


@dataclass(frozen=True)
class ConjugatePair:
    """h_beta = C(beta, a2) [(beta, a1), .] - C(beta, a1) [(beta, a2), .]."""

    beta: complex
    alpha1: complex
    alpha2: complex
    kind: str = field(default="conjugate-pair", init=False)

    def brackets(self) -> tuple[tuple[complex, tuple[complex, complex]], ...]:
        b, a1, a2 = self.beta, self.alpha1, self.alpha2
        return ((C(b, a2), (b, a1)), (-C(b, a1), (b, a2)))

    def __call__(self, y) -> complex:
        return sum(w * eval_bracket(pt, y) for w, pt in self.brackets())


BasisFunction = Union[SinglePoint, ConjugatePair]


@dataclass(frozen=True)
class Superposition:
    """Complex-weighted sum of basis functions, optionally taking the real part."""

    terms: tuple[tuple[complex, BasisFunction], ...]
    take_real_part: bool = False

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple((complex(c), b) for c, b in self.terms))

    def complex_value(self, y) -> complex:
        return sum(c * b(y) for c, b in self.terms)

    def __call__(self, y):
        v = self.complex_value(y)
        return v.real if self.take_real_part else v

    def real_part(self) -> Superposition:
        return Superposition(self.terms, True)

    def complex_part(self) -> Superposition:
        return Superposition(self.terms, False)

    def brackets(self) -> list[tuple[complex, tuple[complex, complex]]]:
        """All (weight, point) pairs, coefficients folded in."""
        return [(c * w, pt) for c, b in self.terms for w, pt in b.brackets()]

    def diagonal_expansion(self) -> list[tuple[complex, complex]]:
        """(a_i, q_i) with h(k, k) = sum_i a_i * q_i**k before any real part."""
        return [(w, pt[1]) for w, pt in self.brackets()]

    def __add__(self, other: Superposition) -> Superposition:
        return Superposition(self.terms + other.terms, self.take_real_part)


def _spot_check(params: QueueParams, basis: BasisFunction) -> None:
    scale = 1.0 + sum(abs(w) for w, _ in basis.brackets())
    for y in _SPOT_POINTS:
        res = check_harmonicity(params, basis, y)
        if res > SPOT_TOL * scale:
            raise HarmonicityError(
                f"{basis.kind} basis at beta={basis.beta!r} fails harmonicity at {y}: {res:.3e}"
            )


def single_point(params: QueueParams, beta: complex, alpha: complex, check: bool = True) -> SinglePoint:
    """Single-point basis; (beta, alpha) must lie on both surfaces."""
    beta, alpha = complex(beta), complex(alpha)
    res = abs(char_poly(params, beta, alpha) - 1.0)
    res1 = abs(char_poly_boundary(params, beta, alpha) - 1.0)
    if res > SURFACE_TOL or res1 > SURFACE_TOL:
        raise DomainError(
            f"({beta}, {alpha}) is not on both surfaces (residuals {res:.2e}, {res1:.2e})"
        )
    basis = SinglePoint(beta, alpha)
    if check:
        _spot_check(params, basis)
    return basis


def conjugate_pair(params: QueueParams, beta: complex, alpha1: complex, check: bool = True) -> ConjugatePair:
    beta, alpha1 = complex(beta), complex(alpha1)
    res = abs(char_poly(params, beta, alpha1) - 1.0)
    if res > SURFACE_TOL:
        raise DomainError(f"({beta}, {alpha1}) is off the surface (residual {res:.2e})")
    alpha2 = conjugate_alpha(params, beta, alpha1)
    if abs(alpha2 - alpha1) <= 1e-14 * max(1.0, abs(alpha1)):
        raise DomainError(f"conjugate of alpha={alpha1} coincides with it (double root)")
    basis = ConjugatePair(beta, alpha1, alpha2)
    if check:
        _spot_check(params, basis)
    return basis


def h_conjugate_pair(params: QueueParams, beta: complex, alpha1: complex, y) -> complex:
    return conjugate_pair(params, beta, alpha1, check=False)(y)


def h_rho1(params: QueueParams) -> SinglePoint:
    """The single nontrivial single-point basis, at (rho1, rho1)."""
    return single_point(params, params.rho1, params.rho1)


def h_r(params: QueueParams) -> ConjugatePair:
    """Conjugate pair through (r, 1) and (r, r**2/rho2)."""
    return conjugate_pair(params, params.r, 1.0)


def h_beta1(params: QueueParams, alpha: complex) -> ConjugatePair:
    return conjugate_pair(params, beta1(params, alpha), alpha)


def bold_h_r_superposition(params: QueueParams) -> Superposition:
    """h_r rescaled so that its (r, 1) bracket carries weight one."""
    require_valid(params)
    basis = h_r(params)
    return Superposition(((1.0 / (1.0 - params.rho2 / params.r), basis),))


def bold_h_r(params: QueueParams, y) -> float:
    return bold_h_r_superposition(params)(y).real


_Y_STEPS = ((-1, 0), (1, 0), (0, 1), (0, -1))


def check_harmonicity(params: QueueParams, h: Callable, y) -> float:
    """|E_y h(Y_1) - h(y)| for one step of the Y walk from y."""
    y1, y2 = _coords(y)
    probs = (params.lambda1, params.mu1, params.lambda2, params.mu2)
    here = h((y1, y2))
    mean = 0.0
    for (d1, d2), p in zip(_Y_STEPS, probs):
        if y2 + d2 < 0:
            mean += p * here
        else:
            mean += p * h((y1 + d1, y2 + d2))
    return abs(mean - here)


def max_harmonicity_residual(params: QueueParams, h: Callable, points: Iterable) -> float:
    return max(check_harmonicity(params, h, y) for y in points)


def is_pb_determined(h: Superposition | BasisFunction) -> bool:
    """Modulus test: every bracket has |beta| < 1 and |alpha| <= 1."""
    pts = h.brackets()
    return all(
        abs(b) < 1.0 - MODULUS_SLACK and abs(a) <= 1.0 + MODULUS_SLACK for _, (b, a) in pts
    )
