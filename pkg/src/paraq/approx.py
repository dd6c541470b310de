"""Approximations of P_y(tau < inf) by superpositions of Y-harmonic functions.

Every approximation here is a harmonic superposition that equals (or nearly
equals) one on the diagonal y1 = y2.  Because the superposition is determined
by its diagonal values, ``max_k |h(k, k) - 1|`` bounds its relative error
against the true hitting probability; :func:`certify_cstar` computes that
maximum with a terminating scan.
"""
from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .harmonic import (
    MODULUS_SLACK,
    Superposition,
    bold_h_r_superposition,
    h_beta1,
    h_rho1,
    is_pb_determined,
)
from .model import AssumptionError, QueueParams, as_point, require_valid, validate


class CertificateError(ArithmeticError):
    """The diagonal error of a superposition cannot be bounded."""


class ProjectionError(ArithmeticError):
    """The anchor system for the coefficients is singular."""


@dataclass(frozen=True)
class ApproximationResult:
    superposition: Superposition
    coefficients: tuple[complex, ...]
    cstar: float
    argmax_diagonal: int
    tail_bound_used: float
    c8: float | None = None
    alphas: tuple[complex, ...] = ()
    anchor_residual: float = 0.0

    def __call__(self, y) -> float:
        return float(self.superposition.real_part()(y))

    def complex_value(self, y) -> complex:
        return self.superposition.complex_value(y)


def _diag_ok(y) -> tuple[int, int]:
    y1, y2 = as_point(y)
    if not 0 <= y2 <= y1:
        raise ValueError(f"need y1 >= y2 >= 0, got {(y1, y2)}")
    return y1, y2


def _bold_weight(params: QueueParams) -> float:
    """(1 - r)/(1 - rho2/r), the weight of the conjugate bracket in bold h_r."""
    r = params.r
    return (1.0 - r) / (1.0 - params.rho2 / r)


def exact_geometric_formula(params: QueueParams, y) -> float:
    """P_y(tau < inf) in closed form, valid when r**2 == rho1*rho2."""
    if not validate(params).geometric_case:
        raise AssumptionError("geometric_case", "closed form needs r**2 == rho1*rho2")
    require_valid(params)
    y = _diag_ok(y)
    h = bold_h_r_superposition(params)
    return float(h(y).real + _bold_weight(params) * params.rho1 ** y[0])


def geometric_closed_form(params: QueueParams, y) -> float:
    """The same value written as r^(y1-y2) + r(1-r)/(r-rho2) (rho1^y1 - r^(y1-y2) rho1^y2)."""
    y1, y2 = _diag_ok(y)
    r, rho1, rho2 = params.r, params.rho1, params.rho2
    return r ** (y1 - y2) + r * (1 - r) / (r - rho2) * (rho1**y1 - r ** (y1 - y2) * rho1**y2)


def _extreme_two_exp(a: float, p: float, b: float, q: float, kind: str) -> float:
    """max or min over real x >= 0 of a p^x - b q^x (0 < p, q < 1).

    The only interior critical point solves a ln p p^x = b ln q q^x; the
    candidates are x = 0, that point, and the limit 0 at infinity.
    """
    vals = [a - b, 0.0]
    if p != q and a != 0 and b != 0:
        ratio = (b * math.log(q)) / (a * math.log(p))
        if ratio > 0:
            x = math.log(ratio) / math.log(p / q)
            if x > 0:
                vals.append(a * p**x - b * q**x)
    return max(vals) if kind == "max" else min(vals)


def c8_critical_point(params: QueueParams) -> float:
    """x* = ln(ln a2 / ln rho1) / ln(rho1 / a2) with a2 = r**2/rho2."""
    a2 = params.r**2 / params.rho2
    return math.log(math.log(a2) / math.log(params.rho1)) / math.log(params.rho1 / a2)


def build_h_a0(params: QueueParams) -> ApproximationResult:
    """Two-term approximation c0 bold(h_r) + c1 h_rho1 and its bound C8.

    Returns ``c8`` with P <= h <= C8 P; ``cstar`` is the diagonal scan of
    the same function and never exceeds C8 - 1 in the first case.
    """
    require_valid(params)
    rho1, r = params.rho1, params.r
    a2 = r * r / params.rho2
    w = _bold_weight(params)
    if rho1 >= a2:
        if rho1 == a2 or abs(rho1 - a2) <= 1e-12:
            warnings.warn("rho1 == r**2/rho2: C8 bound degenerates to 1", stacklevel=2)
        c0, c1 = 1.0, w
        c8 = 1.0 + w * _extreme_two_exp(1.0, rho1, 1.0, a2, "max")
    else:
        # smallest C0 with 1 + min_x [C0 rho1^x - w a2^x] >= 1/2
        def margin(c):
            return 0.5 + _extreme_two_exp(c, rho1, w, a2, "min")

        hi = 1.0
        while margin(hi) < 0:
            hi *= 2.0
        big_c0 = brentq(margin, 0.0, hi, xtol=1e-14) if margin(0.0) < 0 else 0.0
        big_c0 = max(big_c0, 1e-300)
        c0, c1 = 2.0, 2.0 * big_c0
        c8 = 2.0 * (1.0 + _extreme_two_exp(big_c0, rho1, w, a2, "max"))
    terms = tuple((c0 * c, b) for c, b in bold_h_r_superposition(params).terms)
    terms += ((complex(c1), h_rho1(params)),)
    sup = Superposition(terms, take_real_part=True)
    cstar, kstar, tail = certify_cstar(sup)
    return ApproximationResult(sup, (complex(c0), complex(c1)), cstar, kstar, tail, c8=c8)


def anchor_alphas(K: int, radius: float) -> tuple[complex, ...]:
    """radius * exp(2 pi i j/(K+1)), j = 1..K."""
    return tuple(radius * cmath.exp(2j * math.pi * j / (K + 1)) for j in range(1, K + 1))


def build_h_aK(
    params: QueueParams, K: int, alpha_radius: float = 0.7, anchor_count: int | None = None
) -> ApproximationResult:
    """Fit bold(h_r) + c0 h_rho1 + sum_j c_j h_beta1(alpha_j) to one at (k, k), k = 0..K.

    ``coefficients`` is (c0, c1, ..., cK); ``superposition`` takes the real
    part, the complex function is available through ``complex_value``.
    Only the square system is supported, so ``anchor_count`` must be K + 1.
    """
    if K < 1:
        raise ValueError("K must be >= 1; use build_h_a0 for the two-term approximation")
    if anchor_count is not None and anchor_count != K + 1:
        raise ValueError(f"anchor_count must equal K + 1 = {K + 1}, got {anchor_count}")
    if not 0.0 < alpha_radius <= 1.0:
        raise ValueError(f"alpha_radius must be in (0, 1], got {alpha_radius}")
    require_valid(params)
    alphas = anchor_alphas(K, alpha_radius)
    fixed = bold_h_r_superposition(params)
    bases = [h_rho1(params)] + [h_beta1(params, a) for a in alphas]
    for a, b in zip(alphas, bases[1:]):
        if not is_pb_determined(b):
            raise AssumptionError(
                "pb_determined",
                f"h_beta1(alpha={a:.6g}) has |beta| = {abs(b.beta):.6g}, "
                f"|conjugate alpha| = {abs(b.alpha2):.6g}; not determined by the diagonal",
            )
    ks = range(K + 1)
    A = np.array([[b((k, k)) for b in bases] for k in ks], dtype=complex)
    rhs = np.array([1.0 - fixed.complex_value((k, k)) for k in ks], dtype=complex)
    try:
        c = np.linalg.solve(A, rhs)
    except np.linalg.LinAlgError as exc:
        raise ProjectionError(f"singular anchor system for k=0..{K}, alphas={alphas}") from exc
    # one step of iterative refinement
    c = c + np.linalg.solve(A, rhs - A @ c)
    resid = float(np.max(np.abs(A @ c - rhs)))
    if resid > 1e-8:
        warnings.warn(f"anchor equations solved only to {resid:.2e}", stacklevel=2)
    terms = fixed.terms + tuple((complex(ci), b) for ci, b in zip(c, bases))
    sup = Superposition(terms, take_real_part=True)
    cstar, kstar, tail = certify_cstar(sup)
    return ApproximationResult(
        sup, tuple(complex(ci) for ci in c), cstar, kstar, tail,
        alphas=alphas, anchor_residual=resid,
    )


def diagonal_errors(h: Superposition, kmax: int) -> np.ndarray:
    """|h*(k, k) - 1| for k = 0..kmax, h* the complex superposition."""
    h = h.complex_part()
    return np.array([abs(h((k, k)) - 1.0) for k in range(kmax + 1)])


def certify_cstar(h: Superposition, max_k: int = 1_000_000) -> tuple[float, int, float]:
    """Maximum of |h*(k, k) - 1| over the whole diagonal.

    Returns ``(cstar, argmax, tail)``, ``tail`` being the geometric majorant
    of the remaining diagonal at the point where the scan stopped.  Terms
    with |alpha| = 1 must have alpha = 1; they combine with the -1 into a
    constant.
    """
    if not is_pb_determined(h):
        raise CertificateError("superposition is not determined by its diagonal values")
    const = -1.0 + 0j
    a_list, q_list = [], []
    for a, q in h.diagonal_expansion():
        if abs(q) >= 1.0 - MODULUS_SLACK:
            if abs(q - 1.0) > MODULUS_SLACK:
                raise CertificateError(f"non-contracting diagonal base {q!r}")
            const += a
        elif a != 0:
            a_list.append(a)
            q_list.append(q)
    if not q_list:
        return abs(const), 0, 0.0
    a = np.array(a_list, dtype=complex)
    q = np.array(q_list, dtype=complex)
    absa, absq = np.abs(a), np.abs(q)
    qmax = float(absq.max())
    pw = np.ones_like(q)
    apw = np.ones_like(absq)
    best, kbest = -1.0, 0
    tail = math.inf
    for k in range(max_k + 1):
        m = abs(const + np.dot(a, pw))
        if m > best:
            best, kbest = m, k
        tail = float(np.dot(absa, apw)) / (1.0 - qmax)
        # sup over j >= k is at most |const| + tail
        if k > 0 and abs(const) + tail <= best:
            break
        pw *= q
        apw *= absq
    else:
        best = max(best, abs(const) + tail)
    return float(best), kbest, tail
