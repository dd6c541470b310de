import cmath
import math

import pytest
from hypothesis import given, settings, strategies as st

from paraq import harmonic, surface
from paraq.harmonic import Superposition
from paraq.model import EXAMPLE_PARAMS as P, params_with_geometric_r

WEDGE = [(a, b) for a in range(21) for b in range(a + 1)]


def test_ipow_matches_builtin():
    z = 0.3 - 0.8j
    for k in range(40):
        assert harmonic.ipow(z, k) == pytest.approx(z**k, rel=1e-13, abs=1e-300)


def test_bracket_values():
    assert harmonic.eval_bracket((0.5, 0.25), (3, 1)) == pytest.approx(0.5**2 * 0.25)
    with pytest.raises(surface.DomainError):
        harmonic.eval_bracket((0.5, 0.5), (1, -1))


@settings(max_examples=40, deadline=None)
@given(st.floats(0, 2 * math.pi), st.floats(0.2, 1.0))
def test_h_beta1_harmonic_on_wedge(theta, radius):
    a = radius * cmath.exp(1j * theta)
    try:
        h = harmonic.h_beta1(P, a)
    except surface.DomainError:
        return
    scale = 1 + sum(abs(w) for w, _ in h.brackets())
    assert harmonic.max_harmonicity_residual(P, h, WEDGE) <= 1e-12 * scale


def test_named_bases_harmonic():
    for h in (harmonic.h_rho1(P), harmonic.h_r(P), harmonic.bold_h_r_superposition(P)):
        assert harmonic.max_harmonicity_residual(P, h, WEDGE) <= 1e-12


def test_bold_h_r_is_one_on_diagonal_plus_geometric():
    h = harmonic.bold_h_r_superposition(P)
    w = (1 - P.r) / (1 - P.rho2 / P.r)
    a2 = P.r**2 / P.rho2
    for k in range(10):
        assert h((k, k)).real == pytest.approx(1 - w * a2**k, rel=1e-13)
    assert h((0, 0)).real == pytest.approx(1 - w)


def test_single_point_off_boundary_rejected():
    b = surface.beta1(P, 0.7)
    with pytest.raises(surface.DomainError):
        harmonic.single_point(P, b, 0.7)


def test_wrong_conjugate_caught():
    # a mislabelled pair is off the surface or fails the spot check
    b = surface.beta1(P, 0.7)
    with pytest.raises((surface.DomainError, harmonic.HarmonicityError)):
        harmonic.conjugate_pair(P, b, 0.65)


def test_superposition_linearity():
    terms = ((0.3 - 1j, harmonic.h_beta1(P, 0.7j)), (2.0, harmonic.h_rho1(P)), (-0.5, harmonic.h_r(P)))
    s = Superposition(terms)
    for y in WEDGE[::7]:
        direct = sum(c * b(y) for c, b in terms)
        assert abs(s(y) - direct) <= 1e-13 * max(abs(direct), 1e-300)
    both = s + Superposition(((1.0, harmonic.h_rho1(P)),))
    assert both((4, 1)) == pytest.approx(s((4, 1)) + harmonic.h_rho1(P)((4, 1)), rel=1e-13)
    assert s.real_part()((5, 2)) == pytest.approx(s((5, 2)).real)


def test_diagonal_decay_rate():
    s = Superposition(((1.0, harmonic.h_beta1(P, 0.7)), (0.4j, harmonic.h_beta1(P, -0.7j))))
    qmax = max(abs(q) for _, q in s.diagonal_expansion())
    vals = [abs(s.complex_value((k, k))) for k in range(60)]
    bound = sum(abs(a) for a, _ in s.diagonal_expansion())
    for k, v in enumerate(vals):
        assert v <= bound * qmax**k * (1 + 1e-12)


def test_pb_determined():
    assert harmonic.is_pb_determined(harmonic.h_beta1(P, 0.7))
    assert harmonic.is_pb_determined(harmonic.h_r(P))
    # the conjugate point of (beta1(1.2), 1.2) lies outside the unit circle in alpha
    assert not harmonic.is_pb_determined(harmonic.SinglePoint(0.5, 1.2))


def test_geometric_case_bases():
    g = params_with_geometric_r(0.5, 0.2)
    assert harmonic.max_harmonicity_residual(g, harmonic.bold_h_r_superposition(g), WEDGE) <= 1e-12
