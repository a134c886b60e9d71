import math

import mpmath
import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st
from scipy.integrate import dblquad

from besovkit.beltrami import box_coefficient, mu_gamma, zero_coefficient
from besovkit.errors import CriticalPointError, DomainError, FiberError, SupportError
from besovkit.function_model import Domain, compose_mobius, gallery, parse_function_spec as P
from besovkit.schwarzian import (SCHWARZIAN_VARIATION_CONSTANT, bounded_univalent_polynomial, box_kernel_closed_form,
                                 canonical_J, d0_pre_schwarzian, d0_schwarzian, disk_grid, fiber_checks,
                                 identity_checks, image_closure_contains, koebe_conjugate, log_derivative,
                                 mobius_shift, pre_schwarzian, pre_variation_constant, schwarzian,
                                 variation_bounds, variation_function, variation_norm)

Z = disk_grid(10, 20)
coef = st.builds(complex, st.floats(-2, 2), st.floats(-2, 2))


def test_identity_and_affine_have_zero_N():
    assert np.all(pre_schwarzian(gallery("identity")).function(Z) == 0)
    aff = compose_mobius((2 - 1j, 3, 0, 1), gallery("identity"))
    assert np.max(np.abs(pre_schwarzian(aff).function(Z))) < 1e-15


def test_koebe_closed_forms():
    k = gallery("koebe")
    z = disk_grid(10, 10)
    assert np.max(np.abs(pre_schwarzian(k).function(z) - (1 / (1 + z) + 3 / (1 - z)))) < 1e-12
    assert np.max(np.abs(schwarzian(k).function(z) + 6 / (1 - z * z) ** 2)) < 1e-10


def test_koebe_schwarzian_matches_mpmath():
    k = lambda w: w / (1 - w) ** 2
    for z in (0.3 + 0.2j, -0.5j, 0.7):
        w = mpmath.mpc(z.real, z.imag)
        d1, d2, d3 = (mpmath.diff(k, w, n) for n in (1, 2, 3))
        ref = complex(d3 / d1 - 1.5 * (d2 / d1) ** 2)
        assert abs(schwarzian(gallery("koebe")).function(np.array(z)) - ref) < 1e-10 * abs(ref)


def test_canonical_J_examples():
    assert np.all(canonical_J(P("constant:c=2")).function(Z) == 0)
    a = 1.5 - 0.5j
    got = canonical_J(compose_mobius((a, 1, 0, 1), gallery("identity"))).function(Z)
    assert np.max(np.abs(got + a * a / 2)) < 1e-14
    k = gallery("koebe")
    assert np.max(np.abs(canonical_J(log_derivative(k)).function(Z) - schwarzian(k).function(Z))) < 1e-10


@settings(max_examples=40, deadline=None)
@given(coef, coef, coef, st.floats(1.2, 5), st.floats(0, 2 * math.pi))
def test_mobius_kernel(a, b, c, rho, t):
    assume(abs(c) > 1e-2)
    d = -c * rho * complex(math.cos(t), math.sin(t))
    assume(abs(a * d - b * c) > 1e-2)
    S = schwarzian(compose_mobius((a, b, c, d), gallery("identity"))).function(Z)
    scale = max(1.0, abs(c) ** 2 / (rho - 0.9) ** 2)
    assert np.max(np.abs(S)) < 1e-9 * scale


@settings(max_examples=30, deadline=None)
@given(st.floats(1.2, 6), st.floats(0, 2 * math.pi))
def test_fiber_constancy_property(rho, t):
    a = rho * complex(math.cos(t), math.sin(t))
    rep = fiber_checks(gallery("identity"), [a], tol=1e-8)
    assert rep.passed


def test_mobius_shift_examples():
    F = gallery("identity")
    phi0 = log_derivative(F)
    for a in (math.inf, None, "inf"):
        shifted = mobius_shift(F, a)
        assert shifted == phi0
        np.testing.assert_array_equal(shifted.derivatives(Z, 2), phi0.derivatives(Z, 2))
    d = mobius_shift(F, 3.0).derivatives(np.array(0j), 1)[1]
    assert abs(d - 2 / 3) < 1e-15
    with pytest.raises(FiberError):
        mobius_shift(gallery("koebe"), 1.0)
    with pytest.raises(FiberError):
        mobius_shift(F, 0.5)
    # user predicate overrides the closure test
    assert mobius_shift(gallery("koebe"), 1.0, image_predicate=lambda a: False).label.startswith("mobius_shift")


def test_image_closure():
    assert image_closure_contains(gallery("identity"), 1.0)
    assert not image_closure_contains(gallery("identity"), 1.01)
    p = bounded_univalent_polynomial(0.25)
    assert image_closure_contains(p, 1.2)
    assert not image_closure_contains(p, 1.3)


def test_critical_point_raises():
    # z^2 has F'(0) = 0
    with pytest.raises(CriticalPointError):
        pre_schwarzian(P("monomial:k=2")).function(np.array(0j))


def test_identity_checks_report():
    for F in (gallery("koebe"), bounded_univalent_polynomial(0.3), koebe_conjugate(-2.0)):
        assert identity_checks(F).passed


def _dblquad(c, box, z, m):
    x0, x1, y0, y1 = box
    parts = [dblquad(lambda y, x, f=f: f(c * (complex(x, y) - z) ** -m), x0, x1, y0, y1, epsabs=1e-14,
                     epsrel=1e-12)[0] for f in (lambda w: w.real, lambda w: w.imag)]
    return complex(*parts)


@pytest.mark.parametrize("method", ["quadrature", "closed", "auto"])
def test_kernel_example_box(method):
    mu = box_coefficient(0.3)
    z = -1j
    assert abs(d0_pre_schwarzian(mu, z, method) - (-2 / math.pi) * _dblquad(0.3, (0, 1, 1, 2), z, 3)) < 1e-9
    assert abs(d0_schwarzian(mu, z, method) - (-6 / math.pi) * _dblquad(0.3, (0, 1, 1, 2), z, 4)) < 1e-9


def test_zero_coefficient_gives_zero():
    mu = zero_coefficient(Domain.UpperHalfPlane)
    assert d0_pre_schwarzian(mu, -1j) == 0
    assert d0_schwarzian(mu, -1j) == 0


@settings(max_examples=20, deadline=None)
@given(st.floats(-0.99, 0.99), st.floats(0.1, 3), st.floats(0.2, 2.0))
def test_symmetric_support_parity(c, y, half):
    # pairing w with -conj(w): odd kernel order gives an imaginary value, even order a real one
    mu = box_coefficient(c, (-half, half, 0.5, 1.5))
    v3 = complex(d0_pre_schwarzian(mu, -1j * y))
    v4 = complex(d0_schwarzian(mu, -1j * y))
    assert abs(v3.real) <= 1e-12 * max(abs(v3), 1e-300)
    assert abs(v4.imag) <= 1e-12 * max(abs(v4), 1e-300)


def test_closed_form_matches_quadrature_off_axis():
    box = (-1.0, 2.0, 0.25, 3.0)
    z = np.array([0.3 - 0.1j, -4 - 2j, 10 - 0.5j])
    for m in (3, 4):
        q = d0_pre_schwarzian(box_coefficient(0.5, box), z) if m == 3 else d0_schwarzian(box_coefficient(0.5, box), z)
        k = -2 / math.pi if m == 3 else -6 / math.pi
        np.testing.assert_allclose(q, k * box_kernel_closed_form(0.5, box, z, m), rtol=1e-7)


def test_kernel_errors():
    with pytest.raises(DomainError):
        d0_pre_schwarzian(box_coefficient(0.3), 1j)
    with pytest.raises(SupportError):
        d0_pre_schwarzian(box_coefficient(0.3, (0, 1, 0, 1)), -1j)
    with pytest.raises(DomainError):
        d0_schwarzian(mu_gamma(0.5), -1j)


def test_variation_function_derivative_identity():
    mu = box_coefficient(0.4 + 0.1j, (-1, 1, 0.5, 1.0))
    f = variation_function(mu, "pre")
    z = np.array([-0.5j, 1 - 2j])
    # d0 S is the derivative of (d0 L)'
    np.testing.assert_allclose(f.derivatives(z, 1)[1], d0_schwarzian(mu, z, "closed"), rtol=1e-10)


def test_constants_and_bounds():
    assert pre_variation_constant(4.0) == pytest.approx((4 * math.pi) ** 0.25 * 16 / (2 - 4 / 3))
    with pytest.raises(ValueError):
        pre_variation_constant(2.0)
    assert SCHWARZIAN_VARIATION_CONSTANT == 24.0
    mu = box_coefficient(0.5, (0, 1, 1, 2))
    assert variation_bounds(mu).passed
    v = variation_norm(mu, 2.0, "schwarzian")
    assert v.last_delta_rel < 1e-6
