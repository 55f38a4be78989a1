import numpy as np
import pytest

from lagsurgery.ambient import CP2_SPACE, PRODUCT_SPACE
from lagsurgery.errors import AngleMismatch, ContainmentViolation
from lagsurgery.handle import (
    HandleSpec,
    ProfileCurve,
    factor_trace_area,
    handle_patch,
    measure_a_eps,
    shear,
)
from lagsurgery.surfaces import lagrangian_defect

HALF_PI = 0.5 * np.pi


def _bare(theta, T):
    return HandleSpec(theta, theta, eps1=1.0, T=T, lam=1.0, eps=1e9, smooth=False)


def test_profile_reflection_symmetry():
    p = ProfileCurve(T=4.0)
    t = np.linspace(0, p.t_max, 101)
    assert np.allclose(p(-t), 1j * np.conj(p(t)), atol=1e-12)


def test_profile_endpoints_are_the_axes():
    p = ProfileCurve(T=4.0)
    c_minus, c_plus = p(np.array([-p.t_max, p.t_max]))
    assert abs(c_minus.imag) < 1e-12 * abs(c_minus)
    assert abs(c_plus.real) < 1e-12 * abs(c_plus)
    assert abs(c_plus) == pytest.approx(np.exp(p.t_max), rel=1e-12)


@pytest.mark.parametrize("knot", [-5.0, -4.0, 0.0, 4.0, 5.0])
def test_profile_is_c2_across_knots(knot):
    p = ProfileCurve(T=4.0, blend_width=1.0)
    h = 1e-9
    left = p.derivatives(np.array([knot - h]))
    right = p.derivatives(np.array([knot + h]))
    for a, b in zip(left, right):
        assert abs(a[0] - b[0]) < 1e-6 * max(1.0, abs(a[0]))


def test_profile_derivatives_match_finite_differences():
    p = ProfileCurve(T=3.0)
    t = np.linspace(-3.9, 3.9, 37)
    h = 1e-6
    c, c1, c2 = p.derivatives(t)
    assert np.allclose(c1, (p(t + h) - p(t - h)) / (2 * h), rtol=1e-6, atol=1e-6)
    _, d_plus, _ = p.derivatives(t + h)
    _, d_minus, _ = p.derivatives(t - h)
    assert np.allclose(c2, (d_plus - d_minus) / (2 * h), rtol=1e-5, atol=1e-5)


def test_unsmoothed_profile_domain():
    with pytest.raises(ValueError):
        ProfileCurve(T=2.0, smooth=False)(3.0)


def test_shear_fixes_real_axis():
    assert shear(0.7, 2.0) == pytest.approx(2.0)
    assert shear(0.7, 1j) == pytest.approx(np.exp(0.7j))


def test_validate_errors():
    with pytest.raises(AngleMismatch):
        HandleSpec(HALF_PI, np.pi / 3).validate()
    with pytest.raises(AngleMismatch):
        HandleSpec(0.0, 0.0).validate()
    with pytest.raises(ContainmentViolation):
        HandleSpec(HALF_PI, HALF_PI, lam=1.0, eps=0.05).validate()
    HandleSpec(HALF_PI, HALF_PI).validate()
    HandleSpec(np.pi / 3, 2 * np.pi / 3).validate()


def test_bare_right_angle_handle_area():
    spec = _bare(HALF_PI, 3.0)
    for factor in (0, 1):
        assert factor_trace_area(spec, factor) == pytest.approx(7.0, abs=1e-6)


def test_area_scales_with_sine_of_angle():
    ratio = factor_trace_area(_bare(np.pi / 3, 5.0), 0) / factor_trace_area(_bare(HALF_PI, 5.0), 0)
    assert ratio == pytest.approx(np.sin(np.pi / 3), rel=1e-2)


@pytest.mark.parametrize("theta", [HALF_PI, np.pi / 3, 2 * np.pi / 3, 1.1])
def test_factor_areas_agree(theta):
    spec = HandleSpec(theta, np.pi - theta if theta != HALF_PI else theta, eps1=1.0, T=3.0,
                      lam=1.0, eps=1e9)
    assert abs(factor_trace_area(spec, 0) - factor_trace_area(spec, 1)) <= 1e-9


def test_trace_must_fit_disk():
    spec = _bare(HALF_PI, 3.0)
    with pytest.raises(ContainmentViolation):
        factor_trace_area(spec, 0, disk_radius=1.0)


def test_a_eps_scales_with_lambda_squared():
    spec = HandleSpec(HALF_PI, HALF_PI)
    a = measure_a_eps(spec)
    assert a > 0
    assert measure_a_eps(spec.scaled(0.5)) == pytest.approx(0.25 * a, rel=1e-9)


@pytest.mark.parametrize("space,chart", [(CP2_SPACE, (2,)), (PRODUCT_SPACE, (1, 1))],
                         ids=["CP2", "CP1xCP1"])
def test_handle_is_lagrangian(space, chart):
    patch = handle_patch(space, chart, HandleSpec(np.pi / 3, 2 * np.pi / 3))
    assert lagrangian_defect(patch, grid=(32, 32), use_analytic=True) <= 1e-9


def test_flat_handle_is_not_fubini_study_lagrangian():
    spec = HandleSpec(np.pi / 3, 2 * np.pi / 3, lam=1.0, eps=1e3)
    patch = handle_patch(CP2_SPACE, (2,), spec, darboux=False)
    assert lagrangian_defect(patch, grid=(32, 32), use_analytic=True) > 1e-6
