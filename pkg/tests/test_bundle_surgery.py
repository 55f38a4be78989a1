import numpy as np
import pytest

from lagsurgery.ambient import projective_distance
from lagsurgery.bundle_surgery import (
    MOEBIUS,
    PRODUCT_CIRCLE,
    PRODUCT_CIRCLE_PRIME,
    THETA_CIRCLE,
    TRIVIAL,
    CircleBundleSpec,
    IsotropicCircle,
    descent_test,
    fiber_handle,
    global_handle,
)
from lagsurgery.errors import BaseOffCircle, TransitionInconsistent
from lagsurgery.surfaces import lagrangian_defect

ALPHA = 2 * np.pi / 3


def test_theta_circle_subbundle_is_moebius():
    rep = descent_test(CircleBundleSpec(THETA_CIRCLE, MOEBIUS, ALPHA))
    assert -1 in rep["transitions"]
    assert rep["max_gap"] <= 1e-12


@pytest.mark.parametrize("circle", [PRODUCT_CIRCLE, PRODUCT_CIRCLE_PRIME])
def test_product_circle_subbundle_is_trivial(circle):
    rep = descent_test(CircleBundleSpec(circle, TRIVIAL, 0.5 * np.pi))
    assert all(s == 1 for s in rep["transitions"])
    assert rep["max_gap"] <= 1e-12


def test_wrong_declared_subbundle_is_rejected():
    with pytest.raises(TransitionInconsistent):
        descent_test(CircleBundleSpec(THETA_CIRCLE, TRIVIAL, ALPHA))
    with pytest.raises(TransitionInconsistent):
        descent_test(CircleBundleSpec(PRODUCT_CIRCLE, MOEBIUS, 0.5 * np.pi))


def test_even_perturbation_breaks_descent_over_moebius_band():
    spec = CircleBundleSpec(THETA_CIRCLE, MOEBIUS, ALPHA, even_perturbation=0.3)
    with pytest.raises(TransitionInconsistent):
        descent_test(spec)


def test_base_off_circle():
    spec = CircleBundleSpec(THETA_CIRCLE, MOEBIUS, ALPHA)
    with pytest.raises(BaseOffCircle):
        fiber_handle(spec, np.array([1.0, 0.5, 0.1], dtype=complex), 0.0)


def test_unknown_circle():
    with pytest.raises(ValueError):
        IsotropicCircle("z0=0")


def test_fiber_handle_stays_near_base():
    spec = CircleBundleSpec(THETA_CIRCLE, MOEBIUS, ALPHA)
    base = spec.model.base(0.4)
    for t in np.linspace(-spec.profile.t_max, spec.profile.t_max, 7):
        p = fiber_handle(spec, base, t)
        assert projective_distance(spec.model.space, p, base) <= 2 * spec.edge_radius


def test_fiber_curve_avoids_the_cut():
    spec = CircleBundleSpec(THETA_CIRCLE, MOEBIUS, ALPHA)
    t = np.linspace(-spec.profile.t_max, spec.profile.t_max, 4001)
    W, _ = spec.fiber_curve(t)
    assert np.min(np.abs(W)) >= spec.cut_radius * (1 - 1e-6)


@pytest.mark.parametrize("circle,sub,angle", [
    (THETA_CIRCLE, MOEBIUS, ALPHA),
    (PRODUCT_CIRCLE, TRIVIAL, 0.5 * np.pi),
    (PRODUCT_CIRCLE_PRIME, TRIVIAL, 0.5 * np.pi),
])
def test_global_handle_is_lagrangian(circle, sub, angle):
    for p in global_handle(CircleBundleSpec(circle, sub, angle), n_t=32, n_psi=32):
        assert lagrangian_defect(p, use_analytic=p.jac is not None) <= 1e-9
