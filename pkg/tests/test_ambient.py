import numpy as np
import pytest

from lagsurgery.ambient import (
    CP2_SPACE,
    PRODUCT_SPACE,
    ActionAngleCoords,
    chart_embed,
    chart_project,
    chart_to_darboux,
    darboux_jacobian,
    darboux_to_chart,
    fs_frame_matrix,
    fs_hermitian,
    fubini_study,
    from_action_angle,
    line_area_quadrature,
    moment_map,
    points_equal,
    primitive,
    projective_distance,
    to_complex,
    to_real,
    transition,
)
from lagsurgery.errors import OutsidePolytopeInterior, ProjectionOutsideChart

SPACES = [CP2_SPACE, PRODUCT_SPACE]


def _random_coords(rng, n=20):
    return rng.normal(size=(n, 2)) + 1j * rng.normal(size=(n, 2))


@pytest.mark.parametrize("space", SPACES, ids=lambda s: s.kind)
def test_chart_round_trip_and_transitions(space):
    rng = np.random.default_rng(1)
    z = _random_coords(rng)
    for src in space.chart_list:
        h = chart_embed(space, src, z)
        assert np.allclose(chart_project(space, h, src), z, atol=1e-14)
        for dst in space.chart_list:
            back = transition(space, dst, src, transition(space, src, dst, z))
            assert np.allclose(back, z, rtol=1e-12, atol=1e-12)


def test_projection_outside_chart_raises():
    h = np.array([0.0, 1.0, 2.0], dtype=complex)
    with pytest.raises(ProjectionOutsideChart):
        chart_project(CP2_SPACE, h, (0,))


def test_real_complex_round_trip():
    rng = np.random.default_rng(2)
    z = _random_coords(rng)
    assert np.array_equal(to_complex(to_real(z)), z)


@pytest.mark.parametrize("space", SPACES, ids=lambda s: s.kind)
def test_primitive_differential_is_omega(space):
    rng = np.random.default_rng(3)
    z = _random_coords(rng, 5)
    h = 1e-6
    for p in z:
        x = to_real(p)
        D = np.empty((4, 4))
        for k in range(4):
            e = np.zeros(4)
            e[k] = h
            D[k] = (primitive(space, to_complex(x + e)) - primitive(space, to_complex(x - e))) / (2 * h)
        # d(lambda)_{kl} = d_k lambda_l - d_l lambda_k
        dlam = D - D.T
        assert np.allclose(dlam, fubini_study(space, p), atol=1e-8)


@pytest.mark.parametrize("space", SPACES, ids=lambda s: s.kind)
def test_frame_matrix_squares_to_hermitian(space):
    rng = np.random.default_rng(4)
    z = _random_coords(rng)
    B = fs_frame_matrix(space, z)
    assert np.allclose(B @ B, fs_hermitian(space, z), atol=1e-14)


@pytest.mark.parametrize("space", SPACES, ids=lambda s: s.kind)
def test_darboux_map_is_symplectic(space):
    rng = np.random.default_rng(5)
    c = space.line_area / np.pi
    w = 0.3 * np.sqrt(c) * _random_coords(rng, 8)
    z = darboux_to_chart(space, w)
    assert np.allclose(chart_to_darboux(space, z), w, atol=1e-14)
    J = darboux_jacobian(space, w)
    std = np.kron(np.eye(2), np.array([[0.0, 1.0], [-1.0, 0.0]]))
    pulled = np.swapaxes(J, -1, -2) @ fubini_study(space, z) @ J
    assert np.allclose(pulled, std, atol=1e-12)


@pytest.mark.parametrize("space", SPACES, ids=lambda s: s.kind)
def test_line_areas(space):
    for line in space.line_names:
        assert line_area_quadrature(space, line) == pytest.approx(space.line_area, abs=1e-9)


@pytest.mark.parametrize("space,x", [(CP2_SPACE, (0.7, 1.1)), (PRODUCT_SPACE, (0.4, 1.5))],
                         ids=["CP2", "CP1xCP1"])
def test_action_angle_round_trip(space, x):
    h = from_action_angle(space, ActionAngleCoords(x, (0.3, -1.2)))
    assert np.allclose(moment_map(space, h), x, atol=1e-14)


def test_action_angle_outside_polytope():
    with pytest.raises(OutsidePolytopeInterior):
        from_action_angle(CP2_SPACE, ActionAngleCoords((2.0, 1.5), (0.0, 0.0)))
    with pytest.raises(OutsidePolytopeInterior):
        from_action_angle(PRODUCT_SPACE, ActionAngleCoords((2.0, 1.0), (0.0, 0.0)))


def test_projective_equality_is_scale_free():
    h = np.array([1.0, 2j, -0.5])
    assert points_equal(CP2_SPACE, h, (3 - 1j) * h)
    assert projective_distance(CP2_SPACE, h, (3 - 1j) * h) < 1e-15
    assert not points_equal(CP2_SPACE, h, h + np.array([0, 0, 1e-6]))
