import numpy as np
import pytest
from scipy.stats import ortho_group, unitary_group

from lagsurgery.ambient import CP2_SPACE, PRODUCT_SPACE
from lagsurgery.catalog import build
from lagsurgery.errors import ChartOverflow, NotLagrangianPlane, SamplingTooCoarse
from lagsurgery.invariants import (
    FrameLoop,
    PathArc,
    boundary_area,
    build_gamma_and_u,
    cone_chain,
    frame_loop,
    gamma_arcs,
    maslov_index,
    maslov_winding,
    monotonicity_report,
    symplectic_area,
    unitary_loop,
)
from lagsurgery.surfaces import Patch

S = np.linspace(0.0, 1.0, 201)


def _diag_loop(k0, k1, s=S):
    return unitary_loop(CP2_SPACE, [np.diag([np.exp(1j * np.pi * k0 * t), np.exp(1j * np.pi * k1 * t)])
                                    for t in s])


@pytest.mark.parametrize("k0,k1,mu", [(0, 0, 0), (1, 0, 1), (1, 1, 2), (-1, 0, -1), (2, 1, 3)])
def test_maslov_of_diagonal_loops(k0, k1, mu):
    assert maslov_index(_diag_loop(k0, k1)) == mu


def _random_loop(rng, k0, k1):
    """Loop based at R^2: a contractible wiggle times a rotation times the
    diagonal generator with Maslov index k0 + k1."""
    H = unitary_group.rvs(2, random_state=rng)
    H = 0.5 * (H + H.conj().T)
    O = ortho_group.rvs(2, random_state=rng)
    m = int(rng.integers(-2, 3))
    out = []
    for t in S:
        ev, V = np.linalg.eigh(H)
        w = V @ np.diag(np.exp(1j * np.sin(2 * np.pi * t) * ev)) @ V.conj().T
        c, s = np.cos(2 * np.pi * m * t), np.sin(2 * np.pi * m * t)
        R = O @ np.array([[c, -s], [s, c]]) @ O.T
        D = np.diag([np.exp(1j * np.pi * k0 * t), np.exp(1j * np.pi * k1 * t)])
        out.append(w @ R @ D)
    return unitary_loop(CP2_SPACE, out)


def test_maslov_additivity_on_random_loops():
    rng = np.random.default_rng(11)
    for _ in range(10):
        ka, kb = rng.integers(-2, 3, size=2), rng.integers(-2, 3, size=2)
        a, b = _random_loop(rng, *ka), _random_loop(rng, *kb)
        assert maslov_index(a) == ka.sum()
        assert maslov_index(b) == kb.sum()
        assert maslov_index(a + b) == maslov_index(a) + maslov_index(b)


def test_coarse_sampling_is_detected():
    with pytest.raises(SamplingTooCoarse):
        maslov_winding(_diag_loop(3, 0, np.linspace(0, 1, 5)))


def test_non_lagrangian_frames_are_rejected():
    frames = np.zeros((5, 4, 2))
    frames[:, 0, 0] = 1.0
    frames[:, 1, 1] = 1.0  # spans the complex line of the first coordinate
    loop = FrameLoop(CP2_SPACE, (2,), np.zeros((5, 2), complex), frames, True)
    with pytest.raises(NotLagrangianPlane):
        maslov_index(loop)


def test_maslov_is_stable_under_refinement():
    atlas = build("KSigma2")
    arcs = gamma_arcs(atlas)
    coarse = frame_loop(atlas.space, arcs, (2,), 400)
    fine = frame_loop(atlas.space, arcs, (2,), 800)
    assert maslov_index(coarse) == maslov_index(fine) == 1
    assert abs(maslov_winding(coarse) - maslov_winding(fine)) < 1e-6


# ----------------------------------------------------------------------------
# areas


def _patch(func, domain, space=CP2_SPACE, chart=(2,)):
    return Patch(space, chart, domain, func)


def _rectangle(p, u0, u1, v0, v1):
    return [PathArc(p, (u0, v0), (u1, v0)), PathArc(p, (u1, v0), (u1, v1)),
            PathArc(p, (u1, v1), (u0, v1)), PathArc(p, (u0, v1), (u0, v0))]


def test_hemisphere_of_a_line():
    p = _patch(lambda u, v: np.stack([u * np.exp(1j * v), 0 * u + 0j], axis=-1),
               ((0.0, 1.0), (0.0, 2 * np.pi)))
    arcs = [PathArc(p, (1.0, 0.0), (1.0, 2 * np.pi))]
    assert symplectic_area(cone_chain(CP2_SPACE, arcs, (2,))) == pytest.approx(1.5, abs=1e-7)
    assert boundary_area(CP2_SPACE, arcs, (2,)) == pytest.approx(1.5, abs=1e-7)


SYNTHETIC = [
    (CP2_SPACE, (2,), lambda u, v: np.stack([u + 1j * v ** 2, 0.3 * u * v + 0.2j * u], axis=-1)),
    (CP2_SPACE, (0,), lambda u, v: np.stack([np.exp(u + 1j * v), 0.5j * v + u ** 2], axis=-1)),
    (CP2_SPACE, (1,), lambda u, v: np.stack([2 * u * np.exp(1j * v), u * np.exp(-2j * v)], axis=-1)),
    (PRODUCT_SPACE, (1, 1), lambda u, v: np.stack([u + 1j * np.sin(v), 0.4 * v - 1j * u * v], axis=-1)),
    (PRODUCT_SPACE, (0, 1), lambda u, v: np.stack([np.cosh(u) * np.exp(1j * v), 0.7j * u], axis=-1)),
]


@pytest.mark.parametrize("space,chart,func", SYNTHETIC)
def test_quadrature_matches_boundary_integral(space, chart, func):
    p = _patch(func, ((0.2, 1.1), (0.3, 1.4)), space, chart)
    arcs = _rectangle(p, 0.2, 1.1, 0.3, 1.4)
    q = symplectic_area(cone_chain(space, arcs, chart))
    assert abs(q) > 1e-3
    assert q == pytest.approx(boundary_area(space, arcs, chart), abs=1e-5)


@pytest.mark.parametrize("space,chart,func", SYNTHETIC)
def test_area_is_additive_under_subdivision(space, chart, func):
    p = _patch(func, ((0.2, 1.1), (0.3, 1.4)), space, chart)

    def area(u0, u1):
        return symplectic_area(cone_chain(space, _rectangle(p, u0, u1, 0.3, 1.4), chart))

    assert area(0.2, 1.1) == pytest.approx(area(0.2, 0.6) + area(0.6, 1.1), abs=1e-9)


def test_disk_inside_a_lagrangian_has_no_area():
    p = _patch(lambda u, v: np.stack([u + 0j, v ** 2 + 0.3 + 0j], axis=-1), ((0.0, 1.0), (0.0, 1.0)))
    arcs = _rectangle(p, 0.1, 0.9, 0.2, 0.8)
    assert abs(symplectic_area(cone_chain(CP2_SPACE, arcs, (2,)))) <= 1e-12


def test_loop_leaving_chart():
    p = _patch(lambda u, v: np.stack([u + 0j, 0 * u + 0j], axis=-1), ((-1.0, 1.0), (0.0, 1.0)))
    arcs = [PathArc(p, (-1.0, 0.0), (1.0, 0.0))]
    with pytest.raises(ChartOverflow):
        boundary_area(CP2_SPACE, arcs, (1,))


def test_u_disk_of_ksigma2():
    atlas = build("KSigma2")
    loop, chain = build_gamma_and_u(atlas)
    assert maslov_index(loop) == 1
    assert symplectic_area(chain) == pytest.approx(0.5, abs=1e-3)
    rows = monotonicity_report(atlas)
    assert {r["name"] for r in rows} == {"u", "seam z0"}
    assert all(r["status"] == "PASS" for r in rows)
