import numpy as np
import pytest

from lagsurgery.ambient import CP2_SPACE, PRODUCT_SPACE
from lagsurgery.catalog import clifford_patch, real_atlas, square_face
from lagsurgery.errors import NonManifoldMesh, OpenBoundary
from lagsurgery.handle import HandleSpec, handle_patch
from lagsurgery.surfaces import (
    LagrangianAtlas,
    Patch,
    defect_convergence,
    euler_characteristic,
    gluing_consistency,
    lagrangian_defect,
    nearest_point,
    orientable,
    restrict_to_line,
)


def _clifford_atlas():
    return LagrangianAtlas(CP2_SPACE, [clifford_patch()], "Clifford")


@pytest.mark.parametrize("atlas,chi,orient", [
    (real_atlas(CP2_SPACE), 1, False),
    (real_atlas(PRODUCT_SPACE), 0, True),
    (_clifford_atlas(), 0, True),
], ids=["RP2", "RP1xRP1", "Clifford"])
def test_topology_of_simple_atlases(atlas, chi, orient):
    assert euler_characteristic(atlas) == chi
    assert euler_characteristic(atlas, refine=2) == chi
    assert orientable(atlas) is orient


def test_single_face_has_open_boundary():
    atlas = LagrangianAtlas(CP2_SPACE, [square_face(CP2_SPACE, (2,))])
    with pytest.raises(OpenBoundary):
        euler_characteristic(atlas)
    with pytest.raises(OpenBoundary):
        orientable(atlas)


def test_duplicated_patch_is_not_a_manifold():
    face = square_face(CP2_SPACE, (2,))
    with pytest.raises(NonManifoldMesh):
        LagrangianAtlas(CP2_SPACE, [face, face]).mesh()


def test_real_faces_are_lagrangian():
    for p in real_atlas(CP2_SPACE).patches:
        assert lagrangian_defect(p, use_analytic=True) <= 1e-12


def test_non_lagrangian_patch_has_large_defect():
    # a complex line is symplectic, the opposite of Lagrangian
    def func(u, v):
        return np.stack([u + 1j * v, np.zeros_like(u) + 0j], axis=-1)

    p = Patch(CP2_SPACE, (2,), ((-1.0, 1.0), (-1.0, 1.0)), func)
    assert lagrangian_defect(p, grid=(16, 16), use_analytic=False) > 0.5


def test_defect_convergence_is_second_order():
    spec = HandleSpec(np.pi / 3, 2 * np.pi / 3)
    h = handle_patch(CP2_SPACE, (2,), spec)
    fd = Patch(h.space, h.chart, h.domain, h.func, None, h.grid, h.name, h.u_breaks)
    rep = defect_convergence(fd, sizes=(32, 64, 128))
    assert rep["defects"][1] <= 1e-6
    for r in rep["ratios"]:
        assert 3.5 <= r <= 4.5


@pytest.mark.parametrize("atlas", [real_atlas(CP2_SPACE), real_atlas(PRODUCT_SPACE)],
                         ids=["RP2", "RP1xRP1"])
def test_gluing_is_consistent(atlas):
    assert len(atlas.gluing) > 0
    assert gluing_consistency(atlas) <= 1e-9


def test_real_locus_meets_line_in_one_circle():
    comps = restrict_to_line(real_atlas(CP2_SPACE), "z0")
    assert len(comps) == 1
    pts = comps[0]
    assert np.max(np.abs(pts[:, 0])) <= 1e-10
    # the trace is a real projective line
    ph = pts[:, 1:] / np.where(np.abs(pts[:, 2:3]) > np.abs(pts[:, 1:2]), pts[:, 2:3], pts[:, 1:2])
    assert np.max(np.abs(ph.imag)) <= 1e-10


def test_clifford_misses_coordinate_lines():
    for line in ("z0", "z1", "z2"):
        assert restrict_to_line(_clifford_atlas(), line) == []


def test_nearest_point():
    atlas = real_atlas(CP2_SPACE)
    d, _, _ = nearest_point(atlas, np.array([1.0, 2.0, 3.0], dtype=complex))
    assert d <= 1e-12
    d, _, _ = nearest_point(atlas, np.array([1.0, 2j, 3.0]))
    assert d > 0.1
