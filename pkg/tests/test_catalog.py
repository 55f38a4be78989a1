import numpy as np
import pytest

from lagsurgery.ambient import CP2_SPACE, PRODUCT_SPACE, moment_map
from lagsurgery.catalog import (
    CONSTRUCTIONS,
    GammaCurve,
    action_angle_point,
    build,
    chekanov_schlenk_patch,
    chopped_polytope_margin,
    clifford_patch,
    eight_preimages,
    modified_chekanov_patch,
    polytope_cuts,
    predicted_delta,
    preimage_gaps,
    rotation_ch,
    transverse_intersection,
)
from lagsurgery.errors import InadmissibleParameters
from lagsurgery.surfaces import LagrangianAtlas, nearest_point

TOPOLOGY = {
    "Clifford": (0, True),
    "ChekanovSchlenk": (0, True),
    "ModifiedChekanov": (0, True),
    "RealCP2": (1, False),
    "RealProduct": (0, True),
    "KSigma2": (-4, False),
    "KSigma4_seam": (-8, False),
    "KSigma4_delta": (-8, False),
    "ProductTorus41": (0, True),
    "ThetaSurg": (0, True),
}


@pytest.mark.parametrize("cid", CONSTRUCTIONS)
def test_topology(cid):
    m = build(cid).mesh()
    assert m.is_closed()
    assert (m.euler_characteristic, m.orientable()) == TOPOLOGY[cid]


def test_gamma_encloses_requested_area():
    g = GammaCurve()
    assert g.enclosed_area() == pytest.approx(1.0, abs=1e-12)
    s = np.linspace(0, 2 * np.pi, 501)
    r = np.abs(g(s))
    assert r.min() == pytest.approx(g.rho_min, abs=1e-12)
    assert r.max() ** 2 == pytest.approx(g.rho_max_sq, abs=1e-12)
    assert np.all(g(s[:250]).imag >= -1e-15)


def _moments(patch, n=33):
    U, V = patch.grid_params((n, n))
    return moment_map(CP2_SPACE, patch.homogeneous(U, V)).reshape(-1, 2)


def test_moment_images():
    g = GammaCurve()
    mc = _moments(modified_chekanov_patch(g)).sum(axis=1)
    assert mc.min() >= np.pi * g.rho_min ** 2 - 1e-9
    assert mc.max() <= np.pi * g.rho_max_sq + 1e-9
    cs = _moments(chekanov_schlenk_patch(g))
    assert np.max(np.abs(cs[:, 0] - cs[:, 1])) <= 1e-12
    assert np.allclose(_moments(clifford_patch()), 1.0, atol=1e-12)


def test_transverse_intersections():
    kinds = sorted(c["kind"] for c in transverse_intersection(CP2_SPACE, build("KSigma2").meta["diag"]))
    assert kinds == ["point"] * 3
    kinds = sorted(c["kind"] for c in transverse_intersection(CP2_SPACE, build("ThetaSurg").meta["diag"]))
    assert kinds == ["circle", "point"]
    kinds = [c["kind"] for c in
             transverse_intersection(PRODUCT_SPACE, build("ProductTorus41").meta["diag"])]
    assert sorted(kinds) == ["circle", "circle"]


def test_eight_preimages_lie_on_modified_chekanov_torus():
    g = GammaCurve()
    atlas = LagrangianAtlas(CP2_SPACE, [modified_chekanov_patch(g)])
    rng = np.random.default_rng(7)
    for s, th in rng.uniform(0, 2 * np.pi, size=(3, 2)):
        pre = eight_preimages(s, th, g)
        assert len(pre) == 8
        for _, a in pre:
            assert nearest_point(atlas, action_angle_point(a))[0] <= 1e-8


def test_preimage_gaps_shrink():
    gaps = [preimage_gaps(s, 0.7).max() for s in (0.8, 0.4, 0.2, 0.1, 0.05)]
    assert all(b < a for a, b in zip(gaps, gaps[1:]))


def test_rotation_preserves_theta_surg_equation():
    R = rotation_ch(0.3)
    assert np.allclose(R @ R.conj().T, np.eye(3))
    assert np.allclose(R[2], [0, 0, 1])


def test_handles_sit_inside_chopped_polytope():
    for cid in ("KSigma2", "KSigma4_delta", "ProductTorus41", "ThetaSurg"):
        atlas = build(cid)
        assert len(polytope_cuts(atlas)) > 0
        assert chopped_polytope_margin(atlas) >= 0


@pytest.mark.parametrize("cid", ["KSigma4_delta", "ThetaSurg"])
def test_delta_shrinks_with_lambda(cid):
    deltas = [predicted_delta(cid, lam=lam) for lam in (0.05, 0.025, 0.0125)]
    assert all(d > 0 for d in deltas)
    for a, b in zip(deltas, deltas[1:]):
        # the handle corrections scale with lambda squared to leading order
        assert b == pytest.approx(a / 4, rel=1e-3)


@pytest.mark.parametrize("cid,params", [
    ("NoSuchThing", {}),
    ("KSigma2", {"lam": -1.0}),
    ("KSigma2", {"delta": 0.1}),
    ("KSigma4_delta", {"delta": 1.0}),
    ("Clifford", {"colour": "red"}),
    ("Clifford", {"gamma": GammaCurve()}),
])
def test_inadmissible_parameters(cid, params):
    with pytest.raises(InadmissibleParameters):
        build(cid, **params)
