"""Catalog of constructions: reference tori, real surfaces and surgeries.

Every construction is returned as a :class:`LagrangianAtlas` whose
``meta`` dictionary records the data needed by the invariant computations
(handle specs, the phases of the second Lagrangian, tuned parameters).

Real faces are parametrized per chart.  A face without a hole is the
square ``[-1, 1]^2`` of the real chart plane, written as
``(tan u, tan v)`` with ``u, v in [-pi/4, pi/4]``.  A face with a hole is
the same square minus the Darboux image of the disk of radius ``rho``
around the origin, parametrized by ``(s, phi)`` with the boundary of the
hole at ``s = 0`` and the square boundary at ``s = 1``.  The phi grid is
chosen so that its corners match the tan grid of neighbouring faces.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ambient import (CP2_SPACE, PRODUCT_SPACE, AmbientSpace, ActionAngleCoords,
                      chart_project, darboux_jacobian, darboux_to_chart, from_action_angle,
                      moment_map, projective_distance)
from .errors import InadmissibleParameters
from .handle import HandleSpec, handle_patch
from .surfaces import LagrangianAtlas, Patch

CONSTRUCTIONS = (
    "Clifford", "ChekanovSchlenk", "ModifiedChekanov", "RealCP2", "RealProduct",
    "KSigma2", "KSigma4_seam", "KSigma4_delta", "ProductTorus41", "ThetaSurg",
)

# samples per edge of a square face; the annulus phi grid has 4 * (M - 1) cells
FACE_SAMPLES = 17
ANNULUS_RADIAL = 16
HANDLE_T = 64


def _real_pair(du, dv):
    out = np.empty(du.shape[:-1] + (4, 2))
    out[..., 0::2, 0] = du.real
    out[..., 1::2, 0] = du.imag
    out[..., 0::2, 1] = dv.real
    out[..., 1::2, 1] = dv.imag
    return out


def chart_phases(space: AmbientSpace, chart, diag) -> np.ndarray:
    """Chart-coordinate phases of the unitary ``diag`` acting on homogeneous
    coordinates."""
    d = np.asarray(diag, dtype=complex)
    if space.n_homogeneous == 3:
        (p,) = chart
        return np.array([d[j] / d[p] for j in range(3) if j != p])
    a, b = chart
    return np.array([d[1 - a] / d[a], d[2 + 1 - b] / d[2 + b]])


# ----------------------------------------------------------------------------
# real faces


def square_face(space: AmbientSpace, chart, phases=(1, 1), m: int = FACE_SAMPLES,
                name: str = "face") -> Patch:
    """``(u, v) -> phases * (tan u, tan v)`` on ``[-pi/4, pi/4]^2``."""
    ph = np.asarray(phases, dtype=complex)

    def func(u, v):
        return np.stack([np.tan(u) * ph[0], np.tan(v) * ph[1]], axis=-1)

    def jac(u, v):
        z = np.zeros_like(u)
        du = np.stack([ph[0] / np.cos(u) ** 2, z + 0j], axis=-1)
        dv = np.stack([z + 0j, ph[1] / np.cos(v) ** 2], axis=-1)
        return _real_pair(du, dv)

    q = np.pi / 4
    return Patch(space, tuple(chart), ((-q, q), (-q, q)), func, jac, (m, m), name)


def annulus_face(space: AmbientSpace, chart, rho: float, phases=(1, 1),
                 m: int = FACE_SAMPLES, ns: int = ANNULUS_RADIAL, name: str = "annulus") -> Patch:
    """Square face with the Darboux image of the rho-disk removed.

    ``(s, phi) -> phases * ((1 - s) * inner(phi) + s * outer(phi))`` where
    ``inner`` is the Darboux image of ``rho (cos phi, sin phi)`` and
    ``outer`` is the radial projection to the square boundary.
    """
    ph = np.asarray(phases, dtype=complex)

    def parts(phi):
        c, s = np.cos(phi), np.sin(phi)
        w = rho * np.stack([c, s], axis=-1)
        inner = darboux_to_chart(space, w + 0j).real
        dw = rho * np.stack([-s, c], axis=-1)
        dinner = np.einsum("...ij,...j->...i", darboux_jacobian(space, w + 0j)[..., 0::2, 0::2], dw)
        m_ = np.maximum(np.abs(c), np.abs(s))
        outer = np.stack([c, s], axis=-1) / m_[..., None]
        # derivative of (c, s) / max(|c|, |s|)
        use_c = np.abs(c) >= np.abs(s)
        dm = np.where(use_c, -np.sign(c) * s, np.sign(s) * c)
        douter = (np.stack([-s, c], axis=-1) * m_[..., None] - np.stack([c, s], axis=-1) * dm[..., None]) \
            / (m_ ** 2)[..., None]
        return inner, dinner, outer, douter

    def func(s, phi):
        inner, _, outer, _ = parts(phi)
        x = (1 - s)[..., None] * inner + s[..., None] * outer
        return x * ph

    def jac(s, phi):
        inner, dinner, outer, douter = parts(phi)
        ds = (outer - inner) * ph
        dp = ((1 - s)[..., None] * dinner + s[..., None] * douter) * ph
        return _real_pair(ds, dp)

    return Patch(space, tuple(chart), ((0.0, 1.0), (0.0, 2 * np.pi)), func, jac,
                 (ns, 4 * (m - 1) + 1), name)


# ----------------------------------------------------------------------------
# the curve gamma and the tori built from it


@dataclass(frozen=True)
class GammaCurve:
    """Closed curve ``gamma(s) = r(s) exp(i tau sin s)`` in the disk of
    radius ``sqrt(3 / pi)``.

    ``r(s) = m - d cos s`` runs between ``rho_min`` (at s = 0) and
    ``sqrt(rho_max_sq)`` (at s = pi).  The curve is symmetric under complex
    conjugation and stays in the upper half plane for ``s in [0, pi]``.
    The angle range ``tau`` is set from ``area``; see ``enclosed_area``.
    """

    rho_min: float = 0.1
    rho_max_sq: float = 0.93
    area: float = 1.0

    @property
    def rho_max(self) -> float:
        return float(np.sqrt(self.rho_max_sq))

    @property
    def tau(self) -> float:
        return 4.0 * self.area / (np.pi * (self.rho_max_sq - self.rho_min ** 2))

    def _r(self, s):
        m = 0.5 * (self.rho_max + self.rho_min)
        d = 0.5 * (self.rho_max - self.rho_min)
        return m - d * np.cos(s), d * np.sin(s)

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        r, _ = self._r(s)
        return r * np.exp(1j * self.tau * np.sin(s))

    def derivative(self, s):
        s = np.asarray(s, dtype=float)
        r, r1 = self._r(s)
        return (r1 + 1j * r * self.tau * np.cos(s)) * np.exp(1j * self.tau * np.sin(s))

    def enclosed_area(self, n: int = 400) -> float:
        xs, ws = np.polynomial.legendre.leggauss(n)
        s = np.pi * (xs + 1)
        g, g1 = self(s), self.derivative(s)
        return float(abs(np.pi * np.sum(ws * 0.5 * np.imag(np.conj(g) * g1))))


def _gamma_chart_factor(gamma: GammaCurve, s):
    """``gamma / sqrt(3/pi - |gamma|^2)`` and its s-derivative."""
    g, g1 = gamma(s), gamma.derivative(s)
    c = 3.0 / np.pi
    q = c - np.abs(g) ** 2
    f = g / np.sqrt(q)
    f1 = g1 / np.sqrt(q) + g * np.real(np.conj(g) * g1) / q ** 1.5
    return f, f1


def modified_chekanov_patch(gamma: GammaCurve, grid=(65, 65)) -> Patch:
    """``(theta, s) -> [cos theta gamma(s) : sin theta gamma(s) : sqrt(3/pi - |gamma|^2)]``."""

    def func(th, s):
        f, _ = _gamma_chart_factor(gamma, s)
        return np.stack([np.cos(th) * f, np.sin(th) * f], axis=-1)

    def jac(th, s):
        f, f1 = _gamma_chart_factor(gamma, s)
        dth = np.stack([-np.sin(th) * f, np.cos(th) * f], axis=-1)
        ds = np.stack([np.cos(th) * f1, np.sin(th) * f1], axis=-1)
        return _real_pair(dth, ds)

    return Patch(CP2_SPACE, (2,), ((0.0, 2 * np.pi), (0.0, 2 * np.pi)), func, jac, grid,
                 "theta-ch")


def chekanov_schlenk_patch(gamma: GammaCurve, grid=(65, 65)) -> Patch:
    """``(theta, s) -> [gamma e^{i theta} : gamma e^{-i theta} : sqrt(2 (3/pi - |gamma|^2))]``."""
    r2 = 1.0 / np.sqrt(2.0)

    def func(th, s):
        f, _ = _gamma_chart_factor(gamma, s)
        return np.stack([f * np.exp(1j * th), f * np.exp(-1j * th)], axis=-1) * r2

    def jac(th, s):
        f, f1 = _gamma_chart_factor(gamma, s)
        e, ebar = np.exp(1j * th), np.exp(-1j * th)
        dth = np.stack([1j * f * e, -1j * f * ebar], axis=-1) * r2
        ds = np.stack([f1 * e, f1 * ebar], axis=-1) * r2
        return _real_pair(dth, ds)

    return Patch(CP2_SPACE, (2,), ((0.0, 2 * np.pi), (0.0, 2 * np.pi)), func, jac, grid,
                 "theta-cs")


def clifford_patch(grid=(65, 65)) -> Patch:
    """``(a, b) -> [e^{ia} : e^{ib} : 1]`` (monotone Clifford torus)."""

    def func(a, b):
        return np.stack([np.exp(1j * a), np.exp(1j * b)], axis=-1)

    def jac(a, b):
        z = np.zeros_like(a) + 0j
        da = np.stack([1j * np.exp(1j * a), z], axis=-1)
        db = np.stack([z, 1j * np.exp(1j * b)], axis=-1)
        return _real_pair(da, db)

    return Patch(CP2_SPACE, (2,), ((0.0, 2 * np.pi), (0.0, 2 * np.pi)), func, jac, grid,
                 "clifford")


def eight_preimages(s: float, theta: float, gamma: GammaCurve | None = None):
    """The eight action-angle points lying over one point of the CS torus.

    Returns a list of ``ActionAngleCoords`` (angle origin pi/2) indexed by
    ``(sign, k, l)`` with sign in {+1, -1} and k, l in {0, 1}.
    """
    gamma = gamma or GammaCurve()
    g = complex(gamma(s))
    r, t = abs(g), float(np.angle(g))
    x = (np.pi * np.cos(theta) ** 2 * r ** 2, np.pi * np.sin(theta) ** 2 * r ** 2)
    out = []
    for sign in (1, -1):
        for k in (0, 1):
            for l in (0, 1):
                th = (sign * t + 0.5 * np.pi + k * np.pi, sign * t + 0.5 * np.pi + l * np.pi)
                out.append(((sign, k, l), ActionAngleCoords(x, th, 0.5 * np.pi)))
    return out


def action_angle_point(a: ActionAngleCoords) -> np.ndarray:
    return from_action_angle(CP2_SPACE, a)


# ----------------------------------------------------------------------------
# real surfaces


def real_atlas(space: AmbientSpace, diag=None, label: str = "") -> LagrangianAtlas:
    """Image of the real locus under the diagonal unitary ``diag``."""
    diag = np.ones(space.n_homogeneous) if diag is None else np.asarray(diag, complex)
    patches = [square_face(space, c, chart_phases(space, c, diag), name=f"face{c}")
               for c in space.chart_list]
    return LagrangianAtlas(space, patches, label, {"diag": diag})


# ----------------------------------------------------------------------------
# surgery at points


def point_surgery_atlas(space: AmbientSpace, diag, flips: dict, label: str,
                        handle_kwargs: dict | None = None, meta: dict | None = None,
                        angle_overrides: dict | None = None) -> LagrangianAtlas:
    """Resolve the transverse double points of ``RP`` and ``diag . RP`` at
    every chart origin.

    Parameters
    ----------
    diag : sequence of complex
        Diagonal unitary carrying the real locus to the second Lagrangian.
    flips : dict
        ``chart -> (bool, bool)``.  The handle angle in chart coordinate j
        is the argument of the chart phase of ``diag``, plus pi when the
        flag is set.
    handle_kwargs : dict
        Extra ``HandleSpec`` parameters (eps1, T, lam, eps, smooth).
    angle_overrides : dict, optional
        ``chart -> (theta0, theta1)`` replacing the derived handle angles.

    Raises
    ------
    AngleMismatch
        If a handle's two angles have different sines.
    """
    handle_kwargs = dict(handle_kwargs or {})
    angle_overrides = {tuple(k): v for k, v in (angle_overrides or {}).items()}
    patches, handles = [], {}
    for c in space.chart_list:
        ph = chart_phases(space, c, diag)
        fl = flips[tuple(c)]
        angles = tuple(float(np.mod(np.angle(ph[j]) + (np.pi if fl[j] else 0.0), 2 * np.pi))
                       for j in range(2))
        angles = tuple(angle_overrides.get(tuple(c), angles))
        spec = HandleSpec(float(angles[0]), float(angles[1]), **handle_kwargs)
        spec.validate()
        handles[tuple(c)] = spec
        rho = spec.edge_radius
        patches.append(annulus_face(space, c, rho, (1, 1), name=f"L0{c}"))
        patches.append(annulus_face(space, c, rho, ph, name=f"L1{c}"))
        nphi = 4 * (FACE_SAMPLES - 1) + 1
        patches.append(handle_patch(space, c, spec, (HANDLE_T, nphi), name=f"H{c}"))
    m = {"diag": np.asarray(diag, complex), "handles": handles, "flips": dict(flips)}
    m.update(meta or {})
    return LagrangianAtlas(space, patches, label, m)


def ksigma2(angle_overrides=None, **handle_kwargs) -> LagrangianAtlas:
    """Surgery of RP^2 and a diagonal rotation of it at their three common
    points; the result is a Klein-type surface of Euler characteristic -4."""
    diag = np.exp(1j * np.array([np.pi / 3, -np.pi / 3, 0.0]))
    flips = {(2,): (False, True), (1,): (False, False), (0,): (True, True)}
    return point_surgery_atlas(CP2_SPACE, diag, flips, "KSigma2", handle_kwargs,
                               angle_overrides=angle_overrides)


def ksigma4_seam(angle_overrides=None, **handle_kwargs) -> LagrangianAtlas:
    """Surgery of the real torus in CP^1 x CP^1 with its rotation by
    ``([i x0 : x1], [i u0 : u1])``, handles chosen so that each line meets
    the seam in one circle."""
    diag = np.array([1j, 1, 1j, 1])
    flips = {(1, 1): (False, False), (0, 1): (True, False), (1, 0): (False, True),
             (0, 0): (True, True)}
    return point_surgery_atlas(PRODUCT_SPACE, diag, flips, "KSigma4_seam", handle_kwargs,
                               angle_overrides=angle_overrides)


def ksigma4_delta(delta: float = 0.0, angle_overrides=None, **handle_kwargs) -> LagrangianAtlas:
    """Surgery of the real torus with its rotation by
    ``beta = pi/2 + delta`` in both factors; every line meets the seam in
    two circles."""
    beta = 0.5 * np.pi + delta
    e = np.exp(1j * beta)
    diag = np.array([e, 1, e, 1])
    flips = {(1, 1): (False, False), (0, 1): (False, True), (1, 0): (True, False),
             (0, 0): (True, True)}
    return point_surgery_atlas(PRODUCT_SPACE, diag, flips, "KSigma4_delta", handle_kwargs,
                               {"delta": float(delta)}, angle_overrides)


# ----------------------------------------------------------------------------
# surgery along isotropic circles


def polar_annulus(space: AmbientSpace, chart, r0: float, r1: float, phases=(1, 1),
                  nphi: int = 4 * (FACE_SAMPLES - 1), ns: int = 2 * ANNULUS_RADIAL,
                  name: str = "polar-annulus") -> Patch:
    """``(s, phi) -> phases * r0^(1-s) r1^s (cos phi, sin phi)``."""
    ph = np.asarray(phases, dtype=complex)
    L = np.log(r1 / r0)

    def func(s, phi):
        r = r0 * np.exp(s * L)
        return np.stack([r * np.cos(phi), r * np.sin(phi)], axis=-1) * ph

    def jac(s, phi):
        r = r0 * np.exp(s * L)
        ds = L * np.stack([r * np.cos(phi), r * np.sin(phi)], axis=-1) * ph
        dp = np.stack([-r * np.sin(phi), r * np.cos(phi)], axis=-1) * ph
        return _real_pair(ds + 0j, dp + 0j)

    return Patch(space, tuple(chart), ((0.0, 1.0), (0.0, 2 * np.pi)), func, jac, (ns, nphi + 1), name)


def theta_surg(delta: float = 0.0, eps1: float = float(np.exp(-5.0)), T: float = 4.0,
               lam: float = 0.05) -> LagrangianAtlas:
    """Surgery of RP^2 and its rotation by ``alpha = 2 pi / 3 + delta`` on
    the first two homogeneous coordinates.

    The two meet at ``[0:0:1]`` and along the circle ``z2 = 0``.  The point
    is resolved by a handle with both angles alpha; the circle by the
    fibrewise handle of :mod:`lagsurgery.bundle_surgery`.  The result is a
    torus invariant under real rotations of ``(z0, z1)``.
    """
    from .bundle_surgery import MOEBIUS, THETA_CIRCLE, CircleBundleSpec, global_handle

    alpha = 2 * np.pi / 3 + delta
    if not (0 < alpha < np.pi):
        raise InadmissibleParameters(f"alpha = {alpha} outside (0, pi)")
    spec = HandleSpec(alpha, alpha, eps1=eps1, T=T, lam=lam)
    spec.validate()
    bspec = CircleBundleSpec(THETA_CIRCLE, MOEBIUS, float(np.mod(-alpha, 2 * np.pi)), eps1, T, lam)
    rho = spec.edge_radius
    r0 = float(darboux_to_chart(CP2_SPACE, np.array([rho, 0.0]) + 0j)[0].real)
    r1 = 1.0 / bspec.edge_radius
    ph = np.exp(1j * np.array([alpha, alpha]))
    nphi = 4 * (FACE_SAMPLES - 1)
    patches = [
        polar_annulus(CP2_SPACE, (2,), r0, r1, (1, 1), nphi, name="L0"),
        polar_annulus(CP2_SPACE, (2,), r0, r1, ph, nphi, name="L1"),
        handle_patch(CP2_SPACE, (2,), spec, (HANDLE_T, nphi + 1), name="H-point"),
    ] + global_handle(bspec, HANDLE_T, nphi)
    meta = {"delta": float(delta), "alpha": float(alpha), "diag": np.array([ph[0], ph[1], 1]),
            "handles": {(2,): spec}, "bundle": bspec, "annulus_radii": (r0, r1)}
    return LagrangianAtlas(CP2_SPACE, patches, "ThetaSurg", meta)


def _curve_times_rp1(space, a, curve, dcurve, domain, ns, name):
    """Patches ``(u, v) -> (curve(u), tan v)`` in charts ``(a, 0)`` and ``(a, 1)``."""
    q = np.pi / 4
    out = []
    for b in (0, 1):
        def func(u, v):
            return np.stack([curve(u), np.tan(v) + 0j], axis=-1)

        def jac(u, v):
            z = np.zeros_like(u) + 0j
            du = np.stack([dcurve(u), z], axis=-1)
            dv = np.stack([z, 1 / np.cos(v) ** 2 + 0j], axis=-1)
            return _real_pair(du, dv)

        out.append(Patch(space, (a, b), (domain, (-q, q)), func, jac, (ns, FACE_SAMPLES),
                         f"{name}{b}"))
    return out


def product_torus41(eps1: float = float(np.exp(-5.0)), T: float = 4.0,
                    lam: float = 0.05) -> LagrangianAtlas:
    """Bundle surgery of ``RP^1 x RP^1`` and ``(i RP^1) x RP^1`` along both
    circles of intersection; the result is ``C x RP^1`` with ``C`` a circle
    in the first factor splitting it into two disks of area 1."""
    from .bundle_surgery import (PRODUCT_CIRCLE, PRODUCT_CIRCLE_PRIME, TRIVIAL, CircleBundleSpec,
                                 global_handle)

    nphi = 4 * (FACE_SAMPLES - 1)
    specs = {c: CircleBundleSpec(c, TRIVIAL, 0.5 * np.pi, eps1, T, lam)
             for c in (PRODUCT_CIRCLE, PRODUCT_CIRCLE_PRIME)}
    rho = specs[PRODUCT_CIRCLE].edge_radius
    L = np.log(rho)
    patches = global_handle(specs[PRODUCT_CIRCLE], HANDLE_T, nphi)
    patches += global_handle(specs[PRODUCT_CIRCLE_PRIME], HANDLE_T, nphi)
    for unit, tag in ((1, "L0+"), (-1, "L0-"), (1j, "L1+"), (-1j, "L1-")):
        def curve(u, unit=unit):
            return unit * np.exp((1 - 2 * u) * L)

        def dcurve(u, unit=unit):
            return -2 * L * unit * np.exp((1 - 2 * u) * L)

        patches += _curve_times_rp1(PRODUCT_SPACE, 1, curve, dcurve, (0.0, 1.0),
                                    2 * ANNULUS_RADIAL, tag)
    meta = {"diag": np.array([1j, 1, 1, 1]), "bundles": specs, "edge_radius": rho}
    return LagrangianAtlas(PRODUCT_SPACE, patches, "ProductTorus41", meta)


# ----------------------------------------------------------------------------
# polytope cuts


def _vertex_form(space: AmbientSpace, chart):
    """Linear form ``(cx, cy, c0)`` giving the moment distance (sum over
    factors) from the polytope vertex of ``chart``."""
    if space.n_homogeneous == 3:
        (p,) = chart
        return {2: (1.0, 1.0, 0.0), 0: (-1.0, 0.0, 3.0), 1: (0.0, -1.0, 3.0)}[p]
    a, b = chart
    cx, c0 = (1.0, 0.0) if a == 1 else (-1.0, 2.0)
    cy, c1 = (1.0, 0.0) if b == 1 else (-1.0, 2.0)
    return (cx, cy, c0 + c1)


def cut_radius(spec: HandleSpec) -> float:
    """Smallest Darboux radius reached by a point handle."""
    k = spec.lam * spec.eps1
    return k * float(min(np.sqrt(2 * (1 - abs(np.cos(spec.theta0)))),
                         np.sqrt(2 * (1 - abs(np.cos(spec.theta1))))))


def polytope_cuts(atlas: LagrangianAtlas) -> list:
    """Half-planes ``cx * x + cy * y + c0 >= kappa`` of the chopped polytope.

    Point handles cut the vertex of their chart at the moment distance
    ``pi r^2`` of their smallest Darboux radius ``r``.  Bundle handles cut
    the edge carrying the isotropic circle at the moment value of their
    smallest fibre radius.
    """
    m = atlas.meta
    space = atlas.space
    cuts = []
    for chart, spec in m.get("handles", {}).items():
        cuts.append({"name": f"vertex{chart}", "form": _vertex_form(space, chart),
                     "kappa": np.pi * cut_radius(spec) ** 2})
    if "bundle" in m:
        r = m["bundle"].cut_radius
        cuts.append({"name": "edge z2=0", "form": (-1.0, -1.0, 3.0),
                     "kappa": 3 * r ** 2 / (1 + r ** 2)})
    for name, spec in m.get("bundles", {}).items():
        r = spec.cut_radius
        form = (1.0, 0.0, 0.0) if name.startswith("[0:1]") else (-1.0, 0.0, 2.0)
        cuts.append({"name": f"edge {name}", "form": form, "kappa": 2 * r ** 2 / (1 + r ** 2)})
    return cuts


def chopped_polytope_margin(atlas: LagrangianAtlas, refine: int = 1) -> float:
    """Minimum over all samples of ``form(moment) - kappa`` over the cuts.

    Nonnegative (up to roundoff) when the moment image lies in the chopped
    polytope; ``inf`` for constructions without cuts.
    """
    cuts = polytope_cuts(atlas)
    if not cuts:
        return float("inf")
    worst = np.inf
    for p in atlas.patches:
        U, V = p.grid_params(None, refine)
        x = moment_map(atlas.space, p.homogeneous(U, V))
        for c in cuts:
            cx, cy, c0 = c["form"]
            worst = min(worst, float(np.min(cx * x[..., 0] + cy * x[..., 1] + c0 - c["kappa"])))
    return worst


def chopped_polygon(atlas: LagrangianAtlas) -> np.ndarray:
    """Vertices of the polytope clipped by every cut half-plane."""
    poly = [tuple(v) for v in atlas.space.polytope_vertices]
    for c in polytope_cuts(atlas):
        cx, cy, c0 = c["form"]

        def f(pt):
            return cx * pt[0] + cy * pt[1] + c0 - c["kappa"]

        out = []
        for k in range(len(poly)):
            a, b = poly[k], poly[(k + 1) % len(poly)]
            fa, fb = f(a), f(b)
            if fa >= 0:
                out.append(a)
            if fa * fb < 0:
                w = fa / (fa - fb)
                out.append((a[0] + w * (b[0] - a[0]), a[1] + w * (b[1] - a[1])))
        poly = out
    return np.array(poly)


def polytope_violation(atlas: LagrangianAtlas) -> float:
    """Largest excursion of sampled moment points outside the closed polytope."""
    space = atlas.space
    worst = -np.inf
    for _, _, H in atlas.sample():
        x = moment_map(space, H)
        if space.n_homogeneous == 3:
            v = np.max(np.stack([-x[..., 0], -x[..., 1], x[..., 0] + x[..., 1] - 3], -1))
        else:
            v = np.max(np.stack([-x[..., 0], -x[..., 1], x[..., 0] - 2, x[..., 1] - 2], -1))
        worst = max(worst, float(v))
    return worst


# ----------------------------------------------------------------------------
# intersections of RP and diag . RP


def transverse_intersection(space: AmbientSpace, diag) -> list:
    """Components of ``RP intersect diag . RP`` for a diagonal unitary.

    A real point ``x`` lies on ``diag . RP`` iff ``x_j x_k Im(conj(d_j) d_k)``
    vanishes for all j, k, so every component is the real locus on a
    coordinate support whose phases are pairwise real multiples.

    Returns
    -------
    list of dict
        ``{"support": tuple, "kind": "point" | "circle" | ..., "sample": h}``
        for each maximal support (per factor for the product).
    """
    d = np.asarray(diag, dtype=complex)

    def maximal(idx):
        cls = []
        for j in idx:
            for c in cls:
                if abs(np.imag(np.conj(d[c[0]]) * d[j])) < 1e-12:
                    c.append(j)
                    break
            else:
                cls.append([j])
        return [tuple(c) for c in cls]

    comps = []
    if space.n_homogeneous == 3:
        for sup in maximal(range(3)):
            h = np.zeros(3, complex)
            h[list(sup)] = 1.0
            kind = {1: "point", 2: "circle"}.get(len(sup), "surface")
            comps.append({"support": sup, "kind": kind, "sample": h})
        return comps
    for s1 in maximal(range(2)):
        for s2 in maximal(range(2, 4)):
            h = np.zeros(4, complex)
            h[list(s1)] = 1.0
            h[list(s2)] = 1.0
            dim = (len(s1) - 1) + (len(s2) - 1)
            comps.append({"support": s1 + s2, "kind": ("point", "circle", "surface")[dim], "sample": h})
    return comps


def rotation_ch(theta: float) -> np.ndarray:
    """Real rotation of the first two homogeneous coordinates of CP^2."""
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s, 0], [s, c, 0], [0, 0, 1]], dtype=complex)


def rho_ch_orbit_check(atlas: LagrangianAtlas, n_points: int = 1000, n_theta: int = 16,
                       seed: int = 0) -> dict:
    """Distance from rotated surface samples back to the surface.

    Returns ``{"max_deviation", "min_z2_ratio"}`` where the second entry is
    the smallest ``|z2| / |z|`` over the samples.
    """
    from .surfaces import nearest_point

    rng = np.random.default_rng(seed)
    pts = []
    for k in rng.integers(0, len(atlas.patches), n_points):
        p = atlas.patches[int(k)]
        (u0, u1), (v0, v1) = p.domain
        pts.append(p.homogeneous(np.array(rng.uniform(u0, u1)), np.array(rng.uniform(v0, v1))))
    pts = np.array(pts)
    z2 = float(np.min(np.abs(pts[:, 2]) / np.linalg.norm(pts, axis=1)))
    worst = 0.0
    for th in np.linspace(0, 2 * np.pi, n_theta, endpoint=False)[1:]:
        R = rotation_ch(th)
        for h in pts @ R.T:
            worst = max(worst, nearest_point(atlas, h)[0])
    return {"max_deviation": worst, "min_z2_ratio": z2}


# ----------------------------------------------------------------------------
# delta tuning


def predicted_delta(cid: str, **kwargs) -> float:
    """Closed-form delta from the measured handle corrections.

    For K#Sigma_4 the sector area is ``1/2 + delta / pi - 2 a``, giving
    ``delta = 2 pi a``.  For Theta_surg the sector area is
    ``1 + 3 delta / (2 pi) - a_point - a_bundle``, giving
    ``delta = (2 pi / 3) (a_point + a_bundle)``.
    """
    from .handle import measure_a_eps

    if cid == "KSigma4_delta":
        spec = ksigma4_delta(0.0, **kwargs).meta["handles"][(1, 1)]
        return 2 * np.pi * measure_a_eps(spec)
    if cid == "ThetaSurg":
        a_pt, a_b = theta_corrections(**kwargs)
        return 2 * np.pi / 3 * (a_pt + a_b)
    raise ValueError(f"no delta parameter for {cid}")


def theta_corrections(**kwargs):
    """Area lost to the point handle and to the bundle handle in the
    Theta_surg sector disk, at delta = 0."""
    from .handle import measure_a_eps

    A = theta_surg(0.0, **kwargs)
    a_pt = measure_a_eps(A.meta["handles"][(2,)])
    bspec = A.meta["bundle"]
    # the bundle handle in the line z0 = 0 is the curve zeta = 1 / W(t)
    from .invariants import _gauss

    tm = bspec.profile.t_max
    breaks = [-tm, -bspec.T, 0.0, bspec.T, tm]
    alpha = A.meta["alpha"]
    c = 3.0 / (2 * np.pi)
    lam_int = 0.0
    for lo, hi in zip(breaks[:-1], breaks[1:]):
        t, w = _gauss(200, lo, hi)
        W, W1 = bspec.fiber_curve(t)
        z, z1 = 1 / W, -W1 / W ** 2
        lam_int += float(np.sum(w * c * np.imag(np.conj(z) * z1) / (1 + np.abs(z) ** 2)))
    # lambda vanishes on radial rays, so lam_int is the area of the part of
    # the sector {0 < arg < alpha} lying on the side of the curve that
    # contains 0; the rest of the sector is the corner cut off by the handle.
    a_b = 3.0 * alpha / (2 * np.pi) - lam_int
    return a_pt, a_b


def measured_sector_area(cid: str, delta: float, **kwargs) -> float:
    from .invariants import boundary_area, ksigma4_sector_arcs, theta_disk_arcs

    if cid == "KSigma4_delta":
        A = ksigma4_delta(delta, **kwargs)
        return boundary_area(A.space, ksigma4_sector_arcs(A), (1, 1))
    if cid == "ThetaSurg":
        A = theta_surg(delta, **kwargs)
        return boundary_area(A.space, theta_disk_arcs(A), (2,))
    raise ValueError(f"no delta parameter for {cid}")


def tune_delta(cid: str, target_area: float | None = None, tol: float = 1e-12, **kwargs) -> float:
    """Root-find delta in (0, pi/4) so the sector disk has ``target_area``.

    Raises
    ------
    NoRoot
        If the area minus target does not change sign on the bracket.
    """
    from scipy.optimize import brentq

    from .errors import NoRoot

    target = {"KSigma4_delta": 0.5, "ThetaSurg": 1.0}[cid] if target_area is None else target_area

    def f(d):
        return measured_sector_area(cid, d, **kwargs) - target

    lo, hi = 0.0, np.pi / 4
    flo, fhi = f(lo), f(hi)
    if flo * fhi > 0:
        raise NoRoot(f"area - target has the same sign at delta = 0 ({flo:.3g}) and pi/4 ({fhi:.3g})")
    return float(brentq(f, lo, hi, xtol=tol))


def preimage_gaps(s: float, theta: float, gamma: GammaCurve | None = None) -> np.ndarray:
    """Angle gaps between the paired preimages ``A_{+1,k,l}`` and
    ``A_{-1,k,l}`` (one value per corner ``(k, l)``).

    Both points of a pair converge to the corner
    ``(pi/2 + k pi, pi/2 + l pi)`` of the angle square as s -> 0.
    """
    pts = dict(eight_preimages(s, theta, gamma))
    gaps = []
    for k in (0, 1):
        for l in (0, 1):
            a, b = np.array(pts[(1, k, l)].theta), np.array(pts[(-1, k, l)].theta)
            d = np.angle(np.exp(1j * (a - b)))
            gaps.append(float(np.hypot(*d)))
    return np.array(gaps)


# ----------------------------------------------------------------------------
# dispatcher


def build(cid: str, **params) -> LagrangianAtlas:
    """Build a catalog construction by name.

    Parameters
    ----------
    cid : str
        One of :data:`CONSTRUCTIONS`.
    **params
        ``gamma`` (a GammaCurve) for the tori built from gamma; ``delta``
        for KSigma4_delta and ThetaSurg (``"tuned"`` runs
        :func:`tune_delta`); HandleSpec overrides ``eps1``, ``T``, ``lam``;
        ``handle_angles`` (``chart -> (theta0, theta1)``) for the point
        surgeries.

    Raises
    ------
    InadmissibleParameters
        For unknown names or parameters outside their admissible range.
    """
    params = dict(params)
    if cid not in CONSTRUCTIONS:
        raise InadmissibleParameters(f"unknown construction {cid!r}")
    handle_keys = {k: params.pop(k) for k in ("eps1", "T", "lam") if k in params}
    for k, v in handle_keys.items():
        if not (np.isfinite(v) and v > 0):
            raise InadmissibleParameters(f"{k} must be positive, got {v}")
    if "delta" in params and cid not in ("KSigma4_delta", "ThetaSurg"):
        raise InadmissibleParameters(f"{cid} has no delta parameter")
    if "gamma" in params and cid not in ("ChekanovSchlenk", "ModifiedChekanov"):
        raise InadmissibleParameters(f"{cid} is not built from gamma")
    gamma = params.pop("gamma", None) or GammaCurve()
    delta = params.pop("delta", 0.0)
    angles = params.pop("handle_angles", None)
    if angles is not None and cid not in ("KSigma2", "KSigma4_seam", "KSigma4_delta"):
        raise InadmissibleParameters(f"{cid} has no point handles to override")
    if params:
        raise InadmissibleParameters(f"unused parameters {sorted(params)} for {cid}")
    if delta == "tuned":
        delta = tune_delta(cid, **handle_keys)
    if not (0.0 <= float(delta) < np.pi / 4):
        raise InadmissibleParameters(f"delta = {delta} outside [0, pi/4)")
    if cid == "Clifford":
        return LagrangianAtlas(CP2_SPACE, [clifford_patch()], cid)
    if cid == "ChekanovSchlenk":
        return LagrangianAtlas(CP2_SPACE, [chekanov_schlenk_patch(gamma)], cid, {"gamma": gamma})
    if cid == "ModifiedChekanov":
        return LagrangianAtlas(CP2_SPACE, [modified_chekanov_patch(gamma)], cid, {"gamma": gamma})
    if cid == "RealCP2":
        return real_atlas(CP2_SPACE, label=cid)
    if cid == "RealProduct":
        return real_atlas(PRODUCT_SPACE, label=cid)
    if cid == "KSigma2":
        return ksigma2(angles, **handle_keys)
    if cid == "KSigma4_seam":
        return ksigma4_seam(angles, **handle_keys)
    if cid == "KSigma4_delta":
        return ksigma4_delta(float(delta), angles, **handle_keys)
    if cid == "ProductTorus41":
        return product_torus41(**handle_keys)
    return theta_surg(float(delta), **handle_keys)
