"""CP^2 and CP^1 x CP^1 with their affine charts, moment maps and the
Fubini-Study form.

Homogeneous points are complex arrays with trailing dimension 3 (CP^2) or
4 (CP^1 x CP^1, ordered ``z0, z1, w0, w1``).  Chart coordinates are complex
arrays with trailing dimension 2.  Real tangent vectors use the ordering
``(x0, y0, x1, y1)``.

A chart is a tuple of pivot indices.  For CP^2 it is ``(p,)`` and the chart
coordinates are ``z_j / z_p`` for the remaining ``j`` in increasing order.
For CP^1 x CP^1 it is ``(a, b)`` with coordinates
``(z_{1-a} / z_a, w_{1-b} / w_b)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import OutsidePolytopeInterior, ProjectionOutsideChart

CP2 = "CP2"
CP1xCP1 = "CP1xCP1"

# real basis of C^2 in the (x0, y0, x1, y1) ordering
_REAL_BASIS = np.array([[1, 1j, 0, 0], [0, 0, 1, 1j]], dtype=complex)


@dataclass(frozen=True)
class AmbientSpace:
    kind: str
    line_area: float = field(init=False)

    def __post_init__(self):
        if self.kind not in (CP2, CP1xCP1):
            raise ValueError(f"unknown ambient kind {self.kind!r}")
        object.__setattr__(self, "line_area", 3.0 if self.kind == CP2 else 2.0)

    @property
    def n_homogeneous(self) -> int:
        return 3 if self.kind == CP2 else 4

    @property
    def factors(self) -> tuple[slice, ...]:
        """Slices of the homogeneous vector forming the projective factors."""
        if self.kind == CP2:
            return (slice(0, 3),)
        return (slice(0, 2), slice(2, 4))

    @property
    def coordinate_groups(self) -> tuple[tuple[int, ...], ...]:
        """Chart coordinates that belong to the same projective factor."""
        return ((0, 1),) if self.kind == CP2 else ((0,), (1,))

    @property
    def chart_list(self) -> list[tuple[int, ...]]:
        if self.kind == CP2:
            return [(0,), (1,), (2,)]
        return [(a, b) for a in (0, 1) for b in (0, 1)]

    @property
    def polytope_vertices(self) -> np.ndarray:
        a = self.line_area
        if self.kind == CP2:
            return np.array([[0.0, 0.0], [a, 0.0], [0.0, a]])
        return np.array([[0.0, 0.0], [a, 0.0], [a, a], [0.0, a]])

    def line_index(self, name: str) -> int:
        """Homogeneous index of a coordinate line given as e.g. ``"z0"``."""
        names = ["z0", "z1", "z2"] if self.kind == CP2 else ["z0", "z1", "w0", "w1"]
        return names.index(name)

    @property
    def line_names(self) -> list[str]:
        return ["z0", "z1", "z2"] if self.kind == CP2 else ["z0", "z1", "w0", "w1"]


CP2_SPACE = AmbientSpace(CP2)
PRODUCT_SPACE = AmbientSpace(CP1xCP1)


def space_of(kind: str) -> AmbientSpace:
    return CP2_SPACE if kind == CP2 else PRODUCT_SPACE


# ----------------------------------------------------------------------------
# real/complex conversions


def to_real(z: np.ndarray) -> np.ndarray:
    """(..., 2) complex -> (..., 4) real in (x0, y0, x1, y1) order."""
    z = np.asarray(z, dtype=complex)
    out = np.empty(z.shape[:-1] + (4,))
    out[..., 0::2] = z.real
    out[..., 1::2] = z.imag
    return out


def to_complex(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return x[..., 0::2] + 1j * x[..., 1::2]


# ----------------------------------------------------------------------------
# charts


def _chart_layout(space: AmbientSpace, chart: tuple[int, ...]):
    """Return (pivot homogeneous indices, [(coord index, homog index, pivot)])."""
    if space.kind == CP2:
        (p,) = chart
        rest = [j for j in range(3) if j != p]
        return (p,), [(0, rest[0], p), (1, rest[1], p)]
    a, b = chart
    return (a, 2 + b), [(0, 1 - a, a), (1, 2 + (1 - b), 2 + b)]


def chart_embed(space: AmbientSpace, chart, coords) -> np.ndarray:
    """Homogeneous representative of a chart point (pivots set to 1)."""
    coords = np.asarray(coords, dtype=complex)
    h = np.zeros(coords.shape[:-1] + (space.n_homogeneous,), dtype=complex)
    pivots, layout = _chart_layout(space, tuple(chart))
    for p in pivots:
        h[..., p] = 1.0
    for ci, hi, _ in layout:
        h[..., hi] = coords[..., ci]
    return h


def chart_project(space: AmbientSpace, h, chart) -> np.ndarray:
    """Chart coordinates of homogeneous points; raises when a pivot vanishes."""
    h = np.asarray(h, dtype=complex)
    pivots, layout = _chart_layout(space, tuple(chart))
    for p, sl in zip(pivots, space.factors):
        scale = np.linalg.norm(h[..., sl], axis=-1)
        if np.any(np.abs(h[..., p]) <= 1e-15 * scale):
            raise ProjectionOutsideChart(f"pivot coordinate {p} vanishes in chart {chart}")
    out = np.empty(h.shape[:-1] + (2,), dtype=complex)
    for ci, hi, p in layout:
        out[..., ci] = h[..., hi] / h[..., p]
    return out


def in_chart(space: AmbientSpace, h, chart, rel_tol: float = 1e-12) -> np.ndarray:
    h = np.asarray(h, dtype=complex)
    pivots, _ = _chart_layout(space, tuple(chart))
    ok = np.ones(h.shape[:-1], dtype=bool)
    for p, sl in zip(pivots, space.factors):
        ok &= np.abs(h[..., p]) > rel_tol * np.linalg.norm(h[..., sl], axis=-1)
    return ok


def transition(space: AmbientSpace, src, dst, coords) -> np.ndarray:
    return chart_project(space, chart_embed(space, src, coords), dst)


def normalize(space: AmbientSpace, h) -> np.ndarray:
    """Unit-norm representative in each projective factor."""
    h = np.array(h, dtype=complex)
    for sl in space.factors:
        h[..., sl] /= np.linalg.norm(h[..., sl], axis=-1, keepdims=True)
    return h


def projector_features(space: AmbientSpace, h) -> np.ndarray:
    """Real feature vector of the orthogonal projector onto each factor line.

    The map is injective on projective points, so Euclidean distances
    between features give a scale- and phase-free comparison.
    """
    h = normalize(space, h)
    feats = []
    for sl in space.factors:
        v = h[..., sl]
        p = v[..., :, None] * v[..., None, :].conj()
        n = v.shape[-1]
        feats.append(p.real.reshape(p.shape[:-2] + (n * n,)))
        feats.append(p.imag.reshape(p.shape[:-2] + (n * n,)))
    return np.concatenate(feats, axis=-1)


def projective_distance(space: AmbientSpace, a, b) -> np.ndarray:
    """Chordal distance; per factor this is sin of the Fubini-Study angle."""
    d = projector_features(space, a) - projector_features(space, b)
    return np.linalg.norm(d, axis=-1) / np.sqrt(2.0)


def points_equal(space: AmbientSpace, a, b, tol: float = 1e-12) -> bool:
    """Projective equality: scale the largest coordinate of each factor to 1."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    for sl in space.factors:
        fa, fb = a[sl], b[sl]
        if not np.any(fa) or not np.any(fb):
            raise ValueError("all coordinates of a projective factor vanish")
        k = int(np.argmax(np.abs(fa)))
        if fb[k] == 0:
            return False
        if np.max(np.abs(fa / fa[k] - fb / fb[k])) > tol:
            return False
    return True


# ----------------------------------------------------------------------------
# moment map


def moment_map(space: AmbientSpace, h) -> np.ndarray:
    h = np.asarray(h, dtype=complex)
    a2 = np.abs(h) ** 2
    if space.kind == CP2:
        s = a2.sum(axis=-1)
        return 3.0 * np.stack([a2[..., 0] / s, a2[..., 1] / s], axis=-1)
    sz = a2[..., 0] + a2[..., 1]
    sw = a2[..., 2] + a2[..., 3]
    return 2.0 * np.stack([a2[..., 0] / sz, a2[..., 2] / sw], axis=-1)


@dataclass(frozen=True)
class ActionAngleCoords:
    """Action coordinates in moment units and two angles.

    ``angle_origin`` shifts where angle zero sits: the represented
    homogeneous coordinate has phase ``theta_j - angle_origin``.
    """

    x: tuple[float, float]
    theta: tuple[float, float]
    angle_origin: float = 0.0


def from_action_angle(space: AmbientSpace, a: ActionAngleCoords) -> np.ndarray:
    x0, x1 = a.x
    ph = np.exp(1j * (np.asarray(a.theta, dtype=float) - a.angle_origin))
    if space.kind == CP2:
        rest = 3.0 - x0 - x1
        if min(x0, x1, rest) <= 0:
            raise OutsidePolytopeInterior(f"{a.x} is not interior to the triangle")
        return np.array([np.sqrt(x0) * ph[0], np.sqrt(x1) * ph[1], np.sqrt(rest)])
    if not (0 < x0 < 2 and 0 < x1 < 2):
        raise OutsidePolytopeInterior(f"{a.x} is not interior to the square")
    return np.array([np.sqrt(x0) * ph[0], np.sqrt(2 - x0), np.sqrt(x1) * ph[1], np.sqrt(2 - x1)])


# ----------------------------------------------------------------------------
# Fubini-Study form in a chart
#
# omega = (A/pi) * (i/2) d d-bar log(1 + |z|^2) per projective factor, which
# gives every projective line area A.  All charts share the same formula.


def fs_hermitian(space: AmbientSpace, coords) -> np.ndarray:
    """Hermitian matrix H with omega(u, v) = Im(u^H H v)."""
    z = np.asarray(coords, dtype=complex)
    c = space.line_area / np.pi
    if space.kind == CP2:
        q = 1.0 + np.sum(np.abs(z) ** 2, axis=-1)
        eye = np.eye(2)
        outer = z[..., :, None] * z[..., None, :].conj()
        return c * (q[..., None, None] * eye - outer) / (q**2)[..., None, None]
    H = np.zeros(z.shape[:-1] + (2, 2), dtype=complex)
    H[..., 0, 0] = c / (1 + np.abs(z[..., 0]) ** 2) ** 2
    H[..., 1, 1] = c / (1 + np.abs(z[..., 1]) ** 2) ** 2
    return H


def fubini_study(space: AmbientSpace, coords) -> np.ndarray:
    """The 4x4 antisymmetric matrix of omega in real chart coordinates."""
    H = fs_hermitian(space, coords)
    E = _REAL_BASIS
    W = np.einsum("ak,...ab,bl->...kl", E.conj(), H, E).imag
    return 0.5 * (W - np.swapaxes(W, -1, -2))


def primitive(space: AmbientSpace, coords) -> np.ndarray:
    """Covector of a primitive 1-form lambda with d(lambda) = omega."""
    z = np.asarray(coords, dtype=complex)
    c = space.line_area / (2 * np.pi)
    if space.kind == CP2:
        q = 1.0 + np.sum(np.abs(z) ** 2, axis=-1)
        q = np.stack([q, q], axis=-1)
    else:
        q = 1.0 + np.abs(z) ** 2
    out = np.empty(z.shape[:-1] + (4,))
    out[..., 0::2] = -c * z.imag / q
    out[..., 1::2] = c * z.real / q
    return out


def omega_pair(space: AmbientSpace, coords, u, v) -> np.ndarray:
    """omega(u, v) for real tangent vectors u, v at chart points."""
    return np.einsum("...k,...kl,...l->...", u, fubini_study(space, coords), v)


def fs_frame_matrix(space: AmbientSpace, coords) -> np.ndarray:
    """Hermitian square root B of H, so that v -> B v is a unitary and
    symplectic identification of the tangent space with standard C^2."""
    H = fs_hermitian(space, coords)
    w, V = np.linalg.eigh(H)
    return np.einsum("...ij,...j,...kj->...ik", V, np.sqrt(w), V.conj())


# ----------------------------------------------------------------------------
# radial Darboux chart
#
# z = w / sqrt(A/pi - |w|^2) (per factor) pulls omega back to the standard
# form of C^2.  It commutes with U(2) (resp. U(1) x U(1)) and preserves every
# real cone through the origin, in particular all linear Lagrangians.


def _groups(space: AmbientSpace):
    return space.coordinate_groups


def darboux_to_chart(space: AmbientSpace, w) -> np.ndarray:
    w = np.asarray(w, dtype=complex)
    c = space.line_area / np.pi
    z = np.empty_like(w)
    for g in _groups(space):
        s = np.sum(np.abs(w[..., list(g)]) ** 2, axis=-1)
        if np.any(s >= c):
            raise ValueError("point outside the Darboux ball")
        z[..., list(g)] = w[..., list(g)] / np.sqrt(c - s)[..., None]
    return z


def chart_to_darboux(space: AmbientSpace, z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    c = space.line_area / np.pi
    w = np.empty_like(z)
    for g in _groups(space):
        q = 1.0 + np.sum(np.abs(z[..., list(g)]) ** 2, axis=-1)
        w[..., list(g)] = z[..., list(g)] * np.sqrt(c / q)[..., None]
    return w


def darboux_jacobian(space: AmbientSpace, w) -> np.ndarray:
    """Real 4x4 derivative of darboux_to_chart."""
    w = np.asarray(w, dtype=complex)
    c = space.line_area / np.pi
    r = to_real(w)
    J = np.zeros(w.shape[:-1] + (4, 4))
    for g in _groups(space):
        idx = [k for j in g for k in (2 * j, 2 * j + 1)]
        rg = r[..., idx]
        s = np.sum(rg**2, axis=-1)
        gval = (c - s) ** -0.5
        gder = 0.5 * (c - s) ** -1.5
        blk = gval[..., None, None] * np.eye(len(idx)) + 2 * gder[..., None, None] * (
            rg[..., :, None] * rg[..., None, :]
        )
        for a, ia in enumerate(idx):
            for b, ib in enumerate(idx):
                J[..., ia, ib] = blk[..., a, b]
    return J


def line_area_quadrature(space: AmbientSpace, line: str, n: int = 200) -> float:
    """Integrate omega over a full coordinate projective line.

    The line is written in a chart as ``{other coordinate = 0}`` and the
    affine coordinate is integrated over the plane with r = tan(sigma).
    """
    j = space.line_index(line)
    chart = _chart_containing_line(space, j)
    pivots, layout = _chart_layout(space, chart)
    # coordinate that parametrizes the line is the one whose homogeneous
    # index is not the vanishing one
    moving = [ci for ci, hi, _ in layout if hi != j]
    fixed = [ci for ci, hi, _ in layout if hi == j]
    ci = moving[0]
    xs, ws = np.polynomial.legendre.leggauss(n)
    sig = 0.25 * np.pi * (xs + 1)  # [0, pi/2)
    wsig = 0.25 * np.pi * ws
    phi = np.pi * (xs + 1)
    wphi = np.pi * ws
    S, P = np.meshgrid(sig, phi, indexing="ij")
    W = np.outer(wsig, wphi)
    r = np.tan(S)
    dr = 1.0 / np.cos(S) ** 2
    coords = np.zeros(S.shape + (2,), dtype=complex)
    coords[..., ci] = r * np.exp(1j * P)
    if space.kind == CP1xCP1 and fixed:
        coords[..., fixed[0]] = 0.0
    Om = fubini_study(space, coords)
    dens = Om[..., 2 * ci, 2 * ci + 1]
    return float(np.sum(W * dens * r * dr))


def _chart_containing_line(space: AmbientSpace, j: int):
    if space.kind == CP2:
        return ((j + 1) % 3,)
    # line z_a = 0 lies in charts with pivot 1-a on the first factor
    if j < 2:
        return (1 - j, 0)
    return (0, 1 - (j - 2))
