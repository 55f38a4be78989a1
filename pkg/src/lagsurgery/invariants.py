"""Areas and Maslov indices of disks with boundary on a Lagrangian surface.

A boundary loop is described by a list of :class:`PathArc` objects, each a
straight segment in the parameter rectangle of one patch.  All points and
tangent vectors are carried to a single chart by the (holomorphic) chart
transition, so every computation happens in one trivialization.

Areas are computed twice: by Gauss quadrature of the Fubini-Study form over
cone pieces from a chart apex (:func:`symplectic_area`), and by integrating
the primitive ``lambda`` along the loop (:func:`boundary_area`).

The Maslov index of a loop of Lagrangian planes is the winding number of
``det(U)^2`` where the columns of ``U`` are an orthonormal basis of the
plane, taken after the Hermitian square root of the metric has carried the
tangent space to standard ``C^2``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .ambient import (AmbientSpace, _chart_layout, chart_embed, chart_project, fs_frame_matrix,
                      in_chart, omega_pair, primitive)
from .errors import (BoundaryMismatch, ChartOverflow, LagSurgeryError, NotLagrangianPlane,
                     SamplingTooCoarse)
from .surfaces import LagrangianAtlas, Patch


class ZeroMaslov(LagSurgeryError):
    """A disk with vanishing Maslov index cannot give a monotonicity ratio."""


# ----------------------------------------------------------------------------
# chart transport


def transition_jacobian(space: AmbientSpace, src, dst, z) -> np.ndarray:
    """Complex derivative of the chart transition ``src -> dst`` at ``z``.

    Every destination coordinate is a ratio ``h_num / h_den`` of homogeneous
    entries, each of which is either 1 or a source coordinate, so the
    derivative is exact.
    """
    z = np.asarray(z, dtype=complex)
    h = chart_embed(space, src, z)
    _, lay_src = _chart_layout(space, tuple(src))
    _, lay_dst = _chart_layout(space, tuple(dst))
    pos = {hi: ci for ci, hi, _ in lay_src}
    J = np.zeros(z.shape[:-1] + (2, 2), dtype=complex)
    for i, num, den in lay_dst:
        for hi, k in pos.items():
            d = 0.0
            if hi == num:
                d = d + 1.0 / h[..., den]
            if hi == den:
                d = d - h[..., num] / h[..., den] ** 2
            J[..., i, k] = d
    return J


def _to_complex_cols(J):
    """(..., 4, k) real -> (..., 2, k) complex."""
    return J[..., 0::2, :] + 1j * J[..., 1::2, :]


def _to_real_cols(C):
    out = np.empty(C.shape[:-2] + (4, C.shape[-1]))
    out[..., 0::2, :] = C.real
    out[..., 1::2, :] = C.imag
    return out


# ----------------------------------------------------------------------------
# loops


@dataclass
class PathArc:
    """Straight segment from ``start`` to ``end`` in a patch's parameters."""

    patch: Patch
    start: tuple
    end: tuple

    def params(self, s):
        s = np.asarray(s, dtype=float)
        u = self.start[0] + s * (self.end[0] - self.start[0])
        v = self.start[1] + s * (self.end[1] - self.start[1])
        return u, v

    def breaks(self) -> list:
        """Interior break fractions where the patch is only finitely smooth."""
        du = self.end[0] - self.start[0]
        out = []
        if du != 0:
            for b in self.patch.u_breaks:
                f = (b - self.start[0]) / du
                if 1e-12 < f < 1 - 1e-12:
                    out.append(f)
        return [0.0] + sorted(out) + [1.0]

    def evaluate(self, s, chart):
        """Chart points, tangent ``d/ds`` (complex) and full frames at ``s``."""
        p = self.patch
        u, v = self.params(s)
        z_src = p(u, v)
        Jp = p.jacobian(u, v)
        d = np.array([self.end[0] - self.start[0], self.end[1] - self.start[1]])
        frames_src = _to_complex_cols(Jp)
        tangent_src = frames_src @ d
        space = p.space
        if tuple(p.chart) == tuple(chart):
            return z_src, tangent_src, frames_src
        h = chart_embed(space, p.chart, z_src)
        if not np.all(in_chart(space, h, chart)):
            raise ChartOverflow(f"arc on {p.name} leaves chart {chart}")
        z = chart_project(space, h, chart)
        T = transition_jacobian(space, p.chart, chart, z_src)
        return z, np.einsum("...ij,...j->...i", T, tangent_src), T @ frames_src


@dataclass
class FrameLoop:
    """Sampled loop of Lagrangian planes in one chart.

    Attributes
    ----------
    space : AmbientSpace
    chart : tuple
    points : (N, 2) complex
    frames : (N, 4, 2) real
        Two real tangent vectors spanning the plane at each point.
    closed : bool
    arcs : list of PathArc
        Source description, kept for area computations (may be empty for
        synthetic loops).
    """

    space: AmbientSpace
    chart: tuple
    points: np.ndarray
    frames: np.ndarray
    closed: bool = True
    arcs: list = field(default_factory=list)

    def __add__(self, other: "FrameLoop") -> "FrameLoop":
        """Concatenation of two loops with a common base plane."""
        return FrameLoop(self.space, self.chart, np.concatenate([self.points, other.points[1:]]),
                         np.concatenate([self.frames, other.frames[1:]]), True,
                         self.arcs + other.arcs)


def frame_loop(space: AmbientSpace, arcs: list, chart, n_per_arc: int = 400,
               gap_tol: float = 1e-9) -> FrameLoop:
    """Sample a closed chain of arcs into a :class:`FrameLoop`.

    Raises
    ------
    BoundaryMismatch
        When consecutive arcs do not meet within ``gap_tol`` (chart distance)
        or the chain does not close.
    """
    pts, frs = [], []
    for k, arc in enumerate(arcs):
        s = np.linspace(0, 1, n_per_arc)
        z, _, F = arc.evaluate(s, chart)
        if pts:
            gap = float(np.max(np.abs(pts[-1][-1] - z[0])))
            if gap > gap_tol * max(1.0, float(np.max(np.abs(z[0])))):
                raise BoundaryMismatch(f"arcs {k - 1} and {k} are {gap:.3g} apart")
            z, F = z[1:], F[1:]
        pts.append(z)
        frs.append(_to_real_cols(F))
    P, F = np.concatenate(pts), np.concatenate(frs)
    gap = float(np.max(np.abs(P[0] - P[-1])))
    if gap > gap_tol * max(1.0, float(np.max(np.abs(P[0])))):
        raise BoundaryMismatch(f"loop does not close: gap {gap:.3g}")
    return FrameLoop(space, tuple(chart), P, F, True, list(arcs))


def unitary_loop(space: AmbientSpace, unitaries, chart=None) -> FrameLoop:
    """Synthetic loop of planes ``U(s) R^2`` at the chart origin."""
    U = np.asarray(unitaries, dtype=complex)
    chart = chart or space.chart_list[-1]
    pts = np.zeros((len(U), 2), dtype=complex)
    return FrameLoop(space, tuple(chart), pts, _to_real_cols(U), True)


def unitary_frames(loop: FrameLoop, tol: float = 1e-8) -> np.ndarray:
    """Unitary matrices whose columns are orthonormal bases of the planes."""
    space = loop.space
    z = loop.points
    F = loop.frames
    om = omega_pair(space, z, F[..., 0], F[..., 1])
    B = fs_frame_matrix(space, z)
    G = B @ _to_complex_cols(F)
    g1, g2 = G[..., 0], G[..., 1]
    scale = np.linalg.norm(g1, axis=-1) * np.linalg.norm(g2, axis=-1)
    if np.any(np.abs(om) > tol * scale):
        i = int(np.argmax(np.abs(om) / scale))
        raise NotLagrangianPlane(f"omega on frame {i} is {om[i] / scale[i]:.3g}")
    e1 = g1 / np.linalg.norm(g1, axis=-1, keepdims=True)
    g2 = g2 - np.real(np.sum(e1.conj() * g2, axis=-1, keepdims=True)) * e1
    e2 = g2 / np.linalg.norm(g2, axis=-1, keepdims=True)
    U = np.stack([e1, e2], axis=-1)
    err = np.max(np.abs(np.swapaxes(U.conj(), -1, -2) @ U - np.eye(2)))
    if err > tol:
        raise NotLagrangianPlane(f"orthonormalized frame is not unitary (defect {err:.3g})")
    return U


def maslov_winding(loop: FrameLoop) -> float:
    """Total change of ``arg det(U)^2`` divided by 2 pi (unrounded)."""
    U = unitary_frames(loop)
    d = np.linalg.det(U) ** 2
    steps = np.angle(d[1:] / d[:-1])
    if loop.closed:
        steps = np.append(steps, np.angle(d[0] / d[-1]))
    if np.any(np.abs(steps) >= 0.5 * np.pi):
        i = int(np.argmax(np.abs(steps)))
        raise SamplingTooCoarse(f"det^2 jumps by {steps[i]:.3g} at sample {i}")
    return float(np.sum(steps) / (2 * np.pi))


def maslov_index(loop: FrameLoop) -> int:
    """Maslov index of a closed loop of Lagrangian planes."""
    w = maslov_winding(loop)
    k = int(np.rint(w))
    if abs(w - k) >= 0.1:
        raise SamplingTooCoarse(f"winding {w:.4f} is not close to an integer")
    return k


# ----------------------------------------------------------------------------
# areas


@dataclass
class DiskPiece:
    """Cone from ``apex`` over one smooth sub-arc, in one chart."""

    arc: PathArc
    s_range: tuple
    apex: np.ndarray


@dataclass
class DiskChain:
    """Pieces whose boundaries add up to a loop on the Lagrangian."""

    space: AmbientSpace
    chart: tuple
    pieces: list
    arcs: list


def cone_chain(space: AmbientSpace, arcs: list, chart, apex=(0, 0)) -> DiskChain:
    """Disk chain of cones from ``apex`` over every smooth sub-arc.

    The interior rays from the apex to consecutive break points appear in
    two adjacent pieces with opposite orientation; this is checked.
    """
    apex = np.asarray(apex, dtype=complex)
    pieces = []
    for arc in arcs:
        b = arc.breaks()
        for lo, hi in zip(b[:-1], b[1:]):
            pieces.append(DiskPiece(arc, (lo, hi), apex))
    chain = DiskChain(space, tuple(chart), pieces, list(arcs))
    check_boundary_cancellation(chain)
    return chain


def check_boundary_cancellation(chain: DiskChain, tol: float = 1e-9) -> float:
    """Max mismatch between the end ray of each piece and the start ray of
    the next (cyclically)."""
    worst = 0.0
    n = len(chain.pieces)
    for k in range(n):
        a, b = chain.pieces[k], chain.pieces[(k + 1) % n]
        za, _, _ = a.arc.evaluate(np.array([a.s_range[1]]), chain.chart)
        zb, _, _ = b.arc.evaluate(np.array([b.s_range[0]]), chain.chart)
        gap = float(np.max(np.abs(za - zb)) / max(1.0, float(np.max(np.abs(za)))))
        worst = max(worst, gap)
    if worst > tol:
        raise BoundaryMismatch(f"interior rays do not cancel (gap {worst:.3g})")
    return worst


def _gauss(n, lo, hi):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (hi - lo) * x + 0.5 * (hi + lo), 0.5 * (hi - lo) * w


def symplectic_area(chain: DiskChain, n_s: int = 120, n_r: int = 80) -> float:
    """Integral of omega over the chain by tensor-product Gauss quadrature.

    The radial variable of each cone is substituted by
    ``r = tan(x atan R) / R`` with ``R = |gamma(s) - apex|`` so that nodes
    are spread evenly in the Fubini-Study distance from the apex.
    """
    space = chain.space
    total = 0.0
    xr, wr = _gauss(n_r, 0.0, 1.0)
    for piece in chain.pieces:
        s, ws = _gauss(n_s, *piece.s_range)
        g, g1, _ = piece.arc.evaluate(s, chain.chart)
        d = g - piece.apex
        R = np.maximum(np.linalg.norm(d, axis=-1), 1e-300)
        aR = np.arctan(R)
        X = xr[:, None] * aR[None, :]
        r = np.tan(X) / R[None, :]
        drdx = aR[None, :] / np.cos(X) ** 2 / R[None, :]
        z = piece.apex + r[..., None] * d[None, :, :]
        Dr = np.broadcast_to(d[None], z.shape)
        Ds = r[..., None] * g1[None, :, :]
        vr = np.concatenate([Dr.real[..., None], Dr.imag[..., None]], -1).reshape(z.shape[:-1] + (4,))
        vs = np.concatenate([Ds.real[..., None], Ds.imag[..., None]], -1).reshape(z.shape[:-1] + (4,))
        f = omega_pair(space, z, vr, vs) * drdx
        total += float(np.einsum("i,j,ij->", wr, ws, f))
    return total


def boundary_area(space: AmbientSpace, arcs: list, chart, n: int = 200) -> float:
    """Integral of the primitive ``lambda`` along the loop in ``chart``.

    Raises
    ------
    ChartOverflow
        If the loop leaves the chart.
    """
    total = 0.0
    for arc in arcs:
        b = arc.breaks()
        for lo, hi in zip(b[:-1], b[1:]):
            s, ws = _gauss(n, lo, hi)
            z, t, _ = arc.evaluate(s, chart)
            lam = primitive(space, z)
            tr = np.empty(t.shape[:-1] + (4,))
            tr[..., 0::2] = t.real
            tr[..., 1::2] = t.imag
            total += float(np.sum(ws * np.sum(lam * tr, axis=-1)))
    return total


# ----------------------------------------------------------------------------
# the loops of the constructions


def _patch(atlas: LagrangianAtlas, name: str) -> Patch:
    for p in atlas.patches:
        if p.name == name:
            return p
    raise KeyError(f"{atlas.label} has no patch {name!r}")


def _arcs(atlas, steps):
    return [PathArc(_patch(atlas, n), a, b) for n, a, b in steps]


HALF = 0.5 * np.pi
THREE_HALF = 1.5 * np.pi


def _tm(atlas, name):
    return _patch(atlas, name).domain[0][1]


def gamma_arcs(atlas: LagrangianAtlas) -> list:
    """Loop gamma of the K#Sigma_2 surface (in chart (2,)).

    It runs up the handle at [0:0:1], out along the second Lagrangian in
    the line z0 = 0, back down the handle at [0:1:0], in along the real
    locus, and closes by a half circle on the real locus around the hole
    at [0:0:1].
    """
    t1, t2 = _tm(atlas, "H(2,)"), _tm(atlas, "H(1,)")
    return _arcs(atlas, [
        ("H(2,)", (-t1, HALF), (t1, HALF)),
        ("L1(2,)", (0.0, THREE_HALF), (1.0, THREE_HALF)),
        ("L1(1,)", (1.0, THREE_HALF), (0.0, THREE_HALF)),
        ("H(1,)", (t2, THREE_HALF), (-t2, THREE_HALF)),
        ("L0(1,)", (0.0, THREE_HALF), (1.0, THREE_HALF)),
        ("L0(2,)", (1.0, THREE_HALF), (0.0, THREE_HALF)),
        ("L0(2,)", (0.0, THREE_HALF), (0.0, HALF)),
    ])


def ksigma2_seam_arcs(atlas: LagrangianAtlas) -> list:
    """The seam of K#Sigma_2 in the line z0 = 0 as a closed loop."""
    t1, t2 = _tm(atlas, "H(2,)"), _tm(atlas, "H(1,)")
    return _arcs(atlas, [
        ("H(2,)", (-t1, HALF), (t1, HALF)),
        ("L1(2,)", (0.0, THREE_HALF), (1.0, THREE_HALF)),
        ("L1(1,)", (1.0, THREE_HALF), (0.0, THREE_HALF)),
        ("H(1,)", (t2, THREE_HALF), (-t2, THREE_HALF)),
        ("L0(1,)", (0.0, THREE_HALF), (1.0, THREE_HALF)),
        ("L0(2,)", (1.0, THREE_HALF), (0.0, THREE_HALF)),
        ("H(2,)", (-t1, THREE_HALF), (t1, THREE_HALF)),
        ("L1(2,)", (0.0, HALF), (1.0, HALF)),
        ("L1(1,)", (1.0, HALF), (0.0, HALF)),
        ("H(1,)", (t2, HALF), (-t2, HALF)),
        ("L0(1,)", (0.0, HALF), (1.0, HALF)),
        ("L0(2,)", (1.0, HALF), (0.0, HALF)),
    ])


def ksigma4_sector_arcs(atlas: LagrangianAtlas) -> list:
    """Boundary of one sector disk of the K#Sigma_4 delta-variant in the
    line z0 = 0 (chart (1, 1)), oriented so that its area is positive."""
    t = _tm(atlas, "H(1, 1)")
    return reversed_arcs(_arcs(atlas, [
        ("H(1, 1)", (-t, HALF), (t, HALF)),
        ("L1(1, 1)", (0.0, HALF), (1.0, HALF)),
        ("L1(1, 0)", (1.0, HALF), (0.0, HALF)),
        ("H(1, 0)", (t, HALF), (-t, HALF)),
        ("L0(1, 0)", (0.0, HALF), (1.0, HALF)),
        ("L0(1, 1)", (1.0, HALF), (0.0, HALF)),
    ]))


def theta_disk_arcs(atlas: LagrangianAtlas) -> list:
    """Boundary of the disk of Theta_surg in the line z0 = 0 (chart (2,)),
    oriented so that its area is positive."""
    t1, t2 = _tm(atlas, "H-point"), _tm(atlas, "bundle")
    return reversed_arcs(_arcs(atlas, [
        ("H-point", (-t1, HALF), (t1, HALF)),
        ("L1", (0.0, HALF), (1.0, HALF)),
        ("bundle", (t2, HALF), (-t2, HALF)),
        ("L0", (1.0, HALF), (0.0, HALF)),
    ]))


def fiber_seam_arcs(atlas: LagrangianAtlas) -> list:
    """The circle C x {[0:1]} of the product torus, counterclockwise around
    eta = 0 in the affine coordinate eta = z0 / z1."""
    t = _tm(atlas, "bundle1+1")
    return _arcs(atlas, [
        ("bundle1+1", (-t, 0.0), (t, 0.0)),
        ("L1+1", (0.0, 0.0), (1.0, 0.0)),
        ("bundle0-1", (t, 0.0), (-t, 0.0)),
        ("L0-1", (1.0, 0.0), (0.0, 0.0)),
        ("bundle1-1", (-t, 0.0), (t, 0.0)),
        ("L1-1", (0.0, 0.0), (1.0, 0.0)),
        ("bundle0+1", (t, 0.0), (-t, 0.0)),
        ("L0+1", (1.0, 0.0), (0.0, 0.0)),
    ])


def reversed_arcs(arcs: list) -> list:
    return [PathArc(a.patch, a.end, a.start) for a in reversed(arcs)]


@dataclass
class DiskData:
    """A disk with its boundary loop, its chain and its invariants."""

    name: str
    loop: FrameLoop
    chain: DiskChain
    area: float
    boundary_area: float
    maslov: int


def disk_data(atlas: LagrangianAtlas, name: str, arcs: list, chart, n_per_arc: int = 400) -> DiskData:
    space = atlas.space
    loop = frame_loop(space, arcs, chart, n_per_arc)
    chain = cone_chain(space, arcs, chart)
    return DiskData(name, loop, chain, symplectic_area(chain), boundary_area(space, arcs, chart),
                    maslov_index(loop))


def build_gamma_and_u(atlas: LagrangianAtlas, n_per_arc: int = 400):
    """Loop gamma and disk u of the K#Sigma_2 surface.

    Returns
    -------
    (FrameLoop, DiskChain)
    """
    arcs = gamma_arcs(atlas)
    return frame_loop(atlas.space, arcs, (2,), n_per_arc), cone_chain(atlas.space, arcs, (2,))


def standard_disks(atlas: LagrangianAtlas) -> list:
    """The disks whose area and Maslov index certify monotonicity."""
    label = atlas.label
    if label == "KSigma2":
        return [disk_data(atlas, "u", gamma_arcs(atlas), (2,)),
                disk_data(atlas, "seam z0", ksigma2_seam_arcs(atlas), (2,))]
    if label == "KSigma4_delta":
        return [disk_data(atlas, "sector", ksigma4_sector_arcs(atlas), (1, 1))]
    if label == "ThetaSurg":
        return [disk_data(atlas, "sector", theta_disk_arcs(atlas), (2,))]
    if label == "ProductTorus41":
        arcs = fiber_seam_arcs(atlas)
        return [disk_data(atlas, "D2", arcs, (1, 1)),
                disk_data(atlas, "D1", reversed_arcs(arcs), (0, 1))]
    return []


def monotonicity_report(atlas: LagrangianAtlas, disks: list | None = None,
                        expected: float = 0.5, tol: float = 2e-3) -> list:
    """Rows ``{name, area, maslov, ratio, status}`` for each disk.

    Rows with vanishing Maslov index get ``ratio = None`` and status
    ``"ZeroMaslov"``.
    """
    disks = standard_disks(atlas) if disks is None else disks
    rows = []
    for d in disks:
        if d.maslov == 0:
            rows.append({"name": d.name, "area": d.area, "maslov": 0, "ratio": None,
                         "status": "ZeroMaslov"})
            continue
        ratio = d.area / d.maslov
        rows.append({"name": d.name, "area": d.area, "maslov": d.maslov, "ratio": ratio,
                     "status": "PASS" if abs(ratio - expected) <= tol else "FAIL"})
    return rows
