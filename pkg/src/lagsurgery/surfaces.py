"""Parametrized Lagrangian patches, atlases, meshes and topology checks.

A :class:`Patch` is a smooth map from a parameter rectangle into one affine
chart.  A :class:`LagrangianAtlas` is a list of patches whose images cover a
closed surface; the combinatorial gluing is recovered geometrically by
merging grid vertices whose ambient points coincide, and explicit gluing
records are kept only to be checked.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from .ambient import (
    AmbientSpace,
    chart_embed,
    chart_project,
    fubini_study,
    normalize,
    projective_distance,
    projector_features,
)
from .errors import DegenerateJacobian, NonManifoldMesh, OpenBoundary, TangencyUnresolved

MapFn = Callable[[np.ndarray, np.ndarray], np.ndarray]
JacFn = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass
class Patch:
    """A parametrized piece of surface in one chart.

    Parameters
    ----------
    space : AmbientSpace
    chart : tuple of int
        Chart identifier (see :mod:`lagsurgery.ambient`).
    domain : ((u0, u1), (v0, v1))
        Parameter rectangle.
    func : callable
        ``func(u, v)`` returns complex chart coordinates of shape
        ``u.shape + (2,)``.
    jac : callable, optional
        ``jac(u, v)`` returns the real Jacobian, shape ``u.shape + (4, 2)``,
        columns ``d/du`` and ``d/dv``.  Central differences are used when it
        is missing.
    grid : (int, int)
        Default sampling resolution.
    name : str
    u_breaks : tuple of float
        Values of u where the map is only finitely smooth; quadrature along
        u is split there.
    """

    space: AmbientSpace
    chart: tuple
    domain: tuple
    func: MapFn
    jac: Optional[JacFn] = None
    grid: tuple = (64, 64)
    name: str = ""
    u_breaks: tuple = ()

    @property
    def diameter(self) -> float:
        (u0, u1), (v0, v1) = self.domain
        return float(np.hypot(u1 - u0, v1 - v0))

    def __call__(self, u, v) -> np.ndarray:
        u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
        return self.func(u, v)

    def homogeneous(self, u, v) -> np.ndarray:
        return chart_embed(self.space, self.chart, self(u, v))

    def fd_jacobian(self, u, v, h: Optional[float] = None) -> np.ndarray:
        """Central-difference Jacobian; ``h`` defaults to 1e-5 * diameter."""
        if h is None:
            h = 1e-5 * self.diameter
        u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
        from .ambient import to_real

        du = (to_real(self(u + h, v)) - to_real(self(u - h, v))) / (2 * h)
        dv = (to_real(self(u, v + h)) - to_real(self(u, v - h))) / (2 * h)
        return np.stack([du, dv], axis=-1)

    def jacobian(self, u, v) -> np.ndarray:
        if self.jac is not None:
            u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
            return self.jac(u, v)
        return self.fd_jacobian(u, v)

    def grid_params(self, n: Optional[tuple] = None, refine: int = 1):
        """Parameter grid; ``refine`` subdivides every cell of the default grid."""
        nu, nv = self.grid if n is None else n
        nu, nv = (nu - 1) * refine + 1, (nv - 1) * refine + 1
        (u0, u1), (v0, v1) = self.domain
        U, V = np.meshgrid(np.linspace(u0, u1, nu), np.linspace(v0, v1, nv), indexing="ij")
        return U, V


def _defect_from_jacobian(space, z, J, rank_tol=1e-10):
    Om = fubini_study(space, z)
    a = J[..., 0]
    b = J[..., 1]
    w = np.einsum("...k,...kl,...l->...", a, Om, b)
    na = np.linalg.norm(a, axis=-1)
    nb = np.linalg.norm(b, axis=-1)
    # rank test: the parallelogram must not collapse
    cross = np.sqrt(np.maximum(na**2 * nb**2 - np.einsum("...k,...k->...", a, b) ** 2, 0.0))
    if np.any(cross <= rank_tol * np.maximum(na * nb, 1e-300)):
        raise DegenerateJacobian("patch is not an immersion at some grid point")
    onorm = np.linalg.norm(Om, ord=2, axis=(-2, -1))
    return np.abs(w) / (na * nb * onorm)


def lagrangian_defect(p: Patch, grid: Optional[tuple] = None, fd_step: Optional[float] = None,
                      use_analytic: bool = True) -> float:
    """Max over the grid of |omega(f_u, f_v)| / (|f_u| |f_v| |omega|).

    Parameters
    ----------
    p : Patch
    grid : (int, int), optional
        Must be at least 8 x 8.
    fd_step : float, optional
        Central-difference step.  Only used when no analytic Jacobian is
        used; defaults to 1e-5 times the domain diameter.
    use_analytic : bool
        Use ``p.jac`` when present.
    """
    nu, nv = p.grid if grid is None else grid
    if nu < 8 or nv < 8:
        raise ValueError("grid resolution must be at least 8x8")
    U, V = p.grid_params((nu, nv))
    z = p(U, V)
    if use_analytic and p.jac is not None:
        J = p.jac(U, V)
    else:
        J = p.fd_jacobian(U, V, fd_step)
    return float(np.max(_defect_from_jacobian(p.space, z, J)))


# ----------------------------------------------------------------------------
# atlases


@dataclass
class GluingRecord:
    """Identification of a boundary segment of one patch with another.

    ``edge`` names are ``"u0"``, ``"u1"``, ``"v0"``, ``"v1"``; the
    parameter intervals are along the free coordinate of that edge.
    ``reversed`` tells whether the two intervals run in opposite directions.
    """

    patch_a: int
    edge_a: str
    interval_a: tuple
    patch_b: int
    edge_b: str
    interval_b: tuple
    reversed: bool


@dataclass
class LagrangianAtlas:
    """A closed surface given by patches; gluing is inferred geometrically."""

    space: AmbientSpace
    patches: list
    label: str = ""
    meta: dict = field(default_factory=dict)
    _mesh: object = field(default=None, repr=False)
    _gluing: object = field(default=None, repr=False)

    def mesh(self, grid: Optional[tuple] = None, refine: int = 1) -> "SurfaceMesh":
        if grid is not None or refine != 1:
            return build_mesh(self, grid, refine=refine)
        if self._mesh is None:
            self._mesh = build_mesh(self)
        return self._mesh

    @property
    def gluing(self) -> list:
        if self._gluing is None:
            self._gluing = infer_gluing(self)
        return self._gluing

    def sample(self, grid: Optional[tuple] = None):
        """Homogeneous samples of every patch: list of (U, V, H)."""
        out = []
        for p in self.patches:
            U, V = p.grid_params(grid)
            out.append((U, V, p.homogeneous(U, V)))
        return out


def _merge_points(feats: np.ndarray, tol: float):
    """Cluster feature vectors closer than ``tol``; return compact labels."""
    pairs = cKDTree(feats).query_pairs(tol, output_type="ndarray")
    return _components(len(feats), pairs)


def _components(n: int, pairs: np.ndarray) -> np.ndarray:
    pairs = np.asarray(pairs, dtype=int).reshape(-1, 2)
    g = coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(n, n))
    return connected_components(g, directed=False)[1]


@dataclass
class SurfaceMesh:
    """Triangle mesh of an atlas with merged vertices.

    Attributes
    ----------
    points : (V, n) complex
        Unit homogeneous representative of each merged vertex.
    faces : (F, 3) int
    edges : (E, 2) int
        Sorted vertex pairs.
    edge_face_count : (E,) int
    face_patch : (F,) int
    """

    space: AmbientSpace
    points: np.ndarray
    faces: np.ndarray
    edges: np.ndarray
    edge_face_count: np.ndarray
    face_patch: np.ndarray

    @property
    def n_vertices(self) -> int:
        return len(np.unique(self.faces))

    @property
    def euler_characteristic(self) -> int:
        return int(self.n_vertices - len(self.edges) + len(self.faces))

    @property
    def boundary_edges(self) -> np.ndarray:
        return self.edges[self.edge_face_count == 1]

    def is_closed(self) -> bool:
        return bool(np.all(self.edge_face_count == 2))

    def orientable(self) -> bool:
        """Try to orient all faces coherently by flip propagation."""
        F = self.faces
        nf = len(F)
        # directed half edges
        he = np.concatenate([F[:, [0, 1]], F[:, [1, 2]], F[:, [2, 0]]])
        face_of = np.tile(np.arange(nf), 3)
        key = np.sort(he, axis=1)
        direction = np.where(he[:, 0] < he[:, 1], 1, -1)
        order = np.lexsort((key[:, 1], key[:, 0]))
        key, face_of, direction = key[order], face_of[order], direction[order]
        same = np.all(key[1:] == key[:-1], axis=1)
        idx = np.nonzero(same)[0]
        adj = [[] for _ in range(nf)]
        for i in idx:
            f, g = face_of[i], face_of[i + 1]
            # coherent orientation needs opposite directions along the edge
            need_flip = direction[i] == direction[i + 1]
            adj[f].append((g, need_flip))
            adj[g].append((f, need_flip))
        sign = np.zeros(nf, dtype=int)
        for start in range(nf):
            if sign[start]:
                continue
            sign[start] = 1
            stack = [start]
            while stack:
                f = stack.pop()
                for g, flip in adj[f]:
                    want = -sign[f] if flip else sign[f]
                    if sign[g] == 0:
                        sign[g] = want
                        stack.append(g)
                    elif sign[g] != want:
                        return False
        return True


def build_mesh(atlas: LagrangianAtlas, grid: Optional[tuple] = None,
               merge_tol: float = 1e-8, refine: int = 1) -> SurfaceMesh:
    """Triangulate every patch grid and merge coincident ambient points."""
    space = atlas.space
    all_h, tris, face_patch = [], [], []
    offset = 0
    for k, p in enumerate(atlas.patches):
        U, V = p.grid_params(grid, refine)
        nu, nv = U.shape
        H = normalize(space, p.homogeneous(U, V)).reshape(-1, space.n_homogeneous)
        all_h.append(H)
        ids = offset + np.arange(nu * nv).reshape(nu, nv)
        a, b = ids[:-1, :-1].ravel(), ids[1:, :-1].ravel()
        c, d = ids[1:, 1:].ravel(), ids[:-1, 1:].ravel()
        tris.append(np.stack([a, b, c], axis=1))
        tris.append(np.stack([a, c, d], axis=1))
        face_patch.append(np.full(2 * len(a), k))
        offset += nu * nv
    H = np.concatenate(all_h)
    labels = _merge_points(projector_features(space, H), merge_tol)
    faces = labels[np.concatenate(tris)]
    face_patch = np.concatenate(face_patch)
    keep = (faces[:, 0] != faces[:, 1]) & (faces[:, 1] != faces[:, 2]) & (faces[:, 0] != faces[:, 2])
    faces, face_patch = faces[keep], face_patch[keep]
    srt = np.sort(faces, axis=1)
    _, first, counts = np.unique(srt, axis=0, return_index=True, return_counts=True)
    if np.any(counts > 1):
        raise NonManifoldMesh(f"{int(np.sum(counts > 1))} triangles are covered twice")
    e = np.concatenate([srt[:, [0, 1]], srt[:, [1, 2]], srt[:, [0, 2]]])
    edges, ecount = np.unique(e, axis=0, return_counts=True)
    if np.any(ecount > 2):
        raise NonManifoldMesh(f"{int(np.sum(ecount > 2))} edges border more than two faces")
    points = np.zeros((labels.max() + 1, space.n_homogeneous), dtype=complex)
    points[labels] = H
    return SurfaceMesh(space, points, faces, edges, ecount, face_patch)


def euler_characteristic(atlas: LagrangianAtlas, grid: Optional[tuple] = None, refine: int = 1) -> int:
    m = atlas.mesh(grid, refine)
    if not m.is_closed():
        raise OpenBoundary(f"{len(m.boundary_edges)} mesh edges are not glued")
    return m.euler_characteristic


def orientable(atlas: LagrangianAtlas, grid: Optional[tuple] = None, refine: int = 1) -> bool:
    m = atlas.mesh(grid, refine)
    if not m.is_closed():
        raise OpenBoundary(f"{len(m.boundary_edges)} mesh edges are not glued")
    return m.orientable()


def defect_convergence(p: Patch, sizes=(16, 32, 64), floor: float = 1e-13) -> dict:
    """Finite-difference defect with the step tied to the grid spacing.

    With ``h`` equal to the parameter spacing of an ``n x n`` grid, the
    central-difference error is ``O(h^2)`` and the defect should drop by
    about 4 at each doubling.  Defects below ``floor`` (exactly Lagrangian
    up to roundoff, e.g. flat faces) are reported as converged.

    Returns
    -------
    dict
        ``defects`` per size and ``ratios`` between consecutive sizes
        (``None`` where both defects are under the floor).
    """
    defects = []
    for n in sizes:
        h = min(p.domain[0][1] - p.domain[0][0], p.domain[1][1] - p.domain[1][0]) / (n - 1)
        defects.append(lagrangian_defect(p, (n, n), fd_step=h, use_analytic=False))
    ratios = []
    for a, b in zip(defects[:-1], defects[1:]):
        ratios.append(None if max(a, b) < floor else a / max(b, 1e-300))
    return {"sizes": list(sizes), "defects": defects, "ratios": ratios}


# ----------------------------------------------------------------------------
# gluing records


_EDGES = ("u0", "u1", "v0", "v1")


def _edge_params(p: Patch, edge: str, n: int):
    (u0, u1), (v0, v1) = p.domain
    if edge[0] == "u":
        s = np.linspace(v0, v1, n)
        u = np.full(n, u0 if edge == "u0" else u1)
        return u, s, s
    s = np.linspace(u0, u1, n)
    v = np.full(n, v0 if edge == "v0" else v1)
    return s, v, s


def infer_gluing(atlas: LagrangianAtlas, tol: float = 1e-8) -> list:
    """Find, for every boundary sample, the boundary sample of another
    patch edge (or another part of the same patch) at the same ambient
    point, and compress runs into :class:`GluingRecord` entries."""
    space = atlas.space
    samples = []  # (patch, edge, param, feature)
    for k, p in enumerate(atlas.patches):
        nu, nv = p.grid
        for e in _EDGES:
            n = nv if e[0] == "u" else nu
            u, v, s = _edge_params(p, e, n)
            F = projector_features(space, p.homogeneous(u, v))
            for i in range(n):
                samples.append((k, e, s[i], i, F[i]))
    feats = np.array([x[4] for x in samples])
    tree = cKDTree(feats)
    pairs = tree.query_pairs(tol, output_type="ndarray")
    # adjacency between distinct edges
    links = {}
    for a, b in pairs:
        ka, ea, sa, ia, _ = samples[a]
        kb, eb, sb, ib, _ = samples[b]
        if (ka, ea) == (kb, eb):
            continue
        for (k1, e1, s1, i1), (k2, e2, s2, i2) in (((ka, ea, sa, ia), (kb, eb, sb, ib)),
                                                   ((kb, eb, sb, ib), (ka, ea, sa, ia))):
            links.setdefault((k1, e1, k2, e2), []).append((i1, s1, i2, s2))
    records = []
    for (k1, e1, k2, e2), lst in links.items():
        if (k1, e1) > (k2, e2):
            continue
        # chains in which both sample indices advance by one per step;
        # periodic edges may give two partners for one sample, so several
        # chains are grown at once
        runs = []
        for item in sorted(set(lst)):
            for run in runs:
                last = run[-1]
                step = item[2] - last[2]
                if item[0] == last[0] + 1 and abs(step) == 1 and \
                        (len(run) == 1 or step == run[1][2] - run[0][2]):
                    run.append(item)
                    break
            else:
                runs.append([item])
        for run in runs:
            if len(run) >= 2:
                rev = run[-1][3] < run[0][3]
                records.append(GluingRecord(k1, e1, (run[0][1], run[-1][1]), k2, e2,
                                            (run[0][3], run[-1][3]), bool(rev)))
    return records


def gluing_consistency(atlas: LagrangianAtlas, refine: int = 4, n_scan: int = 64) -> float:
    """Max distance from refined samples of each glued segment to the
    matching edge of the partner patch.

    The partner parameter is located by a scan of ``n_scan`` samples
    followed by a bounded least-squares fit of the projector features
    between the scan neighbours.
    """
    from scipy.optimize import least_squares

    space = atlas.space
    worst = 0.0
    for g in atlas.gluing:
        pa, pb = atlas.patches[g.patch_a], atlas.patches[g.patch_b]
        s = np.linspace(g.interval_a[0], g.interval_a[1], refine * 4 + 1)
        lo, hi = min(g.interval_b), max(g.interval_b)
        scan = np.linspace(lo, hi, n_scan)

        def edge_b(x):
            x = np.asarray(x, dtype=float)
            f = np.full_like(x, _fix(pb, g.edge_b))
            return pb.homogeneous(f, x) if g.edge_b[0] == "u" else pb.homogeneous(x, f)

        Hb = edge_b(scan)
        for si in s:
            f = np.array(_fix(pa, g.edge_a))
            ha = pa.homogeneous(f, np.array(si)) if g.edge_a[0] == "u" else pa.homogeneous(np.array(si), f)
            d0 = projective_distance(space, ha, Hb)
            k = int(np.argmin(d0))
            a, b = scan[max(k - 1, 0)], scan[min(k + 1, n_scan - 1)]
            fa = projector_features(space, ha)
            r = least_squares(lambda x: projector_features(space, edge_b(x[0])) - fa, [scan[k]],
                              bounds=([a], [b]), xtol=1e-15, ftol=1e-15, gtol=1e-15)
            d = float(projective_distance(space, ha, edge_b(r.x[0])))
            worst = max(worst, min(d, float(d0[k])))
    return worst


def _fix(p: Patch, edge: str) -> float:
    (u0, u1), (v0, v1) = p.domain
    return {"u0": u0, "u1": u1, "v0": v0, "v1": v1}[edge]


# ----------------------------------------------------------------------------
# intersection with a coordinate line


def _line_value(space: AmbientSpace, line: str, H: np.ndarray) -> np.ndarray:
    j = space.line_index(line)
    sl = next(s for s in space.factors if s.start <= j < s.stop)
    return H[..., j] / np.linalg.norm(H[..., sl], axis=-1)


def _refine_crossing(p: Patch, space, line, pa, pb, Fa, tol):
    """Bisect along the parameter segment pa -> pb on Re(F conj(Fa))."""
    lo, hi = 0.0, 1.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        q = pa + mid * (pb - pa)
        F = _line_value(space, line, p.homogeneous(q[0], q[1]))
        if np.real(F * np.conj(Fa)) > 0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-14:
            break
    q = pa + 0.5 * (lo + hi) * (pb - pa)
    h = p.homogeneous(q[0], q[1])
    if abs(_line_value(space, line, h)) > tol:
        raise TangencyUnresolved(
            f"sign change on patch {p.name!r} without a zero of the line equation"
        )
    return h


def restrict_to_line(atlas: LagrangianAtlas, line: str, grid: Optional[tuple] = None,
                     tol: float = 1e-10, zero_tol: float = 1e-12,
                     merge_tol: float = 1e-7) -> list:
    """Connected components of the intersection with ``{line = 0}``.

    The line equation ``F = z_j / |z|`` (using the chart representative of
    each patch, so F is continuous on a patch) is real up to a slowly
    varying phase near a transverse intersection with a Lagrangian.  Grid
    edges along which F flips to the antipodal direction contain a zero,
    which is located by bisection to ``tol``; zeros in a common triangle are
    joined and the resulting graph is split into components.

    Returns
    -------
    list of ndarray
        One array of unit homogeneous points per component, ordered along
        the curve by nearest-neighbour chaining.
    """
    space = atlas.space
    pts, links = [], []
    for p in atlas.patches:
        U, V = p.grid_params(grid)
        nu, nv = U.shape
        H = p.homogeneous(U, V)
        F = _line_value(space, line, H)
        scale = np.max(np.abs(F))
        zero = np.abs(F) < zero_tol
        node = {}

        def vnode(i, j):
            key = ("v", i, j)
            if key not in node:
                node[key] = len(pts)
                pts.append(normalize(space, H[i, j]))
            return node[key]

        def enode(i0, j0, i1, j1):
            key = ("e",) + tuple(sorted([(i0, j0), (i1, j1)]))
            if key in node:
                return node[key]
            if zero[i0, j0] or zero[i1, j1]:
                node[key] = None
                return None
            fa, fb = F[i0, j0], F[i1, j1]
            g = fb * np.conj(fa)
            if np.real(g) >= 0:
                node[key] = None
                return None
            if abs(np.imag(g)) > np.sin(np.pi / 4) * abs(g):
                if max(abs(fa), abs(fb)) < 1e-3 * max(scale, 1e-300):
                    raise TangencyUnresolved(f"ambiguous crossing on patch {p.name!r}")
                node[key] = None
                return None
            pa = np.array([U[i0, j0], V[i0, j0]])
            pb = np.array([U[i1, j1], V[i1, j1]])
            h = _refine_crossing(p, space, line, pa, pb, fa, tol)
            node[key] = len(pts)
            pts.append(normalize(space, h))
            return node[key]

        for i in range(nu - 1):
            for j in range(nv - 1):
                quad = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)]
                for tri in ((0, 1, 2), (0, 2, 3)):
                    vs = [quad[t] for t in tri]
                    found = []
                    for a in range(3):
                        if zero[vs[a]]:
                            found.append(vnode(*vs[a]))
                        b = (a + 1) % 3
                        n = enode(*vs[a], *vs[b])
                        if n is not None:
                            found.append(n)
                    for a, b in zip(found[:-1], found[1:]):
                        links.append((a, b))
                    if len(found) == 1:
                        links.append((found[0], found[0]))
    if not pts:
        return []
    P = np.array(pts)
    merged = _merge_points(projector_features(space, P), merge_tol)
    pairs = np.array([(merged[a], merged[b]) for a, b in links] or np.zeros((0, 2)), dtype=int)
    nm = merged.max() + 1
    reps = np.zeros((nm, space.n_homogeneous), dtype=complex)
    reps[merged] = P
    comp = _components(nm, pairs)
    curves = []
    for c in range(comp.max() + 1):
        curves.append(_chain(space, reps[comp == c]))
    return curves


def _chain(space, P):
    """Order points by greedy nearest-neighbour chaining."""
    if len(P) < 3:
        return P
    feats = projector_features(space, P)
    left = list(range(1, len(P)))
    order = [0]
    while left:
        d = np.linalg.norm(feats[left] - feats[order[-1]], axis=1)
        k = int(np.argmin(d))
        order.append(left.pop(k))
    return P[order]


# ----------------------------------------------------------------------------
# nearest point


def nearest_point(atlas: LagrangianAtlas, h, n_candidates: int = 4,
                  grid: Optional[tuple] = None, accept: float = 1e-13):
    """Projective distance from ``h`` to the atlas image.

    A KD-tree over the patch grids gives starting parameters, then the
    feature residual is minimized over each candidate patch's parameters,
    stopping at the first candidate closer than ``accept``.

    Returns
    -------
    (distance, patch index, (u, v))
    """
    from scipy.optimize import least_squares

    space = atlas.space
    key = ("_nearest", grid)
    cache = atlas.meta.get(key)
    if cache is None:
        feats, owner = [], []
        for k, p in enumerate(atlas.patches):
            U, V = p.grid_params(grid)
            f = projector_features(space, p.homogeneous(U, V)).reshape(-1, 2 * sum(
                (s.stop - s.start) ** 2 for s in space.factors))
            feats.append(f)
            owner.append(np.stack([np.full(U.size, k), U.ravel(), V.ravel()], axis=1))
        cache = (cKDTree(np.concatenate(feats)), np.concatenate(owner))
        atlas.meta[key] = cache
    tree, owner = cache
    target = projector_features(space, np.asarray(h, dtype=complex))
    _, idx = tree.query(target, k=n_candidates)
    best = (np.inf, -1, (np.nan, np.nan))
    for i in np.atleast_1d(idx):
        k, u, v = owner[i]
        p = atlas.patches[int(k)]
        (u0, u1), (v0, v1) = p.domain

        def res(x, p=p):
            return projector_features(space, p.homogeneous(np.array(x[0]), np.array(x[1]))) - target

        sol = least_squares(res, [u, v], bounds=([u0, v0], [u1, v1]), xtol=1e-15, ftol=1e-15,
                            gtol=1e-15, method="trf")
        d = float(projective_distance(space, p.homogeneous(np.array(sol.x[0]), np.array(sol.x[1])),
                                      h))
        if d < best[0]:
            best = (d, int(k), (float(sol.x[0]), float(sol.x[1])))
        if d < accept:
            break
    return best
