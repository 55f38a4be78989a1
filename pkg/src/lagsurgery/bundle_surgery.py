"""Fibrewise surgery along an isotropic circle.

Two circles are modelled concretely:

* ``N = {[x0 : x1 : 0]}`` in CP^2.  A point near N is written
  ``[x0 : x1 : W]`` with ``(x0, x1)`` a real unit vector; ``W`` is the fibre
  coordinate of the symplectic normal bundle.  Trivialization ``j`` uses the
  representative with ``x_j > 0``, so the transition between the two is the
  sign of ``x0 x1``: the Lagrangian subbundle is a Moebius band.
* ``N = {[0:1]} x RP^1`` (or ``{[1:0]} x RP^1``) in CP^1 x CP^1.  The fibre
  coordinate is the affine coordinate of the first factor in both charts,
  so the transition is the identity.

In both cases the surface ``{lift(psi, W(t))}`` is swept out by a circle
action whose Hamiltonian is constant on the initial curve, hence it is
Lagrangian for any fibre curve ``W(t)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ambient import CP2_SPACE, PRODUCT_SPACE, AmbientSpace, normalize, projective_distance
from .errors import BaseOffCircle, TransitionInconsistent
from .handle import ProfileCurve, shear
from .surfaces import Patch

THETA_CIRCLE = "z2=0"
PRODUCT_CIRCLE = "[0:1]xRP1"
PRODUCT_CIRCLE_PRIME = "[1:0]xRP1"
TRIVIAL = "trivial"
MOEBIUS = "moebius"


class IsotropicCircle:
    """Base circle with two local trivializations of its normal fibre."""

    def __init__(self, name: str):
        if name not in (THETA_CIRCLE, PRODUCT_CIRCLE, PRODUCT_CIRCLE_PRIME):
            raise ValueError(f"unknown isotropic circle {name!r}")
        self.name = name
        self.space: AmbientSpace = CP2_SPACE if name == THETA_CIRCLE else PRODUCT_SPACE

    # -- base ----------------------------------------------------------------
    def base(self, psi) -> np.ndarray:
        psi = np.asarray(psi, dtype=float)
        c, s = np.cos(psi), np.sin(psi)
        if self.name == THETA_CIRCLE:
            return np.stack([c, s, np.zeros_like(c)], axis=-1).astype(complex)
        one, zero = np.ones_like(c), np.zeros_like(c)
        first = (zero, one) if self.name == PRODUCT_CIRCLE else (one, zero)
        return np.stack([*first, c, s], axis=-1).astype(complex)

    def base_angle(self, h) -> float:
        """Angle psi in [0, pi) of a point of N."""
        h = np.asarray(h, dtype=complex)
        x = h[:2] if self.name == THETA_CIRCLE else h[2:]
        k = int(np.argmax(np.abs(x)))
        x = np.real(x / (x[k] / abs(x[k])))
        return float(np.mod(np.arctan2(x[1], x[0]), np.pi))

    def check_on_circle(self, h, tol: float = 1e-10):
        psi = self.base_angle(h)
        d = float(projective_distance(self.space, h, self.base(psi)))
        if d > tol:
            raise BaseOffCircle(f"point is at distance {d:.3g} from the circle {self.name}")
        return psi

    # -- fibres ----------------------------------------------------------------
    def lift(self, psi, W) -> np.ndarray:
        """Global representative of the fibre point with coordinate W."""
        psi, W = np.broadcast_arrays(np.asarray(psi, float), np.asarray(W, complex))
        c, s = np.cos(psi), np.sin(psi)
        if self.name == THETA_CIRCLE:
            return np.stack([c + 0j, s + 0j, W], axis=-1)
        one = np.ones_like(W)
        first = (W, one) if self.name == PRODUCT_CIRCLE else (one, W)
        return np.stack([*first, c + 0j, s + 0j], axis=-1)

    def local_lift(self, j: int, psi: float, Z) -> np.ndarray:
        """Fibre point with coordinate Z in trivialization ``j``."""
        if self.name == THETA_CIRCLE:
            x = np.array([np.cos(psi), np.sin(psi)])
            if abs(x[j]) < 1e-12:
                raise BaseOffCircle(f"base point outside the domain of trivialization {j}")
            x = x * np.sign(x[j])
            return np.array([x[0], x[1], Z], dtype=complex)
        b = np.array([np.cos(psi), np.sin(psi)])
        if abs(b[j]) < 1e-12:
            raise BaseOffCircle(f"base point outside the domain of trivialization {j}")
        return self.lift(psi, Z)

    def local_coordinate(self, j: int, h) -> complex:
        """Fibre coordinate of ``h`` in the chart of trivialization ``j``."""
        h = np.asarray(h, dtype=complex)
        if self.name == THETA_CIRCLE:
            return h[2] / h[j]
        if self.name == PRODUCT_CIRCLE:
            return h[0] / h[1]
        return h[1] / h[0]

    def transition(self, psi: float, snap_tol: float = 1e-9) -> int:
        """Sign relating trivialization 1 to trivialization 0 at base psi.

        The derivative of the chart fibre coordinate of trivialization 1
        with respect to that of trivialization 0 is computed by a finite
        difference, normalized to modulus one and snapped to +-1.
        """
        h = 1e-6
        p0 = self.local_lift(0, psi, 0.0)
        p1 = self.local_lift(0, psi, h)
        # unit representatives with x_j > 0 on the base factor
        raw = (self._unit_coordinate(1, p1, psi) - self._unit_coordinate(1, p0, psi)) / h
        unit = raw / abs(raw)
        if abs(unit.imag) > snap_tol or abs(abs(unit.real) - 1) > snap_tol:
            raise TransitionInconsistent(f"transition {unit} is not +-1")
        return int(np.sign(unit.real))

    def _unit_coordinate(self, j, h, psi):
        """Fibre coordinate in trivialization j, measured in the unit frame."""
        h = np.asarray(h, dtype=complex)
        if self.name == THETA_CIRCLE:
            x = np.array([np.cos(psi), np.sin(psi)])
            x = x * np.sign(x[j])
            mu = np.dot(h[:2], x)
            return h[2] / mu
        return self.local_coordinate(j, h)

    def overlap_components(self):
        """Parameter intervals of the components of the chart overlap."""
        if self.name == THETA_CIRCLE:
            return [(0.0, 0.5 * np.pi), (0.5 * np.pi, np.pi)]
        return [(0.0, 0.5 * np.pi), (0.5 * np.pi, np.pi)]


@dataclass(frozen=True)
class CircleBundleSpec:
    """Parameters of a bundle surgery along an isotropic circle.

    Parameters
    ----------
    circle : str
        One of ``THETA_CIRCLE``, ``PRODUCT_CIRCLE``, ``PRODUCT_CIRCLE_PRIME``.
    subbundle : {"trivial", "moebius"}
        Expected type of the real subbundle.
    fiber_angle : float
        Direction ``e^{i alpha}`` of the second Lagrangian in the fibre.
    eps1, T, lam : float
        As for point handles.
    even_perturbation : float
        Adds ``even_perturbation * eps1 * lam`` to the fibre curve for both
        signs of x.  Nonzero values break the x -> -x symmetry and are only
        used to exercise the descent test.
    """

    circle: str
    subbundle: str
    fiber_angle: float
    eps1: float = float(np.exp(-5.0))
    T: float = 4.0
    lam: float = 0.05
    even_perturbation: float = 0.0

    @property
    def model(self) -> IsotropicCircle:
        return IsotropicCircle(self.circle)

    @property
    def profile(self) -> ProfileCurve:
        return ProfileCurve(self.T, 1.0, True)

    @property
    def edge_radius(self) -> float:
        return self.lam * self.eps1 * float(np.exp(self.profile.t_max))

    @property
    def cut_radius(self) -> float:
        """Lower bound for |W| on the handle."""
        return self.lam * self.eps1 * float(np.sqrt(2 * (1 - abs(np.cos(self.fiber_angle)))))

    def fiber_curve(self, t, x_sign=1.0):
        """Fibre coordinate and its t-derivative."""
        c, c1, _ = self.profile.derivatives(t)
        k = self.lam * self.eps1
        W = x_sign * k * shear(self.fiber_angle, c) + self.even_perturbation * k
        W1 = x_sign * k * shear(self.fiber_angle, c1)
        return W, W1


def fiber_handle(spec: CircleBundleSpec, base_point, t, x_sign: float = 1.0,
                 trivialization: int = 0) -> np.ndarray:
    """Point of the fibrewise handle over ``base_point``."""
    model = spec.model
    psi = model.check_on_circle(base_point)
    if abs(t) > spec.profile.t_max + 1e-12:
        raise ValueError("t outside the handle")
    W, _ = spec.fiber_curve(np.asarray(t, float), x_sign)
    return model.local_lift(trivialization, psi, complex(W))


def descent_test(spec: CircleBundleSpec, n_base: int = 32, n_t: int = 9) -> dict:
    """Compare the handle built in the two trivializations on every
    overlap component.

    Returns
    -------
    dict
        ``transitions`` (one sign per component) and ``max_gap``.

    Raises
    ------
    TransitionInconsistent
        If the lifts disagree beyond 1e-12 or the transitions do not match
        the declared subbundle type.
    """
    model = spec.model
    ts = np.linspace(-spec.profile.t_max, spec.profile.t_max, n_t)
    signs, gap = [], 0.0
    for lo, hi in model.overlap_components():
        psis = np.linspace(lo, hi, n_base + 2)[1:-1]
        comp = {model.transition(p) for p in psis}
        if len(comp) != 1:
            raise TransitionInconsistent("transition changes inside an overlap component")
        tau = comp.pop()
        signs.append(tau)
        for psi in psis:
            b = model.base(psi)
            for t in ts:
                for s in (1.0, -1.0):
                    p0 = fiber_handle(spec, b, t, s, 0)
                    p1 = fiber_handle(spec, b, t, tau * s, 1)
                    gap = max(gap, float(projective_distance(model.space, p0, p1)))
    if gap > 1e-12:
        raise TransitionInconsistent(f"handle does not descend: lifts differ by {gap:.3g}")
    expected = TRIVIAL if all(s == 1 for s in signs) else MOEBIUS
    if expected != spec.subbundle:
        raise TransitionInconsistent(f"transitions {signs} describe a {expected} subbundle, "
                                     f"not {spec.subbundle}")
    return {"transitions": signs, "max_gap": gap}


def global_handle(spec: CircleBundleSpec, n_t: int = 64, n_psi: int = 64) -> list:
    """Patches covering the handle over the whole circle.

    For the CP^2 circle a single patch over ``(t, psi) in [-t_max, t_max] x
    [0, 2 pi]`` suffices (one sign of x; the other is reached at psi + pi).
    For the product circles, each sign of x and each of the two faces of
    RP^1 gives a patch.
    """
    descent_test(spec)
    model = spec.model
    tm = spec.profile.t_max
    space = model.space
    if spec.circle == THETA_CIRCLE:

        def func(t, psi):
            W, _ = spec.fiber_curve(t)
            return np.stack([np.cos(psi) / W, np.sin(psi) / W], axis=-1)

        def jac(t, psi):
            W, W1 = spec.fiber_curve(t)
            dt = np.stack([-np.cos(psi) * W1 / W**2, -np.sin(psi) * W1 / W**2], axis=-1)
            dp = np.stack([-np.sin(psi) / W, np.cos(psi) / W], axis=-1)
            return _real_pair(dt, dp)

        return [Patch(space, (2,), ((-tm, tm), (0.0, 2 * np.pi)), func, jac, (n_t, n_psi + 1),
                      "bundle", (-spec.T, 0.0, spec.T))]

    a = 1 if spec.circle == PRODUCT_CIRCLE else 0
    patches = []
    for s in (1.0, -1.0):
        for b in (0, 1):

            def func(t, v, s=s):
                W, _ = spec.fiber_curve(t, s)
                return np.stack([W, np.tan(v) + 0j], axis=-1)

            def jac(t, v, s=s):
                _, W1 = spec.fiber_curve(t, s)
                dt = np.stack([W1, np.zeros_like(W1)], axis=-1)
                dv = np.stack([np.zeros_like(W1), (1 / np.cos(v) ** 2) + 0j], axis=-1)
                return _real_pair(dt, dv)

            m = n_psi // 4 + 1
            patches.append(Patch(space, (a, b), ((-tm, tm), (-np.pi / 4, np.pi / 4)), func, jac,
                                 (n_t, m), f"bundle{a}{'+' if s > 0 else '-'}{b}",
                                 (-spec.T, 0.0, spec.T)))
    return patches


def _real_pair(du, dv):
    out = np.empty(du.shape[:-1] + (4, 2))
    out[..., 0::2, 0] = du.real
    out[..., 1::2, 0] = du.imag
    out[..., 0::2, 1] = dv.real
    out[..., 1::2, 1] = dv.imag
    return out
