"""Point-surgery handles between two linear Lagrangian planes of C^2.

The model handle is ``(c(t) x0, c(t) x1)`` for ``(x0, x1)`` on a small
circle of R^2 and a profile ``c(t) = e^{-t} + i e^{t}``.  For any profile
``c`` the model is Lagrangian, so smoothing reduces to choosing a C^2 curve
that joins the positive real ray to the positive imaginary ray.  A real
shear of each factor then moves the imaginary axis to the direction
``e^{i theta_j}``; this is symplectic up to the common factor
``sin(theta_0) = sin(theta_1)``.

Handles are built in flat Darboux coordinates and pushed to the chart with
:func:`lagsurgery.ambient.darboux_to_chart`, which preserves all real
linear Lagrangians.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .ambient import AmbientSpace, darboux_jacobian, darboux_to_chart
from .errors import AngleMismatch, ContainmentViolation
from .surfaces import Patch

HALF_PI = 0.5 * np.pi


def _quintic_coeffs(p0, p1, width):
    """Coefficients (in s = (t - t0)/width) of the quintic Hermite
    interpolant matching value, first and second t-derivatives."""
    M = np.array(
        [
            [1, 0, 0, 0, 0, 0],
            [0, 1, 0, 0, 0, 0],
            [0, 0, 2, 0, 0, 0],
            [1, 1, 1, 1, 1, 1],
            [0, 1, 2, 3, 4, 5],
            [0, 0, 2, 6, 12, 20],
        ],
        dtype=float,
    )
    rhs = np.array(
        [p0[0], p0[1] * width, p0[2] * width**2, p1[0], p1[1] * width, p1[2] * width**2]
    )
    return np.linalg.solve(M, rhs)


def _poly_eval(coef, s, width):
    P = np.polynomial.Polynomial(coef)
    return P(s), P.deriv(1)(s) / width, P.deriv(2)(s) / width**2


class ProfileCurve:
    """Smoothed hyperbola profile in log-polar form ``c = exp(L + iA)``.

    Parameters
    ----------
    T : float
        Truncation: the model hyperbola is used on ``|t| <= T``.
    blend_width : float
        Width of the two transition windows.
    smooth : bool
        If False the profile is the bare hyperbola, defined on ``[-T, T]``
        only.
    """

    def __init__(self, T: float = 4.0, blend_width: float = 1.0, smooth: bool = True):
        if T <= 0 or blend_width <= 0:
            raise ValueError("T and blend_width must be positive")
        self.T = float(T)
        self.blend_width = float(blend_width)
        self.smooth = smooth
        mL, mA = self._model(np.array(self.T))
        end = self.T + self.blend_width
        self._cL = _quintic_coeffs([float(x) for x in mL], [end, 1.0, 0.0], self.blend_width)
        self._cA = _quintic_coeffs([float(x) for x in mA], [HALF_PI, 0.0, 0.0], self.blend_width)

    @property
    def t_max(self) -> float:
        return self.T + self.blend_width if self.smooth else self.T

    @staticmethod
    def _model(t):
        L = 0.5 * np.logaddexp(-2 * t, 2 * t)
        L1 = np.tanh(2 * t)
        L2 = 2.0 / np.cosh(2 * t) ** 2
        A = np.arctan(np.exp(2 * t))
        A1 = 1.0 / np.cosh(2 * t)
        A2 = -2.0 * np.tanh(2 * t) / np.cosh(2 * t)
        return (L, L1, L2), (A, A1, A2)

    def _positive(self, t):
        """(L, L', L''), (A, A', A'') for t >= 0."""
        (L, L1, L2), (A, A1, A2) = self._model(t)
        if not self.smooth:
            return (L, L1, L2), (A, A1, A2)
        L, L1, L2, A, A1, A2 = (np.array(x, dtype=float) for x in (L, L1, L2, A, A1, A2))
        w = self.blend_width
        mid = (t > self.T) & (t < self.T + w)
        if np.any(mid):
            s = (t[mid] - self.T) / w
            L[mid], L1[mid], L2[mid] = _poly_eval(self._cL, s, w)
            A[mid], A1[mid], A2[mid] = _poly_eval(self._cA, s, w)
        far = t >= self.T + w
        L[far], L1[far], L2[far] = t[far], 1.0, 0.0
        A[far], A1[far], A2[far] = HALF_PI, 0.0, 0.0
        return (L, L1, L2), (A, A1, A2)

    def logpolar(self, t):
        """Return ``(L, L', L'')`` and ``(A, A', A'')`` at ``t``."""
        t = np.asarray(t, dtype=float)
        if not self.smooth and np.any(np.abs(t) > self.T * (1 + 1e-12)):
            raise ValueError("the unsmoothed profile is only defined on [-T, T]")
        sgn = np.where(t < 0, -1.0, 1.0)
        (L, L1, L2), (A, A1, A2) = self._positive(np.abs(t))
        # mirror: L(-t) = L(t), A(-t) = pi/2 - A(t)
        L1 = sgn * L1
        A = np.where(t < 0, HALF_PI - A, A)
        A2 = sgn * A2
        return (L, L1, L2), (A, A1, A2)

    def __call__(self, t) -> np.ndarray:
        (L, _, _), (A, _, _) = self.logpolar(t)
        return np.exp(L + 1j * A)

    def derivatives(self, t):
        """Return ``c, c', c''``."""
        (L, L1, L2), (A, A1, A2) = self.logpolar(t)
        c = np.exp(L + 1j * A)
        g = L1 + 1j * A1
        return c, c * g, c * (g * g + L2 + 1j * A2)


def shear(theta: float, c):
    """Real shear of C = R^2 sending i to e^{i theta} and fixing 1."""
    c = np.asarray(c, dtype=complex)
    return c.real + c.imag * np.exp(1j * theta)


@dataclass(frozen=True)
class HandleSpec:
    """Parameters of a point-surgery handle.

    Parameters
    ----------
    theta0, theta1 : float
        Directions of the second plane ``{(e^{i theta0} x0, e^{i theta1} x1)}``
        in each factor.  Sign variants are encoded by adding pi.
    eps1 : float
        Handle radius before rescaling.
    T : float
        Truncation of the profile.
    lam : float
        Conformal rescaling factor.
    eps : float
        Radius of the ball outside which the handle equals the two planes.
    smooth : bool
        Use the smoothed profile (default) or the bare hyperbola arc.
    """

    theta0: float
    theta1: float
    eps1: float = float(np.exp(-5.0))
    T: float = 4.0
    lam: float = 0.05
    eps: float = 0.05
    smooth: bool = True

    @property
    def profile(self) -> ProfileCurve:
        return ProfileCurve(self.T, 1.0, self.smooth)

    @property
    def sin_theta(self) -> float:
        return float(np.sin(self.theta0))

    @property
    def edge_radius(self) -> float:
        """Radius at which the handle joins the two planes."""
        return self.lam * self.eps1 * float(np.exp(self.profile.t_max))

    def scaled(self, factor: float) -> "HandleSpec":
        return replace(self, lam=self.lam * factor)

    def validate(self):
        s0, s1 = np.sin(self.theta0), np.sin(self.theta1)
        if abs(s0 - s1) > 1e-12:
            raise AngleMismatch(
                f"sin({self.theta0:.6g}) = {s0:.6g} differs from sin({self.theta1:.6g}) = {s1:.6g}"
            )
        if abs(s0) < 1e-12:
            raise AngleMismatch("the two planes coincide in a factor (sin theta = 0)")
        if self.edge_radius > self.eps * (1 + 1e-12):
            raise ContainmentViolation(
                f"handle edge radius {self.edge_radius:.6g} exceeds eps = {self.eps:.6g}"
            )


def handle_darboux(spec: HandleSpec, t, phi):
    """Handle points in flat coordinates, with d/dt and d/dphi."""
    t, phi = np.broadcast_arrays(np.asarray(t, float), np.asarray(phi, float))
    c, c1, _ = spec.profile.derivatives(t)
    k = spec.lam * spec.eps1
    cp, sp = np.cos(phi), np.sin(phi)
    w = np.stack([shear(spec.theta0, c * cp), shear(spec.theta1, c * sp)], axis=-1) * k
    wt = np.stack([shear(spec.theta0, c1 * cp), shear(spec.theta1, c1 * sp)], axis=-1) * k
    wp = np.stack([shear(spec.theta0, -c * sp), shear(spec.theta1, c * cp)], axis=-1) * k
    return w, wt, wp


def _real2(z):
    out = np.empty(z.shape[:-1] + (4,))
    out[..., 0::2] = z.real
    out[..., 1::2] = z.imag
    return out


def handle_patch(space: AmbientSpace, chart, spec: HandleSpec, grid=(64, 64), name="handle",
                 darboux: bool = True) -> Patch:
    """The handle as a patch over ``(t, phi) in [-t_max, t_max] x [0, 2 pi]``.

    With ``darboux=True`` (default) the flat handle is mapped to the chart by
    the radial Darboux map, making it exactly Lagrangian for the
    Fubini-Study form.  With ``darboux=False`` the flat handle is used as
    chart coordinates directly, which is only Lagrangian for the flat form.
    """
    spec.validate()
    tm = spec.profile.t_max

    def func(t, phi):
        w, _, _ = handle_darboux(spec, t, phi)
        return darboux_to_chart(space, w) if darboux else w

    def jac(t, phi):
        w, wt, wp = handle_darboux(spec, t, phi)
        J = np.stack([_real2(wt), _real2(wp)], axis=-1)
        if darboux:
            J = darboux_jacobian(space, w) @ J
        return J

    breaks = (-spec.T, 0.0, spec.T) if spec.smooth else (0.0,)
    return Patch(space, tuple(chart), ((-tm, tm), (0.0, 2 * np.pi)), func, jac, grid, name, breaks)


def _trace_integral(spec: HandleSpec, factor: int, n: int = 400) -> float:
    """Signed 1/2 * integral of (x dy - y dx) along one factor trace."""
    prof = spec.profile
    theta = spec.theta0 if factor == 0 else spec.theta1
    k = spec.lam * spec.eps1
    T = spec.T
    if prof.smooth:
        breaks = [-T - 1, -T, 0.0, T, T + 1]
    else:
        breaks = [-T, 0.0, T]
    xs, ws = np.polynomial.legendre.leggauss(n)
    total = 0.0
    for a, b in zip(breaks[:-1], breaks[1:]):
        t = 0.5 * (b - a) * xs + 0.5 * (a + b)
        c, c1, _ = prof.derivatives(t)
        w = k * shear(theta, c)
        w1 = k * shear(theta, c1)
        total += 0.5 * (b - a) * np.sum(ws * 0.5 * np.imag(np.conj(w) * w1))
    if not prof.smooth:
        # drop segments from the arc ends onto the two rays: one parallel to
        # the first ray at the l1 end, one parallel to the second at the l0 end
        lo = k * shear(theta, prof(-T))
        foot_lo = k * np.exp(T)
        hi = k * shear(theta, prof(T))
        foot_hi = k * np.exp(T) * np.exp(1j * theta)
        total += 0.5 * np.imag(np.conj(foot_lo) * (lo - foot_lo))
        total += 0.5 * np.imag(np.conj(hi) * (foot_hi - hi))
    return float(total)


def factor_trace_area(spec: HandleSpec, factor: int, disk_radius: float | None = None,
                      n: int = 400) -> float:
    """Area between one factor trace of the handle and the two rays.

    The closed boundary runs out along the first ray, back along the trace
    and in along the second ray; radial pieces do not contribute to
    ``1/2 * oint (x dy - y dx)``, so only the trace (and, for the bare
    hyperbola, the two drop segments) is integrated.

    Parameters
    ----------
    spec : HandleSpec
    factor : {0, 1}
    disk_radius : float, optional
        Radius of the disk in which the area is measured; must contain the
        whole trace.  Defaults to the edge radius.
    n : int
        Gauss points per smooth piece.
    """
    if factor not in (0, 1):
        raise ValueError("factor must be 0 or 1")
    if abs(np.sin(spec.theta0 if factor == 0 else spec.theta1)) < 1e-12:
        raise AngleMismatch("degenerate angle")
    if disk_radius is not None:
        t = np.linspace(-spec.profile.t_max, spec.profile.t_max, 2001)
        theta = spec.theta0 if factor == 0 else spec.theta1
        rmax = np.max(np.abs(spec.lam * spec.eps1 * shear(theta, spec.profile(t))))
        if rmax > disk_radius * (1 + 1e-12):
            raise ContainmentViolation(f"trace reaches radius {rmax:.6g} > {disk_radius:.6g}")
    return abs(_trace_integral(spec, factor, n))


def measure_a_eps(spec: HandleSpec, n: int = 400, check: bool = True) -> float:
    """Common per-factor grey area a(eps) of the rescaled smoothed handle."""
    spec.validate()
    a0 = factor_trace_area(spec, 0, spec.eps, n)
    a1 = factor_trace_area(spec, 1, spec.eps, n)
    if check and abs(a0 - a1) > 1e-9 * max(a0, 1e-300) + 1e-15:
        raise AssertionError(f"factor areas differ: {a0} vs {a1}")
    return 0.5 * (a0 + a1)
