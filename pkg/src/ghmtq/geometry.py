"""Orthonormal-frame calculus on two-dimensional charts.

Conventions used throughout the package:

* coframe components ``theta[a][mu]`` (frame index first);
* the single connection component ``omega = ω¹₂`` is fixed by
  ``dΘ¹ = -ω ∧ Θ²`` and ``dΘ² = -s ω ∧ Θ¹`` with ``s = -1`` for SO(2) and
  ``s = +1`` for SO(1,1);
* curvature ``dω = F Θ¹∧Θ²`` and Ricci scalar ``R = 2F`` (Riemannian),
  ``R = -2F`` (Lorentzian, frame metric diag(1, -1));
* gauge rotation ``Θ' = Λ(λ) Θ`` with ``Θ'¹ = cos λ Θ¹ + sin λ Θ²`` (or the
  cosh/sinh boost) gives ``ω' = ω - dλ``.
"""

from __future__ import annotations

import contextlib
import enum
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from . import jets
from .jets import Jet

#: |det h| below this fraction of (max |h_ij|)^2 counts as degenerate.
DEGENERACY_TOL = 1e-12


class GeometryError(ValueError):
    """Degenerate metric or coframe, signature mismatch, null tangent."""

    def __init__(self, message, mask=None):
        super().__init__(message)
        self.mask = mask


class Signature(enum.Enum):
    RIEMANNIAN = "riemannian"
    LORENTZIAN = "lorentzian"

    @property
    def eta(self) -> np.ndarray:
        return np.diag([1.0, 1.0] if self is Signature.RIEMANNIAN else [1.0, -1.0])

    @property
    def s(self) -> int:
        """ω²₁ = s ω¹₂."""
        return -1 if self is Signature.RIEMANNIAN else 1

    @property
    def group(self) -> str:
        return "SO(2)" if self is Signature.RIEMANNIAN else "SO(1,1)"


def _fail(bad, message):
    bad = np.asarray(bad, dtype=bool)
    if bad.any() and jets.is_strict():
        raise GeometryError(message, mask=bad)
    return bad


MetricJets = tuple[Jet, Jet, Jet]


@dataclass(frozen=True)
class MetricField2:
    """Symmetric 2-D metric ``components(x1, x2) -> (h11, h12, h22)``."""

    components: Callable[[Jet, Jet], tuple]
    signature: Signature = Signature.RIEMANNIAN

    def __call__(self, x1, x2) -> MetricJets:
        h = self.components(x1, x2)
        shape = np.broadcast_shapes(*(jets.value(c).shape for c in h), jets.value(x1).shape)
        order = min(getattr(x1, "order", jets.MAX_ORDER), getattr(x2, "order", jets.MAX_ORDER))
        return tuple(jets.as_jet(c, shape, order) if not isinstance(c, Jet) else c for c in h)

    def at(self, p, order: int = jets.MAX_ORDER) -> MetricJets:
        x1, x2 = jets._split_points(p)
        return self(*jets.variables(x1, x2, order))


def detect_signature(h: MetricJets) -> Signature:
    det = h[0].v * h[2].v - h[1].v ** 2
    # degenerate points carry no signature; build_coframe reports them
    live = det != 0
    if not live.any():
        raise GeometryError("degenerate metric", mask=~live)
    det = det[live]
    if np.all(det > 0):
        if np.all(h[0].v[live] > 0):
            return Signature.RIEMANNIAN
        raise GeometryError("negative-definite metric")
    if np.all(det < 0):
        return Signature.LORENTZIAN
    raise GeometryError("metric signature is not constant over the sampled points")


@dataclass(frozen=True)
class Coframe:
    """Orthonormal coframe ``Θᵃ = theta[a][0] dx¹ + theta[a][1] dx²``."""

    theta: tuple[tuple[Jet, Jet], tuple[Jet, Jet]]
    signature: Signature
    convention: str = "lower_triangular"

    @property
    def order(self) -> int:
        return min(c.order for row in self.theta for c in row)

    def det(self) -> Jet:
        (a11, a12), (a21, a22) = self.theta
        return a11 * a22 - a12 * a21

    def inverse(self) -> tuple[tuple[Jet, Jet], tuple[Jet, Jet]]:
        """Frame vectors ``e[mu][a] = (Θ⁻¹)^mu_a``."""
        (a11, a12), (a21, a22) = self.theta
        d = self.det()
        return ((a22 / d, -a12 / d), (-a21 / d, a11 / d))

    def metric(self) -> MetricJets:
        """η_ab Θᵃ_μ Θᵇ_ν."""
        e1, e2 = np.diag(self.signature.eta)
        (a11, a12), (a21, a22) = self.theta
        return (e1 * a11 * a11 + e2 * a21 * a21,
                e1 * a11 * a12 + e2 * a21 * a22,
                e1 * a12 * a12 + e2 * a22 * a22)

    def reproduction_error(self, h: MetricJets) -> np.ndarray:
        """Max relative deviation of η_ab Θᵃ Θᵇ from ``h`` (values only)."""
        m = self.metric()
        scale = np.maximum.reduce([np.abs(c.v) for c in h])
        return np.maximum.reduce([np.abs(a.v - b.v) for a, b in zip(m, h)]) / scale

    def reflected(self) -> "Coframe":
        """Θ² -> -Θ² (orientation reversal)."""
        (t1, t2) = self.theta
        return Coframe((t1, (-t2[0], -t2[1])), self.signature, self.convention)


def build_coframe(h: MetricJets, sig: Signature | None = None,
                  convention: str = "lower_triangular") -> Coframe:
    """Signature-aware Cholesky-like coframe of ``h``.

    Θ¹ carries the dx¹ direction: ``Θ¹ = sqrt|h11| (dx¹ + h12/h11 dx²)``,
    ``Θ² ∝ dx²``.  For a Lorentzian metric with ``h11 < 0`` the roles of
    the legs swap so that the result stays positively oriented.
    Family-specific frames live in :mod:`ghmtq.solutions`.
    """
    if convention != "lower_triangular":
        raise ValueError(f"build_coframe only builds lower_triangular frames, got {convention!r}")
    h11, h12, h22 = h
    if sig is None:
        sig = detect_signature(h)
    det = h11 * h22 - h12 * h12
    scale = np.maximum.reduce([np.abs(c.v) for c in h])
    with np.errstate(invalid="ignore"):
        degenerate = _fail(~(np.abs(det.v) >= DEGENERACY_TOL * scale ** 2), "degenerate metric")
    zero = jets.as_jet(0.0, h11.shape, h11.order)

    with jets.lenient() if degenerate.any() else contextlib.nullcontext():
        if sig is Signature.RIEMANNIAN:
            _fail(((h11.v <= 0) | (det.v <= 0)) & ~degenerate, "metric is not Riemannian")
            a = jets.sqrt(h11)
            theta = ((a, h12 / a), (zero, jets.sqrt(det / h11)))
        else:
            _fail((det.v >= 0) & ~degenerate, "metric is not Lorentzian")
            _fail(h11.v == 0, "null first coordinate direction")
            pos = h11.v > 0
            # h11 > 0: Θ¹ spacelike along dx¹
            a = jets.sqrt(jets.where(pos, h11, -h11))
            b = jets.sqrt(jets.where(pos, -det / h11, det / h11))
            t11 = jets.where(pos, a, zero)
            t12 = jets.where(pos, h12 / a, -b)
            t21 = jets.where(pos, zero, a)
            t22 = jets.where(pos, b, -h12 / a)
            theta = ((t11, t12), (t21, t22))
    cf = Coframe(theta, sig, convention)
    if degenerate.any():
        for row in cf.theta:
            for c in row:
                c.coeffs[:, degenerate] = np.nan
    return cf


@dataclass(frozen=True)
class ConnectionOneForm:
    """ω¹₂ in coordinate components ``coord`` and frame components
    ``frame`` (ω = ω_a Θᵃ) relative to ``coframe``."""

    coord: tuple[Jet, Jet]
    frame: tuple[Jet, Jet]
    coframe: Coframe

    def frame_consistency_error(self) -> np.ndarray:
        e = self.coframe.inverse()
        err = []
        for a in range(2):
            w = self.coord[0] * e[0][a] + self.coord[1] * e[1][a]
            err.append(np.abs(w.v - self.frame[a].v))
        return np.maximum(*err)


def frame_components(coord: tuple[Jet, Jet], cf: Coframe) -> tuple[Jet, Jet]:
    e = cf.inverse()
    return tuple(coord[0] * e[0][a] + coord[1] * e[1][a] for a in range(2))


def exterior_derivative(form: tuple[Jet, Jet]) -> Jet:
    """Coefficient of dx¹∧dx² in d(form_1 dx¹ + form_2 dx²)."""
    return jets.partial(form[1], 0) - jets.partial(form[0], 1)


def connection_from_cartan(cf: Coframe, sig: Signature | None = None) -> ConnectionOneForm:
    """Solve Cartan's first structure equation for ω¹₂.

    Writing ``dΘᵃ = cᵃ Θ¹∧Θ²`` the two torsion-free equations read
    ``c¹ + ω_1 = 0`` and ``c² - s ω_2 = 0`` in frame components.
    """
    sig = sig or cf.signature
    if cf.order < 1:
        raise ValueError("coframe jets must be at least first order")
    det = cf.det()
    bad = ~(np.abs(det.v) > 0)
    _fail(bad, "singular coframe")
    d_theta = [exterior_derivative(cf.theta[a]) for a in range(2)]
    with jets.lenient() if bad.any() else contextlib.nullcontext():
        c = [d / det for d in d_theta]
    frame = (-c[0], sig.s * c[1])
    coord = tuple(frame[0] * cf.theta[0][mu] + frame[1] * cf.theta[1][mu] for mu in range(2))
    return ConnectionOneForm(coord, frame, cf)


class CurvatureData(NamedTuple):
    F: np.ndarray
    R: np.ndarray


def ricci_from_F(F, sig: Signature):
    return 2.0 * F if sig is Signature.RIEMANNIAN else -2.0 * F


def curvature(conn: ConnectionOneForm) -> CurvatureData:
    """Second structure equation in the abelian case: R¹₂ = dω = F Θ¹∧Θ²."""
    cf = conn.coframe
    det = cf.det().v
    _fail(~(np.abs(det) > 0), "degenerate Θ¹∧Θ²")
    with np.errstate(divide="ignore", invalid="ignore"):
        F = exterior_derivative(conn.coord).v / det
    return CurvatureData(F, ricci_from_F(F, cf.signature))


def rotate_coframe(cf: Coframe, lam: Jet) -> Coframe:
    """Apply the local SO(2) rotation / SO(1,1) boost with parameter ``lam``."""
    (t11, t12), (t21, t22) = cf.theta
    if cf.signature is Signature.RIEMANNIAN:
        c, s = jets.cos(lam), jets.sin(lam)
        theta = ((c * t11 + s * t21, c * t12 + s * t22),
                 (-s * t11 + c * t21, -s * t12 + c * t22))
    else:
        c, s = jets.cosh(lam), jets.sinh(lam)
        theta = ((c * t11 + s * t21, c * t12 + s * t22),
                 (s * t11 + c * t21, s * t12 + c * t22))
    return Coframe(theta, cf.signature, cf.convention)


def gauge_transform(conn: ConnectionOneForm, lam: Jet, sig: Signature | None = None) -> ConnectionOneForm:
    """ω' = ω - dλ, with frame components taken in the rotated coframe."""
    lam = jets.as_jet(lam, conn.coord[0].shape)
    dl = jets.grad(lam)
    coord = (conn.coord[0] - dl[0], conn.coord[1] - dl[1])
    cf = rotate_coframe(conn.coframe, lam)
    return ConnectionOneForm(coord, frame_components(coord, cf), cf)


def pipeline(h: MetricJets, sig: Signature | None = None):
    """Coframe, connection and curvature of a metric in one call."""
    cf = build_coframe(h, sig)
    conn = connection_from_cartan(cf)
    return cf, conn, curvature(conn)


# -- line integrals -------------------------------------------------------

class Holonomy(NamedTuple):
    value: float
    error: float


ConnectionField = Callable[[np.ndarray, np.ndarray], tuple[np.ndarray, np.ndarray]]
Curve = Callable[[Jet], tuple]


def _simpson(y, a, b):
    n = len(y) - 1
    h = (b - a) / n
    return h / 3 * (y[0] + y[-1] + 4 * y[1:-1:2].sum() + 2 * y[2:-1:2].sum())


def curve_samples(curve: Curve, n: int, s0: float = 0.0, s1: float = 1.0):
    """Points and tangents of ``curve(s)`` at ``n + 1`` equispaced parameters."""
    s = np.linspace(s0, s1, n + 1)
    sj, _ = jets.variables(s, np.zeros_like(s), order=1)
    x1, x2 = curve(sj)
    x1, x2 = jets.as_jet(x1, s.shape, 1), jets.as_jet(x2, s.shape, 1)
    return (x1.v, x2.v), (x1.deriv(1, 0), x2.deriv(1, 0))


def line_integral(form: ConnectionField, curve: Curve, n_steps: int = 64, domain=None) -> Holonomy:
    """∫ form_μ dx^μ along ``curve(s)``, s ∈ [0, 1], by composite Simpson
    with a Richardson error estimate from the half-resolution rule."""
    if n_steps < 16 or n_steps % 4:
        raise ValueError("n_steps must be a multiple of 4 and at least 16")
    (x1, x2), (t1, t2) = curve_samples(curve, n_steps)
    if domain is not None:
        (lo1, hi1), (lo2, hi2) = domain
        if np.any((x1 < lo1) | (x1 > hi1) | (x2 < lo2) | (x2 > hi2)):
            raise GeometryError("curve leaves the domain")
    w1, w2 = form(x1, x2)
    y = np.asarray(w1) * t1 + np.asarray(w2) * t2
    fine = _simpson(y, 0.0, 1.0)
    coarse = _simpson(y[::2], 0.0, 1.0)
    return Holonomy(float(fine), float(abs(fine - coarse) / 15.0))


def loop_holonomy(form: ConnectionField, curve: Curve, n_steps: int = 64, domain=None,
                  closure_tol: float = 1e-10) -> Holonomy:
    """∮ ω for a closed ``curve``; see :func:`line_integral`."""
    (x1, x2), _ = curve_samples(curve, 1)
    if abs(x1[0] - x1[-1]) > closure_tol or abs(x2[0] - x2[-1]) > closure_tol:
        raise GeometryError("curve is not closed")
    return line_integral(form, curve, n_steps, domain)


def connection_field(metric: MetricField2) -> ConnectionField:
    """Coordinate components of the lower-triangular-frame connection of a metric."""
    def form(x1, x2):
        _, conn, _ = pipeline(metric.at((x1, x2), order=2), metric.signature)
        return conn.coord[0].v, conn.coord[1].v
    return form


# -- geodesic curvature ---------------------------------------------------

def tangent_turning(cf: Coframe, axis: int) -> np.ndarray:
    """∂_axis of the angle (or rapidity) of the coordinate vector ∂_axis
    measured in the frame dual to ``cf``."""
    a, b = cf.theta[0][axis], cf.theta[1][axis]
    da, db = jets.partial(a, axis).v, jets.partial(b, axis).v
    av, bv = a.v, b.v
    if cf.signature is Signature.RIEMANNIAN:
        return (av * db - bv * da) / (av ** 2 + bv ** 2)
    return (av * db - bv * da) / (av ** 2 - bv ** 2)


def geodesic_curvature(h: MetricField2, axis: int, p, sig: Signature | None = None) -> np.ndarray:
    """Signed geodesic curvature of the coordinate curve along which only
    ``x^axis`` varies (increasing), measured against the normal on its left
    in the chart orientation.  E.g. the circle r = a of the polar plane,
    traversed with θ increasing, has κ = +1/a.
    """
    sig = sig or h.signature
    hj = h.at(p, order=2)
    hmm = hj[0 if axis == 0 else 2].v
    if sig is Signature.LORENTZIAN:
        _fail(np.abs(hmm) < DEGENERACY_TOL * np.maximum.reduce([np.abs(c.v) for c in hj]),
              "null tangent")
    cf, conn, _ = pipeline(hj, sig)
    return (tangent_turning(cf, axis) - conn.coord[axis].v) / np.sqrt(np.abs(hmm))
