"""Topological checks on the induced geometry.

* :func:`regularity_scan` dumps ω, F, R over a grid and fits power-law
  blowups near candidate singular loci.
* :func:`euler_number` evaluates Gauss–Bonnet with boundary and corner
  terms on a chart rectangle.
* :func:`transition_check` recovers the rotation (or boost) relating two
  coframes and tests the gauge law ω_B = ω_A - dλ.
* :func:`spectrum_search` sweeps a parameter and flags invariants that are
  forced to be integers but are not (or that jump between integers).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np

from . import jets
from .geometry import (DEGENERACY_TOL, Coframe, ConnectionField, GeometryError, MetricField2, Signature,
                       Holonomy, build_coframe, connection_from_cartan, curvature, line_integral,
                       loop_holonomy,
                       tangent_turning)
from .solutions import Family, SolutionsError, make_family

TWO_PI = 2.0 * math.pi


# -- grids ------------------------------------------------------------------

@dataclass(frozen=True)
class GridSpec:
    """Tensor grid over ``bounds`` with ``n`` points per axis.

    ``exclude`` lists strips ``(axis, lo, hi)`` removed from the analysis;
    ``endpoint[k] = False`` drops the upper end of axis k (periodic axes).
    """

    bounds: tuple[tuple[float, float], tuple[float, float]]
    n: tuple[int, int] = (64, 64)
    exclude: tuple[tuple[int, float, float], ...] = ()
    endpoint: tuple[bool, bool] = (True, True)

    def __post_init__(self):
        if min(self.n) < 8:
            raise ValueError("grid resolution must be at least 8 per axis")
        for (lo, hi) in self.bounds:
            if not hi > lo:
                raise ValueError("grid bounds must be increasing")
        for axis, lo, hi in self.exclude:
            blo, bhi = self.bounds[axis]
            if axis not in (0, 1) or lo < blo or hi > bhi or hi < lo:
                raise ValueError("excluded strips must lie inside the bounds")

    def axes(self) -> tuple[np.ndarray, np.ndarray]:
        return tuple(np.linspace(lo, hi, n, endpoint=ep)
                     for (lo, hi), n, ep in zip(self.bounds, self.n, self.endpoint))

    def points(self) -> tuple[np.ndarray, np.ndarray]:
        a1, a2 = self.axes()
        return np.meshgrid(a1, a2, indexing="ij")

    def excluded(self) -> np.ndarray:
        X = self.points()
        mask = np.zeros(X[0].shape, bool)
        for axis, lo, hi in self.exclude:
            mask |= (X[axis] >= lo) & (X[axis] <= hi)
        return mask


# -- frame fields -------------------------------------------------------------

FrameFn = Callable[[tuple], Coframe]


def frame_function(source, frames: str = "lower_triangular") -> tuple[FrameFn, Signature]:
    """Coframe factory for a family (``frames`` = ``lower_triangular`` or
    ``paper_frame``) or for a bare :class:`MetricField2`."""
    if isinstance(source, Family):
        if frames == "paper_frame":
            return source.paper_coframe, Signature.RIEMANNIAN
        metric = source.metric()
    elif isinstance(source, MetricField2):
        if frames != "lower_triangular":
            raise ValueError("a bare metric only has the lower_triangular frame")
        metric = source
    else:
        raise TypeError("expected a Family or a MetricField2")
    return (lambda p: build_coframe(metric.at(p), metric.signature)), metric.signature


# -- regularity -----------------------------------------------------------------

class SingularLocus(NamedTuple):
    axis: int
    location: float
    exponent: float
    residual: float
    n_samples: int
    singular: bool


@dataclass
class RegularityReport:
    x1: np.ndarray
    x2: np.ndarray
    omega: np.ndarray  # frame components, shape (2, n1, n2)
    F: np.ndarray
    R: np.ndarray
    frame_ok: np.ndarray
    loci: list[SingularLocus] = field(default_factory=list)

    @property
    def max_abs_omega(self) -> float:
        ok = self.frame_ok
        return float(np.max(np.abs(self.omega[:, ok]), initial=0.0))

    @property
    def max_abs_F(self) -> float:
        return float(np.max(np.abs(self.F[self.frame_ok]), initial=0.0))

    @property
    def max_abs_R(self) -> float:
        return float(np.max(np.abs(self.R[self.frame_ok]), initial=0.0))

    @property
    def n_bad(self) -> int:
        return int((~self.frame_ok).sum())

    def verdict(self, zero_tol: float = 1e-10) -> str:
        if not self.frame_ok.any():
            return "no valid frame points"
        singular = [l for l in self.loci if l.singular]
        if singular:
            desc = ", ".join(f"x{l.axis + 1} = {l.location:g} (|R| ~ d^{l.exponent:.3g})" for l in singular)
            return f"curvature blows up near {desc}"
        if self.max_abs_omega < zero_tol:
            return "connection regular, identically zero"
        return "connection and curvature regular on the sampled grid"

    def rows(self):
        """Rows ``(x1, x2, omega_1, omega_2, F, R, frame_ok)`` in grid order."""
        for idx in np.ndindex(self.x1.shape):
            yield (float(self.x1[idx]), float(self.x2[idx]), float(self.omega[0][idx]),
                   float(self.omega[1][idx]), float(self.F[idx]), float(self.R[idx]),
                   bool(self.frame_ok[idx]))


def fit_blowup(distance, values, min_samples: int = 8) -> tuple[float, float, int]:
    """Least-squares slope of log|values| against log distance over the
    decade of distances closest to the locus.  Returns (exponent, rms
    residual, samples used); the exponent is NaN with too few samples."""
    d = np.asarray(distance, dtype=float)
    v = np.abs(np.asarray(values, dtype=float))
    ok = np.isfinite(v) & (v > 0) & (d > 0)
    d, v = d[ok], v[ok]
    if d.size == 0:
        return math.nan, math.nan, 0
    sel = d <= 10.0 * d.min()
    if sel.sum() < min_samples:
        return math.nan, math.nan, int(sel.sum())
    x, y = np.log(d[sel]), np.log(v[sel])
    A = np.vstack([x, np.ones_like(x)]).T
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ coef
    return float(coef[0]), float(np.sqrt(np.mean(resid ** 2))), int(sel.sum())


def regularity_scan(source, grid: GridSpec, frames: str = "lower_triangular",
                    loci: Sequence[tuple[int, float]] = (), singular_exponent: float = -0.5,
                    min_samples: int = 8) -> RegularityReport:
    """Connection and curvature over ``grid``.

    Degenerate frames do not abort the scan; those points come back with
    ``frame_ok = False``.  For each candidate locus ``(axis, value)`` the
    largest |R| on each grid line parallel to the locus is fitted against
    the distance to it; a fitted exponent below ``singular_exponent``
    classifies the locus as singular.
    """
    frame_fn, _ = frame_function(source, frames)
    X1, X2 = grid.points()
    with jets.lenient(), np.errstate(all="ignore"):
        cf = frame_fn((X1, X2))
        conn = connection_from_cartan(cf)
        curv = curvature(conn)
    omega = np.array([c.v for c in conn.frame])
    F, R = np.asarray(curv.F), np.asarray(curv.R)
    det = cf.det().v
    scale = np.maximum.reduce([np.abs(c.v) for row in cf.theta for c in row]) ** 2
    with np.errstate(invalid="ignore"):
        nondegenerate = np.abs(det) > DEGENERACY_TOL * scale
    ok = np.isfinite(omega).all(axis=0) & np.isfinite(F) & np.isfinite(R) & nondegenerate
    ok &= ~grid.excluded()
    report = RegularityReport(X1, X2, omega, F, R, ok)
    axes = grid.axes()
    for axis, value in loci:
        coord = axes[axis]
        absR = np.where(ok, np.abs(R), np.nan)
        with np.errstate(all="ignore"):
            profile = np.nanmax(absR, axis=1 - axis) if absR.size else absR
        expo, resid, used = fit_blowup(np.abs(coord - value), profile, min_samples)
        singular = bool(np.isfinite(expo) and expo < singular_exponent)
        report.loci.append(SingularLocus(axis, float(value), expo, resid, used, singular))
    return report


# -- Euler number ----------------------------------------------------------------

EDGE_KINDS = ("boundary", "periodic", "pole")


@dataclass(frozen=True)
class EulerDomain:
    """Chart rectangle with typed edges, listed counter-clockwise from the
    bottom: (x2 = lo2, x1 = hi1, x2 = hi2, x1 = lo1).

    ``boundary`` edges contribute geodesic curvature; ``periodic`` edges are
    identified with the opposite edge and ``pole`` edges collapse to a point,
    so neither contributes.  Corners are the meeting points of two
    consecutive ``boundary`` edges.
    """

    bounds: tuple[tuple[float, float], tuple[float, float]]
    edges: tuple[str, str, str, str] = ("boundary",) * 4

    def __post_init__(self):
        for e in self.edges:
            if e not in EDGE_KINDS:
                raise ValueError(f"unknown edge kind {e!r}")
        b, r, t, l = self.edges
        if (b == "periodic") != (t == "periodic") or (l == "periodic") != (r == "periodic"):
            raise ValueError("periodic edges must come in opposite pairs")
        for (lo, hi) in self.bounds:
            if not hi > lo:
                raise ValueError("domain bounds must be increasing")


class EulerResult(NamedTuple):
    bulk: float
    boundary: tuple[float, float, float, float]
    corners: float
    chi: float
    error: float
    order: float


def _gauss_nodes(lo, hi, panels, q=2):
    x, w = np.polynomial.legendre.leggauss(q)
    edges = np.linspace(lo, hi, panels + 1)
    mid = 0.5 * (edges[1:] + edges[:-1])[:, None]
    half = 0.5 * np.diff(edges)[:, None]
    return (mid + half * x).ravel(), (half * w).ravel()


def _frame_data(metric: MetricField2, p):
    cf = build_coframe(metric.at(p), Signature.RIEMANNIAN)
    conn = connection_from_cartan(cf)
    return cf, conn


def _euler_once(metric: MetricField2, dom: EulerDomain, panels: tuple[int, int], q: int):
    (a1, b1), (a2, b2) = dom.bounds
    x1, w1 = _gauss_nodes(a1, b1, panels[0], q)
    x2, w2 = _gauss_nodes(a2, b2, panels[1], q)
    X1, X2 = np.meshgrid(x1, x2, indexing="ij")
    h = metric.at((X1, X2))
    cf = build_coframe(h, Signature.RIEMANNIAN)
    F = curvature(connection_from_cartan(cf)).F
    area = np.sqrt(h[0].v * h[2].v - h[1].v ** 2)
    bulk = float(np.einsum("i,j,ij->", w1, w2, F * area))

    # edge: (kind, fixed axis value, moving axis, nodes, weights, direction)
    specs = [(dom.edges[0], (None, a2), 0, x1, w1, +1),
             (dom.edges[1], (b1, None), 1, x2, w2, +1),
             (dom.edges[2], (None, b2), 0, x1, w1, -1),
             (dom.edges[3], (a1, None), 1, x2, w2, -1)]
    boundary = []
    for kind, fixed, axis, nodes, weights, sign in specs:
        if kind != "boundary":
            boundary.append(0.0)
            continue
        p = (nodes, np.full_like(nodes, fixed[1])) if axis == 0 else (np.full_like(nodes, fixed[0]), nodes)
        ecf, econn = _frame_data(metric, p)
        integrand = tangent_turning(ecf, axis) - econn.coord[axis].v
        boundary.append(float(sign * np.dot(weights, integrand)))

    corners = 0.0
    corner_pts = [((a1, a2), +1.0), ((b1, a2), -1.0), ((b1, b2), +1.0), ((a1, b2), -1.0)]
    for k, (pt, s) in enumerate(corner_pts):
        if dom.edges[k - 1] == "boundary" and dom.edges[k] == "boundary":
            hc = metric.at((np.array([pt[0]]), np.array([pt[1]])), order=1)
            h11, h12, h22 = (c.v[0] for c in hc)
            alpha = math.acos(max(-1.0, min(1.0, s * h12 / math.sqrt(h11 * h22))))
            corners += math.pi - alpha
    chi = (bulk + sum(boundary) + corners) / TWO_PI
    return bulk, tuple(boundary), corners, chi


def euler_number(source, domain: EulerDomain, panels: tuple[int, int] = (8, 8),
                 q: int = 2, levels: int = 4) -> EulerResult:
    """Gauss–Bonnet Euler characteristic of a chart rectangle,

    χ = (1/2π) [∫ F dA + Σ ∮ κ_g ds + Σ (π - α_i)],

    with the boundary traversed counter-clockwise in the chart (region on
    the left).  Integrals use composite Gauss–Legendre rules with ``q``
    nodes per panel, which never evaluate the rectangle's edges or corners
    in the bulk (so polar edges are harmless).  The rule is applied at
    ``levels`` resolutions, doubling the panel counts from ``panels``;
    ``error`` is the last difference and ``order`` the observed convergence
    order of the first differences that stand above rounding.
    """
    metric = source.metric() if isinstance(source, Family) else source
    if metric.signature is not Signature.RIEMANNIAN:
        raise GeometryError("Gauss-Bonnet needs a Riemannian metric")
    probe = metric.at((np.array([np.mean(domain.bounds[0])]), np.array([np.mean(domain.bounds[1])])), order=1)
    h11, h12, h22 = (c.v[0] for c in probe)
    if not (h11 > 0 and h11 * h22 - h12 * h12 > 0):
        raise GeometryError("Gauss-Bonnet needs a Riemannian metric")
    results = []
    for k in range(levels):
        n = (panels[0] * 2 ** k, panels[1] * 2 ** k)
        results.append(_euler_once(metric, domain, n, q))
    chis = np.array([r[3] for r in results])
    diffs = np.abs(np.diff(chis))
    noise = 1e-13
    order = math.inf
    for d0, d1 in zip(diffs, diffs[1:]):
        if d0 > noise and d1 > noise:
            order = math.log2(d0 / d1)
            break
    bulk, boundary, corners, chi = results[-1]
    return EulerResult(bulk, boundary, corners, chi, float(diffs[-1]) if diffs.size else math.nan, order)


def euler_convergence(source, domain: EulerDomain, panels: Sequence[int] = (1, 2, 4, 8),
                      q: int = 2, reference: float | None = None) -> tuple[np.ndarray, float]:
    """χ at increasing uniform panel counts and the observed order from the
    errors against ``reference`` (or successive differences)."""
    metric = source.metric() if isinstance(source, Family) else source
    chis = np.array([_euler_once(metric, domain, (n, n), q)[3] for n in panels])
    errs = np.abs(chis - reference) if reference is not None else np.abs(np.diff(chis))
    orders = [math.log2(e0 / e1) for e0, e1 in zip(errs, errs[1:]) if e0 > 1e-13 and e1 > 1e-13]
    return chis, (min(orders) if orders else math.inf)


# -- transition functions ----------------------------------------------------------

@dataclass
class TransitionReport:
    lam: np.ndarray
    gauge_residual: float      # max |ω_B - ω_A + dλ|
    orthogonality_error: float
    reflected: bool
    windings: list[float]
    signature: Signature

    @property
    def single_valued(self) -> bool:
        return all(abs(w - round(w)) < 1e-6 for w in self.windings)

    @property
    def lam_spread(self) -> float:
        finite = self.lam[np.isfinite(self.lam)]
        return float(np.ptp(finite)) if finite.size else math.nan


def _relative_transform(cfA: Coframe, cfB: Coframe):
    """Λ = Θ_B Θ_A⁻¹ as jets, entries ``L[a][b]``."""
    e = cfA.inverse()  # e[mu][a]
    return [[cfB.theta[a][0] * e[0][b] + cfB.theta[a][1] * e[1][b] for b in range(2)] for a in range(2)]


def _lambda_values(L, sig: Signature):
    if sig is Signature.RIEMANNIAN:
        return np.arctan2(L[0][1].v, L[0][0].v)
    return np.arctanh(L[0][1].v / L[0][0].v)


def transition_check(frame_a: FrameFn, frame_b: FrameFn, overlap: GridSpec,
                     loops: Sequence[Callable] = (), loop_steps: int = 256) -> TransitionReport:
    """Compare two coframe fields on an overlap.

    The pointwise transformation Λ = Θ_B Θ_A⁻¹ must be a rotation (or boost)
    by λ; then ω_B = ω_A - dλ.  If the two frames have opposite orientation
    the second one is reflected first.  Windings of λ along the closed
    ``loops`` (callables s -> (x1, x2), s in [0, 1]) are obtained by
    unwrapping sampled angles.
    """
    X1, X2 = overlap.points()
    keep = ~overlap.excluded()
    p = (X1[keep], X2[keep])
    cfA, cfB = frame_a(p), frame_b(p)
    if cfA.signature is not cfB.signature:
        raise GeometryError("frames of different signature")
    sig = cfA.signature
    sA, sB = np.sign(cfA.det().v), np.sign(cfB.det().v)
    reflected = False
    if np.all(sA != sB):
        reflected = True
    elif np.any(sA != sB):
        raise GeometryError("relative orientation of the frames changes over the overlap")

    def relation(p):
        A, B = frame_a(p), frame_b(p)
        if reflected:
            B = B.reflected()
        return A, B, _relative_transform(A, B)

    cfA, cfB, L = relation(p)
    if sig is Signature.RIEMANNIAN:
        ortho = np.maximum.reduce([np.abs(L[0][0].v - L[1][1].v), np.abs(L[0][1].v + L[1][0].v),
                                   np.abs(L[0][0].v ** 2 + L[0][1].v ** 2 - 1)])
    else:
        ortho = np.maximum.reduce([np.abs(L[0][0].v - L[1][1].v), np.abs(L[0][1].v - L[1][0].v),
                                   np.abs(L[0][0].v ** 2 - L[0][1].v ** 2 - 1)])
    lam = np.full(X1.shape, np.nan)
    lam[keep] = _lambda_values(L, sig)
    # dλ = Λ11 dΛ12 - Λ12 dΛ11 for both groups
    dlam = [L[0][0].v * jets.partial(L[0][1], k).v - L[0][1].v * jets.partial(L[0][0], k).v for k in range(2)]
    wA = connection_from_cartan(cfA).coord
    wB = connection_from_cartan(cfB).coord
    resid = max(float(np.max(np.abs(wB[k].v - wA[k].v + dlam[k]))) for k in range(2))

    windings = []
    for loop in loops:
        s = np.linspace(0.0, 1.0, loop_steps + 1)
        c1, c2 = loop(s)
        c1, c2 = np.broadcast_arrays(np.asarray(c1, float), np.asarray(c2, float))
        _, _, Ll = relation((c1, c2))
        vals = _lambda_values(Ll, sig)
        if sig is Signature.RIEMANNIAN:
            windings.append(float((np.unwrap(vals)[-1] - vals[0]) / TWO_PI))
        else:
            windings.append(float(vals[-1] - vals[0]))
    return TransitionReport(lam, resid, float(np.max(ortho)), reflected, windings, sig)


# -- spectrum search -------------------------------------------------------------

@dataclass(frozen=True)
class SpectrumProbe:
    """What a parameter point contributes: the connection used for
    holonomies, an optional reference connection (a second frame) for
    transition windings, and an optional Riemannian metric for χ."""

    connection: ConnectionField
    reference: ConnectionField | None = None
    metric: MetricField2 | None = None


class Constraint(NamedTuple):
    invariant: str
    kind: str                 # "integrality" or "jump"
    detail: str
    locations: tuple[float, ...]


@dataclass
class SpectrumReport:
    parameter: str
    values: list[float]
    invariants: dict[str, list[float]]
    errors: dict[float, str]
    constraints: list[Constraint]


def paper_frame_connection(fam: Family, sign: float = 1.0) -> ConnectionField:
    """Connection of the family's printed frame; ``sign = -1`` reflects the
    frame (Θ² -> -Θ² sends ω -> -ω)."""
    def form(x1, x2):
        with jets.lenient(), np.errstate(all="ignore"):
            conn = connection_from_cartan(fam.paper_coframe((x1, x2)))
        return sign * conn.coord[0].v, sign * conn.coord[1].v
    return form


def lower_triangular_connection(metric: MetricField2) -> ConnectionField:
    def form(x1, x2):
        with jets.lenient(), np.errstate(all="ignore"):
            conn = connection_from_cartan(build_coframe(metric.at((x1, x2)), metric.signature))
        return conn.coord[0].v, conn.coord[1].v
    return form


def _generic_point(domain):
    (a1, b1), (a2, b2) = domain
    return np.array([a1 + 0.3719 * (b1 - a1)]), np.array([a2 + 0.6143 * (b2 - a2)])


def family_probe(fam: Family) -> SpectrumProbe:
    """The printed frame (when the family has one) with the lower-triangular
    frame as reference.  The printed frame is reflected if needed so both
    carry the chart orientation."""
    metric = fam.metric()
    lt = lower_triangular_connection(metric)
    if type(fam).paper_coframe is Family.paper_coframe:
        return SpectrumProbe(lt, None, metric)
    p = _generic_point(fam.default_domain)
    sign = float(np.sign(fam.paper_coframe(p).det().v[0] * build_coframe(metric.at(p)).det().v[0]))
    return SpectrumProbe(paper_frame_connection(fam, sign), lt, metric)


def synthetic_monopole(c: float) -> SpectrumProbe:
    """Flat annulus in polar coordinates (r, θ) carrying ω = c dθ: a U(1)
    connection whose holonomy 2πc varies continuously with c."""
    def form(r, th):
        r = np.asarray(r, float)
        return np.zeros_like(r), np.full_like(r, float(c))
    return SpectrumProbe(form, None, None)


class PiecewiseLoop:
    """Closed polygonal loop, s ∈ [0, 1].  Holonomies integrate each
    straight piece separately so the kinks never fall inside a Simpson
    panel."""

    def __init__(self, vertices, close: bool = True):
        v = np.asarray(vertices, float)
        if close and not np.allclose(v[0], v[-1]):
            v = np.vstack([v, v[:1]])
        self.vertices = v

    @property
    def pieces(self):
        return [_segment(a, b) for a, b in zip(self.vertices[:-1], self.vertices[1:])]

    def __call__(self, s):
        n = len(self.vertices) - 1
        x = s * float(n)
        k = np.clip(np.floor(jets.value(x)), 0, n - 1).astype(int)
        frac = x - k
        p0, p1 = self.vertices[k], self.vertices[k + 1]
        return frac * (p1[..., 0] - p0[..., 0]) + p0[..., 0], frac * (p1[..., 1] - p0[..., 1]) + p0[..., 1]


def _segment(a, b):
    def curve(s):
        return a[0] + (b[0] - a[0]) * s, a[1] + (b[1] - a[1]) * s
    return curve


def rectangle_loop(bounds) -> PiecewiseLoop:
    """Counter-clockwise boundary of a chart rectangle."""
    (a1, b1), (a2, b2) = bounds
    return PiecewiseLoop([(a1, a2), (b1, a2), (b1, b2), (a1, b2)])


def circle_loop(axis_fixed: int, value: float, period: tuple[float, float]) -> PiecewiseLoop:
    """Coordinate line ``x^axis_fixed = value`` along a periodic axis.  It
    closes through the identification, not in the chart, so it is treated
    as a single open piece."""
    lo, hi = period
    a = (value, lo) if axis_fixed == 0 else (lo, value)
    b = (value, hi) if axis_fixed == 0 else (hi, value)
    return PiecewiseLoop([a, b], close=False)


def _loop_integral(form: ConnectionField, curve, n_steps: int) -> Holonomy:
    """Holonomy of a smooth or :class:`PiecewiseLoop` closed curve."""
    pieces = getattr(curve, "pieces", None)
    if pieces is None:
        return loop_holonomy(form, curve, n_steps)
    parts = [line_integral(form, c, n_steps) for c in pieces]
    return Holonomy(sum(h.value for h in parts), sum(h.error for h in parts))


def _invariants(probe: SpectrumProbe, loops, domains, n_steps, panels):
    out = {}
    for k, loop in enumerate(loops):
        hol = _loop_integral(probe.connection, loop, n_steps)
        out[f"holonomy[{k}]"] = (hol.value / TWO_PI, hol.error / TWO_PI)
        if probe.reference is not None:
            ref = _loop_integral(probe.reference, loop, n_steps)
            out[f"winding[{k}]"] = ((hol.value - ref.value) / TWO_PI, (hol.error + ref.error) / TWO_PI)
    for k, dom in enumerate(domains):
        if probe.metric is None:
            continue
        res = euler_number(probe.metric, dom, panels=panels, levels=2)
        out[f"chi[{k}]"] = (res.chi, res.error)
    for name, (val, err) in out.items():
        if not (math.isfinite(val) and math.isfinite(err)):
            raise GeometryError(f"{name} is not finite (degenerate frame on a loop or domain)")
    return out


def spectrum_search(make_probe, parameter: str, values: Sequence[float], loops: Sequence[Callable] = (),
                    domains: Sequence[EulerDomain] = (), require_single_valued: bool = False,
                    n_steps: int = 256, panels: tuple[int, int] = (32, 32), int_tol: float = 1e-6,
                    refine_depth: int = 30) -> SpectrumReport:
    """Sweep ``parameter`` and look for topological consistency conditions.

    ``make_probe(value)`` returns a :class:`SpectrumProbe` (or a family).
    Tracked invariants per point: holonomies ∮ω / 2π around each loop,
    transition windings ∮(ω - ω_ref) / 2π, and χ for each domain.  χ and
    the windings must be integers; the holonomies must be too when
    ``require_single_valued`` asks for a single-valued gauge function that
    trivializes ω on the loops.  A constraint is reported when a required
    integer invariant is not integral over a continuous parameter range
    (the allowed values are then located by bisection) or when its integer
    value jumps between neighbouring samples (the jump is bracketed by
    bisection).  The threshold is ``max(int_tol, 10 x quadrature error)``.
    """
    def probe_at(v):
        pr = make_probe(v)
        return family_probe(pr) if isinstance(pr, Family) else pr

    table: dict[str, list[float]] = {}
    errs: dict[str, list[float]] = {}
    good, errors = [], {}
    for v in values:
        try:
            inv = _invariants(probe_at(v), loops, domains, n_steps, panels)
        except (SolutionsError, GeometryError, ValueError) as err:
            errors[float(v)] = str(err)
            continue
        good.append(float(v))
        for k, (val, e) in inv.items():
            table.setdefault(k, []).append(val)
            errs.setdefault(k, []).append(e)

    def evaluate(name, v):
        return _invariants(probe_at(v), loops, domains, n_steps, panels)[name][0]

    def bisect(left_side, a, b):
        # left_side(m) tells whether m belongs with a; stops early if a
        # midpoint cannot be evaluated
        for _ in range(refine_depth):
            m = 0.5 * (a + b)
            try:
                side = left_side(m)
            except (SolutionsError, GeometryError, ValueError):
                break
            a, b = (m, b) if side else (a, m)
        return 0.5 * (a + b)

    constraints = []
    for name, vals in table.items():
        required = name.startswith(("chi", "winding")) or require_single_valued
        if not required:
            continue
        vals = np.array(vals)
        tol = np.maximum(int_tol, 10 * np.array(errs[name]))
        integral = np.abs(vals - np.round(vals)) <= tol
        if not integral.all():
            allowed = [v for v, ok in zip(good, integral) if ok]
            for i in range(len(vals) - 1):
                f0, f1 = vals[i], vals[i + 1]
                for k in range(math.ceil(min(f0, f1)), math.floor(max(f0, f1)) + 1):
                    if (f0 - k) * (f1 - k) < 0 and not (integral[i] or integral[i + 1]):
                        s0 = np.sign(f0 - k)
                        allowed.append(bisect(lambda m: np.sign(evaluate(name, m) - k) == s0,
                                              good[i], good[i + 1]))
            constraints.append(Constraint(
                name, "integrality",
                f"{name} varies continuously from {vals.min():.6g} to {vals.max():.6g}; "
                f"integrality restricts {parameter} to a discrete set",
                tuple(sorted(set(round(float(x), 12) for x in allowed)))))
            continue
        ints = np.round(vals)
        for i in np.flatnonzero(np.diff(ints)):
            ia = ints[i]
            where = bisect(lambda m: round(evaluate(name, m)) == ia, good[i], good[i + 1])
            constraints.append(Constraint(name, "jump", f"{name} jumps from {ints[i]:g} to {ints[i + 1]:g}",
                                          (where,)))
    return SpectrumReport(parameter, good, {k: list(map(float, v)) for k, v in table.items()}, errors, constraints)


def family_sweep(name: str, parameter: str, base: dict | None = None, as_string: bool = False):
    """``make_probe`` for :func:`spectrum_search` varying one family parameter."""
    base = dict(base or {})

    def make(v):
        cfg = dict(base)
        cfg[parameter] = repr(float(v)) if as_string else float(v)
        return make_family(name, cfg)
    return make
