"""Generalized harmonic maps with a two-dimensional base.

A :class:`GhmSystem` bundles a base metric ``g_ab(x)``, a target metric
``G_AB(y, x)`` that may depend explicitly on the base coordinates, and the
embedding fields ``y^A(x)``.  Everything here is evaluated pointwise (over
batches of points) with order-3 jets of the fields, so the field equations
and the divergence of the energy-momentum tensor are exact up to rounding.

Target metrics are plain callables ``G(y, x) -> n x n nested sequence``
written with :mod:`ghmtq.jets` functions; their partial derivatives with
respect to ``y`` and to the explicit ``x`` are taken by re-seeding jets.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np

from . import jets
from .geometry import GeometryError, MetricJets, Signature, detect_signature
from .jets import Jet

TargetFn = Callable[[Sequence[Jet], tuple[Jet, Jet]], Sequence[Sequence]]


@dataclass(frozen=True)
class BaseMetric:
    components: Callable[[Jet, Jet], tuple]
    signature: Signature = Signature.RIEMANNIAN


@dataclass(frozen=True)
class TargetMetric:
    """``G_AB(y, x)`` on an ``n``-dimensional target.

    ``extension`` flags the coordinates of a dimensional-extension sector;
    the block structure is verified by :meth:`extension_violation`.
    """

    n: int
    G: TargetFn
    extension: tuple[bool, ...] = ()

    def __post_init__(self):
        if self.extension and len(self.extension) != self.n:
            raise ValueError("extension flags must match the target dimension")

    @property
    def ext(self) -> np.ndarray:
        return np.array(self.extension or (False,) * self.n)

    def _matrix(self, y, x, shape, order) -> list[list[Jet]]:
        G = self.G(y, x)
        return [[jets.as_jet(G[A][B], shape, order) for B in range(self.n)] for A in range(self.n)]

    def values(self, y, x) -> np.ndarray:
        """G_AB at plain values; shape ``(n, n, *batch)``."""
        y = [np.asarray(v, dtype=float) for v in y]
        x = [np.asarray(v, dtype=float) for v in x]
        shape = np.broadcast_shapes(*(v.shape for v in y + x))
        yj = [jets.as_jet(np.broadcast_to(v, shape), shape, 0) for v in y]
        xj = tuple(jets.as_jet(np.broadcast_to(v, shape), shape, 0) for v in x)
        M = self._matrix(yj, xj, shape, 0)
        return np.array([[M[A][B].v for B in range(self.n)] for A in range(self.n)])

    def _seeded(self, y, x, which: str) -> np.ndarray:
        y = [np.asarray(v, dtype=float) for v in y]
        x = [np.asarray(v, dtype=float) for v in x]
        shape = np.broadcast_shapes(*(v.shape for v in y + x))
        y = [np.broadcast_to(v, shape) for v in y]
        x = [np.broadcast_to(v, shape) for v in x]
        zero = np.zeros(shape)
        count = self.n if which == "y" else 2
        out = np.zeros((count, self.n, self.n) + shape)
        for first in range(0, count, 2):
            pair = [first, first + 1] if first + 1 < count else [first]
            s1 = y[pair[0]] if which == "y" else x[pair[0]]
            s2 = (y[pair[1]] if which == "y" else x[pair[1]]) if len(pair) > 1 else zero
            v1, v2 = jets.variables(s1, s2, order=1)
            seeded = {pair[0]: v1}
            if len(pair) > 1:
                seeded[pair[1]] = v2
            if which == "y":
                yj = [seeded.get(A, jets.as_jet(y[A], shape, 1)) for A in range(self.n)]
                xj = tuple(jets.as_jet(v, shape, 1) for v in x)
            else:
                yj = [jets.as_jet(v, shape, 1) for v in y]
                xj = tuple(seeded.get(a, jets.as_jet(x[a], shape, 1)) for a in range(2))
            M = self._matrix(yj, xj, shape, 1)
            for k, var in enumerate(pair):
                for A in range(self.n):
                    for B in range(self.n):
                        out[var, A, B] = M[A][B].d1[k]
        return out

    def dy(self, y, x) -> np.ndarray:
        """∂G_AB/∂y^C, shape ``(n_C, n, n, *batch)``."""
        return self._seeded(y, x, "y")

    def dx(self, y, x) -> np.ndarray:
        """Explicit ∂G_AB/∂x^a at fixed y, shape ``(2, n, n, *batch)``."""
        return self._seeded(y, x, "x")

    def extension_violation(self, y, x) -> float:
        """Largest violation of G_{AÃ} = 0, ∂_Ã G_AB = 0, ∂_A G_ÃB̃ = 0."""
        ext = self.ext
        if not ext.any():
            return 0.0
        G = self.values(y, x)
        dG = self.dy(y, x)
        grav = ~ext
        checks = [
            np.abs(G[np.ix_(grav, ext)]),
            np.abs(dG[np.ix_(ext, grav, grav)]),
            np.abs(dG[np.ix_(grav, ext, ext)]),
        ]
        return float(max(c.max(initial=0.0) for c in checks))


@dataclass(frozen=True)
class GhmMap:
    fields: tuple[Callable[[Jet, Jet], Jet], ...]


@dataclass(frozen=True)
class GhmSystem:
    base: BaseMetric
    target: TargetMetric
    map: GhmMap
    name: str = ""
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if len(self.map.fields) != self.target.n:
            raise ValueError(f"{len(self.map.fields)} fields for a {self.target.n}-dimensional target")

    @property
    def n(self) -> int:
        return self.target.n


class _State:
    """Everything the GHM formulas need at a batch of points."""

    def __init__(self, sys: GhmSystem, p):
        x1, x2 = jets._split_points(p)
        self.x = jets.variables(x1, x2)
        shape = self.x[0].shape
        self.shape = shape
        self.y = [jets.evaluate(f, (x1, x2)) for f in sys.map.fields]
        self.dy = [jets.grad(yA) for yA in self.y]  # dy[A][a], order 2

        g = [jets.as_jet(c, shape) for c in sys.base.components(*self.x)]
        self.g = g
        det = g[0] * g[2] - g[1] * g[1]
        if np.any(det.v == 0):
            raise GeometryError("degenerate base metric")
        self.sqrtg = jets.sqrt(det * np.sign(det.v))
        self.ginv = ((g[2] / det, -g[1] / det), (-g[1] / det, g[0] / det))

        T = sys.target
        self.G_total = T._matrix(self.y, self.x, shape, jets.MAX_ORDER)
        yv = [yA.v for yA in self.y]
        xv = [x1 * np.ones(shape), x2 * np.ones(shape)]
        self.Gv = np.array([[c.v for c in row] for row in self.G_total])
        self.dGy = T.dy(yv, xv)
        self.dGx = T.dx(yv, xv)
        try:
            self.Ginv = np.moveaxis(np.linalg.inv(np.moveaxis(self.Gv, (0, 1), (-2, -1))), (-2, -1), (0, 1))
        except np.linalg.LinAlgError:
            raise GeometryError("degenerate target metric") from None
        self.dyv = np.array([[d.v for d in row] for row in self.dy])  # (n, 2, *b)
        self.ginvv = np.array([[c.v for c in row] for row in self.ginv])


def _sector_mask(sys: GhmSystem, sector: str | None) -> np.ndarray:
    ext = sys.target.ext
    if sector in (None, "all"):
        return np.ones(sys.n, bool)
    if sector == "field":
        return ~ext
    if sector == "extension":
        return ext
    raise ValueError(f"unknown sector {sector!r}")


def _induced(st: _State, mask) -> MetricJets:
    idx = np.flatnonzero(mask)
    out = []
    for a, b in ((0, 0), (0, 1), (1, 1)):
        acc = jets.as_jet(0.0, st.shape, 2)
        for A in idx:
            for B in idx:
                acc = acc + st.dy[A][a] * st.dy[B][b] * st.G_total[A][B]
        out.append(acc)
    return tuple(out)


def induced_metric(sys: GhmSystem, p, sector: str | None = None) -> MetricJets:
    """Pullback ``h_ab = ∂_a y^A ∂_b y^B G_AB(y, x)`` as order-2 jets."""
    return _induced(_State(sys, p), _sector_mask(sys, sector))


def induced_signature(sys: GhmSystem, p) -> Signature:
    return detect_signature(induced_metric(sys, p))


class Lagrangian(NamedTuple):
    total: Jet
    explicit: np.ndarray  # (2, *batch): ∂L/∂x^a through G's explicit x-dependence


def _lagrangian(st: _State, mask) -> Lagrangian:
    h = _induced(st, mask)
    gi = st.ginv
    trace = gi[0][0] * h[0] + 2.0 * gi[0][1] * h[1] + gi[1][1] * h[2]
    total = st.sqrtg * trace
    idx = np.flatnonzero(mask)
    dGx = st.dGx[np.ix_(range(2), idx, idx)]
    dyv = st.dyv[idx]
    explicit = np.einsum("...,ab...,Aa...,Bb...,cAB...->c...", st.sqrtg.v, st.ginvv, dyv, dyv, dGx)
    return Lagrangian(total, explicit)


def lagrangian_density(sys: GhmSystem, p, sector: str | None = None) -> Lagrangian:
    """``L = sqrt|g| g^ab ∂_a y^A ∂_b y^B G_AB(y, x)``."""
    return _lagrangian(_State(sys, p), _sector_mask(sys, sector))


def target_christoffel(Ginv: np.ndarray, dG: np.ndarray) -> np.ndarray:
    """Γ^A_BC from G^AD and ∂_C G_AB (``dG[C, A, B]``)."""
    lower =0.5 * (np.einsum("BDC...->DBC...", dG) + np.einsum("CDB...->DBC...", dG) - dG)
    return np.einsum("AD...,DBC...->ABC...", Ginv, lower)


def field_eq_residual(sys: GhmSystem, p) -> np.ndarray:
    """Residual of the GHM field equations, one row per target coordinate:

    (1/sqrt|g|) ∂_a(sqrt|g| g^ab ∂_b y^A) + Γ^A_BC g^ab ∂_a y^B ∂_b y^C
        + G^AB g^ab ∂_a y^C ∂_b G_BC|explicit

    Extension-sector rows are the dimensional-extension equations; they
    reduce to flat harmonicity when that block is constant.
    """
    st = _State(sys, p)
    n = sys.n
    lap = np.empty((n,) + st.shape)
    for A in range(n):
        flux = [st.sqrtg * (st.ginv[a][0] * st.dy[A][0] + st.ginv[a][1] * st.dy[A][1]) for a in range(2)]
        div = jets.partial(flux[0], 0) + jets.partial(flux[1], 1)
        lap[A] = div.v / st.sqrtg.v
    gamma = target_christoffel(st.Ginv, st.dGy)
    quad = np.einsum("ABC...,ab...,Ba...,Cb...->A...", gamma, st.ginvv, st.dyv, st.dyv)
    explicit = np.einsum("AB...,ab...,Ca...,bBC...->A...", st.Ginv, st.ginvv, st.dyv, st.dGx)
    return lap + quad + explicit


@dataclass(frozen=True)
class EnergyMomentum:
    T11: np.ndarray
    T12: np.ndarray
    T22: np.ndarray

    def as_array(self) -> np.ndarray:
        return np.array([[self.T11, self.T12], [self.T12, self.T22]])


def _stress(st: _State, mask) -> tuple[Jet, Jet, Jet]:
    h = _induced(st, mask)
    g, gi = st.g, st.ginv
    trace = gi[0][0] * h[0] + 2.0 * gi[0][1] * h[1] + gi[1][1] * h[2]
    return tuple(st.sqrtg * (h[k] - 0.5 * g[k] * trace) for k in range(3))


def energy_momentum(sys: GhmSystem, p, sector: str | None = None) -> EnergyMomentum:
    """``T_ab = sqrt|g| (h_ab - ½ g_ab g^cd h_cd)``.

    ``sector`` restricts ``h`` to the gravitational (``"field"``) or
    dimensional-extension (``"extension"``) coordinates; with a
    block-diagonal target the two pieces add up to the full tensor.
    """
    T = _stress(_State(sys, p), _sector_mask(sys, sector))
    return EnergyMomentum(*(t.v for t in T))


class Conservation(NamedTuple):
    residual: np.ndarray       # (2, *batch): ∇_b T_a^b + ½ ∂L/∂x^a
    integrability: np.ndarray  # ∂_1 T_21 + ∂_2 T_22
    field_residual: np.ndarray | None


def _base_christoffel(st: _State) -> np.ndarray:
    g = st.g
    gm = [[g[0], g[1]], [g[1], g[2]]]
    dg = np.array([[[jets.partial(gm[a][b], c).v for b in range(2)] for a in range(2)] for c in range(2)])  # [c,a,b]
    lower = 0.5 * (np.einsum("bda...->dba...", dg) + np.einsum("adb...->dba...", dg) - dg)  # [d,b,a]
    return np.einsum("cd...,dba...->cba...", st.ginvv, lower)


def conservation_residual(sys: GhmSystem, p, sector: str | None = None,
                          with_field_residual: bool = False) -> Conservation:
    """Generalized conservation law ``∇_b T_a^b + ½ ∂L/∂x^a``.

    T is a weight-one density, so ``∇_b T_a^b = ∂_b T_a^b - Γ^c_ba T_c^b``.
    The explicit derivative of L only sees the explicit x-dependence of G;
    the base metric's x-dependence is carried by the covariant derivative.
    Near zero only on shell.
    """
    st = _State(sys, p)
    mask = _sector_mask(sys, sector)
    T = _stress(st, mask)
    Tm = [[T[0], T[1]], [T[1], T[2]]]
    gi = st.ginv
    mixed = [[gi[b][0] * Tm[0][a] + gi[b][1] * Tm[1][a] for a in range(2)] for b in range(2)]  # T^b_a
    gamma = _base_christoffel(st)
    mixed_v = np.array([[m.v for m in row] for row in mixed])
    lag = _lagrangian(st, mask)
    res = np.empty((2,) + st.shape)
    for a in range(2):
        div = jets.partial(mixed[0][a], 0).v + jets.partial(mixed[1][a], 1).v
        div -= np.einsum("cb...,bc...->...", gamma[:, :, a], mixed_v)
        res[a] = div + 0.5 * lag.explicit[a]
    integ = jets.partial(T[1], 0).v + jets.partial(T[2], 1).v
    fres = field_eq_residual(sys, p) if with_field_residual else None
    return Conservation(res, integ, fres)


def conservation_identity(sys: GhmSystem, p) -> np.ndarray:
    """Off-shell value the conservation residual must take:
    ``sqrt|g| G_AB ∂_a y^A E^B`` with E the field-equation residual."""
    st = _State(sys, p)
    E = field_eq_residual(sys, p)
    return np.einsum("...,AB...,Aa...,B...->a...", st.sqrtg.v, st.Gv, st.dyv, E)


def system_metric(sys: GhmSystem, sector: str | None = None,
                  signature: Signature = Signature.RIEMANNIAN):
    """The induced metric as a :class:`~ghmtq.geometry.MetricField2`.

    The returned callable must be fed seeded coordinate jets (as done by
    ``MetricField2.at``), since it differentiates the fields.
    """
    from .geometry import MetricField2

    idx = np.flatnonzero(_sector_mask(sys, sector))

    def components(x1, x2):
        shape, order = x1.shape, x1.order
        y = [jets.as_jet(f(x1, x2), shape, order) for f in sys.map.fields]
        dy = [jets.grad(v) for v in y]
        G = sys.target._matrix(y, (x1, x2), shape, order)
        out = []
        for a, b in ((0, 0), (0, 1), (1, 1)):
            acc = jets.as_jet(0.0, shape, order - 1)
            for A in idx:
                for B in idx:
                    acc = acc + dy[A][a] * dy[B][b] * G[A][B]
            out.append(acc)
        return tuple(out)

    return MetricField2(components, signature)
