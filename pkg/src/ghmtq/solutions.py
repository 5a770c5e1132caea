"""Catalog of gravitational configurations written as generalized harmonic maps.

Every family is a frozen dataclass whose fields are the configuration
(formula strings compiled with :mod:`ghmtq.expr`, plus numeric parameters).
Families know how to build their :class:`~ghmtq.ghm.GhmSystem`, their own
printed coframe, the closed-form connection and Ricci scalar where one is
known, their hand-written main field equations, and the right-hand sides of
the quadrature equations for the leftover metric function (κ or λ).

Family ids: ``axisym``, ``schwarzschild``, ``gowdy``, ``gowdy_avtd``,
``gowdy_paper_metric``, ``einstein_rosen``, ``weyl_static``.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import ClassVar, NamedTuple, Sequence

import numpy as np

from . import jets
from .expr import compile_expr
from .geometry import (Coframe, MetricField2, Signature, connection_from_cartan,
                       curvature)
from .ghm import BaseMetric, GhmMap, GhmSystem, TargetMetric, energy_momentum, system_metric
from .jets import Jet

SQRT2 = math.sqrt(2.0)

CURZON_PSI = "-m/sqrt(rho**2 + z**2)"
CURZON_KAPPA = "-m**2*rho**2/(2*(rho**2 + z**2)**2)"


class SolutionsError(ValueError):
    """Invalid configuration, degenerate frame, or missing closed form."""


class IntegrabilityError(SolutionsError):
    def __init__(self, message, residual):
        super().__init__(message)
        self.residual = residual


def _d(u: Jet) -> dict:
    """First and second partials of a jet by subscript name."""
    return {"": u.v, "1": u.deriv(1, 0), "2": u.deriv(0, 1),
            "11": u.deriv(2, 0), "12": u.deriv(1, 1), "22": u.deriv(0, 2)}


def _probe_points(domain, n: int = 7):
    (a1, b1), (a2, b2) = domain
    g1 = np.linspace(a1, b1, n)
    g2 = np.linspace(a2, b2, n)
    X1, X2 = np.meshgrid(g1, g2, indexing="ij")
    return X1.ravel(), X2.ravel()


@dataclass(frozen=True)
class Family:
    name: ClassVar[str]
    coords: ClassVar[tuple[str, str]]
    field_names: ClassVar[tuple[str, ...]] = ()
    # generic field_eq_residual == main_eq_factor * main_eq_residuals
    main_eq_factor: ClassVar[float | None] = None
    # quadrature gradient == stress_factor * (T[stress_map[0]], T[stress_map[1]])
    stress_map: ClassVar[tuple[str, str] | None] = None
    stress_factor: ClassVar[float] = 1.0
    stress_sector: ClassVar[str | None] = None
    potential_name: ClassVar[str] = "kappa"
    default_domain: ClassVar[tuple]

    def __post_init__(self):
        self.validate()

    # -- configuration ----------------------------------------------------
    @property
    def params(self) -> dict:
        return {f.name: getattr(self, f.name) for f in dataclasses.fields(self)
                if isinstance(getattr(self, f.name), (int, float)) and not isinstance(getattr(self, f.name), bool)}

    def config(self) -> dict:
        return dataclasses.asdict(self)

    def _expr(self, source: str):
        return compile_expr(source, self.coords, self.params)

    def fields(self) -> tuple:
        raise SolutionsError(f"{self.name} has no GHM fields")

    def validate(self) -> None:
        pass

    # -- systems and metrics ----------------------------------------------
    def system(self) -> GhmSystem:
        raise SolutionsError(f"{self.name} is not a generalized harmonic map")

    def metric(self) -> MetricField2:
        return system_metric(self.system())

    def field_jets(self, p) -> list[Jet]:
        return [jets.evaluate(f, p) for f in self.fields()]

    # -- frames and closed forms ------------------------------------------
    def paper_coframe(self, p) -> Coframe:
        raise SolutionsError(f"no printed coframe for {self.name}")

    def closed_form_connection(self, p) -> np.ndarray:
        raise SolutionsError(f"no closed-form connection for {self.name}")

    def closed_form_ricci(self, p) -> np.ndarray:
        raise SolutionsError(f"no closed-form Ricci scalar for {self.name}")

    def main_eq_residuals(self, p) -> np.ndarray:
        raise SolutionsError(f"no main field equations for {self.name}")

    def quadrature_jets(self, p) -> tuple[Jet, Jet]:
        raise SolutionsError(f"no quadrature equations for {self.name}")

    def closed_form_potential(self, p) -> np.ndarray | None:
        return None


def _coframe(t11, t12, t21, t22, convention="paper_frame") -> Coframe:
    shape = t11.shape
    return Coframe(((t11, jets.as_jet(t12, shape)), (jets.as_jet(t21, shape), t22)),
                   Signature.RIEMANNIAN, convention)


def _check_nonzero(value, what: str, tol: float = 1e-12):
    value = np.asarray(value)
    bad = np.abs(value) <= tol
    if bad.any() and jets.is_strict():
        raise SolutionsError(f"frame degeneracy: {what} vanishes at {int(bad.sum())} point(s)")


# ---------------------------------------------------------------------------
# stationary axisymmetric, y = (f, Ω) on the (ρ, z) half-plane

def _axisym_main(f: Jet, W: Jet | None, rho):
    fd = _d(f)
    Wd = _d(W) if W is not None else {k: 0.0 for k in fd}
    e1 = (fd["11"] + fd["1"] / rho + fd["22"]
          - (fd["1"] ** 2 + fd["2"] ** 2 - Wd["1"] ** 2 - Wd["2"] ** 2) / fd[""])
    e2 = (Wd["11"] + Wd["1"] / rho + Wd["22"]
          - 2.0 / fd[""] * (fd["1"] * Wd["1"] + fd["2"] * Wd["2"]))
    return e1, e2


def _axisym_quadrature(f: Jet, W: Jet | None, rho: Jet):
    f1, f2 = jets.grad(f)
    k1 = rho / (4.0 * f * f) * (f1 * f1 - f2 * f2)
    k2 = rho / (2.0 * f * f) * (f1 * f2)
    if W is not None:
        W1, W2 = jets.grad(W)
        k1 = k1 + rho / (4.0 * f * f) * (W1 * W1 - W2 * W2)
        k2 = k2 + rho / (2.0 * f * f) * (W1 * W2)
    return k1, k2


@dataclass(frozen=True)
class Axisym(Family):
    """Stationary axisymmetric fields: g = δ, G = ρ/(2f²) δ on (f, Ω)."""

    name: ClassVar[str] = "axisym"
    coords: ClassVar[tuple[str, str]] = ("rho", "z")
    field_names: ClassVar[tuple[str, ...]] = ("f", "Omega")
    main_eq_factor: ClassVar[float] = 1.0
    stress_map: ClassVar[tuple[str, str]] = ("T11", "T12")
    default_domain: ClassVar[tuple] = ((0.5, 2.0), (-1.0, 1.0))

    f: str = "1 + 0.3*rho**2 + 0.2*z"
    Omega: str = "0.4*rho*z + 0.3*z**2 + 0.1*rho"

    def validate(self):
        W = self._expr(self.Omega)
        if not (W.depends_on("rho") or W.depends_on("z")):
            raise SolutionsError("constant Omega makes the target one-dimensional; "
                                 "use the weyl_static family (dimensional extension)")

    def fields(self):
        return (self._expr(self.f), self._expr(self.Omega))

    def system(self):
        return GhmSystem(
            BaseMetric(lambda rho, z: (1.0, 0.0, 1.0)),
            TargetMetric(2, lambda y, x: [[x[0] / (2 * y[0] * y[0]), 0.0], [0.0, x[0] / (2 * y[0] * y[0])]]),
            GhmMap(self.fields()), self.name)

    def main_eq_residuals(self, p):
        f, W = self.field_jets(p)
        return np.array(_axisym_main(f, W, jets._split_points(p)[0]))

    def quadrature_jets(self, p):
        f, W = self.field_jets(p)
        rho, _ = jets.variables(*jets._split_points(p))
        return _axisym_quadrature(f, W, rho)


@dataclass(frozen=True)
class WeylStatic(Family):
    """Static axisymmetric fields with the dimensional extension
    y = (f, X), f = exp(2 ψ_N), G = diag(ρ/(2f²), 1)."""

    name: ClassVar[str] = "weyl_static"
    coords: ClassVar[tuple[str, str]] = ("rho", "z")
    field_names: ClassVar[tuple[str, ...]] = ("f", "X")
    main_eq_factor: ClassVar[float] = 1.0
    stress_map: ClassVar[tuple[str, str]] = ("T11", "T12")
    stress_sector: ClassVar[str] = "field"
    default_domain: ClassVar[tuple] = ((0.5, 3.0), (-2.0, 2.0))

    psi: str = CURZON_PSI
    X: str = "z"
    m: float = 1.0
    kappa: str | None = None

    def validate(self):
        x1, x2 = _probe_points(self.default_domain)
        psi = jets.evaluate(self._expr(self.psi), (x1, x2))
        d = _d(psi)
        weyl = d["11"] + d["1"] / x1 + d["22"]
        if np.max(np.abs(weyl)) > 1e-10:
            raise SolutionsError(f"psi is not harmonic in the Weyl sense (residual {np.max(np.abs(weyl)):.3g})")
        X = jets.evaluate(self._expr(self.X), (x1, x2))
        if np.max(np.abs(X.deriv(2, 0) + X.deriv(0, 2))) > 1e-10:
            raise SolutionsError("extension field X is not harmonic")

    def fields(self):
        psi = self._expr(self.psi)
        return (lambda rho, z: jets.exp(2.0 * psi(rho, z)), self._expr(self.X))

    def system(self):
        return GhmSystem(
            BaseMetric(lambda rho, z: (1.0, 0.0, 1.0)),
            TargetMetric(2, lambda y, x: [[x[0] / (2 * y[0] * y[0]), 0.0], [0.0, 1.0]], (False, True)),
            GhmMap(self.fields()), self.name)

    def main_eq_residuals(self, p):
        f, X = self.field_jets(p)
        e1, _ = _axisym_main(f, None, jets._split_points(p)[0])
        return np.array([e1, X.deriv(2, 0) + X.deriv(0, 2)])

    def quadrature_jets(self, p):
        f, _ = self.field_jets(p)
        rho, _ = jets.variables(*jets._split_points(p))
        return _axisym_quadrature(f, None, rho)

    def closed_form_potential(self, p):
        source = self.kappa or (CURZON_KAPPA if self.psi == CURZON_PSI else None)
        if source is None:
            return None
        return jets.value(self._expr(source)(*jets._split_points(p)))


# ---------------------------------------------------------------------------
# Schwarzschild with the dimensional extension, chart (r, φ)

@dataclass(frozen=True)
class Schwarzschild(Family):
    """g = diag(1, r²), G = diag(r, 1) on y = (f, X) with f = a + b/r."""

    name: ClassVar[str] = "schwarzschild"
    coords: ClassVar[tuple[str, str]] = ("r", "phi")
    field_names: ClassVar[tuple[str, ...]] = ("f", "X")
    main_eq_factor: ClassVar[float] = 1.0
    default_domain: ClassVar[tuple] = ((2.5, 10.0), (0.0, 2 * math.pi))

    m: float = 1.0
    a: float = 1.0
    b: float | None = None
    X: str = "r*cos(phi)"

    @property
    def b_value(self) -> float:
        return -2.0 * self.m if self.b is None else float(self.b)

    @property
    def horizon(self) -> float:
        """Radius where f vanishes (r = 2m for the default family)."""
        return -self.b_value / self.a if self.a else math.inf

    @property
    def params(self):
        return {"m": self.m, "a": self.a, "b": self.b_value}

    def validate(self):
        if self.default_domain[0][0] <= 0:
            raise SolutionsError("r-domain must exclude r = 0")
        r, phi = _probe_points(self.default_domain)
        X = jets.evaluate(self._expr(self.X), (r, phi))
        res = X.deriv(2, 0) + X.deriv(1, 0) / r + X.deriv(0, 2) / r ** 2
        if np.max(np.abs(res)) > 1e-10:
            raise SolutionsError(f"extension field X is not harmonic (residual {np.max(np.abs(res)):.3g})")

    def fields(self):
        a, b = self.a, self.b_value
        return (lambda r, phi: a + b / r, self._expr(self.X))

    def system(self):
        return GhmSystem(
            BaseMetric(lambda r, phi: (1.0, 0.0, r * r)),
            TargetMetric(2, lambda y, x: [[x[0], 0.0], [0.0, 1.0]], (False, True)),
            GhmMap(self.fields()), self.name)

    def paper_coframe(self, p):
        """Θ¹ = dX, Θ² = sqrt(r) f′ dr."""
        f, X = self.field_jets(p)
        r, _ = jets.variables(*jets._split_points(p))
        _check_nonzero(X.deriv(0, 1), "∂_φ X")
        _check_nonzero(f.deriv(1, 0), "f′")
        Xr, Xphi = jets.grad(X)
        fr, _ = jets.grad(f)
        t21 = jets.sqrt(r) * fr
        return _coframe(Xr, Xphi, t21, 0.0 * Xr)

    def closed_form_connection(self, p):
        shape = np.broadcast_shapes(*(np.shape(c) for c in jets._split_points(p)))
        return np.zeros((2,) + shape)

    def closed_form_ricci(self, p):
        shape = np.broadcast_shapes(*(np.shape(c) for c in jets._split_points(p)))
        return np.zeros(shape)

    def main_eq_residuals(self, p):
        f, X = self.field_jets(p)
        r = jets._split_points(p)[0]
        return np.array([f.deriv(2, 0) + 2.0 / r * f.deriv(1, 0),
                         X.deriv(2, 0) + X.deriv(1, 0) / r + X.deriv(0, 2) / r ** 2])


# ---------------------------------------------------------------------------
# Gowdy T³, chart (t, θ)

def gowdy_U_terms(P: dict, Q: dict) -> list:
    """The eleven summands of U (without the overall sqrt 2), in printed order."""
    e = np.exp(P[""])
    Pt, Pth, Ptt = P["1"], P["2"], P["11"]
    Qt, Qth, Qtt = Q["1"], Q["2"], Q["11"]
    return [
        2 * Qt ** 4 * Pth * e ** 3,
        -2 * Qt ** 3 * Pt * Qth * e ** 4,
        Qt ** 3 * Qth * e ** 3,
        4 * Qt ** 2 * Pt ** 2 * Pth * e,
        -4 * Qt * Pt ** 3 * Qth * e,
        Qt ** 2 * Pt * Ptt * e,
        Qt * Pt ** 2 * Qth * e,
        2 * Qt * Pt * Pth * Qtt * e,
        2 * Qt * Pt * Qth * Ptt * e,
        -2 * Pt ** 2 * Qth * Qtt * e,
        Pt ** 3 * Pth,
    ]


def gowdy_V_terms(P: dict, Q: dict) -> list:
    """The fourteen summands of V (without the overall sqrt 2)."""
    e2 = np.exp(2 * P[""])
    Pt, Pth, Ptt, Ptht = P["1"], P["2"], P["11"], P["12"]
    Qt, Qth, Qtt, Qtht = Q["1"], Q["2"], Q["11"], Q["12"]
    return [
        2 * Qt ** 3 * Ptht * e2,
        -Qt ** 3 * Pth * e2,
        -2 * Qt ** 2 * Pt * Qtht * e2,
        Qt ** 2 * Pt * Qth * e2,
        -2 * Qt ** 2 * Qth * Ptt * e2,
        2 * Qt * Pt ** 3 * Pth,
        2 * Qt * Pt * Qth * Qtt * e2,
        -2 * Pt ** 4 * Qth,
        2 * Qt * Pt ** 2 * Ptht,
        -Qt * Pt ** 2 * Pth,
        -2 * Qt * Pt * Pth * Ptt,
        -2 * Pt ** 3 * Qtht,
        Pt ** 3 * Qth,
        2 * Pt ** 2 * Pth * Qtt,
    ]


def gowdy_W_terms(P: dict, Q: dict) -> list:
    """The nineteen summands of W̃, in printed order."""
    em2 = np.exp(-2 * P[""])
    Pt, Pth, Ptt, Ptht, Pthth = P["1"], P["2"], P["11"], P["12"], P["22"]
    Qt, Qth, Qtt, Qtht, Qthth = Q["1"], Q["2"], Q["11"], Q["12"], Q["22"]
    return [
        2 * Qth ** 3 * Pt ** 2,
        -Pt ** 2 * Qth ** 3,
        -6 * Pt ** 2 * Pth * Qt * Qth ** 2,
        Pt ** 2 * Pthth * Qth * em2,
        -Pt ** 2 * Pth * Qthth * em2,
        2 * Pt * Qth ** 2 * Qt * Pth,
        6 * Pt * Qth * Pth ** 2 * Qt ** 2,
        -2 * Pt * Qth * Pth * Ptht * em2,
        2 * Pt * Pth ** 2 * Qtht * em2,
        Ptt * Qth ** 3,
        -2 * Qth ** 2 * Qt * Ptht,
        -Qth ** 2 * Pth * Qtt,
        2 * Qth * Qt * Pth * Qtht,
        Qth * Pth ** 2 * Ptt * em2,
        -Qth * Pth ** 2 * Qt ** 2,
        Qth * Qt ** 2 * Pthth,
        -2 * Pth ** 3 * Qt ** 3,
        -Qt ** 2 * Pth * Qthth,
        -Pth ** 3 * Qtt * em2,
    ]


#: Two prefactors of the Ricci scalar in terms of W̃ are in circulation:
#: -2 e^t W̃ / J³ ("long") and -e^t W̃ / J³ ("short"), J = P_t Q_θ - Q_t P_θ.
RICCI_PREFACTOR = {"long": -2.0, "short": -1.0}


@dataclass(frozen=True)
class Gowdy(Family):
    """Unpolarized Gowdy: g = diag(1, -e^{2t}), G = e^{-t}/2 diag(1, e^{2P})."""

    name: ClassVar[str] = "gowdy"
    coords: ClassVar[tuple[str, str]] = ("t", "theta")
    field_names: ClassVar[tuple[str, ...]] = ("P", "Q")
    main_eq_factor: ClassVar[float] = 1.0
    stress_map: ClassVar[tuple[str, str]] = ("T11", "T12")
    stress_factor: ClassVar[float] = 4.0
    potential_name: ClassVar[str] = "lambda"
    default_domain: ClassVar[tuple] = ((-1.0, 1.0), (0.0, 2 * math.pi))

    P: str = "-t + 0.1*sin(theta)"
    Q: str = "theta"

    def fields(self):
        return (self._expr(self.P), self._expr(self.Q))

    def system(self):
        return GhmSystem(
            BaseMetric(lambda t, th: (1.0, 0.0, -jets.exp(2.0 * t)), Signature.LORENTZIAN),
            TargetMetric(2, lambda y, x: [[0.5 * jets.exp(-x[0]), 0.0],
                                          [0.0, 0.5 * jets.exp(2.0 * y[0] - x[0])]]),
            GhmMap(self.fields()), self.name)

    def _derivs(self, p):
        P, Q = self.field_jets(p)
        return _d(P), _d(Q), jets._split_points(p)[0]

    @staticmethod
    def jacobian(P: dict, Q: dict):
        """J = P_t Q_θ - Q_t P_θ."""
        return P["1"] * Q["2"] - Q["1"] * P["2"]

    def paper_coframe(self, p):
        P, Q = self.field_jets(p)
        t, _ = jets.variables(*jets._split_points(p))
        Pt, Pth = jets.grad(P)
        Qt, Qth = jets.grad(Q)
        e2P = jets.exp(2.0 * P)
        N = e2P * Qt * Qt + Pt * Pt
        J = Pt * Qth - Qt * Pth
        _check_nonzero(N.v, "e^{2P} Q_t² + P_t²")
        _check_nonzero(J.v, "P_t Q_θ - Q_t P_θ")
        root = jets.sqrt(jets.exp(-t) * N)
        t11 = root / SQRT2
        t12 = t11 * (e2P * Qt * Qth + Pt * Pth) / N
        t22 = jets.exp(P - t) / SQRT2 * J / root
        return _coframe(t11, t12, 0.0 * t11, t22)

    def closed_form_connection(self, p):
        P, Q, t = self._derivs(p)
        N = np.exp(2 * P[""]) * Q["1"] ** 2 + P["1"] ** 2
        den = P["2"] * Q["1"] - P["1"] * Q["2"]
        _check_nonzero(N, "e^{2P} Q_t² + P_t²")
        _check_nonzero(den, "P_θ Q_t - P_t Q_θ")
        U = SQRT2 * sum(gowdy_U_terms(P, Q))
        V = SQRT2 * sum(gowdy_V_terms(P, Q))
        pref = 0.5 * np.exp(t / 2) / (N ** 1.5 * den)
        return np.array([pref * U, -pref * V])

    def closed_form_ricci(self, p, variant: str = "long"):
        P, Q, t = self._derivs(p)
        J = self.jacobian(P, Q)
        _check_nonzero(J, "P_t Q_θ - Q_t P_θ")
        W = sum(gowdy_W_terms(P, Q))
        return RICCI_PREFACTOR[variant] * np.exp(t) * W / J ** 3

    def main_eq_residuals(self, p):
        P, Q, t = self._derivs(p)
        em2t = np.exp(-2 * t)
        e1 = P["11"] - em2t * P["22"] - np.exp(2 * P[""]) * (Q["1"] ** 2 - em2t * Q["2"] ** 2)
        e2 = Q["11"] - em2t * Q["22"] + 2 * (P["1"] * Q["1"] - em2t * P["2"] * Q["2"])
        return np.array([e1, e2])

    def quadrature_jets(self, p):
        P, Q = self.field_jets(p)
        t, _ = jets.variables(*jets._split_points(p))
        Pt, Pth = jets.grad(P)
        Qt, Qth = jets.grad(Q)
        em2t = jets.exp(-2.0 * t)
        e2P = jets.exp(2.0 * P)
        lt = Pt * Pt + em2t * Pth * Pth + e2P * (Qt * Qt + em2t * Qth * Qth)
        lth = 2.0 * (Pt * Pth + e2P * Qt * Qth)
        return lt, lth


@dataclass(frozen=True)
class GowdyAvtd(Gowdy):
    """Gowdy fields of the asymptotically velocity term dominated form

    P = ln[A (e^{-Ct} + B² e^{Ct})],  Q = B / (A (e^{-2Ct} + B)) + D

    with A, B, C, D functions of θ.
    """

    name: ClassVar[str] = "gowdy_avtd"
    default_domain: ClassVar[tuple] = ((-2.0, 2.0), (0.0, 2 * math.pi))

    A: str = "1"
    B: str = "0"
    C: str = "1"
    D: str = "theta"
    P: str = dataclasses.field(default="", init=False, repr=False)
    Q: str = dataclasses.field(default="", init=False, repr=False)

    def validate(self):
        x1, x2 = _probe_points(self.default_domain)
        A = jets.value(self._theta_fn(self.A)(x1, x2)) * np.ones_like(x1)
        if np.any(A <= 0):
            raise SolutionsError("A must be positive on the domain")

    def _theta_fn(self, source: str):
        e = compile_expr(source, ("theta",), self.params)
        return lambda t, th: e(th)

    def fields(self):
        A, B, C, D = (self._theta_fn(s) for s in (self.A, self.B, self.C, self.D))

        def P(t, th):
            # ln A - Ct + ln(1 + B² e^{2Ct}): exact cancellation when B = 0
            c = C(t, th)
            return jets.log(A(t, th)) - c * t + jets.log(1.0 + B(t, th) ** 2 * jets.exp(2.0 * c * t))

        def Q(t, th):
            b = B(t, th)
            return b / (A(t, th) * (jets.exp(-2.0 * C(t, th) * t) + b)) + D(t, th)

        return (P, Q)

    def config(self):
        return {k: getattr(self, k) for k in ("A", "B", "C", "D")}


@dataclass(frozen=True)
class GowdyPaperMetric(Family):
    """The literal metric h = ½e^{-t} dt² + ½e^{t} dθ² (no GHM fields)."""

    name: ClassVar[str] = "gowdy_paper_metric"
    coords: ClassVar[tuple[str, str]] = ("t", "theta")
    default_domain: ClassVar[tuple] = ((-2.0, 2.0), (0.0, 2 * math.pi))

    def metric(self):
        return MetricField2(lambda t, th: (0.5 * jets.exp(-t), 0.0, 0.5 * jets.exp(t)))

    def paper_coframe(self, p):
        t, _ = jets.variables(*jets._split_points(p))
        t11 = jets.exp(-t / 2) / SQRT2
        t22 = jets.exp(t / 2) / SQRT2
        return _coframe(t11, 0.0, 0.0, t22)

    def closed_form_connection(self, p):
        t, th = np.broadcast_arrays(*jets._split_points(p))
        return np.array([np.zeros_like(t), -np.exp(t / 2) / SQRT2])

    def closed_form_curvature(self, p):
        """F in R¹₂ = F Θ¹∧Θ²."""
        t, _ = np.broadcast_arrays(*jets._split_points(p))
        return -np.exp(t)

    def closed_form_ricci(self, p):
        t, _ = np.broadcast_arrays(*jets._split_points(p))
        return -2.0 * np.exp(t)


# ---------------------------------------------------------------------------
# Einstein–Rosen waves, chart (t, ρ)

def er_u_terms(psi: dict, W: dict) -> list:
    """Summands inside the bracket of u (prefactor -sqrt 2 e^{-2ψ} applied separately)."""
    e4 = np.exp(-4 * psi[""])
    return [e4 * W["1"] ** 3, 8 * W["1"] * psi["1"] ** 2, -2 * W["11"] * psi["1"], 2 * psi["11"] * W["1"]]


def er_v_terms(psi: dict, W: dict) -> list:
    """The ten summands of v (without the overall sqrt 2)."""
    e4 = np.exp(-4 * psi[""])
    pt, pr, ptt, prt = psi["1"], psi["2"], psi["11"], psi["12"]
    Wt, Wr, Wtt, Wrt = W["1"], W["2"], W["11"], W["12"]
    return [
        Wr * Wtt * Wt * pt * e4,
        -Wr * ptt * Wt ** 2 * e4,
        8 * Wr * pt ** 4,
        -8 * pr * Wt * pt ** 3,
        Wt ** 3 * prt,
        -Wt ** 2 * Wrt * pt * e4,
        4 * pr * pt ** 2 * Wtt,
        -4 * pr * pt * ptt * Wt,
        4 * pt ** 2 * prt * Wt,
        -4 * pt ** 3 * Wrt,
    ]


@dataclass(frozen=True)
class EinsteinRosen(Family):
    """g = diag(1, -1), G = ρ/2 diag(4, e^{-4ψ}) on y = (ψ, Ω)."""

    name: ClassVar[str] = "einstein_rosen"
    coords: ClassVar[tuple[str, str]] = ("t", "rho")
    field_names: ClassVar[tuple[str, ...]] = ("psi", "Omega")
    main_eq_factor: ClassVar[float] = -1.0
    stress_map: ClassVar[tuple[str, str]] = ("T12", "T11")
    default_domain: ClassVar[tuple] = ((-1.0, 1.0), (0.5, 3.0))

    psi: str = "amplitude*(0.3*t - 0.1*rho)"
    Omega: str = "amplitude*(exp(0.5*t) + rho)"
    amplitude: float = 1.0

    def validate(self):
        W = self._expr(self.Omega)
        if not (W.depends_on("t") or W.depends_on("rho")):
            raise SolutionsError("constant Omega (polarized waves) degenerates the induced metric; "
                                 "a dimensional extension is required")

    def fields(self):
        return (self._expr(self.psi), self._expr(self.Omega))

    def system(self):
        return GhmSystem(
            BaseMetric(lambda t, rho: (1.0, 0.0, -1.0), Signature.LORENTZIAN),
            TargetMetric(2, lambda y, x: [[2.0 * x[1], 0.0], [0.0, 0.5 * x[1] * jets.exp(-4.0 * y[0])]]),
            GhmMap(self.fields()), self.name)

    def _derivs(self, p):
        psi, W = self.field_jets(p)
        return _d(psi), _d(W), jets._split_points(p)[1]

    def paper_coframe(self, p):
        psi, W = self.field_jets(p)
        _, rho = jets.variables(*jets._split_points(p))
        pt, pr = jets.grad(psi)
        Wt, Wr = jets.grad(W)
        e4 = jets.exp(-4.0 * psi)
        N = e4 * Wt * Wt + 4.0 * pt * pt
        _check_nonzero(N.v, "e^{-4ψ} Ω_t² + 4ψ_t²")
        _check_nonzero((pt * Wr - Wt * pr).v, "ψ_t Ω_ρ - Ω_t ψ_ρ")
        t11 = jets.sqrt(rho * N) / SQRT2
        t12 = t11 * (e4 * Wt * Wr + 4.0 * pt * pr) / N
        t22 = jets.sqrt(2.0 * rho) * jets.exp(-2.0 * psi) * (Wt * pr - pt * Wr) / jets.sqrt(N)
        return _coframe(t11, t12, 0.0 * t11, t22)

    def closed_form_connection(self, p):
        psi, W, rho = self._derivs(p)
        N = np.exp(-4 * psi[""]) * W["1"] ** 2 + 4 * psi["1"] ** 2
        J = psi["1"] * W["2"] - W["1"] * psi["2"]
        _check_nonzero(N, "e^{-4ψ} Ω_t² + 4ψ_t²")
        _check_nonzero(J, "ψ_t Ω_ρ - Ω_t ψ_ρ")
        u = -SQRT2 * np.exp(-2 * psi[""]) * sum(er_u_terms(psi, W))
        v = SQRT2 * sum(er_v_terms(psi, W))
        pref = 1.0 / (np.sqrt(rho) * N ** 1.5)
        return np.array([pref * u, pref * v / J])

    def closed_form_curvature(self, p):
        return -2.0 / np.broadcast_arrays(*jets._split_points(p))[1]

    def closed_form_ricci(self, p):
        return -4.0 / np.broadcast_arrays(*jets._split_points(p))[1]

    def main_eq_residuals(self, p):
        psi, W, rho = self._derivs(p)
        e4 = np.exp(-4 * psi[""])
        e1 = -psi["11"] + psi["22"] + psi["2"] / rho - 0.5 * e4 * (W["1"] ** 2 - W["2"] ** 2)
        e2 = -W["11"] + W["22"] + W["2"] / rho + 4 * (psi["1"] * W["1"] - psi["2"] * W["2"])
        return np.array([e1, e2])

    def quadrature_jets(self, p):
        psi, W = self.field_jets(p)
        _, rho = jets.variables(*jets._split_points(p))
        pt, pr = jets.grad(psi)
        Wt, Wr = jets.grad(W)
        e4 = jets.exp(-4.0 * psi)
        kt = 2.0 * rho * pt * pr + 0.5 * rho * e4 * Wt * Wr
        kr = rho * (pt * pt + pr * pr) + 0.25 * rho * e4 * (Wt * Wt + Wr * Wr)
        return kt, kr


# ---------------------------------------------------------------------------

FAMILIES = {cls.name: cls for cls in (Axisym, Schwarzschild, Gowdy, GowdyAvtd,
                                     GowdyPaperMetric, EinsteinRosen, WeylStatic)}


def config_keys(name: str) -> tuple[str, ...]:
    cls = _family_class(name)
    return tuple(f.name for f in dataclasses.fields(cls) if f.init)


def _family_class(name: str):
    try:
        return FAMILIES[name]
    except KeyError:
        raise SolutionsError(f"unknown family {name!r}; expected one of {sorted(FAMILIES)}") from None


def make_family(name: str, config: dict | None = None) -> Family:
    """Validated family instance; unknown configuration keys are rejected."""
    cls = _family_class(name)
    config = dict(config or {})
    unknown = set(config) - set(config_keys(name))
    if unknown:
        raise SolutionsError(f"unknown {name} parameters: {sorted(unknown)}")
    try:
        return cls(**config)
    except (TypeError, ValueError) as err:
        if isinstance(err, SolutionsError):
            raise
        raise SolutionsError(f"invalid {name} configuration: {err}") from err


def _family(family) -> Family:
    return family if isinstance(family, Family) else make_family(family)


def build_system(family, config: dict | None = None) -> GhmSystem:
    fam = make_family(family, config) if isinstance(family, str) else family
    return fam.system()


def paper_coframe(family, p) -> Coframe:
    return _family(family).paper_coframe(p)


def paper_frame_pipeline(family, p):
    """Connection and curvature computed from the printed coframe."""
    cf = _family(family).paper_coframe(p)
    conn = connection_from_cartan(cf)
    return cf, conn, curvature(conn)


def closed_form_connection(family, p) -> np.ndarray:
    return _family(family).closed_form_connection(p)


def closed_form_ricci(family, p, **kw) -> np.ndarray:
    return _family(family).closed_form_ricci(p, **kw)


def main_eq_residuals(family, p) -> np.ndarray:
    return _family(family).main_eq_residuals(p)


def quadrature_gradient(family, p) -> np.ndarray:
    g1, g2 = _family(family).quadrature_jets(p)
    return np.array([g1.v, g2.v])


def quadrature_integrability(family, p) -> np.ndarray:
    """∂₂(∂₁κ) - ∂₁(∂₂κ) computed from the quadrature right-hand sides."""
    g1, g2 = _family(family).quadrature_jets(p)
    return jets.partial(g1, 1).v - jets.partial(g2, 0).v


def stress_quadrature_mismatch(family, p) -> np.ndarray:
    """Quadrature gradient minus the matching energy-momentum components."""
    fam = _family(family)
    if fam.stress_map is None:
        raise SolutionsError(f"no quadrature relation for {fam.name}")
    T = energy_momentum(fam.system(), p, sector=fam.stress_sector)
    expected = np.array([fam.stress_factor * getattr(T, k) for k in fam.stress_map])
    return quadrature_gradient(fam, p) - expected


class PotentialResult(NamedTuple):
    value: float
    error: float
    integrability: float
    n_steps: int


def _simpson_segment(fam: Family, a, b, n: int) -> float:
    s = np.linspace(0.0, 1.0, n + 1)
    x1 = a[0] + s * (b[0] - a[0])
    x2 = a[1] + s * (b[1] - a[1])
    g = quadrature_gradient(fam, (x1, x2))
    y = g[0] * (b[0] - a[0]) + g[1] * (b[1] - a[1])
    h = 1.0 / n
    return float(h / 3 * (y[0] + y[-1] + 4 * y[1:-1:2].sum() + 2 * y[2:-1:2].sum()))


def reconstruct_potential(family, path: Sequence[Sequence[float]], n_steps: int = 16,
                          tol: float = 1e-9, max_depth: int = 14,
                          integrability_tol: float = 1e-8) -> PotentialResult:
    """Line integral of the quadrature gradient along a polyline.

    Composite Simpson per segment, doubling the panel count until two
    successive values agree within ``tol``.  The integrability residual is
    checked at the sample points first; off-shell data raises
    :class:`IntegrabilityError`.
    """
    fam = _family(family)
    pts = [tuple(map(float, q)) for q in path]
    if len(pts) < 2:
        raise SolutionsError("a path needs at least two points")
    if n_steps < 2 or n_steps % 2:
        raise SolutionsError("n_steps must be a positive even number")
    worst = 0.0
    for a, b in zip(pts, pts[1:]):
        s = np.linspace(0.0, 1.0, n_steps + 1)
        x1 = a[0] + s * (b[0] - a[0])
        x2 = a[1] + s * (b[1] - a[1])
        worst = max(worst, float(np.max(np.abs(quadrature_integrability(fam, (x1, x2))))))
    if worst > integrability_tol:
        raise IntegrabilityError(f"quadrature equations are not integrable along the path "
                                 f"(residual {worst:.3g}); fields are off shell", worst)
    total, err, used = 0.0, 0.0, 0
    for a, b in zip(pts, pts[1:]):
        if a == b:
            continue
        n = n_steps
        prev = _simpson_segment(fam, a, b, n)
        for _ in range(max_depth):
            n *= 2
            cur = _simpson_segment(fam, a, b, n)
            diff = abs(cur - prev)
            prev = cur
            if diff < tol:
                break
        total += prev
        err += diff / 15.0
        used = max(used, n)
    return PotentialResult(total, err, worst, used)


# ---------------------------------------------------------------------------
# formal on-shell data

def _poly_source(coeffs, p0, coords) -> str:
    x, y = (f"({coords[0]} - ({p0[0]!r}))", f"({coords[1]} - ({p0[1]!r}))")
    terms = []
    for c, (i, j) in zip(coeffs, jets.MONOMIALS):
        if c == 0.0:
            continue
        mono = "*".join([x] * i + [y] * j)
        terms.append(f"({float(c)!r})" + (f"*{mono}" if mono else ""))
    return " + ".join(terms) or "0.0"


def onshell_family(family, p0, coeffs, h: float = 1e-3, tol: float = 1e-11,
                   max_iter: int = 30) -> Family:
    """Replace the fields of ``family`` by cubic polynomials around ``p0``
    that solve the generic field equations to third order at ``p0``.

    ``coeffs[A]`` holds the ten Taylor coefficients (jet storage order) used
    as free data; the ∂₁², ∂₁³ and ∂₁²∂₂ coefficients are then solved for so
    that E and ∂E vanish at ``p0``.  This works whenever g¹¹ ≠ 0, which
    holds for every family in the catalog.  Derivatives of E are taken by
    Richardson-extrapolated central differences (the polynomial fields are
    exact everywhere), so "on shell" here means |E|, |∂E| ≲ 1e-10.
    """
    from .ghm import field_eq_residual

    fam = _family(family)
    names = fam.field_names
    if not names or not all(isinstance(getattr(fam, n, None), str) for n in names):
        raise SolutionsError(f"{fam.name} fields are not plain formulas")
    c = np.array(coeffs, dtype=float).reshape(len(names), len(jets.MONOMIALS))
    free = [jets.MONOMIALS.index(m) for m in ((2, 0), (3, 0), (2, 1))]
    p0 = (float(p0[0]), float(p0[1]))

    def build(cc):
        src = {n: _poly_source(cc[A], p0, fam.coords) for A, n in enumerate(names)}
        return dataclasses.replace(fam, **src) if not isinstance(fam, GowdyAvtd) else Gowdy(**src)

    def residual(cc):
        sys = build(cc).system()

        def E(dx, dy):
            return field_eq_residual(sys, (np.array([p0[0] + dx]), np.array([p0[1] + dy])))[:, 0]

        def dE(axis):
            def cd(step):
                e = np.zeros(2)
                e[axis] = step
                return (E(*e) - E(*-e)) / (2 * step)
            return (4 * cd(h / 2) - cd(h)) / 3

        return np.concatenate([E(0.0, 0.0), dE(0), dE(1)])

    n = len(names)
    for _ in range(max_iter):
        r = residual(c)
        if np.max(np.abs(r)) < tol:
            break
        jac = np.empty((3 * n, 3 * n))
        for k in range(3 * n):
            A, slot = divmod(k, 3)
            cc = c.copy()
            eps = 1e-6 * max(1.0, abs(c[A, free[slot]]))
            cc[A, free[slot]] += eps
            jac[:, k] = (residual(cc) - r) / eps
        step = np.linalg.solve(jac, -r)
        for k in range(3 * n):
            A, slot = divmod(k, 3)
            c[A, free[slot]] += step[k]
    else:
        raise SolutionsError("formal on-shell construction did not converge")
    return build(c)
