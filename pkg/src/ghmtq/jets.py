"""Third-order forward-mode differentiation on a two-dimensional chart.

A :class:`Jet` stores the truncated bivariate Taylor expansion of a scalar
field around a point (or a batch of points),

    u(p + e) = sum_{i+j<=3} c_ij e1^i e2^j + O(|e|^4),

as a flat array of ten coefficients ordered by total degree.  Partial
derivatives are recovered as ``c_ij * i! * j!``.  All arithmetic is
vectorized over the trailing batch axes of the coefficient array, so one jet
can carry a whole grid of evaluation points.
"""

from __future__ import annotations

import contextlib
import contextvars
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

MAX_ORDER = 3

#: Monomial exponents (i, j) in storage order.
MONOMIALS: tuple[tuple[int, int], ...] = (
    (0, 0),
    (1, 0), (0, 1),
    (2, 0), (1, 1), (0, 2),
    (3, 0), (2, 1), (1, 2), (0, 3),
)
_INDEX = {m: k for k, m in enumerate(MONOMIALS)}
_DEGREE = np.array([i + j for i, j in MONOMIALS])
_FACT = np.array([math.factorial(i) * math.factorial(j) for i, j in MONOMIALS], dtype=float)

# (k, p, q) triples with monomial[p] * monomial[q] == monomial[k]
_MUL_PAIRS = tuple(
    (_INDEX[(a[0] + b[0], a[1] + b[1])], p, q)
    for p, a in enumerate(MONOMIALS)
    for q, b in enumerate(MONOMIALS)
    if sum(a) + sum(b) <= MAX_ORDER
)


def _partial_map(axis: int) -> list[tuple[int, int, int]]:
    out = []
    for k, (i, j) in enumerate(MONOMIALS):
        src = (i + 1, j) if axis == 0 else (i, j + 1)
        if src in _INDEX:
            out.append((k, _INDEX[src], src[axis]))
    return out


_PARTIAL = (_partial_map(0), _partial_map(1))

_strict = contextvars.ContextVar("ghmtq_jets_strict", default=True)


class JetDomainError(ValueError):
    """A jet operation left the domain of its function (log of a
    non-positive value, division by zero, ...).

    ``mask`` marks offending batch entries; ``points`` is filled in by
    :func:`evaluate` when the evaluation points are known.
    """

    def __init__(self, message: str, mask=None, points=None):
        super().__init__(message)
        self.mask = mask
        self.points = points

    def __str__(self):
        msg = super().__str__()
        if self.points is not None:
            pts = np.asarray(self.points)
            msg += f" at {pts[:5].tolist()}" + (" ..." if len(pts) > 5 else "")
        return msg


@contextlib.contextmanager
def lenient():
    """Inside this block out-of-domain jet operations yield NaN entries
    instead of raising :class:`JetDomainError`.  Used by grid scans that
    must survive degenerate points."""
    token = _strict.set(False)
    try:
        yield
    finally:
        _strict.reset(token)


def is_strict() -> bool:
    """False inside a :func:`lenient` block."""
    return _strict.get()


def _check(bad, message):
    bad = np.asarray(bad)
    if bad.any() and _strict.get():
        raise JetDomainError(message, mask=bad)


class Jet:
    """Truncated Taylor expansion of order ``order`` (<= 3) in two variables.

    ``coeffs`` has shape ``(10, *batch)``.  Slots above ``order`` are kept
    at zero and carry no information.
    """

    __slots__ = ("coeffs", "order")
    __array_priority__ = 1000

    def __init__(self, coeffs, order: int = MAX_ORDER):
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.shape[:1] != (len(MONOMIALS),):
            raise ValueError(f"jet coefficients must have leading axis 10, got {coeffs.shape}")
        self.coeffs = coeffs
        self.order = int(order)

    # -- construction -----------------------------------------------------
    @classmethod
    def constant(cls, value, order: int = MAX_ORDER) -> "Jet":
        value = np.asarray(value, dtype=float)
        c = np.zeros((len(MONOMIALS),) + value.shape)
        c[0] = value
        return cls(c, order)

    @classmethod
    def from_derivatives(cls, v, d1=(0.0, 0.0), d2=(0.0, 0.0, 0.0), d3=(0.0, 0.0, 0.0, 0.0),
                         order: int = MAX_ORDER) -> "Jet":
        """Build a jet from partial derivatives ``v, (∂1, ∂2), (∂11, ∂12, ∂22),
        (∂111, ∂112, ∂122, ∂222)``."""
        parts = [v, *d1, *d2, *d3]
        parts = np.broadcast_arrays(*[np.asarray(x, dtype=float) for x in parts])
        derivs = np.stack(parts)
        return cls(derivs / _FACT.reshape((-1,) + (1,) * (derivs.ndim - 1)), order)

    # -- accessors --------------------------------------------------------
    @property
    def shape(self) -> tuple[int, ...]:
        return self.coeffs.shape[1:]

    def deriv(self, i: int, j: int) -> np.ndarray:
        """Partial derivative ∂1^i ∂2^j."""
        if i + j > self.order:
            raise ValueError(f"derivative of order {i + j} requested from an order-{self.order} jet")
        k = _INDEX[(i, j)]
        return self.coeffs[k] * _FACT[k]

    @property
    def v(self) -> np.ndarray:
        return self.coeffs[0]

    @property
    def d1(self) -> np.ndarray:
        return np.stack([self.deriv(1, 0), self.deriv(0, 1)])

    @property
    def d2(self) -> np.ndarray:
        return np.stack([self.deriv(2, 0), self.deriv(1, 1), self.deriv(0, 2)])

    @property
    def d3(self) -> np.ndarray:
        return np.stack([self.deriv(3, 0), self.deriv(2, 1), self.deriv(1, 2), self.deriv(0, 3)])

    def __getitem__(self, index) -> "Jet":
        if not isinstance(index, tuple):
            index = (index,)
        return Jet(self.coeffs[(slice(None),) + index], self.order)

    def __repr__(self):
        return f"Jet(order={self.order}, shape={self.shape}, v={self.v!r})"

    # -- arithmetic -------------------------------------------------------
    def _coerce(self, other) -> "Jet":
        if isinstance(other, Jet):
            return other
        return Jet.constant(other, self.order)

    def __neg__(self):
        return Jet(-self.coeffs, self.order)

    def __pos__(self):
        return self

    def __add__(self, other):
        other = self._coerce(other)
        ac, bc = _aligned(self, other)
        return Jet(ac + bc, min(self.order, other.order))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        ac, bc = _aligned(self, other)
        return Jet(ac - bc, min(self.order, other.order))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Jet):
            other = np.asarray(other, dtype=float)
            return Jet(self.coeffs * other[None], self.order) if other.ndim <= self.coeffs.ndim - 1 else self * Jet.constant(other, self.order)
        return _mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            other = np.asarray(other, dtype=float)
            _check(other == 0, "division by zero")
            with np.errstate(divide="ignore", invalid="ignore"):
                return Jet(self.coeffs / other[None], self.order) if other.ndim <= self.coeffs.ndim - 1 else self * Jet.constant(1.0 / other, self.order)
        return _mul(self, reciprocal(other))

    def __rtruediv__(self, other):
        return self._coerce(other) * reciprocal(self)

    def __pow__(self, exponent):
        return power(self, exponent)


def _aligned(a: Jet, b: Jet) -> tuple[np.ndarray, np.ndarray]:
    """Coefficient arrays broadcast over the batch axes only."""
    ac, bc = a.coeffs, b.coeffs
    nd = max(ac.ndim, bc.ndim)
    ac = ac.reshape(ac.shape[:1] + (1,) * (nd - ac.ndim) + ac.shape[1:])
    bc = bc.reshape(bc.shape[:1] + (1,) * (nd - bc.ndim) + bc.shape[1:])
    return np.broadcast_arrays(ac, bc)


def _mul(a: Jet, b: Jet) -> Jet:
    order = min(a.order, b.order)
    ac, bc = _aligned(a, b)
    out = np.zeros_like(ac)
    for k, p, q in _MUL_PAIRS:
        out[k] += ac[p] * bc[q]
    if order < MAX_ORDER:
        out[_DEGREE > order] = 0.0
    return Jet(out, order)


def _compose(u: Jet, taylor: Sequence[np.ndarray]) -> Jet:
    """Faà di Bruno: f(u) = sum_k taylor[k] * (u - u0)^k with
    ``taylor[k] = f^(k)(u0) / k!``."""
    delta = Jet(u.coeffs.copy(), u.order)
    delta.coeffs[0] = 0.0
    c = np.zeros_like(u.coeffs)
    c[0] = taylor[0]
    out = Jet(c, u.order)
    power_k = delta
    for k in range(1, u.order + 1):
        out = out + power_k * taylor[k]
        if k < u.order:
            power_k = _mul(power_k, delta)
    return out


def _unary(u, f, taylor_fn, bad_fn=None, message=""):
    if not isinstance(u, Jet):
        u = np.asarray(u, dtype=float)
        if bad_fn is not None:
            _check(bad_fn(u), message)
        with np.errstate(all="ignore"):
            return f(u)
    x = u.v
    bad = None
    if bad_fn is not None:
        bad = bad_fn(x)
        _check(bad, message)
    with np.errstate(all="ignore"):
        taylor = taylor_fn(x)
        out = _compose(u, taylor)
    if bad is not None and np.any(bad):
        out.coeffs[:, bad] = np.nan
    return out


def exp(u):
    def taylor(x):
        e = np.exp(x)
        return [e, e, e / 2, e / 6]
    return _unary(u, np.exp, taylor)


def log(u):
    def taylor(x):
        return [np.log(x), 1 / x, -1 / (2 * x**2), 1 / (3 * x**3)]
    return _unary(u, np.log, taylor, lambda x: ~(x > 0), "log of a non-positive value")


def sqrt(u):
    def taylor(x):
        s = np.sqrt(x)
        return [s, 1 / (2 * s), -1 / (8 * s**3), 1 / (16 * s**5)]
    return _unary(u, np.sqrt, taylor, lambda x: ~(x > 0), "sqrt of a non-positive value")


def sin(u):
    def taylor(x):
        s, c = np.sin(x), np.cos(x)
        return [s, c, -s / 2, -c / 6]
    return _unary(u, np.sin, taylor)


def cos(u):
    def taylor(x):
        s, c = np.sin(x), np.cos(x)
        return [c, -s, -c / 2, s / 6]
    return _unary(u, np.cos, taylor)


def sinh(u):
    def taylor(x):
        s, c = np.sinh(x), np.cosh(x)
        return [s, c, s / 2, c / 6]
    return _unary(u, np.sinh, taylor)


def cosh(u):
    def taylor(x):
        s, c = np.sinh(x), np.cosh(x)
        return [c, s, c / 2, s / 6]
    return _unary(u, np.cosh, taylor)


def arctan(u):
    def taylor(x):
        q = 1 / (1 + x**2)
        return [np.arctan(x), q, -x * q**2, (3 * x**2 - 1) * q**3 / 3]
    return _unary(u, np.arctan, taylor)


def reciprocal(u):
    def taylor(x):
        r = 1 / x
        return [r, -r**2, r**3, -r**4]
    return _unary(u, lambda x: 1 / x, taylor, lambda x: x == 0, "division by zero")


def power(u, exponent: float):
    """``u ** exponent`` for a constant real exponent.  Non-integer
    exponents require a positive base."""
    a = float(exponent)
    integral = a.is_integer()
    if integral and a >= 0:
        n = int(a)
        if not isinstance(u, Jet):
            return np.asarray(u, dtype=float) ** n
        out = Jet.constant(np.ones(u.shape), u.order)
        for _ in range(n):
            out = out * u
        return out

    def taylor(x):
        return [x**a, a * x**(a - 1), a * (a - 1) * x**(a - 2) / 2,
                a * (a - 1) * (a - 2) * x**(a - 3) / 6]

    if integral:
        bad, msg = (lambda x: x == 0), "negative power of zero"
    else:
        bad, msg = (lambda x: ~(x > 0)), "fractional power of a non-positive value"
    return _unary(u, lambda x: x**a, taylor, bad, msg)


def partial(u: Jet, axis: int) -> Jet:
    """Exact partial derivative along chart axis 0 or 1; lowers the order by one."""
    if u.order < 1:
        raise ValueError("cannot differentiate an order-0 jet")
    c = np.zeros_like(u.coeffs)
    for k, src, factor in _PARTIAL[axis]:
        c[k] = factor * u.coeffs[src]
    c[_DEGREE > u.order - 1] = 0.0
    return Jet(c, u.order - 1)


def grad(u: Jet) -> tuple[Jet, Jet]:
    return partial(u, 0), partial(u, 1)


def where(mask, a, b) -> Jet:
    """Pointwise select between two jets over the batch axes."""
    a, b = as_jet(a), as_jet(b)
    mask = np.asarray(mask, dtype=bool)
    ac, bc = _aligned(a, b)
    return Jet(np.where(mask[None], ac, bc), min(a.order, b.order))


def variables(x1, x2, order: int = MAX_ORDER) -> tuple[Jet, Jet]:
    """Coordinate jets seeded at the points ``(x1, x2)``."""
    x1, x2 = np.broadcast_arrays(np.asarray(x1, dtype=float), np.asarray(x2, dtype=float))
    c1 = np.zeros((len(MONOMIALS),) + x1.shape)
    c2 = np.zeros_like(c1)
    c1[0], c1[1] = x1, 1.0
    c2[0], c2[2] = x2, 1.0
    return Jet(c1, order), Jet(c2, order)


def value(u) -> np.ndarray:
    """Value slot of a jet, or the argument itself for plain numbers."""
    return u.v if isinstance(u, Jet) else np.asarray(u, dtype=float)


def as_jet(u, shape=(), order: int = MAX_ORDER) -> Jet:
    if isinstance(u, Jet):
        return u
    return Jet.constant(np.broadcast_to(np.asarray(u, dtype=float), shape), order)


# -- named-operation dispatchers ------------------------------------------------

_ARITH = {
    "add": lambda a, b: a + b,
    "sub": lambda a, b: a - b,
    "mul": lambda a, b: a * b,
    "div": lambda a, b: a / b,
}

_UNARY = {"exp": exp, "ln": log, "log": log, "sqrt": sqrt, "sin": sin, "cos": cos,
          "sinh": sinh, "cosh": cosh, "arctan": arctan}


def jet_arith(op: str, a, b) -> Jet:
    """Binary jet arithmetic by name (``add``, ``sub``, ``mul``, ``div``)."""
    try:
        fn = _ARITH[op]
    except KeyError:
        raise ValueError(f"unknown jet operation {op!r}") from None
    a = as_jet(a)
    return fn(a, b)


def jet_unary(name: str, u, exponent: float | None = None) -> Jet:
    if name == "pow_const":
        if exponent is None:
            raise ValueError("pow_const needs an exponent")
        return power(u, exponent)
    try:
        return _UNARY[name](u)
    except KeyError:
        raise ValueError(f"unknown jet function {name!r}") from None


# -- fields ----------------------------------------------------------------

@dataclass(frozen=True)
class Point2:
    x1: float
    x2: float

    def __post_init__(self):
        if not (math.isfinite(self.x1) and math.isfinite(self.x2)):
            raise ValueError(f"non-finite chart point ({self.x1}, {self.x2})")

    def __iter__(self):
        yield self.x1
        yield self.x2


FieldFn = Callable[[Jet, Jet], "Jet | float"]


def _split_points(p):
    if isinstance(p, Point2):
        return np.asarray(p.x1, dtype=float), np.asarray(p.x2, dtype=float)
    x1, x2 = p
    return np.asarray(x1, dtype=float), np.asarray(x2, dtype=float)


def evaluate(fn: FieldFn, p, order: int = MAX_ORDER) -> Jet:
    """Evaluate a field ``fn(x1, x2)`` on coordinate jets seeded at ``p``.

    ``p`` is a :class:`Point2` or a pair of arrays.  Domain errors are
    re-raised with the offending chart points attached.
    """
    x1, x2 = _split_points(p)
    j1, j2 = variables(x1, x2, order)
    try:
        out = fn(j1, j2)
    except JetDomainError as err:
        if err.mask is not None and err.points is None:
            b1, b2 = np.broadcast_arrays(x1, x2)
            mask = np.broadcast_to(err.mask, b1.shape) if np.ndim(err.mask) else np.ones(b1.shape, bool)
            err.points = np.stack([b1[mask], b2[mask]], axis=-1).reshape(-1, 2)
        raise
    return as_jet(out, j1.shape, order)


# central-difference weights {offset: weight} for derivative orders 0..3 (unit step)
_STENCILS = (
    {0: 1.0},
    {-1: -0.5, 1: 0.5},
    {-1: 1.0, 0: -2.0, 1: 1.0},
    {-2: -0.5, -1: 1.0, 1: -1.0, 2: 0.5},
)


def fd_oracle(fn: FieldFn, p, h: float = 1e-3, domain=None) -> Jet:
    """Central finite-difference estimate of the order-3 jet of a field.

    Independent of the jet arithmetic: the field is evaluated at plain
    floats only.  ``domain`` is an optional ``((lo1, hi1), (lo2, hi2))`` box
    the stencil must stay inside.
    """
    if not h > 0:
        raise ValueError("step h must be positive")
    x1, x2 = _split_points(p)
    if domain is not None:
        (lo1, hi1), (lo2, hi2) = domain
        if (np.any(x1 - 2 * h < lo1) or np.any(x1 + 2 * h > hi1)
                or np.any(x2 - 2 * h < lo2) or np.any(x2 + 2 * h > hi2)):
            raise ValueError("finite-difference stencil leaves the field domain")

    cache = {}

    def f(a, b):
        if (a, b) not in cache:
            cache[(a, b)] = value(fn(x1 + a * h, x2 + b * h))
        return cache[(a, b)]

    derivs = []
    for i, j in MONOMIALS:
        acc = 0.0
        for a, wa in _STENCILS[i].items():
            for b, wb in _STENCILS[j].items():
                acc = acc + wa * wb * f(a, b)
        derivs.append(acc / h ** (i + j))
    derivs = np.broadcast_arrays(*[np.asarray(d, dtype=float) for d in derivs])
    return Jet(np.stack(derivs) / _FACT.reshape((-1,) + (1,) * derivs[0].ndim))
