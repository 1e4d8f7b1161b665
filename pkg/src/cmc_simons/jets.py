"""Truncated multivariate Taylor jets with batched coefficients.

A :class:`Jet` stores the Taylor coefficients of a scalar function around a
base point, truncated at total degree ``degree`` (3 by default), in ``nvars``
variables.  Coefficients live in an array of shape ``(ncoef, *batch)`` so a
single jet carries the expansions at many base points at once.

Each jet also tracks ``order``: the highest degree whose coefficients are
trustworthy.  Differentiating lowers it by one, and asking for a derivative
beyond it raises :class:`InsufficientJetOrder` instead of returning the zeros
that truncation leaves behind.
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .errors import InsufficientJetOrder, JetDomainError

__all__ = [
    "Jet",
    "variables",
    "constant",
    "substitute",
    "sin",
    "cos",
    "tan",
    "exp",
    "log",
    "sqrt",
    "asin",
    "atan",
    "atan2",
    "reciprocal",
    "value_of",
]


class _Tables:
    """Index tables for one (nvars, degree) layout."""

    def __init__(self, nvars: int, degree: int):
        exps = []
        for d in range(degree + 1):
            block = [a for a in itertools.product(range(d + 1), repeat=nvars) if sum(a) == d]
            exps.extend(sorted(block, reverse=True))
        self.exps = exps
        self.index = {a: i for i, a in enumerate(exps)}
        self.ncoef = len(exps)
        self.degrees = np.array([sum(a) for a in exps])
        self.factorials = np.array([math.prod(math.factorial(k) for k in a) for a in exps], dtype=float)

        I, J, K = [], [], []
        for i, a in enumerate(exps):
            for j, b in enumerate(exps):
                s = tuple(x + y for x, y in zip(a, b))
                if sum(s) <= degree:
                    I.append(i)
                    J.append(j)
                    K.append(self.index[s])
        self.I = np.array(I)
        self.J = np.array(J)
        S = np.zeros((self.ncoef, len(I)))
        S[K, np.arange(len(I))] = 1.0
        self.S = S

        # d/dx_axis: coefficient of a in the result is (a_axis + 1) * c[a + e_axis]
        self.diff_src = []
        self.diff_fac = []
        for axis in range(nvars):
            src = np.zeros(self.ncoef, dtype=int)
            fac = np.zeros(self.ncoef)
            for i, a in enumerate(exps):
                up = list(a)
                up[axis] += 1
                up = tuple(up)
                if up in self.index:
                    src[i] = self.index[up]
                    fac[i] = a[axis] + 1
            self.diff_src.append(src)
            self.diff_fac.append(fac)


@lru_cache(maxsize=None)
def _tables(nvars: int, degree: int) -> _Tables:
    return _Tables(nvars, degree)


def _lift_batch(c: np.ndarray, ndim: int) -> np.ndarray:
    """Insert axes after the coefficient axis so the batch has ``ndim`` dims."""
    have = c.ndim - 1
    if have >= ndim:
        return c
    return c.reshape((c.shape[0],) + (1,) * (ndim - have) + c.shape[1:])


class Jet:
    """Truncated Taylor expansion of a scalar field, batched over base points."""

    __array_ufunc__ = None  # make ndarray <op> Jet defer to the Jet

    __slots__ = ("c", "nvars", "degree", "order")

    def __init__(self, c, nvars: int = 2, degree: int = 3, order: int | None = None):
        c = np.asarray(c, dtype=float)
        tab = _tables(nvars, degree)
        if c.shape[0] != tab.ncoef:
            raise ValueError(f"expected {tab.ncoef} coefficients, got {c.shape[0]}")
        self.c = c
        self.nvars = nvars
        self.degree = degree
        self.order = degree if order is None else order

    # -- construction -------------------------------------------------------
    @classmethod
    def constant(cls, value, nvars: int = 2, degree: int = 3) -> "Jet":
        value = np.asarray(value, dtype=float)
        c = np.zeros((_tables(nvars, degree).ncoef,) + value.shape)
        c[0] = value
        return cls(c, nvars, degree)

    @classmethod
    def lift(cls, value, axis: int, nvars: int = 2, degree: int = 3) -> "Jet":
        """Seed the coordinate function ``x_axis`` at base point ``value``."""
        jet = cls.constant(value, nvars, degree)
        jet.c[1 + axis] = 1.0
        return jet

    # -- accessors ----------------------------------------------------------
    @property
    def tables(self) -> _Tables:
        return _tables(self.nvars, self.degree)

    @property
    def value(self) -> np.ndarray:
        return self.c[0]

    @property
    def shape(self) -> tuple:
        return self.c.shape[1:]

    def derivative(self, alpha: Sequence[int]) -> np.ndarray:
        """Partial derivative ``d^|alpha| / dx^alpha`` at the base point."""
        alpha = tuple(alpha)
        if len(alpha) != self.nvars:
            raise ValueError("multi-index length must equal nvars")
        if sum(alpha) > self.order:
            raise InsufficientJetOrder(
                f"derivative of total order {sum(alpha)} requested from a jet valid to order {self.order}"
            )
        tab = self.tables
        i = tab.index[alpha]
        return tab.factorials[i] * self.c[i]

    def _graded(self, d: int) -> np.ndarray:
        tab = self.tables
        return np.stack([self.derivative(a) for a in tab.exps if sum(a) == d])

    @property
    def first(self) -> np.ndarray:
        return self._graded(1)

    @property
    def second(self) -> np.ndarray:
        return self._graded(2)

    @property
    def third(self) -> np.ndarray:
        return self._graded(3)

    def diff(self, axis: int) -> "Jet":
        tab = self.tables
        c = self.c[tab.diff_src[axis]] * _lift_batch(tab.diff_fac[axis], self.c.ndim - 1)
        return Jet(c, self.nvars, self.degree, self.order - 1)

    def truncated(self) -> "Jet":
        """Copy with coefficients above ``order`` zeroed."""
        c = self.c.copy()
        c[self.tables.degrees > self.order] = 0.0
        return Jet(c, self.nvars, self.degree, self.order)

    def __repr__(self) -> str:
        return f"Jet(nvars={self.nvars}, degree={self.degree}, order={self.order}, batch={self.shape})"

    # -- arithmetic ---------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, Jet):
            if (other.nvars, other.degree) != (self.nvars, self.degree):
                raise ValueError("jets with different layouts cannot be combined")
            return other
        return None

    def _pair(self, other: "Jet"):
        nd = max(self.c.ndim, other.c.ndim) - 1
        return _lift_batch(self.c, nd), _lift_batch(other.c, nd)

    def __add__(self, other):
        o = self._coerce(other)
        if o is not None:
            a, b = self._pair(o)
            return Jet(a + b, self.nvars, self.degree, min(self.order, o.order))
        other = np.asarray(other, dtype=float)
        c = _lift_batch(self.c, other.ndim)
        c = np.broadcast_to(c, (c.shape[0],) + np.broadcast_shapes(c.shape[1:], other.shape)).copy()
        c[0] = c[0] + other
        return Jet(c, self.nvars, self.degree, self.order)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.c, self.nvars, self.degree, self.order)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is not None:
            a, b = self._pair(o)
            tab = self.tables
            prod = a[tab.I] * b[tab.J]
            c = np.tensordot(tab.S, prod, axes=(1, 0))
            return Jet(c, self.nvars, self.degree, min(self.order, o.order))
        other = np.asarray(other, dtype=float)
        c = _lift_batch(self.c, other.ndim)
        return Jet(c * other[np.newaxis], self.nvars, self.degree, self.order)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * reciprocal(other)
        return self * (1.0 / np.asarray(other, dtype=float))

    def __rtruediv__(self, other):
        return reciprocal(self) * other

    def __pow__(self, n):
        if isinstance(n, (int, np.integer)) and n >= 0:
            out = Jet.constant(np.ones(self.shape), self.nvars, self.degree)
            for _ in range(int(n)):
                out = out * self
            return out
        x0 = self.value
        if np.any(x0 <= 0):
            raise JetDomainError("non-integer power of a non-positive jet")
        n = float(n)
        derivs = []
        coef = 1.0
        for k in range(self.degree + 1):
            derivs.append(coef * x0 ** (n - k))
            coef *= n - k
        return compose(self, derivs)


def compose(x: Jet, derivs: Sequence[np.ndarray]) -> Jet:
    """Chain rule: ``f(x)`` from the derivatives ``f^(k)(x.value)``, k = 0..degree."""
    delta = Jet(x.c.copy(), x.nvars, x.degree, x.order)
    delta.c[0] = 0.0
    out = Jet.constant(np.broadcast_to(derivs[0], x.shape), x.nvars, x.degree)
    power = None
    for k in range(1, x.degree + 1):
        power = delta if power is None else power * delta
        out = out + power * (np.asarray(derivs[k]) / math.factorial(k))
    out.order = x.order
    return out


def _unary(name: str, numpy_fn: Callable, derivs_fn: Callable) -> Callable:
    def fn(x):
        if isinstance(x, Jet):
            return compose(x, derivs_fn(x.value, x.degree))
        return numpy_fn(x)

    fn.__name__ = name
    return fn


def _sin_derivs(x0, n):
    s, c = np.sin(x0), np.cos(x0)
    cycle = [s, c, -s, -c]
    return [cycle[k % 4] for k in range(n + 1)]


def _cos_derivs(x0, n):
    s, c = np.sin(x0), np.cos(x0)
    cycle = [c, -s, -c, s]
    return [cycle[k % 4] for k in range(n + 1)]


def _exp_derivs(x0, n):
    e = np.exp(x0)
    return [e] * (n + 1)


def _log_derivs(x0, n):
    if np.any(x0 <= 0):
        raise JetDomainError("log of a non-positive jet")
    out = [np.log(x0)]
    for k in range(1, n + 1):
        out.append((-1) ** (k - 1) * math.factorial(k - 1) / x0**k)
    return out


def _recip_derivs(x0, n):
    if np.any(x0 == 0):
        raise JetDomainError("reciprocal of a jet with zero value")
    return [(-1) ** k * math.factorial(k) / x0 ** (k + 1) for k in range(n + 1)]


def _sqrt_derivs(x0, n):
    if np.any(x0 <= 0):
        raise JetDomainError("sqrt of a jet with non-positive value")
    out, coef = [], 1.0
    for k in range(n + 1):
        out.append(coef * x0 ** (0.5 - k))
        coef *= 0.5 - k
    return out


def _tan_derivs(x0, n):
    t = np.tan(x0)
    # powers of tan: d/dx t^m = m t^(m-1) (1 + t^2); iterate on polynomial coefficients
    poly = np.zeros(n + 2)
    poly[1] = 1.0
    out = []
    for _ in range(n + 1):
        out.append(np.polynomial.polynomial.polyval(t, poly))
        new = np.zeros(n + 4)
        for m, a in enumerate(poly):
            if a and m:
                new[m - 1] += m * a
                new[m + 1] += m * a
        poly = new[: n + 4]
    return out


def _asin_derivs(x0, n):
    if np.any(np.abs(x0) >= 1):
        raise JetDomainError("asin of a jet with |value| >= 1")
    w = 1.0 - x0 * x0
    out = [
        np.arcsin(x0),
        w**-0.5,
        x0 * w**-1.5,
        (1 + 2 * x0**2) * w**-2.5,
        (6 * x0**3 + 9 * x0) * w**-3.5,
    ]
    if n > 4:
        raise ValueError("asin jets are supported up to degree 4")
    return out[: n + 1]


def _atan_derivs(x0, n):
    w = 1.0 + x0 * x0
    out = [
        np.arctan(x0),
        1 / w,
        -2 * x0 / w**2,
        (6 * x0**2 - 2) / w**3,
        (24 * x0 - 24 * x0**3) / w**4,
    ]
    if n > 4:
        raise ValueError("atan jets are supported up to degree 4")
    return out[: n + 1]


sin = _unary("sin", np.sin, _sin_derivs)
cos = _unary("cos", np.cos, _cos_derivs)
tan = _unary("tan", np.tan, _tan_derivs)
exp = _unary("exp", np.exp, _exp_derivs)
log = _unary("log", np.log, _log_derivs)
sqrt = _unary("sqrt", np.sqrt, _sqrt_derivs)
asin = _unary("asin", np.arcsin, _asin_derivs)
atan = _unary("atan", np.arctan, _atan_derivs)
reciprocal = _unary("reciprocal", lambda x: 1.0 / x, _recip_derivs)


def atan2(y, x):
    """Branch-correct ``atan2``; the jet part comes from atan(y/x) or -atan(x/y)."""
    if not isinstance(y, Jet) and not isinstance(x, Jet):
        return np.arctan2(y, x)
    like = y if isinstance(y, Jet) else x
    y = y if isinstance(y, Jet) else Jet.constant(y, like.nvars, like.degree)
    x = x if isinstance(x, Jet) else Jet.constant(x, like.nvars, like.degree)
    y0, x0 = np.broadcast_arrays(y.value, x.value)
    if np.any((x0 == 0) & (y0 == 0)):
        raise JetDomainError("atan2 at the origin")
    use_x = np.abs(x0) >= np.abs(y0)
    safe_x = x + np.where(use_x, 0.0, 1.0) * (x0 == 0)
    safe_y = y + np.where(use_x, 1.0, 0.0) * (y0 == 0)
    # each branch only sees a patched denominator where the other branch is used
    a = atan(y / safe_x)
    b = -atan(x / safe_y)
    c = np.where(use_x, a.c, b.c)
    c[0] = np.arctan2(y0, x0)
    return Jet(c, like.nvars, like.degree, min(y.order, x.order))


def variables(values: Sequence, degree: int = 3) -> list[Jet]:
    """Seed one jet per coordinate, e.g. ``u, v = variables([u0, v0])``."""
    n = len(values)
    return [Jet.lift(v, i, n, degree) for i, v in enumerate(values)]


def constant(value, like: Jet) -> Jet:
    return Jet.constant(value, like.nvars, like.degree)


def value_of(x):
    """Base-point value of a jet, or the argument itself for plain numbers."""
    return x.value if isinstance(x, Jet) else np.asarray(x, dtype=float)


def substitute(poly: Jet, deltas: Sequence[Jet]) -> Jet:
    """Evaluate the Taylor polynomial ``poly`` at displacements given as jets.

    ``poly`` is an expansion in ``m`` variables around some base point and
    ``deltas`` holds ``m`` jets (in any number of variables) whose constant
    terms are the offsets from that base point; constant terms are dropped,
    so the jets must already be centered on it.
    """
    if len(deltas) != poly.nvars:
        raise ValueError("need one displacement per polynomial variable")
    like = deltas[0]
    ds = []
    for d in deltas:
        d = Jet(d.c.copy(), d.nvars, d.degree, d.order)
        d.c[0] = 0.0
        ds.append(d)
    tab = poly.tables
    out = None
    monos: dict[tuple, Jet] = {tab.exps[0]: Jet.constant(np.ones(()), like.nvars, like.degree)}
    for i, a in enumerate(tab.exps):
        if sum(a) > poly.order or sum(a) > like.degree:
            continue
        if a not in monos:
            axis = next(k for k, e in enumerate(a) if e)
            lower = tuple(e - (k == axis) for k, e in enumerate(a))
            monos[a] = monos[lower] * ds[axis]
        term = monos[a] * poly.c[i]
        out = term if out is None else out + term
    out.order = min([poly.order] + [d.order for d in ds])
    return out
