"""Coordinate models of the homogeneous spaces E(kappa, tau), tau != 0.

Two charts are provided:

* :class:`BergerSphere` -- the unit 3-sphere in R^4 with the Berger metric,
  computed in Hopf coordinates ``(s, theta1, theta2)`` so that Hopf tori are
  coordinate tori.  Points can also be given as unit vectors in R^4.
* :class:`DiskModel` -- the fibration chart ``(x, y, z)`` over the disk
  ``1 + kappa (x^2 + y^2) / 4 > 0`` (any sign of kappa; Nil_3 when kappa = 0).

Both expose the canonical orthonormal frame ``(f1, f2, f3 = xi)`` as
coordinate vector fields.  Everything else -- Christoffel symbols, frame
connection coefficients, curvature -- is derived from the chart metric by jet
differentiation, so the frame relations can be checked rather than assumed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Sequence

import numpy as np

from . import jets as J
from .errors import ChartDomainError, ZeroTau
from .jets import Jet

__all__ = [
    "ModelParams",
    "ChartId",
    "AmbientPoint",
    "TangentVec",
    "BergerSphere",
    "DiskModel",
    "make_chart",
    "AmbientJets",
    "AmbientConnection",
    "metric_at",
    "canonical_frame",
    "frame_vectors",
    "connection_forms",
    "inv3",
    "det3",
]


@dataclass(frozen=True)
class ModelParams:
    kappa: float
    tau: float

    def __post_init__(self):
        if self.tau == 0:
            raise ZeroTau("tau must be nonzero")

    @property
    def excess(self) -> float:
        """kappa - 4 tau^2; zero for the round space form."""
        return self.kappa - 4.0 * self.tau**2


class ChartId(str, Enum):
    BERGER = "BergerSphere"
    DISK = "DiskModel"


# -- small dense linear algebra on nested lists (jets or arrays) ------------


def det3(m):
    a, b, c = m[0]
    d, e, f = m[1]
    g, h, i = m[2]
    return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)


def inv3(m):
    a, b, c = m[0]
    d, e, f = m[1]
    g, h, i = m[2]
    A, B, C = e * i - f * h, -(d * i - f * g), d * h - e * g
    det = a * A + b * B + c * C
    rdet = 1.0 / det
    adj = [
        [A, -(b * i - c * h), b * f - c * e],
        [B, a * i - c * g, -(a * f - c * d)],
        [C, -(a * h - b * g), a * e - b * d],
    ]
    return [[adj[r][k] * rdet for k in range(3)] for r in range(3)]


def _zeros_like(x):
    return x * 0.0


# -- charts -----------------------------------------------------------------


class Chart:
    """Base class: subclasses supply ``metric`` and ``frame`` as coordinate formulas."""

    chart_id: ChartId

    def __init__(self, params: ModelParams):
        self.params = params

    @property
    def kappa(self) -> float:
        return self.params.kappa

    @property
    def tau(self) -> float:
        return self.params.tau

    def metric(self, x):
        raise NotImplementedError

    def frame(self, x):
        """``F[A][i]``: coordinate component ``i`` of the frame field ``f_{A+1}``."""
        raise NotImplementedError

    def check_domain(self, x0) -> None:
        raise NotImplementedError

    def random_points(self, n: int, rng: np.random.Generator) -> np.ndarray:
        raise NotImplementedError

    def __repr__(self) -> str:
        return f"{type(self).__name__}(kappa={self.kappa}, tau={self.tau})"


class BergerSphere(Chart):
    """S^3 with the Berger metric, in Hopf coordinates.

    ``(s, theta1, theta2) -> (cos s e^{i theta1}, sin s e^{i theta2})``.
    The metric is the pull-back of the R^4 formula
    ``4/kappa [<X,Y> + (4 tau^2/kappa - 1) <X,xi><Y,xi>]`` where ``xi`` is the
    round Hopf field ``i p``.
    """

    chart_id = ChartId.BERGER

    def __init__(self, params: ModelParams):
        super().__init__(params)
        if params.kappa <= 0:
            raise ValueError("the Berger sphere needs kappa > 0")

    @staticmethod
    def embed(x):
        s, t1, t2 = x
        cs, ss = J.cos(s), J.sin(s)
        return [cs * J.cos(t1), cs * J.sin(t1), ss * J.cos(t2), ss * J.sin(t2)]

    @staticmethod
    def from_embedding(p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        r1 = np.hypot(p[0], p[1])
        r2 = np.hypot(p[2], p[3])
        return np.array([np.arctan2(r2, r1), np.arctan2(p[1], p[0]), np.arctan2(p[3], p[2])])

    def ambient_form(self, p4):
        """The 4x4 Berger bilinear form at a unit vector ``p4`` of R^4."""
        x0, x1, x2, x3 = p4
        xi = [-x1, x0, -x3, x2]
        k = self.kappa
        lam = 4.0 * self.tau**2 / k - 1.0
        return [[(4.0 / k) * ((1.0 if a == b else 0.0) + lam * xi[a] * xi[b]) for b in range(4)] for a in range(4)]

    def metric(self, x):
        # pull back the R^4 form through the embedding; jets give the Jacobian
        if isinstance(x[0], Jet):
            return self._metric_pullback(x)
        s, t1, t2 = (np.asarray(c, dtype=float) for c in x)
        xs = J.variables([s, t1, t2], degree=1)
        g = self._metric_pullback(xs)
        return [[g[i][j].value for j in range(3)] for i in range(3)]

    def _metric_pullback(self, x):
        s, t1, t2 = x
        cs, ss = J.cos(s), J.sin(s)
        c1, s1, c2, s2 = J.cos(t1), J.sin(t1), J.cos(t2), J.sin(t2)
        p4 = [cs * c1, cs * s1, ss * c2, ss * s2]
        # columns of the Jacobian d p4 / d(s, t1, t2)
        jac = [
            [-ss * c1, -cs * s1, _zeros_like(s)],
            [-ss * s1, cs * c1, _zeros_like(s)],
            [cs * c2, _zeros_like(s), -ss * s2],
            [cs * s2, _zeros_like(s), ss * c2],
        ]
        M = self.ambient_form(p4)
        g = [[None] * 3 for _ in range(3)]
        for i in range(3):
            for j in range(i, 3):
                acc = 0.0
                for a in range(4):
                    row = 0.0
                    for b in range(4):
                        row = row + M[a][b] * jac[b][j]
                    acc = acc + jac[a][i] * row
                g[i][j] = g[j][i] = acc
        return g

    def frame(self, x):
        s, t1, t2 = x
        phi = t1 + t2
        cp, sp = J.cos(phi), J.sin(phi)
        ts = J.tan(s)
        cot = 1.0 / ts
        h = np.sqrt(self.kappa) / 2.0
        v = self.kappa / (4.0 * self.tau)
        zero = _zeros_like(s)
        # j.p and k.p (left quaternion multiplication) scaled to unit length
        f1 = [h * cp, h * sp * ts, -h * sp * cot]
        f2 = [h * sp, -h * cp * ts, h * cp * cot]
        f3 = [zero, zero + v, zero + v]
        return [f1, f2, f3]

    def embedded_frame(self, p4) -> np.ndarray:
        """Frame vectors as R^4 vectors at a unit vector ``p4`` (shape (3, 4, ...))."""
        x0, x1, x2, x3 = np.asarray(p4, dtype=float)
        h = np.sqrt(self.kappa) / 2.0
        v = self.kappa / (4.0 * self.tau)
        jp = np.array([-x2, x3, x0, -x1])
        kp = np.array([-x3, -x2, x1, x0])
        ip = np.array([-x1, x0, -x3, x2])
        return np.array([h * jp, h * kp, v * ip])

    def check_domain(self, x0) -> None:
        s = np.asarray(x0[0])
        if np.any((s <= 0) | (s >= np.pi / 2)):
            raise ChartDomainError("Hopf latitude s must lie in (0, pi/2)")

    def random_points(self, n, rng):
        return np.array([rng.uniform(0.15, np.pi / 2 - 0.15, n), rng.uniform(0, 2 * np.pi, n), rng.uniform(0, 2 * np.pi, n)])


class DiskModel(Chart):
    """Fibration chart ``ds^2 = lam^2 (dx^2 + dy^2) + (tau lam (y dx - x dy) + dz)^2``.

    ``lam = 1 / (1 + kappa (x^2 + y^2) / 4)``.  The canonical frame is the
    horizontal lift of the conformal frame, rotated about the fiber by the
    angle ``-kappa z / (2 tau)``; the rotation is what turns the brackets into
    constants.
    """

    chart_id = ChartId.DISK

    def metric(self, x):
        X, Y, Z = x
        lam = 1.0 / (1.0 + self.kappa * (X * X + Y * Y) / 4.0)
        tau = self.tau
        w3 = [tau * lam * Y, -tau * lam * X, _zeros_like(X) + 1.0]
        flat = [lam * lam, lam * lam, _zeros_like(X)]
        return [[(flat[i] if i == j else 0.0) + w3[i] * w3[j] for j in range(3)] for i in range(3)]

    def frame(self, x):
        X, Y, Z = x
        mu = 1.0 + self.kappa * (X * X + Y * Y) / 4.0
        tau = self.tau
        zero = _zeros_like(X)
        a = [zero, mu, tau * X]  # lift of mu d/dy
        b = [mu, zero, -tau * Y]  # lift of mu d/dx
        th = -self.kappa * Z / (2.0 * tau)
        c, s = J.cos(th), J.sin(th)
        f1 = [c * ai + s * bi for ai, bi in zip(a, b)]
        f2 = [-s * ai + c * bi for ai, bi in zip(a, b)]
        f3 = [zero, zero, zero + 1.0]
        return [f1, f2, f3]

    def check_domain(self, x0) -> None:
        X, Y = np.asarray(x0[0]), np.asarray(x0[1])
        if np.any(1.0 + self.kappa * (X * X + Y * Y) / 4.0 <= 0):
            raise ChartDomainError("point outside the disk 1 + kappa r^2 / 4 > 0")

    def radius_limit(self) -> float:
        return np.inf if self.kappa >= 0 else 2.0 / np.sqrt(-self.kappa)

    def random_points(self, n, rng):
        rmax = min(1.0, 0.8 * self.radius_limit())
        r = rmax * np.sqrt(rng.uniform(0, 1, n))
        a = rng.uniform(0, 2 * np.pi, n)
        return np.array([r * np.cos(a), r * np.sin(a), rng.uniform(-2, 2, n)])


def make_chart(params: ModelParams, chart: str | ChartId | None = None) -> Chart:
    """Berger sphere for kappa > 0 unless the disk chart is asked for."""
    if chart is None:
        chart = ChartId.BERGER if params.kappa > 0 else ChartId.DISK
    chart = ChartId(chart)
    return BergerSphere(params) if chart is ChartId.BERGER else DiskModel(params)


# -- points and tangent vectors ---------------------------------------------


@dataclass(frozen=True)
class AmbientPoint:
    chart_id: ChartId
    coords: tuple

    def __post_init__(self):
        object.__setattr__(self, "chart_id", ChartId(self.chart_id))
        object.__setattr__(self, "coords", tuple(float(c) for c in self.coords))
        n = 4 if self.chart_id is ChartId.BERGER else 3
        if len(self.coords) != n:
            raise ValueError(f"{self.chart_id.value} points need {n} coordinates")
        if self.chart_id is ChartId.BERGER and abs(sum(c * c for c in self.coords) - 1.0) > 1e-9:
            raise ChartDomainError("Berger sphere points must be unit vectors of R^4")

    def chart_coords(self) -> np.ndarray:
        if self.chart_id is ChartId.BERGER:
            return BergerSphere.from_embedding(self.coords)
        return np.array(self.coords)


@dataclass(frozen=True)
class TangentVec:
    base: AmbientPoint
    components: tuple  # in the canonical frame (f1, f2, f3)

    def norm_sq(self) -> float:
        return float(sum(c * c for c in self.components))


def _chart_for(p: AmbientPoint, params: ModelParams) -> Chart:
    chart = make_chart(params, p.chart_id)
    if p.chart_id is ChartId.DISK:
        chart.check_domain(p.chart_coords())
    return chart


def metric_at(p: AmbientPoint, params: ModelParams) -> np.ndarray:
    """4x4 Berger form on R^4 for sphere points, 3x3 chart metric for the disk."""
    chart = _chart_for(p, params)
    if p.chart_id is ChartId.BERGER:
        return np.array(chart.ambient_form(np.array(p.coords)), dtype=float)
    return np.array(chart.metric(np.array(p.coords)), dtype=float)


def frame_vectors(p: AmbientPoint, params: ModelParams) -> np.ndarray:
    """Rows are f1, f2, f3 in the representation used by :func:`metric_at`."""
    chart = _chart_for(p, params)
    if p.chart_id is ChartId.BERGER:
        return chart.embedded_frame(np.array(p.coords))
    return np.array(chart.frame(np.array(p.coords)), dtype=float)


def canonical_frame(p: AmbientPoint, params: ModelParams) -> tuple:
    _chart_for(p, params)
    eye = np.eye(3)
    return tuple(TangentVec(p, tuple(row)) for row in eye)


def connection_forms(p: AmbientPoint, params: ModelParams, X: Sequence[float]) -> dict:
    """Values of w^1_2, w^1_3, w^2_3 on a vector ``X`` given in frame components.

    ``w^A_B(X) = <nabla_X f_B, f_A>``, computed from the chart metric.
    """
    chart = make_chart(params, p.chart_id)
    x0 = p.chart_coords().reshape(3, 1)
    gam = AmbientConnection(chart).frame_coefficients(x0)[..., 0]
    X = np.asarray(X, dtype=float)

    def w(A, B):
        return float(sum(X[C] * gam[C, B, A] for C in range(3)))

    return {"w12": w(0, 1), "w13": w(0, 2), "w23": w(1, 2)}


# -- connection machinery ---------------------------------------------------


def _as_jets(components, like: Jet) -> list:
    """Promote constant field components to jets so they can be differentiated."""
    return [c if isinstance(c, Jet) else J.constant(np.broadcast_to(c, like.shape), like) for c in components]


@dataclass
class AmbientJets:
    """Chart tensors expanded as 3-variable jets around a batch of points."""

    x: list
    g: list
    ginv: list
    F: list
    Finv: list  # Finv[A][i]: coordinate vector -> frame components
    christoffel: list  # christoffel[k][i][j] = Gamma^k_ij
    frame_conn: list = field(default_factory=list)  # frame_conn[A][B][C] = <nabla_{f_A} f_B, f_C>


class AmbientConnection:
    """Levi-Civita connection of a chart, evaluated through jets of its metric."""

    def __init__(self, chart: Chart, degree: int = 3):
        self.chart = chart
        self.degree = degree

    def expand(self, x0, degree: int | None = None) -> AmbientJets:
        degree = self.degree if degree is None else degree
        x0 = np.asarray(x0, dtype=float)
        self.chart.check_domain(x0)
        x = J.variables(list(x0), degree=degree)
        g = self.chart.metric(x)
        ginv = inv3(g)
        dg = [[[g[i][j].diff(k) for k in range(3)] for j in range(3)] for i in range(3)]
        gam = [
            [
                [
                    0.5 * sum(ginv[k][l] * (dg[l][j][i] + dg[l][i][j] - dg[i][j][l]) for l in range(3))
                    for j in range(3)
                ]
                for i in range(3)
            ]
            for k in range(3)
        ]
        F = self.chart.frame(x)
        Fmat = [[F[A][i] for A in range(3)] for i in range(3)]  # columns are frame fields
        Finv = inv3(Fmat)
        conn = [[[None] * 3 for _ in range(3)] for _ in range(3)]
        for A in range(3):
            for B in range(3):
                nab = [
                    sum(F[A][i] * (F[B][k].diff(i) + sum(gam[k][i][j] * F[B][j] for j in range(3))) for i in range(3))
                    for k in range(3)
                ]
                for C in range(3):
                    conn[A][B][C] = sum(g[k][l] * nab[k] * F[C][l] for k in range(3) for l in range(3))
        return AmbientJets(x, g, ginv, F, Finv, gam, conn)

    def frame_coefficients(self, x0) -> np.ndarray:
        """``Gamma[A, B, C] = <nabla_{f_A} f_B, f_C>`` at the points ``x0`` (3, n)."""
        aj = self.expand(x0, degree=2)
        return np.array([[[aj.frame_conn[A][B][C].value for C in range(3)] for B in range(3)] for A in range(3)])

    def brackets(self, x0) -> np.ndarray:
        """``[f_A, f_B]`` in frame components, shape (3, 3, 3, n)."""
        x0 = np.asarray(x0, dtype=float)
        x = J.variables(list(x0), degree=2)
        F = self.chart.frame(x)
        Finv = inv3([[F[A][i] for A in range(3)] for i in range(3)])
        out = np.zeros((3, 3, 3) + x0.shape[1:])
        for A in range(3):
            for B in range(A + 1, 3):
                br = [
                    sum(F[A][i] * F[B][k].diff(i) - F[B][i] * F[A][k].diff(i) for i in range(3)) for k in range(3)
                ]
                for C in range(3):
                    val = sum(Finv[C][k] * br[k] for k in range(3)).value
                    out[A, B, C] = val
                    out[B, A, C] = -val
        return out

    def coframe_differentials(self, x0) -> np.ndarray:
        """``dw^A(f_B, f_C)`` from coordinate derivatives of the coframe, shape (3,3,3,n)."""
        x0 = np.asarray(x0, dtype=float)
        x = J.variables(list(x0), degree=2)
        F = self.chart.frame(x)
        Finv = inv3([[F[A][i] for A in range(3)] for i in range(3)])
        out = np.zeros((3, 3, 3) + x0.shape[1:])
        for A in range(3):
            dw = [[(Finv[A][j].diff(i) - Finv[A][i].diff(j)).value for j in range(3)] for i in range(3)]
            for B in range(3):
                for C in range(3):
                    fb = [F[B][i].value for i in range(3)]
                    fc = [F[C][j].value for j in range(3)]
                    out[A, B, C] = sum(dw[i][j] * fb[i] * fc[j] for i in range(3) for j in range(3))
        return out

    def killing_defect(self, x0) -> np.ndarray:
        """Components of the Lie derivative of the metric along f3 (should vanish)."""
        x0 = np.asarray(x0, dtype=float)
        x = J.variables(list(x0), degree=2)
        g = self.chart.metric(x)
        X = self.chart.frame(x)[2]
        out = np.zeros((3, 3) + x0.shape[1:])
        for i in range(3):
            for j in range(3):
                val = sum(X[k] * g[i][j].diff(k) + g[k][j] * X[k].diff(i) + g[i][k] * X[k].diff(j) for k in range(3))
                out[i, j] = val.value
        return out

    def riemann(self, x0) -> np.ndarray:
        """Coordinate curvature ``R^l_{kij}`` with ``R(d_i, d_j) d_k = R^l_{kij} d_l``."""
        aj = self.expand(x0, degree=3)
        gam = aj.christoffel
        n = np.asarray(x0).shape[1:]
        R = np.zeros((3, 3, 3, 3) + n)
        for l in range(3):
            for k in range(3):
                for i in range(3):
                    for j in range(3):
                        val = gam[l][j][k].diff(i) - gam[l][i][k].diff(j)
                        val = val + sum(gam[l][i][m] * gam[m][j][k] - gam[l][j][m] * gam[m][i][k] for m in range(3))
                        R[l, k, i, j] = val.value
        return R

    def curvature_form(self, x0, X, Y, Z, W) -> np.ndarray:
        """``<R(X,Y)Z, W>`` for vectors given in frame components (arrays (3, n))."""
        x0 = np.asarray(x0, dtype=float)
        R = self.riemann(x0)
        F = np.array(self.chart.frame(x0), dtype=float)  # (A, i, n)
        g = np.array(self.chart.metric(x0), dtype=float)
        to_coord = lambda V: np.einsum("a...,ai...->i...", np.asarray(V, dtype=float), F)
        Xc, Yc, Zc, Wc = map(to_coord, (X, Y, Z, W))
        RZ = np.einsum("lkij...,i...,j...,k...->l...", R, Xc, Yc, Zc)
        return np.einsum("lm...,l...,m...->...", g, RZ, Wc)

    def covariant_derivative(self, X: Callable, Y: Callable, x0) -> np.ndarray:
        """``nabla_X Y`` in frame components at points ``x0``.

        ``X`` and ``Y`` map chart coordinates (jets) to frame components.
        """
        aj = self.expand(x0, degree=2)
        Xf = _as_jets(X(aj.x), aj.x[0])
        Yf = _as_jets(Y(aj.x), aj.x[0])
        Xc = [sum(Xf[A] * aj.F[A][i] for A in range(3)) for i in range(3)]
        out = []
        for C in range(3):
            val = sum(Xc[i] * Yf[C].diff(i) for i in range(3))
            val = val + sum(Xf[A] * Yf[B] * aj.frame_conn[A][B][C] for A in range(3) for B in range(3))
            out.append(J.value_of(val))
        return np.array(out)

    def lie_bracket(self, X: Callable, Y: Callable, x0) -> np.ndarray:
        """``[X, Y]`` in frame components at points ``x0``."""
        x = J.variables(list(np.asarray(x0, dtype=float)), degree=2)
        F = self.chart.frame(x)
        Finv = inv3([[F[A][i] for A in range(3)] for i in range(3)])
        Xf, Yf = _as_jets(X(x), x[0]), _as_jets(Y(x), x[0])
        Xc = [sum(Xf[A] * F[A][i] for A in range(3)) for i in range(3)]
        Yc = [sum(Yf[A] * F[A][i] for A in range(3)) for i in range(3)]
        br = [sum(Xc[i] * Yc[k].diff(i) - Yc[i] * Xc[k].diff(i) for i in range(3)) for k in range(3)]
        return np.array([J.value_of(sum(Finv[C][k] * br[k] for k in range(3))) for C in range(3)])

    def along(self, xs: Sequence[Jet]) -> list:
        """Frame connection coefficients as jets along a surface ``xs(u, v)``."""
        x0 = np.array([c.value for c in xs])
        aj = self.expand(x0, degree=xs[0].degree)
        return [[[J.substitute(aj.frame_conn[A][B][C], xs) for C in range(3)] for B in range(3)] for A in range(3)]
