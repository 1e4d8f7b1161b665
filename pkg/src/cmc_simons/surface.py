"""Immersed parametric surfaces in E(kappa, tau) and their adapted-frame data.

All quantities are computed from jets of the immersion ``(u, v) -> chart``.
Vectors are carried in components of the canonical frame (f1, f2, f3), which
is orthonormal, so inner products are plain dot products.  The ambient
covariant derivative along the surface uses frame connection coefficients
obtained from the chart metric (see :class:`~cmc_simons.ambient.AmbientConnection`).

Conventions:

* ``N`` is ``d_u f x d_v f`` normalized, ``C = <xi, N> = sin(beta)`` and
  ``beta = asin(C)``, so ``cos(beta) >= 0`` and ``beta`` is in (-pi/2, pi/2).
* The rotated horizontal frame is ``f2' = -(N - C xi) / cos(beta)``,
  ``f1' = f2' x xi``; the adapted frame is ``e1 = f1'``,
  ``e2 = sin(beta) f2' + cos(beta) xi`` and ``e3 = N``.
* ``h_ij = <nabla_{e_j} e_i, N>``, ``beta_ij = e_j e_i (beta)`` and
  ``w12(X) = <nabla_X f2', f1'>``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import jets as J
from .ambient import AmbientConnection, Chart, ModelParams, inv3, make_chart
from .errors import AdaptedFrameUndefined, DegenerateParametrization

__all__ = [
    "ParametricImmersion",
    "SurfaceFrameData",
    "TField",
    "evaluate_surface",
    "tangent_normal",
    "second_fundamental_form",
    "adapted_frame",
    "t_field",
    "mean_curvature",
    "curvature_data",
    "area_element",
    "GATE",
]

GATE = 1e-6
DEGENERACY = 1e-12


def _dot(a, b):
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def _cross(a, b):
    return [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]


@dataclass(frozen=True)
class ParametricImmersion:
    """A map from a parameter rectangle into a chart of E(kappa, tau).

    ``map(u, v)`` must accept jets (or arrays) and return the three chart
    coordinates.  ``cmc_tag`` marks surfaces whose mean curvature is claimed
    constant; the claim is verified before any cmc-only identity is used.
    """

    params: ModelParams
    chart: Chart
    map: Callable
    domain: tuple = ((0.0, 2 * np.pi), (0.0, 2 * np.pi))
    periodic: tuple = (True, True)
    cmc_tag: bool = False
    name: str = "surface"
    spec: dict = field(default_factory=dict, compare=False)

    @property
    def compact(self) -> bool:
        return all(self.periodic)

    def grid(self, n_u: int, n_v: int, offset=(0.0, 0.0)) -> tuple[np.ndarray, np.ndarray]:
        """Flattened sample grid: equispaced (endpoint excluded) on periodic axes."""
        axes = []
        for (lo, hi), per, n, off in zip(self.domain, self.periodic, (n_u, n_v), offset):
            if per:
                h = (hi - lo) / n
                axes.append(lo + (np.arange(n) + off) * h)
            else:
                axes.append(np.linspace(lo, hi, n))
        U, V = np.meshgrid(*axes, indexing="ij")
        return U.ravel(), V.ravel()

    def points(self, u, v) -> np.ndarray:
        return np.array([np.broadcast_to(np.asarray(c, dtype=float), np.shape(u)) for c in self.map(np.asarray(u, float), np.asarray(v, float))])

    def check_periodicity(self, n: int = 16, tol: float = 1e-10) -> float:
        """Largest coordinate mismatch across identified edges (angles mod 2 pi)."""
        worst = 0.0
        (u0, u1), (v0, v1) = self.domain
        t = np.linspace(0, 1, n)
        for axis, per in enumerate(self.periodic):
            if not per:
                continue
            if axis == 0:
                a = self.points(np.full(n, u0), v0 + t * (v1 - v0))
                b = self.points(np.full(n, u1), v0 + t * (v1 - v0))
            else:
                a = self.points(u0 + t * (u1 - u0), np.full(n, v0))
                b = self.points(u0 + t * (u1 - u0), np.full(n, v1))
            d = np.abs(a - b)
            if self.chart.chart_id.value == "BergerSphere":
                d[1:] = np.abs(np.angle(np.exp(1j * (a[1:] - b[1:]))))
            worst = max(worst, float(d.max()))
        return worst


@dataclass
class TField:
    """T = xi - <xi, N> N in the tangent frame (e1, e2)."""

    components: np.ndarray  # (2, n)
    norm_sq: np.ndarray


@dataclass
class SurfaceFrameData:
    """Per-point adapted-frame data; every array has a trailing point axis.

    Entries at points outside W (``valid == False``) are NaN.
    """

    params: ModelParams
    u: np.ndarray
    v: np.ndarray
    point: np.ndarray
    valid: np.ndarray
    e1: np.ndarray
    e2: np.ndarray
    N: np.ndarray
    beta: np.ndarray
    C: np.ndarray
    beta1: np.ndarray
    beta2: np.ndarray
    beta11: np.ndarray
    beta12: np.ndarray
    beta21: np.ndarray
    beta22: np.ndarray
    w12_e1: np.ndarray
    w12_e2: np.ndarray
    e2_w12_e1: np.ndarray
    h11: np.ndarray
    h12: np.ndarray
    h21: np.ndarray
    h22: np.ndarray
    H: np.ndarray
    H1: np.ndarray  # e1(H)
    H2: np.ndarray  # e2(H)
    A_sq: np.ndarray
    phi_norm_sq: np.ndarray
    conn: np.ndarray  # conn[i, j, k] = <nabla_{e_i} e_j, e_k>
    h_cov: np.ndarray  # h_cov[i, j, k] = h_{ij|k}
    K_intrinsic: np.ndarray
    K_ambient: np.ndarray
    T: np.ndarray  # (2, n) components of T in (e1, e2)
    T_sq: np.ndarray
    nabla_TT: np.ndarray  # (2, n)
    t_identity_lhs: np.ndarray  # 1/2 lap|T|^2 - div(nabla_T T)
    area_element: np.ndarray
    lap_phi_sq: Optional[np.ndarray] = None
    lap_phi_sq_frame: Optional[np.ndarray] = None
    cmc_tag: bool = False
    surface_name: str = ""

    @property
    def tau(self) -> float:
        return self.params.tau

    @property
    def kappa(self) -> float:
        return self.params.kappa

    @property
    def cos_beta(self) -> np.ndarray:
        return np.cos(self.beta)

    @property
    def grad_A_sq(self) -> np.ndarray:
        return np.sum(self.h_cov**2, axis=(0, 1, 2))

    @property
    def n_points(self) -> int:
        return self.u.size

    def take(self, mask) -> "SurfaceFrameData":
        """Restrict every per-point array to ``mask``."""
        out = {}
        for name in self.__dataclass_fields__:
            val = getattr(self, name)
            if isinstance(val, np.ndarray) and val.shape and val.shape[-1] == self.u.size:
                val = val[..., mask]
            out[name] = val
        return SurfaceFrameData(**out)


class _SurfaceJets:
    """Jets of every frame quantity at a batch of parameter points."""

    def __init__(self, imm: ParametricImmersion, u, v, degree: int, gate: float, frame: bool = True):
        self.imm = imm
        chart = imm.chart
        U, V = J.variables([np.asarray(u, float), np.asarray(v, float)], degree=degree)
        X = [J.Jet.constant(np.zeros(np.shape(u)), 2, degree) + c for c in imm.map(U, V)]
        x0 = np.array([c.value for c in X])
        chart.check_domain(x0)
        self.X = X
        self.x0 = x0

        F = chart.frame(X)
        Finv = inv3([[F[A][i] for A in range(3)] for i in range(3)])
        self.F = F
        tu_c = [c.diff(0) for c in X]
        tv_c = [c.diff(1) for c in X]
        self.tu = [sum(Finv[A][i] * tu_c[i] for i in range(3)) for A in range(3)]
        self.tv = [sum(Finv[A][i] * tv_c[i] for i in range(3)) for A in range(3)]
        tu, tv = self.tu, self.tv

        gE, gF, gG = _dot(tu, tu), _dot(tu, tv), _dot(tv, tv)
        det = gE * gG - gF * gF
        if np.any(det.value < DEGENERACY):
            raise DegenerateParametrization("first fundamental form is degenerate at a sample point")
        self.g = [[gE, gF], [gF, gG]]
        self.det = det
        rdet = 1.0 / det
        self.ginv = [[gG * rdet, -gF * rdet], [-gF * rdet, gE * rdet]]

        n = _cross(tu, tv)
        rn = 1.0 / J.sqrt(_dot(n, n))
        N = [c * rn for c in n]
        self.N = N
        if not frame:
            if degree >= 2:
                self.gamma = AmbientConnection(chart, degree=degree).along(X)
            return
        C = N[2]
        r2 = N[0] * N[0] + N[1] * N[1]
        self.valid = np.sqrt(r2.value) >= gate
        # keep gated points finite; their outputs are masked afterwards
        patch = np.where(self.valid, 0.0, 1.0)
        cosb = J.sqrt(r2 + patch)
        Nh0, Nh1 = N[0] + patch, N[1]
        Csafe = C * np.where(self.valid, 1.0, 0.0)
        self.C, self.cosb = Csafe, cosb
        self.beta = J.asin(Csafe)

        f2t = [-Nh0 / cosb, -Nh1 / cosb, 0.0 * C]
        f1t = [f2t[1], -f2t[0], 0.0 * C]
        self.f1t, self.f2t = f1t, f2t
        e1 = f1t
        e2 = [Csafe * f2t[0], Csafe * f2t[1], cosb]
        self.e = [e1, e2]

        # e_i = a_i d_u + b_i d_v
        self.coef = []
        for e in self.e:
            pu, pv = _dot(e, tu), _dot(e, tv)
            self.coef.append((self.ginv[0][0] * pu + self.ginv[0][1] * pv, self.ginv[1][0] * pu + self.ginv[1][1] * pv))

        self.gamma = AmbientConnection(chart, degree=degree).along(X)

    # -- differential operators --------------------------------------------
    def D(self, i: int, f):
        """Directional derivative of a scalar jet along e_i."""
        a, b = self.coef[i]
        return a * f.diff(0) + b * f.diff(1)

    def cov(self, i: int, Y):
        """Ambient covariant derivative of a frame-component field along e_i."""
        e = self.e[i]
        g = self.gamma
        out = []
        for C in range(3):
            val = self.D(i, Y[C]) if isinstance(Y[C], J.Jet) else 0.0
            for A in range(3):
                for B in range(3):
                    val = val + e[A] * Y[B] * g[A][B][C]
            out.append(val)
        return out

    def frame_laplacian(self, f, conn):
        """sum_i e_i e_i f - (nabla_{e_i} e_i) f, using connection values ``conn``."""
        total = 0.0
        for i in range(2):
            total = total + self.D(i, self.D(i, f))
            for k in range(2):
                total = total - conn[i][i][k] * self.D(k, f)
        return total


def _intrinsic(sj: _SurfaceJets):
    """Coordinate Christoffel symbols and curvature of the induced metric."""
    g, ginv = sj.g, sj.ginv
    dg = [[[g[a][b].diff(c) for c in range(2)] for b in range(2)] for a in range(2)]
    gam = [
        [[0.5 * sum(ginv[c][d] * (dg[d][b][a] + dg[d][a][b] - dg[a][b][d]) for d in range(2)) for b in range(2)] for a in range(2)]
        for c in range(2)
    ]

    def riem(d, c, a, b):  # R^d_{cab}
        val = gam[d][b][c].diff(a) - gam[d][a][c].diff(b)
        return val + sum(gam[d][a][e] * gam[e][b][c] - gam[d][b][e] * gam[e][a][c] for e in range(2))

    R_uvvu = sum(g[0][d] * riem(d, 1, 0, 1) for d in range(2))
    K = R_uvvu / sj.det
    return gam, K


def _coord_laplacian(f, gam, ginv):
    total = 0.0
    for a in range(2):
        for b in range(2):
            second = f.diff(a).diff(b) - sum(gam[c][a][b] * f.diff(c) for c in range(2))
            total = total + ginv[a][b] * second
    return total


def evaluate_surface(
    imm: ParametricImmersion, u, v, degree: int = 3, gate: float = GATE, strict: bool = False
) -> SurfaceFrameData:
    """Adapted-frame data at parameter points ``(u, v)`` (arrays of equal shape).

    ``degree=4`` additionally fills the Laplacian of |Phi|^2.  Points where
    ``cos(beta) < gate`` are marked invalid (or raise with ``strict=True``).
    """
    u = np.atleast_1d(np.asarray(u, dtype=float)).ravel()
    v = np.atleast_1d(np.asarray(v, dtype=float)).ravel()
    sj = _SurfaceJets(imm, u, v, degree, gate)
    if strict and not np.all(sj.valid):
        raise AdaptedFrameUndefined(f"|cos(beta)| < {gate} at {np.count_nonzero(~sj.valid)} point(s)")
    e, N = sj.e, sj.N
    beta = sj.beta
    b1, b2 = sj.D(0, beta), sj.D(1, beta)
    b11, b12 = sj.D(0, b1), sj.D(1, b1)
    b21, b22 = sj.D(0, b2), sj.D(1, b2)

    nab = [[sj.cov(j, e[i]) for j in range(2)] for i in range(2)]  # nab[i][j] = nabla_{e_j} e_i
    h = [[_dot(nab[i][j], N) for j in range(2)] for i in range(2)]
    conn = [[[_dot(nab[j][i], e[k]) for k in range(2)] for j in range(2)] for i in range(2)]
    H = 0.5 * (h[0][0] + h[1][1])
    A_sq = h[0][0] * h[0][0] + h[0][1] * h[0][1] + h[1][0] * h[1][0] + h[1][1] * h[1][1]
    phi_sq = A_sq - 2.0 * H * H

    w12 = [_dot(sj.cov(i, sj.f2t), sj.f1t) for i in range(2)]
    e2_w12_e1 = sj.D(1, w12[0])

    hcov = [[[None] * 2 for _ in range(2)] for _ in range(2)]
    for i in range(2):
        for j in range(2):
            for k in range(2):
                val = sj.D(k, h[i][j])
                for l in range(2):
                    val = val - h[l][j] * conn[k][i][l] - h[i][l] * conn[k][j][l]
                hcov[i][j][k] = val

    gam2, K = _intrinsic(sj)
    e1v = np.array([c.value for c in e[0]])
    e2v = np.array([c.value for c in e[1]])
    K_amb = AmbientConnection(imm.chart).curvature_form(sj.x0, e1v, e2v, e2v, e1v)

    # T = xi - C N in coordinates (u, v), computed from the induced metric only
    Tc = [sj.ginv[a][0] * sj.tu[2] + sj.ginv[a][1] * sj.tv[2] for a in range(2)]
    T_sq = sum(sj.g[a][b] * Tc[a] * Tc[b] for a in range(2) for b in range(2))
    nTT = [sum(Tc[a] * Tc[c].diff(a) for a in range(2)) + sum(gam2[c][a][b] * Tc[a] * Tc[b] for a in range(2) for b in range(2)) for c in range(2)]
    div_nTT = sum(nTT[a].diff(a) + sum(gam2[a][a][b] * nTT[b] for b in range(2)) for a in range(2))
    t_lhs = 0.5 * _coord_laplacian(T_sq, gam2, sj.ginv) - div_nTT
    coords_e = [sj.coef[i] for i in range(2)]
    nTT_frame = [sum(sj.g[a][b] * nTT[a] * coords_e[i][b] for a in range(2) for b in range(2)) for i in range(2)]
    T_frame = [e[i][2] for i in range(2)]  # <xi, e_i>

    lap_phi = lap_phi_frame = None
    if degree >= 4:
        lap_phi = J.value_of(_coord_laplacian(phi_sq, gam2, sj.ginv))
        conn_vals = [[[c.value for c in row] for row in mat] for mat in conn]
        lap_phi_frame = J.value_of(sj.frame_laplacian(phi_sq, conn_vals))

    val = J.value_of
    mask = sj.valid

    def m(x):
        x = np.array(np.broadcast_to(val(x), mask.shape), dtype=float)
        x[~mask] = np.nan
        return x

    def mv(vec):
        return np.array([m(c) for c in vec])

    data = SurfaceFrameData(
        params=imm.params,
        u=u,
        v=v,
        point=sj.x0,
        valid=mask,
        e1=mv(e[0]),
        e2=mv(e[1]),
        N=np.array([val(c) for c in N]),
        beta=m(beta),
        C=np.array(val(N[2])),
        beta1=m(b1),
        beta2=m(b2),
        beta11=m(b11),
        beta12=m(b12),
        beta21=m(b21),
        beta22=m(b22),
        w12_e1=m(w12[0]),
        w12_e2=m(w12[1]),
        e2_w12_e1=m(e2_w12_e1),
        h11=m(h[0][0]),
        h12=m(h[0][1]),
        h21=m(h[1][0]),
        h22=m(h[1][1]),
        H=m(H),
        H1=m(sj.D(0, H)),
        H2=m(sj.D(1, H)),
        A_sq=m(A_sq),
        phi_norm_sq=m(phi_sq),
        conn=np.array([[[m(c) for c in row] for row in mat] for mat in conn]),
        h_cov=np.array([[[m(c) for c in row] for row in mat] for mat in hcov]),
        K_intrinsic=val(K),
        K_ambient=K_amb,
        T=mv(T_frame),
        T_sq=val(T_sq),
        nabla_TT=np.array([val(c) for c in nTT_frame]),
        t_identity_lhs=val(t_lhs),
        area_element=np.sqrt(val(sj.det)),
        lap_phi_sq=None if lap_phi is None else m(lap_phi),
        lap_phi_sq_frame=None if lap_phi_frame is None else m(lap_phi_frame),
        cmc_tag=bool(imm.cmc_tag),
        surface_name=imm.name,
    )
    return data


# -- thin point-level wrappers ----------------------------------------------


def tangent_normal(imm: ParametricImmersion, u, v):
    """``(d_u f, d_v f, N)`` in frame components at ``(u, v)``."""
    sj = _SurfaceJets(imm, np.atleast_1d(u), np.atleast_1d(v), degree=2, gate=0.0)
    tu = np.array([c.value for c in sj.tu])
    tv = np.array([c.value for c in sj.tv])
    N = np.array([c.value for c in sj.N])
    return tu, tv, N


def adapted_frame(imm: ParametricImmersion, u, v) -> SurfaceFrameData:
    return evaluate_surface(imm, u, v, strict=True)


def second_fundamental_form(imm: ParametricImmersion, u, v) -> dict:
    d = adapted_frame(imm, u, v)
    return {"h11": d.h11, "h12": d.h12, "h22": d.h22, "H": d.H, "A_sq": d.A_sq}


def t_field(imm: ParametricImmersion, u, v):
    """``(TField, lhs, rhs)`` with lhs = 1/2 lap|T|^2 - div(nabla_T T)."""
    d = adapted_frame(imm, u, v)
    tau = d.tau
    rhs = 2 * tau * (d.beta1 * np.cos(d.beta) ** 2 + 2 * tau * np.sin(d.beta) ** 2)
    return TField(d.T, d.T_sq), d.t_identity_lhs, rhs


def curvature_data(imm: ParametricImmersion, u, v) -> dict:
    """``H``, ``|A|^2``, ``C`` and the area element from the coordinate second fundamental form.

    Needs only second-order jets and no adapted frame, so it is defined at
    every regular point (including points where the fibre is normal).
    """
    u = np.atleast_1d(np.asarray(u, dtype=float)).ravel()
    v = np.atleast_1d(np.asarray(v, dtype=float)).ravel()
    sj = _SurfaceJets(imm, u, v, degree=2, gate=0.0, frame=False)
    t = [sj.tu, sj.tv]
    N = [c.value for c in sj.N]
    g = sj.gamma
    L = [[0.0, 0.0], [0.0, 0.0]]
    for a in range(2):
        for b in range(2):
            val = 0.0
            for C in range(3):
                comp = t[b][C].diff(a).value
                for A in range(3):
                    for B in range(3):
                        comp = comp + t[a][A].value * t[b][B].value * g[A][B][C].value
                val = val + comp * N[C]
            L[a][b] = val
    ginv = [[J.value_of(x) for x in row] for row in sj.ginv]
    S = [[sum(ginv[a][c] * L[c][b] for c in range(2)) for b in range(2)] for a in range(2)]  # shape operator
    H = 0.5 * (S[0][0] + S[1][1])
    A_sq = S[0][0] ** 2 + S[1][1] ** 2 + 2 * S[0][1] * S[1][0]
    return {"H": H, "A_sq": A_sq, "C": np.asarray(N[2]), "area_element": np.sqrt(J.value_of(sj.det))}


def mean_curvature(imm: ParametricImmersion, u, v) -> np.ndarray:
    """Mean curvature at ``(u, v)``, defined at every regular point."""
    return curvature_data(imm, u, v)["H"]


def area_element(imm: ParametricImmersion, u, v) -> np.ndarray:
    """``sqrt(det g)`` from first-order jets only."""
    u = np.atleast_1d(np.asarray(u, dtype=float)).ravel()
    v = np.atleast_1d(np.asarray(v, dtype=float)).ravel()
    sj = _SurfaceJets(imm, u, v, degree=1, gate=0.0, frame=False)
    return np.sqrt(J.value_of(sj.det))
