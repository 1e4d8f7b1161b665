"""Named residual checks over :class:`SurfaceFrameData`.

Each check maps frame data to a per-point residual (shape ``(n,)`` or
``(k, n)`` for multi-component identities).  Points outside W carry NaN and
are reported as skipped.

Checks come in two groups.  ``General`` checks hold on every smooth immersion
with the pointwise mean curvature.  ``Cmc`` checks need constant H; several of
them additionally rely on the pointwise relation ``tau*beta2 = H*beta1``, which
holds on Hopf cylinders and on many symmetric cmc surfaces but not on every cmc
surface.  Those checks carry ``hypothesis="tau_beta2"`` and report the size of
``tau*beta2 - H*beta1`` next to their own residual.
"""

from __future__ import annotations

import inspect
import os
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable, Optional

import numpy as np

from .ambient import ModelParams
from .errors import CmcRequired, ConfigError
from .surface import SurfaceFrameData

FIRST_ORDER_TOL = 1e-7
SECOND_ORDER_TOL = 1e-5
CMC_SPREAD = 1e-8
TOL_ENV = "CMC_SIMONS_TOL"


class Group(str, Enum):
    GENERAL = "General"
    CMC = "Cmc"


@dataclass(frozen=True)
class IdentityCheck:
    name: str
    group: Group
    residual: Callable[[SurfaceFrameData], np.ndarray]
    tolerance: float
    quote: str
    hypothesis: Optional[str] = None
    needs_laplacian: bool = False


@dataclass
class CheckResult:
    name: str
    group: str
    max_residual: float
    tolerance: float
    passed: bool
    n_points: int
    n_skipped: int
    worst_index: Optional[int] = None
    worst_point: dict = field(default_factory=dict)
    hypothesis: Optional[str] = None
    hypothesis_max: Optional[float] = None
    inconclusive: bool = False

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "group": self.group,
            "max_residual": self.max_residual,
            "tolerance": self.tolerance,
            "verdict": "inconclusive" if self.inconclusive else ("pass" if self.passed else "fail"),
            "n_points": self.n_points,
            "n_skipped": self.n_skipped,
            "worst_index": self.worst_index,
            "worst_point": self.worst_point,
            "hypothesis": self.hypothesis,
            "hypothesis_max": self.hypothesis_max,
        }


# -- helpers --------------------------------------------------------------


def _trig(d: SurfaceFrameData):
    b = d.beta
    return np.sin(b), np.cos(b), np.tan(b)


def _H(d: SurfaceFrameData, H_const: Optional[float]):
    return d.H if H_const is None else np.full_like(d.H, H_const)


def frame_condition(d: SurfaceFrameData, H_const: Optional[float] = None) -> np.ndarray:
    """``tau*beta2 - H*beta1``; equals ``H h12 + tau (h11 - h22) / 2`` on any surface."""
    return d.tau * d.beta2 - _H(d, H_const) * d.beta1


def cmc_value(d: SurfaceFrameData, spread: float = CMC_SPREAD) -> float:
    """Constant H of a cmc-tagged surface, after checking the sampled spread."""
    if not d.cmc_tag:
        raise CmcRequired(f"surface {d.surface_name or '<unnamed>'} is not cmc-tagged")
    H = d.H[d.valid]
    if H.size == 0:
        raise CmcRequired("no valid points to measure H")
    if np.ptp(H) >= spread:
        raise CmcRequired(f"H spread {np.ptp(H):.3e} exceeds {spread:.1e}")
    return float(np.mean(H))


# -- General group --------------------------------------------------------


def check_lemma21(d: SurfaceFrameData):
    """``(h11 - 2H - beta2, h12 + tau + beta1, h22 + beta2)``."""
    return (d.h11 - 2 * d.H - d.beta2, d.h12 + d.tau + d.beta1, d.h22 + d.beta2)


def check_h_symmetry(d: SurfaceFrameData):
    return d.h12 - d.h21


def check_mean_relation(d: SurfaceFrameData):
    _, cb, _ = _trig(d)
    return cb * d.w12_e1 - (2 * d.H + d.beta2)


def check_w12_e2(d: SurfaceFrameData):
    """``cos(beta) w12(e2) = -beta1 - tau (1 + sin^2 beta)``."""
    sb, cb, _ = _trig(d)
    return cb * d.w12_e2 + d.beta1 + d.tau * (1 + sb * sb)


def check_connection(d: SurfaceFrameData):
    """The four tangential connection coefficients of the adapted frame."""
    _, _, tb = _trig(d)
    a = (2 * d.H + d.beta2) * tb
    b = (2 * d.tau + d.beta1) * tb
    c = d.conn
    return (c[0, 0, 1] + a, c[0, 1, 0] - a, c[1, 0, 1] - b, c[1, 1, 0] + b)


def check_codazzi1(d: SurfaceFrameData):
    _, cb, _ = _trig(d)
    return d.beta1 * d.w12_e1 * cb - d.beta2 * (2 * d.tau + d.beta1)


def check_codazzi2(d: SurfaceFrameData):
    sb, cb, tb = _trig(d)
    t, b1 = d.tau, d.beta1
    return (
        cb * d.e2_w12_e1
        + sb * cb * d.w12_e1**2
        + d.beta11
        + 2 * (t + b1) * (2 * t + b1) * tb
        + d.params.excess * sb * cb
    )


def check_codazzi_tensor(d: SurfaceFrameData):
    """``h12|1 - h11|2 = (kappa - 4 tau^2) sin(beta) cos(beta)`` and ``h22|1 = h21|2``."""
    sb, cb, _ = _trig(d)
    h = d.h_cov
    return (h[0, 1, 0] - h[0, 0, 1] - d.params.excess * sb * cb, h[1, 1, 0] - h[1, 0, 1])


def check_tau_beta2(d: SurfaceFrameData, H_const: Optional[float] = None):
    return frame_condition(d, H_const)


def check_beta12_symmetry(d: SurfaceFrameData):
    return d.beta12 - d.beta21


def check_beta_commutator(d: SurfaceFrameData):
    """``beta12 - beta21 = 2 tan(beta) (tau beta2 - H beta1)`` for pointwise H."""
    _, _, tb = _trig(d)
    return d.beta12 - d.beta21 - 2 * tb * frame_condition(d)


def check_gauss(d: SurfaceFrameData):
    return d.K_intrinsic - (d.K_ambient + d.h11 * d.h22 - d.h12 * d.h21)


def check_sectional(d: SurfaceFrameData):
    """Ambient sectional curvature of the tangent plane: ``tau^2 + (kappa - 4 tau^2) C^2``."""
    return d.K_ambient - (d.tau**2 + d.params.excess * d.C**2)


def check_t_field(d: SurfaceFrameData):
    """``nabla_T T = -(1/2) sin(2 beta) (grad beta + 2 tau e1)``, componentwise."""
    s2 = np.sin(2 * d.beta)
    return (d.nabla_TT[0] + 0.5 * s2 * (d.beta1 + 2 * d.tau), d.nabla_TT[1] + 0.5 * s2 * d.beta2)


def check_t_components(d: SurfaceFrameData):
    """``T = cos(beta) e2`` and ``|T|^2 + C^2 = 1``."""
    _, cb, _ = _trig(d)
    return (d.T[0], d.T[1] - cb, d.T_sq + d.C**2 - 1)


def t_identity_rhs(d: SurfaceFrameData):
    sb, cb, _ = _trig(d)
    return 2 * d.tau * (d.beta1 * cb * cb + 2 * d.tau * sb * sb)


def check_t_identity(d: SurfaceFrameData):
    """``1/2 lap|T|^2 - div(nabla_T T) = 2 tau (beta1 cos^2 + 2 tau sin^2)``."""
    return d.t_identity_lhs - t_identity_rhs(d)


def check_phi_definition(d: SurfaceFrameData):
    return d.phi_norm_sq - (d.A_sq - 2 * d.H**2)


# -- Cmc group ------------------------------------------------------------


def check_phi_norm(d: SurfaceFrameData, H_const: Optional[float] = None):
    """``|A|^2 - 2H^2 - 2 (1 + (H/tau)^2) (tau + beta1)^2``."""
    H = cmc_value(d) if H_const is None else H_const
    q = 1 + (H / d.tau) ** 2
    return d.A_sq - 2 * H * H - 2 * q * (d.tau + d.beta1) ** 2


def grad_A_closed(d: SurfaceFrameData, H: float):
    _, _, tb = _trig(d)
    q = 1 + (H / d.tau) ** 2
    a, b = d.tau + d.beta1, 2 * d.tau + d.beta1
    return 2 * q * q * (d.beta11**2 + 4 * a * a * b * b * tb * tb)


def grad_A_components(d: SurfaceFrameData, H: float):
    """``h11|1, h11|2, h12|1`` from the beta-jet formulas."""
    _, _, tb = _trig(d)
    r = H / d.tau
    P = 2 * (d.tau + d.beta1) * (2 * d.tau + d.beta1) * tb
    return r * (d.beta11 - P), r * r * d.beta11 + P, -d.beta11 - r * r * P


def check_grad_A(d: SurfaceFrameData, H_const: Optional[float] = None):
    """Closed form of |nabla A|^2 against the component assembly and the direct h_ij|k."""
    H = cmc_value(d) if H_const is None else H_const
    c111, c112, c121 = grad_A_components(d, H)
    assembled = 2 * (2 * c111**2 + c112**2 + c121**2)
    h = d.h_cov
    return (
        assembled - grad_A_closed(d, H),
        d.grad_A_sq - assembled,
        h[0, 0, 0] - c111,
        h[0, 0, 1] - c112,
        h[0, 1, 0] - c121,
    )


def simons_integrand(phi_sq, C, params: ModelParams, H):
    """Integrand of the Simons functional at ``(|Phi|^2, C)``."""
    m = H * H + params.tau**2
    E = params.excess
    C2 = np.asarray(C) ** 2
    return phi_sq * phi_sq - (2 * m + E * (5 * C2 - 1)) * phi_sq + 2 * E * m * (3 * C2 - 1)


def simons_coefficients(C, params: ModelParams, H):
    """Coefficients ``(1, B, D)`` of ``x^2 + B x + D`` with ``x = |Phi|^2``."""
    m = H * H + params.tau**2
    E = params.excess
    C2 = np.asarray(C) ** 2
    return 1.0, -(2 * m + E * (5 * C2 - 1)), 2 * E * m * (3 * C2 - 1)


def pointwise_simons_sides(d: SurfaceFrameData, H: float):
    if d.lap_phi_sq is None:
        raise ConfigError("pointwise Simons check needs frame data evaluated with degree=4")
    E = d.params.excess
    q = 1 + (H / d.tau) ** 2
    m = H * H + d.tau**2
    phi = d.phi_norm_sq
    C2 = d.C**2
    lhs = 0.5 * d.lap_phi_sq - E * q * d.t_identity_lhs
    rhs = d.grad_A_sq - phi * (phi - 2 * m) + E * (phi * (5 * C2 - 1) - 2 * m * (3 * C2 - 1))
    return lhs, rhs


def check_pointwise_simons(d: SurfaceFrameData, H_const: Optional[float] = None):
    H = cmc_value(d) if H_const is None else H_const
    lhs, rhs = pointwise_simons_sides(d, H)
    return lhs - rhs


def check_simons_integrand(d: SurfaceFrameData, H_const: Optional[float] = None):
    """The integrand vanishes pointwise on Hopf surfaces (equality case)."""
    H = cmc_value(d) if H_const is None else H_const
    return simons_integrand(d.phi_norm_sq, d.C, d.params, H)


# -- registry -------------------------------------------------------------


def _general(name, fn, tol, quote, **kw):
    return IdentityCheck(name, Group.GENERAL, fn, tol, quote, **kw)


def _cmc(name, fn, tol, quote, **kw):
    return IdentityCheck(name, Group.CMC, fn, tol, quote, **kw)


REGISTRY: dict[str, IdentityCheck] = {
    c.name: c
    for c in [
        _general("lemma21", check_lemma21, FIRST_ORDER_TOL, "h11=2H+b2, h12=h21=-tau-b1 and h22=-b2"),
        _general("h_symmetry", check_h_symmetry, FIRST_ORDER_TOL, "h_ij=h_ji"),
        _general("mean_relation", check_mean_relation, FIRST_ORDER_TOL, "cos(b) w12(e1)=2H+b2"),
        _general("w12_e2", check_w12_e2, FIRST_ORDER_TOL, "h12=cos(b) w12(e2)+tau sin^2(b)=-tau-b1"),
        _general("connection", check_connection, FIRST_ORDER_TOL, "nabla_{e1}e1=-(2H+b2)tan(b) e2"),
        _general("codazzi2", check_codazzi2, SECOND_ORDER_TOL, "+(kappa-4tau^2) sin(b) cos(b)"),
        _general("codazzi_tensor", check_codazzi_tensor, SECOND_ORDER_TOL, "h_ij|k theta^k := dh_ij - h_kj theta^k_i - h_ik theta^k_j"),
        _general("beta_commutator", check_beta_commutator, SECOND_ORDER_TOL, "b12=e2e1b=[e2,e1]b+b21"),
        _general("gauss", check_gauss, SECOND_ORDER_TOL, "R^i_jkl=Rbar^i_jkl+h_ik h_jl-h_ij h_kl"),
        _general("sectional", check_sectional, FIRST_ORDER_TOL, "K(P)=tau^2+(kappa-4tau^2)C^2"),
        _general("t_field", check_t_field, FIRST_ORDER_TOL, "nabla_T T=-(1/2)sin(2b)(grad b+2tau e1)"),
        _general("t_components", check_t_components, FIRST_ORDER_TOL, "T=f3-sin(b)e3=cos(b)e2"),
        _general("t_identity", check_t_identity, SECOND_ORDER_TOL, "1/2 lap|T|^2-div(nabla_T T)=2tau(b1 cos^2 b+2tau sin^2 b)"),
        _general("phi_definition", check_phi_definition, FIRST_ORDER_TOL, "Phi:=A-HI"),
        _cmc("codazzi1", check_codazzi1, FIRST_ORDER_TOL, "b1 w12(e1) cos(b)=b2(2tau+b1)", hypothesis="tau_beta2"),
        _cmc("tau_beta2", check_tau_beta2, FIRST_ORDER_TOL, "tau b2=H b1", hypothesis="tau_beta2"),
        _cmc("beta12_symmetry", check_beta12_symmetry, SECOND_ORDER_TOL, "b12=b21", hypothesis="tau_beta2"),
        _cmc("phi_norm", check_phi_norm, FIRST_ORDER_TOL, "|Phi|^2=2[1+(H/tau)^2](tau+b1)^2", hypothesis="tau_beta2"),
        _cmc("grad_A", check_grad_A, SECOND_ORDER_TOL, "|nabla A|^2=2[1+(H/tau)^2]^2[b11^2+4(tau+b1)^2(2tau+b1)^2 tan^2 b]", hypothesis="tau_beta2"),
        _cmc(
            "pointwise_simons",
            check_pointwise_simons,
            SECOND_ORDER_TOL,
            "|Phi|^2(5C^2-1)-2(H^2+tau^2)(3C^2-1)",
            hypothesis="tau_beta2",
            needs_laplacian=True,
        ),
    ]
}

# the simons integrand is not an identity on general cmc surfaces; it is kept
# out of the registry groups and addressed by name for the equality case
EQUALITY_CHECKS = {
    "simons_integrand": _cmc("simons_integrand", check_simons_integrand, 1e-8, "|Phi|^4-[2(H^2+tau^2)+(kappa-4tau^2)(5C^2-1)]|Phi|^2+2(kappa-4tau^2)(H^2+tau^2)(3C^2-1)"),
}


def get_check(name: str) -> IdentityCheck:
    if name in REGISTRY:
        return REGISTRY[name]
    if name in EQUALITY_CHECKS:
        return EQUALITY_CHECKS[name]
    raise ConfigError(f"unknown check {name!r}")


def names_for(selector) -> list[str]:
    """Expand ``"all-general"``, ``"all-cmc"`` or a list of names."""
    if isinstance(selector, str):
        selector = [selector]
    out = []
    for item in selector:
        if item == "all-general":
            out += [n for n, c in REGISTRY.items() if c.group is Group.GENERAL]
        elif item == "all-cmc":
            out += [n for n, c in REGISTRY.items() if c.group is Group.CMC]
        else:
            get_check(item)
            out.append(item)
    return list(dict.fromkeys(out))


def default_tolerance(check: IdentityCheck) -> float:
    """Per-check tolerance, scaled by the ``CMC_SIMONS_TOL`` override if set.

    The override sets the first-order tolerance; second-order checks keep their
    ratio to it.
    """
    env = os.environ.get(TOL_ENV)
    if not env:
        return check.tolerance
    try:
        base = float(env)
    except ValueError as exc:
        raise ConfigError(f"{TOL_ENV} must be a number, got {env!r}") from exc
    return base * check.tolerance / FIRST_ORDER_TOL


def _as_components(res) -> np.ndarray:
    arr = np.asarray(res if not isinstance(res, tuple) else np.stack(np.broadcast_arrays(*res)), dtype=float)
    return arr.reshape(-1, arr.shape[-1]) if arr.ndim > 1 else arr[None, :]


def run_check(
    d: SurfaceFrameData, name: str, tolerance: Optional[float] = None, H_const: Optional[float] = None
) -> CheckResult:
    """Evaluate one registered check over all valid points of ``d``."""
    chk = get_check(name)
    tol = default_tolerance(chk) if tolerance is None else float(tolerance)
    H_use = None
    if chk.group is Group.CMC:
        H_use = cmc_value(d) if H_const is None else H_const
    if H_use is not None and "H_const" in inspect.signature(chk.residual).parameters:
        res = chk.residual(d, H_use)
    else:
        res = chk.residual(d)
    comp = np.abs(_as_components(res))
    per_point = np.max(comp, axis=0)
    valid = d.valid & np.all(np.isfinite(comp), axis=0)
    n_skipped = int(np.count_nonzero(~valid))
    result = CheckResult(
        name=name,
        group=chk.group.value,
        max_residual=float("nan"),
        tolerance=tol,
        passed=False,
        n_points=int(d.n_points),
        n_skipped=n_skipped,
        hypothesis=chk.hypothesis,
    )
    if chk.hypothesis == "tau_beta2":
        fc = np.abs(frame_condition(d, H_use))
        result.hypothesis_max = float(np.max(fc[valid])) if np.any(valid) else None
    if not np.any(valid):
        result.inconclusive = True
        return result
    idx = np.flatnonzero(valid)
    worst = int(idx[np.argmax(per_point[valid])])
    result.max_residual = float(per_point[worst])
    result.passed = bool(result.max_residual <= tol)
    result.worst_index = worst
    result.worst_point = {
        "u": float(d.u[worst]),
        "v": float(d.v[worst]),
        "beta": float(d.beta[worst]),
        "beta1": float(d.beta1[worst]),
        "beta2": float(d.beta2[worst]),
        "H": float(d.H[worst]),
        "components": [float(x) for x in comp[:, worst]],
    }
    return result


def run_checks(
    d: SurfaceFrameData,
    names: Iterable[str] = ("all-general",),
    tolerances: Optional[dict] = None,
    H_const: Optional[float] = None,
) -> list[CheckResult]:
    """Run several checks; results sorted by check name."""
    tolerances = tolerances or {}
    out = [run_check(d, n, tolerances.get(n), H_const) for n in names_for(list(names))]
    return sorted(out, key=lambda r: r.name)
