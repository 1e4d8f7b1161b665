"""Surface constructors: Hopf tori and cylinders, plus non-cmc test surfaces."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from enum import Enum

import numpy as np

from . import jets as J
from .ambient import BergerSphere, DiskModel, ModelParams
from .errors import ChartDomainError, DegenerateParametrization
from .surface import DEGENERACY, ParametricImmersion, _SurfaceJets, mean_curvature

__all__ = [
    "HopfTorusSpec",
    "SurfaceKind",
    "TestSurfaceSpec",
    "hopf_torus",
    "hopf_cylinder_disk",
    "perturbed_torus",
    "graph_patch",
    "build_surface",
    "nil_translation_cmc",
    "base_circle_curvature",
]


class SurfaceKind(str, Enum):
    HOPF_TORUS = "HopfTorus"
    PERTURBED_TORUS = "PerturbedTorus"
    GRAPH_PATCH = "GraphPatch"
    HOPF_CYLINDER = "HopfCylinder"
    NIL_TRANSLATION = "NilTranslation"


@dataclass(frozen=True)
class HopfTorusSpec:
    params: ModelParams
    s: float = np.pi / 4

    def __post_init__(self):
        if self.params.kappa <= 0:
            raise ValueError("Hopf tori in the Berger sphere need kappa > 0")
        if not 0 < self.s < np.pi / 2:
            raise ChartDomainError("latitude s must lie in (0, pi/2)")


@dataclass(frozen=True)
class TestSurfaceSpec:
    """Knobs for the non-cmc surfaces; unused fields are ignored per kind."""

    __test__ = False  # not a pytest class despite the name

    kind: SurfaceKind
    params: ModelParams
    s: float = np.pi / 4
    amplitude: float = 0.0
    frequency: tuple = (2, 3)
    phase: float = 0.0
    radius: float = 0.5
    half_width: float = 0.5
    coefficients: tuple = (0.3, 0.2, 0.1)
    extra: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "kind", SurfaceKind(self.kind))


def _check_immersion(imm: ParametricImmersion, n: int = 24) -> ParametricImmersion:
    u, v = imm.grid(n, n)
    try:
        sj = _SurfaceJets(imm, u, v, degree=1, gate=0.0)
    except ChartDomainError as exc:
        raise DegenerateParametrization(f"{imm.name}: surface leaves the chart ({exc})") from exc
    if np.min(sj.det.value) < DEGENERACY:
        raise DegenerateParametrization(f"{imm.name}: immersion condition fails")
    return imm


def hopf_torus(spec: HopfTorusSpec) -> ParametricImmersion:
    """The coordinate torus ``s = const`` in Hopf coordinates (a union of fibers)."""
    s0 = spec.s

    def f(u, v):
        return [s0 + 0.0 * u, u, v]

    return ParametricImmersion(
        spec.params,
        BergerSphere(spec.params),
        f,
        periodic=(True, True),
        cmc_tag=True,
        name=f"hopf_torus(s={s0:.6g})",
        spec={"kind": "HopfTorus", "s": s0},
    )


def base_circle_curvature(params: ModelParams, s: float) -> float:
    """Geodesic curvature of the Hopf-image of ``{s = const}`` in M^2(kappa).

    The Hopf map sends the latitude-s torus to the circle at polar angle 2s
    on the sphere of radius 1/sqrt(kappa).
    """
    return np.sqrt(params.kappa) / np.tan(2.0 * s)


def hopf_cylinder_disk(params: ModelParams, radius: float, half_height: float = 1.0) -> ParametricImmersion:
    """Preimage of the circle of given coordinate radius in the disk chart."""
    chart = DiskModel(params)
    if not 0 < radius < chart.radius_limit():
        raise ChartDomainError("circle leaves the disk chart")

    def f(u, v):
        return [radius * J.cos(u), radius * J.sin(u), v]

    imm = ParametricImmersion(
        params,
        chart,
        f,
        domain=((0.0, 2 * np.pi), (-half_height, half_height)),
        periodic=(True, False),
        cmc_tag=True,
        name=f"hopf_cylinder(r={radius:.6g})",
        spec={"kind": "HopfCylinder", "radius": radius},
    )
    return _check_immersion(imm)


def perturbed_torus(spec: TestSurfaceSpec) -> ParametricImmersion:
    """Hopf torus with latitude ``s0 + A sin(p u + phase) cos(q v)``; not cmc."""
    if spec.amplitude == 0:
        return hopf_torus(HopfTorusSpec(spec.params, spec.s))
    s0, A = spec.s, spec.amplitude
    p, q = spec.frequency
    ph = spec.phase

    def f(u, v):
        return [s0 + A * J.sin(p * u + ph) * J.cos(q * v), u, v]

    imm = ParametricImmersion(
        spec.params,
        BergerSphere(spec.params),
        f,
        periodic=(True, True),
        cmc_tag=False,
        name=f"perturbed_torus(s={s0:.4g}, A={A:.4g}, freq={p},{q})",
        spec={"kind": "PerturbedTorus", "s": s0, "amplitude": A, "frequency": [p, q], "phase": ph},
    )
    return _check_immersion(imm)


def graph_patch(spec: TestSurfaceSpec) -> ParametricImmersion:
    """Vertical graph ``x = a sin(y + z) + b y z + c z^2`` over a square in the disk chart.

    Vertical graphs keep the fiber direction close to tangent, so the patch
    stays inside W.
    """
    a, b, c = spec.coefficients
    w = spec.half_width

    def f(u, v):
        return [a * J.sin(u + v) + b * u * v + c * v * v, u, v]

    imm = ParametricImmersion(
        spec.params,
        DiskModel(spec.params),
        f,
        domain=((-w, w), (-w, w)),
        periodic=(False, False),
        cmc_tag=False,
        name=f"graph_patch(k={spec.params.kappa:.4g}, coeffs={a},{b},{c})",
        spec={"kind": "GraphPatch", "coefficients": [a, b, c], "half_width": w},
    )
    return _check_immersion(imm)


def _translation_surface(params, chart, profile, domain, cmc_tag, name, spec):
    tau = params.tau

    # x-translation (x, y, z) -> (x + t, y, z + tau t y) is an isometry of Nil
    def f(u, v):
        return [u + 0.0 * v, v + 0.0 * u, profile(v) + tau * u * v]

    return ParametricImmersion(params, chart, f, domain=domain, periodic=(False, False), cmc_tag=cmc_tag, name=name, spec=spec)


@lru_cache(maxsize=16)
def nil_translation_cmc(
    params: ModelParams,
    H: float = 0.0,
    y_range=(0.05, 0.35),
    g0: float = 0.1,
    g1: float = 0.3,
    half_width: float = 0.3,
    fit_degree: int = 12,
) -> ParametricImmersion:
    """Constant-H surface in Nil invariant under a horizontal translation.

    The surface is ``(t, y, g(y) + tau t y)``; its mean curvature depends only on
    the 2-jet of the profile ``g`` at ``y``, and is affine in ``g''``.  The profile
    ODE ``H(y, g, g', g'') = H`` is integrated from ``(g0, g1)`` at the lower end
    of ``y_range`` and replaced by a least-squares Chebyshev fit, so the
    resulting H is constant to roughly 1e-9.  Away from the Hopf locus this is
    a cmc surface with non-constant contact angle.
    """
    from scipy.integrate import solve_ivp

    if params.kappa != 0:
        raise ValueError("translation-invariant construction needs kappa = 0 (Nil)")
    chart = DiskModel(params)
    y_lo, y_hi = map(float, y_range)

    def mean_at(y, a, b, c):
        prof = lambda v: a + b * (v - y) + 0.5 * c * (v - y) * (v - y)  # noqa: E731
        imm = _translation_surface(params, chart, prof, None, False, "", {})
        return mean_curvature(imm, [0.0], [y])[0]

    def rhs(y, state):
        a, b = state
        h0 = mean_at(y, a, b, 0.0)
        h1 = mean_at(y, a, b, 1.0)
        return [b, (H - h0) / (h1 - h0)]

    sol = solve_ivp(rhs, (y_lo, y_hi), [g0, g1], method="DOP853", rtol=1e-13, atol=1e-14, dense_output=True)
    if not sol.success:
        raise DegenerateParametrization(f"profile integration failed: {sol.message}")
    ys = np.linspace(y_lo, y_hi, 400)
    cheb = np.polynomial.Chebyshev.fit(ys, sol.sol(ys)[0], fit_degree, domain=[y_lo, y_hi])
    mid, half = 0.5 * (y_lo + y_hi), 0.5 * (y_hi - y_lo)
    coef = np.polynomial.chebyshev.cheb2poly(cheb.coef)

    def profile(v):
        w = (v - mid) * (1.0 / half)
        out = 0.0 * w + coef[-1]
        for c in coef[-2::-1]:
            out = out * w + c
        return out

    imm = _translation_surface(
        params,
        chart,
        profile,
        ((-half_width, half_width), (y_lo, y_hi)),
        True,
        f"nil_translation_cmc(H={H:.4g}, g0={g0:.4g}, g1={g1:.4g})",
        {"kind": "NilTranslation", "H": H, "y_range": [y_lo, y_hi], "g0": g0, "g1": g1, "half_width": half_width},
    )
    return _check_immersion(imm)


def build_surface(spec) -> ParametricImmersion:
    """Dispatch on a :class:`HopfTorusSpec` or :class:`TestSurfaceSpec`."""
    if isinstance(spec, HopfTorusSpec):
        return hopf_torus(spec)
    kind = spec.kind
    if kind is SurfaceKind.HOPF_TORUS:
        return hopf_torus(HopfTorusSpec(spec.params, spec.s))
    if kind is SurfaceKind.PERTURBED_TORUS:
        return perturbed_torus(spec)
    if kind is SurfaceKind.GRAPH_PATCH:
        return graph_patch(spec)
    if kind is SurfaceKind.HOPF_CYLINDER:
        return hopf_cylinder_disk(spec.params, spec.radius, spec.half_width)
    if kind is SurfaceKind.NIL_TRANSLATION:
        extra = {k: tuple(v) if isinstance(v, list) else v for k, v in spec.extra.items()}
        return nil_translation_cmc(spec.params, **extra)
    raise ValueError(f"unknown surface kind {kind!r}")
