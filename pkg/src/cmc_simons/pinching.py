"""Roots of the Simons quadratic and the pinching corridor.

With ``m = H^2 + tau^2`` and ``E = kappa - 4 tau^2`` the integrand of the Simons
functional is the quadratic ``x^2 - [2m + E(5C^2 - 1)] x + 2 E m (3C^2 - 1)`` in
``x = |Phi|^2``.  Its roots ``a <= b`` bound the corridor in which the integrand
is non-positive.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Iterable, Optional

import numpy as np

from .errors import NegativeDiscriminant, WrongCurvatureRegime, ZeroTau

CORRIDOR = "corridor"
OPEN = "open regime"
SPACE_FORM = "space form"


@dataclass(frozen=True)
class PinchingInput:
    kappa: float
    tau: float
    H: float
    C: float

    def __post_init__(self):
        if self.tau == 0:
            raise ZeroTau("tau must be nonzero")
        if abs(self.C) > 1:
            raise ValueError(f"|C| must be <= 1, got {self.C}")

    @property
    def m(self) -> float:
        return self.H**2 + self.tau**2

    @property
    def excess(self) -> float:
        return self.kappa - 4 * self.tau**2

    @property
    def regime(self) -> str:
        if self.excess > 0:
            return CORRIDOR
        if self.excess == 0:
            return SPACE_FORM
        return OPEN


def coefficients(inp: PinchingInput) -> tuple[float, float, float]:
    """``(1, B, D)`` of ``x^2 + B x + D``."""
    m, E, C2 = inp.m, inp.excess, inp.C**2
    return 1.0, -(2 * m + E * (5 * C2 - 1)), 2 * E * m * (3 * C2 - 1)


def rho(inp: PinchingInput) -> float:
    """Discriminant, written as the sum of its three structural terms."""
    m, E, C2 = inp.m, inp.excess, inp.C**2
    return 4 * m * m + 4 * m * E * (1 - C2) + E * E * (5 * C2 - 1) ** 2


def pinching_interval(inp: PinchingInput) -> tuple[float, float]:
    """Roots ``(a, b)`` with ``a <= b``."""
    r = rho(inp)
    if r < 0:
        raise NegativeDiscriminant(f"rho = {r:.6g} < 0 at {inp}")
    mid = 2 * inp.m + inp.excess * (5 * inp.C**2 - 1)
    s = math.sqrt(r)
    return (mid - s) / 2, (mid + s) / 2


def quadratic_roots_oracle(B: float, D: float) -> tuple[float, float]:
    """Independent root computation (cancellation-free form) for ``x^2 + Bx + D``."""
    disc = B * B - 4 * D
    if disc < 0:
        raise NegativeDiscriminant(f"discriminant {disc:.6g} < 0")
    s = math.sqrt(disc)
    if B == 0 and D == 0:
        return 0.0, 0.0
    q = -0.5 * (B + math.copysign(s, B)) if B != 0 else 0.5 * s
    r1 = q
    r2 = D / q if q != 0 else -q
    return min(r1, r2), max(r1, r2)


def quadratic_consistency(inp: PinchingInput) -> dict:
    """Residuals of a, b in the quadratic, plus Vieta residuals (all relative)."""
    a, b = pinching_interval(inp)
    _, B, D = coefficients(inp)
    scale = max(1.0, abs(B), abs(D), a * a, b * b)

    def p(x):
        return x * x + B * x + D

    return {
        "root_a": abs(p(a)) / scale,
        "root_b": abs(p(b)) / scale,
        "vieta_sum": abs((a + b) + B) / max(1.0, abs(B)),
        "vieta_product": abs(a * b - D) / max(1.0, abs(D)),
    }


ORDER_RTOL = 1e-12


def ordering_chain(inp: PinchingInput, rtol: float = ORDER_RTOL) -> bool:
    """``a <= m < 2m <= b``.

    ``b = 2m`` holds exactly at C = 0, so the comparisons allow rounding at the
    scale of the roots.
    """
    a, b = pinching_interval(inp)
    m = inp.m
    slack = rtol * max(1.0, abs(a), abs(b))
    return bool(a <= m + slack and m < 2 * m and 2 * m <= b + slack)


@dataclass
class CorridorVerdict:
    A_sq: float
    lo: float
    hi: float
    special_lo: float
    special_hi: float
    inside: bool
    inside_special: bool
    special_contained: bool

    def as_dict(self) -> dict:
        return asdict(self)


def corridor(inp: PinchingInput) -> tuple[float, float]:
    """``[a + 2H^2, b + 2H^2]`` in terms of ``|A|^2``."""
    a, b = pinching_interval(inp)
    return a + 2 * inp.H**2, b + 2 * inp.H**2


def special_corridor(inp: PinchingInput) -> tuple[float, float]:
    """The C-free corridor ``[3H^2 + tau^2, 2(2H^2 + tau^2)]``."""
    H2, t2 = inp.H**2, inp.tau**2
    return 3 * H2 + t2, 2 * (2 * H2 + t2)


def corridor_check(A_sq: float, inp: PinchingInput) -> CorridorVerdict:
    """Position of ``|A|^2`` relative to both corridors (requires kappa > 4 tau^2)."""
    if inp.excess <= 0:
        raise WrongCurvatureRegime("corridor verdicts need kappa > 4 tau^2")
    lo, hi = corridor(inp)
    slo, shi = special_corridor(inp)
    slack = ORDER_RTOL * max(1.0, abs(lo), abs(hi))  # hi = shi exactly at C = 0
    return CorridorVerdict(
        A_sq=A_sq,
        lo=lo,
        hi=hi,
        special_lo=slo,
        special_hi=shi,
        inside=bool(lo <= A_sq <= hi),
        inside_special=bool(slo <= A_sq <= shi),
        special_contained=bool(lo <= slo + slack and shi <= hi + slack),
    )


@dataclass
class Contact:
    endpoint: str
    C: float
    gap: float
    touches: bool


def corridor_contacts(kappa: float, tau: float, H: float, tol: float = 1e-12) -> list[Contact]:
    """Where, in C in [0, 1], the special corridor endpoints meet the general ones.

    Minimizes the gaps ``m - a(C)`` (lower) and ``b(C) - 2m`` (upper) over C;
    a contact is reported when the minimal gap is below ``tol``.
    """
    from scipy.optimize import minimize_scalar

    if kappa - 4 * tau**2 <= 0:
        raise WrongCurvatureRegime("corridor contacts need kappa > 4 tau^2")

    def gap_lo(C):
        inp = PinchingInput(kappa, tau, H, C)
        return inp.m - pinching_interval(inp)[0]

    def gap_hi(C):
        inp = PinchingInput(kappa, tau, H, C)
        return pinching_interval(inp)[1] - 2 * inp.m

    out = []
    for name, fn in (("lower", gap_lo), ("upper", gap_hi)):
        grid = np.linspace(0.0, 1.0, 201)
        vals = np.array([fn(c) for c in grid])
        i = int(np.argmin(vals))
        lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)]
        best_C, best = float(grid[i]), float(vals[i])
        if hi > lo:
            res = minimize_scalar(fn, bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
            if res.fun < best:
                best_C, best = float(res.x), float(res.fun)
        out.append(Contact(name, best_C, best, bool(abs(best) <= tol)))
    return out


# -- sweeps ---------------------------------------------------------------

CSV_COLUMNS = ["kappa", "tau", "H", "C", "rho", "a", "b", "corridor_lo", "corridor_hi", "regime", "ordering_ok"]


def sweep_row(inp: PinchingInput) -> dict:
    row = {"kappa": inp.kappa, "tau": inp.tau, "H": inp.H, "C": inp.C, "rho": rho(inp), "regime": inp.regime}
    try:
        a, b = pinching_interval(inp)
    except NegativeDiscriminant:
        row.update(a=None, b=None, corridor_lo=None, corridor_hi=None, ordering_ok=None)
        return row
    row.update(a=a, b=b)
    if inp.regime == CORRIDOR:
        lo, hi = corridor(inp)
        row.update(corridor_lo=lo, corridor_hi=hi, ordering_ok=ordering_chain(inp))
    else:
        # no verdict outside kappa > 4 tau^2
        row.update(corridor_lo=None, corridor_hi=None, ordering_ok=None)
    return row


def sample_inputs(ranges: dict, n: int, seed: int = 0) -> Iterable[PinchingInput]:
    """Uniform samples over ``ranges = {"kappa": [lo, hi], ...}``; fixed values allowed.

    With ``"require": "corridor"`` only samples with kappa > 4 tau^2 are kept
    (rejection sampling, deterministic for a fixed seed).
    """
    rng = np.random.default_rng(seed)
    require = ranges.get("require")
    names = ("kappa", "tau", "H", "C")
    got = 0
    attempts = 0
    while got < n:
        attempts += 1
        if attempts > 1000 * max(n, 1):
            raise ValueError("sampling ranges leave (almost) no admissible points")
        vals = {}
        for k in names:
            spec = ranges[k]
            if isinstance(spec, (int, float)):
                vals[k] = float(spec)
            else:
                lo, hi = spec
                if lo > hi:
                    raise ValueError(f"empty range for {k}: {spec}")
                vals[k] = float(rng.uniform(lo, hi))
        if vals["tau"] == 0:
            continue
        inp = PinchingInput(**vals)
        if require == "corridor" and inp.regime != CORRIDOR:
            continue
        got += 1
        yield inp


@dataclass
class SweepSummary:
    rows: list
    violations: int
    open_rows: int
    negative_discriminant: int


def sweep(ranges: dict, n: int, seed: int = 0) -> SweepSummary:
    rows = [sweep_row(inp) for inp in sample_inputs(ranges, n, seed)]
    violations = sum(1 for r in rows if r["ordering_ok"] is False)
    open_rows = sum(1 for r in rows if r["regime"] != CORRIDOR)
    neg = sum(1 for r in rows if r["a"] is None)
    return SweepSummary(rows, violations, open_rows, neg)


def integrand_sign_pattern(inp: PinchingInput, eps: float = 1e-9) -> Optional[bool]:
    """True when the quadratic is <= 0 on [a, b] and >= 0 just outside."""
    a, b = pinching_interval(inp)
    _, B, D = coefficients(inp)

    def p(x):
        return x * x + B * x + D

    scale = max(1.0, abs(a), abs(b)) ** 2
    w = max(b - a, 1.0)
    inside = all(p(x) <= eps * scale for x in (a, b, 0.5 * (a + b)))
    outside = p(a - w) >= -eps * scale and p(b + w) >= -eps * scale
    return bool(inside and outside)
