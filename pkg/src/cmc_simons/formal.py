"""Exact rational replay of the cmc derivation chain.

A point of a cmc surface is described by the free data (t, beta1, H, tau, kappa)
with t = tan(beta/2).  Every trigonometric factor is then rational, every higher
beta-derivative is fixed by the Codazzi constraints, and each identity of the
chain can be checked with residual exactly zero.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Optional

from .errors import VerticalPoint, ZeroTau

Q = Fraction


def _q(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class FormalJetState:
    """Exact jet of beta at a point of a cmc surface."""

    t: Fraction
    beta1: Fraction
    H: Fraction
    tau: Fraction
    kappa: Fraction
    sin_b: Fraction
    cos_b: Fraction
    beta2: Fraction
    beta11: Fraction
    beta12: Fraction
    beta21: Fraction
    beta22: Fraction
    beta111: Fraction
    beta122: Fraction

    @property
    def tan_b(self) -> Fraction:
        return self.sin_b / self.cos_b

    @property
    def sec_sq(self) -> Fraction:
        return 1 / self.cos_b**2

    @property
    def excess(self) -> Fraction:
        return self.kappa - 4 * self.tau**2

    @property
    def ratio(self) -> Fraction:
        return self.H / self.tau

    @property
    def q(self) -> Fraction:
        """1 + (H/tau)^2."""
        return 1 + self.ratio**2

    @property
    def C(self) -> Fraction:
        return self.sin_b

    def as_dict(self) -> dict:
        return {k: str(getattr(self, k)) for k in self.__dataclass_fields__}


# The beta11 constraint, written as q*beta11 = rhs.  The mutation hook swaps this
# for a variant so the test-suite can confirm the chain notices.
def beta11_constraint(t_b, s_b, c_b, beta1, tau, q, excess) -> Fraction:
    return -2 * q * (tau + beta1) * (2 * tau + beta1) * t_b - excess * s_b * c_b


def _mutated_beta11_constraint(t_b, s_b, c_b, beta1, tau, q, excess) -> Fraction:
    # single sign flip on the curvature-excess term
    return -2 * q * (tau + beta1) * (2 * tau + beta1) * t_b + excess * s_b * c_b


_CONSTRAINT: Callable = beta11_constraint


def set_mutation(enabled: bool) -> None:
    """Swap in (or out) the sign-flipped beta11 constraint."""
    global _CONSTRAINT
    _CONSTRAINT = _mutated_beta11_constraint if enabled else beta11_constraint


class mutation:
    """Context manager enabling the beta11 sign flip."""

    def __enter__(self):
        set_mutation(True)
        return self

    def __exit__(self, *exc):
        set_mutation(False)
        return False


def build_state(t, beta1, H, tau, kappa) -> FormalJetState:
    """Derive the full cmc jet from the free data (t, beta1, H, tau, kappa)."""
    t, beta1, H, tau, kappa = map(_q, (t, beta1, H, tau, kappa))
    if tau == 0:
        raise ZeroTau("tau must be nonzero")
    if t * t == 1:
        raise VerticalPoint("t^2 = 1 means cos(beta) = 0")
    d = 1 + t * t
    s_b, c_b = 2 * t / d, (1 - t * t) / d
    t_b = s_b / c_b
    r = H / tau
    q = 1 + r * r
    excess = kappa - 4 * tau**2

    beta2 = r * beta1
    beta11 = _CONSTRAINT(t_b, s_b, c_b, beta1, tau, q, excess) / q
    cos2b = c_b * c_b - s_b * s_b
    beta111 = (
        -2 * q * ((3 * tau + 2 * beta1) * beta11 * t_b + (tau + beta1) * (2 * tau + beta1) * beta1 / c_b**2)
        - excess * cos2b * beta1
    ) / q
    return FormalJetState(
        t=t,
        beta1=beta1,
        H=H,
        tau=tau,
        kappa=kappa,
        sin_b=s_b,
        cos_b=c_b,
        beta2=beta2,
        beta11=beta11,
        beta12=r * beta11,
        beta21=r * beta11,
        beta22=r * r * beta11,
        beta111=beta111,
        beta122=r * r * beta111,
    )


def beta111_substituted(st: FormalJetState) -> Fraction:
    """Second form of the differentiated constraint (beta11 eliminated)."""
    q, tau, b1, E = st.q, st.tau, st.beta1, st.excess
    tb, sb, cb = st.tan_b, st.sin_b, st.cos_b
    val = (
        4 * q * (3 * tau + 2 * b1) * (tau + b1) * (2 * tau + b1) * tb**2
        + 2 * E * (3 * tau + 2 * b1) * sb**2
        - 2 * q * (tau + b1) * (2 * tau + b1) * st.sec_sq * b1
        - E * (cb * cb - sb * sb) * b1
    )
    return val / q


def invariant_residuals(st: FormalJetState) -> dict:
    """Residuals of every defining relation of the state (all exactly 0)."""
    r = st.ratio
    return {
        "pythagoras": st.sin_b**2 + st.cos_b**2 - 1,
        "tau_beta2": st.tau * st.beta2 - st.H * st.beta1,
        "beta12": st.beta12 - r * st.beta11,
        "beta21": st.beta21 - r * st.beta11,
        "beta22": st.beta22 - r * r * st.beta11,
        "beta122": st.beta122 - r * r * st.beta111,
        "beta11_constraint": st.q * st.beta11
        - beta11_constraint(st.tan_b, st.sin_b, st.cos_b, st.beta1, st.tau, st.q, st.excess),
        "beta111_forms": st.beta111 - beta111_substituted(st),
    }


# -- Laplacian of |Phi|^2 ----------------------------------------------------


def phi_sq(st: FormalJetState) -> Fraction:
    return 2 * st.q * (st.tau + st.beta1) ** 2


def phi_sq_from_A(st: FormalJetState) -> Fraction:
    """|A|^2 - 2H^2 from the second fundamental form components."""
    h11, h12, h22 = 2 * st.H + st.beta2, -st.tau - st.beta1, -st.beta2
    return h11**2 + 2 * h12**2 + h22**2 - 2 * st.H**2


def laplacian_expansion(st: FormalJetState) -> Fraction:
    """Frame expansion e_i e_i - (nabla_{e_i} e_i) applied to |Phi|^2."""
    a = st.tau + st.beta1
    tb = st.tan_b
    return (
        4
        * st.q
        * (
            st.beta11**2
            + a * st.beta111
            + st.beta12**2
            + a * st.beta122
            + (2 * st.H + st.beta2) * a * tb * st.beta12
            + (2 * st.tau + st.beta1) * a * tb * st.beta11
        )
    )


def laplacian_collapsed(st: FormalJetState) -> Fraction:
    a = st.tau + st.beta1
    return 4 * st.q**2 * (st.beta11**2 + a * st.beta111 + (2 * st.tau + st.beta1) * a * st.tan_b * st.beta11)


def laplacian_closed(st: FormalJetState) -> Fraction:
    """Closed form after eliminating beta111."""
    tau, b1, q, E = st.tau, st.beta1, st.q, st.excess
    a, b = tau + b1, 2 * tau + b1
    tb, sb, cb = st.tan_b, st.sin_b, st.cos_b
    return 4 * q**2 * (st.beta11**2 + 2 * a**2 * b * (2 * b * tb**2 - b1)) + 4 * q * E * a * (
        4 * a * sb**2 - b1 * cb**2
    )


def verify_laplacian_chain(st: FormalJetState) -> Fraction:
    """Expansion form minus closed form of the Laplacian of |Phi|^2."""
    return laplacian_expansion(st) - laplacian_closed(st)


# -- |nabla A|^2 --------------------------------------------------------------


def covariant_h(st: FormalJetState) -> dict:
    """h_{ij|k} from its definition, using the adapted-frame connection."""
    b1, b2 = st.beta1, st.beta2
    tb = st.tan_b
    h = {(1, 1): 2 * st.H + b2, (1, 2): -st.tau - b1, (2, 1): -st.tau - b1, (2, 2): -b2}
    # dh[(i, j)][k] = e_k(h_ij); beta_ij = e_j(e_i beta)
    dh = {
        (1, 1): {1: st.beta21, 2: st.beta22},
        (1, 2): {1: -st.beta11, 2: -st.beta12},
        (2, 2): {1: -st.beta21, 2: -st.beta22},
    }
    dh[(2, 1)] = dh[(1, 2)]
    # omega[k] = <nabla_{e_k} e_1, e_2>
    omega = {1: -(2 * st.H + b2) * tb, 2: (2 * st.tau + b1) * tb}

    def theta(l, i, k):  # <nabla_{e_k} e_i, e_l>
        if l == i:
            return Q(0)
        return omega[k] if (i, l) == (1, 2) else -omega[k]

    out = {}
    for i in (1, 2):
        for j in (1, 2):
            for k in (1, 2):
                val = dh[(i, j)][k]
                for l in (1, 2):
                    val -= h[(l, j)] * theta(l, i, k) + h[(i, l)] * theta(l, j, k)
                out[(i, j, k)] = val
    return out


def grad_A_components(st: FormalJetState) -> dict:
    """Component formulas for h_11|1, h_11|2, h_12|1."""
    r = st.ratio
    P = 2 * (st.tau + st.beta1) * (2 * st.tau + st.beta1) * st.tan_b
    return {
        (1, 1, 1): r * (st.beta11 - P),
        (1, 1, 2): r * r * st.beta11 + P,
        (1, 2, 1): -st.beta11 - r * r * P,
    }


def grad_A_closed(st: FormalJetState) -> Fraction:
    a, b = st.tau + st.beta1, 2 * st.tau + st.beta1
    return 2 * st.q**2 * (st.beta11**2 + 4 * a**2 * b**2 * st.tan_b**2)


def grad_A_direct(st: FormalJetState) -> Fraction:
    return sum(v * v for v in covariant_h(st).values())


def verify_grad_A_chain(st: FormalJetState) -> Fraction:
    """Componentwise assembly of |nabla A|^2 minus its closed form.

    The assembly also folds in the mismatch between the component formulas and
    the direct covariant derivatives, so any disagreement surfaces.
    """
    comp = grad_A_components(st)
    direct = covariant_h(st)
    assembled = 2 * (2 * comp[(1, 1, 1)] ** 2 + comp[(1, 1, 2)] ** 2 + comp[(1, 2, 1)] ** 2)
    mismatch = sum(abs(comp[k] - direct[k]) for k in comp)
    return assembled - grad_A_closed(st) + mismatch + (grad_A_direct(st) - assembled)


def component_relations(st: FormalJetState) -> dict:
    """Residuals of the symmetry relations among h_{ij|k} (cmc, Codazzi)."""
    h = covariant_h(st)
    return {
        "h12|2 + h11|1": h[(1, 2, 2)] + h[(1, 1, 1)],
        "h12|2 - h22|1": h[(1, 2, 2)] - h[(2, 2, 1)],
        "h12|1 + h22|2": h[(1, 2, 1)] + h[(2, 2, 2)],
        "h12|1 - h11|2": h[(1, 2, 1)] - h[(1, 1, 2)],
    }


# -- pointwise Simons -------------------------------------------------------


def t_term(st: FormalJetState) -> Fraction:
    """Right side of 1/2 lap|T|^2 - div(nabla_T T)."""
    return 2 * st.tau * (st.beta1 * st.cos_b**2 + 2 * st.tau * st.sin_b**2)


def simons_lhs(st: FormalJetState) -> Fraction:
    return laplacian_expansion(st) / 2 - st.excess * st.q * t_term(st)


def simons_rhs(st: FormalJetState) -> Fraction:
    p = phi_sq(st)
    m = st.H**2 + st.tau**2
    C2 = st.C**2
    return grad_A_closed(st) - p * (p - 2 * m) + st.excess * (p * (5 * C2 - 1) - 2 * m * (3 * C2 - 1))


def verify_pointwise_simons(st: FormalJetState) -> Fraction:
    return simons_lhs(st) - simons_rhs(st)


CHECKS = {
    "laplacian_chain": verify_laplacian_chain,
    "grad_A_chain": verify_grad_A_chain,
    "pointwise_simons": verify_pointwise_simons,
}


# -- random driver ----------------------------------------------------------


def random_rational(rng: random.Random, bound: int = 1000, nonzero: bool = False) -> Fraction:
    while True:
        num = rng.randint(-bound, bound)
        den = rng.randint(1, bound)
        if num or not nonzero:
            return Fraction(num, den)


def random_state(rng: random.Random, bound: int = 1000) -> FormalJetState:
    while True:
        t = random_rational(rng, bound)
        if t * t != 1:
            break
    return build_state(
        t,
        random_rational(rng, bound),
        random_rational(rng, bound),
        random_rational(rng, bound, nonzero=True),
        random_rational(rng, bound),
    )


@dataclass
class FormalReport:
    count: int
    seed: int
    passed: dict
    failures: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return all(self.passed.values())


def run_formal(count: int = 1000, seed: int = 0, bound: int = 1000, max_witnesses: int = 3) -> FormalReport:
    """Evaluate every chain check on ``count`` random states."""
    rng = random.Random(seed)
    passed = {name: True for name in CHECKS}
    failures = []
    t0 = time.perf_counter()
    for _ in range(count):
        st = random_state(rng, bound)
        for name, fn in CHECKS.items():
            res = fn(st)
            if res != 0:
                passed[name] = False
                if len(failures) < max_witnesses:
                    failures.append({"check": name, "residual": str(res), "state": st.as_dict()})
    return FormalReport(count, seed, passed, failures, time.perf_counter() - t0)
