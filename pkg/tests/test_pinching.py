import math

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from cmc_simons import pinching as P
from cmc_simons.errors import WrongCurvatureRegime, ZeroTau

kappas = st.floats(-10, 20, allow_nan=False)
taus = st.floats(0.05, 3, allow_nan=False) | st.floats(-3, -0.05, allow_nan=False)
Hs = st.floats(-3, 3, allow_nan=False)
Cs = st.floats(-1, 1, allow_nan=False)


def test_reference_point():
    inp = P.PinchingInput(4.0, 0.5, 0.0, 0.0)
    assert P.rho(inp) == 12.25
    assert P.pinching_interval(inp) == (-3.0, 0.5)
    assert inp.regime == P.CORRIDOR


def test_input_validation():
    with pytest.raises(ZeroTau):
        P.PinchingInput(1.0, 0.0, 0.0, 0.0)
    with pytest.raises(ValueError):
        P.PinchingInput(1.0, 1.0, 0.0, 1.5)
    with pytest.raises(WrongCurvatureRegime):
        P.corridor_check(1.0, P.PinchingInput(1.0, 1.0, 0.0, 0.0))


@settings(max_examples=300, deadline=None)
@given(kappas, taus, Hs, Cs)
def test_vieta_and_oracle(kappa, tau, H, C):
    inp = P.PinchingInput(kappa, tau, H, C)
    # near a double root the roots are only sqrt(eps)-conditioned
    _, B0, D0 = P.coefficients(inp)
    assume(P.rho(inp) >= 1e-6 * max(1.0, B0 * B0, abs(D0)))
    a, b = P.pinching_interval(inp)
    _, B, D = P.coefficients(inp)
    oa, ob = P.quadratic_roots_oracle(B, D)
    scale = max(1.0, abs(a), abs(b))
    assert abs(a - oa) <= 1e-9 * scale and abs(b - ob) <= 1e-9 * scale
    c = P.quadratic_consistency(inp)
    assert max(c.values()) < 1e-10
    assert P.integrand_sign_pattern(inp)


@settings(max_examples=300, deadline=None)
@given(st.floats(0.01, 20), taus, Hs, Cs)
def test_corridor_ordering(excess, tau, H, C):
    inp = P.PinchingInput(4 * tau * tau + excess, tau, H, C)
    assert P.rho(inp) > 0
    assert P.ordering_chain(inp)
    a, b = P.pinching_interval(inp)
    m = inp.m
    # the quadratic is negative at m, and equals -4 E m C^2 at 2m
    assert m * m + P.coefficients(inp)[1] * m + P.coefficients(inp)[2] < 0
    v2m = 4 * m * m + 2 * m * P.coefficients(inp)[1] + P.coefficients(inp)[2]
    assert v2m == pytest.approx(-4 * inp.excess * m * C * C, abs=1e-9 * max(1.0, m * m * (1 + inp.excess)))
    v = P.corridor_check(P.special_corridor(inp)[0], inp)
    assert v.special_contained and v.inside and v.inside_special


def test_contacts():
    lower, upper = P.corridor_contacts(8.0, 1.0, 0.3)
    assert lower.endpoint == "lower" and not lower.touches and lower.gap > 0
    assert upper.touches and upper.C == pytest.approx(0.0, abs=1e-6)


def test_sweep_deterministic_and_regimes():
    ranges = {"kappa": [-5.0, 10.0], "tau": [0.1, 2.0], "H": [-1.0, 1.0], "C": [-1.0, 1.0]}
    s1 = P.sweep(ranges, 200, seed=1)
    s2 = P.sweep(ranges, 200, seed=1)
    assert s1.rows == s2.rows
    assert s1.violations == 0
    assert s1.open_rows > 0
    for row in s1.rows:
        assert set(row) == set(P.CSV_COLUMNS)
        if row["regime"] != P.CORRIDOR:
            assert row["ordering_ok"] is None
    fixed = P.sweep({"kappa": 4.0, "tau": 0.5, "H": 0.0, "C": 0.0}, 3)
    assert all(r["a"] == -3.0 for r in fixed.rows)
    with pytest.raises(ValueError):
        list(P.sample_inputs({"kappa": [1.0, 0.0], "tau": 1.0, "H": 0.0, "C": 0.0}, 1))
