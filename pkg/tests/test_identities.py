import numpy as np
import pytest

from cmc_simons import identities as I
from cmc_simons.ambient import ModelParams
from cmc_simons.errors import CmcRequired, ConfigError
from cmc_simons.hopf import HopfTorusSpec, SurfaceKind, TestSurfaceSpec, build_surface, hopf_torus, nil_translation_cmc
from cmc_simons.surface import evaluate_surface

NON_CMC = [
    TestSurfaceSpec(SurfaceKind.PERTURBED_TORUS, ModelParams(4.0, 1.0), s=0.7, amplitude=0.05, frequency=(1, 2)),
    TestSurfaceSpec(SurfaceKind.PERTURBED_TORUS, ModelParams(2.0, -0.3), s=0.5, amplitude=0.06, frequency=(2, 1)),
    TestSurfaceSpec(SurfaceKind.GRAPH_PATCH, ModelParams(-1.0, 1.0)),
    TestSurfaceSpec(SurfaceKind.GRAPH_PATCH, ModelParams(0.0, 0.5), coefficients=(0.1, -0.3, 0.2)),
]


@pytest.mark.parametrize("spec", NON_CMC, ids=lambda s: f"{s.kind.value}-{s.params.kappa}")
def test_general_identities_on_non_cmc_surfaces(spec):
    imm = build_surface(spec)
    d = evaluate_surface(imm, *imm.grid(10, 10))
    results = I.run_checks(d, ["all-general"])
    bad = [(r.name, r.max_residual) for r in results if not r.passed]
    assert not bad


@pytest.mark.parametrize("kappa,tau,s", [(4.0, 1.0, 0.5), (3.0, -0.7, 0.9)])
def test_cmc_identities_on_hopf_tori(kappa, tau, s):
    imm = hopf_torus(HopfTorusSpec(ModelParams(kappa, tau), s))
    d = evaluate_surface(imm, *imm.grid(10, 10), degree=4)
    results = I.run_checks(d, ["all-general", "all-cmc", "simons_integrand"])
    assert all(r.passed for r in results), [(r.name, r.max_residual) for r in results if not r.passed]
    hyp = [r for r in results if r.hypothesis == "tau_beta2"]
    assert hyp and all(r.hypothesis_max < 1e-12 for r in hyp)


def test_cmc_checks_refuse_non_cmc_surface():
    imm = build_surface(NON_CMC[0])
    d = evaluate_surface(imm, *imm.grid(8, 8))
    with pytest.raises(CmcRequired):
        I.run_check(d, "tau_beta2")


def test_frame_condition_is_algebraic():
    # tau b2 - H b1 = H h12 + tau (h11 - h22) / 2 on any surface
    imm = build_surface(NON_CMC[1])
    d = evaluate_surface(imm, *imm.grid(10, 10))
    lhs = I.frame_condition(d)
    rhs = d.H * d.h12 + d.tau * (d.h11 - d.h22) / 2
    assert np.abs(lhs - rhs).max() < 1e-12
    # and the beta commutator carries it: b12 - b21 = 2 tan(b) (tau b2 - H b1)
    assert np.abs(d.beta12 - d.beta21 - 2 * np.tan(d.beta) * lhs).max() < 1e-8


@pytest.fixture(scope="module")
def nil_minimal():
    return nil_translation_cmc(ModelParams(0.0, 0.5), H=0.0)


def test_frame_condition_fails_on_a_cmc_surface(nil_minimal):
    """tau b2 = H b1 is an extra hypothesis: it fails on a translation-invariant minimal surface."""
    d = evaluate_surface(nil_minimal, *nil_minimal.grid(10, 10), degree=4)
    assert np.ptp(d.H) < I.CMC_SPREAD
    by_name = {r.name: r for r in I.run_checks(d, ["all-general", "all-cmc"])}
    assert all(r.passed for r in by_name.values() if r.group == "General")
    for name in ("codazzi1", "tau_beta2", "beta12_symmetry", "phi_norm"):
        assert not by_name[name].passed
        assert by_name[name].hypothesis_max > 0.1
    # at H = 0 the final pointwise formula still holds (up to profile-fit noise)
    assert by_name["pointwise_simons"].passed


def test_pointwise_formula_needs_hypothesis_when_H_nonzero():
    imm = nil_translation_cmc(ModelParams(0.0, 0.5), H=0.4)
    d = evaluate_surface(imm, *imm.grid(10, 10), degree=4)
    r = I.run_check(d, "pointwise_simons")
    assert r.hypothesis_max > 0.05
    assert r.max_residual > 1e-2


def test_names_and_tolerances(monkeypatch):
    assert "lemma21" in I.names_for("all-general")
    assert "pointwise_simons" in I.names_for("all-cmc")
    assert "simons_integrand" not in I.names_for("all-cmc")
    assert I.names_for(["gauss", "gauss"]) == ["gauss"]
    with pytest.raises(ConfigError):
        I.names_for(["no_such_check"])
    chk = I.get_check("gauss")
    assert I.default_tolerance(chk) == I.SECOND_ORDER_TOL
    monkeypatch.setenv(I.TOL_ENV, "1e-6")
    assert I.default_tolerance(chk) == pytest.approx(1e-4)
    monkeypatch.setenv(I.TOL_ENV, "abc")
    with pytest.raises(ConfigError):
        I.default_tolerance(chk)


def test_report_record_shape():
    imm = hopf_torus(HopfTorusSpec(ModelParams(4.0, 1.0), 0.6))
    d = evaluate_surface(imm, *imm.grid(8, 8))
    rec = I.run_check(d, "lemma21").as_dict()
    assert rec["verdict"] == "pass"
    assert set(rec["worst_point"]) >= {"u", "v", "beta", "beta1", "beta2", "H"}
    assert rec["n_points"] == 64 and rec["n_skipped"] == 0
