import numpy as np
import pytest

from cmc_simons.ambient import (
    AmbientConnection,
    AmbientPoint,
    BergerSphere,
    ModelParams,
    connection_forms,
    frame_vectors,
    make_chart,
    metric_at,
)
from cmc_simons.errors import ChartDomainError, ZeroTau

CASES = [("BergerSphere", 4.0, 1.0), ("BergerSphere", 1.0, 0.5), ("DiskModel", -1.0, 1.0), ("DiskModel", 0.0, 0.5)]


def test_zero_tau_rejected():
    with pytest.raises(ZeroTau):
        ModelParams(1.0, 0.0)


def test_excess():
    assert ModelParams(1.0, 0.5).excess == 0.0
    assert ModelParams(3.0, 0.5).excess == 2.0


@pytest.mark.parametrize("chart_id,kappa,tau", CASES)
def test_frame_is_orthonormal(chart_id, kappa, tau):
    chart = make_chart(ModelParams(kappa, tau), chart_id)
    x0 = chart.random_points(50, np.random.default_rng(0))
    F = np.array(chart.frame(x0))
    g = np.array(chart.metric(x0))
    gram = np.einsum("ai...,ij...,bj...->ab...", F, g, F)
    assert np.abs(gram - np.eye(3)[..., None]).max() < 1e-12


@pytest.mark.parametrize("chart_id,kappa,tau", CASES)
def test_vertical_field_is_killing(chart_id, kappa, tau):
    chart = make_chart(ModelParams(kappa, tau), chart_id)
    x0 = chart.random_points(30, np.random.default_rng(1))
    assert np.abs(AmbientConnection(chart).killing_defect(x0)).max() < 1e-10


@pytest.mark.parametrize("chart_id,kappa,tau", CASES)
def test_coframe_structure_equations(chart_id, kappa, tau):
    chart = make_chart(ModelParams(kappa, tau), chart_id)
    x0 = chart.random_points(30, np.random.default_rng(2))
    dw = AmbientConnection(chart).coframe_differentials(x0)
    assert np.allclose(dw[0, 1, 2], kappa / (2 * tau))
    assert np.allclose(dw[1, 2, 0], kappa / (2 * tau))
    assert np.allclose(dw[2, 0, 1], 2 * tau)


@pytest.mark.parametrize("chart_id,kappa,tau", CASES)
def test_sectional_curvature_law(chart_id, kappa, tau):
    chart = make_chart(ModelParams(kappa, tau), chart_id)
    rng = np.random.default_rng(3)
    x0 = chart.random_points(40, rng)
    n = rng.normal(size=(3, 40))
    n /= np.linalg.norm(n, axis=0)
    e1 = np.cross(n, rng.normal(size=(3, 40)), axis=0)
    e1 /= np.linalg.norm(e1, axis=0)
    e2 = np.cross(n, e1, axis=0)
    K = AmbientConnection(chart).curvature_form(x0, e1, e2, e2, e1)
    assert np.abs(K - (tau**2 + (kappa - 4 * tau**2) * n[2] ** 2)).max() < 1e-8


def test_w12_along_fiber():
    # w12(f3) = kappa/(2 tau) - tau; for kappa=1, tau=1/2 this is 1/2
    p = AmbientPoint("DiskModel", (0.1, -0.2, 0.3))
    w = connection_forms(p, ModelParams(1.0, 0.5), [0.0, 0.0, 1.0])
    assert w["w12"] == pytest.approx(0.5, abs=1e-10)
    assert w["w13"] == pytest.approx(0.0, abs=1e-12)


def test_point_api_berger():
    params = ModelParams(4.0, 1.0)
    q = np.array([0.5, 0.5, 0.5, 0.5])
    p = AmbientPoint("BergerSphere", tuple(q))
    g = metric_at(p, params)
    F = frame_vectors(p, params)
    assert np.allclose(F @ g @ F.T, np.eye(3), atol=1e-12)
    with pytest.raises(ChartDomainError):
        AmbientPoint("BergerSphere", (1.0, 1.0, 0.0, 0.0))


def test_disk_domain_guard():
    params = ModelParams(-1.0, 1.0)
    far = AmbientPoint("DiskModel", (5.0, 0.0, 0.0))
    with pytest.raises(ChartDomainError):
        metric_at(far, params)


def test_covariant_derivative_of_fiber_matches_forms():
    chart = make_chart(ModelParams(3.0, 0.5), "DiskModel")
    x0 = chart.random_points(10, np.random.default_rng(4))
    con = AmbientConnection(chart)
    f1 = lambda x: [1.0, 0.0, 0.0]
    f3 = lambda x: [0.0, 0.0, 1.0]
    # nabla_{f1} f3 = tau f2 (w^2_3(f1) = tau)
    d = con.covariant_derivative(f1, f3, x0)
    assert np.allclose(d[1], 0.5) and np.allclose(d[0], 0.0) and np.allclose(d[2], 0.0)
    br = con.lie_bracket(f1, lambda x: [0.0, 1.0, 0.0], x0)
    assert np.allclose(br[2], -1.0)
