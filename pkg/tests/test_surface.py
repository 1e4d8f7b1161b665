import numpy as np
import pytest

from cmc_simons.ambient import ModelParams
from cmc_simons.errors import AdaptedFrameUndefined, ChartDomainError
from cmc_simons.hopf import (
    HopfTorusSpec,
    SurfaceKind,
    TestSurfaceSpec,
    base_circle_curvature,
    build_surface,
    hopf_cylinder_disk,
    hopf_torus,
)
from cmc_simons.surface import ParametricImmersion, curvature_data, evaluate_surface, mean_curvature


@pytest.fixture(scope="module")
def perturbed():
    spec = TestSurfaceSpec(SurfaceKind.PERTURBED_TORUS, ModelParams(4.0, 1.0), s=0.7, amplitude=0.05)
    return build_surface(spec)


def test_frame_conventions(perturbed):
    d = evaluate_surface(perturbed, *perturbed.grid(10, 10))
    assert np.all(d.valid)
    # (e1, e2, N) is orthonormal in frame components and C = sin(beta) = N^3
    for a, b, expect in [(d.e1, d.e1, 1), (d.e2, d.e2, 1), (d.N, d.N, 1), (d.e1, d.e2, 0), (d.e1, d.N, 0), (d.e2, d.N, 0)]:
        assert np.allclose(np.sum(a * b, axis=0), expect, atol=1e-12)
    assert np.allclose(d.C, d.N[2], atol=1e-14)
    assert np.allclose(d.C, np.sin(d.beta), atol=1e-14)
    assert np.all(np.cos(d.beta) >= 0)
    assert np.allclose(d.e1[2], 0.0, atol=1e-14)  # e1 is horizontal


def test_shape_operator_consistency(perturbed):
    u, v = perturbed.grid(10, 10)
    d = evaluate_surface(perturbed, u, v)
    assert np.allclose(d.H, 0.5 * (d.h11 + d.h22), atol=1e-14)
    assert np.allclose(d.A_sq, d.h11**2 + d.h12**2 + d.h21**2 + d.h22**2, atol=1e-12)
    cd = curvature_data(perturbed, u, v)
    assert np.allclose(cd["H"], d.H, atol=1e-12)
    assert np.allclose(cd["A_sq"], d.A_sq, atol=1e-12)
    assert np.allclose(mean_curvature(perturbed, u, v), d.H, atol=1e-12)
    assert np.ptp(d.H) > 1e-2


def test_degree_four_fills_laplacian(perturbed):
    d3 = evaluate_surface(perturbed, *perturbed.grid(8, 8))
    d4 = evaluate_surface(perturbed, *perturbed.grid(8, 8), degree=4)
    assert d3.lap_phi_sq is None
    assert d4.lap_phi_sq is not None
    assert np.allclose(d4.lap_phi_sq, d4.lap_phi_sq_frame, atol=1e-8)


def test_vertical_points_are_gated():
    # the Hopf cylinder in the disk is vertical; a horizontal plane z = 0 is not
    params = ModelParams(-1.0, 1.0)
    from cmc_simons.ambient import DiskModel

    imm = ParametricImmersion(params, DiskModel(params), lambda u, v: [u, v, 0.0 * u], domain=((-0.3, 0.3), (-0.3, 0.3)), periodic=(False, False))
    d = evaluate_surface(imm, np.array([0.0, 0.1]), np.array([0.0, 0.2]))
    assert not d.valid[0]  # N = xi at the origin
    assert np.isnan(d.beta1[0])
    with pytest.raises(AdaptedFrameUndefined):
        evaluate_surface(imm, np.array([0.0]), np.array([0.0]), strict=True)


@pytest.mark.parametrize("kappa,tau,s", [(4.0, 1.0, 0.4), (1.0, 0.5, 1.1), (8.0, 0.5, 0.6)])
def test_hopf_torus_mean_curvature_law(kappa, tau, s):
    params = ModelParams(kappa, tau)
    d = evaluate_surface(hopf_torus(HopfTorusSpec(params, s)), *hopf_torus(HopfTorusSpec(params, s)).grid(8, 8))
    expected = np.sqrt(kappa) / (2 * np.tan(2 * s))
    assert np.allclose(np.abs(d.H), abs(expected), atol=1e-12)
    assert abs(base_circle_curvature(params, s)) == pytest.approx(2 * abs(expected))


def test_hopf_cylinder_parallel_second_fundamental_form():
    imm = hopf_cylinder_disk(ModelParams(-1.0, 1.0), 0.5)
    d = evaluate_surface(imm, *imm.grid(10, 10))
    assert np.ptp(d.H) < 1e-12
    assert np.abs(d.h22).max() < 1e-12
    assert np.sqrt(np.abs(d.grad_A_sq).max()) < 1e-7
    assert not imm.compact


def test_spec_validation():
    with pytest.raises(ValueError):
        HopfTorusSpec(ModelParams(-1.0, 1.0))
    with pytest.raises(ChartDomainError):
        HopfTorusSpec(ModelParams(4.0, 1.0), s=2.0)
    with pytest.raises(ChartDomainError):
        hopf_cylinder_disk(ModelParams(-1.0, 1.0), 50.0)


def test_perturbed_torus_is_periodic(perturbed):
    assert perturbed.check_periodicity() < 1e-10
    assert not perturbed.cmc_tag
