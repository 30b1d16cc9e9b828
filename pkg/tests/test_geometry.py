import numpy as np
import pytest

from shellsym.geometry import (
    DisplacementField,
    ElasticityTensor,
    GridMismatchError,
    InvariantError,
    MetricData,
    curvature_change_tensor,
    energy_forms,
    frozen_chart,
    frozen_point,
    sphere_cap_chart,
    strain_tensor,
)

from conftest import random_spd_matrix

SHAPE = (16, 16)
H = 0.05


def field(f1, f2, f3, shape=SHAPE, h=H):
    return DisplacementField.from_functions(f1, f2, f3, shape, h)


zero = lambda y1, y2: np.zeros_like(y1)
one = lambda y1, y2: np.ones_like(y1)


def test_zero_displacement_gives_zero_strains():
    m = frozen_chart(1.0, 0.3, 2.0, SHAPE, H)
    u = DisplacementField.zeros(SHAPE, H)
    assert np.all(strain_tensor(u, m) == 0.0)
    assert np.all(curvature_change_tensor(u, m) == 0.0)


def test_membrane_strain_constant_coefficient_values():
    # b11 = 1 only, u = (y1, 0, 0): gamma11 = d1 u1 = 1
    m = frozen_chart(1.0, 0.0, 0.0, SHAPE, H)
    g = strain_tensor(field(lambda y1, y2: y1, zero, zero), m)
    assert np.allclose(g[..., 0, 0], 1.0, atol=1e-12)
    assert np.allclose(g[..., 0, 1], 0.0, atol=1e-12)
    assert np.allclose(g[..., 1, 1], 0.0, atol=1e-12)


def test_membrane_strain_normal_displacement():
    # u = (0, 0, 1) on b = (1, 0, 1): gamma = -b
    m = frozen_chart(1.0, 0.0, 1.0, SHAPE, H)
    g = strain_tensor(field(zero, zero, one), m)
    assert np.allclose(g[..., 0, 0], -1.0, atol=1e-12)
    assert np.allclose(g[..., 1, 1], -1.0, atol=1e-12)
    assert np.allclose(g[..., 0, 1], 0.0, atol=1e-12)


def test_curvature_strain_pure_bending():
    # flat chart, u3 = y1^2 / 2: only the second-derivative term survives
    m = frozen_chart(0.0, 0.0, 0.0, SHAPE, H)
    r = curvature_change_tensor(field(zero, zero, lambda y1, y2: y1 ** 2 / 2), m)
    assert np.allclose(r[..., 0, 0], 1.0, atol=1e-10)
    assert np.allclose(r[..., 1, 1], 0.0, atol=1e-10)
    assert np.allclose(r[..., 0, 1], 0.0, atol=1e-10)


def test_curvature_strain_normal_displacement():
    # u = (0, 0, 1) on b = (1, 0, 1): rho_ab = -b^l_a b_lb
    m = frozen_chart(1.0, 0.0, 1.0, SHAPE, H)
    r = curvature_change_tensor(field(zero, zero, one), m)
    assert np.allclose(r[..., 0, 0], -1.0, atol=1e-12)
    assert np.allclose(r[..., 1, 1], -1.0, atol=1e-12)
    assert np.allclose(r[..., 0, 1], 0.0, atol=1e-12)


def test_strains_symmetric_and_linear(rng):
    m = sphere_cap_chart(radius=1.5, shape=SHAPE, h=0.02)
    u = DisplacementField(rng.normal(size=SHAPE), rng.normal(size=SHAPE),
                          rng.normal(size=SHAPE), 0.02)
    v = DisplacementField(rng.normal(size=SHAPE), rng.normal(size=SHAPE),
                          rng.normal(size=SHAPE), 0.02)
    for op in (strain_tensor, curvature_change_tensor):
        gu, gv = op(u, m), op(v, m)
        assert np.allclose(gu, np.swapaxes(gu, -1, -2), atol=1e-11)
        combo = op(u.combine(2.0, v, -3.0), m)
        assert np.allclose(combo, 2.0 * gu - 3.0 * gv, atol=1e-10, rtol=1e-10)


def _analytic_membrane_strain(m, y1, y2, u, du):
    """Exact strain from analytic derivatives ``du[a][b] = d_b u_a``."""
    g = np.empty(y1.shape + (2, 2))
    for a in range(2):
        for b in range(2):
            cov_ab = du[a][b] - sum(m.christoffel[..., l, a, b] * u[l]
                                    for l in range(2))
            cov_ba = du[b][a] - sum(m.christoffel[..., l, b, a] * u[l]
                                    for l in range(2))
            g[..., a, b] = 0.5 * (cov_ab + cov_ba) - m.b_cov[..., a, b] * u[2]
    return g


def test_finite_differences_second_order_on_quartics():
    # error against the exact strain of a quartic field shrinks ~4x per h/2
    f1 = lambda y1, y2: y1 ** 4 + y2 ** 3
    f2 = lambda y1, y2: y1 ** 2 * y2 ** 2
    f3 = lambda y1, y2: y1 * y2
    d = {  # analytic first derivatives
        0: (lambda y1, y2: 4 * y1 ** 3, lambda y1, y2: 3 * y2 ** 2),
        1: (lambda y1, y2: 2 * y1 * y2 ** 2, lambda y1, y2: 2 * y1 ** 2 * y2),
    }
    errs = []
    for shape, h in (((11, 11), 0.04), ((21, 21), 0.02)):
        m = sphere_cap_chart(radius=1.0, shape=shape, h=h, theta0=0.8)
        n1, n2 = shape
        yc1 = h * np.arange(n1)[:, None] * np.ones((1, n2))
        yc2 = h * np.arange(n2)[None, :] * np.ones((n1, 1))
        u = (f1(yc1, yc2), f2(yc1, yc2), f3(yc1, yc2))
        du = [[d[a][b](yc1, yc2) for b in range(2)] for a in range(2)]
        exact = _analytic_membrane_strain(m, yc1, yc2, u, du)
        got = strain_tensor(field(f1, f2, f3, shape, h), m)
        errs.append(np.abs(got - exact).max())
    assert errs[0] / errs[1] > 3.0   # second-order convergence
    assert errs[1] < 2e-3


def test_finite_differences_exact_on_low_degree_polynomials():
    # first-derivative stencils are exact on quadratics, the pure
    # second-derivative stencils on cubics
    m = frozen_chart(0.0, 0.0, 0.0, SHAPE, H)
    u = field(lambda y1, y2: y1 ** 2 - 2 * y2 ** 2 + y1 * y2,
              lambda y1, y2: y2 ** 2 + y1 ** 2,
              lambda y1, y2: y1 ** 3 + y2 ** 3 + y1 ** 2 * y2)
    n1, n2 = SHAPE
    y1 = H * np.arange(n1)[:, None] * np.ones((1, n2))
    y2 = H * np.arange(n2)[None, :] * np.ones((n1, 1))
    g = strain_tensor(u, m)
    assert np.allclose(g[..., 0, 0], 2 * y1 + y2, atol=1e-10)
    assert np.allclose(g[..., 1, 1], 2 * y2, atol=1e-10)
    assert np.allclose(g[..., 0, 1], 0.5 * (y1 - 4 * y2 + 2 * y1), atol=1e-10)
    r = curvature_change_tensor(u, m)
    assert np.allclose(r[..., 0, 0], 6 * y1 + 2 * y2, atol=1e-9)
    assert np.allclose(r[..., 1, 1], 6 * y2, atol=1e-9)
    assert np.allclose(r[..., 0, 1], 2 * y1, atol=1e-9)


def test_sphere_cap_christoffel_matches_metric_derivatives():
    # Gamma^l_ab = a^{ls} (d_a a_sb + d_b a_sa - d_s a_ab) / 2, by central FD
    chart = sphere_cap_chart(radius=1.3, shape=(14, 14), h=0.01, theta0=0.8)
    h = chart.h
    da = np.stack([np.gradient(chart.a_cov, h, axis=i, edge_order=2)
                   for i in range(2)])  # da[c, x, y, a, b] = d_c a_ab
    a_inv = np.linalg.inv(chart.a_cov)
    want = np.zeros_like(chart.christoffel)
    for l in range(2):
        for a in range(2):
            for b in range(2):
                term = 0.5 * (da[a, ..., :, b] + da[b, ..., :, a]
                              - np.stack([da[s, ..., a, b] for s in range(2)], axis=-1))
                want[..., l, a, b] = np.einsum("xys,xys->xy", a_inv[..., l, :], term)
    assert np.allclose(want, chart.christoffel, atol=5e-4)


def test_energy_forms_zero_and_positive(rng):
    m = frozen_chart(1.0, 0.2, 1.5, SHAPE, H)
    e = ElasticityTensor.isotropic(1.0, 0.7)
    zero_field = DisplacementField.zeros(SHAPE, H)
    assert energy_forms(zero_field, zero_field, m, e) == (0.0, 0.0)
    for _ in range(100):
        u = DisplacementField(rng.normal(size=SHAPE), rng.normal(size=SHAPE),
                              rng.normal(size=SHAPE), H)
        a_uu, b_uu = energy_forms(u, u, m, e)
        assert a_uu >= 0.0 and b_uu >= 0.0


def test_energy_forms_symmetric_bitwise(rng):
    m = sphere_cap_chart(radius=2.0, shape=SHAPE, h=0.02)
    e = ElasticityTensor.identity()
    u = DisplacementField(rng.normal(size=SHAPE), rng.normal(size=SHAPE),
                          rng.normal(size=SHAPE), 0.02)
    v = DisplacementField(rng.normal(size=SHAPE), rng.normal(size=SHAPE),
                          rng.normal(size=SHAPE), 0.02)
    assert energy_forms(u, v, m, e) == energy_forms(v, u, m, e)


def test_frobenius_identity_energy_oracle(rng):
    # with the symmetrized Kronecker rigidity, a(u,u) is the quadrature of
    # the squared Frobenius norm of the strain
    m = frozen_chart(1.0, 0.0, 1.0, SHAPE, H)
    e = ElasticityTensor.frobenius_identity()
    u = DisplacementField(rng.normal(size=SHAPE), rng.normal(size=SHAPE),
                          rng.normal(size=SHAPE), H)
    a_uu, _ = energy_forms(u, u, m, e)
    g = strain_tensor(u, m)
    oracle = float(np.sum(np.sum(g ** 2, axis=(-1, -2))
                          * m.area_element() * H ** 2))
    assert a_uu == pytest.approx(oracle, rel=1e-13)


def test_grid_mismatch_and_invariant_errors(rng):
    m = frozen_chart(1.0, 0.0, 1.0, SHAPE, H)
    small = DisplacementField.zeros((8, 8), H)
    with pytest.raises(GridMismatchError):
        strain_tensor(small, m)
    with pytest.raises(GridMismatchError):
        DisplacementField(np.zeros((8, 8)), np.zeros((8, 9)), np.zeros((8, 8)), H)
    with pytest.raises(InvariantError):
        MetricData(np.eye(2), np.array([[1.0, 0.2], [0.3, 1.0]]),
                   np.eye(2), np.zeros((2, 2, 2)))
    with pytest.raises(InvariantError):
        MetricData(np.array([[1.0, 2.0], [2.0, 1.0]]), np.eye(2),
                   np.eye(2), np.zeros((2, 2, 2)))
    with pytest.raises(InvariantError):
        ElasticityTensor(np.diag([1.0, 1.0, -0.1]), np.eye(3))


def test_elasticity_constructors(rng):
    for e in (ElasticityTensor.identity(), ElasticityTensor.frobenius_identity(),
              ElasticityTensor.isotropic(0.8, 1.2),
              ElasticityTensor.from_matrices(random_spd_matrix(rng),
                                             random_spd_matrix(rng))):
        full = e.membrane_tensor()
        # index symmetries of the four-index tensor
        assert np.allclose(full, np.transpose(full, (2, 3, 0, 1)))
        assert np.allclose(full, np.transpose(full, (1, 0, 2, 3)))
        assert np.linalg.eigvalsh(e.membrane).min() > 0


def test_surface_ellipticity_flag():
    assert frozen_point(1.0, 0.0, 1.0).is_surface_elliptic
    assert not frozen_point(1.0, 2.0, 1.0).is_surface_elliptic
    assert not frozen_point(-1.0, 0.0, -2.0).is_surface_elliptic
