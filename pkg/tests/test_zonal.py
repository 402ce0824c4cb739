import math

import numpy as np
import pytest
from scipy.special import eval_jacobi, roots_jacobi

from fmb.algebra import Field, KMatrix, random_unit_vectors
from fmb.errors import DimensionError, ParameterError
from fmb.frames import icosahedron6
from fmb.zonal import (
    jacobi_at_one,
    jacobi_eval,
    jacobi_params,
    kernel_matrix,
    zonal_poly,
    zonal_q2_special,
    zonal_values,
)

FIELDS = [Field.R, Field.C, Field.H]


def test_jacobi_examples():
    assert jacobi_eval(0, 0.7, 1.3, 0.3) == 1
    x = np.linspace(-1, 1, 7)
    assert np.allclose(jacobi_eval(1, 0, 0, x), x)
    assert jacobi_eval(2, 0, 0, 1.0) == pytest.approx(1.0)


@pytest.mark.parametrize("a,b", [(0.5, -0.5), (1.0, 0.0), (3.5, 1.0), (-0.5, -0.5), (7.0, 3.0)])
def test_jacobi_matches_scipy(a, b):
    x = np.linspace(-1, 1, 11)
    for k in range(8):
        assert np.allclose(jacobi_eval(k, a, b, x), eval_jacobi(k, a, b, x), rtol=1e-11, atol=1e-11)
        assert jacobi_at_one(k, a) == pytest.approx(eval_jacobi(k, a, b, 1.0), rel=1e-12)


def test_jacobi_rejects_bad_parameters():
    with pytest.raises(ParameterError):
        jacobi_eval(2, -1.0, 0.0, 0.1)
    with pytest.raises(ParameterError):
        jacobi_eval(-1, 0.0, 0.0, 0.1)


def test_zonal_degree_one_real_three():
    z = zonal_poly("R", 3, 1)
    assert np.allclose(z.coeffs_s, [-0.5, 1.5])
    assert np.allclose(z.in_t().coef, [-0.5, 0, 1.5])


@pytest.mark.parametrize("field", FIELDS)
@pytest.mark.parametrize("d", [2, 3, 5])
def test_zonal_degree_one_and_constant(field, d):
    z1 = zonal_poly(field, d, 1)
    assert np.allclose(z1.coeffs_s, [-1 / (d - 1), d / (d - 1)], atol=0)
    assert z1(1.0) == pytest.approx(1.0, abs=1e-12)
    assert z1(1 / math.sqrt(d)) == pytest.approx(0.0, abs=1e-12)
    assert zonal_poly(field, d, 0).coeffs_s == (1.0,)


def test_zonal_c2_degree_two_from_jacobi_composition():
    z = zonal_poly("C", 2, 2)
    # C P^1 is the 2-sphere, so the parameters are those of Legendre polynomials
    a, b = jacobi_params("C", 2)
    assert (a, b) == (0.0, 0.0)
    t = np.linspace(0, 1, 9)
    want = eval_jacobi(2, 0.0, 0.0, 2 * t * t - 1)
    assert np.allclose(z.in_t()(t), want, atol=1e-13)
    assert np.allclose(z.in_t().coef[1::2], 0)
    assert z.in_t()(1.0) == pytest.approx(1.0)


def test_zonal_requires_d_at_least_two():
    with pytest.raises(DimensionError):
        zonal_poly("R", 1, 2)


@pytest.mark.parametrize("field", FIELDS)
@pytest.mark.parametrize("d", [2, 3, 4])
def test_zonal_orthogonality_under_projective_weight(field, d):
    # weight (1 - s)^a s^b on s in [0, 1]  <->  Gauss-Jacobi nodes x = 2s - 1
    a, b = jacobi_params(field, d)
    x, w = roots_jacobi(20, a, b)
    s = (x + 1) / 2
    polys = [zonal_poly(field, d, k).in_s() for k in range(5)]
    for j in range(5):
        for k in range(j + 1, 5):
            assert abs(np.sum(w * polys[j](s) * polys[k](s))) < 1e-10


@pytest.mark.parametrize("field", FIELDS)
def test_zonal_values_match_polynomial(field):
    t = np.linspace(0, 1, 13)
    for k in range(6):
        assert np.allclose(zonal_values(field, 4, k, t), zonal_poly(field, 4, k).in_t()(t), atol=1e-11)


def test_q2_special_examples():
    Q = zonal_q2_special("R", 3)
    beta = 1 / math.sqrt(5)
    assert Q(beta) == pytest.approx(-0.2, abs=1e-12)
    assert Q.deriv()(beta) == pytest.approx(-4 / math.sqrt(5), abs=1e-12)
    t = np.arange(1, 10) / 10
    ratio = Q(t) / zonal_poly("R", 3, 2).in_t()(t)
    assert np.allclose(ratio, ratio[0], rtol=1e-10)


@pytest.mark.parametrize("field", FIELDS)
@pytest.mark.parametrize("d", [2, 3, 6])
def test_q2_special_normalisation_all_fields(field, d):
    kappa = field.real_dim
    beta = math.sqrt(1 / (d + 2 / kappa))
    Q = zonal_q2_special(field, d)
    assert Q(beta) == pytest.approx(-beta * beta, abs=1e-12)
    assert Q.deriv()(beta) == pytest.approx(-4 * beta, abs=1e-12)


def test_kernel_matrix_examples():
    x = KMatrix.identity("R", 3).col(0)
    assert np.allclose(kernel_matrix(x, 3), [[1.0]])
    d = 4
    K = kernel_matrix(KMatrix.identity("R", d), 1)
    off = K[~np.eye(d, dtype=bool)]
    assert np.allclose(off, -1 / (d - 1))
    assert np.linalg.eigvalsh(K).min() >= -1e-12
    ico = kernel_matrix(icosahedron6().vectors, 1)
    assert abs(ico.sum()) < 1e-12


def test_kernel_matrix_rejects_non_unit():
    with pytest.raises(DimensionError):
        kernel_matrix(KMatrix("R", np.array([[2.0], [0.0]])), 1)


@pytest.mark.parametrize("field", FIELDS)
def test_kernel_matrix_positive_semidefinite(field):
    rng = np.random.default_rng(11)
    for trial in range(50):
        N = int(rng.integers(1, 13))
        d = int(rng.integers(2, 6))
        k = int(rng.integers(0, 5))
        X = random_unit_vectors(field, d, N, rng)
        K = kernel_matrix(X, k)
        assert np.linalg.eigvalsh(K).min() >= -1e-8 * N
