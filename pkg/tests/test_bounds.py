import math
from fractions import Fraction

import numpy as np
import pytest
from scipy.optimize import linprog

from fmb.algebra import Field
from fmb.bounds import (
    best_frame_energy_bound,
    etf_energy_bound,
    h_polynomial,
    infinity_moment_bound,
    lp_bound,
    max_simplex_params,
    measure_frame_energy_bound,
    moment_bound,
    moment_coefficients,
    monomial_to_zonal,
    p_frame_energy_lower_bound,
    welch_bound,
    yudin_lower_bound,
)
from fmb.errors import DimensionError, ParameterError
from fmb.frames import icosahedron6, q_energy, sic_c2
from fmb.poly import chebyshev_nodes01
from fmb.zonal import kernel_matrix, zonal_q2_special, zonal_values

FIELDS = [Field.R, Field.C, Field.H]
QS = [1.0, 1.25, 1.5, 1.75, 2.0]


def test_welch_examples():
    assert welch_bound("R", 3, 6) == pytest.approx(1 / math.sqrt(5), abs=1e-15)
    assert welch_bound("C", 4, 4) == 0
    assert welch_bound("C", 2, 4) == pytest.approx(1 / math.sqrt(3), abs=1e-15)
    with pytest.raises(ParameterError):
        welch_bound("R", 2, 1)


def test_max_simplex_examples():
    sp = max_simplex_params("R", 3)
    assert (sp.beta_sq, sp.M) == (Fraction(1, 5), 6)
    sp = max_simplex_params("C", 2)
    assert (sp.beta_sq, sp.M) == (Fraction(1, 3), 4)
    sp = max_simplex_params("H", 3)
    assert (sp.beta_sq, sp.M) == (Fraction(2, 7), 15)
    assert sp.beta == pytest.approx(math.sqrt(2 / 7))
    with pytest.raises(DimensionError):
        max_simplex_params("R", 1)


@pytest.mark.parametrize("field", FIELDS)
def test_max_simplex_is_tight_simplex_of_size_m(field):
    for d in range(2, 8):
        sp = max_simplex_params(field, d)
        N = sp.M
        assert sp.beta_sq == Fraction(N - d, d * (N - 1))


def test_etf_examples():
    assert etf_energy_bound("R", 3, 6, 2).value == pytest.approx(6.0, abs=1e-12)
    assert etf_energy_bound("R", 3, 5, 1).value == pytest.approx(20 / math.sqrt(6), abs=1e-12)
    assert etf_energy_bound("C", 2, 4, 1).value == pytest.approx(4 * math.sqrt(3), abs=1e-12)


def test_etf_coefficients_and_certificate():
    r = etf_energy_bound("R", 3, 6, 1)
    alpha = 1 / math.sqrt(5)
    assert r.coefficients[0] == pytest.approx(alpha / 2)
    assert r.coefficients[1] == pytest.approx(1 / (2 * alpha))
    assert r.rigorous and r.certificate.certified
    assert r.meta["value_from_coefficients"] == pytest.approx(r.value, rel=1e-13)


def test_etf_edge_cases():
    assert etf_energy_bound("R", 3, 3, 1).value == 0
    with pytest.raises(ParameterError):
        etf_energy_bound("R", 3, 2, 1)
    with pytest.raises(ParameterError):
        etf_energy_bound("R", 3, 5, 2.5)


def test_moment_examples():
    r = moment_bound("R", 3, 2)
    assert r.value == 1 / 3
    sp = max_simplex_params("R", 3)
    assert sp.beta_sq + (1 - sp.beta_sq) / sp.M == Fraction(1, 3)
    r = moment_bound("R", 3, 1)
    b = 1 / math.sqrt(5)
    assert r.value == pytest.approx(b + (1 - b) / 6, abs=1e-15)
    assert r.value == pytest.approx(0.539345, abs=1e-6)
    assert np.allclose(r.coefficients, [0.248010, 0.874005, -0.122015], atol=1e-6)
    assert r.coefficients[0] + r.coefficients[1] / 3 == pytest.approx(r.value, abs=1e-12)
    c = moment_bound("C", 2, 1).value
    assert c == pytest.approx(1 / math.sqrt(3) + (1 - 1 / math.sqrt(3)) / 4, abs=1e-15)


def test_moment_errors():
    with pytest.raises(ParameterError):
        moment_bound("R", 3, 0.5)
    with pytest.raises(DimensionError):
        moment_bound("R", 1, 1)


@pytest.mark.parametrize("field", FIELDS)
def test_moment_sign_conditions_and_closed_form(field):
    for d in range(2, 11):
        for q in QS:
            solved, closed = moment_coefficients(field, d, q)
            assert np.allclose(solved, closed, atol=1e-10)
            a0, a1, a2 = solved
            assert a0 >= -1e-12 and a1 >= -1e-12 and a2 <= 1e-12
            sp = max_simplex_params(field, d)
            want = sp.beta ** q + (1 - sp.beta ** q) / sp.M
            assert a0 + a1 / d == pytest.approx(want, abs=1e-12)


def test_moment_interpolant_conditions():
    # h(beta) = beta^q, h'(beta) = q beta^(q-1), h(1) = 1
    for field, d, q in [("R", 3, 1.0), ("C", 4, 1.5), ("H", 2, 1.25)]:
        solved, _ = moment_coefficients(field, d, q)
        h = np.polynomial.Polynomial([solved[0], 0, solved[1]]) + solved[2] * zonal_q2_special(field, d)
        b = max_simplex_params(field, d).beta
        assert h(b) == pytest.approx(b ** q, abs=1e-12)
        assert h.deriv()(b) == pytest.approx(q * b ** (q - 1), abs=1e-12)
        assert h(1.0) == pytest.approx(1.0, abs=1e-12)


def test_measure_frame_examples():
    v = measure_frame_energy_bound("R", 3, 6, 1)
    assert v == pytest.approx(30 / math.sqrt(5), abs=1e-12)
    assert v == pytest.approx(q_energy(icosahedron6(), 1), abs=1e-10)
    assert measure_frame_energy_bound("R", 3, 6, 2) == pytest.approx(6.0, abs=1e-12)
    s = 1 / math.sqrt(3)
    assert measure_frame_energy_bound("C", 2, 8, 1) == pytest.approx(64 * (s + (1 - s) / 4) - 8, abs=1e-12)


def test_best_frame_examples():
    assert best_frame_energy_bound("R", 4, 6, 1)[1] == "etf"
    assert best_frame_energy_bound("R", 4, 12, 1)[1] == "max_simplex"
    assert best_frame_energy_bound("R", 3, 6, 1.5)[1] == "equal"


@pytest.mark.parametrize("field", FIELDS)
def test_bound_ordering(field):
    for d in range(2, 7):
        M = max_simplex_params(field, d).M
        for N in range(d + 1, M + 6):
            for q in (1.0, 1.5):
                e = etf_energy_bound(field, d, N, q).value
                m = measure_frame_energy_bound(field, d, N, q)
                tol = 1e-10 * max(1.0, abs(e))
                if N < M:
                    assert e < m - tol
                elif N > M:
                    assert m < e - tol
                else:
                    assert abs(e - m) <= tol
            e2 = etf_energy_bound(field, d, N, 2).value
            assert e2 == pytest.approx(N * N / d - N, abs=1e-12)
            assert measure_frame_energy_bound(field, d, N, 2) == pytest.approx(N * N / d - N, abs=1e-12)


def test_infinity_examples():
    assert infinity_moment_bound(4, 2) == 1
    assert infinity_moment_bound(6, 2) == 1.5
    with pytest.raises(ParameterError):
        infinity_moment_bound(1, 2)


def test_yudin_examples():
    N = 7
    assert yudin_lower_bound("R", 3, N, [0.4]) == pytest.approx(N * N * 0.4 - N * 0.4)
    assert yudin_lower_bound("R", 3, N, [0.0, 1.0]) == -N
    with pytest.raises(ParameterError):
        yudin_lower_bound("R", 3, N, [0.1, -0.2])


def test_yudin_value_of_tangent_equals_etf_bound():
    """Expanding the tangent in the zonal basis and evaluating N^2 c0 - N h(1) gives the ETF value."""
    d, N = 3, 6
    r = etf_energy_bound("R", d, N, 1)
    h = h_polynomial("R", d, r.coefficients)
    c = monomial_to_zonal("R", d, h)
    assert c[0] == pytest.approx(r.coefficients[0] + r.coefficients[1] / d)
    assert c[1] == pytest.approx(r.coefficients[1] * (d - 1) / d)
    assert yudin_lower_bound("R", d, N, c) == pytest.approx(r.value, rel=1e-12)


def test_p_frame_examples():
    r = p_frame_energy_lower_bound("R", 6, 4, 2)
    assert r.moment == pytest.approx(math.sqrt(3), abs=1e-12)
    r = p_frame_energy_lower_bound("R", 6, 4, math.inf)
    assert r.moment == pytest.approx(1 / 3, abs=1e-12)
    r = p_frame_energy_lower_bound("R", 3, 2, 2)
    assert r.welch == pytest.approx(math.sqrt(6) / 2, abs=1e-12)
    assert r.value == pytest.approx(math.sqrt(6) / 2, abs=1e-12)
    with pytest.raises(ParameterError):
        p_frame_energy_lower_bound("R", 3, 3, 2)


def test_sic_is_a_degree_five_design():
    K = kernel_matrix(sic_c2().vectors, 5)
    assert abs(K.sum()) < 1e-12


# ---------------------------------------------------------------------- LP


def _scipy_lp(field, d, q, degree, grid, mode, N=None):
    """Primal LP over (a0, a1, a2..aK) with scipy HiGHS on the same grid."""
    K = degree // 2
    t = chebyshev_nodes01(grid)
    Phi = np.array([np.ones_like(t), t * t] + [zonal_values(field, d, k, t) for k in range(2, K + 1)]).T
    if mode == "measure":
        c = np.array([1.0, 1.0 / d] + [0.0] * (K - 1))
    else:
        c = np.array([N * N - N, N * N / d - N] + [-float(N)] * (K - 1))
    bounds = [(0, None), (0, None)] + [(None, 0)] * (K - 1)
    res = linprog(c, A_ub=-Phi, b_ub=-(t ** q), bounds=bounds, method="highs")
    assert res.status == 0
    return res.fun


@pytest.mark.parametrize("degree", [4, 6, 8, 10, 12, 14])
def test_lp_measure_real_three(degree):
    r = lp_bound("R", 3, (1, 1), degree)
    closed = moment_bound("R", 3, 1).value
    assert r.rigorous
    assert abs(r.value - closed) < 1e-4
    assert r.value >= closed - 1e-9
    assert r.meta["lp_value"] == pytest.approx(_scipy_lp("R", 3, 1, degree, 400, "measure"), abs=1e-8)


def test_lp_frame_five_points():
    r = lp_bound("R", 3, (1, 1), 8, mode="frame", N=5)
    assert 8.1430 <= r.value <= 8.1450
    assert r.value < 20 / math.sqrt(6)
    assert r.rigorous and r.sign_report["ok"]
    assert r.meta["lp_value"] == pytest.approx(_scipy_lp("R", 3, 1, 8, 400, "frame", 5), abs=1e-7)


def test_lp_complex_two():
    r = lp_bound("C", 2, (1, 1), 10)
    assert abs(r.value - moment_bound("C", 2, 1).value) < 1e-4
    assert r.rigorous


def test_lp_rational_exponent():
    r = lp_bound("R", 3, (3, 2), 8)
    assert r.rigorous
    assert abs(r.value - moment_bound("R", 3, 1.5).value) < 1e-4


def test_lp_errors():
    with pytest.raises(ParameterError):
        lp_bound("R", 3, (1, 1), 5)
    with pytest.raises(ParameterError):
        lp_bound("R", 3, (1, 1), 8, grid=50)
    with pytest.raises(ParameterError):
        lp_bound("R", 3, (1, 1), 8, mode="frame")


def test_bound_result_json():
    obj = moment_bound("R", 3, 1).to_json()
    assert {"value", "coefficients", "certificate", "rigorous"} <= set(obj)
    assert obj["certificate"]["status"] == "certified"


def test_irrational_q_is_not_rigorous():
    r = moment_bound("R", 3, math.sqrt(2))
    assert not r.rigorous
    assert r.certificate.status == "sampled-only"
