import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fmb.algebra import Field, KMatrix, herm_eigvals, random_unit_vectors
from fmb.bounds import moment_bound, welch_bound
from fmb.constructor import family_matrix, family_spec
from fmb.errors import DimensionError, ParameterError
from fmb.frames import (
    CATALOG,
    TightFrame,
    WeightedPointSet,
    catalog,
    copies,
    doubled,
    hexagon,
    icosahedron6,
    isotropy_check,
    orthonormal,
    p_frame_energy,
    perturb_orthogonal,
    polygon_diagonals,
    q_energy,
    q_moment,
    random_tight_frame,
    sic_c2,
    simplex,
    welch_deviation,
)

FIELDS = [Field.R, Field.C, Field.H]


def uniform(frame: TightFrame) -> WeightedPointSet:
    return frame.as_measure()


def real_points(pts):
    X = np.asarray(pts, float).T
    return WeightedPointSet("R", X.shape[0], KMatrix("R", X), np.full(X.shape[1], 1 / X.shape[1]))


def test_isotropy_examples():
    assert isotropy_check(uniform(orthonormal(2))).deviation == 0
    angles = np.deg2rad([0, 60, 120])
    ps = real_points([[math.cos(a), math.sin(a)] for a in angles])
    rep = isotropy_check(ps)
    assert rep.passed and rep.deviation <= 1e-15
    # direct matrix sum oracle
    X = ps.points.raw.real
    S = sum(w * np.outer(x, x) for w, x in zip(ps.weights, X.T))
    assert np.abs(S - np.eye(2) / 2).max() <= 1e-15
    bad = isotropy_check(real_points([[1, 0], [1, 0]]))
    assert not bad.passed and bad.deviation == pytest.approx(0.5)


def test_q_moment_examples():
    assert q_moment(uniform(orthonormal(2)), 1) == pytest.approx(0.5)
    v = q_moment(uniform(polygon_diagonals(3)), 1)
    assert v == pytest.approx((3 + 6 * 0.5) / 9, abs=1e-15)
    assert v == pytest.approx(moment_bound("R", 2, 1).value, abs=1e-15)
    with pytest.raises(ParameterError):
        q_moment(uniform(orthonormal(2)), 0.5)


def test_q_moment_at_two_is_one_over_d():
    frames = [hexagon(), icosahedron6(), sic_c2(), polygon_diagonals(7), copies(sic_c2(), 3)]
    frames += [orthonormal(d, f) for d in range(1, 6) for f in FIELDS] + [simplex(d) for d in range(2, 7)]
    for f in frames:
        ps = uniform(f)
        assert isotropy_check(ps, 1e-12).passed
        assert q_moment(ps, 2) == pytest.approx(1 / f.dim, abs=1e-12)


def test_q_energy_examples():
    assert q_energy(orthonormal(4), 1) == 0
    assert q_energy(icosahedron6(), 1) == pytest.approx(30 / math.sqrt(5), abs=1e-12)
    for d in range(1, 6):
        # each vector has exactly one other vector of modulus 1
        assert q_energy(doubled(orthonormal(d)), 1) == pytest.approx(2 * d, abs=1e-12)
        assert q_energy(doubled(orthonormal(d)), math.inf) == 1


def test_p_frame_energy_examples():
    assert p_frame_energy(KMatrix.identity("R", 4), 2) == 0
    C = hexagon().gram()
    A = family_matrix(family_spec(C, 2, 1.5))
    assert p_frame_energy(A, 2) == pytest.approx(math.sqrt(3), abs=1e-12)
    # 6 entries of modulus 1/2 and 24 of 1/4
    assert math.sqrt(6 * 0.25 + 24 / 16) == pytest.approx(math.sqrt(3))
    A = family_matrix(family_spec(C, 2, 4 / 3))
    assert p_frame_energy(A, math.inf) == pytest.approx(1 / 3, abs=1e-12)
    with pytest.raises(ParameterError):
        p_frame_energy(KMatrix("R", np.diag([1.0, 2.0])), 2)


def test_catalog_examples():
    s = simplex(3)
    G = s.gram().raw.real
    assert s.size == 4
    assert np.allclose(G[~np.eye(4, dtype=bool)], -1 / 3, atol=1e-15)
    assert np.allclose(np.diag(G), 1)
    ico = icosahedron6()
    assert welch_deviation(ico, 1 / math.sqrt(5)) <= 1e-15
    assert welch_deviation(sic_c2(), 1 / math.sqrt(3)) <= 1e-15
    with pytest.raises(ParameterError):
        catalog("dodecahedron")


def test_hexagon_gram():
    G = hexagon().gram().raw.real
    assert np.allclose(G, [[1, -0.5, -0.5], [-0.5, 1, -0.5], [-0.5, -0.5, 1]], atol=1e-15)


TIGHT = [hexagon(), icosahedron6(), sic_c2(), simplex(2), simplex(3), simplex(5), polygon_diagonals(5)]


@pytest.mark.parametrize("frame", TIGHT, ids=lambda f: f.name)
def test_catalog_is_tight_with_two_point_spectrum(frame):
    N, d = frame.size, frame.dim
    assert frame.is_tight(1e-12)
    assert isotropy_check(uniform(frame), 1e-12).passed
    A = N / d
    ev = herm_eigvals(frame.gram())
    assert np.allclose(ev[: N - d], 0, atol=1e-9)
    assert np.allclose(ev[N - d:], A, atol=1e-9)


@pytest.mark.parametrize("frame", [hexagon(), icosahedron6(), sic_c2(), simplex(2), simplex(4)],
                         ids=lambda f: f.name)
def test_tight_simplices_meet_welch(frame):
    w = welch_bound(frame.field, frame.dim, frame.size)
    assert welch_deviation(frame, w) <= 1e-12


def test_copies_ordering_and_catalog_lookup():
    c = copies(hexagon(), 2)
    assert c.size == 6
    assert c.vectors.col(0).allclose(c.vectors.col(1))
    assert c.vectors.col(1).allclose(hexagon().vectors.col(0))
    assert catalog("copies", "hexagon", 3).size == 9
    assert set(CATALOG) >= {"orthonormal", "simplex", "hexagon", "icosahedron6", "sic_c2"}


@pytest.mark.parametrize("field", FIELDS)
def test_random_tight_frames(field):
    rng = np.random.default_rng(21)
    f = random_tight_frame(field, 3, 7, rng)
    assert f.is_tight(1e-10)
    assert f.frame_constant == pytest.approx(7 / 3, abs=1e-12)
    with pytest.raises(DimensionError):
        random_tight_frame(field, 3, 2, rng)


@pytest.mark.parametrize("field", FIELDS)
def test_json_round_trip(field):
    f = random_tight_frame(field, 2, 4, np.random.default_rng(22))
    g = TightFrame.from_json(f.to_json())
    assert g.vectors.allclose(f.vectors, atol=0)
    ps = uniform(f)
    qs = WeightedPointSet.from_json(ps.to_json())
    assert qs.points.allclose(ps.points, atol=0) and np.allclose(qs.weights, ps.weights)


def test_point_set_validation():
    X = KMatrix("R", np.eye(2))
    with pytest.raises(ParameterError):
        WeightedPointSet("R", 2, X, [0.7, 0.7])
    with pytest.raises(ParameterError):
        WeightedPointSet("R", 2, X, [1.0, 0.0])
    with pytest.raises(DimensionError):
        WeightedPointSet("R", 3, X, [0.5, 0.5])
    with pytest.raises(ParameterError):
        WeightedPointSet("R", 2, KMatrix("R", np.zeros((2, 2))), [0.5, 0.5])


# ---------------------------------------------------------------------- perturbation


def test_perturb_zero_delta_is_identity():
    ps = uniform(orthonormal(3))
    assert perturb_orthogonal(ps, 0, 1, 0.0) is ps


def test_perturb_examples():
    ps = uniform(orthonormal(2))
    out = perturb_orthogonal(ps, 0, 1, 0.05)
    assert out.size == 3
    assert isotropy_check(out, 1e-12).passed
    assert q_moment(out, 1) - q_moment(ps, 1) >= 1e-4 * 0.05
    ps = uniform(orthonormal(3))
    out = perturb_orthogonal(ps, 0, 1, 0.02)
    assert isotropy_check(out, 1e-12).passed
    assert q_moment(out, 1.5) > q_moment(ps, 1.5)


def test_perturb_split_points_have_equal_weight():
    ps = uniform(orthonormal(4))
    out = perturb_orthogonal(ps, 2, 0, 0.03)
    assert out.size == 7
    assert np.allclose(out.weights[:4], 1 / 16) and np.allclose(out.weights[4:], 1 / 4)


def test_perturb_errors():
    ps = uniform(polygon_diagonals(3))
    with pytest.raises(ParameterError):
        perturb_orthogonal(ps, 0, 1, 0.01)
    with pytest.raises(ParameterError):
        perturb_orthogonal(uniform(orthonormal(2)), 0, 1, 2.0)
    with pytest.raises(ParameterError):
        perturb_orthogonal(uniform(orthonormal(2)), 0, 0, 0.1)


@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_perturb_increases_moment(d):
    ps = uniform(orthonormal(d))
    for q in (1.0, 1.25, 1.5, 1.75):
        base = q_moment(ps, q)
        for delta in (0.01, 0.02, 0.05):
            out = perturb_orthogonal(ps, 0, 1, delta)
            assert isotropy_check(out, 1e-10).passed
            assert q_moment(out, q) > base


@pytest.mark.parametrize("field", [Field.C, Field.H])
def test_perturb_other_fields(field):
    ps = uniform(orthonormal(3, field))
    out = perturb_orthogonal(ps, 1, 2, 0.02)
    assert isotropy_check(out, 1e-10).passed
    assert q_moment(out, 1) > q_moment(ps, 1)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 5), st.floats(0.001, 0.2), st.sampled_from([0, 1, 2]))
def test_perturb_is_isotropic_property(d, delta, field_idx):
    field = FIELDS[field_idx]
    ps = uniform(orthonormal(d, field))
    out = perturb_orthogonal(ps, d - 1, 0, delta)
    assert isotropy_check(out, 1e-10).passed
    assert q_moment(out, 2) == pytest.approx(1 / d, abs=1e-12)


@pytest.mark.parametrize("field", FIELDS)
def test_q_energy_accepts_matrix_and_measure(field):
    X = random_unit_vectors(field, 3, 5, np.random.default_rng(23))
    f = TightFrame(field, 3, X)
    assert q_energy(X, 1.5) == q_energy(f, 1.5)
