import numpy as np
import pytest
from conftest import EX1, EX2
from hypothesis import given
from hypothesis import strategies as st

from grasslearn.errors import CutLocusError, DataError, DimensionMismatchError, RankDeficiencyError
from grasslearn.manifold import (
    GrassmannPoint,
    Metric,
    TangentVector,
    all_distances,
    distance,
    exp_map,
    from_matrix,
    geodesic_point,
    load_point,
    log_map,
    principal_angles,
    project_to_tangent,
    random_point,
    random_rotation,
    random_tangent,
)
from grasslearn.numerics import orthonormality_error, write_matrix_csv

seeds = st.integers(0, 2**32 - 1)
shapes = st.sampled_from([(2, 1), (3, 2), (4, 2), (6, 3), (8, 3), (20, 5)])


def _pair(seed, n, k):
    rng = np.random.default_rng(seed)
    return random_point(n, k, rng), random_point(n, k, rng), rng


# --- construction ------------------------------------------------------------


def test_point_rejects_non_orthonormal():
    with pytest.raises(DataError):
        GrassmannPoint(np.array([[1.0], [1.0]]))


def test_from_matrix_drops_scaling():
    X = from_matrix(np.array([[2.0, 0.0], [0.0, 0.0], [0.0, 5.0]]))
    assert np.allclose(X.basis, [[1, 0], [0, 0], [0, 1]])
    assert not X.was_orthonormal


def test_from_matrix_orthonormal_input_kept():
    A = np.array([[0.6, 0.0], [0.8, 0.0], [0.0, 1.0]])
    X = from_matrix(A)
    assert X.was_orthonormal
    assert np.allclose(np.abs(X.basis), np.abs(A))


def test_from_matrix_matches_svd_column_space(rng):
    for _ in range(50):
        A = rng.standard_normal((6, 3))
        U = np.linalg.svd(A, full_matrices=False)[0]
        assert distance(Metric.PROJECTION, from_matrix(A), GrassmannPoint(U)) <= 1e-10


def test_from_matrix_rank_error_names_column():
    with pytest.raises(RankDeficiencyError, match="column 2"):
        from_matrix(np.array([[1.0, 0.0, 1.0], [0.0, 1.0, 1.0], [0.0, 0.0, 0.0]]))


def test_load_point(tmp_path):
    write_matrix_csv(tmp_path / "x.csv", np.array([[3.0], [4.0]]))
    X = load_point(tmp_path / "x.csv")
    assert np.allclose(X.basis, [[0.6], [0.8]])


def test_equality_is_subspace_equality(rng):
    X = random_point(5, 2, rng)
    assert X == GrassmannPoint(X.basis @ random_rotation(2, rng))
    assert X != random_point(5, 2, rng)
    assert X != random_point(5, 3, rng)


def test_basis_is_read_only(rng):
    X = random_point(4, 2, rng)
    with pytest.raises(ValueError):
        X.basis[0, 0] = 1.0


def test_random_point_one_by_one_and_determinism():
    assert random_point(1, 1, np.random.default_rng(0)).basis[0, 0] == 1.0
    a = random_point(7, 3, np.random.default_rng(5)).basis
    b = random_point(7, 3, np.random.default_rng(5)).basis
    assert np.array_equal(a, b)


def test_random_point_invariant_measure_moment():
    rng = np.random.default_rng(2024)
    n, k = 20, 4
    P = np.mean([random_point(n, k, rng).projector for _ in range(2000)], axis=0)
    assert np.max(np.abs(P - (k / n) * np.eye(n))) <= 0.02


# --- angles and distances ----------------------------------------------------


def test_example_g21():
    X, Y = (GrassmannPoint(a) for a in EX1)
    assert principal_angles(X, Y).angles == pytest.approx([np.pi / 3], abs=1e-12)
    d = all_distances(X, Y)
    assert d["arc-length"] == pytest.approx(np.pi / 3, abs=1e-12)
    assert d["chordal"] == pytest.approx(1.0, abs=1e-12)
    assert d["projection"] == pytest.approx(np.sqrt(3) / 2, abs=1e-12)


def test_example_g32():
    X, Y = (GrassmannPoint(a) for a in EX2)
    pa = principal_angles(X, Y)
    assert pa.cosines == pytest.approx([1.0, 0.07945931], abs=5e-6)
    assert pa.angles[1] == pytest.approx(np.arccos(0.07945931), abs=5e-6)
    d = all_distances(X, Y)
    for key, want in [
        ("arc-length", 1.491253),
        ("fubini-study", 1.491253),
        ("chordal", 1.356864),
        ("projection", 0.996838),
        ("binet-cauchy", 0.996838),
    ]:
        assert d[key] == pytest.approx(want, abs=5e-6), key


def test_distance_formulas_frozen():
    # independent per-metric formulas on a fixed angle vector
    theta = np.array([0.3, 0.9, 1.4])
    X = GrassmannPoint(np.eye(6)[:, :3])
    Y = GrassmannPoint(np.vstack([np.diag(np.cos(theta)), np.diag(np.sin(theta))]))
    d = all_distances(X, Y)
    assert d["arc-length"] == pytest.approx(np.linalg.norm(theta), abs=1e-12)
    assert d["fubini-study"] == pytest.approx(np.arccos(np.prod(np.cos(theta))), abs=1e-12)
    assert d["chordal"] == pytest.approx(np.sqrt(2 * np.sum(1 - np.cos(theta))), abs=1e-12)
    assert d["projection"] == pytest.approx(np.linalg.norm(np.sin(theta)), abs=1e-12)
    assert d["binet-cauchy"] == pytest.approx(np.sqrt(1 - np.prod(np.cos(theta)) ** 2), abs=1e-12)
    assert d["procrustes"] == pytest.approx(d["chordal"] / np.sqrt(2), abs=1e-12)


def test_identical_points_zero_everywhere(rng):
    X = random_point(5, 2, rng)
    assert np.max(principal_angles(X, X).angles) <= 1e-12
    assert all(v <= 1e-12 for v in all_distances(X, X).values())


def test_dimension_mismatch(rng):
    with pytest.raises(DimensionMismatchError):
        principal_angles(random_point(4, 2, rng), random_point(5, 2, rng))


def test_metric_parse():
    assert Metric.parse("Arc_Length") is Metric.ARC_LENGTH
    assert Metric.parse("binet-cauchy") is Metric.BINET_CAUCHY
    with pytest.raises(DataError):
        Metric.parse("cosine")


@given(seeds, shapes)
def test_distances_symmetric_and_basis_invariant(seed, shape):
    X, Y, rng = _pair(seed, *shape)
    XR = GrassmannPoint(X.basis @ random_rotation(X.k, rng))
    for m in Metric:
        d = distance(m, X, Y)
        assert abs(distance(m, Y, X) - d) <= 1e-10
        assert abs(distance(m, XR, Y) - d) <= 1e-10


@given(seeds, shapes)
def test_distance_inequalities(seed, shape):
    X, Y, _ = _pair(seed, *shape)
    d = all_distances(X, Y)
    assert d["arc-length"] >= d["chordal"] >= d["projection"] - 1e-12
    assert d["arc-length"] >= d["fubini-study"] - 1e-12


@given(seeds, shapes)
def test_chordal_two_forms_agree(seed, shape):
    X, Y, _ = _pair(seed, *shape)
    pa = principal_angles(X, Y)
    alt = np.sqrt(2.0) * np.sqrt(max(0.0, X.k - np.sum(pa.cosines)))
    assert distance(Metric.CHORDAL, X, Y) == pytest.approx(alt, abs=1e-12)


# --- tangent space, geodesics, exp / log -------------------------------------


def test_project_to_tangent_cases(rng):
    X = random_point(6, 2, rng)
    assert np.allclose(project_to_tangent(X, X.basis).delta, 0.0, atol=1e-15)
    T = random_tangent(X, rng)
    assert np.max(np.abs(project_to_tangent(X, T.delta).delta - T.delta)) <= 1e-12
    for _ in range(100):
        D = project_to_tangent(X, rng.standard_normal((6, 2))).delta
        assert np.max(np.abs(X.basis.T @ D)) <= 1e-12
    with pytest.raises(DimensionMismatchError):
        project_to_tangent(X, np.zeros((6, 3)))


def test_tangent_vector_rejects_non_tangent(rng):
    X = random_point(4, 2, rng)
    with pytest.raises(DataError):
        TangentVector(X, X.basis)


def test_geodesic_rotation_oracle():
    X = GrassmannPoint(np.array([[1.0], [0.0]]))
    D = TangentVector(X, np.array([[0.0], [np.pi / 3]]))
    assert np.allclose(exp_map(X, D).basis, [[0.5], [np.sqrt(3) / 2]], atol=1e-12)
    for t in np.linspace(0, 1, 7):
        Y = geodesic_point(X, D, t)
        assert np.allclose(np.abs(Y.basis.ravel()), np.abs([np.cos(np.pi / 3 * t), np.sin(np.pi / 3 * t)]))


def test_geodesic_basics(rng):
    X = random_point(7, 3, rng)
    D = random_tangent(X, rng, norm=1.3)
    assert geodesic_point(X, D, 0.0) is X
    zero = TangentVector(X, np.zeros((7, 3)))
    assert geodesic_point(X, zero, 0.6) == X
    for t in (0.0, 0.25, 0.5, 0.75, 1.0):
        assert orthonormality_error(geodesic_point(X, D, t).basis) <= 1e-10
    assert distance(Metric.PROJECTION, geodesic_point(X, D, 1.0), exp_map(X, D)) <= 1e-14
    with pytest.raises(DataError):
        geodesic_point(X, D, 1.5)
    with pytest.raises(DataError):
        geodesic_point(random_point(7, 3, rng), D, 0.5)


def test_log_map_cases():
    X, Y = (GrassmannPoint(a) for a in EX1)
    assert log_map(X, Y).norm == pytest.approx(np.pi / 3, abs=1e-12)
    assert np.allclose(log_map(X, X).delta, 0.0)
    with pytest.raises(CutLocusError):
        log_map(X, GrassmannPoint(np.array([[0.0], [1.0]])))


@given(seeds)
def test_log_singular_values_are_angles(seed):
    X, Y, _ = _pair(seed, 8, 3)
    s = np.sort(np.linalg.svd(log_map(X, Y).delta, compute_uv=False))
    assert np.allclose(s, principal_angles(X, Y).angles, atol=1e-8)


def test_exp_log_round_trip_200_pairs():
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(200):
        X, Y = random_point(8, 3, rng), random_point(8, 3, rng)
        if principal_angles(X, Y).angles[-1] > np.pi / 2 - 1e-3:
            continue
        worst = max(worst, distance(Metric.PROJECTION, exp_map(X, log_map(X, Y)), Y))
    assert worst <= 1e-8
