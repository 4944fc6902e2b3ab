import numpy as np
import pytest

from biplotmotion.alignment import (ConvergenceWarning, SimilarityTransform, align_series,
                                    apply_reflection, gpa_consensus, orthogonal_procrustes,
                                    reflect_at_levels)
from biplotmotion.data import slice_by_time
from biplotmotion.errors import (BalanceError, ConfigError, DegenerateConfigurationError, ShapeError,
                                 UnknownLevelError)
from biplotmotion.pca import BiplotState, pca_biplot, per_slice_pca

from .oracles import als_gpa, random_orthogonal, rotation


def state(Z, V=None, level="a", groups=None):
    Z = np.asarray(Z, float)
    V = np.asarray(V if V is not None else [[1.0, 0.0], [0.0, 1.0]], float)
    groups = tuple(groups or ["g"] * len(Z))
    return BiplotState(level, Z, V, tuple(f"v{i}" for i in range(len(V))), groups, (0.6, 0.3))


# reflections

def test_reflect_x():
    s = apply_reflection(state([[1.0, 2.0], [3.0, -1.0]]), "x")
    np.testing.assert_array_equal(s.Z, [[1.0, -2.0], [3.0, 1.0]])


def test_reflect_y_on_vectors():
    s = apply_reflection(state([[0.0, 0.0]], V=[[-0.3, 0.7]]), "y")
    np.testing.assert_array_equal(s.V, [[0.3, 0.7]])


def test_reflect_xy_involution(rng):
    s = state(rng.normal(size=(5, 2)), rng.normal(size=(3, 2)))
    back = apply_reflection(apply_reflection(s, "xy"), "xy")
    assert back.Z.tobytes() == s.Z.tobytes() and back.V.tobytes() == s.V.tobytes()
    assert back.explained_variance == s.explained_variance and back.group_of_row == s.group_of_row


def test_unknown_axis():
    with pytest.raises(ConfigError):
        apply_reflection(state([[0.0, 1.0]]), "z")


def test_reflect_at_levels(climate):
    states = per_slice_pca(climate, slice_by_time(climate))
    out = reflect_at_levels(states, ["1950"], "x")
    np.testing.assert_array_equal(out[0].Z[:, 1], -states[0].Z[:, 1])
    for a, b in zip(out[1:], states[1:]):
        assert a is b
    assert reflect_at_levels(states, [], "x") == list(states)
    with pytest.raises(UnknownLevelError, match="1960"):
        reflect_at_levels(states, ["1955"], "x")


# orthogonal Procrustes

def residual(tr, A, B):
    return np.linalg.norm(tr.apply(A) - B)


def test_identity_alignment(rng):
    A = rng.normal(size=(6, 2))
    tr = orthogonal_procrustes(A, A)
    np.testing.assert_allclose(tr.Q, np.eye(2), atol=1e-12)
    assert tr.s == pytest.approx(1.0)
    assert residual(tr, A, A) < 1e-12


def test_quarter_turn(rng):
    A = rng.normal(size=(6, 2))
    c = A.mean(axis=0)
    R = np.array([[0.0, 1.0], [-1.0, 0.0]])
    B = (A - c) @ R + c
    tr = orthogonal_procrustes(A, B)
    np.testing.assert_allclose(tr.Q, R, atol=1e-12)
    assert residual(tr, A, B) < 1e-12


def test_mirror_recovered(rng):
    A = rng.normal(size=(6, 2))
    B = A * [1.0, -1.0]
    tr = orthogonal_procrustes(A, B, allow_scale=False)
    assert np.linalg.det(tr.Q) == pytest.approx(-1.0)
    assert tr.is_reflection
    assert residual(tr, A, B) < 1e-12


def test_random_similarity_recovered(rng):
    for _ in range(25):
        A = rng.normal(size=(6, 2))
        Q, s, t = random_orthogonal(rng), rng.uniform(0.2, 5), rng.normal(size=2) * 3
        B = s * A @ Q + t
        tr = orthogonal_procrustes(A, B)
        assert residual(tr, A, B) < 1e-9
        np.testing.assert_allclose(tr.Q.T @ tr.Q, np.eye(2), atol=1e-10)


def test_alignment_never_hurts(rng):
    for _ in range(50):
        A, B = rng.normal(size=(5, 2)), rng.normal(size=(5, 2))
        for scale in (True, False):
            tr = orthogonal_procrustes(A, B, allow_scale=scale)
            assert residual(tr, A, B) <= np.linalg.norm(A - B) + 1e-12


def test_procrustes_degenerate():
    with pytest.raises(DegenerateConfigurationError):
        orthogonal_procrustes([[1.0, 1.0]], [[0.0, 0.0]])
    with pytest.raises(DegenerateConfigurationError):
        orthogonal_procrustes([[1.0, 1.0], [1.0, 1.0]], [[0.0, 0.0], [1.0, 0.0]])
    with pytest.raises(ShapeError):
        orthogonal_procrustes(np.zeros((3, 2)), np.zeros((4, 2)))


# GPA

def test_gpa_identical():
    A = np.random.default_rng(3).normal(size=(8, 2))
    res = gpa_consensus([A, A.copy()])
    assert res.final_rss < 1e-20
    assert res.iterations <= 2
    np.testing.assert_allclose(res.consensus, A - A.mean(axis=0), atol=1e-12)


def test_gpa_admissible_orbit(rng):
    A = rng.normal(size=(8, 2))
    B = 2.7 * A @ rotation(1.1) @ np.diag([1.0, -1.0]) + [4.0, -2.0]
    res = gpa_consensus([A, B])
    assert res.final_rss < 1e-10


def test_gpa_preserves_total_sum_of_squares(rng):
    configs = [rng.normal(size=(10, 2)) * rng.uniform(0.5, 3) for _ in range(4)]
    res = gpa_consensus(configs)
    before = sum(np.sum((c - c.mean(axis=0)) ** 2) for c in configs)
    after = sum(np.sum(y**2) for y in res.aligned_configs)
    assert after == pytest.approx(before, rel=1e-12)
    for c, y, tr in zip(configs, res.aligned_configs, res.transforms):
        np.testing.assert_allclose(tr.apply(c), y, atol=1e-10)


@pytest.mark.parametrize("seed", range(5))
def test_gpa_matches_als_oracle(seed):
    rng = np.random.default_rng(100 + seed)
    configs = [rng.normal(size=(10, 2)) for _ in range(3)]
    res = gpa_consensus(configs)
    assert all(b <= a + 1e-12 for a, b in zip(res.rss_history, res.rss_history[1:]))
    assert res.final_rss == pytest.approx(als_gpa(configs, restarts=20, seed=seed), abs=1e-6)


@pytest.mark.parametrize("k", [4, 5, 6])
def test_gpa_escapes_local_minima(k):
    # from the inputs as given, these ensembles settle above the global optimum
    rng = np.random.default_rng(2)
    ensembles = [[rng.normal(size=(10, 2)) for _ in range(rng.integers(3, 7))] for _ in range(50)]
    for configs in [e for e in ensembles if len(e) == k][:4]:
        res = gpa_consensus(configs)
        assert all(b <= a + 1e-12 for a, b in zip(res.rss_history, res.rss_history[1:]))
        assert res.final_rss <= als_gpa(configs, restarts=20, seed=0) + 1e-6
        for c, y, tr in zip(configs, res.aligned_configs, res.transforms):
            np.testing.assert_allclose(tr.apply(c), y, atol=1e-10)


def test_gpa_many_configurations_uses_greedy_reflections(rng):
    base = rng.normal(size=(8, 2))
    configs = [rng.uniform(0.5, 2) * base @ random_orthogonal(rng) for _ in range(12)]
    res = gpa_consensus(configs)
    assert res.final_rss < 1e-10


def test_gpa_shape_errors(rng):
    with pytest.raises(ShapeError):
        gpa_consensus([rng.normal(size=(4, 2)), rng.normal(size=(5, 2))])
    with pytest.raises(ShapeError):
        gpa_consensus([rng.normal(size=(4, 2))])


def test_gpa_nonconvergence_warns(rng):
    configs = [rng.normal(size=(10, 2)) for _ in range(4)]
    with pytest.warns(ConvergenceWarning):
        res = gpa_consensus(configs, tol=0.0, max_iter=3)
    assert not res.converged and res.iterations == 3


# series

def test_align_series_consensus_orientation(climate):
    states = per_slice_pca(climate, slice_by_time(climate))
    res = align_series(states)
    assert len(res.transforms) == len(res.aligned_states) == 8
    assert res.final_rss <= res.rss_history[1]
    confs = [res.configuration(i) for i in range(8)]
    for a, b in zip(confs, confs[1:]):
        rel = orthogonal_procrustes(a, b)
        assert np.linalg.det(rel.Q) > 0
    for tr in res.transforms:
        assert np.linalg.norm(tr.Q.T @ tr.Q - np.eye(2)) < 1e-10


def test_align_series_distance_preservation(climate):
    states = per_slice_pca(climate, slice_by_time(climate))
    res = align_series(states)
    for orig, new, tr in zip(states, res.aligned_states, res.transforms):
        d0 = np.linalg.norm(orig.Z[:, None] - orig.Z[None], axis=-1)
        d1 = np.linalg.norm(new.Z[:, None] - new.Z[None], axis=-1)
        np.testing.assert_allclose(d1, tr.s * d0, atol=1e-9)
        np.testing.assert_allclose(new.V, tr.s * orig.V @ tr.Q, atol=1e-12)


def test_align_series_fixed_point(rng):
    base = rng.normal(size=(12, 2))
    groups = [f"g{i // 3}" for i in range(12)]
    states = [state(base, level=str(i), groups=groups) for i in range(4)]
    res = align_series(states)
    for tr in res.transforms:
        assert np.linalg.norm(tr.Q - np.eye(2)) < 1e-8
        assert abs(tr.s - 1) < 1e-8


def test_align_series_rows_matched_by_group_and_ordinal(rng):
    base = rng.normal(size=(6, 2))
    groups = ["a", "a", "b", "b", "c", "c"]
    perm = [4, 0, 2, 5, 1, 3]
    s1 = state(base, level="1", groups=groups)
    s2 = state(base[perm], level="2", groups=[groups[i] for i in perm])
    res = align_series([s1, s2])
    assert res.final_rss < 1e-20


def test_supplied_target_is_fixed_and_locally_optimal(climate, data_dir):
    from biplotmotion.data import ingest_target_csv
    X, groups = ingest_target_csv(data_dir / "climate_target.csv", "Region", climate.variable_names)
    target = pca_biplot(X, True, "Target", climate.variable_names, groups)
    tz = target.Z.copy()
    states = per_slice_pca(climate, slice_by_time(climate))
    res = align_series(states, target)
    assert res.target is target and res.target.Z.tobytes() == tz.tobytes()
    assert res.consensus.tobytes() == tz.tobytes()  # same row order as the target
    for i, tr in enumerate(res.transforms):
        src = res.configuration(i)
        base = np.linalg.norm(src - tz)
        for eps in (1e-3, -1e-3):
            assert np.linalg.norm(src @ rotation(eps) - tz) > base
        assert np.linalg.norm(src * 1.01 - tz) > base


def test_unbalanced_slices(rng):
    s1 = state(rng.normal(size=(4, 2)), level="1", groups=["a", "a", "b", "b"])
    s2 = state(rng.normal(size=(4, 2)), level="2", groups=["a", "b", "b", "b"])
    with pytest.raises(BalanceError) as exc:
        align_series([s1, s2])
    assert exc.value.levels == ["2"]


def test_target_shape_mismatch(rng):
    s1 = state(rng.normal(size=(4, 2)), level="1")
    s2 = state(rng.normal(size=(4, 2)), level="2")
    with pytest.raises(ShapeError):
        align_series([s1, s2], state(rng.normal(size=(5, 2))))


def test_align_on_variables(climate):
    states = per_slice_pca(climate, slice_by_time(climate))
    res = align_series(states, align_on="variables")
    assert res.configuration(0).shape == (6, 2)
    for orig, new, tr in zip(states, res.aligned_states, res.transforms):
        np.testing.assert_allclose(new.Z, tr.s * orig.Z @ tr.Q, atol=1e-12)


def test_similarity_transform_apply():
    tr = SimilarityTransform(np.array([[0.0, 1.0], [-1.0, 0.0]]), 2.0, np.array([1.0, 1.0]))
    np.testing.assert_allclose(tr.apply([[1.0, 0.0]]), [[1.0, 3.0]])
    np.testing.assert_allclose(tr.apply([[1.0, 0.0]], translate=False), [[0.0, 2.0]])
