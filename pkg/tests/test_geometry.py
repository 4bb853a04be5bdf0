import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from hopfroots.errors import DegenerateInput, PoleProximity
from hopfroots.geometry import (
    NORTH3,
    angular_distance,
    canonical_rep,
    inverse_stereographic,
    projective_distance,
    quaternion_frame,
    sample_sphere,
    stereographic,
    tangent_basis,
    tangent_frame,
)


def brute_canonical(x):
    """Reference implementation of the largest-|coordinate| rule, one loop at a time."""
    x = [float(v) for v in x]
    nrm = sum(v * v for v in x) ** 0.5
    u = [v / nrm for v in x]
    best = 0
    for i in range(1, len(u)):
        if abs(u[i]) > abs(u[best]):
            best = i
    return np.array([-v for v in u] if u[best] < 0 else u)


nonzero_vec = arrays(np.float64, 4, elements=st.floats(-10, 10, allow_nan=False)).filter(
    lambda v: np.linalg.norm(v) > 1e-3
)


@pytest.mark.parametrize(
    "x, want",
    [
        ([0, 0, 0, -2], [0, 0, 0, 1]),
        ([1, 0, 0, 0], [1, 0, 0, 0]),
        # |0.8| is the largest entry and already positive, so the sign is kept
        ([-0.6, 0.8, 0, 0], [-0.6, 0.8, 0, 0]),
        ([0.6, -0.8, 0, 0], [-0.6, 0.8, 0, 0]),
    ],
)
def test_canonical_rep_examples(x, want):
    assert np.allclose(canonical_rep(x), want, atol=1e-15)
    assert np.allclose(brute_canonical(x), want, atol=1e-15)


def test_canonical_rep_ties_go_to_lowest_index():
    assert np.allclose(canonical_rep([-1, 1, 0, 0]), np.array([1, -1, 0, 0]) / np.sqrt(2))


def test_canonical_rep_rejects_zero():
    with pytest.raises(DegenerateInput):
        canonical_rep([0, 0, 0, 0])


@settings(max_examples=200, deadline=None)
@given(nonzero_vec)
def test_canonical_rep_matches_brute_force_and_quotient(x):
    c = canonical_rep(x)
    assert np.allclose(c, brute_canonical(x), atol=1e-14)
    assert np.allclose(canonical_rep(-x), c, atol=1e-14)
    assert np.allclose(canonical_rep(c), c, atol=1e-15)


def test_canonical_rep_batched_three_vectors():
    Y = sample_sphere(100, 2, seed=3)
    C = canonical_rep(Y)
    assert np.allclose(C, [brute_canonical(y) for y in Y])


def _check_frame(X, E):
    full = np.concatenate([X[:, :, None], E], axis=2)
    gram = np.swapaxes(full, 1, 2) @ full
    assert np.abs(gram - np.eye(X.shape[1])).max() < 1e-10
    assert np.all(np.linalg.det(full) > 0)


def test_tangent_frame_at_base_point():
    fr = tangent_frame([1, 0, 0, 0])
    full = np.column_stack([fr.base, fr.matrix])
    assert np.isclose(np.linalg.det(full), 1.0)


def test_tangent_bases_random_points_and_antipodes():
    X = sample_sphere(500, 3, seed=1)
    _check_frame(X, tangent_basis(X))
    _check_frame(-X, tangent_basis(-X))
    Y = sample_sphere(200, 2, seed=2)
    _check_frame(Y, tangent_basis(Y))


def test_tangent_basis_deterministic():
    x = sample_sphere(1, 3, seed=9)[0]
    assert np.array_equal(tangent_basis(x), tangent_basis(x.copy()))


def test_quaternion_frame_positive_orthonormal():
    X = sample_sphere(300, 3, seed=4)
    _check_frame(X, quaternion_frame(X))


def test_stereographic_antipode_is_origin():
    pole = sample_sphere(1, 3, seed=5)[0]
    assert np.allclose(stereographic(-pole, pole), 0, atol=1e-14)


def test_stereographic_round_trip():
    X = sample_sphere(1000, 3, seed=6)
    for pole in (NORTH3, sample_sphere(1, 3, seed=7)[0]):
        keep = angular_distance(X, pole) > 0.05
        back = inverse_stereographic(stereographic(X[keep], pole), pole)
        assert np.abs(back - X[keep]).max() < 1e-10


def test_stereographic_equator_has_unit_norm():
    t = np.linspace(0, 2 * np.pi, 50)
    eq = np.stack([np.cos(t), np.sin(t), np.zeros_like(t), np.zeros_like(t)], axis=1)
    # direct formula x' / (1 - x4) with x4 = 0
    assert np.allclose(np.linalg.norm(stereographic(eq, NORTH3), axis=1), 1.0)


def test_stereographic_pole_proximity():
    with pytest.raises(PoleProximity):
        stereographic(NORTH3, NORTH3)
    near = NORTH3 + np.array([1e-8, 0, 0, 0])
    with pytest.raises(PoleProximity):
        stereographic(near, NORTH3)


def test_sample_sphere_contract():
    one = sample_sphere(1, 3, seed=0)
    assert one.shape == (1, 4) and np.isclose(np.linalg.norm(one), 1.0)
    big = sample_sphere(10_000, 3, seed=0)
    assert np.linalg.norm(big.mean(axis=0)) < 0.05
    # reference uniform sampler: mean norm of the same size is of the same order
    ref = np.random.default_rng(0).standard_normal((10_000, 4))
    ref /= np.linalg.norm(ref, axis=1, keepdims=True)
    assert np.linalg.norm(ref.mean(axis=0)) < 0.05
    assert np.array_equal(sample_sphere(64, 2, seed=11), sample_sphere(64, 2, seed=11))
    with pytest.raises(DegenerateInput):
        sample_sphere(0, 3)


def test_projective_distance_identifies_antipodes():
    x = sample_sphere(5, 3, seed=8)
    assert np.allclose(projective_distance(x, -x), 0)
