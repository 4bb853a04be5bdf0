import numpy as np
import pytest

from hopfroots.degree import DegreeConfig, compute_degree, find_preimages, local_sign
from hopfroots.errors import CriticalValueSearchFailed, DegenerateInput, IrregularPoint, IrregularValue
from hopfroots.geometry import sample_sphere
from hopfroots.maps import ANTIPODAL, COLLAPSE3, COVER3, HOPF, IDENTITY, QSQUARE, REFLECT, const, power, power_rp

from oracles import poly_preimages

FAST = DegreeConfig(seeds=300, stability_check=False)


def _match(A, B, tol):
    assert len(A) == len(B)
    D = np.linalg.norm(A[:, None] - B[None], axis=2)
    assert sorted(D.argmin(axis=1)) == list(range(len(B)))
    assert D.min(axis=1).max() < tol


def test_power3_example_value():
    y = np.array([np.sqrt(0.5), 0, np.sqrt(0.5), 0])
    pre = find_preimages(power(3), y, FAST)
    assert len(pre) == 3 and set(pre.signs) == {1}
    _match(pre.points, poly_preimages(3, y), 1e-8)


@pytest.mark.parametrize("k", [-3, -2, -1, 1, 2, 3])
def test_preimages_match_polynomial_oracle(k):
    for w in sample_sphere(3, 3, seed=40 + k):
        pre = find_preimages(power(k), w, FAST)
        _match(pre.points, poly_preimages(k, w), 1e-8)
        assert np.all(pre.signs == np.sign(k))


def test_identity_and_constant_preimages():
    y = sample_sphere(1, 3, seed=2)[0]
    pre = find_preimages(IDENTITY, y, FAST)
    assert len(pre) == 1 and pre.signs[0] == 1 and np.allclose(pre.points[0], y)
    c = const("S3", [1, 0, 0, 0])
    assert len(find_preimages(c, [0, 1, 0, 0], FAST)) == 0


def test_critical_value_is_irregular():
    # z1 = 0 is the branch locus of a_2
    with pytest.raises(IrregularValue):
        find_preimages(power(2), [0, 0, 1, 0], FAST)
    with pytest.raises(CriticalValueSearchFailed):
        compute_degree(power(2), FAST, y=[0, 0, 0, 1])


def test_local_signs():
    x = sample_sphere(1, 3, seed=3)[0]
    assert local_sign(IDENTITY, x) == 1
    assert local_sign(ANTIPODAL, x) == 1
    assert local_sign(REFLECT, x) == -1
    # explicit ambient reflection determinant as oracle
    assert np.linalg.det(np.diag([1.0, -1.0, 1.0, 1.0])) == -1
    with pytest.raises(IrregularPoint):
        local_sign(power(2), [0, 0, 1, 0])


@pytest.mark.parametrize("k", range(-3, 4))
def test_degree_of_powers(k):
    assert compute_degree(power(k)) == k


@pytest.mark.parametrize(
    "f, d",
    [(IDENTITY, 1), (ANTIPODAL, 1), (REFLECT, -1), (COLLAPSE3 @ COVER3, 2), (QSQUARE, 2), (power_rp(3), 3)],
)
def test_zoo_degrees(f, d):
    assert compute_degree(f) == d


def test_collapse_degree_magnitude():
    assert abs(compute_degree(COLLAPSE3)) == 1


def test_degree_multiplicative():
    zoo = {"a-2": (power(-2), -2), "a3": (power(3), 3), "id": (IDENTITY, 1), "anti": (ANTIPODAL, 1), "refl": (REFLECT, -1)}
    pairs = [("a3", "a-2"), ("refl", "a3"), ("anti", "a-2"), ("a-2", "refl"), ("id", "a3")]
    for a, b in pairs:
        (fa, da), (fb, db) = zoo[a], zoo[b]
        assert compute_degree(fa @ fb, FAST) == da * db


def test_degree_independent_of_regular_value():
    for y in sample_sphere(10, 3, seed=77):
        assert compute_degree(power(-2), FAST, y=y) == -2


def test_rejects_surface_targets():
    with pytest.raises(DegenerateInput):
        compute_degree(HOPF)
    with pytest.raises(DegenerateInput):
        DegreeConfig(seeds=0)
