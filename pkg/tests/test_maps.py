import numpy as np
import pytest

from hopfroots.errors import DegenerateInput, DomainMismatch, NonSmoothPoint, ParityError
from hopfroots.geometry import sample_sphere, tangent_basis
from hopfroots.maps import (
    COLLAPSE3,
    COVER2,
    COVER3,
    HOPF,
    HPRIME,
    IDENTITY,
    Y_NULL,
    build_class_map,
    compose,
    const,
    differential,
    frame_jacobians,
    parse_map,
    power,
    power_rp,
    verify_well_defined,
)


def hopf_complex(X):
    """Independent evaluation of h in complex arithmetic."""
    z1 = X[:, 0] + 1j * X[:, 1]
    z2 = X[:, 2] + 1j * X[:, 3]
    w = 2 * z1 * np.conj(z2)
    return np.stack([w.real, w.imag, abs(z1) ** 2 - abs(z2) ** 2], axis=1)


def test_hopf_base_points():
    assert np.allclose(HOPF([1, 0, 0, 0]), [0, 0, 1])
    assert np.allclose(HOPF([0, 0, 1, 0]), [0, 0, -1])


def test_hopf_matches_complex_formula():
    X = sample_sphere(1000, 3, seed=1)
    assert np.abs(HOPF(X) - hopf_complex(X)).max() < 1e-14


def test_power_fixes_base_point_and_circle():
    assert np.allclose(power(3)([1, 0, 0, 0]), [1, 0, 0, 0])
    t = np.linspace(0, 2 * np.pi, 40)
    S1 = np.stack([np.cos(t), np.sin(t), 0 * t, 0 * t], axis=1)
    for k in (-2, -1, 2, 3):
        img = power(k)(S1)
        assert np.allclose(img[:, 2:], 0) and np.allclose(np.linalg.norm(img, axis=1), 1)


def test_negative_power_uses_conjugate():
    x = sample_sphere(1, 3, seed=2)[0]
    z1, z2 = x[0] + 1j * x[1], x[2] + 1j * x[3]
    w1 = np.conj(z1) ** 2
    ref = np.array([w1.real, w1.imag, z2.real, z2.imag])
    assert np.allclose(power(-2)(x), ref / np.linalg.norm(ref))


def test_collapse_skeleton_goes_to_south_pole():
    V = sample_sphere(20, 2, seed=3)
    X = np.concatenate([V, np.zeros((20, 1))], axis=1)
    assert np.allclose(COLLAPSE3(X), [0, 0, 0, -1], atol=1e-15)
    assert np.allclose(COLLAPSE3([0, 0, 0, 1]), [0, 0, 0, 1])


def test_collapse_uses_upper_representative():
    X = sample_sphere(100, 3, seed=4)
    assert np.allclose(COLLAPSE3(X), COLLAPSE3(-X), atol=1e-14)


def test_composition_tags():
    assert (HOPF @ power(2)).domain == "S3"
    assert (HPRIME @ COVER3).target == "S2"
    with pytest.raises(DomainMismatch):
        power(2) @ HOPF
    with pytest.raises(DomainMismatch):
        HOPF([1, 0, 0])
    assert isinstance(DomainMismatch("x"), TypeError)


def test_factorization_identities():
    X = sample_sphere(2000, 3, seed=5)
    assert np.abs((HPRIME @ COVER3)(X) - HOPF(X)).max() < 1e-12
    for k in (-3, -1, 1, 3):
        lhs = (COVER3 @ power(k))(X)
        rhs = (power_rp(k) @ COVER3)(X)
        assert np.abs(lhs - rhs).max() < 1e-12


def test_targets_are_unit():
    X = sample_sphere(500, 3, seed=6)
    for f in (HOPF, power(-3), COLLAPSE3 @ COVER3, build_class_map("RP2", "RP3", 2) @ COVER3):
        assert np.abs(np.linalg.norm(f(X), axis=1) - 1).max() < 1e-12


def test_identity_differential():
    x = sample_sphere(1, 3, seed=7)[0]
    assert np.allclose(differential(IDENTITY, x), np.eye(3), atol=1e-8)


def test_hopf_is_submersion_at_base_point():
    J = differential(HOPF, [1, 0, 0, 0])
    assert J.shape == (2, 3) and np.linalg.matrix_rank(J, tol=1e-6) == 2


@pytest.mark.parametrize("f", [power(2), power(-3), HOPF, HOPF @ power(3)])
def test_analytic_and_fd_jacobians_agree(f):
    X = sample_sphere(100, 3, seed=8)
    Ja = frame_jacobians(f, X, method="analytic")[0]
    Jf = frame_jacobians(f, X, method="fd")[0]
    assert np.linalg.norm(Ja - Jf, ord=2, axis=(1, 2)).max() < 1e-5


def test_collapse_fd_differential_against_manual_difference():
    x = np.array([0.3, -0.2, 0.4, 0.0])
    x[3] = np.sqrt(1 - np.sum(x[:3] ** 2))
    J = differential(COLLAPSE3 @ COVER3, x)
    E = tangent_basis(x)
    F = tangent_basis(COLLAPSE3(x))
    h = 1e-5
    manual = np.column_stack(
        [F.T @ (COLLAPSE3(x + h * E[:, i]) - COLLAPSE3(x - h * E[:, i])) / (2 * h) for i in range(3)]
    )
    assert np.allclose(J, manual, atol=1e-6)


def test_nonsmooth_loci():
    with pytest.raises(NonSmoothPoint):
        differential(COLLAPSE3, [0, 0, 0, 1])
    with pytest.raises(NonSmoothPoint):
        differential(COLLAPSE3, [1, 0, 0, 0])
    with pytest.raises(NonSmoothPoint):
        differential(power(-1), [0, 0, 1, 0])
    differential(power(2), [0, 0, 1, 0])


def test_class_map_table():
    assert build_class_map("S2", "S3", 1) == HOPF
    assert build_class_map("S2", "RP3", 2) == HOPF @ COLLAPSE3
    assert build_class_map("S2", "RP3", 1) == HPRIME
    assert build_class_map("S2", "RP3", 3) == HPRIME @ power_rp(3)
    null = build_class_map("RP2", "S3", 0)
    assert null == COVER2 @ const("S3", Y_NULL)
    assert null.target == "RP2"
    with pytest.raises(DegenerateInput):
        build_class_map("S3", "S3", 1)


def test_well_defined_reports():
    assert verify_well_defined(HPRIME, 10_000).max_violation < 1e-12
    assert verify_well_defined(power_rp(3), 10_000).max_violation < 1e-12
    assert verify_well_defined(COLLAPSE3, 10_000).max_violation < 1e-12
    assert verify_well_defined("cover2", 1000).max_violation == 0
    with pytest.raises(ParityError):
        power_rp(2)
    with pytest.raises(DegenerateInput):
        verify_well_defined(HOPF)


@pytest.mark.parametrize(
    "text",
    [
        "hopf",
        "compose(hopf, power(3))",
        "compose(cover2, hopf, power(-2))",
        "compose(hprime, power_rp(-3))",
        "compose(hopf, rotate(1, 3, pi/4), collapse3)",
        "const(S3, 1, 0, 0)",
        "classmap(RP2, RP3, 2)",
    ],
)
def test_parse_round_trip(text):
    f = parse_map(text)
    assert parse_map(str(f)) == f


def test_parse_errors():
    for bad in ("nothing", "power(1.5)", "compose(power(2), hopf)", "hopf(", "rotate(1, 2)", "__import__('os')"):
        with pytest.raises((DegenerateInput, DomainMismatch)):
            parse_map(bad)


def test_compose_equals_matmul():
    assert compose(HOPF, power(2)) == HOPF @ power(2)
