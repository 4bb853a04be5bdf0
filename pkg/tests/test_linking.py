import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from hopfroots.errors import ClassificationMismatch, CurvesNotSeparated, DegenerateInput
from hopfroots.geometry import inverse_stereographic
from hopfroots.linking import (
    crossing_sum,
    gauss_integral,
    hopf_invariant,
    hopf_report,
    linking_number,
    verify_classification,
)
from hopfroots.maps import HOPF, Y0, Y_NULL, const, power, rotate
from hopfroots.tracer import Curve, TraceConfig, find_root_components

CFG = TraceConfig()
T = np.linspace(0, 2 * np.pi, 800, endpoint=False)
S1 = Curve(np.stack([np.cos(T), np.sin(T), 0 * T, 0 * T], axis=1), True)
S2 = Curve(np.stack([0 * T, 0 * T, np.cos(T), np.sin(T)], axis=1), True)


def round_circle(center, radius):
    return np.stack([center[0] + radius * np.cos(T), center[1] + radius * np.sin(T), center[2] + 0 * T], axis=1)


def test_hopf_link_in_r3():
    # unit circle in the xy-plane and a circle through its centre in the xz-plane
    a = round_circle([0, 0, 0], 1.0)
    b = np.stack([1 + np.cos(T), 0 * T, np.sin(T)], axis=1)
    g = gauss_integral(a, b)
    c = crossing_sum(a, b, [0.1, 0.2, 1.0])
    assert abs(abs(g) - 1) < 0.01 and c == round(g)


def test_s1_s2_link_once():
    g = linking_number(S1, S2, "gauss")
    c = linking_number(S1, S2, "crossing")
    assert abs(g.value) == 1 and g.value == c.value and g.accepted


def test_far_apart_small_circles_unlinked():
    a = Curve(inverse_stereographic(round_circle([0, 0, 0], 0.2)), True)
    b = Curve(inverse_stereographic(round_circle([1.5, 0, 0], 0.2)), True)
    assert linking_number(a, b, "gauss").value == 0
    assert linking_number(a, b, "crossing").value == 0


def test_antisymmetry_and_reversal():
    v = linking_number(S1, S2).value
    assert linking_number(S2, S1).value == v
    assert linking_number(S1, S2.reversed()).value == -v
    assert linking_number(S1.reversed(), S2, "crossing").value == -v


def test_rejects_close_or_open_curves():
    near = Curve(np.stack([np.cos(T), np.sin(T), 0 * T + 1e-3, 0 * T], axis=1), True)
    near.points /= np.linalg.norm(near.points, axis=1, keepdims=True)
    with pytest.raises(CurvesNotSeparated):
        linking_number(S1, near)
    with pytest.raises(DegenerateInput):
        linking_number(S1, Curve(S2.points, False))
    with pytest.raises(DegenerateInput):
        linking_number(S1, S2, method="area")


def test_methods_agree_on_random_fiber_pairs():
    maps = [HOPF, HOPF @ power(2), HOPF @ power(-1) @ rotate(0, 2, 0.4)]
    rot = Rotation.random(14, random_state=21).apply(Y0)
    pairs = 0
    for i, f in enumerate(maps):
        for j in range(0, 14, 2):
            fa = find_root_components(f, rot[j], CFG)
            fb = find_root_components(f, rot[j + 1], CFG)
            for a in fa:
                for b in fb:
                    g = linking_number(a, b, "gauss", seed=j)
                    c = linking_number(a, b, "crossing", seed=j)
                    assert g.value == c.value and g.accepted
                    pairs += 1
    assert pairs >= 20


def test_hopf_invariant_basics():
    assert hopf_invariant(HOPF, CFG) == 1
    assert hopf_invariant(const("S3", Y_NULL), CFG) == 0


def test_invariant_independent_of_value_pair():
    f = HOPF @ power(2)
    for k in range(5):
        y1, y2 = Rotation.random(2, random_state=100 + k).apply(Y0)
        rep = hopf_report(f, values=(y1, y2), cfg=CFG)
        assert rep.value == 2 and rep.methods_agree


def test_one_empty_fiber_is_diagnosed():
    # h o a_0 covers only the closed upper hemisphere: S1 over y0, nothing over -y0
    with pytest.warns(UserWarning):
        rep = hopf_report(HOPF @ power(0), values=(Y0, -Y0), cfg=CFG, crosscheck=False)
    assert rep.value == 0 and rep.diagnostic


def test_classification_small_range():
    rows = verify_classification(range(-1, 2), CFG)
    assert [r.invariant for r in rows] == [-1, 0, 1] and all(r.passed for r in rows)


def test_classification_mismatch_reports_n(monkeypatch):
    import hopfroots.linking as linking

    monkeypatch.setattr(linking, "hopf_invariant", lambda f, cfg, seed: 7)
    with pytest.raises(ClassificationMismatch) as info:
        verify_classification([1], CFG)
    assert info.value.n == 1
