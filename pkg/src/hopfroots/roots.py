"""Root-set reports for the minimal representatives of every homotopy class.

A report traces ``f^-1(y)``, summarizes each component (closure, length,
planarity, lift multiplicity) and, when the class has a known closed-form root
set, measures how far the traced vertices sit from it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DecompositionOverlap, DegenerateInput, TheoremCheckFailed
from .geometry import normalize
from .maps import COVER2, MapDescriptor, Y0, build_class_map
from .tracer import Curve, TraceConfig, find_root_components, point_polyline_distance

OVERLAP_TOL = 1e-3
COVERAGE_FACTOR = 2.0


@dataclass(frozen=True)
class Circle:
    """Round circle ``center + radius (cos t u + sin t v)`` in R^4."""

    name: str
    center: np.ndarray
    u: np.ndarray
    v: np.ndarray
    radius: float

    def sample(self, n: int = 2000):
        t = np.linspace(0.0, 2 * np.pi, n, endpoint=False)[:, None]
        return self.center + self.radius * (np.cos(t) * self.u + np.sin(t) * self.v)

    def distance(self, P):
        """Exact Euclidean distance from each row of ``P`` to the circle."""
        W = np.atleast_2d(P) - self.center
        a, b = W @ self.u, W @ self.v
        off = W - a[:, None] * self.u - b[:, None] * self.v
        radial = np.hypot(a, b) - self.radius
        return np.sqrt(np.sum(off * off, axis=1) + radial**2)


_E = np.eye(4)
S1 = Circle("S1", np.zeros(4), _E[0], _E[1], 1.0)
S2 = Circle("S2", np.zeros(4), _E[2], _E[3], 1.0)
Q3_CIRCLE = Circle("q3", np.array([0.0, 0.0, 0.0, np.sqrt(3) / 2]), _E[0], _E[1], 0.5)


def analytic_match(curve: Curve, circle: Circle, step: float) -> float:
    """Largest vertex distance to ``circle``, or ``inf`` if the trace misses part of it.

    Coverage asks every point of the analytic circle to lie within
    ``COVERAGE_FACTOR * step`` of the polyline. Loops of RP^3 root sets are
    compared up to the antipodal map.
    """
    P = curve.points
    dev = circle.distance(P)
    ref = circle.sample()
    gap = point_polyline_distance(ref, curve)
    if curve.space == "RP3":
        dev = np.minimum(dev, circle.distance(-P))
        gap = np.minimum(gap, point_polyline_distance(-ref, curve))
    if gap.max() > COVERAGE_FACTOR * step:
        return np.inf
    return float(dev.max())


def planarity_residual(curve: Curve) -> float:
    """Largest vertex distance to the best-fit 2-plane through the origin."""
    P = curve.points
    _, _, Vt = np.linalg.svd(P, full_matrices=False)
    plane = Vt[:2]
    off = P - (P @ plane.T) @ plane
    return float(np.linalg.norm(off, axis=1).max())


@dataclass
class ComponentSummary:
    component: int
    closed: bool
    length: float
    vertices: int
    planarity: float
    lift_count: int
    analytic: str | None = None
    match: float | None = None
    curve: Curve | None = field(default=None, repr=False)

    def as_dict(self) -> dict:
        return {
            "component": self.component,
            "closed": self.closed,
            "length": self.length,
            "vertices": self.vertices,
            "planarity": self.planarity,
            "lift_count": self.lift_count,
            "analytic": self.analytic or "none",
            "match": "none" if self.match is None else self.match,
        }


@dataclass
class RootSetReport:
    map_id: tuple | None
    base_point: np.ndarray
    components: list
    expr: str = ""

    @property
    def component_count(self) -> int:
        return len(self.components)

    @property
    def closed_loop_present(self) -> bool:
        return any(c.closed for c in self.components)

    @property
    def curves(self) -> list:
        return [c.curve for c in self.components]

    def as_dict(self) -> dict:
        return {
            "map_id": list(self.map_id) if self.map_id else None,
            "expr": self.expr,
            "base_point": [float(v) for v in self.base_point],
            "component_count": self.component_count,
            "closed_loop_present": self.closed_loop_present,
            "components": [c.as_dict() for c in self.components],
        }


def identify_class(f: MapDescriptor, search=range(-6, 7)):
    """``(domain, target, n)`` if ``f`` is one of the built-in class maps, else None."""
    for n in search:
        if build_class_map(f.target, f.domain, n).expr == f.expr:
            return (f.domain, f.target, n)
    return None


def analytic_circles(map_id, y) -> list | None:
    """Closed-form root set of a built-in S^2-valued class map at ``y = +-y0``."""
    if map_id is None:
        return None
    domain, target, n = map_id
    y = normalize(np.asarray(y, float))
    sign = 1 if np.allclose(y, Y0, atol=1e-12) else -1 if np.allclose(y, -Y0, atol=1e-12) else 0
    if sign == 0:
        return None
    if n == 0:
        return []
    if domain == "S3" or n % 2:
        return [S1 if sign > 0 else S2]
    if target == "S2" and sign > 0:
        return [Q3_CIRCLE]
    # the shifted collapse used for RP^2 targets has no round root set
    return None


def summarize(curve: Curve, circles, step: float) -> ComponentSummary:
    summary = ComponentSummary(
        component=curve.component,
        closed=curve.closed,
        length=curve.length,
        vertices=len(curve),
        planarity=planarity_residual(curve),
        lift_count=curve.lift_count,
        curve=curve,
    )
    if circles:
        scores = [(analytic_match(curve, c, step), c.name) for c in circles]
        summary.match, summary.analytic = min(scores)
    return summary


def root_set_report(f: MapDescriptor, y, cfg: TraceConfig = TraceConfig(), map_id=None) -> RootSetReport:
    """Trace ``f^-1(y)`` and summarize it.

    For an RP^2 target ``y`` is a representative of the base point and the
    report covers both lifts (see :func:`rp2_root_decompose`).
    """
    y = normalize(np.asarray(y, dtype=float))
    map_id = map_id if map_id is not None else identify_class(f)
    if f.target == "RP2":
        plus, minus = rp2_root_decompose(f, y, cfg, map_id=map_id)
        comps = plus.components + minus.components
        for i, c in enumerate(comps):
            c.component = i
        return RootSetReport(map_id, y, comps, f.expr)
    if f.target != "S2":
        raise DegenerateInput(f"root sets are reported for S2 or RP2 targets, got {f.expr}")
    circles = analytic_circles(map_id, y)
    curves = find_root_components(f, y, cfg)
    return RootSetReport(map_id, y, [summarize(c, circles, cfg.step) for c in curves], f.expr)


def curve_distance(c1: Curve, c2: Curve) -> float:
    """Minimum geodesic vertex distance, up to the antipodal map for RP^3 loops."""
    d = np.linalg.norm(c1.points[:, None, :] - c2.points[None, :, :], axis=2).min()
    if "RP3" in (c1.space, c2.space):
        d = min(d, np.linalg.norm(c1.points[:, None, :] + c2.points[None, :, :], axis=2).min())
    return float(2 * np.arcsin(min(d / 2, 1.0)))


def rp2_root_decompose(f: MapDescriptor, y, cfg: TraceConfig = TraceConfig(), map_id=None):
    """Reports for ``g^-1(y)`` and ``g^-1(-y)`` where ``f = p2 o g``."""
    if f.target != "RP2" or f.chain[0] != COVER2.chain[0]:
        raise DegenerateInput(f"expected a map of the form p2 o g, got {f.expr}")
    g = MapDescriptor(f.chain[1:])
    y = normalize(np.asarray(y, dtype=float))
    if map_id is None:
        map_id = identify_class(f)
    # g is the built-in S2-valued map except for the shifted even RP^3 classes
    lift_id = None
    if map_id is not None and (map_id[0] == "S3" or map_id[2] % 2):
        lift_id = (map_id[0], "S2", map_id[2])
    reports = []
    for yy in (y, -y):
        circles = analytic_circles(lift_id, yy)
        curves = find_root_components(g, yy, cfg)
        reports.append(RootSetReport(map_id, yy, [summarize(c, circles, cfg.step) for c in curves], g.expr))
    plus, minus = reports
    for a in plus.curves:
        for b in minus.curves:
            d = curve_distance(a, b)
            if d <= OVERLAP_TOL:
                raise DecompositionOverlap(f"root sets over +y and -y meet (distance {d:.2g})")
    return plus, minus


@dataclass
class TheoremCheck:
    report: RootSetReport
    expected: str
    passed: bool
    separation: float | None = None


def minimal_root_demo(domain: str, target: str, n: int, cfg: TraceConfig = TraceConfig()) -> TheoremCheck:
    """Root set of the minimal class-``n`` representative checked against its predicted shape.

    Null class: empty. Target S^2: one closed loop. Target RP^2: two
    disjoint closed loops. A mismatch raises :class:`TheoremCheckFailed`.
    """
    f = build_class_map(target, domain, n)
    report = root_set_report(f, Y0, cfg, map_id=(domain, target, n))
    comps = report.components
    separation = None
    if n == 0:
        expected, ok = "empty", report.component_count == 0
    elif target == "S2":
        expected = "one closed component"
        ok = report.component_count == 1 and comps[0].closed
    else:
        expected = "two disjoint closed components"
        ok = report.component_count == 2 and all(c.closed for c in comps)
        if report.component_count == 2:
            separation = curve_distance(comps[0].curve, comps[1].curve)
            ok = ok and separation > OVERLAP_TOL
    check = TheoremCheck(report, expected, ok, separation)
    if not ok:
        raise TheoremCheckFailed(
            f"{domain}->{target} class {n}: expected {expected}, got {report.component_count} components",
            report=report,
        )
    return check
