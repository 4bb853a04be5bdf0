"""Predictor-corrector continuation of root curves f^-1(y) for S^2-valued maps.

The root condition at ``y`` is the two-equation system ``F(x) = Ey^T f(x) = 0``
with ``f(x) . y > 0``, where ``Ey`` is the oriented tangent frame at ``y``.
A curve is followed with a fixed arclength step along the oriented kernel of
``dF`` (cross product of the two rows in the domain frame), each prediction
being pulled back to the curve by a minimum-norm Gauss-Newton corrector.

The corrector also follows degenerate root circles (for instance S2 under
``h o a_n`` with |n| >= 2, where dF vanishes to order |n| - 1): it runs until
both the residual and the Gauss-Newton update are small, so the located
points sit on the circle itself.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import CorrectorDiverged, DegenerateInput, OpenOrTooLong, SingularCurvePoint
from .geometry import angular_distance, normalize, quaternion_frame, sample_sphere, tangent_basis
from .maps import MapDescriptor, frame_jacobians, tangent_derivative

# dF counts as rank-deficient when its singular values differ by this ratio
RANK_RATIO = 1e-8
# an absolute floor below which a root point is reported as non-regular
REGULAR_SIGMA = 1e-6


@dataclass(frozen=True)
class TraceConfig:
    step: float = 0.01
    corrector_tol: float = 1e-10
    corrector_step_tol: float = 1e-9
    corrector_iters: int = 25
    max_steps: int = 100_000
    closure_radius: float | None = None
    min_steps_before_closure: int = 10
    closure_alignment: float = 0.9
    seeds: int = 200
    seed: int = 0
    homing_iters: int = 80
    component_dedupe: float = 1e-4

    def __post_init__(self):
        if self.step <= 0:
            raise DegenerateInput("step must be positive")
        if self.closure_radius is None:
            object.__setattr__(self, "closure_radius", self.step / 2)
        if not 0 < self.closure_radius < self.step:
            raise DegenerateInput("closure radius must lie in (0, step)")
        if min(self.corrector_tol, self.corrector_step_tol, self.component_dedupe) <= 0:
            raise DegenerateInput("tolerances must be positive")


@dataclass
class Curve:
    """Ordered polyline on S^3; for closed curves the last vertex joins the first.

    Curves of RP^3 root sets store a loop of the lift in S^3 and set
    ``space="RP3"``; ``lift_count`` is 1 when that loop is its own antipodal
    image and 2 when the lift is a pair of antipodal loops.
    """

    points: np.ndarray
    closed: bool
    space: str = "S3"
    component: int = 0
    sigma_min: float = np.inf
    lift_count: int = 1
    diagnostics: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.points)

    @property
    def edges(self):
        """Segment endpoints ``(A, B)``, including the closing edge when closed."""
        P = self.points
        if self.closed:
            return P, np.roll(P, -1, axis=0)
        return P[:-1], P[1:]

    @property
    def gaps(self):
        A, B = self.edges
        return angular_distance(A, B)

    @property
    def length(self) -> float:
        """Arclength in radians, summing great-circle distances between vertices."""
        return float(self.gaps.sum())

    def reversed(self) -> "Curve":
        return replace(self, points=self.points[::-1].copy())

    def antipode(self) -> "Curve":
        return replace(self, points=-self.points)


# --- corrector -----------------------------------------------------------


def chart_residual(f: MapDescriptor, y, X):
    """``F(x) = Ey^T f(x)`` and the sheet indicator ``f(x) . y``."""
    Ey = tangent_basis(y)
    Y = f.lift_eval(X)
    return Y @ Ey, Y @ y


def _system(f, y, Ey, x):
    """``(F, dF, Ex, f(x).y)`` at one point, dF in the quaternion frame ``Ex``."""
    X = x[None, :]
    Ex = quaternion_frame(X)
    Y = f.lift_eval(X)[0]
    dY = tangent_derivative(f, X, Ex)[0]
    return Ey.T @ Y, Ey.T @ dY, Ex[0], float(Y @ y)


def corrector_project(f: MapDescriptor, y, x, cfg: TraceConfig = TraceConfig()):
    """Pull ``x`` onto ``f^-1(y)`` by minimum-norm Gauss-Newton steps."""
    y = normalize(np.asarray(y, dtype=float))
    Ey = tangent_basis(y)
    x = normalize(np.asarray(x, dtype=float))
    last = np.inf
    for _ in range(cfg.corrector_iters + 1):
        F, A, Ex, side = _system(f, y, Ey, x)
        if side > 0 and np.linalg.norm(F) < cfg.corrector_tol and last < cfg.corrector_step_tol:
            return x
        delta = -np.linalg.pinv(A) @ F
        last = float(np.linalg.norm(delta))
        x = normalize(x + Ex @ delta)
    raise CorrectorDiverged(f"corrector did not converge for {f.expr} at y={y}")


def _kernel(A, Ex):
    """Unit ambient tangent along ker dF, oriented by the row cross product."""
    scale = np.abs(A).max()
    if scale == 0.0:
        return None, np.zeros(2)
    A = A / scale
    s = np.linalg.svd(A, compute_uv=False)
    if s[1] == 0.0 or s[1] < RANK_RATIO * s[0]:
        return None, s
    # rows are rescaled first: positive scaling keeps the orientation and
    # avoids underflow next to degenerate root circles where dF -> 0
    rows = A / np.linalg.norm(A, axis=1, keepdims=True)
    k = np.cross(rows[0], rows[1])
    t = Ex @ k
    return t / np.linalg.norm(t), s * scale


def curve_tangent(f: MapDescriptor, y, x):
    """Oriented unit tangent of the root curve through ``x``."""
    y = normalize(np.asarray(y, dtype=float))
    _, A, Ex, _ = _system(f, y, tangent_basis(y), np.asarray(x, dtype=float))
    t, _ = _kernel(A, Ex)
    if t is None:
        raise SingularCurvePoint("dF has rank below 2", location=np.asarray(x))
    return t


# --- tracing ------------------------------------------------------------------


def trace_component(f: MapDescriptor, y, x0, cfg: TraceConfig = TraceConfig()) -> Curve:
    """Follow the root curve through the root ``x0`` until it closes.

    Raises :class:`SingularCurvePoint` on a rank drop and :class:`OpenOrTooLong`
    (carrying the open partial curve) when ``max_steps`` is exhausted.
    """
    y = normalize(np.asarray(y, dtype=float))
    Ey = tangent_basis(y)
    x0 = normalize(np.asarray(x0, dtype=float))
    _, A, Ex, _ = _system(f, y, Ey, x0)
    t0, s = _kernel(A, Ex)
    if t0 is None:
        raise SingularCurvePoint("start point is not a regular curve point", location=x0)
    sigma_min = s[1]
    points = [x0]
    x, t = x0, t0
    for k in range(1, cfg.max_steps + 1):
        h = cfg.step
        d0 = np.linalg.norm(x - x0)
        closing = (
            k > cfg.min_steps_before_closure
            and d0 < 1.5 * cfg.step
            and t @ t0 > cfg.closure_alignment
            and t @ (x0 - x) > 0
        )
        if closing:
            # land inside the closure ball instead of stepping over the start
            h = max(d0 - cfg.closure_radius / 2, cfg.closure_radius / 2)
        try:
            x_new = corrector_project(f, y, normalize(x + h * t), cfg)
        except CorrectorDiverged:
            raise SingularCurvePoint("corrector failed along the curve", location=x) from None
        _, A, Ex, _ = _system(f, y, Ey, x_new)
        t_new, s = _kernel(A, Ex)
        if t_new is None:
            raise SingularCurvePoint("dF has rank below 2 along the curve", location=x_new)
        if t_new @ t < 0:
            t_new = -t_new
        sigma_min = min(sigma_min, s[1])
        points.append(x_new)
        x, t = x_new, t_new
        if (
            k >= cfg.min_steps_before_closure
            and np.linalg.norm(x - x0) < cfg.closure_radius
            and t @ t0 > cfg.closure_alignment
        ):
            return Curve(np.array(points), True, sigma_min=float(sigma_min))
    curve = Curve(np.array(points), False, sigma_min=float(sigma_min))
    raise OpenOrTooLong(f"no closure within {cfg.max_steps} steps", curve=curve)


# --- distances between curves --------------------------------------------------


def point_polyline_distance(P, curve: Curve):
    """Distance from each point of ``P`` to the polyline of ``curve`` (chordal)."""
    P = np.atleast_2d(P)
    A, B = curve.edges
    if len(A) == 0:
        return np.linalg.norm(P - curve.points[0], axis=1)
    out = np.empty(len(P))
    D = B - A
    dd = np.maximum(np.sum(D * D, axis=1), 1e-300)
    for start in range(0, len(P), 512):
        Q = P[start : start + 512]
        W = Q[:, None, :] - A[None, :, :]
        s = np.clip(np.sum(W * D[None], axis=2) / dd[None], 0.0, 1.0)
        diff = W - s[:, :, None] * D[None]
        out[start : start + 512] = np.sqrt(np.min(np.sum(diff * diff, axis=2), axis=1))
    return out


def hausdorff(c1: Curve, c2: Curve) -> float:
    """Symmetric Hausdorff distance, vertices of each curve against the other's polyline."""
    return float(max(point_polyline_distance(c1.points, c2).max(), point_polyline_distance(c2.points, c1).max()))


def projective_hausdorff(c1: Curve, c2: Curve) -> float:
    """Hausdorff distance between the images of two loops in RP^3."""
    return min(hausdorff(c1, c2), hausdorff(c1, c2.antipode()))


# --- component search -------------------------------------------------------------


@dataclass
class RootSearch:
    curves: list
    roots_found: int = 0
    dropped_seeds: int = 0


def _home(f: MapDescriptor, y, X, iters: int, tol: float):
    """Batched damped Gauss-Newton on ``|f(x) - y|`` from many starts."""
    X = np.array(X, dtype=float)
    for _ in range(iters):
        J, Y, Ex, Ey = frame_jacobians(f, X)
        r = Y - y
        A = Ey @ J
        step = -(np.linalg.pinv(A) @ r[:, :, None])[:, :, 0]
        size = np.linalg.norm(step, axis=1, keepdims=True)
        step *= np.minimum(1.0, 0.3 / np.maximum(size, 1e-300))
        X = normalize(X + (Ex @ step[:, :, None])[:, :, 0])
        if size.max() < tol:
            break
    return X


def _search(f: MapDescriptor, y, cfg: TraceConfig) -> RootSearch:
    y = normalize(np.asarray(y, dtype=float))
    seeds = sample_sphere(cfg.seeds, 3, cfg.seed)
    X = _home(f, y, seeds, cfg.homing_iters, 1e-12)
    F, side = chart_residual(f, y, X)
    near = (np.linalg.norm(F, axis=1) < 0.1) & (side > 0)
    found = RootSearch([], dropped_seeds=int((~near).sum()))
    for x in X[near]:
        if any(point_polyline_distance(x, c)[0] < cfg.step / 2 for c in found.curves):
            found.roots_found += 1
            continue
        try:
            root = corrector_project(f, y, x, cfg)
        except CorrectorDiverged:
            found.dropped_seeds += 1
            continue
        found.roots_found += 1
        if any(point_polyline_distance(root, c)[0] < cfg.step / 2 for c in found.curves):
            continue
        try:
            curve = trace_component(f, y, root, cfg)
        except OpenOrTooLong as exc:
            curve = exc.curve
        if all(hausdorff(curve, c) >= cfg.component_dedupe for c in found.curves):
            found.curves.append(curve)
    return found


def find_root_components(f: MapDescriptor, y, cfg: TraceConfig = TraceConfig()) -> list:
    """Connected components of ``f^-1(y)`` as curves.

    For an RP^3 domain the lift ``f o p3`` is traced in S^3 and loops that are
    antipodal images of each other are merged into one RP^3 component.
    """
    if f.target != "S2":
        raise DegenerateInput(f"root tracing needs an S2-valued map, got {f.expr}")
    search = _search(f.lift(), y, cfg)
    curves = search.curves
    if f.domain == "RP3":
        merged = []
        for c in curves:
            if any(projective_hausdorff(c, m) < cfg.component_dedupe for m in merged):
                continue
            c.space = "RP3"
            c.lift_count = 1 if hausdorff(c, c.antipode()) < cfg.component_dedupe else 2
            merged.append(c)
        curves = merged
    for i, c in enumerate(curves):
        c.component = i
        c.diagnostics = {"roots_found": search.roots_found, "dropped_seeds": search.dropped_seeds}
    return curves
