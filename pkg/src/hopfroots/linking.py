"""Linking numbers of closed curves in S^3 and Hopf invariants of maps S^3 -> S^2.

Both curves are stereographically projected from a pole far from them; the
linking number is then read off either from the Gauss double integral
(periodic trapezoid rule over the vertex parameterization) or from the signed
crossings of a generic planar projection. The Hopf invariant of ``f`` is the
sum of linking numbers between the components of two regular fibers.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree
from scipy.spatial.transform import Rotation

from .errors import (
    ClassificationMismatch,
    CurvesNotSeparated,
    DegenerateInput,
    HopfRootsError,
    ProjectionFailure,
)
from .geometry import normalize, sample_sphere, stereographic, tangent_basis
from .maps import COVER3, Y0, MapDescriptor, build_class_map
from .tracer import REGULAR_SIGMA, Curve, TraceConfig, find_root_components

ACCEPT_RESIDUAL = 0.2
# Overall sign of the Hopf invariant. With fibers oriented by the tracer's
# kernel convention the Gauss integral already gives h the value +1.
HOPF_SIGN = 1


@dataclass(frozen=True)
class LinkResult:
    value: int
    raw: float
    method: str
    residual: float

    @property
    def accepted(self) -> bool:
        return self.residual < ACCEPT_RESIDUAL


def _check_pair(c1: Curve, c2: Curve):
    if not (c1.closed and c2.closed):
        raise DegenerateInput("linking numbers need closed curves")
    gap = max(c1.gaps.max(), c2.gaps.max())
    sep = cKDTree(c2.points).query(c1.points)[0].min()
    if sep <= 10 * gap:
        raise CurvesNotSeparated(f"curves {sep:.3g} apart, need more than {10 * gap:.3g}")


def _best_pole(c1: Curve, c2: Curve, seed: int):
    candidates = sample_sphere(256, 3, seed)
    tree = cKDTree(np.concatenate([c1.points, c2.points]))
    clearance = tree.query(candidates)[0]
    return candidates[np.argmax(clearance)]


def gauss_integral(r1, r2) -> float:
    """(1/4pi) sum (r1 - r2).(dr1 x dr2)/|r1 - r2|^3 over closed polylines in R^3."""
    d1 = (np.roll(r1, -1, axis=0) - np.roll(r1, 1, axis=0)) / 2
    d2 = (np.roll(r2, -1, axis=0) - np.roll(r2, 1, axis=0)) / 2
    total = 0.0
    for start in range(0, len(r1), 256):
        a = r1[start : start + 256]
        da = d1[start : start + 256]
        diff = a[:, None, :] - r2[None, :, :]
        cross = np.cross(da[:, None, :], d2[None, :, :])
        num = np.sum(diff * cross, axis=2)
        den = np.sum(diff * diff, axis=2) ** 1.5
        total += np.sum(num / den)
    return total / (4 * np.pi)


def _cross2(a, b):
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def crossing_sum(r1, r2, direction):
    """Half the signed crossing count of two closed polylines viewed along ``direction``.

    Returns ``None`` when the projection is degenerate (a crossing at a vertex
    or between parallel segments).
    """
    v = normalize(direction)
    U = tangent_basis(v)
    A0, B0 = r1, r2
    dA, dB = np.roll(r1, -1, axis=0) - A0, np.roll(r2, -1, axis=0) - B0
    a0, b0, da, db = A0 @ U, B0 @ U, dA @ U, dB @ U
    total = 0
    eps = 1e-9
    for start in range(0, len(a0), 256):
        sl = slice(start, start + 256)
        w = b0[None, :, :] - a0[sl, None, :]
        den = _cross2(da[sl, None, :], db[None, :, :])
        scale = np.linalg.norm(da[sl], axis=1)[:, None] * np.linalg.norm(db, axis=1)[None, :]
        with np.errstate(divide="ignore", invalid="ignore"):
            s = _cross2(w, db[None, :, :]) / den
            t = _cross2(w, da[sl, None, :]) / den
        hit = (s >= -eps) & (s <= 1 + eps) & (t >= -eps) & (t <= 1 + eps)
        parallel = np.abs(den) < 1e-12 * scale
        if np.any(parallel & (np.abs(_cross2(w, da[sl, None, :])) < 1e-12 * scale)):
            return None
        hit &= ~parallel
        near_end = (np.minimum(np.abs(s), np.abs(1 - s)) < eps) | (np.minimum(np.abs(t), np.abs(1 - t)) < eps)
        if np.any(hit & near_end):
            return None
        i, j = np.nonzero(hit)
        if len(i) == 0:
            continue
        za = (A0[sl][i] + s[i, j, None] * dA[sl][i]) @ v
        zb = (B0[j] + t[i, j, None] * dB[j]) @ v
        if np.any(np.abs(za - zb) < 1e-12):
            return None
        handed = np.sign(np.cross(dA[sl][i], dB[j]) @ v)
        # crossings where the first curve lies over the second count once each way
        total += int(np.sum(np.where(za > zb, handed, -handed)))
    return total / 2


def linking_number(c1: Curve, c2: Curve, method: str = "gauss", seed: int = 0) -> LinkResult:
    """Linking number of two disjoint closed curves on S^3."""
    _check_pair(c1, c2)
    pole = _best_pole(c1, c2, seed)
    r1 = stereographic(c1.points, pole)
    r2 = stereographic(c2.points, pole)
    if method == "gauss":
        raw = gauss_integral(r1, r2)
    elif method == "crossing":
        for direction in sample_sphere(20, 2, seed + 17):
            raw = crossing_sum(r1, r2, direction)
            if raw is not None:
                break
        else:
            raise ProjectionFailure("no generic projection direction in 20 tries")
    else:
        raise DegenerateInput(f"unknown linking method {method!r}")
    value = int(np.rint(raw))
    return LinkResult(value, float(raw), method, float(abs(raw - value)))


# --- Hopf invariant -------------------------------------------------------------


@dataclass
class HopfReport:
    value: int
    values: tuple
    fibers: tuple
    gauss: list = field(default_factory=list)
    crossing: list = field(default_factory=list)
    attempts: int = 1
    diagnostic: str = ""

    @property
    def methods_agree(self) -> bool:
        return all(g.value == c.value for g, c in zip(self.gauss, self.crossing))

    @property
    def max_residual(self) -> float:
        return max((r.residual for r in self.gauss + self.crossing), default=0.0)


def _value_pairs(seed: int, attempts: int):
    yield Y0, -Y0
    for k in range(1, attempts):
        R = Rotation.random(random_state=seed + k).as_matrix()
        y = R @ Y0
        yield y, -y


def _regular(fiber) -> bool:
    return all(c.closed and c.sigma_min >= REGULAR_SIGMA for c in fiber)


def hopf_report(
    f: MapDescriptor,
    values=None,
    cfg: TraceConfig = TraceConfig(),
    seed: int = 0,
    attempts: int = 10,
    crosscheck: bool = True,
) -> HopfReport:
    """Trace two fibers of ``f`` and sum their pairwise linking numbers.

    The default values are (0, 0, 1) and (0, 0, -1); if either is not a
    regular value (rank drop, open or degenerate fiber, fibers too close) a
    seeded random rotation of the pair is tried instead. An RP^3 domain is
    replaced by its lift ``f o p3``.
    """
    if f.target != "S2":
        raise DegenerateInput(f"Hopf invariant needs an S2-valued map, got {f.expr}")
    f = f.lift()
    pairs = [tuple(normalize(np.asarray(v, float)) for v in values)] if values is not None else _value_pairs(seed, attempts)
    last_error = None
    for attempt, (y1, y2) in enumerate(pairs, start=1):
        try:
            fib1 = find_root_components(f, y1, cfg)
            fib2 = find_root_components(f, y2, cfg)
        except HopfRootsError as exc:
            last_error = exc
            continue
        if not (_regular(fib1) and _regular(fib2)):
            last_error = "irregular fiber"
            continue
        if not fib1 and not fib2:
            return HopfReport(0, (y1, y2), (fib1, fib2), attempts=attempt)
        if not fib1 or not fib2:
            msg = "one fiber is empty and the other is not; the map is not surjective"
            warnings.warn(msg)
            return HopfReport(0, (y1, y2), (fib1, fib2), attempts=attempt, diagnostic=msg)
        try:
            gauss = [linking_number(a, b, "gauss", seed) for a in fib1 for b in fib2]
            cross = [linking_number(a, b, "crossing", seed) for a in fib1 for b in fib2] if crosscheck else []
        except CurvesNotSeparated as exc:
            last_error = exc
            continue
        value = HOPF_SIGN * sum(r.value for r in gauss)
        return HopfReport(value, (y1, y2), (fib1, fib2), gauss, cross, attempts=attempt)
    raise HopfRootsError(f"no regular value pair found for {f.expr}: {last_error}")


def hopf_invariant(f: MapDescriptor, cfg: TraceConfig = TraceConfig(), seed: int = 0) -> int:
    return hopf_report(f, cfg=cfg, seed=seed).value


@dataclass(frozen=True)
class ClassificationRow:
    n: int
    invariant: int
    passed: bool


def verify_classification(n_range, cfg: TraceConfig = TraceConfig(), seed: int = 0, strict: bool = True):
    """Hopf invariant of ``h'_n o p3`` for each n; must equal n."""
    rows = []
    for n in n_range:
        lifted = build_class_map("S2", "RP3", n) @ COVER3
        value = hopf_invariant(lifted, cfg, seed)
        rows.append(ClassificationRow(n, value, value == n))
        if strict and value != n:
            raise ClassificationMismatch(f"h'_{n} o p3 has Hopf invariant {value}", n=n)
    return rows
