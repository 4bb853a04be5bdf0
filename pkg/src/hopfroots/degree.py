"""Signed mapping degree of maps into S^3 or RP^3 by counting preimages.

Preimages of a value are found by multistart Gauss-Newton in tangent
coordinates, retracting to the sphere by renormalization. Maps out of RP^3
are solved through their lift ``f o p3`` and the antipodal pairs are merged;
the degree is the signed lift count divided by two.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    CriticalValueSearchFailed,
    DegenerateInput,
    IrregularPoint,
    IrregularValue,
    NonSmoothPoint,
    UnstableCount,
)
from .geometry import angular_distance, canonical_rep, normalize, projective_distance, sample_sphere
from .maps import PROJECTIVE, SPACES, MapDescriptor, frame_jacobians

SINGULAR_TOL = 1e-6
# distinct preimages closer than this signal roots coalescing at a critical value
COALESCE_TOL = 1e-4


@dataclass(frozen=True)
class DegreeConfig:
    seeds: int = 500
    newton_tol: float = 1e-11
    max_newton_iters: int = 50
    dedupe_tol: float = 1e-6
    stability_check: bool = True
    seed: int = 0
    value_attempts: int = 20

    def __post_init__(self):
        if self.seeds < 1:
            raise DegenerateInput("seeds must be >= 1")
        if min(self.newton_tol, self.dedupe_tol) <= 0:
            raise DegenerateInput("tolerances must be positive")


@dataclass
class PreimageSet:
    points: np.ndarray
    signs: np.ndarray
    regular: bool = True
    # signed solutions of the lift f o p3 when the domain is RP^3
    lift_signs: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=int))

    def __len__(self):
        return len(self.points)


def _check_target(f: MapDescriptor):
    if SPACES[f.target] != 3 or SPACES[f.domain] != 3:
        raise DegenerateInput(f"degree needs a map between 3-dimensional spaces, got {f.expr}")


def _dedupe(points, tol, dist=angular_distance):
    kept = []
    for i, p in enumerate(points):
        if all(dist(p, points[j]) >= tol for j in kept):
            kept.append(i)
    return kept


def newton_solve(g: MapDescriptor, y, X0, tol: float, max_iter: int):
    """Batched Gauss-Newton for ``g(x) = y`` on S^3; returns (X, residuals)."""
    X = np.array(X0, dtype=float)
    y = np.asarray(y, dtype=float)
    for _ in range(max_iter):
        J, Y, Ex, Ey = frame_jacobians(g, X)
        r = Y - y
        res = np.linalg.norm(r, axis=1)
        active = res >= tol
        if not active.any():
            break
        A = Ey[active] @ J[active]
        step = -(np.linalg.pinv(A) @ r[active][:, :, None])[:, :, 0]
        size = np.linalg.norm(step, axis=1, keepdims=True)
        step *= np.minimum(1.0, 0.5 / np.maximum(size, 1e-300))
        X[active] = normalize(X[active] + (Ex[active] @ step[:, :, None])[:, :, 0])
    res = np.linalg.norm(g.lift_eval(X) - y, axis=1)
    return X, res


def find_preimages(f: MapDescriptor, y, cfg: DegreeConfig = DegreeConfig()) -> PreimageSet:
    """All preimages of ``y`` with their local orientation signs.

    Raises :class:`IrregularValue` if some preimage has a near-singular
    differential; the caller should move ``y``.
    """
    _check_target(f)
    y = normalize(np.asarray(y, dtype=float))
    g = f.lift()
    targets = [y, -y] if f.target in PROJECTIVE else [y]
    seeds = sample_sphere(cfg.seeds, 3, cfg.seed)
    sols = []
    for yt in targets:
        X, res = newton_solve(g, yt, seeds, cfg.newton_tol, cfg.max_newton_iters)
        sols.append(X[res < cfg.newton_tol])
    sols = np.concatenate(sols) if sols else np.zeros((0, 4))
    sols = sols[_dedupe(sols, cfg.dedupe_tol)]
    if len(sols) == 0:
        empty = np.zeros((0, 4))
        return PreimageSet(empty, np.zeros(0, dtype=int), True, np.zeros(0, dtype=int))
    J, _, _, _ = frame_jacobians(g, sols)
    sigma = np.linalg.svd(J, compute_uv=False)[:, -1]
    if np.any(sigma < SINGULAR_TOL) or np.any(g.nonsmooth(sols)):
        raise IrregularValue(f"{f.expr} has a critical preimage of {y}")
    if len(sols) > 1:
        D = angular_distance(sols[:, None, :], sols[None, :, :])
        np.fill_diagonal(D, np.inf)
        if D.min() < COALESCE_TOL:
            raise IrregularValue(f"preimages of {y} under {f.expr} coalesce (distance {D.min():.2g})")
    signs = np.sign(np.linalg.det(J)).astype(int)
    if f.domain == "RP3":
        canon = canonical_rep(sols)
        keep = _dedupe(canon, cfg.dedupe_tol, dist=projective_distance)
        return PreimageSet(canon[keep], signs[keep], True, signs)
    return PreimageSet(sols, signs, True, signs)


def local_sign(f: MapDescriptor, x) -> int:
    """Sign of det df_x in positively oriented frames of domain and target."""
    _check_target(f)
    x = normalize(np.asarray(x, dtype=float))
    if f.nonsmooth(x)[0]:
        raise NonSmoothPoint(f"{f.expr} is not smooth at {x}")
    J = frame_jacobians(f.lift(), x)[0][0]
    if np.linalg.svd(J, compute_uv=False)[-1] < SINGULAR_TOL:
        raise IrregularPoint(f"singular differential of {f.expr} at {x}")
    return int(np.sign(np.linalg.det(J)))


def _degree_of(f: MapDescriptor, pre: PreimageSet) -> int:
    total = int(pre.lift_signs.sum())
    if f.domain == "RP3":
        if total % 2:
            raise UnstableCount(f"odd signed lift count {total} for {f.expr}")
        return total // 2
    return total


def compute_degree(f: MapDescriptor, cfg: DegreeConfig = DegreeConfig(), y=None) -> int:
    """Signed degree of ``f``; the regular value is sampled unless given."""
    _check_target(f)
    candidates = [np.asarray(y, float)] if y is not None else list(
        sample_sphere(cfg.value_attempts, 3, cfg.seed + 1)
    )
    for yv in candidates:
        try:
            pre = find_preimages(f, yv, cfg)
        except IrregularValue:
            continue
        deg = _degree_of(f, pre)
        if cfg.stability_check:
            doubled = DegreeConfig(
                seeds=2 * cfg.seeds,
                newton_tol=cfg.newton_tol,
                max_newton_iters=cfg.max_newton_iters,
                dedupe_tol=cfg.dedupe_tol,
                stability_check=False,
                seed=cfg.seed,
            )
            again = _degree_of(f, find_preimages(f, yv, doubled))
            if again != deg:
                raise UnstableCount(f"degree of {f.expr}: {deg} with {cfg.seeds} seeds, {again} with {2 * cfg.seeds}")
        return deg
    raise CriticalValueSearchFailed(f"no regular value of {f.expr} after {len(candidates)} attempts")
