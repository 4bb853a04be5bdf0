"""Geometry of S^2, S^3 and their antipodal quotients.

Points are plain numpy arrays in ambient coordinates: a point of S^3 is a
4-vector ``(x1, x2, x3, x4)`` read as the complex pair
``(z1, z2) = (x1 + i x2, x3 + i x4)``; a point of S^2 is a 3-vector. Points of
RP^3 and RP^2 are stored as their canonical representative on the sphere.

Every function accepts either a single point or a stack of points of shape
``(N, d)`` unless noted otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri
from scipy.stats import qmc

from .errors import DegenerateInput, PoleProximity

EPS_NORM = 1e-12
EPS_POLE = 1e-6

NORTH3 = np.array([0.0, 0.0, 0.0, 1.0])
SOUTH3 = -NORTH3


def normalize(x):
    """Rescale to unit length along the last axis; zero vectors are rejected."""
    x = np.asarray(x, dtype=float)
    nrm = np.linalg.norm(x, axis=-1, keepdims=True)
    if np.any(nrm == 0.0) or not np.all(np.isfinite(nrm)):
        raise DegenerateInput("cannot normalize a zero or non-finite vector")
    return x / nrm


def as_point(x, dim: int):
    """Coerce to a point (or stack) of S^dim, re-normalizing near-unit input."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != dim + 1:
        raise DegenerateInput(f"expected {dim + 1} ambient coordinates, got {x.shape[-1]}")
    return normalize(x)


def on_sphere(x, tol: float = EPS_NORM) -> bool:
    x = np.asarray(x, dtype=float)
    return bool(np.all(np.abs(np.linalg.norm(x, axis=-1) - 1.0) < tol))


def canonical_rep(x):
    """Normalize and fix the sign so the largest-|coordinate| entry is positive.

    Ties go to the lowest index. ``canonical_rep(-x) == canonical_rep(x)``.

    >>> canonical_rep([0, 0, 0, -2])
    array([0., 0., 0., 1.])
    """
    u = normalize(x)
    idx = np.argmax(np.abs(u), axis=-1)
    lead = np.take_along_axis(u, np.expand_dims(idx, -1), axis=-1)
    return np.where(lead < 0, -u, u)


def projective_distance(a, b):
    """Chordal distance between antipodal classes: min(|a-b|, |a+b|)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return np.minimum(np.linalg.norm(a - b, axis=-1), np.linalg.norm(a + b, axis=-1))


def angular_distance(a, b):
    """Great-circle distance, computed stably from the chord length."""
    chord = np.linalg.norm(np.asarray(a, float) - np.asarray(b, float), axis=-1)
    return 2.0 * np.arcsin(np.clip(chord / 2.0, 0.0, 1.0))


@dataclass(frozen=True)
class TangentFrame:
    base: np.ndarray
    e1: np.ndarray
    e2: np.ndarray
    e3: np.ndarray

    @property
    def matrix(self) -> np.ndarray:
        """The 4x3 matrix whose columns are e1, e2, e3."""
        return np.column_stack([self.e1, self.e2, self.e3])


def tangent_basis(x):
    """Positively oriented orthonormal tangent bases at points of S^(d-1).

    Returns an array of shape ``(..., d, d-1)`` whose columns span the tangent
    space and satisfy ``det[x | columns] = +1``. The basis comes from
    Gram-Schmidt on the standard basis vectors other than the pivot (the index
    of the largest |coordinate|), so it is deterministic in ``x``.
    """
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    X = np.atleast_2d(x)
    n, d = X.shape
    pivot = np.argmax(np.abs(X), axis=1)
    # indices 0..d-1 with the pivot removed, kept in increasing order
    order = np.argsort(np.arange(d)[None, :] == pivot[:, None], axis=1, kind="stable")[:, : d - 1]
    E = np.zeros((n, d, d - 1))
    for k in range(d - 1):
        v = np.zeros((n, d))
        v[np.arange(n), order[:, k]] = 1.0
        v -= np.sum(v * X, axis=1, keepdims=True) * X
        for j in range(k):
            ej = E[:, :, j]
            v -= np.sum(v * ej, axis=1, keepdims=True) * ej
        E[:, :, k] = v / np.linalg.norm(v, axis=1, keepdims=True)
    full = np.concatenate([X[:, :, None], E], axis=2)
    flip = np.linalg.det(full) < 0
    E[flip, :, -1] *= -1.0
    return E[0] if single else E


def quaternion_frame(x):
    """Global tangent frame of S^3 from right multiplication by i, j, k.

    Smooth, positively oriented and cheap; the pivot-based
    :func:`tangent_basis` is the canonical frame, this one is for inner loops.
    """
    x = np.asarray(x, dtype=float)
    a, b, c, d = np.moveaxis(x, -1, 0)
    xi = np.stack([-b, a, d, -c], axis=-1)
    xj = np.stack([-c, -d, a, b], axis=-1)
    xk = np.stack([-d, c, -b, a], axis=-1)
    return np.stack([xi, xj, xk], axis=-1)


def tangent_frame(p) -> TangentFrame:
    p = as_point(p, 3)
    E = tangent_basis(p)
    return TangentFrame(p, E[:, 0], E[:, 1], E[:, 2])


def rotation_to_north(pole):
    """A rotation (det +1) taking ``pole`` to the last standard basis vector."""
    pole = normalize(pole)
    d = pole.shape[-1]
    north = np.zeros(d)
    north[-1] = 1.0
    v = pole - north
    nv = np.linalg.norm(v)
    if nv < 1e-15:
        return np.eye(d)
    H = np.eye(d) - 2.0 * np.outer(v, v) / nv**2
    D = np.eye(d)
    D[0, 0] = -1.0
    return D @ H


def stereographic(p, pole=NORTH3):
    """Stereographic projection of S^3 to R^3 from ``pole``.

    The pole is first rotated to (0, 0, 0, 1); since the rotation is
    orientation preserving, linking numbers read off in the image do not depend
    on the pole.
    """
    p = as_point(p, 3)
    pole = as_point(pole, 3)
    if np.any(angular_distance(p, pole) <= EPS_POLE):
        raise PoleProximity("point within pole tolerance of the projection pole")
    q = p @ rotation_to_north(pole).T
    return q[..., :3] / (1.0 - q[..., 3:4])


def inverse_stereographic(s, pole=NORTH3):
    s = np.asarray(s, dtype=float)
    pole = as_point(pole, 3)
    r2 = np.sum(s * s, axis=-1, keepdims=True)
    q = np.concatenate([2.0 * s, r2 - 1.0], axis=-1) / (r2 + 1.0)
    return q @ rotation_to_north(pole)


def sample_sphere(n: int, dim: int, seed: int = 0):
    """Deterministic quasi-uniform points on S^dim, shape ``(n, dim + 1)``.

    A scrambled Halton sequence is pushed through the Gaussian inverse CDF and
    normalized, which is rotation-invariant in distribution.
    """
    if n < 1:
        raise DegenerateInput("need at least one sample")
    if dim not in (2, 3):
        raise DegenerateInput("only S^2 and S^3 are supported")
    u = qmc.Halton(d=dim + 1, scramble=True, seed=seed).random(n)
    g = ndtri(np.clip(u, 1e-12, 1.0 - 1e-12))
    return normalize(g)


def complex_pair(x):
    """View S^3 points as complex pairs ``(z1, z2)``."""
    x = np.asarray(x, dtype=float)
    return x[..., 0] + 1j * x[..., 1], x[..., 2] + 1j * x[..., 3]


def from_complex(z1, z2):
    z1 = np.asarray(z1, dtype=complex)
    z2 = np.asarray(z2, dtype=complex)
    return np.stack([z1.real, z1.imag, z2.real, z2.imag], axis=-1)
