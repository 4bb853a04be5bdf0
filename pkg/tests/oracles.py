"""Closed-form reference values used by the tests, independent of the package code."""

import numpy as np


def poly_preimages(k, w):
    """Preimages of w under a_k from polynomial roots only.

    With t = |z1|^2 the norm condition reads r^2 t^m + t - 1 = 0 (r = |w2|/|w1|),
    and z1 solves z^m = lam w1 (conjugated for k < 0).
    """
    w = np.asarray(w, float) / np.linalg.norm(w)
    w1, w2 = complex(w[0], w[1]), complex(w[2], w[3])
    m = abs(k)
    r = abs(w2) / abs(w1)
    coeffs = np.zeros(m + 1)
    coeffs[0] = r * r
    coeffs[-2] += 1.0
    coeffs[-1] = -1.0
    t = [z.real for z in np.roots(coeffs) if abs(z.imag) < 1e-12 and 0 < z.real <= 1][0]
    rho = np.sqrt(t)
    lam = rho**m / abs(w1)
    rhs = lam * (w1 if k > 0 else np.conj(w1))
    poly = np.zeros(m + 1, dtype=complex)
    poly[0], poly[-1] = 1.0, -rhs
    z1 = np.roots(poly)
    z2 = lam * w2
    return np.array([[z.real, z.imag, z2.real, z2.imag] for z in z1])


def s1_distance(P):
    """Distance to S1 = {x3 = x4 = 0, |x| = 1}."""
    return np.hypot(np.hypot(P[:, 2], P[:, 3]), np.hypot(P[:, 0], P[:, 1]) - 1)


def s2_distance(P):
    """Distance to S2 = {x1 = x2 = 0, |x| = 1}."""
    return np.hypot(np.hypot(P[:, 0], P[:, 1]), np.hypot(P[:, 2], P[:, 3]) - 1)


def q3_circle_distance(P):
    """Distance to {|x'| = 1/2, x3 = 0, x4 = sqrt(3)/2}, up to sign of the representative."""

    def d(Q):
        return np.sqrt(Q[:, 2] ** 2 + (Q[:, 3] - np.sqrt(3) / 2) ** 2 + (np.hypot(Q[:, 0], Q[:, 1]) - 0.5) ** 2)

    return np.minimum(d(P), d(-P))


def analytic_fiber(y, n=4000):
    """Fiber of h over y = (sin a e^{i phi}, cos a): (cos(a/2) e^{i(t + phi)}, sin(a/2) e^{it})."""
    a = np.arccos(np.clip(y[2], -1, 1))
    phi = np.arctan2(y[1], y[0])
    t = np.linspace(0, 2 * np.pi, n, endpoint=False)
    z1 = np.cos(a / 2) * np.exp(1j * (t + phi))
    z2 = np.sin(a / 2) * np.exp(1j * t)
    return np.stack([z1.real, z1.imag, z2.real, z2.imag], axis=1)
