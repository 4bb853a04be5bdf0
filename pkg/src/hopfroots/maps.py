"""Evaluable descriptors for the maps between S^3, RP^3, S^2 and RP^2.

A :class:`MapDescriptor` is a composition chain of :class:`Generator` objects,
stored outermost first, so ``compose(hopf, power(3))`` is ``h o a_3``.

Evaluation works on representatives. ``lift_eval`` pushes sphere
representatives through the chain without ever canonicalizing, which keeps
it continuous and differentiable. ``eval`` canonicalizes the result when the
target is a projective space. Every generator formula is well defined on
antipodal classes where the space tags say so; ``verify_well_defined``
checks this numerically.
"""

from __future__ import annotations

import ast
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateInput, DomainMismatch, NonSmoothPoint, ParityError
from .geometry import canonical_rep, normalize, sample_sphere, tangent_basis

SPACES = {"S3": 3, "RP3": 3, "S2": 2, "RP2": 2}
PROJECTIVE = {"RP3", "RP2"}

# base points: y0 = h(1, 0), its antipode h(0, 1), and the value of null maps
Y0 = np.array([0.0, 0.0, 1.0])
Y0_NEG = -Y0
Y_NULL = np.array([1.0, 0.0, 0.0])

FD_STEP = 1e-6
SMOOTH_TOL = 1e-9


# --- generator formulas --------------------------------------------------
# All formulas act on stacks of shape (N, d_in) and return (N, d_out);
# Jacobians return (N, d_out, d_in) for the ambient extension of the formula.


def _hopf(X):
    x1, x2, x3, x4 = X.T
    return np.stack(
        [2 * (x1 * x3 + x2 * x4), 2 * (x2 * x3 - x1 * x4), x1**2 + x2**2 - x3**2 - x4**2],
        axis=1,
    )


def _hopf_jac(X):
    x1, x2, x3, x4 = X.T
    rows = [
        [2 * x3, 2 * x4, 2 * x1, 2 * x2],
        [-2 * x4, 2 * x3, 2 * x2, -2 * x1],
        [2 * x1, 2 * x2, -2 * x3, -2 * x4],
    ]
    return np.stack([np.stack(r, axis=1) for r in rows], axis=1)


def _power_raw(X, k):
    z1 = X[:, 0] + 1j * X[:, 1]
    if k > 0:
        w = z1**k
    elif k < 0:
        w = np.conj(z1) ** (-k)
    else:
        w = np.ones_like(z1)
    return np.stack([w.real, w.imag, X[:, 2], X[:, 3]], axis=1)


def _power(X, k):
    return normalize(_power_raw(X, k))


def _power_jac(X, k):
    n = X.shape[0]
    z1 = X[:, 0] + 1j * X[:, 1]
    Ju = np.zeros((n, 4, 4))
    if k != 0:
        m = abs(k)
        c = m * (z1 if k > 0 else np.conj(z1)) ** (m - 1)
        block = np.stack(
            [np.stack([c.real, -c.imag], axis=1), np.stack([c.imag, c.real], axis=1)], axis=1
        )
        if k < 0:
            block[:, :, 1] *= -1.0
        Ju[:, :2, :2] = block
    Ju[:, 2, 2] = 1.0
    Ju[:, 3, 3] = 1.0
    u = _power_raw(X, k)
    nu = np.linalg.norm(u, axis=1)
    a = u / nu[:, None]
    P = np.eye(4)[None] - a[:, :, None] * a[:, None, :]
    return P @ Ju / nu[:, None, None]


def _collapse(X):
    X = np.where(X[:, 3:4] < 0, -X, X)
    xp = X[:, :3]
    r = np.linalg.norm(xp, axis=1)
    # sin(pi r) x'/r written with sinc so r = 0 needs no special case
    return np.concatenate([np.pi * np.sinc(r)[:, None] * xp, np.cos(np.pi * r)[:, None]], axis=1)


def _collapse_nonsmooth(X):
    r = np.linalg.norm(X[:, :3], axis=1)
    return (r < SMOOTH_TOL) | (np.abs(r - 1.0) < SMOOTH_TOL)


def _qsquare(X):
    a = X[:, :1]
    v = X[:, 1:]
    return np.concatenate([a**2 - np.sum(v * v, axis=1, keepdims=True), 2 * a * v], axis=1)


def _qsquare_jac(X):
    n = X.shape[0]
    a = X[:, 0]
    v = X[:, 1:]
    J = np.zeros((n, 4, 4))
    J[:, 0, 0] = 2 * a
    J[:, 0, 1:] = -2 * v
    J[:, 1:, 0] = 2 * v
    J[:, 1:, 1:] = 2 * a[:, None, None] * np.eye(3)[None]
    return J


def _plane_rotation(i, j, theta, d=4):
    R = np.eye(d)
    c, s = np.cos(theta), np.sin(theta)
    R[i, i] = c
    R[j, j] = c
    R[i, j] = -s
    R[j, i] = s
    return R


def _linear(M):
    def fn(X):
        return X @ M.T

    def jac(X):
        return np.broadcast_to(M, (X.shape[0],) + M.shape)

    return fn, jac


# --- generators ------------------------------------------------------------


@dataclass(frozen=True)
class Generator:
    """One named map with parameters; the building block of descriptors."""

    name: str
    params: tuple = ()
    domain: str = field(init=False)
    target: str = field(init=False)

    def __post_init__(self):
        if self.name not in _TAGS:
            raise DegenerateInput(f"unknown generator {self.name!r}")
        domain, target = _TAGS[self.name]
        if self.name == "const":
            domain = self.params[0]
            if domain not in SPACES:
                raise DegenerateInput(f"unknown space tag {domain!r}")
            value = np.asarray(self.params[1:], dtype=float)
            if value.size not in (3, 4) or np.linalg.norm(value) == 0:
                raise DegenerateInput("constant value must be a nonzero 3- or 4-vector")
            target = "S2" if value.size == 3 else "S3"
        elif self.name in ("power", "power_rp"):
            if len(self.params) != 1 or int(self.params[0]) != self.params[0]:
                raise DegenerateInput(f"{self.name} takes one integer exponent")
            if self.name == "power_rp" and self.params[0] % 2 == 0:
                raise ParityError("the induced power map on RP^3 needs an odd exponent")
        elif self.name == "rotate":
            i, j, _ = self.params
            if not (0 <= i < 4 and 0 <= j < 4 and i != j):
                raise DegenerateInput("rotate needs two distinct coordinate indices in 0..3")
        object.__setattr__(self, "domain", domain)
        object.__setattr__(self, "target", target)

    @property
    def expr(self) -> str:
        if not self.params:
            return self.name
        return f"{self.name}({', '.join(str(p) for p in self.params)})"

    def __repr__(self):
        return f"Generator({self.expr})"

    def apply(self, X):
        name, p = self.name, self.params
        if name in ("hopf", "hprime"):
            return _hopf(X)
        if name in ("power", "power_rp"):
            return _power(X, int(p[0]))
        if name in ("cover3", "cover2", "identity"):
            return X
        if name == "collapse3":
            return _collapse(X)
        if name == "const":
            value = normalize(np.asarray(p[1:], dtype=float))
            return np.broadcast_to(value, (X.shape[0], value.size)).copy()
        if name == "qsquare":
            return _qsquare(X)
        return _linear(self._matrix())[0](X)

    def jacobian(self, X):
        """Ambient Jacobian stack, or ``None`` when only finite differences exist."""
        name, p = self.name, self.params
        if name in ("hopf", "hprime"):
            return _hopf_jac(X)
        if name in ("power", "power_rp"):
            return _power_jac(X, int(p[0]))
        if name in ("cover3", "cover2", "identity"):
            return np.broadcast_to(np.eye(X.shape[1]), (X.shape[0], X.shape[1], X.shape[1]))
        if name == "collapse3":
            return None
        if name == "const":
            return np.zeros((X.shape[0], len(p) - 1, X.shape[1]))
        if name == "qsquare":
            return _qsquare_jac(X)
        return _linear(self._matrix())[1](X)

    def nonsmooth(self, X):
        if self.name == "collapse3":
            return _collapse_nonsmooth(X)
        if self.name in ("power", "power_rp") and self.params[0] <= 0:
            return np.hypot(X[:, 0], X[:, 1]) < SMOOTH_TOL
        return np.zeros(X.shape[0], dtype=bool)

    def _matrix(self):
        if self.name == "antipodal":
            return -np.eye(4)
        if self.name == "reflect":
            return np.diag([1.0, -1.0, 1.0, 1.0])
        i, j, theta = self.params
        return _plane_rotation(int(i), int(j), float(theta))


_TAGS = {
    "hopf": ("S3", "S2"),
    "hprime": ("RP3", "S2"),
    "power": ("S3", "S3"),
    "power_rp": ("RP3", "RP3"),
    "cover3": ("S3", "RP3"),
    "cover2": ("S2", "RP2"),
    "collapse3": ("RP3", "S3"),
    "const": (None, None),
    "identity": ("S3", "S3"),
    "antipodal": ("S3", "S3"),
    "reflect": ("S3", "S3"),
    "rotate": ("S3", "S3"),
    "qsquare": ("S3", "S3"),
}


# --- descriptors -------------------------------------------------------------


@dataclass(frozen=True)
class MapDescriptor:
    """Composition ``chain[0] o chain[1] o ... o chain[-1]``."""

    chain: tuple

    def __post_init__(self):
        if not self.chain:
            raise DegenerateInput("empty composition")
        for outer, inner in zip(self.chain, self.chain[1:]):
            if outer.domain != inner.target:
                raise DomainMismatch(
                    f"cannot compose {outer.expr} ({outer.domain}->{outer.target}) after "
                    f"{inner.expr} ({inner.domain}->{inner.target})"
                )

    @property
    def domain(self) -> str:
        return self.chain[-1].domain

    @property
    def target(self) -> str:
        return self.chain[0].target

    @property
    def expr(self) -> str:
        if len(self.chain) == 1:
            return self.chain[0].expr
        return f"compose({', '.join(g.expr for g in self.chain)})"

    def __repr__(self):
        return f"MapDescriptor({self.expr})"

    def __str__(self):
        return self.expr

    def __matmul__(self, other: "MapDescriptor") -> "MapDescriptor":
        return MapDescriptor(self.chain + other.chain)

    @property
    def has_analytic_jacobian(self) -> bool:
        return all(g.name != "collapse3" for g in self.chain)

    def lift(self) -> "MapDescriptor":
        """``f o p3`` for an RP^3 domain, otherwise ``f`` itself."""
        if self.domain == "RP3":
            return self @ MapDescriptor((Generator("cover3"),))
        return self

    def lift_eval(self, X):
        """Evaluate on sphere representatives without canonicalizing."""
        X = np.asarray(X, dtype=float)
        single = X.ndim == 1
        Y = np.atleast_2d(X)
        for g in reversed(self.chain):
            Y = g.apply(Y)
        return Y[0] if single else Y

    def eval(self, p):
        p = np.asarray(p, dtype=float)
        d = SPACES[self.domain] + 1
        if p.shape[-1] != d:
            raise DomainMismatch(f"{self.expr} expects points of {self.domain}")
        y = self.lift_eval(normalize(p))
        if self.target in PROJECTIVE:
            return canonical_rep(y)
        return normalize(y)

    __call__ = eval

    def ambient_jacobian(self, X):
        """Chain-rule ambient Jacobians ``(N, d_out, d_in)``, or ``None``."""
        if not self.has_analytic_jacobian:
            return None
        X = np.atleast_2d(np.asarray(X, dtype=float))
        J = None
        Y = X
        for g in reversed(self.chain):
            Jg = g.jacobian(Y)
            J = Jg if J is None else Jg @ J
            Y = g.apply(Y)
        return J

    def nonsmooth(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        bad = np.zeros(X.shape[0], dtype=bool)
        Y = X
        for g in reversed(self.chain):
            bad |= g.nonsmooth(Y)
            Y = g.apply(Y)
        return bad


def compose(*maps) -> MapDescriptor:
    """Compose descriptors or generators, outermost first."""
    chain = []
    for m in maps:
        if isinstance(m, Generator):
            chain.append(m)
        elif isinstance(m, MapDescriptor):
            chain.extend(m.chain)
        else:
            raise TypeError(f"cannot compose {type(m).__name__}")
    return MapDescriptor(tuple(chain))


def gen(name: str, *params) -> MapDescriptor:
    return MapDescriptor((Generator(name, tuple(params)),))


HOPF = gen("hopf")
HPRIME = gen("hprime")
COVER3 = gen("cover3")
COVER2 = gen("cover2")
COLLAPSE3 = gen("collapse3")
IDENTITY = gen("identity")
ANTIPODAL = gen("antipodal")
REFLECT = gen("reflect")
QSQUARE = gen("qsquare")


def power(k: int) -> MapDescriptor:
    return gen("power", int(k))


def power_rp(k: int) -> MapDescriptor:
    return gen("power_rp", int(k))


def const(domain: str, value) -> MapDescriptor:
    return gen("const", domain, *(float(v) for v in np.asarray(value, dtype=float)))


def rotate(i: int, j: int, theta: float) -> MapDescriptor:
    return gen("rotate", int(i), int(j), float(theta))


# rotation used to move the collapse point of q3 off S1 and S2 for RP^2 targets
SKELETON_SHIFT = rotate(1, 3, np.pi / 4)


def build_class_map(target: str, domain: str, n: int) -> MapDescriptor:
    """Minimal representative of homotopy class ``n`` for ``domain -> target``.

    S^3 domain: ``h o a_n``. RP^3 domain: ``h' o a'_n`` for odd n and
    ``(h o a_m) o q3`` for n = 2m. The null class is a constant map at a
    point other than +-y0. RP^2 targets post-compose with ``p2``. For an RP^3
    domain, even n and an RP^2 target, the collapse point of q3 (which lies
    on S2 = h^-1(-y0)) is first rotated off S1 and S2 so that both lifts of
    the base point have circles as preimages.
    """
    if target not in ("S2", "RP2") or domain not in ("S3", "RP3"):
        raise DegenerateInput(f"no class maps {domain}->{target}")
    n = int(n)
    if n == 0:
        f = const(domain, Y_NULL)
    elif domain == "S3":
        f = HOPF if n == 1 else HOPF @ power(n)
    elif n % 2:
        f = HPRIME if n == 1 else HPRIME @ power_rp(n)
    else:
        m = n // 2
        outer = HOPF if m == 1 else HOPF @ power(m)
        if target == "RP2":
            outer = outer @ SKELETON_SHIFT
        f = outer @ COLLAPSE3
    if target == "RP2":
        f = COVER2 @ f
    return f


# --- differentials -----------------------------------------------------------


def tangent_derivative(f: MapDescriptor, X, E, method: str = "auto"):
    """Ambient derivatives of ``f.lift_eval`` at ``X`` along the columns of ``E``.

    ``X`` has shape ``(N, d)`` and ``E`` shape ``(N, d, k)`` with tangent
    columns; the result has shape ``(N, d_out, k)``.
    """
    if method == "auto":
        method = "analytic" if f.has_analytic_jacobian else "fd"
    if method == "analytic":
        Ja = f.ambient_jacobian(X)
        if Ja is None:
            raise DegenerateInput(f"no analytic Jacobian for {f.expr}")
        return Ja @ E
    if method != "fd":
        raise DegenerateInput(f"unknown differentiation method {method!r}")
    Y = f.lift_eval(X) if f.target in PROJECTIVE else None
    cols = []
    for k in range(E.shape[2]):
        e = E[:, :, k]
        Yp = f.lift_eval(normalize(X + FD_STEP * e))
        Ym = f.lift_eval(normalize(X - FD_STEP * e))
        if Y is not None:
            Yp *= np.sign(np.sum(Yp * Y, axis=1, keepdims=True))
            Ym *= np.sign(np.sum(Ym * Y, axis=1, keepdims=True))
        cols.append((Yp - Ym) / (2 * FD_STEP))
    return np.stack(cols, axis=2)


def frame_jacobians(f: MapDescriptor, X, method: str = "auto"):
    """Differentials of ``f`` at sphere representatives ``X`` in tangent frames.

    Returns ``(J, Y, Ex, Ey)`` where ``J`` has shape ``(N, d_out - 1, d_in - 1)``
    expressed in ``Ex = tangent_basis(X)`` and ``Ey = tangent_basis(Y)`` with
    ``Y = f.lift_eval(X)``. The domain must be a 3-dimensional space and the
    evaluation never raises at non-smooth points; callers that care check
    ``f.nonsmooth`` themselves.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    Y = f.lift_eval(X)
    Ex = tangent_basis(X)
    Ey = tangent_basis(Y)
    dY = tangent_derivative(f, X, Ex, method)
    J = np.swapaxes(Ey, 1, 2) @ dY
    return J, Y, Ex, Ey


def differential(f: MapDescriptor, p, method: str = "fd"):
    """Matrix of ``df_p`` between the tangent frames at ``p`` and ``f(p)``.

    For projective domains and targets the frames are taken at the canonical
    representatives. Raises :class:`NonSmoothPoint` on the known non-smooth
    loci (the skeleton and centre of the collapse map, ``z1 = 0`` for
    non-positive powers).
    """
    p = normalize(np.asarray(p, dtype=float))
    if p.shape[-1] != SPACES[f.domain] + 1:
        raise DomainMismatch(f"{f.expr} expects points of {f.domain}")
    if f.domain in PROJECTIVE:
        p = canonical_rep(p)
    if f.nonsmooth(p)[0]:
        raise NonSmoothPoint(f"{f.expr} is not smooth at {p}")
    J, Y, _, _ = frame_jacobians(f, p, method=method)
    J = J[0]
    if f.target in PROJECTIVE and not np.allclose(canonical_rep(Y[0]), Y[0]):
        J = -J
    return J


# --- well-definedness ---------------------------------------------------------


@dataclass(frozen=True)
class WellDefinedReport:
    generator: str
    samples: int
    max_violation: float


def verify_well_defined(g, samples: int = 10_000, seed: int = 0) -> WellDefinedReport:
    """Check a quotient-level generator against its defining equivariance.

    ``hprime``: h(-p) = h(p); ``power_rp(k)``: a_k(-p) = -a_k(p);
    ``collapse3``: the value does not depend on the representative;
    ``cover2``: p2(-y) = p2(y).
    """
    if isinstance(g, str):
        g = parse_map(g)
    if isinstance(g, MapDescriptor):
        if len(g.chain) != 1:
            raise DegenerateInput("verify_well_defined takes a single generator")
        g = g.chain[0]
    if g.name == "cover2":
        Y = sample_sphere(samples, 2, seed)
        viol = np.linalg.norm(canonical_rep(Y) - canonical_rep(-Y), axis=1)
        return WellDefinedReport(g.expr, samples, float(viol.max()))
    X = sample_sphere(samples, 3, seed)
    if g.name == "hprime":
        viol = np.linalg.norm(g.apply(X) - g.apply(-X), axis=1)
    elif g.name == "power_rp":
        viol = np.linalg.norm(g.apply(-X) + g.apply(X), axis=1)
    elif g.name == "collapse3":
        viol = np.linalg.norm(g.apply(X) - g.apply(-X), axis=1)
    else:
        raise DegenerateInput(f"{g.expr} is not a quotient-level generator")
    return WellDefinedReport(g.expr, samples, float(viol.max()))


# --- expression language ----------------------------------------------------------

_NULLARY = {
    "hopf": HOPF,
    "hprime": HPRIME,
    "cover3": COVER3,
    "cover2": COVER2,
    "collapse3": COLLAPSE3,
    "identity": IDENTITY,
    "antipodal": ANTIPODAL,
    "reflect": REFLECT,
    "qsquare": QSQUARE,
}

GRAMMAR = """\
map-expr := name | name '(' args ')'
  hopf, hprime, cover3, cover2, collapse3, identity, antipodal, reflect, qsquare
  power(k)            a_k on S3 (k < 0 uses conj(z1)^|k|)
  power_rp(k)         a'_k on RP3, k odd
  const(D, y...)      constant map on space D (S3 or RP3) at y (3 or 4 coords)
  rotate(i, j, t)     rotation by angle t in the coordinate plane (i, j), 0-based;
                      t may use pi, * and /
  classmap(T, D, n)   minimal representative of class n for D -> T
  compose(e1, e2, ...) e1 o e2 o ...
"""


def _literal(node):
    if isinstance(node, ast.Name):
        return node.id
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float, str)):
        return node.value
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        v = _literal(node.operand)
        if isinstance(v, (int, float)):
            return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.BinOp) and isinstance(node.op, (ast.Div, ast.Mult)):
        a, b = _literal(node.left), _literal(node.right)
        a, b = (np.pi if v == "pi" else v for v in (a, b))
        if isinstance(a, (int, float)) and isinstance(b, (int, float)):
            return a / b if isinstance(node.op, ast.Div) else a * b
    raise DegenerateInput(f"unsupported literal {ast.dump(node)}")


def _number(v):
    if v == "pi":
        return np.pi
    if not isinstance(v, (int, float)):
        raise DegenerateInput(f"expected a number, got {v!r}")
    return v


def _build(node) -> MapDescriptor:
    if isinstance(node, ast.Name):
        if node.id not in _NULLARY:
            raise DegenerateInput(f"unknown map {node.id!r}")
        return _NULLARY[node.id]
    if not (isinstance(node, ast.Call) and isinstance(node.func, ast.Name)) or node.keywords:
        raise DegenerateInput("map expressions are names or calls with positional arguments")
    name = node.func.id
    if name == "compose":
        return compose(*(_build(a) for a in node.args))
    args = [_literal(a) for a in node.args]
    if name in ("power", "power_rp"):
        if len(args) != 1 or not isinstance(args[0], int):
            raise DegenerateInput(f"{name} takes one integer")
        return gen(name, args[0])
    if name == "const":
        return gen("const", str(args[0]), *(float(_number(a)) for a in args[1:]))
    if name == "rotate":
        if len(args) != 3:
            raise DegenerateInput("rotate takes (i, j, theta)")
        return rotate(int(args[0]), int(args[1]), float(_number(args[2])))
    if name == "classmap":
        if len(args) != 3:
            raise DegenerateInput("classmap takes (target, domain, n)")
        return build_class_map(str(args[0]), str(args[1]), int(args[2]))
    if name in _NULLARY and not args:
        return _NULLARY[name]
    raise DegenerateInput(f"unknown map {name!r}")


def parse_map(text: str) -> MapDescriptor:
    """Parse a map expression such as ``compose(hopf, power(3))``.

    The grammar is listed in :data:`GRAMMAR`; ``str(f)`` of any descriptor is
    a valid expression that parses back to an equal descriptor.
    """
    try:
        tree = ast.parse(text.strip(), mode="eval")
    except SyntaxError as exc:
        raise DegenerateInput(f"cannot parse map expression {text!r}: {exc.msg}") from None
    return _build(tree.body)
