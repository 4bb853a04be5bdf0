"""Check records, curve export and the end-to-end verification suites.

Records are written one per line as ``key=value`` pairs (strings containing
spaces or quotes are JSON-quoted) with a JSON mirror next to them, so runs can
be diffed and parsed alike.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from scipy.optimize import brentq
from scipy.spatial.transform import Rotation

from .degree import DegreeConfig, compute_degree, find_preimages
from .errors import CurvesNotSeparated, DegenerateInput, HopfRootsError, PoleProximity
from .geometry import complex_pair, from_complex, normalize, sample_sphere, stereographic
from .linking import hopf_report, linking_number
from .maps import (
    COLLAPSE3,
    COVER3,
    HOPF,
    HPRIME,
    IDENTITY,
    QSQUARE,
    Y0,
    build_class_map,
    power,
    rotate,
    verify_well_defined,
)
from .roots import minimal_root_demo, planarity_residual, root_set_report
from .tracer import TraceConfig, find_root_components, point_polyline_distance

CSV_HEADER = "component,idx,x1,x2,x3,x4,sx,sy,sz"
POLE_CLEARANCE = 1e-3
NORTH = np.array([0.0, 0.0, 0.0, 1.0])
EXPORT_POLES = (NORTH, -NORTH, np.full(4, 0.5))


# --- curve export ---------------------------------------------------------------


def _fmt(v: float) -> str:
    v = float(v)
    return "0" if v == 0.0 else f"{v:.12g}"


def export_curves(curves, path) -> Path:
    """Write curves as CSV with stereographic coordinates.

    The projection pole is (0, 0, 0, 1), or (0, 0, 0, -1) when some curve
    comes within ``POLE_CLEARANCE`` of it, or (1, 1, 1, 1)/2 when both are
    blocked (S2 passes through both). The pole used is stored in a
    ``.meta.json`` file next to the CSV. Components are separated by a blank
    line, which CSV readers skip.
    """
    curves = list(curves)
    if not curves:
        raise DegenerateInput("nothing to export")
    for pole in EXPORT_POLES:
        if min(point_polyline_distance(pole, c)[0] for c in curves) >= POLE_CLEARANCE:
            break
    else:
        raise PoleProximity("curves pass near every export pole")
    lines = [CSV_HEADER]
    for i, c in enumerate(curves):
        if i:
            lines.append("")  # blank line between component blocks
        S = stereographic(c.points, pole)
        for j, (x, s) in enumerate(zip(c.points, S)):
            lines.append(",".join([str(i), str(j), *map(_fmt, x), *map(_fmt, s)]))
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    meta = {"pole": [float(v) for v in pole], "components": len(curves), "rows": [len(c) for c in curves]}
    path.with_suffix(".meta.json").write_text(json.dumps(meta) + "\n", encoding="utf-8")
    return path


# --- records ---------------------------------------------------------------------


@dataclass
class Record:
    id: str
    criterion: int
    claim: str
    expected: str
    observed: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        parts = []
        for key, value in asdict(self).items():
            if key == "passed":
                key, value = "pass", "true" if value else "false"
            text = str(value)
            if text == "" or any(ch in text for ch in ' "=\n'):
                text = json.dumps(text, ensure_ascii=False)
            parts.append(f"{key}={text}")
        return " ".join(parts)


def parse_record_line(line: str) -> dict:
    """Inverse of :meth:`Record.line`."""
    out, i = {}, 0
    dec = json.JSONDecoder()
    while i < len(line):
        eq = line.index("=", i)
        key = line[i:eq]
        if line[eq + 1 : eq + 2] == '"':
            value, end = dec.raw_decode(line, eq + 1)
        else:
            end = line.find(" ", eq + 1)
            end = len(line) if end < 0 else end
            value = line[eq + 1 : end]
        out[key] = value
        i = end + 1
    return out


@dataclass
class RunConfig:
    seed: int = 0
    seeds: int = 200
    degree_seeds: int = 500
    step: float = 0.01
    out: str = "hopfroots-out"
    crosscheck: bool = True

    def __post_init__(self):
        if self.step <= 0 or self.seeds < 1 or self.degree_seeds < 1:
            raise DegenerateInput("step and seed counts must be positive")

    @property
    def trace(self) -> TraceConfig:
        return TraceConfig(step=self.step, seeds=self.seeds, seed=self.seed)

    @property
    def degree(self) -> DegreeConfig:
        return DegreeConfig(seeds=self.degree_seeds, seed=self.seed)

    @classmethod
    def from_file(cls, path, **overrides) -> "RunConfig":
        data = json.loads(Path(path).read_text())
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise DegenerateInput(f"unknown config keys {sorted(unknown)}")
        data.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**data)


@dataclass
class SuiteResult:
    suite: str
    records: list
    exports: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    @property
    def exit_status(self) -> int:
        return 0 if self.passed else 1

    def failures(self) -> list:
        return [r for r in self.records if not r.passed]


def write_summary(result: SuiteResult, out) -> tuple:
    out = Path(out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        txt = out / f"{result.suite}.txt"
        txt.write_text("".join(r.line() + "\n" for r in result.records), encoding="utf-8")
        js = out / f"{result.suite}.json"
        payload = {"suite": result.suite, "passed": result.passed, "records": [asdict(r) for r in result.records]}
        js.write_text(json.dumps(payload, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    except OSError as exc:
        raise IOError(f"cannot write reports to {out}: {exc}") from exc
    return txt, js


# --- independent oracles --------------------------------------------------------


def power_preimages(k: int, w):
    """Closed-form preimages of ``w`` under a_k, from k-th roots of z1^k = lam w1."""
    w1, w2 = complex_pair(normalize(np.asarray(w, float)))
    ratio = abs(w2) / abs(w1)
    m = abs(k)
    rho = brentq(lambda r: r * r + (r**m * ratio) ** 2 - 1.0, 0.0, 1.0, xtol=1e-15)
    lam = rho**m / abs(w1)
    arg = np.angle(w1) if k > 0 else -np.angle(w1)
    z1 = rho * np.exp(1j * (arg + 2 * np.pi * np.arange(m)) / m)
    z2 = np.full(m, lam * w2)
    return from_complex(z1, z2), np.full(m, int(np.sign(k)))


# --- checks -----------------------------------------------------------------------


def _guard(rec_id, criterion, claim, expected, fn):
    try:
        observed, ok, detail = fn()
    except HopfRootsError as exc:
        return Record(rec_id, criterion, claim, str(expected), "error", False, f"{type(exc).__name__}: {exc}")
    return Record(rec_id, criterion, claim, str(expected), str(observed), bool(ok), detail)


def degree_records(cfg: RunConfig, ks=range(-3, 4)):
    recs = []
    for k in ks:
        recs.append(_guard(f"deg_a{k}", 1, f"deg(a_{k})={k}", k, lambda k=k: _deg_check(power(k), cfg, k)))
    extra = [
        ("deg_identity", "deg(identity)=1", IDENTITY, 1, False),
        ("deg_q3_p3", "deg(q3∘p3)=2", COLLAPSE3 @ COVER3, 2, False),
        ("deg_q3", "|deg(q3)|=1", COLLAPSE3, 1, True),
    ]
    for rec_id, claim, f, want, absolute in extra:
        recs.append(_guard(rec_id, 1, claim, want, lambda f=f, w=want, a=absolute: _deg_check(f, cfg, w, a)))
    return recs


def _deg_check(f, cfg, want, absolute=False):
    d = compute_degree(f, cfg.degree)
    return d, (abs(d) if absolute else d) == want, ""


def hopf_records(cfg: RunConfig, ns=range(-2, 4)):
    recs = []
    for n in ns:
        f = build_class_map("S2", "S3", n)
        recs.append(_guard(f"hopf_h_a{n}", 2, f"hopf(h∘a_{n})={n}", n, lambda f=f, n=n: _hopf_check(f, n, cfg)))
    return recs


def _hopf_check(f, n, cfg, require_agreement=True):
    rep = hopf_report(f, cfg=cfg.trace, seed=cfg.seed, crosscheck=cfg.crosscheck)
    ok = rep.value == n and rep.max_residual < 0.2
    if require_agreement and cfg.crosscheck:
        ok = ok and rep.methods_agree
    detail = f"residual={rep.max_residual:.3g} agree={rep.methods_agree} attempts={rep.attempts}"
    return rep.value, ok, detail


def classification_records(cfg: RunConfig, ns=range(-2, 4)):
    recs = []
    for n in ns:
        f = build_class_map("S2", "RP3", n) @ COVER3
        recs.append(
            _guard(f"classify_{n}", 3, f"hopf(h'_{n}∘p3)={n}", n, lambda f=f, n=n: _hopf_check(f, n, cfg, False))
        )
    return recs


def _root_check(domain, target, n, cfg, exports, rec_id, lengths=False):
    chk = minimal_root_demo(domain, target, n, cfg.trace)
    rep = chk.report
    comps = rep.components
    matches = [c.match for c in comps if c.match is not None]
    ok = chk.passed
    # every component with a closed form must sit on it
    if domain == "S3" or (target == "S2"):
        ok = ok and len(matches) == len(comps) and all(m < 1e-6 for m in matches)
    if lengths:
        ok = ok and all(abs(c.length - 2 * np.pi) < 1e-4 for c in comps)
    if comps:
        exports.append((rec_id, rep.curves))
    parts = [f"components={rep.component_count}"]
    if matches:
        parts.append(f"max_match={max(matches):.3g}")
    if lengths and comps:
        parts.append(f"length={comps[0].length:.8f}")
    if chk.separation is not None:
        parts.append(f"separation={chk.separation:.4f}")
    return rep.component_count, ok, " ".join(parts)


def root_records(cfg: RunConfig, exports: list):
    recs = []
    for n in (1, 2, 3, -1):
        rid = f"roots_S3_S2_{n}"
        recs.append(
            _guard(rid, 4, f"minimal root set of class {n} in [S3,S2] is S1", 1,
                   lambda n=n, rid=rid: _root_check("S3", "S2", n, cfg, exports, rid, lengths=True))
        )
    for n in (1, 3, -1, 2):
        rid = f"roots_RP3_S2_{n}"
        shape = "the q3 circle" if n % 2 == 0 else "p3(S1)"
        recs.append(
            _guard(rid, 4, f"minimal root set of class {n} in [RP3,S2] is {shape}", 1,
                   lambda n=n, rid=rid: _root_check("RP3", "S2", n, cfg, exports, rid))
        )
    for domain in ("S3", "RP3"):
        for n in (1, 2):
            rid = f"roots_{domain}_RP2_{n}"
            recs.append(
                _guard(rid, 5, f"minimal root set of class {n} in [{domain},RP2] is two disjoint circles", 2,
                       lambda d=domain, n=n, rid=rid: _root_check(d, "RP2", n, cfg, exports, rid))
            )
    for domain in ("S3", "RP3"):
        for target in ("S2", "RP2"):
            rid = f"roots_{domain}_{target}_0"
            recs.append(
                _guard(rid, 6, f"null class in [{domain},{target}] is root free", 0,
                       lambda d=domain, t=target, rid=rid: _root_check(d, t, 0, cfg, exports, rid))
            )
    return recs


def loop_presence_maps(seed: int = 0):
    """Non-minimal maps in nontrivial classes, perturbed by seeded rotations."""
    rng = np.random.default_rng(seed)
    maps = []
    for make in (
        lambda R: HOPF @ power(1) @ R,
        lambda R: HOPF @ R @ power(2),
        lambda R: HOPF @ power(-1) @ R,
        lambda R: HOPF @ R @ power(3) @ R,
        lambda R: HOPF @ R @ QSQUARE,
        lambda R: HPRIME @ COVER3 @ R,
    ):
        i, j = sorted(rng.choice(4, size=2, replace=False))
        maps.append(make(rotate(int(i), int(j), float(rng.uniform(0.1, 1.2)))))
    return maps


def loop_records(cfg: RunConfig):
    recs = []
    for idx, f in enumerate(loop_presence_maps(cfg.seed)):
        def check(f=f):
            rep = root_set_report(f, Y0, cfg.trace)
            return rep.component_count, rep.closed_loop_present, f.expr
        recs.append(_guard(f"loops_{idx}", 7, "nontrivial class has a closed root loop", ">=1 closed", check))
    return recs


def equivariance_records(cfg: RunConfig, samples: int = 10_000):
    X = sample_sphere(samples, 3, cfg.seed + 3)
    a3 = power(3)
    values = {
        "equiv_h_even": ("h(-p)=h(p)", np.abs(HOPF(-X) - HOPF(X)).max()),
        "equiv_a3_odd": ("a_3(-p)=-a_3(p)", np.abs(a3(-X) + a3(X)).max()),
        "equiv_hprime_lift": ("h'(p3(x))=h(x)", np.abs((HPRIME @ COVER3)(X) - HOPF(X)).max()),
    }
    recs = [Record(rid, 8, claim, "<1e-12", f"{v:.3g}", bool(v < 1e-12)) for rid, (claim, v) in values.items()]
    for name, g in (("hprime", HPRIME), ("collapse3", COLLAPSE3)):
        rep = verify_well_defined(g, samples, cfg.seed)
        recs.append(Record(f"welldef_{name}", 8, f"{name} is constant on antipodal pairs", "<1e-12",
                           f"{rep.max_violation:.3g}", bool(rep.max_violation < 1e-12)))
    return recs


def fiber_records(cfg: RunConfig, count: int = 20):
    ys = Rotation.random(count, random_state=cfg.seed + 5).apply(Y0)
    fibers = []
    for y in ys:
        comps = find_root_components(HOPF, y, cfg.trace)
        fibers.append(comps[0] if len(comps) == 1 else None)
    planar = [planarity_residual(c) for c in fibers if c is not None]
    ok = all(c is not None for c in fibers) and max(planar) < 1e-8
    recs = [Record("fiber_planarity", 9, "fibers of h are great circles", "<1e-8",
                   f"{max(planar):.3g}" if planar else "none", bool(ok), f"fibers={len(planar)}/{count}")]
    # pairs closer than the linking precondition allows are redrawn
    links, skipped, k = [], 0, 0
    while len(links) < count and k < 5 * count:
        a, b = Rotation.random(2, random_state=cfg.seed + 1000 + k).apply(Y0)
        k += 1
        fa, fb = find_root_components(HOPF, a, cfg.trace), find_root_components(HOPF, b, cfg.trace)
        try:
            links.append(linking_number(fa[0], fb[0], "gauss", cfg.seed).value)
        except CurvesNotSeparated:
            skipped += 1
        except (HopfRootsError, IndexError):
            links.append(None)
    want = hopf_report(HOPF, cfg=cfg.trace, seed=cfg.seed, crosscheck=False).value
    ok = len(links) == count and all(v == want for v in links)
    recs.append(Record("fiber_linking", 9, "distinct fibers of h link once", f"all {want}",
                       ",".join(str(v) for v in links), ok, f"pairs={len(links)} redrawn={skipped}"))
    return recs


def oracle_records(cfg: RunConfig, ks=(-3, -2, -1, 1, 2, 3), count: int = 5):
    recs = []
    ws = sample_sphere(count, 3, cfg.seed + 7)
    for k in ks:
        def check(k=k):
            worst, signs_ok = 0.0, True
            for w in ws:
                pre = find_preimages(power(k), w, cfg.degree)
                ref, ref_signs = power_preimages(k, w)
                if len(pre) != len(ref):
                    return f"count {len(pre)} vs {len(ref)}", False, ""
                D = np.linalg.norm(pre.points[:, None, :] - ref[None, :, :], axis=2)
                match = D.argmin(axis=1)
                if len(set(match)) != len(ref):
                    return "unmatched", False, ""
                worst = max(worst, float(D.min(axis=1).max()))
                signs_ok &= bool(np.all(pre.signs == ref_signs[match]))
            return f"{worst:.3g}", worst < 1e-8 and signs_ok, f"signs_ok={signs_ok}"
        recs.append(_guard(f"oracle_a{k}", 10, f"preimages of a_{k} match k-th roots", "<1e-8", check))
    return recs


def class_records(cfg: RunConfig, ns=(0, 1, 2), exports=None):
    """Quick-suite class checks: Hopf invariant of h∘a_n and its minimal root set."""
    exports = [] if exports is None else exports
    recs = []
    for n in ns:
        def check(n=n):
            value, ok, detail = _hopf_check(build_class_map("S2", "S3", n), n, cfg)
            count, roots_ok, rdetail = _root_check("S3", "S2", n, cfg, exports, f"class_{n}")
            return value, ok and roots_ok, f"{detail} {rdetail}"
        recs.append(_guard(f"class_{n}", 0, f"hopf(h∘a_{n})={n} with minimal root set", n, check))
    return recs


def run_suite(suite: str = "quick", cfg: RunConfig = RunConfig(), write: bool = True) -> SuiteResult:
    """Run a verification suite; ``paper`` covers every acceptance criterion."""
    exports: list = []
    if suite == "quick":
        records = class_records(cfg, exports=exports)
    elif suite == "paper":
        records = (
            degree_records(cfg)
            + hopf_records(cfg)
            + classification_records(cfg)
            + root_records(cfg, exports)
            + loop_records(cfg)
            + equivariance_records(cfg)
            + fiber_records(cfg)
            + oracle_records(cfg)
        )
    else:
        raise DegenerateInput(f"unknown suite {suite!r}; use 'paper' or 'quick'")
    result = SuiteResult(suite, records)
    if write:
        write_summary(result, cfg.out)
        for rid, curves in exports:
            try:
                result.exports.append(export_curves(curves, Path(cfg.out) / "curves" / f"{rid}.csv"))
            except OSError as exc:
                raise IOError(f"cannot write curve export for {rid}: {exc}") from exc
    return result
