"""Batch verification driver.

Usage::

    python -m damek_ricci validate --spec m3_d1.toml
    python -m damek_ricci curvature-table --m 3 --n 4 --radii 0.5,1,2 --format csv

A space spec is a TOML file::

    m = 3
    modules = [{type = "d1", mult = 1}, {type = "d2", mult = 1}]
    seed = 7              # optional, --seed wins
    [tol]                 # optional, command line flags win
    exact = 1e-9
    fd = 1e-5

or ``generators = [[[...]]]`` with ``m`` explicit ``n x n`` matrices instead of
``modules``.  Exit status is 0 when every check passes, 1 on a violation and 2
on configuration or IO errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass
from importlib import metadata

import numpy as np

from . import clifford_algebra as ca
from . import focal, geodesic, isoparametric as iso
from .errors import ConfigError, DamekRicciError
from .model import AffinePoint, distance, random_point, sample_points

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

COMMANDS = ("validate", "verify-iso", "geodesic", "j2-scan", "curvature-table", "focal-check")
DEFAULT_TOL_EXACT = {"validate": ca.ALGEBRAIC_TOL}


@dataclass
class RunConfig:
    command: str
    spec: ca.CliffordSpec | None
    spec_path: str | None
    seed: int = 0
    samples: int = 100
    tol_exact: float = 1e-9
    tol_fd: float = 1e-5
    out: str | None = None
    fmt: str = "json"
    grid: int = 500
    radii: tuple = (0.1, 0.5, 1.0, 2.0, 5.0)
    mn: tuple | None = None

    def __post_init__(self):
        if not (self.tol_exact > 0 and self.tol_fd > 0):
            raise ConfigError("tolerances must be positive")
        if self.samples < 1 or self.grid < 1:
            raise ConfigError("sample counts must be at least 1")
        if self.fmt not in ("json", "csv"):
            raise ConfigError(f"unknown format {self.fmt!r}")

    def rng(self):
        return np.random.default_rng(self.seed)


def load_spec(path: str) -> tuple[ca.CliffordSpec, dict]:
    """Read a TOML space spec; returns the spec and the raw table."""
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return spec_from_table(raw), raw


def spec_from_table(raw: dict) -> ca.CliffordSpec:
    if "m" not in raw:
        raise ConfigError("spec needs the key 'm'")
    m = raw["m"]
    if not isinstance(m, int) or isinstance(m, bool):
        raise ConfigError("'m' must be an integer")
    try:
        if "generators" in raw:
            if "modules" in raw:
                raise ConfigError("give either 'modules' or 'generators'")
            return ca.CliffordSpec(m, generators=np.asarray(raw["generators"], dtype=float))
        mods = raw.get("modules")
        if not mods:
            raise ConfigError("spec needs 'modules' or 'generators'")
        pairs = []
        for entry in mods:
            if not isinstance(entry, dict) or "type" not in entry:
                raise ConfigError("each module needs a 'type'")
            pairs.append((entry["type"], int(entry.get("mult", 1))))
        return ca.CliffordSpec(m, tuple(pairs))
    except (DamekRicciError, ValueError, TypeError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc


def default_spec(m: int) -> ca.CliffordSpec:
    return ca.CliffordSpec.from_tags(m, ("d1" if m % 4 == 3 else "d", 1))


def spec_meta(spec: ca.CliffordSpec | None, path: str | None, mn=None) -> dict:
    if spec is None:
        return {"path": path, "m": mn[0] if mn else None, "n": mn[1] if mn else None}
    out = {"path": path, "m": spec.m, "n": spec.n}
    if spec.explicit:
        out["generators"] = "explicit"
    else:
        out["modules"] = [{"type": t, "mult": k} for t, k in spec.modules]
    return out


def versions() -> dict:
    out = {"numpy": np.__version__}
    for name in ("scipy", "artifact"):
        try:
            out[name] = metadata.version(name)
        except metadata.PackageNotFoundError:
            out[name] = None
    return out


def _clean(x):
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else repr(x)
    return x


def render(report: dict, fmt: str) -> str:
    report = _clean(report)
    if fmt == "json":
        return json.dumps(report, indent=2, sort_keys=True) + "\n"
    rows = report["results"]
    lead = ["name", "max_residual", "mean_residual", "pass"]
    rest = sorted({k for r in rows for k in r} - set(lead))
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=lead + rest, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: json.dumps(v) if isinstance(v, (list, dict)) else v for k, v in r.items()})
    return buf.getvalue()


def emit_report(report: dict, fmt: str = "json", path: str | None = None) -> str:
    """Serialize ``report`` and write it atomically to ``path`` (stdout when None or ``-``)."""
    text = render(report, fmt)
    if path in (None, "-"):
        sys.stdout.write(text)
        return text
    folder = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=folder, prefix=".report-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return text


def _record(name, residuals, tol, **extra):
    r = np.atleast_1d(np.asarray(residuals, dtype=float))
    worst = float(np.max(r)) if r.size else 0.0
    out = {"name": name, "max_residual": worst, "mean_residual": float(np.mean(r)) if r.size else 0.0,
           "pass": bool(worst <= tol), "tol": tol}
    out.update(extra)
    return out


def _algebra(cfg: RunConfig):
    if cfg.spec is None:
        raise ConfigError(f"{cfg.command} needs --spec or --m")
    return ca.build_algebra(cfg.spec)


def run_validate(cfg: RunConfig) -> list[dict]:
    alg = _algebra(cfg)
    rep = ca.validate_clifford(alg, samples=cfg.samples, rng=cfg.rng(), tol=cfg.tol_exact)
    return [_record(name, val, cfg.tol_exact, samples=cfg.samples) for name, val in rep.residuals.items()]


def run_verify_iso(cfg: RunConfig) -> list[dict]:
    alg = _algebra(cfg)
    rng = cfg.rng()
    pts = sample_points(alg, cfg.samples, rng)
    fns = []
    for t0 in (-2.0, -1.0, 0.0, 1.0):
        x0 = AffinePoint(0.5 * rng.standard_normal(alg.n), 0.5 * rng.standard_normal(alg.m), t0)
        fns.append((f"D[t0={t0:g}]", iso.DistortedDistance(alg, x0)))
    for I in ((0,), tuple(range(0, alg.n, 2)), tuple(range(alg.n))):
        fns.append((f"F[I={','.join(map(str, I))}]", iso.SubsetF(alg, I)))
    v = ca.random_unit(rng, (alg.n,)) * 0.6
    fns.append(("Dstar", iso.DStar(alg, random_point(alg, rng), v, 0.8)))
    out = []
    for label, fn in fns:
        rep = iso.verify_isoparametric(fn, pts, tol_fd=cfg.tol_fd, tol_exact=cfg.tol_exact)
        for rec in rep.records(seed=cfg.seed):
            rec["name"] = rec["name"].replace(rep.function, label, 1)
            rec["function"] = label
            rec["tol"] = cfg.tol_exact if rec["identity"].startswith("grad") else cfg.tol_fd
            out.append(rec)
    return out


def run_geodesic(cfg: RunConfig) -> list[dict]:
    alg = _algebra(cfg)
    rng = cfg.rng()
    speed, conic, split = [], [], []
    for _ in range(cfg.samples):
        xi = geodesic.TangentVec.from_array(ca.random_unit(rng, (alg.n + alg.m + 1,)), alg.n)
        g = geodesic.geodesic_from(alg, xi, random_point(alg, rng))
        for _ in range(5):
            t1, t2 = rng.uniform(-3.0, 3.0, 2)
            speed.append(abs(distance(alg, g.point(t1), g.point(t2)) - abs(t1 - t2)))
        cls = geodesic.classify_conic(alg, xi)
        conic.append(cls.residual(geodesic.safe_theta_grid(xi)))
        at_inf = geodesic.point_at_infinity(alg, xi)
        unit_v = abs(np.linalg.norm(xi.v) - 1.0) <= geodesic.ZERO_TOL
        split.append(0.0 if (at_inf is geodesic.STAR) == unit_v else 1.0)
    return [_record("geodesic:unit_speed", speed, cfg.tol_exact, samples=len(speed)),
            _record("geodesic:conic_equations", conic, 1e-10, samples=len(conic)),
            _record("geodesic:infinity_case_split", split, 0.0, samples=len(split))]


def run_j2_scan(cfg: RunConfig) -> list[dict]:
    alg = _algebra(cfg)
    rng = cfg.rng()
    spec = cfg.spec
    grid = ca.j2_sample_grid(spec, cfg.grid, rng) if not spec.explicit else rng.standard_normal((cfg.grid, alg.n))
    flags = np.array([ca.j2_satisfied(alg, v)[0] for v in grid])
    rec = {"name": "j2:classification", "samples": len(grid), "satisfied": int(flags.sum()),
           "unsatisfied": int((~flags).sum())}
    if spec.explicit:
        rec.update(max_residual=0.0, mean_residual=0.0, mismatches=None, **{"pass": True})
    else:
        pred = np.array([ca.predict_j2_set(spec, v) for v in grid])
        mism = int(np.sum(pred != flags))
        rec.update(max_residual=float(mism), mean_residual=mism / len(grid), mismatches=mism,
                   **{"pass": mism == 0})
    return [rec]


def run_curvature_table(cfg: RunConfig) -> list[dict]:
    if cfg.mn is not None:
        m, n = cfg.mn
    elif cfg.spec is not None:
        m, n = cfg.spec.m, cfg.spec.n
    else:
        raise ConfigError("curvature-table needs --m and --n or --spec")
    alg = ca.DamekRicciAlgebra(np.zeros((m, n, n)))  # only dimensions enter the coefficients
    zero = (np.zeros(n), np.zeros(m))
    sphere = iso.DistortedDistance(alg, AffinePoint(*zero, 1.0))
    tube = iso.DistortedDistance(alg, AffinePoint(*zero, -1.0))
    out = []
    for r in cfg.radii:
        if r <= 0:
            raise ConfigError("radii must be positive")
        for kind, fn in (("Sphere", sphere), ("Horosphere", None), ("Tube", tube)):
            h = iso.mean_curvature(kind, r, m, n)
            check = h if fn is None else iso.mean_curvature_from_ab(fn, offset=iso.level_offset(fn, r))
            out.append(_record(f"{kind}:r={r:g}", abs(check - h), 1e-12, kind=kind, r=r, h=h))
    return out


def run_focal_check(cfg: RunConfig) -> list[dict]:
    alg = _algebra(cfg)
    rng = cfg.rng()
    memb, infinity, harmonic, roots, tg, dist = [], [], [], [], [], []
    for _ in range(cfg.samples):
        x0 = AffinePoint(0.5 * rng.standard_normal(alg.n), 0.5 * rng.standard_normal(alg.m), -1.0 - rng.uniform())
        F = focal.Fx0(alg, x0)
        memb.append(focal.membership_residual(F, focal.upsilon(F, focal.random_ball_point(F, rng))))
        Fe = focal.Fx0(alg, focal.focal_center_through_identity(alg, 0.7 * rng.standard_normal(alg.n)))
        xi = focal.sample_orthogonal_velocity(Fe, rng)
        infinity.append(geodesic.point_at_infinity(alg, xi).distance_to(Fe.x0))
        th = rng.uniform(0.1, 0.9)
        harmonic.append(abs(geodesic.cross_ratio(th, 1.0 / th, 1.0, -1.0) + 1.0))
        g = geodesic.geodesic_from(alg, xi)
        roots.append(abs(len(focal.focal_intersections(Fe, g, grid=cfg.grid)) - 1))
        V = F.x0.V + 0.5 * F.radius * ca.random_unit(rng, (alg.n,))
        test = focal.totally_geodesic_at(F, V, rng=rng)
        tg.append(0.0 if test.consistent() else 1.0)
    for _ in range(min(cfg.samples, 5)):
        x0 = AffinePoint(0.5 * rng.standard_normal(alg.n), 0.5 * rng.standard_normal(alg.m), -1.5)
        F = focal.Fx0(alg, x0)
        fn = F.function()
        x = random_point(alg, rng)
        dist.append(abs(focal.distance_to_focal(F, x, rng=rng) - iso.tube_radius(fn, fn(x))))
    return [_record("focal:upsilon_membership", memb, 1e-12),
            _record("focal:orthogonal_velocity_endpoint", infinity, 1e-10),
            _record("focal:harmonic_range", harmonic, 1e-12),
            _record("focal:unique_intersection", roots, 0.0),
            _record("focal:totally_geodesic_consistency", tg, 0.0),
            _record("focal:distance_vs_tube_radius", dist, 1e-6)]


RUNNERS = {"validate": run_validate, "verify-iso": run_verify_iso, "geodesic": run_geodesic,
           "j2-scan": run_j2_scan, "curvature-table": run_curvature_table, "focal-check": run_focal_check}
DEFAULT_SAMPLES = {"validate": 1000, "verify-iso": 100, "geodesic": 100, "j2-scan": 500,
                   "curvature-table": 1, "focal-check": 10}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="damek-ricci", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--spec", help="TOML space spec")
        s.add_argument("--m", type=int, help="center dimension (irreducible module when no --spec)")
        s.add_argument("--n", type=int, help="dimension of v (curvature-table only)")
        s.add_argument("--seed", type=int)
        s.add_argument("--samples", type=int)
        s.add_argument("--grid", type=int)
        s.add_argument("--radii", help="comma separated radii")
        s.add_argument("--tol-exact", type=float)
        s.add_argument("--tol-fd", type=float)
        s.add_argument("--out", help="report path (stdout when omitted)")
        s.add_argument("--format", dest="fmt", choices=("json", "csv"), default="json")
    return p


def make_config(args) -> RunConfig:
    raw = {}
    spec = None
    if args.spec:
        spec, raw = load_spec(args.spec)
    elif args.m is not None and args.command != "curvature-table":
        try:
            spec = default_spec(args.m)
        except DamekRicciError as exc:
            raise ConfigError(str(exc)) from exc
    tol = raw.get("tol", {})
    if not isinstance(tol, dict):
        tol = {"exact": tol}
    seed = args.seed if args.seed is not None else raw.get("seed", 0)
    if not isinstance(seed, int) or seed < 0:
        raise ConfigError("seed must be a non-negative integer")
    tol_exact = args.tol_exact if args.tol_exact is not None else tol.get(
        "exact", DEFAULT_TOL_EXACT.get(args.command, 1e-9))
    tol_fd = args.tol_fd if args.tol_fd is not None else tol.get("fd", 1e-5)
    mn = None
    if args.command == "curvature-table" and (args.m is not None or args.n is not None):
        if args.m is None or args.n is None:
            raise ConfigError("curvature-table needs both --m and --n")
        if args.m < 0 or args.n < 0:
            raise ConfigError("dimensions must be non-negative")
        mn = (args.m, args.n)
    radii = RunConfig.radii
    if args.radii:
        try:
            radii = tuple(float(r) for r in args.radii.split(","))
        except ValueError as exc:
            raise ConfigError(f"bad --radii: {args.radii}") from exc
    return RunConfig(command=args.command, spec=spec, spec_path=args.spec, seed=seed,
                     samples=args.samples if args.samples is not None else DEFAULT_SAMPLES[args.command],
                     tol_exact=float(tol_exact), tol_fd=float(tol_fd), out=args.out, fmt=args.fmt,
                     grid=args.grid if args.grid is not None else (500 if args.command == "j2-scan" else 1000),
                     radii=radii, mn=mn)


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        cfg = make_config(args)
        results = RUNNERS[cfg.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except DamekRicciError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    report = {"meta": {"command": cfg.command, "spec": spec_meta(cfg.spec, cfg.spec_path, cfg.mn),
                       "seed": cfg.seed, "versions": versions()},
              "results": results}
    try:
        emit_report(report, cfg.fmt, cfg.out)
    except OSError as exc:
        print(f"cannot write report: {exc}", file=sys.stderr)
        return 2
    return 0 if all(r["pass"] for r in results) else 1


def main():
    sys.exit(run())
