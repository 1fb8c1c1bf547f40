"""Scenario files: a representation, a lattice, sample points and checks.

Scenarios are TOML. Numbers may be given as rational strings ("3/2"),
decimal strings or plain numbers; complex coordinates are ``[re, im]``
pairs. A minimal file::

    name = "classical"
    seed = 7

    [representation]
    kind = "RealLine"

    [lattice]
    vectors = [["1"]]

    [points]
    random = 20

    [checks]
    run = ["theta1", "theta2", "theta3"]
"""
from __future__ import annotations

import os
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import jordan, kernels
from . import verify as V
from .errors import (
    BudgetExceeded,
    ConfigError,
    DomainError,
    NotInvertibleError,
    TubeThetaError,
    UnsupportedConfiguration,
)
from .lattice import Lattice, dual_lattice, period_lattice, to_fraction
from .representation import (
    RepresentationConfig,
    basepoint_u_map,
    custom_representation,
    natural_representation,
    normalize_basepoint,
)
from .theta import theta_eval

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

SCENARIO_ENV = "TUBETHETA_SCENARIO_DIR"
BUNDLED_DIR = Path(__file__).parent / "scenarios"

#: Every check name a scenario may request.
CHECKS = (
    "theta1", "theta2", "theta3", "evenness", "linear", "gaussian", "inverseid",
    "partialthetaid", "theta-transformation", "c-lambda", "H", "jordan", "s-properties",
    "basepoint", "fourier", "tail-stability",
)

DEFAULT_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class Scenario:
    name: str
    rep: RepresentationConfig
    lattice: Lattice
    points: tuple  # of (z, u) coordinate arrays
    checks: tuple
    tolerances: dict = field(default_factory=dict)
    seed: int = 0
    tol: float = DEFAULT_TOL
    description: str = ""
    options: dict = field(default_factory=dict)
    path: str = ""
    n_explicit: int = 0


# -- parsing helpers ------------------------------------------------------------------------


def _line_of(text: str, key: str):
    if not text:
        return None
    m = re.search(rf"^\s*\[?\[?{re.escape(key)}\b", text, re.M)
    return text.count("\n", 0, m.start()) + 1 if m else None


class _Ctx:
    def __init__(self, text):
        self.text = text

    def error(self, msg, key):
        return ConfigError(msg, field=key, line=_line_of(self.text, key.split(".")[-1]))

    def number(self, x, key) -> Fraction:
        try:
            return to_fraction(x)
        except (TubeThetaError, ValueError, TypeError, ZeroDivisionError):
            raise self.error(f"not a rational number: {x!r}", key) from None

    def real_array(self, x, key, exact=False):
        if isinstance(x, list):
            return [self.real_array(v, key, exact) for v in x]
        f = self.number(x, key)
        return f if exact else float(f)

    def complex_vector(self, x, key, n):
        if not isinstance(x, list) or len(x) != n:
            raise self.error(f"expected {n} coordinates", key)
        out = []
        for c in x:
            if isinstance(c, list):
                if len(c) != 2:
                    raise self.error("complex numbers are [re, im] pairs", key)
                out.append(complex(float(self.number(c[0], key)), float(self.number(c[1], key))))
            else:
                out.append(complex(float(self.number(c, key))))
        return np.array(out)


def _descriptor(table, ctx, key="representation"):
    kind = table.get("kind")
    try:
        if kind == "RealLine":
            return jordan.RealLine()
        if kind in ("SymReal", "HermComplex", "SpinFactor"):
            n = table.get("n")
            if not isinstance(n, int):
                raise ctx.error(f"{kind} needs an integer n", f"{key}.n")
            return getattr(jordan, kind)(n)
        if kind == "DirectSum":
            parts = table.get("parts")
            if not isinstance(parts, list) or not parts:
                raise ctx.error("DirectSum needs a list of parts", f"{key}.parts")
            return jordan.DirectSum(*[_descriptor(p, ctx, f"{key}.parts") for p in parts])
    except ConfigError:
        raise
    except (TubeThetaError, ValueError) as exc:
        raise ctx.error(str(exc), f"{key}.kind") from None
    raise ctx.error(f"unknown kind {kind!r}", f"{key}.kind")


def _representation(table, ctx):
    if not isinstance(table, dict):
        raise ctx.error("missing [representation] table", "representation")
    try:
        if table.get("kind") == "Custom":
            for k in ("psi_basis", "rho", "base_point"):
                if k not in table:
                    raise ctx.error(f"Custom representation needs {k}", f"representation.{k}")
            return custom_representation(
                np.array(ctx.real_array(table["psi_basis"], "representation.psi_basis"), float),
                np.array(ctx.real_array(table["rho"], "representation.rho"), float),
                np.array(ctx.real_array(table["base_point"], "representation.base_point"), float),
                name=table.get("name", "custom"),
            )
        desc = _descriptor(table, ctx)
        rep = natural_representation(desc)
        if "rho" in table:
            raise ctx.error("rho can only be given for Custom representations", "representation.rho")
        return rep
    except ConfigError:
        raise
    except (TubeThetaError, ValueError) as exc:
        raise ctx.error(str(exc), "representation") from None


def _lattice(table, rep, ctx):
    table = table or {}
    n = rep.dim_U
    if "vectors" in table:
        vecs = ctx.real_array(table["vectors"], "lattice.vectors", exact=True)
        if not isinstance(vecs, list) or len(vecs) != n or any(
            not isinstance(v, list) or len(v) != n for v in vecs
        ):
            raise ctx.error(f"lattice.vectors must be {n} vectors of length {n}", "lattice.vectors")
        try:
            return Lattice.from_rows(vecs, rho=rep.rho)
        except (TubeThetaError, ValueError) as exc:
            raise ctx.error(str(exc), "lattice.vectors") from None
    scale = ctx.number(table.get("scale", 1), "lattice.scale")
    if scale <= 0:
        raise ctx.error("lattice.scale must be positive", "lattice.scale")
    return Lattice.standard(n, scale, rho=rep.rho)


def random_points(rep: RepresentationConfig, count: int, rng: np.random.Generator):
    """Seeded sample points (z, u) with Im z well inside the cone."""
    pts = []
    e = np.asarray(rep.base_point, float)
    for _ in range(count):
        x = rng.uniform(-0.5, 0.5, rep.dim_V)
        d = rng.standard_normal(rep.dim_V)
        lo, hi = rep.spectrum_bounds(d)
        d = d / max(abs(lo), abs(hi), 1e-300)
        y = rng.uniform(0.8, 1.6) * e + 0.3 * d
        u = rng.uniform(0.0, 1.0, rep.dim_U) + 0.2j * rng.standard_normal(rep.dim_U)
        pts.append((x + 1j * y, u))
    return pts


def load_scenario(path) -> Scenario:
    """Parse and validate a scenario file."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read scenario: {exc}") from None
    return parse_scenario(text, str(path))


def parse_scenario(text: str, path: str = "<string>") -> Scenario:
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        m = re.search(r"line (\d+)", str(exc))
        raise ConfigError(f"invalid TOML: {exc}", line=int(m.group(1)) if m else None) from None
    ctx = _Ctx(text)
    known = {"name", "description", "seed", "tol", "representation", "lattice", "points", "checks", "tolerances", "options"}
    for k in data:
        if k not in known:
            raise ctx.error(f"unknown key {k!r}", k)
    name = data.get("name", Path(path).stem)
    seed = data.get("seed", 0)
    if not isinstance(seed, int):
        raise ctx.error("seed must be an integer", "seed")
    try:
        tol = float(data.get("tol", DEFAULT_TOL))
    except (TypeError, ValueError):
        raise ctx.error("tol must be a number", "tol") from None
    rep = _representation(data.get("representation"), ctx)
    lattice = _lattice(data.get("lattice"), rep, ctx)
    opts = dict(data.get("options", {}))
    if opts.get("normalize") and not rep.is_normalized:
        rep, lattice, umap = (*normalize_basepoint(rep, lattice), basepoint_u_map(rep))
    else:
        umap = None
    points = []
    pspec = data.get("points", {})
    for i, p in enumerate(pspec.get("explicit", [])):
        if "z" not in p:
            raise ctx.error("explicit points need z", "points.explicit")
        z = ctx.complex_vector(p["z"], "z", rep.dim_V)
        u = ctx.complex_vector(p.get("u", ["0"] * rep.dim_U), "u", rep.dim_U)
        points.append((z, umap @ u if umap is not None else u))
    nrand = pspec.get("random", 0 if points else 5)
    if not isinstance(nrand, int) or nrand < 0:
        raise ctx.error("points.random must be a nonnegative integer", "points.random")
    checks = data.get("checks", {}).get("run", ["theta1", "theta2", "theta3"])
    for c in checks:
        if c not in CHECKS:
            raise ctx.error(f"unknown check {c!r}", "checks.run")
    tolerances = {}
    for k, v in data.get("tolerances", {}).items():
        try:
            tolerances[k] = float(v)
        except (TypeError, ValueError):
            raise ctx.error(f"tolerance for {k} must be a number", f"tolerances.{k}") from None
    n_explicit = len(points)
    points += random_points(rep, nrand, np.random.default_rng(seed))
    return Scenario(name, rep, lattice, tuple(points), tuple(checks), tolerances, seed, tol,
                    data.get("description", ""), opts, path, n_explicit)


# -- discovery ---------------------------------------------------------------------------------


def scenario_dirs():
    env = os.environ.get(SCENARIO_ENV)
    dirs = [Path(env)] if env else []
    return dirs + [BUNDLED_DIR]


def list_scenarios():
    """(name, path) for each scenario file, environment directory first."""
    seen, out = set(), []
    for d in scenario_dirs():
        if d.is_dir():
            for p in sorted(d.glob("*.toml")):
                if p.stem not in seen:
                    seen.add(p.stem)
                    out.append((p.stem, p))
    return out


def resolve_scenario(name_or_path) -> Path:
    p = Path(name_or_path)
    if p.suffix == ".toml" or p.exists():
        if not p.exists():
            raise ConfigError(f"scenario file not found: {p}")
        return p
    for name, path in list_scenarios():
        if name == str(name_or_path):
            return path
    raise ConfigError(f"no scenario named {name_or_path!r}")


# -- running -----------------------------------------------------------------------------------


@dataclass(frozen=True)
class CheckError:
    """A check that could not run; ``kind`` is "domain", "unsupported", ... ."""

    tag: str
    inputs: dict
    kind: str
    message: str

    passed = False

    def to_dict(self):
        return {"tag": self.tag, "inputs": V._jsonable(self.inputs), "error": self.kind,
                "message": self.message, "pass": False}


_ERROR_KINDS = (
    (DomainError, "domain"),
    (UnsupportedConfiguration, "unsupported"),
    (BudgetExceeded, "budget"),
    (NotInvertibleError, "not-invertible"),
    (V.MembershipError, "membership"),
)


def _guard(tag, inputs, fn):
    try:
        out = fn()
    except TubeThetaError as exc:
        kind = next((k for cls, k in _ERROR_KINDS if isinstance(exc, cls)), "error")
        return [CheckError(tag, inputs, kind, str(exc))]
    return out if isinstance(out, list) else [out]


def _tasks(sc: Scenario):
    """Deterministic list of (tag, inputs, thunk); random data drawn here."""
    rep, lat, tol = sc.rep, sc.lattice, sc.tolerances
    rng = np.random.default_rng([sc.seed, 1])
    n = rep.dim_U
    tasks = []
    pts = list(sc.points)

    def t(name):
        return tol.get(name)

    def add(tag, inputs, fn):
        tasks.append((tag, inputs, fn))

    pl = None
    dual = dual_lattice(lat, rep.rho)
    for check in sc.checks:
        if check == "theta1":
            for i, (z, u) in enumerate(pts):
                m = lat.basis @ rng.integers(-2, 3, n)
                add(check, {"point": i}, lambda z=z, u=u, m=m: V.check_periodicity_u(rep, lat, z, u, m, t("theta1")))
        elif check == "theta2":
            for i, (z, u) in enumerate(pts):
                k = dual.basis @ rng.integers(-1, 2, n)
                add(check, {"point": i}, lambda z=z, u=u, k=k: V.check_quasiperiodicity(rep, lat, z, u, k, t("theta2")))
        elif check == "theta3":
            if pl is None:
                pl = period_lattice(rep, lat)
            for i, (z, u) in enumerate(pts):
                k = pl.float_basis @ rng.integers(-2, 3, pl.float_basis.shape[1])
                add(check, {"point": i}, lambda z=z, u=u, k=k, pl=pl: V.check_periodicity_z(rep, lat, z, u, k, t("theta3"), pl))
        elif check == "evenness":
            for i, (z, u) in enumerate(pts):
                add(check, {"point": i}, lambda z=z, u=u: V.check_evenness(rep, lat, z, u, t("evenness")))
        elif check == "linear":
            pair_samples = pts[:2]
            pairs = [(V.induced_map(rep, Wh)[0], Wh) for Wh in V.integer_pairs(rep)]
            pairs += [V.scaling_pair(rep, s) for s in (2, 3)]
            for j, (W, Wh) in enumerate(pairs):
                add(check, {"pair": j}, lambda W=W, Wh=Wh, j=j, s=pair_samples: V.check_linear_pair(
                    rep, lat, W, Wh, s, {k: v for k, v in tol.items()}, seed=sc.seed + j))
        elif check == "gaussian":
            for i, (z, u) in enumerate(pts[:3]):
                add(check, {"point": i}, lambda z=z, u=u: V.gaussian_integral_check(rep, z, u, t("gaussian")))
        elif check == "inverseid":
            for i, (z, u) in enumerate(pts):
                x = rng.standard_normal(n)
                add(check, {"point": i}, lambda z=z, u=u, x=x: V.check_square_completion(rep, np.imag(z), x, u, t("inverseid")))
        elif check == "partialthetaid":
            for i, (z, u) in enumerate(pts):
                add(check, {"point": i}, lambda z=z, u=u: V.check_partial_transformation(rep, lat, z, u, t("partialthetaid")))
        elif check == "theta-transformation":
            for i, (z, u) in enumerate(pts):
                add(check, {"point": i}, lambda z=z, u=u: V.check_full_transformation(rep, lat, z, u, t("theta-transformation")))
        elif check == "c-lambda":
            add(check, {"points": min(5, len(pts))}, lambda: V.check_c_lambda(rep, lat, pts[:5], t("c-constancy")))
        elif check == "H":
            add(check, {}, lambda: V.check_h_normalization(rep, t("Hnorm")))
            for i, (z, u) in enumerate(pts):
                add(check, {"point": i}, lambda z=z: V.check_h_square(rep, z, t("H-square")))
        elif check == "jordan":
            count = int(sc.options.get("jordan_samples", 1000))
            samples = [rng.standard_normal(rep.dim_V) for _ in range(count)]
            add(check, {"samples": count}, lambda s=samples: V.check_jordan_hom(rep, s, t("jordan-hom")))
            if rep.descriptor.has_product:
                add(check, {"samples": count}, lambda s=samples: V.check_jordan_axioms(rep.descriptor, s, t("jordan-identity")))
        elif check == "s-properties":
            count = int(sc.options.get("s_samples", 1000))
            add(check, {"samples": count}, lambda: V.check_s_properties(rep, lat, count, sc.seed))
        elif check == "basepoint":
            for i, (z, u) in enumerate(pts):
                add(check, {"point": i}, lambda z=z, u=u: V.check_basepoint_invariance(rep, lat, z, u, t("basepoint")))
        elif check == "fourier":
            radius = int(sc.options.get("fourier_radius", 1))
            z = pts[0][0] if pts else 1j * rep.base_point
            if n > 2:
                add(check, {"dim": n}, lambda: V.check_fourier(rep, lat, z, np.zeros(n)))
            else:
                for k in V._box(n, radius):
                    add(check, {"k": k}, lambda k=k: V.check_fourier(rep, lat, z, k, t("fourier")))
        elif check == "tail-stability":
            for i, (z, u) in enumerate(pts):
                add(check, {"point": i}, lambda z=z, u=u: V.check_tail_stability(rep, lat, z, u, sc.tol))
    return tasks


def run_checks(sc: Scenario, jobs: int = 1) -> list:
    """Run every requested check; results keep task order regardless of jobs."""
    tasks = _tasks(sc)
    if jobs <= 1:
        results = [_guard(tag, inp, fn) for tag, inp, fn in tasks]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(lambda t: _guard(*t), tasks))
    return [r for group in results for r in group]


def report(sc: Scenario, results: list) -> dict:
    errors = [r for r in results if isinstance(r, CheckError)]
    failed = [r for r in results if not r.passed and not isinstance(r, CheckError)]
    return {
        "scenario": sc.name,
        "seed": sc.seed,
        "tol": f"{sc.tol:.6e}",
        "representation": str(sc.rep.descriptor),
        "lattice": sc.lattice.to_dict(),
        "backend": kernels.BACKEND,
        "checks": [r.to_dict() for r in results],
        "summary": {
            "total": len(results),
            "passed": sum(1 for r in results if r.passed),
            "failed": len(failed),
            "errors": len(errors),
        },
        "all_pass": not failed and not errors,
    }


def exit_code(results: list) -> int:
    """0 all pass, 2 for unsupported configurations, 1 for any other failure."""
    if any(isinstance(r, CheckError) and r.kind == "unsupported" for r in results):
        return 2
    return 0 if all(r.passed for r in results) else 1


def evaluate_points(sc: Scenario, tol=None) -> list:
    """theta at each scenario point; domain errors recorded per point."""
    out = []
    for i, (z, u) in enumerate(sc.points):
        entry = {"point": i, "z": V._jsonable(z), "u": V._jsonable(u)}
        try:
            entry.update(theta_eval(sc.rep, sc.lattice, z, u, sc.tol if tol is None else tol).to_dict())
        except TubeThetaError as exc:
            kind = next((k for cls, k in _ERROR_KINDS if isinstance(exc, cls)), "error")
            entry.update({"error": kind, "message": str(exc)})
        out.append(entry)
    return out


def with_overrides(sc: Scenario, tol=None, seed=None) -> Scenario:
    """Copy with a different evaluation tolerance or seed (random points redrawn)."""
    if seed is not None and seed != sc.seed:
        nrand = len(sc.points) - sc.n_explicit
        pts = sc.points[:sc.n_explicit] + tuple(random_points(sc.rep, nrand, np.random.default_rng(seed)))
        sc = replace(sc, seed=seed, points=pts)
    if tol is not None:
        sc = replace(sc, tol=float(tol))
    return sc
