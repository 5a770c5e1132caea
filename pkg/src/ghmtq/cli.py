"""Command-line front end.

    python -m ghmtq verify  --config run.toml --out results/
    python -m ghmtq analyze --config run.toml --out results/
    python -m ghmtq euler   --config run.toml --out results/
    python -m ghmtq scan    --config run.toml --out results/

Configs are flat TOML files (see ``SCHEMA``); unknown keys are rejected
before anything is computed.  Family parameters go in a ``[params]`` table
and are checked against the family's own fields.  Tolerances can be
overridden from the environment with ``GHMTQ_TOL_<NAME>``, e.g.
``GHMTQ_TOL_ORACLE=1e-6``.

Every command writes ``report.json`` (deterministic for a given config and
build) and ``timing.json`` (wall time, kept out of the report).  ``analyze``
also writes ``fields.csv``.  Exit status: 0 when every check passes, 1 when
a check fails or errors, 2 for configuration or usage errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import jets, quantization as qz
from .geometry import GeometryError, MetricField2, Signature, build_coframe, connection_from_cartan, curvature
from .ghm import conservation_identity, conservation_residual, field_eq_residual, lagrangian_density, induced_metric
from .solutions import (FAMILIES, Family, SolutionsError, config_keys, make_family, quadrature_integrability,
                        stress_quadrature_mismatch)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

TOLERANCES = {
    "tol_residual": 1e-10,   # field equations on shell
    "tol_identity": 1e-8,    # identities that hold off shell
    "tol_oracle": 1e-8,      # printed closed forms vs the Cartan pipeline
    "tol_zero": 1e-10,       # quantities that must vanish identically
    "tol_integer": 1e-6,     # distance of χ / windings from an integer
}

# key -> accepted types
SCHEMA = {
    "family": (str,),
    "params": (dict,),
    "frames": (str,),
    "points": (int,),
    "seed": (int,),
    "x1_min": (int, float), "x1_max": (int, float),
    "x2_min": (int, float), "x2_max": (int, float),
    "n1": (int,), "n2": (int,),
    "periodic_x2": (bool,),
    "exclude": (list,),
    "loci": (list,),
    "on_shell": (bool,),
    "edges": (list,),
    "panels": (int,),
    "levels": (int,),
    "cap_angle": (int, float),
    "expected_chi": (int,),
    "parameter": (str,),
    "values": (list,),
    "circles": (list,),
    "rectangles": (list,),
    "euler_domain": (bool,),
    "require_single_valued": (bool,),
    "synthetic_control": (bool,),
    **{k: (int, float) for k in TOLERANCES},
}

FRAMES = ("lower_triangular", "paper_frame")
EDGE_ORDER = ("bottom", "right", "top", "left")


class ConfigError(ValueError):
    pass


# -- geometric controls that are not GHM families ------------------------------

def _flat_square():
    return MetricField2(lambda x, y: (1.0, 0.0, 1.0))


def _round_sphere():
    return MetricField2(lambda th, ph: (1.0, 0.0, jets.sin(th) ** 2))


def _flat_polar():
    return MetricField2(lambda r, th: (1.0, 0.0, r * r))


def _minkowski():
    return MetricField2(lambda t, x: (-1.0, 0.0, 1.0), Signature.LORENTZIAN)


CONTROLS = {
    "flat_square": (_flat_square, ((0.0, 1.0), (0.0, 1.0))),
    "round_sphere": (_round_sphere, ((0.0, math.pi), (0.0, 2 * math.pi))),
    "flat_polar": (_flat_polar, ((1.0, 2.0), (0.0, 2 * math.pi))),
    "minkowski": (_minkowski, ((0.0, 1.0), (0.0, 1.0))),
    "synthetic_monopole": (_flat_polar, ((0.5, 1.5), (0.0, 2 * math.pi))),
}


# -- configuration -------------------------------------------------------------

@dataclass
class RunConfig:
    family: str
    params: dict
    raw: dict
    tol: dict

    def get(self, key, default=None):
        return self.raw.get(key, default)

    @property
    def is_control(self) -> bool:
        return self.family in CONTROLS

    def build(self) -> Family:
        return make_family(self.family, self.params)

    def default_bounds(self):
        if self.is_control:
            return CONTROLS[self.family][1]
        return FAMILIES[self.family].default_domain

    def bounds(self):
        (a1, b1), (a2, b2) = self.default_bounds()
        return ((float(self.get("x1_min", a1)), float(self.get("x1_max", b1))),
                (float(self.get("x2_min", a2)), float(self.get("x2_max", b2))))

    def grid(self) -> qz.GridSpec:
        excl = tuple((int(a), float(lo), float(hi)) for a, lo, hi in self.get("exclude", []))
        return qz.GridSpec(self.bounds(), (int(self.get("n1", 64)), int(self.get("n2", 64))), excl,
                           (True, not self.get("periodic_x2", False)))

    def echo(self) -> dict:
        out = dict(self.raw)
        out.update(self.tol)
        return out


def _check_type(key, value):
    types = SCHEMA[key]
    if isinstance(value, bool) and bool not in types:
        raise ConfigError(f"{key}: expected {'/'.join(t.__name__ for t in types)}, got bool")
    if not isinstance(value, types):
        raise ConfigError(f"{key}: expected {'/'.join(t.__name__ for t in types)}, got {type(value).__name__}")


def _pairs(key, value, width):
    if not all(isinstance(v, list) and len(v) == width and
               all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in v) for v in value):
        raise ConfigError(f"{key}: expected a list of {width}-element numeric arrays")


def parse_config(text: str, env=None) -> RunConfig:
    """Validate a TOML config; raises :class:`ConfigError` on any problem."""
    env = os.environ if env is None else env
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as err:
        raise ConfigError(f"cannot parse config: {err}") from None
    unknown = sorted(set(raw) - set(SCHEMA))
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    for key, value in raw.items():
        _check_type(key, value)
    if "family" not in raw:
        raise ConfigError("missing required key 'family'")
    family = raw["family"]
    if family not in FAMILIES and family not in CONTROLS:
        raise ConfigError(f"unknown family {family!r}; expected one of {sorted(FAMILIES) + sorted(CONTROLS)}")
    params = raw.get("params", {})
    if params and family in CONTROLS:
        raise ConfigError(f"{family} takes no params")
    if family in FAMILIES:
        bad = sorted(set(params) - set(config_keys(family)))
        if bad:
            raise ConfigError(f"unknown params for {family}: {', '.join(bad)}")
    if raw.get("frames", "lower_triangular") not in FRAMES:
        raise ConfigError(f"frames must be one of {FRAMES}")
    edges = raw.get("edges")
    if edges is not None and (len(edges) != 4 or any(e not in qz.EDGE_KINDS for e in edges)):
        raise ConfigError(f"edges must list four of {qz.EDGE_KINDS} in the order {EDGE_ORDER}")
    for key, width in (("exclude", 3), ("loci", 2), ("circles", 2), ("rectangles", 4)):
        if key in raw:
            _pairs(key, raw[key], width)
    if "values" in raw and not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in raw["values"]):
        raise ConfigError("values: expected a list of numbers")
    for key in ("n1", "n2"):
        if key in raw and raw[key] < 8:
            raise ConfigError(f"{key} must be at least 8")
    for key in ("points", "panels", "levels"):
        if key in raw and raw[key] < 1:
            raise ConfigError(f"{key} must be positive")
    tol = {k: float(raw.get(k, v)) for k, v in TOLERANCES.items()}
    for k in TOLERANCES:
        name = "GHMTQ_" + k.upper()
        if name in env:
            try:
                tol[k] = float(env[name])
            except ValueError:
                raise ConfigError(f"{name} is not a number") from None
    cfg = RunConfig(family, dict(params), raw, tol)
    if family in FAMILIES:
        try:
            cfg.build()
        except SolutionsError as err:
            raise ConfigError(str(err)) from None
    try:
        if family in FAMILIES or family in CONTROLS:
            cfg.grid()
    except ValueError as err:
        raise ConfigError(str(err)) from None
    return cfg


# -- reports ---------------------------------------------------------------

STATUS_RANK = {"pass": 0, "informational": 0, "fail": 1, "error": 1}


@dataclass
class Report:
    command: str
    config: dict
    checks: list = field(default_factory=list)
    results: dict = field(default_factory=dict)
    dumps: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def check(self, name, measured, tolerance=None, passed=None, status=None):
        if status is None:
            status = "informational" if passed is None else ("pass" if passed else "fail")
        self.checks.append({"name": name, "status": status, "measured": _clean(measured),
                            "tolerance": _clean(tolerance)})

    def bound(self, name, measured, tolerance):
        measured = float(measured)
        self.check(name, measured, tolerance, bool(math.isfinite(measured) and measured <= tolerance))

    def error(self, name, message):
        self.checks.append({"name": name, "status": "error", "measured": message, "tolerance": None})

    @property
    def exit_code(self) -> int:
        return max((STATUS_RANK[c["status"]] for c in self.checks), default=0)

    def as_dict(self) -> dict:
        return {"command": self.command, "config": _clean(self.config), "checks": self.checks,
                "results": _clean(self.results), "dumps": self.dumps, "notes": self.notes,
                "status": "fail" if self.exit_code else "pass"}


def _clean(x):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to strings."""
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, np.ndarray):
        return _clean(x.tolist())
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer, int)):
        return int(x)
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else repr(x)
    return x


def relative_error(a, b, floor: float = 1e-300) -> float:
    a, b = np.asarray(a, float), np.asarray(b, float)
    return float(np.max(np.abs(a - b) / np.maximum(np.abs(b), floor)))


def _sample_points(cfg: RunConfig, n: int | None = None):
    rng = np.random.default_rng(cfg.get("seed", 0))
    n = n or cfg.get("points", 100)
    (a1, b1), (a2, b2) = cfg.bounds()
    return rng.uniform(a1, b1, n), rng.uniform(a2, b2, n)


# -- verify ------------------------------------------------------------------

ON_SHELL_BY_DEFAULT = ("schwarzschild", "weyl_static")


def _is_default(fam: Family) -> bool:
    return fam == type(fam)()


def cmd_verify(cfg: RunConfig) -> Report:
    rep = Report("verify", cfg.echo())
    if cfg.is_control:
        raise ConfigError(f"{cfg.family} is a geometric control, not a GHM family")
    fam = cfg.build()
    tol = cfg.tol
    p = _sample_points(cfg)
    on_shell = cfg.get("on_shell", fam.name in ON_SHELL_BY_DEFAULT)

    try:
        sys_ = fam.system()
    except SolutionsError:
        sys_ = None
    if sys_ is not None:
        E = field_eq_residual(sys_, p)
        scale = max(1.0, float(np.max(np.abs(E))))
        if fam.main_eq_factor is not None:
            main = fam.main_eq_factor * fam.main_eq_residuals(p)
            rep.bound("main_equations_match_generic", np.max(np.abs(E - main)) / scale, tol["tol_identity"])
        if on_shell:
            rep.bound("field_equations_on_shell", np.max(np.abs(E)), tol["tol_residual"])
        else:
            rep.check("field_equation_residual", float(np.max(np.abs(E))))
        if fam.name == "gowdy_avtd" and _is_default(fam):
            t = np.linspace(0.0, 5.0, 51)
            th = np.linspace(0.0, 2 * math.pi, 51)
            res = fam.main_eq_residuals((t, th))
            rep.bound("avtd_residual_P_decay", np.max(np.abs(res[0] * np.exp(4 * t) - 1.0)), 1e-9)
            rep.bound("avtd_residual_Q_zero", np.max(np.abs(res[1])), 1e-12)

        L = lagrangian_density(sys_, p).total.v
        g = sys_.base.components(*jets.variables(*p))
        g = [np.broadcast_to(jets.value(c), p[0].shape) for c in g]
        det = g[0] * g[2] - g[1] ** 2
        h = [c.v for c in induced_metric(sys_, p)]
        trace = (g[2] * h[0] - 2 * g[1] * h[1] + g[0] * h[2]) / det
        rep.bound("lagrangian_equals_induced_trace",
                  relative_error(L, np.sqrt(np.abs(det)) * trace, 1.0), tol["tol_identity"])

        cons = conservation_residual(sys_, p).residual
        ident = conservation_identity(sys_, p)
        rep.bound("conservation_identity", relative_error(cons, ident, 1.0), tol["tol_identity"])
        if on_shell:
            rep.bound("conservation_residual", np.max(np.abs(cons)), tol["tol_identity"])

        if fam.stress_map is not None:
            mis = stress_quadrature_mismatch(fam, p)
            rep.bound("stress_matches_quadrature", np.max(np.abs(mis)), tol["tol_identity"])
            integ = np.max(np.abs(quadrature_integrability(fam, p)))
            if on_shell:
                rep.bound("quadrature_integrable", integ, tol["tol_identity"])
            else:
                rep.check("quadrature_integrability_residual", float(integ))

    try:
        cf = fam.paper_coframe(p)
    except SolutionsError:
        cf = None
    if cf is not None:
        h = fam.metric().at(p)
        rep.bound("paper_coframe_reproduces_metric", np.max(cf.reproduction_error(h)), tol["tol_identity"])
        conn = connection_from_cartan(cf)
        omega = np.array([c.v for c in conn.frame])
        R = curvature(conn).R
        if fam.name == "schwarzschild":
            rep.bound("connection_identically_zero", np.max(np.abs(omega)), tol["tol_zero"])
            rep.bound("ricci_identically_zero", np.max(np.abs(R)), tol["tol_zero"])
            rep.notes.append("connection identically zero")
        else:
            _oracle_checks(rep, fam, p, omega, R, tol["tol_oracle"])
    return rep


def _oracle_checks(rep: Report, fam: Family, p, omega, R, tol):
    try:
        closed = fam.closed_form_connection(p)
    except SolutionsError:
        closed = None
    if closed is not None:
        rep.bound("closed_form_connection", relative_error(closed, omega, 1e-12), tol)
    if hasattr(fam, "closed_form_curvature"):
        F = R / 2.0
        rep.bound("closed_form_curvature", relative_error(fam.closed_form_curvature(p), F, 1e-12), tol)
    try:
        closed_R = fam.closed_form_ricci(p)
    except SolutionsError:
        closed_R = None
    if closed_R is not None:
        rep.bound("closed_form_ricci", relative_error(closed_R, R, 1e-12), tol)


# -- analyze -------------------------------------------------------------------

CSV_COLUMNS = ("x1", "x2", "omega_1", "omega_2", "F", "R", "frame_ok")


def write_csv(path: Path, report: qz.RegularityReport):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for row in report.rows():
            w.writerow([repr(v) if isinstance(v, float) else str(v).lower() for v in row])


def cmd_analyze(cfg: RunConfig, out: Path) -> Report:
    rep = Report("analyze", cfg.echo())
    source = CONTROLS[cfg.family][0]() if cfg.is_control else cfg.build()
    frames = cfg.get("frames", "lower_triangular")
    loci = [(int(a), float(v)) for a, v in cfg.get("loci", [])]
    scan = qz.regularity_scan(source, cfg.grid(), frames=frames, loci=loci)
    write_csv(out / "fields.csv", scan)
    rep.dumps.append("fields.csv")
    rep.results = {
        "verdict": scan.verdict(cfg.tol["tol_zero"]),
        "max_abs_omega": scan.max_abs_omega,
        "max_abs_F": scan.max_abs_F,
        "max_abs_R": scan.max_abs_R,
        "invalid_points": scan.n_bad,
        "loci": [l._asdict() for l in scan.loci],
    }
    rep.check("invalid_frame_points", scan.n_bad)
    for l in scan.loci:
        rep.check(f"blowup_exponent_x{l.axis + 1}={l.location:g}", l.exponent)
    if isinstance(source, Family) and scan.frame_ok.any():
        ok = scan.frame_ok
        p = (scan.x1[ok], scan.x2[ok])
        if source.name == "schwarzschild" and frames == "paper_frame":
            rep.bound("connection_identically_zero", scan.max_abs_omega, cfg.tol["tol_zero"])
        else:
            try:
                closed_R = source.closed_form_ricci(p)
            except SolutionsError:
                closed_R = None
            if closed_R is not None:
                rep.bound("R_matches_closed_form", relative_error(scan.R[ok], closed_R, 1e-12),
                          cfg.tol["tol_oracle"])
    return rep


# -- euler -----------------------------------------------------------------------

def _euler_entry(res: qz.EulerResult) -> dict:
    return {"bulk": res.bulk, "boundary": dict(zip(EDGE_ORDER, res.boundary)), "corners": res.corners,
            "chi": res.chi, "error": res.error, "order": res.order}


def cmd_euler(cfg: RunConfig) -> Report:
    rep = Report("euler", cfg.echo())
    panels = int(cfg.get("panels", 8))
    levels = int(cfg.get("levels", 4))
    if cfg.is_control:
        metric = CONTROLS[cfg.family][0]()
    else:
        metric = cfg.build().metric()
    if metric.signature is not Signature.RIEMANNIAN:
        raise ConfigError(f"{cfg.family} is Lorentzian; the Euler number needs a Riemannian metric")
    bounds = cfg.bounds()
    try:
        if cfg.family == "round_sphere":
            cut = float(cfg.get("cap_angle", 1.0))
            (a1, b1), x2 = bounds
            parts = {
                "cap": qz.EulerDomain(((a1, cut), x2), ("periodic", "boundary", "periodic", "pole")),
                "complement": qz.EulerDomain(((cut, b1), x2), ("periodic", "pole", "periodic", "boundary")),
            }
        else:
            edges = tuple(cfg.get("edges", ["boundary"] * 4))
            parts = {"domain": qz.EulerDomain(bounds, edges)}
        results = {k: qz.euler_number(metric, d, (panels, panels), levels=levels) for k, d in parts.items()}
    except GeometryError as err:
        if "Riemannian" in str(err):
            raise ConfigError(str(err)) from None
        raise
    chi = sum(r.chi for r in results.values())
    err = sum(r.error for r in results.values())
    order = min(r.order for r in results.values())
    rep.results = {k: _euler_entry(r) for k, r in results.items()}
    rep.results["chi"] = chi
    rep.check("chi", chi)
    rep.bound("chi_integral", abs(chi - round(chi)), cfg.tol["tol_integer"])
    rep.check("quadrature_error", err)
    rep.check("convergence_order", order, 2.0, bool(order >= 2.0))
    if "expected_chi" in cfg.raw:
        rep.bound("chi_matches_expected", abs(chi - cfg.get("expected_chi")), cfg.tol["tol_integer"])
    return rep


# -- scan ---------------------------------------------------------------------

def _loops(cfg: RunConfig):
    loops = []
    period = cfg.bounds()[1]
    for axis, value in cfg.get("circles", []):
        loops.append(qz.circle_loop(int(axis), float(value), period if int(axis) == 0 else cfg.bounds()[0]))
    for a1, b1, a2, b2 in cfg.get("rectangles", []):
        loops.append(qz.rectangle_loop(((a1, b1), (a2, b2))))
    return loops


def _constraint_entry(c: qz.Constraint) -> dict:
    return {"invariant": c.invariant, "kind": c.kind, "detail": c.detail, "locations": list(c.locations)}


def synthetic_control(tol_integer: float) -> qz.SpectrumReport:
    return qz.spectrum_search(qz.synthetic_monopole, "c", np.linspace(0.0, 2.0, 9),
                              [qz.circle_loop(0, 1.0, (0.0, 2 * math.pi))],
                              require_single_valued=True, int_tol=tol_integer)


def cmd_scan(cfg: RunConfig) -> Report:
    rep = Report("scan", cfg.echo())
    tol = cfg.tol["tol_integer"]
    single = bool(cfg.get("require_single_valued", False))
    if cfg.family == "synthetic_monopole":
        values = cfg.get("values", list(np.linspace(0.0, 2.0, 9)))
        loops = _loops(cfg) or [qz.circle_loop(0, 1.0, (0.0, 2 * math.pi))]
        sweep = qz.spectrum_search(qz.synthetic_monopole, "c", values, loops,
                                   require_single_valued=single, int_tol=tol)
    else:
        if cfg.is_control:
            raise ConfigError(f"{cfg.family} has no parameters to sweep")
        if "parameter" not in cfg.raw or "values" not in cfg.raw:
            raise ConfigError("scan needs 'parameter' and 'values'")
        param = cfg.get("parameter")
        if param not in config_keys(cfg.family):
            raise ConfigError(f"{param!r} is not a parameter of {cfg.family}")
        as_string = isinstance(getattr(cfg.build(), param), str)
        make = qz.family_sweep(cfg.family, param, cfg.params, as_string=as_string)
        domains = []
        if cfg.get("euler_domain", False):
            domains.append(qz.EulerDomain(cfg.bounds(), tuple(cfg.get("edges", ["boundary"] * 4))))
        sweep = qz.spectrum_search(make, param, cfg.get("values"), _loops(cfg), domains,
                                   require_single_valued=single, int_tol=tol)
    rep.results["sweep"] = {"parameter": sweep.parameter, "values": sweep.values,
                            "invariants": sweep.invariants, "skipped": {repr(k): v for k, v in sweep.errors.items()},
                            "constraints": [_constraint_entry(c) for c in sweep.constraints]}
    expect = 1 if cfg.family == "synthetic_monopole" and single else 0
    rep.check("constraints_detected", len(sweep.constraints), expect, len(sweep.constraints) == expect)
    if sweep.errors:
        rep.check("skipped_parameter_points", len(sweep.errors))
    if cfg.get("synthetic_control", False):
        ctl = synthetic_control(tol)
        rep.results["synthetic_control"] = {"constraints": [_constraint_entry(c) for c in ctl.constraints]}
        rep.check("synthetic_control_detects_one", len(ctl.constraints), 1, len(ctl.constraints) == 1)
    return rep


# -- entry point -------------------------------------------------------------------

COMMANDS = ("verify", "analyze", "euler", "scan")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ghmtq", description="Generalized harmonic maps: geometry and "
                                 "topological-quantization checks.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True, type=Path)
        sp.add_argument("--out", required=True, type=Path)
    return ap


def write_report(out: Path, rep: Report, wall: float):
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "report.json", "w") as fh:
        json.dump(rep.as_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    with open(out / "timing.json", "w") as fh:
        json.dump({"command": rep.command, "wall_time_s": wall}, fh, indent=2)
        fh.write("\n")


def run(command: str, config_path: Path, out: Path, env=None) -> int:
    try:
        text = Path(config_path).read_text()
    except OSError as err:
        print(f"error: cannot read config: {err}", file=sys.stderr)
        return EXIT_USAGE
    start = time.perf_counter()
    try:
        cfg = parse_config(text, env)
        out.mkdir(parents=True, exist_ok=True)
        if command == "verify":
            rep = cmd_verify(cfg)
        elif command == "analyze":
            rep = cmd_analyze(cfg, out)
        elif command == "euler":
            rep = cmd_euler(cfg)
        else:
            rep = cmd_scan(cfg)
    except ConfigError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except (GeometryError, SolutionsError, ValueError, FloatingPointError) as err:
        rep = Report(command, cfg.echo())
        rep.error(command, f"{type(err).__name__}: {err}")
    write_report(out, rep, time.perf_counter() - start)
    for c in rep.checks:
        print(f"{c['status']:>13}  {c['name']}: {c['measured']}")
    return rep.exit_code


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    return run(args.command, args.config, args.out)


if __name__ == "__main__":
    sys.exit(main())
