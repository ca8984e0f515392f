"""Command-line front end: build constructions, run checks, emit reports.

Exit codes: 0 when every check passes, 1 when a check fails or is
inconclusive, 2 for configuration or parse errors, 3 when a construction
cannot be built.
"""

from __future__ import annotations

import argparse
import configparser
import datetime as _dt
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import expr as ex
from . import verify
from .groups import Carrier, GroupSpec, InvalidDimension, MeasureSpec, base_group, lebesgue
from .haarize import (
    CdfNotStrictlyIncreasing,
    LinePartition,
    PartitionMismatch,
    ZeroOrInfinitePartMass,
    haarize_probability,
    haarize_sigma_finite,
)
from .intervals import IntervalSet, parse_interval_set
from .measure import (
    Bijection1D,
    ConstructionError,
    QuantileError,
    SetOutsideCarrier,
    distribution_from_name,
    integrate,
)
from .quadrature import QuadratureError
from .transport import (
    DimensionMismatch,
    TransportResult,
    arctan_group,
    log_group,
    one_dimensionality_certificate,
    shear_group,
    transport,
    velocity_group,
)

SCHEMA = "haargroups-report/1"
EXIT_OK, EXIT_CHECK, EXIT_CONFIG, EXIT_CONSTRUCTION = 0, 1, 2, 3

TRANSPORT_CHECKS = ("axioms", "abelian", "metric", "invariance", "pushforward", "jacobian", "certificate", "tags")
HAARIZE_CHECKS = ("axioms", "abelian", "metric", "invariance", "inverse", "quasi", "mass", "tags")
SIGMA_CHECKS = ("axioms", "abelian", "metric", "invariance", "series", "equivalence", "tags")

CATALOG = (
    ("group", "real-line", "(R, +, |x - y|), Lebesgue measure"),
    ("group", "circle", "[0,1) with (x + y) mod 1, arc metric, Lebesgue measure"),
    ("group", "real-n:<n>", "(R^n, +, Euclidean distance), volume measure"),
    ("transport", "velocity:<c>", "f(y) = c(e^y - 1)/(1 + e^y); x ⊙ y = (x + y)/(1 + xy/c²); density c²/(c² - t²)"),
    ("transport", "log", "f = exp; x ⊙ y = xy; metric |ln x - ln y|; density 1/x"),
    ("transport", "arctan:<c>", "f(x) = 2c·atan(x)/π; metric |tan(πx/2c) - tan(πy/2c)|"),
    ("transport", "shear:<n>", "f(x) = (x1, x1² + x2, x3, ..., xn), n >= 3; Lebesgue measure preserved"),
    ("transport", "custom", "any monotone f given by --forward and --inverse expressions"),
    ("distribution", "uniform", "uniform on [0,1); haarizes to the circle itself"),
    ("distribution", "exponential:<rate>", "F(x) = 1 - exp(-rate·x) on [0, ∞)"),
    ("distribution", "normal:<mean>,<sd>", "Gaussian; escape points a_n = mean + n"),
    ("distribution", "cauchy:<loc>,<scale>", "F(x) = 1/2 + atan((x - loc)/scale)/π; escape points a_n = loc + n"),
    ("distribution", "beta:<a>,<b>", "Beta(a, b) on [0,1); numeric quantile"),
    ("sigma-finite", "lebesgue | <density expression>", "unit parts numbered 0, 1, -1, 2, ...; μ*(X) = Σ 2^k λ(X_k) μ₁(X ∩ φ⁻¹X_k)"),
)


class ConfigError(ValueError):
    pass


CONSTRUCTION_ERRORS = (
    ConstructionError, InvalidDimension, DimensionMismatch, CdfNotStrictlyIncreasing,
    ZeroOrInfinitePartMass, PartitionMismatch, QuantileError,
)


# --------------------------------------------------------------------------
# Configuration
# --------------------------------------------------------------------------


@dataclass
class RunConfig:
    command: str
    builtin: Optional[str] = None
    forward: Optional[str] = None
    inverse: Optional[str] = None
    params: dict = field(default_factory=dict)
    domain: tuple = (-math.inf, math.inf)
    codomain: tuple = (-math.inf, math.inf)
    base: str = "real-line"
    dist: Optional[str] = None
    sigma_finite: Optional[str] = None
    measure: Optional[str] = None
    density: Optional[str] = None
    set: Optional[str] = None
    target: Optional[str] = None
    checks: tuple = ()
    tol_algebraic: float = verify.ALGEBRAIC_TOL
    tol_measure: float = verify.MEASURE_TOL
    samples: int = 1000
    sets: int = 100
    seed: int = 0
    output: Optional[str] = None
    format: str = "table"


# flag name -> (type converter, default) for keys that may also come from a config file
OPTIONS: dict[str, tuple[Callable[[str], object], object]] = {
    "builtin": (str, None),
    "forward": (str, None),
    "inverse": (str, None),
    "params": (str, ""),
    "domain": (str, None),
    "codomain": (str, None),
    "base": (str, "real-line"),
    "dist": (str, None),
    "sigma_finite": (str, None),
    "measure": (str, None),
    "density": (str, None),
    "set": (str, None),
    "target": (str, None),
    "checks": (str, None),
    "tol_algebraic": (float, verify.ALGEBRAIC_TOL),
    "tol_measure": (float, verify.MEASURE_TOL),
    "samples": (int, 1000),
    "sets": (int, 100),
    "seed": (int, None),
    "output": (str, None),
    "format": (str, "table"),
}


def read_config_file(path: str) -> dict:
    """Flat ``key = value`` pairs from any section; keys mirror the flags."""
    parser = configparser.ConfigParser(interpolation=None)
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from None
    values = {}
    for section in parser.sections():
        for key, raw in parser.items(section):
            name = key.replace("-", "_")
            if name not in OPTIONS:
                raise ConfigError(f"unknown config key {key!r} in [{section}]")
            values[name] = raw
    return values


def _parse_params(text: str) -> dict:
    out = {}
    for item in filter(None, (p.strip() for p in text.split(","))):
        name, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"parameter {item!r} is not name=value")
        try:
            out[name.strip()] = float(value)
        except ValueError:
            raise ConfigError(f"parameter {item!r} has a non-numeric value") from None
    return out


def _parse_bounds(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(v) for v in text.split(","))
    except ValueError:
        raise ConfigError(f"bounds {text!r} must be 'lo,hi'") from None
    if not lo < hi:
        raise ConfigError(f"bounds {text!r} are empty")
    return lo, hi


def resolve_config(command: str, args: argparse.Namespace, env: dict | None = None) -> RunConfig:
    """Merge defaults, config file and flags (flags win) into a RunConfig."""
    env = os.environ if env is None else env
    raw: dict = {}
    if getattr(args, "config", None):
        raw.update(read_config_file(args.config))
    for name in OPTIONS:
        value = getattr(args, name, None)
        if value is not None:
            raw[name] = value
    values: dict = {}
    for name, (conv, default) in OPTIONS.items():
        if name in raw:
            try:
                values[name] = conv(raw[name]) if isinstance(raw[name], str) else raw[name]
            except ValueError:
                raise ConfigError(f"bad value {raw[name]!r} for {name}") from None
        else:
            values[name] = default
    if values["seed"] is None:
        try:
            values["seed"] = int(env.get("HAAR_SEED", "0"))
        except ValueError:
            raise ConfigError("HAAR_SEED must be an integer") from None
    cfg = RunConfig(command=command)
    for name in ("builtin", "forward", "inverse", "base", "dist", "sigma_finite", "measure", "density", "set",
                 "target", "tol_algebraic", "tol_measure", "samples", "sets", "seed", "output", "format"):
        setattr(cfg, name, values[name])
    cfg.params = _parse_params(values["params"])
    if values["domain"]:
        cfg.domain = _parse_bounds(values["domain"])
    if values["codomain"]:
        cfg.codomain = _parse_bounds(values["codomain"])
    if values["checks"]:
        cfg.checks = tuple(c.strip() for c in values["checks"].split(",") if c.strip())
    if not (cfg.tol_algebraic > 0 and cfg.tol_measure > 0):
        raise ConfigError("tolerances must be positive")
    if cfg.samples < 1 or cfg.sets < 1:
        raise ConfigError("samples and sets must be positive")
    if cfg.format not in ("table", "json"):
        raise ConfigError("format must be 'table' or 'json'")
    return cfg


# --------------------------------------------------------------------------
# Constructions
# --------------------------------------------------------------------------


def _number(text: str, what: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"bad {what} {text!r}") from None


def build_transport(cfg: RunConfig) -> TransportResult:
    if cfg.forward or cfg.inverse:
        if cfg.builtin not in (None, "custom"):
            raise ConfigError("give either --builtin or --forward/--inverse, not both")
        if not (cfg.forward and cfg.inverse):
            raise ConfigError("custom transports need both --forward and --inverse")
        f = Bijection1D.from_strings(cfg.forward, cfg.inverse, cfg.params, domain=cfg.domain, codomain=cfg.codomain,
                                     name=f"custom[{cfg.forward}]")
        f.check()
        base, base_measure = base_group(cfg.base)
        return transport(base, base_measure, f)
    name, _, arg = (cfg.builtin or "").partition(":")
    if name == "velocity":
        return velocity_group(_number(arg, "speed"))
    if name == "arctan":
        return arctan_group(_number(arg, "scale"))
    if name == "log" and not arg:
        return log_group()
    if name == "shear":
        try:
            n = int(arg)
        except ValueError:
            raise ConfigError(f"bad dimension in {cfg.builtin!r}") from None
        return shear_group(n)
    raise ConfigError(f"unknown transport {cfg.builtin!r}; see 'catalog'")


def _line_measure(text: str, params: dict) -> MeasureSpec:
    carrier = Carrier.line()
    if text == "lebesgue":
        return lebesgue(carrier)
    e = ex.parse(text, set(params) | set(ex.DEFAULT_PARAMS))
    fn = ex.compile_array(e, params)

    def density(x):
        return np.asarray(fn(np.asarray(x, dtype=float)), dtype=float) * np.ones(np.shape(x))

    return MeasureSpec(f"density[{text}]", carrier, density)


def build_measure(cfg: RunConfig) -> MeasureSpec:
    """Measure for ``integrate``: a named construction or a density expression on the line."""
    if cfg.density:
        return _line_measure(cfg.density, cfg.params)
    sel = cfg.measure or "lebesgue"
    name, _, arg = sel.partition(":")
    if sel == "lebesgue":
        return lebesgue(Carrier.line())
    if name in ("velocity", "arctan", "log", "shear"):
        res = build_transport(RunConfig("integrate", builtin=sel))
        if name == "shear":
            raise ConfigError("integrate handles one-dimensional measures only")
        return res.measure
    try:
        return distribution_from_name(sel).measure()
    except ValueError as exc:
        raise ConfigError(f"unknown measure {sel!r}: {exc}") from None


# --------------------------------------------------------------------------
# Check suites
# --------------------------------------------------------------------------


def _rng(cfg: RunConfig, salt: int) -> np.random.Generator:
    return np.random.default_rng([cfg.seed, salt])


def _elements(g: GroupSpec, rng, n: int) -> list:
    return list(zip(g.sample(rng, n), g.sample(rng, n)))


def _certificate_report(g: GroupSpec, key, cfg: RunConfig) -> verify.Report:
    rng = _rng(cfg, 7)
    tally = verify._Tally(cfg.tol_algebraic)
    for _ in range(cfg.sets):
        pts = g.sample(rng, int(rng.integers(3, 7)))
        cert = one_dimensionality_certificate(g.metric, pts, key=key, tol=cfg.tol_algebraic)
        tally.add(cert.residual if cert.found else math.inf, {"points": pts})
    return tally.report("one-dimensionality", g.name)


def transport_reports(res: TransportResult, cfg: RunConfig) -> list[verify.Report]:
    g = res.group
    one_d = g.carrier.kind != "product"
    checks = cfg.checks or tuple(c for c in TRANSPORT_CHECKS
                                 if (c not in ("pushforward", "certificate", "invariance") or one_d)
                                 and (c != "jacobian" or not one_d))
    out: list[verify.Report] = []
    for c in checks:
        if c == "axioms":
            out.append(verify.check_group_axioms(g, cfg.samples, cfg.tol_algebraic, cfg.seed))
        elif c == "abelian":
            out.append(verify.check_abelian(g, cfg.samples, cfg.tol_algebraic, cfg.seed))
        elif c == "metric":
            out.append(verify.check_metric_invariance(g, cfg.samples, cfg.tol_algebraic, cfg.seed))
        elif c == "invariance":
            if g.translate_set is None:
                raise ConfigError(f"{g.name} has no set translation; drop 'invariance'")
            rng = _rng(cfg, 1)
            sets = verify.random_sets_in_group(g, rng, cfg.sets)
            out.append(verify.check_measure_invariance(g, res.measure, sets, _elements(g, rng, cfg.sets),
                                                       tol=cfg.tol_measure))
        elif c == "pushforward":
            if not isinstance(res.witness, Bijection1D):
                raise ConfigError(f"{g.name} has no one-dimensional witness; drop 'pushforward'")
            sets = verify.random_sets_in_group(g, _rng(cfg, 2), cfg.sets)
            out.append(verify.check_pushforward_consistency(res.base_measure, res.witness, sets,
                                                            tol=max(1e-7, cfg.tol_measure * 0.1),
                                                            pushed=res.measure))
        elif c == "jacobian":
            out.append(verify.check_jacobian_unimodular(g, min(cfg.samples, 100), 1e-8, cfg.seed))
        elif c == "certificate":
            key = res.witness.finv if isinstance(res.witness, Bijection1D) else None
            out.append(_certificate_report(g, key, cfg))
        elif c == "tags":
            out.extend(verify.declared_tags(g))
        else:
            raise ConfigError(f"unknown check {c!r}; choose from {', '.join(TRANSPORT_CHECKS)}")
    return out


def haarize_reports(cfg: RunConfig) -> tuple[dict, list[verify.Report]]:
    if cfg.sigma_finite:
        return _sigma_reports(cfg)
    if not cfg.dist:
        raise ConfigError("haarize needs --dist or --sigma-finite")
    try:
        d = distribution_from_name(cfg.dist)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    h = haarize_probability(d)
    g, m = h.group, h.measure
    summary = {
        "group": g.name,
        "identity": g.identity,
        "escape": None if h.shift is None else {"start": h.shift.start, "step": h.shift.step},
        "support": list(d.support),
    }
    out: list[verify.Report] = []
    for c in cfg.checks or HAARIZE_CHECKS:
        if c == "axioms":
            out.append(verify.check_group_axioms(g, cfg.samples, cfg.tol_algebraic, cfg.seed))
        elif c == "abelian":
            out.append(verify.check_abelian(g, cfg.samples, cfg.tol_algebraic, cfg.seed))
        elif c == "metric":
            out.append(verify.check_metric_invariance(g, cfg.samples, cfg.tol_algebraic, cfg.seed))
        elif c in ("invariance", "inverse", "quasi"):
            rng = _rng(cfg, {"invariance": 1, "inverse": 3, "quasi": 4}[c])
            sets = verify.random_sets_in_group(g, rng, cfg.sets)
            if c == "invariance":
                out.append(verify.check_measure_invariance(g, m, sets, _elements(g, rng, cfg.sets),
                                                           tol=cfg.tol_measure))
            elif c == "inverse":
                out.append(verify.check_inverse_invariance(g, m, sets, tol=cfg.tol_measure))
            else:
                out.append(verify.check_quasi_invariance(g, m, sets, _elements(g, rng, cfg.sets)))
        elif c == "mass":
            out.append(verify.check_total_mass(m))
        elif c == "tags":
            out.extend(verify.declared_tags(g))
        else:
            raise ConfigError(f"unknown check {c!r}; choose from {', '.join(HAARIZE_CHECKS)}")
    return summary, out


def _sigma_reports(cfg: RunConfig) -> tuple[dict, list[verify.Report]]:
    try:
        m = _line_measure(cfg.sigma_finite, cfg.params)
    except ex.ExprError as exc:
        raise ConfigError(str(exc)) from None
    res = haarize_sigma_finite(m, LinePartition(), LinePartition(), seed=cfg.seed)
    g = res.group
    summary = {"group": g.name, "identity": g.identity, "truncation_k": res.truncation_k,
               "equivalent": res.equivalent}
    out: list[verify.Report] = []
    for c in cfg.checks or SIGMA_CHECKS:
        if c == "axioms":
            out.append(verify.check_group_axioms(g, cfg.samples, cfg.tol_algebraic, cfg.seed))
        elif c == "abelian":
            out.append(verify.check_abelian(g, cfg.samples, cfg.tol_algebraic, cfg.seed))
        elif c == "metric":
            out.append(verify.check_metric_invariance(g, cfg.samples, cfg.tol_algebraic, cfg.seed))
        elif c == "invariance":
            rng = _rng(cfg, 5)
            # sets inside [-2, 3) meet at most five unit parts
            sets = verify.random_interval_sets(rng, cfg.sets, -2.0, 3.0)
            elements = [(float(a), float(b)) for a, b in rng.uniform(-4.0, 4.0, (cfg.sets, 2))]
            out.append(verify.check_measure_invariance(g, res.measure, sets, elements, tol=cfg.tol_measure))
        elif c == "series":
            t = verify._Tally(1e-8)
            for s in verify.random_interval_sets(_rng(cfg, 6), min(cfg.sets, 20), -2.0, 3.0):
                t.add(abs(res.series(s) - integrate(res.measure, s, 1e-12)), {"set": s})
            out.append(t.report("series-vs-density", g.name))
        elif c == "equivalence":
            t = verify._Tally(0.0)
            t.add(0.0 if res.equivalent else 1.0, {"measure": m.name})
            out.append(t.report("equivalence", g.name))
        elif c == "tags":
            out.extend(verify.declared_tags(g))
        else:
            raise ConfigError(f"unknown check {c!r}; choose from {', '.join(SIGMA_CHECKS)}")
    return summary, out


# --------------------------------------------------------------------------
# Output
# --------------------------------------------------------------------------


def _config_dict(cfg: RunConfig) -> dict:
    d = asdict(cfg)
    d.pop("output")
    d.pop("format")
    d["domain"] = [str(v) if not math.isfinite(v) else v for v in cfg.domain]
    d["codomain"] = [str(v) if not math.isfinite(v) else v for v in cfg.codomain]
    d["checks"] = list(cfg.checks)
    return d


def _exit_code(reports: Sequence[verify.Report]) -> int:
    graded = [r for r in reports if r.verdict != verify.DECLARED]
    return EXIT_OK if all(r.passed for r in graded) else EXIT_CHECK


def json_lines(cfg: RunConfig, summary: dict, reports: Sequence[verify.Report], timestamp: str) -> list[str]:
    header = {"type": "header", "schema": SCHEMA, "command": cfg.command, "config": _config_dict(cfg),
              "construction": verify._jsonable(summary), "timestamp": timestamp}
    lines = [json.dumps(header, sort_keys=True, ensure_ascii=False)]
    for r in reports:
        lines.append(json.dumps({"type": "report", **r.to_dict()}, sort_keys=True, ensure_ascii=False))
    tail = {"type": "summary", "reports": len(reports), "exit_code": _exit_code(reports),
            "failed": [r.check for r in reports if r.verdict in (verify.FAIL, verify.INCONCLUSIVE)]}
    lines.append(json.dumps(tail, sort_keys=True, ensure_ascii=False))
    return lines


def table(summary: dict, reports: Sequence[verify.Report]) -> str:
    rows = [f"{k}: {v}" for k, v in summary.items()]
    if reports:
        rows.append(f"{'check':30s} {'group':30s} {'n':>6s} {'max residual':>13s} {'tol':>9s}  verdict")
        for r in reports:
            res = "-" if math.isnan(r.max_residual) else f"{r.max_residual:.3e}"
            rows.append(f"{r.check:30s} {r.group[:30]:30s} {r.samples:6d} {res:>13s} {r.tol:9.1e}  {r.verdict}")
    return "\n".join(rows)


def emit(cfg: RunConfig, summary: dict, reports: Sequence[verify.Report], out=None) -> int:
    out = out or sys.stdout
    stamp = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    lines = json_lines(cfg, summary, reports, stamp)
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
    if cfg.format == "json":
        out.write("\n".join(lines) + "\n")
    else:
        out.write(table(summary, reports) + "\n")
    return _exit_code(reports)


# --------------------------------------------------------------------------
# Commands
# --------------------------------------------------------------------------


def cmd_catalog(args, out) -> int:
    if getattr(args, "format", None) == "json":
        for kind, name, formula in CATALOG:
            out.write(json.dumps({"kind": kind, "name": name, "formula": formula}, ensure_ascii=False) + "\n")
    else:
        for kind, name, formula in CATALOG:
            out.write(f"{kind:13s} {name:34s} {formula}\n")
    return EXIT_OK


def _transport_summary(res: TransportResult) -> dict:
    return {"group": res.group.name, "provenance": res.provenance, "identity": res.group.identity,
            "carrier": str(res.group.carrier), "measure": res.measure.name,
            "abelian": res.group.tags.abelian, "compactness": res.group.tags.compactness}


def cmd_transport(args, out) -> int:
    cfg = resolve_config("transport", args)
    if not (cfg.builtin or cfg.forward or cfg.inverse):
        raise ConfigError("transport needs --builtin or --forward/--inverse")
    res = build_transport(cfg)
    return emit(cfg, _transport_summary(res), transport_reports(res, cfg), out)


def cmd_haarize(args, out) -> int:
    cfg = resolve_config("haarize", args)
    summary, reports = haarize_reports(cfg)
    return emit(cfg, summary, reports, out)


def cmd_integrate(args, out) -> int:
    cfg = resolve_config("integrate", args)
    if not cfg.set:
        raise ConfigError("integrate needs --set")
    try:
        s = parse_interval_set(cfg.set)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    m = build_measure(cfg)
    if not s.within(m.carrier.lo, m.carrier.hi):
        raise ConfigError(f"{s} is not inside the carrier {m.carrier}")
    mass = integrate(m, s, min(cfg.tol_measure, 1e-10))
    summary = {"measure": m.name, "set": s.to_list(), "mass": mass}
    if cfg.format == "json" or cfg.output:
        return emit(cfg, summary, [], out)
    out.write(f"{m.name} {s} = {mass!r}\n")
    return EXIT_OK


def cmd_verify(args, out) -> int:
    cfg = resolve_config("verify", args)
    target = cfg.target or "all"
    summary: dict = {"target": target}
    reports: list[verify.Report] = []
    if target in ("mutants", "all"):
        from .mutants import run_mutants

        for mutant, report in run_mutants():
            caught = report.verdict == verify.FAIL
            reports.append(verify.Report(f"mutant:{mutant.name}", report.group, report.samples,
                                         0.0 if caught else 1.0, 0.0, verify.PASS if caught else verify.FAIL,
                                         note=f"{mutant.check} must reject: {mutant.description}"))
    names: list[str] = []
    if target == "all":
        names = ["velocity:1", "log", "arctan:1", "shear:3", "haarized:uniform", "haarized:exponential:1",
                 "haarized:normal:0,1", "haarized:cauchy:0,1", "sigma:lebesgue"]
    elif target != "mutants":
        names = [target]
    for name in names:
        sub = RunConfig(**{**asdict(cfg), "command": "verify"})
        if name.startswith("haarized:"):
            sub.dist = name.split(":", 1)[1]
            reports.extend(haarize_reports(sub)[1])
        elif name.startswith("sigma:"):
            sub.sigma_finite = name.split(":", 1)[1]
            reports.extend(_sigma_reports(sub)[1])
        else:
            sub.builtin = name
            reports.extend(transport_reports(build_transport(sub), sub))
    return emit(cfg, summary, reports, out)


# --------------------------------------------------------------------------
# Argument parsing
# --------------------------------------------------------------------------


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="INI file; keys mirror the long flags")
    p.add_argument("--checks", help="comma-separated check names (default: the full suite)")
    p.add_argument("--tol-algebraic", type=float, dest="tol_algebraic")
    p.add_argument("--tol-measure", type=float, dest="tol_measure")
    p.add_argument("--samples", type=int, help="points per algebraic check")
    p.add_argument("--sets", type=int, help="random sets per measure check")
    p.add_argument("--seed", type=int, help="random seed (default: $HAAR_SEED or 0)")
    p.add_argument("--output", help="write the JSON-lines report here")
    p.add_argument("--format", choices=("table", "json"))
    p.add_argument("--params", help="expression parameters, e.g. c=2,a=1")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="haargroups", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("catalog", help="list built-in groups, transports and distributions")
    p.add_argument("--format", choices=("table", "json"), default="table")

    p = sub.add_parser("transport", help="build a transported group and check it")
    p.add_argument("--builtin", help="velocity:<c> | log | arctan:<c> | shear:<n> | custom")
    p.add_argument("--forward", help="forward expression in x")
    p.add_argument("--inverse", help="inverse expression in x")
    p.add_argument("--domain", help="lo,hi of the forward map (default -inf,inf)")
    p.add_argument("--codomain", help="lo,hi of the image (default -inf,inf)")
    p.add_argument("--base", help="real-line | circle")
    _add_common(p)

    p = sub.add_parser("haarize", help="make a measure on the line the Haar measure of a group")
    p.add_argument("--dist", help="uniform | exponential:<rate> | normal:<m>,<sd> | cauchy:<l>,<s> | beta:<a>,<b>")
    p.add_argument("--sigma-finite", dest="sigma_finite", help="lebesgue or a density expression in x")
    _add_common(p)

    p = sub.add_parser("integrate", help="mass of an interval set")
    p.add_argument("--measure", help="lebesgue | velocity:<c> | log | arctan:<c> | a distribution name")
    p.add_argument("--density", help="density expression in x on the line")
    p.add_argument("--set", help="interval set literal, e.g. [0,0.5)u[0.7,0.9)")
    _add_common(p)

    p = sub.add_parser("verify", help="run the check suites on built-ins and the harness mutants")
    p.add_argument("--target", help="all | mutants | velocity:<c> | log | arctan:<c> | shear:<n> | "
                                    "haarized:<dist> | sigma:<lebesgue|expr>")
    _add_common(p)
    return parser


COMMANDS = {
    "catalog": cmd_catalog,
    "transport": cmd_transport,
    "haarize": cmd_haarize,
    "integrate": cmd_integrate,
    "verify": cmd_verify,
}


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args, out)
    except (*CONSTRUCTION_ERRORS, ex.DomainError) as exc:
        print(f"construction failed: {exc}", file=sys.stderr)
        return EXIT_CONSTRUCTION
    except (ConfigError, ex.ExprError, SetOutsideCarrier, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (QuadratureError, ArithmeticError) as exc:
        print(f"quadrature failed: {exc}", file=sys.stderr)
        return EXIT_CHECK


if __name__ == "__main__":
    raise SystemExit(main())
