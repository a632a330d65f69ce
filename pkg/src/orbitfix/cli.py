"""Command-line front end: one JSON config in, one JSON report out.

Exit codes: 0 when every check is consistent, 1 when a theorem or invariant
violation was found, 2 for configuration errors.
"""
from __future__ import annotations

import argparse
import inspect
import json
import math
import sys
import time
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from . import __version__
from .descent import (
    CERTIFIED,
    DescentConfig,
    GridDomain,
    ImproperObjective,
    InvariantViolation,
    NestedFamily,
    ObjectiveFunction,
    UnboundedBelow,
    caristi_check,
    cantor_intersect,
    ekeland_descent,
    strong_min_descent,
)
from .finite_topology import (
    LARGE_POINTS,
    MAX_POINTS,
    FiniteOrbitError,
    FiniteSpace,
    NotAnOrbitError,
    brute_force_topologies,
    check_fixed_point_theorem,
    cover_condition,
    enumerate_maps,
    enumerate_orbits,
    enumerate_topologies,
    exhaustive_cover_check,
    graph_complement_is_open,
    is_closed_graph,
    is_tau_contractive,
    loads_instance,
    minimal_base,
    separation_class,
    strong_accumulation_points,
    sweep,
    witness_mask,
    bits,
)
from .gallery import SCENARIOS, moore_plane_scenario, rational_line, two_origins_premetric
from .orbit_engine import orbit_dump
from .premetric import FAIL, Premetric, Probe, PSpaceInstance, audit_axioms, base_convergence, tends_to_zero
from .remetrize import IterationSystem, a1_a2_check
from .schema import SCHEMA_VERSION

OK, VIOLATION, CONFIG_ERROR = 0, 1, 2


class ConfigError(ValueError):
    pass


@dataclass
class Outcome:
    verdicts: dict
    certificates: dict
    series: dict
    exit_code: int = OK


# --------------------------------------------------------------------------
# config handling

DEFAULTS = {
    "verify-finite": {"n": 3, "allow_large": False, "maps": "all", "instance": None, "seed": None},
    "descend": {
        "solver": "ekeland", "objective": "square", "x1": "1", "grid": None, "budget": 1 << 15,
        "max_steps": 200, "eps0": "1/1048576", "tol": 0.0, "family": "zero", "cap": 64, "seed": None,
    },
    "gallery": {
        "scenario": "rationals", "max_steps": None, "tol": 1e-6, "radii": "harmonic", "variant": "p",
        "length": 40, "K": 2, "seed": None,
    },
    "audit": {"instance": "rational-line", "pair_budget": 200, "tol": None, "seed": None},
    "remetrize": {
        "map": "half", "O": ["0", "1"], "O_points": 33, "domain": None, "xbar": None,
        "eps_schedule": [1e-1, 1e-3, 1e-6, 1e-9], "max_steps": 64, "seed": None,
    },
}

# commands whose runs draw random samples and therefore need a seed
SAMPLED = {"descend", "gallery", "audit"}


def load_config(command: str, path: str | None, args) -> dict:
    cfg = dict(DEFAULTS[command])
    raw = {}
    if path:
        try:
            with open(path) as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
    raw.pop("command", None)
    unknown = sorted(set(raw) - set(cfg))
    if unknown:
        raise ConfigError(f"unknown config key(s) for {command}: {', '.join(unknown)}")
    cfg.update(raw)
    for flag, key in (("seed", "seed"), ("max_steps", "max_steps"), ("tol", "tol")):
        val = getattr(args, flag)
        if val is None:
            continue
        if key not in cfg:
            raise ConfigError(f"--{flag.replace('_', '-')} does not apply to {command}")
        cfg[key] = val
    seed = cfg.get("seed")
    if seed is not None and (not isinstance(seed, int) or isinstance(seed, bool) or not 0 <= seed < 1 << 64):
        raise ConfigError("seed must be an unsigned 64-bit integer")
    if command in SAMPLED and seed is None:
        raise ConfigError(f"{command} draws random samples; a seed is required (--seed or config 'seed')")
    return cfg


def _frac(value, key) -> Fraction:
    try:
        return Fraction(str(value))
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"{key}: expected a rational such as '1/4096', got {value!r}") from None


def _choice(cfg, key, options):
    if cfg[key] not in options:
        raise ConfigError(f"{key} must be one of {sorted(options)}, got {cfg[key]!r}")
    return cfg[key]


def _int(cfg, key, lo=0):
    v = cfg[key]
    if not isinstance(v, int) or isinstance(v, bool) or v < lo:
        raise ConfigError(f"{key} must be an integer >= {lo}")
    return v


# --------------------------------------------------------------------------
# verify-finite

def _instance_report(text: str) -> Outcome:
    space, smap, orbit = loads_instance(text)
    flags = separation_class(space)
    verdicts: dict[str, Any] = {
        "n": space.n,
        "opens": [bits(u) for u in space.sorted_opens()],
        "minimal_base": [bits(m) for m in minimal_base(space)],
        "separation": vars(flags),
    }
    if smap is None:
        return Outcome(verdicts, {}, {})
    closed = is_closed_graph(space, smap)
    verdicts["closed_graph"] = closed
    verdicts["closed_graph_agrees"] = closed == graph_complement_is_open(space, smap)
    verdicts["fixed_points"] = smap.fixed_points()
    orbits = [orbit] if orbit is not None else [o for s in range(space.n) for o in enumerate_orbits(smap, s)]
    opens = space.sorted_opens()
    records, bad = [], not verdicts["closed_graph_agrees"]
    for o in orbits:
        tau = is_tau_contractive(space, smap, o)
        cov = cover_condition(space, smap, o)
        pairs = [(x, smap.image(x)) for x in set(o.points())]
        agree = tau.holds == exhaustive_cover_check(space, opens, witness_mask(space, opens, pairs))
        rec = check_fixed_point_theorem(space, smap, o)
        bad |= not agree or not rec.consistent
        records.append({
            "orbit": {"tail": list(o.tail), "cycle": list(o.cycle)},
            "tau_contractive": tau.holds,
            "failing_cover": sorted(bits(u) for u in tau.failing_cover) if tau.failing_cover else None,
            "oracle_agrees": agree,
            "cover_condition": cov.holds,
            "strong_accumulation_points": sorted(strong_accumulation_points(space, smap, o)),
            "theorem_consistent": rec.consistent,
        })
    verdicts["orbits"] = records
    return Outcome(verdicts, {}, {}, VIOLATION if bad else OK)


def cmd_verify_finite(cfg: dict) -> Outcome:
    if cfg["instance"]:
        try:
            with open(cfg["instance"]) as fh:
                text = fh.read()
            return _instance_report(text)
        except OSError as exc:
            raise ConfigError(f"cannot read instance: {exc}") from None
        except (NotAnOrbitError, FiniteOrbitError, ValueError) as exc:
            raise ConfigError(f"malformed instance: {exc}") from None
    n = _int(cfg, "n", 1)
    cap = LARGE_POINTS if cfg["allow_large"] else MAX_POINTS
    if n > cap:
        raise ConfigError(f"n={n} exceeds the enumeration cap of {MAX_POINTS} points "
                          f"({LARGE_POINTS} with allow_large)")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        spaces = list(enumerate_topologies(n, allow_large=cfg["allow_large"]))
    verdicts: dict[str, Any] = {"topologies": len(spaces)}
    bad = False
    if n <= MAX_POINTS:
        brute = set(brute_force_topologies(n))
        verdicts["brute_force_count"] = len(brute)
        verdicts["counts_agree"] = brute == {s.opens for s in spaces}
        bad |= not verdicts["counts_agree"]
    tally: dict[str, int] = {}
    t1_ok = True
    for s in spaces:
        f = separation_class(s)
        label = "discrete" if f.discrete else "T1" if f.t1 else "T0" if f.t0 else "none"
        tally[label] = tally.get(label, 0) + 1
        t1_ok &= f.t1 == f.discrete == f.hausdorff
    verdicts["separation"] = tally
    verdicts["t1_discrete_hausdorff_agree"] = t1_ok
    bad |= not t1_ok

    maps = cfg["maps"]
    if maps == "all" and n <= 3:
        chooser = None
        verdicts["map_sweep"] = "exhaustive"
    else:
        if maps == "all":
            maps = 32
        if not isinstance(maps, int) or maps < 1:
            raise ConfigError("maps must be 'all' (n <= 3) or a positive integer")
        if cfg["seed"] is None:
            raise ConfigError("sampling maps needs a seed (--seed or config 'seed')")
        import random
        rng = random.Random(cfg["seed"])

        def chooser(k):
            from .finite_topology import FiniteSetMap
            for _ in range(maps):
                yield FiniteSetMap(tuple(rng.randrange(1 << k) for _ in range(k)))

        verdicts["map_sweep"] = f"{maps} sampled per space"
    summary = sweep(spaces, chooser)
    verdicts["sweep"] = summary.as_dict()
    bad |= not summary.consistent
    return Outcome(verdicts, {}, {}, VIOLATION if bad else OK)


# --------------------------------------------------------------------------
# descend

def _escape(x):
    return x * x if abs(x) <= 1 else 1 / (x * x)


OBJECTIVES = {
    "square": (lambda x: x * x, ("-2", "2", "1/4096"), 0),
    "abs": (abs, ("-2", "2", "1/4096"), 0),
    "escape": (_escape, ("-64", "64", "1/16"), 0),
    "constant": (lambda x: Fraction(1), ("-1", "1", "1/16"), 1),
}


def _sqrt2_bounds(i):
    scale = 10 ** i
    a = Fraction(math.isqrt(2 * scale * scale), scale)
    return a, a + Fraction(1, scale)


FAMILIES = {
    "zero": lambda i: (Fraction(0), Fraction(1, i)),
    "symmetric": lambda i: (Fraction(-1, i), Fraction(1, i)),
    "sqrt2": _sqrt2_bounds,
}


def cmd_descend(cfg: dict) -> Outcome:
    solver = _choice(cfg, "solver", {"ekeland", "strong-min", "cantor", "caristi"})
    tol = float(cfg["tol"])
    dconf = dict(budget=_int(cfg, "budget", 1), max_steps=_int(cfg, "max_steps"), seed=cfg["seed"],
                 eps0=_frac(cfg["eps0"], "eps0"), tolerance=tol)
    p = Premetric(lambda x, y: abs(x - y), name="|x-y|")
    if solver == "cantor":
        fam = NestedFamily.intervals(FAMILIES[_choice(cfg, "family", set(FAMILIES))], name=cfg["family"])
        res = cantor_intersect(fam, rational_line(), DescentConfig(**dconf), cap=_int(cfg, "cap", 1))
        cert = {"point": res.point, "status": res.status, "depths": res.depths,
                "membership": res.membership}
        series = {"orbit_dump": orbit_dump(res.orbit)}
        return Outcome({"cantor": res.status}, {"cantor": cert}, series)

    name = _choice(cfg, "objective", set(OBJECTIVES))
    fn, default_grid, lower = OBJECTIVES[name]
    grid = cfg["grid"] or dict(zip(("lo", "hi", "step"), default_grid))
    if not isinstance(grid, dict) or set(grid) != {"lo", "hi", "step"}:
        raise ConfigError("grid must be an object with keys lo, hi, step")
    try:
        domain = GridDomain(*(_frac(grid[k], f"grid.{k}") for k in ("lo", "hi", "step")))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    f = ObjectiveFunction(fn, domain, lower_bound=lower, name=name)
    x1 = _frac(cfg["x1"], "x1")
    try:
        if solver == "ekeland":
            cert = ekeland_descent(f, p, x1, DescentConfig(**dconf))
            ok = cert.length_bound_ok
            return Outcome({"length_bound": ok, "classification": cert.classification},
                           {"ekeland": cert.as_dict()},
                           {"orbit_dump": orbit_dump(cert.orbit, f)}, OK if ok else VIOLATION)
        if solver == "strong-min":
            inst = rational_line()
            cert = strong_min_descent(f, inst, x1, DescentConfig(**dconf))
            return Outcome({"strong_minimum": cert.strong_minimum, "classification": cert.classification},
                           {"strong_min": cert.as_dict()}, {"orbit_dump": orbit_dump(cert.orbit, f)})
        # caristi: T(x) = x/2 satisfies the premise for f = 2|x|
        f2 = ObjectiveFunction(lambda x: 2 * abs(x), domain, lower_bound=0, name="2|x|")
        rep = caristi_check(lambda x: x / 2, f2, p, [x1] + domain.points()[:: max(1, len(domain) // 64)],
                            tolerance=tol, config=DescentConfig(**dconf))
        out = {"premise_holds": rep.premise_holds, "fixed_point": rep.fixed_point, "is_fixed": rep.is_fixed,
               "witness": rep.witness}
        ok = not rep.premise_holds or bool(rep.is_fixed)
        return Outcome({"caristi": out}, {"caristi": rep.certificate.as_dict() if rep.certificate else None}, {},
                       OK if ok else VIOLATION)
    except ImproperObjective as exc:
        raise ConfigError(str(exc)) from None
    except (InvariantViolation, UnboundedBelow) as exc:
        return Outcome({"error": f"{type(exc).__name__}: {exc}"}, {}, {}, VIOLATION)


# --------------------------------------------------------------------------
# gallery

def _gallery_consistent(name, r) -> bool:
    if name == "rationals":
        return r["classification"] == "strict_fixed_point" and r["halving_exact"]
    if name == "two-origins":
        return r["non_hausdorff_witness"] is not None and all(
            o["classification"] == "violation" for o in r["origins"].values())
    if name == "moore":
        return r["classification_at_origin"] == "strict_fixed_point" and tends_to_zero(r["diagonal_p_to_origin"], 1e-6)
    return r["S_classification"] == "empty_value" and r["T_classification"] == "strict_fixed_point"


def cmd_gallery(cfg: dict) -> Outcome:
    name = _choice(cfg, "scenario", set(SCENARIOS))
    fn = SCENARIOS[name]
    params = inspect.signature(fn).parameters
    kwargs = {k: cfg[k] for k in ("seed", "max_steps", "tol", "radii", "variant", "length", "K")
              if k in params and cfg[k] is not None}
    try:
        r = fn(**kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    dump = r.pop("orbit_dump", None)
    ok = _gallery_consistent(name, r)
    r["conformance"] = ok
    return Outcome(r, {}, {"orbit_dump": dump} if dump else {}, OK if ok else VIOLATION)


# --------------------------------------------------------------------------
# audit

def _zero_instance() -> PSpaceInstance:
    same = lambda c, n, y: y == c
    return PSpaceInstance(
        name="zero", p=Premetric(lambda x, y: 0, name="p=0"),
        converges=base_convergence(same, 4),
        sample_points=lambda k, rng: [0, 1],
        probes=[Probe("constant 0", (0,) * 8, 0), Probe("constant 1", (1,) * 8, 1)],
    )


AUDIT_INSTANCES = {
    "rational-line": rational_line,
    "two-origins": lambda: two_origins_premetric("harmonic"),
    "two-origins-dyadic": lambda: two_origins_premetric("dyadic"),
    "moore": lambda: moore_plane_scenario()[0],
    "zero": _zero_instance,
}


def cmd_audit(cfg: dict) -> Outcome:
    inst = AUDIT_INSTANCES[_choice(cfg, "instance", set(AUDIT_INSTANCES))]()
    rep = audit_axioms(inst, pair_budget=_int(cfg, "pair_budget", 1), tail_tol=cfg["tol"], seed=cfg["seed"])
    failed = rep.failed()
    return Outcome({"axioms": rep.as_dict(), "failed": failed, "passed": rep.passed}, {}, {},
                   VIOLATION if failed else OK)


# --------------------------------------------------------------------------
# remetrize

def _circle(a, b):
    t = abs(a - b) % (2 * math.pi)
    return min(t, 2 * math.pi - t)


MAPS = {
    "half": (lambda x: x / 2, None),
    "identity": (lambda x: x, None),
    "square": (lambda x: x * x, None),
    "constant": (lambda x: 0.0, None),
    "rotation": (lambda a: (a + 1.0) % (2 * math.pi), _circle),
}


def cmd_remetrize(cfg: dict) -> Outcome:
    name = _choice(cfg, "map", set(MAPS))
    f, d = MAPS[name]
    d = d or (lambda x, y: abs(x - y))
    try:
        lo, hi = (float(_frac(v, "O")) for v in cfg["O"])
    except (TypeError, ValueError):
        raise ConfigError("O must be a pair [lo, hi]") from None
    k = _int(cfg, "O_points", 2)
    O = [lo + (hi - lo) * j / (k - 1) for j in range(k)]
    domain = [float(_frac(v, "domain")) for v in cfg["domain"]] if cfg["domain"] else O
    eps = [float(e) for e in cfg["eps_schedule"]]
    if not eps or min(eps) <= 0:
        raise ConfigError("eps_schedule must be a nonempty list of positive numbers")
    system = IterationSystem(f, d, domain=domain, neighborhood=O, name=name)
    xbar = None if cfg["xbar"] is None else float(_frac(cfg["xbar"], "xbar"))
    rep = a1_a2_check(system, xbar, eps, horizon=_int(cfg, "max_steps", 1))
    out = rep.as_dict()
    series = {"sup_series": out.pop("sup_series")}
    # the hypotheses imply t-contractivity on the same samples
    ok = not rep.conclusion or rep.t_contraction.status == "pass"
    return Outcome(out, {"remetrization": {"conclusion": out["conclusion"]}}, series, OK if ok else VIOLATION)


COMMANDS = {
    "verify-finite": cmd_verify_finite,
    "descend": cmd_descend,
    "gallery": cmd_gallery,
    "audit": cmd_audit,
    "remetrize": cmd_remetrize,
}


# --------------------------------------------------------------------------
# report assembly

def to_jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = [to_jsonable(v) for v in obj]
        return sorted(items, key=json.dumps) if isinstance(obj, (set, frozenset)) else items
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else str(obj)
    if isinstance(obj, Fraction):
        return str(obj)
    return str(obj)


def run(command: str, cfg: dict) -> dict:
    start = time.perf_counter()
    outcome = COMMANDS[command](cfg)
    return {
        "schema_version": SCHEMA_VERSION,
        "version": __version__,
        "command": command,
        "config": to_jsonable(cfg),
        "verdicts": to_jsonable(outcome.verdicts),
        "certificates": to_jsonable(outcome.certificates),
        "series": to_jsonable(outcome.series),
        "exit_code": outcome.exit_code,
        "status": "ok" if outcome.exit_code == OK else "violation",
        "wall_time": time.perf_counter() - start,
    }


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="orbitfix", description="Orbit-based fixed point checks.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="JSON config file")
        sp.add_argument("--seed", type=int, help="unsigned 64-bit seed")
        sp.add_argument("--out", help="write the report here instead of stdout")
        sp.add_argument("--max-steps", dest="max_steps", type=int)
        sp.add_argument("--tol", type=float)
        if name == "gallery":
            sp.add_argument("--scenario", choices=sorted(SCENARIOS))
        if name == "verify-finite":
            sp.add_argument("--n", type=int)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return CONFIG_ERROR if exc.code else OK
    try:
        cfg = load_config(args.command, args.config, args)
        if getattr(args, "scenario", None):
            cfg["scenario"] = args.scenario
        if getattr(args, "n", None) is not None:
            cfg["n"] = args.n
        report = run(args.command, cfg)
    except ConfigError as exc:
        print(f"orbitfix: config error: {exc}", file=sys.stderr)
        return CONFIG_ERROR
    text = json.dumps(report, sort_keys=True, indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return report["exit_code"]


if __name__ == "__main__":
    sys.exit(main())
