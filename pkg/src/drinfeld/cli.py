"""Command-line front end: batched checks, JSON report bundles, exit codes.

Exit code 0 means every executed check PASSed or was VACUOUS, 1 means some
check FAILed or ERRORed, 2 means a usage problem (unknown subcommand,
unknown check id, missing or malformed parameters).
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from importlib import resources
from time import perf_counter

from . import __version__, counting, cremona, divlat, foliation, linsys, moore
from .field import make_tower, record_towers, tower_for_q
from .report import (DEFAULT_BUDGET, ERROR, FAIL, SCHEMA_VERSION, Budget,
                     CheckReport, ResourceBudgetError, dumps)

TOOL_NAME = "drinfeld"


class UsageError(Exception):
    """Bad invocation: reported on stderr, exit code 2."""


def _prime_of(q: int) -> int:
    p = 2
    while q % p:
        p += 1
        if p * p > q:
            return q
    return p


# ---------------------------------------------------------------------------
# check registry
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CheckDef:
    run: object
    required: tuple
    optional: tuple = ()


def _build_registry():
    reg = {}

    def add(check_id, run, required, optional=()):
        if check_id in reg:
            raise AssertionError(f"duplicate check id {check_id}")
        reg[check_id] = CheckDef(run, tuple(required), tuple(optional))

    add("moore-identity",
        lambda budget, q, n: moore.verify_moore_identity(q, n, budget),
        ("q", "n"))
    add("moore-partial",
        lambda budget, q, n: moore.verify_partial_identity(q, n, budget),
        ("q", "n"))

    add("graph-relations",
        lambda budget, q, n: cremona.verify_graph_relations(q, n, budget),
        ("q", "n"))
    add("psi-squared",
        lambda budget, q, n: cremona.verify_psi_squared(q, n, budget),
        ("q", "n"))
    add("phi-bar",
        lambda budget, q, n: cremona.verify_phi_bar(q, n, budget),
        ("q", "n"))
    add("omega-endo",
        lambda budget, q, n, m: cremona.verify_omega_endomorphism(
            q, n, m, budget),
        ("q", "n", "m"))
    add("flop-local",
        lambda budget, q: cremona.verify_flop(q, budget),
        ("q",))

    add("foliation-bracket",
        lambda budget, q, n: foliation.verify_bracket_identity(q, n, budget),
        ("q", "n"))
    add("foliation-pclosed",
        lambda budget, q: foliation.verify_p_closed(q, budget),
        ("q",))
    add("foliation-saito",
        lambda budget, q, n: foliation.saito_log_tangent_check(q, n, budget),
        ("q", "n"))
    add("foliation-h-identity",
        lambda budget, q, n: foliation.verify_h_identity(q, n, budget),
        ("q", "n"))
    add("foliation-chart-form",
        lambda budget, q, n: foliation.verify_chart_form(q, n, budget),
        ("q", "n"))
    add("foliation-chart-field",
        lambda budget, q, n, j=None: (
            foliation.verify_chart_field(q, n, j, budget) if j is not None
            else foliation.verify_chart_field_all(q, n, budget)),
        ("q", "n"), ("j",))
    add("foliation-splitting",
        lambda budget, q: foliation.verify_splitting(q, budget),
        ("q",))

    add("lattice-surface",
        lambda budget, q: divlat.verify_surface_ledger(q, budget),
        ("q",))
    add("lattice-threefold",
        lambda budget, q: divlat.verify_threefold_ledger(
            q, _prime_of(q), budget),
        ("q",))
    add("cone-discrepancy",
        lambda budget, m, d: divlat.verify_cone_discrepancy(m, d),
        ("m", "d"))

    add("linsys-dim",
        lambda budget, q, n, c: linsys.en_dimension_check(n, c, q, budget),
        ("q", "n", "c"))
    add("linsys-vanishing",
        lambda budget, q: linsys.vanishing_zero_checks(q, budget),
        ("q",))
    add("linsys-serre",
        lambda budget, q, m: linsys.moving_singularity_check(q, m, budget),
        ("q", "m"))
    add("linsys-appendix",
        lambda budget, q=2: linsys.nodal_cubic_experiment(q, budget),
        (), ("q",))

    add("count-strata",
        lambda budget, q, n, m: counting.verify_strata_counts(n, q, m, budget),
        ("q", "n", "m"))
    add("count-flags",
        lambda budget, q, m: counting.verify_flag_count(q, m, budget),
        ("q", "m"))
    add("count-b2",
        lambda budget, q: counting.verify_b2(q, budget),
        ("q",))

    return reg


REGISTRY = _build_registry()

_FOLIATION_CHECKS = {
    "bracket": "foliation-bracket",
    "pclosed": "foliation-pclosed",
    "saito": "foliation-saito",
    "chart-form": "foliation-chart-form",
    "chart-field": "foliation-chart-field",
    "h-identity": "foliation-h-identity",
    "splitting": "foliation-splitting",
}


def _validate_entry(check_id: str, params: dict) -> None:
    defn = REGISTRY.get(check_id)
    if defn is None:
        raise UsageError(
            f"unknown check id {check_id!r}; valid ids: "
            + ", ".join(sorted(REGISTRY)))
    allowed = set(defn.required) | set(defn.optional)
    missing = [k for k in defn.required if k not in params]
    extra = [k for k in params if k not in allowed]
    if missing:
        raise UsageError(
            f"check {check_id!r} needs parameters: {', '.join(missing)}")
    if extra:
        raise UsageError(
            f"check {check_id!r} does not take: {', '.join(sorted(extra))}")
    for k, v in params.items():
        if not isinstance(v, int) or isinstance(v, bool):
            raise UsageError(
                f"check {check_id!r} parameter {k!r} must be an integer")


def run_check(check_id: str, params: dict,
              budget: Budget = DEFAULT_BUDGET) -> CheckReport:
    """Execute one registered check; budget overruns become ERROR reports."""
    _validate_entry(check_id, params)
    start = perf_counter()
    try:
        report = REGISTRY[check_id].run(budget=budget, **params)
    except ResourceBudgetError as exc:
        report = CheckReport(check_id, dict(params), ERROR,
                             {"resource": str(exc)})
    report.runtime_ms = int(round((perf_counter() - start) * 1000))
    return report


def report_bundle(entries, budget: Budget = DEFAULT_BUDGET,
                  jobs: int = 1) -> dict:
    """Run (check_id, params) pairs in order and assemble the JSON document.

    All entries are validated before any check runs, the report array keeps
    the input order even under --jobs, and every tower touched while running
    is listed with its moduli so the run is reproducible.
    """
    entries = [(cid, dict(params)) for cid, params in entries]
    for cid, params in entries:
        _validate_entry(cid, params)
    with record_towers() as keys:
        if jobs > 1 and len(entries) > 1:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                reports = list(pool.map(
                    lambda ent: run_check(ent[0], ent[1], budget), entries))
        else:
            reports = [run_check(cid, params, budget)
                       for cid, params in entries]
    towers = [make_tower(*key).moduli_description()
              for key in sorted(keys)]
    return {
        "schema": SCHEMA_VERSION,
        "tool": {"name": TOOL_NAME, "version": __version__},
        "towers": towers,
        "reports": [r.to_dict() for r in reports],
    }


def bundle_exit_code(bundle: dict) -> int:
    bad = (FAIL, ERROR)
    return 1 if any(r["status"] in bad for r in bundle["reports"]) else 0


# ---------------------------------------------------------------------------
# config files
# ---------------------------------------------------------------------------

def _parse_toml(text: str) -> dict:
    try:
        import tomllib
    except ImportError:
        import tomli as tomllib
    return tomllib.loads(text)


def load_config(path: str):
    """Read a TOML or JSON config into (check_id, params) pairs."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    if path.endswith(".toml"):
        doc = _parse_toml(text)
    elif path.endswith(".json"):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise UsageError(f"bad JSON in {path}: {exc}") from None
    else:
        try:
            doc = json.loads(text)
        except json.JSONDecodeError:
            doc = _parse_toml(text)
    if not isinstance(doc, dict) or not isinstance(doc.get("checks"), list):
        raise UsageError(f"config {path} must contain a 'checks' array")
    extra = sorted(set(doc) - {"checks"})
    if extra:
        raise UsageError(
            f"config {path}: unknown top-level keys: {', '.join(extra)}")
    entries = []
    for item in doc.get("checks", []):
        if not isinstance(item, dict) or "check_id" not in item:
            raise UsageError(f"config {path}: each check needs a check_id")
        params = item.get("params", {})
        if not isinstance(params, dict):
            raise UsageError(f"config {path}: params must be a table")
        entries.append((item["check_id"], dict(params)))
    return entries


def acceptance_entries():
    """The shipped acceptance configuration."""
    text = (resources.files("drinfeld") / "configs" /
            "acceptance.json").read_text(encoding="utf-8")
    doc = json.loads(text)
    return [(item["check_id"], dict(item.get("params", {})))
            for item in doc["checks"]]


# ---------------------------------------------------------------------------
# argument plumbing
# ---------------------------------------------------------------------------

def _resolve_q(args) -> int:
    q = getattr(args, "q", None)
    p = getattr(args, "p", None)
    e = getattr(args, "e", None)
    if q is not None:
        if p is not None or e is not None:
            pp = p if p is not None else _prime_of(q)
            ee = e if e is not None else 1
            if pp**ee != q:
                raise UsageError(f"--q {q} conflicts with --p {pp} --e {ee}")
        return q
    if p is not None:
        return p ** (e if e is not None else 1)
    raise UsageError("a field is required: give --q, or --p with --e")


def _parse_budget(text: str) -> Budget:
    names = {"field": "max_field_size", "enum": "max_enum_points",
             "degree": "max_degree"}
    kwargs = {}
    for part in text.split(","):
        key, sep, value = part.partition("=")
        key = key.strip()
        if not sep or key not in names:
            raise UsageError(
                "--budget wants key=value pairs with keys field, enum, degree")
        try:
            kwargs[names[key]] = int(value)
        except ValueError:
            raise UsageError(f"--budget {key} must be an integer") from None
    return Budget(**kwargs)


def _need(args, *names):
    out = []
    for name in names:
        value = getattr(args, name, None)
        if value is None:
            raise UsageError(f"--{name} is required here")
        out.append(value)
    return out[0] if len(out) == 1 else out


def _emit(args, text: str) -> None:
    out = getattr(args, "out", None)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _run_and_emit(args, entries, param_filter=None) -> int:
    budget = _parse_budget(args.budget) if args.budget else DEFAULT_BUDGET
    bundle = report_bundle(entries, budget=budget, jobs=args.jobs or 1)
    if param_filter:
        bundle["reports"] = [
            r for r in bundle["reports"]
            if all(r["params"].get(k, v) == v for k, v in param_filter.items())]
    _emit(args, dumps(bundle))
    return bundle_exit_code(bundle)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _cmd_verify(args) -> int:
    target = args.target
    if target == "all":
        entries = acceptance_entries()
        wanted = {k: getattr(args, k) for k in ("q", "n", "m")
                  if getattr(args, k) is not None}
        for key, value in wanted.items():
            entries = [(cid, prm) for cid, prm in entries
                       if prm.get(key, value) == value]
        return _run_and_emit(args, entries, param_filter=wanted)

    if target == "moore":
        q, n = _resolve_q(args), _need(args, "n")
        return _run_and_emit(args, [("moore-identity", {"q": q, "n": n}),
                                    ("moore-partial", {"q": q, "n": n})])

    if target == "foliation":
        q = _resolve_q(args)
        if args.check is not None:
            if args.check not in _FOLIATION_CHECKS:
                raise UsageError(
                    "--check must be one of: "
                    + ", ".join(sorted(_FOLIATION_CHECKS)))
            cid = _FOLIATION_CHECKS[args.check]
            params = {"q": q}
            if "n" in REGISTRY[cid].required:
                params["n"] = _need(args, "n")
            if args.j is not None and "j" in REGISTRY[cid].optional:
                params["j"] = args.j
            return _run_and_emit(args, [(cid, params)])
        entries = []
        for cid in _FOLIATION_CHECKS.values():
            params = {"q": q}
            if "n" in REGISTRY[cid].required:
                params["n"] = _need(args, "n")
            entries.append((cid, params))
        entries.sort()
        return _run_and_emit(args, entries)

    if target == "lattice":
        q = _resolve_q(args)
        scopes = [args.scope] if args.scope else ["surface", "threefold"]
        return _run_and_emit(
            args, [(f"lattice-{scope}", {"q": q}) for scope in scopes])

    if target in REGISTRY:
        defn = REGISTRY[target]
        params = {}
        for name in defn.required:
            params[name] = _resolve_q(args) if name == "q" else _need(args, name)
        for name in defn.optional:
            value = getattr(args, name, None)
            if value is not None:
                params[name] = value
        return _run_and_emit(args, [(target, params)])

    raise UsageError(
        f"unknown verify target {target!r}; use all, moore, foliation, "
        "lattice, or a check id: " + ", ".join(sorted(REGISTRY)))


def _cmd_map(args) -> int:
    if args.action != "apply":
        raise UsageError("map supports: apply")
    q, n = _resolve_q(args), _need(args, "n")
    m = args.m if args.m is not None else 1
    tower = tower_for_q(q, m)
    try:
        raw = json.loads(args.point)
    except json.JSONDecodeError as exc:
        raise UsageError(f"--point must be JSON: {exc}") from None
    if not isinstance(raw, list) or len(raw) != n + 1:
        raise UsageError(f"--point needs {n + 1} coordinates")
    try:
        point = tuple(tower.parse(c) for c in raw)
    except (ValueError, TypeError) as exc:
        raise UsageError(f"bad coordinate: {exc}") from None
    if not any(point):
        raise UsageError("the zero vector is not a projective point")
    psis = cremona.psi_components(tower_for_q(q), n)
    image = cremona.apply_map(psis, point)
    doc = {
        "schema": SCHEMA_VERSION,
        "tool": {"name": TOOL_NAME, "version": __version__},
        "map": {
            "n": n, "q": q, "extension_degree": m,
            "point": [tower.encode(x) for x in point],
            "defined": any(image),
        },
    }
    if any(image):
        doc["map"]["image"] = [tower.encode(x)
                               for x in counting.normalize_point(image)]
    _emit(args, dumps(doc))
    return 0


def _cmd_linsys(args) -> int:
    if args.action == "dim":
        q, n, c = _resolve_q(args), *_need(args, "n", "c")
        return _run_and_emit(args, [("linsys-dim", {"q": q, "n": n, "c": c})])
    if args.action == "serre":
        q, m = _resolve_q(args), _need(args, "m")
        return _run_and_emit(args, [("linsys-serre", {"q": q, "m": m})])
    if args.action == "appendix":
        return _cmd_linsys_appendix(args)
    raise UsageError("linsys supports: dim, serre, appendix")


def _cmd_linsys_appendix(args) -> int:
    if args.q is None and args.p is None and args.e is None:
        q = 2  # the stock experiment
    else:
        q = _resolve_q(args)
    budget = _parse_budget(args.budget) if args.budget else DEFAULT_BUDGET
    with record_towers() as keys:
        start = perf_counter()
        if args.points_file is None:
            report = linsys.nodal_cubic_experiment(q, budget)
        else:
            d, s = _need(args, "d", "s")
            try:
                with open(args.points_file, "r", encoding="utf-8") as fh:
                    raw = json.load(fh)
            except (OSError, json.JSONDecodeError) as exc:
                raise UsageError(f"bad points file: {exc}") from None
            if not isinstance(raw, list):
                raise UsageError("points file must be a JSON list")
            m = args.m if args.m is not None else 1
            tower = tower_for_q(q, m)
            conditions = []
            for item in raw:
                if (not isinstance(item, dict) or "point" not in item
                        or "multiplicity" not in item):
                    raise UsageError(
                        "each entry needs point and multiplicity fields")
                try:
                    pt = tuple(tower.parse(c) for c in item["point"])
                except (ValueError, TypeError) as exc:
                    raise UsageError(f"bad coordinate: {exc}") from None
                if len(pt) != 3:
                    raise UsageError("appendix points live in the plane")
                conditions.append((pt, int(item["multiplicity"])))
            report = linsys.imposed_conditions_experiment(
                q, d, conditions, s, budget)
        report.runtime_ms = int(round((perf_counter() - start) * 1000))
    bundle = {
        "schema": SCHEMA_VERSION,
        "tool": {"name": TOOL_NAME, "version": __version__},
        "towers": [make_tower(*key).moduli_description()
                   for key in sorted(keys)],
        "reports": [report.to_dict()],
    }
    _emit(args, dumps(bundle))
    return bundle_exit_code(bundle)


def _count_csv(report: CheckReport) -> str:
    w = report.witness or {}
    lines = []
    if report.check_id == "count-strata":
        lines.append("stratum,count")
        for c, count in enumerate(w.get("counts", [])):
            lines.append(f"{c},{count}")
    elif report.check_id == "count-flags":
        lines.append("measure,value")
        for key in ("flags", "graph", "formula"):
            lines.append(f"{key},{w.get(key)}")
    else:
        lines.append("name,value")
        for key in ("points", "lines", "b2"):
            lines.append(f"{key},{w.get(key)}")
    lines.append(f"status,{report.status}")
    return "\n".join(lines) + "\n"


def _cmd_count(args) -> int:
    if args.action == "strata":
        q, n, m = _resolve_q(args), *_need(args, "n", "m")
        entry = ("count-strata", {"q": q, "n": n, "m": m})
    elif args.action == "flags":
        q, m = _resolve_q(args), _need(args, "m")
        entry = ("count-flags", {"q": q, "m": m})
    elif args.action == "b2":
        entry = ("count-b2", {"q": _resolve_q(args)})
    else:
        raise UsageError("count supports: strata, flags, b2")
    if args.format == "csv":
        budget = _parse_budget(args.budget) if args.budget else DEFAULT_BUDGET
        report = run_check(entry[0], entry[1], budget)
        _emit(args, _count_csv(report))
        return 0 if report.ok else 1
    return _run_and_emit(args, [entry])


def _cmd_report(args) -> int:
    entries = load_config(args.config)
    return _run_and_emit(args, entries)


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=TOOL_NAME,
        description="Exact checks for Frobenius-linear projective geometry.")
    parser.add_argument("--version", action="version",
                        version=f"{TOOL_NAME} {__version__}")
    sub = parser.add_subparsers(dest="command")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int, help="field characteristic")
    common.add_argument("--e", type=int, help="exponent: q = p^e")
    common.add_argument("--q", type=int,
                        help="base field size (prime power; sugar for --p/--e)")
    common.add_argument("--n", type=int, help="projective dimension")
    common.add_argument("--m", type=int, help="extension degree over F_q")
    common.add_argument("--out", help="write the report here (default stdout)")
    common.add_argument("--jobs", type=int, default=1,
                        help="run checks in parallel, report order unchanged")
    common.add_argument("--budget",
                        help="override caps: field=..., enum=..., degree=...")

    pv = sub.add_parser("verify", parents=[common],
                        help="run one named check or a batch")
    pv.add_argument("target",
                    help="all, moore, foliation, lattice, or a check id")
    pv.add_argument("--check", help="foliation sub-check name")
    pv.add_argument("--scope", choices=["surface", "threefold"],
                    help="lattice scope")
    pv.add_argument("--j", type=int, help="chart field index")
    pv.add_argument("--c", type=int, help="codimension")
    pv.add_argument("--d", type=int, help="degree parameter")
    pv.set_defaults(func=_cmd_verify)

    pm = sub.add_parser("map", parents=[common],
                        help="apply the inseparable map to a point")
    pm.add_argument("action", help="apply")
    pm.add_argument("--point", required=True,
                    help="JSON coordinate list over F_{q^m}")
    pm.set_defaults(func=_cmd_map)

    pl = sub.add_parser("linsys", parents=[common],
                        help="linear systems through strata")
    pl.add_argument("action", help="dim, serre, or appendix")
    pl.add_argument("--c", type=int, help="codimension")
    pl.add_argument("--d", type=int, help="member degree")
    pl.add_argument("--s", type=int, help="test degree")
    pl.add_argument("--points-file",
                    help="JSON list of {point, multiplicity}")
    pl.set_defaults(func=_cmd_linsys)

    pc = sub.add_parser("count", parents=[common],
                        help="point and subspace counting tables")
    pc.add_argument("action", help="strata, flags, or b2")
    pc.add_argument("--format", choices=["json", "csv"], default="json")
    pc.set_defaults(func=_cmd_count)

    pr = sub.add_parser("report", parents=[common],
                        help="run a config file of checks")
    pr.add_argument("--config", required=True,
                    help="TOML or JSON check list")
    pr.set_defaults(func=_cmd_report)

    return parser


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not getattr(args, "func", None):
        parser.print_help(sys.stderr)
        return 2
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"{TOOL_NAME}: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
