"""Command-line front end.

Every subcommand prints one JSON report::

    {command, config, inputs, verdict, metrics, witnesses, artifacts}

Exit status is 0 on success, 1 when the mathematical verdict is negative and
2 on input errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
import sympy as sp

from . import catalog
from . import exterior as E
from . import scalar as S
from .chart import Chart, ChartError
from .contact import (classify_point, hamiltonian_field, hamiltonian_residual, is_contact,
                      reeb_with_residual, theta_form)
from .jacobi import (bjacobi_transversality, jacobi_from_contact, liouville_contract, poissonize,
                     reeb_orthogonality_check, symplectize)
from .parsing import ParseError
from .profiles import ProfileError, build_profile
from .sampling import GridConfig
from .singular import convergence_report, desingularize, singularize

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

COMMANDS = ("check", "reeb", "hamiltonian", "classify", "theta", "jacobi", "transversality",
            "poissonize", "symplectize", "contract", "desing", "sing", "converge", "catalog")


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    grid_off: int = 200
    grid_on: int = 100
    tol: float = 1e-8
    seed: int = 42
    delta: float = 1e-3
    out: str | None = None

    def __post_init__(self):
        if min(self.grid_off, self.grid_on) < 1 or not (self.tol > 0 and self.delta > 0):
            raise UsageError("grid sizes, tolerance and margin must be positive")

    @property
    def grid(self) -> GridConfig:
        return GridConfig(self.grid_off, self.grid_on, self.tol, self.seed, self.delta)

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("out")
        return d


# ----------------------------------------------------------------------------
# JSON helpers


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, float)):
        v = float(x)
        return v if np.isfinite(v) else repr(v)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, sp.Basic):
        return S.to_text(x)
    if x is None or isinstance(x, (str, int, bool)):
        return x
    if hasattr(x, "to_dict"):
        return _jsonable(x.to_dict())
    return str(x)


def form_document(w: E.BForm) -> dict:
    return {"chart": w.chart.to_dict(), "form": w.to_text()}


def make_report(command, cfg: RunConfig, inputs, verdict, metrics=None, witnesses=None,
                artifacts=None, timestamp=True) -> dict:
    rep = {"command": command, "config": cfg.to_dict(), "inputs": inputs, "verdict": verdict,
           "metrics": metrics or {}, "witnesses": witnesses or [], "artifacts": artifacts or {}}
    if timestamp:
        rep["timestamp"] = datetime.now(timezone.utc).isoformat()
    return _jsonable(rep)


# ----------------------------------------------------------------------------
# input loading


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def load_chart(args) -> Chart:
    if getattr(args, "entry", None):
        return catalog.get(args.entry).chart
    if not args.chart:
        raise UsageError("--chart FILE is required")
    return Chart.from_json(_read(args.chart))


def form_text(args) -> str:
    if args.form and args.form_file:
        raise UsageError("give either --form or --form-file, not both")
    if args.form_file:
        return _read(args.form_file).strip()
    if args.form:
        return args.form
    raise UsageError("--form EXPR or --form-file FILE is required")


def load_form(args) -> tuple[E.BForm, dict]:
    if getattr(args, "entry", None) and not (args.form or args.form_file):
        ent = catalog.get(args.entry)
        if ent.form is None:
            raise UsageError(f"catalog entry {args.entry!r} carries no contact form")
        return ent.form, {"entry": args.entry}
    ch = load_chart(args)
    text = form_text(args)
    return E.parse_form(text, ch), {"chart": ch.to_dict(), "form": text}


def parse_point(text: str, ch: Chart) -> dict:
    p = {}
    for part in filter(None, (s.strip() for s in text.split(","))):
        name, _, val = part.partition("=")
        name = name.strip()
        if name not in ch.coords or not val:
            raise UsageError(f"bad point component {part!r}")
        p[name] = float(val)
    missing = set(ch.coords) - set(p)
    if missing:
        raise UsageError(f"point is missing {', '.join(sorted(missing))}")
    return p


def parse_field(text: str, ch: Chart) -> E.BMultiVector:
    """``name:expr;name:expr`` with ``zeta`` naming the singular frame vector."""
    spec = {}
    for part in filter(None, (s.strip() for s in text.split(";"))):
        name, _, expr = part.partition(":")
        if not expr:
            raise UsageError(f"bad field component {part!r}")
        spec[name.strip()] = S.parse_scalar(expr, ch)
    return E.vector_field(ch, spec)


def load_map(path: str, target: Chart) -> E.ChartMap:
    try:
        doc = json.loads(_read(path))
        src = Chart.from_dict(doc["source"])
        exprs = doc["exprs"]
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise UsageError(f"map document needs 'source' and 'exprs': {exc}") from None
    return E.ChartMap.parse(src, target, exprs)


# ----------------------------------------------------------------------------
# subcommands; each returns (verdict, passed, metrics, witnesses, artifacts, inputs)


def cmd_check(args, cfg):
    alpha, inputs = load_form(args)
    rep = is_contact(alpha, cfg.grid)
    m = {"coeff": rep.coeff, "min_abs_off_Z": rep.min_off, "min_abs_on_Z": rep.min_on}
    return rep.verdict, rep.contact, m, rep.witnesses, {}, inputs


def cmd_reeb(args, cfg):
    alpha, inputs = load_form(args)
    res = reeb_with_residual(alpha, cfg.grid, verify=False)
    ok = res.residual <= cfg.tol
    return ("reeb field found" if ok else "residual too large"), ok, \
        {"R": res.field.to_dict(), "residual": res.residual}, [], {}, inputs


def cmd_hamiltonian(args, cfg):
    alpha, inputs = load_form(args)
    if not args.hamiltonian:
        raise UsageError("--hamiltonian EXPR is required")
    H = S.parse_scalar(args.hamiltonian, alpha.chart)
    X = hamiltonian_field(alpha, H, cfg.grid, verify=False)
    r = hamiltonian_residual(alpha, H, X, cfg.grid)
    inputs["hamiltonian"] = args.hamiltonian
    return ("hamiltonian field found" if r <= cfg.tol else "residual too large"), r <= cfg.tol, \
        {"X_H": X.to_dict(), "residual": r}, [], {}, inputs


def cmd_classify(args, cfg):
    alpha, inputs = load_form(args)
    if not args.point:
        raise UsageError("--point name=value,... is required")
    p = parse_point(args.point, alpha.chart)
    pc = classify_point(alpha, p)
    inputs["point"] = p
    return pc.cls.value, True, pc.to_dict(), [], {}, inputs


def cmd_theta(args, cfg):
    alpha, inputs = load_form(args)
    rep = theta_form(alpha, cfg.grid)
    return ("nondegenerate" if rep.ok else "degenerate"), rep.ok, rep.to_dict(), [], {}, inputs


def cmd_jacobi(args, cfg):
    alpha, inputs = load_form(args)
    J = jacobi_from_contact(alpha, cfg.grid, verify=False)
    ok = all(v <= max(cfg.tol, 1e-7) for v in J.residuals.values())
    return ("jacobi" if ok else "not jacobi"), ok, {"residuals": J.residuals}, [], \
        {"Lambda": J.Lam.to_dict(), "R": J.R.to_dict()}, inputs


def cmd_transversality(args, cfg):
    alpha, inputs = load_form(args)
    rep = bjacobi_transversality(jacobi_from_contact(alpha, cfg.grid, verify=False), cfg.grid)
    return rep.verdict, rep.transversal, rep.to_dict(), [], {}, inputs


def cmd_poissonize(args, cfg):
    alpha, inputs = load_form(args)
    rep = poissonize(jacobi_from_contact(alpha, cfg.grid, verify=False), cfg.grid)
    ok = rep.ok()
    return ("homogeneous poisson" if ok else "identity failed"), ok, rep.to_dict(), [], \
        {"Pi": rep.Pi.to_dict()}, inputs


def cmd_symplectize(args, cfg):
    alpha, inputs = load_form(args)
    rep = symplectize(alpha, cfg.grid)
    ok = rep.ok(cfg.tol)
    return ("symplectic" if ok else "identity failed"), ok, rep.to_dict(), [], \
        {"omega": form_document(rep.omega)}, inputs


def cmd_contract(args, cfg):
    if not (args.field and args.map):
        raise UsageError("contract needs --field and --map")
    omega, inputs = load_form(args)
    X = parse_field(args.field, omega.chart)
    emb = load_map(args.map, omega.chart)
    res = liouville_contract(omega, X, emb, cfg.grid)
    orth = reeb_orthogonality_check(omega, X, emb, cfg.grid)
    inputs.update(field=args.field, map=args.map)
    ok = res.report.contact and orth.holds
    return res.report.verdict, ok, {"contraction": res.to_dict(), "orthogonality": orth.to_dict()}, \
        res.report.witnesses, {"alpha": form_document(res.alpha)}, inputs


def _profile(kind_prefix, args):
    if args.kind is None:
        raise UsageError("--kind is required")
    if args.eps is None:
        raise UsageError("--eps is required")
    kind = args.kind if args.kind.startswith(kind_prefix) else f"{kind_prefix}-{args.kind}"
    return build_profile(kind, args.k, args.eps)


def cmd_desing(args, cfg):
    alpha, inputs = load_form(args)
    prof = _profile("desing", args)
    res = desingularize(alpha, prof, cfg.grid)
    inputs.update(kind=prof.kind, k=args.k, eps=args.eps)
    verdict = res.contact.verdict if res.contact is not None else res.fold.verdict
    return verdict, res.ok, res.to_dict(), [], {"alpha_eps": form_document(res.alpha_eps)}, inputs


def cmd_sing(args, cfg):
    alpha, inputs = load_form(args)
    prof = _profile("sing", args)
    res = singularize(alpha, prof, args.axis, cfg.grid)
    inputs.update(kind=prof.kind, k=args.k, eps=args.eps)
    docs = {f"alpha_{i}": form_document(w) for i, w in enumerate(res.forms)}
    return ("b^m-contact" if res.ok else "singularization failed"), res.ok, res.to_dict(), [], docs, inputs


def cmd_converge(args, cfg):
    alpha, inputs = load_form(args)
    eps_list = [float(e) for e in args.eps_list.split(",")] if args.eps_list else [0.2, 0.1, 0.05]
    rep = convergence_report(alpha, eps_list, grid=cfg.grid)
    inputs["eps_list"] = eps_list
    js = range(2 * rep.k)
    ok = all(rep.strictly_decreasing(j, "support") for j in js)
    csv = rep.to_csv("support")
    if args.csv:
        Path(args.csv).write_text(csv)
    return ("converges" if ok else "not decreasing"), ok, rep.to_dict(), [], {"csv": csv}, inputs


def cmd_catalog(args, cfg):
    action = args.action
    if action == "list":
        return "ok", True, {"entries": catalog.list_entries()}, [], {}, {"action": "list"}
    if action == "show":
        if not args.name:
            raise UsageError("catalog show NAME")
        return "ok", True, {}, [], {"entry": catalog.get(args.name).to_dict()}, {"name": args.name}
    names = catalog.list_entries() if args.all else ([args.name] if args.name else [])
    if not names:
        raise UsageError("catalog verify needs NAME or --all")
    reports = [catalog.verify(n, cfg.grid).to_dict() for n in names]
    failed = [r["name"] for r in reports if not r["passed"]]
    ok = not failed
    metrics = {"entries": len(reports), "failed": failed,
               "expectations": sum(len(r["results"]) for r in reports)}
    return ("all expectations pass" if ok else "failures"), ok, metrics, \
        [r for r in reports if not r["passed"]], {"reports": reports}, {"names": names}


HANDLERS = {name: globals()[f"cmd_{name}"] for name in COMMANDS}


# ----------------------------------------------------------------------------
# argument parsing


def _common(p: argparse.ArgumentParser):
    p.add_argument("--chart", help="chart JSON file")
    p.add_argument("--entry", help="take chart and form from a catalog entry")
    p.add_argument("--form", help="form literal")
    p.add_argument("--form-file", help="file holding a form literal")
    p.add_argument("--grid", type=int, default=200, help="off-Z sample count (on-Z uses half)")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--delta", type=float, default=1e-3, help="z-margin for off-Z samples")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--no-timestamp", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bmcontact", description="b^m-contact geometry toolkit")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        _common(p)
        if name == "hamiltonian":
            p.add_argument("--hamiltonian", help="function H")
        if name == "classify":
            p.add_argument("--point", help="name=value,...")
        if name == "contract":
            p.add_argument("--field", help="Liouville field, e.g. 't:t;x:x'")
            p.add_argument("--map", help="embedding JSON {source: chart, exprs: {...}}")
        if name in ("desing", "sing", "converge"):
            p.add_argument("--eps", type=float)
            p.add_argument("--k", type=int, default=1)
            p.add_argument("--kind", help="even, odd or onesided")
        if name == "sing":
            p.add_argument("--axis", help="vertical coordinate (defaults to t)")
        if name == "converge":
            p.add_argument("--eps-list", help="comma separated, default 0.2,0.1,0.05")
            p.add_argument("--csv", help="write the convergence table here")
        if name == "catalog":
            p.add_argument("action", choices=("list", "show", "verify"))
            p.add_argument("name", nargs="?")
            p.add_argument("--all", action="store_true")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed the message
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        cfg = RunConfig(args.grid, max(1, args.grid // 2), args.tol, args.seed, args.delta, args.out)
        verdict, ok, metrics, witnesses, artifacts, inputs = HANDLERS[args.command](args, cfg)
    except (UsageError, ChartError, ParseError, ProfileError, catalog.UnknownEntryError,
            S.UnknownCoordinateError, ValueError, KeyError) as exc:
        msg = exc.args[0] if exc.args else str(exc)
        print(f"bmcontact {args.command}: {type(exc).__name__}: {msg}", file=sys.stderr)
        return EXIT_USAGE
    except ArithmeticError as exc:
        cfg = RunConfig(args.grid, max(1, args.grid // 2), args.tol, args.seed, args.delta, args.out)
        verdict, ok, metrics, witnesses, artifacts, inputs = (
            f"failed: {exc}", False, {"error": type(exc).__name__}, [], {}, {})
    report = make_report(args.command, cfg, inputs, verdict, metrics, witnesses, artifacts,
                         timestamp=not args.no_timestamp)
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
