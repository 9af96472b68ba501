"""Command-line frontend.

    rrhermite verify euler --order 50
    rrhermite verify-all --parallelism 4 --output json
    rrhermite xi --system A1 --level 3 --classes 1,0,0 --r 1 --order 30
    rrhermite expand --system A2 --level 2 --classes full,full --order 6
    rrhermite dilog-table --max-rank 8 --output csv
    rrhermite gauss --systems A2,D4 --N 2-8 --relations
    rrhermite hermite --system B2 --weight=-1,0

Exit status is 0 when every requested check passes, 1 on a failed check and 2
when the command line or a manifest cannot be parsed.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from . import dilog, gauss, hermite, rootsys, rr, theta
from .qseries import QSeries

ORDER_ENV = "RRHERMITE_ORDER"
COMMANDS = ("verify", "verify-all", "expand", "xi", "dilog-table", "gauss", "hermite")
OUTPUTS = ("text", "json", "csv")

EXIT_OK, EXIT_FAIL, EXIT_PARSE = 0, 1, 2


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    system: Optional[str] = None
    level: Optional[int] = None
    classes: Optional[str] = None
    r: Optional[int] = None
    order: Optional[Fraction] = None
    output: str = "text"
    parallelism: int = 1
    ids: Tuple[str, ...] = ()
    manifest: Optional[str] = None
    include_misprints: bool = False
    skip_core: bool = False
    method: str = "both"
    weight: Optional[str] = None
    max_rank: int = 8
    systems: Optional[str] = None
    moduli: str = "2-12"
    relations: bool = False

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if self.output not in OUTPUTS:
            raise UsageError(f"unknown output format {self.output!r}")
        if self.order is not None and self.order <= 0:
            raise UsageError("order must be positive")
        if self.parallelism < 1:
            raise UsageError("parallelism must be at least 1")
        if self.classes is not None and self.level is not None:
            if len(self.classes.split(",")) != self.level:
                raise UsageError(f"--classes has {len(self.classes.split(','))} entries but --level is {self.level}")


# --- argument helpers ---------------------------------------------------

def parse_order(text) -> Fraction:
    try:
        value = Fraction(str(text))
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"cannot read order {text!r}")
    if value <= 0:
        raise UsageError("order must be positive")
    return value


def env_order() -> Optional[Fraction]:
    raw = os.environ.get(ORDER_ENV)
    return parse_order(raw) if raw else None


def parse_classes(rs: rootsys.RootSystem, text: str) -> List[frozenset]:
    """"0|1,full,2" -> one class set per theta factor."""
    allowed = set(rootsys.classes(rs))
    out = []
    for part in text.split(","):
        part = part.strip().lower()
        if part == "full":
            out.append(frozenset(allowed))
            continue
        try:
            ks = frozenset(int(k) for k in part.split("|"))
        except ValueError:
            raise UsageError(f"cannot read class list {part!r}")
        if not ks or not ks <= allowed:
            raise UsageError(f"classes {part!r} not among {sorted(allowed)} for {rs.name}")
        out.append(ks)
    return out


def parse_system(text: Optional[str]) -> rootsys.RootSystem:
    if not text:
        raise UsageError("--system is required")
    try:
        return rootsys.parse_id(text)
    except (ValueError, KeyError) as exc:
        raise UsageError(str(exc))


def parse_weight(text: str) -> Tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise UsageError(f"cannot read weight {text!r}")


def parse_moduli(text: str) -> List[int]:
    out = []
    try:
        for part in text.split(","):
            if "-" in part:
                lo, hi = part.split("-")
                out.extend(range(int(lo), int(hi) + 1))
            else:
                out.append(int(part))
    except ValueError:
        raise UsageError(f"cannot read moduli {text!r}")
    if any(n < 2 for n in out):
        raise UsageError("moduli must be at least 2")
    return out


def _series_text(s: QSeries) -> str:
    parts = []
    for e, c in s.items():
        parts.append(f"{c}" if e == 0 else f"{c}*q^{e}")
    body = " + ".join(parts) if parts else "0"
    return f"{body} + O(q^{s.order})"


# --- reports ------------------------------------------------------------

@dataclass
class Outcome:
    rows: List[dict]
    ok: bool
    columns: Sequence[str] = ()
    summary: dict = field(default_factory=dict)


def _emit(outcome: Outcome, fmt: str, stream) -> None:
    if fmt == "json":
        payload = {"results": outcome.rows}
        if outcome.summary:
            payload["summary"] = outcome.summary
        json.dump(payload, stream, indent=2, default=str)
        stream.write("\n")
    elif fmt == "csv":
        columns = list(outcome.columns) or (list(outcome.rows[0]) if outcome.rows else [])
        writer = csv.DictWriter(stream, fieldnames=columns, extrasaction="ignore", lineterminator="\n")
        writer.writeheader()
        for row in outcome.rows:
            writer.writerow({k: _csv_cell(row.get(k)) for k in columns})
    else:
        for row in outcome.rows:
            stream.write((row.get("_text") or "  ".join(f"{k}={v}" for k, v in row.items())) + "\n")
        if outcome.summary:
            stream.write("  ".join(f"{k}={v}" for k, v in outcome.summary.items()) + "\n")


def _csv_cell(v):
    if isinstance(v, (list, tuple)):
        # coefficient lists become "exp:coeff" pairs
        return " ".join(":".join(map(str, x)) if isinstance(x, (list, tuple)) else str(x) for x in v)
    return "" if v is None else v


def _strip_text(rows: List[dict], fmt: str) -> List[dict]:
    if fmt == "text":
        return rows
    return [{k: v for k, v in r.items() if k != "_text"} for r in rows]


def _report_row(rep: rr.Report) -> dict:
    row = rep.to_json()
    tail = "" if rep.first_mismatch_exponent is None else f"  first mismatch at q^{rep.first_mismatch_exponent}"
    tag = "  (misprint as printed)" if rep.misprint else ""
    row["_text"] = f"{rep.status}  {rep.id}  order={rep.order}{tail}{tag}"
    return row


REPORT_COLUMNS = ("id", "paper_eq", "order", "status", "first_mismatch_exponent", "elapsed_ms", "misprint")


# --- verification jobs --------------------------------------------------
# Jobs are plain tuples so that they pickle for the process pool.

def _run_job(job) -> rr.Report:
    kind = job[0]
    if kind == "record":
        _, rec, order = job
        return rr.verify_record(rec, order)
    _, case, order = job
    return rr.core_check(case, order)


def _run_jobs(jobs: list, parallelism: int) -> List[rr.Report]:
    if parallelism <= 1 or len(jobs) <= 1:
        return [_run_job(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=parallelism) as pool:
        return list(pool.map(_run_job, jobs))


def verify_all(order: Optional[Fraction] = None, parallelism: int = 1, extra: Sequence[rr.IdentityRecord] = (),
               include_misprints: bool = False, core: bool = True) -> Tuple[List[rr.Report], dict]:
    """Run the registry (plus manifest extras) and the constant-term matrix."""
    start = time.perf_counter()
    records = [rr.lookup(i) for i in rr.identity_ids()] + list(extra)
    if not include_misprints:
        records = [r for r in records if not r.misprint]
    jobs = [("record", rec, order) for rec in records]
    if core:
        jobs += [("core", case, order) for case in rr.core_cases()]
    reports = _run_jobs(jobs, parallelism)
    passed = sum(r.status == "PASS" for r in reports)
    summary = {
        "total": len(reports),
        "pass": passed,
        "fail": len(reports) - passed,
        "elapsed_s": round(time.perf_counter() - start, 2),
    }
    return reports, summary


def _cmd_verify(cfg: RunConfig) -> Outcome:
    if not cfg.ids:
        raise UsageError("verify needs at least one identity id")
    extra = {r.id: r for r in _manifest(cfg)}
    records = []
    for i in cfg.ids:
        if i in extra:
            records.append(extra[i])
            continue
        try:
            records.append(rr.lookup(i))
        except (KeyError, ValueError) as exc:
            raise UsageError(str(exc))
    order = cfg.order or env_order()
    reports = _run_jobs([("record", rec, order) for rec in records], cfg.parallelism)
    rows = [_report_row(r) for r in reports]
    ok = all(r.status == "PASS" for r in reports)
    return Outcome(rows, ok, REPORT_COLUMNS)


def _manifest(cfg: RunConfig) -> List[rr.IdentityRecord]:
    if not cfg.manifest:
        return []
    try:
        return rr.load_manifest(cfg.manifest)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"cannot load manifest {cfg.manifest}: {exc}")


def _cmd_verify_all(cfg: RunConfig) -> Outcome:
    reports, summary = verify_all(cfg.order or env_order(), cfg.parallelism, _manifest(cfg),
                                  cfg.include_misprints, not cfg.skip_core)
    rows = [_report_row(r) for r in reports]
    ok = all(r.status == "PASS" for r in reports)
    return Outcome(rows, ok, REPORT_COLUMNS, summary)


def _xi_spec(cfg: RunConfig) -> rr.XiSpec:
    rs = parse_system(cfg.system)
    if cfg.classes is None:
        if cfg.level is None:
            raise UsageError("give --classes or --level")
        classes = [frozenset(rootsys.classes(rs))] * cfg.level
    else:
        classes = parse_classes(rs, cfg.classes)
    return rr.XiSpec.make(rs, classes, cfg.r)


def _cmd_xi(cfg: RunConfig) -> Outcome:
    spec = _xi_spec(cfg)
    order = cfg.order or env_order() or Fraction(20)
    if not rr.admissible(spec):
        raise UsageError("the chosen classes and r give an identically zero series")
    rows, values = [], {}
    methods = ("ct", "multisum") if cfg.method == "both" else (cfg.method,)
    for m in methods:
        s = rr.xi_ct(spec, order) if m == "ct" else rr.xi_multisum(spec, order)
        values[m] = s
        rows.append({"method": m, "system": spec.rs.name, "r": spec.r, "order": str(order),
                     "coefficients": [[str(e), str(c)] for e, c in s.items()],
                     "_text": f"{m}: {_series_text(s)}"})
    ok = True
    if len(values) == 2:
        mismatch = values["ct"].first_mismatch(values["multisum"])
        ok = mismatch is None
        rows.append({"method": "agreement", "system": spec.rs.name, "r": spec.r, "order": str(order),
                     "status": "PASS" if ok else "FAIL",
                     "first_mismatch_exponent": None if ok else str(mismatch),
                     "_text": "PASS  constant term equals chain sum" if ok
                     else f"FAIL  constant term differs from chain sum at q^{mismatch}"})
    return Outcome(rows, ok, ("method", "system", "r", "order", "coefficients", "status", "first_mismatch_exponent"))


def _cmd_expand(cfg: RunConfig) -> Outcome:
    rs = parse_system(cfg.system)
    if cfg.classes is None:
        if cfg.level is None:
            raise UsageError("give --classes or --level")
        classes = [frozenset(rootsys.classes(rs))] * cfg.level
    else:
        classes = parse_classes(rs, cfg.classes)
    specs = [theta.ThetaSpec(rs, c) for c in classes]
    order = cfg.order or env_order() or Fraction(6)
    coeffs = theta.expand_product(rs, specs, order)
    rows = []
    for b, s in coeffs.items():
        rows.append({"weight": list(b), "order": str(order),
                     "coefficients": [[str(e), str(c)] for e, c in s.items()],
                     "_text": f"P{b}: {_series_text(s)}"})
    return Outcome(rows, True, ("weight", "order", "coefficients"))


def _cmd_dilog(cfg: RunConfig) -> Outcome:
    rows, ok = [], True
    for row in dilog.table1(cfg.max_rank):
        d = row.to_json()
        good = row.residual < 1e-9 and not row.flagged
        ok &= good
        d["status"] = "PASS" if good else "FAIL"
        d["_text"] = (f"{d['status']}  {row.system:4s} L={row.L:.12f} ({row.L_rational})  "
                      f"L_flat={row.L_flat:.12f} ({row.L_flat_rational})  residual={row.residual:.1e}")
        rows.append(d)
    columns = ("system", "L", "L_rational", "L_closed", "c_eff", "c_eff_closed", "L_flat", "L_flat_rational",
               "L_flat_closed", "c_eff_flat", "c_eff_flat_closed", "residual", "status")
    return Outcome(rows, ok, columns)


def _cmd_gauss(cfg: RunConfig) -> Outcome:
    names = (cfg.systems or cfg.system or "A1,A2,A3,B3,C3,D4,G2,F4").split(",")
    Ns = parse_moduli(cfg.moduli)
    for n in names:
        parse_system(n)
    rows, ok = [], True
    for row in gauss.gamma_table(names, Ns):
        d = row.to_json()
        good = row.diff is None or row.diff < 1e-9
        ok &= good
        d["status"] = "NO-FORMULA" if row.formula is None else "PASS" if good else "FAIL"
        text = f"{d['status']}  {row.system} N={row.N} index={row.index} gamma={row.computed:.6f}"
        if row.formula is not None:
            text += f" formula={row.formula:.6f}"
        if cfg.relations:
            rel = gauss.check_relations(rootsys.parse_id(row.system), row.N)
            d["relations_worst"] = rel.worst()
            good_rel = rel.worst() < 1e-9
            ok &= good_rel
            text += f" relations={rel.worst():.1e}"
        d["_text"] = text
        rows.append(d)
    columns = ("system", "N", "index", "gamma", "formula", "diff", "prescribed_representatives", "status",
               "relations_worst")
    return Outcome(rows, ok, columns)


def _cmd_hermite(cfg: RunConfig) -> Outcome:
    rs = parse_system(cfg.system)
    if not cfg.weight:
        raise UsageError("--weight is required")
    b = parse_weight(cfg.weight)
    if len(b) != rs.rank:
        raise UsageError(f"weight {b} has the wrong length for {rs.name}")
    if not rootsys.is_antidominant(b):
        raise UsageError(f"weight {b} is not antidominant")
    h = hermite.q_hermite(rs, b)
    rows = [{"kind": "coefficient", "weight": list(b), "coefficients": [["0", "1"]], "_text": f"m{b}: 1"}]
    for w, s in sorted(h.coefficients.items(), key=lambda kv: (rootsys.norm_int(rs, kv[0]), kv[0]), reverse=True):
        rows.append({"kind": "coefficient", "weight": list(w), "coefficients": [[str(e), str(c)] for e, c in s.items()],
                     "_text": f"m{w}: {_series_text(s)}"})
    value = hermite.norm(rs, b)
    formula = hermite.norm_formula(rs, b, value.order)
    ok = value == formula
    rows.append({"kind": "norm", "weight": list(b), "coefficients": [[str(e), str(c)] for e, c in value.items()],
                 "status": "PASS" if ok else "FAIL",
                 "_text": f"{'PASS' if ok else 'FAIL'}  norm {_series_text(value)}"})
    return Outcome(rows, ok, ("kind", "weight", "coefficients", "status"))


HANDLERS: dict = {
    "verify": _cmd_verify,
    "verify-all": _cmd_verify_all,
    "xi": _cmd_xi,
    "expand": _cmd_expand,
    "dilog-table": _cmd_dilog,
    "gauss": _cmd_gauss,
    "hermite": _cmd_hermite,
}


def run(cfg: RunConfig, stream=None) -> int:
    stream = sys.stdout if stream is None else stream
    try:
        outcome = HANDLERS[cfg.command](cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    outcome.rows = _strip_text(outcome.rows, cfg.output)
    _emit(outcome, cfg.output, stream)
    return EXIT_OK if outcome.ok else EXIT_FAIL


# --- argv ---------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rrhermite", description="q-series identity checks via q-Hermite expansions")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--order", type=parse_order_arg, help=f"q-order (default from ${ORDER_ENV} or per entry)")
        p.add_argument("--output", choices=OUTPUTS, default="text")
        p.add_argument("--parallelism", type=int, default=1)

    def lattice_args(p):
        p.add_argument("--system", required=True)
        p.add_argument("--level", type=int)
        p.add_argument("--classes", help='per-factor class lists like "0|1,full"')

    p = sub.add_parser("verify", help="check registry identities by id")
    p.add_argument("ids", nargs="+")
    p.add_argument("--manifest")
    common(p)

    p = sub.add_parser("verify-all", help="run the whole registry and the constant-term matrix")
    p.add_argument("--manifest")
    p.add_argument("--include-misprints", action="store_true", help="also run the as-printed variants")
    p.add_argument("--skip-core", action="store_true")
    common(p)

    p = sub.add_parser("xi", help="level-p series by constant term and by chain sum")
    lattice_args(p)
    p.add_argument("--r", type=int)
    p.add_argument("--method", choices=("ct", "multisum", "both"), default="both")
    common(p)

    p = sub.add_parser("expand", help="coefficients of a theta product in the q-Hermite basis")
    lattice_args(p)
    common(p)

    p = sub.add_parser("dilog-table", help="dilogarithm values at the Q-system solutions")
    p.add_argument("--max-rank", type=int, default=8)
    common(p)

    p = sub.add_parser("gauss", help="Gauss sums on P/P[N] and the projective SL2 action")
    p.add_argument("--systems")
    p.add_argument("--system")
    p.add_argument("--N", dest="moduli", default="2-12")
    p.add_argument("--relations", action="store_true")
    common(p)

    p = sub.add_parser("hermite", help="a q-Hermite polynomial and its norm")
    p.add_argument("--system", required=True)
    p.add_argument("--weight", required=True, help="antidominant weight in fundamental-weight coordinates, e.g. --weight=-1,0")
    common(p)
    return parser


def parse_order_arg(text: str) -> Fraction:
    try:
        return parse_order(text)
    except UsageError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    get = lambda k, d=None: getattr(ns, k, d)
    return RunConfig(
        command=ns.command, system=get("system"), level=get("level"), classes=get("classes"), r=get("r"),
        order=get("order"), output=get("output", "text"), parallelism=get("parallelism", 1),
        ids=tuple(get("ids", ()) or ()), manifest=get("manifest"),
        include_misprints=bool(get("include_misprints", False)), skip_core=bool(get("skip_core", False)),
        method=get("method", "both") or "both", weight=get("weight"), max_rank=get("max_rank", 8) or 8,
        systems=get("systems"), moduli=get("moduli", "2-12") or "2-12", relations=bool(get("relations", False)),
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)  # exits with status 2 on bad flags
    try:
        cfg = config_from_args(ns)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
