"""Command line: ``compute``, ``table``, ``verify`` and ``movie``."""

from __future__ import annotations

import argparse
import ast
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from .cobordism import MovieError, PatternMismatch, compose_movie, lee_isomorphism, parse_movie
from .complex import DEFAULT_CAP, DimensionCapExceeded
from .diagram import (BraidWord, DiagramError, KnotTableEntry, PlanarDiagram, from_braid,
                      load_table, parse_braid, parse_pd)
from .homology import EmptyHomology, poincare_string, s_invariant, width
from .signature import NotAKnot, braid_signature
from .suites import SUITES, run_suite

EXIT_PARSE, EXIT_CAP, EXIT_TABLE, EXIT_VERIFY, EXIT_MOVIE = 2, 3, 4, 5, 6
ALL_INVARIANTS = ("s", "width", "kh", "lee", "sigma")
REPORT_FIELDS = ("name", "s", "s_min", "s_max", "width", "lee_rank", "sigma", "kh_poincare",
                 "runtime_ms")


class InputError(ValueError):
    pass


@dataclass
class RunConfig:
    input: Optional[str] = None
    data: Optional[str] = None
    invariants: Sequence[str] = ALL_INVARIANTS
    cap: int = DEFAULT_CAP
    threads: int = 1
    format: str = "text"
    seed: int = 0
    samples: int = 20
    where: Optional[str] = None
    verbose: bool = False
    suites: List[str] = field(default_factory=list)


# --------------------------------------------------------------------------
# inputs


def data_path(name: Optional[str]) -> List[Path]:
    """Table files to search: the given path, or a bundled file of that name."""
    bundled = resources.files("leekh") / "data"
    if name is None:
        return [Path(str(bundled / "knots.csv")), Path(str(bundled / "small_knots.csv"))]
    p = Path(name)
    if p.exists():
        return [p]
    alt = bundled / p.name
    if alt.is_file():
        return [Path(str(alt))]
    return [p]


def find_entry(name: str, data: Optional[str]) -> KnotTableEntry:
    for path in data_path(data):
        for e in load_table(path):
            if e.name == name:
                return e
    raise InputError(f"no knot named {name!r}")


def resolve_input(source: str, data: Optional[str]) -> tuple:
    """(name, diagram, braid or None) from ``pd:``, ``braid:`` or ``name:``."""
    kind, sep, body = source.partition(":")
    if not sep:
        raise InputError("input must start with pd:, braid: or name:")
    body = body.strip()
    if kind == "pd":
        return "pd", parse_pd(body), None
    if kind == "braid":
        w = parse_braid(body)
        return str(w), from_braid(w), w
    if kind == "name":
        e = find_entry(body, data)
        return e.name, e.diagram(), e.braid_word()
    raise InputError(f"unknown input kind {kind!r}")


# --------------------------------------------------------------------------
# reports


def compute_report(name: str, D: PlanarDiagram, braid: Optional[BraidWord],
                   cap: int, invariants: Sequence[str] = ALL_INVARIANTS) -> Dict[str, object]:
    t0 = time.perf_counter()
    r = s_invariant(D, cap)
    rep: Dict[str, object] = {k: None for k in REPORT_FIELDS}
    rep["name"] = name
    if "s" in invariants:
        rep.update(s=r.s, s_min=r.s_min, s_max=r.s_max)
    if "width" in invariants:
        try:
            rep["width"] = width(r.kh)
        except EmptyHomology:
            rep["width"] = None
    if "lee" in invariants:
        rep["lee_rank"] = r.lee_rank
    if "kh" in invariants:
        rep["kh_poincare"] = poincare_string(r.kh)
    if "sigma" in invariants and braid is not None:
        try:
            rep["sigma"] = braid_signature(braid)
        except NotAKnot:
            rep["sigma"] = None
    rep["runtime_ms"] = int(round((time.perf_counter() - t0) * 1000))
    return rep


def render(rows: List[Dict[str, object]], fmt: str, fields: Sequence[str] = REPORT_FIELDS) -> str:
    if fmt == "json":
        ordered = [{k: r.get(k) for k in fields} for r in rows]
        return json.dumps(ordered[0] if len(ordered) == 1 else ordered, indent=2)
    if fmt == "tsv":
        lines = ["\t".join(fields)]
        for r in rows:
            lines.append("\t".join("" if r.get(k) is None else str(r.get(k)) for k in fields))
        return "\n".join(lines)
    out = []
    for r in rows:
        for k in fields:
            v = r.get(k)
            out.append(f"{k:12s} {'n/a' if v is None else v}")
        out.append("")
    return "\n".join(out).rstrip()


# --------------------------------------------------------------------------
# where-expressions for the table


_ALLOWED = (ast.Expression, ast.BoolOp, ast.And, ast.Or, ast.UnaryOp, ast.Not, ast.USub,
            ast.Compare, ast.Eq, ast.NotEq, ast.Lt, ast.LtE, ast.Gt, ast.GtE, ast.Name,
            ast.Load, ast.Constant, ast.Call, ast.BinOp, ast.Add, ast.Sub, ast.Mult)


def compile_where(expr: str):
    """A row predicate over the report fields; only comparisons, arithmetic and abs()."""
    try:
        tree = ast.parse(expr, mode="eval")
    except SyntaxError as exc:
        raise InputError(f"bad --where expression: {exc.msg}") from None
    for node in ast.walk(tree):
        if not isinstance(node, _ALLOWED):
            raise InputError(f"--where does not allow {type(node).__name__}")
        if isinstance(node, ast.Call) and not (isinstance(node.func, ast.Name) and node.func.id == "abs"):
            raise InputError("--where only allows abs()")
    code = compile(tree, "<where>", "eval")

    def pred(row: Dict[str, object]) -> bool:
        env = {k: v for k, v in row.items()}
        try:
            return bool(eval(code, {"__builtins__": {}, "abs": abs}, env))
        except TypeError:
            return False  # a missing value (None) never matches
        except NameError as exc:
            raise InputError(f"--where: {exc}") from None
    return pred


# --------------------------------------------------------------------------
# commands


def cmd_compute(cfg: RunConfig) -> int:
    if not cfg.input:
        raise InputError("compute needs --input")
    name, D, braid = resolve_input(cfg.input, cfg.data)
    rep = compute_report(name, D, braid, cfg.cap, cfg.invariants)
    print(render([rep], cfg.format))
    return 0


def _table_row(entry: KnotTableEntry, cap: int) -> Dict[str, object]:
    rep = compute_report(entry.name, entry.diagram(), entry.braid_word(), cap)
    rep["crossings"] = entry.crossings
    rep["s_ref"] = entry.s_ref
    rep["sigma_ref"] = entry.sigma_ref
    rep["match"] = (entry.s_ref is None or rep["s"] == entry.s_ref) and \
        (entry.sigma_ref is None or rep["sigma"] is None or rep["sigma"] == entry.sigma_ref)
    return rep


TABLE_FIELDS = ("name", "crossings", "s", "s_ref", "sigma", "sigma_ref", "width", "match",
                "runtime_ms")


def cmd_table(cfg: RunConfig) -> int:
    paths = data_path(cfg.data)[:1]
    entries = load_table(paths[0])
    pred = compile_where(cfg.where) if cfg.where else None
    if cfg.threads > 1 and len(entries) > 1:
        with ProcessPoolExecutor(cfg.threads) as ex:
            rows = list(ex.map(_table_row, entries, [cfg.cap] * len(entries)))
    else:
        rows = [_table_row(e, cfg.cap) for e in entries]
    if pred:
        rows = [r for r in rows if pred(r)]
    if cfg.format == "text":
        header = f"{'name':10s} {'s':>4s} {'s_ref':>6s} {'sigma':>6s} {'sig_ref':>8s}  status"
        print(header)
        for r in rows:
            sig = "n/a" if r["sigma"] is None else str(r["sigma"])
            status = "ok" if r["match"] else "MISMATCH"
            print(f"{r['name']:10s} {r['s']:>4} {str(r['s_ref']):>6s} {sig:>6s} "
                  f"{str(r['sigma_ref']):>8s}  {status}")
        print(f"{len(rows)} rows, {sum(not r['match'] for r in rows)} mismatches")
    else:
        print(render(rows, cfg.format, TABLE_FIELDS))
    return EXIT_TABLE if any(not r["match"] for r in rows) else 0


def cmd_verify(cfg: RunConfig) -> int:
    names = cfg.suites or list(SUITES)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise InputError(f"unknown suite(s): {', '.join(unknown)}")
    failed = 0
    for name in names:
        checks = run_suite(name, cfg.seed, cfg.samples)
        by_prop: Dict[str, List] = {}
        for c in checks:
            by_prop.setdefault(c.prop, []).append(c)
        for prop, cs in by_prop.items():
            bad = [c for c in cs if not c.passed]
            failed += bool(bad)
            status = "PASS" if not bad else "FAIL"
            print(f"{status} {name}: {prop} ({len(cs) - len(bad)}/{len(cs)})")
            for c in bad[:5]:
                print(f"    {c.detail}")
            if cfg.verbose:
                for c in cs:
                    print(f"    {'ok ' if c.passed else 'bad'} {c.detail}")
    return EXIT_VERIFY if failed else 0


def cmd_movie(cfg: RunConfig, movie_path: str) -> int:
    try:
        text = Path(movie_path).read_text(encoding="utf-8")
    except OSError:
        bundled = resources.files("leekh") / "data" / Path(movie_path).name
        if not bundled.is_file():
            raise InputError(f"cannot read movie {movie_path!r}") from None
        text = bundled.read_text(encoding="utf-8")
    movie = parse_movie(text)
    source = cfg.input or (movie.start and (movie.start if ":" in movie.start else "pd:" + movie.start))
    if not source:
        raise InputError("movie has no starting diagram; pass --input")
    _, D, _ = resolve_input(source, cfg.data)

    def echo(n, move, diagram):
        if cfg.verbose:
            print(f"[{n}] {move}  ->  {diagram.pd_string() or '(crossingless)'}")

    result = compose_movie(D, movie, cfg.cap, echo)
    final = result.diagrams[-1]
    F = result.composite
    nonzero = not F.is_zero()
    iso = lee_isomorphism(F) if nonzero else False
    rep = {
        "final": final.pd_string(),
        "euler_characteristic": result.euler_characteristic,
        "filtered_degree": F.filtered_degree,
        "chain_map": F.is_chain_map(),
        "respects_filtration": F.respects_filtration(),
        "nonzero": nonzero,
        "lee_isomorphism": iso,
        "s_bound": None,
    }
    unknot = final.num_crossings == 0 and final.num_components == 1
    if D.is_knot() and unknot and iso:
        rep["s_bound"] = -result.euler_characteristic
    if cfg.format == "json":
        print(json.dumps(rep, indent=2))
    else:
        for k, v in rep.items():
            print(f"{k:22s} {v}")
        if rep["s_bound"] is not None:
            print(f"bound: |s| <= {rep['s_bound']}")
        if not nonzero:
            print("warning: the composite is zero (the surface has a closed component)")
    return 0


# --------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", help="pd:<PD code>, braid:<word> or name:<table name>")
    common.add_argument("--data", help="knot table CSV (bundled names are accepted)")
    common.add_argument("--invariants", default=",".join(ALL_INVARIANTS),
                        help="comma list from " + ",".join(ALL_INVARIANTS))
    common.add_argument("--cap", type=int, default=DEFAULT_CAP, help="largest complex dimension")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--format", choices=("text", "json", "tsv"), default="text")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--samples", type=int, default=20)
    common.add_argument("--where", help="row filter for table, e.g. \"s!=sigma\"")
    common.add_argument("--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="leekh", description="Lee homology and the s-invariant")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("compute", parents=[common], help="invariants of one knot")
    sub.add_parser("table", parents=[common], help="recompute a knot table")
    v = sub.add_parser("verify", parents=[common], help="run property suites")
    v.add_argument("--suite", action="append", default=[],
                   help="suite name (repeatable or comma separated): " + ", ".join(SUITES))
    m = sub.add_parser("movie", parents=[common], help="run a cobordism movie")
    m.add_argument("path")
    return p


def config_from(args) -> RunConfig:
    suites = [s for item in getattr(args, "suite", []) for s in item.split(",") if s]
    invariants = tuple(i.strip() for i in args.invariants.split(",") if i.strip())
    bad = [i for i in invariants if i not in ALL_INVARIANTS]
    if bad:
        raise InputError(f"unknown invariant(s): {', '.join(bad)}")
    if args.cap < 1:
        raise InputError("--cap must be at least 1")
    return RunConfig(args.input, args.data, invariants, args.cap, max(1, args.threads),
                     args.format, args.seed, args.samples, args.where, args.verbose, suites)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from(args)
        if args.command == "compute":
            return cmd_compute(cfg)
        if args.command == "table":
            return cmd_table(cfg)
        if args.command == "verify":
            return cmd_verify(cfg)
        return cmd_movie(cfg, args.path)
    except MovieError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MOVIE
    except DimensionCapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (InputError, DiagramError, PatternMismatch) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MOVIE if args.command == "movie" and isinstance(exc, PatternMismatch) else EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
