"""Command-line driver.

Exit codes: 0 when every verdict is pass or vacuous, 1 when some check fails,
2 for usage, I/O and catalog errors. ``counterexample`` inverts the middle
case: it exits 0 when a witness outside ``Z_p Z_HC`` is found.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

from . import __version__
from .cache import Cache, cache_key
from .catalog import ParseError, ValidationError, find, load_catalog, serialize
from .center import (
    NotCentralModP,
    WindowTooLarge,
    center_window,
    counterexample_check,
    default_degree,
    hc_generators,
    invariant_generators,
    kw_proxy_check,
    veldkamp_check,
)
from .lie import LieError, compute_pmap, index, validate
from .poisson import (
    JacobiFailure,
    augmentation_m_mod_m2,
    central_extension_check,
    kac_radul_check,
    presentation_lift_check,
)
from .report import (
    DEFAULT_PRIMES,
    INVARIANT_DEGREE,
    build_report,
    dumps,
    markdown_summary,
    report_exit_code,
    unexpected_failures,
)
from .scalar import QQ, DenominatorDivisibleByP
from .sym import GenerationUndetermined, invariants_up_to_degree
from .verdict import FAIL

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

log = logging.getLogger("vlab")


class UsageError(Exception):
    pass


def _primes(text: str) -> list[int]:
    try:
        ps = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of primes: {text!r}") from None
    if not ps or any(p < 2 or any(p % d == 0 for d in range(2, int(p**0.5) + 1)) for p in ps):
        raise argparse.ArgumentTypeError(f"not a list of primes: {text!r}")
    return ps


def _prime(text: str) -> int:
    ps = _primes(text)
    if len(ps) != 1:
        raise argparse.ArgumentTypeError(f"expected one prime, got {text!r}")
    return ps[0]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vlab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"vlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, prime=False, degree=False, cached=False):
        p.add_argument("--catalog", type=Path, help="catalog JSON (default: the bundled one)")
        p.add_argument("--out", type=Path, help="write the JSON result here")
        if prime:
            p.add_argument("--algebra", required=True, help="catalog entry name")
            p.add_argument("--prime", type=_prime, required=True)
        if degree:
            p.add_argument("--degree", type=int, help="window degree D (default max(p+1, 2*maxdeg+2))")
        if cached:
            p.add_argument("--cache-dir", type=Path, help="cache directory (env VLAB_CACHE_DIR)")
            p.add_argument("--no-cache", action="store_true")

    p = sub.add_parser("validate", help="parse and validate a catalog")
    common(p)
    p.add_argument("--algebra", help="only this entry")

    p = sub.add_parser("index", help="index of an algebra")
    common(p)
    p.add_argument("--algebra", required=True)

    p = sub.add_parser("invariants", help="invariant generators of Sym(g) over Q")
    common(p)
    p.add_argument("--algebra", required=True)
    p.add_argument("--degree", type=int, default=INVARIANT_DEGREE)

    p = sub.add_parser("center", help="center of U(g) over GF(p) in degrees <= D")
    common(p, prime=True, degree=True, cached=True)

    p = sub.add_parser("veldkamp", help="Z = Z_p Z_HC decomposition in a window")
    common(p, prime=True, degree=True, cached=True)

    p = sub.add_parser("poisson", help="Kac-Radul identity, augmentation m/m^2, central extension")
    common(p, prime=True, degree=True, cached=True)
    p.add_argument("--lift-trials", type=int, default=5)

    p = sub.add_parser("counterexample", help="central element outside Z_p Z_HC for remark_solvable(n, m)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--prime", type=_prime, required=True)
    p.add_argument("--out", type=Path)

    p = sub.add_parser("report", help="every check for every (algebra, prime)")
    common(p, cached=True)
    p.add_argument("--primes", type=_primes, default=list(DEFAULT_PRIMES))
    p.add_argument("--degree", type=int)
    p.add_argument("--algebra", action="append", help="restrict to these entries (repeatable)")
    p.add_argument("--invariant-degree", type=int, default=INVARIANT_DEGREE)
    p.add_argument("--lift-trials", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--markdown", type=Path, help="Markdown summary path (default: next to --out)")
    p.add_argument("--figures", type=Path, help="figure directory (default: next to --out)")
    p.add_argument("--no-figures", action="store_true")
    return parser


# ---------------------------------------------------------------- helpers

def _catalog(args):
    return load_catalog(args.catalog)


def _entry(args):
    try:
        return find(_catalog(args), args.algebra)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None


def _write(path: Path | None, doc) -> None:
    if path is None:
        return
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(dumps(doc), encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc}") from None


def _cache(args) -> Cache:
    return Cache(args.cache_dir, enabled=not args.no_cache)


def _setup(entry, p, D):
    """p-map, HC generators and the default degree for one algebra at one prime."""
    L = entry.algebra
    pmap = compute_pmap(L, p, entry.override_for(p))
    gens = invariant_generators(L, INVARIANT_DEGREE)
    hc = hc_generators(L, p, gens)
    if D is None:
        D = default_degree(p, [f.degree() for f in gens])
    return pmap, hc, D


def _cached_run(args, entry, op, compute):
    """Run ``compute() -> (D, result)`` through the cache; returns the document."""
    cache = _cache(args)
    key = cache_key(serialize(entry), args.prime, args.degree, op)
    t = time.perf_counter()
    hit = cache.get(key)
    if hit is not None:
        return dict(hit, timings={"cached": True, "seconds": round(time.perf_counter() - t, 4)})
    D, result = compute()
    doc = {"command": op, "algebra": entry.name, "p": args.prime, "D": D, "version": __version__,
           "result": result}
    doc = _roundtrip(doc)
    cache.put(key, doc)
    return dict(doc, timings={"cached": False, "seconds": round(time.perf_counter() - t, 4)})


def _roundtrip(doc):
    return json.loads(json.dumps(doc, sort_keys=True))


# ---------------------------------------------------------------- commands

def cmd_validate(args) -> int:
    entries = _catalog(args)
    if args.algebra:
        entries = [find(entries, args.algebra)]
    out = []
    for e in entries:
        validate(e.algebra)
        out.append({"name": e.name, "dim": e.dim})
        print(f"ok  {e.name:<24} dim {e.dim}")
    _write(args.out, {"command": "validate", "entries": out})
    return EXIT_OK


def cmd_index(args) -> int:
    e = _entry(args)
    ind = index(e.algebra)
    print(f"index({e.name}) = {ind}")
    _write(args.out, {"command": "index", "algebra": e.name, "index": ind})
    return EXIT_OK


def cmd_invariants(args) -> int:
    e = _entry(args)
    L = e.algebra
    graded = invariants_up_to_degree(L, QQ, args.degree)
    dims = {d: len(graded.get(d, [])) for d in range(1, args.degree + 1)}
    doc = {"command": "invariants", "algebra": e.name, "degree": args.degree,
           "graded_dimensions": [dims[d] for d in sorted(dims)]}
    try:
        gens = invariant_generators(L, args.degree)
        doc["generators"] = [{"degree": f.degree(), "poly": f.format(L.basis)} for f in gens]
        kw = kw_proxy_check(L, gens)
    except GenerationUndetermined as exc:
        doc["generators"] = None
        kw = None
        print(f"generators undetermined: {exc}")
    print(f"graded dimensions (degrees 1..{args.degree}): {doc['graded_dimensions']}")
    for g in doc["generators"] or []:
        print(f"  degree {g['degree']}: {g['poly']}")
    if kw is not None:
        doc["kw_proxy"] = kw.to_json()
        print(f"generators vs index: {kw.status}")
    _write(args.out, doc)
    return EXIT_FAIL if kw is not None and kw.status == FAIL else EXIT_OK


def cmd_center(args) -> int:
    e = _entry(args)

    def compute():
        pmap, _, D = _setup(e, args.prime, args.degree)
        return D, center_window(e.algebra, args.prime, pmap, D).to_json()

    doc = _cached_run(args, e, "center", compute)
    res = doc["result"]
    print(f"center window of U({e.name}) over GF({args.prime}), degree <= {doc['D']}: "
          f"dimension {res['dimension']}")
    for b in res["basis"][:20]:
        print(f"  {b}")
    if len(res["basis"]) > 20:
        print(f"  ... {len(res['basis']) - 20} more")
    _write(args.out, doc)
    return EXIT_OK


def cmd_veldkamp(args) -> int:
    e = _entry(args)

    def compute():
        pmap, hc, D = _setup(e, args.prime, args.degree)
        return D, veldkamp_check(e.algebra, args.prime, pmap, hc, D).to_json()

    doc = _cached_run(args, e, "veldkamp", compute)
    res = doc["result"]
    print(f"{e.name} p={args.prime} D={doc['D']}: holds_in_window={str(res['holds_in_window']).lower()} "
          f"dims={tuple(res['dims'])} independent={str(res['independence_ok']).lower()}")
    for u in res["spanning_defect"][:10]:
        print(f"  outside Z_p Z_HC: {u}")
    _write(args.out, doc)
    return EXIT_OK if res["holds_in_window"] else EXIT_FAIL


def cmd_poisson(args) -> int:
    e = _entry(args)
    L, p = e.algebra, args.prime

    def compute():
        pmap, hc, D = _setup(e, p, args.degree)
        res = {"kac_radul": kac_radul_check(L, p, pmap, lift_trials=args.lift_trials).to_json()}
        try:
            pres, alg = augmentation_m_mod_m2(L, p, pmap, hc, D)
        except JacobiFailure as exc:
            res["central_extension"] = {"status": FAIL, "reason": str(exc)}
            return D, res
        res["presentation"] = pres.to_json()
        res["m_mod_m2"] = alg.to_json()
        if args.lift_trials:
            res["presentation_lifts"] = presentation_lift_check(L, pres, args.lift_trials).to_json()
        res["central_extension"] = central_extension_check(L, pmap, pres, alg).to_json()
        return D, res

    doc = _cached_run(args, e, f"poisson:lift{args.lift_trials}", compute)
    res = doc["result"]
    verdicts = {k: v["status"] for k, v in res.items() if isinstance(v, dict) and "status" in v}
    if "m_mod_m2" in res:
        mm = res["m_mod_m2"]
        print(f"m/m^2 for {e.name} at p={p}: dim {mm['dim']} on {', '.join(mm['labels'])}")
    for k, v in sorted(verdicts.items()):
        print(f"  {k}: {v}")
    _write(args.out, doc)
    return EXIT_FAIL if FAIL in verdicts.values() else EXIT_OK


def cmd_counterexample(args) -> int:
    rep = counterexample_check(args.n, args.m, args.prime)
    doc = {"command": "counterexample", **rep.to_json()}
    print(f"remark_solvable({args.n},{args.m}) p={args.prime}: witness {rep.witness.format()} "
          f"central={str(rep.central).lower()} outside_span={str(rep.outside_span).lower()}")
    _write(args.out, doc)
    return EXIT_OK if rep.ok else EXIT_FAIL


def cmd_report(args) -> int:
    entries = _catalog(args)
    if args.algebra:
        try:
            entries = [find(entries, name) for name in args.algebra]
        except KeyError as exc:
            raise UsageError(exc.args[0]) from None
    report = build_report(entries, args.primes, args.degree, args.invariant_degree,
                          args.lift_trials, _cache(args), max(1, args.jobs))
    table = markdown_summary(report)
    print(table, end="")
    for rec in report["records"]:
        bad = unexpected_failures(rec)
        if bad:
            print(f"FAILED {rec['algebra']} p={rec['p']}: {', '.join(bad)}")
    _write(args.out, report)
    md = args.markdown or (args.out.with_suffix(".md") if args.out else None)
    if md is not None:
        md.parent.mkdir(parents=True, exist_ok=True)
        md.write_text(f"# vlab report\n\nprimes: {', '.join(map(str, args.primes))}\n\n{table}",
                      encoding="utf-8")
    if not args.no_figures and (args.figures or args.out):
        from .plotting import render_report_figures
        figdir = args.figures or args.out.parent
        prefix = "" if args.figures else f"{args.out.stem}."
        for path in render_report_figures(report, figdir, prefix):
            print(f"wrote {path}")
    return report_exit_code(report)


COMMANDS = {
    "validate": cmd_validate,
    "index": cmd_index,
    "invariants": cmd_invariants,
    "center": cmd_center,
    "veldkamp": cmd_veldkamp,
    "poisson": cmd_poisson,
    "counterexample": cmd_counterexample,
    "report": cmd_report,
}


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except (ParseError, ValidationError, UsageError) as exc:
        print(f"vlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except KeyError as exc:
        print(f"vlab: error: {exc.args[0]}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"vlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (LieError, DenominatorDivisibleByP, NotCentralModP, WindowTooLarge) as exc:
        print(f"vlab: cannot run {args.command}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
