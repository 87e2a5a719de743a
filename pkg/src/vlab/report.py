"""Per-(algebra, prime) verification records and the aggregated report.

Records are plain JSON values. Everything that depends on the clock lives in
a separate ``timings`` mapping so that two runs over the same inputs give
byte-identical records.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor

from . import __version__
from .cache import Cache, cache_key, content_hash
from .catalog import CatalogEntry, parse_entry, serialize
from .center import (
    NotCentralModP,
    WindowTooLarge,
    center_window,
    ci_presentation_check,
    default_degree,
    hc_generators,
    intersection_and_fiber_product_check,
    invariant_generators,
    kw_proxy_check,
    veldkamp_check,
)
from .lie import LieAlgebra, LieError, center_of, compute_pmap, index
from .poisson import JacobiFailure, augmentation_m_mod_m2, central_extension_check, kac_radul_check
from .scalar import GF, QQ, DenominatorDivisibleByP
from .sym import GenerationUndetermined, has_nontrivial_semi_invariants
from .verdict import FAIL, VACUOUS, Verdict

REPORT_SCHEMA = 1
DEFAULT_PRIMES = (3, 5, 7, 11)
INVARIANT_DEGREE = 4
SEMI_INVARIANT_DEGREE = 3
CHECKS = ("kw_proxy", "veldkamp", "ci", "intersection", "kac_radul", "central_extension")
# checks whose statement needs "no nontrivial semi-invariants"
HYPOTHESIS_CHECKS = ("kw_proxy", "veldkamp", "ci", "intersection", "central_extension")


def _normalized(obj):
    # the same JSON value whether freshly computed or read back from the cache
    return json.loads(json.dumps(obj, sort_keys=True))


class _Clock:
    def __init__(self):
        self.times: dict = {}

    def run(self, name, fn, *args, **kwargs):
        t = time.perf_counter()
        try:
            return fn(*args, **kwargs)
        finally:
            self.times[name] = round(time.perf_counter() - t, 4)


def analyze_algebra(entry: CatalogEntry, inv_degree: int = INVARIANT_DEGREE) -> tuple[dict, list]:
    """Prime-independent data: index, invariant generators, semi-invariant probe.

    Returns the JSON part and the generators themselves.
    """
    L = entry.algebra
    out: dict = {"index": index(L)}
    gens = []
    try:
        gens = invariant_generators(L, inv_degree)
        out["generators"] = [{"degree": f.degree(), "poly": f.format(L.basis)} for f in gens]
        out["kw_proxy"] = kw_proxy_check(L, gens).to_json()
    except GenerationUndetermined as exc:
        out["generators"] = None
        out["kw_proxy"] = Verdict(VACUOUS, str(exc)).to_json()
    semi = has_nontrivial_semi_invariants(L, SEMI_INVARIANT_DEGREE)
    out["hypotheses"] = {
        "semi_invariant_degree": SEMI_INVARIANT_DEGREE,
        "nontrivial_semi_invariants": bool(semi),
    }
    if semi:
        s = semi[0]
        out["hypotheses"]["example"] = {"degree": s.degree, "poly": s.basis[0].format(L.basis)}
    return out, gens


def good_reduction(L: LieAlgebra, p: int) -> bool:
    """Whether the center of ``g`` keeps its dimension mod p.

    A jump (``sl_n`` with ``p | n`` gains the scalars) means ``g_k`` is not the
    reduction of a generic member of the family, and the large-p statements
    are not expected to hold there.
    """
    return len(center_of(L, GF(p))) == len(center_of(L, QQ))


def _vacuous_all(rec, names, reason):
    for name in names:
        rec["verdicts"].setdefault(name, Verdict(VACUOUS, reason).to_json())


def verify_prime(entry: CatalogEntry, p: int, D: int | None = None,
                 inv_degree: int = INVARIANT_DEGREE, lift_trials: int = 0) -> tuple[dict, dict]:
    """Run every check for one prime. Returns ``(record, timings)``."""
    L = entry.algebra
    clock = _Clock()
    base, gens = clock.run("algebra", analyze_algebra, entry, inv_degree)
    hyp = dict(base["hypotheses"], good_reduction=good_reduction(L, p))
    rec: dict = {"algebra": entry.name, "p": p, "index": base["index"],
                 "generators": base["generators"], "hypotheses": hyp,
                 "verdicts": {"kw_proxy": base["kw_proxy"]}}
    u_checks = [c for c in CHECKS if c != "kw_proxy"]
    try:
        pmap = clock.run("pmap", compute_pmap, L, p, entry.override_for(p))
    except (LieError, DenominatorDivisibleByP, ValueError) as exc:
        _vacuous_all(rec, u_checks, f"no p-map at p = {p}: {exc}")
        return _finish(rec), clock.times
    rec["pmap"] = [list(row) for row in pmap.images]
    rec["verdicts"]["kac_radul"] = clock.run(
        "kac_radul", kac_radul_check, L, p, pmap, lift_trials=lift_trials).to_json()
    try:
        hc = clock.run("hc", hc_generators, L, p, gens)
    except (NotCentralModP, DenominatorDivisibleByP) as exc:
        _vacuous_all(rec, u_checks, f"HC generators do not reduce mod {p}: {exc}")
        return _finish(rec), clock.times
    if D is None:
        D = default_degree(p, [f.degree() for f in gens])
    rec["D"] = D
    try:
        window = clock.run("center_window", center_window, L, p, pmap, D)
    except WindowTooLarge as exc:
        _vacuous_all(rec, u_checks, str(exc))
        return _finish(rec), clock.times
    rec["center_window"] = {"dimension": window.dimension,
                            "leading_monomials": [list(m) for m in window.leading_monomials()]}
    vk = clock.run("veldkamp", veldkamp_check, L, p, pmap, hc, D, window)
    rec["verdicts"]["veldkamp"] = vk.to_verdict().to_json()
    rec["verdicts"]["ci"] = clock.run("ci", ci_presentation_check, L, p, hc, D, window).to_json()
    rec["verdicts"]["intersection"] = clock.run(
        "intersection", intersection_and_fiber_product_check, L, p, pmap, hc, D).to_json()
    try:
        pres, alg = clock.run("m_mod_m2", augmentation_m_mod_m2, L, p, pmap, hc, D, window)
        rec["presentation"] = pres.to_json()
        rec["m_mod_m2"] = alg.to_json()
        rec["verdicts"]["central_extension"] = clock.run(
            "central_extension", central_extension_check, L, pmap, pres, alg).to_json()
    except JacobiFailure as exc:
        rec["m_mod_m2"] = None
        rec["verdicts"]["central_extension"] = Verdict(FAIL, str(exc)).to_json()
    return _finish(rec), clock.times


def _finish(rec):
    hyp = rec["hypotheses"]
    expected = hyp["nontrivial_semi_invariants"] or not hyp["good_reduction"]
    rec["expected_failures"] = sorted(
        name for name in HYPOTHESIS_CHECKS
        if expected and rec["verdicts"].get(name, {}).get("status") == FAIL
    )
    return _normalized(rec)


def unexpected_failures(rec) -> list[str]:
    return sorted(name for name, v in rec["verdicts"].items()
                  if v["status"] == FAIL and name not in rec.get("expected_failures", []))


# ---------------------------------------------------------------- jobs

def _job(args):
    raw, p, D, inv_degree, lift_trials, cache_root, use_cache = args
    entry = parse_entry(raw)
    cache = Cache(cache_root, use_cache)
    key = cache_key(raw, p, D, f"verify:inv{inv_degree}:lift{lift_trials}")
    hit = cache.get(key)
    if hit is not None:
        return hit, {"cached": True}
    rec, times = verify_prime(entry, p, D, inv_degree, lift_trials)
    cache.put(key, rec)
    return rec, dict(times, cached=False)


def build_report(entries, primes=DEFAULT_PRIMES, D=None, inv_degree=INVARIANT_DEGREE,
                 lift_trials=0, cache: Cache | None = None, jobs: int = 1) -> dict:
    cache = cache or Cache(enabled=False)
    raws = [serialize(e) for e in entries]
    tasks = [(raw, p, D, inv_degree, lift_trials, str(cache.root), cache.enabled)
             for raw in raws for p in primes]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_job, tasks))
    else:
        results = [_job(t) for t in tasks]
    records = [r for r, _ in results]
    timings = {f"{r['algebra']}@{r['p']}": t for r, t in results}
    inputs = {"algebras": raws, "primes": list(primes), "degree": D,
              "invariant_degree": inv_degree, "lift_trials": lift_trials}
    return {
        "schema": REPORT_SCHEMA,
        "tool": "vlab",
        "version": __version__,
        "inputs_hash": content_hash(inputs),
        "primes": list(primes),
        "records": records,
        "timings": timings,
    }


def report_exit_code(report) -> int:
    return 1 if any(unexpected_failures(r) for r in report["records"]) else 0


def dumps(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def without_timings(doc) -> dict:
    return {k: v for k, v in doc.items() if k != "timings"}


# ---------------------------------------------------------------- markdown

def _cell(rec, name):
    v = rec["verdicts"].get(name)
    if v is None:
        return "-"
    if v["status"] == FAIL:
        return "fail (expected)" if name in rec.get("expected_failures", []) else "**FAIL**"
    return v["status"]


def _hypotheses(rec) -> str:
    hyp = rec["hypotheses"]
    out = []
    if hyp["nontrivial_semi_invariants"]:
        out.append("semi-invariants")
    if not hyp["good_reduction"]:
        out.append("center jumps mod p")
    return ", ".join(out) or "ok"


def markdown_summary(report) -> str:
    head = ["algebra", "p", "index", "gen degrees", "D", "window", *CHECKS, "m/m^2", "hypotheses"]
    lines = ["| " + " | ".join(head) + " |", "|" + "---|" * len(head)]
    for rec in report["records"]:
        gens = rec.get("generators")
        degs = ",".join(str(g["degree"]) for g in gens) if gens else ("-" if gens is None else "none")
        win = rec.get("center_window", {}).get("dimension", "-")
        mm2 = rec.get("m_mod_m2")
        row = [rec["algebra"], str(rec["p"]), str(rec["index"]), degs, str(rec.get("D", "-")), str(win)]
        row += [_cell(rec, c) for c in CHECKS]
        row.append(str(mm2["dim"]) if mm2 else "-")
        row.append(_hypotheses(rec))
        lines.append("| " + " | ".join(row) + " |")
    return "\n".join(lines) + "\n"
