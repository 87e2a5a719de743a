"""End-to-end acceptance checks, one test per criterion.

Each test prints a single ``criterion N: PASS|FAIL ...`` line to the terminal
(outside pytest's capture) so that ``pytest -v`` output doubles as the
acceptance summary.
"""

import json
import time

import pytest
import sympy

import oracles
from vlab import cli, lie
from vlab.cache import Cache
from vlab.catalog import load_catalog
from vlab.center import (
    ci_presentation_check,
    counterexample_check,
    hc_generators,
    intersection_and_fiber_product_check,
    invariant_generators,
    veldkamp_check,
)
from vlab.env import frobenius_combination, is_central, p_center_generators
from vlab.lie import compute_pmap
from vlab.poisson import (
    augmentation_m_mod_m2,
    central_extension_check,
    kac_radul_check,
    lift_independence_check,
    presentation_lift_check,
    same_structure,
    sym_m_mod_m2,
)
from vlab.report import build_report, dumps, without_timings
from vlab.scalar import QQ
from vlab.sym import invariants_up_to_degree

PRIMES = (3, 5, 7, 11)


@pytest.fixture
def announce(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
    return emit


def _hc(L, p, inv_degree=4):
    return hc_generators(L, p, invariant_generators(L, inv_degree))


def test_criterion_1_veldkamp_decomposition(announce):
    cases = [("heisenberg", lie.heisenberg(), p, p + 2) for p in (3, 5, 7)]
    cases += [("sl2", lie.sl(2), p, p + 1) for p in (5, 7)]
    cases += [("takiff(sl2,[2])", lie.takiff(lie.sl(2), [2]), 5, 6),
              ("semidirect(sl2,std)", lie.semidirect(lie.sl(2)), 5, 6)]
    t = time.perf_counter()
    bad = []
    for name, L, p, D in cases:
        v = veldkamp_check(L, p, compute_pmap(L, p), _hc(L, p), D)
        if not (v.holds_in_window and v.independence_ok and v.dims[0] == v.dims[1]):
            bad.append((name, p, D, v.dims))
    elapsed = time.perf_counter() - t
    ok = not bad and elapsed < 120
    announce(1, ok, f"{len(cases)} cases, window dim == candidate span dim, {elapsed:.1f}s"
             + (f"; failing {bad}" if bad else ""))
    assert not bad
    assert elapsed < 120


def test_criterion_2_counterexample(announce):
    t = time.perf_counter()
    witnesses = []
    for n, m in [(1, 1), (1, 2), (2, 3)]:
        for p in (5, 7):
            rep = counterexample_check(n, m, p)
            assert rep.central and rep.outside_span, (n, m, p)
            # independent confirmation of centrality by naive word rewriting
            assert oracles.is_central_naive(lie.remark_solvable(n, m), rep.witness.terms, p)
            L = lie.remark_solvable(n, m)
            v = veldkamp_check(L, p, compute_pmap(L, p), _hc(L, p, rep.window), rep.window)
            assert not v.holds_in_window and v.spanning_defect, (n, m, p)
            witnesses.append(f"({n},{m},{p}):{rep.witness.format()}")
    elapsed = time.perf_counter() - t
    announce(2, elapsed < 10, f"{len(witnesses)} witnesses central and outside Z_p*Z_HC, "
             f"{elapsed:.1f}s: " + " ".join(witnesses))
    assert elapsed < 10


def test_criterion_3_kac_radul(announce):
    t = time.perf_counter()
    checked, bad = 0, []
    for entry in load_catalog():
        for p in PRIMES:
            L = entry.algebra
            v = kac_radul_check(L, p, compute_pmap(L, p, entry.override_for(p)), pairs=10)
            checked += v.data["pairs_checked"]
            if v.status != "pass":
                bad.append((entry.name, p))
    elapsed = time.perf_counter() - t
    announce(3, not bad and elapsed < 60,
             f"{checked} pairs over the catalog at p in {PRIMES}, {elapsed:.1f}s"
             + (f"; failing {bad}" if bad else ""))
    assert not bad
    assert elapsed < 60


def test_criterion_4_lift_independence(announce):
    t = time.perf_counter()
    bad, kr, tables = [], 0, 0
    for entry in load_catalog():
        L = entry.algebra
        for p in PRIMES:
            pm = compute_pmap(L, p, entry.override_for(p))
            v = kac_radul_check(L, p, pm, pairs=10, lift_trials=5)
            kr += v.data["pairs_checked"]
            if v.data["lift_failures"]:
                bad.append(("kac_radul", entry.name, p))
            if p > 7 or L.dim > 6:
                continue
            hc = _hc(L, p)
            D = max(p + 1, 2 * max(hc.degrees(), default=0) + 2)
            pres, _ = augmentation_m_mod_m2(L, p, pm, hc, D)
            tables += 1
            if not presentation_lift_check(L, pres, trials=5).ok:
                bad.append(("presentation", entry.name, p))
    # a sample bracket where the lift genuinely matters: x^3, y^3 in the heisenberg algebra
    H = lie.heisenberg()
    xi = p_center_generators(H, 3, compute_pmap(H, 3))
    sample = lift_independence_check(H, xi[0], xi[1], trials=5)
    elapsed = time.perf_counter() - t
    ok = not bad and sample.ok
    announce(4, ok, f"5 random lifts agree on {kr} Kac-Radul brackets and {tables} augmentation "
             f"bracket tables, {elapsed:.1f}s" + (f"; failing {bad}" if bad else ""))
    assert ok


def test_criterion_5_m_mod_m2(announce):
    entries = load_catalog()
    sym_ok = all(same_structure(e.algebra, sym_m_mod_m2(e.algebra)) for e in entries)

    L = lie.sl(2)
    pm = compute_pmap(L, 5)
    hc = _hc(L, 5)
    pres, alg = augmentation_m_mod_m2(L, 5, pm, hc, 6)
    ext = central_extension_check(L, pm, pres, alg)
    sl2_ok = (alg.dim == 4 and ext.status == "pass" and ext.data["quotient_dim"] == 3
              and ext.data["complement_dim"] == 1 and len(alg.center()) == 1)

    H = lie.heisenberg()
    pmH = compute_pmap(H, 3)
    presH, algH = augmentation_m_mod_m2(H, 3, pmH, _hc(H, 3), 4)
    extH = central_extension_check(H, pmH, presH, algH)
    heis_split = (algH.is_abelian() and extH.status == "pass" and extH.data["quotient_dim"] == 2
                  and extH.data["quotient_abelian"])
    heis_four = algH.dim == 4

    ok = sym_ok and sl2_ok and heis_split and heis_four
    announce(5, ok,
             f"sym m/m^2 == L for all {len(entries)} catalog algebras: {sym_ok}; "
             f"sl2 p=5: dim {alg.dim} = sl2 + k: {sl2_ok}; "
             f"heisenberg p=3: abelian, (g/Z) + k: {heis_split}, "
             f"dim {algH.dim} (stated 4): {heis_four}")
    assert sym_ok and sl2_ok and heis_split


@pytest.mark.xfail(strict=True, reason="z^3 = z*z*z lies in m^2, so m/m^2 for heisenberg at p = 3 is "
                                       "3-dimensional, not 4-dimensional")
def test_criterion_5_heisenberg_is_four_dimensional():
    H = lie.heisenberg()
    pm = compute_pmap(H, 3)
    hc = _hc(H, 3)
    _, alg = augmentation_m_mod_m2(H, 3, pm, hc, 4)
    # the dimension is stable under enlarging the window
    _, alg6 = augmentation_m_mod_m2(H, 3, pm, hc, 6)
    assert alg.dim == alg6.dim
    assert alg.dim == 4


def test_criterion_6_kw_proxy(announce):
    cases = [("heisenberg", lie.heisenberg(), 1), ("sl2", lie.sl(2), 1),
             ("takiff(sl2,[2])", lie.takiff(lie.sl(2), [2]), 2)]
    cases += [(f"abelian({n})", lie.abelian(n), n) for n in (1, 2, 3, 4)]
    rows = []
    for name, L, expected in cases:
        gens = len(invariant_generators(L, 4))
        ind = lie.index(L)
        rows.append((name, gens, ind, expected))
    ok = all(g == i == e for _, g, i, e in rows)
    announce(6, ok, ", ".join(f"{n}: {g} gens / index {i}" for n, g, i, _ in rows))
    assert ok


def test_criterion_7_invariant_oracle(announce):
    L = lie.sl(2)
    graded = invariants_up_to_degree(L, QQ, 4)
    dims = tuple(len(graded[d]) for d in range(1, 5))
    oracle_dims = tuple(oracles.sym_invariant_dimensions(L, 4))
    expr, xs = oracles.sl2_degree2_invariant(L)
    e, h, f = (xs[L.basis.index(s)] for s in "ehf")
    casimir = 4 * e * f + h ** 2
    ratio = sympy.cancel(expr / casimir)
    proportional = ratio.is_number and ratio != 0
    (ours,) = graded[2]
    ours_expr = sum(sympy.Rational(c.numerator, c.denominator) * sympy.Mul(*[x ** k for x, k in zip(xs, m)])
                    for m, c in ours.terms.items())
    ours_prop = sympy.cancel(ours_expr / casimir).is_number
    ok = dims == (0, 1, 0, 1) and oracle_dims == dims and proportional and ours_prop
    announce(7, ok, f"graded dims {dims}, brute-force oracle {oracle_dims}, "
                    f"degree 2 = {ours.format(L.basis)} proportional to 4ef + h^2: {ours_prop}")
    assert ok


def test_criterion_8_ci_and_intersection(announce):
    H = lie.heisenberg()
    pmH = compute_pmap(H, 3)
    hcH = _hc(H, 3)
    ciH = ci_presentation_check(H, 3, hcH, 4)
    inH = intersection_and_fiber_product_check(H, 3, pmH, hcH, 4)
    heis_ok = ciH.status == "pass" and inH.status == "pass" and sorted(inH.data["intersection"]) == ["1", "z^3"]

    L = lie.sl(2)
    pm = compute_pmap(L, 5)
    hc = _hc(L, 5)
    ci = ci_presentation_check(L, 5, hc, 10)
    inter = intersection_and_fiber_product_check(L, 5, pm, hc, 10)
    # vacuous is acceptable only with a stated reason
    sl2_ok = all(v.status == "pass" or (v.status == "vacuous" and v.reason) for v in (ci, inter))
    ok = heis_ok and sl2_ok
    announce(8, ok, f"heisenberg p=3 D=4: ci {ciH.status}, intersection {inH.status} "
                    f"{sorted(inH.data.get('intersection', []))}; sl2 p=5 D=10: ci {ci.status}, "
                    f"intersection {inter.status}")
    assert ok


def test_criterion_9_determinism(announce, tmp_path):
    entries = load_catalog()
    cache = Cache(tmp_path / "cache")
    cold = build_report(entries, cache=cache, jobs=4)
    warm = build_report(entries, cache=cache, jobs=1)
    hits = all(t["cached"] for t in warm["timings"].values())
    misses = not any(t["cached"] for t in cold["timings"].values())
    same = dumps(without_timings(cold)) == dumps(without_timings(warm))

    # the CLI writes byte-identical files apart from the timing fields
    outs = []
    for k in range(2):
        out = tmp_path / f"r{k}.json"
        code = cli.main(["report", "--primes", "3,5", "--out", str(out), "--no-cache", "--no-figures"])
        assert code == 0
        outs.append(json.loads(out.read_text()))
    cli_same = dumps(without_timings(outs[0])) == dumps(without_timings(outs[1]))
    ok = same and hits and misses and cli_same
    announce(9, ok, f"{len(cold['records'])} records: cache hits equal recomputation: {same and hits}; "
                    f"repeated CLI reports byte-identical outside timings: {cli_same}")
    assert ok


def test_frobenius_semilinearity_underlies_kac_radul():
    # sanity for criterion 3: combinations of the p-center stay central
    L = lie.sl(2)
    xi = p_center_generators(L, 5, compute_pmap(L, 5))
    assert is_central(frobenius_combination(xi, [1, 2, 3]))
