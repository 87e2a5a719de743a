import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from vlab import lie
from vlab.center import (
    WindowTooLarge,
    center_window,
    ci_presentation_check,
    counterexample_check,
    default_degree,
    hc_generators,
    intersection_and_fiber_product_check,
    invariant_generators,
    kw_proxy_check,
    veldkamp_check,
)
from vlab.env import is_central
from vlab.lie import compute_pmap


def _setup(L, p, D=None):
    pm = compute_pmap(L, p)
    gens = invariant_generators(L, 4)
    hc = hc_generators(L, p, gens)
    return pm, hc, D or default_degree(p, [f.degree() for f in gens])


@pytest.mark.parametrize("L,p,D", [
    (lie.heisenberg(), 3, 4),
    (lie.sl(2), 3, 4),
    (lie.sl(2), 5, 5),
    (lie.remark_solvable(1, 1), 5, 5),
    (lie.abelian(2), 3, 2),
    (lie.semidirect(lie.sl(2)), 3, 3),
])
def test_window_dimension_matches_dense_oracle(L, p, D):
    w = center_window(L, p, compute_pmap(L, p), D)
    assert w.dimension == oracles.center_window_dimension(L, p, D)
    for b in w.basis:
        assert oracles.is_central_naive(L, b.terms, p)


def test_heisenberg_window():
    L = lie.heisenberg()
    w = center_window(L, 3, compute_pmap(L, 3), 4)
    assert w.dimension == 9
    assert sorted(b.format() for b in w.basis) == sorted(
        ["1", "z", "z^2", "z^3", "z^4", "x^3", "y^3", "x^3*z", "y^3*z"])


def test_window_budget():
    with pytest.raises(WindowTooLarge):
        center_window(lie.sl(3), 5, None, 12, budget=1000)


@settings(max_examples=8, deadline=None)
@given(st.sampled_from([lie.heisenberg(), lie.sl(2), lie.remark_solvable(1, 2)]),
       st.sampled_from([3, 5]), st.integers(1, 5))
def test_windows_grow_with_the_degree(L, p, D):
    pm = compute_pmap(L, p)
    small, big = center_window(L, p, pm, D), center_window(L, p, pm, D + 1)
    assert small.dimension <= big.dimension
    # the smaller window is exactly the degree <= D part of the larger one
    assert small.dimension == sum(1 for b in big.basis if b.degree() <= D)


def test_hc_generators_are_central_and_lift_leading_forms():
    L = lie.sl(2)
    hc = hc_generators(L, 5, invariant_generators(L, 2))
    (g,) = hc.gens
    assert is_central(g)
    # symmetrization of 4ef + h^2 is 4ef + h^2 - 2h, and -2 = 3 mod 5
    assert g.format() == "4*e*f + h^2 + 3*h"


@pytest.mark.parametrize("L,p,D", [
    (lie.heisenberg(), 3, 5), (lie.heisenberg(), 5, 7), (lie.heisenberg(), 7, 9),
    (lie.sl(2), 5, 6), (lie.sl(2), 7, 8),
    (lie.takiff(lie.sl(2), [2]), 5, 6), (lie.semidirect(lie.sl(2)), 5, 6),
])
def test_veldkamp_holds(L, p, D):
    pm, hc, D = _setup(L, p, D)
    v = veldkamp_check(L, p, pm, hc, D)
    assert v.holds_in_window and v.independence_ok
    assert v.dims[0] == v.dims[1]
    assert v.to_verdict().status == "pass"


def test_veldkamp_heisenberg_dims():
    L = lie.heisenberg()
    pm, hc, _ = _setup(L, 3)
    v = veldkamp_check(L, 3, pm, hc, 4)
    assert v.holds_in_window and tuple(v.dims) == (9, 9)


def test_veldkamp_defect_for_remark_solvable():
    L = lie.remark_solvable(1, 1)
    pm, hc, _ = _setup(L, 5)
    v = veldkamp_check(L, 5, pm, hc, 5)
    assert not v.holds_in_window
    assert sorted(u.format() for u in v.spanning_defect) == ["x*y^4", "x^2*y^3", "x^3*y^2", "x^4*y"]
    data = v.to_verdict().to_json()["data"]
    assert data["spanning_defect_size"] == 4


@pytest.mark.parametrize("n,m,p,witness", [
    (1, 1, 5, "x*y^4"), (1, 2, 5, "x^2*y^4"), (2, 3, 5, "x^3*y^3"), (2, 2, 7, "x*y^6"),
])
def test_counterexample_witnesses(n, m, p, witness):
    rep = counterexample_check(n, m, p)
    assert rep.witness.format() == witness
    assert rep.central and rep.outside_span and rep.ok
    assert oracles.is_central_naive(lie.remark_solvable(n, m), rep.witness.terms, p)


def test_ci_checks():
    L = lie.heisenberg()
    pm, hc, _ = _setup(L, 3)
    assert ci_presentation_check(L, 3, hc, 4).status == "pass"
    # abelian: every polynomial is invariant, the check has nothing to say
    A = lie.abelian(2)
    _, hcA, _ = _setup(A, 3)
    assert ci_presentation_check(A, 3, hcA, 3).status == "vacuous"
    R = lie.remark_solvable(1, 1)
    _, hcR, _ = _setup(R, 5)
    assert ci_presentation_check(R, 5, hcR, 5).status == "vacuous"


def test_intersection_heisenberg():
    L = lie.heisenberg()
    pm, hc, _ = _setup(L, 3)
    v = intersection_and_fiber_product_check(L, 3, pm, hc, 4)
    assert v.status == "pass"
    assert sorted(v.data["intersection"]) == ["1", "z^3"]


def test_intersection_abelian():
    A = lie.abelian(2)
    pm, hc, _ = _setup(A, 3)
    v = intersection_and_fiber_product_check(A, 3, pm, hc, 3)
    assert v.status == "pass"
    assert sorted(v.data["intersection"]) == ["1", "x^3", "y^3"]


def test_intersection_sl2_larger_window():
    L = lie.sl(2)
    pm, hc, _ = _setup(L, 5)
    assert intersection_and_fiber_product_check(L, 5, pm, hc, 10).status == "pass"


def test_kw_proxy():
    for L in (lie.heisenberg(), lie.sl(2), lie.abelian(3), lie.takiff(lie.sl(2), [2])):
        assert kw_proxy_check(L, invariant_generators(L, 4)).status == "pass"
    R = lie.remark_solvable(1, 1)
    assert kw_proxy_check(R, invariant_generators(R, 4)).status == "fail"
