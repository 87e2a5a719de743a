import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vlab import lie
from vlab.catalog import load_catalog
from vlab.center import center_window, default_degree, hc_generators, invariant_generators
from vlab.env import enveloping, p_center_generators
from vlab.lie import compute_pmap
from vlab.poisson import (
    HC,
    OTHER,
    P_CENTER,
    NotACharacter,
    augmentation_ideal_presentation,
    augmentation_m_mod_m2,
    central_extension_check,
    coords_mod_m2,
    kac_radul_check,
    lift_independence_check,
    mod_p_poisson_bracket,
    presentation_lift_check,
    quotient_by_center,
    same_structure,
    sym_m_mod_m2,
)
from vlab.scalar import GF, QQ, NotDivisibleByP


def _setup(L, p, D=None):
    pm = compute_pmap(L, p)
    gens = invariant_generators(L, 4)
    hc = hc_generators(L, p, gens)
    return pm, hc, D or default_degree(p, [f.degree() for f in gens])


def test_heisenberg_bracket_of_cubes():
    L = lie.heisenberg()
    U = enveloping(L, GF(3))
    x, y, z = (U.gen(i) for i in range(3))
    # [x^3, y^3] over Z/9 is 3 * (-z^3) up to terms divisible by 9
    assert mod_p_poisson_bracket(L, x ** 3, y ** 3) == z ** 3 * 2


def test_sl2_bracket():
    L = lie.sl(2)
    p = 5
    xi = p_center_generators(L, p, compute_pmap(L, p))
    e, h = L.basis.index("e"), L.basis.index("h")
    assert mod_p_poisson_bracket(L, xi[h], xi[e]) == xi[e] * 3


def test_non_central_input_is_rejected():
    L = lie.heisenberg()
    U = enveloping(L, GF(3))
    with pytest.raises(NotDivisibleByP):
        mod_p_poisson_bracket(L, U.gen(0), U.gen(1) ** 3)


def test_lift_independence():
    L = lie.heisenberg()
    U = enveloping(L, GF(3))
    x, y = U.gen(0), U.gen(1)
    v = lift_independence_check(L, x ** 3, y ** 3, trials=5)
    assert v.ok and v.data["value"] == "2*z^3"


@pytest.mark.parametrize("p", [3, 5, 7, 11])
def test_kac_radul_on_catalog(p):
    for entry in load_catalog():
        L = entry.algebra
        if L.dim > 6 and p > 7:
            continue
        v = kac_radul_check(L, p, compute_pmap(L, p, entry.override_for(p)))
        assert v.status == "pass", (entry.name, p, v.data.get("failures"))


def test_kac_radul_with_lift_trials():
    L = lie.sl(2)
    v = kac_radul_check(L, 5, compute_pmap(L, 5), pairs=3, lift_trials=3)
    assert v.ok and v.data["lift_failures"] == 0


@settings(max_examples=15, deadline=None)
@given(st.sampled_from([(lie.heisenberg(), 3, 4), (lie.sl(2), 3, 4), (lie.remark_solvable(1, 1), 3, 4)]),
       st.data())
def test_poisson_bracket_on_window_is_a_lie_bracket(case, data):
    L, p, D = case
    basis = center_window(L, p, compute_pmap(L, p), D).basis
    a, b, c = (data.draw(st.sampled_from(basis)) for _ in range(3))
    br = lambda u, v: mod_p_poisson_bracket(L, u, v, check=False)  # noqa: E731
    assert br(a, b) == -br(b, a)
    # Leibniz: {a, bc} = {a, b} c + b {a, c}
    assert br(a, b * c) == br(a, b) * c + b * br(a, c)
    assert not (br(a, br(b, c)) + br(b, br(c, a)) + br(c, br(a, b)))


def test_heisenberg_presentation():
    L = lie.heisenberg()
    pm, hc, _ = _setup(L, 3)
    pres = augmentation_ideal_presentation(L, 3, pm, hc, 4)
    assert dict(zip(pres.labels, (g.format() for g in pres.gens))) == {
        "xi(x)": "x^3", "xi(y)": "y^3", "g1": "z"}
    assert pres.tags == [P_CENTER, P_CENTER, HC]
    nonzero = {(pres.labels[i], pres.labels[j]): v.format() for (i, j), v in pres.bracket_table.items() if v}
    assert nonzero == {("xi(x)", "xi(y)"): "2*z^3"}
    # z^3 = z*z*z is in m^2, so it is not a separate generator
    full = augmentation_ideal_presentation(L, 3, pm, hc, 4, minimal=False)
    assert "xi(z)" in full.labels


def test_remark_solvable_presentation_has_untagged_generators():
    L = lie.remark_solvable(1, 1)
    pm, hc, _ = _setup(L, 5)
    pres = augmentation_ideal_presentation(L, 5, pm, hc, 6)
    assert OTHER in pres.tags
    assert "x*y^4" in [g.format() for g in pres.gens]


def test_sl2_m_mod_m2_is_sl2_plus_line():
    L = lie.sl(2)
    p = 5
    pm, hc, D = _setup(L, p)
    pres, alg = augmentation_m_mod_m2(L, p, pm, hc, D)
    assert alg.dim == 4 and alg.jacobi_ok()
    assert len(alg.center()) == 1
    v = central_extension_check(L, pm, pres, alg)
    assert v.status == "pass"
    assert v.data["quotient_dim"] == 3 and v.data["complement_dim"] == 1
    assert presentation_lift_check(L, pres, 3).ok


def test_heisenberg_m_mod_m2():
    L = lie.heisenberg()
    pm, hc, _ = _setup(L, 3)
    pres, alg = augmentation_m_mod_m2(L, 3, pm, hc, 4)
    assert alg.is_abelian() and alg.dim == 3
    v = central_extension_check(L, pm, pres, alg)
    assert v.status == "pass"
    assert v.data["quotient_dim"] == 2 and v.data["quotient_abelian"]
    U = enveloping(L, GF(3))
    assert coords_mod_m2(pres, U.gen(2) ** 3) == [0, 0, 0]


def test_remark_solvable_fails_central_extension():
    L = lie.remark_solvable(1, 1)
    pm, hc, D = _setup(L, 5)
    pres, alg = augmentation_m_mod_m2(L, 5, pm, hc, D)
    assert central_extension_check(L, pm, pres, alg).status == "fail"


def test_sym_m_mod_m2_reproduces_every_catalog_algebra():
    for entry in load_catalog():
        alg = sym_m_mod_m2(entry.algebra)
        assert same_structure(entry.algebra, alg), entry.name


def test_sym_m_mod_m2_at_a_character():
    L = lie.remark_solvable(1, 1)
    z = L.basis.index("z")
    chi = [7 if i == z else 0 for i in range(L.dim)]
    assert same_structure(L, sym_m_mod_m2(L, chi))
    with pytest.raises(NotACharacter):
        sym_m_mod_m2(L, [1, 0, 0])


def test_quotient_by_center():
    q = quotient_by_center(lie.heisenberg(), 3)
    assert q.dim == 2 and q.is_abelian()
    assert quotient_by_center(lie.sl(2), 5).dim == 3
    assert quotient_by_center(lie.sl(3), 3).dim == 7
    assert sym_m_mod_m2(lie.sl(2), ring=QQ).dim == 3
