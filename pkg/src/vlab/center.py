"""Degree windows of the center of U(g) over GF(p) and the checks of the
free-module decomposition ``Z = Z_p (x) Z_HC``.

Everything here is a finite shadow: a statement about the infinite center is
tested inside ``U_{<=D}``, the span of PBW monomials of degree at most ``D``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd

from .env import (
    PBWElement,
    enveloping,
    is_central,
    p_center_generators,
    reduce_element_mod_p,
    symmetrize,
)
from .lie import LieAlgebra, PMap, compute_pmap, generating_subset, index, remark_solvable
from .linalg import Span, column_kernel, sparse_kernel
from .monomials import count_up_to, up_to_degree, weight_filter
from .scalar import GF, QQ
from .sym import SymPoly, invariants_up_to_degree, polynomial_generator_extraction
from .verdict import FAIL, PASS, VACUOUS, Verdict

MAX_WINDOW = 200_000


class WindowTooLarge(RuntimeError):
    def __init__(self, size, budget):
        super().__init__(f"degree window has {size} monomials, budget is {budget}")
        self.size = size
        self.budget = budget


class NotCentralModP(ArithmeticError):
    def __init__(self, i, p):
        super().__init__(f"reduced generator {i} is not central mod {p}; p is too small")
        self.index = i
        self.p = p


def default_degree(p: int, degrees) -> int:
    return max(p + 1, 2 * max(degrees, default=0) + 2)


class MonoIndex:
    """Integer column numbers for monomials, increasing in grlex order."""

    def __init__(self, n: int, D: int):
        self.monos = up_to_degree(n, D)
        self.index = {m: k for k, m in enumerate(self.monos)}

    def vec(self, terms: dict) -> dict:
        idx = self.index
        return {idx[m]: c for m, c in terms.items()}

    def terms(self, vec: dict) -> dict:
        monos = self.monos
        return {monos[k]: c for k, c in vec.items()}


def _window_budget(L, D, budget):
    if D < 1:
        raise ValueError("degree bound must be at least 1")
    size = count_up_to(L.dim, D)
    if size > budget:
        raise WindowTooLarge(size, budget)


# ---------------------------------------------------------------- center window

@dataclass
class CenterWindow:
    p: int
    D: int
    basis: list

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def leading_monomials(self) -> list:
        return [b.leading_monomial() for b in self.basis]

    def to_json(self) -> dict:
        return {"p": self.p, "D": self.D, "dimension": self.dimension,
                "basis": [b.format() for b in self.basis]}


def center_window(L: LieAlgebra, p: int, pmap: PMap | None, D: int,
                  budget: int = MAX_WINDOW, verify: bool = True) -> CenterWindow:
    """Joint kernel of ``u -> [x_i, u]`` on ``U_{<=D}`` over GF(p).

    Monomials of nonzero weight for a diagonal basis element cannot occur in
    a central element, so they are dropped before the solve.
    """
    if pmap is not None and pmap.p != p:
        raise ValueError("p-map belongs to a different prime")
    _window_budget(L, D, budget)
    F = GF(p)
    U = enveloping(L, F)
    diag = L.diagonal_elements()
    monos = weight_filter(up_to_degree(L.dim, D), diag, F)
    # commuting with a generating set is enough; the weight filter covers ``diag``
    actors = generating_subset(L, F, given=list(diag))
    row_ids: dict = {}
    columns = []
    for a in monos:
        col = {}
        for i in actors:
            for mm, c in U.bracket_gen_mono(i, a).items():
                col[row_ids.setdefault((i, mm), len(row_ids))] = c
        columns.append(col)
    # ascending grlex columns: each kernel vector leads with its dependent column
    basis = [PBWElement(U, {monos[k]: v for k, v in vec.items()})
             for vec in column_kernel(columns, F)]
    if verify:
        for b in basis:
            if not is_central(b):
                raise RuntimeError(f"kernel element {b} failed the centrality re-check")
    return CenterWindow(p, D, basis)


# ---------------------------------------------------------------- HC generators

@dataclass
class HCGenerators:
    p: int
    gens: list
    sources: list

    def degrees(self) -> list:
        return [f.degree() for f in self.sources]

    def to_json(self) -> dict:
        labels = self.gens[0].L.basis if self.gens else ()
        return {"gens": [g.format() for g in self.gens],
                "sources": [f.format(labels) for f in self.sources]}


def hc_generators(L: LieAlgebra, p: int, f_list) -> HCGenerators:
    """Reduced symmetrizations of characteristic-zero invariants, checked central mod p."""
    gens = []
    for i, f in enumerate(f_list):
        g = reduce_element_mod_p(symmetrize(L, f), p)
        if not is_central(g):
            raise NotCentralModP(i, p)
        if g.leading_form().terms != f.change_ring(GF(p)).terms:
            raise NotCentralModP(i, p)
        gens.append(g)
    return HCGenerators(p, gens, list(f_list))


def invariant_generators(L: LieAlgebra, D: int) -> list[SymPoly]:
    """Generators of Sym(g)^g over QQ found in degrees ``<= D``."""
    return polynomial_generator_extraction(invariants_up_to_degree(L, QQ, D), D)


# ---------------------------------------------------------------- products

def _exponents(degrees, D, bound=None):
    """Exponent vectors ``e`` with ``sum e_i deg_i <= D`` and ``e_i < bound``."""
    def rec(i, left):
        if i == len(degrees):
            yield ()
            return
        top = left // degrees[i]
        if bound is not None:
            top = min(top, bound - 1)
        for e in range(top + 1):
            for rest in rec(i + 1, left - e * degrees[i]):
                yield (e,) + rest
    yield from rec(0, D)


class _Powers:
    def __init__(self, gens):
        self.gens = gens
        self.cache: dict = {}

    def __call__(self, i, e):
        key = (i, e)
        if key not in self.cache:
            self.cache[key] = self.gens[i] ** e
        return self.cache[key]

    def product(self, expo, one):
        out = one
        for i, e in enumerate(expo):
            if e:
                out = out * self(i, e)
        return out


def _product_family(xi, g, p, D, alpha_bound):
    """``(beta, alpha, xi^beta g^alpha)`` for all exponents fitting in degree ``D``."""
    one = xi[0].U.one() if xi else g[0].U.one()
    xp, gp = _Powers(xi), _Powers(g)
    gdeg = [h.degree() for h in g]
    out = []
    for beta in _exponents([p] * len(xi), D):
        left = D - p * sum(beta)
        xb = xp.product(beta, one)
        for alpha in _exponents(gdeg, left, alpha_bound):
            out.append((beta, alpha, xb * gp.product(alpha, one) if any(alpha) else xb))
    return out


def _span_of(elements, index: MonoIndex, ring):
    span = Span(ring)
    independent = True
    for u in elements:
        if not span.add(index.vec(u.terms)):
            independent = False
    return span, independent


def _graded_counts(span: Span, index: MonoIndex, D: int) -> list:
    h = [0] * (D + 1)
    for k in span.pivots():
        h[sum(index.monos[k])] += 1
    return h


# ---------------------------------------------------------------- Veldkamp

DEFECT_SHOWN = 8


@dataclass
class VeldkampVerdict:
    holds_in_window: bool
    spanning_defect: list
    independence_ok: bool
    dims: tuple
    notes: list = field(default_factory=list)

    def to_verdict(self) -> Verdict:
        data = {"dims": list(self.dims), "independence_ok": self.independence_ok}
        if self.spanning_defect:
            # the lowest-degree witnesses; large windows can have hundreds
            shown = sorted(self.spanning_defect, key=lambda u: (u.degree(), len(u.terms)))[:DEFECT_SHOWN]
            data["spanning_defect"] = [u.format() for u in shown]
            data["spanning_defect_size"] = len(self.spanning_defect)
        if self.notes:
            data["notes"] = list(self.notes)
        return Verdict(PASS if self.holds_in_window else FAIL, "", data)

    def to_json(self) -> dict:
        return {"holds_in_window": self.holds_in_window,
                "dims": list(self.dims),
                "independence_ok": self.independence_ok,
                "spanning_defect": [u.format() for u in self.spanning_defect],
                "notes": list(self.notes)}


def veldkamp_check(L: LieAlgebra, p: int, pmap: PMap, hc: HCGenerators, D: int,
                   window: CenterWindow | None = None) -> VeldkampVerdict:
    """Spanning and freeness of ``{xi^beta g^alpha : alpha_i < p}`` inside the window."""
    if window is None:
        window = center_window(L, p, pmap, D)
    F = GF(p)
    index = MonoIndex(L.dim, D)
    xi = p_center_generators(L, p, pmap)
    family = _product_family(xi, hc.gens, p, D, alpha_bound=p)
    span, independent = _span_of([u for _, _, u in family], index, F)
    defect = Span(F)
    for b in window.basis:
        res = span.reduce(index.vec(b.terms))
        if res:
            defect.add(res)
    U = enveloping(L, F)
    defect_elems = [PBWElement(U, index.terms(v)) for v in defect.basis()]
    notes = [f"window U_<={D} over GF({p}); {len(family)} candidate products"]
    holds = independent and not defect_elems
    return VeldkampVerdict(holds, defect_elems, independent, (window.dimension, len(span)), notes)


# ---------------------------------------------------------------- Gr / CI shadow

def ci_presentation_check(L: LieAlgebra, p: int, hc: HCGenerators, D: int,
                          window: CenterWindow | None = None, pmap: PMap | None = None) -> Verdict:
    """In Sym(g) over GF(p): ``{m^p f^alpha : alpha_i < p}`` is independent and
    contains the leading forms of the center window."""
    fs = [g.leading_form() for g in hc.gens]
    degs = [f.degree() for f in fs]
    if not fs:
        return Verdict(VACUOUS, "no invariant generators; the presentation is empty")
    if len(fs) == L.dim:
        return Verdict(VACUOUS, "g is abelian; every generator is its own invariant and the relations collapse")
    if sum(degs) > D:
        return Verdict(VACUOUS, f"no product of all generators fits in degree {D}")
    if window is None:
        window = center_window(L, p, pmap, D)
    F = GF(p)
    n = L.dim
    index = MonoIndex(n, D)
    one = SymPoly.const(F, n)
    fp = _Powers(fs)
    span = Span(F)
    independent = True
    count = 0
    for k in range(D // p + 1):
        for m in up_to_degree(n, k):
            if sum(m) != k:
                continue
            mp = SymPoly(F, n, {tuple(p * e for e in m): 1})
            for alpha in _exponents(degs, D - p * k, p):
                prod = mp * fp.product(alpha, one)
                count += 1
                if not span.add(index.vec(prod.terms)):
                    independent = False
    missing = []
    for b in window.basis:
        lf = b.leading_form()
        if span.reduce(index.vec(lf.terms)):
            missing.append(lf.format(L.basis))
    ok = independent and not missing
    data = {"products": count, "span_dim": len(span), "independent": independent,
            "leading_forms_checked": window.dimension}
    if missing:
        data["missing_leading_forms"] = missing
    return Verdict.of(ok, **data)


# ---------------------------------------------------------------- intersection

def _series_div(num, den, D):
    # power series num / den mod t^(D+1), den[0] == 1
    out = [0] * (D + 1)
    for d in range(D + 1):
        v = num[d] if d < len(num) else 0
        for k in range(1, d + 1):
            if k < len(den):
                v -= den[k] * out[d - k]
        out[d] = v
    return out


def _series_mul(a, b, D):
    out = [0] * (D + 1)
    for i, x in enumerate(a[:D + 1]):
        if x:
            for j, y in enumerate(b[:D + 1 - i]):
                out[i + j] += x * y
    return out


def intersection_and_fiber_product_check(L: LieAlgebra, p: int, pmap: PMap, hc: HCGenerators,
                                         D: int) -> Verdict:
    """Window intersection ``Z_p cap Z_HC`` and the graded shadow of the tensor decomposition.

    Checks that the leading forms of the intersection lie in ``k[f_i^p]`` and
    that the graded dimensions satisfy ``H(Z_p Z_HC) = H(Z_p) H(Z_HC) / H(Z_p cap Z_HC)``
    up to degree ``D``.
    """
    _window_budget(L, D, MAX_WINDOW)
    F = GF(p)
    n = L.dim
    index = MonoIndex(n, D)
    xi = p_center_generators(L, p, pmap)
    U = enveloping(L, F)
    zp = [u for _, alpha, u in _product_family(xi, [], p, D, None)]
    zhc = [u for beta, _, u in _product_family([], hc.gens, p, D, None)] if hc.gens else [U.one()]
    prod = [u for _, _, u in _product_family(xi, hc.gens, p, D, None)]
    span_p, _ = _span_of(zp, index, F)
    span_hc, _ = _span_of(zhc, index, F)
    span_prod, _ = _span_of(prod, index, F)

    # intersection: kernel of [A | -B] restricted to the A coordinates
    A = span_p.basis()
    B = span_hc.basis()
    rows: dict = {}
    for j, v in enumerate(A):
        for k, c in v.items():
            rows.setdefault(k, {})[j] = c
    for j, v in enumerate(B):
        for k, c in v.items():
            rows.setdefault(k, {})[len(A) + j] = F.norm(-c)
    inter = Span(F)
    for vec in sparse_kernel(rows.values(), len(A) + len(B), F):
        acc: dict = {}
        for j, c in vec.items():
            if j < len(A):
                for k, w in A[j].items():
                    acc[k] = F.norm(acc.get(k, 0) + c * w)
        inter.add({k: c for k, c in acc.items() if c})
    inter_elems = [PBWElement(U, index.terms(v)) for v in inter.basis()]

    # leading forms of the intersection inside k[f_1^p, ..., f_n^p]
    fs = [g.leading_form() for g in hc.gens]
    frob = Span(F)
    one = SymPoly.const(F, n)
    fpows = _Powers([f ** p for f in fs])
    for alpha in _exponents([p * f.degree() for f in fs], D):
        frob.add(index.vec(fpows.product(alpha, one).terms))
    stray = [u.leading_form().format(L.basis) for u in inter_elems
             if frob.reduce(index.vec(u.leading_form().terms))]

    h_p = _graded_counts(span_p, index, D)
    h_hc = _graded_counts(span_hc, index, D)
    h_i = _graded_counts(inter, index, D)
    h_prod = _graded_counts(span_prod, index, D)
    predicted = _series_div(_series_mul(h_p, h_hc, D), h_i, D)
    hilbert_ok = predicted == h_prod

    data = {
        "dims": {"z_p": len(span_p), "z_hc": len(span_hc), "intersection": len(inter),
                 "product_span": len(span_prod)},
        "intersection": [u.format() for u in inter_elems],
        "hilbert": {"z_p": h_p, "z_hc": h_hc, "intersection": h_i, "product_span": h_prod,
                    "predicted": predicted},
        "additive_shadow": len(span_p) + len(span_hc) - len(inter),
    }
    if stray:
        data["leading_forms_outside"] = stray
    ok = hilbert_ok and not stray
    if not ok:
        return Verdict(FAIL, "" if hilbert_ok else "graded dimensions do not factor", data)
    if len(inter) <= 1:
        reason = ("Z_HC is trivial in the window" if not hc.gens
                  else f"no f_i^p fits in degree {D}; the intersection is the constants")
        return Verdict(VACUOUS, reason, data)
    return Verdict(PASS, "", data)


# ---------------------------------------------------------------- counterexample

@dataclass
class CounterexampleReport:
    n: int
    m: int
    p: int
    a: int
    b: int
    witness: PBWElement
    central: bool
    outside_span: bool
    window: int
    exact_relation: bool

    @property
    def ok(self) -> bool:
        return self.central and self.outside_span

    def to_json(self) -> dict:
        return {"n": self.n, "m": self.m, "p": self.p, "a": self.a, "b": self.b,
                "witness": self.witness.format(), "central": self.central,
                "outside_span": self.outside_span, "window": self.window,
                "exact_relation": self.exact_relation}


def _pick_ab(n, m, p):
    pairs = [(a, b) for a in range(1, p) for b in range(1, p)]
    for a, b in pairs:
        if n * a == b * m:
            return a, b, True
    for a, b in pairs:
        if (n * a - b * m) % p == 0:
            return a, b, False
    raise ValueError(f"no 1 <= a, b < {p} with {n}a = {m}b mod {p}")


def counterexample_check(n: int, m: int, p: int) -> CounterexampleReport:
    """The central element ``x^a y^(p-b)`` of the solvable algebra ``[z,x] = nx, [z,y] = my``
    and a certificate that it is outside the span of ``Z_p Z_HC`` in its degree."""
    if gcd(p, n * m) != 1:
        raise ValueError(f"p = {p} must be coprime to n = {n} and m = {m}")
    L = remark_solvable(n, m)
    pmap = compute_pmap(L, p)
    a, b, exact = _pick_ab(n, m, p)
    U = enveloping(L, GF(p))
    w = U.monomial((a, p - b, 0))
    D = a + p - b
    central = is_central(w)
    hc = hc_generators(L, p, invariant_generators(L, D))
    xi = p_center_generators(L, p, pmap)
    index = MonoIndex(L.dim, D)
    span, _ = _span_of([u for _, _, u in _product_family(xi, hc.gens, p, D, None)], index, GF(p))
    outside = bool(span.reduce(index.vec(w.terms)))
    return CounterexampleReport(n, m, p, a, b, w, central, outside, D, exact)


# ---------------------------------------------------------------- KW proxy

def kw_proxy_check(L: LieAlgebra, f_list) -> Verdict:
    """Number of invariant generators equals the index of ``L``."""
    k = len(f_list)
    ind = index(L)
    return Verdict.of(k == ind, generators=k, index=ind)


def format_basis(elements) -> list[str]:
    return [u.format() for u in elements]
