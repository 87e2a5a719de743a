"""The Poisson bracket on the center of U(g) over GF(p), computed as
``(1/p)[z^, w^] mod p`` for lifts to Z/p^2, and the Lie algebras ``m/m^2``
it induces on augmentation-type Poisson ideals.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .center import CenterWindow, HCGenerators, MonoIndex, center_window
from .env import (
    PBWElement,
    commutator,
    enveloping,
    frobenius_combination,
    is_central,
    lift_element,
    p_center_generators,
)
from .lie import LieAlgebra, PMap, center_of
from .linalg import Span, solve, sparse_kernel
from .monomials import up_to_degree
from .scalar import GF, QQ, NotDivisibleByP
from .sym import SymPoly, kk_bracket
from .verdict import Verdict

P_CENTER, HC, OTHER = "p-center", "HC", "other"


class JacobiFailure(ArithmeticError):
    pass


class NotACharacter(ValueError):
    pass


def _require_central(u: PBWElement, what: str):
    if not is_central(u):
        raise NotDivisibleByP(f"{what} is not central mod {u.ring.p}")


def bracket_of_lifts(zl: PBWElement, wl: PBWElement) -> PBWElement:
    """``(1/p)[zl, wl]`` reduced mod p, for elements over Z/p^2."""
    p = zl.ring.p
    c = commutator(zl, wl)
    out = {}
    for m, v in c.terms.items():
        if v % p:
            raise NotDivisibleByP(f"commutator coefficient {v} of {m} is not divisible by {p}")
        out[m] = v // p
    return PBWElement(enveloping(zl.L, GF(p)), out)


def mod_p_poisson_bracket(L: LieAlgebra, z: PBWElement, w: PBWElement,
                          check: bool = True) -> PBWElement:
    """``{z, w} = (1/p)[z^, w^] mod p`` with canonical lifts (representatives in ``[0, p)``)."""
    if check:
        _require_central(z, "first argument")
        _require_central(w, "second argument")
    return bracket_of_lifts(lift_element(z), lift_element(w))


def _random_perturbation(u: PBWElement, rng: random.Random) -> dict:
    """``p * r`` for a random element ``r`` supported on monomials of degree ``<= deg u``."""
    p = u.ring.p
    d = max(u.degree(), 1)
    monos = up_to_degree(u.U.dim, d)
    chosen = rng.sample(monos, min(len(monos), 4))
    return {m: p * rng.randrange(1, p) for m in chosen}


def lift_independence_check(L: LieAlgebra, z: PBWElement, w: PBWElement, trials: int = 5,
                            seed: int = 0) -> Verdict:
    """Recompute ``{z, w}`` with lifts shifted by random multiples of p."""
    rng = random.Random(seed)
    base = mod_p_poisson_bracket(L, z, w)
    zl, wl = lift_element(z), lift_element(w)
    bad = []
    for t in range(trials):
        z2 = zl + PBWElement(zl.U, _random_perturbation(z, rng))
        w2 = wl + PBWElement(wl.U, _random_perturbation(w, rng))
        val = bracket_of_lifts(z2, w2)
        if val != base:
            bad.append({"trial": t, "value": val.format()})
    return Verdict.of(not bad, value=base.format(), trials=trials, **({"mismatches": bad} if bad else {}))


def _random_vector(n, p, rng):
    while True:
        v = [rng.randrange(p) for _ in range(n)]
        if any(v):
            return v


def kac_radul_check(L: LieAlgebra, p: int, pmap: PMap, pairs: int = 10, seed: int = 0,
                    lift_trials: int = 0) -> Verdict:
    """``{a^p - a^[p], b^p - b^[p]} = -([a,b]^p - [a,b]^[p])`` on basis pairs and random pairs.

    The left side is the lifted commutator of the p-center elements; the right
    side comes from the bracket of ``g`` and the p-semilinear extension of the
    p-map. With ``lift_trials > 0`` every left side is also recomputed with
    randomized lifts.
    """
    F = GF(p)
    xi = p_center_generators(L, p, pmap)
    n = L.dim
    rng = random.Random(seed)
    cases = [([int(i == k) for k in range(n)], [int(j == k) for k in range(n)])
             for i in range(n) for j in range(n)]
    cases += [(_random_vector(n, p, rng), _random_vector(n, p, rng)) for _ in range(pairs)]
    failures = []
    lift_bad = 0
    for a, b in cases:
        za = frobenius_combination(xi, a)
        zb = frobenius_combination(xi, b)
        lhs = mod_p_poisson_bracket(L, za, zb, check=False)
        ab = L.bracket_vectors(a, b, F)
        rhs = -frobenius_combination(xi, ab)
        if lhs != rhs:
            failures.append({"a": a, "b": b, "lhs": lhs.format(), "rhs": rhs.format()})
        if lift_trials and not lift_independence_check(L, za, zb, lift_trials,
                                                       seed=rng.randrange(2**31)).ok:
            lift_bad += 1
    data = {"pairs_checked": len(cases)}
    if lift_trials:
        data["lift_trials"] = lift_trials
        data["lift_failures"] = lift_bad
    if failures:
        data["failures"] = failures[:5]
    return Verdict.of(not failures and not lift_bad, **data)


# ---------------------------------------------------------------- presentations

@dataclass
class PoissonPresentation:
    p: int
    D: int
    labels: list
    tags: list
    gens: list
    bracket_table: dict = field(default_factory=dict)
    m2_cache: dict = field(default_factory=dict, repr=False, compare=False)

    def to_json(self) -> dict:
        n = len(self.gens)
        return {
            "p": self.p, "D": self.D,
            "generators": [{"label": self.labels[i], "tag": self.tags[i], "value": self.gens[i].format()}
                           for i in range(n)],
            "brackets": [{"i": i, "j": j, "value": v.format()}
                         for (i, j), v in sorted(self.bracket_table.items()) if v],
        }


class _ProductSpan:
    """Span of the monomials in a growing list of central generators, degree ``<= D``.

    Generators commute, so adding ``g`` only needs the products ``u * g^k``
    with ``u`` an existing monomial. ``with_linear=False`` keeps only monomials
    with at least two factors (the span of ``m^2`` when the generators span ``m``).
    """

    def __init__(self, U, D, index, with_linear=True):
        self.D = D
        self.index = index
        self.with_linear = with_linear
        self.span = Span(U.ring)
        self.monos = [(0, 0, U.one())]  # (factors, degree, element)
        if with_linear:
            self.span.add(index.vec(U.one().terms))

    def add(self, g: PBWElement):
        d = g.degree()
        cur = list(self.monos)
        while cur:
            nxt = [(c + 1, deg + d, u * g) for c, deg, u in cur if deg + d <= self.D]
            for c, _, v in nxt:
                if c >= 2 or self.with_linear:
                    self.span.add(self.index.vec(v.terms))
            self.monos.extend(nxt)
            cur = nxt

    def contains(self, u: PBWElement) -> bool:
        return self.span.contains(self.index.vec(u.terms))

    def reduce(self, u: PBWElement):
        return self.span.reduce(self.index.vec(u.terms))


def augmentation_ideal_presentation(L: LieAlgebra, p: int, pmap: PMap, hc: HCGenerators, D: int,
                                    window: CenterWindow | None = None,
                                    minimal: bool = True) -> PoissonPresentation:
    """Generators of ``m = Z cap gU`` in the window with their Poisson brackets.

    Candidates are the p-center generators, the HC generators without constant
    term, and the window basis (untagged). Walking them by degree, a candidate
    is kept when it is not a polynomial in the ones already kept. With
    ``minimal=False`` every tagged candidate is kept.
    """
    F = GF(p)
    U = enveloping(L, F)
    xi = p_center_generators(L, p, pmap)
    if window is None:
        window = center_window(L, p, pmap, D)
    cands = [(u, f"xi({lab})", P_CENTER) for u, lab in zip(xi, L.basis)]
    cands += [(g.without_constant(), f"g{k + 1}", HC) for k, g in enumerate(hc.gens)]
    cands += [(b.without_constant(), None, OTHER) for b in window.basis]
    cands = [c for c in cands if c[0]]
    top = max([D] + [u.degree() for u, _, _ in cands])
    prods = _ProductSpan(U, top, MonoIndex(L.dim, top))
    order = sorted(range(len(cands)), key=lambda k: cands[k][0].degree())
    keep = set()
    for k in order:
        u, _, tag = cands[k]
        if (tag != OTHER and not minimal) or not prods.contains(u):
            keep.add(k)
            prods.add(u)
    gens, labels, tags = [], [], []
    extra = 0
    for k in sorted(keep):
        u, lab, tag = cands[k]
        if tag == OTHER:
            extra += 1
            lab = f"u{extra}"
        gens.append(u)
        labels.append(lab)
        tags.append(tag)
    pres = PoissonPresentation(p, D, labels, tags, gens)
    for i in range(len(gens)):
        for j in range(i + 1, len(gens)):
            pres.bracket_table[(i, j)] = mod_p_poisson_bracket(L, gens[i], gens[j], check=False)
    return pres


def presentation_lift_check(L: LieAlgebra, pres: PoissonPresentation, trials: int = 5,
                            seed: int = 0) -> Verdict:
    """Lift independence for every entry of the presentation's bracket table."""
    rng = random.Random(seed)
    bad = []
    for (i, j) in sorted(pres.bracket_table):
        v = lift_independence_check(L, pres.gens[i], pres.gens[j], trials, seed=rng.randrange(2**31))
        if not v.ok:
            bad.append([pres.labels[i], pres.labels[j]])
    return Verdict.of(not bad, pairs_checked=len(pres.bracket_table), trials=trials,
                      **({"mismatched_pairs": bad} if bad else {}))


# ---------------------------------------------------------------- m / m^2

@dataclass
class FiniteLieAlgebraOverFp:
    """Structure constants ``[e_i, e_j] = sum_k c_ij^k e_k`` for ``i < j`` over a ring."""

    ring: object
    labels: list
    brackets: dict
    provenance: str = ""

    @property
    def dim(self) -> int:
        return len(self.labels)

    def bracket(self, i, j) -> dict:
        if i == j:
            return {}
        if i < j:
            return dict(self.brackets.get((i, j), {}))
        return {k: self.ring.norm(-c) for k, c in self.brackets.get((j, i), {}).items()}

    def bracket_vectors(self, a, b) -> list:
        out = [0] * self.dim
        for i, ai in enumerate(a):
            for j, bj in enumerate(b):
                if ai and bj:
                    for k, c in self.bracket(i, j).items():
                        out[k] += ai * bj * c
        return [self.ring.norm(v) for v in out]

    def center(self) -> list[dict]:
        """Basis of the center as sparse coordinate vectors."""
        rows: dict = {}
        for i in range(self.dim):
            for j in range(self.dim):
                for k, c in self.bracket(i, j).items():
                    rows.setdefault((j, k), {})[i] = c
        return sparse_kernel(rows.values(), self.dim, self.ring)

    def is_abelian(self) -> bool:
        return not any(self.brackets.values())

    def jacobi_ok(self) -> bool:
        n = self.dim
        norm = self.ring.norm
        for i in range(n):
            for j in range(i + 1, n):
                for k in range(j + 1, n):
                    acc = [0] * n
                    for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
                        for t, v in self.bracket(a, b).items():
                            for s, w in self.bracket(t, c).items():
                                acc[s] += v * w
                    if any(norm(v) for v in acc):
                        return False
        return True

    def to_json(self) -> dict:
        fmt = self.ring.format
        return {
            "ring": repr(self.ring), "dim": self.dim, "labels": list(self.labels),
            "provenance": self.provenance,
            "brackets": [{"i": i, "j": j, "terms": [{"k": k, "coeff": fmt(c)} for k, c in sorted(t.items())]}
                         for (i, j), t in sorted(self.brackets.items()) if t],
        }


def _m2_span(pres: PoissonPresentation, D: int) -> _ProductSpan:
    if D not in pres.m2_cache:
        U = pres.gens[0].U
        m2 = _ProductSpan(U, D, MonoIndex(U.dim, D), with_linear=False)
        for g in pres.gens:
            m2.add(g)
        pres.m2_cache[D] = m2
    return pres.m2_cache[D]


def coords_mod_m2(pres: PoissonPresentation, u: PBWElement, D: int | None = None) -> list | None:
    """Coordinates of ``u`` in ``m/m^2`` relative to the presentation generators."""
    if not pres.gens:
        return [] if not u else None
    F = GF(pres.p)
    D = max(D or pres.D, u.degree(), max(g.degree() for g in pres.gens))
    m2 = _m2_span(pres, D)
    cols = [m2.reduce(g) for g in pres.gens]
    sol = solve(cols, m2.reduce(u), F)
    if sol is None:
        return None
    return [int(c) for c in sol]


def m_mod_m2(pres: PoissonPresentation) -> FiniteLieAlgebraOverFp:
    """The Lie algebra induced on ``m/m^2`` by the Poisson bracket."""
    F = GF(pres.p)
    values = [v for v in pres.bracket_table.values() if v]
    D = max([pres.D] + [v.degree() for v in values] + [g.degree() for g in pres.gens])
    brackets = {}
    for (i, j), v in pres.bracket_table.items():
        if not v:
            continue
        coords = coords_mod_m2(pres, v, D)
        if coords is None:
            raise JacobiFailure(f"bracket of generators {i}, {j} is not resolved in the window D = {pres.D}")
        terms = {k: c for k, c in enumerate(coords) if c}
        if terms:
            brackets[(i, j)] = terms
    alg = FiniteLieAlgebraOverFp(F, list(pres.labels), brackets, provenance="augmentation ideal")
    if not alg.jacobi_ok():
        raise JacobiFailure("m/m^2 bracket violates the Jacobi identity; enlarge the window")
    return alg


def augmentation_m_mod_m2(L, p, pmap, hc, D, window=None):
    """``m/m^2`` for the augmentation ideal, retrying once at ``D + 2`` on a Jacobi failure."""
    try:
        pres = augmentation_ideal_presentation(L, p, pmap, hc, D, window)
        return pres, m_mod_m2(pres)
    except JacobiFailure:
        pres = augmentation_ideal_presentation(L, p, pmap, hc, D + 2)
        return pres, m_mod_m2(pres)


def _shift(f: SymPoly, chi) -> SymPoly:
    """``f(y + chi)`` in the variables ``y_k = x_k - chi_k``."""
    ring, n = f.ring, f.dim
    out = SymPoly(ring, n)
    for m, c in f.terms.items():
        term = SymPoly.const(ring, n, c)
        for k, e in enumerate(m):
            if e:
                term = term * (SymPoly.var(ring, n, k) + chi[k]) ** e
        out = out + term
    return out


def sym_m_mod_m2(L: LieAlgebra, chi=None, ring=QQ) -> FiniteLieAlgebraOverFp:
    """Kirillov-Kostant bracket on ``m/m^2`` for ``m = (x_i - chi(x_i))`` in Sym(g)."""
    n = L.dim
    chi = [ring(c) for c in (chi or [0] * n)]
    for i in range(n):
        for j in range(i + 1, n):
            if ring.norm(sum(ring(c) * chi[k] for k, c in L.bracket(i, j).items())):
                raise NotACharacter(f"chi does not vanish on [{L.basis[i]}, {L.basis[j]}]")
    ys = [SymPoly.var(ring, n, i) - chi[i] for i in range(n)]
    brackets = {}
    for i in range(n):
        for j in range(i + 1, n):
            # express in y-coordinates: constant term must vanish, linear part survives
            val = _shift(kk_bracket(L, ys[i], ys[j]), chi)
            if val.terms.get((0,) * n):
                raise NotACharacter("bracket of generators has a constant term")
            terms = {}
            for m, c in val.terms.items():
                if sum(m) == 1:
                    terms[m.index(1)] = c
            if terms:
                brackets[(i, j)] = terms
    return FiniteLieAlgebraOverFp(ring, list(L.basis), brackets, provenance="Sym(g), m = (x - chi(x))")


def same_structure(L: LieAlgebra, alg: FiniteLieAlgebraOverFp) -> bool:
    """Coordinate-identical structure constants."""
    ring = alg.ring
    for i in range(L.dim):
        for j in range(i + 1, L.dim):
            mine = {k: ring.norm(ring(c)) for k, c in L.bracket(i, j).items()}
            mine = {k: c for k, c in mine.items() if c}
            if mine != alg.bracket(i, j):
                return False
    return True


def quotient_by_center(L: LieAlgebra, p: int) -> FiniteLieAlgebraOverFp:
    """``g/Z(g)`` over GF(p) on the basis elements that are not pivots of the center."""
    F = GF(p)
    z = Span(F)
    for v in center_of(L, F):
        z.add({k: c for k, c in enumerate(v) if c})
    keep = [i for i in range(L.dim) if i not in z.rows]
    pos = {i: r for r, i in enumerate(keep)}
    brackets = {}
    for a, i in enumerate(keep):
        for b, j in enumerate(keep):
            if a < b:
                res = z.reduce({k: F(c) for k, c in L.bracket(i, j).items()})
                terms = {pos[k]: c for k, c in res.items()}
                if terms:
                    brackets[(a, b)] = terms
    return FiniteLieAlgebraOverFp(F, [L.basis[i] for i in keep], brackets, provenance="g/Z(g)")


def central_extension_check(L: LieAlgebra, pmap: PMap, pres: PoissonPresentation,
                            alg: FiniteLieAlgebraOverFp) -> Verdict:
    """``m/m^2 = phi(g/Z(g)) (+) C`` with ``phi(x) = x^p - x^[p]``, ``[phi a, phi b] = -phi[a, b]``
    and ``C`` central."""
    p = pres.p
    F = GF(p)
    phi = []
    for u in p_center_generators(L, p, pmap):
        c = coords_mod_m2(pres, u)
        if c is None:
            return Verdict.of(False, reason="a p-center generator is not resolved modulo m^2")
        phi.append(c)
    n, N = L.dim, alg.dim
    image = Span(F)
    for c in phi:
        image.add({k: v for k, v in enumerate(c) if v})
    # phi kills exactly the center of g
    center = center_of(L, F)
    kills_center = all(
        not any(F.norm(sum(z[i] * phi[i][k] for i in range(n))) for k in range(N)) for z in center
    )
    kernel_ok = kills_center and len(image) == n - len(center)
    # twisted homomorphism on basis pairs
    twist_ok = True
    for i in range(n):
        for j in range(i + 1, n):
            lhs = alg.bracket_vectors(phi[i], phi[j])
            ab = {k: F(c) for k, c in L.bracket(i, j).items()}
            rhs = [F.norm(-sum(c * phi[t][k] for t, c in ab.items())) for k in range(N)]
            twist_ok &= lhs == rhs
    # a central complement exists iff Z(m/m^2) and the image together span m/m^2
    both = Span(F)
    for v in list(image.basis()) + alg.center():
        both.add(v)
    central_ok = len(both) == N
    complement_dim = N - len(image)

    quotient = quotient_by_center(L, p)
    return Verdict.of(
        kernel_ok and twist_ok and central_ok,
        m_mod_m2_dim=N, quotient_dim=quotient.dim, complement_dim=complement_dim,
        quotient_abelian=quotient.is_abelian(), kernel_is_center=kernel_ok,
        twist_ok=twist_ok, complement_central=central_ok,
    )
