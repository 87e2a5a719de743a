"""The symmetric algebra Sym(g): adjoint action, invariants, semi-invariants
and the Kirillov-Kostant Poisson bracket."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm

import sympy

from .lie import LieAlgebra
from .linalg import Span, solve, sparse_kernel
from .monomials import add_into, format_terms, grlex, of_degree, weight_filter
from .scalar import QQ


class GenerationUndetermined(Exception):
    """The invariants seen in the degree window do not pin down a generating set."""


class SymPoly:
    """Sparse commutative polynomial ``{exponent vector: coefficient}``."""

    __slots__ = ("ring", "dim", "terms")

    def __init__(self, ring, dim: int, terms: dict | None = None):
        self.ring = ring
        self.dim = dim
        norm = ring.norm
        clean = {}
        for m, c in (terms or {}).items():
            c = norm(c)
            if c:
                clean[tuple(m)] = c
        self.terms = clean

    @classmethod
    def var(cls, ring, dim, i):
        m = [0] * dim
        m[i] = 1
        return cls(ring, dim, {tuple(m): ring.one})

    @classmethod
    def const(cls, ring, dim, c=1):
        return cls(ring, dim, {(0,) * dim: ring(c)})

    def _new(self, terms):
        p = SymPoly.__new__(SymPoly)
        p.ring, p.dim, p.terms = self.ring, self.dim, terms
        return p

    def _coerce(self, other):
        if isinstance(other, SymPoly):
            return other
        return SymPoly.const(self.ring, self.dim, other)

    def __add__(self, other):
        other = self._coerce(other)
        acc = dict(self.terms)
        add_into(acc, other.terms, 1, self.ring.norm)
        return self._new(acc)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        acc = dict(self.terms)
        add_into(acc, other.terms, -1, self.ring.norm)
        return self._new(acc)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        norm = self.ring.norm
        return self._new({m: norm(-c) for m, c in self.terms.items()})

    def scale(self, c):
        if isinstance(c, Fraction) or self.ring == QQ:
            c = self.ring(c)
        norm = self.ring.norm
        if not norm(c):
            return self._new({})
        return self._new({m: norm(c * v) for m, v in self.terms.items() if norm(c * v)})

    def __mul__(self, other):
        if not isinstance(other, SymPoly):
            return self.scale(other)
        norm = self.ring.norm
        acc: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                acc[m] = acc.get(m, 0) + c1 * c2
        return SymPoly(self.ring, self.dim, {m: norm(c) for m, c in acc.items()})

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, n: int):
        out = SymPoly.const(self.ring, self.dim, 1)
        base = self
        while n:
            if n & 1:
                out = out * base
            n >>= 1
            if n:
                base = base * base
        return out

    def __eq__(self, other):
        if isinstance(other, SymPoly):
            return self.ring == other.ring and self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    __hash__ = None

    def __bool__(self):
        return bool(self.terms)

    def degree(self) -> int:
        return max((sum(m) for m in self.terms), default=-1)

    def homogeneous(self, d: int) -> SymPoly:
        return self._new({m: c for m, c in self.terms.items() if sum(m) == d})

    def leading_form(self) -> SymPoly:
        return self.homogeneous(self.degree())

    def leading_monomial(self) -> tuple:
        return max(self.terms, key=grlex)

    def diff(self, i: int) -> SymPoly:
        norm = self.ring.norm
        out = {}
        for m, c in self.terms.items():
            e = m[i]
            if e:
                v = norm(e * c)
                if v:
                    out[m[:i] + (e - 1,) + m[i + 1:]] = v
        return self._new(out)

    def evaluate(self, point):
        norm = self.ring.norm
        total = 0
        for m, c in self.terms.items():
            t = c
            for x, e in zip(point, m):
                if e:
                    t = t * x**e
            total += t
        return norm(total)

    def change_ring(self, ring) -> SymPoly:
        return SymPoly(ring, self.dim, {m: ring(c) for m, c in self.terms.items()})

    def frobenius(self, p: int) -> SymPoly:
        """Exponent-wise ``p``-th power of each monomial (coefficients unchanged)."""
        return self._new({tuple(p * e for e in m): c for m, c in self.terms.items()})

    def primitive(self) -> SymPoly:
        """Over QQ: integer coefficients with content 1 and a positive leading coefficient."""
        if self.ring != QQ or not self.terms:
            return self
        den = lcm(*(Fraction(c).denominator for c in self.terms.values()))
        nums = [int(c * den) for c in self.terms.values()]
        g = gcd(*nums)
        lead = self.terms[self.leading_monomial()]
        s = Fraction(den, g) * (1 if lead > 0 else -1)
        return self.scale(s)

    def format(self, labels) -> str:
        return format_terms(self.terms, labels, self.ring)

    def __repr__(self):
        return f"SymPoly({format_terms(self.terms, [f'x{i}' for i in range(self.dim)], self.ring)})"


# ---------------------------------------------------------------- actions

def _ad_monomial(table, i, m, ring) -> dict:
    out: dict = {}
    norm = ring.norm
    for j, e in enumerate(m):
        if not e:
            continue
        for k, c in table[i][j]:
            mm = list(m)
            mm[j] -= 1
            mm[k] += 1
            mm = tuple(mm)
            v = norm(out.get(mm, 0) + e * c)
            if v:
                out[mm] = v
            else:
                out.pop(mm, None)
    return out


def ad_action(L: LieAlgebra, i: int, f: SymPoly) -> SymPoly:
    """The derivation of Sym(g) extending ``x_j -> [x_i, x_j]``."""
    table = L.structure(f.ring)
    acc: dict = {}
    for m, c in f.terms.items():
        add_into(acc, _ad_monomial(table, i, m, f.ring), c, f.ring.norm)
    return SymPoly(f.ring, f.dim, acc)


def kk_bracket(L: LieAlgebra, f: SymPoly, g: SymPoly) -> SymPoly:
    """Kirillov-Kostant bracket, ``{x_i, x_j} = [x_i, x_j]`` extended as a biderivation."""
    ring = f.ring
    table = L.structure(ring)
    n = L.dim
    df = [f.diff(i) for i in range(n)]
    dg = [g.diff(j) for j in range(n)]
    out = SymPoly(ring, n)
    for i in range(n):
        if not df[i]:
            continue
        for j in range(n):
            if not dg[j] or not table[i][j]:
                continue
            lin = SymPoly(ring, n, {_unit(n, k): c for k, c in table[i][j]})
            out = out + df[i] * dg[j] * lin
    return out


def _unit(n, k):
    m = [0] * n
    m[k] = 1
    return tuple(m)


# ---------------------------------------------------------------- invariants

def _joint_kernel(L, ring, monos, actors) -> list[SymPoly]:
    """Joint kernel of ``ad(u)`` for coordinate vectors ``u`` on the span of ``monos``."""
    table = L.structure(ring)
    norm = ring.norm
    rows: dict = {}
    for col, m in enumerate(monos):
        for a, u in enumerate(actors):
            out: dict = {}
            for i, ui in enumerate(u):
                if ui:
                    add_into(out, _ad_monomial(table, i, m, ring), ui, norm)
            for mm, c in out.items():
                rows.setdefault((a, mm), {})[col] = c
    basis = sparse_kernel(rows.values(), len(monos), ring)
    return [SymPoly(ring, L.dim, {monos[k]: v for k, v in vec.items()}) for vec in basis]


def invariants_in_degree(L: LieAlgebra, ring, d: int) -> list[SymPoly]:
    diag = L.diagonal_elements()
    monos = weight_filter(of_degree(L.dim, d), diag, ring)
    actors = []
    for i in range(L.dim):
        if i in diag:
            continue
        u = [0] * L.dim
        u[i] = ring.one
        actors.append(u)
    basis = _joint_kernel(L, ring, monos, actors)
    return [f.primitive() for f in basis]


def invariants_up_to_degree(L: LieAlgebra, ring, D: int) -> dict[int, list[SymPoly]]:
    """Echelon bases of the degree-``d`` invariants ``Sym^d(g)^g`` for ``1 <= d <= D``."""
    if D < 1:
        raise ValueError("degree bound must be at least 1")
    return {d: invariants_in_degree(L, ring, d) for d in range(1, D + 1)}


def _monomials_in(gens, degrees, d):
    """Exponent vectors over ``gens`` of weighted degree exactly ``d``."""
    def rec(i, left):
        if i == len(gens):
            if left == 0:
                yield ()
            return
        for e in range(left // degrees[i] + 1):
            for rest in rec(i + 1, left - e * degrees[i]):
                yield (e,) + rest
    yield from rec(0, d)


def polynomial_generator_extraction(graded: dict, D: int) -> list[SymPoly]:
    """Greedy minimal generating set of the invariant ring within degree ``<= D``."""
    keepers: list[SymPoly] = []
    degrees: list[int] = []
    powers: dict = {}

    def power(i, e):
        if (i, e) not in powers:
            powers[(i, e)] = keepers[i] ** e
        return powers[(i, e)]

    for d in range(1, D + 1):
        basis = graded.get(d, [])
        if not basis:
            continue
        ring, dim = basis[0].ring, basis[0].dim
        span = Span(ring, grlex)
        count = 0
        for alpha in _monomials_in(keepers, degrees, d):
            prod = SymPoly.const(ring, dim)
            for i, e in enumerate(alpha):
                if e:
                    prod = prod * power(i, e)
            count += 1
            if not span.add(prod.terms):
                raise GenerationUndetermined(
                    f"products of the degree < {d} generators are dependent in degree {d}; "
                    "the invariant ring is not polynomial in this window"
                )
        for f in basis:
            if span.add(f.terms):
                keepers.append(f)
                degrees.append(d)
    return keepers


@dataclass
class SemiInvariantSpace:
    degree: int
    weight: tuple
    basis: list

    @property
    def nontrivial(self) -> bool:
        return any(self.weight)


def derived_and_complement(L: LieAlgebra):
    """Basis vectors of ``[g, g]`` and basis indices completing it to ``g``."""
    span = Span(QQ)
    derived = []
    for i in range(L.dim):
        for j in range(i + 1, L.dim):
            vec = L.bracket(i, j)
            if vec and span.add(vec):
                derived.append([vec.get(k, Fraction(0)) for k in range(L.dim)])
    complement = []
    for i in range(L.dim):
        if span.add({i: Fraction(1)}):
            complement.append(i)
    return derived, complement


def _rational_eigenspaces(X: list[list], basis_dim: int):
    """Rational eigenvalues of a square matrix over QQ with kernel bases."""
    M = sympy.Matrix(X)
    lam = sympy.Symbol("lam")
    roots = sympy.roots(M.charpoly(lam).as_expr(), lam, filter="Q")
    out = []
    for r in sorted(roots, key=lambda q: (abs(q), q)):
        val = Fraction(int(sympy.fraction(r)[0]), int(sympy.fraction(r)[1]))
        rows = []
        for i in range(basis_dim):
            row = {j: Fraction(X[i][j]) - (val if i == j else 0) for j in range(basis_dim)}
            rows.append({j: v for j, v in row.items() if v})
        out.append((val, sparse_kernel(rows, basis_dim, QQ)))
    return out


def semi_invariants(L: LieAlgebra, D: int) -> list[SemiInvariantSpace]:
    """Joint rational eigenspaces of ``g/[g, g]`` on the ``[g, g]``-invariants, degree by degree."""
    derived, complement = derived_and_complement(L)
    out = []
    for d in range(1, D + 1):
        monos = list(of_degree(L.dim, d))
        W = _joint_kernel(L, QQ, monos, derived) if derived else [
            SymPoly(QQ, L.dim, {m: 1}) for m in monos
        ]
        if not W:
            continue
        # coordinates in W are read off at each vector's leading monomial
        leads = [max(w.terms, key=grlex) for w in W]
        W = _echelon_reduce(W, leads)
        ops = []
        for c in complement:
            X = [[Fraction(0)] * len(W) for _ in W]
            for col, w in enumerate(W):
                img = ad_action(L, c, w)
                coords = [img.terms.get(m, Fraction(0)) for m in leads]
                X_check = SymPoly(QQ, L.dim)
                for k, cf in enumerate(coords):
                    X_check = X_check + W[k].scale(cf)
                if X_check != img:
                    raise ArithmeticError("complement action does not preserve [g,g]-invariants")
                for row, cf in enumerate(coords):
                    X[row][col] = cf
            ops.append(X)
        for weight_vals, vecs in _joint_split(ops, len(W)):
            polys = []
            for v in vecs:
                p = SymPoly(QQ, L.dim)
                for k, cf in v.items():
                    p = p + W[k].scale(cf)
                polys.append(p.primitive())
            out.append(SemiInvariantSpace(d, _weight_vector(L, derived, complement, weight_vals), polys))
    return out


def _echelon_reduce(W, leads):
    # make the value of W[k] at leads[j] equal to delta_kj
    W = list(W)
    for k, m in enumerate(leads):
        c = W[k].terms[m]
        W[k] = W[k].scale(1 / Fraction(c))
        for j in range(len(W)):
            if j != k and W[j].terms.get(m):
                W[j] = W[j] - W[k].scale(W[j].terms[m])
    return W


def _joint_split(ops, n):
    """Yield ``(eigenvalues, basis)`` of joint rational eigenspaces of commuting matrices."""
    if not ops:
        yield (), [{i: Fraction(1)} for i in range(n)]
        return

    def rec(level, basis, vals):
        if level == len(ops):
            yield tuple(vals), basis
            return
        X = ops[level]
        # restrict X to span(basis): X B = B Y
        cols = basis
        images = []
        for b in cols:
            img = {}
            for j, v in b.items():
                for i in range(n):
                    if X[i][j]:
                        img[i] = img.get(i, 0) + X[i][j] * v
            images.append({i: v for i, v in img.items() if v})
        Y = [[Fraction(0)] * len(cols) for _ in cols]
        for c, img in enumerate(images):
            coeffs = solve(cols, img, QQ)
            if coeffs is None:
                raise ArithmeticError("operators do not commute on the invariant space")
            for r, v in enumerate(coeffs):
                Y[r][c] = v
        for val, kern in _rational_eigenspaces(Y, len(cols)):
            sub = []
            for kv in kern:
                vec: dict = {}
                for r, cf in kv.items():
                    for i, v in cols[r].items():
                        vec[i] = vec.get(i, 0) + cf * v
                sub.append({i: v for i, v in vec.items() if v})
            yield from rec(level + 1, sub, vals + [val])

    yield from rec(0, [{i: Fraction(1)} for i in range(n)], [])


def _weight_vector(L, derived, complement, vals) -> tuple:
    """Extend values on the complement basis by zero on ``[g, g]``."""
    cols = [{k: v for k, v in enumerate(d) if v} for d in derived] + [{c: Fraction(1)} for c in complement]
    known = [Fraction(0)] * len(derived) + list(vals)
    out = []
    for i in range(L.dim):
        coeffs = solve(cols, {i: Fraction(1)}, QQ)
        out.append(sum((a * b for a, b in zip(coeffs, known)), Fraction(0)))
    return tuple(out)


def has_nontrivial_semi_invariants(L: LieAlgebra, D: int) -> list[SemiInvariantSpace]:
    return [s for s in semi_invariants(L, D) if s.nontrivial]
