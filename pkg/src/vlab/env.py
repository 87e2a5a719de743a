"""The enveloping algebra U(g) in the ordered PBW basis.

Elements are sparse maps from exponent vectors ``a`` (the ordered monomial
``x_1^a_1 ... x_n^a_n``) to coefficients. Multiplication straightens words
with ``x_j x_i = x_i x_j + [x_j, x_i]`` for ``j > i``; products of a single
generator with a normal-ordered monomial are memoized per ring.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import permutations

from .lie import LieAlgebra, PMap
from .monomials import add_into, format_terms, grlex
from .scalar import GF, QQ, Zmod_p2
from .sym import SymPoly


# entries per memo generation; bounds memory on high-degree work such as
# Z/p^2 lifts at larger primes
MEMO_LIMIT = 250_000


class _Memo:
    """Two-generation memo: a full generation is retired, hits in it are promoted."""

    def __init__(self, limit: int = MEMO_LIMIT):
        self.limit = limit
        self.new: dict = {}
        self.old: dict = {}

    def get(self, key):
        hit = self.new.get(key)
        if hit is None:
            hit = self.old.get(key)
            if hit is not None:
                self.put(key, hit)
        return hit

    def put(self, key, value):
        if len(self.new) >= self.limit:
            self.old = self.new
            self.new = {}
        self.new[key] = value

    def __len__(self):
        return len(self.new) + len(self.old)


class NotCentral(ArithmeticError):
    def __init__(self, i, what="p-center generator"):
        super().__init__(f"{what} {i} does not commute with every generator")
        self.index = i


class Enveloping:
    """U(g) over a coefficient ring; owns the straightening memo."""

    def __init__(self, L: LieAlgebra, ring):
        self.L = L
        self.ring = ring
        self.dim = L.dim
        self.table = L.structure(ring)
        self._memo = _Memo()
        self._rmemo = _Memo()

    # -- straightening
    def gen_times_mono(self, j: int, b: tuple) -> dict:
        """``x_j * x^b`` in normal form. The returned dict must not be mutated."""
        i = 0
        for e in b:
            if e:
                break
            i += 1
        if j <= i:
            return {b[:j] + (b[j] + 1,) + b[j + 1:]: self.ring.one}
        key = (j, b)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        norm = self.ring.norm
        rest = b[:i] + (b[i] - 1,) + b[i + 1:]
        acc: dict = {}
        # x_j x_i x^rest = x_i (x_j x^rest) + [x_j, x_i] x^rest
        for m, c in self.gen_times_mono(j, rest).items():
            for m2, c2 in self.gen_times_mono(i, m).items():
                acc[m2] = acc.get(m2, 0) + c * c2
        for k, c in self.table[j][i]:
            for m2, c2 in self.gen_times_mono(k, rest).items():
                acc[m2] = acc.get(m2, 0) + c * c2
        out = {}
        for m, c in acc.items():
            c = norm(c)
            if c:
                out[m] = c
        self._memo.put(key, out)
        return out

    def mono_times_gen(self, a: tuple, i: int) -> dict:
        """``x^a * x_i`` in normal form. The returned dict must not be mutated."""
        last = -1
        for idx in range(self.dim - 1, -1, -1):
            if a[idx]:
                last = idx
                break
        if i >= last:
            return {a[:i] + (a[i] + 1,) + a[i + 1:]: self.ring.one}
        key = (a, i)
        hit = self._rmemo.get(key)
        if hit is not None:
            return hit
        norm = self.ring.norm
        rest = a[:last] + (a[last] - 1,) + a[last + 1:]
        acc: dict = {}
        # x^rest x_l x_i = (x^rest x_i) x_l + x^rest [x_l, x_i]
        for m, c in self.mono_times_gen(rest, i).items():
            for m2, c2 in self.mono_times_gen(m, last).items():
                acc[m2] = acc.get(m2, 0) + c * c2
        for k, c in self.table[last][i]:
            for m2, c2 in self.mono_times_gen(rest, k).items():
                acc[m2] = acc.get(m2, 0) + c * c2
        out = {}
        for m, c in acc.items():
            c = norm(c)
            if c:
                out[m] = c
        self._rmemo.put(key, out)
        return out

    def bracket_gen_mono(self, i: int, a: tuple) -> dict:
        """``[x_i, x^a]`` in normal form."""
        acc = dict(self.gen_times_mono(i, a))
        add_into(acc, self.mono_times_gen(a, i), -1, self.ring.norm)
        return acc

    def lmul_gen(self, j: int, terms: dict) -> dict:
        norm = self.ring.norm
        acc: dict = {}
        for m, c in terms.items():
            for m2, c2 in self.gen_times_mono(j, m).items():
                acc[m2] = acc.get(m2, 0) + c * c2
        out = {}
        for m, c in acc.items():
            c = norm(c)
            if c:
                out[m] = c
        return out

    def mono_times(self, a: tuple, terms: dict) -> dict:
        """``x^a * v`` by left-multiplying the letters of ``x^a`` from the right end."""
        w = terms
        for idx in range(self.dim - 1, -1, -1):
            for _ in range(a[idx]):
                w = self.lmul_gen(idx, w)
        return w

    def mono_mono(self, a: tuple, b: tuple) -> dict:
        last = -1
        for idx, e in enumerate(a):
            if e:
                last = idx
        first = self.dim
        for idx, e in enumerate(b):
            if e:
                first = idx
                break
        if last <= first:
            return {tuple(x + y for x, y in zip(a, b)): self.ring.one}
        return self.mono_times(a, {b: self.ring.one})

    def mul_terms(self, u: dict, v: dict) -> dict:
        norm = self.ring.norm
        acc: dict = {}
        for a, ca in u.items():
            for b, cb in v.items():
                cab = ca * cb
                for m, c in self.mono_mono(a, b).items():
                    acc[m] = acc.get(m, 0) + cab * c
        out = {}
        for m, c in acc.items():
            c = norm(c)
            if c:
                out[m] = c
        return out

    # -- elements
    def element(self, terms: dict | None = None) -> PBWElement:
        return PBWElement(self, terms or {})

    def one(self) -> PBWElement:
        return PBWElement(self, {(0,) * self.dim: self.ring.one})

    def gen(self, i: int) -> PBWElement:
        m = [0] * self.dim
        m[i] = 1
        return PBWElement(self, {tuple(m): self.ring.one})

    def monomial(self, a) -> PBWElement:
        return PBWElement(self, {tuple(a): self.ring.one})

    def linear(self, coords) -> PBWElement:
        terms = {}
        for i, c in enumerate(coords):
            if c:
                m = [0] * self.dim
                m[i] = 1
                terms[tuple(m)] = c
        return PBWElement(self, terms)


def enveloping(L: LieAlgebra, ring) -> Enveloping:
    """The shared :class:`Enveloping` instance for ``(L, ring)``."""
    key = ("enveloping", ring)
    U = L._cache.get(key)
    if U is None:
        U = L._cache[key] = Enveloping(L, ring)
    return U


class PBWElement:
    __slots__ = ("U", "terms")

    def __init__(self, U: Enveloping, terms: dict):
        self.U = U
        norm = U.ring.norm
        clean = {}
        for m, c in terms.items():
            c = norm(c)
            if c:
                clean[tuple(m)] = c
        self.terms = clean

    @property
    def ring(self):
        return self.U.ring

    @property
    def L(self):
        return self.U.L

    def _new(self, terms):
        e = PBWElement.__new__(PBWElement)
        e.U, e.terms = self.U, terms
        return e

    def _coerce(self, other):
        if isinstance(other, PBWElement):
            if other.U is not self.U:
                raise ValueError("elements live in different enveloping algebras")
            return other
        return self.U.one().scale(other)

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
        return self.scale(-1)

    def scale(self, c) -> PBWElement:
        ring = self.ring
        if isinstance(c, Fraction) or ring == QQ:
            c = ring(c)
        norm = ring.norm
        out = {}
        for m, v in self.terms.items():
            v = norm(c * v)
            if v:
                out[m] = v
        return self._new(out)

    def __mul__(self, other):
        if isinstance(other, PBWElement):
            self._coerce(other)
            return self._new(self.U.mul_terms(self.terms, other.terms))
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, n: int) -> PBWElement:
        out = self.U.one()
        base = self
        while n:
            if n & 1:
                out = out * base
            n >>= 1
            if n:
                base = base * base
        return out

    def __eq__(self, other):
        if isinstance(other, PBWElement):
            return self.U.ring == other.U.ring and self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    __hash__ = None

    def __bool__(self):
        return bool(self.terms)

    def degree(self) -> int:
        return max((sum(m) for m in self.terms), default=-1)

    def leading_monomial(self) -> tuple:
        return max(self.terms, key=grlex)

    def leading_form(self) -> SymPoly:
        d = self.degree()
        return SymPoly(self.ring, self.U.dim, {m: c for m, c in self.terms.items() if sum(m) == d})

    def constant_term(self):
        return self.terms.get((0,) * self.U.dim, self.ring.zero)

    def without_constant(self) -> PBWElement:
        zero = (0,) * self.U.dim
        return self._new({m: c for m, c in self.terms.items() if m != zero})

    def format(self) -> str:
        return format_terms(self.terms, self.U.L.basis, self.ring)

    def __str__(self):
        return self.format()

    def __repr__(self):
        return f"PBWElement({self.format()} over {self.ring!r})"


# ---------------------------------------------------------------- operations

def pbw_mul(L: LieAlgebra, u: PBWElement, v: PBWElement) -> PBWElement:
    return u * v


def bracket_with_generator(L: LieAlgebra, i: int, u: PBWElement) -> PBWElement:
    """``x_i * u - u * x_i``."""
    U = u.U
    norm = U.ring.norm
    acc: dict = {}
    for a, c in u.terms.items():
        add_into(acc, U.bracket_gen_mono(i, a), c, norm)
    return u._new(acc)


def commutator(u: PBWElement, v: PBWElement) -> PBWElement:
    return u * v - v * u


def is_central(u: PBWElement) -> bool:
    return all(not bracket_with_generator(u.L, i, u) for i in range(u.U.dim))


def _distinct_words(m: tuple):
    letters = [i for i, e in enumerate(m) for _ in range(e)]
    return sorted(set(permutations(letters)))


def symmetrize(L: LieAlgebra, f: SymPoly) -> PBWElement:
    """Average over all orderings of each monomial's letters, straightened in U(g) over QQ."""
    if f.ring != QQ:
        raise ValueError("symmetrization is computed over QQ")
    U = enveloping(L, QQ)
    acc: dict = {}
    for m, c in f.terms.items():
        words = _distinct_words(m)
        weight = Fraction(c) / len(words)
        for word in words:
            w = U.one().terms
            for letter in reversed(word):
                w = U.lmul_gen(letter, w)
            add_into(acc, w, weight, QQ.norm)
    return PBWElement(U, acc)


def reduce_element_mod_p(u: PBWElement, p: int) -> PBWElement:
    """Coefficient-wise reduction of an element over QQ."""
    F = GF(p)
    U = enveloping(u.L, F)
    return PBWElement(U, {m: F(c) for m, c in u.terms.items()})


def lift_element(u: PBWElement) -> PBWElement:
    """Canonical lift of an element over GF(p) to Z/p^2 (representatives in ``[0, p)``)."""
    ring = u.ring
    if ring.modulus is None or not ring.is_field:
        raise ValueError("lift_element expects an element over GF(p)")
    U = enveloping(u.L, Zmod_p2(ring.p))
    return PBWElement(U, dict(u.terms))


def reduce_lift(u: PBWElement) -> PBWElement:
    """Reduce an element over Z/p^2 back to GF(p)."""
    p = u.ring.p
    U = enveloping(u.L, GF(p))
    return PBWElement(U, {m: c % p for m, c in u.terms.items()})


def p_center_element(L: LieAlgebra, pmap: PMap, coords) -> PBWElement:
    """``a^p - a^[p]`` for ``a`` given by coordinates over GF(p), computed literally."""
    U = enveloping(L, GF(pmap.p))
    a = U.linear([GF(pmap.p).norm(int(c)) for c in coords])
    return a ** pmap.p - U.linear(pmap.apply(coords))


def p_center_generators(L: LieAlgebra, p: int, pmap: PMap) -> list[PBWElement]:
    """``x_i^p - x_i^[p]`` for every basis element, each checked to be central."""
    if pmap.p != p:
        raise ValueError("p-map belongs to a different prime")
    U = enveloping(L, GF(p))
    gens = []
    for i in range(L.dim):
        m = [0] * L.dim
        m[i] = p
        g = U.monomial(m) - U.linear(pmap.images[i])
        if not is_central(g):
            raise NotCentral(i)
        gens.append(g)
    return gens


def frobenius_combination(gens: list[PBWElement], coords) -> PBWElement:
    """``sum_i c_i^p * xi_i``; equals ``a^p - a^[p]`` by p-semilinearity."""
    U = gens[0].U
    p = U.ring.p
    out = U.element()
    for c, g in zip(coords, gens):
        c = pow(int(c), p, p)
        if c:
            out = out + g.scale(c)
    return out
