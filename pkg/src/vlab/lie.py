"""Lie algebras by structure constants, restricted p-maps and the index."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product

from .linalg import Span, rank, solve, sparse_kernel
from .scalar import GF, QQ, ModularRing, check_prime, parse_rational


class LieError(Exception):
    pass


class JacobiViolation(LieError):
    def __init__(self, i, j, k):
        super().__init__(f"Jacobi identity fails on basis triple ({i}, {j}, {k})")
        self.triple = (i, j, k)


class RepIncompatible(LieError):
    def __init__(self, i, j):
        super().__init__(f"matrix representation does not respect [x_{i}, x_{j}]")
        self.pair = (i, j)


class InvalidSpec(LieError):
    pass


class RepNotClosed(LieError):
    def __init__(self, i, p):
        super().__init__(f"rho(x_{i})^{p} lies outside the span of the representation")
        self.index = i


class AmbiguousPMap(LieError):
    pass


# ---------------------------------------------------------------- matrices

def mat_mul(a, b, norm=lambda c: c):
    n, m = len(a), len(b[0])
    inner = len(b)
    out = []
    for i in range(n):
        ai = a[i]
        row = []
        for j in range(m):
            s = 0
            for k in range(inner):
                if ai[k]:
                    s += ai[k] * b[k][j]
            row.append(norm(s))
        out.append(row)
    return out


def mat_sub(a, b, norm=lambda c: c):
    return [[norm(x - y) for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_pow(a, n, norm=lambda c: c):
    size = len(a)
    result = [[1 if i == j else 0 for j in range(size)] for i in range(size)]
    base = a
    while n:
        if n & 1:
            result = mat_mul(result, base, norm)
        n >>= 1
        if n:
            base = mat_mul(base, base, norm)
    return result


def mat_comb(coeffs, mats, norm=lambda c: c):
    size = len(mats[0])
    out = [[0] * len(mats[0][0]) for _ in range(size)]
    for c, m in zip(coeffs, mats):
        if not c:
            continue
        for i in range(size):
            for j, v in enumerate(m[i]):
                if v:
                    out[i][j] += c * v
    return [[norm(v) for v in row] for row in out]


def _flatten(m):
    return {(i, j): v for i, row in enumerate(m) for j, v in enumerate(row) if v}


# ---------------------------------------------------------------- algebras

@dataclass(eq=False)
class LieAlgebra:
    """Structure constants ``[x_i, x_j] = sum_k c_ij^k x_k`` stored for ``i < j``."""

    name: str
    basis: tuple
    brackets: dict
    matrix_rep: tuple | None = None
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def bracket(self, i: int, j: int) -> dict:
        """``[x_i, x_j]`` as ``{k: Fraction}``."""
        if i == j:
            return {}
        if i < j:
            return dict(self.brackets.get((i, j), ()))
        return {k: -c for k, c in self.brackets.get((j, i), ())}

    def structure(self, ring) -> list:
        """Table ``t[i][j] = ((k, c), ...)`` of brackets with coefficients in ``ring``."""
        key = ("structure", ring)
        if key not in self._cache:
            table = []
            for i in range(self.dim):
                row = []
                for j in range(self.dim):
                    terms = []
                    for k, c in sorted(self.bracket(i, j).items()):
                        v = ring.norm(ring(c))
                        if v:
                            terms.append((k, v))
                    row.append(tuple(terms))
                table.append(row)
            self._cache[key] = table
        return self._cache[key]

    def bracket_vectors(self, a, b, ring=QQ) -> list:
        """Bracket of coordinate vectors over ``ring``."""
        table = self.structure(ring)
        out = [0] * self.dim
        for i, ai in enumerate(a):
            if not ai:
                continue
            for j, bj in enumerate(b):
                if not bj:
                    continue
                for k, c in table[i][j]:
                    out[k] += ai * bj * c
        return [ring.norm(v) for v in out]

    def ad_matrix(self, i: int, ring=QQ) -> list:
        """Matrix of ``ad x_i``; column ``j`` holds ``[x_i, x_j]``."""
        n = self.dim
        m = [[0] * n for _ in range(n)]
        for j in range(n):
            for k, c in self.structure(ring)[i][j]:
                m[k][j] = c
        return m

    def diagonal_elements(self) -> dict:
        """Basis indices whose adjoint action is diagonal, with their weights."""
        key = ("diagonal",)
        if key not in self._cache:
            out = {}
            for i in range(self.dim):
                weights = []
                for j in range(self.dim):
                    b = self.bracket(i, j)
                    if any(k != j for k in b):
                        break
                    weights.append(b.get(j, Fraction(0)))
                else:
                    if any(weights):
                        out[i] = tuple(weights)
            self._cache[key] = out
        return self._cache[key]

    def validate(self) -> LieAlgebra:
        validate(self)
        return self

    def labels(self) -> list:
        return list(self.basis)


def _clean_brackets(dim, raw) -> dict:
    out = {}
    for (i, j), terms in raw.items():
        if not (0 <= i < dim and 0 <= j < dim):
            raise InvalidSpec(f"bracket index out of range: ({i}, {j})")
        sign = 1
        if i == j:
            if any(parse_rational(c) for _, c in _items(terms)):
                raise InvalidSpec(f"[x_{i}, x_{i}] must vanish")
            continue
        if i > j:
            i, j, sign = j, i, -1
        acc = dict(out.get((i, j), ()))
        for k, c in _items(terms):
            if not 0 <= k < dim:
                raise InvalidSpec(f"bracket target index out of range: {k}")
            acc[k] = acc.get(k, 0) + sign * parse_rational(c)
        acc = tuple(sorted((k, c) for k, c in acc.items() if c))
        if acc:
            out[(i, j)] = acc
        else:
            out.pop((i, j), None)
    return out


def _items(terms):
    return terms.items() if isinstance(terms, dict) else terms


def make_algebra(name, basis, brackets, matrix_rep=None, check=True) -> LieAlgebra:
    basis = tuple(basis)
    rep = None
    if matrix_rep is not None:
        rep = tuple(tuple(tuple(parse_rational(v) for v in row) for row in m) for m in matrix_rep)
        if len(rep) != len(basis):
            raise InvalidSpec("matrix_rep needs one matrix per basis element")
        size = len(rep[0])
        if any(len(m) != size or any(len(r) != size for r in m) for m in rep):
            raise InvalidSpec("matrix_rep matrices must be square of equal size")
    L = LieAlgebra(name, basis, _clean_brackets(len(basis), brackets), rep)
    if check:
        validate(L)
    return L


def validate(L: LieAlgebra) -> None:
    """Raise :class:`JacobiViolation` or :class:`RepIncompatible` on the first failure."""
    n = L.dim
    table = L.structure(QQ)

    def br(u: dict, j: int) -> dict:
        out: dict = {}
        for k, c in u.items():
            for m, d in table[k][j]:
                out[m] = out.get(m, 0) + c * d
        return out

    for i, j, k in combinations(range(n), 3):
        acc: dict = {}
        for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
            for m, v in br(dict(table[a][b]), c).items():
                acc[m] = acc.get(m, 0) + v
        if any(acc.values()):
            raise JacobiViolation(i, j, k)
    if L.matrix_rep is not None:
        rep = L.matrix_rep
        for i, j in combinations(range(n), 2):
            lhs = mat_sub(mat_mul(rep[i], rep[j]), mat_mul(rep[j], rep[i]))
            rhs = mat_comb([c for _, c in table[i][j]], [rep[k] for k, _ in table[i][j]]) \
                if table[i][j] else [[0] * len(rep[0]) for _ in rep[0]]
            if lhs != rhs:
                raise RepIncompatible(i, j)


# ---------------------------------------------------------------- catalog

def _unit(n, i, j):
    m = [[0] * n for _ in range(n)]
    m[i][j] = 1
    return m


def abelian(n: int) -> LieAlgebra:
    if n < 1:
        raise InvalidSpec("abelian algebra needs n >= 1")
    labels = ["x", "y", "z"] if n <= 3 else [f"x{i + 1}" for i in range(n)]
    # strictly upper triangular, pairwise products vanish, so every p-th power is 0
    rep = [_unit(n + 1, 0, i + 1) for i in range(n)]
    return make_algebra(f"abelian({n})", labels[:n], {}, rep)


def heisenberg() -> LieAlgebra:
    rep = [_unit(3, 0, 1), _unit(3, 1, 2), _unit(3, 0, 2)]
    return make_algebra("heisenberg", ["x", "y", "z"], {(0, 1): {2: 1}}, rep)


def sl(n: int) -> LieAlgebra:
    """``sl_n`` with basis: positive root vectors, Cartan ``h_i``, negative root vectors."""
    if n < 2:
        raise InvalidSpec("sl(n) needs n >= 2")
    mats, labels = [], []
    pos = [(i, j) for i in range(n) for j in range(i + 1, n)]
    for i, j in pos:
        mats.append(_unit(n, i, j))
        labels.append("e" if n == 2 else f"e{i + 1}{j + 1}")
    for i in range(n - 1):
        m = [[0] * n for _ in range(n)]
        m[i][i], m[i + 1][i + 1] = 1, -1
        mats.append(m)
        labels.append("h" if n == 2 else f"h{i + 1}")
    for i, j in pos:
        mats.append(_unit(n, j, i))
        labels.append("f" if n == 2 else f"f{i + 1}{j + 1}")
    brackets = brackets_from_matrices(mats)
    return make_algebra(f"sl({n})", labels, brackets, mats)


def brackets_from_matrices(mats) -> dict:
    """Structure constants of a linearly independent family of matrices closed under commutator."""
    flat = [{k: Fraction(v) for k, v in _flatten(m).items()} for m in mats]
    out = {}
    for i, j in combinations(range(len(mats)), 2):
        comm = mat_sub(mat_mul(mats[i], mats[j]), mat_mul(mats[j], mats[i]))
        target = {k: Fraction(v) for k, v in _flatten(comm).items()}
        if not target:
            continue
        coeffs = solve(flat, target, QQ)
        if coeffs is None:
            raise InvalidSpec(f"matrices are not closed under the commutator ({i}, {j})")
        out[(i, j)] = {k: c for k, c in enumerate(coeffs) if c}
    return out


def remark_solvable(n: int, m: int) -> LieAlgebra:
    """``[z, x] = n x``, ``[z, y] = m y``, ``[x, y] = 0`` on the basis ``(x, y, z)``."""
    if n < 1 or m < 1:
        raise InvalidSpec("remark_solvable needs positive integers n, m")
    rep = [_unit(3, 0, 2), _unit(3, 1, 2), [[n, 0, 0], [0, m, 0], [0, 0, 0]]]
    return make_algebra(f"remark_solvable({n},{m})", ["x", "y", "z"],
                        {(2, 0): {0: n}, (2, 1): {1: m}}, rep)


def _kron(a, b):
    return [[x * y for x in ra for y in rb] for ra in a for rb in b]


def _shift(m, power):
    # multiplication by t^power on k[t]/(t^m) in the monomial basis
    s = [[0] * m for _ in range(m)]
    for i in range(m - power):
        s[i + power][i] = 1
    return s


def takiff(base: LieAlgebra, ms) -> LieAlgebra:
    """``base ⊗ k[t_1..t_r]/(t_1^{m_1}, ..., t_r^{m_r})``, truncation multi-index outer."""
    ms = list(ms)
    if not ms or any(m < 1 for m in ms):
        raise InvalidSpec("takiff needs truncation orders m_i >= 1")
    if base.matrix_rep is None:
        raise InvalidSpec("takiff needs a base algebra with a matrix representation")
    exps = sorted(product(*[range(m) for m in ms]), key=lambda a: (sum(a), tuple(-x for x in a)))
    index = {(a, i): n for n, (a, i) in enumerate((a, i) for a in exps for i in range(base.dim))}
    labels = []
    for a in exps:
        for lab in base.basis:
            tail = "".join((f"t{r + 1}" if len(ms) > 1 else "t") * e for r, e in enumerate(a))
            labels.append(f"{lab}_{tail}" if tail else lab)
    brackets = {}
    for a, b in product(exps, repeat=2):
        c = tuple(x + y for x, y in zip(a, b))
        if any(x >= m for x, m in zip(c, ms)):
            continue
        for i, j in product(range(base.dim), repeat=2):
            u, v = index[(a, i)], index[(b, j)]
            if u >= v:
                continue
            terms = {index[(c, k)]: coef for k, coef in base.bracket(i, j).items()}
            if terms:
                brackets[(u, v)] = terms
    mats = []
    for a in exps:
        tpart = [[1]]
        for e, m in zip(a, ms):
            tpart = _kron(tpart, _shift(m, e))
        for i in range(base.dim):
            mats.append(_kron(base.matrix_rep[i], tpart))
    name = f"takiff({base.name},{ms})".replace(" ", "")
    return make_algebra(name, labels, brackets, mats)


def semidirect(base: LieAlgebra, rep=None) -> LieAlgebra:
    """``base ⋉ V`` for a module given by matrices (default: the base's own representation)."""
    if rep is None or rep == "std":
        if base.matrix_rep is None:
            raise InvalidSpec("semidirect with 'std' needs a base matrix representation")
        rep = base.matrix_rep
        rep_name = "std"
    else:
        rep_name = "V"
    rep = [[[parse_rational(v) for v in row] for row in m] for m in rep]
    if len(rep) != base.dim:
        raise InvalidSpec("module matrices must match the base dimension")
    n = len(rep[0])
    d = base.dim
    # the module must be a representation
    for i, j in combinations(range(d), 2):
        lhs = mat_sub(mat_mul(rep[i], rep[j]), mat_mul(rep[j], rep[i]))
        br = base.bracket(i, j)
        rhs = mat_comb(list(br.values()), [rep[k] for k in br]) if br else [[0] * n for _ in range(n)]
        if lhs != rhs:
            raise InvalidSpec("module matrices do not define a representation")
    labels = list(base.basis) + [f"v{k + 1}" for k in range(n)]
    brackets = {(i, j): dict(t) for (i, j), t in base.brackets.items()}
    for i in range(d):
        for j in range(n):
            terms = {d + k: rep[i][k][j] for k in range(n) if rep[i][k][j]}
            if terms:
                brackets[(i, d + j)] = terms
    # affine block: x -> [[rho(x), 0], [0, 0]], v_j -> e_j in the last column
    size = n + 1
    affine = []
    for i in range(d):
        m = [[0] * size for _ in range(size)]
        for r in range(n):
            for c in range(n):
                m[r][c] = rep[i][r][c]
        affine.append(m)
    for j in range(n):
        affine.append(_unit(size, j, n))
    faithful = rank([_flatten(m) for m in rep], QQ) == d
    if faithful or base.matrix_rep is None:
        mats = affine
    else:
        b = len(base.matrix_rep[0])
        mats = []
        for idx, m in enumerate(affine):
            big = [[0] * (b + size) for _ in range(b + size)]
            if idx < d:
                for r in range(b):
                    for c in range(b):
                        big[r][c] = base.matrix_rep[idx][r][c]
            for r in range(size):
                for c in range(size):
                    big[b + r][b + c] = m[r][c]
            mats.append(big)
    return make_algebra(f"semidirect({base.name},{rep_name})", labels, brackets, mats)


# ---------------------------------------------------------------- p-maps

@dataclass(frozen=True)
class PMap:
    """Restricted structure ``x -> x^[p]`` over GF(p).

    ``images[i]`` are the coordinates of ``x_i^[p]``; ``rep`` is the reduced
    matrix representation used to evaluate the p-map on arbitrary vectors.
    """

    p: int
    images: tuple
    rep: tuple | None = None
    algebra: LieAlgebra | None = field(default=None, compare=False, repr=False)

    def apply(self, vec) -> list:
        """``v^[p]`` for a coordinate vector over GF(p)."""
        F = GF(self.p)
        vec = [F.norm(int(v)) for v in vec]
        if self.rep is not None:
            m = mat_comb(vec, self.rep, F.norm)
            coords = _coords_in_rep(mat_pow(m, self.p, F.norm), self.rep, F)
            if coords is None:
                raise RepNotClosed(-1, self.p)
            return coords
        if self.algebra is None:
            raise AmbiguousPMap("no representation to evaluate the p-map on a general vector")
        ad = [self.algebra.ad_matrix(i, F) for i in range(self.algebra.dim)]
        target = mat_pow(mat_comb(vec, ad, F.norm), self.p, F.norm)
        return _solve_ad(ad, target, F)


def _coords_in_rep(target, rep, F) -> list | None:
    cols = [{k: v for k, v in _flatten(m).items()} for m in rep]
    coeffs = solve(cols, _flatten(target), F)
    return None if coeffs is None else [int(c) for c in coeffs]


def _solve_ad(ad, target, F) -> list:
    cols = [_flatten(m) for m in ad]
    if rank(cols, F) < len(ad):
        raise AmbiguousPMap("ad(y) = ad(x)^p fixes y only modulo the center; supply a representation")
    coeffs = solve(cols, _flatten(target), F)
    if coeffs is None:
        raise LieError("ad(x)^p is not an inner derivation; the algebra is not restrictable")
    return [int(c) for c in coeffs]


def compute_pmap(L: LieAlgebra, p: int, override=None) -> PMap:
    check_prime(p)
    F = GF(p)
    L.structure(F)  # raises DenominatorDivisibleByP early
    if override is not None:
        images = tuple(tuple(F(v) for v in row) for row in override)
        if len(images) != L.dim or any(len(r) != L.dim for r in images):
            raise InvalidSpec("p-map override must be a dim x dim table")
        pm = PMap(p, images, None, L)
        check_pmap(L, pm)
        return pm
    if L.matrix_rep is not None:
        rep = tuple(tuple(tuple(F(v) for v in row) for row in m) for m in L.matrix_rep)
        if rank([_flatten(m) for m in rep], F) < L.dim:
            raise InvalidSpec(f"matrix representation is not faithful mod {p}")
        images = []
        for i, m in enumerate(rep):
            coords = _coords_in_rep(mat_pow(m, p, F.norm), rep, F)
            if coords is None:
                raise RepNotClosed(i, p)
            images.append(tuple(coords))
        pm = PMap(p, tuple(images), rep, L)
    else:
        ad = [L.ad_matrix(i, F) for i in range(L.dim)]
        images = tuple(tuple(_solve_ad(ad, mat_pow(a, p, F.norm), F)) for a in ad)
        pm = PMap(p, images, None, L)
    check_pmap(L, pm)
    return pm


def check_pmap(L: LieAlgebra, pm: PMap) -> None:
    """Raise unless ``ad(x_i^[p]) == ad(x_i)^p`` for every basis element."""
    F = GF(pm.p)
    ad = [L.ad_matrix(i, F) for i in range(L.dim)]
    for i in range(L.dim):
        lhs = mat_comb(list(pm.images[i]), ad, F.norm)
        if lhs != mat_pow(ad[i], pm.p, F.norm):
            raise LieError(f"ad(x_{i}^[p]) != ad(x_{i})^p for p = {pm.p}")


# ---------------------------------------------------------------- index and center

INDEX_PRIME = 2**31 - 1


def index(L: LieAlgebra, trials: int = 8, seed: int = 0) -> int:
    """``dim - generic rank`` of the matrix ``(sum_k c_ij^k xi_k)``."""
    F = ModularRing(INDEX_PRIME)
    table = L.structure(F)
    rng = random.Random(seed)
    best = 0
    n = L.dim
    for _ in range(trials):
        xi = [rng.randrange(F.modulus) for _ in range(n)]
        rows = []
        for i in range(n):
            row = {}
            for j in range(n):
                v = sum(c * xi[k] for k, c in table[i][j]) % F.modulus
                if v:
                    row[j] = v
            rows.append(row)
        best = max(best, rank(rows, F))
    return n - best


def center_of(L: LieAlgebra, ring=QQ) -> list:
    """Basis of the center ``Z(L)`` as coordinate lists over ``ring``."""
    table = L.structure(ring)
    rows: dict = {}
    for i in range(L.dim):
        for j in range(L.dim):
            for k, c in table[i][j]:
                rows.setdefault((j, k), {})[i] = c
    basis = sparse_kernel(rows.values(), L.dim, ring)
    return [[v.get(i, ring.zero) for i in range(L.dim)] for v in basis]


def generated_dimension(L: LieAlgebra, gens, ring=QQ) -> int:
    """Dimension of the Lie subalgebra generated by the basis elements ``gens``."""
    span = Span(ring)
    queue = []
    units = []
    for i in gens:
        v = [ring.zero] * L.dim
        v[i] = ring.one
        units.append(v)
        if span.add({i: ring.one}):
            queue.append(v)
    while queue:
        v = queue.pop()
        for u in units:
            w = L.bracket_vectors(u, v, ring)
            if span.add({k: c for k, c in enumerate(w) if c}):
                queue.append(w)
    return len(span)


def generating_subset(L: LieAlgebra, ring=QQ, given=()) -> list[int]:
    """Basis indices that together with ``given`` generate ``L`` as a Lie algebra over ``ring``.

    Greedy: add every basis element not yet reached, then drop the ones the
    others still generate.
    """
    given = list(given)
    chosen: list[int] = []
    for i in range(L.dim):
        if i in given:
            continue
        if generated_dimension(L, given + chosen + [i], ring) > generated_dimension(L, given + chosen, ring):
            chosen.append(i)
    for i in list(chosen):
        rest = [j for j in chosen if j != i]
        if generated_dimension(L, given + rest, ring) == L.dim:
            chosen = rest
    return chosen
