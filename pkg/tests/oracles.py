"""Independent reference computations used to cross-check the library.

Nothing here calls the memoized straightening, the weight filter, the column
kernel or the generator extraction. The oracles rewrite words directly and
hand dense matrices to sympy.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations_with_replacement

import sympy
from sympy.polys.domains import GF as SymGF
from sympy.polys.matrices import DomainMatrix


def word_to_exponents(word, n):
    e = [0] * n
    for i in word:
        e[i] += 1
    return tuple(e)


def exponents_to_word(m):
    return tuple(i for i, e in enumerate(m) for _ in range(e))


def naive_normal_form(L, words: dict, modulus=None) -> dict:
    """Straighten ``{word: coeff}`` by swapping the first adjacent descent until none remain.

    Coefficients are Fractions; with ``modulus`` they are reduced at the end.
    """
    todo = dict(words)
    done: dict = {}
    while todo:
        w, c = todo.popitem()
        if not c:
            continue
        for t in range(len(w) - 1):
            if w[t] > w[t + 1]:
                j, i = w[t], w[t + 1]
                swapped = w[:t] + (i, j) + w[t + 2:]
                todo[swapped] = todo.get(swapped, 0) + c
                for k, b in L.bracket(j, i).items():
                    shorter = w[:t] + (k,) + w[t + 2:]
                    todo[shorter] = todo.get(shorter, 0) + c * b
                break
        else:
            m = word_to_exponents(w, L.dim)
            done[m] = done.get(m, 0) + c
    out = {}
    for m, c in done.items():
        c = Fraction(c)
        if modulus is not None:
            c = c.numerator * pow(c.denominator, -1, modulus) % modulus
        if c:
            out[m] = c
    return out


def monomials_up_to(n, D):
    out = []
    for d in range(D + 1):
        for combo in combinations_with_replacement(range(n), d):
            out.append(word_to_exponents(combo, n))
    return out


def center_window_dimension(L, p, D) -> int:
    """``dim`` of the joint kernel of all ``ad x_i`` on ``U_{<=D}`` over GF(p), dense and unfiltered."""
    monos = monomials_up_to(L.dim, D)
    rows: dict = {}
    for col, m in enumerate(monos):
        w = exponents_to_word(m)
        for i in range(L.dim):
            left = naive_normal_form(L, {(i,) + w: 1}, p)
            right = naive_normal_form(L, {w + (i,): 1}, p)
            for mm in set(left) | set(right):
                v = (left.get(mm, 0) - right.get(mm, 0)) % p
                if v:
                    rows.setdefault((i, mm), {})[col] = v
    if not rows:
        return len(monos)
    dense = [[r.get(c, 0) for c in range(len(monos))] for r in rows.values()]
    K = SymGF(p)
    M = DomainMatrix([[K(v) for v in row] for row in dense], (len(dense), len(monos)), K)
    return len(monos) - M.rank()


def is_central_naive(L, terms: dict, p) -> bool:
    for i in range(L.dim):
        words_l = {(i,) + exponents_to_word(m): c for m, c in terms.items()}
        words_r = {exponents_to_word(m) + (i,): -c for m, c in terms.items()}
        acc = naive_normal_form(L, {**words_l}, p)
        for m, c in naive_normal_form(L, words_r, p).items():
            acc[m] = (acc.get(m, 0) + c) % p
        if any(v % p for v in acc.values()):
            return False
    return True


def sym_invariant_dimensions(L, D) -> list[int]:
    """``dim Sym^d(g)^g`` for ``d = 1..D`` via the coadjoint derivations and sympy nullspaces."""
    xs = sympy.symbols(f"v0:{L.dim}")
    dims = []
    for d in range(1, D + 1):
        monos = [sympy.Mul(*[xs[i] for i in combo])
                 for combo in combinations_with_replacement(range(L.dim), d)]
        coeffs = sympy.symbols(f"a0:{len(monos)}")
        f = sum(a * m for a, m in zip(coeffs, monos))
        eqs = []
        for i in range(L.dim):
            # x_i . f = sum_j [x_i, x_j] df/dx_j
            act = sum(sympy.Rational(c.numerator, c.denominator) * xs[k] * sympy.diff(f, xs[j])
                      for j in range(L.dim) for k, c in L.bracket(i, j).items())
            eqs.extend(sympy.Poly(sympy.expand(act), *xs).coeffs() if act != 0 else [])
        if not eqs:
            dims.append(len(monos))
            continue
        A, _ = sympy.linear_eq_to_matrix(eqs, coeffs)
        dims.append(len(monos) - A.rank())
    return dims


def sl2_degree2_invariant(L):
    """The single degree-2 invariant of sl_2 as a sympy expression, from the oracle nullspace."""
    xs = sympy.symbols(f"v0:{L.dim}")
    monos = [sympy.Mul(*[xs[i] for i in combo]) for combo in combinations_with_replacement(range(L.dim), 2)]
    coeffs = sympy.symbols(f"a0:{len(monos)}")
    f = sum(a * m for a, m in zip(coeffs, monos))
    eqs = []
    for i in range(L.dim):
        act = sum(sympy.Rational(c.numerator, c.denominator) * xs[k] * sympy.diff(f, xs[j])
                  for j in range(L.dim) for k, c in L.bracket(i, j).items())
        eqs.extend(sympy.Poly(sympy.expand(act), *xs).coeffs())
    A, _ = sympy.linear_eq_to_matrix(eqs, coeffs)
    (v,) = A.nullspace()
    return sympy.expand(sum(c * m for c, m in zip(v, monos))), xs


def matrix_of(L, terms: dict, modulus=None):
    """Image of a PBW element under the algebra's matrix representation."""
    rep = [sympy.Matrix([[sympy.Rational(str(v)) for v in row] for row in m]) for m in L.matrix_rep]
    size = rep[0].shape[0]
    out = sympy.zeros(size, size)
    for m, c in terms.items():
        term = sympy.eye(size)
        for i, e in enumerate(m):
            if e:
                term = term * rep[i] ** e
        out += sympy.Rational(str(c)) * term
    if modulus is not None:
        out = out.applyfunc(lambda v: sympy.Rational(v).p * pow(sympy.Rational(v).q, -1, modulus) % modulus)
    return out
