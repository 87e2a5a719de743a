"""Exponent-vector helpers shared by Sym(g) and U(g)."""

from __future__ import annotations

from functools import lru_cache
from math import comb


def grlex(m: tuple) -> tuple:
    """Sort key: total degree first, then lexicographic with x_1 > x_2 > ..."""
    return (sum(m), m)


@lru_cache(maxsize=None)
def of_degree(n: int, d: int) -> tuple:
    """All exponent vectors of length ``n`` and total degree ``d``, ascending grlex."""
    if n == 0:
        return ((),) if d == 0 else ()
    out = []
    for first in range(d + 1):
        for rest in of_degree(n - 1, d - first):
            out.append((first,) + rest)
    return tuple(out)


def up_to_degree(n: int, D: int) -> list:
    out = []
    for d in range(D + 1):
        out.extend(of_degree(n, d))
    return out


def count_up_to(n: int, D: int) -> int:
    return comb(D + n, n)


def weight_filter(monos, diagonal: dict, ring):
    """Keep monomials of weight zero (in ``ring``) for every diagonal basis element."""
    if not diagonal:
        return list(monos)
    ws = [[ring(w) for w in weights] for weights in diagonal.values()]
    norm = ring.norm
    out = []
    for m in monos:
        for weights in ws:
            s = 0
            for e, w in zip(m, weights):
                if e:
                    s += e * w
            if norm(s):
                break
        else:
            out.append(m)
    return out


def format_terms(terms: dict, labels, ring, sep: str = "*") -> str:
    """Render ``{exponent: coeff}`` largest monomial first, e.g. ``4*e*f + h^2 - 2*h``."""
    if not terms:
        return "0"
    parts = []
    for m in sorted(terms, key=grlex, reverse=True):
        c = terms[m]
        text = ring.format(c)
        neg = text.startswith("-")
        if neg:
            text = text[1:]
        factors = []
        for lab, e in zip(labels, m):
            if e == 1:
                factors.append(lab)
            elif e > 1:
                factors.append(f"{lab}^{e}")
        body = sep.join(factors)
        if body and text == "1":
            term = body
        elif body:
            term = f"{text}{sep}{body}"
        else:
            term = text
        if not parts:
            parts.append(("-" if neg else "") + term)
        else:
            parts.append(("- " if neg else "+ ") + term)
    return " ".join(parts)


def add_into(acc: dict, terms: dict, scale, norm) -> None:
    for m, c in terms.items():
        v = norm(acc.get(m, 0) + scale * c)
        if v:
            acc[m] = v
        else:
            acc.pop(m, None)
