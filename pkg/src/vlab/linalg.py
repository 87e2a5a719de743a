"""Sparse exact linear algebra over the rings in :mod:`vlab.scalar`.

Vectors are dicts ``column -> coefficient`` with no stored zeros. Two
flavours of elimination live here:

* :func:`rref` / :func:`kernel_basis` work on integer columns with pivots
  chosen left to right, which is what the null-space routines need;
* :class:`Span` keeps an echelon basis whose pivot is the *largest* key
  under a caller supplied order, so that pivots are leading monomials.
"""

from __future__ import annotations

import heapq
from typing import Callable, Hashable, Iterable


def _clean(vec, norm):
    out = {}
    for k, v in vec.items():
        v = norm(v)
        if v:
            out[k] = v
    return out


def _axpy(row, f, prow, norm, skip=None):
    # row -= f * prow, in place
    for k, v in prow.items():
        if k == skip:
            continue
        nv = norm(row.get(k, 0) - f * v)
        if nv:
            row[k] = nv
        else:
            row.pop(k, None)


def rref(rows: Iterable[dict], ring) -> dict[int, dict]:
    """Reduced row echelon form of a sparse matrix.

    Returns ``{pivot_column: row}`` with every row normalized to a leading 1
    and cleared in all other pivot columns.
    """
    norm = ring.norm
    pivots: dict[int, dict] = {}
    for r in rows:
        row = _clean(r, norm)
        while row:
            c = min(row)
            prow = pivots.get(c)
            if prow is None:
                inv = ring.inv(row[c])
                pivots[c] = {k: norm(v * inv) for k, v in row.items()}
                break
            f = row.pop(c)
            _axpy(row, f, prow, norm, skip=c)
    for c in sorted(pivots, reverse=True):
        row = pivots[c]
        for k in [k for k in row if k != c and k in pivots]:
            f = row.pop(k)
            _axpy(row, f, pivots[k], norm, skip=k)
    return pivots


def rank(rows: Iterable[dict], ring) -> int:
    return len(rref(rows, ring))


def sparse_kernel(rows: Iterable[dict], ncols: int, ring) -> list[dict]:
    """Right null space of a sparse matrix, one vector per free column.

    Each vector has a 1 in its free column, zeros in the other free columns,
    and its last nonzero entry is that free column. Vectors are returned in
    increasing order of free column.
    """
    pivots = rref(rows, ring)
    norm = ring.norm
    by_col: dict[int, list] = {}
    for c, row in pivots.items():
        for k, v in row.items():
            if k != c:
                by_col.setdefault(k, []).append((c, v))
    basis = []
    for f in range(ncols):
        if f in pivots:
            continue
        vec = {f: ring.one}
        for c, v in by_col.get(f, ()):
            nv = norm(-v)
            if nv:
                vec[c] = nv
        basis.append(vec)
    return basis


def column_kernel(columns: list[dict], ring) -> list[dict]:
    """Null space from column dependencies; same basis as :func:`sparse_kernel`.

    Column ``j`` contributes a kernel vector exactly when it lies in the span
    of columns ``< j``; the vector is ``e_j`` minus that combination, written
    in the independent columns only. Cheap when rows far outnumber columns.
    """
    norm = ring.norm
    echelon: dict = {}  # pivot row -> (column vector with 1 at pivot, combination)
    out = []
    for j, col in enumerate(columns):
        v = _clean(col, norm)
        combo = {j: ring.one}
        while v:
            r = max(v)
            hit = echelon.get(r)
            if hit is None:
                inv = ring.inv(v[r])
                echelon[r] = ({k: norm(c * inv) for k, c in v.items()},
                              {k: norm(c * inv) for k, c in combo.items()})
                break
            f = v[r]
            evec, ecombo = hit
            _axpy(v, f, evec, norm)
            _axpy(combo, f, ecombo, norm)
        else:
            out.append(combo)
    return out


def kernel_basis(matrix, ring) -> list[list]:
    """Dense wrapper around :func:`sparse_kernel`.

    >>> from vlab.scalar import GF
    >>> kernel_basis([[1, 1]], GF(5))
    [[4, 1]]
    """
    matrix = [list(r) for r in matrix]
    ncols = len(matrix[0]) if matrix else 0
    rows = [{j: ring(v) for j, v in enumerate(r) if v} for r in matrix]
    out = []
    for vec in sparse_kernel(rows, ncols, ring):
        out.append([vec.get(j, ring.zero) for j in range(ncols)])
    return out


def solve(columns: list[dict], target: dict, ring) -> list | None:
    """Find coefficients ``a`` with ``sum(a[i] * columns[i]) == target``.

    Columns are sparse vectors over arbitrary hashable keys. Returns ``None``
    when the target is not in their span; free coefficients are set to 0.
    """
    keys: dict[Hashable, int] = {}
    for vec in list(columns) + [target]:
        for k in vec:
            keys.setdefault(k, len(keys))
    n = len(columns)
    rows: dict[int, dict] = {}
    for j, vec in enumerate(columns):
        for k, v in vec.items():
            rows.setdefault(keys[k], {})[j] = v
    for k, v in target.items():
        rows.setdefault(keys[k], {})[n] = v
    pivots = rref(rows.values(), ring)
    if n in pivots:
        return None
    coeffs = [ring.zero] * n
    for c, row in pivots.items():
        coeffs[c] = ring.norm(row.get(n, ring.zero))
    return coeffs


class Span:
    """Incrementally built subspace with leading-key echelon basis.

    ``key`` orders columns; each stored row is normalized so the coefficient
    of its largest column (its pivot) is 1.
    """

    def __init__(self, ring, key: Callable | None = None):
        self.ring = ring
        self.key = key
        self.rows: dict = {}

    def __len__(self):
        return len(self.rows)

    def _lead(self, vec):
        return max(vec, key=self.key) if self.key else max(vec)

    def reduce(self, vec: dict) -> dict:
        """Fully reduced residue of ``vec`` modulo the span."""
        norm = self.ring.norm
        row = _clean(vec, norm)
        res = {}
        if self.key is not None:
            while row:
                c = self._lead(row)
                v = row.pop(c)
                prow = self.rows.get(c)
                if prow is None:
                    res[c] = v
                else:
                    _axpy(row, v, prow, norm, skip=c)
            return res
        # integer columns: walk them from the top with a max-heap
        heap = [-k for k in row]
        heapq.heapify(heap)
        rows = self.rows
        while heap:
            c = -heapq.heappop(heap)
            v = row.pop(c, None)
            if v is None:
                continue
            prow = rows.get(c)
            if prow is None:
                res[c] = v
                continue
            for k, w in prow.items():
                if k == c:
                    continue
                old = row.get(k)
                nv = norm((old or 0) - v * w)
                if nv:
                    row[k] = nv
                    if old is None:
                        heapq.heappush(heap, -k)
                elif old is not None:
                    del row[k]
        return res

    def contains(self, vec: dict) -> bool:
        return not self.reduce(vec)

    def add(self, vec: dict) -> bool:
        """Insert ``vec``; return ``False`` when it was already in the span."""
        res = self.reduce(vec)
        if not res:
            return False
        c = self._lead(res)
        inv = self.ring.inv(res[c])
        norm = self.ring.norm
        self.rows[c] = {k: norm(v * inv) for k, v in res.items()}
        return True

    def pivots(self) -> list:
        return sorted(self.rows, key=self.key)

    def basis(self) -> list[dict]:
        """Reduced echelon basis in increasing order of pivot."""
        norm = self.ring.norm
        done: dict = {}
        out = []
        for c in self.pivots():
            row = dict(self.rows[c])
            # rows already in ``done`` carry no other pivot columns
            for k in [k for k in row if k != c and k in done]:
                f = row.get(k)
                if f:
                    _axpy(row, f, done[k], norm)
            done[c] = row
            out.append(row)
        return out
