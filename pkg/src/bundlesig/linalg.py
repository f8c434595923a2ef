"""Exact linear algebra over Q on tuples of rows (gmpy2 rationals)."""
from __future__ import annotations

from typing import Sequence

from .circle import Q
from .errors import DimensionMismatch


def as_matrix(rows: Sequence[Sequence]) -> tuple:
    out = tuple(tuple(Q(x) for x in row) for row in rows)
    if out and len({len(r) for r in out}) != 1:
        raise DimensionMismatch("ragged matrix")
    return out


def identity(n: int) -> tuple:
    return tuple(tuple(Q(int(i == j)) for j in range(n)) for i in range(n))


def zeros(r: int, c: int) -> tuple:
    return tuple((Q(0),) * c for _ in range(r))


def transpose(m: tuple) -> tuple:
    return tuple(zip(*m)) if m else ()


def matmul(a: tuple, b: tuple) -> tuple:
    if len(a[0]) != len(b):
        raise DimensionMismatch(f"{len(a)}x{len(a[0])} times {len(b)}x{len(b[0])}")
    bt = transpose(b)
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in bt)
                 for row in a)


def matvec(a: tuple, v: Sequence) -> tuple:
    return tuple(sum((x * y for x, y in zip(row, v)), Q(0)) for row in a)


def add(a: tuple, b: tuple) -> tuple:
    return tuple(tuple(x + y for x, y in zip(r, s)) for r, s in zip(a, b))


def sub(a: tuple, b: tuple) -> tuple:
    return tuple(tuple(x - y for x, y in zip(r, s)) for r, s in zip(a, b))


def hstack(a: tuple, b: tuple) -> tuple:
    return tuple(r + s for r, s in zip(a, b))


def nullspace(m: tuple) -> list:
    """Basis of ``{x : m x = 0}`` from the reduced row echelon form."""
    rows = [list(r) for r in m]
    ncols = len(m[0]) if m else 0
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Q(0)] * ncols
        v[f] = Q(1)
        for i, c in enumerate(pivots):
            v[c] = -rows[i][f]
        basis.append(tuple(v))
    return basis


def inverse(m: tuple) -> tuple:
    n = len(m)
    aug = [list(r) + list(e) for r, e in zip(m, identity(n))]
    for c in range(n):
        p = next((i for i in range(c, n) if aug[i][c] != 0), None)
        if p is None:
            raise ZeroDivisionError("singular matrix")
        aug[c], aug[p] = aug[p], aug[c]
        inv = 1 / aug[c][c]
        aug[c] = [x * inv for x in aug[c]]
        for i in range(n):
            if i != c and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[c])]
    return tuple(tuple(r[n:]) for r in aug)


def signature(form: Sequence[Sequence]) -> int:
    """Sylvester signature of a symmetric rational matrix by congruence reduction.

    A zero diagonal with a nonzero entry ``(i, j)`` is repaired by adding
    basis vector ``j`` to ``i``, making the new diagonal entry ``2 a_ij``.
    """
    a = [[Q(x) for x in row] for row in form]
    n = len(a)
    for i in range(n):
        for j in range(i):
            if a[i][j] != a[j][i]:
                raise ValueError("form is not symmetric")
    sig = 0
    live = list(range(n))
    while live:
        p = next((i for i in live if a[i][i] != 0), None)
        if p is None:
            pair = next(((i, j) for i in live for j in live if a[i][j] != 0), None)
            if pair is None:
                break
            i, j = pair
            for k in range(n):
                a[i][k] += a[j][k]
            for k in range(n):
                a[k][i] += a[k][j]
            p = i
        d = a[p][p]
        sig += 1 if d > 0 else -1
        live.remove(p)
        for i in live:
            if a[i][p] != 0:
                f = a[i][p] / d
                for k in live:
                    a[i][k] -= f * a[p][k]
                a[i][p] = Q(0)
        for i in live:
            a[p][i] = Q(0)
    return sig
