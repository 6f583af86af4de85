"""Exact linear algebra for the elementary-deduction solvers.

GF(2) vectors are Python ints used as bitsets.  Integer systems are solved by
bringing the coefficient matrix to column Hermite form with a tracked
unimodular transform.
"""

from __future__ import annotations

from typing import Sequence


def gf2_solve(vectors: Sequence[int], target: int) -> int | None:
    """Return a bitmask ``s`` with XOR of ``vectors[j]`` over set bits of ``s``
    equal to ``target``, or None if target is outside the span."""
    basis: dict[int, tuple[int, int]] = {}
    for j, v in enumerate(vectors):
        mask = 1 << j
        while v:
            h = v.bit_length() - 1
            if h not in basis:
                basis[h] = (v, mask)
                break
            bv, bm = basis[h]
            v ^= bv
            mask ^= bm
    mask = 0
    t = target
    while t:
        h = t.bit_length() - 1
        if h not in basis:
            return None
        bv, bm = basis[h]
        t ^= bv
        mask ^= bm
    return mask


def gf2_rank(vectors: Sequence[int]) -> int:
    basis: dict[int, int] = {}
    for v in vectors:
        while v:
            h = v.bit_length() - 1
            if h not in basis:
                basis[h] = v
                break
            v ^= basis[h]
    return len(basis)


def egcd(a: int, b: int) -> tuple[int, int, int]:
    """``(g, s, t)`` with ``s*a + t*b == g == gcd(a, b) >= 0``."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def column_hermite(rows: Sequence[Sequence[int]], ncols: int):
    """Column-style Hermite reduction ``H = A U`` with ``U`` unimodular.

    Returns ``(H, U, pivots)`` where ``pivots[c]`` is the row of the leading
    entry of column ``c``; columns past ``len(pivots)`` are zero.  Entries to
    the left of a pivot are reduced modulo it.
    """
    H = [list(r) for r in rows]
    U = [[int(i == j) for j in range(ncols)] for i in range(ncols)]
    pivots: list[int] = []

    def combine(M, r, j, s, t, u, v):
        # col_r, col_j <- s*col_r + t*col_j, u*col_r + v*col_j
        for row in M:
            a, b = row[r], row[j]
            row[r] = s * a + t * b
            row[j] = u * a + v * b

    r = 0
    for i in range(len(H)):
        if r == ncols:
            break
        for j in range(r + 1, ncols):
            b = H[i][j]
            if b == 0:
                continue
            a = H[i][r]
            g, s, t = egcd(a, b)
            combine(H, r, j, s, t, -b // g, a // g)
            combine(U, r, j, s, t, -b // g, a // g)
        p = H[i][r]
        if p == 0:
            continue
        if p < 0:
            for M in (H, U):
                for row in M:
                    row[r] = -row[r]
            p = -p
        for c in range(r):
            q = H[i][c] // p
            if q:
                for M in (H, U):
                    for row in M:
                        row[c] -= q * row[r]
        pivots.append(i)
        r += 1
    return H, U, pivots


def int_solve(rows: Sequence[Sequence[int]], b: Sequence[int]) -> list[int] | None:
    """Find ``x`` in Z^n with ``A x = b`` (``A`` given by rows), or None."""
    ncols = len(rows[0]) if rows else 0
    if ncols == 0:
        return [] if all(v == 0 for v in b) else None
    H, U, pivots = column_hermite(rows, ncols)
    y = [0] * ncols
    for c, i in enumerate(pivots):
        acc = b[i] - sum(H[i][cc] * y[cc] for cc in range(c))
        if acc % H[i][c]:
            return None
        y[c] = acc // H[i][c]
    for i, row in enumerate(H):
        if sum(row[c] * y[c] for c in range(len(pivots))) != b[i]:
            return None
    return [sum(U[i][c] * y[c] for c in range(ncols)) for i in range(ncols)]
