"""Exact null spaces of rational matrices by fraction-free elimination."""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

Matrix = Sequence[Sequence[Fraction | int]]


def _integer_rows(rows: Matrix) -> list[list[int]]:
    out = []
    for row in rows:
        den = 1
        for x in row:
            d = Fraction(x).denominator
            den = den * d // math.gcd(den, d)
        out.append([int(Fraction(x) * den) for x in row])
    return out


def echelon(rows: Matrix) -> tuple[list[list[int]], list[int]]:
    """Bareiss elimination; returns (integer echelon rows, pivot columns).

    Pivot choice is deterministic: leftmost column with a nonzero entry,
    smallest row index among the remaining rows.
    """
    a = _integer_rows(rows)
    if not a:
        return [], []
    m, n = len(a), len(a[0])
    pivots: list[int] = []
    prev = 1
    r = 0
    for col in range(n):
        if r == m:
            break
        piv = next((i for i in range(r, m) if a[i][col]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        p = a[r][col]
        for i in range(r + 1, m):
            f = a[i][col]
            a[i] = [(p * a[i][k] - f * a[r][k]) // prev for k in range(n)]
        prev = p
        pivots.append(col)
        r += 1
    return a[:r], pivots


def rank(rows: Matrix) -> int:
    return len(echelon(rows)[1])


def _primitive(v: list[Fraction]) -> tuple[int, ...]:
    den = 1
    for x in v:
        den = den * x.denominator // math.gcd(den, x.denominator)
    ints = [int(x * den) for x in v]
    g = 0
    for x in ints:
        g = math.gcd(g, x)
    ints = [x // g for x in ints] if g else ints
    first = next((x for x in ints if x), 0)
    if first < 0:
        ints = [-x for x in ints]
    return tuple(ints)


def rational_kernel(rows: Matrix, ncols: int | None = None) -> list[tuple[int, ...]]:
    """Basis of {v : M v = 0} as primitive integer vectors (positive first entry)."""
    if ncols is None:
        if not rows:
            raise ValueError("ncols required for an empty matrix")
        ncols = len(rows[0])
    ech, pivots = echelon(rows) if rows else ([], [])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, pc in reversed(list(zip(ech, pivots))):
            s = sum(row[k] * v[k] for k in range(pc + 1, ncols))
            v[pc] = -Fraction(s) / row[pc]
        basis.append(_primitive(v))
    return basis
