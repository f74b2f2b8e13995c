"""Exact linear algebra over Q and Z used by the cone and lattice code.

Everything works on lists/tuples of Fractions (or ints); nothing here
touches floating point.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Sequence

Vec = tuple[Fraction, ...]


def to_fraction_rows(rows: Sequence[Sequence]) -> list[list[Fraction]]:
    return [[Fraction(x) for x in row] for row in rows]


def det_fraction(rows: Sequence[Sequence]) -> Fraction:
    a = to_fraction_rows(rows)
    n = len(a)
    if any(len(r) != n for r in a):
        raise ValueError("determinant needs a square matrix")
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        det *= a[col][col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(col + 1, n):
            if a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return det


def rank_fraction(rows: Sequence[Sequence]) -> int:
    a = to_fraction_rows(rows)
    if not a:
        return 0
    m, n = len(a), len(a[0])
    rank = 0
    row = 0
    for col in range(n):
        piv = next((r for r in range(row, m) if a[r][col] != 0), None)
        if piv is None:
            continue
        a[row], a[piv] = a[piv], a[row]
        pv = a[row][col]
        a[row] = [x / pv for x in a[row]]
        for r in range(m):
            if r != row and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[row])]
        rank += 1
        row += 1
        if row == m:
            break
    return rank


def solve_fraction(columns: Sequence[Sequence], b: Sequence) -> list[Fraction]:
    """Solve sum_j x_j * columns[j] = b exactly; raises on singular."""
    n = len(b)
    k = len(columns)
    if k != n or any(len(c) != n for c in columns):
        raise ValueError("solve_fraction needs a square system")
    aug = [[Fraction(columns[j][i]) for j in range(k)] + [Fraction(b[i])]
           for i in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if piv is None:
            raise ValueError("singular system")
        aug[col], aug[piv] = aug[piv], aug[col]
        pv = aug[col][col]
        aug[col] = [x / pv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [aug[i][n] for i in range(n)]


def nullspace_fraction(rows: Sequence[Sequence]) -> list[Vec]:
    """Basis of {x : rows @ x = 0}, reduced echelon parameterization."""
    a = to_fraction_rows(rows)
    if not a:
        raise ValueError("nullspace of empty matrix is ambiguous")
    m, n = len(a), len(a[0])
    pivots: list[int] = []
    row = 0
    for col in range(n):
        piv = next((r for r in range(row, m) if a[r][col] != 0), None)
        if piv is None:
            continue
        a[row], a[piv] = a[piv], a[row]
        pv = a[row][col]
        a[row] = [x / pv for x in a[row]]
        for r in range(m):
            if r != row and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[row])]
        pivots.append(col)
        row += 1
        if row == m:
            break
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * n
        v[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -a[r][fc]
        basis.append(tuple(v))
    return basis


def primitive_vector(v: Sequence) -> tuple[int, ...]:
    """Scale v by a positive rational to a primitive integer vector."""
    fr = [Fraction(x) for x in v]
    if all(x == 0 for x in fr):
        raise ValueError("zero vector has no primitive form")
    den = 1
    for x in fr:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in fr]
    g = 0
    for x in ints:
        g = gcd(g, abs(x))
    return tuple(x // g for x in ints)


def echelon_basis(rows: Sequence[Sequence]) -> tuple[tuple[int, ...], ...]:
    """Canonical primitive integer basis of the row span (sorted echelon)."""
    a = to_fraction_rows(rows)
    a = [r for r in a if any(x != 0 for x in r)]
    if not a:
        return ()
    m, n = len(a), len(a[0])
    row = 0
    for col in range(n):
        piv = next((r for r in range(row, m) if a[r][col] != 0), None)
        if piv is None:
            continue
        a[row], a[piv] = a[piv], a[row]
        pv = a[row][col]
        a[row] = [x / pv for x in a[row]]
        for r in range(m):
            if r != row and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[row])]
        row += 1
        if row == m:
            break
    out = [primitive_vector(r) for r in a[:row]]
    return tuple(out)


def smith_normal_form(mat: Sequence[Sequence[int]]):
    """Integer Smith normal form.

    Returns (U, D, V) with U @ mat @ V = D, U and V unimodular, D
    diagonal with nonnegative d_i and d_i | d_{i+1}.  Elementary
    row/column operations only; fine for the small matrices here.
    """
    a = [[int(x) for x in row] for row in mat]
    m = len(a)
    n = len(a[0]) if m else 0
    u = [[1 if i == j else 0 for j in range(m)] for i in range(m)]
    v = [[1 if i == j else 0 for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(src, dst, c):
        a[dst] = [x + c * y for x, y in zip(a[dst], a[src])]
        u[dst] = [x + c * y for x, y in zip(u[dst], u[src])]

    def add_col(src, dst, c):
        for row in a:
            row[dst] += c * row[src]
        for row in v:
            row[dst] += c * row[src]

    def diagonalize():
        t = 0
        while t < min(m, n):
            best = None
            for i in range(t, m):
                for j in range(t, n):
                    if a[i][j] != 0 and (
                            best is None
                            or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                break
            swap_rows(t, best[0])
            swap_cols(t, best[1])
            dirty = True
            while dirty:
                dirty = False
                for i in range(m):
                    if i != t and a[i][t] != 0:
                        add_row(t, i, -(a[i][t] // a[t][t]))
                        if a[i][t] != 0:
                            swap_rows(t, i)
                            dirty = True
                for j in range(n):
                    if j != t and a[t][j] != 0:
                        add_col(t, j, -(a[t][j] // a[t][t]))
                        if a[t][j] != 0:
                            swap_cols(t, j)
                            dirty = True
            if a[t][t] < 0:
                a[t] = [-x for x in a[t]]
                u[t] = [-x for x in u[t]]
            t += 1

    diagonalize()
    while True:
        bad = next((i for i in range(min(m, n) - 1)
                    if a[i][i] != 0 and a[i + 1][i + 1] % a[i][i] != 0), None)
        if bad is None:
            break
        add_col(bad + 1, bad, 1)  # smear d_{i+1} into column i, re-reduce
        diagonalize()
    return u, a, v
