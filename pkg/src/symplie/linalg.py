"""Exact row reduction over the rationals.

Everything here works on lists of lists of ``int``/``Fraction``.  Pivots are
taken as the first nonzero entry in column order, so results are
deterministic for a given column ordering.  A float ``tol`` is honoured only
by :func:`rank`, for the few numerical callers.
"""

from __future__ import annotations

from fractions import Fraction
from typing import List, Sequence, Tuple


def _frac(x):
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    raise TypeError(f"exact linear algebra needs int/Fraction entries, got {type(x).__name__}")


def rref(rows: Sequence[Sequence]) -> Tuple[List[List[Fraction]], List[int]]:
    """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
    m = [[_frac(x) for x in row] for row in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots: List[int] = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def nullspace(matrix: Sequence[Sequence], ncols: int | None = None) -> List[List[Fraction]]:
    """Basis of {x : matrix x = 0}, one vector per free column, in RREF of the basis."""
    if ncols is None:
        ncols = len(matrix[0]) if matrix else 0
    red, piv = rref(matrix) if matrix else ([], [])
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, p in zip(red, piv):
            v[p] = -row[f]
        basis.append(v)
    out, _ = rref(basis) if basis else ([], [])
    return out


def column_space(matrix: Sequence[Sequence]) -> List[List[Fraction]]:
    """Basis of the image, returned as RREF rows of the transposed matrix."""
    if not matrix:
        return []
    cols = [list(col) for col in zip(*matrix)]
    out, _ = rref(cols)
    return out


def reduce_against(vec: Sequence, basis_rows: Sequence[Sequence], pivots: Sequence[int]) -> List[Fraction]:
    """Normal form of ``vec`` modulo the span of RREF ``basis_rows``."""
    v = [_frac(x) for x in vec]
    for row, p in zip(basis_rows, pivots):
        if v[p] != 0:
            f = v[p]
            v = [a - f * b for a, b in zip(v, row)]
    return v


def in_span(vec: Sequence, basis_rows: Sequence[Sequence], pivots: Sequence[int]) -> bool:
    return all(x == 0 for x in reduce_against(vec, basis_rows, pivots))


def mat_vec(matrix: Sequence[Sequence], vec: Sequence) -> list:
    return [sum(a * b for a, b in zip(row, vec)) for row in matrix]


def mat_mul(a: Sequence[Sequence], b: Sequence[Sequence]) -> List[list]:
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def solve(matrix: Sequence[Sequence], rhs: Sequence) -> List[Fraction] | None:
    """One exact solution of matrix x = rhs (free variables zero), or None."""
    aug = [list(row) + [b] for row, b in zip(matrix, rhs)]
    red, piv = rref(aug)
    ncols = len(matrix[0])
    if ncols in piv:
        return None
    x = [Fraction(0)] * ncols
    for row, p in zip(red, piv):
        x[p] = row[-1]
    return x


def inverse(matrix: Sequence[Sequence]) -> List[List[Fraction]]:
    n = len(matrix)
    aug = [list(row) + [1 if i == j else 0 for j in range(n)] for i, row in enumerate(matrix)]
    red, piv = rref(aug)
    if piv[:n] != list(range(n)):
        raise ZeroDivisionError("matrix is singular")
    return [row[n:] for row in red]


def rank(rows: Sequence[Sequence], tol: float = 1e-12) -> int:
    if not rows:
        return 0
    if all(isinstance(x, (int, Fraction)) for row in rows for x in row):
        return len(rref(rows)[1])
    import numpy as np

    return int(np.linalg.matrix_rank(np.array(rows, dtype=float), tol=tol))
