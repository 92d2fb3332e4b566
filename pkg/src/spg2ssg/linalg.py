"""Exact Gaussian elimination over the rationals."""

from __future__ import annotations

from fractions import Fraction

__all__ = ["SingularSystem", "solve"]


class SingularSystem(ArithmeticError):
    pass


def solve(matrix, rhs):
    """Solve ``matrix @ x == rhs`` exactly.

    ``matrix`` is a list of rows of Fractions; it is copied, not modified.
    Pivots are chosen by largest magnitude in the column.
    """
    n = len(matrix)
    a = [list(row) + [b] for row, b in zip(matrix, rhs)]
    for col in range(n):
        pivot = max(range(col, n), key=lambda r: abs(a[r][col]))
        if a[pivot][col] == 0:
            raise SingularSystem(f"no pivot in column {col}")
        a[col], a[pivot] = a[pivot], a[col]
        prow = a[col]
        inv = 1 / prow[col]
        for j in range(col, n + 1):
            prow[j] *= inv
        for r in range(n):
            if r == col:
                continue
            factor = a[r][col]
            if factor:
                row = a[r]
                for j in range(col, n + 1):
                    if prow[j]:
                        row[j] -= factor * prow[j]
    return [Fraction(row[n]) for row in a]
