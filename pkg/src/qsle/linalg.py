"""Gaussian elimination over an exact field (Fraction or QRat).

Rows are dicts column -> entry; zero entries are never stored.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable


def _reduce(rows: Iterable[dict]) -> list[tuple[int, dict]]:
    """Row echelon form as a list of (pivot column, normalized row)."""
    pivots: dict[int, dict] = {}
    order: list[int] = []
    for row in rows:
        row = {c: x for c, x in row.items() if x}
        while row:
            c = min(row)
            if c not in pivots:
                inv = 1 / row[c]
                row = {k: x * inv for k, x in row.items()}
                pivots[c] = row
                order.append(c)
                break
            prow = pivots[c]
            f = row[c]
            for k, x in prow.items():
                y = row.get(k, 0) - f * x
                if y:
                    row[k] = y
                else:
                    row.pop(k, None)
    return [(c, pivots[c]) for c in order]


def rank(rows: Iterable[dict]) -> int:
    return len(_reduce(rows))


def solve(columns: list[dict], target: dict):
    """Coefficients x with sum_i x_i * columns[i] = target, or None if inconsistent.

    columns and target map row keys to field elements. The columns must be
    linearly independent.
    """
    keys = sorted({k for col in columns for k in col} | set(target))
    kidx = {k: i for i, k in enumerate(keys)}
    n = len(columns)
    # augmented system, one equation per row key, variable i at column i, rhs at column n
    eqs: list[dict] = [dict() for _ in keys]
    for i, col in enumerate(columns):
        for k, x in col.items():
            if x:
                eqs[kidx[k]][i] = x
    for k, x in target.items():
        if x:
            eqs[kidx[k]][n] = x
    red = _reduce(eqs)
    # back substitution from the highest pivot
    sol: dict[int, object] = {}
    for c, row in sorted(red, key=lambda t: -t[0]):
        if c == n:
            return None
        acc = row.get(n, 0)
        for k, x in row.items():
            if k != c and k != n:
                acc = acc - x * sol.get(k, 0)
        sol[c] = acc
    if len([c for c, _ in red if c < n]) < n:
        raise ArithmeticError("columns are linearly dependent")
    return [sol[i] for i in range(n)]


def specialize_rows(rows: Iterable[dict], q) -> list[dict]:
    """Evaluate QRat rows at q = the given rational."""
    q = Fraction(q)
    out = []
    for row in rows:
        srow = {}
        for c, x in row.items():
            v = x.at(q)
            if v:
                srow[c] = v
        out.append(srow)
    return out
