"""Exact dense linear algebra over the rationals (small matrices)."""
from __future__ import annotations

from gmpy2 import mpq

ZERO = mpq(0)


def echelon(rows: list[list], ncols: int | None = None):
    """Reduced row echelon form with left-most pivots in column order.

    Returns ``(rref_rows, pivot_columns)``.
    """
    m = [[mpq(v) for v in row] for row in rows]
    if not m:
        return [], []
    ncols = len(m[0]) if ncols is None else ncols
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        lead = m[r][c]
        if lead != 1:
            m[r] = [v / lead for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows: list[list]) -> int:
    return len(echelon(rows)[1]) if rows else 0


def columns_to_rows(cols: list[list], nrows: int) -> list[list]:
    return [[col[i] for col in cols] for i in range(nrows)]


def nullspace(rows: list[list], ncols: int) -> list[list]:
    """Basis of ``{v : A v = 0}``, one vector per free column."""
    if not rows:
        return [[mpq(int(i == j)) for i in range(ncols)] for j in range(ncols)]
    red, pivots = echelon(rows, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    out = []
    for f in free:
        v = [ZERO] * ncols
        v[f] = mpq(1)
        for row, pc in zip(red, pivots):
            v[pc] = -row[f]
        out.append(v)
    return out


def independent_columns(cols: list[list], nrows: int) -> list[int]:
    """Indices of the left-most maximal independent subset of ``cols``."""
    if not cols:
        return []
    return echelon(columns_to_rows(cols, nrows), len(cols))[1]


def solve(cols: list[list], target: list, nrows: int):
    """Solve ``sum x_c col_c = target`` exactly.

    Free columns get zero coordinates.  Returns ``None`` when inconsistent.
    """
    ncols = len(cols)
    aug = [[col[i] for col in cols] + [target[i]] for i in range(nrows)]
    red, pivots = echelon(aug, ncols + 1)
    if ncols in pivots:
        return None
    x = [ZERO] * ncols
    for row, pc in zip(red, pivots):
        x[pc] = row[ncols]
    return x
