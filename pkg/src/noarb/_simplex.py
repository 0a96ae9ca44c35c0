"""Dense two-phase simplex for the tiny LPs behind the market dichotomy.

Self-contained on purpose: the instances are a handful of rows and
columns, where a deterministic, dependency-free solver beats any
large-scale LP machinery. Bland's smallest-index rule governs both the
entering and the leaving choice, so the algorithm cannot cycle and the
returned vertex is a pure function of the input data.

Problems are stated in equality standard form

    minimize c.x  subject to  A x = b,  x >= 0,

which is what the callers in :mod:`noarb.gordan` construct directly.
"""

from dataclasses import dataclass

import numpy as np

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
ITERATION_LIMIT = "iteration_limit"

_PIVOT_TOL = 1e-9
_FEAS_TOL = 1e-9


@dataclass(frozen=True)
class LpResult:
    status: str
    x: np.ndarray | None
    objective: float
    iterations: int


def _pivot(tableau, row, col):
    piv = tableau[row, col]
    tableau[row, :] /= piv
    for r in range(tableau.shape[0]):
        if r != row:
            factor = tableau[r, col]
            if factor != 0.0:
                tableau[r, :] -= factor * tableau[row, :]


def _run_simplex(tableau, basis, max_iter):
    """Iterate Bland pivots on a canonical tableau until optimal.

    Last row holds reduced costs (min convention), last column the rhs.
    Returns (status, iterations).
    """
    m = tableau.shape[0] - 1
    ncols = tableau.shape[1] - 1
    iterations = 0
    while True:
        enter = -1
        for j in range(ncols):
            if tableau[m, j] < -_PIVOT_TOL:
                enter = j
                break
        if enter < 0:
            return OPTIMAL, iterations
        leave = -1
        best = np.inf
        for i in range(m):
            a = tableau[i, enter]
            if a > _PIVOT_TOL:
                ratio = tableau[i, -1] / a
                if ratio < best - 1e-12:
                    best = ratio
                    leave = i
                elif ratio <= best + 1e-12 and leave >= 0 and basis[i] < basis[leave]:
                    leave = i
        if leave < 0:
            return UNBOUNDED, iterations
        _pivot(tableau, leave, enter)
        basis[leave] = enter
        iterations += 1
        if iterations >= max_iter:
            return ITERATION_LIMIT, iterations


def solve_lp(c, a_eq, b_eq, max_iter=None):
    """Two-phase simplex for min c.x s.t. a_eq x = b_eq, x >= 0.

    ``max_iter`` caps the pivot count per phase and defaults to
    10 * (rows + columns) of the tableau; hitting it reports
    ITERATION_LIMIT rather than looping.
    """
    a = np.asarray(a_eq, dtype=float).copy()
    b = np.asarray(b_eq, dtype=float).copy()
    cost = np.asarray(c, dtype=float)
    m, n = a.shape
    if max_iter is None:
        max_iter = 10 * (m + n + m)  # rows + structural cols + artificials

    for i in range(m):
        if b[i] < 0.0:
            a[i, :] = -a[i, :]
            b[i] = -b[i]

    # Phase 1: artificial basis, minimize the artificial total.
    tab = np.zeros((m + 1, n + m + 1))
    tab[:m, :n] = a
    tab[:m, n:n + m] = np.eye(m)
    tab[:m, -1] = b
    basis = list(range(n, n + m))
    tab[m, :] = -tab[:m, :].sum(axis=0)
    tab[m, n:n + m] = 0.0

    status, it1 = _run_simplex(tab, basis, max_iter)
    if status == ITERATION_LIMIT:
        return LpResult(ITERATION_LIMIT, None, np.nan, it1)
    phase1 = -tab[m, -1]
    if phase1 > _FEAS_TOL:
        return LpResult(INFEASIBLE, None, phase1, it1)

    # Drive leftover artificials out of the basis; rows that cannot pivot
    # on a structural column are redundant and dropped.
    keep = []
    for i in range(m):
        if basis[i] >= n:
            piv_col = -1
            for j in range(n):
                if abs(tab[i, j]) > _PIVOT_TOL:
                    piv_col = j
                    break
            if piv_col < 0:
                continue
            _pivot(tab, i, piv_col)
            basis[i] = piv_col
        keep.append(i)

    rows = len(keep)
    tab2 = np.zeros((rows + 1, n + 1))
    tab2[:rows, :n] = tab[np.asarray(keep, dtype=int), :n]
    tab2[:rows, -1] = tab[np.asarray(keep, dtype=int), -1]
    basis2 = [basis[i] for i in keep]

    # Phase 2 reduced costs relative to the feasible basis.
    tab2[rows, :n] = cost
    tab2[rows, -1] = 0.0
    for i in range(rows):
        cb = cost[basis2[i]]
        if cb != 0.0:
            tab2[rows, :] -= cb * tab2[i, :]

    status, it2 = _run_simplex(tab2, basis2, max_iter)
    if status == ITERATION_LIMIT:
        return LpResult(ITERATION_LIMIT, None, np.nan, it1 + it2)
    if status == UNBOUNDED:
        return LpResult(UNBOUNDED, None, -np.inf, it1 + it2)

    x = np.zeros(n)
    for i in range(rows):
        x[basis2[i]] = tab2[i, -1]
    return LpResult(OPTIMAL, x, float(cost @ x), it1 + it2)
