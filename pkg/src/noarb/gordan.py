"""Market classification through the theorem-of-alternatives dichotomy.

A one-period market with n assets and m terminal states is summarized by
its excess-payoff matrix: entry (j, i) is what asset j pays in state i
beyond the forward value of its price. Exactly one of two objects then
exists: a nonnegative, normalized state measure annihilating every row
(no arbitrage), or a portfolio whose excess payoff is strictly positive
in every state (arbitrage). :func:`classify_market` produces whichever
one the data admits, never both; both searches run on the deterministic
two-phase simplex in :mod:`noarb._simplex`.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import _simplex
from .errors import Infeasible, MismatchedStates, NonFinite, NumericalFailure

FEASIBILITY_TOL = 1e-9
STRICT_POSITIVITY_TOL = 1e-9
RANK_TOL = 1e-9


@dataclass(frozen=True)
class AssetQuote:
    """A traded asset: price now, one payoff per terminal state."""

    name: str
    price0: float
    payoffs: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "payoffs", tuple(float(p) for p in self.payoffs))
        object.__setattr__(self, "price0", float(self.price0))


@dataclass(frozen=True)
class PayoffMatrix:
    """Excess payoffs, assets as rows and states as columns.

    entry (j, i) = payoff_j(state i) - e^rate * price0_j. The array is
    frozen after construction; rebuilding from the same quotes and rate
    reproduces it bit for bit.
    """

    entries: np.ndarray
    rate: float
    state_count: int
    asset_count: int


@dataclass(frozen=True)
class StateMeasure:
    """Nonnegative probabilities over states that price every asset."""

    probabilities: tuple[float, ...]
    unique: bool
    residual: float


@dataclass(frozen=True)
class ArbitrageCertificate:
    """Portfolio weights whose excess payoff is positive in every state."""

    weights: tuple[float, ...]
    worst_excess: float


@dataclass(frozen=True)
class NoArbitrage:
    measure: StateMeasure
    complete: bool


@dataclass(frozen=True)
class Arbitrage:
    certificate: ArbitrageCertificate


Classification = NoArbitrage | Arbitrage


def build_excess_matrix(quotes, rate):
    """Assemble the excess-payoff matrix from quotes and the riskless rate.

    Raises MismatchedStates when quotes disagree on the state count and
    NonFinite when any price, payoff, or the rate is not a finite number.
    """
    quotes = list(quotes)
    if not quotes:
        raise MismatchedStates("need at least one asset quote")
    if not math.isfinite(rate):
        raise NonFinite("rate is not finite")
    m = len(quotes[0].payoffs)
    if m < 2:
        raise MismatchedStates(f"need at least 2 states, got {m}")
    growth = math.exp(rate)
    entries = np.empty((len(quotes), m))
    for j, q in enumerate(quotes):
        if len(q.payoffs) != m:
            raise MismatchedStates(
                f"asset {q.name!r} has {len(q.payoffs)} payoffs, expected {m}")
        if not math.isfinite(q.price0):
            raise NonFinite(f"asset {q.name!r} has non-finite price")
        forward = growth * q.price0
        for i, payoff in enumerate(q.payoffs):
            if not math.isfinite(payoff):
                raise NonFinite(f"asset {q.name!r} has non-finite payoff")
            entries[j, i] = payoff - forward
    entries.setflags(write=False)
    return PayoffMatrix(entries=entries, rate=float(rate),
                        state_count=m, asset_count=len(quotes))


def solve_state_measure(matrix, state_order=None):
    """Find p >= 0 with sum p = 1 annihilating every excess row.

    Phase-1 simplex feasibility; raises Infeasible when no such measure
    exists (the dichotomy then guarantees an arbitrage portfolio).
    ``state_order`` permutes the LP columns, giving an independent
    starting basis for the uniqueness cross-check; the returned
    probabilities are always in original state order.
    """
    a = matrix.entries
    n, m = a.shape
    order = list(range(m)) if state_order is None else list(state_order)
    perm = a[:, order]
    a_eq = np.vstack([perm, np.ones((1, m))])
    b_eq = np.zeros(n + 1)
    b_eq[n] = 1.0
    res = _simplex.solve_lp(np.zeros(m), a_eq, b_eq)
    if res.status == _simplex.ITERATION_LIMIT:
        raise NumericalFailure("state-measure LP hit its iteration cap")
    if res.status != _simplex.OPTIMAL:
        raise Infeasible("no nonnegative normalized measure annihilates the matrix")
    p = np.zeros(m)
    for idx, col in enumerate(order):
        p[col] = res.x[idx]
    # Basic solutions are nonnegative up to pivot roundoff; clamp and
    # renormalize so the published invariants hold exactly.
    p[p < 0.0] = 0.0
    p /= p.sum()
    residual = float(np.max(np.abs(a @ p)))
    if residual > FEASIBILITY_TOL:
        raise Infeasible(f"measure residual {residual:.3e} above tolerance")
    return StateMeasure(probabilities=tuple(float(v) for v in p),
                        unique=check_completeness(matrix),
                        residual=residual)


def find_arbitrage(matrix):
    """Portfolio with strictly positive excess payoff in every state, or None.

    Solves max t s.t. (excess payoff of x in state i) >= t, |x|_inf <= 1
    with the two-phase simplex; a certificate is returned only when the
    optimum exceeds the strict-positivity tolerance after normalizing the
    weights to unit max magnitude. NumericalFailure propagates the LP
    iteration cap (degenerate cycling guard).
    """
    a = matrix.entries
    n, m = a.shape
    # Variables: x+ (n), x- (n), t+ (1), t- (1), state surplus (m),
    # box slacks for x+ and x- (2n). Equalities:
    #   sum_j a[j,i] (x+_j - x-_j) - (t+ - t-) - surplus_i = 0
    #   x+_j + slack = 1,  x-_j + slack = 1
    nvars = 2 * n + 2 + m + 2 * n
    rows = m + 2 * n
    a_eq = np.zeros((rows, nvars))
    b_eq = np.zeros(rows)
    for i in range(m):
        a_eq[i, :n] = a[:, i]
        a_eq[i, n:2 * n] = -a[:, i]
        a_eq[i, 2 * n] = -1.0
        a_eq[i, 2 * n + 1] = 1.0
        a_eq[i, 2 * n + 2 + i] = -1.0
    for j in range(n):
        a_eq[m + j, j] = 1.0
        a_eq[m + j, 2 * n + 2 + m + j] = 1.0
        b_eq[m + j] = 1.0
        a_eq[m + n + j, n + j] = 1.0
        a_eq[m + n + j, 2 * n + 2 + m + n + j] = 1.0
        b_eq[m + n + j] = 1.0
    cost = np.zeros(nvars)
    cost[2 * n] = -1.0  # maximize t = t+ - t-
    cost[2 * n + 1] = 1.0
    res = _simplex.solve_lp(cost, a_eq, b_eq)
    if res.status == _simplex.ITERATION_LIMIT:
        raise NumericalFailure("arbitrage LP hit its iteration cap")
    if res.status != _simplex.OPTIMAL:
        raise NumericalFailure(f"arbitrage LP ended {res.status}")
    t_opt = -res.objective
    if t_opt <= STRICT_POSITIVITY_TOL:
        return None
    x = res.x[:n] - res.x[n:2 * n]
    scale = float(np.max(np.abs(x)))
    x = x / scale
    worst = float(np.min(x @ a))
    if worst <= STRICT_POSITIVITY_TOL:
        return None
    return ArbitrageCertificate(weights=tuple(float(v) for v in x),
                                worst_excess=worst)


def check_completeness(matrix):
    """True when the excess matrix has rank m - 1 (unique state measure).

    Rank by Gaussian elimination with partial pivoting; a pivot counts
    while it stays above RANK_TOL relative to the largest pivot seen.
    """
    a = np.array(matrix.entries, dtype=float)
    n, m = a.shape
    rank = 0
    row = 0
    largest = 0.0
    for col in range(m):
        if row >= n:
            break
        piv = row + int(np.argmax(np.abs(a[row:, col])))
        size = abs(a[piv, col])
        largest = max(largest, size)
        if largest == 0.0 or size <= RANK_TOL * largest:
            continue
        if piv != row:
            a[[row, piv], :] = a[[piv, row], :]
        for r in range(row + 1, n):
            factor = a[r, col] / a[row, col]
            if factor != 0.0:
                a[r, col:] -= factor * a[row, col:]
        rank += 1
        row += 1
    return rank == m - 1


def classify_market(quotes, rate):
    """Resolve the dichotomy: a state measure or an arbitrage portfolio.

    Builds the excess matrix, tries the measure first, and on
    infeasibility extracts the certificate the theorem guarantees.
    NumericalFailure surfaces only when the LP solver gives out, or when
    neither object can be verified at tolerance (data within roundoff of
    the boundary between the two regimes).
    """
    matrix = build_excess_matrix(quotes, rate)
    try:
        measure = solve_state_measure(matrix)
    except Infeasible:
        certificate = find_arbitrage(matrix)
        if certificate is None:
            raise NumericalFailure(
                "no measure and no verifiable certificate; market sits on "
                "the tolerance boundary") from None
        return Arbitrage(certificate=certificate)
    return NoArbitrage(measure=measure, complete=measure.unique)
