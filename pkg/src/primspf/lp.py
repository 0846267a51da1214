"""Exact rational solvers for the two game programs on a row-sum matrix H.

Both programs have optimum k/n where k is the value of the matrix game
with payoff H (rows: starting states, columns: products):

* ``solve_primal``: min k  s.t.  p^T H <= k e^T,  p^T e = 1,  p >= 0
* ``solve_dual``:   max k  s.t.  H q >= k e,      e^T q = 1,  q >= 0

They are solved through two different standard-form LPs so that equality
of their optima is a real check rather than a tautology.  All arithmetic
is in :class:`fractions.Fraction`; pivoting follows Bland's rule, which
both prevents cycling and makes the returned vertex reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .semigroup import HtMatrix

try:  # GMP rationals are an order of magnitude faster than Fraction
    from gmpy2 import mpq as _Q
except ImportError:  # pragma: no cover
    _Q = Fraction

__all__ = [
    "LpSolution",
    "MalformedMatrixError",
    "simplex_max",
    "solve_primal",
    "solve_dual",
    "reduce_columns",
    "is_optimal_policy",
    "nullspace_vector",
]


class MalformedMatrixError(ValueError):
    """H has no columns or a non-positive entry."""


@dataclass(frozen=True)
class LpSolution:
    value: Fraction
    p_opt: tuple[Fraction, ...]
    q_opt: tuple[Fraction, ...]
    tight_columns: tuple[int, ...]

    @property
    def k(self) -> Fraction:
        return self.value * len(self.p_opt)


def simplex_max(A: Sequence[Sequence], b: Sequence, c: Sequence):
    """Maximise ``c x`` subject to ``A x <= b``, ``x >= 0``, with ``b >= 0``.

    Dictionary-form simplex started from the slack basis.  Returns
    ``(value, x, y)`` where ``y`` are the optimal dual prices of the rows.
    Raises ``ArithmeticError`` if the program is unbounded.
    """
    m, N = len(A), len(c)
    D = [[_q(a) for a in row] for row in A]
    rhs = [_q(v) for v in b]
    obj = [_q(v) for v in c]
    if any(v < 0 for v in rhs):
        raise ValueError("simplex_max needs b >= 0 (slack basis feasible)")
    z = _Q(0)
    nonbasic = list(range(N))
    basic = list(range(N, N + m))

    while True:
        enter = -1
        for j in range(N):
            if obj[j] > 0 and (enter < 0 or nonbasic[j] < nonbasic[enter]):
                enter = j
        if enter < 0:
            break
        leave, best = -1, None
        for r in range(m):
            a = D[r][enter]
            if a > 0:
                ratio = rhs[r] / a
                if best is None or ratio < best or (ratio == best and basic[r] < basic[leave]):
                    leave, best = r, ratio
        if leave < 0:
            raise ArithmeticError("LP is unbounded")

        prow = D[leave]
        piv = prow[enter]
        inv = 1 / piv
        prow = [a * inv for a in prow]
        prow[enter] = inv
        prhs = rhs[leave] * inv
        D[leave] = prow
        rhs[leave] = prhs
        for r in range(m):
            if r == leave:
                continue
            row = D[r]
            f = row[enter]
            if not f:
                continue
            for j in range(N):
                if prow[j]:
                    row[j] -= f * prow[j]
            row[enter] = -f * inv
            rhs[r] -= f * prhs
        f = obj[enter]
        for j in range(N):
            if prow[j]:
                obj[j] -= f * prow[j]
        obj[enter] = -f * inv
        z += f * prhs
        basic[leave], nonbasic[enter] = nonbasic[enter], basic[leave]

    x = [Fraction(0)] * N
    for r, var in enumerate(basic):
        if var < N:
            x[var] = _frac(rhs[r])
    y = [Fraction(0)] * m
    for j, var in enumerate(nonbasic):
        if var >= N:
            y[var - N] = _frac(-obj[j])
    return _frac(z), x, y


def _q(v):
    if isinstance(v, Fraction):
        return _Q(v.numerator, v.denominator)
    return _Q(v)


def _frac(v) -> Fraction:
    return Fraction(int(v.numerator), int(v.denominator))


def _check(H: HtMatrix) -> None:
    if H.h < 1:
        raise MalformedMatrixError("H has no columns")
    for c in H.columns:
        for v in c:
            if v < 1:
                raise MalformedMatrixError(f"H entries must be >= 1, found {v}")


def _lift(H: HtMatrix, w: Sequence[Fraction]) -> tuple[Fraction, ...]:
    p = [Fraction(0)] * H.n
    for i, r in enumerate(H.row_ids):
        p[r] = w[i]
    return tuple(p)


def _tight(H: HtMatrix, p: Sequence[Fraction], k: Fraction) -> tuple[int, ...]:
    return tuple(j for j, c in enumerate(H.columns)
                 if sum(p[r] * c[i] for i, r in enumerate(H.row_ids)) == k)


def solve_primal(H: HtMatrix) -> LpSolution:
    """Player B's program. Substituting ``x = p / k`` turns it into
    ``max e^T x  s.t.  H^T x <= e`` whose optimum is ``1 / k``."""
    _check(H)
    A = H.columns  # one constraint per column of H
    s, x, y = simplex_max(A, [1] * H.h, [1] * H.num_rows)
    k = 1 / s
    p = _lift(H, [xi * k for xi in x])
    q = tuple(yj * k for yj in y)
    return LpSolution(value=k / H.n, p_opt=p, q_opt=q, tight_columns=_tight(H, p, k))


def solve_dual(H: HtMatrix) -> LpSolution:
    """Player A's program, solved directly over variables ``(k, q)`` as
    ``max k  s.t.  k e - H q <= 0,  e^T q <= 1``."""
    _check(H)
    rows = H.rows()
    A = [[1] + [-v for v in row] for row in rows]
    A.append([0] + [1] * H.h)
    b = [0] * len(rows) + [1]
    k, x, y = simplex_max(A, b, [1] + [0] * H.h)
    q = x[1:]
    total = sum(q)
    q = tuple(v / total for v in q)
    w = y[:-1]
    wsum = sum(w)
    p = _lift(H, [v / wsum for v in w])
    return LpSolution(value=k / H.n, p_opt=p, q_opt=q, tight_columns=_tight(H, p, k))


def is_optimal_policy(H: HtMatrix, p: Sequence, value: Fraction) -> bool:
    """Membership test for the optimal face of the min-k program.

    ``p`` must be stochastic, and its worst column payoff must equal
    ``n * value``.  H must carry all ``n`` rows.
    """
    if tuple(H.row_ids) != tuple(range(H.n)):
        raise ValueError("membership needs an H without row pruning")
    if len(p) != H.n:
        return False
    p = [Fraction(v) for v in p]
    if any(v < 0 for v in p) or sum(p) != 1:
        return False
    worst = max(sum(pi * ci for pi, ci in zip(p, c)) for c in H.columns)
    return worst == value * H.n


def nullspace_vector(columns: Sequence[Sequence]) -> Optional[list[Fraction]]:
    """A nonzero ``x`` with ``sum_j x_j * columns[j] = 0``, or None if the
    columns are independent."""
    r = len(columns)
    if r == 0:
        return None
    rows = len(columns[0])
    # augmented row-major copy: rows x r
    M = [[Fraction(columns[j][i]) for j in range(r)] for i in range(rows)]
    pivots: list[int] = []
    prow = 0
    for col in range(r):
        sel = next((i for i in range(prow, rows) if M[i][col]), None)
        if sel is None:
            continue
        M[prow], M[sel] = M[sel], M[prow]
        inv = 1 / M[prow][col]
        M[prow] = [v * inv for v in M[prow]]
        for i in range(rows):
            if i != prow and M[i][col]:
                f = M[i][col]
                M[i] = [a - f * b for a, b in zip(M[i], M[prow])]
        pivots.append(col)
        prow += 1
        if prow == rows:
            break
    free = next((j for j in range(r) if j not in pivots), None)
    if free is None:
        return None
    x = [Fraction(0)] * r
    x[free] = Fraction(1)
    for i, pc in enumerate(pivots):
        x[pc] = -M[i][free]
    return x


def reduce_columns(H: HtMatrix, q_opt: Sequence) -> tuple[HtMatrix, tuple[Fraction, ...]]:
    """Shrink an optimal mixed strategy of the max-k program to at most
    ``rows(H)`` columns without losing optimality.

    Repeatedly takes a null vector ``x`` of the support columns with
    ``e^T x <= 0``, moves along it until a weight hits zero, drops that
    column and renormalises.
    """
    if len(q_opt) != H.h:
        raise ValueError("q_opt length does not match H")
    support = [j for j in range(H.h) if q_opt[j] > 0]
    q = {j: Fraction(q_opt[j]) for j in support}
    while len(support) > H.num_rows:
        x = nullspace_vector([H.columns[j] for j in support])
        if x is None:  # pragma: no cover - impossible with more columns than rows
            raise ArithmeticError("no null vector found")
        if sum(x) > 0:
            x = [-v for v in x]
        lam = min(q[j] / -xj for j, xj in zip(support, x) if xj < 0)
        for j, xj in zip(support, x):
            q[j] += lam * xj
        support = [j for j in support if q[j] > 0]
        total = sum(q[j] for j in support)
        q = {j: q[j] / total for j in support}
    return H.select_columns(support), tuple(q[j] for j in support)
