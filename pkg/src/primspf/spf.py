"""Synchronizing probability function of a matrix set and its variants.

Three series are computed over a horizon ``t = 0, 1, ...``:

``K``
    value of the game over all products of length at most t (LP),
``Kbar``
    the same game with the row player restricted to pure strategies,
    ``min_i max_j H[i, j] / n`` (closed form, no LP),
``Keq``
    the LP value over products of length exactly t.

The module also carries the stagnation analysis, the optimal-set probes
used to check the containment and stagnation-length results, the subset
multigraph, and the exact payoff of a pair of mixed strategies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .automata import aut_of
from .boolmat import BinaryVector, MatrixSet, apply_row, row_sum_vector
from .errors import CapExceededError
from .lp import LpSolution, is_optimal_policy, solve_primal
from .semigroup import (
    HtMatrix,
    ProductLayer,
    build_ht,
    default_layer_cap,
    expand,
    initial_layer,
    prune_ht_columns,
    prune_ht_rows,
)

__all__ = [
    "MODES",
    "SpfSeries",
    "StagnationReport",
    "SubsetMultigraph",
    "OptimalBasisSet",
    "BoundCheck",
    "solve_layer",
    "kbar_of",
    "spf_k",
    "spf_kbar",
    "spf_keq",
    "spf_series",
    "stagnations",
    "optimal_basis_set",
    "check_stagnation_theorems",
    "check_pt_containment",
    "build_subset_multigraph",
    "game_value",
    "layer_at",
]

MODES = ("K", "Kbar", "Keq")
DEFAULT_T_LIMIT = 1000


@dataclass(frozen=True)
class SpfSeries:
    """Values of one SPF variant for t = 0 .. len(values) - 1.

    ``witnesses[t]`` is an optimal row-player policy (modes K and Keq) or
    the set of optimal basis indices (mode Kbar).  ``truncated`` is set
    when the computation stopped on a cap before the series settled.
    """

    mode: str
    n: int
    values: tuple[Fraction, ...]
    witnesses: tuple = ()
    sizes: tuple[int, ...] = ()
    truncated: bool = False
    reason: str = ""
    pruning: bool = True

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, t: int) -> Fraction:
        return self.values[t]

    def items(self) -> list[tuple[int, Fraction]]:
        return list(enumerate(self.values))

    @property
    def t_max(self) -> int:
        return len(self.values) - 1

    def first_one(self) -> Optional[int]:
        """Smallest t with value 1, if reached within the series."""
        return next((t for t, v in enumerate(self.values) if v == 1), None)

    def value_at(self, t: int) -> Optional[Fraction]:
        """Value at t, extended by 1 past the end once the series hit 1."""
        if t < len(self.values):
            return self.values[t]
        if self.values and self.values[-1] == 1 and self.mode != "Keq":
            return Fraction(1)
        return None


def _prepared_ht(layer: ProductLayer, prune: bool, rows: bool = True) -> HtMatrix:
    H = build_ht(layer)
    if prune:
        H = prune_ht_columns(H)
        if rows:
            H = prune_ht_rows(H)
    return H


def solve_layer(layer: ProductLayer, *, prune: bool = True) -> LpSolution:
    """Solve the min-k program on the products of ``layer``.

    The returned ``q_opt`` is indexed by the layer's products (zeros for
    columns removed by pruning) and ``tight_columns`` likewise.
    """
    H = _prepared_ht(layer, prune)
    sol = solve_primal(H)
    q = [Fraction(0)] * len(layer.products)
    for j, src in enumerate(H.source):
        q[src] += sol.q_opt[j]
    k = sol.k
    tight = tuple(i for i, P in enumerate(layer.products)
                  if sum(pi * c for pi, c in zip(sol.p_opt, row_sum_vector(P))) == k)
    return LpSolution(value=sol.value, p_opt=sol.p_opt, q_opt=tuple(q), tight_columns=tight)


@dataclass(frozen=True)
class OptimalBasisSet:
    """Optimal pure strategies of the restricted game at one horizon."""

    value: Fraction
    indices: frozenset[int]
    H: Optional[HtMatrix] = field(default=None, repr=False, compare=False)

    def __len__(self) -> int:
        return len(self.indices)

    def __contains__(self, i: int) -> bool:
        return i in self.indices

    def contains_policy(self, p: Sequence, value: Fraction) -> bool:
        """Membership of a mixed policy in the optimal face of the full game."""
        if self.H is None:
            raise ValueError("no H attached for policy membership")
        return is_optimal_policy(self.H, p, value)


def optimal_basis_set(H: HtMatrix) -> OptimalBasisSet:
    """Argmin over rows of the row maximum; H must carry all rows."""
    maxima = [max(c[i] for c in H.columns) for i in range(H.num_rows)]
    best = min(maxima)
    idx = frozenset(H.row_ids[i] for i, v in enumerate(maxima) if v == best)
    return OptimalBasisSet(Fraction(best, H.n), idx, H)


def kbar_of(layer: ProductLayer) -> Fraction:
    H = build_ht(layer)
    return Fraction(min(max(c[i] for c in H.columns) for i in range(H.n)), H.n)


def _series(M: MatrixSet, mode: str, t_max: Optional[int], prune: bool,
            cap: Optional[int], t_limit: int) -> SpfSeries:
    if mode not in MODES:
        raise ValueError(f"unknown SPF mode {mode!r}")
    if not M.is_nz():
        raise ValueError("the SPF is defined for sets of NZ matrices")
    cap = default_layer_cap() if cap is None else cap
    exact = mode == "Keq"
    layer = initial_layer(M.n, exact=exact)
    values: list[Fraction] = []
    witnesses: list = []
    sizes: list[int] = []
    truncated, reason = False, ""
    stop = t_max if t_max is not None else t_limit
    while True:
        if mode == "Kbar":
            basis = optimal_basis_set(_prepared_ht(layer, prune, rows=False))
            values.append(basis.value)
            witnesses.append(basis.indices)
        else:
            sol = solve_layer(layer, prune=prune)
            values.append(sol.value)
            witnesses.append(sol.p_opt)
        sizes.append(len(layer))
        t = layer.t
        if t_max is None:
            if values[-1] == 1:
                break
            if not exact and not layer.frontier:
                reason = "semigroup closed"
                break
        if t >= stop:
            if t_max is None:
                truncated, reason = True, f"t limit {t_limit}"
            break
        try:
            layer = expand(M, layer, prune=prune, cap=cap)
        except CapExceededError as exc:
            truncated, reason = True, str(exc)
            break
    return SpfSeries(mode=mode, n=M.n, values=tuple(values), witnesses=tuple(witnesses),
                     sizes=tuple(sizes), truncated=truncated, reason=reason, pruning=prune)


def spf_k(M: MatrixSet, t_max: Optional[int] = None, *, prune: bool = True,
          cap: Optional[int] = None, t_limit: int = DEFAULT_T_LIMIT) -> SpfSeries:
    """K(t) for t = 0..t_max; without ``t_max`` it runs until K = 1
    (which happens first at t = exp(M)) or the semigroup closes."""
    return _series(M, "K", t_max, prune, cap, t_limit)


def spf_kbar(M: MatrixSet, t_max: Optional[int] = None, *, prune: bool = True,
             cap: Optional[int] = None, t_limit: int = DEFAULT_T_LIMIT) -> SpfSeries:
    return _series(M, "Kbar", t_max, prune, cap, t_limit)


def spf_keq(M: MatrixSet, t_max: Optional[int] = None, *, prune: bool = True,
            cap: Optional[int] = None, t_limit: int = DEFAULT_T_LIMIT) -> SpfSeries:
    """Value over products of length exactly t.

    Without ``t_max`` this stops at the first t with value 1; exact-length
    layers need not be monotone, so pass ``t_max`` to look further.
    """
    return _series(M, "Keq", t_max, prune, cap, t_limit)


def spf_series(M: MatrixSet, mode: str, t_max: Optional[int] = None, **kw) -> SpfSeries:
    return {"K": spf_k, "Kbar": spf_kbar, "Keq": spf_keq}[mode](M, t_max, **kw)


def layer_at(M: MatrixSet, t: int, *, exact: bool = False, prune: bool = True,
             cap: Optional[int] = None) -> ProductLayer:
    layer = initial_layer(M.n, exact=exact)
    cap = default_layer_cap() if cap is None else cap
    while layer.t < t:
        layer = expand(M, layer, prune=prune, cap=cap)
    return layer


@dataclass(frozen=True)
class StagnationReport:
    """Maximal constant runs ``(t_bar, length)`` with length >= 1.

    ``l0`` is the length of the run starting at t = 0 (0 if the series
    moves immediately). A run that reaches the end of the series is
    reported with ``open_end`` so callers know it might continue.
    """

    intervals: tuple[tuple[int, int], ...]
    l0: int
    open_end: bool


def stagnations(series: SpfSeries | Sequence[Fraction]) -> StagnationReport:
    values = series.values if isinstance(series, SpfSeries) else tuple(series)
    if not values:
        raise ValueError("empty series")
    intervals = []
    start = 0
    for t in range(1, len(values) + 1):
        if t == len(values) or values[t] != values[start]:
            length = t - 1 - start
            if length > 0:
                intervals.append((start, length))
            start = t
    l0 = intervals[0][1] if intervals and intervals[0][0] == 0 else 0
    open_end = bool(intervals) and sum(intervals[-1]) == len(values) - 1
    return StagnationReport(tuple(intervals), l0, open_end)


@dataclass(frozen=True)
class BoundCheck:
    t: int
    rule: str
    horizon: int
    before: Fraction
    after: Optional[Fraction]
    holds: bool


def check_stagnation_theorems(M: MatrixSet, series: Optional[SpfSeries] = None,
                              *, primitive: Optional[bool] = None,
                              prune: bool = True) -> list[BoundCheck]:
    """Evaluate the stagnation-length bounds of the restricted SPF.

    For every t with Kbar(t) = Kbar(t+1) = k/n < 1: if fewer than n pure
    strategies are optimal at t, Kbar must have grown by t + n - 1;
    otherwise by t + ceil(n^2 (k-1) / 2k) + n.  Also Kbar(n) > Kbar(0).
    Returns one :class:`BoundCheck` per evaluated bound; an empty list
    for a non-primitive set, where the bounds do not apply.
    """
    n = M.n
    if series is None:
        series = spf_kbar(M, prune=prune)
    if series.mode != "Kbar":
        raise ValueError("stagnation bounds are stated for the Kbar series")
    if primitive is None:
        primitive = series.first_one() is not None
    if not primitive:
        return []
    checks = []
    vals = series.values
    for t in range(len(vals) - 1):
        if vals[t] >= 1 or vals[t] != vals[t + 1]:
            continue
        k = vals[t] * n
        if len(series.witnesses[t]) < n:
            rule, horizon = "proper-subset", t + n - 1
        else:
            rule = "full-basis"
            horizon = t + math.ceil(Fraction(n * n) * (k - 1) / (2 * k)) + n
        after = series.value_at(horizon)
        checks.append(BoundCheck(t, rule, horizon, vals[t], after,
                                 after is not None and after > vals[t]))
    after = series.value_at(n)
    checks.append(BoundCheck(0, "Kbar(n)>1/n", n, vals[0], after,
                             after is not None and after > vals[0]))
    return checks


def check_pt_containment(M: MatrixSet, t: int, *, prune: bool = True,
                         cap: Optional[int] = None) -> bool:
    """Probe the optimal-set containment under a stagnation K(t) = K(t+1).

    Takes the optimal vertex p of the horizon-(t+1) program and checks that
    p, and R^T p for every letter R of Aut(M), are optimal at horizon t.
    """
    layer_t = layer_at(M, t, prune=prune, cap=cap)
    layer_t1 = expand(M, layer_t, prune=prune, cap=cap)
    H_t = _prepared_ht(layer_t, prune, rows=False)
    sol_t = solve_primal(H_t)
    sol_t1 = solve_layer(layer_t1, prune=prune)
    if sol_t.value != sol_t1.value:
        raise ValueError(f"no stagnation at t={t}: {sol_t.value} != {sol_t1.value}")
    p = sol_t1.p_opt
    if not is_optimal_policy(H_t, p, sol_t.value):
        return False
    for R in aut_of(M).letters:
        image = [Fraction(0)] * M.n
        for i, r in enumerate(R.rows):
            image[r.bit_length() - 1] += p[i]
        if not is_optimal_policy(H_t, image, sol_t.value):
            return False
    return True


@dataclass(frozen=True)
class SubsetMultigraph:
    """Vertices are nonzero subsets (bitmasks); ``edges[(v, i)]`` is the
    unique successor of ``v`` under the i-th matrix."""

    n: int
    m: int
    edges: dict

    @property
    def vertices(self) -> range:
        return range(1, 1 << self.n)

    def successor(self, v: BinaryVector, i: int) -> BinaryVector:
        return BinaryVector(self.n, self.edges[(v.bits, i)])

    def out_degree(self, v: int) -> int:
        return sum(1 for i in range(self.m) if (v, i) in self.edges)


def build_subset_multigraph(M: MatrixSet, cap: int = 20) -> SubsetMultigraph:
    if M.n > cap:
        raise CapExceededError(f"subset multigraph on n={M.n} exceeds cap {cap}")
    edges = {}
    for v in range(1, 1 << M.n):
        vec = BinaryVector(M.n, v)
        for i, A in enumerate(M.matrices):
            edges[(v, i)] = apply_row(vec, A).bits
    return SubsetMultigraph(M.n, M.m, edges)


def game_value(p: Sequence, q: Sequence, layer: ProductLayer | Iterable) -> Fraction:
    """Exact payoff ``sum_j q_j p^T A_j e / n`` of a pair of mixed strategies."""
    products = layer.products if isinstance(layer, ProductLayer) else tuple(layer)
    if len(q) != len(products):
        raise ValueError(f"q has length {len(q)}, layer has {len(products)} products")
    n = products[0].n
    if len(p) != n:
        raise ValueError(f"p has length {len(p)}, expected {n}")
    total = Fraction(0)
    for qj, A in zip(q, products):
        if qj:
            total += Fraction(qj) * sum(Fraction(pi) * c for pi, c in zip(p, row_sum_vector(A)))
    return total / n
