"""Automaton side of primitivity: the associated DFA, synchronization and
reset thresholds, plus breadth-first exponent computation.

A DFA on states ``0..n-1`` is a tuple of letters, each a binary
row-stochastic matrix; internally a letter is also kept as its map
``state -> state``.  Unordered state pairs ``(i, j)`` with ``i <= j`` are
the vertices of the square graph.
"""

from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from itertools import product
from math import prod
from typing import Optional, Sequence

from .boolmat import BinaryMatrix, MatrixSet, is_binary_row_stochastic, is_nz, iter_bits
from .errors import CapExceededError, NotPrimitiveError, NotSynchronizingError
from .semigroup import LayerOverflowError, default_layer_cap

__all__ = [
    "Dfa",
    "SquareGraph",
    "ResetResult",
    "ExponentBounds",
    "ExponentWitness",
    "aut_of",
    "aut_letter_count",
    "square_graph",
    "is_synchronizing",
    "reset_threshold_exact",
    "eppstein",
    "sg_diameter",
    "sg_merge_depth",
    "exponent_bounds",
    "exponent_bfs",
    "is_primitive",
    "is_irreducible",
    "apply_word",
]

DEFAULT_AUT_CAP = 10**6
DEFAULT_STATE_CAP = 20


def _env_int(name: str, default: int) -> int:
    return int(os.environ.get(name, default))


@dataclass(frozen=True)
class Dfa:
    n: int
    letters: tuple[BinaryMatrix, ...]

    def __post_init__(self):
        for A in self.letters:
            if A.n != self.n:
                raise ValueError("letter of wrong dimension")
            if not is_binary_row_stochastic(A):
                raise ValueError("DFA letters must be binary row-stochastic")

    @classmethod
    def from_maps(cls, n: int, maps: Sequence[Sequence[int]]) -> "Dfa":
        return cls(n, tuple(BinaryMatrix.from_map(m) for m in maps))

    @cached_property
    def maps(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(r.bit_length() - 1 for r in A.rows) for A in self.letters)


def apply_word(dfa: Dfa, state: int, word: Sequence[int]) -> int:
    for a in word:
        state = dfa.maps[a][state]
    return state


def aut_letter_count(M: MatrixSet) -> int:
    """Upper bound on |Aut(M)| before deduplication: sum over M of the
    product of its row sums."""
    return sum(prod(r.bit_count() for r in A.rows) for A in M.matrices)


def aut_of(M: MatrixSet, cap: Optional[int] = None) -> Dfa:
    """All binary row-stochastic matrices dominated by some member of M."""
    if not M.is_nz():
        raise ValueError("Aut(M) is defined for NZ matrix sets")
    cap = _env_int("PRIMSPF_AUT_CAP", DEFAULT_AUT_CAP) if cap is None else cap
    count = aut_letter_count(M)
    if count > cap:
        raise CapExceededError(f"Aut(M) would have {count} letters, cap is {cap}")
    letters: list[BinaryMatrix] = []
    seen: set[BinaryMatrix] = set()
    for A in M.matrices:
        choices = [list(iter_bits(r)) for r in A.rows]
        for images in product(*choices):
            L = BinaryMatrix.from_map(images)
            if L not in seen:
                seen.add(L)
                letters.append(L)
    return Dfa(M.n, tuple(letters))


@dataclass(frozen=True)
class SquareGraph:
    n: int
    vertices: tuple[tuple[int, int], ...]
    # edges[(vertex, letter)] = vertex
    edges: dict

    def successors(self, v: tuple[int, int]) -> list[tuple[int, int]]:
        return [w for (u, _), w in self.edges.items() if u == v]


def _pair(i: int, j: int) -> tuple[int, int]:
    return (i, j) if i <= j else (j, i)


def square_graph(dfa: Dfa) -> SquareGraph:
    """Unordered pair graph: ``(i, j) -> (a(i), a(j))`` for each letter ``a``."""
    n = dfa.n
    verts = tuple((i, j) for i in range(n) for j in range(i, n))
    edges = {}
    for v in verts:
        for a, f in enumerate(dfa.maps):
            edges[(v, a)] = _pair(f[v[0]], f[v[1]])
    return SquareGraph(n, verts, edges)


def _merge_distances(dfa: Dfa) -> dict[tuple[int, int], int]:
    """Shortest word length from each pair to the diagonal (absent if none)."""
    n = dfa.n
    preds: dict[tuple[int, int], list[tuple[int, int]]] = {}
    for i in range(n):
        for j in range(i + 1, n):
            for f in dfa.maps:
                preds.setdefault(_pair(f[i], f[j]), []).append((i, j))
    dist = {(k, k): 0 for k in range(n)}
    queue = deque(dist)
    while queue:
        v = queue.popleft()
        for u in preds.get(v, ()):
            if u not in dist:
                dist[u] = dist[v] + 1
                queue.append(u)
    return dist


def is_synchronizing(dfa: Dfa) -> bool:
    """Every off-diagonal pair can reach the diagonal of the square graph."""
    if not dfa.letters:
        return dfa.n <= 1
    return len(_merge_distances(dfa)) == dfa.n * (dfa.n + 1) // 2


@dataclass(frozen=True)
class ResetResult:
    synchronizing: bool
    rt: Optional[int]
    witness_word: Optional[tuple[int, ...]]
    method: str


def _image_tables(dfa: Dfa) -> list[list[list[int]]]:
    # tables[a][chunk][byte] = image of the states (8*chunk + bits of byte)
    n = dfa.n
    chunks = (n + 7) // 8
    tables = []
    for f in dfa.maps:
        per = []
        for c in range(chunks):
            row = [0] * 256
            for b in range(1, 256):
                low = b & -b
                s = 8 * c + low.bit_length() - 1
                row[b] = row[b ^ low] | ((1 << f[s]) if s < n else 0)
            per.append(row)
        tables.append(per)
    return tables


def _subset_image(tables_a: list[list[int]], S: int) -> int:
    out = 0
    c = 0
    while S:
        out |= tables_a[c][S & 0xFF]
        S >>= 8
        c += 1
    return out


def reset_threshold_exact(dfa: Dfa, cap: Optional[int] = None) -> ResetResult:
    """Shortest reset word by breadth-first search over state subsets."""
    n = dfa.n
    cap = _env_int("PRIMSPF_STATE_CAP", DEFAULT_STATE_CAP) if cap is None else cap
    if n > cap:
        raise CapExceededError(f"subset search over {n} states exceeds cap {cap}")
    full = (1 << n) - 1
    if n <= 1:
        return ResetResult(True, 0, (), "exact")
    tables = _image_tables(dfa)
    parent: dict[int, tuple[int, int]] = {full: (-1, -1)}
    queue = deque([full])
    while queue:
        S = queue.popleft()
        for a, tab in enumerate(tables):
            T = _subset_image(tab, S)
            if T in parent:
                continue
            parent[T] = (S, a)
            if T & (T - 1) == 0:
                word = []
                while T != full:
                    T, a2 = parent[T]
                    word.append(a2)
                word.reverse()
                return ResetResult(True, len(word), tuple(word), "exact")
            queue.append(T)
    return ResetResult(False, None, None, "exact")


def eppstein(dfa: Dfa) -> ResetResult:
    """Greedy pair-merging heuristic.

    While more than one state is active, take the active pair with the
    shortest merging word (ties: smallest pair, then lexicographically
    smallest word) and apply that word to the active set.
    """
    n = dfa.n
    dist = _merge_distances(dfa)
    if len(dist) != n * (n + 1) // 2:
        raise NotSynchronizingError("Eppstein's heuristic needs a synchronizing DFA")
    maps = dfa.maps
    active = set(range(n))
    word: list[int] = []
    while len(active) > 1:
        states = sorted(active)
        best = min(((dist[(i, j)], (i, j)) for ai, i in enumerate(states) for j in states[ai + 1:]))
        v = best[1]
        piece = []
        while v[0] != v[1]:
            d = dist[v]
            for a, f in enumerate(maps):
                w = _pair(f[v[0]], f[v[1]])
                if dist.get(w) == d - 1:
                    piece.append(a)
                    v = w
                    break
        for a in piece:
            f = maps[a]
            active = {f[s] for s in active}
        word.extend(piece)
    return ResetResult(True, len(word), tuple(word), "eppstein")


def sg_diameter(dfa: Dfa) -> int:
    """Largest shortest-path length over ordered pairs of square-graph
    vertices with the target reachable from the source."""
    g = square_graph(dfa)
    adj: dict[tuple[int, int], set[tuple[int, int]]] = {v: set() for v in g.vertices}
    for (u, _), w in g.edges.items():
        adj[u].add(w)
    best = 0
    for s in g.vertices:
        dist = {s: 0}
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for w in adj[u]:
                if w not in dist:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        best = max(best, max(dist.values()))
    return best


def sg_merge_depth(dfa: Dfa) -> Optional[int]:
    """Largest distance from an off-diagonal pair to the diagonal, or None
    if some pair never merges."""
    dist = _merge_distances(dfa)
    if len(dist) != dfa.n * (dfa.n + 1) // 2:
        return None
    return max(dist.values())


@dataclass(frozen=True)
class ExponentWitness:
    exp: int
    word: tuple[int, ...]


def exponent_bfs(M: MatrixSet, cap: Optional[int] = None) -> Optional[ExponentWitness]:
    """Breadth-first search of the boolean semigroup for the all-ones matrix.

    Returns the exponent with a shortest positive word, or None when the
    semigroup closes without reaching it (the set is not primitive).
    """
    cap = default_layer_cap() if cap is None else cap
    n = M.n
    full = (1 << n) - 1
    gens = [A.rows for A in M.matrices]
    start = tuple(1 << i for i in range(n))
    target = (full,) * n
    parent: dict[tuple[int, ...], tuple] = {start: (None, -1)}
    frontier = [start]
    t = 0

    def word_of(P):
        out = []
        while parent[P][0] is not None:
            P, a = parent[P]
            out.append(a)
        out.reverse()
        return tuple(out)

    if start == target:
        return ExponentWitness(0, ())
    while frontier:
        t += 1
        nxt = []
        for P in frontier:
            for a, G in enumerate(gens):
                Q = []
                for r in P:
                    acc = 0
                    while r:
                        low = r & -r
                        acc |= G[low.bit_length() - 1]
                        r ^= low
                    Q.append(acc)
                Q = tuple(Q)
                if Q in parent:
                    continue
                parent[Q] = (P, a)
                if Q == target:
                    return ExponentWitness(t, word_of(Q))
                nxt.append(Q)
        if len(parent) > cap:
            raise LayerOverflowError(len(parent), cap, t)
        frontier = nxt
    return None


def is_primitive(M: MatrixSet, cap: Optional[int] = None) -> bool:
    """For an NZ set: irreducible with Aut(M) synchronizing.  Other sets
    fall back to the semigroup search, bounded by ``cap``."""
    if M.is_nz():
        return is_irreducible(M) and is_synchronizing(aut_of(M))
    return exponent_bfs(M, cap) is not None


def is_irreducible(M: MatrixSet) -> bool:
    """Strong connectivity of the digraph with ``i -> j`` iff some M[i, j] = 1."""
    n = M.n
    succ = [0] * n
    for A in M.matrices:
        for i, r in enumerate(A.rows):
            succ[i] |= r
    pred = [0] * n
    for i in range(n):
        for j in iter_bits(succ[i]):
            pred[j] |= 1 << i

    def reach(adj):
        seen, stack = 1, [0]
        while stack:
            u = stack.pop()
            new = adj[u] & ~seen
            seen |= new
            stack.extend(iter_bits(new))
        return seen

    full = (1 << n) - 1
    return reach(succ) == full and reach(pred) == full


@dataclass(frozen=True)
class ExponentBounds:
    n: int
    lower: int
    upper: int
    lower_method: str
    rt: Optional[int]
    rt_transpose: Optional[int]
    epp: int
    epp_transpose: int
    diameter: int

    @property
    def upper_exact(self) -> Optional[int]:
        """rt(Aut M) + rt(Aut M^T) + n - 1 when both exact values are known."""
        if self.rt is None or self.rt_transpose is None:
            return None
        return self.rt + self.rt_transpose + self.n - 1


def exponent_bounds(M: MatrixSet, *, state_cap: Optional[int] = None,
                    aut_cap: Optional[int] = None) -> ExponentBounds:
    """Automaton-side sandwich on exp(M).

    lower: exact rt(Aut M) when the subset search fits the cap, else the
    square-graph diameter; upper: Epp(Aut M) + Epp(Aut M^T) + n - 1.
    """
    if not M.is_nz():
        raise ValueError("exponent bounds need an NZ set")
    A = aut_of(M, aut_cap)
    AT = aut_of(M.transpose(), aut_cap)
    if not is_synchronizing(A):
        raise NotPrimitiveError("set is not primitive: Aut(M) is not synchronizing")
    diam = sg_diameter(A)
    cap = _env_int("PRIMSPF_STATE_CAP", DEFAULT_STATE_CAP) if state_cap is None else state_cap
    rt = rt_t = None
    if M.n <= cap:
        rt = reset_threshold_exact(A, cap).rt
        rt_t = reset_threshold_exact(AT, cap).rt
    epp = eppstein(A).rt
    epp_t = eppstein(AT).rt
    lower, how = (rt, "exact") if rt is not None else (diam, "diameter")
    return ExponentBounds(n=M.n, lower=lower, upper=epp + epp_t + M.n - 1, lower_method=how,
                          rt=rt, rt_transpose=rt_t, epp=epp, epp_transpose=epp_t,
                          diameter=diam)
