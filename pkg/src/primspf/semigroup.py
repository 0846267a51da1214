"""Layer-by-layer construction of the product sets M^{<=t} and M^t.

A :class:`ProductLayer` holds the distinct boolean products reachable
within the horizon, each with the length at which it first appeared.
:func:`build_ht` turns a layer into the row-sum matrix consumed by the LP
solvers, and the ``prune_*`` helpers implement the three size reductions
that leave the game value unchanged.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

from .boolmat import BinaryMatrix, MatrixSet, bool_product, dominates_permutation, row_sum_vector
from .errors import CapExceededError

__all__ = [
    "LayerOverflowError",
    "ProductLayer",
    "HtMatrix",
    "initial_layer",
    "expand",
    "prune_dominated_products",
    "build_ht",
    "prune_ht_columns",
    "prune_ht_rows",
    "first_dominating_time",
    "iter_layers",
    "default_layer_cap",
]


class LayerOverflowError(CapExceededError):
    """A product layer grew past its configured cardinality cap."""

    def __init__(self, size: int, cap: int, t: int):
        super().__init__(f"layer at t={t} has {size} products, cap is {cap}")
        self.size = size
        self.cap = cap
        self.t = t


def default_layer_cap() -> int:
    return int(os.environ.get("PRIMSPF_LAYER_CAP", "200000"))


@dataclass(frozen=True)
class ProductLayer:
    """Distinct products of length at most ``t`` (or exactly ``t`` when
    ``exact`` is set).

    ``frontier`` indexes the products that still have to be multiplied by
    the generators on the next expansion. ``words`` is filled only when
    witness tracking is requested.
    """

    n: int
    t: int
    products: tuple[BinaryMatrix, ...]
    lengths: tuple[int, ...]
    frontier: tuple[int, ...]
    exact: bool = False
    pruned: bool = False
    words: Optional[tuple[tuple[int, ...], ...]] = None

    def __len__(self) -> int:
        return len(self.products)

    def contains_all_ones(self) -> bool:
        return any(P.is_all_ones() for P in self.products)

    def index(self) -> dict[BinaryMatrix, int]:
        return {P: i for i, P in enumerate(self.products)}


def initial_layer(n: int, *, exact: bool = False, track_words: bool = False) -> ProductLayer:
    """The horizon-0 layer ``{I}``."""
    return ProductLayer(
        n=n,
        t=0,
        products=(BinaryMatrix.identity(n),),
        lengths=(0,),
        frontier=(0,),
        exact=exact,
        words=((),) if track_words else None,
    )


def expand(M: MatrixSet, layer: ProductLayer, *, prune: bool = False,
           cap: Optional[int] = None) -> ProductLayer:
    """Grow ``layer`` by one step of right multiplication ``P -> P @ M_i``.

    For a cumulative layer the result is ``layer ∪ {P M_i}`` where only the
    frontier needs multiplying; for an exact layer it is ``{P M_i}``.
    Dominance pruning, when requested, runs after deduplication.
    """
    if M.n != layer.n:
        raise ValueError(f"dimension mismatch: set has n={M.n}, layer n={layer.n}")
    t = layer.t + 1
    track = layer.words is not None
    gens = M.matrices

    if layer.exact:
        products: list[BinaryMatrix] = []
        words: list[tuple[int, ...]] = []
        seen: set[BinaryMatrix] = set()
        for idx in range(len(layer.products)):
            P = layer.products[idx]
            for g, G in enumerate(gens):
                Q = bool_product(P, G)
                if Q not in seen:
                    seen.add(Q)
                    products.append(Q)
                    if track:
                        words.append(layer.words[idx] + (g,))
        lengths = [t] * len(products)
    else:
        products = list(layer.products)
        lengths = list(layer.lengths)
        words = list(layer.words) if track else []
        seen = set(products)
        for idx in layer.frontier:
            P = layer.products[idx]
            for g, G in enumerate(gens):
                Q = bool_product(P, G)
                if Q not in seen:
                    seen.add(Q)
                    products.append(Q)
                    lengths.append(t)
                    if track:
                        words.append(layer.words[idx] + (g,))

    new = ProductLayer(
        n=layer.n,
        t=t,
        products=tuple(products),
        lengths=tuple(lengths),
        frontier=tuple(i for i, ell in enumerate(lengths) if ell == t),
        exact=layer.exact,
        pruned=layer.pruned,
        words=tuple(words) if track else None,
    )
    if prune:
        new = prune_dominated_products(new)
    if cap is not None and len(new) > cap:
        raise LayerOverflowError(len(new), cap, t)
    return new


def prune_dominated_products(layer: ProductLayer) -> ProductLayer:
    """Drop every product that is entrywise below another one in the layer.

    The survivors form an antichain; a dropped product never re-enters,
    because its dominator (or something above it) stays in every later
    layer.
    """
    order = sorted(range(len(layer.products)),
                   key=lambda i: (-layer.products[i].packed.bit_count(), i))
    kept: list[int] = []
    kept_packed: list[int] = []
    for i in order:
        a = layer.products[i].packed
        if any(a & ~b == 0 for b in kept_packed):
            continue
        kept.append(i)
        kept_packed.append(a)
    kept.sort()
    kept_set = set(kept)
    remap = {old: new for new, old in enumerate(kept)}
    return ProductLayer(
        n=layer.n,
        t=layer.t,
        products=tuple(layer.products[i] for i in kept),
        lengths=tuple(layer.lengths[i] for i in kept),
        frontier=tuple(remap[i] for i in layer.frontier if i in kept_set),
        exact=layer.exact,
        pruned=True,
        words=tuple(layer.words[i] for i in kept) if layer.words is not None else None,
    )


@dataclass(frozen=True)
class HtMatrix:
    """Integer matrix whose columns are the row-sum vectors of products.

    ``source[j]`` is the index in the originating layer of column ``j``
    and ``origin[j]`` its minimal product length. ``row_ids`` lists the
    original row indices still present after row pruning.
    """

    n: int
    columns: tuple[tuple[int, ...], ...]
    origin: tuple[int, ...] = ()
    source: tuple[int, ...] = ()
    row_ids: tuple[int, ...] = field(default=())

    def __post_init__(self):
        if not self.columns:
            raise ValueError("HtMatrix needs at least one column")
        rows = len(self.columns[0])
        for c in self.columns:
            if len(c) != rows:
                raise ValueError("ragged HtMatrix columns")
        if not self.origin:
            object.__setattr__(self, "origin", (0,) * len(self.columns))
        if not self.source:
            object.__setattr__(self, "source", tuple(range(len(self.columns))))
        if not self.row_ids:
            object.__setattr__(self, "row_ids", tuple(range(rows)))
        if len(self.row_ids) != rows:
            raise ValueError("row_ids length does not match column height")

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], n: Optional[int] = None) -> "HtMatrix":
        cols = tuple(tuple(int(x) for x in c) for c in columns)
        if not cols:
            raise ValueError("HtMatrix needs at least one column")
        return cls(n=n if n is not None else len(cols[0]), columns=cols)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], n: Optional[int] = None) -> "HtMatrix":
        return cls.from_columns(list(zip(*rows)), n=n)

    @property
    def h(self) -> int:
        return len(self.columns)

    @property
    def num_rows(self) -> int:
        return len(self.row_ids)

    def rows(self) -> list[tuple[int, ...]]:
        return [tuple(c[i] for c in self.columns) for i in range(self.num_rows)]

    def select_columns(self, keep: Sequence[int]) -> "HtMatrix":
        return HtMatrix(
            n=self.n,
            columns=tuple(self.columns[j] for j in keep),
            origin=tuple(self.origin[j] for j in keep),
            source=tuple(self.source[j] for j in keep),
            row_ids=self.row_ids,
        )


def build_ht(layer: ProductLayer) -> HtMatrix:
    if not layer.products:
        raise ValueError("cannot build H from an empty layer")
    return HtMatrix(
        n=layer.n,
        columns=tuple(row_sum_vector(P) for P in layer.products),
        origin=layer.lengths,
        source=tuple(range(len(layer.products))),
    )


def _leq(a: Sequence[int], b: Sequence[int]) -> bool:
    return all(x <= y for x, y in zip(a, b))


def prune_ht_columns(H: HtMatrix) -> HtMatrix:
    """Remove columns entrywise <= another column (first copy of a duplicate stays)."""
    order = sorted(range(H.h), key=lambda j: (-sum(H.columns[j]), j))
    kept: list[int] = []
    for j in order:
        c = H.columns[j]
        if any(_leq(c, H.columns[k]) for k in kept):
            continue
        kept.append(j)
    kept.sort()
    return H.select_columns(kept)


def prune_ht_rows(H: HtMatrix) -> HtMatrix:
    """Remove rows entrywise >= another row; sound for the max-k program only."""
    rows = H.rows()
    order = sorted(range(len(rows)), key=lambda i: (sum(rows[i]), i))
    kept: list[int] = []
    for i in order:
        if any(_leq(rows[k], rows[i]) for k in kept):
            continue
        kept.append(i)
    kept.sort()
    return HtMatrix(
        n=H.n,
        columns=tuple(tuple(c[i] for i in kept) for c in H.columns),
        origin=H.origin,
        source=H.source,
        row_ids=tuple(H.row_ids[i] for i in kept),
    )


def iter_layers(M: MatrixSet, t_max: Optional[int] = None, *, exact: bool = False,
                prune: bool = True, cap: Optional[int] = None,
                track_words: bool = False) -> Iterator[ProductLayer]:
    """Yield the layers for t = 0, 1, ... (up to ``t_max`` inclusive if given)."""
    layer = initial_layer(M.n, exact=exact, track_words=track_words)
    yield layer
    while t_max is None or layer.t < t_max:
        layer = expand(M, layer, prune=prune, cap=cap)
        yield layer


def first_dominating_time(M: MatrixSet, t_cap: int, *, cap: Optional[int] = None) -> Optional[int]:
    """Smallest ``s <= t_cap`` such that some product of length ``1..s``
    dominates a permutation matrix, or ``None``."""
    if t_cap < 1:
        raise ValueError("t_cap must be >= 1")
    # Dominance pruning keeps every maximal product, and a product above
    # one that dominates a permutation dominates it too.
    for layer in iter_layers(M, t_cap, exact=True, prune=True, cap=cap):
        if layer.t == 0:
            continue
        if any(dominates_permutation(P) for P in layer.products):
            return layer.t
    return None
