"""Binary matrices and vectors under the boolean (OR/AND) product.

Rows are bit-packed into Python ints: bit ``j`` of ``rows[i]`` is the
entry ``[i, j]``.  Every object here is immutable and hashable, so
products can be deduplicated with plain sets and dicts.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Sequence

__all__ = [
    "BinaryVector",
    "BinaryMatrix",
    "MatrixSet",
    "DimensionError",
    "bool_product",
    "apply_row",
    "is_nz",
    "dominates",
    "dominates_permutation",
    "transpose",
    "is_permutation",
    "is_binary_row_stochastic",
    "row_sum_vector",
    "iter_bits",
]


class DimensionError(ValueError):
    """Operands have incompatible dimensions."""


def iter_bits(x: int) -> Iterator[int]:
    """Yield the positions of the set bits of ``x`` in increasing order."""
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


@dataclass(frozen=True, order=True)
class BinaryVector:
    n: int
    bits: int

    def __post_init__(self):
        if self.bits < 0 or self.bits >> self.n:
            raise ValueError(f"bits {self.bits:#x} out of range for n={self.n}")

    @classmethod
    def from_list(cls, values: Sequence[int]) -> "BinaryVector":
        bits = 0
        for j, v in enumerate(values):
            if v not in (0, 1):
                raise ValueError(f"non-binary entry {v!r}")
            if v:
                bits |= 1 << j
        return cls(len(values), bits)

    @classmethod
    def ones(cls, n: int) -> "BinaryVector":
        return cls(n, (1 << n) - 1)

    @classmethod
    def basis(cls, n: int, i: int) -> "BinaryVector":
        return cls(n, 1 << i)

    @property
    def support(self) -> frozenset[int]:
        return frozenset(iter_bits(self.bits))

    def to_list(self) -> list[int]:
        return [(self.bits >> j) & 1 for j in range(self.n)]

    def __str__(self) -> str:
        return "".join(str(v) for v in self.to_list())


@dataclass(frozen=True, order=True)
class BinaryMatrix:
    """Square 0/1 matrix with bit-packed rows."""

    n: int
    rows: tuple[int, ...]

    def __post_init__(self):
        if len(self.rows) != self.n:
            raise DimensionError(f"expected {self.n} rows, got {len(self.rows)}")
        limit = 1 << self.n
        for r in self.rows:
            if r < 0 or r >= limit:
                raise ValueError(f"row {r:#x} out of range for n={self.n}")

    @classmethod
    def _make(cls, n: int, rows: tuple[int, ...]) -> "BinaryMatrix":
        # hot path for products of already-validated matrices
        obj = object.__new__(cls)
        object.__setattr__(obj, "n", n)
        object.__setattr__(obj, "rows", rows)
        return obj

    @classmethod
    def from_lists(cls, entries: Sequence[Sequence[int]]) -> "BinaryMatrix":
        n = len(entries)
        rows = []
        for line in entries:
            if len(line) != n:
                raise DimensionError("matrix is not square")
            rows.append(BinaryVector.from_list(line).bits)
        return cls(n, tuple(rows))

    @classmethod
    def from_strings(cls, lines: Sequence[str]) -> "BinaryMatrix":
        return cls.from_lists([[int(c) for c in line] for line in lines])

    @classmethod
    def identity(cls, n: int) -> "BinaryMatrix":
        return cls(n, tuple(1 << i for i in range(n)))

    @classmethod
    def ones(cls, n: int) -> "BinaryMatrix":
        return cls(n, ((1 << n) - 1,) * n)

    @classmethod
    def zeros(cls, n: int) -> "BinaryMatrix":
        return cls(n, (0,) * n)

    @classmethod
    def from_map(cls, images: Sequence[int]) -> "BinaryMatrix":
        """Row-stochastic matrix of the map ``i -> images[i]``."""
        return cls(len(images), tuple(1 << j for j in images))

    @cached_property
    def packed(self) -> int:
        """All n*n entries in one int; row ``i`` occupies bits ``i*n .. i*n+n-1``."""
        out = 0
        for i, r in enumerate(self.rows):
            out |= r << (i * self.n)
        return out

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return (self.rows[i] >> j) & 1

    def row(self, i: int) -> BinaryVector:
        return BinaryVector(self.n, self.rows[i])

    def to_lists(self) -> list[list[int]]:
        return [BinaryVector(self.n, r).to_list() for r in self.rows]

    def to_strings(self) -> list[str]:
        return [str(BinaryVector(self.n, r)) for r in self.rows]

    def is_all_ones(self) -> bool:
        full = (1 << self.n) - 1
        return all(r == full for r in self.rows)

    def __matmul__(self, other: "BinaryMatrix") -> "BinaryMatrix":
        return bool_product(self, other)

    def __str__(self) -> str:
        return "\n".join(self.to_strings())


@dataclass(frozen=True)
class MatrixSet:
    n: int
    matrices: tuple[BinaryMatrix, ...]

    def __post_init__(self):
        if not self.matrices:
            raise ValueError("a matrix set needs at least one matrix")
        for A in self.matrices:
            if A.n != self.n:
                raise DimensionError(f"matrix of size {A.n} in a set of size {self.n}")

    @classmethod
    def of(cls, matrices: Iterable[BinaryMatrix]) -> "MatrixSet":
        matrices = tuple(matrices)
        if not matrices:
            raise ValueError("a matrix set needs at least one matrix")
        return cls(matrices[0].n, matrices)

    @property
    def m(self) -> int:
        return len(self.matrices)

    def transpose(self) -> "MatrixSet":
        return MatrixSet(self.n, tuple(transpose(A) for A in self.matrices))

    def is_nz(self) -> bool:
        return all(is_nz(A) for A in self.matrices)

    def __iter__(self) -> Iterator[BinaryMatrix]:
        return iter(self.matrices)

    def __len__(self) -> int:
        return len(self.matrices)

    def __getitem__(self, i: int) -> BinaryMatrix:
        return self.matrices[i]


def _check_same(a: int, b: int) -> None:
    if a != b:
        raise DimensionError(f"dimension mismatch: {a} vs {b}")


def _or_rows(selector: int, rows: tuple[int, ...]) -> int:
    acc = 0
    while selector:
        low = selector & -selector
        acc |= rows[low.bit_length() - 1]
        selector ^= low
    return acc


def bool_product(A: BinaryMatrix, B: BinaryMatrix) -> BinaryMatrix:
    """Boolean product: row ``i`` of the result is the OR of the rows of
    ``B`` selected by the set bits of row ``i`` of ``A``."""
    _check_same(A.n, B.n)
    brows = B.rows
    return BinaryMatrix._make(A.n, tuple(_or_rows(r, brows) for r in A.rows))


def apply_row(v: BinaryVector, A: BinaryMatrix) -> BinaryVector:
    """Binarized row-vector image ``[v^T A]``."""
    _check_same(v.n, A.n)
    return BinaryVector(A.n, _or_rows(v.bits, A.rows))


def is_nz(A: BinaryMatrix) -> bool:
    """True iff every row and every column holds at least one 1."""
    full = (1 << A.n) - 1
    cols = 0
    for r in A.rows:
        if not r:
            return False
        cols |= r
    return cols == full


def dominates(A: BinaryMatrix, B: BinaryMatrix) -> bool:
    """``A >= B`` entrywise."""
    _check_same(A.n, B.n)
    return B.packed & ~A.packed == 0


def dominates_permutation(A: BinaryMatrix) -> bool:
    """True iff some permutation matrix is entrywise below ``A``.

    Equivalent to a perfect matching in the rows/columns bipartite graph;
    found with simple augmenting paths (Kuhn's algorithm).
    """
    n = A.n
    match_col = [-1] * n

    def augment(i: int, seen: list[bool]) -> bool:
        for j in iter_bits(A.rows[i]):
            if seen[j]:
                continue
            seen[j] = True
            if match_col[j] < 0 or augment(match_col[j], seen):
                match_col[j] = i
                return True
        return False

    for i in range(n):
        if not augment(i, [False] * n):
            return False
    return True


def transpose(A: BinaryMatrix) -> BinaryMatrix:
    cols = [0] * A.n
    for i, r in enumerate(A.rows):
        for j in iter_bits(r):
            cols[j] |= 1 << i
    return BinaryMatrix(A.n, tuple(cols))


def is_binary_row_stochastic(A: BinaryMatrix) -> bool:
    """Exactly one 1 in every row."""
    return all(r and r & (r - 1) == 0 for r in A.rows)


def is_permutation(A: BinaryMatrix) -> bool:
    return is_binary_row_stochastic(A) and is_nz(A)


def row_sum_vector(A: BinaryMatrix) -> tuple[int, ...]:
    """Integer vector ``A e``: the number of ones in each row."""
    return tuple(r.bit_count() for r in A.rows)
