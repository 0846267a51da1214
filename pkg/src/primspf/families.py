"""Generators for the matrix-set families and worked examples.

Random families draw from :class:`SplitMix64` so that a ``(params, seed)``
pair yields the same set on every platform.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .boolmat import BinaryMatrix, MatrixSet, is_nz

__all__ = [
    "SplitMix64",
    "FamilySpec",
    "cerny_nz",
    "mn_family",
    "perturbed_permutation",
    "uniform_nz",
    "builtin_example",
    "EXAMPLE_IDS",
    "generate",
]

_MASK64 = (1 << 64) - 1


class SplitMix64:
    """SplitMix64 stream (the seeding generator of xoshiro)."""

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def below(self, bound: int) -> int:
        """Uniform integer in ``[0, bound)`` by rejection sampling."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        limit = (1 << 64) - ((1 << 64) % bound)
        while True:
            x = self.next_u64()
            if x < limit:
                return x % bound

    def permutation(self, n: int) -> list[int]:
        """Fisher-Yates shuffle of ``range(n)``."""
        perm = list(range(n))
        for i in range(n - 1, 0, -1):
            j = self.below(i + 1)
            perm[i], perm[j] = perm[j], perm[i]
        return perm


@dataclass(frozen=True)
class FamilySpec:
    kind: str
    n: int = 0
    m: int = 2
    seed: int = 0
    example_id: Optional[str] = None


def _from_entries(n: int, ones) -> BinaryMatrix:
    rows = [0] * n
    for i, j in ones:
        rows[i - 1] |= 1 << (j - 1)
    return BinaryMatrix(n, tuple(rows))


def cerny_nz(n: int) -> MatrixSet:
    """NZ set whose associated automata are both the Cerny automaton."""
    if n < 2:
        raise ValueError("cerny_nz needs n >= 2")
    A = [(i, i) for i in range(1, n + 1)] + [(n, 1)]
    B = [(i, i + 1) for i in range(1, n)] + [(n, 1)]
    return MatrixSet.of([_from_entries(n, A), _from_entries(n, B)])


def _q_matrices(n: int) -> tuple[BinaryMatrix, BinaryMatrix]:
    def pattern(i_fixed: list[int], up_parity: int) -> list[tuple[int, int]]:
        # up_parity: rows i with i % 2 == up_parity map to i+1, the others to i-1
        ones = [(i, i) for i in i_fixed]
        for i in range(1, n + 1):
            j = i + 1 if i % 2 == up_parity else i - 1
            if 1 <= j <= n:
                ones.append((i, j))
        return ones

    if n % 2 == 0:
        q1 = pattern([1, n], up_parity=0)
        q2 = pattern([1], up_parity=1)
    else:
        q1 = pattern([1], up_parity=0)
        q2 = pattern([n], up_parity=1)
    return _from_entries(n, q1), _from_entries(n, q2)


def _identity_plus(n: int, i: int, j: int) -> BinaryMatrix:
    return _from_entries(n, [(k, k) for k in range(1, n + 1)] + [(i, j)])


def mn_family(n: int) -> MatrixSet:
    """The quadratic-exponent family {Q1, Q2, I_ij} for n >= 5."""
    if n < 5:
        raise ValueError("mn_family needs n >= 5")
    q1, q2 = _q_matrices(n)
    if n % 4 == 0:
        extra = _identity_plus(n, 1, n - 2)
    elif n % 4 == 2:
        extra = _identity_plus(n, 1, n - 4)
    else:
        extra = _identity_plus(n, (n - 1) // 2, (n + 1) // 2)
    return MatrixSet.of([q1, q2, extra])


def perturbed_permutation(n: int, m: int, seed: int) -> MatrixSet:
    """``m`` random permutation matrices, one of which gets a single
    0-entry flipped to 1."""
    if n < 2 or m < 2:
        raise ValueError("perturbed_permutation needs n >= 2 and m >= 2")
    rng = SplitMix64(seed)
    perms = [rng.permutation(n) for _ in range(m)]
    target = rng.below(m)
    # k-th zero entry of the target, in row-major order
    k = rng.below(n * n - n)
    perm = perms[target]
    rows = [1 << perm[i] for i in range(n)]
    for i in range(n):
        zeros = [j for j in range(n) if j != perm[i]]
        if k < len(zeros):
            rows[i] |= 1 << zeros[k]
            break
        k -= len(zeros)
    mats = [BinaryMatrix.from_map(p) for p in perms]
    mats[target] = BinaryMatrix(n, tuple(rows))
    return MatrixSet.of(mats)


def uniform_nz(n: int, m: int, seed: int) -> MatrixSet:
    """``m`` matrices with i.i.d. fair-coin entries, each resampled until NZ."""
    if n < 1 or m < 1:
        raise ValueError("uniform_nz needs n >= 1 and m >= 1")
    rng = SplitMix64(seed)
    mats = []
    for _ in range(m):
        while True:
            rows = tuple(_random_bits(rng, n) for _ in range(n))
            A = BinaryMatrix(n, rows)
            if is_nz(A):
                mats.append(A)
                break
    return MatrixSet.of(mats)


def _random_bits(rng: SplitMix64, n: int) -> int:
    out, width = 0, 0
    while width < n:
        out |= rng.next_u64() << width
        width += 64
    return out & ((1 << n) - 1)


_EXAMPLES = {
    "ex1.1": [
        ["010", "100", "001"],
        ["101", "001", "010"],
    ],
    "ex3.1": [
        ["0001", "1010", "0100", "0010"],
        ["0100", "1000", "1001", "0010"],
    ],
    "M1": [
        ["00010", "00100", "10000", "01000", "00001"],
        ["10000", "00010", "00100", "00001", "01000"],
        ["00100", "00101", "00110", "10000", "01000"],
    ],
    "M2": [
        ["01000", "00010", "00100", "00001", "10000"],
        ["00010", "00100", "00001", "10000", "01001"],
        ["01000", "00001", "00100", "10000", "00010"],
    ],
    "ex3.2": [
        ["10000", "10000", "10000", "01100", "00011"],
        ["00001", "00001", "00001", "10100", "01010"],
    ],
    "ex3.3": [
        ["0001", "1000", "0100", "0010"],
        ["1000", "1100", "0010", "0001"],
    ],
}
_ALIASES = {"ex1": "ex1.1", "M0": "ex1.1", "fig1": "ex3.1"}

EXAMPLE_IDS = tuple(_EXAMPLES) + tuple(_ALIASES)


def builtin_example(example_id: str) -> MatrixSet:
    """Hard-coded example sets.

    ``ex1.1`` (aliases ``ex1``, ``M0``) is a 3x3 pair with exponent 8,
    ``ex3.1`` (alias ``fig1``) a 4x4 pair, ``M1``/``M2`` 5x5 triples with
    exponents 9 and 13, ``ex3.2`` a 5x5 pair in which no matrix dominates
    a permutation, ``ex3.3`` a 4x4 pair whose SPF starts with a stagnation
    of length 3.
    """
    key = _ALIASES.get(example_id, example_id)
    try:
        blocks = _EXAMPLES[key]
    except KeyError:
        raise KeyError(f"unknown example id {example_id!r}; known: {', '.join(EXAMPLE_IDS)}") from None
    return MatrixSet.of(BinaryMatrix.from_strings(b) for b in blocks)


def generate(spec: FamilySpec) -> MatrixSet:
    if spec.kind == "cerny_nz":
        return cerny_nz(spec.n)
    if spec.kind == "mn_family":
        return mn_family(spec.n)
    if spec.kind == "perturbed_permutation":
        return perturbed_permutation(spec.n, spec.m, spec.seed)
    if spec.kind == "uniform_nz":
        return uniform_nz(spec.n, spec.m, spec.seed)
    if spec.kind == "example":
        return builtin_example(spec.example_id or "")
    raise ValueError(f"unknown family kind {spec.kind!r}")
