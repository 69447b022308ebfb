"""Bit-packed linear algebra over GF(2) and the Toeplitz matrices of a bitstream.

Rows and vectors are Python ints: bit ``j`` holds column/coordinate ``j``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .bitstream import Bitstream


def parity(x: int) -> int:
    return x.bit_count() & 1


def vec_to_bits(v: int, n: int) -> tuple[int, ...]:
    return tuple((v >> j) & 1 for j in range(n))


def bits_to_vec(bits: Iterable[int]) -> int:
    v = 0
    for j, b in enumerate(bits):
        if b & 1:
            v |= 1 << j
    return v


@dataclass(frozen=True)
class GF2Matrix:
    rows: int
    cols: int
    bits: tuple[int, ...]  # one packed int per row

    @classmethod
    def from_lists(cls, entries: Sequence[Sequence[int]]) -> "GF2Matrix":
        cols = len(entries[0]) if entries else 0
        return cls(len(entries), cols, tuple(bits_to_vec(r) for r in entries))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "GF2Matrix":
        return cls(rows, cols, (0,) * rows)

    def to_lists(self) -> list[list[int]]:
        return [list(vec_to_bits(r, self.cols)) for r in self.bits]

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return (self.bits[i] >> j) & 1

    def transpose(self) -> "GF2Matrix":
        out = [0] * self.cols
        for i, r in enumerate(self.bits):
            while r:
                low = r & -r
                out[low.bit_length() - 1] |= 1 << i
                r ^= low
        return GF2Matrix(self.cols, self.rows, tuple(out))

    def is_symmetric(self) -> bool:
        return self.rows == self.cols and self.transpose().bits == self.bits

    def apply(self, v: int) -> int:
        """Matrix-vector product, result packed the same way."""
        out = 0
        for i, r in enumerate(self.bits):
            if parity(r & v):
                out |= 1 << i
        return out


def rref(rows: Sequence[int]) -> tuple[list[int], list[int]]:
    """Reduced row echelon form; pivot of a row is its lowest set column.

    Returns ``(rows, pivot_columns)`` with zero rows dropped, sorted by pivot.
    """
    basis: list[int] = []
    pivots: list[int] = []
    for r in rows:
        for b, p in zip(basis, pivots):
            if (r >> p) & 1:
                r ^= b
        if not r:
            continue
        p = (r & -r).bit_length() - 1
        for k, b in enumerate(basis):
            if (b >> p) & 1:
                basis[k] = b ^ r
        basis.append(r)
        pivots.append(p)
    order = sorted(range(len(basis)), key=pivots.__getitem__)
    return [basis[k] for k in order], [pivots[k] for k in order]


def rank(matrix: GF2Matrix) -> int:
    return len(rref(matrix.bits)[0])


@dataclass(frozen=True)
class KernelBasis:
    n: int
    vectors: tuple[int, ...]  # reduced echelon, ascending pivots

    @property
    def nullity(self) -> int:
        return len(self.vectors)

    def as_bits(self) -> list[tuple[int, ...]]:
        return [vec_to_bits(v, self.n) for v in self.vectors]


def kernel(matrix: GF2Matrix) -> KernelBasis:
    rows, pivots = rref(matrix.bits)
    pivot_set = set(pivots)
    vectors = []
    for f in range(matrix.cols):
        if f in pivot_set:
            continue
        v = 1 << f
        for r, p in zip(rows, pivots):
            if (r >> f) & 1:
                v |= 1 << p
        vectors.append(v)
    # canonical reduced echelon form of the kernel itself
    vectors, _ = rref(vectors)
    return KernelBasis(matrix.cols, tuple(vectors))


def toeplitz_row(stream: Bitstream, i: int, n: int) -> int:
    """Row i of the n x n Toeplitz matrix: bit j holds a_{|i-j|}."""
    T, K = stream.mirror_window(n)
    return (T >> (K - i)) & ((1 << n) - 1)


def toeplitz(stream: Bitstream, n: int) -> GF2Matrix:
    if n < 1:
        raise ValueError("n must be positive")
    stream.at(n - 1)  # surface IndexBeyondPrefix before building rows
    return GF2Matrix(n, n, tuple(toeplitz_row(stream, i, n) for i in range(n)))


class IncrementalKernel:
    """Tracks ker A_n as n grows, one coordinate at a time.

    A_n is the Gram matrix of an alternating form (symmetric, zero diagonal),
    so the space spanned by e_0..e_{n-1} splits into hyperbolic pairs plus the
    radical ker A_n.  Adding e_n either joins the radical or pairs with one
    radical vector; each step costs O(n) word operations and changes the
    nullity by exactly one.
    """

    def __init__(self, stream: Bitstream):
        self.stream = stream
        self.n = 0
        self.pairs: list[tuple[int, int]] = []
        self.radical: list[int] = []
        self.nullities = [0]  # nu_0 = 0
        self.singletons: dict[int, int] = {}  # n -> the kernel vector when nu_n = 1
        self._rev = 0  # bit j holds a_{n-j} for j < n

    def step(self) -> int:
        n = self.n
        self._rev = (self._rev << 1) | self.stream.at(n)
        row = self._rev & ((1 << n) - 1)  # B(e_j, e_n) = a_{n-j} for j < n
        e = 1 << n
        for x, y in self.pairs:
            if parity(y & row):
                e ^= x
            if parity(x & row):
                e ^= y
        hits = [k for k, r in enumerate(self.radical) if parity(r & row)]
        if not hits:
            self.radical.append(e)
        else:
            pivot = self.radical[hits[0]]
            for k in hits[1:]:
                self.radical[k] ^= pivot
            del self.radical[hits[0]]
            self.pairs.append((pivot, e))
        self.n = n + 1
        self.nullities.append(len(self.radical))
        if len(self.radical) == 1:
            self.singletons[self.n] = self.radical[0]
        return self.nullities[-1]

    def extend_to(self, n: int) -> None:
        while self.n < n:
            self.step()

    def kernel_vectors(self) -> list[int]:
        """A basis of ker A_n for the current n (not reduced)."""
        return list(self.radical)


def _scanner(stream: Bitstream) -> IncrementalKernel:
    with stream._lock:
        scan = stream._memo.get("kernel-scan")
        if scan is None:
            scan = stream._memo["kernel-scan"] = IncrementalKernel(stream)
        return scan


def nullity(stream: Bitstream, n: int) -> int:
    """nu_n = dim ker A_n, with nu_0 = 0."""
    scan = _scanner(stream)
    with stream._lock:
        scan.extend_to(n)
        return scan.nullities[n]


def singleton_kernel_vector(stream: Bitstream, n: int) -> int:
    """The unique nonzero vector of ker A_n, for n with nu_n = 1."""
    scan = _scanner(stream)
    with stream._lock:
        scan.extend_to(n)
        if scan.nullities[n] != 1:
            raise ValueError(f"nu_{n} = {scan.nullities[n]}, not 1")
        return scan.singletons[n]


def nullity_sequence(stream: Bitstream, N: int, include_zero: bool = False) -> tuple[int, ...]:
    """(nu_1, ..., nu_N), or (nu_0, ..., nu_N) with ``include_zero``."""
    if N < 1:
        raise ValueError("N must be positive")
    scan = _scanner(stream)
    with stream._lock:
        scan.extend_to(N)
        seq = scan.nullities[: N + 1]
    return tuple(seq if include_zero else seq[1:])


def stream_kernel(stream: Bitstream, n: int) -> KernelBasis:
    return kernel(toeplitz(stream, n))
