"""Words i^phase * v_0^{c_0} v_1^{c_1} ... in the generators, with exact phases.

Generators are self-adjoint unitaries with ``v_i v_j = (-1)^{a_|i-j|} v_j v_i``,
so every product reduces to a normal form: a phase in Z/4 (power of i) and
a GF(2) exponent vector, written in ascending generator order.  Exponent
vectors are packed into ints (bit i is c_i).
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .bitstream import Bitstream
from .errors import NotABreakPoint, ParseError, SizeTooLarge
from .gf2 import kernel, nullity, parity, toeplitz, vec_to_bits


@dataclass(frozen=True, order=True)
class Word:
    phase: int = 0
    exps: int = 0

    def __post_init__(self):
        object.__setattr__(self, "phase", self.phase % 4)
        if self.exps < 0:
            raise ValueError("exponent vector must be non-negative")

    @classmethod
    def generator(cls, i: int) -> "Word":
        return cls(0, 1 << i)

    @classmethod
    def from_indices(cls, indices, phase: int = 0) -> "Word":
        exps = 0
        for i in indices:
            exps ^= 1 << i
        return cls(phase, exps)

    @property
    def indices(self) -> list[int]:
        return list(_bits(self.exps))

    @property
    def support_length(self) -> int:
        return self.exps.bit_length()

    def is_identity(self) -> bool:
        return self.exps == 0 and self.phase == 0

    def __str__(self) -> str:
        return format_word(self)


IDENTITY = Word()

_PHASE_TOKENS = {0: "", 1: "+i", 2: "-", 3: "-i"}
_SCALARS = {0: "1", 1: "+i", 2: "-1", 3: "-i"}
_WORD_RE = re.compile(r"^(\+i|-i|\+|-)?((?:v\d+)*)$")


def format_word(w: Word) -> str:
    if not w.exps:
        return _SCALARS[w.phase]
    return _PHASE_TOKENS[w.phase] + "".join(f"v{i}" for i in _bits(w.exps))


def parse_word(text: str) -> Word:
    text = text.strip().replace(" ", "").replace("*", "")
    for phase, scalar in _SCALARS.items():
        if text == scalar:
            return Word(phase, 0)
    m = _WORD_RE.match(text)
    if not m or not m.group(2):
        raise ParseError("malformed word", text, 0, "[+|-|+i|-i] v<i>v<j>... with ascending indices")
    token = m.group(1) or ""
    phase = {"": 0, "+": 0, "+i": 1, "-": 2, "-i": 3}[token]
    indices = [int(x) for x in re.findall(r"v(\d+)", m.group(2))]
    if indices != sorted(set(indices)):
        raise ParseError("generator indices must be strictly ascending", text, len(token), "ascending indices")
    return Word.from_indices(indices, phase)


def _bits(x: int) -> Iterator[int]:
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def _window(stream: Bitstream, *vectors: int) -> tuple[int, int]:
    reach = max(v.bit_length() for v in vectors)
    return stream.mirror_window(reach)


def _ordered_pairs(c: int, d: int, stream: Bitstream) -> int:
    """Parity of sum over i > j of c_i d_j a_{i-j}."""
    if not c or not d:
        return 0
    T, K = _window(stream, c, d)
    s = 0
    for i in _bits(c):
        s ^= parity(d & (T >> (K - i)) & ((1 << i) - 1))
    return s


def commutation_bit(w1: Word, w2: Word, stream: Bitstream) -> int:
    """0 if the words commute, 1 if they anticommute (c^T A d mod 2)."""
    c, d = w1.exps, w2.exps
    if not c or not d:
        return 0
    T, K = _window(stream, c, d)
    s = 0
    for i in _bits(c):
        s ^= parity(d & (T >> (K - i)))
    return s


def multiply(w1: Word, w2: Word, stream: Bitstream) -> Word:
    # moving each generator of w2 left past the larger-index generators of w1
    sigma = _ordered_pairs(w1.exps, w2.exps, stream)
    return Word(w1.phase + w2.phase + 2 * sigma, w1.exps ^ w2.exps)


def adjoint(w: Word, stream: Bitstream) -> Word:
    # reversing the ordered product swaps every pair of its generators once
    m = _ordered_pairs(w.exps, w.exps, stream)
    return Word(-w.phase + 2 * m, w.exps)


def is_self_adjoint(w: Word, stream: Bitstream) -> bool:
    return adjoint(w, stream) == w


def shift(w: Word, k: int = 1) -> Word:
    if k < 0:
        raise ValueError("shift amount must be non-negative")
    return Word(w.phase, w.exps << k)


def scale(w: Word, phase: int) -> Word:
    return Word(w.phase + phase, w.exps)


@dataclass(frozen=True)
class CentralWordSet:
    n: int
    words: tuple[Word, ...]

    @property
    def nullity(self) -> int:
        return len(self.words)

    @property
    def center_dimension(self) -> int:
        return 2 ** len(self.words)


def central_words(stream: Bitstream, n: int) -> CentralWordSet:
    """Generators of the center of the algebra of v_0..v_{n-1}, one per kernel vector of A_n."""
    basis = kernel(toeplitz(stream, n))
    return CentralWordSet(n, tuple(Word(0, v) for v in basis.vectors))


@dataclass(frozen=True)
class PalindromeReport:
    n: int
    exps: tuple[int, ...]
    palindrome: bool
    endpoints_one: bool

    @property
    def ok(self) -> bool:
        return self.palindrome and self.endpoints_one


def check_palindrome_center(stream: Bitstream, n: int) -> PalindromeReport:
    if n < 1 or nullity(stream, n - 1) != 0 or nullity(stream, n) != 1:
        raise NotABreakPoint(f"n={n} is not a break point of {stream} (need nu_(n-1)=0, nu_n=1)")
    (c,) = central_words(stream, n).words
    bits = vec_to_bits(c.exps, n)
    return PalindromeReport(n, bits, bits == bits[::-1], bits[0] == 1 and bits[-1] == 1)


# -- dense oracle ------------------------------------------------------------

MAX_DENSE_SITES = 8

_I2 = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)


@dataclass(frozen=True)
class DenseRepresentation:
    n: int
    generators: tuple[np.ndarray, ...]

    def trace(self, m: np.ndarray) -> complex:
        return complex(np.trace(m)) / m.shape[0]

    def matrix(self, w: Word) -> np.ndarray:
        if w.exps >> self.n:
            raise ValueError(f"word {w} is not supported on {self.n} sites")
        out = np.eye(2 ** self.n, dtype=complex) * (1j ** w.phase)
        for i in _bits(w.exps):
            out = out @ self.generators[i]
        return out


def dense_representation(stream: Bitstream, n: int) -> DenseRepresentation:
    """Concrete 2^n x 2^n matrices V_0..V_{n-1} satisfying the commutation relations.

    V_i = Z^{a_i} (x) Z^{a_{i-1}} (x) ... (x) Z^{a_1} (x) X (x) I ... on sites 0..n-1.
    """
    if n > MAX_DENSE_SITES:
        raise SizeTooLarge(f"dense representation limited to {MAX_DENSE_SITES} sites, got {n}")
    gens = []
    for i in range(n):
        m = np.ones((1, 1), dtype=complex)
        for j in range(n):
            if j < i:
                site = _Z if stream.at(i - j) else _I2
            elif j == i:
                site = _X
            else:
                site = _I2
            m = np.kron(m, site)
        gens.append(m)
    return DenseRepresentation(n, tuple(gens))
