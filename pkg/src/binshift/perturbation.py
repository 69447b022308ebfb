"""Inner perturbations of a binary shift at a break point of its nullity sequence.

At a break point n (nu_{n-1} = 0, nu_n = 1) the center of the algebra of
v_0..v_{n-1} is generated by a single palindromic word z.  With
u = (I + z)/sqrt(2) when z* = -z, or u = (I + iz)/sqrt(2) when z* = z, the
endomorphism beta = Ad(u) o alpha is again a binary shift.  Its generators
u_i = beta^i(v_0) are words in the v's; their commutation bits with u_0 give
the new bitstream b, which first differs from a at index n + 2d - 1, where d
is the height of the nullity peak starting at n.
"""
from __future__ import annotations

import enum
import itertools
import threading
from dataclasses import dataclass
from typing import Optional

from .bitstream import Bitstream, Perturbed
from .errors import InternalInconsistency, NotABreakPoint, NotEnoughBreakPoints, PlateauUnbounded
from .gf2 import nullity, rref, singleton_kernel_vector, vec_to_bits
from .words import (
    Word,
    adjoint,
    commutation_bit,
    format_word,
    multiply,
    scale,
    shift,
)


@dataclass(frozen=True)
class BreakPoint:
    n: int
    z: Word
    d: int


class UKind(enum.Enum):
    SKEW = "skew"  # z* = -z, u = (I + z)/sqrt(2)
    SELF_ADJOINT = "self-adjoint"  # z* = z, u = (I + iz)/sqrt(2)


def default_horizon(limit: int) -> int:
    return limit + max(256, 4 * limit)


def plateau_depth(stream: Bitstream, n: int, horizon: Optional[int] = None) -> Optional[int]:
    """Height of the nullity peak starting at n, or None if no descent by ``horizon``."""
    horizon = default_horizon(n) if horizon is None else horizon
    for m in range(1, horizon - n + 1):
        if nullity(stream, n + m) < nullity(stream, n + m - 1):
            return m
    return None


def _check_plateau_shape(stream: Bitstream, n: int, d: int) -> None:
    seq = [nullity(stream, n + j) for j in range(2 * d)]
    want = list(range(1, d + 1)) + list(range(d - 1, -1, -1))
    if seq != want:
        raise InternalInconsistency(
            f"nullities from n={n} are {seq}, expected peak shape {want}",
            {"stream": stream.descriptor, "n": n, "d": d},
        )


def is_break_point(stream: Bitstream, n: int) -> bool:
    return n >= 1 and nullity(stream, n - 1) == 0 and nullity(stream, n) == 1


def break_point_at(stream: Bitstream, n: int, horizon: Optional[int] = None) -> BreakPoint:
    if not is_break_point(stream, n):
        raise NotABreakPoint(f"n={n} is not a break point of {stream} (need nu_(n-1)=0, nu_n=1)")
    d = plateau_depth(stream, n, horizon)
    if d is None:
        raise PlateauUnbounded(f"{stream}: nullities keep rising after n={n}")
    _check_plateau_shape(stream, n, d)
    c = singleton_kernel_vector(stream, n)
    bits = vec_to_bits(c, n)
    if bits != bits[::-1] or not (bits[0] and bits[-1]):
        raise InternalInconsistency(
            f"central generator at n={n} is not a palindrome with endpoints 1: {bits}",
            {"stream": stream.descriptor, "n": n},
        )
    return BreakPoint(n, Word(0, c), d)


def iter_break_points(stream: Bitstream, limit: Optional[int] = None, horizon: Optional[int] = None):
    n = 1
    while limit is None or n <= limit:
        if is_break_point(stream, n):
            yield break_point_at(stream, n, horizon)
        n += 1


def break_points(
    stream: Bitstream, limit: int, horizon: Optional[int] = None, count: Optional[int] = None
) -> list[BreakPoint]:
    """Break points n <= limit in increasing order (at most ``count`` of them)."""
    return list(itertools.islice(iter_break_points(stream, limit, horizon), count))


def build_u(bp: BreakPoint, stream: Bitstream) -> UKind:
    zs = adjoint(bp.z, stream)
    if zs == bp.z:
        return UKind.SELF_ADJOINT
    if zs == scale(bp.z, 2):
        return UKind.SKEW
    raise InternalInconsistency(f"adjoint of {format_word(bp.z)} is {format_word(zs)}, not +-z")


def ad_u(w: Word, bp: BreakPoint, kind: UKind, stream: Bitstream) -> Word:
    """u* w u: w itself if it commutes with z, else -z w (skew) or -i z w (self-adjoint)."""
    if not commutation_bit(bp.z, w, stream):
        return w
    factor = scale(bp.z, 2 if kind is UKind.SKEW else 3)
    return multiply(factor, w, stream)


class PerturbationResult:
    """Lazily extended generators u_0, u_1, ... of beta and the digits of its bitstream."""

    def __init__(self, base: Bitstream, bp: BreakPoint, kind: UKind, perturbed: Optional[Perturbed] = None):
        self.base = base
        self.break_point = bp
        self.kind = kind
        self._u = [Word.generator(0)]
        self._lock = threading.Lock()
        self.perturbed = perturbed if perturbed is not None else Perturbed(base, bp.n, _result=self)
        if perturbed is not None:
            perturbed._result = self
        self.first_difference: Optional[int] = None
        self.checks: dict[str, bool] = {}

    @property
    def n(self) -> int:
        return self.break_point.n

    @property
    def d(self) -> int:
        return self.break_point.d

    @property
    def z(self) -> Word:
        return self.break_point.z

    def beta(self, w: Word) -> Word:
        return ad_u(shift(w, 1), self.break_point, self.kind, self.base)

    def generator(self, i: int) -> Word:
        u = self._u
        if i < len(u):
            return u[i]
        with self._lock:
            u = list(self._u)
            while len(u) <= i:
                u.append(self.beta(u[-1]))
            self._u = u
        return u[i]

    def generators(self, m: int) -> list[Word]:
        self.generator(m - 1)
        return self._u[:m]

    def digit(self, j: int) -> int:
        # b_j is the commutation bit of u_0 = v_0 with u_j
        u = self.generator(j)
        return commutation_bit(Word.generator(0), u, self.base)

    def digits(self, m: int) -> str:
        return self.perturbed.digits(m)

    def dump(self) -> dict:
        return {
            "stream": self.base.descriptor,
            "n": self.n,
            "d": self.d,
            "z": format_word(self.z),
            "kind": self.kind.value,
            "u": [format_word(w) for w in self._u],
        }


def span_check(result: PerturbationResult, m: int) -> bool:
    """True iff exps(u_0..u_{m-1}) span exactly the coordinates 0..m-1 over GF(2)."""
    if m < 1:
        raise ValueError("m must be positive")
    vectors = [w.exps for w in result.generators(m)]
    if any(v >> m for v in vectors):
        return False
    return len(rref(vectors)[0]) == m


def span_checks(result: PerturbationResult, M: int) -> list[bool]:
    """``[span_check(result, m) for m in 1..M]`` computed incrementally."""
    out = []
    basis: dict[int, int] = {}
    for m, w in enumerate(result.generators(M), start=1):
        v = w.exps
        while v:
            h = v.bit_length() - 1
            if h not in basis:
                basis[h] = v
                break
            v ^= basis[h]
        out.append(len(basis) == m and all(h < m for h in basis))
    return out


def transport(result: PerturbationResult, w: Word, k: int) -> Word:
    """V* w V for the unitary V with beta^k(x) = V* alpha^k(x) V.

    V = alpha^{k-1}(u) ... alpha(u) u, and each alpha^t(u) acts on words like
    u with z replaced by alpha^t(z), so words go to words.  Maps
    alpha^k(R)' into beta^k(R)'.
    """
    bp = result.break_point
    for t in range(k - 1, -1, -1):
        w = ad_u(w, BreakPoint(bp.n, shift(bp.z, t), bp.d), result.kind, result.base)
    return w


def in_generator_coordinates(result: PerturbationResult, w: Word) -> int:
    """Exponent vector of w in the perturbed generators u_0, u_1, ... (phase dropped)."""
    v = w.exps
    c = 0
    # u_i has leading bit i, so eliminate from the top
    while v:
        i = v.bit_length() - 1
        v ^= result.generator(i).exps
        c |= 1 << i
    return c


def translation_invariant(result: PerturbationResult, horizon: int) -> bool:
    u = result.generators(horizon + 1)
    base = result.base
    for j in range(horizon + 1):
        bj = commutation_bit(u[0], u[j], base)
        for i in range(1, horizon - j + 1):
            if commutation_bit(u[i], u[i + j], base) != bj:
                return False
    return True


def perturb(
    stream: Bitstream,
    n: int,
    check_horizon: int = 32,
    horizon: Optional[int] = None,
    _perturbed: Optional[Perturbed] = None,
) -> PerturbationResult:
    """Perturb the shift of ``stream`` at break point ``n``; verify the construction's claims.

    Raises ``InternalInconsistency`` with a dump of all computed generators
    if any claim fails.  ``check_horizon`` bounds the extra checks
    (translation invariance, span equality, self-adjointness); 0 skips them.
    """
    bp = break_point_at(stream, n, horizon)
    kind = build_u(bp, stream)
    result = PerturbationResult(stream, bp, kind, _perturbed)
    d = bp.d
    top = n + 2 * d - 1

    def fail(msg):
        raise InternalInconsistency(f"{stream}@{n}: {msg}", result.dump())

    u = result.generators(top + 1)
    if any(u[i] != Word.generator(i) for i in range(n + d - 1)):
        fail("u_i != v_i below n + d - 1")
    zv = multiply(bp.z, Word.generator(n + d - 1), stream)
    if u[n + d - 1].exps != zv.exps:
        fail(f"u_(n+d-1) = {format_word(u[n + d - 1])} is not a multiple of z v_(n+d-1)")
    b = [result.digit(j) for j in range(top + 1)]
    a = stream.bits(top + 1)
    diffs = [j for j in range(top + 1) if a[j] != b[j]]
    if diffs != [top]:
        fail(f"digits differ at {diffs}, expected only at n + 2d - 1 = {top}")
    if b[0] != 0:
        fail("b_0 != 0")
    result.first_difference = top
    result.checks = {"agreement": True, "first_difference": True}

    if check_horizon:
        H = max(check_horizon, 1)
        checks = {
            "self_adjoint": all(adjoint(w, stream) == w for w in result.generators(H + 1)),
            "span_equality": all(span_checks(result, H)),
            "translation_invariance": translation_invariant(result, H),
        }
        result.checks.update(checks)
        bad = [k for k, ok in checks.items() if not ok]
        if bad:
            fail(f"failed checks: {', '.join(bad)}")
    return result


def family(stream: Bitstream, count: int, limit: int, check_horizon: int = 32) -> list[PerturbationResult]:
    """Perturbations of ``stream`` at its first ``count`` break points.

    The resulting bitstreams are pairwise distinct, so the shifts are mutually
    non-conjugate while all being cocycle conjugate to the original.
    """
    bps = break_points(stream, limit, count=count)
    if len(bps) < count:
        raise NotEnoughBreakPoints(f"{stream}: only {len(bps)} break points <= {limit}, need {count}")
    results = [perturb(stream, bp.n, check_horizon) for bp in bps[:count]]
    firsts = [r.first_difference for r in results]
    if any(x >= y for x, y in zip(firsts, firsts[1:])):
        raise InternalInconsistency(f"first differences not increasing: {firsts}")
    return results
