"""Bitstreams a_0, a_1, ... over GF(2) and their textual descriptors.

A bitstream fixes the commutation relations of the generators:
``v_i v_{i+j} = (-1)^{a_j} v_{i+j} v_i``.  Four descriptor kinds are
supported, all with the grammar

    prefix:<bits> | evp:<prebits>/<perbits> | rule:<name> | perturbed:<descriptor>@<n>

Every stream evaluates lazily and caches the digits it has produced.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from typing import Callable, Optional

from .errors import IndexBeyondPrefix, InputError, InvalidStream, MirrorPeriodic, ParseError

ZERO_EXTEND = "zero-extend"
ERROR_BEYOND = "error-beyond"

#: maximum nesting of ``perturbed:`` descriptors
MAX_PERTURBATION_DEPTH = 8


def _squares(j: int) -> int:
    return int(j > 0 and math.isqrt(j) ** 2 == j)


def _thue_morse(j: int) -> int:
    return j.bit_count() & 1


# name -> (rule, asserted aperiodic)
RULES: dict[str, tuple[Callable[[int], int], bool]] = {
    "squares": (_squares, True),
    "thue-morse": (_thue_morse, True),
}


class Bitstream:
    """Base class; subclasses implement ``_compute(j)`` and ``descriptor``."""

    depth = 0
    _last_index: Optional[int] = None  # set when digits past some index are undefined

    def __init__(self):
        self._digits: list[int] = []
        self._mirror = (0, -1)  # (window int, reach)
        self._lock = threading.RLock()
        self._memo: dict = {}

    # -- element access -------------------------------------------------
    def at(self, j: int) -> int:
        if j < 0:
            raise ValueError("bitstream index must be non-negative")
        digits = self._digits
        if j < len(digits):
            return digits[j]
        self._extend(j + 1)
        return self._digits[j]

    def _extend(self, n: int) -> None:
        with self._lock:
            digits = list(self._digits)
            for j in range(len(digits), n):
                digits.append(self._compute(j) & 1)
            # publish whole list so concurrent readers see a consistent prefix
            self._digits = digits

    def _compute(self, j: int) -> int:
        raise NotImplementedError

    def bits(self, n: int) -> tuple[int, ...]:
        if n > len(self._digits):
            self._extend(n)
        return tuple(self._digits[:n])

    def digits(self, n: int) -> str:
        return "".join(map(str, self.bits(n)))

    def prefix_int(self, n: int) -> int:
        """Bits a_0..a_{n-1} packed into an int (bit j holds a_j)."""
        return int(self.digits(n)[::-1] or "0", 2)

    def mirror_window(self, reach: int) -> tuple[int, int]:
        """Return ``(T, K)`` with ``K >= reach`` and bit ``t + K`` of T equal to a_{|t|}.

        ``T >> (K - i)`` is then the i-th row of every Toeplitz matrix built
        from this stream, for all columns up to ``K + i``.
        """
        T, K = self._mirror
        if K >= reach:
            return T, K
        with self._lock:
            T, K = self._mirror
            if K < reach:
                K = max(reach, 2 * K, 32)
                if self._last_index is not None:
                    K = max(reach, min(K, self._last_index))
                fwd = self.digits(K + 1)
                T = int(fwd[::-1] + fwd[1:], 2)  # MSB first: a_K .. a_1 a_0 a_1 .. a_K
                self._mirror = (T, K)
        return T, K

    # -- identity --------------------------------------------------------
    @property
    def descriptor(self) -> str:
        raise NotImplementedError

    def __str__(self) -> str:
        return self.descriptor

    def __repr__(self) -> str:
        return f"Bitstream({self.descriptor!r})"

    def __eq__(self, other) -> bool:
        return isinstance(other, Bitstream) and self.descriptor == other.descriptor

    def __hash__(self) -> int:
        return hash(self.descriptor)

    def __getstate__(self):
        return {"descriptor": self.descriptor}

    def __setstate__(self, state):
        clone = parse_descriptor(state["descriptor"])
        self.__dict__.update(clone.__dict__)

    def as_eventually_periodic(self) -> Optional["EventuallyPeriodic"]:
        """Exact eventually periodic form, if the descriptor provides one."""
        return None


class ExplicitPrefix(Bitstream):
    def __init__(self, bits, tail_policy: str = ZERO_EXTEND):
        super().__init__()
        self.prefix = tuple(int(b) & 1 for b in bits)
        if tail_policy not in (ZERO_EXTEND, ERROR_BEYOND):
            raise ValueError(f"unknown tail policy {tail_policy!r}")
        self.tail_policy = tail_policy
        if tail_policy == ERROR_BEYOND:
            self._last_index = len(self.prefix) - 1

    def _compute(self, j):
        if j < len(self.prefix):
            return self.prefix[j]
        if self.tail_policy == ERROR_BEYOND:
            raise IndexBeyondPrefix(f"index {j} beyond prefix of length {len(self.prefix)}")
        return 0

    @property
    def descriptor(self):
        return "prefix:" + "".join(map(str, self.prefix))

    def as_eventually_periodic(self):
        if self.tail_policy == ERROR_BEYOND:
            return None
        return EventuallyPeriodic(self.prefix, (0,))


class EventuallyPeriodic(Bitstream):
    def __init__(self, preperiod, period):
        super().__init__()
        self.preperiod = tuple(int(b) & 1 for b in preperiod)
        self.period = tuple(int(b) & 1 for b in period)
        if not self.period:
            raise InputError("eventually periodic stream needs a nonempty period")

    def _compute(self, j):
        q = len(self.preperiod)
        if j < q:
            return self.preperiod[j]
        return self.period[(j - q) % len(self.period)]

    @property
    def descriptor(self):
        return "evp:{}/{}".format("".join(map(str, self.preperiod)), "".join(map(str, self.period)))

    def as_eventually_periodic(self):
        return self

    def canonical(self) -> "EventuallyPeriodic":
        """Same stream with the shortest period, then the shortest preperiod."""
        per = self.period
        p = len(per)
        for d in range(1, p + 1):
            if p % d == 0 and all(per[i] == per[(i + d) % p] for i in range(p)):
                per = per[:d]
                break
        pre = self.preperiod
        while pre and pre[-1] == per[-1]:
            per = (pre[-1],) + per[:-1]
            pre = pre[:-1]
        return EventuallyPeriodic(pre, per)


class Rule(Bitstream):
    def __init__(self, name: str):
        super().__init__()
        if name not in RULES:
            raise InputError(f"unknown rule {name!r}; known: {', '.join(sorted(RULES))}")
        self.name = name
        self._rule, self.asserted_aperiodic = RULES[name]

    def _compute(self, j):
        return self._rule(j)

    @property
    def descriptor(self):
        return f"rule:{self.name}"


class Perturbed(Bitstream):
    """Bitstream of the perturbed shift built at break point ``n`` of ``base``.

    Digits come from the perturbation module and are memoized here.
    """

    def __init__(self, base: Bitstream, n: int, _result=None):
        super().__init__()
        if n < 1:
            raise InputError("break point must be a positive integer")
        self.depth = base.depth + 1
        if self.depth > MAX_PERTURBATION_DEPTH:
            raise InputError(f"perturbation depth {self.depth} exceeds {MAX_PERTURBATION_DEPTH}")
        self.base = base
        self.n = n
        self._result = _result

    @property
    def result(self):
        if self._result is None:
            with self._lock:
                if self._result is None:
                    from .perturbation import perturb

                    self._result = perturb(self.base, self.n, _perturbed=self)
        return self._result

    def _compute(self, j):
        return self.result.digit(j)

    @property
    def descriptor(self):
        return f"perturbed:{self.base.descriptor}@{self.n}"


# -- parsing -----------------------------------------------------------------

def _parse_bits(text: str, offset: int, full: str, allow_empty: bool = False) -> tuple[int, ...]:
    for i, ch in enumerate(text):
        if ch not in "01":
            raise ParseError(f"unexpected character {ch!r}", full, offset + i, "'0' or '1'")
    if not text and not allow_empty:
        raise ParseError("empty bit string", full, offset, "at least one bit")
    return tuple(int(ch) for ch in text)


def parse_descriptor(text: str) -> Bitstream:
    return _parse(text, text, 0)


def _parse(text: str, full: str, offset: int) -> Bitstream:
    head, sep, body = text.partition(":")
    if not sep:
        raise ParseError("missing descriptor kind", full, offset, "'prefix:', 'evp:', 'rule:' or 'perturbed:'")
    start = offset + len(head) + 1
    if head == "prefix":
        return ExplicitPrefix(_parse_bits(body, start, full))
    if head == "evp":
        pre, slash, per = body.partition("/")
        if not slash:
            raise ParseError("missing '/'", full, start + len(body), "'/'")
        pre_bits = _parse_bits(pre, start, full, allow_empty=True)
        per_bits = _parse_bits(per, start + len(pre) + 1, full)
        return EventuallyPeriodic(pre_bits, per_bits)
    if head == "rule":
        if body not in RULES:
            raise ParseError(f"unknown rule {body!r}", full, start, " | ".join(sorted(RULES)))
        return Rule(body)
    if head == "perturbed":
        inner, at, num = body.rpartition("@")
        if not at:
            raise ParseError("missing '@<n>'", full, start + len(body), "'@'")
        if not num.isdigit() or int(num) < 1:
            raise ParseError("break point must be a positive integer", full, start + len(inner) + 1, "digits")
        return Perturbed(_parse(inner, full, start), int(num))
    raise ParseError(f"unknown descriptor kind {head!r}", full, offset, "'prefix', 'evp', 'rule' or 'perturbed'")


def format_descriptor(stream: Bitstream) -> str:
    return stream.descriptor


# -- validation --------------------------------------------------------------

@dataclass(frozen=True)
class ValidityReport:
    descriptor: str
    a0_ok: bool
    mirror_periodic: bool
    mirror_period: Optional[int]
    exact: bool  # False: only "no mirror period <= horizon" was checked
    horizon: int
    asserted_aperiodic: Optional[bool] = None

    @property
    def ok(self) -> bool:
        return self.a0_ok and not self.mirror_periodic

    def verdict(self) -> str:
        if not self.a0_ok:
            return "invalid: a_0 != 0"
        if self.mirror_periodic:
            how = "exact" if self.exact else f"found at horizon {self.horizon}"
            return f"mirror-periodic (period {self.mirror_period}, {how})"
        if self.exact:
            return "mirror aperiodic (exact)"
        note = f"no mirror period <= {self.horizon}"
        if self.asserted_aperiodic:
            note += ", aperiodic by assertion"
        return note


def _mirror_period_ok(at, p: int, span: int) -> bool:
    # mirror j -> a_|j| has period p iff a is p-periodic and a_{p-i} = a_i
    if any(at(j + p) != at(j) for j in range(span)):
        return False
    return all(at(p - i) == at(i) for i in range(p + 1))


def _bounded_window(p: int) -> int:
    # depends on p only, so a verdict found at horizon H persists for H' >= H
    return 4 * p + 64


def validate(stream: Bitstream, horizon: int = 64, strict: bool = True) -> ValidityReport:
    """Check a_0 = 0 and that the mirror sequence ..., a_1, a_0, a_1, ... is not periodic.

    Eventually periodic streams get an exact verdict.  Other descriptors are
    only checked for mirror periods up to ``horizon``.  With ``strict`` the
    failures raise ``InvalidStream`` / ``MirrorPeriodic``.
    """
    if horizon < 1:
        raise ValueError("horizon must be positive")
    a0_ok = stream.at(0) == 0
    evp = stream.as_eventually_periodic()
    asserted = getattr(stream, "asserted_aperiodic", None)
    found = None
    if evp is not None:
        exact = True
        span = len(evp.preperiod) + len(evp.period)
        for p in range(1, span + 1):
            if _mirror_period_ok(evp.at, p, span):
                found = p
                break
    else:
        exact = False
        limit = horizon
        if isinstance(stream, ExplicitPrefix):
            limit = min(horizon, len(stream.prefix) - 1)
        for p in range(1, limit + 1):
            span = _bounded_window(p)
            if isinstance(stream, ExplicitPrefix):
                span = len(stream.prefix) - p
            if _mirror_period_ok(stream.at, p, span):
                found = p
                break
        if asserted and found is not None:
            raise InvalidStream(f"{stream} is flagged aperiodic but shows mirror period {found}")
    report = ValidityReport(stream.descriptor, a0_ok, found is not None, found, exact, horizon, asserted)
    if strict:
        if not a0_ok:
            raise InvalidStream(f"{stream}: a_0 must be 0")
        if found is not None:
            raise MirrorPeriodic(f"{stream}: mirror sequence has period {found}", found)
    return report
