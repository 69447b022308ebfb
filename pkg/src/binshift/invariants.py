"""Cocycle-conjugacy invariants: nullity structure, commutant index, classification tables.

The commutant index computed here is combinatorial: the least k >= 1 such
that some nontrivial word commutes with every v_j, j >= k.  For eventually
periodic streams the infinite family of conditions collapses to finitely
many rows, so the answer is exact for every support length up to ``m_max``.
"""
from __future__ import annotations

import csv
import enum
import io
import itertools
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .bitstream import Bitstream, EventuallyPeriodic, ExplicitPrefix, Perturbed, parse_descriptor, validate
from .errors import StructureViolation
from .gf2 import GF2Matrix, kernel, nullity_sequence
from .perturbation import break_point_at, in_generator_coordinates, is_break_point, plateau_depth, transport
from .words import Word, format_word

SCHEMA_VERSION = 1
COLUMNS = (
    "descriptor",
    "digits",
    "nullity_seq",
    "structure",
    "break_points",
    "depths",
    "commutant_index",
    "index_kind",
    "witness",
)


# -- nullity structure -------------------------------------------------------

@dataclass(frozen=True)
class NullityString:
    start: int  # n of the first entry (nullities are indexed from 1)
    values: tuple[int, ...]
    complete: bool

    @property
    def peak(self) -> int:
        return max(self.values)

    @property
    def kind(self) -> str:
        if not self.complete:
            return "Partial"
        return "Short" if self.peak == 1 else "Peak"

    def __str__(self) -> str:
        if not self.complete:
            return f"Partial({len(self.values)})"
        return "Short" if self.peak == 1 else f"Peak({self.peak})"


@dataclass(frozen=True)
class NullityProfile:
    sequence: tuple[int, ...]
    strings: tuple[NullityString, ...]

    @property
    def partial(self) -> bool:
        return bool(self.strings) and not self.strings[-1].complete

    def __str__(self) -> str:
        return " ".join(map(str, self.strings))


def parse_structure(sequence: Sequence[int]) -> NullityProfile:
    """Split (nu_1, nu_2, ...) into strings 1,0 and 1,2,...,r,...,1,0.

    A trailing incomplete string is kept and marked partial; anything else
    raises ``StructureViolation`` at the first offending n.
    """
    seq = tuple(sequence)
    strings = []
    i = 0
    while i < len(seq):
        start = i
        if seq[i] != 1:
            raise StructureViolation(f"string must start with 1, got {seq[i]}", i + 1)
        r = 1
        i += 1
        while i < len(seq) and seq[i] == r + 1:
            r += 1
            i += 1
        level = r
        while i < len(seq) and level > 0:
            if seq[i] != level - 1:
                raise StructureViolation(f"expected {level - 1} on descent from {r}, got {seq[i]}", i + 1)
            level -= 1
            i += 1
        strings.append(NullityString(start + 1, seq[start:i], level == 0))
    return NullityProfile(seq, tuple(strings))


# -- eventual periodicity ----------------------------------------------------

def detect_eventual_period(stream: Bitstream, bound: int = 64) -> Optional[EventuallyPeriodic]:
    """Empirical (preperiod, period) with both <= bound, checked on [q, q + 2*bound].

    Only evidence, never proof: callers must label results derived from it.
    """
    evp = stream.as_eventually_periodic()
    if evp is not None:
        return evp.canonical()
    a = stream.bits(4 * bound + 1)
    A = stream.prefix_int(4 * bound + 1)
    for p in range(1, bound + 1):
        width = 3 * bound + 1
        mismatch = (A ^ (A >> p)) & ((1 << width) - 1)
        q = mismatch.bit_length()  # one past the last j with a_j != a_{j+p}
        if q <= bound:
            return EventuallyPeriodic(a[:q], a[q:q + p]).canonical()
    return None


# -- commutant index ---------------------------------------------------------

class Verdict(enum.Enum):
    EXACT = "exact"
    LOWER_BOUND = "lower-bound"
    INFINITE_BY_APERIODICITY = "infinite-by-aperiodicity"


@dataclass(frozen=True)
class CommutantIndexResult:
    verdict: Verdict
    k: Optional[int]
    witness: Optional[int]  # exponent vector of a word in the relative commutant
    k_max: int
    m_max: int
    certification: str  # "exact", "empirical" (detected period) or "bounded"
    periodic_form: Optional[str] = None

    @property
    def witness_word(self) -> Optional[Word]:
        return None if self.witness is None else Word(0, self.witness)

    def value(self) -> str:
        if self.verdict is Verdict.EXACT:
            return str(self.k)
        if self.verdict is Verdict.LOWER_BOUND:
            return f">={self.k}"
        return "inf"

    def kind(self) -> str:
        if self.verdict is Verdict.EXACT and self.certification != "exact":
            return f"exact-{self.certification}"
        return self.verdict.value

    def same_verdict(self, other: "CommutantIndexResult") -> bool:
        return (self.verdict, self.k) == (other.verdict, other.k)

    def __str__(self) -> str:
        if self.verdict is Verdict.EXACT:
            return f"Exact({self.k})"
        if self.verdict is Verdict.LOWER_BOUND:
            return f"LowerBound({self.k})"
        return "InfiniteByAperiodicity"


def relative_commutant_rows(stream: Bitstream, k: int, m: int, stop: int) -> list[int]:
    """Rows j in [k, stop) of the condition sum_i c_i a_|j-i| = 0 on supports < m."""
    T, K = stream.mirror_window(max(stop - 1, m - 1, 0))
    mask = (1 << m) - 1
    return [(T >> (K - j)) & mask for j in range(k, stop)]


def _least_index(rows: list[int], m: int, periodic_from: Optional[int]) -> Optional[int]:
    """Least k >= 1 such that rows[k-1:] (row j at position j-1) leave a nonzero kernel.

    With ``periodic_from`` set, rows from that index on stand for every
    later row and cannot be dropped, so None means no witness at any k.
    """
    basis: dict[int, int] = {}

    def insert(r):
        while r:
            h = r.bit_length() - 1
            if h not in basis:
                basis[h] = r
                return
            r ^= basis[h]

    first = len(rows) + 1
    if periodic_from is not None:
        for r in rows[periodic_from - 1:]:
            insert(r)
        if len(basis) == m:
            return None
        first = periodic_from
    for j in range(first - 1, 0, -1):
        insert(rows[j - 1])
        if len(basis) == m:
            return j + 1
    return 1


def _periodic_search(stream: Bitstream, q: int, p: int, m: int) -> tuple[Optional[int], Optional[int]]:
    """Least k >= 1 admitting a witness of support < m, and that witness.

    Rows j >= q + m - 1 repeat with period p, so rows [k, q + m - 1 + p)
    are equivalent to all rows j >= k.
    """
    periodic_from = max(1, q + m - 1)
    rows = relative_commutant_rows(stream, 1, m, periodic_from + p)
    k = _least_index(rows, m, periodic_from)
    if k is None:
        return None, None
    sub = rows[k - 1:]
    witness = kernel(GF2Matrix(len(sub), m, tuple(sub))).vectors[0]
    return k, witness


def commutant_index(
    stream: Bitstream,
    k_max: int = 64,
    m_max: int = 24,
    detect_bound: int = 64,
) -> CommutantIndexResult:
    """Combinatorial commutant index (searching supports below ``m_max``).

    Eventually periodic descriptors are decided exactly.  Perturbed streams
    whose base has an exact index are certified by transporting the base
    witness through the perturbing unitary (upper bound) and a finite-row
    search on the perturbed digits (lower bound).  Otherwise an empirically
    detected period is used, labelled as such.
    """
    validate(stream)
    if getattr(stream, "asserted_aperiodic", False):
        return CommutantIndexResult(Verdict.INFINITE_BY_APERIODICITY, None, None, k_max, m_max, "aperiodic")
    evp = stream.as_eventually_periodic()
    if evp is not None:
        return _from_periodic(stream, evp, k_max, m_max, "exact")
    if isinstance(stream, Perturbed):
        found = _transported(stream, k_max, m_max)
        if found is not None:
            return found
    # a finite prefix says nothing about its tail, so only bound it
    evp = detect_eventual_period(stream, detect_bound) if stream._last_index is None else None
    if evp is not None:
        return _from_periodic(stream, evp, k_max, m_max, "empirical")
    return _bounded_search(stream, k_max, m_max)


def _from_periodic(stream, evp, k_max, m_max, certification) -> CommutantIndexResult:
    evp = evp.canonical()
    q, p = len(evp.preperiod), len(evp.period)
    k, witness = _periodic_search(stream, q, p, m_max)
    if k is None or k > k_max:
        return CommutantIndexResult(Verdict.LOWER_BOUND, k_max + 1, None, k_max, m_max, certification, evp.descriptor)
    return CommutantIndexResult(Verdict.EXACT, k, witness, k_max, m_max, certification, evp.descriptor)


def _transported(stream: Perturbed, k_max: int, m_max: int) -> Optional[CommutantIndexResult]:
    base = commutant_index(stream.base, k_max, m_max)
    if base.verdict is not Verdict.EXACT:
        return None
    k = base.k
    result = stream.result
    c = in_generator_coordinates(result, transport(result, base.witness_word, k))
    m = max(m_max, c.bit_length())
    stop = k + 4 * m + 64
    lower = _least_index(relative_commutant_rows(stream, 1, m, stop), m, None)
    if lower != k or not _witness_holds(stream, c, k, stop):
        return None
    return CommutantIndexResult(Verdict.EXACT, k, c, k_max, m_max, "transported")


def _bounded_search(stream: Bitstream, k_max: int, m_max: int) -> CommutantIndexResult:
    # no rows beyond `stop` are consulted: dropping rows can only add candidates,
    # so the first k with a candidate is a lower bound and nothing more
    stop = k_max + 4 * m_max
    if stream._last_index is not None:
        stop = min(stop, stream._last_index + 1)
    m = min(m_max, stop)
    k = _least_index(relative_commutant_rows(stream, 1, m, stop), m, None)
    return CommutantIndexResult(Verdict.LOWER_BOUND, min(k, k_max + 1), None, k_max, m, "bounded")


def _witness_holds(stream: Bitstream, c: int, k: int, stop: int) -> bool:
    idx = [i for i in range(c.bit_length()) if (c >> i) & 1]
    return all(sum(stream.at(abs(j - i)) for i in idx) % 2 == 0 for j in range(k, stop))


def verify_witness(stream: Bitstream, result: CommutantIndexResult, span: int) -> bool:
    """Re-check the witness against every v_j, j in [k, k + span], by direct digit reads."""
    if result.witness is None:
        return True
    return _witness_holds(stream, result.witness, result.k, result.k + span + 1)


# -- classification ----------------------------------------------------------

@dataclass
class ClassificationRow:
    descriptor: str
    digits: str
    nullity_seq: tuple[int, ...]
    structure: str
    break_points: tuple[int, ...]
    depths: tuple[Optional[int], ...]
    commutant_index: str
    index_kind: str
    witness: str
    valid: bool = True

    def as_record(self) -> dict[str, str]:
        return {
            "descriptor": self.descriptor,
            "digits": self.digits,
            "nullity_seq": " ".join(map(str, self.nullity_seq)),
            "structure": self.structure,
            "break_points": " ".join(map(str, self.break_points)),
            "depths": " ".join("?" if d is None else str(d) for d in self.depths),
            "commutant_index": self.commutant_index,
            "index_kind": self.index_kind,
            "witness": self.witness,
        }


@dataclass
class ClassificationTable:
    N: int
    rows: list[ClassificationRow]
    indistinguishable: list[list[str]] = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
        writer.writeheader()
        for row in self.rows:
            writer.writerow(row.as_record())
        return buf.getvalue()

    def to_json(self) -> str:
        doc = {
            "schema_version": SCHEMA_VERSION,
            "columns": list(COLUMNS),
            "horizon": self.N,
            "rows": [row.as_record() for row in self.rows],
            "indistinguishable": self.indistinguishable,
        }
        return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def classify_row(stream: Bitstream, N: int, k_max: int = 64, m_max: int = 24) -> ClassificationRow:
    report = validate(stream, horizon=N, strict=False)
    seq = nullity_sequence(stream, N)
    bps: list[int] = []
    depths: list[Optional[int]] = []
    if report.ok:
        structure = str(parse_structure(seq))
        for n in range(1, N + 1):
            if is_break_point(stream, n):
                bp = break_point_at(stream, n)
                bps.append(bp.n)
                depths.append(bp.d)
        ci = commutant_index(stream, k_max, m_max)
        index, kind = ci.value(), ci.kind()
        witness = format_word(ci.witness_word) if ci.witness is not None else ""
    else:
        try:
            structure = str(parse_structure(seq))
        except StructureViolation as exc:
            structure = f"Violation@{exc.index}"
        for n in range(1, N + 1):
            if is_break_point(stream, n):
                bps.append(n)
                depths.append(plateau_depth(stream, n, horizon=4 * N))
        index, witness = "", ""
        kind = "invalid" if not report.a0_ok else "mirror-periodic"
    return ClassificationRow(
        stream.descriptor, stream.digits(N), seq, structure, tuple(bps), tuple(depths),
        index, kind, witness, report.ok,
    )


def _row_job(args) -> ClassificationRow:
    descriptor, N, k_max, m_max = args
    return classify_row(parse_descriptor(descriptor), N, k_max, m_max)


def classify(
    streams: Sequence[Bitstream],
    N: int,
    k_max: int = 64,
    m_max: int = 24,
    jobs: int = 1,
) -> ClassificationTable:
    if jobs > 1:
        jobs_args = [(s.descriptor, N, k_max, m_max) for s in streams]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_row_job, jobs_args, chunksize=max(1, len(jobs_args) // (8 * jobs))))
    else:
        rows = [classify_row(s, N, k_max, m_max) for s in streams]
    groups: dict[str, list[str]] = {}
    for row in rows:
        groups.setdefault(row.digits, []).append(row.descriptor)
    same = [g for g in groups.values() if len(g) > 1]
    return ClassificationTable(N, rows, same)


def census_streams(length: int) -> list[ExplicitPrefix]:
    """All prefixes of the given length with a_0 = 0, in lexicographic order."""
    return [ExplicitPrefix((0,) + tail) for tail in itertools.product((0, 1), repeat=length - 1)]


def census(length: int, k_max: int = 64, m_max: int = 24, jobs: int = 1) -> ClassificationTable:
    return classify(census_streams(length), length, k_max, m_max, jobs)
