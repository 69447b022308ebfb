"""Run the structural checks on a single stream and collect pass/fail outcomes."""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable

from .bitstream import Bitstream, validate
from .gf2 import kernel, nullity_sequence, parity, stream_kernel, toeplitz
from .invariants import Verdict, commutant_index, parse_structure
from .perturbation import BreakPoint, break_points, perturb, span_checks, translation_invariant
from .words import Word, adjoint, multiply

EXHAUSTIVE_LIMIT = 12


@dataclass(frozen=True)
class CheckOutcome:
    name: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}" + (f": {self.detail}" if self.detail else "")


def central_vector_count(stream: Bitstream, n: int) -> int:
    """Number of exponent vectors c in GF(2)^n whose word commutes with v_0..v_{n-1}."""
    rows = toeplitz(stream, n).bits
    return sum(1 for c in range(2 ** n) if not any(parity(r & c) for r in rows))


def plateau_centers_ok(stream: Bitstream, bp: BreakPoint) -> bool:
    """The shifted words alpha^s(z) span the centers along the peak at bp.

    Up the peak, Z_{n+m} is spanned by s = 0..m; down the peak, Z_{n+d+t}
    by s = t+1..d-1.  Distinct shifts have distinct leading bits, so
    membership plus a matching count gives equality of spans.
    """
    n, d, z = bp.n, bp.d, bp.z.exps
    plan = [(n + m, range(0, m + 1)) for m in range(d)]
    plan += [(n + d + t, range(t + 1, d)) for t in range(d)]
    for size, shifts in plan:
        A = toeplitz(stream, size)
        if len(shifts) != kernel(A).nullity:
            return False
        if any(A.apply(z << s) for s in shifts):
            return False
    return True


def _random_word(rng: random.Random, width: int) -> Word:
    return Word(rng.randrange(4), rng.getrandbits(width))


def verify_stream(stream: Bitstream, N: int = 16, seed: int = 0, cases: int = 200) -> list[CheckOutcome]:
    """Checks nullity structure, centers, break points and the perturbation on ``stream``.

    ``InvalidStream``/``MirrorPeriodic`` propagate (bad input);
    ``InternalInconsistency`` propagates from the construction itself.
    """
    validate(stream, horizon=max(N, 64))
    out: list[CheckOutcome] = []

    def check(name: str, fn: Callable[[], object]):
        value = fn()
        ok, detail = (value, "") if isinstance(value, bool) else value
        out.append(CheckOutcome(name, bool(ok), detail))

    seq = nullity_sequence(stream, N)

    def toeplitz_shape():
        for n in range(1, N + 1):
            A = toeplitz(stream, n)
            if not A.is_symmetric() or any(A[i, i] for i in range(n)):
                return False, f"n={n}"
        return True

    def nullity_routes():
        for n in range(1, N + 1):
            if stream_kernel(stream, n).nullity != seq[n - 1]:
                return False, f"n={n}"
        steps = (0,) + seq
        if any(abs(x - y) != 1 for x, y in zip(steps, steps[1:])):
            return False, "successive nullities must differ by 1"
        return True

    def structure():
        return True, str(parse_structure(seq))

    def center_count():
        for n in range(1, min(N, EXHAUSTIVE_LIMIT) + 1):
            if central_vector_count(stream, n) != 2 ** seq[n - 1]:
                return False, f"n={n}"
        return True

    check("toeplitz symmetric, zero diagonal", toeplitz_shape)
    check("nullity: incremental == elimination, steps of 1", nullity_routes)
    check("nullity structure", structure)
    check(f"center dimension 2^nu_n (n <= {min(N, EXHAUSTIVE_LIMIT)})", center_count)

    bps = break_points(stream, N)
    check("break points found", lambda: (bool(bps), " ".join(f"{bp.n}(d={bp.d})" for bp in bps)))
    check("plateau centers from shifted z", lambda: all(plateau_centers_ok(stream, bp) for bp in bps))

    results = [perturb(stream, bp.n, check_horizon=N) for bp in bps]
    check(
        "first difference at n + 2d - 1",
        lambda: all(r.first_difference == r.n + 2 * r.d - 1 for r in results),
    )
    check("span equality for m <= N", lambda: all(all(span_checks(r, N)) for r in results))
    check("translation invariance", lambda: all(translation_invariant(r, N) for r in results))
    check(
        "nullity sequence preserved",
        lambda: all(nullity_sequence(r.perturbed, N) == seq for r in results),
    )
    firsts = [r.first_difference for r in results]
    check("perturbed streams pairwise distinct", lambda: firsts == sorted(set(firsts)))

    if stream.as_eventually_periodic() is not None and results:
        def index_invariance():
            base = commutant_index(stream)
            pert = commutant_index(results[0].perturbed)
            ok = base.verdict is Verdict.EXACT and base.same_verdict(pert)
            return ok, f"{base} vs {pert} ({pert.kind()})"

        check("commutant index invariant under perturbation", index_invariance)

    rng = random.Random(seed)
    width = min(N, 10)

    def word_laws():
        for _ in range(cases):
            w1, w2, w3 = (_random_word(rng, width) for _ in range(3))
            if multiply(multiply(w1, w2, stream), w3, stream) != multiply(w1, multiply(w2, w3, stream), stream):
                return False, "associativity"
            if adjoint(multiply(w1, w2, stream), stream) != multiply(adjoint(w2, stream), adjoint(w1, stream), stream):
                return False, "adjoint of product"
            if multiply(w1, adjoint(w1, stream), stream) != Word():
                return False, "unitarity"
        return True

    def beta_homomorphism():
        for r in results:
            for _ in range(cases // max(len(results), 1)):
                w1, w2 = _random_word(rng, width), _random_word(rng, width)
                if r.beta(multiply(w1, w2, stream)) != multiply(r.beta(w1), r.beta(w2), stream):
                    return False, f"n={r.n}"
                if r.beta(adjoint(w1, stream)) != adjoint(r.beta(w1), stream):
                    return False, f"n={r.n}"
        return True

    check(f"word group laws (seed {seed})", word_laws)
    check(f"beta is a *-homomorphism (seed {seed})", beta_homomorphism)
    return out


__all__ = ["CheckOutcome", "central_vector_count", "plateau_centers_ok", "verify_stream"]
