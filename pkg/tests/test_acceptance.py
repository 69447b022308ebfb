"""Acceptance gate: one test per criterion, each reporting a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v``; the summary section
at the end of the run lists every criterion.
"""
import itertools
import random
import time

import numpy as np
import pytest

from binshift.bitstream import EventuallyPeriodic, ExplicitPrefix, parse_descriptor, validate
from binshift.gf2 import nullity, nullity_sequence
from binshift.invariants import Verdict, census, census_streams, commutant_index, parse_structure
from binshift.perturbation import UKind, ad_u, break_points, build_u, family, perturb, span_checks
from binshift.verify import plateau_centers_ok
from binshift.words import Word, adjoint, check_palindrome_center, commutation_bit, multiply
from oracles import beta_orbit_dense, brute_commutant_index, jordan_wigner, perturbing_unitary, same_matrix, word_matrix

SEED = 20240611


def evp_population(max_total):
    """Distinct canonical eventually periodic streams with a_0 = 0 and preperiod + period <= max_total."""
    seen = {}
    for total in range(1, max_total + 1):
        for rest in itertools.product((0, 1), repeat=total - 1):
            bits = (0,) + rest
            for p in range(1, total + 1):
                s = EventuallyPeriodic(bits[: total - p], bits[total - p:]).canonical()
                seen.setdefault(s.descriptor, s)
    return [s for _, s in sorted(seen.items()) if validate(s, strict=False).ok]


@pytest.fixture(scope="module")
def population():
    return evp_population(10)


class Timed(list):
    seconds = 0.0


@pytest.fixture(scope="module")
def perturbations(population):
    start = time.perf_counter()
    out = Timed()
    for s in population:
        bps = break_points(s, 400, count=3)
        assert len(bps) == 3, s
        out.extend(perturb(s, bp.n, check_horizon=0) for bp in bps)
    out.seconds = time.perf_counter() - start
    return out


@pytest.fixture(scope="module")
def census16():
    start = time.perf_counter()
    streams = census_streams(16)
    seqs = Timed(nullity_sequence(s, 16) for s in streams)
    seqs.seconds = time.perf_counter() - start
    return streams, seqs


def test_criterion_1_construction(criterion, population, perturbations):
    with criterion(1, "first difference at n+2d-1, u_i = v_i below n+d-1, span equality m <= 32"):
        start = time.perf_counter()
        assert len(population) == 4358
        for r in perturbations:
            top = r.n + 2 * r.d - 1
            a, b = r.base.bits(top + 1), r.perturbed.bits(top + 1)
            assert a[:top] == b[:top] and a[top] != b[top]
            assert r.first_difference == top
            assert r.generators(r.n + r.d - 1) == [Word.generator(i) for i in range(r.n + r.d - 1)]
            assert all(span_checks(r, 32))
        # the fixture did the perturbing; charge its cost too
        assert time.perf_counter() - start + perturbations.seconds < 60


def _central_count_dense(bits, n):
    c = np.arange(2 ** n, dtype=np.int64)
    ok = np.ones(2 ** n, dtype=bool)
    for j in range(n):
        row = sum(1 << i for i in range(n) if bits[abs(j - i)])
        ok &= (np.bitwise_count(c & row) & 1) == 0
    return int(ok.sum())


def test_criterion_2_center_dimension(criterion):
    with criterion(2, "exhaustive center count equals 2^nu_n on 200 random prefixes, n <= 12"):
        start = time.perf_counter()
        rng = random.Random(SEED)
        streams = []
        while len(streams) < 200:
            L = rng.randint(1, 12)
            s = ExplicitPrefix((0,) + tuple(rng.getrandbits(1) for _ in range(L - 1)))
            if validate(s, strict=False).ok:
                streams.append(s)
        for s in streams:
            bits = s.bits(12)
            for n in range(1, 13):
                assert _central_count_dense(bits, n) == 2 ** nullity(s, n), (s, n)
        assert time.perf_counter() - start < 60


def test_criterion_3_structure(criterion, census16):
    with criterion(3, "nullity strings parse on all 2^15 prefixes of length 16"):
        start = time.perf_counter()
        streams, seqs = census16
        assert len(streams) == 2 ** 15
        for seq in seqs:
            parse_structure(seq)
        assert time.perf_counter() - start + seqs.seconds < 60


def test_criterion_4_palindromes_and_plateaus(criterion, perturbations, census16):
    with criterion(4, "palindromic z with endpoints 1 and shifted-z plateau centers at every break point"):
        checked = 0
        for r in perturbations:
            assert check_palindrome_center(r.base, r.n).ok
            assert plateau_centers_ok(r.base, r.break_point)
            checked += 1
        for s in census16[0]:
            if not validate(s, strict=False).ok:
                continue
            for bp in break_points(s, 16):
                assert check_palindrome_center(s, bp.n).ok
                assert plateau_centers_ok(s, bp)
                checked += 1
        assert checked > 150000


def _oracle_streams():
    return evp_population(4) + [parse_descriptor("rule:squares"), parse_descriptor("rule:thue-morse")]


def test_criterion_5_dense_oracle(criterion):
    with criterion(5, "word arithmetic, ad_u and beta orbits agree with 64x64 matrices"):
        start = time.perf_counter()
        n = 6
        for s in _oracle_streams():
            gens = jordan_wigner(s.bits(n), n)
            mats = [word_matrix(gens, 0, c) for c in range(2 ** n)]
            dense = lambda w: (1j ** w.phase) * mats[w.exps]
            for c, d in itertools.product(range(2 ** n), repeat=2):
                w1, w2 = Word(c % 4, c), Word((c + d) % 4, d)
                M1, M2 = dense(w1), dense(w2)
                assert same_matrix(M1 @ M2, dense(multiply(w1, w2, s)))
                sign = -1 if commutation_bit(w1, w2, s) else 1
                assert same_matrix(M1 @ M2, sign * (M2 @ M1))
            for c, phase in itertools.product(range(2 ** n), range(4)):
                w = Word(phase, c)
                assert same_matrix(dense(w).conj().T, dense(adjoint(w, s)))
            for bp in break_points(s, n):
                kind = build_u(bp, s)
                skew = kind is UKind.SKEW
                U = perturbing_unitary(gens, bp.z.exps, skew)
                for c, phase in itertools.product(range(2 ** n), range(4)):
                    w = Word(phase, c)
                    assert same_matrix(U.conj().T @ dense(w) @ U, dense(ad_u(w, bp, kind, s)))
                r = perturb(s, bp.n)
                for u, M in zip(r.generators(6), beta_orbit_dense(gens, bp.z.exps, skew, 6)):
                    assert same_matrix(dense(u), M)
        assert time.perf_counter() - start < 120


def test_criterion_6_commutant_index(criterion):
    with criterion(6, "commutant index examples, brute force over supports <= 12, census minimum 2"):
        for descriptor, witness in (("evp:01/0", 0b1), ("evp:0/1", 0b11)):
            s = parse_descriptor(descriptor)
            r = commutant_index(s)
            assert (r.verdict, r.k, r.witness) == (Verdict.EXACT, 2, witness)
            k, witnesses = brute_commutant_index(s.at, len(s.preperiod), len(s.period), 12)
            assert k == 2 and witness in witnesses
            assert commutant_index(s, m_max=12).same_verdict(r)
        exact = [int(row.commutant_index) for row in census(16).rows if row.index_kind == "exact"]
        assert len(exact) == 2 ** 15 - 1
        assert min(exact) == 2


def test_criterion_7_cocycle_invariance(criterion, perturbations):
    with criterion(7, "perturbed streams keep nullities (N=24) and commutant index, differ as streams"):
        base_index = {}
        for r in perturbations:
            base = r.base
            if base.descriptor not in base_index:
                base_index[base.descriptor] = commutant_index(base)
            ci = base_index[base.descriptor]
            assert ci.verdict is Verdict.EXACT
            assert commutant_index(r.perturbed).same_verdict(ci)
            assert nullity_sequence(r.perturbed, 24) == nullity_sequence(base, 24)
            assert r.perturbed.bits(r.first_difference + 1) != base.bits(r.first_difference + 1)


def test_criterion_8_family(criterion):
    with criterion(8, "five pairwise distinct perturbations of evp:01/0"):
        start = time.perf_counter()
        s = parse_descriptor("evp:01/0")
        results = family(s, 5, 64)
        firsts = [r.first_difference for r in results]
        assert firsts == [2, 4, 6, 8, 10]
        assert all(x < y for x, y in zip(firsts, firsts[1:]))
        prefixes = {r.perturbed.digits(16) for r in results}
        assert len(prefixes) == 5 and s.digits(16) not in prefixes
        assert time.perf_counter() - start < 10
