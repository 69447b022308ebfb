import pytest
from hypothesis import given, settings, strategies as st

from binshift.bitstream import EventuallyPeriodic, parse_descriptor, validate
from binshift.errors import InternalInconsistency, NotABreakPoint, NotEnoughBreakPoints
from binshift.gf2 import nullity_sequence
from binshift.perturbation import (
    BreakPoint,
    UKind,
    ad_u,
    break_point_at,
    break_points,
    build_u,
    family,
    perturb,
    plateau_depth,
    span_check,
    span_checks,
    translation_invariant,
)
from binshift.words import Word, adjoint, multiply, parse_word
from oracles import beta_orbit_dense, jordan_wigner, perturbing_unitary, same_matrix, word_matrix

W = parse_word
S0100 = parse_descriptor("evp:01/0")
S0010 = parse_descriptor("evp:001/0")
S0111 = parse_descriptor("evp:0/1")


def words(width):
    return st.builds(Word, st.integers(0, 3), st.integers(0, 2 ** width - 1))


def test_break_point_examples():
    bps = break_points(S0100, 6)
    assert [(b.n, b.d, str(b.z)) for b in bps] == [(1, 1, "v0"), (3, 1, "v0v2"), (5, 1, "v0v2v4")]
    assert [(b.n, b.d, str(b.z)) for b in break_points(S0010, 4)] == [(1, 2, "v0")]
    assert [(b.n, b.d) for b in break_points(S0111, 4)] == [(1, 1), (3, 1)]
    assert break_points(S0100, 200, count=2) == bps[:2]


def test_not_a_break_point():
    with pytest.raises(NotABreakPoint):
        perturb(S0100, 2)
    assert plateau_depth(S0010, 1) == 2


def test_u_kind_examples():
    assert build_u(break_point_at(S0100, 3), S0100) is UKind.SELF_ADJOINT
    assert build_u(break_point_at(S0100, 1), S0100) is UKind.SELF_ADJOINT
    assert build_u(BreakPoint(2, W("v0v1"), 1), S0100) is UKind.SKEW
    assert build_u(break_point_at(S0111, 3), S0111) is UKind.SKEW


def test_ad_u_examples():
    bp = break_point_at(S0100, 3)
    kind = UKind.SELF_ADJOINT
    assert ad_u(W("v3"), bp, kind, S0100) == W("-iv0v2v3")
    assert ad_u(W("v4"), bp, kind, S0100) == W("v4")
    assert ad_u(W("v1"), break_point_at(S0100, 1), kind, S0100) == W("-iv0v1")


@pytest.mark.parametrize("descriptor, n", [("evp:01/0", 3), ("evp:01/0", 1), ("evp:0/1", 3), ("evp:001/0", 1)])
def test_ad_u_against_dense_conjugation(descriptor, n):
    s = parse_descriptor(descriptor)
    bp = break_point_at(s, n)
    kind = build_u(bp, s)
    sites = 5
    gens = jordan_wigner(s.bits(sites), sites)
    U = perturbing_unitary(gens, bp.z.exps, kind is UKind.SKEW)
    for c in range(2 ** sites):
        for phase in (0, 1):
            w = Word(phase, c)
            got = ad_u(w, bp, kind, s)
            assert same_matrix(U.conj().T @ word_matrix(gens, phase, c) @ U, word_matrix(gens, got.phase, got.exps))


def test_perturb_at_one():
    r = perturb(S0100, 1)
    assert [str(u) for u in r.generators(3)] == ["v0", "-iv0v1", "-v0v1v2"]
    assert r.digits(3) == "011"
    assert r.first_difference == 2
    assert r.kind is UKind.SELF_ADJOINT
    assert span_check(r, 3) and span_check(r, 1)


def test_perturb_at_three():
    r = perturb(S0100, 3)
    assert r.digits(5) == "01001"
    assert r.first_difference == 4
    assert r.perturbed.descriptor == "perturbed:evp:01/0@3"


def test_perturb_deep_plateau():
    r = perturb(S0010, 1)
    assert r.d == 2 and r.first_difference == 4
    assert r.generators(2) == [W("v0"), W("v1")]
    assert r.generator(2).exps == multiply(W("v0"), W("v2"), S0010).exps


@pytest.mark.parametrize(
    "descriptor, n",
    [("evp:01/0", 1), ("evp:01/0", 3), ("evp:01/0", 5), ("evp:0/1", 1), ("evp:0/1", 3), ("evp:001/0", 1)],
)
def test_beta_orbit_against_dense_conjugation(descriptor, n):
    s = parse_descriptor(descriptor)
    r = perturb(s, n)
    gens = jordan_wigner(s.bits(6), 6)
    dense = beta_orbit_dense(gens, r.z.exps, r.kind is UKind.SKEW, 6)
    for u, M in zip(r.generators(6), dense):
        assert same_matrix(word_matrix(gens, u.phase, u.exps), M)


def test_family_examples():
    assert [r.first_difference for r in family(S0100, 3, 8)] == [2, 4, 6]
    assert [r.first_difference for r in family(S0010, 2, 20)] == [4, 8]
    (only,) = family(S0111, 1, 8)
    assert only.perturbed.digits(8) != S0111.digits(8)
    with pytest.raises(NotEnoughBreakPoints):
        family(S0100, 5, 6)


def test_checks_recorded():
    r = perturb(S0111, 3, check_horizon=16)
    assert r.checks == {
        "agreement": True,
        "first_difference": True,
        "self_adjoint": True,
        "span_equality": True,
        "translation_invariance": True,
    }


def test_inconsistency_carries_dump():
    err = InternalInconsistency("boom", {"n": 3})
    assert err.dump == {"n": 3}


small_streams = st.builds(
    lambda pre, per: EventuallyPeriodic((0,) + tuple(pre), tuple(per)),
    st.lists(st.integers(0, 1), max_size=4),
    st.lists(st.integers(0, 1), min_size=1, max_size=4),
).filter(lambda s: validate(s, strict=False).ok)


@settings(max_examples=60)
@given(small_streams, st.integers(0, 2), st.data())
def test_beta_is_a_star_homomorphism(s, which, data):
    bps = break_points(s, 40, count=3)
    r = perturb(s, bps[min(which, len(bps) - 1)].n, check_horizon=0)
    w1, w2 = data.draw(words(10)), data.draw(words(10))
    assert r.beta(multiply(w1, w2, s)) == multiply(r.beta(w1), r.beta(w2), s)
    assert r.beta(adjoint(w1, s)) == adjoint(r.beta(w1), s)


@settings(max_examples=60)
@given(small_streams)
def test_perturbed_stream_properties(s):
    for bp in break_points(s, 40, count=2):
        r = perturb(s, bp.n, check_horizon=0)
        a, b = s.bits(r.first_difference + 1), r.perturbed.bits(r.first_difference + 1)
        assert a[:-1] == b[:-1] and a[-1] != b[-1]
        assert all(span_checks(r, 24))
        assert translation_invariant(r, 20)
        assert all(adjoint(u, s) == u for u in r.generators(20))
        assert nullity_sequence(r.perturbed, 24) == nullity_sequence(s, 24)
        assert validate(r.perturbed).ok
