import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ifs_harmonic.cycles import (certify_w_cycle, cycle_from_word, enumerate_cycles, exact_wcycle_divisibility,
                                 exceptional_set_check, least_rotation, lyndon_words, minimal_period,
                                 necklace_count, verify_no_long_wcycles)
from ifs_harmonic.errors import ResourceError, UsageError
from ifs_harmonic.ifs import dual_ifs, encode_periodic
from ifs_harmonic.transfer import bernoulli_weight

EXACT_LAMS = ["1/3", "1/2", "3/5", "2/3", "3/4", "4/5", "5/6"]


def test_enumerate_small_periods():
    L = dual_ifs("2/3")
    assert [c.word for c in enumerate_cycles(L, 1)] == [(0,), (1,)]
    assert len(enumerate_cycles(L, 2)) == 3
    assert len(enumerate_cycles(L, 3)) == 5
    with pytest.raises(ResourceError):
        enumerate_cycles(L, 13)
    with pytest.raises(UsageError):
        enumerate_cycles(L, 0)


@pytest.mark.parametrize("p", range(1, 9))
def test_necklace_completeness(p):
    brute = {least_rotation(w) for w in itertools.product((0, 1), repeat=p) if minimal_period(w) == p}
    lyndon = {w for w in lyndon_words(2, p) if len(w) == p}
    assert brute == lyndon
    assert len(brute) == necklace_count(p)


@pytest.mark.parametrize("lam", EXACT_LAMS)
def test_orbit_closure_exact(lam):
    L = dual_ifs(lam)
    for c in enumerate_cycles(L, 8):
        assert c.exact
        assert c.closure_error(L) == 0.0
        assert len(set(c.points)) == c.minimal_period


def test_orbit_closure_float():
    L = dual_ifs(0.61803398875)
    for c in enumerate_cycles(L, 8):
        assert c.closure_error(L) <= 1e-10


def test_certificate_examples():
    c = cycle_from_word(dual_ifs("3/4"), (1,))
    assert c.points == (Fraction(3, 4),)
    cert = certify_w_cycle(c, bernoulli_weight("3/4"))
    assert cert.is_w_cycle and cert.mode == "exact"
    c = cycle_from_word(dual_ifs("2/3"), (1,))
    assert c.points == (Fraction(1, 2),)
    assert not certify_w_cycle(c, bernoulli_weight("2/3")).is_w_cycle
    assert not certify_w_cycle(c, bernoulli_weight("2/3"), exact=False).is_w_cycle
    for lam in ("2/3", 0.7):
        c = cycle_from_word(dual_ifs(lam), (0,))
        assert certify_w_cycle(c, bernoulli_weight(lam)).is_w_cycle


def test_divisibility_examples():
    r = exact_wcycle_divisibility("2/3", (0, 1))
    assert r.value == Fraction(3, 5) and not r.holds
    r = exact_wcycle_divisibility("1/2", (1,))
    assert r.value == 1 and r.holds
    assert exact_wcycle_divisibility("4/5", (0,)).holds


def test_divisibility_non_coprime_note():
    r = exact_wcycle_divisibility((4, 6), (0, 1))
    assert r.lam == Fraction(2, 3)
    assert r.notes and "gcd 2" in r.notes[0]
    assert r.value == Fraction(3, 5)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(EXACT_LAMS), st.lists(st.integers(0, 1), min_size=1, max_size=8))
def test_divisibility_matches_direct_rational(lam, word):
    # oracle: 2 x / lam with x = encode_periodic on the {0, 1/4} system
    q = Fraction(lam)
    p = len(word)
    x = sum(Fraction(w, 4) * q ** (j + 1) for j, w in enumerate(word)) / (1 - q ** p)
    r = exact_wcycle_divisibility(q, word)
    assert r.value == 2 * x / q


@pytest.mark.parametrize("lam", EXACT_LAMS)
def test_exact_float_agreement(lam):
    w = bernoulli_weight(lam)
    for c in enumerate_cycles(w.ifs, 8):
        for k in range(c.minimal_period):
            rot = c.word[k:] + c.word[:k]
            ex = exact_wcycle_divisibility(lam, rot).holds
            y = float(encode_periodic(w.ifs, rot))
            assert ex == (abs(w(y) - 1.0) <= 1e-9)
        exact_all = all(exact_wcycle_divisibility(lam, c.word[k:] + c.word[:k]).holds for k in range(c.minimal_period))
        assert exact_all == certify_w_cycle(c, w, 1e-9, exact=False).is_w_cycle


@pytest.mark.parametrize("lam,n", [("1/2", 1), ("3/4", 2), ("5/6", 3), ("7/8", 4)])
def test_in_d(lam, n):
    r = exceptional_set_check(lam)
    assert r.in_d and r.n == n and r.mode == "exact"


@pytest.mark.parametrize("lam", ["1/3", "2/3", "3/5", "4/5", "5/7"])
def test_not_in_d(lam):
    assert not exceptional_set_check(lam).in_d


def test_d_float_scan():
    assert exceptional_set_check(0.9).in_d
    assert exceptional_set_check(0.9).n == 5
    assert not exceptional_set_check(0.91).in_d
    assert exceptional_set_check(1 - 1 / 40 + 1e-12).in_d


@pytest.mark.parametrize("lam", EXACT_LAMS)
def test_no_long_w_cycles(lam):
    rep = verify_no_long_wcycles(lam, 8)
    assert rep.ok and rep.exact_float_agree
    assert rep.cycles_checked[8] == necklace_count(8)
    expected = 2 if exceptional_set_check(lam).in_d else 1
    assert len(rep.w_one_cycles) == expected


def test_no_long_w_cycles_float():
    rep = verify_no_long_wcycles(0.61803398875, 6)
    assert rep.ok and rep.mode == "numerical" and rep.exact_float_agree is None


def test_one_half_p1():
    rep = verify_no_long_wcycles("1/2", 1)
    assert [e["points"] for e in rep.w_one_cycles] == [["0"], ["1/4"]]
