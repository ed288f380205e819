import math

import numpy as np
import pytest

from ifs_harmonic import pathspace as ps
from ifs_harmonic.errors import DomainError, UsageError
from ifs_harmonic.fourier import cycle_fixed_point, nu_hat_sq
from ifs_harmonic.transfer import bernoulli_weight, harmonic_residual

# mpmath brute force over all words, with G computed as the literal tail
# product over 3000 factors (not via the reflection identity)
H0_34_05_D6 = 0.00019840038851933601615
H1_34_05_D6 = 0.00019840038851933601615
H1_56_07_D6 = 2.4579916611161721499e-07


def q(lam, x, depth=10, seed=ps.DEFAULT_SEED):
    return ps.path_query(lam, x, depth, seed)


def test_query_validation():
    with pytest.raises(UsageError):
        q("2/3", 0.1, depth=0)
    with pytest.raises(DomainError):
        q("2/3", 0.7)


def test_cylinder_examples():
    assert ps.cylinder_prob(q("2/3", 0.0), (0,)) == 1.0
    for lam in ("1/2", "2/3", 0.9):
        assert ps.cylinder_prob(q(lam, 0.0), (1,)) == pytest.approx(0.0, abs=1e-30)
    assert ps.cylinder_prob(q("1/2", 1 / 16), (0,)) == pytest.approx(math.cos(math.pi / 8) ** 2, abs=1e-15)
    assert ps.cylinder_prob(q("2/3", 0.3), ()) == 1.0


def test_cylinders_sum_to_one():
    query = q("3/5", 0.2)
    total = sum(ps.cylinder_prob(query, ((k >> 2) & 1, (k >> 1) & 1, k & 1)) for k in range(8))
    assert total == pytest.approx(1.0, abs=1e-14)


def test_atom_tail_zero_examples():
    assert ps.atom_prob_tail_zero(q("2/3", 0.0)) == 1.0
    assert ps.atom_prob_tail_zero(q("1/2", 0.25)) <= 1e-30
    assert ps.atom_prob_tail_zero(q("2/3", 0.0), (1,)) <= 1e-30


def test_atom_tail_cycle_examples():
    assert ps.atom_prob_tail_cycle(q("3/4", 0.75)) == pytest.approx(1.0, abs=1e-14)
    assert ps.atom_prob_tail_cycle(q("1/2", 0.25)) == pytest.approx(1.0, abs=1e-14)
    assert ps.atom_prob_tail_cycle(q("2/3", 0.0)) < 1e-6
    tp = ps.cycle_tail_product(bernoulli_weight("2/3"), 0.0, max_steps=40)
    assert tp.value < 1e-6


def test_tail_cycle_matches_reflection():
    # prod_{k>=1} W(tau_{1/4}^k y) = |nu_hat(x* - y)|^2 for lam in D
    for lam in ("3/4", "5/6"):
        w = bernoulli_weight(lam)
        top = cycle_fixed_point(lam)
        for y in np.linspace(0, top, 7):
            a = ps.cycle_tail_product(w, y).value
            b = float(nu_hat_sq(lam, top - y))
            assert a == pytest.approx(b, abs=1e-12)


def test_h0_h1_oracles():
    assert ps.h0(q("3/4", 0.5, 6)).value == pytest.approx(H0_34_05_D6, abs=1e-14)
    assert ps.h1(q("3/4", 0.5, 6)).value == pytest.approx(H1_34_05_D6, abs=1e-14)
    assert ps.h1(q("5/6", 0.7, 6)).value == pytest.approx(H1_56_07_D6, abs=1e-14)


def test_h0_at_zero():
    ev = ps.h0(q("2/3", 0.0, 1))
    assert ev.value == 1.0 and ev.tail_bound == 0.0


def test_half_quarter():
    e0, e1 = ps.harmonic_pair(q("1/2", 0.25, 8))
    assert e0.value <= 1e-12
    assert e1.value == pytest.approx(1.0, abs=1e-12)


def test_h1_outside_d():
    with pytest.raises(DomainError):
        ps.h1(q("2/3", 0.3))
    assert ps.harmonic_pair(q("2/3", 0.3))[1] is None


def test_monotone_and_bounded():
    for lam in ("2/3", "3/4", "5/6"):
        for x in np.linspace(0, cycle_fixed_point(lam), 6):
            e0, e1 = ps.harmonic_pair(q(lam, x, 16))
            for ev in (e0, e1):
                if ev is None:
                    continue
                assert np.all(np.diff(ev.partial_sums) >= 0)
                assert ev.value <= 1 + 1e-9
                assert ev.value == ev.partial_sums[-1]


def test_telescoping_route_agrees():
    for lam, x in (("2/3", 0.3), ("4/5", 0.65), ("3/4", 0.1)):
        query = q(lam, x, 12)
        assert ps.h0(query).value == pytest.approx(ps.h0_telescoping(query), abs=1e-12)


def test_monte_carlo_route_agrees():
    query = q("2/3", 0.3, 12)
    mc = ps.h0_monte_carlo(query, 20_000)
    assert abs(mc.mean - ps.h0(query).value) <= 5 * mc.stderr


def test_harmonicity_within_tail():
    lam = "2/3"
    w = bernoulli_weight(lam)
    d = 14
    grid = np.linspace(0, 0.5, 11)

    def h(y):
        return np.array([ps.h0(q(lam, t, d)).value for t in np.atleast_1d(y)])

    # R_W h0_d = h0_{d+1}, so the residual is the depth-(d+1) increment
    for x in grid:
        r = abs(float(np.atleast_1d(harmonic_residual(w, h, [x]))[0]))
        tail = 1.0 - ps.h0(q(lam, x, d)).value
        assert r <= tail + 1e-8


def test_atomicity_report():
    r = ps.atomicity_report(q("2/3", 0.0, 1))
    assert r.residual == 0.0 and r.mass_in_N1 == 0.0
    r = ps.atomicity_report(q("3/4", 0.5, 10))
    assert r.mass_in_N0 + r.mass_in_N1 + r.residual == pytest.approx(1.0)


def test_sampling_deterministic_cases():
    assert set(ps.sample_path(q("2/3", 0.0), 20).letters) == {0}
    assert set(ps.sample_path(q("1/2", 0.25), 20).letters) == {1}


def test_sampling_reproducible_by_index():
    query = q("3/4", 0.4)
    batch = ps.sample_paths(query, 12, 5)
    assert batch[3].letters == ps.sample_path(query, 12, 3).letters
    assert ps.sample_path(query, 12, 3).letters == ps.sample_path(query, 12, 3).letters
    other = ps.sample_path(ps.path_query("3/4", 0.4, 10, seed=1), 12, 3)
    assert len(batch[3].letters) == len(other.letters) == 12


def test_first_letter_frequency():
    query = q("2/3", 0.3)
    n = 100_000
    freq = ps.first_letter_frequencies(query, n)
    p0 = ps.cylinder_prob(query, (0,))
    assert abs(freq[0] - p0) <= 3 * math.sqrt(p0 * (1 - p0) / n)


def test_path_points_follow_letters():
    query = q("3/5", 0.2)
    p = ps.sample_path(query, 8, 11)
    L = query.weight.ifs
    y = 0.2
    for letter, pt, pr in zip(p.letters, p.points, p.step_probs):
        y = L.tau(letter, y)
        assert pt == y and pr > 0
