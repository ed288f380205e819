from fractions import Fraction

import numpy as np
import pytest

from ifs_harmonic.errors import ResourceError, UsageError
from ifs_harmonic.ifs import attractor_cover, bernoulli_ifs, binary_ifs, dual_ifs
from ifs_harmonic.measure import (MeasureReport, atom_scan, backward_orbit, backward_orbit_count, chaos_game,
                                  self_similarity_residual, uniformity_deviation, with_point_mass)

HALF = bernoulli_ifs("1/2")


@pytest.fixture(scope="module")
def haar():
    return chaos_game(HALF, (0.5, 0.5), 1_000_000)


def test_haar_uniform(haar):
    assert haar.histogram.sum() == 1_000_000
    assert uniformity_deviation(haar) < 0.03
    assert haar.self_similarity_residual < 0.02
    assert haar.support_coverage == 1.0


def test_atom_scan_halving(haar):
    scan = atom_scan(haar)
    assert not scan.atom_suspect
    assert np.all(np.abs(scan.ratios - 0.5) < 0.1)
    assert scan.max_mass[0] == pytest.approx(1 / 16, rel=0.05)


def test_injected_atom_flagged(haar):
    assert atom_scan(with_point_mass(haar, 0.3, 0.1)).atom_suspect


def test_two_thirds_no_atom():
    rep = chaos_game(bernoulli_ifs("2/3"), (0.5, 0.5), 200_000)
    scan = atom_scan(rep)
    assert not scan.atom_suspect
    assert scan.max_mass[-1] < scan.max_mass[0] / 20


def test_cantor_coverage():
    rep = chaos_game(binary_ifs("1/3"), (0.5, 0.5), 1_000_000)
    assert rep.support_coverage == 1.0
    # mass sits inside the depth-5 cells only
    cells = attractor_cover(binary_ifs("1/3"), 5)
    fine_edges = np.linspace(rep.lo, rep.hi, rep.fine_counts.size + 1)
    mids = 0.5 * (fine_edges[1:] + fine_edges[:-1])
    width = fine_edges[1] - fine_edges[0]
    near = np.any((cells[:, 0][None, :] - width <= mids[:, None]) & (mids[:, None] <= cells[:, 1][None, :] + width), axis=1)
    assert rep.fine_counts[~near].sum() == 0


def test_degenerate_probs_rejected():
    with pytest.raises(UsageError):
        chaos_game(HALF, (1.0, 0.0), 10)
    with pytest.raises(UsageError):
        chaos_game(HALF, (0.6, 0.6), 10)


def test_determinism():
    a = chaos_game(dual_ifs("3/4"), (0.3, 0.7), 50_000, seed=5)
    b = chaos_game(dual_ifs("3/4"), (0.3, 0.7), 50_000, seed=5)
    c = chaos_game(dual_ifs("3/4"), (0.3, 0.7), 50_000, seed=6)
    assert np.array_equal(a.fine_counts, b.fine_counts)
    assert not np.array_equal(a.fine_counts, c.fine_counts)


def test_exact_invariant_input():
    rep = MeasureReport.from_histogram(np.full(64, 1 / 64), -2.0, 2.0)
    assert self_similarity_residual(rep, HALF, (0.5, 0.5)) < 1e-12
    assert rep.histogram.sum() == pytest.approx(1.0)


def test_single_sample_residual():
    rep = chaos_game(HALF, (0.5, 0.5), 1)
    assert rep.samples == 1
    assert rep.self_similarity_residual > 0.1


def test_transport_conserves_mass(haar):
    edges = haar.edges
    for i in range(2):
        pre = HALF.tau_inverse(i, np.array([edges[0] - 10, edges[-1] + 10]))
        assert pre[0] < edges[0] and pre[-1] > edges[-1]
    # summed over bins, the transported masses add back to one
    from ifs_harmonic.measure import _cdf_at
    total = sum(0.5 * np.diff(_cdf_at(haar, HALF.tau_inverse(i, edges))).sum() for i in range(2))
    assert total == pytest.approx(1.0, abs=1e-12)


def test_atom_scan_needs_samples():
    rep = chaos_game(HALF, (0.5, 0.5), 1000)
    with pytest.raises(UsageError):
        atom_scan(rep)


def test_backward_orbit_examples():
    B = binary_ifs("1/2")
    assert backward_orbit(B, 0, 2) == {0, -1, -2, -3}
    for sys_ in (binary_ifs("2/3"), dual_ifs("3/5"), bernoulli_ifs("1/3")):
        assert backward_orbit_count(sys_, Fraction(1, 7), 1) == 2
    assert backward_orbit_count(binary_ifs("2/3"), 0, 3) >= 3


def test_backward_orbit_brute_force():
    # oracle: distinct values of x / lam^n - sum_j b_j / lam^(n - j + 1) over all words
    import itertools
    lam = Fraction(3, 5)
    B = binary_ifs(lam)
    for n in range(1, 8):
        pts = set()
        for w in itertools.product((0, 1), repeat=n):
            y = Fraction(1, 3)
            for b in w:
                y = y / lam - b
            pts.add(y)
        assert backward_orbit_count(B, Fraction(1, 3), n) == len(pts)


def test_backward_orbit_guards():
    with pytest.raises(UsageError):
        backward_orbit_count(binary_ifs(0.5), 0, 2)
    with pytest.raises(ResourceError):
        backward_orbit_count(binary_ifs("1/2"), 0, 21)
