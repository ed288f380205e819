"""Path-space measures ``P_x`` for the weighted {0, 1/4} system.

A path from ``x`` picks letters one at a time; from the current point ``y``
letter ``i`` is taken with probability ``W(tau_i y)``.  Cylinder and atom
probabilities, the harmonic functions ``h0 = P_x(N_0)`` and
``h1 = P_x(N_1)``, and a reproducible path sampler live here.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import fourier
from .cycles import exceptional_set_check
from .errors import DomainError, UsageError
from .ifs import as_param, compose_word
from .transfer import MonteCarloEstimate, WeightFn, bernoulli_weight, ruelle_iterate, ruelle_iterate_mc, weight_eval

DEFAULT_SEED = 0xDEC0DE
HULL_TOL = 1e-9
ZERO_PROB = 1e-15
FIXED_POINT_TOL = 1e-12
FACTOR_TOL = 1e-14
MAX_TAIL_STEPS = 100_000


@dataclass(frozen=True)
class PathMeasureQuery:
    x: float
    weight: WeightFn
    depth: int = 20
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        if self.depth < 1:
            raise UsageError("depth must be >= 1")
        lo, hi = self.weight.ifs.hull_float()
        if not lo - HULL_TOL <= float(self.x) <= hi + HULL_TOL:
            raise DomainError(f"x={self.x} outside the hull [{lo}, {hi}]")

    @property
    def lam(self):
        return self.weight.ifs.ratio


def path_query(lam, x: float, depth: int = 20, seed: int = DEFAULT_SEED) -> PathMeasureQuery:
    return PathMeasureQuery(float(x), bernoulli_weight(lam), depth, seed)


@dataclass(frozen=True)
class HarmonicEvaluation:
    value: float
    partial_sums: np.ndarray
    tail_bound: float
    table_error: float = 0.0
    notes: tuple = ()


def cylinder_prob(q: PathMeasureQuery, word: Sequence[int]) -> float:
    """``prod_k W(tau_{w_k} ... tau_{w_1} x)``; 1 for the empty word."""
    ifs = q.weight.ifs
    y, p = float(q.x), 1.0
    for i in word:
        y = ifs.tau(i, y)
        p *= weight_eval(q.weight, y)
    return p


def _end_point(q: PathMeasureQuery, word: Sequence[int]) -> float:
    # tau_w x with w_1 applied first
    return float(compose_word(q.weight.ifs, tuple(reversed(tuple(word))), float(q.x)))


def atom_prob_tail_zero(q: PathMeasureQuery, word: Sequence[int] = ()) -> float:
    """``P_x`` of the path ``word`` followed by zeros forever: ``W^w(x) |nu_hat(tau_w x)|^2``."""
    c = cylinder_prob(q, word)
    if c == 0.0:
        return 0.0
    return c * float(fourier.nu_hat_sq(q.weight.ifs.ratio, _end_point(q, word)))


@dataclass(frozen=True)
class TailProduct:
    value: float
    bound: float
    steps: int


def cycle_tail_product(w: WeightFn, y: float, letter: int = 1, max_steps: int = MAX_TAIL_STEPS) -> TailProduct:
    """``prod_{k>=1} W(tau_letter^k y)``.

    Stops once the orbit is within ``1e-12`` of the fixed point and the
    factor within ``1e-14`` of 1 (remaining factors taken as 1), or when the
    product underflows.  ``bound`` caps the neglected part.
    """
    ifs = w.ifs
    fp = float(ifs.fixed_point(letter))
    p = 1.0
    for k in range(1, max_steps + 1):
        y = ifs.tau(letter, y)
        fac = weight_eval(w, y)
        p *= fac
        if p == 0.0:
            return TailProduct(0.0, 0.0, k)
        if abs(y - fp) <= FIXED_POINT_TOL and abs(fac - 1.0) <= FACTOR_TOL:
            # factors left are 1 - O(dist^2); their total defect is tiny
            return TailProduct(p, p * 1e-12, k)
    return TailProduct(p, p, max_steps)


def atom_prob_tail_cycle(q: PathMeasureQuery, word: Sequence[int] = (), cycle_letter: int = 1) -> float:
    """``P_x`` of ``word`` followed by ``cycle_letter`` forever."""
    c = cylinder_prob(q, word)
    if c == 0.0:
        return 0.0
    return c * cycle_tail_product(q.weight, _end_point(q, word), cycle_letter).value


def _evaluation(levels: np.ndarray, table_error: float, notes=()) -> HarmonicEvaluation:
    partial = np.cumsum(levels)
    value = float(partial[-1])
    return HarmonicEvaluation(value, partial, 1.0 - value, table_error, tuple(notes))


def h0(q: PathMeasureQuery) -> HarmonicEvaluation:
    """Mass of the paths ending in 0^inf, summed over words of length ``<= depth``."""
    levels, _, _, err = fourier.series_levels(q.lam, q.x, q.depth)
    return _evaluation(levels, err)


def _require_d(q):
    res = exceptional_set_check(q.lam)
    if not res.in_d:
        raise DomainError(f"lambda={q.lam} is not of the form 1 - 1/(2n); "
                          "the only W-cycle is {0} and h1 is not defined")
    return res


def h1(q: PathMeasureQuery) -> HarmonicEvaluation:
    """Mass of the paths ending in (1/4)^inf.

    Uses ``prod_{k>=1} W(tau_{1/4}^k y) = |nu_hat(x* - y)|^2``, valid for
    ``lam`` in ``D`` where ``x*`` is the second W-1-cycle.
    """
    _require_d(q)
    _, levels, _, err = fourier.series_levels(q.lam, q.x, q.depth, want_cycle=True)
    return _evaluation(levels, err)


def harmonic_pair(q: PathMeasureQuery) -> tuple[HarmonicEvaluation, HarmonicEvaluation | None]:
    """``(h0, h1)`` from a single tree walk; ``h1`` is None outside ``D``."""
    in_d = exceptional_set_check(q.lam).in_d
    l0, l1, _, err = fourier.series_levels(q.lam, q.x, q.depth, want_cycle=in_d)
    return _evaluation(l0, err), (_evaluation(l1, err) if in_d else None)


@dataclass(frozen=True)
class AtomicityReport:
    mass_in_N0: float
    mass_in_N1: float
    residual: float

    def as_dict(self):
        return {"mass_in_N0": self.mass_in_N0, "mass_in_N1": self.mass_in_N1, "residual": self.residual}


def atomicity_report(q: PathMeasureQuery) -> AtomicityReport:
    a, b = harmonic_pair(q)
    m1 = b.value if b is not None else 0.0
    return AtomicityReport(a.value, m1, 1.0 - a.value - m1)


def h0_telescoping(q: PathMeasureQuery) -> float:
    """``f(x) + sum_{n<d} R_W^n phi (x)`` with ``phi = (W f) o tau_{1/4}``, ``f = |nu_hat|^2``.

    Each iterate is an exhaustive tree sum in ``transfer``, independent of
    the compiled walk.
    """
    lam = q.lam
    w = q.weight
    ifs = w.ifs

    def f(y):
        return fourier.nu_hat_sq(lam, y)

    def phi(y):
        z = ifs.tau(1, y)
        return weight_eval(w, z) * f(z)

    return math.fsum([float(f(q.x))] + [ruelle_iterate(w, phi, q.x, n) for n in range(q.depth)])


def h0_monte_carlo(q: PathMeasureQuery, samples: int = 10_000) -> MonteCarloEstimate:
    """``E[|nu_hat(Y_d)|^2]`` along the chain, which equals the depth-``d`` partial sum of ``h0``.

    Reaches depths far beyond the exhaustive walk.
    """
    lam = q.lam
    return ruelle_iterate_mc(q.weight, lambda y: fourier.nu_hat_sq(lam, y), q.x, q.depth, samples, q.seed)


# -- sampling ---------------------------------------------------------------

@dataclass(frozen=True)
class SampledPath:
    letters: tuple
    points: np.ndarray
    step_probs: np.ndarray
    notes: tuple = ()


def _path_rng(seed: int, index: int) -> np.random.Generator:
    # counter-based stream per (seed, path index)
    return np.random.Generator(np.random.Philox(key=seed, counter=[0, 0, 0, index]))


def sample_path(q: PathMeasureQuery, length: int, index: int = 0) -> SampledPath:
    """One path of ``length`` letters; reproducible from ``(q.seed, index)``."""
    if length < 1:
        raise UsageError("length must be >= 1")
    ifs = q.weight.ifs
    rng = _path_rng(q.seed, index)
    u = rng.random(length)
    y = float(q.x)
    letters, pts, probs, notes = [], [], [], []
    for k in range(length):
        kids = [ifs.tau(i, y) for i in range(ifs.n_maps)]
        p = np.array([weight_eval(q.weight, z) for z in kids])
        p[p < ZERO_PROB] = 0.0
        total = p.sum()
        if total == 0.0:
            notes.append(f"step {k}: both transition weights vanish; choosing uniformly")
            p = np.full(ifs.n_maps, 1.0)
            total = float(ifs.n_maps)
        cdf = np.cumsum(p) / total
        i = int(np.searchsorted(cdf, u[k], side="right"))
        i = min(i, ifs.n_maps - 1)
        while p[i] == 0.0:
            i -= 1
        letters.append(i)
        probs.append(p[i] / total)
        y = kids[i]
        pts.append(y)
    return SampledPath(tuple(letters), np.array(pts), np.array(probs), tuple(notes))


def sample_paths(q: PathMeasureQuery, length: int, n_paths: int, start: int = 0) -> list[SampledPath]:
    """Paths ``start .. start + n_paths - 1``; path ``i`` equals ``sample_path(q, length, i)``."""
    return [sample_path(q, length, i) for i in range(start, start + n_paths)]


def first_letter_frequencies(q: PathMeasureQuery, n_paths: int) -> np.ndarray:
    """Empirical law of the first letter over ``n_paths`` sampled paths."""
    counts = np.zeros(q.weight.ifs.n_maps)
    for p in sample_paths(q, 1, n_paths):
        counts[p.letters[0]] += 1
    return counts / n_paths
