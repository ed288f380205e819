"""Strongly invariant measures of affine IFSs.

The chaos game produces an empirical version of ``nu = sum_i p_i nu o tau_i^{-1}``.
Histograms are kept at 4096 bins over the hull, so every coarser power-of-two
binning is an exact regrouping.  Exact backward-orbit counting uses Fractions.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import ResourceError, UsageError
from .ifs import AffineIFS

DEFAULT_SEED = 0xDEC0DE
FINE_BINS = 1 << 12
DEFAULT_STREAMS = 10_000
ATOM_LEVEL = 0.05
ATOM_RUN = 3
MAX_ORBIT_DEPTH = 20


@dataclass(frozen=True)
class MeasureReport:
    """Fine-binned empirical measure on the hull plus summary numbers at ``bins`` bins."""

    fine_counts: np.ndarray
    lo: float
    hi: float
    samples: float
    bins: int = 64
    self_similarity_residual: float = float("nan")
    support_coverage: float = float("nan")
    coverage_depth: int = 0
    seed: int | None = None

    @classmethod
    def from_histogram(cls, counts: Sequence[float], lo: float, hi: float, bins: int | None = None
                       ) -> "MeasureReport":
        """Wrap given bin masses (length a power of two dividing 4096)."""
        counts = np.asarray(counts, dtype=float)
        n = counts.size
        if n < 1 or FINE_BINS % n:
            raise UsageError("histogram length must divide 4096")
        fine = np.repeat(counts / (FINE_BINS // n), FINE_BINS // n)
        return cls(fine, float(lo), float(hi), float(counts.sum()), bins or n)

    @property
    def edges(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.bins + 1)

    def counts_at(self, bins: int) -> np.ndarray:
        if bins < 1 or FINE_BINS % bins:
            raise UsageError("bin count must divide 4096")
        return self.fine_counts.reshape(bins, -1).sum(axis=1)

    @property
    def histogram(self) -> np.ndarray:
        return self.counts_at(self.bins)

    @property
    def masses(self) -> np.ndarray:
        return self.histogram / self.samples

    @property
    def max_bin_mass(self) -> float:
        return float(self.masses.max())


def _check_probs(ifs: AffineIFS, probs) -> np.ndarray:
    p = np.asarray(probs, dtype=float)
    if p.shape != (ifs.n_maps,):
        raise UsageError("need one probability per map")
    if np.any(p <= 0) or abs(p.sum() - 1.0) > 1e-12:
        raise UsageError("probabilities must be positive and sum to 1")
    return p


def chaos_game(ifs: AffineIFS, probs, samples: int, burn_in: int = 1000, seed: int = DEFAULT_SEED,
               bins: int = 64, coverage_depth: int = 5, streams: int = DEFAULT_STREAMS) -> MeasureReport:
    """Run ``streams`` independent orbits ``x <- tau_i(x)``, ``i ~ probs``.

    After ``burn_in`` steps each stream contributes one sample per step
    until ``samples`` points are collected.  Support coverage counts the
    symbolic depth-``coverage_depth`` cells ``tau_w(hull)`` that receive a
    point, read off from the last ``coverage_depth`` digits of each stream.
    """
    p = _check_probs(ifs, probs)
    if samples < 1:
        raise UsageError("samples must be >= 1")
    k = ifs.n_maps
    lam = ifs.lam
    digits = np.array([float(b) for b in ifs.digits])
    lo, hi = ifs.hull_float()
    s = min(streams, samples)
    steps = -(-samples // s)
    rng = np.random.Generator(np.random.Philox(key=seed))
    cum = np.cumsum(p)[:-1]
    x = np.full(s, float(ifs.fixed_point(0)))
    code = np.zeros(s, dtype=np.int64)
    n_cells = k ** coverage_depth
    top = k ** (coverage_depth - 1) if coverage_depth > 0 else 0
    fine = np.zeros(FINE_BINS)
    seen = np.zeros(max(n_cells, 1), dtype=bool)
    taken = 0
    scale = FINE_BINS / (hi - lo)
    for t in range(burn_in + steps):
        d = np.searchsorted(cum, rng.random(s), side="right")
        x = lam * (x + digits[d])
        if coverage_depth > 0:
            code = d * top + code // k
        if t < burn_in:
            continue
        m = min(s, samples - taken)
        idx = np.clip(((x[:m] - lo) * scale).astype(np.int64), 0, FINE_BINS - 1)
        fine += np.bincount(idx, minlength=FINE_BINS)
        if coverage_depth > 0 and t >= coverage_depth - 1:
            seen[code[:m]] = True
        taken += m
    coverage = float(seen.mean()) if coverage_depth > 0 else 1.0
    rep = MeasureReport(fine, lo, hi, float(samples), bins, support_coverage=coverage,
                        coverage_depth=coverage_depth, seed=seed)
    return replace(rep, self_similarity_residual=self_similarity_residual(rep, ifs, p))


def _cdf_at(report: MeasureReport, y: np.ndarray) -> np.ndarray:
    edges = report.edges
    cdf = np.concatenate([[0.0], np.cumsum(report.histogram)]) / report.samples
    return np.interp(y, edges, cdf, left=0.0, right=cdf[-1])


def self_similarity_residual(report: MeasureReport, ifs: AffineIFS, probs) -> float:
    """``max_E |nu(E) - sum_i p_i nu(tau_i^{-1} E)|`` over the report's bins.

    ``nu`` of an arbitrary interval is read from the empirical CDF with mass
    spread linearly inside each bin.
    """
    p = _check_probs(ifs, probs)
    edges = report.edges
    lhs = report.masses
    rhs = np.zeros_like(lhs)
    for i, pi in enumerate(p):
        pre = ifs.tau_inverse(i, edges)
        c = _cdf_at(report, pre)
        rhs += pi * np.diff(c)
    return float(np.max(np.abs(lhs - rhs)))


def uniformity_deviation(report: MeasureReport) -> float:
    """Largest relative deviation of a bin count from the uniform expectation."""
    h = report.histogram
    expected = report.samples / report.bins
    return float(np.max(np.abs(h - expected)) / expected)


@dataclass(frozen=True)
class AtomScan:
    bins: np.ndarray
    max_mass: np.ndarray
    atom_suspect: bool

    @property
    def ratios(self) -> np.ndarray:
        return self.max_mass[1:] / self.max_mass[:-1]


def atom_scan(report: MeasureReport, k_lo: int = 4, k_hi: int = 12, min_samples: int = 100_000) -> AtomScan:
    """Largest bin mass at ``2^k`` bins, ``k = k_lo..k_hi``.

    Flags an atom when the largest mass stays above 0.05 for three or more
    consecutive refinements.  Evidence only, not a proof.
    """
    if report.samples < min_samples:
        raise UsageError(f"atom scan needs at least {min_samples} samples")
    bins = 2 ** np.arange(k_lo, k_hi + 1)
    mm = np.array([report.counts_at(int(b)).max() / report.samples for b in bins])
    run = best = 0
    for v in mm:
        run = run + 1 if v > ATOM_LEVEL else 0
        best = max(best, run)
    return AtomScan(bins, mm, best >= ATOM_RUN)


def with_point_mass(report: MeasureReport, x: float, fraction: float) -> MeasureReport:
    """Replace ``fraction`` of the samples by a point mass at ``x`` (a positive control)."""
    if not 0 <= fraction <= 1:
        raise UsageError("fraction must lie in [0, 1]")
    fine = report.fine_counts * (1.0 - fraction)
    j = int(np.clip((x - report.lo) / (report.hi - report.lo) * FINE_BINS, 0, FINE_BINS - 1))
    fine[j] += fraction * report.samples
    return replace(report, fine_counts=fine)


def backward_orbit(ifs: AffineIFS, x, n: int) -> set:
    """All points ``tau_{w_n}^{-1} ... tau_{w_1}^{-1} x`` over words of length ``n``."""
    if not ifs.is_exact:
        raise UsageError("backward orbits are counted exactly; give a rational ratio")
    if n < 0:
        raise UsageError("n must be >= 0")
    if n > MAX_ORBIT_DEPTH:
        raise ResourceError(f"n={n} exceeds the cap {MAX_ORBIT_DEPTH}")
    pts = {Fraction(x)}
    for _ in range(n):
        pts = {ifs.tau_inverse(i, y) for y in pts for i in range(ifs.n_maps)}
    return pts


def backward_orbit_count(ifs: AffineIFS, x, n: int) -> int:
    """Number of distinct points at backward depth ``n``."""
    return len(backward_orbit(ifs, x, n))
