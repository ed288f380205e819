"""Normalized weight functions and the transfer operator

    (R_W f)(x) = sum_i W(tau_i x) f(tau_i x).

Functions are plain vectorized callables; iterates are computed by summing
over the full word tree, so no interpolation enters.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, NamedTuple

import numpy as np

from .errors import ResourceError, UsageError
from .ifs import AffineIFS, as_param, dual_ifs

DEFAULT_TREE_CAP = 25
_CHUNK_LEVELS = 18


@dataclass(frozen=True)
class WeightFn:
    """A weight ``W >= 0`` attached to an IFS.

    ``zeros(lo, hi)`` lists the zeros in ``[lo, hi]`` when known in closed
    form; ``is_one_exact(y)`` decides ``W(y) == 1`` for rational ``y``.
    """

    ifs: AffineIFS
    evaluator: Callable[[np.ndarray], np.ndarray]
    zeros: Callable[[float, float], np.ndarray] | None = None
    is_one_exact: Callable[[Fraction], bool] | None = None
    name: str = ""

    def __call__(self, x):
        return weight_eval(self, x)


def bernoulli_weight(lam) -> WeightFn:
    """``W(x) = cos^2(2 pi x / lam)`` on the system with digits ``{0, 1/4}``."""
    p = as_param(lam)
    ifs = dual_ifs(p)
    r = p.value

    def evaluator(x):
        return np.cos(2.0 * np.pi * x / r) ** 2

    def zeros(lo, hi):
        # cos^2(2 pi x / lam) = 0  <=>  x = (lam/2)(1/2 + n), n integer
        n_lo = math.ceil(2.0 * lo / r - 0.5)
        n_hi = math.floor(2.0 * hi / r - 0.5)
        n = np.arange(n_lo, n_hi + 1)
        return (r / 2.0) * (0.5 + n)

    is_one = None
    if p.is_exact:
        lam_q = p.exact

        def is_one(y):
            return (2 * Fraction(y) / lam_q).denominator == 1

    return WeightFn(ifs, evaluator, zeros, is_one, f"cos^2(2 pi x / {p})")


def constant_weight(ifs: AffineIFS, c: float) -> WeightFn:
    def evaluator(x):
        return np.full(np.shape(x), float(c))

    return WeightFn(ifs, evaluator, None, None, f"const {c}")


def weight_eval(w: WeightFn, x):
    """``W(x)`` with tiny negative rounding artifacts clamped to 0."""
    arr = np.asarray(x, dtype=float)
    vals = np.maximum(w.evaluator(arr), 0.0)
    return float(vals) if np.ndim(vals) == 0 else vals


def check_normalization(w: WeightFn, grid) -> float:
    """``max |sum_i W(tau_i x) - 1|`` over the grid."""
    xs = np.asarray(grid, dtype=float)
    total = sum(weight_eval(w, w.ifs.tau(i, xs)) for i in range(w.ifs.n_maps))
    return float(np.max(np.abs(total - 1.0)))


def ruelle_apply(w: WeightFn, f: Callable, x):
    """``(R_W f)(x)``; vectorized over ``x``."""
    xs = np.asarray(x, dtype=float)
    out = np.zeros_like(xs)
    for i in range(w.ifs.n_maps):
        y = w.ifs.tau(i, xs)
        out = out + weight_eval(w, y) * np.asarray(f(y), dtype=float)
    return float(out) if out.ndim == 0 else out


def _expand(w: WeightFn, pts: np.ndarray, wts: np.ndarray, levels: int):
    for _ in range(levels):
        kids = [w.ifs.tau(i, pts) for i in range(w.ifs.n_maps)]
        wts = np.concatenate([wts * weight_eval(w, k) for k in kids])
        pts = np.concatenate(kids)
    return pts, wts


def ruelle_iterate(w: WeightFn, f: Callable, x: float, n: int, cap: int = DEFAULT_TREE_CAP) -> float:
    """``(R_W^n f)(x)`` by summing ``W^w(x) f(tau_w x)`` over all words of length ``n``.

    Raises ``ResourceError`` when ``n`` exceeds ``cap``; use
    ``ruelle_iterate_mc`` for deeper iterates.
    """
    if n < 0:
        raise UsageError("n must be >= 0")
    if n > cap:
        raise ResourceError(f"exhaustive tree of depth {n} exceeds cap {cap}; use ruelle_iterate_mc")
    head = max(0, n - _CHUNK_LEVELS)
    pts, wts = _expand(w, np.array([float(x)]), np.array([1.0]), head)
    partials = []
    for p0, w0 in zip(pts, wts):
        if w0 == 0.0:
            continue
        leaf_pts, leaf_wts = _expand(w, np.array([p0]), np.array([w0]), n - head)
        partials.append(math.fsum(leaf_wts * np.asarray(f(leaf_pts), dtype=float)))
    return math.fsum(partials)


class MonteCarloEstimate(NamedTuple):
    mean: float
    stderr: float
    samples: int


def sample_chain(w: WeightFn, x: float, n: int, samples: int, rng: np.random.Generator) -> np.ndarray:
    """End points ``Y_n`` of ``samples`` independent paths started at ``x``."""
    y = np.full(samples, float(x))
    m = w.ifs.n_maps
    for _ in range(n):
        kids = np.stack([w.ifs.tau(i, y) for i in range(m)])
        probs = np.stack([weight_eval(w, k) for k in kids])
        probs = probs / probs.sum(axis=0)
        u = rng.random(samples)
        choice = (u[None, :] >= np.cumsum(probs, axis=0)[:-1]).sum(axis=0)
        y = kids[choice, np.arange(samples)]
    return y


def ruelle_iterate_mc(w: WeightFn, f: Callable, x: float, n: int, samples: int = 10_000,
                      seed: int = 0xDEC0DE) -> MonteCarloEstimate:
    """Monte Carlo estimate of ``(R_W^n f)(x) = E[f(Y_n)]`` along the weighted chain."""
    if samples < 2:
        raise UsageError("need at least two samples")
    rng = np.random.Generator(np.random.Philox(key=seed))
    vals = np.asarray(f(sample_chain(w, x, n, samples, rng)), dtype=float)
    return MonteCarloEstimate(float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(samples)), samples)


def harmonic_residual(w: WeightFn, h: Callable, grid) -> float:
    """``max |R_W h - h|`` over the grid."""
    xs = np.asarray(grid, dtype=float)
    return float(np.max(np.abs(ruelle_apply(w, h, xs) - np.asarray(h(xs), dtype=float))))
