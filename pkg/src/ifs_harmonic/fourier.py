"""Fourier transform of the Bernoulli convolution and the series built on it.

``nu_hat(t) = prod_{n>=0} cos(2 pi lam^n t)`` is the transform of the law of
``sum_n (+/-) lam^n``.  Its square ``g = |nu_hat|^2`` satisfies
``g(y) = W(lam y) g(lam y)`` for ``W(x) = cos^2(2 pi x / lam)``, which is
what makes ``sum_{w in W0} W^w(x) g(tau_w x)`` a telescoping probability sum.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

from . import _series
from .cycles import exceptional_set_check
from .errors import DomainError, QuadratureError, ResourceError, UsageError
from .ifs import ScalarParam, as_param, encode_finite, dual_ifs
from .transfer import WeightFn, bernoulli_weight, weight_eval

DEFAULT_TAIL_EPS = 1e-12
FINE_TAIL_EPS = 1e-17
EPS = np.finfo(float).eps
TABLE_TARGET = 1e-14
TABLE_MAX_POINTS = 1 << 22
CDF_GRID = 4096
CDF_PAD = 16
CDF_TOL = 1e-8
WIENER_RTOL = 1e-8
OUTSIDE_HYPOTHESIS = "outside theorem hypothesis (lambda in D)"


def _n_terms(lam: float, t_abs: float, tail_eps: float) -> int:
    """Smallest ``N`` with ``2 pi^2 t^2 lam^(2N) / (1 - lam^2) <= tail_eps``."""
    if t_abs == 0.0:
        return 0
    c = 2.0 * math.pi ** 2 * t_abs ** 2 / (1.0 - lam * lam)
    if c <= tail_eps:
        return 0
    n = max(0, math.ceil(math.log(tail_eps / c) / (2.0 * math.log(lam))))
    while n > 0 and c * lam ** (2 * (n - 1)) <= tail_eps:
        n -= 1
    while c * lam ** (2 * n) > tail_eps:
        n += 1
    return n


def _tail_delta(lam: float, t_abs, n: int):
    return 2.0 * math.pi ** 2 * np.square(t_abs) * lam ** (2 * n) / (1.0 - lam * lam)


@dataclass(frozen=True)
class FourierProduct:
    """Truncated cosine product.

    With ``n_terms=None`` the number of factors is chosen per call from the
    largest ``|t|`` so that the neglected tail is below ``tail_eps``.
    """

    lam: ScalarParam
    tail_eps: float = DEFAULT_TAIL_EPS
    n_terms: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "lam", as_param(self.lam))
        if not self.tail_eps > 0:
            raise UsageError("tail_eps must be positive")
        if self.n_terms is not None and self.n_terms < 0:
            raise UsageError("n_terms must be >= 0")

    def terms_for(self, t_abs_max: float) -> int:
        if self.n_terms is not None:
            return self.n_terms
        return _n_terms(self.lam.value, float(t_abs_max), self.tail_eps)


def fourier_product(lam, tail_eps: float = DEFAULT_TAIL_EPS, n_terms: int | None = None) -> FourierProduct:
    return FourierProduct(as_param(lam), tail_eps, n_terms)


def _product(lam: float, t: np.ndarray, n: int) -> np.ndarray:
    out = np.ones_like(t)
    for k in range(n):
        out = out * np.cos(2.0 * np.pi * lam ** k * t)
    return out


def nu_hat(fp: FourierProduct, t):
    """``(value, err_bound)`` for the truncated product at ``t`` (scalar or array).

    The bound covers the neglected tail and float rounding of the factors.
    """
    if not isinstance(fp, FourierProduct):
        fp = fourier_product(fp)
    lam = fp.lam.value
    arr = np.asarray(t, dtype=float)
    t_abs = np.abs(arr)
    n = fp.terms_for(float(t_abs.max()) if arr.size else 0.0)
    val = _product(lam, arr, n)
    delta = np.minimum(_tail_delta(lam, t_abs, n), 2.0)
    rounding = 2.0 * (n + 1) * EPS * np.abs(val) + 2.0 * np.pi * EPS * t_abs / (1.0 - lam) + EPS
    err = delta * np.abs(val) + rounding
    if arr.ndim == 0:
        return float(val), float(err)
    return val, err


def nu_hat_value(lam, t, tail_eps: float = DEFAULT_TAIL_EPS):
    return nu_hat(fourier_product(lam, tail_eps), t)[0]


def nu_hat_sq(lam, t):
    """``|nu_hat(t)|^2`` with the tail pushed below float resolution (used as a test function ``f``)."""
    return np.square(nu_hat_value(lam, t, FINE_TAIL_EPS))


def scaling_identity_residual(fp: FourierProduct, t) -> float:
    """``|nu_hat(t) - cos(2 pi t) nu_hat(lam t)|`` with the right side using one factor fewer."""
    if not isinstance(fp, FourierProduct):
        fp = fourier_product(fp)
    lam = fp.lam.value
    t = float(t)
    n = fp.terms_for(abs(t))
    lhs = _product(lam, np.array(t), n)
    rhs = math.cos(2.0 * math.pi * t) * _product(lam, np.array(lam * t), max(n - 1, 0))
    return float(abs(lhs - rhs))


# -- tabulated |nu_hat|^2 for the compiled series -----------------------------

@dataclass(frozen=True)
class TailTable:
    lam: float
    h: float
    vals: np.ndarray
    ders: np.ndarray
    powers: np.ndarray
    error_bound: float

    def as_args(self):
        return self.h, self.vals, self.ders, self.powers

    def __call__(self, t):
        ts = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.array([_series.tail_value(v, self.h, self.vals, self.ders, self.powers) for v in ts])
        return out if np.ndim(t) else float(out[0])


@lru_cache(maxsize=32)
def tail_table(lam: float, t_max: float) -> TailTable:
    """Cubic Hermite table of ``g = |nu_hat|^2`` and ``g'`` on ``[0, t_max]``.

    ``|g''''| <= 16 M^4`` with ``M = 2 pi / (1 - lam)`` (moments of a measure
    supported in ``[-1/(1-lam), 1/(1-lam)]``), so the spacing ``h`` with
    ``16 M^4 h^4 / 384 <= 1e-14`` certifies the interpolation error.
    """
    m4 = 16.0 * (2.0 * math.pi / (1.0 - lam)) ** 4
    h = (TABLE_TARGET * 384.0 / m4) ** 0.25
    if t_max / h + 2 > TABLE_MAX_POINTS:
        h = t_max / (TABLE_MAX_POINTS - 2)
    k = int(math.ceil(t_max / h)) + 2
    t = np.arange(k) * h
    n = _n_terms(lam, t[-1], FINE_TAIL_EPS)
    p = np.ones(k)
    d = np.zeros(k)
    for j in range(n):
        a = 2.0 * math.pi * lam ** j
        c = np.cos(a * t)
        s = -a * np.sin(a * t)
        d = d * c + p * s
        p = p * c
    vals = p * p
    ders = 2.0 * p * d
    powers = lam ** np.arange(_n_terms(lam, 1e3 * max(t_max, 1.0), FINE_TAIL_EPS), dtype=float)
    bound = m4 * h ** 4 / 384.0 + 4.0 * (n + 2) * EPS
    return TailTable(lam, h, vals, ders, powers, bound)


def cycle_fixed_point(lam) -> float:
    """Fixed point ``lam / (4 (1 - lam))`` of ``tau_{1/4}``; the right end of ``X_L``."""
    r = as_param(lam).value
    return r / (4.0 * (1.0 - r))


def table_for(lam, extra: float = 0.0) -> TailTable:
    r = as_param(lam).value
    t_max = max(cycle_fixed_point(r), extra) * (1.0 + 1e-9) + 1e-12
    # round up so nearby calls share a table
    t_max = float(np.ceil(t_max * 64.0) / 64.0)
    return tail_table(r, t_max)


def series_levels(lam, x: float, depth: int, want_cycle: bool = False, prune: float = 0.0):
    """Per-level sums of the two atom series (compiled walk).

    Returns ``(levels0, levels1, pruned_mass, table_bound)``.
    """
    if depth < 0:
        raise UsageError("depth must be >= 0")
    r = as_param(lam).value
    tab = table_for(r, abs(float(x)))
    l0, l1, pruned = _series.run_walk(x, r, depth, cycle_fixed_point(r), want_cycle, tab.as_args(), prune)
    return l0, l1, pruned, tab.error_bound


def _check_xl(lam, x: float, tol: float = 1e-9):
    top = cycle_fixed_point(lam)
    if not -tol <= x <= top + tol:
        raise DomainError(f"x={x} outside [0, {top}]")


@dataclass
class IdentitySeries:
    """Partial sums of ``sum_{w in W0, |w| <= d} W^w(x) f(tau_w x)``."""

    lam: str
    x: float
    depth: int
    partial_sums: np.ndarray
    outside_hypothesis: bool = False
    notes: tuple = ()

    @property
    def value(self) -> float:
        return float(self.partial_sums[-1])

    @property
    def tail(self) -> float:
        return 1.0 - self.value


def functional_identity_partial(lam, x: float, depth: int, f: Callable | None = None) -> IdentitySeries:
    """Partial sums of the identity series at ``x`` through word length ``depth``.

    With ``f=None`` the function is ``|nu_hat|^2`` and the compiled walk is
    used (the same call that ``pathspace.h0`` makes).  Any other ``f`` goes
    through the level-by-level numpy path.  For ``lam`` in ``D`` a warning
    is issued and the result is flagged.
    """
    p = as_param(lam)
    x = float(x)
    _check_xl(p.value, x)
    in_d = exceptional_set_check(p).in_d
    notes = ()
    if in_d:
        warnings.warn(OUTSIDE_HYPOTHESIS, stacklevel=2)
        notes = (OUTSIDE_HYPOTHESIS,)
    if f is None:
        levels = series_levels(p, x, depth)[0]
    else:
        levels = identity_levels_generic(bernoulli_weight(p), f, x, depth)
    return IdentitySeries(str(p), x, depth, np.cumsum(levels), in_d, notes)


def identity_levels_generic(w: WeightFn, f: Callable, x: float, depth: int, cycle_letter: int = 1
                            ) -> np.ndarray:
    """Per-level sums of ``W^w(x) f(tau_w x)`` over words ending in ``cycle_letter``.

    Level 0 is ``f(x)``.  Subtrees of zero weight are dropped; each level is
    summed with ``math.fsum``.
    """
    ifs = w.ifs
    pts = np.array([float(x)])
    wts = np.array([1.0])
    out = np.zeros(depth + 1)
    out[0] = float(np.asarray(f(pts), dtype=float)[0])
    for lvl in range(1, depth + 1):
        kids = [ifs.tau(i, pts) for i in range(ifs.n_maps)]
        kw = [wts * weight_eval(w, k) for k in kids]
        sel = kw[cycle_letter] > 0
        if np.any(sel):
            out[lvl] = math.fsum(kw[cycle_letter][sel] * np.asarray(f(kids[cycle_letter][sel]), dtype=float))
        if lvl < depth:
            pts = np.concatenate(kids)
            wts = np.concatenate(kw)
            keep = wts > 0
            pts, wts = pts[keep], wts[keep]
    return out


def identity_grid(lam, n: int) -> np.ndarray:
    """``n`` evaluation points of ``X_L``.

    A uniform grid when ``X_L`` is an interval (``lam >= 1/2``); for
    ``lam < 1/2`` left endpoints of depth-m cylinders, which lie in ``X_L``.
    """
    p = as_param(lam)
    top = cycle_fixed_point(p)
    if p.value >= 0.5:
        return np.linspace(0.0, top, n)
    m = max(1, math.ceil(math.log2(max(n, 2))))
    ifs = dual_ifs(p.value)
    words = [tuple((k >> (m - 1 - j)) & 1 for j in range(m)) for k in range(1 << m)]
    pts = np.sort([float(encode_finite(ifs, w)) for w in words])
    idx = np.round(np.linspace(0, len(pts) - 1, n)).astype(int)
    return pts[idx]


# -- uniqueness probe -------------------------------------------------------

def smooth_bump(center: float, half_width: float, height: float = 1.0):
    """C-infinity bump ``height * exp(1 - 1/(1 - r^2))`` with peak ``height`` at ``center``."""

    def bump(y):
        r = (np.asarray(y, dtype=float) - center) / half_width
        out = np.zeros_like(r)
        inside = np.abs(r) < 1.0
        out[inside] = np.exp(1.0 - 1.0 / (1.0 - r[inside] ** 2))
        return height * out

    return bump


@dataclass
class ProbeResult:
    detected: bool
    scale: float
    depth: int
    grid: np.ndarray
    baseline: np.ndarray
    perturbed: np.ndarray
    first_order: float
    outside_hypothesis: bool = False

    @property
    def residual_change(self) -> float:
        """``max |S[f + bump] - S[f]|`` over the grid."""
        return float(np.max(np.abs(self.perturbed - self.baseline)))

    @property
    def baseline_residual(self) -> float:
        return float(np.max(np.abs(1.0 - self.baseline)))

    @property
    def perturbed_residual(self) -> float:
        return float(np.max(np.abs(1.0 - self.perturbed)))

    def __bool__(self):
        return self.detected


def identity_uniqueness_probe(lam, perturbation_scale: float, depth: int = 15, n_grid: int = 21
                              ) -> ProbeResult:
    """Replace ``f = |nu_hat|^2`` by ``f + bump`` and check the series notices.

    The bump sits at the middle of ``X_L`` with peak ``perturbation_scale``.
    Its first-order effect on the series is at least the empty-word term,
    ``max_x bump(x)`` over the grid; the probe is positive when the identity
    sum moves by at least half of that.
    """
    p = as_param(lam)
    in_d = exceptional_set_check(p).in_d
    if in_d:
        warnings.warn(OUTSIDE_HYPOTHESIS, stacklevel=2)
    top = cycle_fixed_point(p)
    bump = smooth_bump(top / 2.0, top / 4.0, perturbation_scale)
    w = bernoulli_weight(p)

    def f0(y):
        return nu_hat_sq(p, y)

    def f1(y):
        return f0(y) + bump(y)

    xs = identity_grid(p, n_grid)
    base = np.array([identity_levels_generic(w, f0, x, depth).sum() for x in xs])
    pert = np.array([identity_levels_generic(w, f1, x, depth).sum() for x in xs])
    first = float(np.max(bump(xs)))
    shift = float(np.max(np.abs(pert - base)))
    detected = first > 0 and shift >= 0.5 * first
    return ProbeResult(bool(detected), float(perturbation_scale), depth, xs, base, pert, first, in_d)


# -- distribution function ---------------------------------------------------

def _haar_ok(p: ScalarParam) -> bool:
    if p.is_exact:
        return p.exact * 2 == 1
    return abs(p.value - 0.5) <= 1e-15


@dataclass(frozen=True)
class CDFGrid:
    lam: float
    x: np.ndarray
    F: np.ndarray
    iterations: int
    last_change: float

    def __call__(self, x):
        return np.interp(x, self.x, self.F, left=0.0, right=1.0)


@lru_cache(maxsize=16)
def cdf_fixed_point(lam: float, n_grid: int = CDF_GRID, tol: float = CDF_TOL, max_iter: int = 20000) -> CDFGrid:
    """Iterate ``F <- (F((x-1)/lam) + F((x+1)/lam)) / 2`` from the unit step.

    The grid has ``n_grid`` points with the hull ends ``+/- 1/(1-lam)`` on grid
    nodes and ``CDF_PAD`` cells of margin; ``F`` is 0 / 1 outside the grid.
    """
    H = 1.0 / (1.0 - lam)
    span = n_grid - 1 - 2 * CDF_PAD
    dx = 2.0 * H / span
    j = np.arange(n_grid)
    x = (j - CDF_PAD - span / 2.0) * dx
    F = np.where(x > 0, 1.0, np.where(x < 0, 0.0, 0.5))
    a, b = (x - 1.0) / lam, (x + 1.0) / lam
    change = np.inf
    for it in range(1, max_iter + 1):
        new = 0.5 * (np.interp(a, x, F, left=0.0, right=1.0) + np.interp(b, x, F, left=0.0, right=1.0))
        change = float(np.max(np.abs(new - F)))
        F = new
        if change < tol:
            return CDFGrid(lam, x, F, it, change)
    raise ResourceError(f"CDF iteration did not settle after {max_iter} steps (last change {change:.3g})")


def cdf_monte_carlo(lam, x, samples: int = 1_000_000, seed: int = 0xDEC0DE, tol: float = 1e-15):
    """Empirical CDF of ``sum_k (+/-) lam^k`` truncated where ``lam^k / (1 - lam) < tol``."""
    r = as_param(lam).value
    rng = np.random.Generator(np.random.Philox(key=seed))
    s = np.zeros(samples)
    k = 0
    while r ** k / (1.0 - r) >= tol:
        s += r ** k * (2.0 * rng.integers(0, 2, samples) - 1.0)
        k += 1
    s.sort()
    xs = np.asarray(x, dtype=float)
    out = np.searchsorted(s, xs, side="right") / samples
    return float(out) if out.ndim == 0 else out


CDF_METHODS = ("closed_form_haar", "monte_carlo", "fixed_point_iteration")


def cdf_eval(lam, x, method: str = "fixed_point_iteration", **kw):
    """``F(x) = nu((-inf, x])`` for the Bernoulli convolution with ratio ``lam``."""
    p = as_param(lam)
    if method == "closed_form_haar":
        if not _haar_ok(p):
            raise DomainError("the closed form holds only for lam = 1/2")
        out = np.clip((np.asarray(x, dtype=float) + 2.0) / 4.0, 0.0, 1.0)
    elif method == "monte_carlo":
        return cdf_monte_carlo(p, x, **kw)
    elif method == "fixed_point_iteration":
        out = cdf_fixed_point(p.value, **kw)(np.asarray(x, dtype=float))
    else:
        raise UsageError(f"unknown method {method!r}; choose from {CDF_METHODS}")
    return float(out) if np.ndim(out) == 0 else out


# -- Wiener averages ----------------------------------------------------------

@dataclass
class WienerResult:
    lam: str
    T: float
    n: np.ndarray
    L: np.ndarray
    s: np.ndarray
    panels: list = field(default_factory=list)

    def log2_slope(self, n_lo: int, n_hi: int) -> float:
        sel = (self.n >= n_lo) & (self.n <= n_hi)
        return float(np.polyfit(np.log2(self.L[sel]), np.log2(self.s[sel]), 1)[0])

    def nonincreasing(self, rtol: float = 1e-9) -> bool:
        return bool(np.all(np.diff(self.s) <= rtol * self.s[:-1]))


def _simpson(fn, a: float, b: float, m: int) -> float:
    x = np.linspace(a, b, 2 * m + 1)
    y = fn(x)
    h = (b - a) / (2 * m)
    return float(h / 3.0 * (y[0] + y[-1] + 4.0 * y[1:-1:2].sum() + 2.0 * y[2:-1:2].sum()))


def adaptive_simpson(fn, a: float, b: float, min_panel: float, rtol: float = WIENER_RTOL,
                     atol: float = 1e-15, max_doublings: int = 12):
    """Composite Simpson with panels no wider than ``min_panel``, doubled until
    successive estimates agree to ``rtol``.  Returns ``(value, panels)``."""
    m = max(2, math.ceil((b - a) / min_panel))
    prev = _simpson(fn, a, b, m)
    history = [(m, prev)]
    for _ in range(max_doublings):
        m *= 2
        cur = _simpson(fn, a, b, m)
        history.append((m, cur))
        if abs(cur - prev) <= rtol * abs(cur) + atol:
            return cur, m
        prev = cur
    raise QuadratureError("Simpson refinement did not converge",
                          {"interval": (a, b), "history": history, "rtol": rtol})


def wiener_cesaro(lam, T: float, n_max: int, rtol: float = WIENER_RTOL) -> WienerResult:
    """``s(L) = (1/L) int_0^L |nu_hat|^2`` at ``L = lam^{-n} T``, ``n = 0..n_max``.

    Substituting ``t = lam^{-n} u`` and using ``nu_hat(lam^{-n} u) =
    prod_{k=1..n} cos(2 pi lam^{-k} u) nu_hat(u)`` turns each value into an
    integral over ``[0, T]`` whose shortest period is ``lam^n / 2``.
    """
    p = as_param(lam)
    r = p.value
    if not T > 0:
        raise UsageError("T must be positive")
    if n_max < 0:
        raise UsageError("n_max must be >= 0")
    fp = fourier_product(p)
    ns = np.arange(n_max + 1)
    s = np.zeros(n_max + 1)
    panels = []
    for n in ns:
        freqs = 2.0 * np.pi * r ** (-np.arange(1, n + 1, dtype=float))

        def integrand(u, freqs=freqs):
            out = np.square(nu_hat(fp, u)[0])
            for fq in freqs:
                out = out * np.cos(fq * u) ** 2
            return out

        period = min(0.5, 0.5 * r ** n)
        val, m = adaptive_simpson(integrand, 0.0, T, period / 8.0, rtol)
        s[n] = val / T
        panels.append(m)
    return WienerResult(str(p), float(T), ns, T * r ** (-ns.astype(float)), s, panels)


def wiener_direct(lam, L: float, rtol: float = WIENER_RTOL) -> float:
    """``(1/L) int_0^L |nu_hat|^2`` integrated directly (cross-check route)."""
    fp = fourier_product(lam)
    val, _ = adaptive_simpson(lambda u: np.square(nu_hat(fp, u)[0]), 0.0, L, 1.0 / 16.0, rtol)
    return val / L
