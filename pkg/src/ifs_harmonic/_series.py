"""Compiled depth-first walk over the word tree of the {0, 1/4} system.

For a start point ``x`` the walk visits every word ``w`` of length
``<= depth`` and accumulates, level by level,

    class 0:  W^w(x) * g(tau_w x)         for w empty or ending in 1/4
    class 1:  W^w(x) * g(x* - tau_w x)    for w empty or ending in 0

where ``g = |nu_hat|^2`` is read from a cubic Hermite table and ``x*`` is
the fixed point of ``tau_{1/4}``.  Per-level sums use Neumaier summation.
"""
import math

import numpy as np
from numba import njit

TWO_PI = 2.0 * math.pi


@njit(cache=True)
def tail_value(t, h, vals, ders, powers):
    t = abs(t)
    u = t / h
    i = int(u)
    if i < vals.shape[0] - 1:
        s = u - i
        s1 = 1.0 - s
        f0 = vals[i]
        f1 = vals[i + 1]
        d0 = ders[i] * h
        d1 = ders[i + 1] * h
        v = ((1.0 + 2.0 * s) * s1 * s1 * f0 + s * s1 * s1 * d0
             + s * s * (3.0 - 2.0 * s) * f1 + s * s * (s - 1.0) * d1)
        # g >= 0; the cubic can dip below 0 next to a double zero
        return v if v > 0.0 else 0.0
    p = 1.0
    for k in range(powers.shape[0]):
        p *= math.cos(TWO_PI * powers[k] * t)
    return p * p


@njit(cache=True)
def _add(sums, comp, level, v):
    s = sums[level]
    t = s + v
    if abs(s) >= abs(v):
        comp[level] += (s - t) + v
    else:
        comp[level] += (v - t) + s
    sums[level] = t


@njit(cache=True)
def walk(x, lam, depth, x_star, want_cycle, h, vals, ders, powers, prune, out0, out1):
    """Fill ``out0``/``out1`` (length ``depth + 1``) with per-level sums.

    Returns the total weight of subtrees cut by ``prune``.
    """
    n = depth + 1
    c0 = np.zeros(n)
    c1 = np.zeros(n)
    for k in range(n):
        out0[k] = 0.0
        out1[k] = 0.0
    out0[0] = tail_value(x, h, vals, ders, powers)
    if want_cycle:
        out1[0] = tail_value(x_star - x, h, vals, ders, powers)
    pruned = 0.0
    if depth == 0:
        return pruned
    size = 2 * depth + 4
    sy = np.empty(size)
    sw = np.empty(size)
    sl = np.empty(size, dtype=np.int64)
    sp = 0
    sy[0] = x
    sw[0] = 1.0
    sl[0] = 0
    sp = 1
    while sp > 0:
        sp -= 1
        y = sy[sp]
        w = sw[sp]
        lvl = sl[sp] + 1
        # W(tau_0 y) = cos^2(2 pi y), W(tau_{1/4} y) = sin^2(2 pi y)
        c = 0.5 * w * math.cos(2.0 * TWO_PI * y)
        w0 = 0.5 * w + c
        w1 = 0.5 * w - c
        y0 = lam * y
        y1 = lam * (y + 0.25)
        if w1 > 0.0:
            _add(out0, c0, lvl, w1 * tail_value(y1, h, vals, ders, powers))
        if want_cycle and w0 > 0.0:
            _add(out1, c1, lvl, w0 * tail_value(x_star - y0, h, vals, ders, powers))
        if lvl < depth:
            if w0 > prune:
                sy[sp] = y0
                sw[sp] = w0
                sl[sp] = lvl
                sp += 1
            else:
                pruned += w0
            if w1 > prune:
                sy[sp] = y1
                sw[sp] = w1
                sl[sp] = lvl
                sp += 1
            else:
                pruned += w1
    for k in range(n):
        out0[k] += c0[k]
        out1[k] += c1[k]
    return pruned


def run_walk(x, lam, depth, x_star, want_cycle, table, prune=0.0):
    h, vals, ders, powers = table
    out0 = np.zeros(depth + 1)
    out1 = np.zeros(depth + 1)
    pruned = walk(float(x), float(lam), int(depth), float(x_star), bool(want_cycle), h, vals, ders,
                  powers, float(prune), out0, out1)
    return out0, out1, pruned
