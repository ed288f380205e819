"""Cycles of a two-map IFS, W-cycle certificates and the exceptional set

    D = {1 - 1/(2n) : n = 1, 2, ...}.

Cycles are identified with the lexicographically least rotation of their
generating word (a Lyndon word), so each orbit is listed exactly once.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

from .errors import ResourceError, UsageError
from .ifs import AffineIFS, as_param, dual_ifs, encode_periodic
from .transfer import WeightFn, bernoulli_weight, weight_eval

DEFAULT_PERIOD_CAP = 12
FLOAT_CYCLE_TOL = 1e-9
D_FLOAT_TOL = 1e-10


@dataclass(frozen=True)
class Cycle:
    """Orbit generated by ``word`` (least rotation), listed as
    ``x0, tau_{w_p} x0, tau_{w_{p-1}} tau_{w_p} x0, ...``."""

    word: tuple
    points: tuple
    minimal_period: int
    exact: bool = False

    def closure_error(self, ifs: AffineIFS) -> float:
        y = self.points[0]
        for i in reversed(self.word):
            y = ifs.tau(i, y)
        return float(abs(y - self.points[0]))


@dataclass(frozen=True)
class WCycleCertificate:
    cycle: Cycle
    is_w_cycle: bool
    mode: str
    witness: tuple = field(default=())


@dataclass(frozen=True)
class DivisibilityRecord:
    """Integer form of ``2x/lam`` for ``x`` with periodic encoding ``word``:

        b * sum_j w_j b^(p-j) a^(j-1)  /  (2 (b^p - a^p)).
    """

    lam: Fraction
    word: tuple
    numerator: int
    denominator: int
    gcd: int
    gcd_b_and_bp_minus_ap: int
    holds: bool
    notes: tuple = ()

    @property
    def value(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    def __bool__(self):
        return self.holds


@dataclass(frozen=True)
class ExceptionalSetResult:
    in_d: bool
    n: int | None
    mode: str


@dataclass
class NoLongCyclesReport:
    lam: str
    p_max: int
    mode: str
    cycles_checked: dict
    w_one_cycles: list
    violations: list
    exact_float_agree: bool | None

    @property
    def ok(self) -> bool:
        return not self.violations

    def as_dict(self) -> dict:
        return {
            "lambda": self.lam,
            "p_max": self.p_max,
            "mode": self.mode,
            "cycles_checked": {str(k): v for k, v in self.cycles_checked.items()},
            "w_one_cycles": self.w_one_cycles,
            "violations": self.violations,
            "exact_float_agree": self.exact_float_agree,
            "ok": self.ok,
        }


def lyndon_words(k: int, n: int) -> Iterator[tuple]:
    """All Lyndon words over ``range(k)`` of length ``<= n`` in lexicographic order (Duval)."""
    w = [-1]
    while w:
        w[-1] += 1
        yield tuple(w)
        m = len(w)
        while len(w) < n:
            w.append(w[len(w) - m])
        while w and w[-1] == k - 1:
            w.pop()


def mobius(n: int) -> int:
    result, m, p = 1, n, 2
    while p * p <= m:
        if m % p == 0:
            m //= p
            if m % p == 0:
                return 0
            result = -result
        p += 1
    if m > 1:
        result = -result
    return result


def necklace_count(p: int, k: int = 2) -> int:
    """Number of aperiodic necklaces (primitive cycles) of length ``p``."""
    total = sum(mobius(d) * k ** (p // d) for d in range(1, p + 1) if p % d == 0)
    return total // p


def least_rotation(word: Sequence[int]) -> tuple:
    word = tuple(word)
    return min(word[i:] + word[:i] for i in range(len(word))) if word else word


def minimal_period(word: Sequence[int]) -> int:
    word = tuple(word)
    p = len(word)
    for d in range(1, p + 1):
        if p % d == 0 and word[:d] * (p // d) == word:
            return d
    return p


def cycle_from_word(ifs: AffineIFS, word: Sequence[int]) -> Cycle:
    word = least_rotation(word)
    per = minimal_period(word)
    word = word[:per]
    x0 = encode_periodic(ifs, word)
    pts = [x0]
    y = x0
    for i in reversed(word[1:]):
        y = ifs.tau(i, y)
        pts.append(y)
    return Cycle(word, tuple(pts), per, ifs.is_exact)


def enumerate_cycles(ifs: AffineIFS, p_max: int, cap: int = DEFAULT_PERIOD_CAP) -> list[Cycle]:
    """One cycle per primitive necklace of length ``<= p_max``; ordered by period, then word."""
    if p_max < 1:
        raise UsageError("p_max must be >= 1")
    if p_max > cap:
        raise ResourceError(f"p_max={p_max} exceeds cap {cap}")
    words = sorted(lyndon_words(ifs.n_maps, p_max), key=lambda w: (len(w), w))
    return [cycle_from_word(ifs, w) for w in words]


def certify_w_cycle(c: Cycle, w: WeightFn, tol: float = FLOAT_CYCLE_TOL, exact: bool | None = None
                    ) -> WCycleCertificate:
    """Decide whether ``W == 1`` on every point of the cycle.

    Exact route (rational points and an exact unit test on ``W``): for the
    cos^2 weight ``W(y) = 1`` iff ``2y/lam`` is an integer.  Otherwise each
    ``|W(y) - 1|`` is compared with ``tol``.
    """
    if exact is None:
        exact = c.exact and w.is_one_exact is not None
    if exact:
        checks = tuple(bool(w.is_one_exact(y)) for y in c.points)
        return WCycleCertificate(c, all(checks), "exact", checks)
    vals = tuple(float(weight_eval(w, float(y))) for y in c.points)
    return WCycleCertificate(c, all(abs(v - 1.0) <= tol for v in vals), "numerical", vals)


def _as_fraction_pair(lam):
    notes = []
    if isinstance(lam, tuple):
        a, b = int(lam[0]), int(lam[1])
        g = math.gcd(a, b)
        if g != 1:
            notes.append(f"normalized {a}/{b} by gcd {g}")
        frac = Fraction(a, b)
    else:
        p = as_param(lam)
        if not p.is_exact:
            raise UsageError("exact divisibility test needs a rational ratio")
        frac = p.exact
    if not 0 < frac < 1:
        raise UsageError("ratio must lie in (0, 1)")
    return frac, notes


def exact_wcycle_divisibility(lam, word: Sequence[int]) -> DivisibilityRecord:
    """Integer test of ``2 pi(word^inf) / lam in Z`` on the {0, 1/4} system.

    ``lam`` is a Fraction, ``"a/b"`` string, or an ``(a, b)`` pair; a
    non-reduced pair is reduced and the fact recorded in ``notes``.
    ``word`` is over the letters {0, 1} (physical digits 0 and 1/4).
    """
    frac, notes = _as_fraction_pair(lam)
    word = tuple(int(x) for x in word)
    if not word:
        raise UsageError("word must be non-empty")
    if any(x not in (0, 1) for x in word):
        raise UsageError("letters must be 0 or 1")
    a, b = frac.numerator, frac.denominator
    p = len(word)
    inner = sum(wj * b ** (p - j) * a ** (j - 1) for j, wj in enumerate(word, start=1))
    num = b * inner
    den = 2 * (b ** p - a ** p)
    g = math.gcd(num, den)
    holds = num % den == 0
    return DivisibilityRecord(frac, word, num, den, g, math.gcd(b, b ** p - a ** p), holds, tuple(notes))


def exceptional_set_check(lam) -> ExceptionalSetResult:
    """Is ``lam = 1 - 1/(2n)`` for some positive integer ``n``?"""
    p = as_param(lam)
    if p.is_exact:
        q = p.exact
        gap_num, b = q.denominator - q.numerator, q.denominator
        # 1 - lam = gap_num / b must equal 1/(2n)
        if b % (2 * gap_num) == 0:
            return ExceptionalSetResult(True, b // (2 * gap_num), "exact")
        return ExceptionalSetResult(False, None, "exact")
    r = p.value
    n_top = math.ceil(1.0 / (2.0 * (1.0 - r))) + 1
    for n in range(1, n_top + 1):
        if abs(r - (1.0 - 1.0 / (2 * n))) <= D_FLOAT_TOL:
            return ExceptionalSetResult(True, n, "numerical")
    return ExceptionalSetResult(False, None, "numerical")


def _rotations(word):
    return [word[i:] + word[:i] for i in range(len(word))]


def verify_no_long_wcycles(lam, p_max: int, w: WeightFn | None = None, tol: float = FLOAT_CYCLE_TOL
                           ) -> NoLongCyclesReport:
    """Enumerate every cycle of period ``<= p_max`` on the {0, 1/4} system and
    certify it; any W-cycle of period >= 2 is reported as a violation.

    With a rational ratio each cycle is decided twice, by the integer
    divisibility test on every rotation and by the float test at ``tol``,
    and the two verdicts are compared.
    """
    p = as_param(lam)
    w = w or bernoulli_weight(p)
    ifs = w.ifs
    cycles = enumerate_cycles(ifs, p_max)
    counts: dict[int, int] = {}
    w_one, violations = [], []
    agree = True if p.is_exact else None
    for c in cycles:
        counts[c.minimal_period] = counts.get(c.minimal_period, 0) + 1
        fl = certify_w_cycle(c, w, tol, exact=False)
        if p.is_exact:
            is_w = all(exact_wcycle_divisibility(p.exact, r).holds for r in _rotations(c.word))
            if is_w != fl.is_w_cycle:
                agree = False
        else:
            is_w = fl.is_w_cycle
        if is_w:
            entry = {"word": list(c.word), "points": [str(x) for x in c.points]}
            (w_one if c.minimal_period == 1 else violations).append(entry)
    return NoLongCyclesReport(str(p), p_max, "exact" if p.is_exact else "numerical", counts, w_one,
                              violations, agree)


def dual_cycles(lam, p_max: int) -> list[Cycle]:
    return enumerate_cycles(dual_ifs(lam), p_max)
