"""Affine iterated function systems on the line.

Every map has the form ``tau_b(x) = lam * (x + b)`` with ``0 < lam < 1``.
Three named systems are provided:

* ``bernoulli_ifs(lam)`` -- digits ``{-1/lam, +1/lam}``, i.e. ``x -> lam*x -/+ 1``
* ``dual_ifs(lam)``      -- digits ``{0, 1/4}`` (internal letters 0, 1)
* ``binary_ifs(lam)``    -- digits ``{0, 1}``

When the ratio is given as an exact rational the digits are stored as
``Fraction`` and the encoding maps stay exact on ``Fraction`` input.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, UnsupportedConfigurationError, UsageError

FLOAT_TOL = 1e-12


@dataclass(frozen=True)
class ScalarParam:
    """The contraction ratio ``lam``, exact when a rational is available."""

    value: float
    exact: Fraction | None = None

    def __post_init__(self):
        if not 0.0 < self.value < 1.0:
            raise DomainError(f"ratio must lie in (0, 1), got {self.value!r}")
        if self.exact is not None:
            if not 0 < self.exact < 1:
                raise DomainError(f"ratio must lie in (0, 1), got {self.exact}")
            if float(self.exact) != self.value:
                raise UsageError("exact and float values disagree")

    @classmethod
    def parse(cls, raw) -> "ScalarParam":
        """Build from ``"a/b"``, a decimal string, a Fraction, int or float.

        Strings of the form ``"a/b"`` and rationals give an exact parameter;
        decimal literals such as ``"0.9"`` are kept as floats.
        """
        if isinstance(raw, ScalarParam):
            return raw
        if isinstance(raw, str):
            text = raw.strip()
            if "/" in text:
                try:
                    frac = Fraction(text)
                except (ValueError, ZeroDivisionError) as exc:
                    raise UsageError(f"cannot parse ratio {raw!r}") from exc
                return cls(float(frac), frac)
            try:
                return cls(float(text))
            except ValueError as exc:
                raise UsageError(f"cannot parse ratio {raw!r}") from exc
        if isinstance(raw, Rational):
            frac = Fraction(raw)
            return cls(float(frac), frac)
        if isinstance(raw, (float, np.floating)):
            return cls(float(raw))
        raise UsageError(f"cannot interpret {raw!r} as a ratio")

    @property
    def is_exact(self) -> bool:
        return self.exact is not None

    def __float__(self):
        return self.value

    def __str__(self):
        return str(self.exact) if self.exact is not None else repr(self.value)


def as_param(lam) -> ScalarParam:
    return ScalarParam.parse(lam)


@dataclass(frozen=True)
class AffineIFS:
    """Maps ``tau_i(x) = lam * (x + digits[i])``."""

    ratio: ScalarParam
    digits: tuple
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if len(set(self.digits)) != len(self.digits):
            raise UsageError("digits must be pairwise distinct")
        if len(self.digits) < 1:
            raise UsageError("need at least one digit")

    @property
    def lam(self) -> float:
        return self.ratio.value

    @property
    def is_exact(self) -> bool:
        return self.ratio.is_exact and all(isinstance(b, Fraction) for b in self.digits)

    @property
    def n_maps(self) -> int:
        return len(self.digits)

    def _check_index(self, i):
        if not isinstance(i, (int, np.integer)) or not 0 <= i < len(self.digits):
            raise UsageError(f"digit index {i!r} out of range for {len(self.digits)} maps")

    def _exact_args(self, x):
        return self.is_exact and isinstance(x, Rational) and not isinstance(x, bool)

    def tau(self, i, x):
        self._check_index(i)
        if self._exact_args(x):
            return self.ratio.exact * (Fraction(x) + self.digits[i])
        if isinstance(x, np.ndarray):
            return self.lam * (x.astype(float) + float(self.digits[i]))
        return self.lam * (float(x) + float(self.digits[i]))

    def tau_inverse(self, i, x):
        self._check_index(i)
        if self._exact_args(x):
            return Fraction(x) / self.ratio.exact - self.digits[i]
        if isinstance(x, np.ndarray):
            return x.astype(float) / self.lam - float(self.digits[i])
        return float(x) / self.lam - float(self.digits[i])

    def fixed_point(self, i):
        """Fixed point ``lam*b/(1-lam)`` of ``tau_i``."""
        self._check_index(i)
        if self.is_exact:
            lam = self.ratio.exact
            return lam * self.digits[i] / (1 - lam)
        return self.lam * float(self.digits[i]) / (1.0 - self.lam)

    def hull(self):
        """Convex hull ``[lam*min(B)/(1-lam), lam*max(B)/(1-lam)]`` of the attractor."""
        lo, hi = min(self.digits), max(self.digits)
        if self.is_exact:
            lam = self.ratio.exact
            return lam * lo / (1 - lam), lam * hi / (1 - lam)
        s = self.lam / (1.0 - self.lam)
        return s * float(lo), s * float(hi)

    def hull_float(self):
        lo, hi = self.hull()
        return float(lo), float(hi)

    def index_of(self, digit) -> int:
        """Digit index of a physical digit value."""
        for i, b in enumerate(self.digits):
            if b == digit or abs(float(b) - float(digit)) <= FLOAT_TOL:
                return i
        raise UsageError(f"{digit!r} is not a digit of this system")


def affine_ifs(lam, digits: Iterable, name: str = "") -> AffineIFS:
    p = as_param(lam)
    raw = list(digits)
    if p.is_exact and all(isinstance(d, Rational) for d in raw):
        ds = tuple(sorted(Fraction(d) for d in raw))
    else:
        ds = tuple(sorted(float(d) for d in raw))
    return AffineIFS(p, ds, name)


def bernoulli_ifs(lam) -> AffineIFS:
    """The system ``x -> lam*x - 1``, ``x -> lam*x + 1`` (digits ``-/+ 1/lam``)."""
    p = as_param(lam)
    if p.is_exact:
        d = 1 / p.exact
        return AffineIFS(p, (-d, d), "B")
    return AffineIFS(p, (-1.0 / p.value, 1.0 / p.value), "B")


def dual_ifs(lam) -> AffineIFS:
    """The system ``tau_0(x) = lam*x``, ``tau_{1/4}(x) = lam*(x + 1/4)``."""
    p = as_param(lam)
    if p.is_exact:
        return AffineIFS(p, (Fraction(0), Fraction(1, 4)), "L")
    return AffineIFS(p, (0.0, 0.25), "L")


def binary_ifs(lam) -> AffineIFS:
    """Digits ``{0, 1}``: the attractor is ``{sum w_j lam^j : w_j in {0,1}}``."""
    p = as_param(lam)
    if p.is_exact:
        return AffineIFS(p, (Fraction(0), Fraction(1)), "B01")
    return AffineIFS(p, (0.0, 1.0), "B01")


SYSTEMS = {"B": bernoulli_ifs, "L": dual_ifs, "B01": binary_ifs}


def make_system(name: str, lam) -> AffineIFS:
    try:
        return SYSTEMS[name](lam)
    except KeyError:
        raise UsageError(f"unknown system {name!r}; choose from {sorted(SYSTEMS)}") from None


# -- operations ---------------------------------------------------------------


def tau_apply(ifs: AffineIFS, index: int, x):
    return ifs.tau(index, x)


def tau_inverse(ifs: AffineIFS, index: int, x):
    return ifs.tau_inverse(index, x)


def _check_word(ifs, word):
    for i in word:
        ifs._check_index(i)


def encode_finite(ifs: AffineIFS, word: Sequence[int]):
    """``sum_{j=1..k} lam^j * b_{w_j}``; the empty word maps to 0."""
    _check_word(ifs, word)
    if ifs.is_exact:
        lam = ifs.ratio.exact
        acc, power = Fraction(0), Fraction(1)
        for i in word:
            power *= lam
            acc += power * ifs.digits[i]
        return acc
    acc, power = 0.0, 1.0
    for i in word:
        power *= ifs.lam
        acc += power * float(ifs.digits[i])
    return acc


def encode_periodic(ifs: AffineIFS, word: Sequence[int]):
    """Point with encoding ``word`` repeated forever."""
    if len(word) == 0:
        raise UsageError("periodic encoding needs a non-empty word")
    head = encode_finite(ifs, word)
    p = len(word)
    if ifs.is_exact:
        return head / (1 - ifs.ratio.exact ** p)
    return head / (1.0 - ifs.lam ** p)


def compose_word(ifs: AffineIFS, word: Sequence[int], x):
    """``tau_{w_1} o ... o tau_{w_k}(x)``, so ``compose_word(w, 0) == encode_finite(w)``."""
    for i in reversed(word):
        x = ifs.tau(i, x)
    return x


@dataclass(frozen=True)
class AttractorDescription:
    kind: str
    endpoints: tuple
    hausdorff_dim: float | None
    ifs: AffineIFS = field(repr=False)

    def cover(self, depth: int) -> np.ndarray:
        """Intervals ``tau_w(hull)`` for all words of length ``depth``, sorted."""
        return attractor_cover(self.ifs, depth)


def attractor_cover(ifs: AffineIFS, depth: int) -> np.ndarray:
    if depth < 0:
        raise UsageError("depth must be non-negative")
    lo, hi = ifs.hull_float()
    lam = ifs.lam
    offsets = np.zeros(1)
    # offsets of tau_w(0) built word-by-word from the innermost map outwards
    for _ in range(depth):
        offsets = np.concatenate([lam * (offsets + float(b)) for b in ifs.digits])
    scale = lam ** depth
    cells = np.column_stack([offsets + scale * lo, offsets + scale * hi])
    return cells[np.argsort(cells[:, 0], kind="stable")]


def attractor_describe(ifs: AffineIFS) -> AttractorDescription:
    if ifs.n_maps != 2:
        raise UnsupportedConfigurationError("attractor classification needs exactly two digits")
    lam = ifs.lam
    endpoints = ifs.hull()
    if (ifs.ratio.exact >= Fraction(1, 2)) if ifs.ratio.is_exact else lam >= 0.5:
        return AttractorDescription("interval", endpoints, None, ifs)
    return AttractorDescription("cantor", endpoints, math.log(2.0) / math.log(1.0 / lam), ifs)


def cantor_gap_sum(lam):
    """Total length of the removed middle gaps for ``lam < 1/2`` (digits 0, 1).

    First gap ``lam(1-2lam)/(1-lam)``; at each later stage twice as many
    copies scaled by ``lam``, summing to ``lam/(1-lam)``.
    """
    p = as_param(lam)
    if p.is_exact:
        r = p.exact
        if r >= Fraction(1, 2):
            raise DomainError("gap sum only defined for lam < 1/2")
        return r * (1 - 2 * r) / (1 - r) * (1 / (1 - 2 * r))
    r = p.value
    if r >= 0.5:
        raise DomainError("gap sum only defined for lam < 1/2")
    return r * (1 - 2 * r) / (1 - r) * (1 / (1 - 2 * r))


def representation_alphabet_max(lam) -> int:
    """Largest integer ``a`` with ``a < 1/(1-lam)``."""
    p = as_param(lam)
    bound = 1 / (1 - p.exact) if p.is_exact else 1.0 / (1.0 - p.value)
    a = math.floor(bound)
    if a == bound:
        a -= 1
    return int(a)


def lambda_representation(lam, x, k: int) -> tuple[int, ...]:
    """First ``k`` digits of ``x = sum w_j lam^j`` via ``r(y) = frac(y/lam)``.

    Exact when both ``lam`` and ``x`` are rational.  Raises ``DomainError``
    if ``x`` is outside ``[0, lam/(1-lam)]`` or a digit leaves
    ``{0, ..., a}`` (``x`` not representable over that alphabet).
    """
    if k < 1:
        raise UsageError("k must be >= 1")
    p = as_param(lam)
    a = representation_alphabet_max(p)
    exact = p.is_exact and isinstance(x, Rational)
    if exact:
        r, y = p.exact, Fraction(x)
        top = r / (1 - r)
        if not 0 <= y <= top:
            raise DomainError(f"x={x} outside [0, {top}]")
    else:
        r, y = p.value, float(x)
        top = r / (1 - r)
        if not -1e-9 <= y <= top + 1e-9:
            raise DomainError(f"x={x} outside [0, {top}]")
        y = min(max(y, 0.0), top)
    digits = []
    for _ in range(k):
        q = y / r
        d = math.floor(q)
        if d == a + 1 and q == d:
            # right end point with 1/(1-lam) an integer: take a, remainder 1
            d = a
        if d > a:
            raise DomainError(f"digit {d} exceeds alphabet max {a}; x has no expansion over it")
        digits.append(int(d))
        y = q - d
    return tuple(digits)


def representation_error_bound(lam, k: int) -> float:
    p = as_param(lam)
    return representation_alphabet_max(p) * p.value ** k / (1 - p.value)


def affine_normalize(lam, a, b):
    """Slope and intercept of ``alpha(x) = (b-a) x + a*lam/(1-lam)``.

    ``alpha`` carries the {0,1}-system onto the {a,b}-system, digit 0 -> a,
    digit 1 -> b.
    """
    p = as_param(lam)
    if a == b:
        raise DomainError("degenerate digit set: a == b")
    if a > b:
        raise UsageError("need a < b")
    if p.is_exact and isinstance(a, Rational) and isinstance(b, Rational):
        r = p.exact
        return Fraction(b) - Fraction(a), Fraction(a) * r / (1 - r)
    r = p.value
    return float(b) - float(a), float(a) * r / (1 - r)


def all_words(n_letters: int, length: int):
    return itertools.product(range(n_letters), repeat=length)


def fiber_count(ifs: AffineIFS, x: float, n: int, eps: float = 0.0) -> int:
    """Number of length-``n`` words whose cylinder ``tau_w(hull)`` contains ``x``.

    For ``lam < 1/2`` (digits 0, 1) this is at most one; for ``lam > 1/2``
    it grows with ``n``, a finite witness of non-unique encodings.
    """
    cells = attractor_cover(ifs, n)
    x = float(x)
    return int(np.count_nonzero((cells[:, 0] - eps <= x) & (x <= cells[:, 1] + eps)))
