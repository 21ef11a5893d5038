"""Type-m ordinals below epsilon_0 and their integer coding.

Level 1 holds ordinals ``w*a + b``, coded as ``2**a * (2b+1) - 1``.
Level m+1 holds sums ``w**x1 + ... + w**xi`` with strictly decreasing
level-m exponents, coded as ``2**c1 + ... + 2**ci`` where ``ci`` is the
level-m code of ``xi``.  Because the exponents of a binary expansion are
distinct, sorting them by ``<_m`` always yields a strictly decreasing list,
so every natural number is the code of exactly one level-(m+1) ordinal.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cmp_to_key, lru_cache
from typing import Callable, Sequence, Union

from .budget import Budget, BudgetExceeded, DEFAULT_BUDGET


class InvalidCode(ValueError):
    pass


class LevelMismatch(ValueError):
    pass


class DescentViolation(ArithmeticError):
    def __init__(self, m, phi_m):
        super().__init__(f"descent violated: phi({m}) = {phi_m} is not below {m}")
        self.m = m
        self.phi_m = phi_m


# --------------------------------------------------------------------------
# codes

def nu(x: int) -> int:
    """Exponent ``a`` in ``x = 2**a (2b+1) - 1``."""
    if x < 0:
        raise InvalidCode(f"negative code {x}")
    y = x + 1
    return (y & -y).bit_length() - 1


def theta(x: int) -> int:
    """Odd-part index ``b`` in ``x = 2**a (2b+1) - 1``."""
    if x < 0:
        raise InvalidCode(f"negative code {x}")
    return ((x + 1) >> nu(x)) // 2


def bits(x: int) -> list[int]:
    """Exponents of the binary expansion of ``x``, in increasing numeric order."""
    out = []
    i = 0
    while x:
        if x & 1:
            out.append(i)
        x >>= 1
        i += 1
    return out


def _check_level(m: int) -> None:
    if not isinstance(m, int) or m < 1:
        raise LevelMismatch(f"level must be a positive integer, got {m!r}")


def cmp_codes(a: int, b: int, m: int) -> int:
    """Three-way comparison of two level-m codes under ``<_m``."""
    _check_level(m)
    if a < 0 or b < 0:
        raise InvalidCode("codes are natural numbers")
    return _cmp(a, b, m)


@lru_cache(maxsize=1 << 16)
def _cmp(a: int, b: int, m: int) -> int:
    if a == b:
        return 0
    if m == 1:
        ka = (nu(a), theta(a))
        kb = (nu(b), theta(b))
        return -1 if ka < kb else 1
    xs = exponents(a, m)
    ys = exponents(b, m)
    for x, y in zip(xs, ys):
        c = _cmp(x, y, m - 1)
        if c:
            return c
    return -1 if len(xs) < len(ys) else (1 if len(xs) > len(ys) else 0)


@lru_cache(maxsize=1 << 14)
def _sorted_exponents(a: int, m: int) -> tuple[int, ...]:
    key = cmp_to_key(lambda x, y: _cmp(x, y, m - 1))
    return tuple(sorted(bits(a), key=key, reverse=True))


def exponents(a: int, m: int) -> tuple[int, ...]:
    """Exponent codes of a level-m code (m >= 2), largest first under ``<_{m-1}``."""
    _check_level(m)
    if m < 2:
        raise LevelMismatch("level-1 codes have no exponent list")
    return _sorted_exponents(a, m)


def less(a: Union[int, "CodedOrdinal"], b: Union[int, "CodedOrdinal"], m: int | None = None) -> bool:
    """The order ``<_m``.  Accepts raw codes plus an explicit level, or two
    :class:`CodedOrdinal` values of the same level."""
    if isinstance(a, CodedOrdinal) or isinstance(b, CodedOrdinal):
        if not (isinstance(a, CodedOrdinal) and isinstance(b, CodedOrdinal)):
            raise LevelMismatch("cannot compare a coded ordinal with a bare integer")
        if a.level != b.level or (m is not None and m != a.level):
            raise LevelMismatch(f"levels differ: {a.level} vs {b.level}")
        return _cmp(a.code, b.code, a.level) < 0
    if m is None:
        raise LevelMismatch("level required for raw codes")
    return cmp_codes(a, b, m) < 0


def eta(a: int, p: int) -> int:
    """The ``<_p``-largest exponent in the binary expansion of ``a``."""
    if a <= 0:
        raise InvalidCode("eta is undefined on 0")
    _check_level(p)
    best = None
    for x in bits(a):
        if best is None or _cmp(x, best, p) > 0:
            best = x
    return best  # type: ignore[return-value]


# --------------------------------------------------------------------------
# structured ordinals

@dataclass(frozen=True)
class OrdinalM:
    """A type-m ordinal.  ``payload`` is ``(a, b)`` at level 1 and a tuple of
    level-(m-1) exponents otherwise."""

    level: int
    payload: tuple

    def __post_init__(self):
        _check_level(self.level)
        if self.level == 1:
            a, b = self.payload
            if a < 0 or b < 0:
                raise InvalidCode("level-1 coefficients must be natural")
            return
        for x in self.payload:
            if not isinstance(x, OrdinalM) or x.level != self.level - 1:
                raise LevelMismatch("exponents must sit one level below")
        for x, y in zip(self.payload, self.payload[1:]):
            if not _cmp(encode(y).code, encode(x).code, self.level - 1) < 0:
                raise InvalidCode("exponents must be strictly decreasing")

    @staticmethod
    def one(a: int, b: int) -> "OrdinalM":
        return OrdinalM(1, (a, b))

    @staticmethod
    def sum(exps: Sequence["OrdinalM"], level: int | None = None) -> "OrdinalM":
        if level is None:
            if not exps:
                raise LevelMismatch("level needed for the empty sum")
            level = exps[0].level + 1
        return OrdinalM(level, tuple(exps))

    def __str__(self):
        if self.level == 1:
            a, b = self.payload
            return f"w*{a}+{b}"
        if not self.payload:
            return "0"
        return " + ".join(f"w^({x})" for x in self.payload)


@dataclass(frozen=True)
class CodedOrdinal:
    level: int
    code: int

    def __post_init__(self):
        _check_level(self.level)
        if not isinstance(self.code, int) or self.code < 0:
            raise InvalidCode(f"code must be a natural number, got {self.code!r}")

    def __lt__(self, other: "CodedOrdinal") -> bool:
        return less(self, other)

    def __le__(self, other: "CodedOrdinal") -> bool:
        return self == other or less(self, other)


def encode(o: OrdinalM) -> CodedOrdinal:
    if o.level == 1:
        a, b = o.payload
        return CodedOrdinal(1, (2 * b + 1 << a) - 1)
    return CodedOrdinal(o.level, sum(1 << encode(x).code for x in o.payload))


def decode(c: Union[CodedOrdinal, int], level: int | None = None) -> OrdinalM:
    if not isinstance(c, CodedOrdinal):
        if level is None:
            raise LevelMismatch("level required for raw codes")
        c = CodedOrdinal(level, c)
    if c.level == 1:
        return OrdinalM(1, (nu(c.code), theta(c.code)))
    exps = tuple(decode(CodedOrdinal(c.level - 1, x)) for x in exponents(c.code, c.level))
    return OrdinalM(c.level, exps)


def code_from_exponents(exps: Sequence[int], level: int) -> int:
    """Build a level-``level`` code from an explicit exponent list, rejecting
    lists that are not strictly ``<_{level-1}``-decreasing."""
    _check_level(level)
    if level < 2:
        raise LevelMismatch("level-1 codes are not exponent sums")
    for x, y in zip(exps, exps[1:]):
        if not _cmp(y, x, level - 1) < 0:
            raise InvalidCode(f"exponents {x}, {y} are not strictly decreasing at level {level - 1}")
    return sum(1 << x for x in exps)


# --------------------------------------------------------------------------
# indices of m-series

@dataclass(frozen=True)
class SeriesOrdinal:
    """Index of an m-series.  Level 1: ``w*o + d`` stored as ``(o, d)``.
    Level m+1: the list of constituent level-m indices (the ordinal sum of
    ``w**x`` over them, in run order)."""

    level: int
    payload: tuple

    @staticmethod
    def base(o: int, d: int) -> "SeriesOrdinal":
        return SeriesOrdinal(1, (o, d))

    @staticmethod
    def of(parts: Sequence["SeriesOrdinal"], level: int) -> "SeriesOrdinal":
        for p in parts:
            if p.level != level - 1:
                raise LevelMismatch("constituents must sit one level below")
        return SeriesOrdinal(level, tuple(parts))

    def normal_form(self) -> tuple:
        """Drop every summand absorbed by a larger one further right."""
        if self.level == 1:
            return self.payload
        kept: list[SeriesOrdinal] = []
        for x in self.payload:
            while kept and compare_series(kept[-1], x) < 0:
                kept.pop()
            kept.append(x)
        return tuple(kept)

    def to_json(self):
        if self.level == 1:
            return list(self.payload)
        return [x.to_json() for x in self.payload]

    def __str__(self):
        if self.level == 1:
            o, d = self.payload
            return f"w*{o}+{d}"
        return "(" + " + ".join(f"w^{x}" for x in self.payload) + ")" if self.payload else "0"


def compare_series(a: SeriesOrdinal, b: SeriesOrdinal) -> int:
    """Three-way ordinal comparison of two series indices of the same level."""
    if a.level != b.level:
        raise LevelMismatch(f"levels differ: {a.level} vs {b.level}")
    if a.level == 1:
        return (a.payload > b.payload) - (a.payload < b.payload)
    xs, ys = a.normal_form(), b.normal_form()
    for x, y in zip(xs, ys):
        c = compare_series(x, y)
        if c:
            return c
    return (len(xs) > len(ys)) - (len(xs) < len(ys))


# --------------------------------------------------------------------------
# primitive recursion of finite order

def pr_finite_order_eval(
    g: Callable[[int], int],
    h: Callable[[int, int, int], int],
    phi: Callable[[int], int],
    n: int,
    m: int,
    a: int,
    budget: int | Budget | None = DEFAULT_BUDGET,
) -> int:
    """Evaluate ``f(m, a)`` for ``f(0,a) = g(0)``, ``f(m,a) = h(a, m, f(phi(m), a))``.

    Every unfolding checks ``phi(m) <_n m``; a failed check raises
    :class:`DescentViolation`.  The recursion is unrolled into a chain so
    deep descents do not hit Python's recursion limit.
    """
    _check_level(n)
    b = Budget.of(budget)
    chain = []
    cur = m
    while cur != 0:
        b.charge()
        nxt = phi(cur)
        if not (nxt >= 0 and _cmp(nxt, cur, n) < 0):
            raise DescentViolation(cur, nxt)
        chain.append(cur)
        cur = nxt
    val = g(0)
    for k in reversed(chain):
        b.charge()
        val = h(a, k, val)
    return val


__all__ = [
    "InvalidCode", "LevelMismatch", "DescentViolation", "BudgetExceeded",
    "nu", "theta", "eta", "bits", "exponents", "less", "cmp_codes",
    "OrdinalM", "CodedOrdinal", "encode", "decode", "code_from_exponents",
    "SeriesOrdinal", "compare_series", "pr_finite_order_eval",
]
