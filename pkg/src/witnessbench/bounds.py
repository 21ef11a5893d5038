"""The bound-function tower: phi, omega, psi, lambda, kappa, tau, rho, born,
and the oracle-parameterized variants phi', omega', psi', born'.

Values are exact Python integers.  Every entry point accepts a work budget;
the cost of an arithmetic step grows with the bit length of its operands and
is charged *before* the step runs, so a request for ``2**(10**30)`` fails fast
instead of exhausting memory.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

from .budget import Budget, BudgetExceeded, Budgeted, DEFAULT_BUDGET, bigint_cost, run_budgeted
from .ordinals import InvalidCode, _cmp, bits, eta, nu, theta

Oracle = Union[int, Callable[[int], int]]


class ContractViolation(AssertionError):
    """kappa failed to descend.  Signals a bug, never expected."""


@dataclass(frozen=True)
class BoundParams:
    m: int
    e: int
    g: int


def _pow2(x: int, b: Budget) -> int:
    b.charge(1 + x // 64)
    return 1 << x


def _mul(x: int, y: int, b: Budget) -> int:
    b.charge(bigint_cost(x) * bigint_cost(y))
    return x * y


def _add(x: int, y: int, b: Budget) -> int:
    b.charge(bigint_cost(x, y))
    return x + y


# --------------------------------------------------------------------------
# phi, omega, psi, rho

def _phi(m: int, a: int, b: Budget) -> int:
    v = a
    for _ in range(m):
        v = _mul(v, v, b) + 1
    return v


def phi(m: int, a: int, budget=None) -> int:
    """phi(0,a) = a, phi(m+1,a) = phi(m,a)**2 + 1."""
    if m < 0 or a < 0:
        raise ValueError("phi takes natural arguments")
    return _phi(m, a, Budget.of(budget))


def _omega(m: int, n: int, b: Budget) -> int:
    v = _phi(m, 0, b)
    for _ in range(n):
        b.charge()
        v = _phi(m, v, b)
    return v


def omega_fn(m: int, n: int, budget=DEFAULT_BUDGET) -> Budgeted:
    """omega(m,0) = phi(m,0), omega(m,n+1) = phi(m, omega(m,n))."""
    return run_budgeted(lambda b: _omega(m, n, b), budget)


def _psi(m: int, n: int, e: int, b: Budget) -> int:
    w = _omega(m, n, b)
    return _pow2(_mul(w + 1, e, b), b)


def psi(m: int, n: int, e: int, budget=DEFAULT_BUDGET) -> Budgeted:
    """psi(m,n,e) = 2**((omega(m,n)+1)*e)."""
    return run_budgeted(lambda b: _psi(m, n, e, b), budget)


def _rho(n: int, e: int, b: Budget) -> int:
    if n < 1:
        raise ValueError("rho is defined for n >= 1")
    v = _pow2(e + 1, b) - 1
    for _ in range(n - 1):
        v = _pow2(v, b) - 1
    return v


def rho(n: int, e: int, budget=None) -> int:
    """rho(1,e) = 2**(e+1) - 1, rho(n+1,e) = 2**rho(n,e) - 1."""
    return _rho(n, e, Budget.of(budget))


# --------------------------------------------------------------------------
# lambda, kappa, tau

def _lambda(a: int, p: int, b: Budget) -> int:
    if a < 0:
        raise InvalidCode("codes are natural numbers")
    if p == 1:
        return 1
    total = 0
    for x in bits(a):
        b.charge()
        total += _lambda(x, p - 1, b)
    return total


def lambda_fn(a: int, p: int, budget=None) -> int:
    """Number of substitutions in a p-series of index ``a`` (a level-p code)."""
    if p < 1:
        raise ValueError("level must be >= 1")
    return _lambda(a, p, Budget.of(budget))


def _cval(c: Oracle, n: int) -> int:
    return c(n) if callable(c) else c


def _kappa(c: Oracle, p: int, n: int, a: int, b: Budget) -> int:
    b.charge(bigint_cost(a))
    if a == 0:
        return 0
    if p == 1:
        v, t = nu(a), theta(a)
        if t != 0:
            out = _pow2(v, b) * (2 * t - 1) - 1
        else:
            # a = 2**v - 1 with v >= 1: a limit w*v, step down to w*(v-1) + c
            cv = _cval(c, n)
            out = _mul(_pow2(v - 1, b), 2 * cv + 1, b) - 1
    elif a & 1:
        # last summand is w**0: plain predecessor
        out = a - 1
    elif a & (a - 1) == 0:
        a1 = a.bit_length() - 1
        out = _tau(c, p - 1, n, _kappa(c, p - 1, n, a1, b), b)
    else:
        a1 = eta(a, p - 1)
        rest = a - (1 << a1)
        out = (1 << a1) + _kappa(c, p, n + _lambda(a1, p - 1, b), rest, b)
    if not _cmp(out, a, p) < 0:
        raise ContractViolation(f"kappa(c,{p},{n},{a}) = {out} does not descend")
    return out


def _tau(c: Oracle, p: int, n: int, a: int, b: Budget) -> int:
    total = 0
    while a != 0:
        total = _add(total, _pow2(a, b), b)
        n = n + _lambda(a, p, b)
        a = _kappa(c, p, n, a, b)
    return total


def kappa_fn(c: Oracle, p: int, n: int, a: int, budget=DEFAULT_BUDGET) -> Budgeted:
    """Upper bound (under ``<_p``) for the index of the p-series that follows a
    p-series of index ``a`` starting at substitution ``n``.

    ``c`` is a number or a callback ``n -> c`` evaluated at the current n."""
    if p < 1 or a < 0:
        raise ValueError("need p >= 1 and a natural code")
    return run_budgeted(lambda b: _kappa(c, p, n, a, b), budget)


def tau_fn(c: Oracle, p: int, n: int, a: int, budget=DEFAULT_BUDGET) -> Budgeted:
    """Level-(p+1) code bounding a (p+1)-series that starts with a p-series of index ``a``."""
    if p < 1 or a < 0:
        raise ValueError("need p >= 1 and a natural code")
    return run_budgeted(lambda b: _tau(c, p, n, a, b), budget)


# --------------------------------------------------------------------------
# born

def _born(m: int, e: int, g: int, omega: Callable[[int, Budget], int],
          c: Callable[[int], int], b: Budget) -> int:
    start = _rho(g, e, b)
    t = _tau(c, g, 1, start, b)
    return omega(_lambda(t, g + 1, b), b)


def born(params: BoundParams, budget=DEFAULT_BUDGET) -> Budgeted:
    """omega(m, lambda(tau(psi(m,.,e), g, 1, rho(g,e)), g+1)).

    The constant of kappa's limit case is supplied as the callback
    ``n -> psi(m,n,e)``, evaluated under the same budget."""
    m, e, g = params.m, params.e, params.g

    def go(b: Budget) -> int:
        return _born(m, e, g, lambda n, bb: _omega(m, n, bb),
                     lambda n: _psi(m, n, e, b), b)

    return run_budgeted(go, budget)


# --------------------------------------------------------------------------
# oracle-parameterized variants

@dataclass(frozen=True)
class OracleFn:
    name: str
    arity: int
    fn: Callable[..., int]
    monotone: bool = False   # nondecreasing in every argument: max sits at (a,...,a)


BASE_ORACLES = (
    OracleFn("succ", 1, lambda x: x + 1, True),
    OracleFn("pred", 1, lambda x: max(x - 1, 0), True),
    OracleFn("add", 2, lambda x, y: x + y, True),
    OracleFn("mul", 2, lambda x, y: x * y, True),
)


@dataclass(frozen=True)
class OracleSet:
    oracles: tuple = ()
    include_base: bool = True

    def all(self) -> tuple:
        return (BASE_ORACLES if self.include_base else ()) + tuple(self.oracles)

    @staticmethod
    def of(*fns, include_base: bool = True) -> "OracleSet":
        return OracleSet(tuple(fns), include_base)


def _phi_prime_base(os: OracleSet, a: int, b: Budget) -> int:
    best = 0
    for o in os.all():
        if o.monotone or o.arity == 0:
            b.charge(bigint_cost(a) ** 2)
            best = max(best, o.fn(*([a] * o.arity)))
            continue
        b.charge((a + 1) ** o.arity)
        for args in itertools.product(range(a + 1), repeat=o.arity):
            best = max(best, o.fn(*args))
    return best


def _phi_prime(os: OracleSet, a: int, m: int, b: Budget) -> int:
    v = a
    for _ in range(m):
        v = _phi_prime_base(os, v, b)
    return v


def phi_prime(oracles: OracleSet, a: int, m: int = 1, budget=DEFAULT_BUDGET) -> int:
    """phi'[a,1] is the max of every oracle over all argument tuples <= a;
    phi'[a,n+1] = phi'[phi'[a,n],1].  ``m = 0`` is the identity."""
    return _phi_prime(oracles, a, m, Budget.of(budget))


def _omega_prime(os: OracleSet, m: int, n: int, b: Budget) -> int:
    v = _phi_prime(os, 0, m, b)
    for _ in range(n):
        v = _phi_prime(os, v, m, b)
    return v


def omega_prime(oracles: OracleSet, m: int, n: int, budget=DEFAULT_BUDGET) -> int:
    return _omega_prime(oracles, m, n, Budget.of(budget))


def psi_prime(oracles: OracleSet, m: int, n: int, e: int, budget=DEFAULT_BUDGET) -> int:
    b = Budget.of(budget)
    return _pow2(_mul(_omega_prime(oracles, m, n, b) + 1, e, b), b)


def born_prime(oracles: OracleSet, params: BoundParams, budget=DEFAULT_BUDGET) -> Budgeted:
    m, e, g = params.m, params.e, params.g

    def go(b: Budget) -> int:
        def c(n: int) -> int:
            return _pow2(_mul(_omega_prime(oracles, m, n, b) + 1, e, b), b)

        return _born(m, e, g, lambda n, bb: _omega_prime(oracles, m, n, bb), c, b)

    return run_budgeted(go, budget)


__all__ = [
    "BoundParams", "ContractViolation", "BudgetExceeded", "Budgeted",
    "phi", "omega_fn", "psi", "rho", "lambda_fn", "kappa_fn", "tau_fn", "born",
    "OracleFn", "OracleSet", "BASE_ORACLES",
    "phi_prime", "omega_prime", "psi_prime", "born_prime",
]
