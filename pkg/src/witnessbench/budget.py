"""Work budgets shared by every potentially long-running operation."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Generic, Optional, TypeVar

V = TypeVar("V")

DEFAULT_BUDGET = 10**6


class BudgetExceeded(Exception):
    """Raised when a computation runs out of its work allowance."""

    def __init__(self, work_done: int, partial=None, msg: str = "budget exceeded"):
        super().__init__(f"{msg} after {work_done} units of work")
        self.work_done = work_done
        self.partial = partial


class Budget:
    """A mutable counter of work units.

    ``charge`` raises :class:`BudgetExceeded` *before* the limit would be
    crossed, so callers can check the price of an expensive operation
    (a huge power of two, say) without ever paying for it.
    """

    __slots__ = ("limit", "used")

    def __init__(self, limit: Optional[int] = DEFAULT_BUDGET):
        self.limit = limit
        self.used = 0

    def charge(self, cost: int = 1) -> None:
        if self.limit is not None and self.used + cost > self.limit:
            raise BudgetExceeded(self.used)
        self.used += cost

    @property
    def remaining(self) -> Optional[int]:
        return None if self.limit is None else self.limit - self.used

    @staticmethod
    def of(b) -> "Budget":
        if isinstance(b, Budget):
            return b
        return Budget(b)


def bigint_cost(*xs: int) -> int:
    """Cost of one arithmetic operation on the given operands: one unit per
    64-bit word of the widest operand (minimum 1)."""
    width = max((x.bit_length() for x in xs), default=0)
    return 1 + width // 64


@dataclass(frozen=True)
class Budgeted(Generic[V]):
    """Either a value or the marker that the budget ran out."""

    value: Optional[V] = None
    exceeded: bool = False
    work_done: int = 0

    @property
    def ok(self) -> bool:
        return not self.exceeded

    def unwrap(self) -> V:
        if self.exceeded:
            raise BudgetExceeded(self.work_done)
        return self.value  # type: ignore[return-value]

    def __repr__(self):
        if self.exceeded:
            return f"Budgeted(BudgetExceeded, work_done={self.work_done})"
        return f"Budgeted({self.value!r}, work_done={self.work_done})"


def run_budgeted(fn, budget) -> Budgeted:
    b = Budget.of(budget)
    try:
        v = fn(b)
    except BudgetExceeded:
        return Budgeted(None, True, b.used)
    return Budgeted(v, False, b.used)
