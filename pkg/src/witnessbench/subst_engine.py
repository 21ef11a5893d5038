"""The substitution method on checked epsilon-arithmetic proofs.

A state assigns to every category a finite table (parameter tuple -> value,
default 0).  Starting from the all-null state, each step finds the first
false III.1 instance ``A(a) -> A(e_x A x)``, stores the least witness of A at
the resolved parameters, and clears every later category.  Alongside the run
we keep the bookkeeping used by the termination argument: characteristic
number, order, degree, index and the nested m-series with their ordinal
indices.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

from .budget import Budget, BudgetExceeded, DEFAULT_BUDGET
from .epsilon_core import (
    Add, ArityError, Category, Critical, EFormula, Eps, Eq, ETerm, FnApp, FunctionRegistry,
    Imp, MP, Mul, Not, Pred, ProofError, ProofStep, Succ, UserAxiom, Var, Zero,
    check_proof, enumerate_categories, enumerate_eps_terms, numeral, pretty, split_eps,
    substitute, to_sexp, walk,
)
from .ordinals import SeriesOrdinal, compare_series


class UnregisteredFunction(KeyError):
    pass


class UntrueAxiomInstance(ValueError):
    def __init__(self, index: int, formula: EFormula):
        super().__init__(f"axiom instance at step {index} evaluates to false: {to_sexp(formula)}")
        self.index = index
        self.formula = formula


class NoFalseCritical(RuntimeError):
    pass


class MatrixFalse(AssertionError):
    pass


class SubstBudgetExceeded(BudgetExceeded):
    def __init__(self, work_done: int, trace: "RunTrace", state: "SubstState"):
        super().__init__(work_done, partial=trace)
        self.trace = trace
        self.state = state


# --------------------------------------------------------------------------
# states

@dataclass(frozen=True)
class Substituent:
    arity: int
    table: tuple = ()          # sorted ((key tuple, value), ...), nonzero values only

    def __call__(self, *key: int) -> int:
        for k, v in self.table:
            if k == key:
                return v
        return 0

    def get(self, key: tuple) -> int:
        return self(*key)

    def with_entry(self, key: tuple, value: int) -> "Substituent":
        d = dict(self.table)
        if value:
            d[key] = value
        else:
            d.pop(key, None)
        return Substituent(self.arity, tuple(sorted(d.items())))

    @property
    def is_null(self) -> bool:
        return not self.table

    def as_dict(self) -> dict:
        return dict(self.table)


@dataclass(frozen=True)
class SubstState:
    categories: tuple                 # enumeration order
    tables: tuple                     # one Substituent per category
    generation: int = 0

    @staticmethod
    def initial(categories: Sequence[Category]) -> "SubstState":
        return SubstState(tuple(categories), tuple(Substituent(c.arity) for c in categories), 0)

    def position(self, c: Category) -> int:
        return self._index()[c]

    def _index(self) -> dict:
        try:
            return self.__dict__["_idx"]
        except KeyError:
            idx = {c: i for i, c in enumerate(self.categories)}
            object.__setattr__(self, "_idx", idx)
            return idx

    def substituent(self, c: Category) -> Substituent:
        i = self._index().get(c)
        if i is None:
            return Substituent(c.arity)
        return self.tables[i]

    def lookup(self, c: Category, key: tuple) -> int:
        i = self._index().get(c)
        return 0 if i is None else self.tables[i].get(key)

    @property
    def assignment(self) -> dict:
        return dict(zip(self.categories, self.tables))

    def nonzero_entries(self):
        for c, t in zip(self.categories, self.tables):
            for k, v in t.table:
                yield c, k, v


# --------------------------------------------------------------------------
# evaluation

def _charge(b: Optional[Budget]) -> None:
    if b is not None:
        b.charge()


def resolve_term(t: ETerm, S: SubstState, reg: Optional[FunctionRegistry] = None,
                 env: Optional[dict] = None, budget: Optional[Budget] = None) -> int:
    """Numeric value of a term; epsilon terms are looked up in ``S`` after
    their parameter subterms have been resolved."""
    env = env or {}
    _charge(budget)
    if isinstance(t, Zero):
        return 0
    if isinstance(t, Var):
        if t.name not in env:
            raise ValueError(f"free variable '{t.name}' in a term being resolved")
        return env[t.name]
    if isinstance(t, Succ):
        # long numerals are common; unwind them without recursion
        n = 0
        while isinstance(t, Succ):
            t, n = t.arg, n + 1
        return n + resolve_term(t, S, reg, env, budget)
    if isinstance(t, Pred):
        return max(resolve_term(t.arg, S, reg, env, budget) - 1, 0)
    if isinstance(t, Add):
        return resolve_term(t.l, S, reg, env, budget) + resolve_term(t.r, S, reg, env, budget)
    if isinstance(t, Mul):
        return resolve_term(t.l, S, reg, env, budget) * resolve_term(t.r, S, reg, env, budget)
    if isinstance(t, FnApp):
        if reg is None or t.symbol not in reg.functions:
            raise UnregisteredFunction(t.symbol)
        arity, fn = reg.functions[t.symbol]
        if arity != len(t.args):
            raise ArityError(f"'{t.symbol}' has arity {arity}")
        return fn(*[resolve_term(a, S, reg, env, budget) for a in t.args])
    if isinstance(t, Eps):
        cat, params = split_eps(t)
        key = tuple(resolve_term(p, S, reg, env, budget) for p in params)
        return S.lookup(cat, key)
    raise TypeError(f"not a term: {t!r}")


def eval_formula(f: EFormula, S: SubstState, reg: Optional[FunctionRegistry] = None,
                 env: Optional[dict] = None, budget: Optional[Budget] = None) -> bool:
    _charge(budget)
    if isinstance(f, Eq):
        return resolve_term(f.l, S, reg, env, budget) == resolve_term(f.r, S, reg, env, budget)
    if isinstance(f, Not):
        return not eval_formula(f.body, S, reg, env, budget)
    if isinstance(f, Imp):
        return (not eval_formula(f.l, S, reg, env, budget)) or eval_formula(f.r, S, reg, env, budget)
    raise TypeError(f"not a formula: {f!r}")


# --------------------------------------------------------------------------
# the method

def _is_iii1(st: ProofStep) -> bool:
    j = st.justification
    return isinstance(j, Critical) and j.scheme == 1


def first_false_critical(p: Sequence[ProofStep], S: SubstState, reg: Optional[FunctionRegistry] = None,
                         budget: Optional[Budget] = None, debug: bool = True) -> Optional[int]:
    """Index of the first III.1 step that is false under ``S``, or ``None``.

    With ``debug`` every axiom instance of groups I and II and every user
    axiom instance is also evaluated; a false one means a bad user axiom (or
    an engine bug) and raises :class:`UntrueAxiomInstance`."""
    found = None
    for i, st in enumerate(p):
        j = st.justification
        if _is_iii1(st):
            if found is None and not eval_formula(st.formula, S, reg, None, budget):
                found = i
                if not debug:
                    return i
        elif debug and not isinstance(j, (MP, Critical)):
            if not eval_formula(st.formula, S, reg, None, budget):
                raise UntrueAxiomInstance(i, st.formula)
        elif isinstance(j, UserAxiom) and not eval_formula(st.formula, S, reg, None, budget):
            raise UntrueAxiomInstance(i, st.formula)
    return found


@dataclass(frozen=True)
class Repair:
    step: int
    category: Category
    key: tuple
    old: int
    new: int


def _repair(p, S: SubstState, reg, budget: Optional[Budget], idx: int) -> tuple[SubstState, Repair]:
    j: Critical = p[idx].justification  # type: ignore[assignment]
    E = Eps(j.x, j.body)
    cat, params = split_eps(E)
    key = tuple(resolve_term(q, S, reg, None, budget) for q in params)
    bound = resolve_term(j.terms[0], S, reg, None, budget)
    witness = None
    for n in range(bound + 1):
        _charge(budget)
        if eval_formula(j.body, S, reg, {j.x: n}, budget):
            witness = n
            break
    if witness is None:
        raise AssertionError("antecedent true but no witness below its value")
    pos = S.position(cat)
    old = S.tables[pos].get(key)
    tables = list(S.tables)
    tables[pos] = tables[pos].with_entry(key, witness)
    for k in range(pos + 1, len(tables)):
        tables[k] = Substituent(S.categories[k].arity)
    return (SubstState(S.categories, tuple(tables), S.generation + 1),
            Repair(idx, cat, key, old, witness))


def step(p: Sequence[ProofStep], S: SubstState, reg: Optional[FunctionRegistry] = None,
         budget=None) -> SubstState:
    """One repair.  Raises :class:`NoFalseCritical` on a final state."""
    b = Budget.of(budget) if budget is not None else None
    idx = first_false_critical(p, S, reg, b)
    if idx is None:
        raise NoFalseCritical("every critical formula is already true")
    return _repair(p, S, reg, b, idx)[0]


def verify_property_P(p_or_state, S: Optional[SubstState] = None, reg: Optional[FunctionRegistry] = None,
                      proof: Optional[Sequence[ProofStep]] = None) -> bool:
    """Every nonzero entry v at parameters b satisfies A(v,b) and no u < v does.

    The formula A(x, w1..wk) is read off the category skeleton."""
    if S is None:
        S = p_or_state
    for cat, key, v in S.nonzero_entries():
        skel = cat.skeleton
        env = {f"_w{i + 1}": b for i, b in enumerate(key)}

        def holds(n: int) -> bool:
            return eval_formula(skel.body, S, reg, dict(env, **{skel.bound: n}))

        if not holds(v):
            return False
        if any(holds(u) for u in range(v)):
            return False
    return True


# --------------------------------------------------------------------------
# statistics of a state

def characteristic(S: SubstState) -> int:
    """g minus the 1-based position of the last category with a nonnull substituent."""
    g = len(S.categories)
    last = 0
    for i, t in enumerate(S.tables):
        if not t.is_null:
            last = i + 1
    return g - last


def order_of(S: SubstState, eps_order: Sequence[Eps], reg: Optional[FunctionRegistry] = None,
             budget: Optional[Budget] = None) -> int:
    """sum over i of 2**(k-i) * [a_i resolves to 0], for a_0..a_k in ``eps_order``."""
    k = len(eps_order) - 1
    o = 0
    for i, a in enumerate(eps_order):
        if resolve_term(a, S, reg, None, budget) == 0:
            o += 1 << (k - i)
    return o


def degree_of(S: SubstState, p: Sequence[ProofStep], reg: Optional[FunctionRegistry] = None,
              budget: Optional[Budget] = None, first_false: Optional[int] = -1) -> int:
    """Order of S relative to A(0,b)..A(k,b) for the first false III.1 step
    ``A(a,b) -> ...`` with k the value of a; 0 for a final state."""
    idx = first_false_critical(p, S, reg, budget, debug=False) if first_false == -1 else first_false
    if idx is None:
        return 0
    j: Critical = p[idx].justification  # type: ignore[assignment]
    k = resolve_term(j.terms[0], S, reg, None, budget)
    family = []
    for n in range(k + 1):
        _charge(budget)
        family.append(substitute(j.body, j.x, numeral(n)))
    return order_of(S, enumerate_eps_terms(family), reg, budget)


def index_of(S: SubstState, p: Sequence[ProofStep], reg: Optional[FunctionRegistry] = None) -> tuple[int, int]:
    return (order_of(S, enumerate_eps_terms(p), reg), degree_of(S, p, reg))


def is_progressive(S: SubstState, T: SubstState) -> bool:
    """Every nonzero entry of S is reproduced in T."""
    for cat, key, v in S.nonzero_entries():
        if T.lookup(cat, key) != v:
            return False
    return True


def is_strictly_progressive(S: SubstState, T: SubstState) -> bool:
    return is_progressive(S, T) and not is_progressive(T, S)


# --------------------------------------------------------------------------
# runs

@dataclass(frozen=True)
class TraceRecord:
    gen: int
    repaired_step: Optional[int]
    category: Optional[str]
    entry_key: Optional[tuple]
    old: Optional[int]
    new: Optional[int]
    char: int
    o: int
    d: int

    def to_json(self) -> dict:
        return {
            "gen": self.gen, "repairedStep": self.repaired_step, "category": self.category,
            "entryKey": list(self.entry_key) if self.entry_key is not None else None,
            "old": self.old, "new": self.new, "char": self.char, "o": self.o, "d": self.d,
        }


@dataclass
class RunTrace:
    g: int
    records: list = field(default_factory=list)
    states: list = field(default_factory=list)

    @property
    def chars(self) -> list[int]:
        return [r.char for r in self.records]

    @property
    def indices(self) -> list[tuple[int, int]]:
        return [(r.o, r.d) for r in self.records]

    def series_summary(self) -> dict:
        out = {}
        for m in range(1, self.g + 2):
            out[str(m)] = [s.to_json() for s in series_indices(self, m)]
        return out

    def to_jsonl(self) -> str:
        lines = [json.dumps(r.to_json(), sort_keys=True) for r in self.records]
        lines.append(json.dumps({"series": self.series_summary()}, sort_keys=True))
        return "\n".join(lines) + "\n"


@dataclass
class SolveResult:
    final: SubstState
    witnesses: dict
    trace: RunTrace

    @property
    def states(self) -> list:
        return self.trace.states


def _record(S, p, reg, b, eps_order, idx, rep: Optional[Repair]) -> TraceRecord:
    o = order_of(S, eps_order, reg, b)
    d = degree_of(S, p, reg, b, first_false=idx)
    if rep is None:
        return TraceRecord(S.generation, None, None, None, None, None, characteristic(S), o, d)
    return TraceRecord(S.generation, rep.step, str(rep.category), rep.key, rep.old, rep.new,
                       characteristic(S), o, d)


def solve(p: Sequence[ProofStep], reg: Optional[FunctionRegistry] = None, budget=DEFAULT_BUDGET,
          check: bool = True, keep_states: bool = True) -> SolveResult:
    """Run the method from the all-null state until every critical formula is true.

    ``budget`` bounds the total evaluation work; running out raises
    :class:`SubstBudgetExceeded` carrying the trace so far."""
    if check:
        res = check_proof(p, reg)
        if res is not True:
            raise ProofError(res)
    b = Budget.of(budget)
    cats = enumerate_categories(p)
    eps_order = enumerate_eps_terms(p)
    S = SubstState.initial(cats)
    trace = RunTrace(len(cats))
    try:
        while True:
            b.charge()
            idx = first_false_critical(p, S, reg, b)
            if keep_states:
                trace.states.append(S)
            if idx is None:
                trace.records.append(_record(S, p, reg, b, eps_order, None, None))
                break
            T, rep = _repair(p, S, reg, b, idx)
            trace.records.append(_record(S, p, reg, b, eps_order, idx, rep))
            S = T
    except BudgetExceeded:
        raise SubstBudgetExceeded(b.used, trace, S) from None
    final_eps = enumerate_eps_terms([p[-1].formula]) if p else []
    witnesses = {e: resolve_term(e, S, reg) for e in final_eps}
    return SolveResult(S, witnesses, trace)


# --------------------------------------------------------------------------
# m-series

def _segments(chars: Sequence[int], m: int) -> list[tuple[int, int]]:
    """[start, end) ranges of the m-series of a run."""
    n = len(chars)
    if m == 1:
        return [(i, i + 1) for i in range(n)]
    starts = [i for i in range(n) if i == 0 or chars[i] >= m]
    return [(s, starts[k + 1] if k + 1 < len(starts) else n) for k, s in enumerate(starts)]


def _series(trace: RunTrace, m: int) -> list[tuple[tuple[int, int], SeriesOrdinal]]:
    idx = trace.indices
    if m == 1:
        return [((i, i + 1), SeriesOrdinal.base(*idx[i])) for i in range(len(idx))]
    lower = _series(trace, m - 1)
    out = []
    for s, e in _segments(trace.chars, m):
        parts = [o for (a, bnd), o in lower if s <= a and bnd <= e]
        out.append(((s, e), SeriesOrdinal.of(parts, m)))
    return out


def series_indices(trace: RunTrace, m: int) -> list[SeriesOrdinal]:
    """Ordinal indices of the m-series of a run, in run order."""
    if m < 1:
        raise ValueError("m >= 1")
    return [o for _, o in _series(trace, m)]


@dataclass(frozen=True)
class SeriesViolation:
    m: int
    first: int
    second: int
    a: str
    b: str


def corollary_violations(trace: RunTrace, max_m: Optional[int] = None) -> list[SeriesViolation]:
    """Pairs of consecutive m-series, the second opened by a state of
    characteristic exactly m, whose indices fail to decrease strictly.

    For m = 1 the first state must itself have characteristic >= 1 or be the
    initial state; a state of characteristic 0 can be followed by a larger
    one."""
    chars = trace.chars
    out = []
    top = max_m if max_m is not None else trace.g + 1
    for m in range(1, top + 1):
        ser = _series(trace, m)
        for (r1, a), (r2, b) in zip(ser, ser[1:]):
            if chars[r2[0]] != m:
                continue
            if m == 1 and not (r1[0] == 0 or chars[r1[0]] >= 1):
                continue
            if compare_series(a, b) <= 0:
                out.append(SeriesViolation(m, r1[0], r2[0], str(a), str(b)))
    return out


# --------------------------------------------------------------------------
# no-counterexample runs

@dataclass(frozen=True)
class Opponent:
    name: str
    arity: int
    fn: Callable[..., int]


@dataclass
class NciResult:
    b: list
    solve: SolveResult
    chain: list


def nci_extract(p: Sequence[ProofStep], opponents: Sequence[Opponent], reg: Optional[FunctionRegistry] = None,
                budget=DEFAULT_BUDGET, chain: Optional[Sequence[Eps]] = None) -> NciResult:
    """Bind the function variables of ``p`` to the opponents, run the method,
    and read off the chain epsilon terms of the last formula (the matrix
    instance).  The matrix is re-evaluated on the result."""
    base = reg.copy() if reg is not None else FunctionRegistry()
    used: dict = {}
    for st in p:
        for n in walk(st.formula):
            if isinstance(n, FnApp):
                used.setdefault(n.symbol, len(n.args))
    for o in opponents:
        if o.name in used and used[o.name] != o.arity:
            raise ArityError(f"opponent {o.name} has arity {o.arity}, the proof uses {used[o.name]}")
        base.register(o.name, o.arity, o.fn)
    res = solve(p, base, budget)
    if chain is None:
        chain = enumerate_eps_terms([p[-1].formula])
    values = [resolve_term(e, res.final, base) for e in chain]
    if not eval_formula(p[-1].formula, res.final, base):
        raise MatrixFalse(f"matrix {pretty(p[-1].formula)} is false on the extracted values")
    return NciResult(values, res, list(chain))


def max_eps_value(result: SolveResult, p: Sequence[ProofStep], reg: Optional[FunctionRegistry] = None) -> int:
    """Largest value any closed epsilon term of the proof takes in any state of the run."""
    eps = enumerate_eps_terms(p)
    best = 0
    for S in result.trace.states:
        for e in eps:
            best = max(best, resolve_term(e, S, reg))
    return best


__all__ = [
    "UnregisteredFunction", "UntrueAxiomInstance", "NoFalseCritical", "MatrixFalse", "SubstBudgetExceeded",
    "Substituent", "SubstState", "resolve_term", "eval_formula", "first_false_critical", "step",
    "verify_property_P", "characteristic", "order_of", "degree_of", "index_of",
    "is_progressive", "is_strictly_progressive", "TraceRecord", "RunTrace", "SolveResult", "solve",
    "series_indices", "corollary_violations", "SeriesViolation", "Opponent", "NciResult", "nci_extract",
    "max_eps_value", "FunctionRegistry",
]
