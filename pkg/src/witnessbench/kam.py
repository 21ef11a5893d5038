"""The lambda-c calculus and its head-reduction machine.

A process is a term in head position against a stack.  Four rules drive it:

    push     (t)u * pi          ->  t * u.pi
    pop      \\x.t * u.pi        ->  t[u/x] * pi
    store    cc * t.pi          ->  t * k_pi.pi
    restore  k_pi * t.pi'       ->  t * pi

plus instruction constants: ``zeta_k`` evaluates a strategy term on numerals
in a sub-machine, ``kappa^j`` asks an opponent for a move, and ``PairList``
and inert constants never reduce (watchers look for them).
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

from . import _sexp
from ._sexp import Atom, SList, SexpSyntaxError
from .budget import DEFAULT_BUDGET


class LSyntaxError(SexpSyntaxError):
    pass


class SubEvalBudget(RuntimeError):
    """A zeta sub-run (or a readback it needs) ran out of budget."""


# --------------------------------------------------------------------------
# terms

class LTerm:
    __slots__ = ("_fv",)

    def fv(self) -> frozenset:
        try:
            return self._fv
        except AttributeError:
            v = self._compute_fv()
            object.__setattr__(self, "_fv", v)
            return v

    def _compute_fv(self) -> frozenset:
        return frozenset()

    def __setattr__(self, k, v):
        raise AttributeError("terms are immutable")

    def __repr__(self):
        return to_sexp(self)


class LVar(LTerm):
    __slots__ = ("name",)

    def __init__(self, name: str):
        object.__setattr__(self, "name", name)

    def _compute_fv(self):
        return frozenset((self.name,))

    def __eq__(self, o):
        return isinstance(o, LVar) and o.name == self.name

    def __hash__(self):
        return hash(("var", self.name))


class Lam(LTerm):
    __slots__ = ("name", "body")

    def __init__(self, name: str, body: LTerm):
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "body", body)

    def _compute_fv(self):
        return self.body.fv() - {self.name}

    def __eq__(self, o):
        return isinstance(o, Lam) and o.name == self.name and o.body == self.body

    def __hash__(self):
        return hash(("lam", self.name, self.body))


class App(LTerm):
    __slots__ = ("fn", "arg")

    def __init__(self, fn: LTerm, arg: LTerm):
        object.__setattr__(self, "fn", fn)
        object.__setattr__(self, "arg", arg)

    def _compute_fv(self):
        return self.fn.fv() | self.arg.fv()

    def __eq__(self, o):
        return isinstance(o, App) and o.fn == self.fn and o.arg == self.arg

    def __hash__(self):
        return hash(("app", self.fn, self.arg))


class _CC(LTerm):
    __slots__ = ()

    def __eq__(self, o):
        return isinstance(o, _CC)

    def __hash__(self):
        return hash("cc")


CC = _CC()


class Cont(LTerm):
    """The continuation k_pi of a saved stack."""
    __slots__ = ("stack",)

    def __init__(self, stack: "Stack"):
        object.__setattr__(self, "stack", stack)

    def __eq__(self, o):
        return isinstance(o, Cont) and o.stack == self.stack

    def __hash__(self):
        return hash(("cont", self.stack))


class Inert(LTerm):
    """An inert named constant: no rule fires with it in head position."""
    __slots__ = ("name",)

    def __init__(self, name: str):
        object.__setattr__(self, "name", name)

    def __eq__(self, o):
        return isinstance(o, Inert) and o.name == self.name

    def __hash__(self):
        return hash(("const", self.name))


class Zeta(LTerm):
    __slots__ = ("k",)

    def __init__(self, k: int = 1):
        object.__setattr__(self, "k", k)

    def __eq__(self, o):
        return isinstance(o, Zeta) and o.k == self.k

    def __hash__(self):
        return hash(("zeta", self.k))


class Kappa(LTerm):
    """kappa^j with the history of (n, p) pairs played so far, in a game of depth k."""
    __slots__ = ("j", "history", "k")

    def __init__(self, j: int, history: tuple = (), k: int = 1):
        object.__setattr__(self, "j", j)
        object.__setattr__(self, "history", tuple(history))
        object.__setattr__(self, "k", k)

    def __eq__(self, o):
        return isinstance(o, Kappa) and (o.j, o.history, o.k) == (self.j, self.history, self.k)

    def __hash__(self):
        return hash(("kappa", self.j, self.history, self.k))


class PairList(LTerm):
    """The inert list [t1, ..., tn]."""
    __slots__ = ("values",)

    def __init__(self, values: Sequence[LTerm]):
        object.__setattr__(self, "values", tuple(values))

    def _compute_fv(self):
        out = frozenset()
        for v in self.values:
            out |= v.fv()
        return out

    def __eq__(self, o):
        return isinstance(o, PairList) and o.values == self.values

    def __hash__(self):
        return hash(("pairs", self.values))


# --------------------------------------------------------------------------
# stacks and processes

class Stack:
    """Persistent stack: ``top`` over ``rest``, ending in a named bottom."""

    __slots__ = ("top", "rest", "bottom", "depth")

    def __init__(self, top: Optional[LTerm] = None, rest: Optional["Stack"] = None, bottom: str = "pi0"):
        self.top = top
        self.rest = rest
        self.bottom = rest.bottom if rest is not None else bottom
        self.depth = rest.depth + 1 if rest is not None else 0

    @staticmethod
    def empty(bottom: str = "pi0") -> "Stack":
        return Stack(None, None, bottom)

    @staticmethod
    def of(items: Sequence[LTerm], bottom: str = "pi0") -> "Stack":
        s = Stack.empty(bottom)
        for t in reversed(list(items)):
            s = s.push(t)
        return s

    def push(self, t: LTerm) -> "Stack":
        return Stack(t, self)

    @property
    def is_empty(self) -> bool:
        return self.rest is None

    @property
    def items(self) -> list:
        out, s = [], self
        while s.rest is not None:
            out.append(s.top)
            s = s.rest
        return out

    def __eq__(self, o):
        if not isinstance(o, Stack):
            return False
        a, b = self, o
        while True:
            if a is b:
                return True
            if a.depth != b.depth:
                return False
            if a.rest is None:
                return a.bottom == b.bottom
            if a.top != b.top:
                return False
            a, b = a.rest, b.rest

    def __hash__(self):
        return hash((self.bottom, self.depth))

    def __repr__(self):
        return ".".join([to_sexp(t) for t in self.items] + [self.bottom])


@dataclass(frozen=True)
class Process:
    head: LTerm
    stack: Stack

    def __str__(self):
        return f"{to_sexp(self.head)} * {self.stack!r}"


@dataclass(frozen=True)
class Stuck:
    process: Process
    reason: str


# --------------------------------------------------------------------------
# substitution

_fresh_counter = itertools.count(1)


def _fresh(base: str, avoid: frozenset) -> str:
    base = base.split("'")[0]
    cand = base + "'"
    while cand in avoid:
        cand += "'"
    return cand


def substitute(t: LTerm, x: str, u: LTerm) -> LTerm:
    """Capture-avoiding ``t[u/x]``."""
    if x not in t.fv():
        return t
    fu = u.fv()
    return _subst(t, x, u, fu)


def _subst(t: LTerm, x: str, u: LTerm, fu: frozenset) -> LTerm:
    if x not in t.fv():
        return t
    if isinstance(t, LVar):
        return u
    if isinstance(t, App):
        return App(_subst(t.fn, x, u, fu), _subst(t.arg, x, u, fu))
    if isinstance(t, Lam):
        if t.name in fu:
            new = _fresh(t.name, fu | t.body.fv() | {x})
            body = _subst(t.body, t.name, LVar(new), frozenset((new,)))
            return Lam(new, _subst(body, x, u, fu))
        return Lam(t.name, _subst(t.body, x, u, fu))
    if isinstance(t, PairList):
        return PairList([_subst(v, x, u, fu) for v in t.values])
    return t


def alpha_eq(a: LTerm, b: LTerm) -> bool:
    def go(a, b, ea, eb, d):
        if isinstance(a, LVar) and isinstance(b, LVar):
            return ea.get(a.name, a.name) == eb.get(b.name, b.name)
        if isinstance(a, Lam) and isinstance(b, Lam):
            return go(a.body, b.body, {**ea, a.name: d}, {**eb, b.name: d}, d + 1)
        if isinstance(a, App) and isinstance(b, App):
            return go(a.fn, b.fn, ea, eb, d) and go(a.arg, b.arg, ea, eb, d)
        if isinstance(a, PairList) and isinstance(b, PairList):
            return len(a.values) == len(b.values) and all(
                go(x, y, ea, eb, d) for x, y in zip(a.values, b.values))
        if type(a) is not type(b) or isinstance(a, (LVar, Lam, App, PairList)):
            return False
        return a == b

    return go(a, b, {}, {}, 0)


# --------------------------------------------------------------------------
# closed terms used everywhere

def lam(*names_and_body) -> LTerm:
    *names, body = names_and_body
    for n in reversed(names):
        body = Lam(n, body)
    return body


def app(f: LTerm, *args: LTerm) -> LTerm:
    for a in args:
        f = App(f, a)
    return f


V = LVar


def church(n: int) -> LTerm:
    """\\f\\x.f^n x"""
    body: LTerm = V("x")
    for _ in range(n):
        body = App(V("f"), body)
    return Lam("f", Lam("x", body))


def succ_term() -> LTerm:
    """\\n\\f\\x.(f)((n)f)x"""
    return lam("n", "f", "x", App(V("f"), app(V("n"), V("f"), V("x"))))


def compose_succ(g: LTerm) -> LTerm:
    """g o s, written \\x.(g)(s)x."""
    return Lam("x", App(g, App(succ_term(), V("x"))))


def storage_T() -> LTerm:
    """T = \\f\\n.(((n)\\g.g o s)f)0"""
    step = Lam("g", compose_succ(V("g")))
    return lam("f", "n", app(V("n"), step, V("f"), church(0)))


def witness_t() -> LTerm:
    """t = \\x\\y.yx"""
    return lam("x", "y", App(V("y"), V("x")))


def identity() -> LTerm:
    return Lam("z", V("z"))


# --------------------------------------------------------------------------
# the machine

@dataclass
class InstructionEnv:
    """What instruction constants need from the outside world.

    ``opponent(j, history, n) -> p`` answers kappa; ``on_zeta`` and
    ``on_kappa`` observe firings; ``sub_budget`` bounds each sub-run.  With
    ``instructions`` off, zeta and kappa heads are stuck (used by readback)."""

    opponent: Optional[Callable[[int, tuple, int], int]] = None
    instructions: bool = True
    sub_budget: int = 100_000
    on_zeta: Optional[Callable[[int, tuple, int], None]] = None
    on_kappa: Optional[Callable[[int, tuple, int, int], None]] = None
    events: list = field(default_factory=list)


def _unapply(t: LTerm, k: int):
    args = []
    for _ in range(k):
        if not isinstance(t, App):
            return None
        args.append(t.arg)
        t = t.fn
    return t, list(reversed(args))


def applicable_rules(p: Process) -> list[str]:
    """Names of every rule whose left-hand side matches ``p``."""
    h, s = p.head, p.stack
    d = s.depth
    out = []
    if isinstance(h, App):
        out.append("push")
    if isinstance(h, Lam) and d >= 1:
        out.append("pop")
    if isinstance(h, _CC) and d >= 1:
        out.append("store")
    if isinstance(h, Cont) and d >= 1:
        out.append("restore")
    if isinstance(h, Zeta) and d >= 2:
        out.append("zeta")
    if isinstance(h, Kappa) and d >= 2:
        out.append("kappa")
    return out


def step(p: Process, env: Optional[InstructionEnv] = None):
    """One reduction step; returns the next process or a :class:`Stuck`."""
    h, s = p.head, p.stack
    if isinstance(h, App):
        return Process(h.fn, s.push(h.arg))
    if s.is_empty:
        return Stuck(p, "empty stack")
    if isinstance(h, Lam):
        return Process(substitute(h.body, h.name, s.top), s.rest)
    if isinstance(h, _CC):
        return Process(s.top, s.rest.push(Cont(s.rest)))
    if isinstance(h, Cont):
        return Process(s.top, h.stack)
    if isinstance(h, (Zeta, Kappa)) and env is not None and not env.instructions:
        return Stuck(p, "instructions disabled")
    if isinstance(h, Zeta):
        if s.rest.is_empty:
            return Stuck(p, "zeta needs two stack items")
        env = env or InstructionEnv()
        xi, arg, rest = s.top, s.rest.top, s.rest.rest
        val = _zeta_value(h.k, arg, env)
        return Process(xi, rest.push(church(val)))
    if isinstance(h, Kappa):
        if s.rest.is_empty:
            return Stuck(p, "kappa needs two stack items")
        env = env or InstructionEnv()
        nu, xi, rest = s.top, s.rest.top, s.rest.rest
        n = readback(nu, env.sub_budget)
        if n is None:
            return Stuck(p, "kappa argument is not a numeral")
        if env.opponent is None:
            return Stuck(p, "kappa without an opponent")
        ans = int(env.opponent(h.j, h.history, n))
        if ans < 0:
            raise ValueError("opponent answers must be natural numbers")
        if env.on_kappa:
            env.on_kappa(h.j, h.history, n, ans)
        env.events.append(("kappa", h.j, h.history, n, ans))
        hist = h.history + ((n, ans),)
        if h.j < h.k - 1:
            nxt: LTerm = App(storage_T(), Kappa(h.j + 1, hist, h.k))
        else:
            nxt = PairList([church(v) for pair in hist for v in pair])
        return Process(xi, rest.push(nxt).push(church(ans)))
    if isinstance(h, LVar):
        return Stuck(p, f"free variable {h.name} in head position")
    return Stuck(p, f"inert head {to_sexp(h)}")


def _zeta_value(k: int, arg: LTerm, env: InstructionEnv) -> int:
    val = readback(arg, env.sub_budget)
    if val is None:
        raise SubEvalBudget(f"zeta{k}: argument {to_sexp(arg)} did not reduce to a numeral")
    parts = _unapply(arg, k)
    nums: tuple = ()
    if parts is not None:
        nums = tuple(readback(a, env.sub_budget) for a in parts[1])
    if env.on_zeta:
        env.on_zeta(k, nums, val)
    env.events.append(("zeta", k, nums, val))
    return val


@dataclass
class MachineOutcome:
    kind: str                      # "halted" or "budget"
    process: Process
    steps: int
    reason: Optional[str] = None   # "watcher" or "stuck"
    watcher: Optional[int] = None
    detail: Optional[str] = None
    trace: Optional[list] = None

    @property
    def halted(self) -> bool:
        return self.kind == "halted"

    @property
    def stuck(self) -> bool:
        return self.reason == "stuck"

    @property
    def budget_exceeded(self) -> bool:
        return self.kind == "budget"


def head_label(t: LTerm) -> str:
    if isinstance(t, LVar):
        return f"var {t.name}"
    if isinstance(t, Lam):
        return f"lam {t.name}"
    if isinstance(t, App):
        return "app"
    if isinstance(t, _CC):
        return "cc"
    if isinstance(t, Cont):
        return f"k[{t.stack.bottom}:{t.stack.depth}]"
    if isinstance(t, Zeta):
        return f"zeta{t.k}"
    if isinstance(t, Kappa):
        return f"kappa{t.j}"
    if isinstance(t, PairList):
        return "pairs"
    if isinstance(t, Inert):
        return f"const {t.name}"
    return type(t).__name__


Watcher = Callable[[Process], bool]


def run(p: Process, budget: int = DEFAULT_BUDGET, watchers: Sequence[Watcher] = (),
        env: Optional[InstructionEnv] = None, trace: bool = False) -> MachineOutcome:
    """Reduce until a watcher fires, the process is stuck, or ``budget`` steps are spent."""
    env = env or InstructionEnv()
    log: Optional[list] = [] if trace else None
    n = 0
    while True:
        for i, w in enumerate(watchers):
            if w(p):
                return MachineOutcome("halted", p, n, "watcher", i, trace=log)
        if n >= budget:
            return MachineOutcome("budget", p, n, trace=log)
        rules = applicable_rules(p)
        nxt = step(p, env)
        if isinstance(nxt, Stuck):
            return MachineOutcome("halted", p, n, "stuck", detail=nxt.reason, trace=log)
        if log is not None:
            log.append({"step": n, "head": head_label(p.head), "stackDepth": p.stack.depth,
                        "rule": rules[0]})
        p = nxt
        n += 1


def trace_jsonl(trace: Iterable[dict]) -> str:
    return "".join(json.dumps(r, sort_keys=True) + "\n" for r in trace)


# --------------------------------------------------------------------------
# numerals

def readback(t: LTerm, budget: int = 100_000, env: Optional[InstructionEnv] = None) -> Optional[int]:
    """The n such that t behaves as the numeral n, or ``None``.

    t is applied to two fresh inert constants f and x; each time f surfaces
    with exactly one argument we count it and continue with that argument,
    and reaching x on an empty stack ends the count."""
    tag = next(_fresh_counter)
    f, x = Inert(f"_f{tag}"), Inert(f"_x{tag}")
    bottom = f"_rho{tag}"
    env = env or InstructionEnv(instructions=False)
    p = Process(app(t, f, x), Stack.empty(bottom))
    count = 0
    steps = 0
    while True:
        if p.head == f:
            if p.stack.depth != 1:
                return None
            count += 1
            p = Process(p.stack.top, Stack.empty(bottom))
            continue
        if p.head == x:
            return count if p.stack.is_empty else None
        if steps >= budget:
            return None
        try:
            nxt = step(p, env)
        except SubEvalBudget:
            return None
        if isinstance(nxt, Stuck):
            return None
        p = nxt
        steps += 1


def is_numeral(t: LTerm, budget: int = 10_000) -> Optional[int]:
    if not isinstance(t, (Lam, App)):
        return None
    return readback(t, budget)


# --------------------------------------------------------------------------
# text syntax

def to_sexp(t: LTerm) -> str:
    if isinstance(t, LVar):
        return t.name
    if isinstance(t, Lam):
        return f"(lam {t.name} {to_sexp(t.body)})"
    if isinstance(t, App):
        return f"(app {to_sexp(t.fn)} {to_sexp(t.arg)})"
    if isinstance(t, _CC):
        return "cc"
    if isinstance(t, Cont):
        return f"(cont {t.stack.bottom}:{t.stack.depth})"
    if isinstance(t, Inert):
        return f"(instr const {t.name})"
    if isinstance(t, Zeta):
        return f"(instr zeta {t.k})"
    if isinstance(t, Kappa):
        hist = " ".join(f"{n} {p}" for n, p in t.history)
        return f"(instr kappa {t.j} {t.k}" + (f" {hist}" if hist else "") + ")"
    if isinstance(t, PairList):
        return "(instr pairs" + "".join(" " + to_sexp(v) for v in t.values) + ")"
    raise TypeError(t)


def pretty(t: LTerm) -> str:
    """Krivine-style notation, numerals collapsed."""
    if isinstance(t, (Lam, App)):
        n = _syntactic_church(t)
        if n is not None:
            return f"{n}^"
    if isinstance(t, LVar):
        return t.name
    if isinstance(t, Lam):
        return f"\\{t.name}.{pretty(t.body)}"
    if isinstance(t, App):
        return f"({pretty(t.fn)}){pretty(t.arg)}"
    if isinstance(t, PairList):
        return "[" + ",".join(pretty(v) for v in t.values) + "]"
    return to_sexp(t)


def _syntactic_church(t: LTerm) -> Optional[int]:
    if not (isinstance(t, Lam) and isinstance(t.body, Lam)):
        return None
    f, x, b = t.name, t.body.name, t.body.body
    if f == x:
        return None
    n = 0
    while isinstance(b, App) and b.fn == LVar(f):
        b, n = b.arg, n + 1
    return n if b == LVar(x) else None


_NAMED = {"T": storage_T, "s": succ_term, "t": witness_t, "id": identity}
_IDENT_OK = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_'")
_RESERVED = {"lam", "app", "cc", "church", "instr", "named"}


def _lerr(msg, node):
    return LSyntaxError(msg, node.line, node.col)


def _parse(s) -> LTerm:
    if isinstance(s, Atom):
        if s.text == "cc":
            return CC
        if s.text in _RESERVED or not s.text[0].isalpha() or not set(s.text) <= _IDENT_OK:
            raise _lerr(f"bad variable '{s.text}'", s)
        return LVar(s.text)
    h, args = s.head, s.items[1:]
    if h == "lam":
        if len(args) < 2:
            raise _lerr("lam takes variables then a body", s)
        names = []
        for a in args[:-1]:
            if not isinstance(a, Atom) or a.text in _RESERVED:
                raise _lerr("expected a variable", a)
            names.append(a.text)
        return lam(*names, _parse(args[-1]))
    if h == "app":
        if len(args) < 2:
            raise _lerr("app takes at least two terms", s)
        return app(_parse(args[0]), *[_parse(a) for a in args[1:]])
    if h == "church":
        if len(args) != 1 or not isinstance(args[0], Atom) or not args[0].text.isdigit():
            raise _lerr("church takes a natural number", s)
        return church(int(args[0].text))
    if h == "named":
        if len(args) != 1 or not isinstance(args[0], Atom) or args[0].text not in _NAMED:
            raise _lerr(f"named takes one of {sorted(_NAMED)}", s)
        return _NAMED[args[0].text]()
    if h == "instr":
        if not args or not isinstance(args[0], Atom):
            raise _lerr("instr needs a kind", s)
        kind, rest = args[0].text, args[1:]
        nums = [a.text for a in rest if isinstance(a, Atom)]
        if kind == "zeta":
            return Zeta(int(nums[0]) if nums else 1)
        if kind == "kappa":
            vals = [int(x) for x in nums]
            if len(vals) < 2 or len(vals) % 2:
                raise _lerr("kappa takes j k and history pairs", s)
            j, k, flat = vals[0], vals[1], vals[2:]
            return Kappa(j, tuple(zip(flat[::2], flat[1::2])), k)
        if kind == "const":
            if len(nums) != 1:
                raise _lerr("const takes a name", s)
            return Inert(nums[0])
        if kind == "pairs":
            return PairList([_parse(a) for a in rest])
        raise _lerr(f"unknown instruction '{kind}'", s)
    raise _lerr(f"unknown head '{h}'", s)


def parse_lterm(text: str) -> LTerm:
    return _parse(_sexp.read_one(text))


def parse_stack(text: str, bottom: str = "pi0") -> Stack:
    """Whitespace-separated terms, top first."""
    return Stack.of([_parse(n) for n in _sexp.read_all(text)], bottom)


def is_continuation_free(t: LTerm) -> bool:
    if isinstance(t, Cont):
        return False
    if isinstance(t, Lam):
        return is_continuation_free(t.body)
    if isinstance(t, App):
        return is_continuation_free(t.fn) and is_continuation_free(t.arg)
    if isinstance(t, PairList):
        return all(is_continuation_free(v) for v in t.values)
    return True


__all__ = [
    "LTerm", "LVar", "Lam", "App", "CC", "Cont", "Inert", "Zeta", "Kappa", "PairList",
    "Stack", "Process", "Stuck", "InstructionEnv", "MachineOutcome", "SubEvalBudget",
    "substitute", "alpha_eq", "lam", "app", "church", "succ_term", "storage_T", "witness_t", "identity",
    "applicable_rules", "step", "run", "readback", "is_numeral", "trace_jsonl", "head_label",
    "to_sexp", "pretty", "parse_lterm", "parse_stack", "is_continuation_free",
]
