"""Terms, formulas and proofs of epsilon-arithmetic.

The language has 0, variables, successor, truncated predecessor, +, x,
epsilon terms and applications of registered function symbols.  Formulas are
built from equations with negation and implication only; the parser expands
``exists``/``forall`` into epsilon terms.

Proofs are lists of closed formulas, each justified by an axiom schema,
a registered user axiom, or modus ponens on earlier steps (indices are
0-based).
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Optional, Sequence, Union

from . import _sexp
from ._sexp import Atom, SList, SexpSyntaxError


class EpsSyntaxError(SexpSyntaxError):
    pass


class ArityError(ValueError):
    pass


class NotAnEpsTerm(TypeError):
    pass


class UnknownUserAxiom(KeyError):
    pass


# --------------------------------------------------------------------------
# syntax trees

class _Node:
    """Immutable tree node with a cached structural hash."""

    __slots__ = ("_h",)
    _fields: tuple = ()

    def _key(self):
        return (type(self).__name__,) + tuple(getattr(self, f) for f in self._fields)

    def __eq__(self, other):
        if self is other:
            return True
        if type(self) is not type(other) or hash(self) != hash(other):
            return False
        return all(getattr(self, f) == getattr(other, f) for f in self._fields)

    def __hash__(self):
        try:
            return self._h
        except AttributeError:
            h = hash(self._key())
            object.__setattr__(self, "_h", h)
            return h

    def __setattr__(self, k, v):
        raise AttributeError("syntax nodes are immutable")

    def __repr__(self):
        return to_sexp(self)

    def _init(self, **kw):
        for k, v in kw.items():
            object.__setattr__(self, k, v)


class ETerm(_Node):
    __slots__ = ()


class EFormula(_Node):
    __slots__ = ()


class Zero(ETerm):
    __slots__ = ()

    def __init__(self):
        pass


class Var(ETerm):
    __slots__ = ("name",)
    _fields = ("name",)

    def __init__(self, name: str):
        self._init(name=name)


class Succ(ETerm):
    __slots__ = ("arg",)
    _fields = ("arg",)

    def __init__(self, arg: ETerm):
        self._init(arg=arg)


class Pred(ETerm):
    __slots__ = ("arg",)
    _fields = ("arg",)

    def __init__(self, arg: ETerm):
        self._init(arg=arg)


class Add(ETerm):
    __slots__ = ("l", "r")
    _fields = ("l", "r")

    def __init__(self, l: ETerm, r: ETerm):
        self._init(l=l, r=r)


class Mul(ETerm):
    __slots__ = ("l", "r")
    _fields = ("l", "r")

    def __init__(self, l: ETerm, r: ETerm):
        self._init(l=l, r=r)


class Eps(ETerm):
    __slots__ = ("bound", "body")
    _fields = ("bound", "body")

    def __init__(self, bound: str, body: EFormula):
        self._init(bound=bound, body=body)


class FnApp(ETerm):
    __slots__ = ("symbol", "args")
    _fields = ("symbol", "args")

    def __init__(self, symbol: str, args: Sequence[ETerm] = ()):
        self._init(symbol=symbol, args=tuple(args))


class Eq(EFormula):
    __slots__ = ("l", "r")
    _fields = ("l", "r")

    def __init__(self, l: ETerm, r: ETerm):
        self._init(l=l, r=r)


class Not(EFormula):
    __slots__ = ("body",)
    _fields = ("body",)

    def __init__(self, body: EFormula):
        self._init(body=body)


class Imp(EFormula):
    __slots__ = ("l", "r")
    _fields = ("l", "r")

    def __init__(self, l: EFormula, r: EFormula):
        self._init(l=l, r=r)


ZERO = Zero()


def numeral(n: int) -> ETerm:
    t: ETerm = ZERO
    for _ in range(n):
        t = Succ(t)
    return t


def numeral_value(t: ETerm) -> Optional[int]:
    n = 0
    while isinstance(t, Succ):
        t = t.arg
        n += 1
    return n if isinstance(t, Zero) else None


def children(t: _Node) -> tuple:
    if isinstance(t, (Zero, Var)):
        return ()
    if isinstance(t, (Succ, Pred)):
        return (t.arg,)
    if isinstance(t, (Add, Mul, Eq, Imp)):
        return (t.l, t.r)
    if isinstance(t, Eps):
        return (t.body,)
    if isinstance(t, FnApp):
        return t.args
    if isinstance(t, Not):
        return (t.body,)
    raise TypeError(f"not a syntax node: {t!r}")


# --------------------------------------------------------------------------
# printing

def to_sexp(t: _Node) -> str:
    if isinstance(t, Zero):
        return "0"
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Succ):
        return f"(succ {to_sexp(t.arg)})"
    if isinstance(t, Pred):
        return f"(pred {to_sexp(t.arg)})"
    if isinstance(t, Add):
        return f"(add {to_sexp(t.l)} {to_sexp(t.r)})"
    if isinstance(t, Mul):
        return f"(mul {to_sexp(t.l)} {to_sexp(t.r)})"
    if isinstance(t, Eps):
        return f"(eps {t.bound} {to_sexp(t.body)})"
    if isinstance(t, FnApp):
        return "(fn " + " ".join([t.symbol] + [to_sexp(a) for a in t.args]) + ")"
    if isinstance(t, Eq):
        return f"(= {to_sexp(t.l)} {to_sexp(t.r)})"
    if isinstance(t, Not):
        return f"(not {to_sexp(t.body)})"
    if isinstance(t, Imp):
        return f"(imp {to_sexp(t.l)} {to_sexp(t.r)})"
    raise TypeError(f"not a syntax node: {t!r}")


def pretty(t: _Node) -> str:
    """Conventional notation: primes for successor, numerals collapsed."""
    if isinstance(t, ETerm):
        n = numeral_value(t)
        if n is not None and n > 0:
            return "0" + "'" * n if n <= 3 else str(n)
    if isinstance(t, Zero):
        return "0"
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Succ):
        inner = pretty(t.arg)
        return inner + "'" if re.fullmatch(r"[\w']+|\(.*\)", inner) else f"({inner})'"
    if isinstance(t, Pred):
        return f"d({pretty(t.arg)})"
    if isinstance(t, Add):
        return f"({pretty(t.l)}+{pretty(t.r)})"
    if isinstance(t, Mul):
        return f"({pretty(t.l)}*{pretty(t.r)})"
    if isinstance(t, Eps):
        return f"ε_{t.bound}({pretty(t.body)})"
    if isinstance(t, FnApp):
        return f"{t.symbol}(" + ",".join(pretty(a) for a in t.args) + ")"
    if isinstance(t, Eq):
        return f"{pretty(t.l)}={pretty(t.r)}"
    if isinstance(t, Not):
        return f"~({pretty(t.body)})"
    if isinstance(t, Imp):
        return f"({pretty(t.l)} -> {pretty(t.r)})"
    raise TypeError(f"not a syntax node: {t!r}")


# --------------------------------------------------------------------------
# variables and substitution

def free_vars(t: _Node) -> frozenset:
    if isinstance(t, Var):
        return frozenset((t.name,))
    if isinstance(t, Eps):
        return free_vars(t.body) - {t.bound}
    out: frozenset = frozenset()
    for c in children(t):
        out |= free_vars(c)
    return out


def is_closed(t: _Node) -> bool:
    return not free_vars(t)


def all_names(t: _Node) -> set:
    out = set()
    for n in walk(t):
        if isinstance(n, Var):
            out.add(n.name)
        elif isinstance(n, Eps):
            out.add(n.bound)
    return out


def fresh_name(base: str, avoid: Iterable[str]) -> str:
    avoid = set(avoid)
    base = base.rstrip("0123456789") or "v"
    for i in itertools.count(1):
        cand = f"{base}{i}"
        if cand not in avoid:
            return cand
    raise AssertionError


def _rebuild(t: _Node, kids: Sequence[_Node]) -> _Node:
    if isinstance(t, (Zero, Var)):
        return t
    if isinstance(t, Succ):
        return Succ(kids[0])
    if isinstance(t, Pred):
        return Pred(kids[0])
    if isinstance(t, Add):
        return Add(*kids)
    if isinstance(t, Mul):
        return Mul(*kids)
    if isinstance(t, Eq):
        return Eq(*kids)
    if isinstance(t, Imp):
        return Imp(*kids)
    if isinstance(t, Not):
        return Not(kids[0])
    if isinstance(t, FnApp):
        return FnApp(t.symbol, kids)
    if isinstance(t, Eps):
        return Eps(t.bound, kids[0])
    raise TypeError(t)


def substitute(t: _Node, x: str, u: ETerm) -> _Node:
    """Capture-avoiding ``t[u/x]``."""
    fv_u = free_vars(u)

    def go(n: _Node) -> _Node:
        if isinstance(n, Var):
            return u if n.name == x else n
        if isinstance(n, Eps):
            if n.bound == x:
                return n
            if x not in free_vars(n.body):
                return n
            if n.bound in fv_u:
                new = fresh_name(n.bound, fv_u | all_names(n.body) | {x})
                body = substitute(n.body, n.bound, Var(new))
                return Eps(new, go(body))
            return Eps(n.bound, go(n.body))
        kids = children(n)
        if not kids:
            return n
        new_kids = [go(k) for k in kids]
        if all(a is b for a, b in zip(new_kids, kids)):
            return n
        return _rebuild(n, new_kids)

    return go(t)


def alpha_key(t: _Node) -> str:
    """Canonical print with bound variables renamed by binding depth."""

    def go(n: _Node, env: dict, depth: int) -> str:
        if isinstance(n, Var):
            return env.get(n.name, n.name)
        if isinstance(n, Eps):
            e2 = dict(env)
            e2[n.bound] = f"#{depth}"
            return f"(eps #{depth} {go(n.body, e2, depth + 1)})"
        if isinstance(n, Zero):
            return "0"
        head = {Succ: "succ", Pred: "pred", Add: "add", Mul: "mul",
                Eq: "=", Not: "not", Imp: "imp"}.get(type(n))
        if isinstance(n, FnApp):
            head = "fn " + n.symbol
        return "(" + " ".join([head] + [go(c, env, depth) for c in children(n)]) + ")"

    return go(t, {}, 0)


def alpha_eq(a: _Node, b: _Node) -> bool:
    return a == b or alpha_key(a) == alpha_key(b)


def walk(t: _Node) -> Iterator[_Node]:
    """Pre-order traversal of every node, descending into epsilon bodies."""
    stack = [t]
    while stack:
        n = stack.pop()
        yield n
        stack.extend(reversed(children(n)))


def eps_subterms_postorder(t: _Node) -> Iterator[Eps]:
    """Every epsilon subterm (open or closed), inner ones before outer."""
    for c in children(t):
        yield from eps_subterms_postorder(c)
    if isinstance(t, Eps):
        yield t


# --------------------------------------------------------------------------
# parsing

TERM_HEADS = {"succ", "pred", "add", "mul", "eps", "fn"}
FORMULA_HEADS = {"=", "not", "imp", "exists", "forall"}
_IDENT = re.compile(r"[A-Za-z][A-Za-z0-9_']*\Z")
_NUM = re.compile(r"[0-9]+\Z")


def _err(msg: str, node) -> EpsSyntaxError:
    return EpsSyntaxError(msg, node.line, node.col)


class _Parser:
    def __init__(self, arities: Optional[dict] = None):
        self.arities: dict = dict(arities or {})

    def term(self, s) -> ETerm:
        if isinstance(s, Atom):
            if _NUM.match(s.text):
                return numeral(int(s.text))
            if s.text in TERM_HEADS or s.text in FORMULA_HEADS:
                raise _err(f"keyword '{s.text}' used as a variable", s)
            if not _IDENT.match(s.text):
                raise _err(f"bad variable name '{s.text}'", s)
            return Var(s.text)
        h = s.head
        if h is None:
            raise _err("expected a term head", s)
        args = s.items[1:]

        def need(k):
            if len(args) != k:
                raise _err(f"'{h}' takes {k} argument(s), got {len(args)}", s)

        if h == "succ":
            need(1)
            return Succ(self.term(args[0]))
        if h == "pred":
            need(1)
            return Pred(self.term(args[0]))
        if h == "add":
            need(2)
            return Add(self.term(args[0]), self.term(args[1]))
        if h == "mul":
            need(2)
            return Mul(self.term(args[0]), self.term(args[1]))
        if h == "eps":
            need(2)
            return Eps(self.binder(args[0]), self.formula(args[1]))
        if h == "fn":
            if not args or not isinstance(args[0], Atom) or not _IDENT.match(args[0].text):
                raise ArityError(f"malformed function application at line {s.line}, column {s.col}")
            name = args[0].text
            targs = [self.term(a) for a in args[1:]]
            known = self.arities.setdefault(name, len(targs))
            if known != len(targs):
                raise ArityError(f"'{name}' has arity {known}, applied to {len(targs)} argument(s) "
                                 f"at line {s.line}, column {s.col}")
            return FnApp(name, targs)
        if h in FORMULA_HEADS:
            raise _err(f"formula head '{h}' where a term was expected", s)
        raise _err(f"unknown head '{h}'", s)

    def binder(self, s) -> str:
        if not isinstance(s, Atom) or not _IDENT.match(s.text) or s.text in TERM_HEADS | FORMULA_HEADS:
            raise _err("expected a variable name", s)
        return s.text

    def formula(self, s) -> EFormula:
        if isinstance(s, Atom):
            raise _err(f"expected a formula, got atom '{s.text}'", s)
        h = s.head
        args = s.items[1:]

        def need(k):
            if len(args) != k:
                raise _err(f"'{h}' takes {k} argument(s), got {len(args)}", s)

        if h == "=":
            need(2)
            return Eq(self.term(args[0]), self.term(args[1]))
        if h == "not":
            need(1)
            return Not(self.formula(args[0]))
        if h == "imp":
            need(2)
            return Imp(self.formula(args[0]), self.formula(args[1]))
        if h == "exists":
            need(2)
            x = self.binder(args[0])
            body = self.formula(args[1])
            return substitute(body, x, Eps(x, body))
        if h == "forall":
            need(2)
            x = self.binder(args[0])
            body = self.formula(args[1])
            return substitute(body, x, Eps(x, Not(body)))
        if h in TERM_HEADS:
            raise _err(f"term head '{h}' where a formula was expected", s)
        raise _err(f"unknown head '{h}'", s)


def parse_term(text: str, arities: Optional[dict] = None) -> ETerm:
    return _Parser(arities).term(_sexp.read_one(text))


def parse_formula(text: str, arities: Optional[dict] = None) -> EFormula:
    return _Parser(arities).formula(_sexp.read_one(text))


# --------------------------------------------------------------------------
# categories

PLACEHOLDER_PREFIX = "_w"   # the parser never produces names starting with '_'


@dataclass(frozen=True, eq=False)
class Category:
    skeleton: Eps
    arity: int

    @property
    def key(self) -> str:
        return alpha_key(self.skeleton)

    def __eq__(self, other):
        return isinstance(other, Category) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __str__(self):
        return to_sexp(self.skeleton)

    def __repr__(self):
        return f"Category({to_sexp(self.skeleton)}, arity={self.arity})"


_split_cache: dict = {}


def split_eps(t: ETerm) -> tuple[Category, tuple]:
    """Category of an epsilon term together with the subterms its
    placeholders stand for, in placeholder order.

    Every side of an equation in the body that does not mention the bound
    variable is replaced, whole, by the next placeholder.  Sides that do
    mention it are kept as they are.
    """
    if not isinstance(t, Eps):
        raise NotAnEpsTerm(f"not an epsilon term: {t!r}")
    hit = _split_cache.get(t)
    if hit is not None:
        return hit
    x = t.bound
    params: list = []

    def side(s: ETerm) -> ETerm:
        if x in free_vars(s):
            return s
        params.append(s)
        return Var(f"{PLACEHOLDER_PREFIX}{len(params)}")

    def go(f: EFormula) -> EFormula:
        if isinstance(f, Eq):
            return Eq(side(f.l), side(f.r))
        if isinstance(f, Not):
            return Not(go(f.body))
        return Imp(go(f.l), go(f.r))

    skel = Eps(x, go(t.body))
    out = (Category(skel, len(params)), tuple(params))
    if len(_split_cache) > 200_000:
        _split_cache.clear()
    _split_cache[t] = out
    return out


def category_of(t: ETerm) -> Category:
    return split_eps(t)[0]


def rank(c: Category) -> int:
    return sum(1 for n in walk(c.skeleton) if isinstance(n, Eps))


# --------------------------------------------------------------------------
# degree and proof constants

def degree(t: ETerm) -> int:
    """Height of the function-symbol tree; variables, 0 and epsilon terms
    are leaves of height 0."""
    if isinstance(t, (Zero, Var, Eps)):
        return 0
    return 1 + max((degree(c) for c in children(t)), default=0)


# --------------------------------------------------------------------------
# proofs

@dataclass(frozen=True)
class AxiomI:
    scheme: int
    formulas: tuple


@dataclass(frozen=True)
class AxiomII:
    scheme: int
    terms: tuple


@dataclass(frozen=True)
class Critical:
    """``x`` and ``body`` give A(x); ``terms`` are ``(a,)`` for III.1/III.2,
    ``()`` for III.3 and ``(a, b)`` for III.4, where ``param`` names the
    variable of A(x, y) that a and b replace."""
    scheme: int
    x: str
    body: EFormula
    terms: tuple = ()
    param: Optional[str] = None


@dataclass(frozen=True)
class UserAxiom:
    id: str
    terms: tuple


@dataclass(frozen=True)
class MP:
    imp: int
    ante: int


Justification = Union[AxiomI, AxiomII, Critical, UserAxiom, MP]


@dataclass(frozen=True)
class ProofStep:
    formula: EFormula
    justification: Justification


@dataclass(frozen=True)
class UserAxiomSchema:
    """A universal formula given by its variables and quantifier-free matrix."""
    id: str
    variables: tuple
    matrix: EFormula

    def instance(self, terms: Sequence[ETerm]) -> EFormula:
        if len(terms) != len(self.variables):
            raise ArityError(f"user axiom {self.id} takes {len(self.variables)} term(s)")
        f = self.matrix
        # two-phase renaming keeps simultaneous substitution correct
        tmp = [f"_u{i}" for i in range(len(terms))]
        for v, t in zip(self.variables, tmp):
            f = substitute(f, v, Var(t))
        for t, u in zip(tmp, terms):
            f = substitute(f, t, u)
        return f


class FunctionRegistry:
    """Function symbols (name -> arity and host function) plus user axioms."""

    def __init__(self, functions: Optional[dict] = None, axioms: Optional[dict] = None):
        self.functions: dict = dict(functions or {})
        self.axioms: dict = dict(axioms or {})

    def register(self, name: str, arity: int, fn: Callable[..., int]) -> "FunctionRegistry":
        self.functions[name] = (arity, fn)
        return self

    def add_axiom(self, axiom_id: str, variables: Sequence[str], matrix: Union[str, EFormula]) -> "FunctionRegistry":
        if isinstance(matrix, str):
            matrix = parse_formula(matrix, self.arities())
        self.axioms[axiom_id] = UserAxiomSchema(axiom_id, tuple(variables), matrix)
        return self

    def bind(self, name: str, arity: int, fn: Callable[..., int]) -> "FunctionRegistry":
        """Copy of this registry with one more function."""
        return FunctionRegistry(self.functions, self.axioms).register(name, arity, fn)

    def arities(self) -> dict:
        return {k: v[0] for k, v in self.functions.items()}

    def copy(self) -> "FunctionRegistry":
        return FunctionRegistry(self.functions, self.axioms)


def _s(t):
    return Succ(t)


def axiom_ii(scheme: int, terms: Sequence[ETerm]) -> EFormula:
    need = {1: 1, 2: 2, 3: 1, 4: 1, 5: 2, 6: 1, 7: 2, 8: 2, 9: 2,
            10: 3, 11: 3, 12: 3, 13: 3}
    if scheme not in need:
        raise ValueError(f"no axiom II.{scheme:02d}")
    if len(terms) != need[scheme]:
        raise ValueError(f"II.{scheme:02d} takes {need[scheme]} term(s)")
    a = terms[0]
    b = terms[1] if len(terms) > 1 else None
    c = terms[2] if len(terms) > 2 else None
    return {
        1: lambda: Eq(a, a),
        2: lambda: Imp(Eq(_s(a), _s(b)), Eq(a, b)),
        3: lambda: Imp(Not(Eq(a, ZERO)), Eq(Pred(_s(a)), a)),
        4: lambda: Eq(Add(a, ZERO), a),
        5: lambda: Eq(Add(a, _s(b)), _s(Add(a, b))),
        6: lambda: Eq(Mul(a, ZERO), ZERO),
        7: lambda: Eq(Mul(a, _s(b)), Add(Mul(a, b), a)),
        8: lambda: Imp(Eq(a, b), Eq(_s(a), _s(b))),
        9: lambda: Imp(Eq(a, b), Eq(Pred(a), Pred(b))),
        10: lambda: Imp(Eq(a, b), Eq(Add(a, c), Add(b, c))),
        11: lambda: Imp(Eq(a, b), Eq(Add(c, a), Add(c, b))),
        12: lambda: Imp(Eq(a, b), Eq(Mul(a, c), Mul(b, c))),
        13: lambda: Imp(Eq(a, b), Eq(Mul(c, a), Mul(c, b))),
    }[scheme]()


def axiom_i(scheme: int, fs: Sequence[EFormula]) -> EFormula:
    if scheme == 1 and len(fs) == 2:
        A, B = fs
        return Imp(A, Imp(B, A))
    if scheme == 2 and len(fs) == 3:
        A, B, C = fs
        return Imp(Imp(A, Imp(B, C)), Imp(Imp(A, B), Imp(A, C)))
    if scheme == 3 and len(fs) == 2:
        A, B = fs
        return Imp(Imp(Not(A), Not(B)), Imp(B, A))
    raise ValueError(f"bad instantiation of axiom I.{scheme}")


def critical(j: Critical) -> EFormula:
    """The formula of a critical axiom instance."""
    x, body = j.x, j.body
    E = Eps(x, body)

    def A(t):
        return substitute(body, x, t)

    if j.scheme == 1:
        (a,) = j.terms
        return Imp(A(a), A(E))
    if j.scheme == 2:
        (a,) = j.terms
        return Imp(A(a), Not(Eq(E, _s(a))))
    if j.scheme == 3:
        if j.terms:
            raise ValueError("III.3 takes no terms")
        return Imp(Not(A(E)), Eq(E, ZERO))
    if j.scheme == 4:
        a, b = j.terms
        if j.param is None:
            raise ValueError("III.4 needs the parameter variable")
        return Imp(Eq(a, b), Eq(substitute(E, j.param, a), substitute(E, j.param, b)))
    raise ValueError(f"no axiom III.{j.scheme}")


def critical_eps(j: Critical) -> Eps:
    """The epsilon term an III.1 instance is about."""
    return Eps(j.x, j.body)


@dataclass(frozen=True)
class StepError:
    index: int
    reason: str

    def __str__(self):
        return f"step {self.index}: {self.reason}"


class ProofError(ValueError):
    def __init__(self, errors: list):
        super().__init__("; ".join(str(e) for e in errors))
        self.errors = errors


def step_formula_from_justification(j: Justification, registry: Optional[FunctionRegistry]) -> Optional[EFormula]:
    if isinstance(j, AxiomI):
        return axiom_i(j.scheme, j.formulas)
    if isinstance(j, AxiomII):
        return axiom_ii(j.scheme, j.terms)
    if isinstance(j, Critical):
        return critical(j)
    if isinstance(j, UserAxiom):
        if registry is None or j.id not in registry.axioms:
            raise UnknownUserAxiom(j.id)
        return registry.axioms[j.id].instance(j.terms)
    return None


def _check_fn_arities(f: _Node, registry: Optional[FunctionRegistry]) -> Optional[str]:
    if registry is None:
        return None
    for n in walk(f):
        if isinstance(n, FnApp):
            if n.symbol not in registry.functions:
                return f"unregistered function symbol '{n.symbol}'"
            if registry.functions[n.symbol][0] != len(n.args):
                return f"'{n.symbol}' applied to {len(n.args)} argument(s), registered arity {registry.functions[n.symbol][0]}"
    return None


def check_proof(p: Sequence[ProofStep], registry: Optional[FunctionRegistry] = None):
    """Return ``True`` when every step is valid, else the list of StepErrors.

    Raises :class:`UnknownUserAxiom` for a user axiom missing from the registry.
    """
    errors: list[StepError] = []
    for i, st in enumerate(p):
        f, j = st.formula, st.justification
        if not is_closed(f):
            errors.append(StepError(i, f"formula has free variables {sorted(free_vars(f))}"))
            continue
        msg = _check_fn_arities(f, registry)
        if msg:
            errors.append(StepError(i, msg))
            continue
        if isinstance(j, MP):
            if not (0 <= j.imp < i and 0 <= j.ante < i):
                errors.append(StepError(i, f"modus ponens cites steps {j.imp}, {j.ante}, not all earlier"))
                continue
            imp = p[j.imp].formula
            if not isinstance(imp, Imp):
                errors.append(StepError(i, f"step {j.imp} is not an implication"))
            elif not alpha_eq(imp.l, p[j.ante].formula):
                errors.append(StepError(i, f"antecedent of step {j.imp} differs from step {j.ante}"))
            elif not alpha_eq(imp.r, f):
                errors.append(StepError(i, "formula is not the consequent of the cited implication"))
            continue
        try:
            expected = step_formula_from_justification(j, registry)
        except UnknownUserAxiom:
            raise
        except (ValueError, TypeError) as exc:
            errors.append(StepError(i, str(exc)))
            continue
        if not alpha_eq(expected, f):
            errors.append(StepError(i, f"formula does not match the claimed instance {to_sexp(expected)}"))
            continue
        if isinstance(j, Critical) and j.scheme == 4:
            E = Eps(j.x, j.body)
            ca = category_of(substitute(E, j.param, j.terms[0]))
            cb = category_of(substitute(E, j.param, j.terms[1]))
            if ca != cb:
                errors.append(StepError(i, "III.4 instance whose two epsilon terms fall in different categories"))
    return True if not errors else errors


# --------------------------------------------------------------------------
# proof text

def _parse_justification(P: _Parser, s) -> Justification:
    if not isinstance(s, SList) or s.head is None:
        raise _err("expected a justification", s)
    h, args = s.head, s.items[1:]
    m = re.fullmatch(r"ax([123])", h)
    if m:
        return AxiomI(int(m.group(1)), tuple(P.formula(a) for a in args))
    m = re.fullmatch(r"ax(0[1-9]|1[0-3])", h)
    if m:
        return AxiomII(int(m.group(1)), tuple(P.term(a) for a in args))
    m = re.fullmatch(r"crit([1-4])", h)
    if m:
        k = int(m.group(1))
        if k == 4:
            if len(args) != 5:
                raise _err("crit4 takes x y A a b", s)
            return Critical(4, P.binder(args[0]), P.formula(args[2]),
                            (P.term(args[3]), P.term(args[4])), P.binder(args[1]))
        if k == 3:
            if len(args) != 2:
                raise _err("crit3 takes x A", s)
            return Critical(3, P.binder(args[0]), P.formula(args[1]))
        if len(args) != 3:
            raise _err(f"crit{k} takes x A a", s)
        return Critical(k, P.binder(args[0]), P.formula(args[1]), (P.term(args[2]),))
    if h == "user":
        if not args or not isinstance(args[0], Atom):
            raise _err("user takes an axiom id then terms", s)
        return UserAxiom(args[0].text, tuple(P.term(a) for a in args[1:]))
    if h == "mp":
        if len(args) != 2 or not all(isinstance(a, Atom) and _NUM.match(a.text) for a in args):
            raise _err("mp takes two step indices", s)
        return MP(int(args[0].text), int(args[1].text))
    raise _err(f"unknown justification '{h}'", s)


def parse_proof(text: str, arities: Optional[dict] = None) -> list[ProofStep]:
    P = _Parser(arities)
    steps = []
    for node in _sexp.read_all(text):
        if not isinstance(node, SList) or node.head != "step" or len(node) != 3:
            raise _err("expected (step <formula> <justification>)", node)
        steps.append(ProofStep(P.formula(node[1]), _parse_justification(P, node[2])))
    return steps


def justification_sexp(j: Justification) -> str:
    if isinstance(j, AxiomI):
        return f"(ax{j.scheme} " + " ".join(to_sexp(f) for f in j.formulas) + ")"
    if isinstance(j, AxiomII):
        return f"(ax{j.scheme:02d} " + " ".join(to_sexp(t) for t in j.terms) + ")"
    if isinstance(j, Critical):
        if j.scheme == 4:
            a, b = j.terms
            return f"(crit4 {j.x} {j.param} {to_sexp(j.body)} {to_sexp(a)} {to_sexp(b)})"
        parts = [j.x, to_sexp(j.body)] + [to_sexp(t) for t in j.terms]
        return f"(crit{j.scheme} " + " ".join(parts) + ")"
    if isinstance(j, UserAxiom):
        return "(user " + " ".join([j.id] + [to_sexp(t) for t in j.terms]) + ")"
    return f"(mp {j.imp} {j.ante})"


def proof_to_text(p: Sequence[ProofStep]) -> str:
    return "".join(f"(step {to_sexp(s.formula)} {justification_sexp(s.justification)})\n" for s in p)


# --------------------------------------------------------------------------
# enumerations over a proof

def _proof_nodes(p) -> list:
    if isinstance(p, _Node):
        return [p]
    return [s.formula if isinstance(s, ProofStep) else s for s in p]


def enumerate_categories(p) -> list[Category]:
    """Categories of every epsilon subterm, inner before outer, each once."""
    seen: dict = {}
    for f in _proof_nodes(p):
        for e in eps_subterms_postorder(f):
            c = category_of(e)
            if c not in seen:
                seen[c] = c
    return list(seen)


def enumerate_eps_terms(p) -> list[Eps]:
    """Distinct closed epsilon terms, inner before outer, in order of first occurrence."""
    seen: dict = {}
    for f in _proof_nodes(p):
        for e in eps_subterms_postorder(f):
            if is_closed(e):
                k = alpha_key(e)
                if k not in seen:
                    seen[k] = e
    return list(seen.values())


@dataclass(frozen=True)
class ProofConstants:
    m: int
    e: int
    g: int


def proof_constants(p) -> ProofConstants:
    nodes = _proof_nodes(p)
    m = 0
    for f in nodes:
        for n in walk(f):
            if isinstance(n, ETerm):
                m = max(m, degree(n))
    return ProofConstants(m, len(enumerate_eps_terms(nodes)), len(enumerate_categories(nodes)))


__all__ = [
    "ETerm", "EFormula", "Zero", "Var", "Succ", "Pred", "Add", "Mul", "Eps", "FnApp",
    "Eq", "Not", "Imp", "ZERO", "numeral", "numeral_value",
    "to_sexp", "pretty", "free_vars", "is_closed", "substitute", "alpha_eq", "alpha_key",
    "parse_term", "parse_formula", "parse_proof", "proof_to_text",
    "Category", "category_of", "split_eps", "rank", "degree",
    "AxiomI", "AxiomII", "Critical", "UserAxiom", "MP", "ProofStep", "UserAxiomSchema",
    "FunctionRegistry", "StepError", "ProofError", "check_proof",
    "enumerate_categories", "enumerate_eps_terms", "ProofConstants", "proof_constants",
    "EpsSyntaxError", "ArityError", "NotAnEpsTerm", "UnknownUserAxiom",
]
