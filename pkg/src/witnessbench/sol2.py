"""Second-order classical arithmetic with lambda-c proof terms.

Formulas are built from predicate applications, implication, and the two
universal quantifiers; everything else (bottom, conjunction, disjunction,
existentials, Leibniz equality, ``Int``) is sugar expanded at construction
time.  A derivation is a line-oriented script of typing-rule applications;
:func:`check_derivation` replays it and returns the typed conclusion with the
proof term it builds.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence, Union

from . import _sexp, kam
from ._sexp import Atom, SList, SexpSyntaxError
from .epsilon_core import (
    Add, ETerm, FnApp, Mul, Succ, Var, Zero, free_vars as term_fv, numeral, numeral_value,
    substitute as term_subst, to_sexp as term_sexp,
)


class SOSyntaxError(SexpSyntaxError):
    pass


class DerivationError(ValueError):
    def __init__(self, step: int, reason: str):
        super().__init__(f"step {step}: {reason}")
        self.step = step
        self.reason = reason


class DuplicateAxiom(KeyError):
    pass


class AxiomFalse(ValueError):
    """A registered equation failed its spot check."""


# --------------------------------------------------------------------------
# formulas

class SOFormula:
    __slots__ = ()

    def __repr__(self):
        return to_sexp(self)

    def __setattr__(self, k, v):
        raise AttributeError("formulas are immutable")


class PredApp(SOFormula):
    __slots__ = ("pred", "args")

    def __init__(self, pred: str, args: Sequence[ETerm] = ()):
        object.__setattr__(self, "pred", pred)
        object.__setattr__(self, "args", tuple(args))

    def __eq__(self, o):
        return isinstance(o, PredApp) and (o.pred, o.args) == (self.pred, self.args)

    def __hash__(self):
        return hash(("P", self.pred, self.args))


class Imp(SOFormula):
    __slots__ = ("l", "r")

    def __init__(self, l: SOFormula, r: SOFormula):
        object.__setattr__(self, "l", l)
        object.__setattr__(self, "r", r)

    def __eq__(self, o):
        return isinstance(o, Imp) and (o.l, o.r) == (self.l, self.r)

    def __hash__(self):
        return hash(("I", self.l, self.r))


class ForallInd(SOFormula):
    __slots__ = ("var", "body")

    def __init__(self, var: str, body: SOFormula):
        object.__setattr__(self, "var", var)
        object.__setattr__(self, "body", body)

    def __eq__(self, o):
        return isinstance(o, ForallInd) and (o.var, o.body) == (self.var, self.body)

    def __hash__(self):
        return hash(("A1", self.var, self.body))


class ForallPred(SOFormula):
    __slots__ = ("var", "arity", "body")

    def __init__(self, var: str, arity: int, body: SOFormula):
        object.__setattr__(self, "var", var)
        object.__setattr__(self, "arity", arity)
        object.__setattr__(self, "body", body)

    def __eq__(self, o):
        return isinstance(o, ForallPred) and (o.var, o.arity, o.body) == (self.var, self.arity, self.body)

    def __hash__(self):
        return hash(("A2", self.var, self.arity, self.body))


def imps(*fs: SOFormula) -> SOFormula:
    """A1, ..., An -> B, right-nested."""
    out = fs[-1]
    for f in reversed(fs[:-1]):
        out = Imp(f, out)
    return out


# --------------------------------------------------------------------------
# free variables, fresh names

def fv_ind(f: SOFormula) -> frozenset:
    if isinstance(f, PredApp):
        out = frozenset()
        for a in f.args:
            out |= term_fv(a)
        return out
    if isinstance(f, Imp):
        return fv_ind(f.l) | fv_ind(f.r)
    if isinstance(f, ForallInd):
        return fv_ind(f.body) - {f.var}
    return fv_ind(f.body)


def fv_pred(f: SOFormula) -> frozenset:
    if isinstance(f, PredApp):
        return frozenset((f.pred,))
    if isinstance(f, Imp):
        return fv_pred(f.l) | fv_pred(f.r)
    if isinstance(f, ForallInd):
        return fv_pred(f.body)
    return fv_pred(f.body) - {f.var}


def _names(f: SOFormula) -> set:
    out: set = set()

    def go(g):
        if isinstance(g, PredApp):
            out.add(g.pred)
            for a in g.args:
                out.update(term_fv(a))
        elif isinstance(g, Imp):
            go(g.l)
            go(g.r)
        else:
            out.add(g.var)
            go(g.body)

    go(f)
    return out


def _fresh(base: str, avoid: Iterable[str]) -> str:
    avoid = set(avoid)
    stem = base.rstrip("0123456789") or "v"
    for i in itertools.count(1):
        cand = f"{stem}{i}"
        if cand not in avoid:
            return cand
    raise AssertionError


def is_closed(f: SOFormula) -> bool:
    return not fv_ind(f) and not fv_pred(f)


# --------------------------------------------------------------------------
# sugar

def bot() -> SOFormula:
    return ForallPred("X", 0, PredApp("X"))


def neg(a: SOFormula) -> SOFormula:
    return Imp(a, bot())


def _fresh_pred(*fs: SOFormula, base: str = "X") -> str:
    used: set = set()
    for f in fs:
        used |= _names(f)
    return base if base not in used else _fresh(base, used)


def conj(a: SOFormula, b: SOFormula) -> SOFormula:
    X = _fresh_pred(a, b)
    x = PredApp(X)
    return ForallPred(X, 0, Imp(Imp(a, Imp(b, x)), x))


def disj(a: SOFormula, b: SOFormula) -> SOFormula:
    X = _fresh_pred(a, b)
    x = PredApp(X)
    return ForallPred(X, 0, Imp(Imp(a, x), Imp(Imp(b, x), x)))


def exists(x: str, a: SOFormula) -> SOFormula:
    return Imp(ForallInd(x, neg(a)), bot())


def exists2(X: str, n: int, a: SOFormula) -> SOFormula:
    return Imp(ForallPred(X, n, neg(a)), bot())


def _fresh_for_terms(base: str, *ts: ETerm) -> str:
    used: set = set()
    for t in ts:
        used |= term_fv(t)
    return base if base not in used else _fresh(base, used)


def eq(a: ETerm, b: ETerm) -> SOFormula:
    """Leibniz equality: forall X (X a -> X b)."""
    return ForallPred("X", 1, Imp(PredApp("X", (a,)), PredApp("X", (b,))))


def int_pred(t: ETerm) -> SOFormula:
    """Int(t) = forall X [forall y (Xy -> X sy), X0 -> Xt]."""
    y = _fresh_for_terms("y", t)
    X = "X"
    step = ForallInd(y, Imp(PredApp(X, (Var(y),)), PredApp(X, (Succ(Var(y)),))))
    return ForallPred(X, 1, imps(step, PredApp(X, (Zero(),)), PredApp(X, (t,))))


# --------------------------------------------------------------------------
# substitution

def subst_ind(f: SOFormula, x: str, tau: ETerm) -> SOFormula:
    """Capture-avoiding ``f[tau/x]`` for an individual variable."""
    ft = term_fv(tau)

    def go(g):
        if x not in fv_ind(g):
            return g
        if isinstance(g, PredApp):
            return PredApp(g.pred, [term_subst(a, x, tau) for a in g.args])
        if isinstance(g, Imp):
            return Imp(go(g.l), go(g.r))
        if isinstance(g, ForallInd):
            if g.var in ft:
                new = _fresh(g.var, ft | _names(g.body) | {x})
                return ForallInd(new, go(subst_ind(g.body, g.var, Var(new))))
            return ForallInd(g.var, go(g.body))
        return ForallPred(g.var, g.arity, go(g.body))

    return go(f)


def _subst_terms(f: SOFormula, params: Sequence[str], args: Sequence[ETerm]) -> SOFormula:
    """Simultaneous ``f[args/params]`` via fresh intermediates."""
    avoid = _names(f) | set(params)
    for a in args:
        avoid |= term_fv(a)
    tmp = []
    for p in params:
        t = _fresh("_c", avoid)
        avoid.add(t)
        tmp.append(t)
    for p, t in zip(params, tmp):
        f = subst_ind(f, p, Var(t))
    for t, a in zip(tmp, args):
        f = subst_ind(f, t, a)
    return f


def subst_pred(f: SOFormula, X: str, params: Sequence[str], phi: SOFormula) -> SOFormula:
    """Comprehension: replace every ``X t1..tn`` in f by ``phi[t/params]``."""
    fv_i = fv_ind(phi) - set(params)
    fv_p = fv_pred(phi)

    def go(g):
        if X not in fv_pred(g):
            return g
        if isinstance(g, PredApp):
            if len(g.args) != len(params):
                raise ValueError(f"predicate {X} applied to {len(g.args)} arguments, "
                                 f"comprehension has {len(params)} parameters")
            return _subst_terms(phi, params, g.args)
        if isinstance(g, Imp):
            return Imp(go(g.l), go(g.r))
        if isinstance(g, ForallInd):
            if g.var in fv_i:
                new = _fresh(g.var, fv_i | _names(g.body) | _names(phi))
                return ForallInd(new, go(subst_ind(g.body, g.var, Var(new))))
            return ForallInd(g.var, go(g.body))
        if g.var in fv_p:
            new = _fresh(g.var, fv_p | _names(g.body) | _names(phi) | {X})
            return ForallPred(new, g.arity, go(_rename_pred(g.body, g.var, new)))
        return ForallPred(g.var, g.arity, go(g.body))

    return go(f)


def _rename_pred(f: SOFormula, old: str, new: str) -> SOFormula:
    if isinstance(f, PredApp):
        return PredApp(new, f.args) if f.pred == old else f
    if isinstance(f, Imp):
        return Imp(_rename_pred(f.l, old, new), _rename_pred(f.r, old, new))
    if isinstance(f, ForallInd):
        return ForallInd(f.var, _rename_pred(f.body, old, new))
    if f.var == old:
        return f
    return ForallPred(f.var, f.arity, _rename_pred(f.body, old, new))


def alpha_key(f: SOFormula) -> str:
    def term(t: ETerm, env: dict) -> str:
        if isinstance(t, Var):
            return env.get(t.name, t.name)
        if isinstance(t, Zero):
            return "0"
        if isinstance(t, Succ):
            return f"(s {term(t.arg, env)})"
        if isinstance(t, Add):
            return f"(+ {term(t.l, env)} {term(t.r, env)})"
        if isinstance(t, Mul):
            return f"(* {term(t.l, env)} {term(t.r, env)})"
        if isinstance(t, FnApp):
            return "(" + " ".join([t.symbol] + [term(a, env) for a in t.args]) + ")"
        raise TypeError(t)

    def go(g, ei: dict, ep: dict, d: int) -> str:
        if isinstance(g, PredApp):
            return "(" + " ".join([ep.get(g.pred, g.pred)] + [term(a, ei) for a in g.args]) + ")"
        if isinstance(g, Imp):
            return f"(> {go(g.l, ei, ep, d)} {go(g.r, ei, ep, d)})"
        if isinstance(g, ForallInd):
            return f"(A #{d} {go(g.body, {**ei, g.var: f'#{d}'}, ep, d + 1)})"
        return f"(A2/{g.arity} #{d} {go(g.body, ei, {**ep, g.var: f'#{d}'}, d + 1)})"

    return go(f, {}, {}, 0)


def alpha_eq(a: SOFormula, b: SOFormula) -> bool:
    return alpha_key(a) == alpha_key(b)


# --------------------------------------------------------------------------
# relativization

def relativize(f: SOFormula) -> SOFormula:
    """A^int: first-order quantifiers are restricted to Int."""
    if isinstance(f, PredApp):
        return f
    if isinstance(f, Imp):
        return Imp(relativize(f.l), relativize(f.r))
    if isinstance(f, ForallInd):
        return ForallInd(f.var, Imp(int_pred(Var(f.var)), relativize(f.body)))
    return ForallPred(f.var, f.arity, relativize(f.body))


def has_first_order_forall(f: SOFormula) -> bool:
    if isinstance(f, PredApp):
        return False
    if isinstance(f, Imp):
        return has_first_order_forall(f.l) or has_first_order_forall(f.r)
    if isinstance(f, ForallInd):
        return True
    return has_first_order_forall(f.body)


def prenex_statement(k: int, symbol: str = "phi", leading: str = "exists") -> SOFormula:
    """``exists x1 forall y1 ... exists xk forall yk (symbol(x..., y...) = 0)``;
    with ``leading='forall'`` and k=1 this is ``forall x exists y (symbol(x, y) = 0)``."""
    xs = [f"x{i}" for i in range(1, k + 1)]
    ys = [f"y{i}" for i in range(1, k + 1)]
    if leading == "forall":
        if k != 1:
            raise ValueError("the universal form is only defined for one alternation")
        body = eq(FnApp(symbol, (Var("x"), Var("y"))), Zero())
        return ForallInd("x", exists("y", body))
    body = eq(FnApp(symbol, [Var(v) for v in xs + ys]), Zero())
    for x, y in reversed(list(zip(xs, ys))):
        body = exists(x, ForallInd(y, body))
    return body


# --------------------------------------------------------------------------
# printing and parsing

def to_sexp(f: SOFormula) -> str:
    if isinstance(f, PredApp):
        if not f.args:
            return f.pred
        return "(pred " + " ".join([f.pred] + [term_sexp(a) for a in f.args]) + ")"
    if isinstance(f, Imp):
        return f"(imp {to_sexp(f.l)} {to_sexp(f.r)})"
    if isinstance(f, ForallInd):
        return f"(forall {f.var} {to_sexp(f.body)})"
    return f"(forall2 {f.var} {f.arity} {to_sexp(f.body)})"


def pretty(f: SOFormula) -> str:
    if isinstance(f, PredApp):
        if not f.args:
            return f.pred
        return f"{f.pred}(" + ",".join(_pterm(a) for a in f.args) + ")"
    if isinstance(f, Imp):
        return f"({pretty(f.l)} -> {pretty(f.r)})"
    if isinstance(f, ForallInd):
        return f"A{f.var}.{pretty(f.body)}"
    return f"A{f.var}/{f.arity}.{pretty(f.body)}"


def _pterm(t: ETerm) -> str:
    n = numeral_value(t)
    if n is not None:
        return str(n)
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Succ):
        return f"s{_pterm(t.arg)}"
    if isinstance(t, Add):
        return f"({_pterm(t.l)}+{_pterm(t.r)})"
    if isinstance(t, Mul):
        return f"({_pterm(t.l)}*{_pterm(t.r)})"
    if isinstance(t, FnApp):
        return f"{t.symbol}(" + ",".join(_pterm(a) for a in t.args) + ")"
    return term_sexp(t)


_IDENT = re.compile(r"[A-Za-z][A-Za-z0-9_']*\Z")
_NUM = re.compile(r"[0-9]+\Z")
_KEYWORDS = {"imp", "forall", "forall2", "pred", "bot", "and", "or", "not", "exists", "exists2",
             "=", "Int", "succ", "add", "mul", "fn", "s"}


def _serr(msg, node):
    return SOSyntaxError(msg, node.line, node.col)


class _Reader:
    def __init__(self):
        self.arities: dict = {}

    def name(self, s) -> str:
        if not isinstance(s, Atom) or not _IDENT.match(s.text) or s.text in _KEYWORDS:
            raise _serr("expected a name", s)
        return s.text

    def term(self, s) -> ETerm:
        if isinstance(s, Atom):
            if _NUM.match(s.text):
                return numeral(int(s.text))
            return Var(self.name(s))
        h, args = s.head, s.items[1:]
        if h in ("succ", "s") and len(args) == 1:
            return Succ(self.term(args[0]))
        if h == "add" and len(args) == 2:
            return Add(self.term(args[0]), self.term(args[1]))
        if h == "mul" and len(args) == 2:
            return Mul(self.term(args[0]), self.term(args[1]))
        if h == "fn" and args:
            sym = self.name(args[0])
            return FnApp(sym, [self.term(a) for a in args[1:]])
        raise _serr(f"malformed term '{h}'", s)

    def formula(self, s) -> SOFormula:
        if isinstance(s, Atom):
            if s.text == "bot":
                return bot()
            return PredApp(self.name(s))
        h, args = s.head, s.items[1:]

        def need(k):
            if len(args) != k:
                raise _serr(f"'{h}' takes {k} argument(s)", s)

        if h == "imp":
            if len(args) < 2:
                raise _serr("imp takes at least two formulas", s)
            return imps(*[self.formula(a) for a in args])
        if h == "forall":
            need(2)
            return ForallInd(self.name(args[0]), self.formula(args[1]))
        if h == "forall2":
            need(3)
            return ForallPred(self.name(args[0]), self.arity(args[1]), self.formula(args[2]))
        if h == "pred":
            if not args:
                raise _serr("pred needs a predicate name", s)
            return PredApp(self.name(args[0]), [self.term(a) for a in args[1:]])
        if h == "and":
            need(2)
            return conj(self.formula(args[0]), self.formula(args[1]))
        if h == "or":
            need(2)
            return disj(self.formula(args[0]), self.formula(args[1]))
        if h == "not":
            need(1)
            return neg(self.formula(args[0]))
        if h == "exists":
            need(2)
            return exists(self.name(args[0]), self.formula(args[1]))
        if h == "exists2":
            need(3)
            return exists2(self.name(args[0]), self.arity(args[1]), self.formula(args[2]))
        if h == "=":
            need(2)
            return eq(self.term(args[0]), self.term(args[1]))
        if h == "Int":
            need(1)
            return int_pred(self.term(args[0]))
        raise _serr(f"unknown formula head '{h}'", s)

    def arity(self, s) -> int:
        if not isinstance(s, Atom) or not _NUM.match(s.text):
            raise _serr("expected an arity", s)
        return int(s.text)


def _check_arities(f: SOFormula, where=None) -> None:
    """Each predicate variable is used at one arity, matching its binder."""
    seen: dict = {}

    def go(g, bound: dict):
        if isinstance(g, PredApp):
            n = len(g.args)
            want = bound[g.pred] if g.pred in bound else seen.setdefault(g.pred, n)
            if want != n:
                raise ValueError(f"predicate {g.pred} used with {n} argument(s), expected {want}")
        elif isinstance(g, Imp):
            go(g.l, bound)
            go(g.r, bound)
        elif isinstance(g, ForallInd):
            go(g.body, bound)
        else:
            go(g.body, {**bound, g.var: g.arity})

    go(f, {})


def parse_formula(text: str) -> SOFormula:
    node = _sexp.read_one(text)
    f = _Reader().formula(node)
    try:
        _check_arities(f)
    except ValueError as e:
        raise SOSyntaxError(str(e), node.line, node.col) from None
    return f


def parse_so_term(text: str) -> ETerm:
    return _Reader().term(_sexp.read_one(text))


# --------------------------------------------------------------------------
# axiom realizers

@dataclass(frozen=True)
class AxiomRealizer:
    formula: SOFormula
    term: kam.LTerm
    note: str = ""


def _plus_term() -> kam.LTerm:
    V = kam.LVar
    return kam.lam("m", "n", "f", "x", kam.app(V("m"), V("f"), kam.app(V("n"), V("f"), V("x"))))


def _times_term() -> kam.LTerm:
    V = kam.LVar
    return kam.lam("m", "n", "f", kam.App(V("m"), kam.App(V("n"), V("f"))))


def stored(arity: int, body: kam.LTerm) -> kam.LTerm:
    """\\x1..\\xk.(T \\a1.(T \\a2. ... body a1..ak) x2) x1: each argument is
    passed through the storage operator before ``body`` sees it."""
    xs = [f"x{i}" for i in range(1, arity + 1)]
    as_ = [f"a{i}" for i in range(1, arity + 1)]
    inner: kam.LTerm = kam.app(body, *[kam.LVar(a) for a in as_])
    for i in reversed(range(arity)):
        inner = kam.app(kam.storage_T(), kam.Lam(as_[i], inner), kam.LVar(xs[i]))
    return kam.lam(*xs, inner)


def _closure(f: ETerm, k: int) -> SOFormula:
    xs = [f"x{i}" for i in range(1, k + 1)]
    body = int_pred(f)
    for x in reversed(xs):
        body = Imp(int_pred(Var(x)), body)
    for x in reversed(xs):
        body = ForallInd(x, body)
    return body


def builtin_realizers() -> dict[str, AxiomRealizer]:
    x, y = Var("x"), Var("y")
    ident = kam.identity()
    out = {
        "succ_nonzero": AxiomRealizer(
            neg(eq(Succ(Zero()), Zero())),
            kam.Lam("x", kam.App(kam.LVar("x"), kam.identity())),
            "s0 /= 0, realized by \\x.xu with u the identity"),
        "succ_injective": AxiomRealizer(
            ForallInd("x", ForallInd("y", Imp(eq(Succ(x), Succ(y)), eq(x, y)))), ident,
            "injectivity of successor"),
        "add_zero": AxiomRealizer(ForallInd("x", eq(Add(x, Zero()), x)), ident, "true equation"),
        "add_succ": AxiomRealizer(
            ForallInd("x", ForallInd("y", eq(Add(x, Succ(y)), Succ(Add(x, y))))), ident, "true equation"),
        "mul_zero": AxiomRealizer(ForallInd("x", eq(Mul(x, Zero()), Zero())), ident, "true equation"),
        "mul_succ": AxiomRealizer(
            ForallInd("x", ForallInd("y", eq(Mul(x, Succ(y)), Add(Mul(x, y), y)))), ident, "true equation"),
        "int_succ": AxiomRealizer(_closure(Succ(Var("x1")), 1), stored(1, kam.succ_term()), "Int closed under successor, through storage"),
        "int_add": AxiomRealizer(_closure(Add(Var("x1"), Var("x2")), 2),
                                 stored(2, _plus_term()), "Int closed under addition, through storage"),
        "int_mul": AxiomRealizer(_closure(Mul(Var("x1"), Var("x2")), 2),
                                 stored(2, _times_term()), "Int closed under multiplication, through storage"),
    }
    return out


def _spot_check(f: SOFormula, functions: dict, size: int = 6) -> None:
    """For formulas of shape forall xs (a = b), evaluate both sides on a grid."""
    vars_: list = []
    g = f
    while isinstance(g, ForallInd):
        vars_.append(g.var)
        g = g.body
    if not (isinstance(g, ForallPred) and g.arity == 1 and isinstance(g.body, Imp)
            and isinstance(g.body.l, PredApp) and isinstance(g.body.r, PredApp)
            and g.body.l.pred == g.var == g.body.r.pred):
        return
    a, b = g.body.l.args[0], g.body.r.args[0]

    def ev(t, env):
        if isinstance(t, Zero):
            return 0
        if isinstance(t, Var):
            return env[t.name]
        if isinstance(t, Succ):
            return ev(t.arg, env) + 1
        if isinstance(t, Add):
            return ev(t.l, env) + ev(t.r, env)
        if isinstance(t, Mul):
            return ev(t.l, env) * ev(t.r, env)
        if isinstance(t, FnApp):
            return functions[t.symbol](*[ev(u, env) for u in t.args])
        raise TypeError(t)

    for vals in itertools.product(range(size), repeat=len(vars_)):
        env = dict(zip(vars_, vals))
        try:
            va, vb = ev(a, env), ev(b, env)
        except KeyError:
            return
        if va != vb:
            raise AxiomFalse(f"{pretty(f)} fails at {env}")


class RealizerRegistry:
    """Append-only table of axioms that derivations may cite as leaves."""

    def __init__(self, include_builtins: bool = True, functions: Optional[dict] = None):
        self.axioms: dict[str, AxiomRealizer] = dict(builtin_realizers()) if include_builtins else {}
        self.functions: dict = dict(functions or {})

    def register(self, axiom_id: str, formula: Union[str, SOFormula], term: Union[str, kam.LTerm],
                 note: str = "user axiom") -> str:
        if axiom_id in self.axioms:
            raise DuplicateAxiom(axiom_id)
        if isinstance(formula, str):
            formula = parse_formula(formula)
        if isinstance(term, str):
            term = kam.parse_lterm(term)
        if not is_closed(formula):
            raise ValueError(f"axiom {axiom_id} is not closed")
        if term.fv():
            raise ValueError(f"realizer of {axiom_id} has free variables")
        if self.functions:
            _spot_check(formula, self.functions)
        self.axioms[axiom_id] = AxiomRealizer(formula, term, note)
        return axiom_id

    def copy(self) -> "RealizerRegistry":
        r = RealizerRegistry(include_builtins=False, functions=self.functions)
        r.axioms = dict(self.axioms)
        return r


def register_axiom_realizer(registry: RealizerRegistry, formula, term, axiom_id: Optional[str] = None) -> str:
    return registry.register(axiom_id or f"ax{len(registry.axioms)}", formula, term)


# --------------------------------------------------------------------------
# derivations

@dataclass(frozen=True)
class Step:
    rule: Union[int, str]          # 1..8, "axiom" or "declare"
    premises: tuple = ()
    args: tuple = ()               # instantiation data
    line: int = 0


@dataclass
class Derivation:
    steps: list
    declarations: list = field(default_factory=list)   # (id, formula, term)


@dataclass(frozen=True)
class Judgment:
    context: tuple                 # sorted (name, formula) pairs
    term: kam.LTerm
    formula: SOFormula

    def ctx(self) -> dict:
        return dict(self.context)


@dataclass(frozen=True)
class TypedConclusion:
    context: tuple
    term: kam.LTerm
    formula: SOFormula

    def __str__(self):
        ctx = ", ".join(f"{n}:{pretty(f)}" for n, f in self.context)
        return f"{ctx + ' ' if ctx else ''}|- {kam.to_sexp(self.term)} : {pretty(self.formula)}"


def _merge(i: int, a: dict, b: dict) -> dict:
    out = dict(a)
    for k, v in b.items():
        if k in out and not alpha_eq(out[k], v):
            raise DerivationError(i, f"hypothesis {k} has two different types")
        out[k] = v
    return out


def _judg(ctx: dict, term, f) -> Judgment:
    return Judgment(tuple(sorted(ctx.items(), key=lambda kv: kv[0])), term, f)


def check_derivation(d: Derivation, registry: Optional[RealizerRegistry] = None) -> TypedConclusion:
    """Replay every step; the last one is the conclusion."""
    reg = registry.copy() if registry is not None else RealizerRegistry()
    for did, f, t in d.declarations:
        try:
            reg.register(did, f, t, note="declared in script")
        except (DuplicateAxiom, AxiomFalse, ValueError) as e:
            raise DerivationError(-1, f"declaration {did}: {e}") from None
    if not d.steps:
        raise DerivationError(0, "empty derivation")
    done: list[Judgment] = []
    for i, st in enumerate(d.steps):
        done.append(_apply(i, st, done, reg))
    last = done[-1]
    return TypedConclusion(last.context, last.term, last.formula)


def _premise(i: int, st: Step, done: list, k: int) -> list:
    if len(st.premises) != k:
        raise DerivationError(i, f"rule {st.rule} takes {k} premise(s), got {len(st.premises)}")
    out = []
    for p in st.premises:
        if not isinstance(p, int) or not 0 <= p < i:
            raise DerivationError(i, f"premise {p} does not refer to an earlier step")
        out.append(done[p])
    return out


def _apply(i: int, st: Step, done: list, reg: RealizerRegistry) -> Judgment:
    r = st.rule
    a = st.args
    if r == "axiom":
        (name,) = a
        if name not in reg.axioms:
            raise DerivationError(i, f"unregistered axiom '{name}'")
        ax = reg.axioms[name]
        return _judg({}, ax.term, ax.formula)
    if r == 1:
        _premise(i, st, done, 0)
        if len(a) != 2:
            raise DerivationError(i, "rule 1 takes a name and a formula")
        x, f = a
        return _judg({x: f}, kam.LVar(x), f)
    if r == 2:
        j, k = _premise(i, st, done, 2)
        if not isinstance(j.formula, Imp):
            raise DerivationError(i, f"rule 2: first premise has type {pretty(j.formula)}, not an implication")
        if not alpha_eq(j.formula.l, k.formula):
            raise DerivationError(i, f"rule 2: argument has type {pretty(k.formula)}, "
                                     f"expected {pretty(j.formula.l)}")
        return _judg(_merge(i, j.ctx(), k.ctx()), kam.App(j.term, k.term), j.formula.r)
    if r == 3:
        (j,) = _premise(i, st, done, 1)
        if len(a) != 2:
            raise DerivationError(i, "rule 3 takes a name and a formula")
        x, f = a
        ctx = j.ctx()
        if x in ctx and not alpha_eq(ctx[x], f):
            raise DerivationError(i, f"rule 3: hypothesis {x} has type {pretty(ctx[x])}, not {pretty(f)}")
        ctx.pop(x, None)
        return _judg(ctx, kam.Lam(x, j.term), Imp(f, j.formula))
    if r == 4:
        (j,) = _premise(i, st, done, 1)
        f = j.formula
        if not (isinstance(f, Imp) and isinstance(f.l, Imp) and alpha_eq(f.l.l, f.r)):
            raise DerivationError(i, f"rule 4: premise type {pretty(f)} is not of shape (A->B)->A")
        return _judg(j.ctx(), kam.App(kam.CC, j.term), f.r)
    if r == 5:
        (j,) = _premise(i, st, done, 1)
        (x,) = a
        for h, hf in j.context:
            if x in fv_ind(hf):
                raise DerivationError(i, f"rule 5: {x} is free in hypothesis {h}:{pretty(hf)}")
        return _judg(j.ctx(), j.term, ForallInd(x, j.formula))
    if r == 6:
        (j,) = _premise(i, st, done, 1)
        X, n = a
        for h, hf in j.context:
            if X in fv_pred(hf):
                raise DerivationError(i, f"rule 6: {X} is free in hypothesis {h}:{pretty(hf)}")
        try:
            _check_arities(ForallPred(X, n, j.formula))
        except ValueError as e:
            raise DerivationError(i, f"rule 6: {e}") from None
        return _judg(j.ctx(), j.term, ForallPred(X, n, j.formula))
    if r == 7:
        (j,) = _premise(i, st, done, 1)
        (tau,) = a
        f = j.formula
        if not isinstance(f, ForallInd):
            raise DerivationError(i, f"rule 7: premise type {pretty(f)} is not first-order universal")
        return _judg(j.ctx(), j.term, subst_ind(f.body, f.var, tau))
    if r == 8:
        (j,) = _premise(i, st, done, 1)
        params, phi = a
        f = j.formula
        if not isinstance(f, ForallPred):
            raise DerivationError(i, f"rule 8: premise type {pretty(f)} is not second-order universal")
        if len(params) != f.arity:
            raise DerivationError(i, f"rule 8: {f.var} has arity {f.arity}, "
                                     f"comprehension gives {len(params)} parameter(s)")
        try:
            out = subst_pred(f.body, f.var, params, phi)
        except ValueError as e:
            raise DerivationError(i, f"rule 8: {e}") from None
        return _judg(j.ctx(), j.term, out)
    raise DerivationError(i, f"unknown rule {r!r}")


# --------------------------------------------------------------------------
# script syntax

def _step_of(R: _Reader, s, idx: int) -> Step:
    if not isinstance(s, SList) or not s.items:
        raise _serr("expected (rule ...) or (axiom ...)", s)
    h, args = s.head, s.items[1:]
    if h == "axiom":
        if len(args) != 1 or not isinstance(args[0], Atom):
            raise _serr("(axiom <id>)", s)
        return Step("axiom", (), (args[0].text,), s.line)
    if h != "rule":
        raise _serr(f"unknown step head '{h}'", s)
    if len(args) < 2 or not isinstance(args[0], Atom) or not args[0].text.isdigit():
        raise _serr("(rule <n> (<premises>) <instantiation>)", s)
    n = int(args[0].text)
    prem_node = args[1]
    if not isinstance(prem_node, SList):
        raise _serr("premise ids go in a list", prem_node)
    prem = []
    for p in prem_node.items:
        if not isinstance(p, Atom) or not p.text.isdigit():
            raise _serr("premise ids are step numbers", p)
        prem.append(int(p.text))
    inst = args[2:]

    def want(k):
        if len(inst) != k:
            raise _serr(f"rule {n} takes {k} instantiation argument(s)", s)

    if n in (1, 3):
        want(2)
        name = inst[0]
        if not isinstance(name, Atom) or not _IDENT.match(name.text):
            raise _serr("expected a term variable", name)
        data = (name.text, R.formula(inst[1]))
    elif n in (2, 4):
        want(0)
        data = ()
    elif n == 5:
        want(1)
        data = (R.name(inst[0]),)
    elif n == 6:
        want(2)
        data = (R.name(inst[0]), R.arity(inst[1]))
    elif n == 7:
        want(1)
        data = (R.term(inst[0]),)
    elif n == 8:
        want(2)
        if not isinstance(inst[0], SList):
            raise _serr("comprehension parameters go in a list", inst[0])
        data = (tuple(R.name(p) for p in inst[0].items), R.formula(inst[1]))
    else:
        raise _serr(f"no rule {n}", s)
    return Step(n, tuple(prem), data, s.line)


def parse_derivation(text: str) -> Derivation:
    """One step per top-level form; ``(declare id FORMULA TERM)`` lines
    register extra axioms before checking."""
    R = _Reader()
    steps, decls = [], []
    for node in _sexp.read_all(text):
        if isinstance(node, SList) and node.head == "declare":
            if len(node.items) != 4 or not isinstance(node.items[1], Atom):
                raise _serr("(declare <id> <formula> <lambda-term>)", node)
            decls.append((node.items[1].text, R.formula(node.items[2]), kam._parse(node.items[3])))
            continue
        steps.append(_step_of(R, node, len(steps)))
    return Derivation(steps, decls)


def derivation_to_text(d: Derivation) -> str:
    lines = []
    for did, f, t in d.declarations:
        lines.append(f"(declare {did} {to_sexp(f)} {kam.to_sexp(t)})")
    for st in d.steps:
        if st.rule == "axiom":
            lines.append(f"(axiom {st.args[0]})")
            continue
        prem = "(" + " ".join(map(str, st.premises)) + ")"
        parts = [f"rule {st.rule}", prem]
        r, a = st.rule, st.args
        if r in (1, 3):
            parts += [a[0], to_sexp(a[1])]
        elif r == 5:
            parts.append(a[0])
        elif r == 6:
            parts += [a[0], str(a[1])]
        elif r == 7:
            parts.append(term_sexp(a[0]))
        elif r == 8:
            parts += ["(" + " ".join(a[0]) + ")", to_sexp(a[1])]
        lines.append("(" + " ".join(parts) + ")")
    return "\n".join(lines) + "\n"


def check_script(text: str, registry: Optional[RealizerRegistry] = None) -> TypedConclusion:
    return check_derivation(parse_derivation(text), registry)


__all__ = [
    "SOFormula", "PredApp", "Imp", "ForallInd", "ForallPred", "imps",
    "bot", "neg", "conj", "disj", "exists", "exists2", "eq", "int_pred",
    "fv_ind", "fv_pred", "is_closed", "subst_ind", "subst_pred", "alpha_eq", "alpha_key",
    "relativize", "has_first_order_forall", "prenex_statement",
    "to_sexp", "pretty", "parse_formula", "parse_so_term",
    "AxiomRealizer", "RealizerRegistry", "builtin_realizers", "register_axiom_realizer", "stored",
    "Step", "Derivation", "Judgment", "TypedConclusion", "check_derivation", "parse_derivation",
    "derivation_to_text", "check_script",
    "SOSyntaxError", "DerivationError", "DuplicateAxiom", "AxiomFalse",
]
