"""Command-line front end.

Exit status: 0 on success, 1 on a domain error (bad proof, failed check,
budget exhausted), 2 on a usage error.  Errors are printed as one line
``error: <kind>: <message>`` on stderr, or as a JSON object with ``--json``.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional, Sequence

from . import bounds, epsilon_core, extract, kam, ordinals, sol2, subst_engine
from ._sexp import SexpSyntaxError
from .budget import Budget, BudgetExceeded, Budgeted

DEFAULT_BUDGET = 10**6


class UsageError(Exception):
    pass


class DomainError(Exception):
    def __init__(self, kind: str, message: str, data: Optional[dict] = None):
        super().__init__(message)
        self.kind = kind
        self.data = data or {}


# --------------------------------------------------------------------------
# helpers

def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise DomainError("io", f"cannot read {path}: {exc.strerror}") from None


def _text_or_file(arg: str) -> str:
    """An argument that is either inline S-expression text or a path."""
    if arg.lstrip().startswith("(") or not os.path.exists(arg):
        return arg
    return _read(arg)


def _emit(args, obj: dict, text: str, out) -> None:
    if getattr(args, "json", False):
        out.write(json.dumps(obj, sort_keys=True) + "\n")
    else:
        out.write(text + "\n")


def _write_file(path: str, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise DomainError("io", f"cannot write {path}: {exc.strerror}") from None


def _nat(s: str) -> int:
    try:
        v = int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a natural number, got '{s}'") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a natural number, got '{s}'")
    return v


# --------------------------------------------------------------------------
# check / solve

def _proof(path: str) -> list:
    return epsilon_core.parse_proof(_read(path))


def _bindings(pairs: Sequence[str], p: list) -> list:
    """``--bind f=4`` turns the proof's function variable f into the constant 4."""
    arities = {}
    for st in p:
        for n in epsilon_core.walk(st.formula):
            if isinstance(n, epsilon_core.FnApp):
                arities.setdefault(n.symbol, len(n.args))
    out = []
    for b in pairs:
        name, sep, val = b.partition("=")
        if not sep or not val.isdigit():
            raise UsageError(f"--bind takes NAME=NATURAL, got '{b}'")
        v = int(val)
        out.append(subst_engine.Opponent(name, arities.get(name, 0), lambda *_a, _v=v: _v))
    return out


def cmd_check(args, out) -> int:
    p = _proof(args.proof)
    res = epsilon_core.check_proof(p)
    if res is True:
        _emit(args, {"ok": True, "steps": len(p)}, f"ok: {len(p)} steps", out)
        return 0
    errs = [{"step": e.index, "reason": e.reason} for e in res]
    raise DomainError("proof", "; ".join(str(e) for e in res), {"errors": errs})


def cmd_solve(args, out) -> int:
    p = _proof(args.proof)
    opponents = _bindings(args.bind or [], p)
    try:
        if opponents:
            res = subst_engine.nci_extract(p, opponents, budget=args.budget).solve
        else:
            res = subst_engine.solve(p, budget=args.budget)
    except subst_engine.SubstBudgetExceeded as exc:
        if args.trace:
            _write_file(args.trace, exc.partial.to_jsonl() if exc.partial is not None else "")
        raise DomainError("budget", str(exc), {"work": exc.work_done}) from None
    except epsilon_core.ProofError as exc:
        errs = [{"step": e.index, "reason": e.reason} for e in exc.errors]
        raise DomainError("proof", str(exc), {"errors": errs}) from None
    if args.trace:
        _write_file(args.trace, res.trace.to_jsonl())
    ws = [(epsilon_core.pretty(e), v) for e, v in res.witnesses.items()]
    obj = {"witnesses": [{"term": t, "value": v} for t, v in ws],
           "states": len(res.trace.records)}
    lines = [f"{t} ↦ {v}" for t, v in ws] or ["(no epsilon terms in the conclusion)"]
    _emit(args, obj, "\n".join(lines), out)
    return 0


# --------------------------------------------------------------------------
# bound

_BOUNDS = {
    # name: (argument names, function of (args, budget))
    "phi": (("m", "a"), lambda a, b: bounds.phi(a[0], a[1], b)),
    "omega": (("m", "n"), lambda a, b: bounds.omega_fn(a[0], a[1], b)),
    "psi": (("m", "n", "e"), lambda a, b: bounds.psi(a[0], a[1], a[2], b)),
    "rho": (("n", "e"), lambda a, b: bounds.rho(a[0], a[1], b)),
    "lambda": (("a", "p"), lambda a, b: bounds.lambda_fn(a[0], a[1], b)),
    "kappa": (("c", "p", "n", "a"), lambda a, b: bounds.kappa_fn(a[0], a[1], a[2], a[3], b)),
    "tau": (("c", "p", "n", "a"), lambda a, b: bounds.tau_fn(a[0], a[1], a[2], a[3], b)),
    "eta": (("a", "p"), lambda a, b: ordinals.eta(a[0], a[1])),
    "born": (("m", "e", "g"), lambda a, b: bounds.born(bounds.BoundParams(*a), b)),
    "phi-prime": (("a", "m"), lambda a, b: bounds.phi_prime(bounds.OracleSet(), a[0], a[1], b)),
    "omega-prime": (("m", "n"), lambda a, b: bounds.omega_prime(bounds.OracleSet(), a[0], a[1], b)),
    "psi-prime": (("m", "n", "e"), lambda a, b: bounds.psi_prime(bounds.OracleSet(), *a, b)),
    "born-prime": (("m", "e", "g"), lambda a, b: bounds.born_prime(bounds.OracleSet(), bounds.BoundParams(*a), b)),
}


def cmd_bound(args, out) -> int:
    if args.name not in _BOUNDS:
        raise UsageError(f"unknown bound '{args.name}' (known: {', '.join(sorted(_BOUNDS))})")
    names, fn = _BOUNDS[args.name]
    if len(args.args) != len(names):
        raise UsageError(f"{args.name} takes {len(names)} argument(s): {' '.join(names)}")
    b = Budget(args.budget)
    try:
        v = fn(args.args, b)
        if isinstance(v, Budgeted):
            v = v.unwrap()
    except BudgetExceeded as exc:
        raise DomainError("budget", str(exc), {"work": exc.work_done}) from None
    except (ValueError, ordinals.InvalidCode) as exc:
        raise DomainError("bound", str(exc)) from None
    _emit(args, {"name": args.name, "args": args.args, "value": str(v)}, str(v), out)
    return 0


# --------------------------------------------------------------------------
# ordinal

_CMP = {-1: "LT", 0: "EQ", 1: "GT"}


def cmd_ordinal(args, out) -> int:
    m = args.level
    try:
        if args.op == "encode":
            if m == 1:
                if len(args.values) != 2:
                    raise UsageError("level 1 encodes 'a b' for w*a+b")
                code = ordinals.encode(ordinals.OrdinalM.one(*args.values)).code
            else:
                code = ordinals.code_from_exponents(args.values, m)
            _emit(args, {"level": m, "code": str(code)}, str(code), out)
        elif args.op == "decode":
            if len(args.values) != 1:
                raise UsageError("decode takes one code")
            o = ordinals.decode(args.values[0], m)
            exps = list(ordinals.exponents(args.values[0], m)) if m > 1 else list(o.payload)
            _emit(args, {"level": m, "ordinal": str(o), "parts": exps}, str(o), out)
        else:
            if len(args.values) != 2:
                raise UsageError("cmp takes two codes")
            r = _CMP[ordinals.cmp_codes(args.values[0], args.values[1], m)]
            _emit(args, {"level": m, "result": r}, r, out)
    except (ordinals.InvalidCode, ordinals.LevelMismatch) as exc:
        raise DomainError("ordinal", str(exc)) from None
    return 0


# --------------------------------------------------------------------------
# kam

def cmd_kam(args, out) -> int:
    term = kam.parse_lterm(_text_or_file(args.term))
    stack = kam.parse_stack(_text_or_file(args.stack) if args.stack else "", args.bottom)
    res = kam.run(kam.Process(term, stack), args.budget, trace=bool(args.trace))
    if args.trace:
        _write_file(args.trace, kam.trace_jsonl(res.trace))
    p = res.process
    obj = {"outcome": "BudgetExceeded" if res.budget_exceeded else "Stuck",
           "steps": res.steps, "head": kam.to_sexp(p.head),
           "stack": [kam.to_sexp(t) for t in p.stack.items], "bottom": p.stack.bottom,
           "detail": res.detail}
    if res.budget_exceeded:
        raise DomainError("budget", f"no final state within {res.steps} steps", obj)
    text = f"final after {res.steps} steps: {kam.pretty(p.head)} * " + \
        ".".join([kam.pretty(t) for t in p.stack.items] + [p.stack.bottom])
    if res.detail:
        text += f"\n({res.detail})"
    _emit(args, obj, text, out)
    return 0


# --------------------------------------------------------------------------
# type

def cmd_type(args, out) -> int:
    functions = {}
    if args.matrix:
        m = _matrix(args.matrix)
        functions = {m.symbol: m.fn}
    c = sol2.check_script(_read(args.derivation), sol2.RealizerRegistry(functions=functions))
    obj = {"context": [[n, sol2.to_sexp(f)] for n, f in c.context],
           "term": kam.to_sexp(c.term), "formula": sol2.to_sexp(c.formula)}
    _emit(args, obj, str(c), out)
    return 0


# --------------------------------------------------------------------------
# extract / play

def _matrix(name: str) -> extract.Matrix:
    try:
        return extract.get_matrix(name)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None


def _theta(path: str, m: extract.Matrix):
    """A derivation script is checked; anything else is read as a bare term."""
    text = _read(path)
    if path.endswith(".drv"):
        return sol2.check_script(text, sol2.RealizerRegistry(functions={m.symbol: m.fn}))
    return kam.parse_lterm(text)


def _opponent(args, k: int, out):
    if args.opponent_script:
        return extract.Interactive.scripted(_read(args.opponent_script), k)
    if args.interactive:
        return extract.Interactive(k, sys.stdin, out)
    if args.strategy:
        terms = [kam.parse_lterm(_text_or_file(s)) for s in args.strategy]
        return extract.TermStrategy(terms)
    raise UsageError("choose an opponent: --opponent-script, --interactive or --strategy")


def _report(args, res: extract.ExtractionResult, out) -> int:
    obj = {"outcome": res.outcome, "witnesses": list(res.witnesses), "steps": res.steps,
           "transcript": res.transcript.to_json()}
    if args.transcript:
        _write_file(args.transcript, res.transcript.dumps() + "\n")
    if not res.ok:
        raise DomainError("budget", f"no witness within {res.steps} machine steps", obj)
    _emit(args, obj, " ".join(str(w) for w in res.witnesses), out)
    return 0


def cmd_extract(args, out) -> int:
    m = _matrix(args.matrix)
    theta = _theta(args.theta, m)
    if args.mode == "pi2":
        if args.n is None:
            raise UsageError("pi2 needs --n")
        res = extract.extract_pi2(theta, m, args.n, args.budget)
    elif args.mode == "sigma2" and args.strategy:
        if len(args.strategy) != 1:
            raise UsageError("sigma2 takes one strategy term")
        t = kam.parse_lterm(_text_or_file(args.strategy[0]))
        res = extract.extract_sigma2_strategy(theta, m, t, budget=args.budget)
    else:
        if args.mode == "sigma2" and m.nx != 1:
            raise UsageError(f"matrix {m.name} has {m.nx} alternations, sigma2 needs 1")
        res = extract.extract_prenex(theta, m, _opponent(args, m.nx, out), args.budget)
    if args.verify and res.ok:
        pol = "forall" if args.mode == "pi2" else "exists"
        extract.verify_transcript(res.transcript, extract.PrenexStatement(m.nx, m, pol))
    return _report(args, res, out)


def cmd_play(args, out) -> int:
    args.mode = "prenex"
    args.interactive = not args.opponent_script
    args.strategy = None
    args.n = None
    return cmd_extract(args, out)


# --------------------------------------------------------------------------
# parser

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    P = _Parser(prog="witnessbench", description="Witness extraction from classical arithmetic proofs.")
    sub = P.add_subparsers(dest="command", parser_class=_Parser)

    def add(name, help_, fn):
        s = sub.add_parser(name, help=help_)
        s.set_defaults(fn=fn)
        s.add_argument("--json", action="store_true", help="machine-readable output")
        return s

    s = add("check", "check an epsilon proof", cmd_check)
    s.add_argument("proof")

    s = add("solve", "run the substitution method on a proof", cmd_solve)
    s.add_argument("proof")
    s.add_argument("--budget", type=_nat, default=DEFAULT_BUDGET)
    s.add_argument("--trace", metavar="OUT.jsonl")
    s.add_argument("--bind", action="append", metavar="F=N",
                   help="bind function variable F to the constant N (repeatable)")

    s = add("bound", "evaluate a bound function", cmd_bound)
    s.add_argument("name", help=", ".join(sorted(_BOUNDS)))
    s.add_argument("args", nargs="*", type=_nat)
    s.add_argument("--budget", type=_nat, default=DEFAULT_BUDGET)

    s = add("ordinal", "encode, decode or compare ordinal codes", cmd_ordinal)
    s.add_argument("op", choices=["encode", "decode", "cmp"])
    s.add_argument("values", nargs="*", type=_nat)
    s.add_argument("--level", type=int, required=True, choices=range(1, 64), metavar="M")

    s = add("kam", "run the abstract machine", None)
    s.add_argument("action", choices=["run"])
    s.add_argument("term", help="term file or inline S-expression")
    s.add_argument("--stack", default="", help="stack terms, top first (file or inline)")
    s.add_argument("--bottom", default="pi0", help="name of the stack bottom")
    s.add_argument("--budget", type=_nat, default=DEFAULT_BUDGET)
    s.add_argument("--trace", metavar="OUT.jsonl")
    s.set_defaults(fn=cmd_kam)

    s = add("type", "type-check a derivation script", cmd_type)
    s.add_argument("derivation")
    s.add_argument("--matrix", help="registered matrix whose symbol the axioms may use")

    def extract_flags(s):
        s.add_argument("--theta", required=True, help="derivation script (.drv) or closed term")
        s.add_argument("--matrix", required=True, help=", ".join(sorted(extract.MATRICES)))
        s.add_argument("--budget", type=_nat, default=DEFAULT_BUDGET)
        s.add_argument("--opponent-script", metavar="FILE", help="answers, one natural per line")
        s.add_argument("--transcript", metavar="OUT.json", help="write the game transcript")
        s.add_argument("--no-verify", dest="verify", action="store_false",
                       help="skip the transcript legality check")

    s = add("extract", "extract witnesses from a proof term", cmd_extract)
    s.add_argument("mode", choices=["pi2", "sigma2", "prenex"])
    extract_flags(s)
    s.add_argument("--n", type=_nat, help="instance of the universal variable (pi2)")
    s.add_argument("--strategy", action="append", help="strategy term (repeat per position)")
    s.add_argument("--interactive", action="store_true", help="answer for the universal player")

    s = add("play", "play the universal player against a proof term", cmd_play)
    extract_flags(s)
    return P


_DOMAIN = (
    SexpSyntaxError, epsilon_core.ArityError, epsilon_core.UnknownUserAxiom, epsilon_core.NotAnEpsTerm,
    epsilon_core.ProofError, subst_engine.UnregisteredFunction, subst_engine.UntrueAxiomInstance,
    subst_engine.NoFalseCritical, subst_engine.MatrixFalse,
    sol2.DerivationError, sol2.DuplicateAxiom, sol2.AxiomFalse,
    extract.TypeMismatch, extract.RepresentationViolation, extract.InteractiveAbort, extract.Violation,
    extract.DepthMismatch, kam.SubEvalBudget, BudgetExceeded,
    # anything else a malformed input can provoke in the engines
    ValueError, TypeError, KeyError, RuntimeError, ArithmeticError,
)


def _fold_numbers(P, args, extra: list) -> None:
    """``ordinal cmp --level 1 0 1``: argparse fills the numeric positional
    list before it sees the option, leaving the numbers over."""
    field = {"ordinal": "values", "bound": "args"}.get(args.command)
    if field is None or getattr(args, field) or not all(x.isdigit() for x in extra):
        P.error(f"unrecognized arguments: {' '.join(extra)}")
    setattr(args, field, [int(x) for x in extra])


def _fail(args, kind: str, message: str, data: dict, err) -> None:
    if getattr(args, "json", False):
        err.write(json.dumps({"error": kind, "message": message, **data}, sort_keys=True) + "\n")
    else:
        err.write(f"error: {kind}: {message}\n")


def main(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = out if out is not None else sys.stdout
    err = err if err is not None else sys.stderr
    P = build_parser()
    args = None
    try:
        args, extra = P.parse_known_args(argv)
        if extra:
            _fold_numbers(P, args, extra)
        if not getattr(args, "fn", None):
            P.print_usage(err)
            return 2
        return args.fn(args, out)
    except UsageError as exc:
        err.write(f"usage error: {exc}\n")
        return 2
    except DomainError as exc:
        _fail(args, exc.kind, str(exc), exc.data, err)
        return 1
    except _DOMAIN as exc:
        _fail(args, type(exc).__name__, str(exc), {}, err)
        return 1
    except KeyboardInterrupt:
        err.write("interrupted\n")
        return 1
    except RecursionError:
        _fail(args, "RecursionError", "input nested too deeply", {}, err)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
