"""Running proof terms as programs that find witnesses.

Every procedure here builds a starting process out of a proof term, lets the
machine run, and stops it with a watcher the moment it reaches a state of the
shape the extraction theorems promise: the witness combinator facing a good
answer, a numeral in head position, or a list of numerals.  Answers are always
re-checked against the host matrix before being reported.
"""
from __future__ import annotations

import io
import itertools
import json
import sys
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, TextIO, Union

from . import kam, sol2
from .kam import (
    App, InstructionEnv, Kappa, Lam, LTerm, LVar, PairList, Process, Stack, Zeta,
    app, church, lam, readback, storage_T, witness_t,
)

DEFAULT_STEPS = 10**6

_bottoms = itertools.count()


class TypeMismatch(TypeError):
    pass


class RepresentationViolation(ValueError):
    def __init__(self, position: int, args: tuple, got: int, expected: int):
        super().__init__(f"strategy term for position {position} gives {got} on {args}, expected {expected}")
        self.position, self.args, self.got, self.expected = position, args, got, expected


class InteractiveAbort(RuntimeError):
    pass


class Violation(ValueError):
    def __init__(self, move_index: int, reason: str):
        super().__init__(f"move {move_index}: {reason}")
        self.move_index = move_index
        self.reason = reason


# --------------------------------------------------------------------------
# statements

@dataclass(frozen=True)
class Matrix:
    """A total host predicate; ``fn(*xs, *ys) == 0`` means the matrix holds."""

    name: str
    nx: int
    ny: int
    fn: Callable[..., int]
    symbol: str = "phi"
    doc: str = ""

    def value(self, xs: Sequence[int], ys: Sequence[int]) -> int:
        if len(xs) != self.nx or len(ys) != self.ny:
            raise ValueError(f"matrix {self.name} takes {self.nx}+{self.ny} arguments")
        return int(self.fn(*xs, *ys))

    def holds(self, xs: Sequence[int], ys: Sequence[int]) -> bool:
        return self.value(xs, ys) == 0


@dataclass(frozen=True)
class PrenexStatement:
    k: int
    matrix: Matrix
    polarity: str = "exists"        # "forall" for the forall-exists form

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("alternation depth must be at least 1")
        if self.polarity not in ("exists", "forall"):
            raise ValueError("polarity is 'exists' or 'forall'")

    def formula(self) -> sol2.SOFormula:
        return sol2.prenex_statement(self.k, self.matrix.symbol, self.polarity)

    def relativized(self) -> sol2.SOFormula:
        return sol2.relativize(self.formula())


def _b(c: bool) -> int:
    return 0 if c else 1


MATRICES: dict[str, Matrix] = {
    "eq": Matrix("eq", 1, 1, lambda x, y: _b(x == y), "f", "f(x,y)=0 iff x=y"),
    "zero": Matrix("zero", 1, 1, lambda x, y: x, "phi", "phi(x,y)=x"),
    "leq": Matrix("leq", 1, 1, lambda x, y: _b(y <= x), "phi", "phi(x,y)=0 iff y<=x"),
    "copy2": Matrix("copy2", 2, 2, lambda x1, x2, y1, y2: _b(x1 == 0 and x2 == y1), "phi",
                    "phi(x1,x2,y1,y2)=0 iff x1=0 and x2=y1"),
}


def get_matrix(name: str) -> Matrix:
    try:
        return MATRICES[name]
    except KeyError:
        raise KeyError(f"unknown matrix '{name}' (known: {', '.join(sorted(MATRICES))})") from None


def _theta(theta, expected: sol2.SOFormula) -> LTerm:
    """Accept a checked conclusion (verified against ``expected``) or a bare term."""
    if isinstance(theta, sol2.TypedConclusion):
        if theta.context:
            raise TypeMismatch("proof term has open hypotheses: "
                               + ", ".join(n for n, _ in theta.context))
        if not sol2.alpha_eq(theta.formula, expected):
            raise TypeMismatch(f"proof term has type {sol2.pretty(theta.formula)}, "
                               f"expected {sol2.pretty(expected)}")
        return theta.term
    if isinstance(theta, LTerm):
        if theta.fv():
            raise TypeMismatch(f"proof term has free variables {sorted(theta.fv())}")
        return theta
    raise TypeError("theta must be a TypedConclusion or a closed LTerm")


# --------------------------------------------------------------------------
# opponents

class Opponent:
    """Answers the universal player's moves: p_{j+1} from (n1..n_{j+1})."""

    k: int = 1

    def answer(self, position: int, history: tuple, n: int) -> int:
        raise NotImplementedError


@dataclass
class HostFunctions(Opponent):
    functions: Sequence[Callable[..., int]]

    @property
    def k(self):
        return len(self.functions)

    def answer(self, position, history, n):
        args = tuple(h[0] for h in history) + (n,)
        return int(self.functions[position](*args))


@dataclass
class TermStrategy(Opponent):
    """Lambda terms t_i representing gamma_i; ``expected`` (host functions)
    enables the representation check at every zeta firing."""

    terms: Sequence[LTerm]
    expected: Optional[Sequence[Callable[..., int]]] = None
    sub_budget: int = 100_000

    @property
    def k(self):
        return len(self.terms)

    def evaluate(self, position: int, args: tuple) -> int:
        v = readback(app(self.terms[position], *[church(a) for a in args]), self.sub_budget)
        if v is None:
            raise kam.SubEvalBudget(f"strategy term {position} on {args} is not a numeral")
        return v

    def check(self, position: int, args: tuple, got: int) -> None:
        if self.expected is not None:
            want = int(self.expected[position](*args))
            if want != got:
                raise RepresentationViolation(position, args, got, want)

    def spot_check(self, samples: int = 6) -> None:
        if self.expected is None:
            return
        for pos in range(self.k):
            for args in itertools.product(range(samples), repeat=pos + 1):
                self.check(pos, args, self.evaluate(pos, args))

    def answer(self, position, history, n):
        args = tuple(h[0] for h in history) + (n,)
        p = self.evaluate(position, args)
        self.check(position, args, p)
        return p


def _isatty(stream) -> bool:
    try:
        return stream.isatty()
    except (AttributeError, ValueError):
        return False


class Interactive(Opponent):
    """Line-oriented prompt: each kappa firing prints the reached position
    and reads one natural.  ``q``, ``quit`` or end of input aborts."""

    def __init__(self, k: int = 1, stdin: Optional[TextIO] = None, stdout: Optional[TextIO] = None,
                 echo: bool = True):
        self.k = k
        self.stdin = stdin if stdin is not None else sys.stdin
        self.stdout = stdout if stdout is not None else sys.stdout
        self.echo = echo

    @classmethod
    def scripted(cls, answers: Union[str, Sequence[int]], k: int = 1, stdout: Optional[TextIO] = None):
        text = answers if isinstance(answers, str) else "".join(f"{a}\n" for a in answers)
        return cls(k, io.StringIO(text), stdout if stdout is not None else io.StringIO())

    def answer(self, position, history, n):
        pos = ", ".join(f"{a} {b}" for a, b in history)
        prompt = f"position [{pos}] x{position + 1} = {n}; y{position + 1}? "
        while True:
            self.stdout.write(prompt)
            self.stdout.flush()
            line = self.stdin.readline()
            if not line:
                raise InteractiveAbort("end of input")
            line = line.strip()
            if self.echo and not _isatty(self.stdin):
                self.stdout.write(line + "\n")
            if line in ("q", "quit"):
                raise InteractiveAbort("quit")
            if line.isdigit():
                return int(line)
            self.stdout.write("a natural number, please\n")


# --------------------------------------------------------------------------
# transcripts

@dataclass(frozen=True)
class Move:
    player: str          # "Exists" or "Forall"
    pos: int
    value: int
    history: tuple = ()

    def to_json(self) -> dict:
        return {"player": self.player, "pos": self.pos, "value": self.value,
                "history": [list(h) for h in self.history]}


@dataclass
class GameTranscript:
    moves: list = field(default_factory=list)
    final: list = field(default_factory=list)
    steps: int = 0

    def to_json(self) -> dict:
        return {"moves": [m.to_json() for m in self.moves],
                "final": [list(p) for p in self.final], "steps": self.steps}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def from_json(cls, d: dict) -> "GameTranscript":
        moves = [Move(m["player"], m["pos"], m["value"], tuple(tuple(h) for h in m.get("history", ())))
                 for m in d["moves"]]
        return cls(moves, [tuple(p) for p in d["final"]], d.get("steps", 0))


@dataclass
class ExtractionResult:
    witnesses: tuple
    transcript: GameTranscript
    steps: int
    outcome: str                    # "Success" or "BudgetExceeded"
    process: Optional[Process] = None
    events: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.outcome == "Success"


def verify_transcript(tr: GameTranscript, statement: PrenexStatement) -> bool:
    """Alternation, restart legality and the matrix at the final position."""
    m = statement.matrix
    if statement.polarity == "forall":
        if not tr.moves or tr.moves[0].player != "Forall" or tr.moves[0].pos != 0:
            raise Violation(0, "the universal player opens a forall-exists game")
        n = tr.moves[0].value
        proposed = set()
        for i, mv in enumerate(tr.moves[1:], 1):
            if mv.player != "Exists" or mv.pos != 0:
                raise Violation(i, "after the opening only existential proposals are played")
            proposed.add(mv.value)
        if len(tr.final) != 1:
            raise Violation(len(tr.moves), "final position must be one pair")
        fn, fp = tr.final[0]
        if fn != n or fp not in proposed:
            raise Violation(len(tr.moves), "final position was never reached")
        if not m.holds((fn,), (fp,)):
            raise Violation(len(tr.moves), "final position fails the matrix")
        return True
    reached = {()}
    k = statement.k
    for i, mv in enumerate(tr.moves):
        want = "Exists" if i % 2 == 0 else "Forall"
        if mv.player != want:
            raise Violation(i, f"expected a move by {want}")
        if mv.pos != len(mv.history) or mv.pos >= k:
            raise Violation(i, f"position {mv.pos} does not match history of length {len(mv.history)}")
        if want == "Exists":
            if mv.history not in reached:
                raise Violation(i, "restart from a position never reached")
        else:
            prev = tr.moves[i - 1]
            if prev.pos != mv.pos or prev.history != mv.history:
                raise Violation(i, "answer does not follow the proposal it answers")
            reached.add(mv.history + ((prev.value, mv.value),))
    if len(tr.moves) % 2:
        raise Violation(len(tr.moves) - 1, "proposal left unanswered")
    final = tuple(tuple(p) for p in tr.final)
    if len(final) != k:
        raise Violation(len(tr.moves), f"final position has {len(final)} pairs, expected {k}")
    if final not in reached:
        raise Violation(len(tr.moves), "final position was never reached")
    if not m.holds([a for a, _ in final], [b for _, b in final]):
        raise Violation(len(tr.moves), "final position fails the matrix")
    return True


def kappa_order_violations(events: Sequence[tuple]) -> list[int]:
    """Indices of kappa firings whose position was not reached by earlier firings."""
    reached = {()}
    bad = []
    for i, ev in enumerate(events):
        if ev[0] != "kappa":
            continue
        _, j, hist, n, p = ev
        if len(hist) != j or hist not in reached:
            bad.append(i)
        reached.add(hist + ((n, p),))
    return bad


# --------------------------------------------------------------------------
# helpers

def _fresh_bottom(tag: str) -> str:
    return f"pi0_{tag}{next(_bottoms)}"


def _numeral_head(t: LTerm, budget: int = 2_000) -> Optional[int]:
    if not isinstance(t, Lam):
        return None
    n = kam._syntactic_church(t)
    if n is not None:
        return n
    return readback(t, budget)


def _run(p: Process, budget: int, watcher, env: InstructionEnv, trace: bool):
    return kam.run(p, budget, [watcher], env, trace=trace)


# --------------------------------------------------------------------------
# Pi_2

def extract_pi2(theta, matrix: Union[str, Matrix], n: int, budget: int = DEFAULT_STEPS,
                nu: Optional[LTerm] = None, trace: bool = False) -> ExtractionResult:
    """Find p with matrix(n, p) = 0 by running theta * nu . (T t) . pi0."""
    m = get_matrix(matrix) if isinstance(matrix, str) else matrix
    stmt = PrenexStatement(1, m, "forall")
    term = _theta(theta, stmt.relativized())
    t = witness_t()
    nu = church(n) if nu is None else nu
    tr = GameTranscript([Move("Forall", 0, n)])
    seen: dict = {}

    def watcher(p: Process) -> bool:
        if p.head != t or p.stack.is_empty:
            return False
        top = p.stack.top
        if top not in seen:
            seen[top] = readback(top, 10_000)
        v = seen[top]
        if v is None:
            return False
        tr.moves.append(Move("Exists", 0, v))
        return m.holds((n,), (v,))

    proc = Process(term, Stack.of([nu, App(storage_T(), t)], _fresh_bottom("pi2_")))
    out = _run(proc, budget, watcher, InstructionEnv(), trace)
    tr.steps = out.steps
    if out.budget_exceeded:
        return ExtractionResult((), tr, out.steps, "BudgetExceeded", out.process)
    if out.stuck:
        raise RuntimeError(f"machine stuck before a witness: {out.detail}")
    p_val = tr.moves[-1].value
    if not m.holds((n,), (p_val,)):
        raise AssertionError("watcher accepted a witness that fails the matrix")
    tr.final = [(n, p_val)]
    return ExtractionResult((p_val,), tr, out.steps, "Success", out.process)


# --------------------------------------------------------------------------
# Sigma_2 with a strategy term

def f_term(f: LTerm) -> LTerm:
    """F[f] = (T)\\x\\y(((zeta)y)(f)x)x"""
    body = app(Zeta(1), LVar("y"), App(f, LVar("x")), LVar("x"))
    return App(storage_T(), lam("x", "y", body))


def _as_strategy(strategy, gamma) -> TermStrategy:
    if isinstance(strategy, TermStrategy):
        return strategy
    return TermStrategy([strategy], [gamma] if gamma is not None else None)


def extract_sigma2_strategy(theta, matrix: Union[str, Matrix], strategy, gamma: Optional[Callable] = None,
                            budget: int = DEFAULT_STEPS, trace: bool = False,
                            samples: int = 6) -> ExtractionResult:
    """Run (\\f.theta F[f]) * t . pi0 until a numeral n with matrix(n, gamma(n)) = 0 is in head."""
    m = get_matrix(matrix) if isinstance(matrix, str) else matrix
    stmt = PrenexStatement(1, m, "exists")
    term = _theta(theta, stmt.relativized())
    strat = _as_strategy(strategy, gamma)
    strat.spot_check(samples)
    t = strat.terms[0]
    tr = GameTranscript()
    gam: dict = {}

    def g(n):
        if n not in gam:
            gam[n] = strat.evaluate(0, (n,))
        return gam[n]

    def on_zeta(k, nums, p):
        (n,) = nums
        strat.check(0, (n,), p)
        gam[n] = p
        tr.moves.append(Move("Exists", 0, n))
        tr.moves.append(Move("Forall", 0, p))

    found: list = []

    def watcher(p: Process) -> bool:
        n = _numeral_head(p.head)
        if n is None:
            return False
        if m.holds((n,), (g(n),)):
            found.append(n)
            return True
        return False

    prog = Lam("f", App(term, f_term(LVar("f"))))
    proc = Process(prog, Stack.of([t], _fresh_bottom("sigma2_")))
    env = InstructionEnv(on_zeta=on_zeta)
    out = _run(proc, budget, watcher, env, trace)
    tr.steps = out.steps
    if out.budget_exceeded:
        return ExtractionResult((), tr, out.steps, "BudgetExceeded", out.process, env.events)
    if out.stuck:
        raise RuntimeError(f"machine stuck before a witness: {out.detail}")
    n = found[-1]
    p = g(n)
    if (n, p) not in [(a.value, b.value) for a, b in zip(tr.moves[::2], tr.moves[1::2])]:
        tr.moves += [Move("Exists", 0, n), Move("Forall", 0, p)]
    tr.final = [(n, p)]
    return ExtractionResult((n,), tr, out.steps, "Success", out.process, env.events)


# --------------------------------------------------------------------------
# general prenex

def h_terms(k: int) -> LTerm:
    """H_0 of the family H_k = [x1..xk], H_j = (T)\\x_{j+1}\\y_{j+1}.(((zeta_{j+1})y_{j+1})(f_{j+1})x1..x_{j+1})H_{j+1}."""
    xs = [LVar(f"x{i}") for i in range(1, k + 1)]
    h: LTerm = PairList(xs)
    for j in reversed(range(k)):
        call = app(LVar(f"f{j + 1}"), *xs[: j + 1])
        body = app(Zeta(j + 1), LVar(f"y{j + 1}"), call, h)
        h = App(storage_T(), lam(f"x{j + 1}", f"y{j + 1}", body))
    return h


def extract_prenex(theta, matrix: Union[str, Matrix], opponent: Opponent, budget: int = DEFAULT_STEPS,
                   trace: bool = False, via: Optional[str] = None) -> ExtractionResult:
    """Witnesses (n1..nk, p1..pk) for the k-alternation statement.

    A :class:`TermStrategy` runs through the zeta construction unless
    ``via='kappa'``; every other opponent is consulted by kappa instructions."""
    m = get_matrix(matrix) if isinstance(matrix, str) else matrix
    k = m.nx
    if m.ny != k:
        raise ValueError("prenex matrices take as many x's as y's")
    stmt = PrenexStatement(k, m, "exists")
    term = _theta(theta, stmt.relativized())
    if opponent.k != k:
        raise ValueError(f"opponent plays {opponent.k} move(s), the statement has {k}")
    mode = via or ("zeta" if isinstance(opponent, TermStrategy) else "kappa")
    if mode == "zeta":
        if not isinstance(opponent, TermStrategy):
            raise TypeError("the zeta construction needs strategy terms")
        return _prenex_zeta(term, m, k, opponent, budget, trace)
    return _prenex_kappa(term, m, k, opponent, budget, trace)


def _pairs_of(values: Sequence[LTerm]) -> Optional[list]:
    out = []
    for v in values:
        n = readback(v, 10_000)
        if n is None:
            return None
        out.append(n)
    return out


def _prenex_kappa(term, m: Matrix, k: int, opponent: Opponent, budget: int, trace: bool):
    tr = GameTranscript()

    def on_kappa(j, hist, n, p):
        tr.moves.append(Move("Exists", j, n, hist))
        tr.moves.append(Move("Forall", j, p, hist))

    final: list = []

    def watcher(p: Process) -> bool:
        if not isinstance(p.head, PairList):
            return False
        vals = _pairs_of(p.head.values)
        if vals is None or len(vals) != 2 * k:
            return False
        ns, ps = vals[0::2], vals[1::2]
        if m.holds(ns, ps):
            final[:] = list(zip(ns, ps))
            return True
        return False

    env = InstructionEnv(opponent=opponent.answer, on_kappa=on_kappa)
    proc = Process(term, Stack.of([App(storage_T(), Kappa(0, (), k))], _fresh_bottom("kappa_")))
    out = _run(proc, budget, watcher, env, trace)
    tr.steps = out.steps
    if out.budget_exceeded:
        return ExtractionResult((), tr, out.steps, "BudgetExceeded", out.process, env.events)
    if out.stuck:
        raise RuntimeError(f"machine stuck before a witness: {out.detail}")
    tr.final = final
    ns, ps = [a for a, _ in final], [b for _, b in final]
    assert m.holds(ns, ps)
    return ExtractionResult(tuple(ns) + tuple(ps), tr, out.steps, "Success", out.process, env.events)


def _prenex_zeta(term, m: Matrix, k: int, strat: TermStrategy, budget: int, trace: bool):
    strat.spot_check(3 if k > 1 else 6)
    tr = GameTranscript()
    answers: dict = {}

    def hist_of(nums: tuple) -> tuple:
        return tuple((nums[i], answers[nums[: i + 1]]) for i in range(len(nums) - 1))

    def on_zeta(j, nums, p):
        strat.check(j - 1, nums, p)
        h = hist_of(nums)
        answers[nums] = p
        tr.moves.append(Move("Exists", j - 1, nums[-1], h))
        tr.moves.append(Move("Forall", j - 1, p, h))

    final: list = []

    def gamma(prefix: tuple) -> int:
        if prefix not in answers:
            answers[prefix] = strat.evaluate(len(prefix) - 1, prefix)
        return answers[prefix]

    def watcher(p: Process) -> bool:
        if not isinstance(p.head, PairList):
            return False
        ns = _pairs_of(p.head.values)
        if ns is None or len(ns) != k:
            return False
        ps = [gamma(tuple(ns[: i + 1])) for i in range(k)]
        if m.holds(ns, ps):
            final[:] = list(zip(ns, ps))
            return True
        return False

    fs = [f"f{i}" for i in range(1, k + 1)]
    prog = lam(*fs, App(term, h_terms(k)))
    proc = Process(prog, Stack.of(list(strat.terms), _fresh_bottom("zeta_")))
    env = InstructionEnv(on_zeta=on_zeta)
    out = _run(proc, budget, watcher, env, trace)
    tr.steps = out.steps
    if out.budget_exceeded:
        return ExtractionResult((), tr, out.steps, "BudgetExceeded", out.process, env.events)
    if out.stuck:
        raise RuntimeError(f"machine stuck before a witness: {out.detail}")
    tr.final = final
    ns, ps = [a for a, _ in final], [b for _, b in final]
    assert m.holds(ns, ps)
    return ExtractionResult(tuple(ns) + tuple(ps), tr, out.steps, "Success", out.process, env.events)


# --------------------------------------------------------------------------
# implication as a game

def pad_matrix(m: Matrix, nx: int, ny: int) -> Matrix:
    """Add quantifiers binding nothing: extra arguments are ignored."""
    if nx < m.nx or ny < m.ny:
        raise ValueError("padding can only add variables")

    def fn(*args):
        xs, ys = args[:nx], args[nx:]
        return m.fn(*xs[: m.nx], *ys[: m.ny])

    return Matrix(f"{m.name}+pad", nx, ny, fn, m.symbol, m.doc)


class DepthMismatch(ValueError):
    pass


def combine_implication(phi_a: Matrix, psi_b: Matrix, padding: bool = True) -> Matrix:
    """Selector matrix: y0 = 0 plays the negated premise's game (phi),
    y0 /= 0 plays the conclusion's (psi).  Arguments are (x0..xk, y0..yk)."""
    if (phi_a.nx, phi_a.ny) != (psi_b.nx, psi_b.ny):
        if not padding:
            raise DepthMismatch(f"{phi_a.name} and {psi_b.name} have different shapes")
        nx, ny = max(phi_a.nx, psi_b.nx), max(phi_a.ny, psi_b.ny)
        phi_a, psi_b = pad_matrix(phi_a, nx, ny), pad_matrix(psi_b, nx, ny)
    nx, ny = phi_a.nx, phi_a.ny

    def theta(*args):
        xs, y0, ys = args[:nx], args[nx], args[nx + 1:]
        if y0 == 0:
            return _b(phi_a.fn(*xs, *ys) == 0)
        return _b(psi_b.fn(*xs, *ys) == 0)

    return Matrix(f"({phi_a.name}=>{psi_b.name})", nx, ny + 1, theta, "theta")


# --------------------------------------------------------------------------
# no term realizes bottom

@dataclass
class ProbeReport:
    reached_c: bool
    reached_c_prime: bool
    outcome_c: str
    outcome_c_prime: str
    steps: int

    @property
    def contradiction(self) -> bool:
        return self.reached_c and self.reached_c_prime

    @property
    def verdict(self) -> str:
        if self.contradiction:
            return "Contradiction"
        if self.reached_c:
            return "c"
        if self.reached_c_prime:
            return "c'"
        return "neither"

    def explain(self) -> str:
        return ("a realizer of bottom would have to reach both c * rho and c' * rho from one "
                "start; reduction is deterministic, so at most one terminal constant state "
                f"is reachable (this run: {self.verdict})")


def double_bottom_probe(v: LTerm, budget: int = 10_000, stack: Sequence[LTerm] = (),
                        bottom: str = "rho") -> ProbeReport:
    """Run v * stack against the two observation sets {c * rho} and {c' * rho}."""
    if v.fv():
        raise ValueError("the probed term must be closed")
    c, c2 = kam.Inert("c"), kam.Inert("c'")
    start = Process(v, Stack.of(list(stack), bottom))

    def at(const):
        return lambda p: p.head == const and p.stack.is_empty and p.stack.bottom == bottom

    env = InstructionEnv(instructions=False)
    o1 = kam.run(start, budget, [at(c)], env)
    o2 = kam.run(start, budget, [at(c2)], env)

    def describe(o):
        if o.budget_exceeded:
            return "budget"
        return "reached" if o.reason == "watcher" else "stuck"

    return ProbeReport(o1.reason == "watcher", o2.reason == "watcher", describe(o1), describe(o2),
                       max(o1.steps, o2.steps))


__all__ = [
    "Matrix", "PrenexStatement", "MATRICES", "get_matrix",
    "Opponent", "HostFunctions", "TermStrategy", "Interactive",
    "Move", "GameTranscript", "ExtractionResult", "verify_transcript", "kappa_order_violations",
    "extract_pi2", "extract_sigma2_strategy", "extract_prenex", "f_term", "h_terms",
    "pad_matrix", "combine_implication", "double_bottom_probe", "ProbeReport",
    "TypeMismatch", "RepresentationViolation", "InteractiveAbort", "Violation", "DepthMismatch",
]
