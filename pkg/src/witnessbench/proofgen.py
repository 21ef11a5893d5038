"""Small generated proofs for exercising the substitution method.

Each proof stacks up to three epsilon terms, each later one mentioning the
earlier ones, and lists critical instances about them (mostly III.1, some
III.2/III.3) together with group II axioms and a closing modus ponens.
Everything is driven by a ``random.Random`` so a seed pins the corpus.
"""
from __future__ import annotations

import os
import random
from typing import Optional

from .epsilon_core import (
    Succ, Add, AxiomII, Critical, EFormula, Eps, Eq, ETerm, Imp, MP, Mul, Not, ProofStep, Var,
    axiom_ii, critical, numeral, substitute,
)

DEFAULT_SEED = 20240611


def corpus_seed() -> int:
    return int(os.environ.get("WITNESS_SEED", DEFAULT_SEED))


def _body(rng: random.Random, x: str, prev: list) -> tuple[EFormula, list]:
    """A random formula A(x) plus closed terms a for which A(a) is true
    whatever the epsilon terms evaluate to."""
    X = Var(x)
    c = numeral(rng.randint(0, 4))
    e = rng.choice(prev) if prev else numeral(rng.randint(0, 3))
    k = rng.randint(1, 6)
    m = numeral(rng.randint(1, 3))
    shapes = [
        lambda: (Eq(X, Add(e, c)), [Add(e, c)]),
        lambda: (Eq(Add(X, e), Add(e, numeral(k))), [numeral(k)]),
        lambda: (Eq(Add(e, X), Add(c, numeral(k))), [Add(c, numeral(k))] if e == numeral(0) else []),
        lambda: (Not(Eq(Mul(X, m), Mul(e, c))), [Succ(Mul(e, c))]),
        lambda: (Imp(Eq(e, numeral(0)), Eq(X, numeral(k))), [numeral(k)]),
        lambda: (Eq(Mul(X, numeral(2)), Add(e, numeral(k))), []),
    ]
    return rng.choice(shapes)()


def random_proof(rng: random.Random, max_eps: int = 3, max_witness: int = 10) -> list[ProofStep]:
    names = ["x", "y", "z"]
    terms: list[Eps] = []
    bodies = []
    for k in range(rng.randint(1, max_eps)):
        x = names[k]
        body, good = _body(rng, x, list(terms))
        terms.append(Eps(x, body))
        bodies.append((x, body, good))
    steps: list[ProofStep] = []
    for _ in range(rng.randint(3, 8)):
        k = rng.randrange(len(terms))
        x, body, good = bodies[k]
        a = rng.choice([numeral(rng.randint(0, max_witness))] + terms[:k] + good * 3)
        kind = rng.random()
        if kind < 0.7:
            j = Critical(1, x, body, (a,))
        elif kind < 0.85:
            j = Critical(2, x, body, (a,))
        else:
            j = Critical(3, x, body)
        steps.append(ProofStep(critical(j), j))
    # a small arithmetic tail ending in modus ponens
    t = rng.choice(terms)
    j1 = AxiomII(1, (t,))
    steps.append(ProofStep(axiom_ii(1, (t,)), j1))
    j8 = AxiomII(8, (t, t))
    steps.append(ProofStep(axiom_ii(8, (t, t)), j8))
    f = axiom_ii(8, (t, t))
    steps.append(ProofStep(f.r, MP(len(steps) - 1, len(steps) - 2)))
    return steps


def chain_proof(rng: random.Random, depth: int = 3, max_witness: int = 10) -> list[ProofStep]:
    """eps_x(x = c1), eps_y(y = eps_x + c2), ... with the critical formula of
    the outermost term listed first.  Repairing an inner term moves the
    parameter of the outer one, so outer categories are repaired again at
    the new key; runs are several states long."""
    names = ["x", "y", "z", "u", "v"][:depth]
    budget = max_witness
    cs = []
    for _ in range(depth):
        c = rng.randint(1, max(1, budget - (depth - len(cs) - 1)))
        cs.append(c)
        budget -= c
    terms: list[Eps] = []
    crits: list[ProofStep] = []
    shapes = [lambda X, r: Eq(X, r), lambda X, r: Eq(r, X), lambda X, r: Eq(Add(X, numeral(0)), r)]
    for i, (x, c) in enumerate(zip(names, cs)):
        rhs = Add(terms[-1], numeral(c)) if terms else numeral(c)
        body = shapes[i % len(shapes)](Var(x), rhs)
        terms.append(Eps(x, body))
        j = Critical(1, x, body, (rhs,))
        crits.append(ProofStep(critical(j), j))
    steps = list(reversed(crits))
    t = terms[-1]
    steps.append(ProofStep(axiom_ii(1, (t,)), AxiomII(1, (t,))))
    return steps


def corpus(n: int = 24, seed: Optional[int] = None, max_eps: int = 3, max_witness: int = 10,
           chains: int = 0) -> list[list[ProofStep]]:
    """``n`` random proofs followed by ``chains`` chain proofs of depth 2 or 3."""
    rng = random.Random(corpus_seed() if seed is None else seed)
    out = [random_proof(rng, max_eps, max_witness) for _ in range(n)]
    out += [chain_proof(rng, rng.randint(2, min(3, max_eps)), max_witness) for _ in range(chains)]
    return out


def tiny_proof() -> list[ProofStep]:
    """The three-step proof of ``exists y. y = 0'``."""
    one = numeral(1)
    body = Eq(Var("y"), one)
    c = Critical(1, "y", body, (one,))
    return [
        ProofStep(Eq(one, one), AxiomII(1, (one,))),
        ProofStep(critical(c), c),
        ProofStep(critical(c).r, MP(1, 0)),
    ]
