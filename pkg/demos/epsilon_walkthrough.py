#!/usr/bin/env python3
"""Run the substitution method on a tiny proof and on a generated corpus.

    python3 demos/epsilon_walkthrough.py
"""
from witnessbench import epsilon_core as E
from witnessbench import proofgen
from witnessbench import subst_engine as S


def show_tiny():
    p = proofgen.tiny_proof()
    print("proof:")
    print(E.proof_to_text(p))
    r = S.solve(p)
    for rec in r.trace.records:
        print(f"  state {rec.gen}: char={rec.char} index=({rec.o}, {rec.d}) "
              f"repairs step {rec.repaired_step}")
    for e, v in r.witnesses.items():
        print(f"witness: {E.pretty(e)} = {v}")
    print("property P on every state:", all(S.verify_property_P(x) for x in r.states))


def show_nci():
    text = open(E.__file__.replace("epsilon_core.py", "data/nci_succ.sexp")).read()
    p = E.parse_proof(text)
    for k in (0, 4, 9):
        res = S.nci_extract(p, [S.Opponent("f1", 0, lambda k=k: k)])
        print(f"counterexample candidate f1 = {k}: answer y = {res.b[0]}")


def show_corpus(n=12):
    total_states = 0
    for i, p in enumerate(proofgen.corpus(n, seed=proofgen.DEFAULT_SEED)):
        r = S.solve(p)
        c = E.proof_constants(p)
        total_states += len(r.states)
        viol = S.corollary_violations(r.trace)
        vals = sorted(r.witnesses.values())
        print(f"  proof {i:2d}: m={c.m:2d} e={c.e} g={c.g} states={len(r.states)} "
              f"witnesses={vals} series violations={len(viol)}")
    print(f"{n} proofs, {total_states} states")


def show_chain():
    import random
    p = proofgen.chain_proof(random.Random(3), depth=3)
    r = S.solve(p)
    print("chain of three dependent terms:")
    print("  characteristics:", [rec.char for rec in r.trace.records])
    for m in (1, 2, 3):
        print(f"  {m}-series indices:", [str(o) for o in S.series_indices(r.trace, m)])


if __name__ == "__main__":
    show_tiny()
    print()
    show_nci()
    print()
    show_corpus()
    print()
    show_chain()
