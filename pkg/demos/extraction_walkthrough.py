#!/usr/bin/env python3
"""Type-check proof terms, then run them on the machine to extract witnesses.

    python3 demos/extraction_walkthrough.py
"""
from pathlib import Path

import witnessbench
from witnessbench import extract as X
from witnessbench import kam, sol2

DATA = Path(witnessbench.__file__).parent / "data"


def load(name, matrix):
    m = X.MATRICES[matrix]
    text = (DATA / name).read_text()
    return sol2.check_script(text, sol2.RealizerRegistry(functions={m.symbol: m.fn}))


def pi2():
    th = load("id_proof.drv", "eq")
    print("checked:", th)
    for n in (0, 5, 10):
        r = X.extract_pi2(th, "eq", n)
        print(f"  n={n:2d}: answer {r.witnesses[0]} after {r.steps} machine steps")
    r = X.extract_pi2(th, "eq", 6, nu=kam.App(kam.identity(), kam.church(6)))
    print("  a non-normal numeral for 6 gives", r.witnesses[0])


def sigma2():
    th = load("sigma2_backtrack.drv", "zero")
    print("checked:", th)
    r = X.extract_prenex(th, "zero", X.Interactive.scripted([7, 8]))
    for mv in r.transcript.moves:
        print(f"  {mv.player:6s} plays {mv.value}")
    print("  final position", r.transcript.final)


def prenex2():
    th = load("prenex2.drv", "copy2")
    r = X.extract_prenex(th, "copy2", X.HostFunctions([lambda n: 4, lambda a, b: 9]))
    print("two alternations, opponent answers 4 then 9:", r.witnesses)
    print("  transcript legal:", X.verify_transcript(r.transcript, X.PrenexStatement(2, X.MATRICES["copy2"])))


def bottom():
    rep = X.double_bottom_probe(kam.parse_lterm("(lam x x)"), stack=[kam.Inert("c")])
    print("probing \\x.x against c * rho and c' * rho:", rep.verdict)
    print(" ", rep.explain())


if __name__ == "__main__":
    pi2()
    print()
    sigma2()
    print()
    prenex2()
    print()
    bottom()
