#!/usr/bin/env python3
"""Ordinal codes and the bound functions, with budgets.

    python3 demos/bounds_tour.py
"""
from functools import cmp_to_key

from witnessbench import bounds as B
from witnessbench import ordinals as O

print("level-1 codes 0..9:", [str(O.decode(c, 1)) for c in range(10)])
print("level-2 code 5 is", O.decode(5, 2))
order = sorted(range(16), key=cmp_to_key(lambda a, b: O.cmp_codes(a, b, 2)))
print("level-2 codes below 16 in ordinal order:", order)

print()
for m in range(3):
    print(f"phi({m}, a) for a = 0..4:", [B.phi(m, a) for a in range(5)])
print("rho(2,1) =", B.rho(2, 1), "  lambda(9,2) =", B.lambda_fn(9, 2))

print()
c = lambda n: 1  # noqa: E731
a = 0b1011
t = B.tau_fn(c, 2, 1, a).unwrap()
print(f"tau(c,2,1,{a}) = {t}; eta recovers {O.eta(t, 2)}")
seq = [a]
while seq[-1]:
    seq.append(B.kappa_fn(c, 2, 1, seq[-1]).unwrap())
print("kappa descent from", a, ":", seq)

print()
for params in (B.BoundParams(0, 2, 1), B.BoundParams(1, 1, 1)):
    r = B.born(params, budget=10**6)
    print(f"born{(params.m, params.e, params.g)}:", r)
