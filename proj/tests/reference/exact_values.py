#!/usr/bin/env python3
"""Independent brute-force reference values frozen into the C++ tests.

Written without sharing any code path with the C++ library: stable cases are
enumerated with exact rationals, Markov cases build the joint chain from
per-channel transition rules and solve the hitting-time system with numpy.
"""
from fractions import Fraction
from itertools import product
import math

import numpy as np


def first_open_from(bits, start):
    for c in range(start, len(bits) + 1):
        if bits[c - 1]:
            return c
    return None


def stable_trace(a, b, rule_a, rule_b, n):
    for t in range(1, 2 * n + 2):
        sa, sb = rule_a(a, t), rule_b(b, t)
        if sa is not None and sa == sb:
            return t
    return None


RULES = {
    "B": lambda bits, t: first_open_from(bits, t),
    "Btilde": lambda bits, t: first_open_from(bits, (t + 1) // 2),
    "C": lambda bits, t: first_open_from(bits, 1),
}


def exact_stable(n, pa, pb, ka, kb):
    pa, pb = Fraction(pa), Fraction(pb)
    total = Fraction(0)
    weighted = Fraction(0)
    divergent = Fraction(0)
    for a in product((0, 1), repeat=n):
        for b in product((0, 1), repeat=n):
            if not any(x and y for x, y in zip(a, b)):
                continue
            w = Fraction(1)
            for x in a:
                w *= pa if x else 1 - pa
            for y in b:
                w *= pb if y else 1 - pb
            total += w
            t = stable_trace(a, b, RULES[ka], RULES[kb], n)
            if t is None:
                divergent += w
            else:
                weighted += w * t
    return weighted / (total - divergent), divergent / total


def first_open_dist(bits):
    d = np.zeros(len(bits))
    for i, x in enumerate(bits):
        if x:
            d[i] = 1.0
            break
    return d


def exact_markov_C(n, pa, pb, la, lb):
    def step(p, lam):
        a0, a1 = lam * (1 - p), lam * p
        # rows: from closed/open, cols: to closed/open
        return np.array([[1 - a1, a1], [a0, 1 - a0]])

    states = list(product(product((0, 1), repeat=n), product((0, 1), repeat=n)))
    index = {s: k for k, s in enumerate(states)}
    ta, tb = step(pa, la), step(pb, lb)
    size = len(states)
    P = np.zeros((size, size))
    for (a, b), k in index.items():
        for (a2, b2), j in index.items():
            w = 1.0
            for x, y in zip(a, a2):
                w *= ta[x, y]
            for x, y in zip(b, b2):
                w *= tb[x, y]
            P[k, j] = w
    r = np.array([first_open_dist(a) @ first_open_dist(b) for (a, b) in states])
    M = np.eye(size) - (1 - r)[:, None] * P
    h = np.linalg.solve(M, np.ones(size))
    pi0 = np.array([
        math.prod(pa if x else 1 - pa for x in a) * math.prod(pb if y else 1 - pb for y in b)
        for (a, b) in states
    ])
    return float(pi0 @ h)


if __name__ == "__main__":
    v, d = exact_stable(3, "0.6", "0.6", "B", "B")
    print("stable n=3 p=0.6 B/B:", v, float(v), "divergent", d)
    v, d = exact_stable(3, "0.5", "0.5", "Btilde", "Btilde")
    print("stable n=3 p=0.5 Bt/Bt:", v, float(v), "divergent", d)
    v, d = exact_stable(2, "0.5", "0.5", "C", "C")
    print("stable n=2 p=0.5 C/C:", v, float(v), "divergent", d)
    v, d = exact_stable(4, "0.7", "0.5", "B", "B")
    print("stable n=4 pa=0.7 pb=0.5 B/B:", v, float(v), "divergent", d)
    print("markov n=3 p=0.6 lam=0.5 C/C: %.15g" % exact_markov_C(3, 0.6, 0.6, 0.5, 0.5))
    print("markov n=2 p=0.5 lam=1 C/C: %.15g" % exact_markov_C(2, 0.5, 0.5, 1.0, 1.0))
    print("markov n=3 pa=0.7 pb=0.5 lam=1.4,0.3 C/C: %.15g" % exact_markov_C(3, 0.7, 0.5, 1.4, 0.3))
