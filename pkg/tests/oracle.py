"""Brute-force references for the solvers under test.

Kept out of the package on purpose: production code never imports these.
They share no code with ``bayes_mht``.
"""

from fractions import Fraction
from itertools import product

import numpy as np


class OracleGuardError(ValueError):
    pass


def np_oracle(P, Q, beta):
    """Minimum type-0 error subject to a type-1 budget, in exact rational arithmetic.

    Greedy fractional knapsack over symbols (one at a time, no tie groups),
    then an exchange check: no rejected symbol may have a strictly larger
    ``P/Q`` than an accepted one.
    """
    P = [Fraction(float(x)) for x in np.ravel(P)]
    Q = [Fraction(float(x)) for x in np.ravel(Q)]
    if len(P) != len(Q):
        raise ValueError("size mismatch")
    if len(P) > 20:
        raise OracleGuardError("np_oracle handles at most 20 symbols")
    budget = Fraction(float(beta))
    t = [Fraction(0)] * len(P)
    for i, (p, q) in enumerate(zip(P, Q)):
        if q == 0:
            t[i] = Fraction(1)
    order = sorted((i for i in range(len(P)) if Q[i] > 0), key=lambda i: P[i] / Q[i], reverse=True)
    for i in order:
        take = min(Fraction(1), budget / Q[i]) if budget > 0 else Fraction(0)
        t[i] = take
        budget -= take * Q[i]
    for i in order:
        for j in order:
            if t[i] > 0 and t[j] < 1:
                # moving budget from i to j must not reduce the type-0 error
                assert P[j] * Q[i] <= P[i] * Q[j], (i, j)
    return float(sum(p * (1 - ti) for p, ti in zip(P, t)))


def lp_vertex_oracle(P, Q, beta):
    """Same optimum by enumerating every vertex of the test polytope.

    Vertices of ``{0 <= t <= 1, sum Q t <= beta}`` have all coordinates in
    ``{0, 1}`` except at most one, fixed by the budget.
    """
    p = np.asarray(P, dtype=float).ravel()
    q = np.asarray(Q, dtype=float).ravel()
    n = p.size
    if n > 12:
        raise OracleGuardError("lp_vertex_oracle handles at most 12 symbols")
    best = np.inf
    for mask in product((0.0, 1.0), repeat=n):
        t = np.array(mask)
        cost = float(q @ t)
        if cost > beta + 1e-12:
            continue
        best = min(best, float(p @ (1 - t)))
        slack = beta - cost
        for k in np.flatnonzero(t == 0):
            tk = 1.0 if q[k] == 0 else min(1.0, slack / q[k])
            tt = t.copy()
            tt[k] = tk
            best = min(best, float(p @ (1 - tt)))
    return best


def exhaustive_map_oracle(pvy):
    """Smallest error over every deterministic decoder ``y -> v``."""
    mass = np.asarray(pvy, dtype=float)
    m, ny = mass.shape
    if m**ny > 10**6:
        raise OracleGuardError(f"{m}^{ny} decoders exceed the enumeration guard")
    decoders = np.array(list(product(range(m), repeat=ny)), dtype=int).reshape(-1, ny)
    correct = mass[decoders, np.arange(ny)].sum(axis=1)
    return float(1.0 - correct.max())

