import random

import pytest
import sympy


def admissible(a):
    return all(a) and a[0] * a[1] != a[2] * a[3]


def random_admissible(n, bound=20, seed=0):
    rng = random.Random(seed)
    out = []
    while len(out) < n:
        a = tuple(rng.randint(-bound, bound) for _ in range(5))
        if admissible(a):
            out.append(a)
    return out


def brute_force_h1(generators):
    """|H^1(G, Z^r)| for a 2-group G = <generators> of order N by counting.

    From 0 -> M -N-> M -> M/NM -> 0:  |H^1| = |(M/NM)^G| / N^rank(M^G).
    Independent of the cocycle/Smith-form route: plain enumeration mod N
    plus a sympy nullspace for rank(M^G).
    """
    from itertools import product

    mats = [sympy.Matrix(g) for g in generators]
    r = mats[0].shape[0]
    group = {sympy.ImmutableMatrix(sympy.eye(r))}
    frontier = list(group)
    while frontier:
        nxt = []
        for x in frontier:
            for g in mats:
                y = sympy.ImmutableMatrix(g * x)
                if y not in group:
                    group.add(y)
                    nxt.append(y)
        frontier = nxt
    N = len(group)
    invariant_mod_N = 0
    rows = [[list(g.row(i)) for i in range(r)] for g in mats]
    for v in product(range(N), repeat=r):
        if all(all((sum(row[j] * v[j] for j in range(r)) - v[i]) % N == 0 for i, row in enumerate(g))
               for g in rows):
            invariant_mod_N += 1
    fixed = sympy.Matrix.vstack(*[g - sympy.eye(r) for g in mats]).nullspace()
    denom = N ** len(fixed)
    assert invariant_mod_N % denom == 0
    return invariant_mod_N // denom


@pytest.fixture(scope="session")
def samples():
    return random_admissible(60, seed=20261016)
