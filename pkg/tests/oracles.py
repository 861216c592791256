"""Independent reference implementations used only by the tests."""

import numpy as np
from scipy.optimize import linprog


def transport_cost(xa, wa, xb, wb, cost):
    """Minimum-cost transport between two discrete measures, solved as an LP."""
    na, nb = len(xa), len(xb)
    c = np.array([[cost(x, y) for y in xb] for x in xa], dtype=float).ravel()
    a_eq = np.zeros((na + nb, na * nb))
    for i in range(na):
        a_eq[i, i * nb:(i + 1) * nb] = 1.0
    for j in range(nb):
        a_eq[na + j, j::nb] = 1.0
    b_eq = np.concatenate([wa, wb])
    res = linprog(c, A_eq=a_eq, b_eq=b_eq, bounds=(0, None), method="highs")
    assert res.status == 0
    return float(res.fun)


def emd_bruteforce(a, b):
    a, b = np.asarray(a, float), np.asarray(b, float)
    return transport_cost(a, np.full(a.size, 1 / a.size), b, np.full(b.size, 1 / b.size),
                          lambda x, y: abs(x - y))


def emd_categorical_lp(pa: dict, pb: dict):
    keys = sorted(set(pa) | set(pb))
    wa = np.array([pa.get(k, 0.0) for k in keys])
    wb = np.array([pb.get(k, 0.0) for k in keys])
    return transport_cost(keys, wa, keys, wb, lambda x, y: 0.0 if x == y else 1.0)


def ks_bruteforce(a, b):
    pts = sorted(set(a) | set(b))
    return max(abs(sum(x <= t for x in a) / len(a) - sum(x <= t for x in b) / len(b)) for t in pts)
