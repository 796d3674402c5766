"""Slow, independent reference computations used to check the fast paths."""
import math

import numpy as np


def dense_delta(tree, scheme):
    """Full sharing matrix, distances found by climbing parent pointers."""
    n = tree.n
    D = np.zeros((n, n))
    for j in range(n):
        D[j, j] = scheme.gamma
        k, d = tree.parents[j], 1
        while k is not None:
            D[k, j] = scheme.share(d)
            k, d = tree.parents[k], d + 1
    return D


def brute_f(tree, scheme):
    """Fixed point of the f recursion by repeated full sweeps."""
    D = dense_delta(tree, scheme)
    off = D - np.diag(np.diag(D))
    f = np.ones(tree.n)
    for _ in range(tree.n + 2):
        f = np.maximum(0.0, 1.0 - off @ f)
    return f


def brute_utility(i, efforts, tree, scheme, params):
    """Payoff rate written straight from grab rates and per-task payments."""
    efforts = np.asarray(efforts, dtype=float)
    D = dense_delta(tree, scheme)
    lam, R, C = params.lambda_arrival, params.reward, params.cost
    total = efforts.sum()
    grab = lam * efforts / total if total > lam else efforts.copy()
    income = 0.0
    for j in range(tree.n):
        # direct reward to the grabber, passive share of it to ancestors
        pay = scheme.gamma * R if j == i else scheme.gamma * R * D[i, j]
        income += grab[j] * pay
    return income - C * efforts[i]


def numeric_best_response(i, efforts, tree, scheme, params, hi=None, grid=4001):
    """Grid search then golden-section refinement of agent i's payoff."""
    efforts = np.asarray(efforts, dtype=float).copy()
    if hi is None:
        hi = 4.0 * max(1.0, params.lambda_arrival * scheme.gamma * params.reward / params.cost)

    def u(x):
        efforts[i] = x
        return brute_utility(i, efforts, tree, scheme, params)

    xs = np.linspace(0.0, hi, grid)
    vals = np.array([u(x) for x in xs])
    k = int(np.argmax(vals))
    a, b = xs[max(0, k - 1)], xs[min(grid - 1, k + 1)]
    phi = (math.sqrt(5) - 1) / 2
    for _ in range(200):
        c, d = b - phi * (b - a), a + phi * (b - a)
        if u(c) >= u(d):
            b = d
        else:
            a = c
    x = 0.5 * (a + b)
    best = max((u(x), x), (vals[k], xs[k]), (u(0.0), 0.0), key=lambda t: t[0])
    return best[1], best[0]
