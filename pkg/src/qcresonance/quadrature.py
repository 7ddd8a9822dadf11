"""Numerical building blocks for the quadrature oracle: composite
Gauss-Legendre panels, Wynn's epsilon algorithm for oscillatory tails and
polynomial (Richardson/Neville) extrapolation to zero regulator."""

from __future__ import annotations

from functools import lru_cache

import numpy as np


@lru_cache(maxsize=None)
def _gauss_legendre(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def panel_integrals(f, edges, order: int = 20):
    """Integrate ``f`` over each interval ``[edges[k], edges[k+1]]``.

    ``f`` must accept a 1-d array of abscissae and return an array whose
    first axis matches it (extra trailing axes are integrated componentwise).
    Returns an array of shape ``(len(edges) - 1, ...)``.
    """
    edges = np.asarray(edges, dtype=float)
    x, w = _gauss_legendre(order)
    a, b = edges[:-1], edges[1:]
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    vals = np.asarray(f(nodes))
    vals = vals.reshape((len(a), order) + vals.shape[1:])
    wts = (half[:, None] * w[None, :]).reshape((len(a), order) + (1,) * (vals.ndim - 2))
    return (vals * wts).sum(axis=1)


def wynn_epsilon(partial_sums):
    """Accelerated limit of a sequence of partial sums.

    Returns ``(limit, error_estimate)``. The error estimate is the distance
    between the two most recent even-column entries of the epsilon table.
    Works elementwise on arrays of partial sums (sequence on axis 0).
    """
    s = np.asarray(partial_sums)
    n = s.shape[0]
    if n < 3:
        return s[-1], np.abs(s[-1] - s[0]) if n > 1 else np.inf
    prev = np.zeros((n + 1,) + s.shape[1:], dtype=s.dtype)  # epsilon_{-1}
    cur = s.copy()  # epsilon_0
    best = [cur[-1]]
    for k in range(1, n):
        diff = cur[1:] - cur[:-1]
        with np.errstate(divide="ignore", invalid="ignore"):
            nxt = prev[1 : len(cur)] + 1.0 / diff
        if not np.all(np.isfinite(nxt)):
            break
        prev, cur = cur, nxt
        if k % 2 == 0:
            best.append(cur[-1])
    if len(best) < 2:
        return best[-1], np.abs(s[-1] - s[-2])
    return best[-1], np.abs(best[-1] - best[-2])


def neville_to_zero(h, values):
    """Polynomial extrapolation of ``values(h)`` to ``h = 0``.

    Builds the full Neville tableau. Returns ``(limit, error_estimate, table)``
    where ``table[m]`` holds the degree-m extrapolants and the error estimate
    is the change between the two highest-degree estimates that use the
    smallest h values, or between the two before them if that is larger.
    """
    h = np.asarray(h, dtype=float)
    p = [np.asarray(values, dtype=float)]
    for m in range(1, len(h)):
        prev = p[-1]
        num = h[m:] * prev[:-1] - h[:-m] * prev[1:]
        p.append(num / (h[m:] - h[:-m]))
    if len(p) == 1:
        return float(p[0][-1]), np.inf, p
    limit = float(p[-1][-1])
    diag = [float(level[-1]) for level in p]
    err = max(abs(a - b) for a, b in zip(diag[-3:], diag[-2:])) if len(diag) > 2 else abs(diag[-1] - diag[-2])
    return limit, err, p
