"""Brute-force reference computations.

Deliberately independent of the fast paths: cycle means come from
exhaustive simple-cycle enumeration, path suprema from naive max-plus
matrix powers over plain floats. Sized for small systems (the CLI caps
the oracle at 10 states).
"""

from __future__ import annotations

import math
from typing import List, Tuple

import networkx as nx

from .dynamics import TransitionSystem

_NINF = -math.inf


def enum_max_cycle_mean(sys: TransitionSystem) -> float:
    """Maximum over all simple cycles of (total weight / length); -inf when acyclic."""
    g = nx.DiGraph()
    g.add_nodes_from(range(sys.n))
    for s, t, w in sys.arcs:
        g.add_edge(s, t, weight=w)
    best = _NINF
    for cycle in nx.simple_cycles(g):
        total = 0.0
        for a, b in zip(cycle, cycle[1:] + cycle[:1]):
            total += g[a][b]["weight"]
        mean = total / len(cycle)
        if mean > best:
            best = mean
    return best


def _matmul_maxplus(a: List[List[float]], b: List[List[float]]) -> List[List[float]]:
    n = len(a)
    out = [[_NINF] * n for _ in range(n)]
    for i in range(n):
        ai = a[i]
        oi = out[i]
        for k in range(n):
            aik = ai[k]
            if aik == _NINF:
                continue
            bk = b[k]
            for j in range(n):
                c = aik + bk[j]
                if c > oi[j]:
                    oi[j] = c
    return out


def enum_mane(sys: TransitionSystem, q: float, horizon: int = None) -> List[List[float]]:
    """Max normalized path weight by powering the shifted weight matrix.

    With all cycle means <= 0 a maximizing walk never gains from length
    beyond 2n, so the default horizon is exact.
    """
    n = sys.n
    if horizon is None:
        horizon = 2 * n
    grid = [[_NINF] * n for _ in range(n)]
    for s, t, w in sys.arcs:
        grid[s][t] = w - q
    phi = [row[:] for row in grid]
    power = [row[:] for row in grid]
    for _ in range(horizon - 1):
        power = _matmul_maxplus(power, grid)
        for i in range(n):
            pi = power[i]
            fi = phi[i]
            for j in range(n):
                if pi[j] > fi[j]:
                    fi[j] = pi[j]
    return phi


def enum_aubry(phi: List[List[float]], tol: float = 1e-9) -> Tuple[int, ...]:
    """States whose best return path has weight 0 (within tol)."""
    out = []
    for i, row in enumerate(phi):
        d = row[i]
        if d != _NINF and abs(d) <= tol:
            out.append(i)
    return tuple(out)
