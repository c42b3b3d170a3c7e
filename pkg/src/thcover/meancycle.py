"""Karp's minimum mean cycle algorithm, in exact rational arithmetic.

Works on small edge-listed digraphs (the de Bruijn state graphs, possibly
with edges removed).  Weights are converted with Fraction(float), which is
exact for IEEE doubles, so the min/max cycle means and the degeneracy test
(min == max) involve no rounding.  Cost is O(V * E) big-rational operations;
fine for the n <= ~10 memory potentials this package targets, and a float
fallback kicks in above 512 states.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

EXACT_STATE_LIMIT = 512


@dataclass(frozen=True)
class MeanCycleResult:
    minimum: Fraction
    maximum: Fraction
    exact: bool

    @property
    def degenerate(self) -> bool:
        return self.minimum == self.maximum


def _karp_min(n_nodes: int, edges: list[tuple[int, int, Fraction]]) -> Fraction:
    """Minimum cycle mean; edges are (u, v, weight), graph strongly connected."""
    INF = None
    D = [[INF] * n_nodes for _ in range(n_nodes + 1)]
    for v in range(n_nodes):
        D[0][v] = Fraction(0)
    for k in range(1, n_nodes + 1):
        row = D[k]
        prev = D[k - 1]
        for u, v, w in edges:
            if prev[u] is not None:
                cand = prev[u] + w
                if row[v] is None or cand < row[v]:
                    row[v] = cand
    best = None
    for v in range(n_nodes):
        if D[n_nodes][v] is None:
            continue
        worst = None
        for k in range(n_nodes):
            if D[k][v] is None:
                continue
            ratio = (D[n_nodes][v] - D[k][v]) / (n_nodes - k)
            if worst is None or ratio > worst:
                worst = ratio
        if worst is not None and (best is None or worst < best):
            best = worst
    if best is None:
        raise ValueError("graph has no cycle")
    return best


def _karp_min_float(n_nodes: int, edges: list[tuple[int, int, float]]) -> float:
    INF = np.inf
    prev = np.zeros(n_nodes)
    hist = [prev]
    src = np.array([e[0] for e in edges])
    dst = np.array([e[1] for e in edges])
    wts = np.array([e[2] for e in edges], dtype=np.float64)
    for _ in range(n_nodes):
        nxt = np.full(n_nodes, INF)
        np.minimum.at(nxt, dst, hist[-1][src] + wts)
        hist.append(nxt)
    last = hist[n_nodes]
    best = INF
    for v in range(n_nodes):
        if not np.isfinite(last[v]):
            continue
        worst = -INF
        for k in range(n_nodes):
            if np.isfinite(hist[k][v]):
                worst = max(worst, (last[v] - hist[k][v]) / (n_nodes - k))
        best = min(best, worst)
    if not np.isfinite(best):
        raise ValueError("graph has no cycle")
    return float(best)


def mean_cycle_extremes(n_nodes: int, edges: list[tuple[int, int, float]]) -> MeanCycleResult:
    """Exact minimum and maximum cycle means of an edge-weighted digraph."""
    if n_nodes <= EXACT_STATE_LIMIT:
        exact_edges = [(u, v, Fraction(w)) for u, v, w in edges]
        lo = _karp_min(n_nodes, exact_edges)
        hi = -_karp_min(n_nodes, [(u, v, -w) for u, v, w in exact_edges])
        return MeanCycleResult(lo, hi, exact=True)
    lo = _karp_min_float(n_nodes, edges)
    hi = -_karp_min_float(n_nodes, [(u, v, -w) for u, v, w in edges])
    return MeanCycleResult(Fraction(lo), Fraction(hi), exact=False)
