"""Monte Carlo probability-decay experiments over replicated orbits.

Each experiment samples R independent orbits from per-replicate PCG64
streams and reports the empirical frequency of a rare hitting event per word
length, with Wilson intervals and a fitted log2-frequency slope.  Only
monotone decay past a threshold is ever asserted downstream; the theoretical
rates are existential.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import linregress

from .covering import hit_census
from .symbolic import Word
from .thermo import GibbsChain, log2_measure_table, sample_orbit, stream
from .typicality import tree_counts

WILSON_Z = 1.959963984540054  # two-sided 95%


def wilson_interval(k: int, n: int, z: float = WILSON_Z) -> tuple[float, float]:
    if n == 0:
        return 0.0, 1.0
    p = k / n
    denom = 1 + z * z / n
    center = (p + z * z / (2 * n)) / denom
    half = (z / denom) * np.sqrt(p * (1 - p) / n + z * z / (4 * n * n))
    return max(0.0, center - half), min(1.0, center + half)


@dataclass(frozen=True)
class DecayReport:
    kind: str
    n_grid: tuple[int, ...]
    replicates: int
    counts: tuple[int, ...]            # events observed per n
    frequencies: tuple[float, ...]
    wilson_low: tuple[float, ...]
    wilson_high: tuple[float, ...]
    slope: float                       # fitted slope of log2 frequency vs n
    params: dict = field(default_factory=dict)


def _fit_slope(n_grid, freqs) -> float:
    ns, ys = [], []
    for n, f in zip(n_grid, freqs):
        if f > 0:
            ns.append(n)
            ys.append(np.log2(f))
    if len(ns) < 2:
        return float("nan")
    return float(linregress(ns, ys).slope)


def _run_replicates(fn, replicates: int, threads: int = 1) -> list:
    """Evaluate fn(replicate_index) for every replicate, order-stable."""
    if threads <= 1:
        return [fn(r) for r in range(replicates)]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, range(replicates)))


def late_hit_experiment(
    chain: GibbsChain,
    n_grid,
    gamma: float,
    seed: int,
    replicates: int = 100,
    threads: int = 1,
) -> DecayReport:
    """Frequency of some high-measure n-cylinder staying unhit up to 2**(h n).

    The family at each n holds every word of measure >= 2**(-(h - gamma) n);
    the event is that at least one of them has hitting time beyond 2**(h n).
    """
    h = chain.entropy
    if not 0 < gamma < h:
        raise ValueError(f"gamma must lie in (0, entropy={h:.6f})")
    n_grid = tuple(int(n) for n in n_grid)
    families = {}
    horizons = {}
    for n in n_grid:
        logmu = log2_measure_table(chain, n)
        fam = np.flatnonzero(logmu >= -(h - gamma) * n)
        if len(fam) == 0:
            raise ValueError(f"family at n={n} is empty; lower gamma")
        families[n] = fam
        horizons[n] = int(np.floor(2.0 ** (h * n)))
    length = max(horizons[n] + n for n in n_grid)

    def one(r: int) -> np.ndarray:
        orbit = sample_orbit(chain, length, rng=stream(seed, r))
        out = np.zeros(len(n_grid), dtype=np.int64)
        for i, n in enumerate(n_grid):
            census = hit_census(orbit, n, horizons[n])
            out[i] = int(np.any(~census.seen[families[n]]))
        return out

    counts = np.sum(_run_replicates(one, replicates, threads), axis=0)
    freqs = counts / replicates
    lows, highs = zip(*(wilson_interval(int(k), replicates) for k in counts))
    return DecayReport(
        "late-hit", n_grid, replicates, tuple(int(c) for c in counts),
        tuple(float(f) for f in freqs), lows, highs, _fit_slope(n_grid, freqs),
        {"gamma": gamma, "seed": seed},
    )


def multi_early_hit_experiment(
    chain: GibbsChain,
    n_grid,
    a: float,
    b: float,
    c: float,
    gamma: float,
    seed: int,
    replicates: int = 100,
    threads: int = 1,
) -> DecayReport:
    """Frequency of >= 2**(c n) rare cylinders all hit within 2**(a n).

    The family holds the 2**(b n) least-likely n-words; the hypotheses
    gamma > max(b - c, 0) and family measures <= 2**(-(a + gamma) n) are
    validated and violations rejected with an explanation.
    """
    if min(a, b, c) <= 0:
        raise ValueError("a, b, c must be positive")
    if gamma <= max(b - c, 0.0):
        raise ValueError(f"hypothesis requires gamma > max(b - c, 0) = {max(b - c, 0.0):.6f}")
    n_grid = tuple(int(n) for n in n_grid)
    families, horizons, needed = {}, {}, {}
    for n in n_grid:
        logmu = log2_measure_table(chain, n)
        fam_size = max(int(np.floor(2.0 ** (b * n))), 1)
        order = np.argsort(logmu, kind="stable")
        fam = order[:fam_size]
        worst = logmu[fam].max()
        if worst > -(a + gamma) * n + 1e-12:
            raise ValueError(
                f"family at n={n} violates the measure bound: "
                f"max log2 mu = {worst:.4f} > {-(a + gamma) * n:.4f}; "
                "shrink b or gamma"
            )
        families[n] = fam
        horizons[n] = int(np.floor(2.0 ** (a * n)))
        needed[n] = max(int(np.ceil(2.0 ** (c * n))), 1)
    length = max(horizons[n] + n for n in n_grid)

    def one(r: int) -> np.ndarray:
        orbit = sample_orbit(chain, length, rng=stream(seed, r))
        out = np.zeros(len(n_grid), dtype=np.int64)
        for i, n in enumerate(n_grid):
            census = hit_census(orbit, n, horizons[n])
            out[i] = int(np.count_nonzero(census.seen[families[n]]) >= needed[n])
        return out

    counts = np.sum(_run_replicates(one, replicates, threads), axis=0)
    freqs = counts / replicates
    lows, highs = zip(*(wilson_interval(int(k), replicates) for k in counts))
    return DecayReport(
        "multi-early-hit", n_grid, replicates, tuple(int(x) for x in counts),
        tuple(float(f) for f in freqs), lows, highs, _fit_slope(n_grid, freqs),
        {"a": a, "b": b, "c": c, "gamma": gamma, "seed": seed},
    )


def tree_failure_experiment(
    chain: GibbsChain,
    leaf_lengths,
    epsilon: float,
    c: float,
    seed: int,
    replicates: int = 100,
    threads: int = 1,
    min_level_offset: int = 8,
) -> DecayReport:
    """Frequency of a tree level falling below the 2**((c - 2 eps)(l - L')) line."""
    if c >= chain.entropy:
        raise ValueError("c must be below the chain entropy")
    leaf_lengths = tuple(int(x) for x in leaf_lengths)
    length = int(np.floor(2.0 ** (c * max(leaf_lengths)))) + max(leaf_lengths) + 1

    def one(r: int) -> np.ndarray:
        orbit = sample_orbit(chain, length, rng=stream(seed, r))
        out = np.zeros(len(leaf_lengths), dtype=np.int64)
        for i, L_pp in enumerate(leaf_lengths):
            tc = tree_counts(orbit, chain, Word(()), L_pp, epsilon, c, min_level_offset)
            out[i] = int(not tc.meets_bound())
        return out

    counts = np.sum(_run_replicates(one, replicates, threads), axis=0)
    freqs = counts / replicates
    lows, highs = zip(*(wilson_interval(int(k), replicates) for k in counts))
    return DecayReport(
        "tree-failure", leaf_lengths, replicates, tuple(int(x) for x in counts),
        tuple(float(f) for f in freqs), lows, highs, _fit_slope(leaf_lengths, freqs),
        {"epsilon": epsilon, "c": c, "seed": seed},
    )
