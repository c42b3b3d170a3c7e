"""Good-cylinder censuses, visit counts, orbit trees and Cantor lower bounds.

A cylinder of length n is (n, eps)-good when its exact measure lies in the
band [2**(-(h+eps) n), 2**(-(h-eps) n)] around the entropy h of the chain.
A typical stretch of orbit shows many distinct good words; organizing the
good prefixes of the seen good words into a tree and intersecting along a
ladder of lengths yields an explicit Cantor set inside the early-hit set,
whose branching rate is an empirical dimension lower bound.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bits import mask
from .symbolic import Orbit, Word
from .thermo import (
    GibbsChain,
    MemoryBudgetError,
    log2_measure_table,
    log2_measures_of_codes,
)

DEFAULT_MIN_LEVEL_OFFSET = 8
SCAN_CHUNK = 1 << 20


@dataclass(frozen=True)
class GoodCylinderSet:
    """Membership of the measure band [2^{-(h+eps)n}, 2^{-(h-eps)n}] at length n."""

    n: int
    epsilon: float
    h: float
    member: np.ndarray   # bool, indexed by word code

    @property
    def count(self) -> int:
        return int(np.count_nonzero(self.member))

    def contains(self, w: Word) -> bool:
        if w.n != self.n:
            raise ValueError("length mismatch")
        return bool(self.member[w.code])


def good_cylinders(chain: GibbsChain, n: int, epsilon: float, budget_bits: int = 26) -> GoodCylinderSet:
    """Exact enumeration of the good words of length n."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if n > budget_bits:
        raise MemoryBudgetError(f"good-cylinder enumeration supports n <= {budget_bits}")
    h = chain.entropy
    beta = -log2_measure_table(chain, n, budget_bits) / n
    member = (beta >= h - epsilon) & (beta <= h + epsilon)
    return GoodCylinderSet(n, float(epsilon), h, member)


def good_mask(chain: GibbsChain, codes: np.ndarray, n: int, epsilon: float) -> np.ndarray:
    """Boolean mask: which of the given n-word codes are (n, eps)-good."""
    if len(codes) == 0:
        return np.zeros(0, dtype=bool)
    h = chain.entropy
    beta = -log2_measures_of_codes(chain, codes, n) / n
    return (beta >= h - epsilon) & (beta <= h + epsilon)


def _window_scan(orbit: Orbit, n: int, lo: int, hi: int):
    """Yield chunks of n-window codes for shifts lo..hi inclusive."""
    pos = lo
    while pos <= hi:
        stop = min(pos + SCAN_CHUNK, hi + 1)
        yield orbit.window_codes(n, pos, stop)
        pos = stop


def visit_counts(
    orbit: Orbit,
    chain: GibbsChain,
    D: Word,
    epsilon: float,
    c: float,
    L_pp: int,
) -> int:
    """Count shifts j in (2^|D|, 2^(c L'')] whose window starts with D
    and continues with an (L''-|D|, eps)-good word."""
    if c >= chain.entropy:
        raise ValueError("c must be below the chain entropy")
    lo = (1 << D.n) + 1 if D.n > 0 else 1
    hi = int(np.floor(2.0 ** (c * L_pp)))
    if hi + L_pp > orbit.length:
        raise ValueError("orbit too short for the requested window")
    k = L_pp - D.n
    dcode = np.uint64(D.code)
    dmask = np.uint64(mask(D.n))
    total = 0
    for codes in _window_scan(orbit, L_pp, lo, hi):
        if D.n > 0:
            codes = codes[(codes & dmask) == dcode]
        suffix = (codes >> np.uint64(D.n)).astype(np.int64)
        total += int(np.count_nonzero(good_mask(chain, suffix, k, epsilon)))
    return total


@dataclass(frozen=True)
class TreeCounts:
    """Distinct good continuations of a prefix, per level of the orbit tree."""

    prefix: Word
    L_p: int
    L_pp: int
    epsilon: float
    c: float
    levels: np.ndarray        # tree levels (cylinder lengths)
    counts: np.ndarray        # T at each level
    bound: np.ndarray         # 2^{(c - 2 eps)(level - L_p)} reference line

    def meets_bound(self) -> bool:
        return bool(np.all(self.counts >= self.bound))


def tree_counts(
    orbit: Orbit,
    chain: GibbsChain,
    D: Word,
    L_pp: int,
    epsilon: float,
    c: float,
    min_level_offset: int = DEFAULT_MIN_LEVEL_OFFSET,
) -> TreeCounts:
    """Per-level node counts of the tree of good continuations of D.

    A level-l node is a cylinder D * G' with G' an (l - L', eps)-good word
    such that some (L'', 2 eps)-good window seen at a shift in
    (2^{L'}, 2^{c L''}] starts with D * G'.  The count at each level is the
    number of distinct such G'.
    """
    L_p = D.n
    if L_p + min_level_offset > L_pp:
        raise ValueError("no levels between the prefix and the leaf length")
    lo = (1 << L_p) + 1 if L_p > 0 else 1
    hi = int(np.floor(2.0 ** (c * L_pp)))
    if lo > hi:
        raise ValueError("empty time window: need 2^|D| < 2^(c * leaf length)")
    if hi + L_pp > orbit.length:
        raise ValueError("orbit too short for the requested window")
    dcode = np.uint64(D.code)
    dmask = np.uint64(mask(L_p))
    pieces = []
    for codes in _window_scan(orbit, L_pp, lo, hi):
        if L_p > 0:
            codes = codes[(codes & dmask) == dcode]
        if len(codes):
            keep = good_mask(chain, codes.astype(np.int64), L_pp, 2 * epsilon)
            pieces.append(codes[keep])
    seen = np.unique(np.concatenate(pieces)) if pieces else np.empty(0, dtype=np.uint64)
    levels = np.arange(L_p + min_level_offset, L_pp + 1, dtype=np.int64)
    counts = np.zeros(len(levels), dtype=np.int64)
    for i, lvl in enumerate(levels):
        k = int(lvl) - L_p
        gp = np.unique((seen >> np.uint64(L_p)) & np.uint64(mask(k)))
        counts[i] = int(np.count_nonzero(good_mask(chain, gp.astype(np.int64), k, epsilon)))
    bound = 2.0 ** ((c - 2 * epsilon) * (levels - L_p))
    return TreeCounts(D, L_p, L_pp, float(epsilon), float(c), levels, counts, bound)


@dataclass(frozen=True)
class CantorReport:
    """Level counts of the nested good-prefix families along a ladder."""

    ladder: tuple[int, ...]
    epsilon: float
    c: float
    min_level_offset: int
    levels: np.ndarray
    counts: np.ndarray
    failed_level: int | None      # first empty level, if the construction died

    @property
    def dimension_lower_bound(self) -> float:
        """min over levels of log2(count) / level; nan if a level was empty."""
        if self.failed_level is not None or len(self.levels) == 0:
            return float("nan")
        return float(np.min(np.log2(self.counts) / self.levels))


def cantor_lower_bound(
    orbit: Orbit,
    chain: GibbsChain,
    ladder,
    epsilon: float,
    c: float,
    min_level_offset: int = DEFAULT_MIN_LEVEL_OFFSET,
) -> CantorReport:
    """Build the nested family of good cylinders rung by rung along the ladder.

    Rung k keeps the (L_k, 2 eps)-good windows seen at shifts in
    (2^{L_{k-1}}, 2^{c L_k}] whose L_{k-1}-prefix survived the previous rung,
    and records at every level l in [L_{k-1} + offset, L_k] the number of
    distinct (l, eps)-good prefixes.  The minimum of log2(count)/l is an
    empirical lower bound for the dimension of the set of points hit by time
    2**(c n) at every depth n.
    """
    ladder = tuple(int(x) for x in ladder)
    if any(b <= a for a, b in zip(ladder, ladder[1:])) or not ladder:
        raise ValueError("ladder must be strictly increasing and nonempty")
    if c >= chain.entropy:
        raise ValueError("c must be below the chain entropy")
    for a, b in zip((0,) + ladder, ladder):
        if a > 0 and 2.0**a >= np.floor(2.0 ** (c * b)):
            raise ValueError(
                f"empty time window at rung {b}: need 2^{a} < 2^(c*{b}); "
                "use a steeper ladder or larger c"
            )
    need = int(np.floor(2.0 ** (c * ladder[-1]))) + ladder[-1]
    if need > orbit.length:
        raise ValueError(f"orbit too short: need {need} symbols for the last rung")

    all_levels: list[int] = []
    all_counts: list[int] = []
    frontier: np.ndarray | None = None
    prev_L = 0
    for L_k in ladder:
        lo = (1 << prev_L) + 1 if prev_L > 0 else 1
        hi = int(np.floor(2.0 ** (c * L_k)))
        pmask = np.uint64(mask(prev_L))
        pieces = []
        for codes in _window_scan(orbit, L_k, lo, hi):
            if frontier is not None:
                sel = np.isin(codes & pmask, frontier)
                codes = codes[sel]
            if len(codes):
                keep = good_mask(chain, codes.astype(np.int64), L_k, 2 * epsilon)
                pieces.append(codes[keep])
        kept = np.unique(np.concatenate(pieces)) if pieces else np.empty(0, dtype=np.uint64)
        for lvl in range(prev_L + min_level_offset, L_k + 1):
            prefixes = np.unique(kept & np.uint64(mask(lvl)))
            good = prefixes[good_mask(chain, prefixes.astype(np.int64), lvl, epsilon)]
            all_levels.append(lvl)
            all_counts.append(len(good))
            if len(good) == 0:
                return CantorReport(
                    ladder, float(epsilon), float(c), min_level_offset,
                    np.array(all_levels), np.array(all_counts), lvl,
                )
            if lvl == L_k:
                frontier = good
        prev_L = L_k
    return CantorReport(
        ladder, float(epsilon), float(c), min_level_offset,
        np.array(all_levels), np.array(all_counts), None,
    )
