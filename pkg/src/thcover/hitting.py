"""Hitting and return times of cylinder targets along long orbits.

The first hitting time of a length-n target is the least shift l >= 1 whose
window matches the target's first n symbols; the shift at l = 0 (the point
itself) never counts.  One scan serves all n at once: the running maximum of
the common-prefix lengths between windows and the target jumps to n exactly
at the first hit of the n-cylinder.

Windows of length <= 64 are compared with XOR plus count-trailing-zeros on
the packed codes; longer targets fall back to a Z-algorithm pass over the
unpacked symbols.  Both paths agree exactly and are tested against a naive
scan.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .bits import trailing_zeros64
from .symbolic import Orbit, Word, neighbor_cylinders
from .thermo import GibbsChain, cylinder_measure

NOT_FOUND = -1
SCAN_CHUNK = 1 << 20


@dataclass(frozen=True)
class HittingProfile:
    """First hitting times tau_n of the nested cylinders of one target."""

    target: Word
    n_max: int
    horizon: int                 # last shift that was scanned
    tau: np.ndarray              # (n_max,) int64; tau[i] = tau_{i+1}; -1 when not found

    def tau_n(self, n: int) -> int:
        if not 1 <= n <= self.n_max:
            raise ValueError("n out of range")
        return int(self.tau[n - 1])

    @property
    def found(self) -> np.ndarray:
        return self.tau != NOT_FOUND

    @property
    def alpha_estimates(self) -> np.ndarray:
        """(1/n) log2 tau_n where defined, nan elsewhere."""
        ns = np.arange(1, self.n_max + 1, dtype=np.float64)
        with np.errstate(divide="ignore", invalid="ignore"):
            est = np.log2(np.where(self.found, self.tau, 1).astype(np.float64)) / ns
        return np.where(self.found, est, np.nan)

    def alpha(self, window: float = 0.5) -> float:
        """Liminf proxy: the minimum estimate over the trailing part of the range.

        The true exponent is a liminf over n; at a finite scale the standard
        surrogate is the minimum of (1/n) log2 tau_n over n in
        [window * n_max, n_max], undefined (nan) when no tau in the window
        was found.
        """
        lo = max(int(np.ceil(window * self.n_max)), 1)
        est = self.alpha_estimates[lo - 1 :]
        est = est[~np.isnan(est)]
        return float(est.min()) if len(est) else float("nan")


def lcp_profile(orbit: Orbit, target: Word) -> np.ndarray:
    """Common-prefix length of the target with every window of the orbit.

    Entry l (0 <= l <= L - |target|) is the number of leading symbols the
    window at shift l shares with the target, capped at |target|.
    """
    n_max = target.n
    if n_max > orbit.length:
        return np.empty(0, dtype=np.int64)
    if n_max <= 64:
        out = np.empty(orbit.length - n_max + 1, dtype=np.int64)
        tcode = np.uint64(target.code)
        pos = 0
        while pos < len(out):
            stop = min(pos + SCAN_CHUNK, len(out))
            codes = orbit.window_codes(n_max, pos, stop)
            lcp = trailing_zeros64(codes ^ tcode).astype(np.int64)
            out[pos:stop] = np.minimum(lcp, n_max)
            pos = stop
        return out
    z = _z_array(np.concatenate([target.to_array(), np.full(1, 2, np.uint8), orbit.to_bits()]))
    return np.minimum(z[n_max + 1 :][: orbit.length - n_max + 1], n_max).astype(np.int64)


@njit(cache=True, nogil=True)
def _z_array(s):
    n = len(s)
    z = np.zeros(n, dtype=np.int64)
    l, r = 0, 0
    for i in range(1, n):
        if i < r:
            z[i] = min(r - i, z[i - l])
        while i + z[i] < n and s[z[i]] == s[i + z[i]]:
            z[i] += 1
        if i + z[i] > r:
            l, r = i, i + z[i]
    z[0] = n
    return z


def hitting_times(
    orbit: Orbit, target: Word, n_max: int | None = None, horizon: int | None = None
) -> HittingProfile:
    """First hitting times tau_n for n = 1..n_max in one pass.

    Shifts l = 1..horizon are scanned (horizon defaults to the largest shift
    with a full window).  Levels never reached within the horizon keep the
    NOT_FOUND sentinel; that is data, not an error, since unhit cylinders are
    exactly what the escape-set estimators count.
    """
    if n_max is None:
        n_max = target.n
    if n_max > target.n:
        raise ValueError("n_max exceeds the target length")
    max_shift = orbit.length - n_max
    horizon = max_shift if horizon is None else min(horizon, max_shift)
    tau = np.full(n_max, NOT_FOUND, dtype=np.int64)
    if horizon < 1:
        return HittingProfile(target, n_max, max(horizon, 0), tau)

    if n_max <= 64:
        tcode = np.uint64(target.prefix(n_max).code)
        best = 0
        pos = 1
        while pos <= horizon and best < n_max:
            stop = min(pos + SCAN_CHUNK, horizon + 1)
            codes = orbit.window_codes(n_max, pos, stop)
            lcp = np.minimum(trailing_zeros64(codes ^ tcode).astype(np.int64), n_max)
            cmax = int(lcp.max(initial=0))
            if cmax > best:
                acc = np.maximum.accumulate(lcp)
                for n in range(best + 1, cmax + 1):
                    tau[n - 1] = pos + int(np.searchsorted(acc, n, side="left"))
                best = cmax
            pos = stop
        return HittingProfile(target, n_max, horizon, tau)

    lcp = lcp_profile(orbit, target.prefix(n_max))[1 : horizon + 1]
    acc = np.maximum.accumulate(lcp)
    top = int(acc[-1]) if len(acc) else 0
    for n in range(1, min(top, n_max) + 1):
        tau[n - 1] = 1 + int(np.searchsorted(acc, n, side="left"))
    return HittingProfile(target, n_max, horizon, tau)


def return_profile(orbit: Orbit, n_max: int, horizon: int | None = None) -> HittingProfile:
    """Hitting times of the orbit's own initial cylinder (return times)."""
    return hitting_times(orbit, orbit.window(0, n_max), n_max, horizon)


def first_hits(
    orbit: Orbit, words: list[Word], horizon: int | None = None, start: int = 1
) -> np.ndarray:
    """First shift >= start whose window equals each word, in one shared scan.

    All words must have the same length n <= 64.  Cheaper than a full
    hitting profile when only the top-level hitting times of many targets
    are needed; found targets drop out of later chunks.
    """
    if not words:
        return np.empty(0, dtype=np.int64)
    n = words[0].n
    if n > 64 or any(w.n != n for w in words):
        raise ValueError("first_hits needs same-length words with n <= 64")
    codes = np.array([w.code for w in words], dtype=np.uint64)
    max_shift = orbit.length - n
    horizon = max_shift if horizon is None else min(horizon, max_shift)
    out = np.full(len(words), NOT_FOUND, dtype=np.int64)
    pending = list(range(len(words)))
    pos = start
    while pos <= horizon and pending:
        stop = min(pos + SCAN_CHUNK, horizon + 1)
        ext = orbit.window_codes(n, pos, stop)
        still = []
        for j in pending:
            m = ext == codes[j]
            i = int(np.argmax(m))
            if m[i]:
                out[j] = pos + i
            else:
                still.append(j)
        pending = still
        pos = stop
    return out


@dataclass(frozen=True)
class StarHittingProfile:
    """Hitting times of a target together with its two lexicographic neighbors."""

    center: HittingProfile
    below: HittingProfile
    above: HittingProfile

    @property
    def n_max(self) -> int:
        return self.center.n_max

    @property
    def tau(self) -> np.ndarray:
        stack = np.stack([self.below.tau, self.center.tau, self.above.tau])
        masked = np.where(stack == NOT_FOUND, np.iinfo(np.int64).max, stack)
        best = masked.min(axis=0)
        return np.where(best == np.iinfo(np.int64).max, NOT_FOUND, best)

    @property
    def alpha_estimates(self) -> np.ndarray:
        tau = self.tau
        found = tau != NOT_FOUND
        ns = np.arange(1, self.n_max + 1, dtype=np.float64)
        with np.errstate(divide="ignore", invalid="ignore"):
            est = np.log2(np.where(found, tau, 1).astype(np.float64)) / ns
        return np.where(found, est, np.nan)

    def alpha(self, window: float = 0.5) -> float:
        lo = max(int(np.ceil(window * self.n_max)), 1)
        est = self.alpha_estimates[lo - 1 :]
        est = est[~np.isnan(est)]
        return float(est.min()) if len(est) else float("nan")


def star_hitting_times(
    orbit: Orbit, target: Word, n_max: int | None = None, horizon: int | None = None
) -> StarHittingProfile:
    """Hitting times of the union of a cylinder with its two neighbors.

    tau*_n is the minimum of the three per-n hitting times; neighbors are
    taken at each level n of the nested family, so the three profiles are
    scanned per level against the level-n neighbor words.
    """
    if n_max is None:
        n_max = target.n
    center = hitting_times(orbit, target, n_max, horizon)
    below = np.full(n_max, NOT_FOUND, dtype=np.int64)
    above = np.full(n_max, NOT_FOUND, dtype=np.int64)
    for n in range(1, n_max + 1):
        pred, succ = neighbor_cylinders(target.prefix(n))
        below[n - 1] = hitting_times(orbit, pred, n, horizon).tau[n - 1]
        above[n - 1] = hitting_times(orbit, succ, n, horizon).tau[n - 1]
    hp_b = HittingProfile(target, n_max, center.horizon, below)
    hp_a = HittingProfile(target, n_max, center.horizon, above)
    return StarHittingProfile(center, hp_b, hp_a)


@dataclass(frozen=True)
class CylinderSequenceProfile:
    """Per-n hitting exponents against an arbitrary sequence of cylinders."""

    ns: np.ndarray
    tau: np.ndarray                 # -1 when not hit within the horizon
    exponents: np.ndarray           # (1/n) log2 tau, nan when not found
    local_entropies: np.ndarray     # -(1/n) log2 mu(C_n), nan when no chain given


def cylinder_sequence_profile(
    orbit: Orbit,
    cylinders: list[Word],
    chain: GibbsChain | None = None,
    horizon: int | None = None,
) -> CylinderSequenceProfile:
    """Hitting exponents of a per-length target family C_1, C_2, ...

    cylinders[i] must have length i + 1.  When the family is nested
    (each word a prefix of the last) a single scan computes every level;
    otherwise each level is scanned separately.
    """
    n_max = len(cylinders)
    for i, w in enumerate(cylinders):
        if w.n != i + 1:
            raise ValueError("cylinders[i] must have length i + 1")
    nested = all(cylinders[-1].bits[: w.n] == w.bits for w in cylinders)
    if nested:
        tau = hitting_times(orbit, cylinders[-1], n_max, horizon).tau.copy()
    else:
        tau = np.full(n_max, NOT_FOUND, dtype=np.int64)
        for i, w in enumerate(cylinders):
            tau[i] = hitting_times(orbit, w, w.n, horizon).tau[i]
    ns = np.arange(1, n_max + 1, dtype=np.float64)
    found = tau != NOT_FOUND
    with np.errstate(divide="ignore", invalid="ignore"):
        expo = np.where(found, np.log2(np.where(found, tau, 1).astype(np.float64)) / ns, np.nan)
    if chain is not None:
        ents = np.array(
            [-np.log2(cylinder_measure(chain, w)) / w.n for w in cylinders], dtype=np.float64
        )
    else:
        ents = np.full(n_max, np.nan)
    return CylinderSequenceProfile(ns.astype(np.int64), tau, expo, ents)
