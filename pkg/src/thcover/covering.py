"""Census-based dimension estimators for the covered/escaping dichotomy.

For radius n**-kappa targets, the n-words hit within the horizon 2**(n/kappa)
approximate the infinitely-covered set and the unhit words the escape set;
log2(count)/n slopes over a grid of n estimate the dimensions that the
spectrum predicts.  Word sets are held as flat membership arrays indexed by
the packed word code, so shards merge by OR and all counts are exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.stats import linregress

from .spectrum import CoverPrediction, Spectrum
from .symbolic import CirclePoint, Orbit
from .thermo import GibbsChain, MemoryBudgetError, log2_measures_of_codes

CENSUS_MAX_BITS = 30
SCAN_CHUNK = 1 << 20


@dataclass(frozen=True)
class HitCensus:
    """Which n-words occur among the windows at shifts start..start+K-1."""

    n: int
    start: int
    horizon: int          # number of shifts actually scanned
    seen: np.ndarray      # bool, indexed by word code

    @property
    def distinct(self) -> int:
        return int(np.count_nonzero(self.seen))

    @property
    def unhit(self) -> int:
        return (1 << self.n) - self.distinct


def hit_census(orbit: Orbit, n: int, K: int, start: int = 1) -> HitCensus:
    """Distinct n-window census over shifts start..start+K-1 (default l >= 1)."""
    seen, counts = _census_scan(orbit, n, [K], start)
    return HitCensus(n, start, counts.pop()[1], seen)


def _census_scan(orbit: Orbit, n: int, checkpoints: list[int], start: int = 1):
    """Scatter windows into a membership array, snapshotting distinct counts.

    checkpoints are increasing shift counts measured from `start`; the return
    value pairs each checkpoint with (distinct count, shifts scanned).
    """
    if n > CENSUS_MAX_BITS:
        raise MemoryBudgetError(f"census bitmap for n={n} exceeds 2**{CENSUS_MAX_BITS} bits")
    if sorted(checkpoints) != list(checkpoints):
        raise ValueError("checkpoints must be increasing")
    max_shift = orbit.length - n
    seen = np.zeros(1 << n, dtype=bool)
    out = []
    pos = start
    for K in checkpoints:
        stop = min(start + K, max_shift + 1)
        while pos < stop:
            chunk_stop = min(pos + SCAN_CHUNK, stop)
            codes = orbit.window_codes(n, pos, chunk_stop)
            seen[codes.astype(np.int64)] = True
            pos = chunk_stop
        out.append((int(np.count_nonzero(seen)), max(stop - start, 0)))
    return seen, out


@dataclass(frozen=True)
class CoverEstimate:
    """Hit/unhit counts over an n grid with dimension slopes and predictions."""

    kappa: float
    slack: float
    n_grid: np.ndarray
    K_covered: np.ndarray        # horizons used for the hit counts
    K_escape: np.ndarray         # slack-reduced horizons used for the unhit counts
    D: np.ndarray                # distinct words hit within K_covered
    U: np.ndarray                # words unhit within K_escape
    saturated: np.ndarray        # horizon clipped by the orbit length
    dim_covered_est: np.ndarray  # log2(max(D,1)) / n
    dim_escape_est: np.ndarray   # log2(max(U,1)) / n
    slope_covered: float
    slope_covered_se: float
    slope_escape: float
    slope_escape_se: float
    prediction: CoverPrediction | None


def estimate_dims(
    orbit: Orbit,
    kappa: float,
    n_grid,
    slack: float = 0.05,
    prediction: CoverPrediction | None = None,
) -> CoverEstimate:
    """Estimate the two covering dimensions from hit censuses along an n grid.

    The hit count D_n uses the horizon floor(2**(n/kappa)); the unhit count
    U_n uses the slack-reduced horizon floor(2**((1/kappa - slack) n)), which
    guards the open/closed boundary of the escape set.  Both horizons are
    capped at the available shifts, and the cap is reported per n as
    `saturated` since it degrades the estimate rather than invalidating it.
    """
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    s = 1.0 / kappa
    n_grid = np.asarray(list(n_grid), dtype=np.int64)
    K_cov = np.empty(len(n_grid), dtype=np.int64)
    K_esc = np.empty(len(n_grid), dtype=np.int64)
    D = np.empty(len(n_grid), dtype=np.int64)
    U = np.empty(len(n_grid), dtype=np.int64)
    sat = np.zeros(len(n_grid), dtype=bool)
    for i, n in enumerate(n_grid):
        avail = orbit.length - int(n)
        want_cov = int(min(np.floor(2.0 ** (s * n)), 2**62))
        want_esc = int(min(np.floor(2.0 ** ((s - slack) * n)), 2**62))
        K_cov[i] = min(want_cov, avail)
        K_esc[i] = min(want_esc, avail, K_cov[i])
        sat[i] = want_cov > avail
        _, counts = _census_scan(orbit, int(n), [int(K_esc[i]), int(K_cov[i])])
        d_esc, _ = counts[0]
        d_cov, _ = counts[1]
        D[i] = d_cov
        U[i] = (1 << int(n)) - d_esc
    dim_cov = np.log2(np.maximum(D, 1)) / n_grid
    dim_esc = np.log2(np.maximum(U, 1)) / n_grid
    fit_cov = linregress(n_grid, np.log2(np.maximum(D, 1)))
    fit_esc = linregress(n_grid, np.log2(np.maximum(U, 1)))
    return CoverEstimate(
        kappa=float(kappa),
        slack=float(slack),
        n_grid=n_grid,
        K_covered=K_cov,
        K_escape=K_esc,
        D=D,
        U=U,
        saturated=sat,
        dim_covered_est=dim_cov,
        dim_escape_est=dim_esc,
        slope_covered=float(fit_cov.slope),
        slope_covered_se=float(fit_cov.stderr),
        slope_escape=float(fit_esc.slope),
        slope_escape_se=float(fit_esc.stderr),
        prediction=prediction,
    )


# ---------------------------------------------------------------------------
# subword census


@dataclass(frozen=True)
class CensusBin:
    beta_center: float
    count: int
    log2_count_over_n: float
    predicted: float      # max(0, min(E(beta), E(beta) - beta + log2(L)/n))


@dataclass(frozen=True)
class CensusReport:
    n: int
    L: int
    bin_width: float
    total_distinct: int
    bins: list[CensusBin]


def subword_census(
    orbit: Orbit,
    chain: GibbsChain,
    n: int,
    L: int,
    bin_width: float = 0.05,
    spectrum: Spectrum | None = None,
) -> CensusReport:
    """Distinct n-subwords of the first L windows, binned by local entropy.

    Each distinct word w gets the exact beta = -(1/n) log2 mu(C_n(w)); bins of
    the given width then carry the distinct count next to the predicted
    exponent max(0, min(E(beta), E(beta) - beta + log2(L)/n)) at the bin
    center.
    """
    if n > 26:
        raise MemoryBudgetError("subword census supports n <= 26")
    L = min(L, orbit.length - n + 1)
    seen, _ = _census_scan(orbit, n, [L], start=0)
    codes = np.flatnonzero(seen)
    total = len(codes)
    beta = -log2_measures_of_codes(chain, codes, n) / n
    idx = np.floor(beta / bin_width).astype(np.int64)
    log2L = float(np.log2(L))
    bins: list[CensusBin] = []
    ext = spectrum.extremes() if spectrum is not None else None
    for b in np.unique(idx):
        cnt = int(np.count_nonzero(idx == b))
        center = (float(b) + 0.5) * bin_width
        if spectrum is not None:
            # the center is only a bin label; evaluate the spectrum at the
            # nearest attainable entropy so boundary bins are not zeroed out
            at = min(max(center, ext.t_min), ext.t_max)
            E = spectrum.entropy(at)
            pred = max(0.0, min(E, E - center + log2L / n)) if np.isfinite(E) else 0.0
        else:
            pred = float("nan")
        bins.append(CensusBin(center, cnt, float(np.log2(cnt) / n), pred))
    return CensusReport(n, L, bin_width, total, bins)


# ---------------------------------------------------------------------------
# direct circle covering


@dataclass(frozen=True)
class CircleCoverReport:
    kappa: float
    depth: int
    n_start: int
    n_stop: int
    covered_cells: int
    uncovered_cells: int
    uncovered: list[int]      # cell indices at the given depth, possibly truncated
    truncated: bool


def circle_cover_report(
    source: Orbit | CirclePoint,
    kappa: float,
    depth: int,
    n_start: int,
    n_stop: int,
    max_list: int = 1024,
) -> CircleCoverReport:
    """Mark dyadic cells intersected by the shrinking intervals around the orbit.

    The interval at time n has center given by the n-th image of the source
    point under doubling and radius n**-kappa.  The report lists cells at the
    requested dyadic depth that no interval with n_start <= n <= n_stop
    touches.
    """
    if depth > 24:
        raise ValueError("depth must be at most 24")
    if n_start < 2:
        raise ValueError("n_start must be at least 2")
    if float(n_start) ** -kappa >= 0.5:
        raise ValueError("radius at n_start must be below 1/2")
    size = 1 << depth
    covered = np.zeros(size, dtype=bool)
    centers = _doubling_centers(source, n_start, n_stop)
    for n, c in zip(range(n_start, n_stop + 1), centers):
        r = float(n) ** -kappa
        lo = (c - r) % 1.0
        hi = lo + 2 * r
        k_lo = int(np.floor(lo * size))
        k_hi = int(np.floor(hi * size))
        if (k_hi - k_lo) >= size - 1:
            covered[:] = True
            continue
        if k_hi < size:
            covered[k_lo : k_hi + 1] = True
        else:
            covered[k_lo:] = True
            covered[: (k_hi % size) + 1] = True
    uncovered = np.flatnonzero(~covered)
    return CircleCoverReport(
        kappa=float(kappa),
        depth=depth,
        n_start=n_start,
        n_stop=n_stop,
        covered_cells=int(covered.sum()),
        uncovered_cells=int(len(uncovered)),
        uncovered=[int(x) for x in uncovered[:max_list]],
        truncated=len(uncovered) > max_list,
    )


def _doubling_centers(source: Orbit | CirclePoint, n_start: int, n_stop: int) -> np.ndarray:
    if isinstance(source, Orbit):
        if n_stop + 1 > source.length:
            raise ValueError("orbit shorter than the requested time range")
        w = min(64, source.length - n_stop)
        codes = source.window_codes(w, n_start, n_stop + 1)
        vals = np.zeros(len(codes))
        half = 0.5
        for i in range(w):
            vals += ((codes >> np.uint64(i)) & np.uint64(1)).astype(np.float64) * half
            half *= 0.5
        return vals
    vals = np.empty(n_stop - n_start + 1)
    x = Fraction(source.value)
    for n in range(n_stop + 1):
        if n >= n_start:
            vals[n - n_start] = float(x)
        x = (2 * x) % 1
    return vals
