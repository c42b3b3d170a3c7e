"""Pressure curves, the local-entropy spectrum and predicted covering exponents.

For a normalized potential the curve q -> P(q phi) is convex with P(1) = 0;
its negative slope t(q) = -P'(q phi) sweeps the interval of attainable local
entropies, and the spectrum E(t) = P(q phi) + q t at t(q) = t is the concave
Legendre dual.  The derivative is evaluated through the exact identity
P'(q) = integral of phi against the Gibbs chain of q*phi, with central finite
differences kept only as a cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.optimize import brentq

from . import thermo
from .meancycle import MeanCycleResult, mean_cycle_extremes
from .thermo import GibbsChain, Potential, debruijn, ensure_normalized, gibbs_chain

Q_CAP = 64.0
ENDPOINT_EPS = 2.0**-20
DEFAULT_Q_GRID = np.linspace(-8.0, 8.0, 513)


@dataclass(frozen=True)
class SpectrumSummary:
    """Extremal local entropies and the entropy of the Gibbs measure."""

    t_min: float    # least local entropy over invariant measures
    t_peak: float   # local entropy of the maximal-entropy measure (spectrum peak)
    t_max: float    # largest local entropy
    h_mu: float     # entropy of the Gibbs measure, = t(1)
    degenerate: bool
    t_min_exact: Fraction
    t_max_exact: Fraction


@dataclass(frozen=True)
class SpectrumPoint:
    t: float
    value: float    # nan when the level set is empty
    status: str     # "ok" | "empty" | "endpoint-approximate" | "degenerate"


@dataclass(frozen=True)
class SpectrumProfile:
    potential: Potential
    q_grid: np.ndarray
    P_values: np.ndarray
    t_values: np.ndarray
    E_values: np.ndarray     # E(t(q)) = P(q phi) + q t(q)
    summary: SpectrumSummary


@dataclass(frozen=True)
class CoverPrediction:
    """Predicted dimensions of the uncovered and infinitely-covered sets."""

    kappa: float
    dim_escape: float        # points the shrinking intervals eventually miss
    dim_covered: float       # points covered infinitely often
    escape_empty: bool       # everything covered infinitely often
    kappa_pair: float        # critical kappa for full target-measure coverage
    kappa_cover_all: float   # critical kappa below which escape is empty
    endpoint_caveat: bool = False


class Spectrum:
    """Pressure/spectrum machinery for one normalized potential, with caching.

    An optional (S, 2) boolean edge mask restricts everything to the subshift
    of sequences whose transitions stay on allowed de Bruijn edges; in that
    case pressures, t(q) and the Legendre transform are those of the
    restricted system while the potential stays full-shift normalized.
    """

    def __init__(self, pot: Potential, q_cap: float = Q_CAP, allowed: np.ndarray | None = None):
        ensure_normalized(pot)
        self.pot = pot
        self.q_cap = float(q_cap)
        self._graph = debruijn(pot.memory)
        self._allowed = allowed
        self._neg_table = -pot.table
        self._warm: tuple[np.ndarray, np.ndarray] | None = None
        self._extremes_cache: SpectrumSummary | None = None

    # -- eigen data ---------------------------------------------------------

    def _solve(self, qs: np.ndarray, warm: bool = False):
        logw = thermo._log_weights(self.pot, qs, self._graph, self._allowed)
        h0 = nu0 = None
        if warm and self._warm is not None and len(qs) == 1:
            h0, nu0 = self._warm
        logl, h, nu = thermo._perron_batch(logw, self._graph, h0=h0, nu0=nu0)
        if len(qs) == 1:
            self._warm = (h.copy(), nu.copy())
        return logl, h, nu, logw

    def pressure(self, q: float) -> float:
        return float(self._solve(np.array([q]), warm=True)[0][0])

    def pressure_grid(self, qs: np.ndarray) -> np.ndarray:
        return self._solve(np.asarray(qs, dtype=float))[0]

    def _t_from_eigen(self, logl, h, nu, logw) -> np.ndarray:
        # edge measure of the chain of q*phi: nu_u * w_ub * h_v / lambda
        nxt = self._graph.nxt
        w = np.exp2(logw - logl[:, None, None])
        em = nu[:, :, None] * w
        em[:, :, 0] *= h[:, nxt[:, 0]]
        em[:, :, 1] *= h[:, nxt[:, 1]]
        em /= em.sum(axis=(1, 2))[:, None, None]
        vals = self._neg_table[self._graph.edge_word]
        return (em * vals[None, :, :]).sum(axis=(1, 2))

    def t(self, q: float) -> float:
        """t(q) = -P'(q phi) = integral of -phi against the chain of q*phi."""
        logl, h, nu, logw = self._solve(np.array([q]), warm=True)
        return float(self._t_from_eigen(logl, h, nu, logw)[0])

    def t_grid(self, qs: np.ndarray) -> np.ndarray:
        logl, h, nu, logw = self._solve(np.asarray(qs, dtype=float))
        return self._t_from_eigen(logl, h, nu, logw)

    # -- extremes -------------------------------------------------------------

    def extremes(self) -> SpectrumSummary:
        if self._extremes_cache is not None:
            return self._extremes_cache
        g = self._graph
        edges = []
        for u in range(g.n_states):
            for b in (0, 1):
                if self._allowed is not None and not self._allowed[u, b]:
                    continue
                edges.append((u, int(g.nxt[u, b]), float(self._neg_table[g.edge_word[u, b]])))
        mc: MeanCycleResult = mean_cycle_extremes(g.n_states, edges)
        t_peak = self.t(0.0)
        h_mu = self.t(1.0)
        summary = SpectrumSummary(
            t_min=float(mc.minimum),
            t_peak=t_peak,
            t_max=float(mc.maximum),
            h_mu=h_mu,
            degenerate=mc.degenerate,
            t_min_exact=mc.minimum,
            t_max_exact=mc.maximum,
        )
        self._extremes_cache = summary
        return summary

    # -- the spectrum -----------------------------------------------------------

    def entropy_point(self, t: float) -> SpectrumPoint:
        """E(t) with a status flag; nan when the level set is empty."""
        ext = self.extremes()
        if ext.degenerate:
            if abs(t - ext.t_peak) <= 1e-9:
                # single-point spectrum: the value is the (sub)shift's entropy
                return SpectrumPoint(t, self.pressure(0.0), "degenerate")
            return SpectrumPoint(t, float("nan"), "empty")
        if t < ext.t_min or t > ext.t_max:
            return SpectrumPoint(t, float("nan"), "empty")
        near_edge = min(t - ext.t_min, ext.t_max - t) < ENDPOINT_EPS
        lo, hi = -self.q_cap, self.q_cap
        f_lo = self.t(lo) - t
        f_hi = self.t(hi) - t
        if f_lo <= 0:
            q_star = lo
        elif f_hi >= 0:
            q_star = hi
        else:
            q_star = brentq(lambda q: self.t(q) - t, lo, hi, xtol=1e-12, rtol=1e-14)
        value = self.pressure(q_star) + q_star * t
        status = "endpoint-approximate" if (near_edge or abs(q_star) >= self.q_cap) else "ok"
        return SpectrumPoint(t, float(value), status)

    def entropy(self, t: float) -> float:
        return self.entropy_point(t).value

    def entropy_batch(self, ts, iters: int = 30) -> np.ndarray:
        """E(t) for many t at once, by bisection vectorized across targets.

        The returned values match :meth:`entropy` to well below 1e-8: the
        Legendre value is stationary in q at the optimum, so the residual
        interval width 128 * 2**-iters enters only quadratically.
        """
        ts = np.asarray(ts, dtype=float)
        ext = self.extremes()
        out = np.full(ts.shape, np.nan)
        if ext.degenerate:
            out[np.abs(ts - ext.t_peak) <= 1e-9] = self.pressure(0.0)
            return out
        ok = (ts >= ext.t_min) & (ts <= ext.t_max)
        if not ok.any():
            return out
        tt = ts[ok]
        lo = np.full(len(tt), -self.q_cap)
        hi = np.full(len(tt), self.q_cap)
        h0 = nu0 = None
        mid = logl = None
        for _ in range(iters + 1):
            mid = 0.5 * (lo + hi)
            logw = thermo._log_weights(self.pot, mid, self._graph, self._allowed)
            logl, h, nu = thermo._perron_batch(logw, self._graph, h0=h0, nu0=nu0)
            tm = self._t_from_eigen(logl, h, nu, logw)
            go_right = tm >= tt
            lo = np.where(go_right, mid, lo)
            hi = np.where(go_right, hi, mid)
            h0, nu0 = h, nu
        out[ok] = logl + mid * tt
        return out

    def profile(self, q_grid: np.ndarray | None = None) -> SpectrumProfile:
        qs = DEFAULT_Q_GRID if q_grid is None else np.asarray(q_grid, dtype=float)
        logl, h, nu, logw = self._solve(qs)
        ts = self._t_from_eigen(logl, h, nu, logw)
        Es = logl + qs * ts
        return SpectrumProfile(self.pot, qs, logl, ts, Es, self.extremes())


# ---------------------------------------------------------------------------
# functional wrappers


def t_of_q(pot: Potential, q: float) -> float:
    return Spectrum(pot).t(q)


def t_of_q_fd(pot: Potential, q: float, dq: float = 1e-5) -> float:
    """Finite-difference cross-check of t(q) = -P'(q phi)."""
    sp = Spectrum(pot)
    return -(sp.pressure(q + dq) - sp.pressure(q - dq)) / (2 * dq)


def entropy_spectrum(pot: Potential, t: float) -> float:
    """Spectrum value E(t); nan when no point has local entropy t."""
    return Spectrum(pot).entropy(t)


def local_entropy_extremes(pot: Potential) -> SpectrumSummary:
    return Spectrum(pot).extremes()


def upper_envelopes(profile: SpectrumProfile) -> tuple[np.ndarray, np.ndarray]:
    """Grid values of sup_{s < t} E(s) and sup_{s >= t} E(s) along t_values.

    t_values decrease along the q grid, so the "below t" envelope is a
    running maximum from the tail and the "at least t" envelope from the
    head.
    """
    E = profile.E_values
    sup_lt = np.maximum.accumulate(E[::-1])[::-1]
    sup_ge = np.maximum.accumulate(E)
    return sup_lt, sup_ge


def predict_cover(
    pot_phi: Potential,
    pot_psi: Potential | None,
    kappa: float,
    spectrum: Spectrum | None = None,
) -> CoverPrediction:
    """Predicted dimensions of the escape/covered dichotomy at radius n**-kappa."""
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    sp = spectrum if spectrum is not None else Spectrum(pot_phi)
    ext = sp.extremes()
    s = 1.0 / kappa
    endpoint = False

    if s <= ext.t_peak:
        dim_escape = 1.0
    elif s > ext.t_max:
        dim_escape = 0.0
    else:
        pt = sp.entropy_point(s)
        dim_escape = pt.value
        if abs(s - ext.t_max) < ENDPOINT_EPS:
            endpoint = True  # behavior exactly at the top entropy is not resolved

    if s <= ext.h_mu:
        dim_covered = s
    elif s >= ext.t_peak:
        dim_covered = 1.0
    else:
        dim_covered = sp.entropy_point(s).value

    if pot_psi is not None:
        chain_psi = gibbs_chain(pot_psi)
        kappa_pair = 1.0 / -integrate_against(chain_psi, pot_phi)
    else:
        kappa_pair = 1.0 / ext.h_mu

    return CoverPrediction(
        kappa=float(kappa),
        dim_escape=float(dim_escape),
        dim_covered=float(dim_covered),
        escape_empty=bool(s > ext.t_max),
        kappa_pair=float(kappa_pair),
        kappa_cover_all=float(1.0 / ext.t_max),
        endpoint_caveat=endpoint,
    )


def integrate_against(chain: GibbsChain, f: Potential) -> float:
    """Integral of a potential of any memory against the chain's measure."""
    if f.memory == chain.memory:
        return chain.integrate(f)
    if f.memory >= max(chain.memory - 1, 1):
        mu = np.exp2(thermo.log2_measure_table(chain, f.memory))
    else:
        from .symbolic import Word

        mu = np.array(
            [thermo.cylinder_measure(chain, Word.from_code(c, f.memory)) for c in range(1 << f.memory)]
        )
    return float((mu * f.table).sum())
