"""Subshifts of finite type: restricted pressure, spectrum and predictions.

The subshift is given by a finite set of forbidden words.  Transfer matrices
are the full-shift ones with every de Bruijn edge removed whose window
contains a forbidden word, taken at the level M = max(potential memory,
longest forbidden word); with no forbidden words the construction reduces
to the full-shift one bit for bit.

The restricted Legendre transform needs no shifted potential: with a
full-shift-normalized phi, the spectrum of local (full-shift) entropies
inside the subshift is E_A(a) = P_A(q phi) + q a at the q where the
restricted chain of q phi integrates -phi to a.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import networkx as nx
import numpy as np

from .bits import mask
from .spectrum import Spectrum, SpectrumPoint
from .symbolic import Word
from .thermo import (
    DegenerateSpectrumError,
    GibbsChain,
    Potential,
    debruijn,
    ensure_normalized,
    gibbs_chain,
    lift_potential,
)


@dataclass(frozen=True)
class SftSpec:
    """A subshift of finite type, as a tuple of forbidden binary words."""

    forbidden: tuple[Word, ...]

    @classmethod
    def from_strings(cls, words) -> "SftSpec":
        return cls(tuple(Word.from_string(w) for w in words))

    @classmethod
    def full_shift(cls) -> "SftSpec":
        return cls(())

    @classmethod
    def golden_mean(cls) -> "SftSpec":
        return cls.from_strings(["11"])

    @property
    def order(self) -> int:
        return max((w.n for w in self.forbidden), default=1)

    def is_full_shift(self) -> bool:
        return len(self.forbidden) == 0

    def admissible_codes(self, codes: np.ndarray, n: int) -> np.ndarray:
        """Mask of n-word codes containing no forbidden subword."""
        ok = np.ones(len(codes), dtype=bool)
        for f in self.forbidden:
            if f.n > n:
                continue
            fcode = np.uint64(f.code)
            fmask = np.uint64(mask(f.n))
            for off in range(n - f.n + 1):
                ok &= ((codes >> np.uint64(off)) & fmask) != fcode
        return ok

    def admissible_mask(self, n: int) -> np.ndarray:
        """Admissibility of every n-word, indexed by code."""
        return self.admissible_codes(np.arange(1 << n, dtype=np.uint64), n)

    def word_admissible(self, w: Word) -> bool:
        return bool(self.admissible_codes(np.array([w.code], dtype=np.uint64), w.n)[0])

    # --- structured text format -------------------------------------------

    def to_text(self) -> str:
        return "".join(f"forbid = {w}\n" for w in self.forbidden)

    def write(self, path) -> None:
        with open(path, "w") as f:
            f.write(self.to_text())

    @classmethod
    def from_text(cls, text: str) -> "SftSpec":
        words = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, _, val = line.partition("=")
            if key.strip() != "forbid":
                raise ValueError(f"line {lineno}: expected 'forbid = <word>'")
            words.append(val.strip())
        return cls.from_strings(words)

    @classmethod
    def read(cls, path) -> "SftSpec":
        with open(path) as f:
            return cls.from_text(f.read())


def transfer_level(sft: SftSpec, pot: Potential) -> int:
    """Word length carried by one masked de Bruijn edge."""
    return max(pot.memory, sft.order)


def edge_mask(sft: SftSpec, level: int) -> np.ndarray | None:
    """(S, 2) mask of de Bruijn edges whose level-word avoids all forbidden words.

    None for the full shift, so downstream code takes exactly the unmasked
    path and reduction identities hold bit for bit.
    """
    if sft.is_full_shift():
        return None
    g = debruijn(level)
    words = g.edge_word.ravel().astype(np.uint64)
    return sft.admissible_codes(words, level).reshape(g.edge_word.shape)


def check_primitive(sft: SftSpec, level: int) -> None:
    """Reject subshifts whose admissible-state graph is not primitive."""
    allowed = edge_mask(sft, level)
    g = debruijn(level)
    dg = nx.DiGraph()
    for u in range(g.n_states):
        for b in (0, 1):
            if allowed is None or allowed[u, b]:
                dg.add_edge(u, int(g.nxt[u, b]))
    # keep only states that are themselves admissible words
    if level > 1:
        clean = sft.admissible_mask(level - 1)
        dg.remove_nodes_from([u for u in list(dg.nodes) if not clean[u]])
    if dg.number_of_nodes() == 0:
        raise DegenerateSpectrumError("subshift is empty")
    if not nx.is_strongly_connected(dg):
        raise DegenerateSpectrumError("subshift transition graph is not strongly connected")
    if not nx.is_aperiodic(dg):
        raise DegenerateSpectrumError("subshift transition graph is periodic")


class SftSystem:
    """A normalized full-shift potential restricted to a primitive SFT."""

    def __init__(self, sft: SftSpec, pot: Potential):
        ensure_normalized(pot)
        self.sft = sft
        self.level = transfer_level(sft, pot)
        check_primitive(sft, self.level)
        self.pot = lift_potential(pot, self.level)
        self.allowed = edge_mask(sft, self.level)
        self.spectrum = Spectrum(self.pot, allowed=self.allowed)

    @cached_property
    def pressure_at_one(self) -> float:
        """P_A(phi restricted): <= 0 for a normalized full-shift potential."""
        return self.spectrum.pressure(1.0)

    @cached_property
    def dim(self) -> float:
        """Dimension (= topological entropy) of the subshift."""
        return self.spectrum.pressure(0.0)

    def pressure(self, q: float) -> float:
        return self.spectrum.pressure(q)

    def chain(self, q: float = 1.0) -> GibbsChain:
        """Restricted Gibbs chain of q * phi (the measure of phi_A when q = 1)."""
        return gibbs_chain(self.pot, q, self.allowed)

    @cached_property
    def summary(self) -> "SftProfile":
        ext = self.spectrum.extremes()
        P_A = self.pressure_at_one
        # ext.h_mu is integral of -phi against the restricted Gibbs chain; the
        # entropy of that chain shifts by the restricted pressure
        h_A = ext.h_mu + P_A
        return SftProfile(
            P_A=P_A,
            dim=self.dim,
            t_min=ext.t_min,
            t_peak=ext.t_peak,
            t_max=ext.t_max,
            h_restricted=h_A,
            covered_band_top=ext.h_mu,
            degenerate=ext.degenerate,
        )

    def entropy_point(self, t: float) -> SpectrumPoint:
        """Restricted spectrum of full-shift local entropies inside the subshift."""
        return self.spectrum.entropy_point(t)

    def entropy(self, t: float) -> float:
        return self.spectrum.entropy(t)


@dataclass(frozen=True)
class SftProfile:
    P_A: float                 # restricted pressure of the potential
    dim: float                 # log2 spectral radius of the adjacency
    t_min: float               # extreme full-shift local entropies on the subshift
    t_peak: float
    t_max: float
    h_restricted: float        # entropy of the restricted Gibbs measure
    covered_band_top: float    # upper edge of the linear band: h_restricted - P_A
    degenerate: bool


@dataclass(frozen=True)
class SftPrediction:
    kappa: float
    dim_escape: float
    dim_covered: float
    escape_empty: bool      # 1/kappa above the largest attainable exponent
    covered_empty: bool     # 1/kappa below -P_A: targets in the subshift too rare
    boundary_flag: bool     # 1/kappa within 2^-20 of a case boundary


def sft_pressure(sft: SftSpec, pot: Potential, q: float = 1.0) -> float:
    """Restricted pressure P_A(q phi) on the masked transfer matrix."""
    return SftSystem(sft, pot).pressure(q)


def sft_extremes(sft: SftSpec, pot: Potential) -> tuple[float, float, float, float, float]:
    """(t_min, t_peak, t_max, h_restricted, dim) of the restricted system."""
    s = SftSystem(sft, pot).summary
    return s.t_min, s.t_peak, s.t_max, s.h_restricted, s.dim


def sft_spectrum(sft: SftSpec, pot: Potential, t: float) -> float:
    """Restricted spectrum value at full-shift local entropy t (nan if empty)."""
    return SftSystem(sft, pot).entropy(t)


def sft_predict(sft: SftSpec, pot: Potential, kappa: float, system: SftSystem | None = None) -> SftPrediction:
    """Predicted dimensions of the escape/covered split inside the subshift."""
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    sys_ = system if system is not None else SftSystem(sft, pot)
    s = 1.0 / kappa
    prof = sys_.summary
    eps = 2.0**-20

    if s <= prof.t_peak:
        dim_escape = prof.dim
    elif s > prof.t_max:
        dim_escape = 0.0
    else:
        dim_escape = sys_.entropy(s)

    covered_empty = s < -prof.P_A
    if covered_empty:
        dim_covered = 0.0
    elif s <= prof.covered_band_top:
        dim_covered = s + prof.P_A
    elif s >= prof.t_peak:
        dim_covered = prof.dim
    else:
        dim_covered = sys_.entropy(s)

    boundary = min(
        abs(s + prof.P_A), abs(s - prof.covered_band_top), abs(s - prof.t_peak), abs(s - prof.t_max)
    ) < eps
    return SftPrediction(
        kappa=float(kappa),
        dim_escape=float(dim_escape),
        dim_covered=float(dim_covered),
        escape_empty=bool(s > prof.t_max),
        covered_empty=bool(covered_empty),
        boundary_flag=bool(boundary),
    )
