"""Finite-memory potentials, transfer matrices, pressure and exact Gibbs chains.

A potential of memory m is a function of the first m symbols, tabulated on
the 2**m words of length m.  Its transfer matrix lives on the de Bruijn graph
of (m-1)-words: the edge from state u emitting symbol b carries the m-word
``u | (b << (m-1))`` and the weight ``2**(q * phi(word))``.  All logarithms
and exponents are base 2, so pressure, entropy and dimension share one scale.

The Gibbs measure of a finite-memory potential is an exact stationary Markov
chain on the (m-1)-word states, which gives every downstream quantity an
exact oracle (cylinder measures, entropies, Gibbs constants).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from numba import njit

from .bits import pack_bits
from .symbolic import Orbit, Word

MAX_MEMORY = 16


class DegenerateSpectrumError(RuntimeError):
    """Raised when the induced transfer graph has no usable Perron data."""


class SolverError(RuntimeError):
    """Raised when the eigensolver fails to reach the target residual."""


class MemoryBudgetError(MemoryError):
    """Raised when an enumeration would exceed the documented budgets."""


# ---------------------------------------------------------------------------
# potentials


@dataclass(frozen=True)
class Potential:
    """Real-valued function of the first `memory` symbols, tabulated by word code."""

    memory: int
    table: np.ndarray
    normalized: bool = False

    def __post_init__(self):
        if not 1 <= self.memory <= MAX_MEMORY:
            raise ValueError(f"memory must be in 1..{MAX_MEMORY}")
        table = np.asarray(self.table, dtype=np.float64)
        if table.shape != (1 << self.memory,):
            raise ValueError("table must have exactly 2**memory entries")
        if not np.all(np.isfinite(table)):
            raise ValueError("table entries must be finite")
        table = table.copy()
        table.setflags(write=False)
        object.__setattr__(self, "table", table)

    @classmethod
    def from_entries(cls, entries: dict[str, float], normalized: bool = False) -> "Potential":
        """Build from a mapping of word strings ('01', '10', ...) to values."""
        lengths = {len(w) for w in entries}
        if len(lengths) != 1:
            raise ValueError("all table keys must have the same length")
        m = lengths.pop()
        table = np.full(1 << m, np.nan)
        for w, v in entries.items():
            table[Word.from_string(w).code] = float(v)
        if np.any(np.isnan(table)):
            raise ValueError("table is missing entries")
        return cls(m, table, normalized)

    @classmethod
    def bernoulli(cls, p0: float) -> "Potential":
        """Memory-1 potential of the (p0, 1-p0) product measure; already normalized."""
        return cls(1, np.log2([p0, 1.0 - p0]), normalized=True)

    def value(self, word: Word) -> float:
        if word.n != self.memory:
            raise ValueError("word length must equal the potential memory")
        return float(self.table[word.code])

    def scaled(self, q: float) -> "Potential":
        return Potential(self.memory, q * self.table)

    def shifted(self, c: float) -> "Potential":
        return Potential(self.memory, self.table + c)

    def word_sum(self, word: Word) -> float:
        """Sum of the potential over all complete length-m windows of the word."""
        m = self.memory
        if word.n < m:
            raise ValueError("word shorter than the potential memory")
        code = word.code
        wmask = (1 << m) - 1
        return float(sum(self.table[(code >> i) & wmask] for i in range(word.n - m + 1)))

    # --- key = value text format -------------------------------------------

    def to_text(self) -> str:
        lines = [f"memory = {self.memory}", f"normalized = {str(self.normalized).lower()}"]
        for code in range(1 << self.memory):
            w = Word.from_code(code, self.memory)
            lines.append(f"table[{w}] = {float(self.table[code])!r}")
        return "\n".join(lines) + "\n"

    def write(self, path) -> None:
        with open(path, "w") as f:
            f.write(self.to_text())

    @classmethod
    def from_text(cls, text: str) -> "Potential":
        memory = None
        normalized = False
        entries: dict[str, float] = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"line {lineno}: expected 'key = value', got {raw!r}")
            key, val = (s.strip() for s in line.split("=", 1))
            if key == "memory":
                memory = int(val)
            elif key == "normalized":
                normalized = val.lower() in ("true", "1", "yes")
            elif key.startswith("table[") and key.endswith("]"):
                entries[key[6:-1].strip()] = float(val)
            else:
                raise ValueError(f"line {lineno}: unknown key {key!r}")
        if memory is None:
            raise ValueError("potential file is missing 'memory'")
        pot = cls.from_entries(entries, normalized)
        if pot.memory != memory:
            raise ValueError("declared memory does not match table keys")
        return pot

    @classmethod
    def read(cls, path) -> "Potential":
        with open(path) as f:
            pot = cls.from_text(f.read())
        if pot.normalized:
            p = pressure(replace(pot, normalized=False), 1.0)
            if abs(p) > 1e-10:
                raise ValueError(f"{path}: normalized flag set but pressure is {p:.3e}")
        return pot


# ---------------------------------------------------------------------------
# de Bruijn structure and the Perron solver


@dataclass(frozen=True)
class DeBruijn:
    """Successor/edge-word tables of the de Bruijn graph on (m-1)-word states."""

    m: int
    n_states: int
    nxt: np.ndarray        # (S, 2) state after emitting bit b
    edge_word: np.ndarray  # (S, 2) code of the m-word on the edge
    uin: np.ndarray        # (S, 2) the two predecessor states of each state
    bin_: np.ndarray       # (S, 2) bit emitted on each in-edge

    @classmethod
    def build(cls, m: int) -> "DeBruijn":
        S = 1 << (m - 1)
        states = np.arange(S, dtype=np.int64)
        if m == 1:
            nxt = np.zeros((1, 2), dtype=np.int64)
            edge_word = np.array([[0, 1]], dtype=np.int64)
            uin = np.zeros((1, 2), dtype=np.int64)
            bin_ = np.array([[0, 1]], dtype=np.int64)
            return cls(m, S, nxt, edge_word, uin, bin_)
        top = 1 << (m - 2)
        nxt = np.stack([states >> 1, (states >> 1) | top], axis=1)
        edge_word = np.stack([states, states | (1 << (m - 1))], axis=1)
        # v is reached from ((v & (top-1)) << 1) | a by emitting v's top bit
        uin = np.stack([(states & (top - 1)) << 1, ((states & (top - 1)) << 1) | 1], axis=1)
        b = (states >> (m - 2)) & 1
        bin_ = np.stack([b, b], axis=1)
        return cls(m, S, nxt, edge_word, uin, bin_)


_DEBRUIJN_CACHE: dict[int, DeBruijn] = {}

DENSE_FALLBACK_LIMIT = 512


def debruijn(m: int) -> DeBruijn:
    if m not in _DEBRUIJN_CACHE:
        _DEBRUIJN_CACHE[m] = DeBruijn.build(m)
    return _DEBRUIJN_CACHE[m]


def _dense_perron(w: np.ndarray, graph: DeBruijn) -> tuple[float, np.ndarray, np.ndarray]:
    """Perron data of one (already rescaled) weight matrix by a dense solve."""
    import scipy.linalg

    S = w.shape[0]
    B = np.zeros((S, S))
    for b in (0, 1):
        np.add.at(B, (np.arange(S), graph.nxt[:, b]), w[:, b])
    vals, vl, vr = scipy.linalg.eig(B, left=True, right=True)
    i = int(np.argmax(vals.real))
    lam = float(vals[i].real)
    h = vr[:, i].real
    nu = vl[:, i].real
    h = h if h[np.argmax(np.abs(h))] > 0 else -h
    nu = nu if nu[np.argmax(np.abs(nu))] > 0 else -nu
    h = np.maximum(h, 0.0)
    nu = np.maximum(nu, 0.0)
    return lam, h / h.sum(), nu / nu.sum()


def _perron_batch(
    logw: np.ndarray,
    graph: DeBruijn,
    tol: float = 1e-13,
    max_iter: int = 100_000,
    h0: np.ndarray | None = None,
    nu0: np.ndarray | None = None,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Perron data for a batch of edge-weight matrices given as log2 weights.

    logw has shape (Q, S, 2); entry [k, u, b] is log2 of the weight on the
    edge from state u emitting bit b, with -inf meaning a removed edge.
    Returns (log2 of the Perron eigenvalue (Q,), right vectors h (Q, S),
    left vectors nu (Q, S)) normalized so <nu, h> = 1.

    Power iteration with L1 renormalization and a residual stopping rule;
    each matrix is rescaled by its maximal log-weight so entries stay in
    (0, 1] for any q.
    """
    logw = np.asarray(logw, dtype=np.float64)
    Q, S, _ = logw.shape
    scale = np.max(logw, axis=(1, 2))
    if not np.all(np.isfinite(scale)):
        raise DegenerateSpectrumError("a transfer matrix has no allowed edges")
    w = np.exp2(logw - scale[:, None, None])

    n0, n1 = graph.nxt[:, 0], graph.nxt[:, 1]
    u0, u1 = graph.uin[:, 0], graph.uin[:, 1]
    b0, b1 = graph.bin_[:, 0], graph.bin_[:, 1]
    win0 = w[:, u0, b0]
    win1 = w[:, u1, b1]

    # iterate on B + (delta * lambda) I: same Perron vectors, but the shift
    # keeps the iteration clear of the period-two oscillation that strong
    # weights on a single 2-cycle cause at large |q|, at any eigenvalue scale
    delta = 0.5
    h = np.full((Q, S), 1.0 / S) if h0 is None else h0 / h0.sum(axis=1, keepdims=True)
    nu = np.full((Q, S), 1.0 / S) if nu0 is None else nu0 / nu0.sum(axis=1, keepdims=True)
    lam = np.ones(Q)
    res_r = res_l = np.full(Q, np.inf)
    best, best_at = np.inf, 0
    done = False
    for it in range(max_iter):
        bh = w[:, :, 0] * h[:, n0] + w[:, :, 1] * h[:, n1]
        lam = bh.sum(axis=1)
        if np.any(lam <= 0) or not np.all(np.isfinite(lam)):
            raise DegenerateSpectrumError("transfer matrix iterate lost positivity")
        res_r = np.max(np.abs(bh - lam[:, None] * h), axis=1) / lam
        h = (bh + delta * lam[:, None] * h) / ((1 + delta) * lam[:, None])

        bn = win0 * nu[:, u0] + win1 * nu[:, u1]
        lam_l = bn.sum(axis=1)
        res_l = np.max(np.abs(bn - lam_l[:, None] * nu), axis=1) / lam_l
        nu = (bn + delta * lam_l[:, None] * nu) / ((1 + delta) * lam_l[:, None])
        if np.all(res_r < tol) and np.all(res_l < tol):
            done = True
            break
        cur = max(res_r.max(), res_l.max())
        if cur < 0.5 * best:
            best, best_at = cur, it
        elif it - best_at > 1500:
            break  # residual plateau: gap below the target, iteration useless
    if not done:
        # a spectral gap below the residual target stalls the iteration
        # (e.g. potentials with exactly tied extreme cycles); fall back to a
        # dense solve for the rows that did not converge
        stuck = np.flatnonzero((res_r >= tol) | (res_l >= tol))
        if S > DENSE_FALLBACK_LIMIT:
            raise SolverError(
                f"power iteration stalled at residual above {tol:g} and the "
                f"matrix is too large ({S} states) for the dense fallback"
            )
        for k in stuck:
            lam0, h[k], nu[k] = _dense_perron(w[k], graph)
            lam[k] = lam0
    inner = (h * nu).sum(axis=1)
    if np.any(inner <= 0):
        raise DegenerateSpectrumError("left/right eigenvectors do not pair")
    nu = nu / inner[:, None]
    return np.log2(lam) + scale, h, nu


def _log_weights(pot: Potential, q, graph: DeBruijn, allowed: np.ndarray | None = None) -> np.ndarray:
    qs = np.atleast_1d(np.asarray(q, dtype=np.float64))
    base = pot.table[graph.edge_word]  # (S, 2)
    logw = qs[:, None, None] * base[None, :, :]
    if allowed is not None:
        logw = np.where(allowed[None, :, :], logw, -np.inf)
    return logw


def lift_potential(pot: Potential, memory: int) -> Potential:
    """View a potential as one of larger memory (value from the first m symbols)."""
    if memory < pot.memory:
        raise ValueError("cannot lower the memory")
    if memory == pot.memory:
        return pot
    codes = np.arange(1 << memory) & ((1 << pot.memory) - 1)
    return Potential(memory, pot.table[codes], pot.normalized)


@dataclass(frozen=True)
class TransferSystem:
    """Perron data of the transfer matrix of q * phi."""

    potential: Potential
    q: float
    lam: float            # Perron eigenvalue
    pressure: float       # log2(lam)
    h: np.ndarray         # right eigenvector, > 0
    nu: np.ndarray        # left eigenvector, <nu, h> = 1
    spectral_gap_estimate: float = float("nan")

    @property
    def n_states(self) -> int:
        return len(self.h)


def transfer_system(pot: Potential, q: float = 1.0, with_gap: bool = False) -> TransferSystem:
    graph = debruijn(pot.memory)
    logw = _log_weights(pot, q, graph)
    logl, h, nu = _perron_batch(logw, graph)
    gap = _gap_estimate(logw[0], graph, logl[0], h[0], nu[0]) if with_gap else float("nan")
    return TransferSystem(pot, float(q), float(2.0 ** logl[0]), float(logl[0]), h[0], nu[0], gap)


def _gap_estimate(logw, graph, logl, h, nu, iters: int = 300) -> float:
    """Rough |lambda_2| / lambda estimate from power iteration on the complement.

    Diagnostic only; nothing downstream asserts on it.
    """
    S = len(h)
    if S == 1:
        return 0.0
    scale = np.max(logw)
    w = np.exp2(logw - scale)
    lam = 2.0 ** (logl - scale)
    n0, n1 = graph.nxt[:, 0], graph.nxt[:, 1]
    rng = np.random.default_rng(0)
    x = rng.standard_normal(S)
    x -= (nu * x).sum() * h
    ratio = 0.0
    for _ in range(iters):
        y = w[:, 0] * x[n0] + w[:, 1] * x[n1]
        y -= (nu * y).sum() * h
        norm = np.linalg.norm(y)
        if norm < 1e-280:
            return 0.0
        ratio = norm / np.linalg.norm(x)
        x = y / norm
    return float(ratio / lam)


def pressure(pot: Potential, q: float = 1.0) -> float:
    """Pressure P(q * phi): log2 of the Perron eigenvalue of the transfer matrix."""
    return transfer_system(pot, q).pressure


def pressure_grid(pot: Potential, qs: np.ndarray) -> np.ndarray:
    """Pressure at many q values with one batched solve."""
    graph = debruijn(pot.memory)
    logl, _, _ = _perron_batch(_log_weights(pot, np.asarray(qs), graph), graph)
    return logl


def normalize(pot: Potential) -> Potential:
    """Shift the table so the pressure at q = 1 vanishes."""
    p = pressure(pot, 1.0)
    return Potential(pot.memory, pot.table - p, normalized=True)


def ensure_normalized(pot: Potential, tol: float = 1e-8) -> None:
    if not pot.normalized:
        raise ValueError("operation requires a normalized potential (use normalize())")
    p = pressure(pot, 1.0)
    if abs(p) > tol:
        raise ValueError(f"potential is flagged normalized but has pressure {p:.3e}")


# ---------------------------------------------------------------------------
# Gibbs chains


@dataclass(frozen=True)
class GibbsChain:
    """Exact stationary Markov realization of the Gibbs measure of q * phi."""

    potential: Potential
    q: float
    pi: np.ndarray        # (S,) stationary distribution over (m-1)-word states
    p: np.ndarray         # (S, 2) probability of emitting bit b from each state
    h: np.ndarray
    nu: np.ndarray
    pressure: float

    @property
    def memory(self) -> int:
        return self.potential.memory

    @property
    def n_states(self) -> int:
        return len(self.pi)

    @property
    def graph(self) -> DeBruijn:
        return debruijn(self.memory)

    @property
    def entropy(self) -> float:
        """Entropy rate: -sum over edges of pi[u] p[u,b] log2 p[u,b]."""
        ep = self.pi[:, None] * self.p
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = np.where(ep > 0, ep * np.log2(np.where(self.p > 0, self.p, 1.0)), 0.0)
        return float(-terms.sum())

    def edge_measure(self) -> np.ndarray:
        """(S, 2) stationary probability of each edge, i.e. of each m-word."""
        return self.pi[:, None] * self.p

    def word_measures(self) -> np.ndarray:
        """Stationary measure of every m-word, indexed by word code."""
        em = self.edge_measure()
        out = np.zeros(1 << self.memory)
        np.add.at(out, self.graph.edge_word.ravel(), em.ravel())
        return out

    def integrate(self, f: Potential) -> float:
        """Integral of a same-memory potential against the stationary measure."""
        if f.memory != self.memory:
            raise ValueError("memory mismatch")
        return float((self.edge_measure() * f.table[self.graph.edge_word]).sum())


def gibbs_chain(pot: Potential, q: float = 1.0, allowed: np.ndarray | None = None) -> GibbsChain:
    """Markov chain of the Gibbs measure of q * phi.

    Transitions are B[u][v] h[v] / (lambda h[u]), so the normalization of the
    potential is implicit; the chain of phi and of phi - P(phi) coincide.
    With an ``allowed`` edge mask the chain realizes the Gibbs measure of the
    restriction to the corresponding subshift (states off the recurrent part
    get zero mass).
    """
    graph = debruijn(pot.memory)
    logw = _log_weights(pot, q, graph, allowed)
    logl, h, nu = _perron_batch(logw, graph)
    h, nu, logl0 = h[0], nu[0], float(logl[0])
    w = np.exp2(logw[0] - logl0)
    hpos = h > 0
    p = np.divide(
        w * h[graph.nxt], h[:, None], out=np.zeros_like(w), where=hpos[:, None]
    )
    rowsum = p.sum(axis=1)
    live = rowsum > 0.5
    if not np.allclose(rowsum[live], 1.0, atol=1e-10):
        raise SolverError("chain rows failed to normalize; eigen data inaccurate")
    p[live] = p[live] / rowsum[live][:, None]
    pi = nu * h
    pi = pi / pi.sum()
    return GibbsChain(pot, float(q), pi, p, h, nu, logl0)


def cylinder_measure(chain: GibbsChain, w: Word) -> float:
    """Exact stationary measure of the cylinder [w]."""
    m = chain.memory
    if w.n == 0:
        return 1.0
    if w.n < m - 1:
        # marginal of the stationary state distribution
        k = (m - 1) - w.n
        return float(sum(chain.pi[w.code | (ext << w.n)] for ext in range(1 << k)))
    code = w.code
    smask = (1 << (m - 1)) - 1
    prob = float(chain.pi[code & smask]) if m > 1 else 1.0
    for i in range(w.n - m + 1):
        state = (code >> i) & smask
        bit = (code >> (i + m - 1)) & 1
        prob *= chain.p[state, bit]
    return prob


def log2_measures_of_codes(chain: GibbsChain, codes: np.ndarray, n: int) -> np.ndarray:
    """Vectorized log2 cylinder measures for packed word codes of length n >= m-1."""
    m = chain.memory
    if n < m - 1:
        raise ValueError("words shorter than the state length")
    codes = codes.astype(np.int64, copy=False)
    smask = (1 << (m - 1)) - 1
    with np.errstate(divide="ignore"):
        out = np.log2(chain.pi[codes & smask]) if m > 1 else np.zeros(len(codes))
        logp = np.log2(chain.p)
    for i in range(n - m + 1):
        state = (codes >> i) & smask
        bit = (codes >> (i + m - 1)) & 1
        out = out + logp[state, bit]
    return out


def log2_measure_table(chain: GibbsChain, n: int, budget_bits: int = 26) -> np.ndarray:
    """log2 measure of every n-word, as an array indexed by word code.

    Dynamic programming over the word length; memory is O(2**n), which is the
    reason for the documented n <= 26 budget.
    """
    m = chain.memory
    if n > budget_bits:
        raise MemoryBudgetError(f"level-{n} table exceeds the 2**{budget_bits} budget")
    if n < max(m - 1, 1):
        raise ValueError("table length must be at least memory - 1")
    with np.errstate(divide="ignore"):
        logp = np.log2(chain.p)
        smask = (1 << (m - 1)) - 1
        if m > 1:
            cur = np.log2(chain.pi)
            k = m - 1
        else:
            cur = np.zeros(1)
            k = 0
    while k < n:
        size = 1 << k
        states = (np.arange(size, dtype=np.int64) >> (k - (m - 1))) & smask if m > 1 else np.zeros(size, dtype=np.int64)
        cur = np.concatenate([cur + logp[states, 0], cur + logp[states, 1]])
        k += 1
    return cur


def birkhoff_log2(chain: GibbsChain, word: Word) -> float:
    """log2 weight 2**(sum of q*phi over the word's windows), pressure-corrected.

    The exact cylinder measure divided by 2**birkhoff_log2 equals
    nu[first state] * h[last state], which is what the certified Gibbs
    constant bounds.
    """
    n_windows = word.n - chain.memory + 1
    return chain.q * chain.potential.word_sum(word) - n_windows * chain.pressure


# ---------------------------------------------------------------------------
# Gibbs / quasi-Bernoulli constants


@dataclass(frozen=True)
class GibbsConstants:
    gamma: float
    qb_min: float
    qb_max: float


def gibbs_constants(chain: GibbsChain, max_len: int = 12) -> GibbsConstants:
    """Certified Gibbs constant and exact quasi-Bernoulli extremes.

    gamma bounds the ratio of the exact cylinder measure to the Birkhoff
    weight (see :func:`birkhoff_log2`); for a Markov chain that ratio is
    exactly nu[first state] * h[last state], so the certified constant is the
    extreme of those products over state pairs.

    qb_min/qb_max are the exact extremes of mu(A concat B) / (mu(A) mu(B))
    over nonempty word pairs with lengths <= max_len.  The ratio depends on A
    only through its final state, so the sweep enumerates (state, B) pairs;
    for a finite-memory chain the extremes stabilize once |B| reaches the
    memory.
    """
    if max_len > 16:
        raise ValueError("max_len must be at most 16")
    m = chain.memory
    S = chain.n_states
    if S * (1 << max_len) > (1 << 26):
        raise MemoryBudgetError("conditional-measure tables exceed the memory budget")
    prods = np.outer(chain.nu, chain.h).ravel()
    gamma = float(max(prods.max(), 1.0 / prods.min()))

    smask = S - 1
    qb_min, qb_max = np.inf, -np.inf
    cond = np.ones((S, 1))  # cond[u, code(B)] = mu(B | previous state u)
    for k in range(1, max_len + 1):
        size = 1 << (k - 1)
        codes = np.arange(size, dtype=np.int64)
        if m == 1:
            states = np.zeros((S, size), dtype=np.int64)
        elif k - 1 >= m - 1:
            states = np.broadcast_to((codes >> (k - m)) & smask, (S, size))
        else:
            consumed = k - 1
            u = np.arange(S, dtype=np.int64)[:, None]
            states = ((u >> consumed) | (codes << (m - 1 - consumed))) & smask
        newc = np.empty((S, 2 * size))
        newc[:, :size] = cond * chain.p[states, 0]
        newc[:, size:] = cond * chain.p[states, 1]
        cond = newc
        if k >= max(m - 1, 1):
            mu_k = np.exp2(log2_measure_table(chain, k))
        else:
            mu_k = np.array(
                [cylinder_measure(chain, Word.from_code(c, k)) for c in range(1 << k)]
            )
        ratios = cond / mu_k[None, :]
        qb_min = min(qb_min, float(ratios.min()))
        qb_max = max(qb_max, float(ratios.max()))
    return GibbsConstants(gamma, qb_min, qb_max)


# ---------------------------------------------------------------------------
# sampling


@njit(cache=True, nogil=True)
def _markov_fill(u, p1, state, shift, smask, out):
    for i in range(u.shape[0]):
        b = 1 if u[i] < p1[state] else 0
        out[i] = b
        state = ((state >> 1) | (b << shift)) & smask
    return state


def sample_orbit(
    chain: GibbsChain,
    length: int,
    seed: int | None = None,
    rng: np.random.Generator | None = None,
    max_length: int = 1 << 31,
) -> Orbit:
    """Sample an orbit of the chain; deterministic given the seed.

    Generator contract: a 64-bit master seed feeds numpy's PCG64; parallel
    replicates must draw their generators from :func:`stream` so results do
    not depend on scheduling or thread count.
    """
    m = chain.memory
    if length < m:
        raise ValueError("orbit length must be at least the potential memory")
    if length > max_length:
        raise MemoryBudgetError(f"orbit length {length} exceeds the budget {max_length}")
    if rng is None:
        rng = np.random.Generator(np.random.PCG64(seed))
    bits = np.empty(length, dtype=np.uint8)
    state = int(rng.choice(chain.n_states, p=chain.pi)) if m > 1 else 0
    for i in range(m - 1):
        bits[i] = (state >> i) & 1
    p1 = np.ascontiguousarray(chain.p[:, 1])
    shift = max(m - 2, 0)
    smask = chain.n_states - 1
    pos = m - 1
    chunk = 1 << 22
    while pos < length:
        take = min(chunk, length - pos)
        u = rng.random(take)
        state = _markov_fill(u, p1, state, shift, smask, bits[pos : pos + take])
        pos += take
    meta = {"seed": seed, "memory": m, "q": chain.q}
    return Orbit(pack_bits(bits), length, meta)


def stream(seed: int, replicate: int) -> np.random.Generator:
    """Independent generator for one replicate, via PCG64 jump-ahead."""
    return np.random.Generator(np.random.PCG64(seed).jumped(replicate))
