import numpy as np
import pytest
from fractions import Fraction

from thcover.covering import (
    _census_scan,
    circle_cover_report,
    estimate_dims,
    hit_census,
    subword_census,
)
from thcover.spectrum import Spectrum, predict_cover
from thcover.symbolic import CirclePoint, Orbit, Word, project_to_circle
from thcover.thermo import (
    MemoryBudgetError,
    Potential,
    gibbs_chain,
    cylinder_measure,
    sample_orbit,
    stream,
)

BERN = Potential.bernoulli(0.25)
FAIR = Potential(1, [-1.0, -1.0], normalized=True)


def naive_census(bits, n, K, start=1):
    seen = set()
    for l in range(start, min(start + K, len(bits) - n + 1)):
        seen.add(tuple(bits[l : l + n]))
    return len(seen)


def test_hit_census_examples():
    zeros = Orbit.from_string("0" * 64)
    assert hit_census(zeros, 3, 50).distinct == 1
    alt = Orbit.from_string("0101" * 16)
    c = hit_census(alt, 4, 10)
    assert c.distinct == 2
    seen_words = {str(Word.from_code(code, 4)) for code in np.flatnonzero(c.seen)}
    assert seen_words == {"0101", "1010"}


def test_census_identity_and_monotone():
    chain = gibbs_chain(BERN)
    orbit = sample_orbit(chain, 1 << 12, seed=7)
    n = 6
    seen, counts = _census_scan(orbit, n, [10, 100, 1000, 4000])
    ds = [c for c, _ in counts]
    assert all(a <= b for a, b in zip(ds, ds[1:]))
    census = hit_census(orbit, n, 4000)
    assert census.distinct + census.unhit == 1 << n
    assert census.distinct == ds[-1]


def test_census_matches_naive():
    rng = np.random.default_rng(12)
    chain = gibbs_chain(BERN)
    for trial in range(25):
        L = int(rng.integers(100, 1 << 14))
        orbit = sample_orbit(chain, L, rng=stream(2000, trial))
        bits = orbit.to_bits()
        n = int(rng.integers(1, 12))
        K = int(rng.integers(1, L))
        assert hit_census(orbit, n, K).distinct == naive_census(bits, n, K)


def test_census_budget_guard():
    orbit = Orbit.from_string("01" * 40)
    with pytest.raises(MemoryBudgetError):
        hit_census(orbit, 31, 10)


def test_estimate_dims_fair_coin_structure():
    chain = gibbs_chain(FAIR)
    orbit = sample_orbit(chain, 1 << 20, seed=3)
    pred = predict_cover(FAIR, None, 2.0)
    est = estimate_dims(orbit, 2.0, range(8, 13), slack=0.0, prediction=pred)
    # slack 0 means both censuses share the horizon: D + U = 2^n
    assert np.all(est.D + est.U == 1 << est.n_grid)
    # 1/kappa = 0.5 < h = 1: covered-dimension slope near 0.5
    assert est.slope_covered == pytest.approx(0.5, abs=0.1)
    assert not est.saturated.any()
    assert est.prediction.dim_covered == 0.5


def test_estimate_dims_saturation_flag():
    chain = gibbs_chain(FAIR)
    orbit = sample_orbit(chain, 1 << 10, seed=3)
    est = estimate_dims(orbit, 0.5, [8, 10], slack=0.0)
    assert est.saturated.all()
    assert np.all(est.K_covered <= orbit.length - est.n_grid)


def test_subword_census_exact_small():
    alt = Orbit.from_string("01" * 40)
    chain = gibbs_chain(BERN)
    rep = subword_census(alt, chain, 4, 60)
    assert rep.total_distinct == 2
    assert sum(b.count for b in rep.bins) == 2
    betas = sorted(b.beta_center for b in rep.bins)
    mu = cylinder_measure(chain, Word.from_string("0101"))
    want = -np.log2(mu) / 4
    # both subwords have the same measure class, one bin
    assert len(rep.bins) == 1
    assert abs(rep.bins[0].beta_center - want) <= rep.bin_width / 2


def test_subword_census_fair_single_class():
    chain = gibbs_chain(FAIR)
    orbit = sample_orbit(chain, 1 << 14, seed=8)
    rep = subword_census(orbit, chain, 6, 1 << 13, spectrum=Spectrum(FAIR))
    assert len(rep.bins) == 1
    b = rep.bins[0]
    assert abs(b.beta_center - 1.0) <= rep.bin_width / 2 + 1e-12
    assert b.count == 64  # coupon collector done by 2^13 draws of 64 words
    assert b.predicted == pytest.approx(1.0, abs=0.05)


def test_subword_census_bin_totals():
    chain = gibbs_chain(BERN)
    orbit = sample_orbit(chain, 1 << 16, seed=9)
    rep = subword_census(orbit, chain, 10, 1 << 15)
    assert sum(b.count for b in rep.bins) == rep.total_distinct


def test_circle_cover_fixed_point():
    zeros = Orbit.from_string("0" * 5000)
    rep = circle_cover_report(zeros, 0.9, 1, 4, 4096)
    # the intervals sit around 0; the depth-1 cell containing 0 is covered
    assert 0 not in rep.uncovered
    rep8 = circle_cover_report(zeros, 0.9, 8, 4, 4096)
    assert rep8.uncovered_cells > 0  # far cells never covered by shrinking radii


def test_circle_cover_guards():
    zeros = Orbit.from_string("0" * 100)
    with pytest.raises(ValueError, match="below 1/2"):
        circle_cover_report(zeros, 0.4, 4, 2, 50)
    with pytest.raises(ValueError, match="n_start"):
        circle_cover_report(zeros, 0.9, 4, 1, 50)
    with pytest.raises(ValueError, match="depth"):
        circle_cover_report(zeros, 0.9, 30, 4, 50)


def test_circle_point_source_exact():
    rep = circle_cover_report(CirclePoint(Fraction(1, 3)), 0.8, 6, 4, 2000)
    # orbit of 1/3 is {1/3, 2/3}; cells around both stay covered
    third = int(np.floor(1 / 3 * 64))
    two_third = int(np.floor(2 / 3 * 64))
    assert third not in rep.uncovered
    assert two_third not in rep.uncovered


def test_symbolic_circle_consistency_spot():
    # every symbolic hit maps into the circle interval of the matching time:
    # pi(C_{floor(kappa log2 l) + 1}(sigma^l x)) inside (T^l s - l^-kappa, + l^-kappa)
    chain = gibbs_chain(BERN)
    orbit = sample_orbit(chain, 4096, seed=10)
    kappa = 1.3
    s0 = orbit.project(0)
    for l in range(4, 200):
        k = int(np.floor(kappa * np.log2(l))) + 1
        w = orbit.window(l, k)
        lo = float(project_to_circle(w))
        hi = lo + 2.0**-k
        center = float(orbit.project(l))
        r = float(l) ** -kappa
        # interval arithmetic mod 1: cylinder must sit inside (center - r, center + r)
        a = (lo - (center - r)) % 1.0
        assert a + 2.0**-k <= 2 * r + 1e-9
