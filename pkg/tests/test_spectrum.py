import numpy as np
import pytest

from thcover.thermo import Potential, gibbs_chain, normalize, pressure
from thcover.spectrum import (
    Spectrum,
    entropy_spectrum,
    integrate_against,
    local_entropy_extremes,
    predict_cover,
    t_of_q,
    t_of_q_fd,
    upper_envelopes,
)

L43 = np.log2(4.0 / 3.0)
BERN = Potential.bernoulli(0.25)
FAIR = Potential(1, [-1.0, -1.0], normalized=True)
MARKOV = normalize(Potential.from_entries({"00": 0.0, "01": -2.0, "10": -1.0, "11": 0.0}))


def binary_entropy(a):
    return -a * np.log2(a) - (1 - a) * np.log2(1 - a)


def test_extremes_bernoulli():
    ext = local_entropy_extremes(BERN)
    assert ext.t_min == pytest.approx(L43, abs=1e-12)
    assert ext.t_peak == pytest.approx((2 + L43) / 2, abs=1e-11)
    assert ext.t_max == pytest.approx(2.0, abs=1e-12)
    assert ext.h_mu == pytest.approx(0.25 * 2 + 0.75 * L43, abs=1e-11)
    assert not ext.degenerate


def test_extremes_degenerate():
    ext = local_entropy_extremes(FAIR)
    assert (ext.t_min, ext.t_peak, ext.t_max, ext.h_mu) == pytest.approx((1, 1, 1, 1), abs=1e-11)
    assert ext.degenerate


def test_extremes_markov_cycle_oracle():
    # independent oracle: enumerate the cycles of the 2-node graph
    ext = local_entropy_extremes(MARKOV)
    phi = MARKOV.table  # indexed by code: 00->0, 10->1(code for word '10' is 1), 01->2, 11->3
    loops = [-phi[Word_code("00")], -phi[Word_code("11")]]
    two_cycle = (-phi[Word_code("01")] - phi[Word_code("10")]) / 2
    cycles = loops + [two_cycle]
    assert ext.t_min == pytest.approx(min(cycles), abs=1e-12)
    assert ext.t_max == pytest.approx(max(cycles), abs=1e-12)


def Word_code(s):
    from thcover.symbolic import Word

    return Word.from_string(s).code


def test_t_of_q_examples():
    assert t_of_q(BERN, 0.0) == pytest.approx((2 + L43) / 2, abs=1e-11)
    assert t_of_q(BERN, 1.0) == pytest.approx(0.25 * 2 + 0.75 * L43, abs=1e-11)
    for q in (-2.0, 0.3, 5.0):
        assert t_of_q(FAIR, q) == pytest.approx(1.0, abs=1e-11)


@pytest.mark.parametrize("q", [-3.0, -0.5, 0.0, 1.0, 2.5])
def test_t_of_q_matches_finite_differences(q):
    for pot in (BERN, MARKOV):
        assert t_of_q(pot, q) == pytest.approx(t_of_q_fd(pot, q), abs=1e-6)


def test_entropy_spectrum_examples():
    sp = Spectrum(BERN)
    ext = sp.extremes()
    assert sp.entropy(ext.t_peak) == pytest.approx(1.0, abs=1e-9)
    assert sp.entropy(ext.h_mu) == pytest.approx(ext.h_mu, abs=1e-6)
    # closed form at t = 1.5: Bernoulli(a) with 2a + L43 (1-a) = 1.5 maximizes
    a = (1.5 - L43) / (2 - L43)
    assert sp.entropy(1.5) == pytest.approx(binary_entropy(a), abs=1e-9)
    assert np.isnan(sp.entropy(2.5))
    assert np.isnan(sp.entropy(0.3))


def test_entropy_point_statuses():
    sp = Spectrum(BERN)
    assert sp.entropy_point(1.2).status == "ok"
    assert sp.entropy_point(2.0 - 2.0**-24).status == "endpoint-approximate"
    assert sp.entropy_point(2.5).status == "empty"
    spd = Spectrum(FAIR)
    pt = spd.entropy_point(1.0)
    assert pt.status == "degenerate" and pt.value == pytest.approx(1.0, abs=1e-12)


def test_profile_consistency():
    sp = Spectrum(BERN)
    prof = sp.profile()
    ext = prof.summary
    # Legendre duality across the grid, against the independent bisection
    E2 = sp.entropy_batch(prof.t_values)
    assert np.nanmax(np.abs(E2 - prof.E_values)) < 1e-8
    # t strictly decreasing, E below the diagonal, extremes bracket
    assert np.all(np.diff(prof.t_values) < 0)
    assert np.all(prof.E_values <= prof.t_values + 1e-9)
    assert prof.t_values.min() >= ext.t_min - 1e-9
    assert prof.t_values.max() <= ext.t_max + 1e-9
    for q in (-64.0, 64.0):
        assert ext.t_min - 1e-9 <= sp.t(q) <= ext.t_max + 1e-9


def test_degenerate_profile_constant():
    prof = Spectrum(FAIR).profile(np.linspace(-4, 4, 33))
    assert np.allclose(prof.t_values, 1.0, atol=1e-11)
    assert np.allclose(prof.E_values, 1.0, atol=1e-11)


def test_upper_envelopes():
    sp = Spectrum(BERN)
    prof = sp.profile()
    sup_lt, sup_ge = upper_envelopes(prof)
    # t decreases along the grid, so sup over s < t accumulates from the tail
    assert np.all(np.diff(sup_lt) <= 1e-12)   # non-increasing along the grid == non-decreasing in t
    assert np.all(np.diff(sup_ge) >= -1e-12)
    ipeak = np.argmin(np.abs(prof.t_values - prof.summary.t_peak))
    assert sup_lt[ipeak] == pytest.approx(1.0, abs=1e-6)
    assert sup_ge[ipeak] == pytest.approx(1.0, abs=1e-6)


def test_degenerate_iff_cohomologous():
    assert local_entropy_extremes(FAIR).degenerate
    # dyadic coboundary of the constant: phi(ab) = -1 + g(b) - g(a), exactly degenerate
    g = np.array([0.0, 0.3125])
    table = np.empty(4)
    for code in range(4):
        a, b = code & 1, code >> 1
        table[code] = -1.0 + g[b] - g[a]
    cob = Potential(2, table, normalized=True)
    assert abs(pressure(cob, 1.0)) < 1e-12
    assert local_entropy_extremes(cob).degenerate
    assert not local_entropy_extremes(MARKOV).degenerate


def test_predict_cover_cases():
    pred = predict_cover(BERN, BERN, 1 / 0.811278)
    assert pred.kappa_pair == pytest.approx(1 / (0.25 * 2 + 0.75 * L43), abs=1e-9)
    assert predict_cover(BERN, None, 1.0).dim_escape == 1.0
    assert predict_cover(BERN, None, 2.0).dim_covered == pytest.approx(0.5, abs=1e-12)
    p = predict_cover(BERN, None, 1 / 2.5)
    assert p.escape_empty and p.dim_escape == 0.0
    assert p.kappa_cover_all == pytest.approx(0.5, abs=1e-12)
    # escape set in the strip between the peak and the top entropy
    mid = predict_cover(BERN, None, 1 / 1.5)
    a = (1.5 - L43) / (2 - L43)
    assert mid.dim_escape == pytest.approx(binary_entropy(a), abs=1e-8)
    assert mid.dim_covered == 1.0
    # covered set in the strip between the measure entropy and the peak
    band = predict_cover(BERN, None, 1 / 1.0)
    a1 = (1.0 - L43) / (2 - L43)
    assert band.dim_covered == pytest.approx(binary_entropy(a1), abs=1e-8)
    assert band.dim_escape == 1.0
    with pytest.raises(ValueError):
        predict_cover(BERN, None, -1.0)


def test_endpoint_caveat_flag():
    assert predict_cover(BERN, None, 1 / 2.0).endpoint_caveat
    assert not predict_cover(BERN, None, 1 / 1.5).endpoint_caveat


def test_integrate_against_mixed_memory():
    from thcover.thermo import cylinder_measure
    from thcover.symbolic import Word

    chain = gibbs_chain(MARKOV)
    val = integrate_against(chain, BERN)
    direct = sum(
        cylinder_measure(chain, Word.from_code(c, 1)) * BERN.table[c] for c in range(2)
    )
    assert val == pytest.approx(direct, rel=1e-12)
